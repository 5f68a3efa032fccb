#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

namespace osmium {

// Conforming 2D triangle mesh with tagged boundary. Local edge e of a cell is
// the edge opposite local vertex e, i.e. it connects vertices (e+1)%3 and
// (e+2)%3; cells are stored positively oriented.
class Mesh2D {
 public:
  struct BoundaryFacet {
    int v0 = -1, v1 = -1;   // as given (v0->v1 runs counterclockwise around the domain after finalize)
    int tag = -1;
    int edge = -1;          // global edge id
    int cell = -1;          // adjacent cell
    int local_edge = -1;
    Eigen::Vector2d normal; // outward unit normal
    double length = 0.0;
  };
  struct Edge {
    int v0, v1;  // v0 < v1 (global orientation for shared dofs)
  };

  std::vector<Eigen::Vector2d> vertices;
  std::vector<std::array<int, 3>> tris;
  std::vector<BoundaryFacet> boundary;
  std::vector<std::string> tag_names;

  // derived connectivity
  std::vector<Edge> edges;
  std::vector<std::array<int, 3>> tri_edges;
  std::vector<std::array<int, 2>> edge_tris;      // [-1,-1]-padded
  std::vector<int> edge_boundary_facet;           // -1 for interior edges

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_cells() const { return static_cast<int>(tris.size()); }
  int n_edges() const { return static_cast<int>(edges.size()); }

  int tag_id(const std::string& name) const;
  int add_tag(const std::string& name);

  // Build edges/adjacency, orient cells positively, attach boundary facets,
  // compute outward normals. Throws on non-conforming or untagged boundaries.
  void finalize();

  double cell_area(int t) const;
  Eigen::Vector2d centroid(int t) const;
  double max_cell_diameter() const;

  // gradients of the barycentric coordinates of cell t
  std::array<Eigen::Vector2d, 3> bary_gradients(int t) const;
};

// Structured generators. grading > 0 clusters nodes toward both ends of each
// parametric direction (tanh profile); 0 keeps them uniform.
Mesh2D make_rectangle(double x0, double y0, double x1, double y1, int nx, int ny,
                      bool crossed = false, double grading = 0.0,
                      const std::array<std::string, 4>& tags = {"left", "right", "bottom",
                                                                "top"});
// Right trapezoid (0,0)-(0,H)-(W1,H)-(W0,0): left edge tag electrode_p, slanted
// right edge electrode_n, bottom/top walls. The standard cell uses
// W0=10, W1=5, H=5.
Mesh2D make_hull_trapezoid(int nx, int ny, double grading = 0.0, double W0 = 10.0,
                           double W1 = 5.0, double H = 5.0);
// Box [cx-hw,cx+hw] x [cy-hh,cy+hh] minus the polygonal disk of radius r0
// centered at (cx,cy); inner boundary tagged "disk", outer sides tagged
// left/right/bottom/top.
Mesh2D make_annulus_box(double cx, double cy, double r0, double hw, double hh, int n_rings,
                        int n_sectors, double grading = 0.0);

// Plain-text mesh format: "vertices N" then N lines "x y"; "triangles M" then M
// index triples; "boundary K" then K lines "v0 v1 tag".
Mesh2D read_mesh(const std::string& path);
void write_mesh(const Mesh2D& mesh, const std::string& path);

// Uniform refinement (each triangle into four); boundary tags inherited.
Mesh2D refine_uniform(const Mesh2D& mesh);

}  // namespace osmium
