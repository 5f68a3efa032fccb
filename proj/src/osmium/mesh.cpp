#include "osmium/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "osmium/errors.hpp"

namespace osmium {

int Mesh2D::tag_id(const std::string& name) const {
  for (size_t i = 0; i < tag_names.size(); ++i)
    if (tag_names[i] == name) return static_cast<int>(i);
  return -1;
}

int Mesh2D::add_tag(const std::string& name) {
  int id = tag_id(name);
  if (id >= 0) return id;
  tag_names.push_back(name);
  return static_cast<int>(tag_names.size()) - 1;
}

double Mesh2D::cell_area(int t) const {
  const auto& tri = tris[t];
  Eigen::Vector2d a = vertices[tri[1]] - vertices[tri[0]];
  Eigen::Vector2d b = vertices[tri[2]] - vertices[tri[0]];
  return 0.5 * (a.x() * b.y() - a.y() * b.x());
}

Eigen::Vector2d Mesh2D::centroid(int t) const {
  const auto& tri = tris[t];
  return (vertices[tri[0]] + vertices[tri[1]] + vertices[tri[2]]) / 3.0;
}

double Mesh2D::max_cell_diameter() const {
  double h = 0.0;
  for (const auto& tri : tris)
    for (int e = 0; e < 3; ++e)
      h = std::max(h, (vertices[tri[(e + 1) % 3]] - vertices[tri[(e + 2) % 3]]).norm());
  return h;
}

std::array<Eigen::Vector2d, 3> Mesh2D::bary_gradients(int t) const {
  const auto& tri = tris[t];
  Eigen::Matrix2d J;
  J.col(0) = vertices[tri[1]] - vertices[tri[0]];
  J.col(1) = vertices[tri[2]] - vertices[tri[0]];
  Eigen::Matrix2d Jinv = J.inverse();
  std::array<Eigen::Vector2d, 3> g;
  g[1] = Jinv.row(0);
  g[2] = Jinv.row(1);
  g[0] = -g[1] - g[2];
  return g;
}

void Mesh2D::finalize() {
  for (auto& tri : tris) {
    Eigen::Vector2d a = vertices[tri[1]] - vertices[tri[0]];
    Eigen::Vector2d b = vertices[tri[2]] - vertices[tri[0]];
    double det = a.x() * b.y() - a.y() * b.x();
    if (det == 0.0) fail(ErrorCode::ConfigError, "degenerate triangle");
    if (det < 0.0) std::swap(tri[1], tri[2]);
  }

  std::map<std::pair<int, int>, int> edge_map;
  edges.clear();
  tri_edges.assign(tris.size(), {-1, -1, -1});
  edge_tris.clear();
  for (size_t t = 0; t < tris.size(); ++t) {
    for (int e = 0; e < 3; ++e) {
      int a = tris[t][(e + 1) % 3], b = tris[t][(e + 2) % 3];
      auto key = std::minmax(a, b);
      auto it = edge_map.find(key);
      int id;
      if (it == edge_map.end()) {
        id = static_cast<int>(edges.size());
        edge_map[key] = id;
        edges.push_back({key.first, key.second});
        edge_tris.push_back({static_cast<int>(t), -1});
      } else {
        id = it->second;
        if (edge_tris[id][1] != -1) fail(ErrorCode::ConfigError, "edge shared by >2 cells");
        edge_tris[id][1] = static_cast<int>(t);
      }
      tri_edges[t][e] = id;
    }
  }

  edge_boundary_facet.assign(edges.size(), -1);
  for (size_t f = 0; f < boundary.size(); ++f) {
    auto& bf = boundary[f];
    auto key = std::minmax(bf.v0, bf.v1);
    auto it = edge_map.find(key);
    if (it == edge_map.end()) fail(ErrorCode::ConfigError, "boundary facet is not a mesh edge");
    int e = it->second;
    if (edge_tris[e][1] != -1)
      fail(ErrorCode::ConfigError, "boundary facet lies on an interior edge");
    if (edge_boundary_facet[e] != -1)
      fail(ErrorCode::ConfigError, "boundary edge tagged more than once");
    edge_boundary_facet[e] = static_cast<int>(f);
    bf.edge = e;
    bf.cell = edge_tris[e][0];
    for (int le = 0; le < 3; ++le)
      if (tri_edges[bf.cell][le] == e) bf.local_edge = le;
    // counterclockwise traversal of the adjacent (positively oriented) cell
    int a = tris[bf.cell][(bf.local_edge + 1) % 3];
    int b = tris[bf.cell][(bf.local_edge + 2) % 3];
    bf.v0 = a;
    bf.v1 = b;
    Eigen::Vector2d tvec = vertices[b] - vertices[a];
    bf.length = tvec.norm();
    bf.normal = Eigen::Vector2d(tvec.y(), -tvec.x()) / bf.length;
  }
  for (size_t e = 0; e < edges.size(); ++e)
    if (edge_tris[e][1] == -1 && edge_boundary_facet[e] == -1)
      fail(ErrorCode::ConfigError, "untagged boundary edge");
}

namespace {

double grade01(double t, double beta) {
  if (beta <= 0.0) return t;
  return 0.5 * (1.0 + std::tanh(beta * (2.0 * t - 1.0)) / std::tanh(beta));
}

}  // namespace

Mesh2D make_rectangle(double x0, double y0, double x1, double y1, int nx, int ny, bool crossed,
                      double grading, const std::array<std::string, 4>& tags) {
  Mesh2D m;
  int tl = m.add_tag(tags[0]), tr = m.add_tag(tags[1]), tb = m.add_tag(tags[2]),
      tt = m.add_tag(tags[3]);
  auto vid = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      double s = grade01(double(i) / nx, grading);
      double t = grade01(double(j) / ny, grading);
      m.vertices.push_back({x0 + s * (x1 - x0), y0 + t * (y1 - y0)});
    }
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), d = vid(i, j + 1);
      if (crossed) {
        int cidx = static_cast<int>(m.vertices.size());
        m.vertices.push_back(0.25 *
                             (m.vertices[a] + m.vertices[b] + m.vertices[c] + m.vertices[d]));
        m.tris.push_back({a, b, cidx});
        m.tris.push_back({b, c, cidx});
        m.tris.push_back({c, d, cidx});
        m.tris.push_back({d, a, cidx});
      } else {
        m.tris.push_back({a, b, c});
        m.tris.push_back({a, c, d});
      }
    }
  for (int j = 0; j < ny; ++j) {
    m.boundary.push_back({vid(0, j), vid(0, j + 1), tl});
    m.boundary.push_back({vid(nx, j), vid(nx, j + 1), tr});
  }
  for (int i = 0; i < nx; ++i) {
    m.boundary.push_back({vid(i, 0), vid(i + 1, 0), tb});
    m.boundary.push_back({vid(i, ny), vid(i + 1, ny), tt});
  }
  m.finalize();
  return m;
}

Mesh2D make_hull_trapezoid(int nx, int ny, double grading, double W0, double W1, double H) {
  Mesh2D m;
  int tp = m.add_tag("electrode_p"), tn = m.add_tag("electrode_n"), tw = m.add_tag("wall");
  auto vid = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      double xi = grade01(double(i) / nx, grading);
      double eta = grade01(double(j) / ny, grading);
      double y = H * eta;
      double xr = W0 + (W1 - W0) * eta;  // right side at this height
      m.vertices.push_back({xi * xr, y});
    }
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), d = vid(i, j + 1);
      m.tris.push_back({a, b, c});
      m.tris.push_back({a, c, d});
    }
  for (int j = 0; j < ny; ++j) {
    m.boundary.push_back({vid(0, j), vid(0, j + 1), tp});
    m.boundary.push_back({vid(nx, j), vid(nx, j + 1), tn});
  }
  for (int i = 0; i < nx; ++i) {
    m.boundary.push_back({vid(i, 0), vid(i + 1, 0), tw});
    m.boundary.push_back({vid(i, ny), vid(i + 1, ny), tw});
  }
  m.finalize();
  return m;
}

Mesh2D make_annulus_box(double cx, double cy, double r0, double hw, double hh, int n_rings,
                        int n_sectors, double grading) {
  Mesh2D m;
  int td = m.add_tag("disk");
  int tl = m.add_tag("left"), tr = m.add_tag("right"), tb = m.add_tag("bottom"),
      tt = m.add_tag("top");

  // sector angles: uniform plus the four box-corner directions
  std::vector<double> ang;
  for (int j = 0; j < n_sectors; ++j) ang.push_back(2.0 * M_PI * j / n_sectors);
  const double corner[4] = {std::atan2(hh, hw), std::atan2(hh, -hw),
                            std::atan2(-hh, -hw) + 2.0 * M_PI, std::atan2(-hh, hw) + 2.0 * M_PI};
  for (double c : corner) ang.push_back(std::fmod(c + 2.0 * M_PI, 2.0 * M_PI));
  std::sort(ang.begin(), ang.end());
  ang.erase(std::unique(ang.begin(), ang.end(),
                        [](double a, double b) { return std::abs(a - b) < 1e-12; }),
            ang.end());
  const int ns = static_cast<int>(ang.size());

  auto r_out = [&](double th) {
    double c = std::cos(th), s = std::sin(th);
    double rx = (std::abs(c) > 1e-14) ? hw / std::abs(c) : 1e300;
    double ry = (std::abs(s) > 1e-14) ? hh / std::abs(s) : 1e300;
    return std::min(rx, ry);
  };

  auto vid = [&](int i, int j) { return i * ns + (j % ns); };
  for (int i = 0; i <= n_rings; ++i)
    for (int j = 0; j < ns; ++j) {
      double s = grade01(double(i) / n_rings, grading);
      double r = r0 + s * (r_out(ang[j]) - r0);
      m.vertices.push_back({cx + r * std::cos(ang[j]), cy + r * std::sin(ang[j])});
    }
  for (int i = 0; i < n_rings; ++i)
    for (int j = 0; j < ns; ++j) {
      int a = vid(i, j), b = vid(i, j + 1), c = vid(i + 1, j + 1), d = vid(i + 1, j);
      m.tris.push_back({a, b, c});
      m.tris.push_back({a, c, d});
    }
  for (int j = 0; j < ns; ++j) m.boundary.push_back({vid(0, j), vid(0, j + 1), td});
  const double tol = 1e-9 * std::max(hw, hh);
  for (int j = 0; j < ns; ++j) {
    int a = vid(n_rings, j), b = vid(n_rings, j + 1);
    Eigen::Vector2d pa = m.vertices[a], pb = m.vertices[b];
    int tag;
    if (pa.x() > cx + hw - tol && pb.x() > cx + hw - tol) tag = tr;
    else if (pa.x() < cx - hw + tol && pb.x() < cx - hw + tol) tag = tl;
    else if (pa.y() > cy + hh - tol && pb.y() > cy + hh - tol) tag = tt;
    else if (pa.y() < cy - hh + tol && pb.y() < cy - hh + tol) tag = tb;
    else fail(ErrorCode::ConfigError, "annulus box: outer edge does not lie on one side");
    m.boundary.push_back({a, b, tag});
  }
  m.finalize();
  return m;
}

Mesh2D read_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open mesh file " + path);
  Mesh2D m;
  std::string kw;
  int n = 0;
  if (!(in >> kw >> n) || kw != "vertices") fail(ErrorCode::IoError, "expected 'vertices N'");
  m.vertices.resize(n);
  for (int i = 0; i < n; ++i) in >> m.vertices[i].x() >> m.vertices[i].y();
  if (!(in >> kw >> n) || kw != "triangles") fail(ErrorCode::IoError, "expected 'triangles M'");
  m.tris.resize(n);
  for (int i = 0; i < n; ++i) in >> m.tris[i][0] >> m.tris[i][1] >> m.tris[i][2];
  if (!(in >> kw >> n) || kw != "boundary") fail(ErrorCode::IoError, "expected 'boundary K'");
  for (int i = 0; i < n; ++i) {
    int a, b;
    std::string tag;
    in >> a >> b >> tag;
    m.boundary.push_back({a, b, m.add_tag(tag)});
  }
  if (!in) fail(ErrorCode::IoError, "truncated mesh file " + path);
  m.finalize();
  return m;
}

void write_mesh(const Mesh2D& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, "cannot write mesh file " + path);
  out.precision(17);
  out << "vertices " << mesh.n_vertices() << "\n";
  for (const auto& v : mesh.vertices) out << v.x() << " " << v.y() << "\n";
  out << "triangles " << mesh.n_cells() << "\n";
  for (const auto& t : mesh.tris) out << t[0] << " " << t[1] << " " << t[2] << "\n";
  out << "boundary " << mesh.boundary.size() << "\n";
  for (const auto& b : mesh.boundary)
    out << b.v0 << " " << b.v1 << " " << mesh.tag_names[b.tag] << "\n";
}

Mesh2D refine_uniform(const Mesh2D& mesh) {
  Mesh2D m;
  m.tag_names = mesh.tag_names;
  m.vertices = mesh.vertices;
  std::map<std::pair<int, int>, int> mid;
  auto midpoint = [&](int a, int b) {
    auto key = std::minmax(a, b);
    auto it = mid.find(key);
    if (it != mid.end()) return it->second;
    int id = static_cast<int>(m.vertices.size());
    m.vertices.push_back(0.5 * (mesh.vertices[a] + mesh.vertices[b]));
    mid[key] = id;
    return id;
  };
  for (const auto& t : mesh.tris) {
    int a = t[0], b = t[1], c = t[2];
    int ab = midpoint(a, b), bc = midpoint(b, c), ca = midpoint(c, a);
    m.tris.push_back({a, ab, ca});
    m.tris.push_back({ab, b, bc});
    m.tris.push_back({ca, bc, c});
    m.tris.push_back({ab, bc, ca});
  }
  for (const auto& bf : mesh.boundary) {
    int mm = midpoint(bf.v0, bf.v1);
    m.boundary.push_back({bf.v0, mm, bf.tag});
    m.boundary.push_back({mm, bf.v1, bf.tag});
  }
  m.finalize();
  return m;
}

}  // namespace osmium
