#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>

#include "osmium/mesh.hpp"
#include "osmium/thermo.hpp"

namespace osmium {

// Reference scales; the solver assembles everything nondimensionally.
struct NondimRefs {
  double L = 1e-3;        // m
  double c_ref = 1e4;     // mol/m^3
  double D_ref = 1e-9;    // m^2/s
  double eta_ref = 1e-3;  // Pa s
  double T = 298.15;      // K
  double m_ref = 0.1;     // kg/mol (density scale rho_ref = c_ref * m_ref)

  double U() const { return D_ref / L; }
  double t_ref() const { return L / U(); }
  double p_ref() const { return eta_ref * U() / L; }
  double N_ref() const { return c_ref * U(); }
  double J_ref() const { return PhysicalConstants::F * N_ref(); }
  double phi_ref() const { return PhysicalConstants::R * T / PhysicalConstants::F; }
  double RT() const { return PhysicalConstants::R * T; }
  double rho_ref() const { return c_ref * m_ref; }
  // OSM pressure-term coefficient p_ref/(RT c_ref)
  double eps_p() const { return p_ref() / (RT() * c_ref); }
  // convection/inertia coefficient rho_ref U L / eta_ref
  double reynolds() const { return rho_ref() * U() * L / eta_ref; }
};

struct VelocityBC {
  enum class Kind { Zero, Rotation, Manufactured };
  Kind kind = Kind::Zero;
  double theta_dot = 0.0;  // nondimensional angular rate for Rotation
  Eigen::Vector2d center{0.0, 0.0};
};

struct SaltFluxBC {
  enum class Kind { Zero, Given, Leak, ProportionalToCurrent };
  Kind kind = Kind::Zero;
  double value = 0.0;  // Given, nondimensional
  double alpha = 0.5;  // g_i = alpha * g_J / F
};

struct CurrentBC {
  enum class Kind { Zero, Given, LinearButlerVolmer, TanhButlerVolmer, WeakDirichlet };
  Kind kind = Kind::Zero;
  double value = 0.0;           // Given, nondimensional
  double i0 = 1e4;              // exchange current density, A/m^2
  double alpha_sum = 1.0;       // apparent transfer coefficient sum (linear BV)
  double V_e = 0.0;             // electrode voltage, V
  int salt = -1;                // reference salt (tanh BV) / pinned salt (weak Dirichlet)
  double x_ref = 0.075;         // reference salt fraction in the i0 model
  double mu_coeff = 0.5;        // reference-electrode coefficient in tanh BV
  double x_pin = 0.0;           // weak-Dirichlet target composition
  double current_factor = 2.0;  // J.n = factor * F * N_salt.n under weak Dirichlet
};

struct BoundarySpec {
  VelocityBC velocity;
  std::vector<SaltFluxBC> salts;
  CurrentBC current;
};

struct Constraint {
  enum class Kind { Normalization, MeanPressure, MeanPotential, TotalMoles, TotalMass };
  Kind kind = Kind::Normalization;
  double value = 0.0;  // target (nondimensional) where applicable
  int salt = 0;        // TotalMoles
};

struct ConstraintSet {
  std::vector<Constraint> items;
  bool has(Constraint::Kind k) const {
    for (const auto& c : items)
      if (c.kind == k) return true;
    return false;
  }
};

struct GeometrySpec {
  enum class Kind { Rectangle, HullTrapezoid, AnnulusBox, File };
  Kind kind = Kind::Rectangle;
  double x0 = 0, y0 = 0, x1 = 1, y1 = 1;
  int nx = 8, ny = 8;
  bool crossed = false;
  double grading = 0.0;
  double cx = 0, cy = 0, r0 = 0.5, hw = 2.0, hh = 1.0;
  int rings = 6, sectors = 32;
  std::string path;
};

struct SolverSettings {
  double tol = 1e-10;
  int max_iter = 25;
  double gamma = 1e-2;
  int quad_degree = -1;
  bool line_search = false;
  double max_update = 1e300;  // per-component Newton update clip
};

struct TimeSettings {
  std::string scheme = "radau2";  // radau1 (implicit Euler) | radau2
  double dt = 0.1;                // nondimensional step
  int steps = 20;
  int snapshot_every = 0;
  bool consistent_init = false;
};

struct InitialState {
  Eigen::VectorXd x_nu;  // uniform transformed fractions (length s)
  int perturb_salt = -1;
  double perturb_amplitude = 0.0;
  int mode_x = 1, mode_y = 1;
};

struct Scenario {
  std::string name = "unnamed";
  SpeciesSystem system;
  std::optional<Eigen::MatrixXi> nu;  // neutralization basis (auto when absent)
  MaterialModel material;
  GeometrySpec geometry;
  int order = 1;
  NondimRefs refs;
  std::map<std::string, BoundarySpec> bcs;  // keyed by boundary tag
  bool constraints_auto = true;
  ConstraintSet constraints;  // used when constraints_auto is false
  InitialState initial;
  SolverSettings solver;
  TimeSettings time;
  std::string mms_case;  // "", "diffusion", "stokes"
  bool transient = false;
  std::string resolved_json;  // echo of the fully resolved configuration

  Scenario() : system(validate_system({{"a", 1.0, 0}, {"b", 1.0, 1}, {"c", 1.0, -1}})) {}
};

Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& json_text);
Mesh2D build_geometry(const GeometrySpec& g);

}  // namespace osmium
