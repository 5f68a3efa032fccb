#pragma once

#include <random>

#include "osmium/assembly.hpp"

namespace testutil {

using namespace osmium;

// EMC/Li/PF6-like three-species electrolyte with synthetic material models.
inline Scenario emc_base_scenario() {
  Scenario sc;
  sc.name = "test";
  sc.system = validate_system(
      {{"EMC", 0.104105, 0}, {"Li+", 0.006935, +1}, {"PF6-", 0.14497, -1}});
  sc.material.eos = std::make_shared<ConstantVEos>(Eigen::Vector2d(8e-5, 6e-5));
  sc.material.factors = std::make_shared<IdealThermoFactors>();
  Eigen::MatrixXd D(3, 3);
  D << 0.0, 2e-9, 1.5e-9, 2e-9, 0.0, 1e-9, 1.5e-9, 1e-9, 0.0;
  sc.material.diffusivities = std::make_shared<ConstantDiffusivity>(D);
  sc.material.viscosity = std::make_shared<ConstantViscosity>(1e-3, 1e-6);
  sc.refs.L = 1e-3;
  sc.refs.c_ref = 1.2e4;
  sc.refs.D_ref = 1.5e-9;
  sc.refs.eta_ref = 1e-3;
  sc.refs.T = 298.15;
  sc.initial.x_nu = Eigen::Vector2d(0.85, 0.075);
  sc.order = 1;
  return sc;
}

inline BoundarySpec all_zero_bc(int s) {
  BoundarySpec b;
  b.salts.assign(s, SaltFluxBC{});
  return b;
}

// Confined zero-flux box, steady case (i).
inline Scenario equilibrium_scenario(int nx = 4, int ny = 4, int order = 1) {
  Scenario sc = emc_base_scenario();
  sc.geometry.kind = GeometrySpec::Kind::Rectangle;
  sc.geometry.nx = nx;
  sc.geometry.ny = ny;
  sc.order = order;
  for (const char* tag : {"left", "right", "bottom", "top"}) sc.bcs[tag] = all_zero_bc(2);
  return sc;
}

// Two-cell square with tanh Butler-Volmer electrodes and a solvent leak.
inline Scenario bv_leak_scenario(int nx = 1, int ny = 1) {
  Scenario sc = emc_base_scenario();
  sc.material.eos =
      std::make_shared<LinearEos>(9500.0, Eigen::Vector2d(600.0, 2400.0));  // case (ii)
  sc.geometry.kind = GeometrySpec::Kind::Rectangle;
  sc.geometry.nx = nx;
  sc.geometry.ny = ny;
  sc.transient = true;

  BoundarySpec wall = all_zero_bc(2);
  BoundarySpec ep = all_zero_bc(2), en = all_zero_bc(2);
  ep.current.kind = CurrentBC::Kind::TanhButlerVolmer;
  ep.current.i0 = 1e4;
  ep.current.V_e = 0.1;
  ep.current.salt = 1;
  ep.current.x_ref = 0.075;
  ep.salts[0].kind = SaltFluxBC::Kind::Leak;
  ep.salts[1].kind = SaltFluxBC::Kind::ProportionalToCurrent;
  ep.salts[1].alpha = 0.5;
  en = ep;
  en.current.V_e = 0.0;
  en.salts[0] = SaltFluxBC{};  // leak only on the positive electrode
  wall.salts[1].kind = SaltFluxBC::Kind::ProportionalToCurrent;
  wall.salts[1].alpha = 0.5;

  sc.bcs["left"] = ep;
  sc.bcs["right"] = en;
  sc.bcs["bottom"] = wall;
  sc.bcs["top"] = wall;
  return sc;
}

// Deterministic small perturbation of every dof (keeps compositions valid).
inline Eigen::VectorXd perturbed_state(const DiscreteSystem& sys, double amp, unsigned seed) {
  Eigen::VectorXd u = sys.initial_state();
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int i = 0; i < u.size(); ++i) u[i] += amp * d(rng);
  return u;
}

}  // namespace testutil
