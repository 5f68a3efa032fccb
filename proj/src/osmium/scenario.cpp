#include "osmium/scenario.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "osmium/errors.hpp"

namespace osmium {

using nlohmann::json;

namespace {

Eigen::VectorXd to_vector(const json& j) {
  Eigen::VectorXd v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

Eigen::MatrixXd to_matrix(const json& j) {
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  return m;
}

SpeciesSystem parse_species(const json& j) {
  std::vector<Species> list;
  for (const auto& e : j) {
    Species s;
    s.name = e.at("name").get<std::string>();
    if (e.contains("molar_mass_g_mol"))
      s.molar_mass = e["molar_mass_g_mol"].get<double>() * 1e-3;
    else
      s.molar_mass = e.at("molar_mass_kg_mol").get<double>();
    s.charge = e.at("charge").get<int>();
    list.push_back(s);
  }
  return validate_system(list);
}

MaterialModel parse_material(const json& j, int s) {
  MaterialModel m;
  const auto& je = j.at("eos");
  std::string kind = je.at("kind").get<std::string>();
  if (kind == "constant_v") {
    m.eos = std::make_shared<ConstantVEos>(to_vector(je.at("V")));
  } else if (kind == "linear") {
    m.eos = std::make_shared<LinearEos>(je.at("a0").get<double>(), to_vector(je.at("a")));
  } else if (kind == "compressible") {
    m.eos = std::make_shared<CompressibleEos>(je.at("a0").get<double>(), to_vector(je.at("a")),
                                              je.at("kappa_p").get<double>());
  } else {
    fail(ErrorCode::ConfigError, "unknown eos kind " + kind);
  }

  const auto& jf = j.at("factors");
  kind = jf.at("kind").get<std::string>();
  if (kind == "ideal")
    m.factors = std::make_shared<IdealThermoFactors>();
  else if (kind == "constant")
    m.factors = std::make_shared<ConstantThermoFactors>(to_matrix(jf.at("X")));
  else
    fail(ErrorCode::ConfigError, "unknown factors kind " + kind);

  const auto& jd = j.at("diffusivities");
  kind = jd.at("kind").get<std::string>();
  if (kind == "constant")
    m.diffusivities = std::make_shared<ConstantDiffusivity>(to_matrix(jd.at("D")));
  else if (kind == "power_law")
    m.diffusivities = std::make_shared<PowerLawDiffusivity>(
        to_matrix(jd.at("D0")), jd.at("salt").get<int>(), jd.at("x_ref").get<double>(),
        jd.at("alpha").get<double>());
  else
    fail(ErrorCode::ConfigError, "unknown diffusivity kind " + kind);

  const auto& jv = j.at("viscosity");
  kind = jv.at("kind").get<std::string>();
  if (kind == "constant")
    m.viscosity = std::make_shared<ConstantViscosity>(jv.at("eta").get<double>(),
                                                      jv.at("zeta").get<double>());
  else if (kind == "polynomial")
    m.viscosity = std::make_shared<PolynomialViscosity>(
        to_matrix(jv.at("coeffs")), jv.at("i1").get<int>(), jv.at("i2").get<int>(),
        jv.value("sqrt_ratio", false), jv.at("zeta").get<double>());
  else
    fail(ErrorCode::ConfigError, "unknown viscosity kind " + kind);

  if (j.contains("domain")) {
    m.domain.x_phys_min = j["domain"].value("x_phys_min", 1e-10);
  }
  (void)s;
  return m;
}

VelocityBC parse_velocity_bc(const json& j) {
  VelocityBC bc;
  std::string kind = j.value("kind", "zero");
  if (kind == "zero") bc.kind = VelocityBC::Kind::Zero;
  else if (kind == "rotation") {
    bc.kind = VelocityBC::Kind::Rotation;
    bc.theta_dot = j.at("theta_dot").get<double>();
    if (j.contains("center")) {
      bc.center.x() = j["center"][0].get<double>();
      bc.center.y() = j["center"][1].get<double>();
    }
  } else if (kind == "manufactured") bc.kind = VelocityBC::Kind::Manufactured;
  else fail(ErrorCode::ConfigError, "unknown velocity bc kind " + kind);
  return bc;
}

SaltFluxBC parse_salt_bc(const json& j) {
  SaltFluxBC bc;
  std::string kind = j.value("kind", "zero");
  if (kind == "zero") bc.kind = SaltFluxBC::Kind::Zero;
  else if (kind == "given") {
    bc.kind = SaltFluxBC::Kind::Given;
    bc.value = j.at("value").get<double>();
  } else if (kind == "leak") bc.kind = SaltFluxBC::Kind::Leak;
  else if (kind == "proportional_to_current") {
    bc.kind = SaltFluxBC::Kind::ProportionalToCurrent;
    bc.alpha = j.at("alpha").get<double>();
  } else fail(ErrorCode::ConfigError, "unknown salt bc kind " + kind);
  return bc;
}

CurrentBC parse_current_bc(const json& j) {
  CurrentBC bc;
  std::string kind = j.value("kind", "zero");
  if (kind == "zero") bc.kind = CurrentBC::Kind::Zero;
  else if (kind == "given") {
    bc.kind = CurrentBC::Kind::Given;
    bc.value = j.at("value").get<double>();
  } else if (kind == "linear_butler_volmer") {
    bc.kind = CurrentBC::Kind::LinearButlerVolmer;
    bc.i0 = j.at("i0").get<double>();
    bc.alpha_sum = j.value("alpha_sum", 1.0);
    bc.V_e = j.at("V_e").get<double>();
  } else if (kind == "tanh_butler_volmer") {
    bc.kind = CurrentBC::Kind::TanhButlerVolmer;
    bc.i0 = j.at("i0").get<double>();
    bc.V_e = j.at("V_e").get<double>();
    bc.salt = j.at("salt").get<int>();
    bc.x_ref = j.at("x_ref").get<double>();
    bc.mu_coeff = j.value("mu_coeff", 0.5);
  } else if (kind == "weak_dirichlet") {
    bc.kind = CurrentBC::Kind::WeakDirichlet;
    bc.salt = j.at("salt").get<int>();
    bc.x_pin = j.at("x_pin").get<double>();
    bc.current_factor = j.value("current_factor", 2.0);
  } else fail(ErrorCode::ConfigError, "unknown current bc kind " + kind);
  return bc;
}

Constraint parse_constraint(const json& j) {
  Constraint c;
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "normalization") c.kind = Constraint::Kind::Normalization;
  else if (kind == "mean_pressure") {
    c.kind = Constraint::Kind::MeanPressure;
    c.value = j.value("value", 0.0);
  } else if (kind == "mean_potential") c.kind = Constraint::Kind::MeanPotential;
  else if (kind == "total_moles") {
    c.kind = Constraint::Kind::TotalMoles;
    c.salt = j.at("salt").get<int>();
    c.value = j.at("value").get<double>();
  } else if (kind == "total_mass") {
    c.kind = Constraint::Kind::TotalMass;
    c.value = j.at("value").get<double>();
  } else fail(ErrorCode::ConfigError, "unknown constraint kind " + kind);
  return c;
}

GeometrySpec parse_geometry(const json& j) {
  GeometrySpec g;
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "rectangle") {
    g.kind = GeometrySpec::Kind::Rectangle;
    g.x0 = j.value("x0", 0.0);
    g.y0 = j.value("y0", 0.0);
    g.x1 = j.value("x1", 1.0);
    g.y1 = j.value("y1", 1.0);
    g.nx = j.value("nx", 8);
    g.ny = j.value("ny", 8);
    g.crossed = j.value("crossed", false);
    g.grading = j.value("grading", 0.0);
  } else if (kind == "hull_trapezoid") {
    g.kind = GeometrySpec::Kind::HullTrapezoid;
    g.nx = j.value("nx", 20);
    g.ny = j.value("ny", 10);
    g.grading = j.value("grading", 0.0);
  } else if (kind == "annulus_box") {
    g.kind = GeometrySpec::Kind::AnnulusBox;
    g.cx = j.value("cx", 0.0);
    g.cy = j.value("cy", 0.0);
    g.r0 = j.value("r0", 0.5);
    g.hw = j.value("hw", 2.0);
    g.hh = j.value("hh", 1.0);
    g.rings = j.value("rings", 6);
    g.sectors = j.value("sectors", 32);
    g.grading = j.value("grading", 0.0);
  } else if (kind == "file") {
    g.kind = GeometrySpec::Kind::File;
    g.path = j.at("path").get<std::string>();
  } else fail(ErrorCode::ConfigError, "unknown geometry kind " + kind);
  return g;
}

}  // namespace

Mesh2D build_geometry(const GeometrySpec& g) {
  switch (g.kind) {
    case GeometrySpec::Kind::Rectangle:
      return make_rectangle(g.x0, g.y0, g.x1, g.y1, g.nx, g.ny, g.crossed, g.grading);
    case GeometrySpec::Kind::HullTrapezoid:
      return make_hull_trapezoid(g.nx, g.ny, g.grading);
    case GeometrySpec::Kind::AnnulusBox:
      return make_annulus_box(g.cx, g.cy, g.r0, g.hw, g.hh, g.rings, g.sectors, g.grading);
    case GeometrySpec::Kind::File:
      return read_mesh(g.path);
  }
  fail(ErrorCode::ConfigError, "bad geometry kind");
}

Scenario parse_scenario(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    fail(ErrorCode::ConfigError, std::string("scenario parse error: ") + e.what());
  }

  Scenario sc;
  sc.name = j.value("name", "unnamed");
  sc.system = parse_species(j.at("species"));
  const int s = sc.system.n() - 1;

  if (j.contains("basis")) {
    const auto& jb = j["basis"];
    Eigen::MatrixXi nu(jb.size(), sc.system.n());
    for (size_t r = 0; r < jb.size(); ++r)
      for (int c = 0; c < sc.system.n(); ++c) nu(static_cast<int>(r), c) = jb[r][c].get<int>();
    sc.nu = nu;
  }

  sc.material = parse_material(j.at("material"), s);
  sc.geometry = parse_geometry(j.at("geometry"));
  sc.order = j.value("order", 1);

  if (j.contains("refs")) {
    const auto& jr = j["refs"];
    sc.refs.L = jr.value("L", sc.refs.L);
    sc.refs.c_ref = jr.value("c_ref", sc.refs.c_ref);
    sc.refs.D_ref = jr.value("D_ref", sc.refs.D_ref);
    sc.refs.eta_ref = jr.value("eta_ref", sc.refs.eta_ref);
    sc.refs.T = jr.value("T", sc.refs.T);
    sc.refs.m_ref = jr.value("m_ref", sc.refs.m_ref);
  }

  for (auto it = j.at("bcs").begin(); it != j.at("bcs").end(); ++it) {
    BoundarySpec spec;
    const auto& jb = it.value();
    if (jb.contains("velocity")) spec.velocity = parse_velocity_bc(jb["velocity"]);
    spec.salts.assign(s, SaltFluxBC{});
    if (jb.contains("salts")) {
      if (static_cast<int>(jb["salts"].size()) != s)
        fail(ErrorCode::ConfigError, "salts bc list must have n-1 entries");
      for (int i = 0; i < s; ++i) spec.salts[i] = parse_salt_bc(jb["salts"][i]);
    }
    if (jb.contains("current")) spec.current = parse_current_bc(jb["current"]);
    sc.bcs[it.key()] = spec;
  }

  if (j.contains("constraints")) {
    if (j["constraints"].is_string()) {
      sc.constraints_auto = (j["constraints"].get<std::string>() == "auto");
      if (!sc.constraints_auto)
        fail(ErrorCode::ConfigError, "constraints must be 'auto' or an explicit list");
    } else {
      sc.constraints_auto = false;
      for (const auto& e : j["constraints"]) sc.constraints.items.push_back(parse_constraint(e));
    }
  }

  if (j.contains("initial")) {
    const auto& ji = j["initial"];
    sc.initial.x_nu = to_vector(ji.at("x_nu"));
    if (static_cast<int>(sc.initial.x_nu.size()) != s)
      fail(ErrorCode::ConfigError, "initial x_nu must have n-1 entries");
    if (ji.contains("perturbation")) {
      sc.initial.perturb_salt = ji["perturbation"].at("salt").get<int>();
      sc.initial.perturb_amplitude = ji["perturbation"].at("amplitude").get<double>();
      sc.initial.mode_x = ji["perturbation"].value("mode_x", 1);
      sc.initial.mode_y = ji["perturbation"].value("mode_y", 1);
    }
  } else {
    sc.initial.x_nu = Eigen::VectorXd::Zero(s);
  }

  if (j.contains("solver")) {
    const auto& js = j["solver"];
    sc.solver.tol = js.value("tol", 1e-10);
    sc.solver.max_iter = js.value("max_iter", 25);
    sc.solver.gamma = js.value("gamma", 1e-2);
    sc.solver.quad_degree = js.value("quad_degree", -1);
    sc.solver.line_search = js.value("line_search", false);
    sc.solver.max_update = js.value("max_update", 1e300);
  }
  if (j.contains("time")) {
    const auto& jt = j["time"];
    sc.time.scheme = jt.value("scheme", "radau2");
    sc.time.dt = jt.value("dt", 0.1);
    sc.time.steps = jt.value("steps", 20);
    sc.time.snapshot_every = jt.value("snapshot_every", 0);
    sc.time.consistent_init = jt.value("consistent_init", false);
  }
  sc.mms_case = j.value("mms", "");
  sc.transient = j.value("transient", false);

  // resolved echo with defaults filled in
  json echo = j;
  echo["order"] = sc.order;
  echo["constraints"] = sc.constraints_auto ? json("auto") : echo["constraints"];
  echo["refs"] = {{"L", sc.refs.L},       {"c_ref", sc.refs.c_ref}, {"D_ref", sc.refs.D_ref},
                  {"eta_ref", sc.refs.eta_ref}, {"T", sc.refs.T},   {"m_ref", sc.refs.m_ref}};
  echo["solver"] = {{"tol", sc.solver.tol},
                    {"max_iter", sc.solver.max_iter},
                    {"gamma", sc.solver.gamma},
                    {"quad_degree", sc.solver.quad_degree},
                    {"line_search", sc.solver.line_search},
                    {"max_update", sc.solver.max_update}};
  echo["time"] = {{"scheme", sc.time.scheme},
                  {"dt", sc.time.dt},
                  {"steps", sc.time.steps},
                  {"snapshot_every", sc.time.snapshot_every},
                  {"consistent_init", sc.time.consistent_init}};
  sc.resolved_json = echo.dump(2);
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open scenario " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

}  // namespace osmium
