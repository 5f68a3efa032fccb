#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "osmium/assembly.hpp"
#include "osmium/errors.hpp"
#include "osmium/runner.hpp"

using namespace osmium;

namespace {

const char* kMinimal = R"({
  "name": "mini",
  "species": [
    {"name": "EMC", "molar_mass_g_mol": 104.105, "charge": 0},
    {"name": "Li+", "molar_mass_g_mol": 6.935, "charge": 1},
    {"name": "PF6-", "molar_mass_g_mol": 144.97, "charge": -1}
  ],
  "material": {
    "eos": {"kind": "constant_v", "V": [8e-5, 6e-5]},
    "factors": {"kind": "ideal"},
    "diffusivities": {"kind": "constant", "D": [[0, 2e-9, 1.5e-9],[2e-9, 0, 1e-9],[1.5e-9, 1e-9, 0]]},
    "viscosity": {"kind": "constant", "eta": 1e-3, "zeta": 1e-6}
  },
  "geometry": {"kind": "rectangle", "nx": 2, "ny": 2},
  "order": 1,
  "initial": {"x_nu": [0.85, 0.075]},
  "bcs": {
    "left":   {"salts": [{"kind": "zero"}, {"kind": "zero"}]},
    "right":  {"salts": [{"kind": "zero"}, {"kind": "zero"}]},
    "bottom": {"salts": [{"kind": "zero"}, {"kind": "zero"}]},
    "top":    {"salts": [{"kind": "zero"}, {"kind": "zero"}]}
  }
})";

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("scenario parsing fills defaults and converts units") {
  Scenario sc = parse_scenario(kMinimal);
  CHECK(sc.system.n() == 3);
  CHECK(sc.system[0].molar_mass == doctest::Approx(0.104105).epsilon(1e-15));
  CHECK(sc.solver.tol == 1e-10);
  CHECK(sc.solver.gamma == 1e-2);
  CHECK(sc.time.scheme == "radau2");
  CHECK(sc.constraints_auto);
  CHECK(sc.refs.L == 1e-3);
}

TEST_CASE("scenario echo round-trips to the identical resolved configuration") {
  Scenario sc = parse_scenario(kMinimal);
  Scenario sc2 = parse_scenario(sc.resolved_json);
  CHECK(sc2.resolved_json == sc.resolved_json);
}

TEST_CASE("invalid configurations raise ConfigError") {
  CHECK_THROWS_AS(parse_scenario("{not json"), Error);
  // wrong salt BC arity
  std::string bad = kMinimal;
  auto pos = bad.find("\"left\":   {\"salts\": [{\"kind\": \"zero\"}, {\"kind\": \"zero\"}]}");
  bad.replace(pos, 58, "\"left\":   {\"salts\": [{\"kind\": \"zero\"}]}");
  CHECK_THROWS_AS(parse_scenario(bad), Error);
}

TEST_CASE("bundled scenarios load and validate") {
  for (const char* name :
       {"equilibrium", "mini_hull_steady", "mini_hull_transient", "cosolvent",
        "confined_case1", "illposed_case2", "mms_diffusion", "mms_stokes", "wd_disk"}) {
    INFO("scenario ", name);
    Scenario sc = load_scenario(std::string(SCENARIO_DIR) + "/" + name + ".scn");
    CHECK_NOTHROW(DiscreteSystem{sc});
  }
}

TEST_CASE("ill-posed transient requires the override flag") {
  Scenario sc = load_scenario(std::string(SCENARIO_DIR) + "/illposed_case2.scn");
  RunOutcome out = run_transient_cmd(sc, "run_test_illposed");
  CHECK(out.exit_code == 4);
  RunOutcome forced = run_transient_cmd(sc, "run_test_illposed_forced", true);
  CHECK(forced.exit_code != 4);
}

TEST_CASE("steady runs are deterministic byte for byte") {
  Scenario sc = load_scenario(std::string(SCENARIO_DIR) + "/equilibrium.scn");
  auto r1 = run_steady(sc, "run_det_a");
  auto r2 = run_steady(sc, "run_det_b");
  REQUIRE(r1.exit_code == 0);
  REQUIRE(r2.exit_code == 0);
  CHECK(slurp("run_det_a/convergence.csv") == slurp("run_det_b/convergence.csv"));
  CHECK(slurp("run_det_a/metrics.csv") == slurp("run_det_b/metrics.csv"));
  CHECK(!slurp("run_det_a/scenario_resolved.json").empty());
  CHECK(slurp("run_det_a/fields.vtk").substr(0, 26) == "# vtk DataFile Version 2.0");
}

TEST_CASE("equilibrium scenario solves through the runner") {
  Scenario sc = load_scenario(std::string(SCENARIO_DIR) + "/equilibrium.scn");
  RunOutcome out = run_steady(sc, "run_test_eq");
  CHECK(out.exit_code == 0);
  CHECK(out.newton.iterations <= 2);
  CHECK(out.E1 <= 1e-12);
  CHECK(out.E2 <= 1e-12);
}
