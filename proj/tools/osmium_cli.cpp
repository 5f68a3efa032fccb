#include <CLI11.hpp>
#include <cstdio>
#include <string>

#include "osmium/errors.hpp"
#include "osmium/runner.hpp"

using namespace osmium;

namespace {

int finish(const RunOutcome& out) {
  if (!out.message.empty()) std::printf("%s\n", out.message.c_str());
  if (out.exit_code == 0) std::printf("ok  E1=%.6g  E2=%.6g\n", out.E1, out.E2);
  return out.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"electroneutral multicomponent electrolyte flow toolchain"};
  app.require_subcommand(1);

  std::string scenario_path, outdir = "run";
  bool override_illposed = false;
  unsigned seed = 20240801;
  int levels = 3;
  double A = 2.0, B = 1.0;

  auto add_common = [&](CLI::App* cmd, bool needs_scenario) {
    if (needs_scenario) cmd->add_option("--scenario", scenario_path, "scenario file")->required();
    cmd->add_option("--out", outdir, "output directory");
    cmd->add_flag("--override-illposed", override_illposed,
                  "run despite an ill-posedness warning");
    cmd->add_option("--seed", seed, "random seed for the check suite");
  };

  auto* c_steady = app.add_subcommand("steady", "steady Newton solve");
  add_common(c_steady, true);
  auto* c_trans = app.add_subcommand("transient", "implicit Runge-Kutta time integration");
  add_common(c_trans, true);
  auto* c_conv = app.add_subcommand("convergence", "manufactured-solution order study");
  add_common(c_conv, true);
  c_conv->add_option("--levels", levels, "number of uniform refinements");
  auto* c_check = app.add_subcommand("check", "run the invariant suite");
  add_common(c_check, false);
  auto* c_appa = app.add_subcommand("appendix-a", "conservation-pair demonstration");
  add_common(c_appa, false);
  c_appa->add_option("--A", A, "EOS offset");
  c_appa->add_option("--B", B, "EOS slope");

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_steady->parsed())
      return finish(run_steady(load_scenario(scenario_path), outdir, override_illposed));
    if (c_trans->parsed())
      return finish(run_transient_cmd(load_scenario(scenario_path), outdir, override_illposed));
    if (c_conv->parsed())
      return finish(run_convergence(load_scenario(scenario_path), levels, outdir));
    if (c_check->parsed()) return finish(run_check(outdir, seed));
    if (c_appa->parsed()) return finish(run_appendix_a(A, B, outdir));
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    switch (e.code()) {
      case ErrorCode::NonConvergence:
        return 3;
      default:
        return 2;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
