#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace osmium {

// The linear-in-composition equation of state c_T = A + B x on the unit
// interval and its closed-form partial molar volumes.
struct AppendixAVolumes {
  double V1 = 0.0, V2 = 0.0;
  double identity_defect = 0.0;  // |x V1 + (1-x) V2 - 1/cT|
};
AppendixAVolumes appendix_a_volumes(double A, double B, double x);

// 1D two-species Fickian toy with zero-flux ends, evolved implicitly with the
// integral conservation conditions enforced by multipliers. With both
// conditions active a spatially uniform start stays uniform regardless of the
// perturbing source; with only the first condition the variance grows.
struct AppendixAEvolution {
  std::vector<double> integral_x;   // per step
  std::vector<double> integral_x2;  // per step
  std::vector<double> variance;     // per step
  double max_variance = 0.0;
  double drift_x = 0.0, drift_x2 = 0.0;
};
AppendixAEvolution appendix_a_evolution(double A, double B, int steps, double dt,
                                        double x0 = 0.4, bool both_constraints = true,
                                        bool perturbation = true, int nodes = 65);

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
};

// Cross-module invariant sweep; corrupt_transform flips one entry of Z through
// the test hook so the round-trip checks must fail.
std::vector<CheckResult> invariant_suite(unsigned seed = 20240801,
                                         bool corrupt_transform = false);

}  // namespace osmium
