#pragma once

#include <array>
#include <vector>

namespace doess {

// Survival probability vs time for X/Y/Z initial polarizations. times[0] is
// T = 0 (cycle count 0) with value 1 by construction.
struct CoherenceCurve {
  std::vector<int> cycles;
  std::vector<double> times;                     // us
  std::array<std::vector<double>, 3> values;     // indexed x, y, z
  std::array<bool, 3> axis_present = {true, true, true};
};

struct AxisFit {
  double contrast = 0.0;  // C_sigma
  double kappa = 0.0;     // decay rate, 1/us
  bool unfittable = false;
};

struct FitResult {
  std::array<AxisFit, 3> axes;   // x, y, z
  double contrast = 0.0;         // average over fitted axes
  double kappa = 0.0;
  double coherence_time = 0.0;   // 1/kappa
  bool unfittable = false;
};

// Per-axis nonlinear least squares of C * exp(-kappa * T), initialized from a
// log-linear regression; kappa clamped >= 0. Axes whose points all sit below
// the noise floor (0.02) are flagged unfittable.
FitResult fit_exponential(const CoherenceCurve& curve);

// Normalized area under the fitted decay: (1/T_max) * integral of
// (1/3) sum_sigma C_sigma exp(-kappa_sigma t); closed form with kappa -> 0
// limit C_sigma.
double coherence_score(const FitResult& fit, double t_max);

}  // namespace doess
