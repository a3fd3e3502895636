#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "doess/fit.hpp"
#include "doess/rng.hpp"
#include "doess/sequences.hpp"
#include "doess/spin_core.hpp"

namespace doess {

enum class Metric { Overlap, Polarization };
enum class DisorderDist { Gaussian, Lorentzian };

struct SimulatorParams {
  int n_spins = 5;
  double disorder_std = 0.6;       // W, rad/us
  double coupling_scale = 0.003;   // J0, rad/us * um^3
  double box_size = 1.0;           // um
  double min_separation = 0.005;   // um, rejection guard against 1/r^3 blowup
  double pulse_error_std = 0.01;   // fractional over/under-rotation
  double rabi = 62.832;            // rad/us
  double tau = 0.1;                // us
  int realizations = 100;              // K for full coherence curves
  int realizations_simplified = 30;    // K for the simplified score
  std::vector<int> cycle_grid = {1, 2, 4, 8, 16, 32, 64, 128};
  std::array<int, 3> simplified_points = {4, 16, 64};
  uint64_t seed = 0;
  int jobs = 0;  // worker cap; 0 = all logical cores
  Metric metric = Metric::Overlap;
  DisorderDist disorder_dist = DisorderDist::Gaussian;
  InteractionForm interaction_form = InteractionForm::XXYYm2ZZ;

  void validate() const;
};

struct ClusterRealization {
  Eigen::VectorXd h;            // disorder fields, rad/us
  Eigen::MatrixXd couplings;    // J_ij from sampled positions, rad/us
  Eigen::MatrixXd positions;    // n x 3, um (kept for diagnostics)
  std::vector<double> eps;      // per-pulse fractional rotation errors
};

// One sampled cluster: Gaussian (or Lorentzian) disorder, dipolar couplings
// J0 (1 - 3 cos^2 theta) / r^3 from positions uniform in a cube with a
// minimum-separation rejection guard. eps are shared by all spins and
// independent across pulses.
ClusterRealization sample_cluster(const SimulatorParams& params, int n_pulses,
                                  RngStream& rng);

// Full noisy cycle unitary: alternating free evolution and finite-width noisy
// pulses, U_tau = exp(-i H tau), pulse = exp(-i [H + (1+eps) rabi S_axis / 2] t_p).
CMatrix sequence_unitary(const PulseSequence& seq, const ClusterRealization& real,
                         const SimulatorParams& params);

// Monte Carlo coherence: for each cycle count M, the metric averaged over K
// independent realizations (fresh realizations per time point). axes masks
// out initial polarizations (Ramsey uses XY only). Deterministic given seed.
CoherenceCurve coherence_curve(const PulseSequence& seq, const SimulatorParams& params,
                               std::array<bool, 3> axes = {true, true, true});

// Mean coherence over the three simplified points and three axes, using
// realizations_simplified per point; no fitting.
double simplified_score(const PulseSequence& seq, const SimulatorParams& params);

// Continuous drive along an XY-plane axis; survival along all three axes on
// the same time grid a 24-slot sequence would produce.
CoherenceCurve spin_lock_curve(Axis lock_axis, const SimulatorParams& params);

struct AnisotropyReport {
  AxisAngle net;
  FitResult fit;         // per-axis fits of the full coherence curve
  int net_axis_index = 2;  // dominant component of the net axis (0 x, 1 y, 2 z)
  bool spin_lock_like = false;
};

AnisotropyReport anisotropy_report(const PulseSequence& seq, const SimulatorParams& params);

// Deterministic grid of (W, J0, eps) jitter around the base parameters,
// staying in the disorder-dominated regime.
std::vector<SimulatorParams> ensemble_params(const SimulatorParams& base, int n_variants);

}  // namespace doess
