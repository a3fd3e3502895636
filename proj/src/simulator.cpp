#include "doess/simulator.hpp"

#include <Eigen/Dense>
#include <atomic>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <thread>

namespace doess {

namespace {

constexpr uint64_t kClusterStreamBase = 0x1000000ULL;

void parallel_for(int n_tasks, int jobs, const std::function<void(int)>& body) {
  if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
  if (jobs < 1) jobs = 1;
  jobs = std::min(jobs, n_tasks);
  if (jobs <= 1) {
    for (int i = 0; i < n_tasks; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(jobs));
  for (int w = 0; w < jobs; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n_tasks; i = next.fetch_add(1)) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

// eigendecomposition kept around so exp(-iHt) is cheap at many t
struct EigH {
  Eigen::VectorXd evals;
  CMatrix evecs;

  explicit EigH(const CMatrix& h) {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(h);
    evals = solver.eigenvalues();
    evecs = solver.eigenvectors();
  }

  CMatrix propagator(double t) const {
    const auto n = evals.size();
    Eigen::VectorXcd phase(n);
    for (Eigen::Index i = 0; i < n; ++i)
      phase(i) = std::exp(Complex(0.0, -evals(i) * t));
    return evecs * phase.asDiagonal() * evecs.adjoint();
  }
};

Eigen::VectorXcd product_state(int axis, int n_spins) {
  Eigen::Vector2cd single;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  switch (axis) {
    case 0: single << inv_sqrt2, inv_sqrt2; break;
    case 1: single << inv_sqrt2, Complex(0.0, inv_sqrt2); break;
    default: single << 1.0, 0.0; break;
  }
  Eigen::VectorXcd state = single;
  for (int i = 1; i < n_spins; ++i) {
    Eigen::VectorXcd next(state.size() * 2);
    for (Eigen::Index j = 0; j < state.size(); ++j) {
      next(2 * j) = state(j) * single(0);
      next(2 * j + 1) = state(j) * single(1);
    }
    state = std::move(next);
  }
  return state;
}

CMatrix matrix_power(CMatrix base, int m) {
  CMatrix result = CMatrix::Identity(base.rows(), base.cols());
  while (m > 0) {
    if (m & 1) result = result * base;
    m >>= 1;
    if (m > 0) base = base * base;
  }
  return result;
}

Matrix2 axis_pauli(int axis) {
  switch (axis) {
    case 0: return pauli_x();
    case 1: return pauli_y();
    default: return pauli_z();
  }
}

// survival of the three initial polarizations after U acts once
std::array<double, 3> survival(const CMatrix& u, const SimulatorParams& params,
                               const std::array<bool, 3>& axes) {
  std::array<double, 3> out = {0.0, 0.0, 0.0};
  for (int axis = 0; axis < 3; ++axis) {
    if (!axes[static_cast<size_t>(axis)]) continue;
    const Eigen::VectorXcd psi = product_state(axis, params.n_spins);
    if (params.metric == Metric::Overlap) {
      const Complex amp = psi.dot(u * psi);
      out[static_cast<size_t>(axis)] = std::norm(amp);
    } else {
      const Eigen::VectorXcd phi = u * psi;
      const CMatrix s = collective_op(axis_pauli(axis), params.n_spins);
      const double expectation = (phi.dot(s * phi)).real() / params.n_spins;
      out[static_cast<size_t>(axis)] = 0.5 * (expectation + 1.0);
    }
  }
  return out;
}

// mean survival at cycle count M over K fresh realizations; the cycle count
// keys the rng substream, so results never depend on scheduling and any two
// evaluations of the same point share realizations (common random numbers)
std::array<double, 3> point_survival(const PulseSequence& seq, const SimulatorParams& params,
                                     int cycles, int realizations,
                                     const std::array<bool, 3>& axes) {
  std::array<double, 3> sums = {0.0, 0.0, 0.0};
  for (int r = 0; r < realizations; ++r) {
    RngStream rng(params.seed,
                  kClusterStreamBase + (static_cast<uint64_t>(cycles) << 32) +
                      static_cast<uint64_t>(r));
    const ClusterRealization real = sample_cluster(params, seq.length(), rng);
    const CMatrix u_total = matrix_power(sequence_unitary(seq, real, params), cycles);
    const std::array<double, 3> s = survival(u_total, params, axes);
    for (int a = 0; a < 3; ++a) sums[static_cast<size_t>(a)] += s[static_cast<size_t>(a)];
  }
  for (double& v : sums) v /= realizations;
  return sums;
}

}  // namespace

void SimulatorParams::validate() const {
  if (n_spins < 1 || n_spins > 12) throw std::invalid_argument("n_spins out of range");
  if (disorder_std < 0) throw std::invalid_argument("disorder_std must be >= 0");
  if (coupling_scale < 0) throw std::invalid_argument("coupling_scale must be >= 0");
  if (box_size <= 0) throw std::invalid_argument("box_size must be > 0");
  if (min_separation < 0 || min_separation >= box_size)
    throw std::invalid_argument("min_separation out of range");
  if (pulse_error_std < 0) throw std::invalid_argument("pulse_error_std must be >= 0");
  if (rabi <= 0) throw std::invalid_argument("rabi must be > 0");
  if (tau <= 0) throw std::invalid_argument("tau must be > 0");
  if (realizations < 1 || realizations_simplified < 1)
    throw std::invalid_argument("realization counts must be >= 1");
  if (cycle_grid.empty()) throw std::invalid_argument("cycle_grid must be non-empty");
  for (size_t i = 0; i < cycle_grid.size(); ++i) {
    if (cycle_grid[i] < 1 || (i > 0 && cycle_grid[i] <= cycle_grid[i - 1]))
      throw std::invalid_argument("cycle_grid must be strictly increasing and >= 1");
  }
  if (simplified_points[0] < 1 || simplified_points[0] >= simplified_points[1] ||
      simplified_points[1] >= simplified_points[2])
    throw std::invalid_argument("simplified_points must be strictly increasing and >= 1");
  if (jobs < 0) throw std::invalid_argument("jobs must be >= 0");
}

ClusterRealization sample_cluster(const SimulatorParams& params, int n_pulses,
                                  RngStream& rng) {
  params.validate();
  const int n = params.n_spins;
  ClusterRealization real;

  real.h.resize(n);
  for (int i = 0; i < n; ++i) {
    const double unit = (params.disorder_dist == DisorderDist::Gaussian)
                            ? rng.normal()
                            : rng.cauchy();
    real.h(i) = params.disorder_std * unit;
  }

  real.positions.resize(n, 3);
  for (int i = 0; i < n; ++i) {
    int attempts = 0;
    while (true) {
      if (++attempts > 10000)
        throw std::runtime_error("sample_cluster: box too dense for min_separation");
      Eigen::Vector3d p;
      for (int c = 0; c < 3; ++c) p(c) = params.box_size * rng.uniform();
      bool ok = true;
      for (int j = 0; j < i; ++j) {
        if ((p.transpose() - real.positions.row(j)).norm() < params.min_separation) {
          ok = false;
          break;
        }
      }
      if (ok) {
        real.positions.row(i) = p;
        break;
      }
    }
  }

  real.couplings = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Eigen::Vector3d d = real.positions.row(i) - real.positions.row(j);
      const double r = d.norm();
      const double cos_theta = d(2) / r;
      const double j_ij =
          params.coupling_scale * (1.0 - 3.0 * cos_theta * cos_theta) / (r * r * r);
      real.couplings(i, j) = j_ij;
      real.couplings(j, i) = j_ij;
    }
  }

  real.eps.resize(static_cast<size_t>(n_pulses));
  for (double& e : real.eps) e = params.pulse_error_std * rng.normal();
  return real;
}

CMatrix sequence_unitary(const PulseSequence& seq, const ClusterRealization& real,
                         const SimulatorParams& params) {
  seq.validate();
  ClusterHamiltonian cluster;
  cluster.n_spins = params.n_spins;
  cluster.disorder = real.h;
  cluster.couplings = real.couplings;
  const CMatrix h = assemble_hamiltonian(cluster, params.interaction_form);
  const EigH eig_h(h);
  const CMatrix u_tau = eig_h.propagator(seq.tau);

  const auto dim = h.rows();
  CMatrix u = CMatrix::Identity(dim, dim);
  for (int k = 0; k < seq.length(); ++k) {
    u = u_tau * u;
    const int code = seq.codes[static_cast<size_t>(k)];
    if (is_null_pulse(code)) {
      const double window = seq.pulse_window(k);
      if (window > 0) u = eig_h.propagator(window) * u;
      continue;
    }
    const double eps =
        (static_cast<size_t>(k) < real.eps.size()) ? real.eps[static_cast<size_t>(k)] : 0.0;
    const CMatrix drive =
        0.5 * seq.rabi * (1.0 + eps) * collective_op(axis_generator(pulse_axis(code)),
                                                     params.n_spins);
    const EigH eig_p(h + drive);
    u = eig_p.propagator(seq.pulse_window(k)) * u;
  }
  return u;
}

CoherenceCurve coherence_curve(const PulseSequence& seq, const SimulatorParams& params,
                               std::array<bool, 3> axes) {
  params.validate();
  seq.validate();
  const int n_points = static_cast<int>(params.cycle_grid.size());
  const double t_cycle = seq.cycle_duration();

  CoherenceCurve curve;
  curve.axis_present = axes;
  curve.cycles.resize(static_cast<size_t>(n_points) + 1);
  curve.times.resize(static_cast<size_t>(n_points) + 1);
  for (auto& v : curve.values) v.assign(static_cast<size_t>(n_points) + 1, 0.0);
  curve.cycles[0] = 0;
  curve.times[0] = 0.0;
  for (int a = 0; a < 3; ++a)
    if (axes[static_cast<size_t>(a)]) curve.values[static_cast<size_t>(a)][0] = 1.0;

  parallel_for(n_points, params.jobs, [&](int p) {
    const int m = params.cycle_grid[static_cast<size_t>(p)];
    const std::array<double, 3> s =
        point_survival(seq, params, m, params.realizations, axes);
    curve.cycles[static_cast<size_t>(p) + 1] = m;
    curve.times[static_cast<size_t>(p) + 1] = m * t_cycle;
    for (int a = 0; a < 3; ++a)
      curve.values[static_cast<size_t>(a)][static_cast<size_t>(p) + 1] =
          s[static_cast<size_t>(a)];
  });
  return curve;
}

double simplified_score(const PulseSequence& seq, const SimulatorParams& params) {
  params.validate();
  seq.validate();
  double total = 0.0;
  std::array<std::array<double, 3>, 3> vals;
  parallel_for(3, params.jobs, [&](int p) {
    vals[static_cast<size_t>(p)] =
        point_survival(seq, params, params.simplified_points[static_cast<size_t>(p)],
                       params.realizations_simplified, {true, true, true});
  });
  for (const auto& v : vals)
    for (double x : v) total += x;
  return total / 9.0;
}

CoherenceCurve spin_lock_curve(Axis lock_axis, const SimulatorParams& params) {
  params.validate();
  // time grid matching a default-length pulse word so curves are comparable
  const double t_cycle =
      kDefaultSequenceLength * (params.tau + M_PI / params.rabi);
  const int n_points = static_cast<int>(params.cycle_grid.size());
  const CMatrix drive_op = collective_op(axis_generator(lock_axis), params.n_spins);

  CoherenceCurve curve;
  curve.cycles.resize(static_cast<size_t>(n_points) + 1);
  curve.times.resize(static_cast<size_t>(n_points) + 1);
  for (auto& v : curve.values) v.assign(static_cast<size_t>(n_points) + 1, 0.0);
  curve.cycles[0] = 0;
  curve.times[0] = 0.0;
  for (auto& v : curve.values) v[0] = 1.0;

  parallel_for(n_points, params.jobs, [&](int p) {
    const int m = params.cycle_grid[static_cast<size_t>(p)];
    const double t = m * t_cycle;
    std::array<double, 3> sums = {0.0, 0.0, 0.0};
    for (int r = 0; r < params.realizations; ++r) {
      RngStream rng(params.seed,
                    kClusterStreamBase + (static_cast<uint64_t>(m) << 32) +
                        static_cast<uint64_t>(r));
      const ClusterRealization real = sample_cluster(params, 1, rng);
      ClusterHamiltonian cluster;
      cluster.n_spins = params.n_spins;
      cluster.disorder = real.h;
      cluster.couplings = real.couplings;
      const CMatrix h_total = assemble_hamiltonian(cluster, params.interaction_form) +
                              0.5 * params.rabi * (1.0 + real.eps[0]) * drive_op;
      const EigH eig(h_total);
      const std::array<double, 3> s =
          survival(eig.propagator(t), params, {true, true, true});
      for (int a = 0; a < 3; ++a) sums[static_cast<size_t>(a)] += s[static_cast<size_t>(a)];
    }
    curve.cycles[static_cast<size_t>(p) + 1] = m;
    curve.times[static_cast<size_t>(p) + 1] = t;
    for (int a = 0; a < 3; ++a)
      curve.values[static_cast<size_t>(a)][static_cast<size_t>(p) + 1] =
          sums[static_cast<size_t>(a)] / params.realizations;
  });
  return curve;
}

AnisotropyReport anisotropy_report(const PulseSequence& seq, const SimulatorParams& params) {
  AnisotropyReport report;
  report.net = su2_axis_angle(net_rotation(seq));
  report.fit = fit_exponential(coherence_curve(seq, params));

  int best = 0;
  for (int a = 1; a < 3; ++a) {
    if (std::abs(report.net.axis(a)) > std::abs(report.net.axis(best))) best = a;
  }
  report.net_axis_index = best;
  if (report.net.angle > 1e-9 && !report.fit.axes[static_cast<size_t>(best)].unfittable) {
    bool minimal = true;
    for (int a = 0; a < 3; ++a) {
      if (a == best) continue;
      if (report.fit.axes[static_cast<size_t>(a)].unfittable) continue;
      if (report.fit.axes[static_cast<size_t>(best)].kappa >
          report.fit.axes[static_cast<size_t>(a)].kappa)
        minimal = false;
    }
    report.spin_lock_like = minimal;
  }
  return report;
}

std::vector<SimulatorParams> ensemble_params(const SimulatorParams& base, int n_variants) {
  if (n_variants < 1) throw std::invalid_argument("n_variants must be >= 1");
  base.validate();
  // modest deterministic jitter; factors stay close enough to 1 that the
  // disorder-dominated regime of the base parameters is preserved
  static const double w_factors[] = {1.0, 0.8, 1.25, 0.9, 1.1};
  static const double j_factors[] = {1.0, 1.2, 0.85, 1.1, 0.9};
  static const double e_factors[] = {1.0, 1.5, 0.5, 1.25, 0.75};
  std::vector<SimulatorParams> out;
  out.reserve(static_cast<size_t>(n_variants));
  for (int v = 0; v < n_variants; ++v) {
    SimulatorParams p = base;
    p.disorder_std *= w_factors[v % 5];
    p.coupling_scale *= j_factors[(v / 5 + v) % 5];
    p.pulse_error_std *= e_factors[(v / 25 + v) % 5];
    p.seed = base.seed + static_cast<uint64_t>(v);
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace doess
