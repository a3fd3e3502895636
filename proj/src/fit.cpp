#include "doess/fit.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace doess {

namespace {

constexpr double kNoiseFloor = 0.02;
constexpr double kContrastCap = 1.05;

AxisFit fit_axis(const std::vector<double>& t, const std::vector<double>& y) {
  AxisFit fit;
  const size_t n = t.size();
  if (n < 3) throw std::invalid_argument("fit_exponential needs >= 3 time points per axis");

  bool any_above_floor = false;
  for (double v : y) any_above_floor |= (v >= kNoiseFloor);
  if (!any_above_floor) {
    fit.unfittable = true;
    return fit;
  }

  // log-linear initialization over points above the floor
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (size_t i = 0; i < n; ++i) {
    if (y[i] < kNoiseFloor) continue;
    const double ly = std::log(y[i]);
    sx += t[i];
    sy += ly;
    sxx += t[i] * t[i];
    sxy += t[i] * ly;
    ++m;
  }
  double c = 1.0, kappa = 0.0;
  const double denom = m * sxx - sx * sx;
  if (m >= 2 && std::abs(denom) > 1e-30) {
    const double slope = (m * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / m;
    kappa = std::max(0.0, -slope);
    c = std::min(kContrastCap, std::max(1e-6, std::exp(intercept)));
  } else if (m >= 1) {
    c = std::min(kContrastCap, std::max(1e-6, sy >= 0 ? std::exp(sy / m) : 1.0));
  }

  // Levenberg-Marquardt on (C, kappa)
  const auto sse = [&](double cc, double kk) {
    double s = 0;
    for (size_t i = 0; i < n; ++i) {
      const double r = cc * std::exp(-kk * t[i]) - y[i];
      s += r * r;
    }
    return s;
  };
  double lambda = 1e-3;
  double err = sse(c, kappa);
  for (int iter = 0; iter < 200; ++iter) {
    Eigen::Matrix2d jtj = Eigen::Matrix2d::Zero();
    Eigen::Vector2d jtr = Eigen::Vector2d::Zero();
    for (size_t i = 0; i < n; ++i) {
      const double e = std::exp(-kappa * t[i]);
      const double r = c * e - y[i];
      const Eigen::Vector2d j(e, -c * t[i] * e);
      jtj += j * j.transpose();
      jtr += j * r;
    }
    Eigen::Matrix2d damped = jtj;
    damped(0, 0) += lambda * (1.0 + jtj(0, 0));
    damped(1, 1) += lambda * (1.0 + jtj(1, 1));
    const Eigen::Vector2d step = damped.ldlt().solve(jtr);
    const double c_new = std::min(kContrastCap, std::max(0.0, c - step(0)));
    const double kappa_new = std::max(0.0, kappa - step(1));
    const double err_new = sse(c_new, kappa_new);
    if (err_new < err) {
      const bool converged = (err - err_new) < 1e-16 * (1.0 + err);
      c = c_new;
      kappa = kappa_new;
      err = err_new;
      lambda = std::max(1e-12, lambda * 0.3);
      if (converged) break;
    } else {
      lambda *= 10.0;
      if (lambda > 1e12) break;
    }
  }
  fit.contrast = c;
  fit.kappa = kappa;
  return fit;
}

}  // namespace

FitResult fit_exponential(const CoherenceCurve& curve) {
  FitResult result;
  // the T = 0 point is 1 by construction and carries no decay information
  std::vector<double> t;
  std::vector<size_t> idx;
  for (size_t i = 0; i < curve.times.size(); ++i) {
    if (curve.cycles[i] >= 1) {
      t.push_back(curve.times[i]);
      idx.push_back(i);
    }
  }
  double c_sum = 0, kappa_sum = 0;
  int fitted_axes = 0;
  bool all_unfittable = true;
  for (int axis = 0; axis < 3; ++axis) {
    if (!curve.axis_present[static_cast<size_t>(axis)]) continue;
    std::vector<double> y;
    y.reserve(idx.size());
    for (size_t i : idx) y.push_back(curve.values[static_cast<size_t>(axis)][i]);
    result.axes[static_cast<size_t>(axis)] = fit_axis(t, y);
    if (!result.axes[static_cast<size_t>(axis)].unfittable) {
      c_sum += result.axes[static_cast<size_t>(axis)].contrast;
      kappa_sum += result.axes[static_cast<size_t>(axis)].kappa;
      ++fitted_axes;
      all_unfittable = false;
    }
  }
  result.unfittable = all_unfittable;
  if (fitted_axes > 0) {
    result.contrast = c_sum / fitted_axes;
    result.kappa = kappa_sum / fitted_axes;
    result.coherence_time = result.kappa > 0
                                ? 1.0 / result.kappa
                                : std::numeric_limits<double>::infinity();
  }
  return result;
}

double coherence_score(const FitResult& fit, double t_max) {
  if (t_max <= 0) throw std::invalid_argument("t_max must be > 0");
  double score = 0;
  int axes = 0;
  for (const AxisFit& axis : fit.axes) {
    const double c = axis.unfittable ? 0.0 : axis.contrast;
    const double x = axis.kappa * t_max;
    // C * (1 - exp(-kappa T)) / (kappa T), with the kappa -> 0 limit C
    score += (x < 1e-12) ? c : c * (1.0 - std::exp(-x)) / x;
    ++axes;
  }
  return score / axes;
}

}  // namespace doess
