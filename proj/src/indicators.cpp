#include "doess/indicators.hpp"

#include <cmath>

namespace doess {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;

Matrix4 kron2(const Matrix2& a, const Matrix2& b) {
  Matrix4 out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}
}  // namespace

double IndicatorVector::operator[](int k) const {
  switch (k) {
    case 0: return i1;
    case 1: return i2;
    case 2: return i3;
    case 3: return i4;
    case 4: return i5;
  }
  throw std::out_of_range("indicator index must be 0..4");
}

std::vector<Matrix2> toggling_frames(const PulseSequence& seq) {
  seq.validate();
  std::vector<Matrix2> frames;
  frames.reserve(static_cast<size_t>(seq.length()) + 1);
  Matrix2 c = identity2();
  frames.push_back(pauli_z());
  for (int code : seq.codes) {
    c = (pulse_unitary(code) * c).eval();
    frames.push_back(c.adjoint() * pauli_z() * c);
  }
  return frames;
}

CMatrix averaged_conjugation(const CMatrix& generator, const CMatrix& op, double theta) {
  if (theta == 0.0) return op;
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(generator);
  const Eigen::VectorXd& g = solver.eigenvalues();
  const CMatrix& v = solver.eigenvectors();
  CMatrix tilde = v.adjoint() * op * v;
  for (int m = 0; m < tilde.rows(); ++m) {
    for (int n = 0; n < tilde.cols(); ++n) {
      const double delta = g(m) - g(n);
      if (std::abs(delta * theta) < 1e-12) continue;
      // (1/theta) * integral of exp(i phi delta) dphi
      tilde(m, n) *= (std::exp(Complex(0, theta * delta)) - 1.0) / Complex(0, theta * delta);
    }
  }
  return v * tilde * v.adjoint();
}

double indicator_1_disorder_free(const PulseSequence& seq) {
  const auto frames = toggling_frames(seq);
  const int d = seq.length();
  Matrix2 sum = Matrix2::Zero();
  for (int k = 0; k < d; ++k) sum += frames[static_cast<size_t>(k)];
  return (sum / d).norm() / kSqrt2;
}

double indicator_2_disorder_pulse(const PulseSequence& seq) {
  seq.validate();
  const int d = seq.length();
  Matrix2 c = identity2();
  Matrix2 acc = Matrix2::Zero();
  double total_weight = 0.0;
  for (int k = 0; k < d; ++k) {
    const int code = seq.codes[static_cast<size_t>(k)];
    const double weight = seq.pulse_window(k);
    if (weight > 0.0) {
      Matrix2 avg;
      if (code == 0) {
        avg = pauli_z();
      } else {
        const Matrix2 gen = 0.5 * axis_generator(pulse_axis(code));
        avg = averaged_conjugation(gen, pauli_z(), pulse_angle(code));
      }
      acc += weight * (c.adjoint() * avg * c);
      total_weight += weight;
    }
    c = (pulse_unitary(code) * c).eval();
  }
  if (total_weight == 0.0) return indicator_1_disorder_free(seq);
  return (acc / total_weight).norm() / kSqrt2;
}

Matrix4 heisenberg_projection(const Matrix4& op) {
  const Matrix4 heis = kron2(pauli_x(), pauli_x()) + kron2(pauli_y(), pauli_y()) +
                       kron2(pauli_z(), pauli_z());
  const Complex coeff = (heis.adjoint() * op).trace() / heis.squaredNorm();
  return coeff * heis;
}

double indicator_3_interaction_free(const PulseSequence& seq, InteractionForm form) {
  const Matrix4 pair = pair_operator(form);
  const Matrix4 target = heisenberg_projection(pair);
  const int d = seq.length();
  Matrix2 c = identity2();
  Matrix4 acc = Matrix4::Zero();
  for (int k = 0; k < d; ++k) {
    const Matrix4 cc = kron2(c, c);
    acc += cc.adjoint() * pair * cc;
    c = (pulse_unitary(seq.codes[static_cast<size_t>(k)]) * c).eval();
  }
  return (acc / d - target).norm() / pair.norm();
}

double indicator_4_interaction_pulse(const PulseSequence& seq, InteractionForm form) {
  seq.validate();
  const Matrix4 pair = pair_operator(form);
  const Matrix4 target = heisenberg_projection(pair);
  const int d = seq.length();
  Matrix2 c = identity2();
  Matrix4 acc = Matrix4::Zero();
  double total_weight = 0.0;
  for (int k = 0; k < d; ++k) {
    const int code = seq.codes[static_cast<size_t>(k)];
    const double weight = seq.pulse_window(k);
    if (weight > 0.0) {
      Matrix4 avg;
      if (code == 0) {
        avg = pair;
      } else {
        const Matrix2 gen = 0.5 * axis_generator(pulse_axis(code));
        const Matrix4 gen2 = kron2(gen, identity2()) + kron2(identity2(), gen);
        avg = averaged_conjugation(gen2, pair, pulse_angle(code));
      }
      const Matrix4 cc = kron2(c, c);
      acc += weight * (cc.adjoint() * avg * cc);
      total_weight += weight;
    }
    c = (pulse_unitary(code) * c).eval();
  }
  if (total_weight == 0.0) return indicator_3_interaction_free(seq, form);
  return (acc / total_weight - target).norm() / pair.norm();
}

double indicator_5_pulse_error(const PulseSequence& seq) {
  seq.validate();
  Matrix2 c = identity2();
  Matrix2 acc = Matrix2::Zero();
  double total_angle = 0.0;
  for (int code : seq.codes) {
    if (code != 0) {
      const double theta = pulse_angle(code);
      const Matrix2 gen = 0.5 * axis_generator(pulse_axis(code));
      acc += theta * (c.adjoint() * gen * c);
      total_angle += theta;
    }
    c = (pulse_unitary(code) * c).eval();
  }
  if (total_angle == 0.0) return 0.0;
  return acc.norm() / (total_angle * (kSqrt2 / 2.0));
}

IndicatorVector indicators(const PulseSequence& seq, InteractionForm form) {
  IndicatorVector v;
  v.i1 = indicator_1_disorder_free(seq);
  v.i2 = indicator_2_disorder_pulse(seq);
  v.i3 = indicator_3_interaction_free(seq, form);
  v.i4 = indicator_4_interaction_pulse(seq, form);
  v.i5 = indicator_5_pulse_error(seq);
  return v;
}

Eigen::MatrixXd indicator_series(const PulseSequence& seq, int repetitions,
                                 InteractionForm form) {
  if (repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
  Eigen::MatrixXd series(5, repetitions);
  for (int r = 1; r <= repetitions; ++r) {
    const IndicatorVector v = indicators(repeat(seq, r), form);
    for (int k = 0; k < 5; ++k) series(k, r - 1) = v[k];
  }
  return series;
}

}  // namespace doess
