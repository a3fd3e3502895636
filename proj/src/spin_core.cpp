#include "doess/spin_core.hpp"

#include <cmath>

namespace doess {

namespace {
const Complex kI(0.0, 1.0);
}

Matrix2 pauli_x() {
  Matrix2 m;
  m << 0, 1, 1, 0;
  return m;
}

Matrix2 pauli_y() {
  Matrix2 m;
  m << 0, -kI, kI, 0;
  return m;
}

Matrix2 pauli_z() {
  Matrix2 m;
  m << 1, 0, 0, -1;
  return m;
}

Matrix2 identity2() { return Matrix2::Identity(); }

Matrix2 axis_generator(Axis axis) {
  switch (axis) {
    case Axis::PlusX: return pauli_x();
    case Axis::MinusX: return -pauli_x();
    case Axis::PlusY: return pauli_y();
    case Axis::MinusY: return -pauli_y();
  }
  throw std::invalid_argument("invalid axis tag");
}

Eigen::Vector3d axis_vector(Axis axis) {
  switch (axis) {
    case Axis::PlusX: return {1, 0, 0};
    case Axis::MinusX: return {-1, 0, 0};
    case Axis::PlusY: return {0, 1, 0};
    case Axis::MinusY: return {0, -1, 0};
  }
  throw std::invalid_argument("invalid axis tag");
}

Matrix2 rotation_unitary(Axis axis, double angle) {
  if (!(angle > 0.0 && angle < 2.0 * M_PI)) {
    throw std::invalid_argument("rotation angle must lie in (0, 2*pi)");
  }
  const Matrix2 gen = axis_generator(axis);
  return std::cos(angle / 2) * identity2() - kI * std::sin(angle / 2) * gen;
}

Matrix4 pair_operator(InteractionForm form) {
  const Matrix2 x = pauli_x(), y = pauli_y(), z = pauli_z();
  const auto kron2 = [](const Matrix2& a, const Matrix2& b) {
    Matrix4 out;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    return out;
  };
  switch (form) {
    case InteractionForm::XXYYm2ZZ:
      return (kron2(x, x) + kron2(y, y) - 2.0 * kron2(z, z)) / 4.0;
    case InteractionForm::IsingZZ:
      // secular ZZ part of the dipolar form
      return -kron2(z, z) / 2.0;
    case InteractionForm::Heisenberg:
      return (kron2(x, x) + kron2(y, y) + kron2(z, z)) / 4.0;
  }
  throw std::invalid_argument("invalid interaction form");
}

namespace {
CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}
}  // namespace

CMatrix embed_site_op(const Matrix2& op, int site, int n_spins) {
  if (site < 0 || site >= n_spins) throw std::invalid_argument("site out of range");
  CMatrix out = CMatrix::Identity(1, 1);
  for (int k = 0; k < n_spins; ++k) {
    const CMatrix factor = (k == site) ? CMatrix(op) : CMatrix(CMatrix::Identity(2, 2));
    out = kron(out, factor);
  }
  return out;
}

CMatrix collective_op(const Matrix2& op, int n_spins) {
  const int dim = 1 << n_spins;
  CMatrix out = CMatrix::Zero(dim, dim);
  for (int i = 0; i < n_spins; ++i) out += embed_site_op(op, i, n_spins);
  return out;
}

CMatrix embed_pair_op(const Matrix4& op, int site_a, int site_b, int n_spins) {
  if (site_a == site_b) throw std::invalid_argument("pair sites must differ");
  // decompose into the Pauli product basis and embed term by term
  const Matrix2 basis[4] = {identity2(), pauli_x(), pauli_y(), pauli_z()};
  const int dim = 1 << n_spins;
  CMatrix out = CMatrix::Zero(dim, dim);
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      Matrix4 pb;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) pb.block<2, 2>(2 * i, 2 * j) = basis[a](i, j) * basis[b];
      const Complex coeff = (pb.adjoint() * op).trace() / 4.0;
      if (std::abs(coeff) < 1e-300) continue;
      out += coeff * (embed_site_op(basis[a], site_a, n_spins) *
                      embed_site_op(basis[b], site_b, n_spins));
    }
  }
  return out;
}

CMatrix assemble_hamiltonian(const ClusterHamiltonian& h, InteractionForm form) {
  const int n = h.n_spins;
  if (h.disorder.size() != n) throw std::invalid_argument("disorder length != n_spins");
  if (n > 1 && (h.couplings.rows() != n || h.couplings.cols() != n)) {
    throw std::invalid_argument("couplings must be n_spins x n_spins");
  }
  const int dim = 1 << n;
  CMatrix out = CMatrix::Zero(dim, dim);
  for (int i = 0; i < n; ++i) {
    if (h.disorder(i) != 0.0) out += (h.disorder(i) / 2.0) * embed_site_op(pauli_z(), i, n);
  }
  if (n > 1 && h.couplings.size() > 0) {
    const Matrix4 pair = pair_operator(form);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (h.couplings(i, j) != 0.0) out += h.couplings(i, j) * embed_pair_op(pair, i, j, n);
      }
    }
  }
  return out;
}

CMatrix expm_hermitian_generator(const CMatrix& hamiltonian, double t) {
  if (!is_hermitian(hamiltonian, 1e-10)) {
    throw std::invalid_argument("expm_hermitian_generator: input is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hamiltonian);
  const Eigen::VectorXd& evals = solver.eigenvalues();
  const CMatrix& v = solver.eigenvectors();
  Eigen::VectorXcd phases(evals.size());
  for (int i = 0; i < evals.size(); ++i) {
    phases(i) = std::exp(Complex(0.0, -evals(i) * t));
  }
  return v * phases.asDiagonal() * v.adjoint();
}

double frobenius_norm(const CMatrix& m) { return m.norm(); }

AxisAngle su2_axis_angle(const Matrix2& u) {
  if (!is_unitary(u, 1e-8)) {
    throw std::invalid_argument("su2_axis_angle: input is not unitary");
  }
  // remove the global phase: scale so det == 1
  const Complex det = u.determinant();
  Matrix2 su = u / std::sqrt(det);
  // u = cos(a/2) I - i sin(a/2) (n . sigma); fix the sign so cos(a/2) >= 0
  double c = std::real(su.trace()) / 2.0;
  if (c < 0.0) {
    su = -su;
    c = -c;
  }
  c = std::min(1.0, std::max(-1.0, c));
  const double half = std::acos(c);
  const double s = std::sin(half);
  AxisAngle out;
  out.angle = 2.0 * half;
  if (s < 1e-12) {
    out.axis = {0, 0, 1};
    out.angle = 0.0;
    return out;
  }
  const double nx = -std::imag(su(0, 1) + su(1, 0)) / (2.0 * s);
  const double ny = std::real(su(1, 0) - su(0, 1)) / (2.0 * s);
  const double nz = -std::imag(su(0, 0) - su(1, 1)) / (2.0 * s);
  out.axis = Eigen::Vector3d(nx, ny, nz).normalized();
  return out;
}

bool is_hermitian(const CMatrix& m, double tol) {
  return (m - m.adjoint()).norm() < tol;
}

bool is_unitary(const CMatrix& m, double tol) {
  return (m.adjoint() * m - CMatrix::Identity(m.rows(), m.cols())).norm() < tol;
}

}  // namespace doess
