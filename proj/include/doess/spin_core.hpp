#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>

namespace doess {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using Matrix2 = Eigen::Matrix2cd;
using Matrix4 = Eigen::Matrix4cd;

enum class Axis { PlusX, MinusX, PlusY, MinusY };

// Pair interaction conventions. XXYYm2ZZ is the secular like-spin dipolar
// form; the alternates exist so the interaction model can be swapped without
// touching callers.
enum class InteractionForm { XXYYm2ZZ, IsingZZ, Heisenberg };

Matrix2 pauli_x();
Matrix2 pauli_y();
Matrix2 pauli_z();
Matrix2 identity2();

// Signed Pauli generator for a rotation axis: +X -> sigma_x, -X -> -sigma_x, ...
Matrix2 axis_generator(Axis axis);
Eigen::Vector3d axis_vector(Axis axis);

// exp(-i * angle/2 * sigma_axis); angle must lie in (0, 2*pi)
Matrix2 rotation_unitary(Axis axis, double angle);

struct ClusterHamiltonian {
  int n_spins = 5;
  Eigen::VectorXd disorder;   // h_i, rad/us
  Eigen::MatrixXd couplings;  // J_ij, rad/us, symmetric, zero diagonal
};

// Pair operator multiplying J_ij in the cluster Hamiltonian.
Matrix4 pair_operator(InteractionForm form);

// H = sum_i (h_i/2) Z_i + sum_{i<j} J_ij * pair_operator on sites (i, j)
CMatrix assemble_hamiltonian(const ClusterHamiltonian& h,
                             InteractionForm form = InteractionForm::XXYYm2ZZ);

// exp(-i H t) via exact eigendecomposition; H must be Hermitian
CMatrix expm_hermitian_generator(const CMatrix& hamiltonian, double t);

double frobenius_norm(const CMatrix& m);

struct AxisAngle {
  Eigen::Vector3d axis;  // unit vector; +Z by convention when angle == 0
  double angle;          // in [0, pi]
};

// Decompose a 2x2 unitary (up to global phase) as a rotation.
AxisAngle su2_axis_angle(const Matrix2& u);

// Embed a single-site operator at `site` within an n-spin register
// (site 0 is the leftmost tensor factor).
CMatrix embed_site_op(const Matrix2& op, int site, int n_spins);

// sum_i op_i over all sites
CMatrix collective_op(const Matrix2& op, int n_spins);

// Embed a two-site operator on (site_a, site_b) of an n-spin register.
CMatrix embed_pair_op(const Matrix4& op, int site_a, int site_b, int n_spins);

bool is_hermitian(const CMatrix& m, double tol = 1e-12);
bool is_unitary(const CMatrix& m, double tol = 1e-10);

}  // namespace doess
