#pragma once

#include "doess/sequences.hpp"
#include "doess/spin_core.hpp"

namespace doess {

// Five continuous performance indicators: Frobenius norms of the leading-order
// average-Hamiltonian deviation from the target, one per decoherence channel
// (disorder / interactions, during intervals / during pulses, pulse errors).
// All are normalized so a sequence satisfying the corresponding traditional
// binary filtering rule exactly scores 0.
struct IndicatorVector {
  double i1 = 0;  // disorder during intervals
  double i2 = 0;  // disorder during pulse applications
  double i3 = 0;  // interactions during intervals
  double i4 = 0;  // interactions during pulse applications
  double i5 = 0;  // rotation-angle-error sensitivity

  double operator[](int k) const;
  double sum() const { return i1 + i2 + i3 + i4 + i5; }
};

// Toggling frames Z~_k = C_k^dag sigma_z C_k with C_k = P_k ... P_1 (C_0 = I);
// returns d+1 frames, Z~_k being the frame active during interval k+1.
std::vector<Matrix2> toggling_frames(const PulseSequence& seq);

double indicator_1_disorder_free(const PulseSequence& seq);
double indicator_2_disorder_pulse(const PulseSequence& seq);
double indicator_3_interaction_free(const PulseSequence& seq,
                                    InteractionForm form = InteractionForm::XXYYm2ZZ);
double indicator_4_interaction_pulse(const PulseSequence& seq,
                                     InteractionForm form = InteractionForm::XXYYm2ZZ);
double indicator_5_pulse_error(const PulseSequence& seq);

IndicatorVector indicators(const PulseSequence& seq,
                           InteractionForm form = InteractionForm::XXYYm2ZZ);

// 5 x R matrix; column r-1 holds the indicators of repeat(seq, r).
Eigen::MatrixXd indicator_series(const PulseSequence& seq, int repetitions,
                                 InteractionForm form = InteractionForm::XXYYm2ZZ);

// (1/theta) * integral_0^theta exp(i phi G) H exp(-i phi G) dphi, evaluated in
// closed form via the eigendecomposition of the Hermitian generator G.
CMatrix averaged_conjugation(const CMatrix& generator, const CMatrix& op, double theta);

// Projection of a two-spin operator onto the isotropic Heisenberg component,
// the interaction part no global pulse sequence can remove.
Matrix4 heisenberg_projection(const Matrix4& op);

}  // namespace doess
