#pragma once

#include <map>
#include <string>
#include <vector>

#include "doess/spin_core.hpp"

namespace doess {

// The 13-operation pulse alphabet. Code 0 is Null (no pulse); codes 1..12 are
// (axis, angle) pairs in the fixed order below.
//   1:+Xpi  2:-Xpi  3:+Ypi  4:-Ypi
//   5:+Xpi/2  6:-Xpi/2  7:+Ypi/2  8:-Ypi/2
//   9:+Xpi/3  10:-Xpi/3  11:+Ypi/3  12:-Ypi/3
inline constexpr int kAlphabetSize = 13;
inline constexpr int kDefaultSequenceLength = 24;

bool is_null_pulse(int code);
Axis pulse_axis(int code);    // throws for Null or out-of-range codes
double pulse_angle(int code); // 0 for Null
int pulse_code(Axis axis, double angle);

// Ideal pulse unitary; identity for Null.
Matrix2 pulse_unitary(int code);

// Whether a Null slot occupies the wall-clock window of a pi pulse or only
// the inter-pulse interval.
enum class NullSlot { PiSlot, IntervalOnly };

struct PulseSequence {
  std::vector<int> codes;
  double tau = 0.1;     // inter-pulse interval, us
  double rabi = 62.832; // Rabi frequency, rad/us (t_p = angle / rabi)
  NullSlot null_slot = NullSlot::PiSlot;

  int length() const { return static_cast<int>(codes.size()); }
  // duration of the pulse window of slot k (0 for Null under IntervalOnly)
  double pulse_window(int k) const;
  // slot k wall-clock duration: [free evolution tau] then [pulse window]
  double slot_duration(int k) const { return tau + pulse_window(k); }
  double cycle_duration() const;
  void validate() const;  // throws on out-of-range codes or bad timing
};

std::vector<int> encode(const PulseSequence& seq);
PulseSequence decode(const std::vector<int>& codes, double tau, double rabi,
                     NullSlot null_slot = NullSlot::PiSlot);

// Ordered product P_k ... P_1 of the ideal pulse unitaries.
Matrix2 net_rotation(const PulseSequence& seq);

PulseSequence repeat(const PulseSequence& seq, int r);

// 13 x d one-hot matrix, one column per slot.
Eigen::MatrixXd pulse_matrix(const PulseSequence& seq);

enum class Protocol { PulseWord, Ramsey, SpinLock };

struct Baseline {
  std::string name;
  Protocol protocol = Protocol::PulseWord;
  PulseSequence seq;       // empty word for Ramsey / SpinLock descriptors
  Axis lock_axis = Axis::PlusX;
};

// Known names: ramsey, xy8, xy16, droid_r2d2, spin_lock_x. Pulse words are
// loaded from versioned data files under data_dir.
Baseline baseline(const std::string& name, const std::string& data_dir);

// Sequence data files: '#' header lines with key=value metadata, then one
// comma-separated code word per line.
struct SequenceFile {
  std::map<std::string, std::string> metadata;
  std::vector<std::vector<int>> words;
};

SequenceFile read_sequence_file(const std::string& path);
void write_sequence_file(const std::string& path, const SequenceFile& file);

}  // namespace doess
