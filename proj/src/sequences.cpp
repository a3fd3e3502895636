#include "doess/sequences.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace doess {

namespace {
constexpr double kPi = M_PI;

struct PulseDef {
  Axis axis;
  double angle;
};

const PulseDef kAlphabet[12] = {
    {Axis::PlusX, kPi},      {Axis::MinusX, kPi},
    {Axis::PlusY, kPi},      {Axis::MinusY, kPi},
    {Axis::PlusX, kPi / 2},  {Axis::MinusX, kPi / 2},
    {Axis::PlusY, kPi / 2},  {Axis::MinusY, kPi / 2},
    {Axis::PlusX, kPi / 3},  {Axis::MinusX, kPi / 3},
    {Axis::PlusY, kPi / 3},  {Axis::MinusY, kPi / 3},
};

void check_code(int code) {
  if (code < 0 || code >= kAlphabetSize) {
    throw std::invalid_argument("pulse code out of range: " + std::to_string(code));
  }
}
}  // namespace

bool is_null_pulse(int code) {
  check_code(code);
  return code == 0;
}

Axis pulse_axis(int code) {
  check_code(code);
  if (code == 0) throw std::invalid_argument("Null pulse has no axis");
  return kAlphabet[code - 1].axis;
}

double pulse_angle(int code) {
  check_code(code);
  return code == 0 ? 0.0 : kAlphabet[code - 1].angle;
}

int pulse_code(Axis axis, double angle) {
  for (int c = 1; c < kAlphabetSize; ++c) {
    if (kAlphabet[c - 1].axis == axis && std::abs(kAlphabet[c - 1].angle - angle) < 1e-12) {
      return c;
    }
  }
  throw std::invalid_argument("no alphabet code for the requested (axis, angle)");
}

Matrix2 pulse_unitary(int code) {
  check_code(code);
  if (code == 0) return identity2();
  return rotation_unitary(kAlphabet[code - 1].axis, kAlphabet[code - 1].angle);
}

double PulseSequence::pulse_window(int k) const {
  const int code = codes.at(static_cast<size_t>(k));
  if (code == 0) {
    return null_slot == NullSlot::PiSlot ? kPi / rabi : 0.0;
  }
  return pulse_angle(code) / rabi;
}

double PulseSequence::cycle_duration() const {
  double total = 0.0;
  for (int k = 0; k < length(); ++k) total += slot_duration(k);
  return total;
}

void PulseSequence::validate() const {
  if (tau <= 0.0) throw std::invalid_argument("tau must be > 0");
  if (rabi <= 0.0) throw std::invalid_argument("rabi must be > 0");
  for (int c : codes) check_code(c);
}

std::vector<int> encode(const PulseSequence& seq) {
  seq.validate();
  return seq.codes;
}

PulseSequence decode(const std::vector<int>& codes, double tau, double rabi,
                     NullSlot null_slot) {
  PulseSequence seq;
  seq.codes = codes;
  seq.tau = tau;
  seq.rabi = rabi;
  seq.null_slot = null_slot;
  seq.validate();
  return seq;
}

Matrix2 net_rotation(const PulseSequence& seq) {
  Matrix2 u = identity2();
  for (int c : seq.codes) u = (pulse_unitary(c) * u).eval();
  return u;
}

PulseSequence repeat(const PulseSequence& seq, int r) {
  if (r < 1) throw std::invalid_argument("repetition count must be >= 1");
  PulseSequence out = seq;
  out.codes.clear();
  out.codes.reserve(static_cast<size_t>(seq.length()) * r);
  for (int i = 0; i < r; ++i) {
    out.codes.insert(out.codes.end(), seq.codes.begin(), seq.codes.end());
  }
  return out;
}

Eigen::MatrixXd pulse_matrix(const PulseSequence& seq) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(kAlphabetSize, seq.length());
  for (int k = 0; k < seq.length(); ++k) m(seq.codes[k], k) = 1.0;
  return m;
}

SequenceFile read_sequence_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open sequence file: " + path);
  SequenceFile file;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq != std::string::npos) {
        std::string key = line.substr(1, eq - 1);
        std::string value = line.substr(eq + 1);
        const auto trim = [](std::string& s) {
          s.erase(0, s.find_first_not_of(" \t\r"));
          s.erase(s.find_last_not_of(" \t\r") + 1);
        };
        trim(key);
        trim(value);
        file.metadata[key] = value;
      }
      continue;
    }
    std::vector<int> word;
    std::stringstream ss(line);
    std::string token;
    while (std::getline(ss, token, ',')) {
      try {
        const int code = std::stoi(token);
        check_code(code);
        word.push_back(code);
      } catch (const std::exception&) {
        throw std::runtime_error("bad pulse code at " + path + ":" + std::to_string(line_no));
      }
    }
    if (!word.empty()) file.words.push_back(std::move(word));
  }
  return file;
}

void write_sequence_file(const std::string& path, const SequenceFile& file) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write sequence file: " + path);
  for (const auto& [key, value] : file.metadata) {
    out << "# " << key << " = " << value << "\n";
  }
  for (const auto& word : file.words) {
    for (size_t i = 0; i < word.size(); ++i) {
      if (i) out << ",";
      out << word[i];
    }
    out << "\n";
  }
}

Baseline baseline(const std::string& name, const std::string& data_dir) {
  Baseline b;
  b.name = name;
  if (name == "ramsey") {
    b.protocol = Protocol::Ramsey;
    return b;
  }
  if (name == "spin_lock_x") {
    b.protocol = Protocol::SpinLock;
    b.lock_axis = Axis::PlusX;
    return b;
  }
  if (name != "xy8" && name != "xy16" && name != "droid_r2d2") {
    throw std::invalid_argument("unknown baseline sequence: " + name);
  }
  const SequenceFile file = read_sequence_file(data_dir + "/" + name + ".txt");
  if (file.words.size() != 1) {
    throw std::runtime_error("baseline data file must contain exactly one word: " + name);
  }
  b.protocol = Protocol::PulseWord;
  b.seq.codes = file.words[0];
  if (auto it = file.metadata.find("tau"); it != file.metadata.end()) {
    b.seq.tau = std::stod(it->second);
  }
  if (auto it = file.metadata.find("rabi"); it != file.metadata.end()) {
    b.seq.rabi = std::stod(it->second);
  }
  b.seq.validate();
  return b;
}

}  // namespace doess
