#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "doess/indicators.hpp"
#include "doess/rng.hpp"
#include "doess/sequences.hpp"
#include "doess/simulator.hpp"

namespace doess {

enum class DescentPolicy { FromRoot, FromBestLeaf };
enum class FilterMode { Exact, Predicted };

struct SearchConfig {
  double c0 = 0.01;              // exploration weight
  int expansion_width = 24;
  double p_stochastic = 0.75;    // else deterministic +-1 move
  int init_pool = 2000;
  int eval_budget = 5000;        // simulator calls, filters excluded
  std::array<double, 5> filter_thresholds = {0.25, 0.25, 0.25, 0.25, 0.25};
  int seq_length = kDefaultSequenceLength;
  uint64_t seed = 0;
  DescentPolicy descent = DescentPolicy::FromRoot;
  FilterMode filter_mode = FilterMode::Exact;
  double temperature = 0.1;  // MCMC / initial SA temperature
  double cooling = 0.999;    // SA geometric cooling per accepted step

  void validate() const;
};

struct TreeNode {
  PulseSequence seq;
  int n = 0;                 // visit count
  double simplified = 0.0;
  bool simulated = false;    // false while pending or filtered out
  bool filtered = false;
  int parent = -1;
  std::vector<int> children;
};

// Eq-style UCB: simplified + c0 * max_rho * sqrt(2 ln(N) / (n + 1));
// unsimulated nodes contribute 0 exploitation.
double search_score(const TreeNode& node, int n_total, double max_rho, double c0);

// One move: with p_stochastic, rewrite one of {1, d/2, d/3, d/4, d/5, d/10}
// (rounded to nearest, >= 1) uniformly chosen positions with uniform codes;
// otherwise shift one position by +-1, reflecting at the code boundaries.
PulseSequence mutate(const PulseSequence& seq, const SearchConfig& cfg, RngStream& rng);

// Predicts indicators 1..3 from a sequence (the surrogate plugs in here).
using IndicatorPredictor = std::function<std::array<double, 3>(const PulseSequence&)>;

// Two-stage screen: indicators 1..3 (predicted when a predictor is supplied,
// exact otherwise) then exact 4..5, all strictly below their thresholds.
bool filter(const PulseSequence& seq, const std::array<double, 5>& thresholds,
            const IndicatorPredictor& predictor = nullptr);

struct ScoredSequence {
  PulseSequence seq;
  double simplified = 0.0;
  IndicatorVector indicators;
};

struct TrajectoryRow {
  int eval_idx = 0;  // 1-based simulator-call index
  std::vector<int> codes;
  double simplified = 0.0;
  IndicatorVector indicators;
  double best_so_far = 0.0;
};

struct SearchResult {
  std::vector<ScoredSequence> ranked;  // simulated sequences, best first
  std::vector<TrajectoryRow> trajectory;
  int evals_used = 0;
  int rollouts = 0;                    // tree runs only
  std::vector<TreeNode> tree;          // final tree snapshot (doess_run only)
  std::vector<int> rollout_terminals;  // node index each rollout descended to
};

SearchResult doess_run(const SearchConfig& cfg, const SimulatorParams& sim,
                       const IndicatorPredictor& predictor = nullptr);
SearchResult mcmc_run(const SearchConfig& cfg, const SimulatorParams& sim);
SearchResult sa_run(const SearchConfig& cfg, const SimulatorParams& sim);
SearchResult random_run(const SearchConfig& cfg, const SimulatorParams& sim);

// eval_idx, seq_codes, simplified, i1..i5, best_so_far (codes dash-joined)
void write_trajectory_csv(const std::string& path, const SearchResult& result);
// ranked words in the sequences module data-file format
void write_ranked_sequences(const std::string& path, const SearchResult& result,
                            const SearchConfig& cfg);

}  // namespace doess
