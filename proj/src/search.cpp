#include "doess/search.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace doess {

namespace {

constexpr uint64_t kPoolStream = 1;
constexpr uint64_t kMoveStream = 2;

PulseSequence random_sequence(const SearchConfig& cfg, const SimulatorParams& sim,
                              RngStream& rng) {
  PulseSequence seq;
  seq.tau = sim.tau;
  seq.rabi = sim.rabi;
  seq.codes.resize(static_cast<size_t>(cfg.seq_length));
  for (auto& c : seq.codes) c = rng.uniform_int(0, kAlphabetSize - 1);
  return seq;
}

// shared simulator-call meter so every optimizer pays the same price
struct Meter {
  int used = 0;
  int budget = 0;

  bool exhausted() const { return used >= budget; }
};

double simulate(const PulseSequence& seq, const SimulatorParams& sim, Meter& meter,
                SearchResult& result) {
  const double score = simplified_score(seq, sim);
  ++meter.used;
  TrajectoryRow row;
  row.eval_idx = meter.used;
  row.codes = seq.codes;
  row.simplified = score;
  row.indicators = indicators(seq, sim.interaction_form);
  row.best_so_far = result.trajectory.empty()
                        ? score
                        : std::max(score, result.trajectory.back().best_so_far);
  result.trajectory.push_back(row);
  result.ranked.push_back({seq, score, row.indicators});
  return score;
}

void finalize(SearchResult& result, const Meter& meter) {
  result.evals_used = meter.used;
  std::stable_sort(result.ranked.begin(), result.ranked.end(),
                   [](const ScoredSequence& a, const ScoredSequence& b) {
                     return a.simplified > b.simplified;
                   });
}

std::string join_codes(const std::vector<int>& codes) {
  std::ostringstream out;
  for (size_t i = 0; i < codes.size(); ++i) {
    if (i) out << '-';
    out << codes[i];
  }
  return out.str();
}

}  // namespace

void SearchConfig::validate() const {
  if (c0 < 0) throw std::invalid_argument("c0 must be >= 0");
  if (p_stochastic < 0 || p_stochastic > 1)
    throw std::invalid_argument("p_stochastic must lie in [0, 1]");
  if (expansion_width < 1) throw std::invalid_argument("expansion_width must be >= 1");
  if (init_pool < 1) throw std::invalid_argument("init_pool must be >= 1");
  if (eval_budget < init_pool)
    throw std::invalid_argument("eval_budget must cover the init pool");
  if (seq_length < 1) throw std::invalid_argument("seq_length must be >= 1");
  if (temperature < 0) throw std::invalid_argument("temperature must be >= 0");
  if (cooling <= 0 || cooling > 1) throw std::invalid_argument("cooling must lie in (0, 1]");
}

double search_score(const TreeNode& node, int n_total, double max_rho, double c0) {
  if (n_total < 1) throw std::invalid_argument("n_total must be >= 1");
  const double exploitation = node.simulated ? node.simplified : 0.0;
  return exploitation +
         c0 * max_rho * std::sqrt(2.0 * std::log(static_cast<double>(n_total)) /
                                  (node.n + 1.0));
}

PulseSequence mutate(const PulseSequence& seq, const SearchConfig& cfg, RngStream& rng) {
  PulseSequence out = seq;
  const int d = seq.length();
  if (rng.uniform() < cfg.p_stochastic) {
    const auto size_of = [d](double divisor) {
      return std::max(1, static_cast<int>(std::lround(d / divisor)));
    };
    const int sizes[6] = {1, size_of(2), size_of(3), size_of(4), size_of(5), size_of(10)};
    const int k = std::min(sizes[rng.uniform_int(0, 5)], d);
    // sample k distinct positions (partial Fisher-Yates)
    std::vector<int> positions(static_cast<size_t>(d));
    for (int i = 0; i < d; ++i) positions[static_cast<size_t>(i)] = i;
    for (int i = 0; i < k; ++i) {
      std::swap(positions[static_cast<size_t>(i)],
                positions[static_cast<size_t>(rng.uniform_int(i, d - 1))]);
      out.codes[static_cast<size_t>(positions[static_cast<size_t>(i)])] =
          rng.uniform_int(0, kAlphabetSize - 1);
    }
  } else {
    const int pos = rng.uniform_int(0, d - 1);
    const int step = rng.uniform() < 0.5 ? 1 : -1;
    int code = seq.codes[static_cast<size_t>(pos)] + step;
    // reflect at the alphabet boundaries to keep the proposal symmetric
    if (code < 0 || code >= kAlphabetSize)
      code = seq.codes[static_cast<size_t>(pos)] - step;
    out.codes[static_cast<size_t>(pos)] = code;
  }
  return out;
}

bool filter(const PulseSequence& seq, const std::array<double, 5>& thresholds,
            const IndicatorPredictor& predictor) {
  std::array<double, 3> first;
  if (predictor) {
    first = predictor(seq);
  } else {
    first = {indicator_1_disorder_free(seq), indicator_2_disorder_pulse(seq),
             indicator_3_interaction_free(seq)};
  }
  if (first[0] >= thresholds[0] || first[1] >= thresholds[1] || first[2] >= thresholds[2])
    return false;
  return indicator_4_interaction_pulse(seq) < thresholds[3] &&
         indicator_5_pulse_error(seq) < thresholds[4];
}

SearchResult doess_run(const SearchConfig& cfg, const SimulatorParams& sim,
                       const IndicatorPredictor& predictor) {
  cfg.validate();
  sim.validate();
  if (cfg.filter_mode == FilterMode::Predicted && !predictor)
    throw std::invalid_argument("predicted filter mode requires a predictor");
  const IndicatorPredictor& screen =
      (cfg.filter_mode == FilterMode::Predicted) ? predictor : IndicatorPredictor{};

  SearchResult result;
  Meter meter{0, cfg.eval_budget};
  RngStream pool_rng(cfg.seed, kPoolStream);
  RngStream move_rng(cfg.seed, kMoveStream);
  std::deque<TreeNode> nodes;
  double max_rho = 0.0;

  // phase 1: random pool; the root is the filter-passing member with the best
  // simplified score, ties broken by the smallest indicator sum
  int root = -1;
  for (int i = 0; i < cfg.init_pool && !meter.exhausted(); ++i) {
    TreeNode node;
    node.seq = random_sequence(cfg, sim, pool_rng);
    if (filter(node.seq, cfg.filter_thresholds, screen)) {
      node.simplified = simulate(node.seq, sim, meter, result);
      node.simulated = true;
      max_rho = std::max(max_rho, node.simplified);
    } else {
      node.filtered = true;
    }
    nodes.push_back(std::move(node));
    const TreeNode& cur = nodes.back();
    if (!cur.simulated) continue;
    if (root < 0 || cur.simplified > nodes[static_cast<size_t>(root)].simplified ||
        (cur.simplified == nodes[static_cast<size_t>(root)].simplified &&
         indicators(cur.seq, sim.interaction_form).sum() <
             indicators(nodes[static_cast<size_t>(root)].seq, sim.interaction_form).sum()))
      root = static_cast<int>(nodes.size()) - 1;
  }
  if (root < 0) {
    // nothing survived the filter; fall back to the first pool member
    root = 0;
    if (nodes.empty()) nodes.push_back({random_sequence(cfg, sim, pool_rng)});
  }
  // detach the root from the pool bookkeeping
  TreeNode root_node = nodes[static_cast<size_t>(root)];
  root_node.parent = -1;
  root_node.children.clear();
  nodes.clear();
  nodes.push_back(std::move(root_node));
  root = 0;

  int best_node = root;
  const int rollout_cap = 10 * cfg.eval_budget;
  while (!meter.exhausted() && result.rollouts < rollout_cap) {
    // descend to a leaf along argmax search score
    const int n_total = nodes[static_cast<size_t>(root)].n + 1;
    int cur = (cfg.descent == DescentPolicy::FromBestLeaf) ? best_node : root;
    while (!nodes[static_cast<size_t>(cur)].children.empty()) {
      int best_child = -1;
      double best_score = -1.0;
      for (int child : nodes[static_cast<size_t>(cur)].children) {
        const double s = search_score(nodes[static_cast<size_t>(child)], n_total,
                                      max_rho > 0 ? max_rho : 1.0, cfg.c0);
        if (s > best_score) {
          best_score = s;
          best_child = child;
        }
      }
      cur = best_child;
    }

    // expand: every mutant becomes a child, only filter-passers get simulated
    for (int e = 0; e < cfg.expansion_width; ++e) {
      TreeNode child;
      child.seq = mutate(nodes[static_cast<size_t>(cur)].seq, cfg, move_rng);
      child.parent = cur;
      if (filter(child.seq, cfg.filter_thresholds, screen)) {
        if (!meter.exhausted()) {
          child.simplified = simulate(child.seq, sim, meter, result);
          child.simulated = true;
          max_rho = std::max(max_rho, child.simplified);
        }
      } else {
        child.filtered = true;
      }
      nodes.push_back(std::move(child));
      nodes[static_cast<size_t>(cur)].children.push_back(
          static_cast<int>(nodes.size()) - 1);
      if (nodes.back().simulated &&
          nodes.back().simplified > nodes[static_cast<size_t>(best_node)].simplified)
        best_node = static_cast<int>(nodes.size()) - 1;
    }

    // select and backpropagate one visit along the path to the root
    int selected = -1;
    double best_score = -1.0;
    for (int child : nodes[static_cast<size_t>(cur)].children) {
      const double s = search_score(nodes[static_cast<size_t>(child)], n_total,
                                    max_rho > 0 ? max_rho : 1.0, cfg.c0);
      if (s > best_score) {
        best_score = s;
        selected = child;
      }
    }
    for (int walk = selected; walk >= 0; walk = nodes[static_cast<size_t>(walk)].parent)
      ++nodes[static_cast<size_t>(walk)].n;
    result.rollout_terminals.push_back(selected);
    ++result.rollouts;
  }

  result.tree.assign(nodes.begin(), nodes.end());
  finalize(result, meter);
  return result;
}

namespace {

SearchResult chain_run(const SearchConfig& cfg, const SimulatorParams& sim, bool cool) {
  cfg.validate();
  sim.validate();
  SearchResult result;
  Meter meter{0, cfg.eval_budget};
  RngStream rng(cfg.seed, kMoveStream);

  PulseSequence cur = random_sequence(cfg, sim, rng);
  double cur_score = simulate(cur, sim, meter, result);
  double temp = cfg.temperature;
  while (!meter.exhausted()) {
    const PulseSequence cand = mutate(cur, cfg, rng);
    const double cand_score = simulate(cand, sim, meter, result);
    const double delta = cand_score - cur_score;
    const bool accept =
        delta >= 0 ||
        (temp > 0 && rng.uniform() < std::exp(delta / temp));
    if (accept) {
      cur = cand;
      cur_score = cand_score;
    }
    if (cool) temp *= cfg.cooling;
  }
  finalize(result, meter);
  return result;
}

}  // namespace

SearchResult mcmc_run(const SearchConfig& cfg, const SimulatorParams& sim) {
  return chain_run(cfg, sim, false);
}

SearchResult sa_run(const SearchConfig& cfg, const SimulatorParams& sim) {
  return chain_run(cfg, sim, true);
}

SearchResult random_run(const SearchConfig& cfg, const SimulatorParams& sim) {
  cfg.validate();
  sim.validate();
  SearchResult result;
  Meter meter{0, cfg.eval_budget};
  RngStream rng(cfg.seed, kPoolStream);
  while (!meter.exhausted()) simulate(random_sequence(cfg, sim, rng), sim, meter, result);
  finalize(result, meter);
  return result;
}

void write_trajectory_csv(const std::string& path, const SearchResult& result) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "eval_idx,seq_codes,simplified,i1,i2,i3,i4,i5,best_so_far\n";
  out.precision(17);
  for (const TrajectoryRow& row : result.trajectory) {
    out << row.eval_idx << ',' << join_codes(row.codes) << ',' << row.simplified;
    for (int k = 0; k < 5; ++k) out << ',' << row.indicators[k];
    out << ',' << row.best_so_far << '\n';
  }
}

void write_ranked_sequences(const std::string& path, const SearchResult& result,
                            const SearchConfig& cfg) {
  SequenceFile file;
  file.metadata["eval_budget"] = std::to_string(cfg.eval_budget);
  file.metadata["seed"] = std::to_string(cfg.seed);
  file.metadata["order"] = "best simplified score first";
  for (const ScoredSequence& s : result.ranked) file.words.push_back(s.seq.codes);
  write_sequence_file(path, file);
}

}  // namespace doess
