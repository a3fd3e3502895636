// doess: simulate | indicators | search | surrogate | report
//
// Exit codes: 0 success, 2 input data error, 3 config error, 4 missing
// artifact.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "doess/config.hpp"
#include "doess/fit.hpp"
#include "doess/indicators.hpp"
#include "doess/search.hpp"
#include "doess/sequences.hpp"
#include "doess/simulator.hpp"
#include "doess/surrogate.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace doess;

namespace {

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MissingArtifact : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NamedSequence {
  std::string label;
  Baseline entry;  // protocol + word (or descriptor)
};

// A sequences file holds '#' headers plus one entry per line: either a
// comma-separated code word or a known baseline name (ramsey, xy8, ...).
std::vector<NamedSequence> read_named_sequences(const std::string& path,
                                                const SimulatorParams& sim) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open sequences file: " + path);
  std::vector<NamedSequence> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const std::string body = line.substr(first);
    const bool word_like = body.find_first_not_of("0123456789, \t\r") == std::string::npos;
    NamedSequence named;
    if (word_like) {
      std::vector<int> codes;
      std::stringstream ss(body);
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        try {
          codes.push_back(std::stoi(tok));
        } catch (const std::exception&) {
          throw InputError(path + ":" + std::to_string(line_no) + ": malformed code word");
        }
      }
      if (codes.empty())
        throw InputError(path + ":" + std::to_string(line_no) + ": empty code word");
      named.label = "seq" + std::to_string(out.size() + 1);
      named.entry.name = named.label;
      named.entry.protocol = Protocol::PulseWord;
      try {
        named.entry.seq = decode(codes, sim.tau, sim.rabi);
      } catch (const std::exception& e) {
        throw InputError(path + ":" + std::to_string(line_no) + ": " + e.what());
      }
    } else {
      try {
        named.entry = baseline(body, DOESS_DATA_DIR);
      } catch (const std::exception& e) {
        throw InputError(path + ":" + std::to_string(line_no) + ": " + e.what());
      }
      named.label = named.entry.name;
      named.entry.seq.tau = sim.tau;
      named.entry.seq.rabi = sim.rabi;
    }
    out.push_back(std::move(named));
  }
  if (out.empty()) throw InputError(path + ": no sequences found");
  return out;
}

PulseSequence protocol_sequence(const Baseline& entry, const SimulatorParams& sim) {
  if (entry.protocol == Protocol::Ramsey) {
    PulseSequence seq;
    seq.codes.assign(kDefaultSequenceLength, 0);
    seq.tau = sim.tau;
    seq.rabi = sim.rabi;
    return seq;
  }
  return entry.seq;
}

void write_curve_csv(const std::string& path, const CoherenceCurve& curve) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.precision(17);
  out << "M,T_us,cx,cy,cz\n";
  for (size_t i = 0; i < curve.times.size(); ++i)
    out << curve.cycles[i] << ',' << curve.times[i] << ',' << curve.values[0][i] << ','
        << curve.values[1][i] << ',' << curve.values[2][i] << '\n';
}

void write_fit_json(const std::string& path, const FitResult& fit, double score) {
  json j;
  j["schema_version"] = 1;
  j["contrast"] = fit.contrast;
  j["kappa"] = fit.kappa;
  j["coherence_time"] = std::isinf(fit.coherence_time) ? -1.0 : fit.coherence_time;
  j["coherence_score"] = score;
  j["unfittable"] = fit.unfittable;
  j["axes"] = json::array();
  for (const AxisFit& axis : fit.axes)
    j["axes"].push_back({{"contrast", axis.contrast},
                         {"kappa", axis.kappa},
                         {"unfittable", axis.unfittable}});
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << j.dump(2) << '\n';
}

int cmd_simulate(const RunConfig& cfg, const std::string& sequences_path) {
  fs::create_directories(cfg.out_dir);
  write_config_snapshot(cfg.out_dir + "/resolved_config.json", cfg);
  const auto entries = read_named_sequences(sequences_path, cfg.sim);

  std::ofstream summary(cfg.out_dir + "/fits.csv");
  summary.precision(17);
  summary << "label,contrast,kappa,coherence_time,coherence_score,unfittable\n";
  for (const auto& named : entries) {
    CoherenceCurve curve;
    if (named.entry.protocol == Protocol::SpinLock) {
      curve = spin_lock_curve(named.entry.lock_axis, cfg.sim);
    } else {
      const std::array<bool, 3> axes = named.entry.protocol == Protocol::Ramsey
                                           ? std::array<bool, 3>{true, true, false}
                                           : std::array<bool, 3>{true, true, true};
      curve = coherence_curve(protocol_sequence(named.entry, cfg.sim), cfg.sim, axes);
    }
    const FitResult fit = fit_exponential(curve);
    const double score = coherence_score(fit, curve.times.back());
    write_curve_csv(cfg.out_dir + "/" + named.label + "_curve.csv", curve);
    write_fit_json(cfg.out_dir + "/" + named.label + "_fit.json", fit, score);
    summary << named.label << ',' << fit.contrast << ',' << fit.kappa << ','
            << (std::isinf(fit.coherence_time) ? -1.0 : fit.coherence_time) << ','
            << score << ',' << (fit.unfittable ? 1 : 0) << '\n';
  }
  return 0;
}

int cmd_indicators(const RunConfig& cfg, const std::string& sequences_path,
                   int repetitions) {
  fs::create_directories(cfg.out_dir);
  write_config_snapshot(cfg.out_dir + "/resolved_config.json", cfg);
  const auto entries = read_named_sequences(sequences_path, cfg.sim);

  std::ofstream out(cfg.out_dir + "/indicators.csv");
  out.precision(17);
  out << "label,i1,i2,i3,i4,i5";
  for (int r = 1; r <= repetitions; ++r)
    for (int k = 1; k <= 5; ++k) out << ",s" << k << "_r" << r;
  out << '\n';
  for (const auto& named : entries) {
    const PulseSequence seq = protocol_sequence(named.entry, cfg.sim);
    const IndicatorVector iv = indicators(seq, cfg.sim.interaction_form);
    out << named.label;
    for (int k = 0; k < 5; ++k) out << ',' << iv[k];
    if (repetitions > 0) {
      const Eigen::MatrixXd series =
          indicator_series(seq, repetitions, cfg.sim.interaction_form);
      for (int r = 0; r < repetitions; ++r)
        for (int k = 0; k < 5; ++k) out << ',' << series(k, r);
    }
    out << '\n';
  }
  return 0;
}

SearchResult run_optimizer(const std::string& optimizer, const SearchConfig& cfg,
                           const SimulatorParams& sim) {
  if (optimizer == "doess") return doess_run(cfg, sim);
  if (optimizer == "mcmc") return mcmc_run(cfg, sim);
  if (optimizer == "sa") return sa_run(cfg, sim);
  return random_run(cfg, sim);
}

int cmd_search(const RunConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  write_config_snapshot(cfg.out_dir + "/resolved_config.json", cfg);
  const auto variants = ensemble_params(cfg.sim, cfg.n_variants);

  std::vector<ScoredSequence> elite;
  for (int v = 0; v < cfg.n_variants; ++v) {
    const std::string dir = cfg.out_dir + "/v" + std::to_string(v + 1);
    fs::create_directories(dir);
    SearchConfig search = cfg.search;
    search.seed = cfg.search.seed + static_cast<uint64_t>(v);
    const SearchResult result = run_optimizer(cfg.optimizer, search, variants[static_cast<size_t>(v)]);
    write_trajectory_csv(dir + "/trajectory.csv", result);
    write_ranked_sequences(dir + "/ranked.txt", result, search);
    const size_t keep = std::min<size_t>(50, result.ranked.size());
    elite.insert(elite.end(), result.ranked.begin(), result.ranked.begin() + static_cast<long>(keep));
  }
  std::stable_sort(elite.begin(), elite.end(),
                   [](const ScoredSequence& a, const ScoredSequence& b) {
                     return a.simplified > b.simplified;
                   });
  SequenceFile merged;
  merged.metadata["n_variants"] = std::to_string(cfg.n_variants);
  merged.metadata["order"] = "best simplified score first";
  for (const auto& s : elite) merged.words.push_back(s.seq.codes);
  write_sequence_file(cfg.out_dir + "/elite.txt", merged);
  return 0;
}

std::vector<PulseSequence> surrogate_pool(const RunConfig& cfg, uint64_t seed) {
  RngStream rng(seed, 0xDA7A);
  std::vector<PulseSequence> seqs;
  seqs.reserve(static_cast<size_t>(cfg.surrogate.dataset_size));
  for (int i = 0; i < cfg.surrogate.dataset_size; ++i) {
    PulseSequence seq;
    seq.tau = cfg.sim.tau;
    seq.rabi = cfg.sim.rabi;
    seq.codes.resize(static_cast<size_t>(cfg.search.seq_length));
    for (auto& c : seq.codes) c = rng.uniform_int(0, kAlphabetSize - 1);
    seqs.push_back(std::move(seq));
  }
  return seqs;
}

Dataset surrogate_dataset(const RunConfig& cfg, uint64_t seed) {
  const auto seqs = surrogate_pool(cfg, seed);
  const FeatureKind kind = feature_kind_from_name(cfg.surrogate.feature_kind);
  Eigen::MatrixXd targets;
  if (cfg.surrogate.target == "indicators") {
    targets.resize(static_cast<Eigen::Index>(seqs.size()), 3);
    for (size_t i = 0; i < seqs.size(); ++i) {
      const IndicatorVector iv = indicators(seqs[i], cfg.sim.interaction_form);
      targets(static_cast<Eigen::Index>(i), 0) = iv.i1;
      targets(static_cast<Eigen::Index>(i), 1) = iv.i2;
      targets(static_cast<Eigen::Index>(i), 2) = iv.i3;
    }
  } else {
    targets.resize(static_cast<Eigen::Index>(seqs.size()), 1);
    for (size_t i = 0; i < seqs.size(); ++i)
      targets(static_cast<Eigen::Index>(i), 0) = simplified_score(seqs[i], cfg.sim);
  }
  return make_dataset(seqs, targets, kind, cfg.surrogate.repetitions);
}

int cmd_surrogate(const RunConfig& cfg, const std::string& mode,
                  const std::string& model_prefix, const std::string& sequences_path) {
  fs::create_directories(cfg.out_dir);
  write_config_snapshot(cfg.out_dir + "/resolved_config.json", cfg);

  if (mode == "train") {
    const Dataset ds = surrogate_dataset(cfg, cfg.surrogate.mlp.seed);
    EvalReport report;
    const SurrogateModel model =
        train_surrogate(ds, cfg.surrogate.mlp, &report, cfg.surrogate.n_folds);
    model.save(model_prefix);
    write_eval_report(cfg.out_dir + "/eval_report.json", report);
    return 0;
  }
  if (!fs::exists(model_prefix + ".manifest.json"))
    throw MissingArtifact("missing model file: " + model_prefix + ".manifest.json");
  const SurrogateModel model = SurrogateModel::load(model_prefix);
  if (mode == "eval") {
    const Dataset ds = surrogate_dataset(cfg, cfg.surrogate.mlp.seed + 1);
    write_eval_report(cfg.out_dir + "/eval_report.json", evaluate(model, ds));
    return 0;
  }
  // predict
  const auto entries = read_named_sequences(sequences_path, cfg.sim);
  std::vector<PulseSequence> seqs;
  for (const auto& named : entries) seqs.push_back(protocol_sequence(named.entry, cfg.sim));
  const Eigen::MatrixXd pred = model.predict_sequences(seqs);
  std::ofstream out(cfg.out_dir + "/predictions.csv");
  out.precision(17);
  out << "label";
  for (Eigen::Index c = 0; c < pred.cols(); ++c) out << ",y" << c + 1;
  out << '\n';
  for (size_t i = 0; i < entries.size(); ++i) {
    out << entries[i].label;
    for (Eigen::Index c = 0; c < pred.cols(); ++c)
      out << ',' << pred(static_cast<Eigen::Index>(i), c);
    out << '\n';
  }
  return 0;
}

int cmd_report(const std::string& run_dir) {
  std::vector<std::string> missing;
  const std::string snapshot = run_dir + "/resolved_config.json";
  if (!fs::exists(snapshot)) missing.push_back(snapshot);
  std::vector<std::string> variant_dirs;
  for (int v = 1;; ++v) {
    const std::string dir = run_dir + "/v" + std::to_string(v);
    if (!fs::exists(dir)) break;
    variant_dirs.push_back(dir);
    if (!fs::exists(dir + "/trajectory.csv")) missing.push_back(dir + "/trajectory.csv");
    if (!fs::exists(dir + "/ranked.txt")) missing.push_back(dir + "/ranked.txt");
  }
  if (variant_dirs.empty() && fs::exists(run_dir)) missing.push_back(run_dir + "/v1");
  if (!fs::exists(run_dir)) missing.push_back(run_dir);
  if (!missing.empty()) {
    std::ostringstream msg;
    msg << "missing artifacts:";
    for (const auto& m : missing) msg << ' ' << m;
    throw MissingArtifact(msg.str());
  }

  const RunConfig cfg = load_config(snapshot);
  const auto variants = ensemble_params(cfg.sim, static_cast<int>(variant_dirs.size()));
  const Baseline droid = baseline("droid_r2d2", DOESS_DATA_DIR);

  std::ofstream best(run_dir + "/report_best_so_far.csv");
  best.precision(17);
  best << "variant,eval_idx,best_so_far\n";
  std::ofstream scores(run_dir + "/report_scores.csv");
  scores.precision(17);
  scores << "variant,rank,simplified,normalized_vs_droid\n";
  std::ofstream aniso(run_dir + "/report_anisotropy.csv");
  aniso.precision(17);
  aniso << "variant,rank,net_axis_x,net_axis_y,net_axis_z,net_angle,kappa_x,kappa_y,"
           "kappa_z,spin_lock_like\n";

  for (size_t v = 0; v < variant_dirs.size(); ++v) {
    const SimulatorParams& sim = variants[v];
    PulseSequence droid_seq = droid.seq;
    droid_seq.tau = sim.tau;
    droid_seq.rabi = sim.rabi;
    const double droid_score = simplified_score(droid_seq, sim);

    // trajectory: keep eval_idx and best_so_far columns
    std::ifstream traj(variant_dirs[v] + "/trajectory.csv");
    std::string line;
    std::getline(traj, line);  // header
    while (std::getline(traj, line)) {
      const auto first_comma = line.find(',');
      const auto last_comma = line.rfind(',');
      if (first_comma == std::string::npos || last_comma <= first_comma) continue;
      best << 'v' << v + 1 << ',' << line.substr(0, first_comma) << ','
           << line.substr(last_comma + 1) << '\n';
    }

    const SequenceFile ranked = read_sequence_file(variant_dirs[v] + "/ranked.txt");
    const size_t top = std::min<size_t>(3, ranked.words.size());
    for (size_t r = 0; r < top; ++r) {
      const PulseSequence seq = decode(ranked.words[r], sim.tau, sim.rabi);
      const double score = simplified_score(seq, sim);
      scores << 'v' << v + 1 << ',' << r + 1 << ',' << score << ','
             << (droid_score > 0 ? score / droid_score : -1.0) << '\n';
      const AnisotropyReport rep = anisotropy_report(seq, sim);
      aniso << 'v' << v + 1 << ',' << r + 1 << ',' << rep.net.axis(0) << ','
            << rep.net.axis(1) << ',' << rep.net.axis(2) << ',' << rep.net.angle << ','
            << rep.fit.axes[0].kappa << ',' << rep.fit.axes[1].kappa << ','
            << rep.fit.axes[2].kappa << ',' << (rep.spin_lock_like ? 1 : 0) << '\n';
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pulse-sequence design toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir, sequences_path, run_dir;
  std::string model_prefix, surrogate_mode = "train", metric_override;
  int64_t seed = -1;
  int jobs = -1;
  int repetitions = 0;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file (comments allowed)");
    cmd->add_option("--seed", seed, "override all seeds");
    cmd->add_option("--jobs", jobs, "worker cap (0 = all logical cores)");
    cmd->add_option("--out", out_dir, "output directory");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "coherence curves and fits");
  add_common(simulate);
  simulate->add_option("--sequences", sequences_path, "sequences file")->required();
  simulate->add_option("--metric", metric_override, "overlap | polarization");

  CLI::App* indicators_cmd = app.add_subcommand("indicators", "indicator table");
  add_common(indicators_cmd);
  indicators_cmd->add_option("--sequences", sequences_path, "sequences file")->required();
  indicators_cmd->add_option("--repetitions", repetitions, "series repetitions R");

  CLI::App* search = app.add_subcommand("search", "sequence optimization");
  add_common(search);

  CLI::App* surrogate = app.add_subcommand("surrogate", "surrogate train/eval/predict");
  add_common(surrogate);
  surrogate->add_option("mode", surrogate_mode, "train | eval | predict")->required();
  surrogate->add_option("--model", model_prefix, "model file prefix");
  surrogate->add_option("--sequences", sequences_path, "sequences file (predict)");

  CLI::App* report = app.add_subcommand("report", "summary tables for a run directory");
  report->add_option("--run-dir", run_dir, "completed run directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (seed >= 0) {
      cfg.sim.seed = static_cast<uint64_t>(seed);
      cfg.search.seed = static_cast<uint64_t>(seed);
      cfg.surrogate.mlp.seed = static_cast<uint64_t>(seed);
    }
    if (jobs >= 0) cfg.sim.jobs = jobs;
    if (!metric_override.empty()) cfg.sim.metric = metric_from_name(metric_override);
    cfg.validate();

    if (simulate->parsed()) return cmd_simulate(cfg, sequences_path);
    if (indicators_cmd->parsed()) return cmd_indicators(cfg, sequences_path, repetitions);
    if (search->parsed()) return cmd_search(cfg);
    if (surrogate->parsed()) {
      if (surrogate_mode != "train" && surrogate_mode != "eval" &&
          surrogate_mode != "predict")
        throw std::invalid_argument("unknown surrogate mode: " + surrogate_mode);
      if (surrogate_mode == "predict" && sequences_path.empty())
        throw InputError("predict requires --sequences");
      if (model_prefix.empty()) model_prefix = cfg.out_dir + "/surrogate";
      return cmd_surrogate(cfg, surrogate_mode, model_prefix, sequences_path);
    }
    if (report->parsed()) return cmd_report(run_dir);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const MissingArtifact& e) {
    std::cerr << "missing artifact: " << e.what() << '\n';
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
