#include "doess/config.hpp"

#include <fstream>

#include "doess/surrogate.hpp"
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace doess {

namespace {

using json = nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& known,
                    const std::string& scope) {
  for (const auto& [key, value] : obj.items()) {
    if (!known.count(key))
      throw std::invalid_argument("unknown config key: " + scope + key);
  }
}

template <typename T>
void read_into(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

std::string disorder_name(DisorderDist d) {
  return d == DisorderDist::Gaussian ? "gaussian" : "lorentzian";
}

DisorderDist disorder_from_name(const std::string& name) {
  if (name == "gaussian") return DisorderDist::Gaussian;
  if (name == "lorentzian") return DisorderDist::Lorentzian;
  throw std::invalid_argument("unknown disorder_dist: " + name);
}

std::string form_name(InteractionForm f) {
  switch (f) {
    case InteractionForm::XXYYm2ZZ: return "xx+yy-2zz";
    case InteractionForm::IsingZZ: return "ising_zz";
    case InteractionForm::Heisenberg: return "heisenberg";
  }
  throw std::invalid_argument("bad interaction form");
}

InteractionForm form_from_name(const std::string& name) {
  if (name == "xx+yy-2zz") return InteractionForm::XXYYm2ZZ;
  if (name == "ising_zz") return InteractionForm::IsingZZ;
  if (name == "heisenberg") return InteractionForm::Heisenberg;
  throw std::invalid_argument("unknown interaction_form: " + name);
}

std::string descent_name(DescentPolicy d) {
  return d == DescentPolicy::FromRoot ? "from_root" : "from_best_leaf";
}

DescentPolicy descent_from_name(const std::string& name) {
  if (name == "from_root") return DescentPolicy::FromRoot;
  if (name == "from_best_leaf") return DescentPolicy::FromBestLeaf;
  throw std::invalid_argument("unknown descent: " + name);
}

std::string filter_mode_name(FilterMode m) {
  return m == FilterMode::Exact ? "exact" : "predicted";
}

FilterMode filter_mode_from_name(const std::string& name) {
  if (name == "exact") return FilterMode::Exact;
  if (name == "predicted") return FilterMode::Predicted;
  throw std::invalid_argument("unknown filter_mode: " + name);
}

void parse_simulator(const json& obj, SimulatorParams& sim) {
  reject_unknown(obj,
                 {"n_spins", "disorder_std", "coupling_scale", "box_size",
                  "min_separation", "pulse_error_std", "rabi", "tau", "realizations",
                  "realizations_simplified", "cycle_grid", "simplified_points", "seed",
                  "jobs", "metric", "disorder_dist", "interaction_form"},
                 "simulator.");
  read_into(obj, "n_spins", sim.n_spins);
  read_into(obj, "disorder_std", sim.disorder_std);
  read_into(obj, "coupling_scale", sim.coupling_scale);
  read_into(obj, "box_size", sim.box_size);
  read_into(obj, "min_separation", sim.min_separation);
  read_into(obj, "pulse_error_std", sim.pulse_error_std);
  read_into(obj, "rabi", sim.rabi);
  read_into(obj, "tau", sim.tau);
  read_into(obj, "realizations", sim.realizations);
  read_into(obj, "realizations_simplified", sim.realizations_simplified);
  read_into(obj, "cycle_grid", sim.cycle_grid);
  read_into(obj, "seed", sim.seed);
  read_into(obj, "jobs", sim.jobs);
  if (obj.contains("simplified_points")) {
    const auto pts = obj.at("simplified_points").get<std::vector<int>>();
    if (pts.size() != 3)
      throw std::invalid_argument("simplified_points must have 3 entries");
    sim.simplified_points = {pts[0], pts[1], pts[2]};
  }
  if (obj.contains("metric"))
    sim.metric = metric_from_name(obj.at("metric").get<std::string>());
  if (obj.contains("disorder_dist"))
    sim.disorder_dist = disorder_from_name(obj.at("disorder_dist").get<std::string>());
  if (obj.contains("interaction_form"))
    sim.interaction_form = form_from_name(obj.at("interaction_form").get<std::string>());
}

void parse_search(const json& obj, SearchConfig& search) {
  reject_unknown(obj,
                 {"c0", "expansion_width", "p_stochastic", "init_pool", "eval_budget",
                  "filter_thresholds", "seq_length", "seed", "descent", "filter_mode",
                  "temperature", "cooling"},
                 "search.");
  read_into(obj, "c0", search.c0);
  read_into(obj, "expansion_width", search.expansion_width);
  read_into(obj, "p_stochastic", search.p_stochastic);
  read_into(obj, "init_pool", search.init_pool);
  read_into(obj, "eval_budget", search.eval_budget);
  read_into(obj, "seq_length", search.seq_length);
  read_into(obj, "seed", search.seed);
  read_into(obj, "temperature", search.temperature);
  read_into(obj, "cooling", search.cooling);
  if (obj.contains("filter_thresholds")) {
    const auto t = obj.at("filter_thresholds").get<std::vector<double>>();
    if (t.size() != 5)
      throw std::invalid_argument("filter_thresholds must have 5 entries");
    search.filter_thresholds = {t[0], t[1], t[2], t[3], t[4]};
  }
  if (obj.contains("descent"))
    search.descent = descent_from_name(obj.at("descent").get<std::string>());
  if (obj.contains("filter_mode"))
    search.filter_mode = filter_mode_from_name(obj.at("filter_mode").get<std::string>());
}

void parse_surrogate(const json& obj, SurrogateConfig& sur) {
  reject_unknown(obj,
                 {"feature_kind", "repetitions", "dataset_size", "n_folds", "target",
                  "hidden", "activation", "dropout", "learning_rate", "batch_size",
                  "max_epochs", "patience", "validation_fraction", "seed"},
                 "surrogate.");
  read_into(obj, "feature_kind", sur.feature_kind);
  read_into(obj, "repetitions", sur.repetitions);
  read_into(obj, "dataset_size", sur.dataset_size);
  read_into(obj, "n_folds", sur.n_folds);
  read_into(obj, "target", sur.target);
  read_into(obj, "hidden", sur.mlp.hidden);
  read_into(obj, "activation", sur.mlp.activation);
  read_into(obj, "dropout", sur.mlp.dropout);
  read_into(obj, "learning_rate", sur.mlp.learning_rate);
  read_into(obj, "batch_size", sur.mlp.batch_size);
  read_into(obj, "max_epochs", sur.mlp.max_epochs);
  read_into(obj, "patience", sur.mlp.patience);
  read_into(obj, "validation_fraction", sur.mlp.validation_fraction);
  read_into(obj, "seed", sur.mlp.seed);
}

}  // namespace

std::string metric_name(Metric m) {
  return m == Metric::Overlap ? "overlap" : "polarization";
}

Metric metric_from_name(const std::string& name) {
  if (name == "overlap") return Metric::Overlap;
  if (name == "polarization") return Metric::Polarization;
  throw std::invalid_argument("unknown metric: " + name);
}

void RunConfig::validate() const {
  sim.validate();
  search.validate();
  if (n_variants < 1) throw std::invalid_argument("n_variants must be >= 1");
  if (optimizer != "doess" && optimizer != "mcmc" && optimizer != "sa" &&
      optimizer != "random")
    throw std::invalid_argument("unknown optimizer: " + optimizer);
  if (surrogate.target != "simplified" && surrogate.target != "indicators")
    throw std::invalid_argument("unknown surrogate target: " + surrogate.target);
  feature_kind_from_name(surrogate.feature_kind);  // throws on bad value
  if (surrogate.dataset_size < 10)
    throw std::invalid_argument("surrogate dataset_size too small");
  if (surrogate.n_folds < 2) throw std::invalid_argument("n_folds must be >= 2");
}

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config parse error: ") + e.what());
  }
  if (!root.is_object()) throw std::invalid_argument("config root must be an object");
  // schema_version allowed so resolved snapshots reload as configs
  reject_unknown(root, {"simulator", "search", "surrogate", "run", "schema_version"}, "");

  RunConfig cfg;
  if (root.contains("simulator")) parse_simulator(root.at("simulator"), cfg.sim);
  if (root.contains("search")) parse_search(root.at("search"), cfg.search);
  if (root.contains("surrogate")) parse_surrogate(root.at("surrogate"), cfg.surrogate);
  if (root.contains("run")) {
    const json& run = root.at("run");
    reject_unknown(run, {"n_variants", "optimizer", "out_dir"}, "run.");
    read_into(run, "n_variants", cfg.n_variants);
    read_into(run, "optimizer", cfg.optimizer);
    read_into(run, "out_dir", cfg.out_dir);
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void write_config_snapshot(const std::string& path, const RunConfig& cfg) {
  json j;
  j["schema_version"] = 1;
  j["simulator"] = {
      {"n_spins", cfg.sim.n_spins},
      {"disorder_std", cfg.sim.disorder_std},
      {"coupling_scale", cfg.sim.coupling_scale},
      {"box_size", cfg.sim.box_size},
      {"min_separation", cfg.sim.min_separation},
      {"pulse_error_std", cfg.sim.pulse_error_std},
      {"rabi", cfg.sim.rabi},
      {"tau", cfg.sim.tau},
      {"realizations", cfg.sim.realizations},
      {"realizations_simplified", cfg.sim.realizations_simplified},
      {"cycle_grid", cfg.sim.cycle_grid},
      {"simplified_points",
       std::vector<int>{cfg.sim.simplified_points[0], cfg.sim.simplified_points[1],
                        cfg.sim.simplified_points[2]}},
      {"seed", cfg.sim.seed},
      {"jobs", cfg.sim.jobs},
      {"metric", metric_name(cfg.sim.metric)},
      {"disorder_dist", disorder_name(cfg.sim.disorder_dist)},
      {"interaction_form", form_name(cfg.sim.interaction_form)}};
  j["search"] = {
      {"c0", cfg.search.c0},
      {"expansion_width", cfg.search.expansion_width},
      {"p_stochastic", cfg.search.p_stochastic},
      {"init_pool", cfg.search.init_pool},
      {"eval_budget", cfg.search.eval_budget},
      {"filter_thresholds",
       std::vector<double>(cfg.search.filter_thresholds.begin(),
                           cfg.search.filter_thresholds.end())},
      {"seq_length", cfg.search.seq_length},
      {"seed", cfg.search.seed},
      {"descent", descent_name(cfg.search.descent)},
      {"filter_mode", filter_mode_name(cfg.search.filter_mode)},
      {"temperature", cfg.search.temperature},
      {"cooling", cfg.search.cooling}};
  j["surrogate"] = {{"feature_kind", cfg.surrogate.feature_kind},
                    {"repetitions", cfg.surrogate.repetitions},
                    {"dataset_size", cfg.surrogate.dataset_size},
                    {"n_folds", cfg.surrogate.n_folds},
                    {"target", cfg.surrogate.target},
                    {"hidden", cfg.surrogate.mlp.hidden},
                    {"activation", cfg.surrogate.mlp.activation},
                    {"dropout", cfg.surrogate.mlp.dropout},
                    {"learning_rate", cfg.surrogate.mlp.learning_rate},
                    {"batch_size", cfg.surrogate.mlp.batch_size},
                    {"max_epochs", cfg.surrogate.mlp.max_epochs},
                    {"patience", cfg.surrogate.mlp.patience},
                    {"validation_fraction", cfg.surrogate.mlp.validation_fraction},
                    {"seed", cfg.surrogate.mlp.seed}};
  j["run"] = {{"n_variants", cfg.n_variants},
              {"optimizer", cfg.optimizer},
              {"out_dir", cfg.out_dir}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << j.dump(2) << '\n';
}

}  // namespace doess
