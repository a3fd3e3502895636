#pragma once

#include <string>

#include "doess/mlp.hpp"
#include "doess/search.hpp"
#include "doess/simulator.hpp"

namespace doess {

struct SurrogateConfig {
  std::string feature_kind = "indicator_series";
  int repetitions = 8;
  int dataset_size = 2000;
  int n_folds = 5;
  std::string target = "simplified";  // or "indicators"
  MlpSpec mlp;
};

struct RunConfig {
  SimulatorParams sim;
  SearchConfig search;
  SurrogateConfig surrogate;
  int n_variants = 1;
  std::string optimizer = "doess";  // doess | mcmc | sa | random
  std::string out_dir = "out";

  void validate() const;
};

// JSON with // and /* */ comments allowed; unknown keys anywhere are a
// configuration error. Missing keys keep their defaults.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text);

// resolved snapshot: every effective value, written next to run outputs so a
// run can be reproduced from the snapshot alone
void write_config_snapshot(const std::string& path, const RunConfig& cfg);

std::string metric_name(Metric m);
Metric metric_from_name(const std::string& name);

}  // namespace doess
