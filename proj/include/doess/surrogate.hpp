#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "doess/mlp.hpp"
#include "doess/sequences.hpp"

namespace doess {

enum class FeatureKind { IntegerEncoding, PulseMatrix, SingleIndicators, IndicatorSeries };

std::string feature_kind_name(FeatureKind kind);
FeatureKind feature_kind_from_name(const std::string& name);

// integer_encoding: codes / 12 (d dims); pulse_matrix: flattened one-hot
// (13 d dims); single_indicators: the 5 indicators; indicator_series: the
// flattened 5 x R repetition series.
Eigen::VectorXd featurize(const PulseSequence& seq, FeatureKind kind, int repetitions = 8);

struct Dataset {
  Eigen::MatrixXd features;  // one row per sample
  Eigen::MatrixXd targets;
  FeatureKind kind = FeatureKind::IndicatorSeries;
  int repetitions = 8;
};

Dataset make_dataset(const std::vector<PulseSequence>& seqs, const Eigen::MatrixXd& targets,
                     FeatureKind kind, int repetitions = 8);

struct EvalReport {
  double r_squared = 0.0;
  double mae = 0.0;
  std::vector<double> fold_r2;
  std::vector<double> fold_mae;
  std::vector<std::pair<double, double>> pairs;  // (truth, prediction), first target
};

void write_eval_report(const std::string& path, const EvalReport& report);
EvalReport read_eval_report(const std::string& path);

struct SurrogateModel {
  FeatureKind kind = FeatureKind::IndicatorSeries;
  int repetitions = 8;
  std::vector<Mlp> folds;

  // mean of the fold models
  Eigen::MatrixXd predict(const Eigen::MatrixXd& features) const;
  Eigen::MatrixXd predict_sequences(const std::vector<PulseSequence>& seqs) const;

  void save(const std::string& prefix) const;  // prefix.manifest.json + fold files
  static SurrogateModel load(const std::string& prefix);
};

// K-fold cross-validation (round-robin folds): trains one model per fold and
// aggregates R^2 / MAE from the out-of-fold predictions.
SurrogateModel train_surrogate(const Dataset& dataset, const MlpSpec& spec,
                               EvalReport* report = nullptr, int n_folds = 5);

EvalReport evaluate(const SurrogateModel& model, const Dataset& heldout);

// first three target columns of a pulse_matrix-trained model; used by the
// search filter in predicted mode
std::vector<std::array<double, 3>> predict_indicators(const SurrogateModel& model,
                                                      const std::vector<PulseSequence>& batch);

}  // namespace doess
