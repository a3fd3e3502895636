#include "doess/surrogate.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "doess/indicators.hpp"
#include "json.hpp"

namespace doess {

namespace {

using json = nlohmann::json;

void accumulate_metrics(const Eigen::MatrixXd& truth, const Eigen::MatrixXd& pred,
                        double& r2, double& mae) {
  const Eigen::MatrixXd centered = truth.rowwise() - truth.colwise().mean();
  const double ss_tot = centered.squaredNorm();
  const double ss_res = (pred - truth).squaredNorm();
  r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 0.0;
  mae = (pred - truth).cwiseAbs().sum() / static_cast<double>(truth.size());
}

}  // namespace

std::string feature_kind_name(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::IntegerEncoding: return "integer_encoding";
    case FeatureKind::PulseMatrix: return "pulse_matrix";
    case FeatureKind::SingleIndicators: return "single_indicators";
    case FeatureKind::IndicatorSeries: return "indicator_series";
  }
  throw std::invalid_argument("bad feature kind");
}

FeatureKind feature_kind_from_name(const std::string& name) {
  if (name == "integer_encoding") return FeatureKind::IntegerEncoding;
  if (name == "pulse_matrix") return FeatureKind::PulseMatrix;
  if (name == "single_indicators") return FeatureKind::SingleIndicators;
  if (name == "indicator_series") return FeatureKind::IndicatorSeries;
  throw std::invalid_argument("unknown feature kind: " + name);
}

Eigen::VectorXd featurize(const PulseSequence& seq, FeatureKind kind, int repetitions) {
  switch (kind) {
    case FeatureKind::IntegerEncoding: {
      Eigen::VectorXd v(seq.length());
      for (int i = 0; i < seq.length(); ++i)
        v(i) = seq.codes[static_cast<size_t>(i)] / static_cast<double>(kAlphabetSize - 1);
      return v;
    }
    case FeatureKind::PulseMatrix: {
      const Eigen::MatrixXd m = pulse_matrix(seq);
      return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
    }
    case FeatureKind::SingleIndicators: {
      const IndicatorVector iv = indicators(seq);
      Eigen::VectorXd v(5);
      for (int k = 0; k < 5; ++k) v(k) = iv[k];
      return v;
    }
    case FeatureKind::IndicatorSeries: {
      if (repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
      const Eigen::MatrixXd series = indicator_series(seq, repetitions);
      return Eigen::Map<const Eigen::VectorXd>(series.data(), series.size());
    }
  }
  throw std::invalid_argument("bad feature kind");
}

Dataset make_dataset(const std::vector<PulseSequence>& seqs, const Eigen::MatrixXd& targets,
                     FeatureKind kind, int repetitions) {
  if (static_cast<Eigen::Index>(seqs.size()) != targets.rows())
    throw std::invalid_argument("sequence/target count mismatch");
  if (seqs.empty()) throw std::invalid_argument("empty dataset");
  Dataset ds;
  ds.kind = kind;
  ds.repetitions = repetitions;
  ds.targets = targets;
  const Eigen::VectorXd first = featurize(seqs[0], kind, repetitions);
  ds.features.resize(static_cast<Eigen::Index>(seqs.size()), first.size());
  ds.features.row(0) = first;
  for (size_t i = 1; i < seqs.size(); ++i)
    ds.features.row(static_cast<Eigen::Index>(i)) = featurize(seqs[i], kind, repetitions);
  return ds;
}

Eigen::MatrixXd SurrogateModel::predict(const Eigen::MatrixXd& features) const {
  if (folds.empty()) throw std::runtime_error("surrogate model has no folds");
  Eigen::MatrixXd acc = folds[0].predict(features);
  for (size_t f = 1; f < folds.size(); ++f) acc += folds[f].predict(features);
  return acc / static_cast<double>(folds.size());
}

Eigen::MatrixXd SurrogateModel::predict_sequences(const std::vector<PulseSequence>& seqs) const {
  if (seqs.empty()) throw std::invalid_argument("empty batch");
  Eigen::MatrixXd features(static_cast<Eigen::Index>(seqs.size()),
                           folds.at(0).in_dim());
  for (size_t i = 0; i < seqs.size(); ++i) {
    const Eigen::VectorXd v = featurize(seqs[i], kind, repetitions);
    if (v.size() != features.cols())
      throw std::invalid_argument("feature dimension mismatch for this model");
    features.row(static_cast<Eigen::Index>(i)) = v;
  }
  return predict(features);
}

void SurrogateModel::save(const std::string& prefix) const {
  json manifest;
  manifest["schema_version"] = 1;
  manifest["kind"] = feature_kind_name(kind);
  manifest["repetitions"] = repetitions;
  manifest["n_folds"] = folds.size();
  json files = json::array();
  for (size_t f = 0; f < folds.size(); ++f) {
    const std::string path = prefix + ".fold" + std::to_string(f) + ".json";
    folds[f].save(path);
    files.push_back(path);
  }
  manifest["fold_files"] = files;
  std::ofstream out(prefix + ".manifest.json");
  if (!out) throw std::runtime_error("cannot open " + prefix + ".manifest.json");
  out << manifest.dump(2) << '\n';
}

SurrogateModel SurrogateModel::load(const std::string& prefix) {
  std::ifstream in(prefix + ".manifest.json");
  if (!in) throw std::runtime_error("cannot open " + prefix + ".manifest.json");
  json manifest;
  in >> manifest;
  SurrogateModel model;
  model.kind = feature_kind_from_name(manifest.at("kind").get<std::string>());
  model.repetitions = manifest.at("repetitions").get<int>();
  for (const auto& path : manifest.at("fold_files"))
    model.folds.push_back(Mlp::load(path.get<std::string>()));
  return model;
}

SurrogateModel train_surrogate(const Dataset& dataset, const MlpSpec& spec,
                               EvalReport* report, int n_folds) {
  if (n_folds < 2) throw std::invalid_argument("n_folds must be >= 2");
  const Eigen::Index n = dataset.features.rows();
  if (n < n_folds) throw std::invalid_argument("not enough samples for the fold count");

  SurrogateModel model;
  model.kind = dataset.kind;
  model.repetitions = dataset.repetitions;

  EvalReport out;
  Eigen::MatrixXd oof_pred = Eigen::MatrixXd::Zero(n, dataset.targets.cols());
  for (int f = 0; f < n_folds; ++f) {
    std::vector<Eigen::Index> train_idx, val_idx;
    for (Eigen::Index i = 0; i < n; ++i)
      (i % n_folds == f ? val_idx : train_idx).push_back(i);

    Eigen::MatrixXd xt(static_cast<Eigen::Index>(train_idx.size()), dataset.features.cols());
    Eigen::MatrixXd yt(static_cast<Eigen::Index>(train_idx.size()), dataset.targets.cols());
    for (size_t i = 0; i < train_idx.size(); ++i) {
      xt.row(static_cast<Eigen::Index>(i)) = dataset.features.row(train_idx[i]);
      yt.row(static_cast<Eigen::Index>(i)) = dataset.targets.row(train_idx[i]);
    }
    MlpSpec fold_spec = spec;
    fold_spec.seed = spec.seed + static_cast<uint64_t>(f);
    Mlp mlp(static_cast<int>(dataset.features.cols()),
            static_cast<int>(dataset.targets.cols()), fold_spec);
    mlp.fit(xt, yt);

    Eigen::MatrixXd xv(static_cast<Eigen::Index>(val_idx.size()), dataset.features.cols());
    Eigen::MatrixXd yv(static_cast<Eigen::Index>(val_idx.size()), dataset.targets.cols());
    for (size_t i = 0; i < val_idx.size(); ++i) {
      xv.row(static_cast<Eigen::Index>(i)) = dataset.features.row(val_idx[i]);
      yv.row(static_cast<Eigen::Index>(i)) = dataset.targets.row(val_idx[i]);
    }
    const Eigen::MatrixXd pv = mlp.predict(xv);
    for (size_t i = 0; i < val_idx.size(); ++i)
      oof_pred.row(val_idx[i]) = pv.row(static_cast<Eigen::Index>(i));
    double r2, mae;
    accumulate_metrics(yv, pv, r2, mae);
    out.fold_r2.push_back(r2);
    out.fold_mae.push_back(mae);
    model.folds.push_back(std::move(mlp));
  }
  accumulate_metrics(dataset.targets, oof_pred, out.r_squared, out.mae);
  for (Eigen::Index i = 0; i < n; ++i)
    out.pairs.emplace_back(dataset.targets(i, 0), oof_pred(i, 0));
  if (report) *report = std::move(out);
  return model;
}

EvalReport evaluate(const SurrogateModel& model, const Dataset& heldout) {
  if (heldout.kind != model.kind)
    throw std::invalid_argument("feature kind mismatch between model and dataset");
  EvalReport report;
  const Eigen::MatrixXd pred = model.predict(heldout.features);
  accumulate_metrics(heldout.targets, pred, report.r_squared, report.mae);
  for (Eigen::Index i = 0; i < heldout.targets.rows(); ++i)
    report.pairs.emplace_back(heldout.targets(i, 0), pred(i, 0));
  return report;
}

std::vector<std::array<double, 3>> predict_indicators(const SurrogateModel& model,
                                                      const std::vector<PulseSequence>& batch) {
  if (model.kind != FeatureKind::PulseMatrix)
    throw std::invalid_argument("indicator prediction requires a pulse_matrix model");
  if (model.folds.empty() || model.folds[0].out_dim() < 3)
    throw std::invalid_argument("indicator prediction requires >= 3 targets");
  const Eigen::MatrixXd pred = model.predict_sequences(batch);
  std::vector<std::array<double, 3>> out(batch.size());
  for (size_t i = 0; i < batch.size(); ++i)
    out[i] = {pred(static_cast<Eigen::Index>(i), 0), pred(static_cast<Eigen::Index>(i), 1),
              pred(static_cast<Eigen::Index>(i), 2)};
  return out;
}

void write_eval_report(const std::string& path, const EvalReport& report) {
  json j;
  j["schema_version"] = 1;
  j["r_squared"] = report.r_squared;
  j["mae"] = report.mae;
  j["fold_r2"] = report.fold_r2;
  j["fold_mae"] = report.fold_mae;
  json pairs = json::array();
  for (const auto& [truth, pred] : report.pairs) pairs.push_back({truth, pred});
  j["pairs"] = pairs;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << j.dump(2) << '\n';
}

EvalReport read_eval_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  EvalReport report;
  report.r_squared = j.at("r_squared").get<double>();
  report.mae = j.at("mae").get<double>();
  report.fold_r2 = j.at("fold_r2").get<std::vector<double>>();
  report.fold_mae = j.at("fold_mae").get<std::vector<double>>();
  for (const auto& pair : j.at("pairs"))
    report.pairs.emplace_back(pair[0].get<double>(), pair[1].get<double>());
  return report;
}

}  // namespace doess
