#include "doess/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include "json.hpp"
#include <stdexcept>

#include "doess/rng.hpp"

namespace doess {

namespace {

using json = nlohmann::json;

Eigen::MatrixXd elu(const Eigen::MatrixXd& z) {
  return z.unaryExpr([](double v) { return v > 0 ? v : std::expm1(v); });
}

// derivative expressed through the activation value: 1 for v > 0, a + 1 else
Eigen::MatrixXd elu_grad_from_act(const Eigen::MatrixXd& a) {
  return a.unaryExpr([](double v) { return v > 0 ? 1.0 : v + 1.0; });
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows) {
  const auto n_rows = static_cast<Eigen::Index>(rows.size());
  const auto n_cols = n_rows ? static_cast<Eigen::Index>(rows[0].size()) : 0;
  Eigen::MatrixXd m(n_rows, n_cols);
  for (Eigen::Index r = 0; r < n_rows; ++r)
    for (Eigen::Index c = 0; c < n_cols; ++c)
      m(r, c) = rows[static_cast<size_t>(r)][static_cast<size_t>(c)].get<double>();
  return m;
}

}  // namespace

Mlp::Mlp(int in_dim, int out_dim, MlpSpec spec)
    : spec_(std::move(spec)), in_dim_(in_dim), out_dim_(out_dim) {
  if (in_dim < 1 || out_dim < 1) throw std::invalid_argument("bad layer dims");
  if (spec_.activation != "elu")
    throw std::invalid_argument("unknown activation: " + spec_.activation);
  if (spec_.dropout < 0 || spec_.dropout >= 1)
    throw std::invalid_argument("dropout must lie in [0, 1)");
  std::vector<int> dims;
  dims.push_back(in_dim);
  for (int h : spec_.hidden) dims.push_back(h);
  dims.push_back(out_dim);

  RngStream rng(spec_.seed, 0xAD);
  for (size_t l = 0; l + 1 < dims.size(); ++l) {
    const int fan_in = dims[l], fan_out = dims[l + 1];
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    Eigen::MatrixXd w(fan_in, fan_out);
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c)
        w(r, c) = limit * (2.0 * rng.uniform() - 1.0);
    w_.push_back(std::move(w));
    b_.push_back(Eigen::VectorXd::Zero(fan_out));
  }
}

Eigen::MatrixXd Mlp::normalize(const Eigen::MatrixXd& x) const {
  if (!normalized_) return x;
  return (x.rowwise() - feat_mean_.transpose()).array().rowwise() /
         feat_std_.transpose().array();
}

Eigen::MatrixXd Mlp::predict(const Eigen::MatrixXd& x) const {
  if (x.cols() != in_dim_) throw std::invalid_argument("feature dimension mismatch");
  Eigen::MatrixXd a = normalize(x);
  for (size_t l = 0; l < w_.size(); ++l) {
    a = ((a * w_[l]).rowwise() + b_[l].transpose()).eval();
    if (l + 1 < w_.size()) a = elu(a);
  }
  return a;
}

double Mlp::loss(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) const {
  const Eigen::MatrixXd diff = predict(x) - y;
  return diff.squaredNorm() / static_cast<double>(diff.size());
}

void Mlp::loss_gradients(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                         std::vector<Eigen::MatrixXd>& grad_w,
                         std::vector<Eigen::VectorXd>& grad_b) const {
  const size_t layers = w_.size();
  std::vector<Eigen::MatrixXd> acts(layers + 1);
  acts[0] = normalize(x);
  for (size_t l = 0; l < layers; ++l) {
    acts[l + 1] = ((acts[l] * w_[l]).rowwise() + b_[l].transpose()).eval();
    if (l + 1 < layers) acts[l + 1] = elu(acts[l + 1]);
  }
  grad_w.assign(layers, {});
  grad_b.assign(layers, {});
  Eigen::MatrixXd delta =
      2.0 * (acts[layers] - y) / static_cast<double>(acts[layers].size());
  for (size_t l = layers; l-- > 0;) {
    grad_w[l] = acts[l].transpose() * delta;
    grad_b[l] = delta.colwise().sum();
    if (l > 0)
      delta = ((delta * w_[l].transpose()).array() * elu_grad_from_act(acts[l]).array())
                  .matrix();
  }
}

std::vector<std::pair<double, double>> Mlp::fit(const Eigen::MatrixXd& x,
                                                const Eigen::MatrixXd& y) {
  if (x.rows() != y.rows()) throw std::invalid_argument("sample count mismatch");
  if (x.cols() != in_dim_ || y.cols() != out_dim_)
    throw std::invalid_argument("dataset dimensions mismatch");
  const auto n = x.rows();
  if (n < 2) throw std::invalid_argument("need at least 2 samples");
  if ((y.rowwise() - y.colwise().mean()).squaredNorm() < 1e-24)
    throw std::runtime_error("degenerate training targets: zero variance");

  feat_mean_ = x.colwise().mean();
  feat_std_ = ((x.rowwise() - feat_mean_.transpose()).array().square().colwise().sum() /
               static_cast<double>(n))
                  .sqrt()
                  .matrix()
                  .transpose();
  for (Eigen::Index i = 0; i < feat_std_.size(); ++i)
    if (feat_std_(i) < 1e-12) feat_std_(i) = 1.0;
  normalized_ = true;

  RngStream rng(spec_.seed, 0xF1);
  std::vector<Eigen::Index> order(static_cast<size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<size_t>(i)] = i;
  for (size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1],
              order[static_cast<size_t>(rng.uniform_int(0, static_cast<int>(i) - 1))]);

  Eigen::Index n_val =
      static_cast<Eigen::Index>(std::floor(spec_.validation_fraction * n));
  n_val = std::min<Eigen::Index>(n_val, n - 1);
  const Eigen::Index n_train = n - n_val;
  Eigen::MatrixXd xt(n_train, x.cols()), yt(n_train, y.cols());
  Eigen::MatrixXd xv(n_val, x.cols()), yv(n_val, y.cols());
  for (Eigen::Index i = 0; i < n_train; ++i) {
    xt.row(i) = x.row(order[static_cast<size_t>(i)]);
    yt.row(i) = y.row(order[static_cast<size_t>(i)]);
  }
  for (Eigen::Index i = 0; i < n_val; ++i) {
    xv.row(i) = x.row(order[static_cast<size_t>(n_train + i)]);
    yv.row(i) = y.row(order[static_cast<size_t>(n_train + i)]);
  }

  const size_t layers = w_.size();
  std::vector<Eigen::MatrixXd> m_w(layers), v_w(layers);
  std::vector<Eigen::VectorXd> m_b(layers), v_b(layers);
  for (size_t l = 0; l < layers; ++l) {
    m_w[l] = Eigen::MatrixXd::Zero(w_[l].rows(), w_[l].cols());
    v_w[l] = m_w[l];
    m_b[l] = Eigen::VectorXd::Zero(b_[l].size());
    v_b[l] = m_b[l];
  }
  constexpr double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;
  long step = 0;

  std::vector<std::pair<double, double>> history;
  std::vector<Eigen::MatrixXd> best_w = w_;
  std::vector<Eigen::VectorXd> best_b = b_;
  double best_val = std::numeric_limits<double>::infinity();
  int since_best = 0;

  std::vector<Eigen::Index> idx(static_cast<size_t>(n_train));
  for (Eigen::Index i = 0; i < n_train; ++i) idx[static_cast<size_t>(i)] = i;
  const Eigen::MatrixXd xt_norm = normalize(xt);

  for (int epoch = 0; epoch < spec_.max_epochs; ++epoch) {
    for (size_t i = idx.size(); i > 1; --i)
      std::swap(idx[i - 1],
                idx[static_cast<size_t>(rng.uniform_int(0, static_cast<int>(i) - 1))]);
    for (Eigen::Index start = 0; start < n_train; start += spec_.batch_size) {
      const Eigen::Index bsz = std::min<Eigen::Index>(spec_.batch_size, n_train - start);
      Eigen::MatrixXd xb(bsz, x.cols()), yb(bsz, y.cols());
      for (Eigen::Index i = 0; i < bsz; ++i) {
        xb.row(i) = xt_norm.row(idx[static_cast<size_t>(start + i)]);
        yb.row(i) = yt.row(idx[static_cast<size_t>(start + i)]);
      }

      // forward with inverted dropout on hidden activations
      std::vector<Eigen::MatrixXd> acts(layers + 1);
      std::vector<Eigen::MatrixXd> masks(layers);
      acts[0] = xb;
      for (size_t l = 0; l < layers; ++l) {
        acts[l + 1] = ((acts[l] * w_[l]).rowwise() + b_[l].transpose()).eval();
        if (l + 1 < layers) {
          acts[l + 1] = elu(acts[l + 1]);
          if (spec_.dropout > 0) {
            masks[l].resize(acts[l + 1].rows(), acts[l + 1].cols());
            const double keep = 1.0 - spec_.dropout;
            for (Eigen::Index r = 0; r < masks[l].rows(); ++r)
              for (Eigen::Index c = 0; c < masks[l].cols(); ++c)
                masks[l](r, c) = rng.uniform() < keep ? 1.0 / keep : 0.0;
            acts[l + 1] = acts[l + 1].cwiseProduct(masks[l]);
          }
        }
      }

      Eigen::MatrixXd delta =
          2.0 * (acts[layers] - yb) / static_cast<double>(acts[layers].size());
      ++step;
      for (size_t l = layers; l-- > 0;) {
        const Eigen::MatrixXd gw = acts[l].transpose() * delta;
        const Eigen::VectorXd gb = delta.colwise().sum();
        if (l > 0) {
          delta = (delta * w_[l].transpose()).eval();
          if (spec_.dropout > 0 && masks[l - 1].size())
            delta = delta.cwiseProduct(masks[l - 1]);
          delta = (delta.array() * elu_grad_from_act(acts[l]).array()).matrix();
        }
        m_w[l] = beta1 * m_w[l] + (1 - beta1) * gw;
        v_w[l] = beta2 * v_w[l] + (1 - beta2) * gw.array().square().matrix();
        m_b[l] = beta1 * m_b[l] + (1 - beta1) * gb;
        v_b[l] = beta2 * v_b[l] + (1 - beta2) * gb.array().square().matrix();
        const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
        const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
        w_[l] -= (spec_.learning_rate * (m_w[l] / bc1).array() /
                  ((v_w[l] / bc2).array().sqrt() + adam_eps))
                     .matrix();
        b_[l] -= (spec_.learning_rate * (m_b[l] / bc1).array() /
                  ((v_b[l] / bc2).array().sqrt() + adam_eps))
                     .matrix();
      }
    }

    const double train_loss = loss(xt, yt);
    const double val_loss = n_val > 0 ? loss(xv, yv) : train_loss;
    history.emplace_back(train_loss, val_loss);
    if (val_loss < best_val) {
      best_val = val_loss;
      best_w = w_;
      best_b = b_;
      since_best = 0;
    } else if (++since_best > spec_.patience) {
      break;
    }
  }
  w_ = best_w;
  b_ = best_b;
  return history;
}

void Mlp::save(const std::string& path) const {
  json j;
  j["schema_version"] = 1;
  j["in_dim"] = in_dim_;
  j["out_dim"] = out_dim_;
  j["spec"] = {{"hidden", spec_.hidden},
               {"activation", spec_.activation},
               {"dropout", spec_.dropout},
               {"learning_rate", spec_.learning_rate},
               {"batch_size", spec_.batch_size},
               {"max_epochs", spec_.max_epochs},
               {"patience", spec_.patience},
               {"validation_fraction", spec_.validation_fraction},
               {"seed", spec_.seed}};
  j["normalized"] = normalized_;
  if (normalized_) {
    j["feat_mean"] = std::vector<double>(feat_mean_.data(),
                                         feat_mean_.data() + feat_mean_.size());
    j["feat_std"] =
        std::vector<double>(feat_std_.data(), feat_std_.data() + feat_std_.size());
  }
  j["weights"] = json::array();
  j["biases"] = json::array();
  for (size_t l = 0; l < w_.size(); ++l) {
    j["weights"].push_back(matrix_to_json(w_[l]));
    j["biases"].push_back(std::vector<double>(b_[l].data(), b_[l].data() + b_[l].size()));
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << j.dump(2) << '\n';
}

Mlp Mlp::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  MlpSpec spec;
  spec.hidden = j.at("spec").at("hidden").get<std::vector<int>>();
  spec.activation = j.at("spec").at("activation").get<std::string>();
  spec.dropout = j.at("spec").at("dropout").get<double>();
  spec.learning_rate = j.at("spec").at("learning_rate").get<double>();
  spec.batch_size = j.at("spec").at("batch_size").get<int>();
  spec.max_epochs = j.at("spec").at("max_epochs").get<int>();
  spec.patience = j.at("spec").at("patience").get<int>();
  spec.validation_fraction = j.at("spec").at("validation_fraction").get<double>();
  spec.seed = j.at("spec").at("seed").get<uint64_t>();
  Mlp model(j.at("in_dim").get<int>(), j.at("out_dim").get<int>(), spec);
  model.w_.clear();
  model.b_.clear();
  for (const auto& w : j.at("weights")) model.w_.push_back(matrix_from_json(w));
  for (const auto& b : j.at("biases")) {
    const auto vals = b.get<std::vector<double>>();
    model.b_.push_back(
        Eigen::Map<const Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size())));
  }
  model.normalized_ = j.at("normalized").get<bool>();
  if (model.normalized_) {
    const auto mean = j.at("feat_mean").get<std::vector<double>>();
    const auto std = j.at("feat_std").get<std::vector<double>>();
    model.feat_mean_ =
        Eigen::Map<const Eigen::VectorXd>(mean.data(), static_cast<Eigen::Index>(mean.size()));
    model.feat_std_ =
        Eigen::Map<const Eigen::VectorXd>(std.data(), static_cast<Eigen::Index>(std.size()));
  }
  return model;
}

}  // namespace doess
