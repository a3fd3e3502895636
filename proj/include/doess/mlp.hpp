#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace doess {

struct MlpSpec {
  std::vector<int> hidden = {256, 128};
  std::string activation = "elu";
  double dropout = 0.2;
  double learning_rate = 0.001;  // Adam
  int batch_size = 64;
  int max_epochs = 500;
  int patience = 500;            // early stop on validation loss
  double validation_fraction = 0.1;
  uint64_t seed = 0;
};

// Small fully connected regressor with analytic gradients, Adam, inverted
// dropout, and validation-based early stopping. Single-threaded and
// deterministic given the spec seed.
class Mlp {
 public:
  Mlp() = default;
  Mlp(int in_dim, int out_dim, MlpSpec spec);

  // rows are samples; returns the (train, validation) loss per epoch
  std::vector<std::pair<double, double>> fit(const Eigen::MatrixXd& x,
                                             const Eigen::MatrixXd& y);

  Eigen::MatrixXd predict(const Eigen::MatrixXd& x) const;

  // eval-mode (no dropout) mean squared error on normalized inputs
  double loss(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) const;
  // analytic eval-mode gradients, for the finite-difference check
  void loss_gradients(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                      std::vector<Eigen::MatrixXd>& grad_w,
                      std::vector<Eigen::VectorXd>& grad_b) const;

  std::vector<Eigen::MatrixXd>& weights() { return w_; }
  std::vector<Eigen::VectorXd>& biases() { return b_; }
  const MlpSpec& spec() const { return spec_; }
  int in_dim() const { return in_dim_; }
  int out_dim() const { return out_dim_; }

  void save(const std::string& path) const;
  static Mlp load(const std::string& path);

 private:
  Eigen::MatrixXd normalize(const Eigen::MatrixXd& x) const;

  MlpSpec spec_;
  int in_dim_ = 0;
  int out_dim_ = 0;
  std::vector<Eigen::MatrixXd> w_;  // layer l: (fan_in x fan_out)
  std::vector<Eigen::VectorXd> b_;
  Eigen::VectorXd feat_mean_;
  Eigen::VectorXd feat_std_;
  bool normalized_ = false;
};

}  // namespace doess
