#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>

namespace rndiff {

// Small noise-prediction network:
//   x = [y, emb(t)]  (1 + 16 inputs)
//   h1 = silu(W_in x + b_in), h2 = silu(W_hid h1 + b_hid), out = w_out . h2 + b_out
// emb(t) is the sinusoidal embedding [sin(t w_k), cos(t w_k)], w_k = 10000^(-k/8).
//
// All weights live in one flat vector, in this order (matrices column-major):
//   W_in [W x 17], b_in [W], W_hid [W x W], b_hid [W], w_out [W], b_out [1]
class Mlp {
 public:
  static constexpr int kEmbedDim = 16;
  static constexpr int kInputDim = 1 + kEmbedDim;

  explicit Mlp(int hidden_width);

  int hidden_width() const { return width_; }
  static std::size_t parameter_count(int hidden_width);
  std::size_t parameter_count() const { return static_cast<std::size_t>(params_.size()); }

  Eigen::VectorXd& parameters() { return params_; }
  const Eigen::VectorXd& parameters() const { return params_; }

  // U(-1/sqrt(fan_in), 1/sqrt(fan_in)) for every weight and bias.
  void init_uniform(std::uint64_t seed);

  // Per-example diffusion steps.
  void forward(std::span<const double> y, std::span<const int> t, std::span<double> out) const;
  // All examples share step t; the embedding term is folded into one bias.
  void forward_fixed(std::span<const double> y, int t, std::span<double> out) const;

  // Mean squared error against `target`; writes d(loss)/d(params) to grad.
  double loss_and_gradient(std::span<const double> y, std::span<const int> t, std::span<const double> target,
                           Eigen::VectorXd& grad) const;
  double loss(std::span<const double> y, std::span<const int> t, std::span<const double> target) const;

  static Eigen::VectorXd time_embedding(int t);

 private:
  struct Views;
  Views views() const;
  Eigen::MatrixXd inputs(std::span<const double> y, std::span<const int> t) const;

  int width_;
  Eigen::VectorXd params_;
};

}  // namespace rndiff
