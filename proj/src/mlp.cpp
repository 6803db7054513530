#include "rndiff/mlp.hpp"

#include <cmath>
#include <stdexcept>

#include "rndiff/rng.hpp"

namespace rndiff {

namespace {

using MatMap = Eigen::Map<const Eigen::MatrixXd>;
using VecMap = Eigen::Map<const Eigen::VectorXd>;

Eigen::ArrayXXd silu(const Eigen::ArrayXXd& a) { return a / (1.0 + (-a).exp()); }

// d silu / da = s (1 + a (1 - s)), s = sigmoid(a)
Eigen::ArrayXXd silu_grad(const Eigen::ArrayXXd& a) {
  const Eigen::ArrayXXd s = 1.0 / (1.0 + (-a).exp());
  return s * (1.0 + a * (1.0 - s));
}

}  // namespace

struct Mlp::Views {
  MatMap w_in;
  VecMap b_in;
  MatMap w_hid;
  VecMap b_hid;
  VecMap w_out;
  double b_out;
};

Mlp::Mlp(int hidden_width) : width_(hidden_width) {
  if (hidden_width < 1) throw std::invalid_argument("mlp: hidden width must be positive");
  params_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(parameter_count(hidden_width)));
}

std::size_t Mlp::parameter_count(int hidden_width) {
  const auto w = static_cast<std::size_t>(hidden_width);
  return w * kInputDim + w + w * w + w + w + 1;
}

Mlp::Views Mlp::views() const {
  const Eigen::Index w = width_;
  const double* p = params_.data();
  const double* w_in = p;
  const double* b_in = w_in + w * kInputDim;
  const double* w_hid = b_in + w;
  const double* b_hid = w_hid + w * w;
  const double* w_out = b_hid + w;
  const double* b_out = w_out + w;
  return Views{MatMap(w_in, w, kInputDim), VecMap(b_in, w), MatMap(w_hid, w, w), VecMap(b_hid, w), VecMap(w_out, w),
               *b_out};
}

void Mlp::init_uniform(std::uint64_t seed) {
  CounterRng rng(seed, 0);
  const Eigen::Index w = width_;
  Eigen::Index k = 0;
  auto fill = [&](Eigen::Index count, double fan_in) {
    const double bound = 1.0 / std::sqrt(fan_in);
    for (Eigen::Index i = 0; i < count; ++i) params_[k++] = bound * (2.0 * rng.uniform() - 1.0);
  };
  fill(w * kInputDim + w, kInputDim);
  fill(w * w + w, static_cast<double>(w));
  fill(w + 1, static_cast<double>(w));
}

Eigen::VectorXd Mlp::time_embedding(int t) {
  Eigen::VectorXd e(kEmbedDim);
  constexpr int half = kEmbedDim / 2;
  for (int k = 0; k < half; ++k) {
    const double freq = std::exp(-std::log(10000.0) * k / half);
    e[k] = std::sin(t * freq);
    e[k + half] = std::cos(t * freq);
  }
  return e;
}

Eigen::MatrixXd Mlp::inputs(std::span<const double> y, std::span<const int> t) const {
  if (y.size() != t.size()) throw std::invalid_argument("mlp: y and t batch sizes differ");
  const auto n = static_cast<Eigen::Index>(y.size());
  Eigen::MatrixXd x(kInputDim, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    x(0, j) = y[static_cast<std::size_t>(j)];
    x.col(j).tail(kEmbedDim) = time_embedding(t[static_cast<std::size_t>(j)]);
  }
  return x;
}

void Mlp::forward(std::span<const double> y, std::span<const int> t, std::span<double> out) const {
  const Views v = views();
  const Eigen::MatrixXd x = inputs(y, t);
  const Eigen::ArrayXXd h1 = silu(((v.w_in * x).colwise() + v.b_in).array());
  const Eigen::ArrayXXd h2 = silu(((v.w_hid * h1.matrix()).colwise() + v.b_hid).array());
  Eigen::Map<Eigen::RowVectorXd>(out.data(), static_cast<Eigen::Index>(out.size())) =
      (v.w_out.transpose() * h2.matrix()).array() + v.b_out;
}

void Mlp::forward_fixed(std::span<const double> y, int t, std::span<double> out) const {
  // Reused across calls; the reverse sampler calls this T times per chunk.
  thread_local Eigen::MatrixXd h1;
  thread_local Eigen::MatrixXd h2;
  const Views v = views();
  const auto n = static_cast<Eigen::Index>(y.size());
  const Eigen::VectorXd bias1 = v.w_in.rightCols(kEmbedDim) * time_embedding(t) + v.b_in;
  const Eigen::Map<const Eigen::RowVectorXd> yr(y.data(), n);
  h1.resize(width_, n);
  h1.noalias() = v.w_in.col(0) * yr;
  h1.colwise() += bias1;
  h1.array() /= 1.0 + (-h1.array()).exp();
  h2.resize(width_, n);
  h2.noalias() = v.w_hid * h1;
  h2.colwise() += v.b_hid;
  h2.array() /= 1.0 + (-h2.array()).exp();
  Eigen::Map<Eigen::RowVectorXd> o(out.data(), n);
  o.noalias() = v.w_out.transpose() * h2;
  o.array() += v.b_out;
}

double Mlp::loss(std::span<const double> y, std::span<const int> t, std::span<const double> target) const {
  std::vector<double> pred(y.size());
  forward(y, t, pred);
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) sum += (pred[i] - target[i]) * (pred[i] - target[i]);
  return sum / static_cast<double>(pred.size());
}

double Mlp::loss_and_gradient(std::span<const double> y, std::span<const int> t, std::span<const double> target,
                              Eigen::VectorXd& grad) const {
  // Batch-sized buffers kept between calls so a training loop does not
  // reallocate them every step.
  thread_local Eigen::ArrayXXd a1, h1, a2, h2, d_a1, d_a2;
  const Views v = views();
  const Eigen::Index w = width_;
  const auto n = static_cast<Eigen::Index>(y.size());
  const Eigen::MatrixXd x = inputs(y, t);

  a1.resize(w, n);
  a1.matrix().noalias() = v.w_in * x;
  a1.matrix().colwise() += v.b_in;
  h1 = a1 / (1.0 + (-a1).exp());
  a2.resize(w, n);
  a2.matrix().noalias() = v.w_hid * h1.matrix();
  a2.matrix().colwise() += v.b_hid;
  h2 = a2 / (1.0 + (-a2).exp());
  const Eigen::RowVectorXd pred = (v.w_out.transpose() * h2.matrix()).array() + v.b_out;
  const Eigen::Map<const Eigen::RowVectorXd> tgt(target.data(), n);
  const Eigen::RowVectorXd resid = pred - tgt;
  const double loss = resid.squaredNorm() / static_cast<double>(n);

  grad.resize(params_.size());
  double* g = grad.data();
  Eigen::Map<Eigen::MatrixXd> g_w_in(g, w, kInputDim);
  Eigen::Map<Eigen::VectorXd> g_b_in(g + w * kInputDim, w);
  Eigen::Map<Eigen::MatrixXd> g_w_hid(g + w * kInputDim + w, w, w);
  Eigen::Map<Eigen::VectorXd> g_b_hid(g + w * kInputDim + w + w * w, w);
  Eigen::Map<Eigen::VectorXd> g_w_out(g + w * kInputDim + 2 * w + w * w, w);
  double& g_b_out = g[w * kInputDim + 3 * w + w * w];

  const Eigen::RowVectorXd d_out = resid * (2.0 / static_cast<double>(n));
  g_w_out.noalias() = h2.matrix() * d_out.transpose();
  g_b_out = d_out.sum();
  d_a2.resize(w, n);
  d_a2.matrix().noalias() = v.w_out * d_out;
  d_a2 *= silu_grad(a2);
  g_w_hid.noalias() = d_a2.matrix() * h1.matrix().transpose();
  g_b_hid = d_a2.rowwise().sum().matrix();
  d_a1.resize(w, n);
  d_a1.matrix().noalias() = v.w_hid.transpose() * d_a2.matrix();
  d_a1 *= silu_grad(a1);
  g_w_in.noalias() = d_a1.matrix() * x.transpose();
  g_b_in = d_a1.rowwise().sum().matrix();
  return loss;
}

}  // namespace rndiff
