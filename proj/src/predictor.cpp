#include "rndiff/predictor.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>

#include "rndiff/format.hpp"
#include "rndiff/market.hpp"
#include "rndiff/rng.hpp"
#include "rndiff/stats.hpp"

namespace rndiff {

double oracle_predict(double m, double v0, const DiffusionSchedule& sched, double y, int t) {
  const double ab = sched.alpha_bar(t);
  const double sigma_sq = 1.0 + ab * (v0 - 1.0);
  return std::sqrt(1.0 - ab) * (y - std::sqrt(ab) * m) / sigma_sq;
}

NoisePredictor::NoisePredictor(DiffusionSchedule sched, Normalization norm,
                               std::variant<AnalyticOracle, TrainedNet> model)
    : schedule_(std::move(sched)), norm_(norm), model_(std::move(model)) {
  if (!(norm_.scale > 0.0)) throw std::invalid_argument("predictor: normalization scale must be positive");
}

NoisePredictor NoisePredictor::oracle(const DiffusionSchedule& sched, double mean, double variance,
                                      Normalization norm) {
  if (!(variance > 0.0)) throw std::invalid_argument("predictor: oracle variance must be positive");
  return NoisePredictor(sched, norm, AnalyticOracle{mean, variance});
}

NoisePredictor NoisePredictor::trained(const DiffusionSchedule& sched, Mlp net, Normalization norm) {
  return NoisePredictor(sched, norm, TrainedNet{std::move(net)});
}

double NoisePredictor::predict(double y, int t) const {
  double out = 0.0;
  predict_batch(std::span<const double>(&y, 1), t, std::span<double>(&out, 1));
  return out;
}

void NoisePredictor::predict_batch(std::span<const double> y, int t, std::span<double> out) const {
  if (t < 1 || t > schedule_.steps()) throw std::out_of_range("predictor: diffusion step out of range");
  if (const auto* o = std::get_if<AnalyticOracle>(&model_)) {
    // Same operation order as oracle_predict, so both agree bit for bit.
    const double ab = schedule_.alpha_bar(t);
    const double root = std::sqrt(1.0 - ab);
    const double sigma_sq = 1.0 + ab * (o->variance - 1.0);
    const double center = std::sqrt(ab) * o->mean;
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = root * (y[i] - center) / sigma_sq;
  } else {
    std::get<TrainedNet>(model_).net.forward_fixed(y, t, out);
  }
}

double NoisePredictor::clean_mean() const {
  if (const auto* o = std::get_if<AnalyticOracle>(&model_)) return o->mean;
  return 0.0;
}

double NoisePredictor::clean_variance() const {
  if (const auto* o = std::get_if<AnalyticOracle>(&model_)) return o->variance;
  return 1.0;
}

NoisePredictor physical_oracle(const DiffusionSchedule& sched, const MarketParams& market) {
  market.validate();
  return NoisePredictor::oracle(sched, 0.0, 1.0, Normalization{market.drift_p(), std::sqrt(market.v0())});
}

// Model file, one "key value" pair per line:
//   rndiff-noise-predictor
//   version 1
//   variant oracle|trained
//   T, beta_start, beta_end          schedule triple
//   norm_shift, norm_scale           normalization
//   oracle_mean, oracle_variance     (oracle only)
//   hidden_width, embed_dim, weights <count>, then <count> lines, one weight
//   each, in Mlp's flat order       (trained only)
// Doubles use the shortest round-trip representation.
void NoisePredictor::save(std::ostream& out) const {
  const ScheduleParams& sp = schedule_.params();
  out << "rndiff-noise-predictor\n";
  out << "version 1\n";
  out << "variant " << (is_oracle() ? "oracle" : "trained") << "\n";
  out << "T " << sp.steps << "\n";
  out << "beta_start " << format_exact(sp.beta_start) << "\n";
  out << "beta_end " << format_exact(sp.beta_end) << "\n";
  out << "norm_shift " << format_exact(norm_.shift) << "\n";
  out << "norm_scale " << format_exact(norm_.scale) << "\n";
  if (const auto* o = std::get_if<AnalyticOracle>(&model_)) {
    out << "oracle_mean " << format_exact(o->mean) << "\n";
    out << "oracle_variance " << format_exact(o->variance) << "\n";
    return;
  }
  const Mlp& net = std::get<TrainedNet>(model_).net;
  out << "hidden_width " << net.hidden_width() << "\n";
  out << "embed_dim " << Mlp::kEmbedDim << "\n";
  out << "weights " << net.parameter_count() << "\n";
  for (double w : net.parameters()) out << format_exact(w) << "\n";
}

namespace {

std::string expect_key(std::istream& in, const std::string& key) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("model file: missing '" + key + "'");
  const auto space = line.find(' ');
  if (space == std::string::npos || line.substr(0, space) != key) {
    throw std::runtime_error("model file: expected '" + key + "', got '" + line + "'");
  }
  return line.substr(space + 1);
}

}  // namespace

NoisePredictor NoisePredictor::load(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "rndiff-noise-predictor") throw std::runtime_error("model file: bad magic");
  if (parse_integer(expect_key(in, "version")) != 1) throw std::runtime_error("model file: unsupported version");
  const std::string variant = expect_key(in, "variant");
  ScheduleParams sp;
  sp.steps = static_cast<int>(parse_integer(expect_key(in, "T")));
  sp.beta_start = parse_double(expect_key(in, "beta_start"));
  sp.beta_end = parse_double(expect_key(in, "beta_end"));
  Normalization norm;
  norm.shift = parse_double(expect_key(in, "norm_shift"));
  norm.scale = parse_double(expect_key(in, "norm_scale"));
  const DiffusionSchedule sched(sp);

  if (variant == "oracle") {
    const double mean = parse_double(expect_key(in, "oracle_mean"));
    const double variance = parse_double(expect_key(in, "oracle_variance"));
    return oracle(sched, mean, variance, norm);
  }
  if (variant != "trained") throw std::runtime_error("model file: unknown variant '" + variant + "'");
  const int width = static_cast<int>(parse_integer(expect_key(in, "hidden_width")));
  if (parse_integer(expect_key(in, "embed_dim")) != Mlp::kEmbedDim) {
    throw std::runtime_error("model file: unsupported embedding dimension");
  }
  Mlp net(width);
  const auto count = static_cast<std::size_t>(parse_integer(expect_key(in, "weights")));
  if (count != net.parameter_count()) throw std::runtime_error("model file: weight count mismatch");
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::getline(in, line)) throw std::runtime_error("model file: truncated weights");
    net.parameters()[static_cast<Eigen::Index>(i)] = parse_double(line);
  }
  return trained(sched, std::move(net), norm);
}

void NoisePredictor::save_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write model file " + path);
  save(out);
  if (!out) throw std::runtime_error("failed writing model file " + path);
}

NoisePredictor NoisePredictor::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file " + path);
  return load(in);
}

namespace {

struct NoisePairs {
  std::vector<double> noisy;
  std::vector<int> step;
  std::vector<double> noise;
};

// Forward-kernel pairs y_t = sqrt(abar) x0 + sqrt(1 - abar) eps with t
// uniform on 1..T.
void draw_pairs(std::span<const double> clean, const DiffusionSchedule& sched, CounterRng& rng, NoisePairs& out) {
  const std::size_t n = clean.size();
  out.noisy.resize(n);
  out.step.resize(n);
  out.noise.resize(n);
  const int T = sched.steps();
  for (std::size_t i = 0; i < n; ++i) {
    const int t = 1 + std::min(T - 1, static_cast<int>(rng.uniform() * T));
    const double eps = rng.normal();
    const double ab = sched.alpha_bar(t);
    out.step[i] = t;
    out.noise[i] = eps;
    out.noisy[i] = std::sqrt(ab) * clean[i] + std::sqrt(1.0 - ab) * eps;
  }
}

}  // namespace

NoisePredictor train(std::span<const double> data, const DiffusionSchedule& sched, const TrainingConfig& cfg,
                     TrainingReport* report) {
  if (data.size() < 10) throw std::invalid_argument("train: need at least 10 samples");
  if (cfg.epochs < 0 || cfg.batch_size < 1 || !(cfg.learning_rate > 0.0) || cfg.hidden_width < 1) {
    throw std::invalid_argument("train: invalid training configuration");
  }
  if (!(cfg.heldout_fraction > 0.0 && cfg.heldout_fraction < 1.0)) {
    throw std::invalid_argument("train: held-out fraction must lie in (0, 1)");
  }

  const auto n_heldout = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(cfg.heldout_fraction * static_cast<double>(data.size()))));
  const std::size_t n_train = data.size() - n_heldout;

  // Standardize with the training split's own moments so the network's
  // clean distribution is exactly mean 0, variance 1.
  const SampleMoments moments = sample_moments(data.first(n_train));
  if (!(moments.variance > 0.0)) throw std::invalid_argument("train: training data has zero variance");
  const Normalization norm{moments.mean, std::sqrt(moments.variance)};

  std::vector<double> train_x(n_train);
  std::vector<double> heldout_x(n_heldout);
  for (std::size_t i = 0; i < n_train; ++i) train_x[i] = norm.standardize(data[i]);
  for (std::size_t i = 0; i < n_heldout; ++i) heldout_x[i] = norm.standardize(data[n_train + i]);

  NoisePairs heldout;
  {
    CounterRng rng(derive_seed(cfg.seed, 2), 0);
    draw_pairs(heldout_x, sched, rng, heldout);
  }

  Mlp net(cfg.hidden_width);
  net.init_uniform(derive_seed(cfg.seed, 1));
  Eigen::VectorXd velocity = Eigen::VectorXd::Zero(net.parameters().size());
  Eigen::VectorXd averaged = net.parameters();
  Eigen::VectorXd grad;

  std::vector<std::size_t> order(n_train);
  std::vector<double> batch_clean;
  NoisePairs batch;
  std::vector<double> epoch_loss;
  epoch_loss.reserve(static_cast<std::size_t>(cfg.epochs));

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = cfg.learning_rate * 0.5 * (1.0 + std::cos(std::numbers::pi * epoch / cfg.epochs));
    CounterRng rng(derive_seed(cfg.seed, 3), static_cast<std::uint64_t>(epoch));
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = n_train - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(i + 1));
      std::swap(order[i], order[std::min(j, i)]);
    }

    CompensatedSum total;
    for (std::size_t start = 0; start < n_train; start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t stop = std::min(n_train, start + static_cast<std::size_t>(cfg.batch_size));
      batch_clean.resize(stop - start);
      for (std::size_t k = start; k < stop; ++k) batch_clean[k - start] = train_x[order[k]];
      draw_pairs(batch_clean, sched, rng, batch);

      const double loss = net.loss_and_gradient(batch.noisy, batch.step, batch.noise, grad);
      if (!std::isfinite(loss) || !grad.allFinite()) {
        throw TrainingError("training diverged at epoch " + std::to_string(epoch));
      }
      velocity = cfg.momentum * velocity + grad;
      net.parameters() -= lr * velocity;
      if (cfg.ema_decay > 0.0) {
        averaged = cfg.ema_decay * averaged + (1.0 - cfg.ema_decay) * net.parameters();
      }
      total.add(loss * static_cast<double>(stop - start));
    }
    epoch_loss.push_back(total.value() / static_cast<double>(n_train));
  }
  if (cfg.ema_decay > 0.0 && cfg.epochs > 0) net.parameters() = averaged;

  const double heldout_loss = net.loss(heldout.noisy, heldout.step, heldout.noise);
  CompensatedSum oracle_sum;
  for (std::size_t i = 0; i < n_heldout; ++i) {
    const double e = oracle_predict(0.0, 1.0, sched, heldout.noisy[i], heldout.step[i]) - heldout.noise[i];
    oracle_sum.add(e * e);
  }
  const double oracle_loss = oracle_sum.value() / static_cast<double>(n_heldout);

  if (report) {
    report->epoch_loss = epoch_loss;
    report->heldout_loss = heldout_loss;
    report->oracle_loss = oracle_loss;
    report->n_train = n_train;
    report->n_heldout = n_heldout;
  }
  if (!std::isfinite(heldout_loss)) throw TrainingError("held-out loss is not finite");
  if (heldout_loss > cfg.gate_ratio * oracle_loss) {
    std::ostringstream msg;
    msg << "held-out criterion unmet: loss " << heldout_loss << " > " << cfg.gate_ratio << " x oracle floor "
        << oracle_loss;
    throw TrainingError(msg.str());
  }
  return NoisePredictor::trained(sched, std::move(net), norm);
}

}  // namespace rndiff
