#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "rndiff/mlp.hpp"
#include "rndiff/schedule.hpp"

namespace rndiff {

struct MarketParams;

// Affine map between raw log-returns and the coordinates the predictor works in.
struct Normalization {
  double shift = 0.0;
  double scale = 1.0;

  double standardize(double raw) const { return (raw - shift) / scale; }
  double destandardize(double z) const { return shift + scale * z; }
};

// E[eps | Y_t = y] for clean data N(m, v0) under the forward kernel:
// sqrt(1 - abar_t) * (y - sqrt(abar_t) m) / (abar_t v0 + 1 - abar_t).
double oracle_predict(double m, double v0, const DiffusionSchedule& sched, double y, int t);

struct AnalyticOracle {
  double mean = 0.0;
  double variance = 1.0;
};

struct TrainedNet {
  Mlp net;
};

// Noise predictor eps(y, t) in standardized coordinates. Either the exact
// Gaussian oracle or a trained network; both are pure and thread-safe.
class NoisePredictor {
 public:
  static NoisePredictor oracle(const DiffusionSchedule& sched, double mean, double variance, Normalization norm);
  static NoisePredictor trained(const DiffusionSchedule& sched, Mlp net, Normalization norm);

  double predict(double y, int t) const;
  void predict_batch(std::span<const double> y, int t, std::span<double> out) const;

  const DiffusionSchedule& schedule() const { return schedule_; }
  const Normalization& normalization() const { return norm_; }
  bool is_oracle() const { return std::holds_alternative<AnalyticOracle>(model_); }
  const std::variant<AnalyticOracle, TrainedNet>& model() const { return model_; }

  // Moments of the clean training distribution in standardized coordinates.
  // A trained net sees data standardized to mean 0 and variance 1.
  double clean_mean() const;
  double clean_variance() const;

  void save(std::ostream& out) const;
  static NoisePredictor load(std::istream& in);
  void save_file(const std::string& path) const;
  static NoisePredictor load_file(const std::string& path);

 private:
  NoisePredictor(DiffusionSchedule sched, Normalization norm, std::variant<AnalyticOracle, TrainedNet> model);

  DiffusionSchedule schedule_;
  Normalization norm_;
  std::variant<AnalyticOracle, TrainedNet> model_;
};

// Exact oracle for a market's physical returns: normalization (m_P, sqrt(v0)),
// so the clean law is N(0, 1) in predictor coordinates.
NoisePredictor physical_oracle(const DiffusionSchedule& sched, const MarketParams& market);

struct TrainingConfig {
  std::size_t n_samples = 50000;
  int epochs = 200;
  int batch_size = 256;
  double learning_rate = 1e-2;  // peak; cosine-annealed to 0 over `epochs`
  double momentum = 0.9;
  double ema_decay = 0.999;  // weight averaging; 0 disables
  int hidden_width = 64;
  std::uint64_t seed = 7;
  double heldout_fraction = 0.1;
  double gate_ratio = 1.05;  // held-out MSE must be <= gate_ratio * oracle MSE
};

struct TrainingReport {
  std::vector<double> epoch_loss;
  double heldout_loss = 0.0;
  double oracle_loss = 0.0;
  std::size_t n_train = 0;
  std::size_t n_heldout = 0;
};

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Fits the network to the noise-matching loss on standardized `data`.
// Throws TrainingError when the loss goes non-finite or the held-out gate
// fails after cfg.epochs.
NoisePredictor train(std::span<const double> data, const DiffusionSchedule& sched, const TrainingConfig& cfg,
                     TrainingReport* report = nullptr);

}  // namespace rndiff
