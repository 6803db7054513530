#include "rndiff/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rndiff/rng.hpp"

namespace rndiff {

namespace {
constexpr std::size_t kChunk = 256;
}

ShiftConstants risk_neutral_shift(const NoisePredictor& predictor, const MarketParams& market) {
  market.validate();
  const Normalization& norm = predictor.normalization();
  const double gap = (market.drift_q() - norm.shift) / norm.scale - predictor.clean_mean();
  return shift_constants(predictor.schedule(), predictor.clean_variance(), gap);
}

ReverseSampler::ReverseSampler(const NoisePredictor& predictor, SamplerConfig cfg)
    : predictor_(predictor), cfg_(std::move(cfg)) {
  const DiffusionSchedule& sched = predictor_.schedule();
  if (cfg_.mode == SamplerMode::RiskNeutral) {
    if (!cfg_.shift) throw std::invalid_argument("sampler: risk-neutral mode requires shift constants");
    if (cfg_.shift->schedule != sched.params() || cfg_.shift->delta.size() != static_cast<std::size_t>(sched.steps())) {
      throw std::invalid_argument("sampler: shift constants were built for a different schedule");
    }
  } else if (cfg_.shift) {
    throw std::invalid_argument("sampler: physical mode takes no shift constants");
  }

  const auto T = static_cast<std::size_t>(sched.steps());
  inv_sqrt_alpha_.resize(T);
  eps_coef_.resize(T);
  noise_sd_.resize(T);
  delta_.assign(T, 0.0);
  for (int t = 1; t <= sched.steps(); ++t) {
    const auto i = static_cast<std::size_t>(t - 1);
    inv_sqrt_alpha_[i] = 1.0 / std::sqrt(sched.alpha(t));
    eps_coef_[i] = sched.beta(t) / std::sqrt(1.0 - sched.alpha_bar(t));
    const double var = cfg_.variance == ReverseVariance::Forward ? sched.beta(t) : sched.beta_tilde(t);
    noise_sd_[i] = (t == 1 && !cfg_.last_step_noise) ? 0.0 : std::sqrt(var);
    if (cfg_.mode == SamplerMode::RiskNeutral) delta_[i] = cfg_.shift->delta[i];
  }
}

void ReverseSampler::sample(std::uint64_t seed, std::uint64_t first_stream, std::span<double> out) const {
  const int T = predictor_.schedule().steps();
  const Normalization& norm = predictor_.normalization();
  std::vector<CounterRng> rngs;
  rngs.reserve(kChunk);
  std::vector<double> z(kChunk);
  std::vector<double> eps(kChunk);

  for (std::size_t start = 0; start < out.size(); start += kChunk) {
    const std::size_t m = std::min(kChunk, out.size() - start);
    rngs.clear();
    for (std::size_t k = 0; k < m; ++k) {
      rngs.emplace_back(seed, first_stream + start + k);
      z[k] = rngs[k].normal();
    }
    const std::span<double> zs(z.data(), m);
    const std::span<double> es(eps.data(), m);
    for (int t = T; t >= 1; --t) {
      const auto i = static_cast<std::size_t>(t - 1);
      predictor_.predict_batch(zs, t, es);
      const double delta = delta_[i];
      const double coef = eps_coef_[i];
      const double scale = inv_sqrt_alpha_[i];
      const double sd = noise_sd_[i];
      for (std::size_t k = 0; k < m; ++k) {
        const double mean = (z[k] - coef * (eps[k] - delta)) * scale;
        z[k] = sd > 0.0 ? mean + sd * rngs[k].normal() : mean;
      }
    }
    for (std::size_t k = 0; k < m; ++k) out[start + k] = norm.destandardize(z[k]);
  }
}

std::vector<double> ReverseSampler::sample(std::size_t n, std::uint64_t seed) const {
  if (n < 1) throw std::invalid_argument("reverse_sample: n must be >= 1");
  std::vector<double> out(n);
  sample(seed, 0, out);
  return out;
}

ReturnSampler ReverseSampler::as_return_sampler() const {
  return [this](std::uint64_t seed, std::uint64_t first_stream, std::span<double> out) {
    sample(seed, first_stream, out);
  };
}

std::vector<double> reverse_sample(const NoisePredictor& predictor, const SamplerConfig& cfg, std::size_t n,
                                   std::uint64_t seed) {
  return ReverseSampler(predictor, cfg).sample(n, seed);
}

PricePaths ddpm_paths(const NoisePredictor& predictor, const SamplerConfig& cfg, const MarketParams& market,
                      std::size_t n_paths, std::uint64_t seed) {
  market.validate();
  const ReverseSampler sampler(predictor, cfg);
  const bool rn = cfg.mode == SamplerMode::RiskNeutral;
  PathMeta meta{market.s0,     market.dt, market.horizon, rn ? Measure::Q : Measure::P,
                rn ? "ddpm-rn" : "ddpm-physical", market.hash()};
  return build_paths(sampler.as_return_sampler(), meta, n_paths, seed);
}

}  // namespace rndiff
