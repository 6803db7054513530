#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rndiff/market.hpp"
#include "rndiff/paths.hpp"
#include "rndiff/predictor.hpp"
#include "rndiff/schedule.hpp"

namespace rndiff {

enum class SamplerMode { Physical, RiskNeutral };

// Variance of the fresh noise injected at each reverse step.
enum class ReverseVariance {
  Forward,   // beta_t; exact for unit-variance Gaussian data
  Posterior  // beta_tilde_t
};

struct SamplerConfig {
  SamplerMode mode = SamplerMode::Physical;
  std::optional<ShiftConstants> shift;  // required iff RiskNeutral
  bool last_step_noise = false;
  ReverseVariance variance = ReverseVariance::Forward;
};

// Risk-neutral offsets for `predictor` in its own coordinates:
// mean_gap = (m_Q - m_hat) / s_hat - clean_mean, v0 = clean_variance.
ShiftConstants risk_neutral_shift(const NoisePredictor& predictor, const MarketParams& market);

// Discrete reverse chain. Each sample starts from z_T ~ N(0, 1) and applies
//   z_{t-1} = (z_t - beta_t / sqrt(1 - abar_t) * eps_hat) / sqrt(alpha_t) + sqrt(var_t) xi_t
// for t = T..1 with eps_hat = eps(z_t, t) - delta_t (delta_t = 0 in Physical
// mode), then maps z_0 back to raw log-return units. Sample i consumes only
// substream first_stream + i of `seed`.
class ReverseSampler {
 public:
  ReverseSampler(const NoisePredictor& predictor, SamplerConfig cfg);

  void sample(std::uint64_t seed, std::uint64_t first_stream, std::span<double> out) const;
  std::vector<double> sample(std::size_t n, std::uint64_t seed) const;

  // Adapter for build_paths.
  ReturnSampler as_return_sampler() const;

  const SamplerConfig& config() const { return cfg_; }

 private:
  const NoisePredictor& predictor_;
  SamplerConfig cfg_;
  std::vector<double> inv_sqrt_alpha_;
  std::vector<double> eps_coef_;
  std::vector<double> noise_sd_;
  std::vector<double> delta_;
};

std::vector<double> reverse_sample(const NoisePredictor& predictor, const SamplerConfig& cfg, std::size_t n,
                                   std::uint64_t seed);

// DDPM price paths for `market`; the measure tag is Q for RiskNeutral mode
// and P for Physical mode.
PricePaths ddpm_paths(const NoisePredictor& predictor, const SamplerConfig& cfg, const MarketParams& market,
                      std::size_t n_paths, std::uint64_t seed);

}  // namespace rndiff
