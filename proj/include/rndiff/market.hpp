#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rndiff/paths.hpp"

namespace rndiff {

// GBM world. One-step log-returns are N(m_P, v0) under P and N(m_Q, v0)
// under Q with m = (drift - sigma^2 / 2) * dt and v0 = sigma^2 * dt.
struct MarketParams {
  double s0 = 100.0;
  double mu = 0.10;
  double r = 0.05;
  double sigma = 0.2;
  double dt = 1.0 / 252.0;
  int horizon = 21;

  double drift_p() const { return (mu - 0.5 * sigma * sigma) * dt; }
  double drift_q() const { return (r - 0.5 * sigma * sigma) * dt; }
  double drift(Measure m) const { return m == Measure::P ? drift_p() : drift_q(); }
  double v0() const { return sigma * sigma * dt; }
  double maturity() const { return horizon * dt; }

  // Throws std::invalid_argument on s0, sigma, dt <= 0 or horizon < 0.
  void validate() const;
  // Stable text form; its FNV-1a hash tags generated paths.
  std::string to_record() const;
  std::uint64_t hash() const;
};

enum class OptionKind { EuropeanCall, AsianArithmeticCall };

struct OptionSpec {
  OptionKind kind = OptionKind::EuropeanCall;
  double strike = 100.0;
  int maturity_steps = 1;
};

// n i.i.d. draws of the exact one-step log-return law. Draw i comes from
// substream first_stream + i of `seed`.
std::vector<double> sample_returns_exact(const MarketParams& params, Measure measure, std::size_t n,
                                         std::uint64_t seed, std::uint64_t first_stream = 0);

// Exact lognormal GBM paths on the calendar grid.
PricePaths gbm_paths(const MarketParams& params, Measure measure, std::size_t n_paths, std::uint64_t seed);

// Black-Scholes call. years == 0 returns intrinsic value.
double bs_call_price(double s0, double strike, double r, double sigma, double years);
double bs_put_price(double s0, double strike, double r, double sigma, double years);

// Bisection on sigma in [1e-6, 5] to 1e-8. Empty when the price is outside
// the no-arbitrage band (max(s0 - K e^{-rT}, 0), s0).
std::optional<double> implied_vol(double price, double s0, double strike, double r, double years);

// Rate r solving bs_call_price(s0, K, r, sigma, T) == price, by bisection on
// [-1, 1].
double implied_rate(double price, double s0, double strike, double sigma, double years);

}  // namespace rndiff
