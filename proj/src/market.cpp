#include "rndiff/market.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rndiff/format.hpp"
#include "rndiff/rng.hpp"
#include "rndiff/stats.hpp"

namespace rndiff {

void MarketParams::validate() const {
  if (!(s0 > 0.0)) throw std::invalid_argument("market: s0 must be positive");
  if (!(sigma > 0.0)) throw std::invalid_argument("market: sigma must be positive");
  if (!(dt > 0.0)) throw std::invalid_argument("market: dt must be positive");
  if (horizon < 0) throw std::invalid_argument("market: horizon must be non-negative");
  if (!std::isfinite(mu) || !std::isfinite(r)) throw std::invalid_argument("market: drifts must be finite");
}

std::string MarketParams::to_record() const {
  return "s0=" + format_exact(s0) + ";mu=" + format_exact(mu) + ";r=" + format_exact(r) +
         ";sigma=" + format_exact(sigma) + ";dt=" + format_exact(dt) + ";H=" + std::to_string(horizon);
}

std::uint64_t MarketParams::hash() const { return fnv1a64(to_record()); }

std::vector<double> sample_returns_exact(const MarketParams& params, Measure measure, std::size_t n,
                                         std::uint64_t seed, std::uint64_t first_stream) {
  params.validate();
  if (n < 1) throw std::invalid_argument("sample_returns_exact: n must be >= 1");
  const double mean = params.drift(measure);
  const double sd = std::sqrt(params.v0());
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    CounterRng rng(seed, first_stream + i);
    out[i] = mean + sd * rng.normal();
  }
  return out;
}

PricePaths gbm_paths(const MarketParams& params, Measure measure, std::size_t n_paths, std::uint64_t seed) {
  params.validate();
  const double mean = params.drift(measure);
  const double sd = std::sqrt(params.v0());
  const ReturnSampler exact = [mean, sd](std::uint64_t s, std::uint64_t first, std::span<double> out) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      CounterRng rng(s, first + i);
      out[i] = mean + sd * rng.normal();
    }
  };
  PathMeta meta{params.s0, params.dt, params.horizon, measure, "gbm", params.hash()};
  return build_paths(exact, meta, n_paths, seed);
}

double bs_call_price(double s0, double strike, double r, double sigma, double years) {
  if (!(s0 > 0.0) || !(strike > 0.0) || !(sigma > 0.0) || !(years >= 0.0)) {
    throw std::invalid_argument("bs_call_price: s0, strike, sigma must be positive and maturity non-negative");
  }
  if (years == 0.0) return std::max(s0 - strike, 0.0);
  const double vol_sqrt_t = sigma * std::sqrt(years);
  const double d1 = (std::log(s0 / strike) + (r + 0.5 * sigma * sigma) * years) / vol_sqrt_t;
  const double d2 = d1 - vol_sqrt_t;
  return s0 * normal_cdf(d1) - strike * std::exp(-r * years) * normal_cdf(d2);
}

double bs_put_price(double s0, double strike, double r, double sigma, double years) {
  if (!(s0 > 0.0) || !(strike > 0.0) || !(sigma > 0.0) || !(years >= 0.0)) {
    throw std::invalid_argument("bs_put_price: s0, strike, sigma must be positive and maturity non-negative");
  }
  if (years == 0.0) return std::max(strike - s0, 0.0);
  const double vol_sqrt_t = sigma * std::sqrt(years);
  const double d1 = (std::log(s0 / strike) + (r + 0.5 * sigma * sigma) * years) / vol_sqrt_t;
  const double d2 = d1 - vol_sqrt_t;
  return strike * std::exp(-r * years) * normal_cdf(-d2) - s0 * normal_cdf(-d1);
}

std::optional<double> implied_vol(double price, double s0, double strike, double r, double years) {
  if (!(price >= 0.0) || !(s0 > 0.0) || !(strike > 0.0) || !(years > 0.0)) {
    throw std::invalid_argument("implied_vol: negative or degenerate inputs");
  }
  const double lower_bound = std::max(s0 - strike * std::exp(-r * years), 0.0);
  if (price <= lower_bound || price >= s0) return std::nullopt;

  double lo = 1e-6;
  double hi = 5.0;
  if (price < bs_call_price(s0, strike, r, lo, years) || price > bs_call_price(s0, strike, r, hi, years)) {
    return std::nullopt;
  }
  while (hi - lo > 1e-8) {
    const double mid = 0.5 * (lo + hi);
    if (bs_call_price(s0, strike, r, mid, years) < price) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double implied_rate(double price, double s0, double strike, double sigma, double years) {
  if (!(years > 0.0)) throw std::invalid_argument("implied_rate: maturity must be positive");
  double lo = -1.0;
  double hi = 1.0;
  const double f_lo = bs_call_price(s0, strike, lo, sigma, years) - price;
  const double f_hi = bs_call_price(s0, strike, hi, sigma, years) - price;
  if (f_lo > 0.0 || f_hi < 0.0) throw std::domain_error("implied_rate: price not attainable for r in [-1, 1]");
  // Call value is increasing in r.
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (bs_call_price(s0, strike, mid, sigma, years) < price) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace rndiff
