#include "rndiff/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rndiff/stats.hpp"

namespace rndiff {

namespace {

PriceEstimate discounted_estimate(std::span<const double> payoffs, double discount, OptionSpec spec) {
  const SampleMoments m = sample_moments(payoffs);
  PriceEstimate est;
  est.value = discount * m.mean;
  est.std_error = discount * m.std_error();
  est.n_paths = payoffs.size();
  est.spec = spec;
  est.discount = discount;
  return est;
}

void require_horizon(const PricePaths& paths) {
  if (paths.horizon < 1) throw std::invalid_argument("pricing: paths need at least one step");
  if (paths.n_paths < 1) throw std::invalid_argument("pricing: no paths");
}

}  // namespace

PriceEstimate price_european(const PricePaths& paths, double strike, double r) {
  require_horizon(paths);
  std::vector<double> payoffs(paths.n_paths);
  for (std::size_t i = 0; i < paths.n_paths; ++i) payoffs[i] = std::max(paths.terminal(i) - strike, 0.0);
  const double discount = std::exp(-r * paths.horizon * paths.dt);
  return discounted_estimate(payoffs, discount, OptionSpec{OptionKind::EuropeanCall, strike, paths.horizon});
}

PriceEstimate price_asian_arithmetic(const PricePaths& paths, double strike, double r) {
  require_horizon(paths);
  std::vector<double> payoffs(paths.n_paths);
  for (std::size_t i = 0; i < paths.n_paths; ++i) {
    const auto row = paths.path(i);
    CompensatedSum sum;
    for (std::size_t h = 1; h < row.size(); ++h) sum.add(row[h]);
    const double average = sum.value() / static_cast<double>(paths.horizon);
    payoffs[i] = std::max(average - strike, 0.0);
  }
  const double discount = std::exp(-r * paths.horizon * paths.dt);
  return discounted_estimate(payoffs, discount, OptionSpec{OptionKind::AsianArithmeticCall, strike, paths.horizon});
}

std::vector<StripRow> price_strip(const PricePaths& paths, std::span<const double> strikes, double r) {
  if (strikes.empty()) throw std::invalid_argument("price_strip: no strikes");
  const double years = paths.horizon * paths.dt;
  std::vector<StripRow> rows;
  rows.reserve(strikes.size());
  for (double k : strikes) {
    StripRow row;
    row.strike = k;
    row.estimate = price_european(paths, k, r);
    row.implied_vol = implied_vol(row.estimate.value, paths.s0, k, r, years);
    rows.push_back(row);
  }
  return rows;
}

std::vector<double> default_moneyness() {
  std::vector<double> grid(7);
  for (int i = 0; i < 7; ++i) grid[static_cast<std::size_t>(i)] = (12.0 + i) / 15.0;
  return grid;
}

double combined_std_error(const PriceEstimate& a, const PriceEstimate& b) {
  return std::hypot(a.std_error, b.std_error);
}

}  // namespace rndiff
