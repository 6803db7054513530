#pragma once

#include <optional>
#include <span>
#include <vector>

#include "rndiff/market.hpp"
#include "rndiff/paths.hpp"

namespace rndiff {

struct PriceEstimate {
  double value = 0.0;      // e^{-rT} * mean payoff
  double std_error = 0.0;  // e^{-rT} * sample std / sqrt(n)
  std::size_t n_paths = 0;
  OptionSpec spec;
  double discount = 1.0;
};

// Payoff (S_T - K)^+ discounted over T = H * dt.
PriceEstimate price_european(const PricePaths& paths, double strike, double r);

// Payoff (A - K)^+ with A the mean of S_{t_1}..S_{t_H}; S_{t_0} is excluded.
PriceEstimate price_asian_arithmetic(const PricePaths& paths, double strike, double r);

struct StripRow {
  double strike = 0.0;
  PriceEstimate estimate;
  std::optional<double> implied_vol;
};

std::vector<StripRow> price_strip(const PricePaths& paths, std::span<const double> strikes, double r);

// Seven-point uniform grid on [0.8, 1.2] in units of s0.
std::vector<double> default_moneyness();

// sqrt(a.se^2 + b.se^2) for two independent estimates.
double combined_std_error(const PriceEstimate& a, const PriceEstimate& b);

}  // namespace rndiff
