#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rndiff/market.hpp"
#include "rndiff/paths.hpp"

namespace rndiff {

struct CurvePoint {
  double time = 0.0;             // t_h = h * dt
  double discounted_mean = 0.0;  // M_h = e^{-r t_h} mean(S_{t_h})
  double std_error = 0.0;
};

std::vector<CurvePoint> martingale_curve(const PricePaths& paths, double r);

// max_h |M_h - s0| / SE_h over points with SE_h > 0; the curve passes a
// k-sigma martingale band iff this is <= k.
double max_band_ratio(std::span<const CurvePoint> curve, double s0);
bool within_martingale_band(std::span<const CurvePoint> curve, double s0, double k_se);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// Asymptotic Kolmogorov survival function Q(lambda) = 2 sum (-1)^{k-1} e^{-2 k^2 lambda^2}.
double kolmogorov_survival(double lambda);

// One-sample KS test against N(mean, var); p-value uses
// lambda = (sqrt(n) + 0.12 + 0.11 / sqrt(n)) * D.
KsResult ks_normal(std::span<const double> samples, double mean, double var);

// KS test of ln S_T against N(ref_mean, ref_var). Needs n >= 10.
KsResult ks_terminal(const PricePaths& paths, double ref_mean, double ref_var);

struct MomentReport {
  double mean = 0.0;
  double std_dev = 0.0;
  double z_mean = 0.0;  // (mean - m) / (sqrt(v0 / n))
  double z_std = 0.0;   // (std - sqrt(v0)) / (sqrt(v0) / sqrt(2 (n - 1)))
  std::size_t count = 0;
};

MomentReport moment_report(std::span<const double> returns, const MarketParams& params, Measure measure);

struct DiagnosticsReport {
  double mean_return = 0.0;
  double std_return = 0.0;
  double discounted_terminal_mean = 0.0;
  double ks_statistic = 0.0;
  double ks_p_value = 1.0;
  std::vector<CurvePoint> martingale_curve;
};

// Moments of all log-returns, discounted terminal mean, KS of the first
// `ks_paths` terminal log-prices against N(ln s0 + H m_Q, H v0), and the curve.
DiagnosticsReport diagnose_paths(const PricePaths& paths, const MarketParams& params, std::size_t ks_paths);

std::string to_json(const DiagnosticsReport& report);
void write_curve_csv(std::ostream& out, std::span<const CurvePoint> curve);

}  // namespace rndiff
