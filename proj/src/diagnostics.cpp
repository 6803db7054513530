#include "rndiff/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "json.hpp"
#include "rndiff/format.hpp"
#include "rndiff/stats.hpp"

namespace rndiff {

std::vector<CurvePoint> martingale_curve(const PricePaths& paths, double r) {
  std::vector<CurvePoint> curve;
  curve.reserve(paths.stride());
  std::vector<double> column(paths.n_paths);
  for (int h = 0; h <= paths.horizon; ++h) {
    for (std::size_t i = 0; i < paths.n_paths; ++i) column[i] = paths.price(i, h);
    const SampleMoments m = sample_moments(column);
    const double t = paths.time(h);
    const double discount = std::exp(-r * t);
    curve.push_back({t, discount * m.mean, discount * m.std_error()});
  }
  return curve;
}

double max_band_ratio(std::span<const CurvePoint> curve, double s0) {
  double worst = 0.0;
  for (const CurvePoint& p : curve) {
    const double gap = std::abs(p.discounted_mean - s0);
    if (p.std_error > 0.0) {
      worst = std::max(worst, gap / p.std_error);
    } else if (gap > 0.0) {
      return std::numeric_limits<double>::infinity();
    }
  }
  return worst;
}

bool within_martingale_band(std::span<const CurvePoint> curve, double s0, double k_se) {
  return max_band_ratio(curve, s0) <= k_se;
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    // Jacobi-dual form converges fast for small lambda.
    const double c = std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
    double sum = 0.0;
    for (int k = 1; k <= 50; ++k) {
      const double term = std::exp(-(2.0 * k - 1.0) * (2.0 * k - 1.0) * c);
      sum += term;
      if (term < 1e-16) break;
    }
    return std::clamp(1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * sum, 0.0, 1.0);
  }
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    if (term < 1e-10) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_normal(std::span<const double> samples, double mean, double var) {
  if (!(var > 0.0) || !std::isfinite(var)) throw std::invalid_argument("ks: reference variance must be positive");
  if (samples.size() < 10) throw std::invalid_argument("ks: need at least 10 samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  const double sd = std::sqrt(var);
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = normal_cdf((sorted[i] - mean) / sd);
    const double di = static_cast<double>(i);
    d = std::max({d, (di + 1.0) / n - f, f - di / n});
  }
  const double root_n = std::sqrt(n);
  return {d, kolmogorov_survival((root_n + 0.12 + 0.11 / root_n) * d)};
}

KsResult ks_terminal(const PricePaths& paths, double ref_mean, double ref_var) {
  std::vector<double> log_terminal(paths.n_paths);
  for (std::size_t i = 0; i < paths.n_paths; ++i) log_terminal[i] = std::log(paths.terminal(i));
  return ks_normal(log_terminal, ref_mean, ref_var);
}

MomentReport moment_report(std::span<const double> returns, const MarketParams& params, Measure measure) {
  if (returns.empty()) throw std::invalid_argument("moment_report: no returns");
  const SampleMoments m = sample_moments(returns);
  const double n = static_cast<double>(m.count);
  const double ref_sd = std::sqrt(params.v0());
  MomentReport rep;
  rep.mean = m.mean;
  rep.std_dev = m.std_dev();
  rep.count = m.count;
  rep.z_mean = (m.mean - params.drift(measure)) / (ref_sd / std::sqrt(n));
  rep.z_std = m.count > 1 ? (rep.std_dev - ref_sd) / (ref_sd / std::sqrt(2.0 * (n - 1.0))) : 0.0;
  return rep;
}

DiagnosticsReport diagnose_paths(const PricePaths& paths, const MarketParams& params, std::size_t ks_paths) {
  DiagnosticsReport rep;
  const MomentReport moments = moment_report(paths.returns, params, paths.measure);
  rep.mean_return = moments.mean;
  rep.std_return = moments.std_dev;
  rep.martingale_curve = martingale_curve(paths, params.r);
  rep.discounted_terminal_mean = rep.martingale_curve.back().discounted_mean;

  const std::size_t n_ks = std::min(ks_paths, paths.n_paths);
  std::vector<double> log_terminal(n_ks);
  for (std::size_t i = 0; i < n_ks; ++i) log_terminal[i] = std::log(paths.terminal(i));
  const double H = paths.horizon;
  const KsResult ks = ks_normal(log_terminal, std::log(paths.s0) + H * params.drift_q(), H * params.v0());
  rep.ks_statistic = ks.statistic;
  rep.ks_p_value = ks.p_value;
  return rep;
}

std::string to_json(const DiagnosticsReport& report) {
  nlohmann::ordered_json j;
  j["mean_return"] = report.mean_return;
  j["std_return"] = report.std_return;
  j["discounted_terminal_mean"] = report.discounted_terminal_mean;
  j["ks_statistic"] = report.ks_statistic;
  j["ks_p_value"] = report.ks_p_value;
  auto& curve = j["martingale_curve"] = nlohmann::ordered_json::array();
  for (const CurvePoint& p : report.martingale_curve) curve.push_back({p.time, p.discounted_mean, p.std_error});
  return j.dump(2);
}

void write_curve_csv(std::ostream& out, std::span<const CurvePoint> curve) {
  out << "h,t,M,SE\n";
  for (std::size_t h = 0; h < curve.size(); ++h) {
    out << h << ',' << format_sig6(curve[h].time) << ',' << format_sig6(curve[h].discounted_mean) << ','
        << format_sig6(curve[h].std_error) << "\n";
  }
}

}  // namespace rndiff
