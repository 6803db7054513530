// Acceptance run: one PASS/FAIL line per criterion, with measured values and
// wall time. Exit status is non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "rndiff/cli/commands.hpp"
#include "rndiff/cli/config.hpp"
#include "rndiff/diagnostics.hpp"
#include "rndiff/market.hpp"
#include "rndiff/paths.hpp"
#include "rndiff/pricing.hpp"
#include "rndiff/rng.hpp"
#include "rndiff/sampler.hpp"
#include "rndiff/schedule.hpp"
#include "support.hpp"

using namespace rndiff;

namespace {

struct Outcome {
  bool passed = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) passed = false;
    if (detail.tellp() > 0) detail << "; ";
    detail << what << (ok ? "" : " [x]");
  }
};

std::string num(double x, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

const DiffusionSchedule kSchedule{ScheduleParams{}};

SamplerConfig rn_config(const NoisePredictor& p, const MarketParams& m) {
  SamplerConfig c;
  c.mode = SamplerMode::RiskNeutral;
  c.shift = risk_neutral_shift(p, m);
  return c;
}

MarketParams stress_market() { return cli::stress_config().market; }
MarketParams baseline_market() { return cli::baseline_config().market; }

// Martingale band of the shifted chain and terminal excursion of the unshifted one.
void check_martingale(Outcome& out, const NoisePredictor& p, std::size_t n, double k_se, std::uint64_t seed) {
  const MarketParams m = stress_market();
  const auto rn = martingale_curve(ddpm_paths(p, rn_config(p, m), m, n, seed), m.r);
  const auto ph = martingale_curve(ddpm_paths(p, SamplerConfig{}, m, n, seed), m.r);
  const double band = max_band_ratio(rn, m.s0);
  out.require(band <= k_se, "shifted max|M_h-S0|/SE_h=" + num(band) + " <= " + num(k_se));
  const CurvePoint& end = ph.back();
  const double excursion = (end.discounted_mean - m.s0) / end.std_error;
  out.require(excursion > 10.0, "unshifted (M_63-S0)/SE_63=" + num(excursion) + " > 10");
}

// Terminal mean, ATM call, KS and one-step volatility on the baseline market.
void check_baseline(Outcome& out, const NoisePredictor& p, std::size_t n, double k_se, double ks_max,
                    std::uint64_t seed) {
  const MarketParams m = baseline_market();
  const PricePaths paths = ddpm_paths(p, rn_config(p, m), m, n, seed);
  const DiagnosticsReport rep = diagnose_paths(paths, m, 1000);
  out.require(std::abs(rep.discounted_terminal_mean - m.s0) <= 0.1,
              "disc. terminal mean=" + num(rep.discounted_terminal_mean, 7) + " within 0.1 of 100");
  const double bs = bs_call_price(m.s0, m.s0, m.r, m.sigma, m.maturity());
  const PriceEstimate atm = price_european(paths, m.s0, m.r);
  const double z = std::abs(atm.value - bs) / atm.std_error;
  out.require(z <= k_se, "ATM=" + num(atm.value) + " vs BS " + num(bs) + " (" + num(z, 3) + " SE <= " + num(k_se) + ")");
  out.require(rep.ks_statistic < ks_max, "KS D=" + num(rep.ks_statistic) + " < " + num(ks_max));
  const double vol_err = std::abs(rep.std_return / std::sqrt(m.v0()) - 1.0);
  out.require(vol_err <= 0.01, "std/(sigma sqrt dt)-1=" + num(vol_err, 3) + " <= 1%");
}

void c1_shift_identities(Outcome& out) {
  CounterRng rng(derive_seed(101, 1), 0);
  double worst = 0.0;
  bool unit_exact = true;
  for (int s = 0; s < 5; ++s) {
    const int steps = 20 + static_cast<int>(rng.uniform() * 480.0);
    const double b0 = 1e-5 + 1e-3 * rng.uniform();
    const double b1 = 0.01 + 0.3 * rng.uniform();
    const DiffusionSchedule sched = DiffusionSchedule::linear(steps, b0, b1);
    for (int g = 0; g < 5; ++g) {
      const double gap = 4.0 * rng.uniform() - 2.0;
      const double v0 = 0.25 + 2.0 * rng.uniform();
      const ShiftConstants c = shift_constants(sched, v0, gap);
      const ShiftConstants unit = shift_constants(sched, 1.0, gap);
      long double ab = 1.0L;
      for (int t = 1; t <= steps; ++t) {
        const long double beta = b0 + (static_cast<long double>(b1) - b0) * (t - 1) / (steps - 1);
        ab *= 1.0L - beta;
        const long double sig = ab * v0 + (1.0L - ab);
        const long double eta = std::sqrt(ab) * gap / sig;
        const long double delta = eta * std::sqrt(1.0L - ab);
        const auto i = static_cast<std::size_t>(t - 1);
        worst = std::max(worst, static_cast<double>(std::abs((c.eta[i] - eta) / eta)));
        worst = std::max(worst, static_cast<double>(std::abs((c.delta[i] - delta) / delta)));
        // The delta identity checked on the library's own values as well.
        const double inner = c.eta[i] * std::sqrt(1.0 - sched.alpha_bar(t));
        worst = std::max(worst, std::abs((c.delta[i] - inner) / inner));
        if (unit.sigma_sq[i] != 1.0) unit_exact = false;
      }
    }
  }
  out.require(worst <= 1e-12, "max relative error=" + num(worst, 3) + " <= 1e-12");
  out.require(unit_exact, std::string("v0=1 gives sigma_t^2 == 1 ") + (unit_exact ? "exactly" : "not exactly"));
}

void c2_oracle_score(Outcome& out) {
  double worst = 0.0;
  for (const auto& [m, v0] : std::vector<std::pair<double, double>>{{0.0, 1.0}, {0.7, 0.4}, {-1.3, 2.5}}) {
    worst = std::max(worst, testing::oracle_score_gap(m, v0, kSchedule, 41));
  }
  out.require(worst <= 1e-6, "max |oracle - FD score form| over 41xT=" + num(worst, 3) + " <= 1e-6");
}

void c3_martingale(Outcome& out) {
  const MarketParams m = stress_market();
  check_martingale(out, physical_oracle(kSchedule, m), 20000, 3.0, 303);
}

void c4_baseline(Outcome& out) {
  const MarketParams m = baseline_market();
  check_baseline(out, physical_oracle(kSchedule, m), 100000, 3.0, 0.0429, 404);
}

void c5_strike_strip(Outcome& out) {
  const MarketParams m = stress_market();
  const NoisePredictor p = physical_oracle(kSchedule, m);
  const PricePaths rn = ddpm_paths(p, rn_config(p, m), m, 20000, 505);
  const PricePaths ph = ddpm_paths(p, SamplerConfig{}, m, 20000, 505);
  double worst = 0.0;
  for (double k : default_moneyness()) {
    const double strike = k * m.s0;
    const PriceEstimate e = price_european(rn, strike, m.r);
    const double bs = bs_call_price(m.s0, strike, m.r, m.sigma, m.maturity());
    worst = std::max(worst, std::abs(e.value - bs) / e.std_error);
  }
  out.require(worst <= 3.0, "shifted max |price-BS|/SE over 7 strikes=" + num(worst, 3) + " <= 3");
  const double bs_atm = bs_call_price(m.s0, m.s0, m.r, m.sigma, m.maturity());
  const double ratio = price_european(ph, m.s0, m.r).value / bs_atm;
  out.require(ratio >= 1.4, "unshifted ATM/BS=" + num(ratio) + " >= 1.4");
}

void c6_asian_grid(Outcome& out) {
  const cli::ExperimentConfig cfg = cli::baseline_config();
  int inside = 0;
  int cells = 0;
  double spot = 0.0;
  for (int h : cfg.asian_horizons) {
    MarketParams m = cfg.market;
    m.horizon = h;
    const NoisePredictor p = physical_oracle(kSchedule, m);
    const PricePaths ddpm = ddpm_paths(p, rn_config(p, m), m, 20000, derive_seed(606, static_cast<std::uint64_t>(h)));
    const PricePaths gbm = gbm_paths(m, Measure::Q, 20000, derive_seed(607, static_cast<std::uint64_t>(h)));
    for (double k : cfg.asian_strikes) {
      const PriceEstimate a = price_asian_arithmetic(ddpm, k * m.s0, m.r);
      const PriceEstimate b = price_asian_arithmetic(gbm, k * m.s0, m.r);
      ++cells;
      if (std::abs(a.value - b.value) <= 3.0 * combined_std_error(a, b)) ++inside;
      if (h == 21 && k == 1.0) spot = b.value;
    }
  }
  out.require(inside >= 8, "cells within 3 combined SE=" + std::to_string(inside) + "/" + std::to_string(cells) + " >= 8");
  out.require(std::abs(spot - 1.45) <= 3.0 * 0.07, "GBM (H=21, K=S0)=" + num(spot) + " within 0.21 of 1.45");
}

void c7_trained(Outcome& out) {
  std::ostringstream log;
  cli::ExperimentConfig stress = cli::stress_config();
  stress.predictor = cli::PredictorSource::Train;
  const NoisePredictor p_stress = cli::resolve_predictor(stress, log);
  cli::ExperimentConfig base = cli::baseline_config();
  base.predictor = cli::PredictorSource::Train;
  const NoisePredictor p_base = cli::resolve_predictor(base, log);

  const double mad = std::max(testing::grid_mad(p_stress), testing::grid_mad(p_base));
  out.require(mad <= 0.05, "grid MAD from oracle=" + num(mad, 3) + " <= 0.05");
  check_martingale(out, p_stress, 20000, 4.0, 707);
  check_baseline(out, p_base, 50000, 4.0, 0.06, 708);
}

void c8_gradient(Outcome& out) {
  const testing::GradientCheck g = testing::gradient_check(64, 808, 100);
  out.require(g.directions == 100 && g.worst_relative <= 1e-5,
              "worst relative error over " + std::to_string(g.directions) + " directions=" + num(g.worst_relative, 3) +
                  " <= 1e-5");
}

void c9_properties(Outcome& out) {
  {
    MarketParams m = baseline_market();
    m.mu = m.r;
    const NoisePredictor p = physical_oracle(kSchedule, m);
    const PricePaths a = ddpm_paths(p, SamplerConfig{}, m, 2000, 909);
    const PricePaths b = ddpm_paths(p, rn_config(p, m), m, 2000, 909);
    out.require(a.prices == b.prices, std::string("mu=r samplers ") + (a.prices == b.prices ? "bitwise equal" : "differ"));
  }
  CounterRng rng(derive_seed(910, 1), 0);
  double iv_worst = 0.0;
  double parity_worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double s = 50.0 + 100.0 * rng.uniform();
    const double k = s * (0.85 + 0.35 * rng.uniform());
    const double r = 0.1 * rng.uniform();
    const double sigma = 0.1 + 0.4 * rng.uniform();
    const double years = 0.05 + 0.95 * rng.uniform();
    const double call = bs_call_price(s, k, r, sigma, years);
    const auto iv = implied_vol(call, s, k, r, years);
    iv_worst = std::max(iv_worst, iv ? std::abs(*iv - sigma) : 1.0);
    const double put = bs_put_price(s, k, r, sigma, years);
    const double parity = std::abs(call - put - (s - k * std::exp(-r * years))) / std::max(1.0, s);
    parity_worst = std::max(parity_worst, parity);
  }
  out.require(iv_worst <= 1e-6, "implied-vol round trip max error=" + num(iv_worst, 3) + " <= 1e-6");
  out.require(parity_worst <= 1e-10, "put-call parity max error=" + num(parity_worst, 3) + " <= 1e-10");

  {
    const MarketParams m = baseline_market();
    auto csv = [&] {
      const NoisePredictor p = physical_oracle(kSchedule, m);
      std::ostringstream s;
      write_paths_csv(s, ddpm_paths(p, rn_config(p, m), m, 500, 911));
      write_paths_csv(s, gbm_paths(m, Measure::Q, 500, 912));
      return s.str();
    };
    const bool same = csv() == csv();
    out.require(same, std::string("path CSV on rerun ") + (same ? "byte-identical" : "differs"));
  }
  {
    const MarketParams m = baseline_market();
    const double mean = std::log(m.s0) + m.horizon * m.drift_q();
    const double var = m.horizon * m.v0();
    int rejections = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      if (ks_terminal(gbm_paths(m, Measure::Q, 1000, derive_seed(913, seed)), mean, var).p_value < 0.05) ++rejections;
    }
    const double fraction = rejections / 200.0;
    out.require(fraction >= 0.01 && fraction <= 0.09, "KS null rejection rate=" + num(fraction, 3) + " in [0.01, 0.09]");
  }
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;  // 0 means no limit
  std::function<void(Outcome&)> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "epsilon-shift identities", 1.0, c1_shift_identities},
      {2, "oracle score exactness", 1.0, c2_oracle_score},
      {3, "martingale under stress", 60.0, c3_martingale},
      {4, "baseline checks (oracle)", 0.0, c4_baseline},
      {5, "stress strike strip", 120.0, c5_strike_strip},
      {6, "Asian grid", 0.0, c6_asian_grid},
      {7, "trained-net parity", 300.0, c7_trained},
      {8, "gradient check", 10.0, c8_gradient},
      {9, "property suite", 0.0, c9_properties},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    Outcome out;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(out);
    } catch (const std::exception& e) {
      out.require(false, std::string("threw: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_seconds > 0.0) {
      out.require(secs < c.limit_seconds, "runtime " + num(secs, 3) + " s < " + num(c.limit_seconds) + " s");
    } else {
      out.require(true, "runtime " + num(secs, 3) + " s");
    }
    if (!out.passed) ++failures;
    std::printf("%s %d %s: %s\n", out.passed ? "PASS" : "FAIL", c.id, c.name, out.detail.str().c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
