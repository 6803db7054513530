#include "rndiff/cli/commands.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "rndiff/cli/svg.hpp"
#include "rndiff/diagnostics.hpp"
#include "rndiff/format.hpp"
#include "rndiff/pricing.hpp"
#include "rndiff/rng.hpp"
#include "rndiff/sampler.hpp"

namespace rndiff::cli {

namespace {

// Seed tags; each keeps one random source independent of the others.
constexpr std::uint64_t kTrainDataTag = 0x7472;  // training returns
constexpr std::uint64_t kGbmTag = 0x67626d;      // GBM benchmark paths

// Critical value of the one-sample KS statistic at the 5% level.
double ks_critical(std::size_t n) { return 1.358 / std::sqrt(static_cast<double>(n)); }

std::string fmt(double v) { return format_sig6(v); }

struct Resolved {
  NoisePredictor predictor;
  std::optional<TrainingReport> report;
};

Resolved resolve(const ExperimentConfig& cfg, std::ostream& log) {
  const DiffusionSchedule sched(cfg.schedule);
  switch (cfg.predictor) {
    case PredictorSource::Oracle:
      return {physical_oracle(sched, cfg.market), std::nullopt};
    case PredictorSource::Load: {
      NoisePredictor p = NoisePredictor::load_file(cfg.model_path);
      if (!(p.schedule().params() == cfg.schedule)) {
        log << "note: using the schedule stored in " << cfg.model_path << "\n";
      }
      return {std::move(p), std::nullopt};
    }
    case PredictorSource::Train:
      break;
  }
  log << "training on " << cfg.training.n_samples << " physical returns for " << cfg.training.epochs
      << " epochs\n";
  const std::vector<double> data = sample_returns_exact(cfg.market, Measure::P, cfg.training.n_samples,
                                                        derive_seed(cfg.training.seed, kTrainDataTag));
  TrainingReport report;
  NoisePredictor p = train(data, sched, cfg.training, &report);
  log << "held-out loss " << fmt(report.heldout_loss) << " vs oracle floor " << fmt(report.oracle_loss) << "\n";
  return {std::move(p), report};
}

SamplerConfig risk_neutral(const NoisePredictor& p, const MarketParams& m) {
  SamplerConfig c;
  c.mode = SamplerMode::RiskNeutral;
  c.shift = risk_neutral_shift(p, m);
  return c;
}

SamplerConfig physical() { return SamplerConfig{}; }

std::filesystem::path prepare_out(const ExperimentConfig& cfg) {
  std::filesystem::path dir(cfg.out_dir);
  std::filesystem::create_directories(dir);
  return dir;
}

void emit(CommandResult& res, const std::filesystem::path& dir, const std::string& name, const std::string& body) {
  write_file_atomic((dir / name).string(), body);
  res.files.push_back(name);
}

void gate(CommandResult& res, std::string name, bool passed, std::string detail) {
  res.gates.push_back({std::move(name), passed, std::move(detail)});
}

double atm_strike(const ExperimentConfig& cfg) { return cfg.market.s0; }

}  // namespace

NoisePredictor resolve_predictor(const ExperimentConfig& cfg, std::ostream& log) {
  return resolve(cfg, log).predictor;
}

CommandResult cmd_train(const ExperimentConfig& cfg, std::ostream& log) {
  CommandResult res;
  const auto dir = prepare_out(cfg);
  Resolved r = resolve(cfg, log);
  std::ostringstream model;
  r.predictor.save(model);
  emit(res, dir, "model.txt", model.str());
  if (r.report) {
    const double ratio = r.report->heldout_loss / r.report->oracle_loss;
    res.metrics.push_back({"heldout_loss", r.report->heldout_loss});
    res.metrics.push_back({"oracle_loss", r.report->oracle_loss});
    res.metrics.push_back({"final_epoch_loss", r.report->epoch_loss.back()});
    gate(res, "heldout_within_gate", ratio <= cfg.training.gate_ratio,
         "held-out / oracle = " + fmt(ratio) + " (limit " + fmt(cfg.training.gate_ratio) + ")");
  }
  return res;
}

CommandResult cmd_diagnose(const ExperimentConfig& cfg, std::ostream& log) {
  CommandResult res;
  const auto dir = prepare_out(cfg);
  const MarketParams& m = cfg.market;
  const NoisePredictor p = resolve_predictor(cfg, log);
  log << "sampling " << cfg.n_paths << " paths x " << m.horizon << " steps per mode\n";
  const PricePaths rn = ddpm_paths(p, risk_neutral(p, m), m, cfg.n_paths, cfg.seed);
  const PricePaths ns = ddpm_paths(p, physical(), m, cfg.n_paths, cfg.seed);
  const DiagnosticsReport rep_rn = diagnose_paths(rn, m, cfg.ks_paths);
  const DiagnosticsReport rep_ns = diagnose_paths(ns, m, cfg.ks_paths);
  const double k = atm_strike(cfg);
  const PriceEstimate call_rn = price_european(rn, k, m.r);
  const PriceEstimate call_ns = price_european(ns, k, m.r);
  const double bs = bs_call_price(m.s0, k, m.r, m.sigma, m.maturity());
  const std::size_t n_ks = std::min(cfg.ks_paths, cfg.n_paths);

  CsvTable table({"metric", "rn_ddpm", "no_shift", "reference"});
  table.add_row().text("mean_one_step_return").num(rep_rn.mean_return).num(rep_ns.mean_return).num(m.drift_q());
  table.add_row().text("std_one_step_return").num(rep_rn.std_return).num(rep_ns.std_return).num(std::sqrt(m.v0()));
  table.add_row()
      .text("discounted_terminal_mean")
      .num(rep_rn.discounted_terminal_mean)
      .num(rep_ns.discounted_terminal_mean)
      .num(m.s0);
  table.add_row().text("atm_call_price").num(call_rn.value).num(call_ns.value).num(bs);
  table.add_row().text("atm_call_se").num(call_rn.std_error).num(call_ns.std_error).text("");
  table.add_row().text("ks_statistic").num(rep_rn.ks_statistic).num(rep_ns.ks_statistic).num(ks_critical(n_ks));
  table.add_row().text("ks_p_value").num(rep_rn.ks_p_value).num(rep_ns.ks_p_value).num(0.05);
  emit(res, dir, "diagnostics.csv", table.str());

  CsvTable curve({"h", "t", "M_rn", "SE_rn", "M_no_shift", "SE_no_shift"});
  for (std::size_t h = 0; h < rep_rn.martingale_curve.size(); ++h) {
    const CurvePoint& a = rep_rn.martingale_curve[h];
    const CurvePoint& b = rep_ns.martingale_curve[h];
    curve.add_row().integer(static_cast<long long>(h)).num(a.time).num(a.discounted_mean).num(a.std_error).num(
        b.discounted_mean).num(b.std_error);
  }
  emit(res, dir, "martingale.csv", curve.str());

  if (cfg.svg) {
    SvgPlot plot;
    plot.title = "Discounted mean price";
    plot.x_label = "t (years)";
    plot.y_label = "e^{-rt} E[S_t]";
    SvgSeries a{"risk-neutral DDPM", "#1f77b4", {}, {}};
    SvgSeries b{"no shift", "#d62728", {}, {}};
    for (std::size_t h = 0; h < rep_rn.martingale_curve.size(); ++h) {
      a.x.push_back(rep_rn.martingale_curve[h].time);
      a.y.push_back(rep_rn.martingale_curve[h].discounted_mean);
      b.x.push_back(rep_ns.martingale_curve[h].time);
      b.y.push_back(rep_ns.martingale_curve[h].discounted_mean);
    }
    plot.series = {a, b};
    plot.references = {{"S0", m.s0}};
    emit(res, dir, "martingale.svg", render_svg(plot));
  }

  const double band = max_band_ratio(rep_rn.martingale_curve, m.s0);
  const double atm_z = std::abs(call_rn.value - bs) / call_rn.std_error;
  const double std_rel = std::abs(rep_rn.std_return / std::sqrt(m.v0()) - 1.0);
  const CurvePoint& last_ns = rep_ns.martingale_curve.back();
  res.metrics = {{"rn_discounted_terminal_mean", rep_rn.discounted_terminal_mean},
                 {"rn_atm_call", call_rn.value},
                 {"rn_atm_call_se", call_rn.std_error},
                 {"bs_atm_call", bs},
                 {"rn_ks_statistic", rep_rn.ks_statistic},
                 {"rn_ks_p_value", rep_rn.ks_p_value},
                 {"rn_max_band_ratio", band},
                 {"no_shift_terminal_gap_in_se", (last_ns.discounted_mean - m.s0) / last_ns.std_error}};
  gate(res, "rn_martingale_3se", band <= 3.0, "max |M_h - s0| / SE_h = " + fmt(band));
  gate(res, "rn_atm_within_3se", atm_z <= 3.0,
       "|C - BS| / SE = " + fmt(atm_z) + " (C = " + fmt(call_rn.value) + ", BS = " + fmt(bs) + ")");
  gate(res, "rn_ks_below_critical", rep_rn.ks_statistic < ks_critical(n_ks),
       "D = " + fmt(rep_rn.ks_statistic) + " vs " + fmt(ks_critical(n_ks)));
  gate(res, "rn_std_within_1pct", std_rel <= 0.01, "relative std error " + fmt(std_rel));
  return res;
}

CommandResult cmd_smile(const ExperimentConfig& cfg, std::ostream& log) {
  CommandResult res;
  const auto dir = prepare_out(cfg);
  const MarketParams& m = cfg.market;
  const NoisePredictor p = resolve_predictor(cfg, log);
  std::vector<double> strikes;
  for (double k : cfg.strikes) strikes.push_back(k * m.s0);
  log << "sampling " << cfg.n_paths << " DDPM and GBM paths\n";
  const PricePaths ddpm = ddpm_paths(p, risk_neutral(p, m), m, cfg.n_paths, cfg.seed);
  const PricePaths gbm = gbm_paths(m, Measure::Q, cfg.n_paths, derive_seed(cfg.seed, kGbmTag));
  const auto strip_ddpm = price_strip(ddpm, strikes, m.r);
  const auto strip_gbm = price_strip(gbm, strikes, m.r);
  const double nan = std::numeric_limits<double>::quiet_NaN();

  CsvTable table({"moneyness", "strike", "bs_price", "bs_iv", "ddpm_price", "ddpm_se", "ddpm_iv", "gbm_price",
                  "gbm_se", "gbm_iv"});
  double worst_ddpm = 0.0;
  double worst_gbm = 0.0;
  SvgSeries s_ddpm{"DDPM", "#1f77b4", {}, {}, false, true};
  SvgSeries s_gbm{"GBM Monte Carlo", "#2ca02c", {}, {}, false, true};
  SvgSeries s_bs{"Black-Scholes", "#444444", {}, {}};
  for (std::size_t i = 0; i < strikes.size(); ++i) {
    const double bs = bs_call_price(m.s0, strikes[i], m.r, m.sigma, m.maturity());
    const StripRow& a = strip_ddpm[i];
    const StripRow& b = strip_gbm[i];
    table.add_row()
        .num(cfg.strikes[i])
        .num(strikes[i])
        .num(bs)
        .num(m.sigma)
        .num(a.estimate.value)
        .num(a.estimate.std_error)
        .num(a.implied_vol.value_or(nan))
        .num(b.estimate.value)
        .num(b.estimate.std_error)
        .num(b.implied_vol.value_or(nan));
    auto ratio = [&](const PriceEstimate& e) {
      const double gap = std::abs(e.value - bs);
      return e.std_error > 0.0 ? gap / e.std_error : (gap > 1e-12 ? 1e300 : 0.0);
    };
    worst_ddpm = std::max(worst_ddpm, ratio(a.estimate));
    worst_gbm = std::max(worst_gbm, ratio(b.estimate));
    s_ddpm.x.push_back(cfg.strikes[i]);
    s_ddpm.y.push_back(a.implied_vol.value_or(nan));
    s_gbm.x.push_back(cfg.strikes[i]);
    s_gbm.y.push_back(b.implied_vol.value_or(nan));
    s_bs.x.push_back(cfg.strikes[i]);
    s_bs.y.push_back(m.sigma);
  }
  emit(res, dir, "smile.csv", table.str());
  if (cfg.svg) {
    SvgPlot plot;
    plot.title = "Implied volatility by strike";
    plot.x_label = "K / S0";
    plot.y_label = "implied volatility";
    plot.series = {s_bs, s_ddpm, s_gbm};
    emit(res, dir, "smile.svg", render_svg(plot));
  }
  res.metrics = {{"ddpm_max_se_gap", worst_ddpm}, {"gbm_max_se_gap", worst_gbm}};
  gate(res, "ddpm_within_3se_all_strikes", worst_ddpm <= 3.0, "max |C - BS| / SE = " + fmt(worst_ddpm));
  gate(res, "gbm_within_3se_all_strikes", worst_gbm <= 3.0, "max |C - BS| / SE = " + fmt(worst_gbm));
  return res;
}

CommandResult cmd_stress(const ExperimentConfig& cfg, std::ostream& log) {
  CommandResult res;
  const auto dir = prepare_out(cfg);
  const MarketParams& m = cfg.market;
  const NoisePredictor p = resolve_predictor(cfg, log);
  log << "sampling " << cfg.n_paths << " paths x " << m.horizon << " steps per mode\n";
  const PricePaths rn = ddpm_paths(p, risk_neutral(p, m), m, cfg.n_paths, cfg.seed);
  const PricePaths ns = ddpm_paths(p, physical(), m, cfg.n_paths, cfg.seed);

  CsvTable table({"moneyness", "strike", "bs_price", "rn_price", "rn_se", "no_shift_price", "no_shift_se"});
  double worst = 0.0;
  for (double mk : cfg.strikes) {
    const double k = mk * m.s0;
    const double bs = bs_call_price(m.s0, k, m.r, m.sigma, m.maturity());
    const PriceEstimate a = price_european(rn, k, m.r);
    const PriceEstimate b = price_european(ns, k, m.r);
    table.add_row().num(mk).num(k).num(bs).num(a.value).num(a.std_error).num(b.value).num(b.std_error);
    const double gap = std::abs(a.value - bs);
    worst = std::max(worst, a.std_error > 0.0 ? gap / a.std_error : (gap > 1e-12 ? 1e300 : 0.0));
  }
  emit(res, dir, "stress.csv", table.str());

  const double k = atm_strike(cfg);
  const double bs_atm = bs_call_price(m.s0, k, m.r, m.sigma, m.maturity());
  const double ns_atm = price_european(ns, k, m.r).value;
  const double ratio = ns_atm / bs_atm;
  res.metrics = {{"rn_max_se_gap", worst}, {"bs_atm_call", bs_atm}, {"no_shift_atm_call", ns_atm},
                 {"no_shift_atm_ratio", ratio}};
  gate(res, "rn_within_3se_all_strikes", worst <= 3.0, "max |C - BS| / SE = " + fmt(worst));
  gate(res, "no_shift_atm_ratio_above_1.4", ratio > 1.4, "no-shift / BS at the money = " + fmt(ratio));
  return res;
}

CommandResult cmd_asian(const ExperimentConfig& cfg, std::ostream& log) {
  CommandResult res;
  const auto dir = prepare_out(cfg);
  const NoisePredictor p = resolve_predictor(cfg, log);
  const SamplerConfig rn_cfg = risk_neutral(p, cfg.market);

  CsvTable table({"H", "moneyness", "strike", "ddpm_price", "ddpm_se", "gbm_price", "gbm_se", "err", "combined_se"});
  int cells = 0;
  int inside = 0;
  for (int H : cfg.asian_horizons) {
    MarketParams m = cfg.market;
    m.horizon = H;
    log << "sampling " << cfg.n_paths << " paths x " << H << " steps per method\n";
    const auto tag = static_cast<std::uint64_t>(H);
    const PricePaths ddpm = ddpm_paths(p, rn_cfg, m, cfg.n_paths, derive_seed(cfg.seed, tag));
    const PricePaths gbm = gbm_paths(m, Measure::Q, cfg.n_paths, derive_seed(derive_seed(cfg.seed, kGbmTag), tag));
    for (double mk : cfg.asian_strikes) {
      const double k = mk * m.s0;
      const PriceEstimate a = price_asian_arithmetic(ddpm, k, m.r);
      const PriceEstimate b = price_asian_arithmetic(gbm, k, m.r);
      const double se = combined_std_error(a, b);
      const double err = a.value - b.value;
      table.add_row().integer(H).num(mk).num(k).num(a.value).num(a.std_error).num(b.value).num(b.std_error).num(
          err).num(se);
      ++cells;
      if (std::abs(err) <= 3.0 * se) ++inside;
    }
  }
  emit(res, dir, "asian.csv", table.str());
  res.metrics = {{"cells", static_cast<double>(cells)}, {"cells_within_3se", static_cast<double>(inside)}};
  gate(res, "cells_within_3se", inside >= cells - 1,
       std::to_string(inside) + " of " + std::to_string(cells) + " cells within 3 combined SE");
  return res;
}

namespace {

using Handler = CommandResult (*)(const ExperimentConfig&, std::ostream&);

struct Command {
  const char* name;
  const char* help;
  Handler run;
};

constexpr Command kCommands[] = {
    {"train", "fit or persist the noise predictor and write model.txt", cmd_train},
    {"diagnose", "single-strike diagnostics and martingale curves for shifted and unshifted sampling", cmd_diagnose},
    {"smile", "multi-strike DDPM, GBM and Black-Scholes prices with implied volatilities", cmd_smile},
    {"stress", "Black-Scholes vs shifted and unshifted DDPM prices under a large drift gap", cmd_stress},
    {"asian", "arithmetic Asian calls over a horizon by strike grid, DDPM vs GBM", cmd_asian},
};

std::string summary_json(const std::string& command, const ExperimentConfig& cfg, const CommandResult& res) {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["passed"] = all_passed(res.gates);
  auto& gates = j["gates"] = nlohmann::ordered_json::array();
  for (const Gate& g : res.gates) gates.push_back({{"name", g.name}, {"passed", g.passed}, {"detail", g.detail}});
  auto& metrics = j["metrics"] = nlohmann::ordered_json::object();
  for (const auto& [name, value] : res.metrics) {
    if (std::isfinite(value)) {
      metrics[name] = value;
    } else {
      metrics[name] = nullptr;
    }
  }
  auto& config = j["config"] = nlohmann::ordered_json::object();
  for (const ConfigKey& k : config_keys()) config[k.name] = k.get(cfg);
  j["files"] = res.files;
  return j.dump(2) + "\n";
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Risk-neutral diffusion sampling of asset returns"};
  app.name("rndiff");
  app.require_subcommand(1);

  struct Parsed {
    std::string config_path;
    std::map<std::string, std::string> values;
  };
  std::map<std::string, Parsed> parsed;
  for (const Command& c : kCommands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    Parsed& slot = parsed[c.name];
    sub->add_option("--config", slot.config_path, "flat key = value file applied before flags");
    for (const ConfigKey& k : config_keys()) {
      const std::string preset = k.get(preset_for(c.name));
      sub->add_option("--" + k.name, slot.values[k.name], k.help + " [" + preset + "]");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const Command* chosen = nullptr;
  for (const Command& c : kCommands) {
    if (app.got_subcommand(c.name)) chosen = &c;
  }
  CLI::App* sub = app.get_subcommand(chosen->name);
  const Parsed& slot = parsed[chosen->name];

  ExperimentConfig cfg = preset_for(chosen->name);
  try {
    if (!slot.config_path.empty()) apply_config_file(cfg, slot.config_path);
    for (const ConfigKey& k : config_keys()) {
      if (sub->count("--" + k.name) > 0) apply_setting(cfg, k.name, slot.values.at(k.name));
    }
    cfg.validate();
  } catch (const std::exception& e) {
    std::cerr << "rndiff " << chosen->name << ": " << e.what() << "\n";
    return 2;
  }

  try {
    const CommandResult res = chosen->run(cfg, std::cerr);
    CommandResult full = res;
    full.files.push_back("summary.json");
    write_file_atomic((std::filesystem::path(cfg.out_dir) / "summary.json").string(),
                      summary_json(chosen->name, cfg, full));
    for (const Gate& g : res.gates) {
      std::cout << (g.passed ? "PASS " : "FAIL ") << g.name << ": " << g.detail << "\n";
    }
    for (const std::string& f : full.files) std::cout << "wrote " << (std::filesystem::path(cfg.out_dir) / f).string() << "\n";
    return all_passed(res.gates) ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "rndiff " << chosen->name << ": " << e.what() << "\n";
    return 1;
  }
}

}  // namespace rndiff::cli
