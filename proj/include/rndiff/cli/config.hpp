#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rndiff/market.hpp"
#include "rndiff/predictor.hpp"
#include "rndiff/schedule.hpp"

namespace rndiff::cli {

enum class PredictorSource { Oracle, Train, Load };

struct ExperimentConfig {
  MarketParams market;
  ScheduleParams schedule;
  TrainingConfig training;
  std::size_t n_paths = 20000;
  std::uint64_t seed = 20240601;
  std::vector<double> strikes;  // moneyness, K / s0
  PredictorSource predictor = PredictorSource::Oracle;
  std::string model_path;  // for PredictorSource::Load
  std::string out_dir = "out";
  std::size_t ks_paths = 1000;
  std::vector<int> asian_horizons{21, 63, 126};
  std::vector<double> asian_strikes{0.9, 1.0, 1.1};
  bool svg = true;

  // Throws std::invalid_argument on any out-of-domain field.
  void validate() const;
};

// r solving BS(100, 100, r, 0.2, 21/252) = 2.51, the at-the-money quote
// that pins down the baseline rate.
double baseline_rate();

// Starting point for each command before the config file and flags apply.
ExperimentConfig baseline_config();
ExperimentConfig stress_config();
ExperimentConfig preset_for(const std::string& command);

struct ConfigKey {
  std::string name;
  std::string help;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

// Every key accepted in a config file; each is also a --flag of the same name.
const std::vector<ConfigKey>& config_keys();

// Throws std::invalid_argument for unknown keys or unparsable values.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);

// Flat "key = value" lines; '#' starts a comment, blank lines are skipped.
void apply_config_text(ExperimentConfig& cfg, const std::string& text, const std::string& origin = "config");
void apply_config_file(ExperimentConfig& cfg, const std::string& path);

// One "key = value" line per key, in config_keys() order; parses back to an
// identical config.
std::string render_config(const ExperimentConfig& cfg);

}  // namespace rndiff::cli
