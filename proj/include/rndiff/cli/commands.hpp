#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "rndiff/cli/config.hpp"
#include "rndiff/cli/output.hpp"
#include "rndiff/predictor.hpp"

namespace rndiff::cli {

struct CommandResult {
  std::vector<Gate> gates;
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<std::string> files;  // written, relative to the output directory
};

// Resolves the configured predictor source for cfg.market. Training progress
// and the held-out gate go to `log`; training failures propagate.
NoisePredictor resolve_predictor(const ExperimentConfig& cfg, std::ostream& log);

CommandResult cmd_train(const ExperimentConfig& cfg, std::ostream& log);
CommandResult cmd_diagnose(const ExperimentConfig& cfg, std::ostream& log);
CommandResult cmd_smile(const ExperimentConfig& cfg, std::ostream& log);
CommandResult cmd_stress(const ExperimentConfig& cfg, std::ostream& log);
CommandResult cmd_asian(const ExperimentConfig& cfg, std::ostream& log);

// Full command-line entry point; returns the process exit code.
// 0 when every gate passes, 1 on a failed gate or runtime error, 2 on usage errors.
int run(int argc, const char* const* argv);

}  // namespace rndiff::cli
