#include "rndiff/schedule.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "rndiff/format.hpp"

namespace rndiff {

DiffusionSchedule::DiffusionSchedule(const ScheduleParams& params) : params_(params) {
  const int T = params.steps;
  if (T < 1) throw std::invalid_argument("schedule: step count must be >= 1");
  if (!(params.beta_start > 0.0 && params.beta_start < 1.0) || !(params.beta_end > 0.0 && params.beta_end < 1.0)) {
    throw std::invalid_argument("schedule: betas must lie in (0, 1)");
  }
  if (params.beta_start > params.beta_end) throw std::invalid_argument("schedule: beta_start must not exceed beta_end");

  const auto n = static_cast<std::size_t>(T);
  beta_.resize(n);
  alpha_.resize(n);
  alpha_bar_.resize(n);
  beta_tilde_.resize(n);
  double prev_bar = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double frac = T == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(T - 1);
    beta_[i] = params.beta_start + (params.beta_end - params.beta_start) * frac;
    alpha_[i] = 1.0 - beta_[i];
    alpha_bar_[i] = prev_bar * alpha_[i];
    beta_tilde_[i] = (1.0 - prev_bar) / (1.0 - alpha_bar_[i]) * beta_[i];
    prev_bar = alpha_bar_[i];
  }
}

std::size_t DiffusionSchedule::index(int t) const {
  if (t < 1 || t > params_.steps) throw std::out_of_range("schedule: diffusion step out of range");
  return static_cast<std::size_t>(t - 1);
}

std::string DiffusionSchedule::to_record() const {
  std::string out;
  out += "T=" + std::to_string(params_.steps) + "\n";
  out += "beta_start=" + format_exact(params_.beta_start) + "\n";
  out += "beta_end=" + format_exact(params_.beta_end) + "\n";
  return out;
}

DiffusionSchedule DiffusionSchedule::from_record(std::string_view text) {
  ScheduleParams p;
  bool seen_t = false, seen_start = false, seen_end = false;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("schedule record: malformed line '" + line + "'");
    const std::string key = line.substr(0, eq);
    const std::string_view value = std::string_view(line).substr(eq + 1);
    if (key == "T") {
      p.steps = static_cast<int>(parse_integer(value));
      seen_t = true;
    } else if (key == "beta_start") {
      p.beta_start = parse_double(value);
      seen_start = true;
    } else if (key == "beta_end") {
      p.beta_end = parse_double(value);
      seen_end = true;
    } else {
      throw std::invalid_argument("schedule record: unknown key '" + key + "'");
    }
  }
  if (!(seen_t && seen_start && seen_end)) throw std::invalid_argument("schedule record: missing key");
  return DiffusionSchedule(p);
}

ShiftConstants shift_constants(const DiffusionSchedule& sched, double v0, double mean_gap) {
  if (!(v0 > 0.0)) throw std::invalid_argument("shift_constants: v0 must be positive");
  ShiftConstants s;
  s.schedule = sched.params();
  s.v0 = v0;
  s.mean_gap = mean_gap;
  const auto n = static_cast<std::size_t>(sched.steps());
  s.sigma_sq.resize(n);
  s.eta.resize(n);
  s.delta.resize(n);
  for (int t = 1; t <= sched.steps(); ++t) {
    const auto i = static_cast<std::size_t>(t - 1);
    const double ab = sched.alpha_bar(t);
    // Equals ab * v0 + (1 - ab); this form is exactly 1 when v0 == 1.
    s.sigma_sq[i] = 1.0 + ab * (v0 - 1.0);
    s.eta[i] = std::sqrt(ab) / s.sigma_sq[i] * mean_gap;
    s.delta[i] = s.eta[i] * std::sqrt(1.0 - ab);
  }
  return s;
}

}  // namespace rndiff
