#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace rndiff {

// The three numbers that reproduce a linear schedule bit-exactly.
struct ScheduleParams {
  int steps = 100;
  double beta_start = 1e-4;
  double beta_end = 0.2;

  friend bool operator==(const ScheduleParams&, const ScheduleParams&) = default;
};

// Linear DDPM noise schedule. Diffusion time is 1-based: t = 1..T, with
// alpha_bar(0) == 1 so beta_tilde(1) == 0. Immutable after construction.
class DiffusionSchedule {
 public:
  explicit DiffusionSchedule(const ScheduleParams& params);
  static DiffusionSchedule linear(int steps, double beta_start, double beta_end) {
    return DiffusionSchedule(ScheduleParams{steps, beta_start, beta_end});
  }

  int steps() const { return params_.steps; }
  const ScheduleParams& params() const { return params_; }

  double beta(int t) const { return beta_[index(t)]; }
  double alpha(int t) const { return alpha_[index(t)]; }
  double alpha_bar(int t) const { return t == 0 ? 1.0 : alpha_bar_[index(t)]; }
  // Posterior variance ((1 - alpha_bar(t-1)) / (1 - alpha_bar(t))) * beta(t).
  double beta_tilde(int t) const { return beta_tilde_[index(t)]; }

  // "T=..\nbeta_start=..\nbeta_end=..\n" with round-trip exact doubles.
  std::string to_record() const;
  static DiffusionSchedule from_record(std::string_view text);

  friend bool operator==(const DiffusionSchedule& a, const DiffusionSchedule& b) { return a.params_ == b.params_; }

 private:
  std::size_t index(int t) const;

  ScheduleParams params_;
  std::vector<double> beta_;
  std::vector<double> alpha_;
  std::vector<double> alpha_bar_;
  std::vector<double> beta_tilde_;
};

// Per-step offsets that move the learned physical-measure score onto the
// risk-neutral one. Arrays are indexed by t - 1.
struct ShiftConstants {
  ScheduleParams schedule;
  double v0 = 1.0;
  double mean_gap = 0.0;
  std::vector<double> sigma_sq;  // alpha_bar * v0 + (1 - alpha_bar)
  std::vector<double> eta;       // score offset sqrt(alpha_bar) * mean_gap / sigma_sq
  std::vector<double> delta;     // noise offset eta * sqrt(1 - alpha_bar)

  double eta_at(int t) const { return eta.at(static_cast<std::size_t>(t - 1)); }
  double delta_at(int t) const { return delta.at(static_cast<std::size_t>(t - 1)); }
};

// Throws std::invalid_argument when v0 <= 0.
ShiftConstants shift_constants(const DiffusionSchedule& sched, double v0, double mean_gap);

}  // namespace rndiff
