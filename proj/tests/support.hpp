#pragma once

// Checks shared by the unit tests and the acceptance binary.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "rndiff/mlp.hpp"
#include "rndiff/predictor.hpp"
#include "rndiff/rng.hpp"
#include "rndiff/schedule.hpp"

namespace rndiff::testing {

// Largest |oracle_predict - (-sqrt(1 - abar) * score_fd)| over y on an
// n_y-point grid spanning +-5 standard deviations of Y_t and every t, where
// score_fd is a central difference of the Gaussian log-density of Y_t.
inline double oracle_score_gap(double m, double v0, const DiffusionSchedule& sched, int n_y = 41) {
  double worst = 0.0;
  for (int t = 1; t <= sched.steps(); ++t) {
    const double ab = sched.alpha_bar(t);
    const double mean = std::sqrt(ab) * m;
    const double var = ab * v0 + (1.0 - ab);
    const double sd = std::sqrt(var);
    auto log_density = [&](double y) {
      return -0.5 * (y - mean) * (y - mean) / var - 0.5 * std::log(2.0 * std::numbers::pi * var);
    };
    const double h = 1e-5 * sd;
    for (int i = 0; i < n_y; ++i) {
      const double y = mean + sd * (-5.0 + 10.0 * i / (n_y - 1));
      const double score = (log_density(y + h) - log_density(y - h)) / (2.0 * h);
      const double expected = -std::sqrt(1.0 - ab) * score;
      worst = std::max(worst, std::abs(oracle_predict(m, v0, sched, y, t) - expected));
    }
  }
  return worst;
}

struct GradientCheck {
  double worst_relative = 0.0;
  int directions = 0;
};

// Compares the backpropagated gradient with central differences of the
// forward-pass loss along `directions` random unit directions in weight space.
inline GradientCheck gradient_check(int width, std::uint64_t seed, int directions = 100, int batch = 64,
                                    int steps = 100) {
  Mlp net(width);
  net.init_uniform(seed);
  CounterRng rng(derive_seed(seed, 1), 0);
  std::vector<double> y(static_cast<std::size_t>(batch));
  std::vector<int> t(static_cast<std::size_t>(batch));
  std::vector<double> target(static_cast<std::size_t>(batch));
  for (int i = 0; i < batch; ++i) {
    y[static_cast<std::size_t>(i)] = 2.0 * rng.normal();
    t[static_cast<std::size_t>(i)] = 1 + static_cast<int>(rng.uniform() * steps) % steps;
    target[static_cast<std::size_t>(i)] = rng.normal();
  }
  Eigen::VectorXd grad;
  net.loss_and_gradient(y, t, target, grad);

  GradientCheck out;
  const Eigen::VectorXd theta = net.parameters();
  const double h = 1e-5;
  for (int k = 0; k < directions; ++k) {
    Eigen::VectorXd d(theta.size());
    for (Eigen::Index i = 0; i < d.size(); ++i) d[i] = rng.normal();
    d.normalize();
    net.parameters() = theta + h * d;
    const double up = net.loss(y, t, target);
    net.parameters() = theta - h * d;
    const double down = net.loss(y, t, target);
    const double fd = (up - down) / (2.0 * h);
    const double analytic = grad.dot(d);
    const double rel = std::abs(fd - analytic) / std::max({std::abs(fd), std::abs(analytic), 1e-8});
    out.worst_relative = std::max(out.worst_relative, rel);
    ++out.directions;
  }
  net.parameters() = theta;
  return out;
}

// Mean |trained - oracle(0, 1)| over y in [-4, 4] (81 points) and every t.
inline double grid_mad(const NoisePredictor& p) {
  const DiffusionSchedule& sched = p.schedule();
  std::vector<double> ys(81);
  for (int i = 0; i < 81; ++i) ys[static_cast<std::size_t>(i)] = -4.0 + 0.1 * i;
  std::vector<double> pred(ys.size());
  double sum = 0.0;
  for (int t = 1; t <= sched.steps(); ++t) {
    p.predict_batch(ys, t, pred);
    for (std::size_t i = 0; i < ys.size(); ++i) sum += std::abs(pred[i] - oracle_predict(0.0, 1.0, sched, ys[i], t));
  }
  return sum / static_cast<double>(ys.size() * static_cast<std::size_t>(sched.steps()));
}

}  // namespace rndiff::testing
