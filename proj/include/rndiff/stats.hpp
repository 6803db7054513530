#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>

namespace rndiff {

// Standard normal CDF. glibc's erfc is a rational-approximation implementation
// accurate to about 1 ulp, well inside the 1e-12 budget pricing needs; swap
// here if a platform's libm is worse.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x * std::numbers::sqrt2 * 0.5); }

inline double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

// Neumaier compensated summation. Results depend only on input order.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

struct SampleMoments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased (n - 1)
  std::size_t count = 0;

  double std_dev() const { return std::sqrt(variance); }
  double std_error() const { return count > 0 ? std::sqrt(variance / static_cast<double>(count)) : 0.0; }
};

// Two-pass mean and unbiased variance.
inline SampleMoments sample_moments(std::span<const double> xs) {
  SampleMoments m;
  m.count = xs.size();
  if (xs.empty()) return m;
  CompensatedSum sum;
  for (double x : xs) sum.add(x);
  m.mean = sum.value() / static_cast<double>(xs.size());
  if (xs.size() < 2) return m;
  CompensatedSum sq;
  for (double x : xs) sq.add((x - m.mean) * (x - m.mean));
  m.variance = sq.value() / static_cast<double>(xs.size() - 1);
  return m;
}

}  // namespace rndiff
