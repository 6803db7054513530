#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace rndiff {

enum class Measure { P, Q };

const char* measure_name(Measure m);

// n_paths x (H + 1) prices with the n_paths x H log-returns that built them.
// prices(i, 0) == s0 and prices(i, h) == prices(i, h - 1) * exp(returns(i, h - 1)).
struct PricePaths {
  double s0 = 100.0;
  double dt = 1.0 / 252.0;
  std::size_t n_paths = 0;
  int horizon = 0;
  Measure measure = Measure::Q;
  std::string generator;  // "gbm", "ddpm-rn", "ddpm-physical", ...
  std::uint64_t seed = 0;
  std::uint64_t params_hash = 0;
  std::vector<double> prices;   // row-major
  std::vector<double> returns;  // row-major

  double price(std::size_t path, int step) const { return prices[path * stride() + static_cast<std::size_t>(step)]; }
  double log_return(std::size_t path, int step) const {
    return returns[path * static_cast<std::size_t>(horizon) + static_cast<std::size_t>(step)];
  }
  std::span<const double> path(std::size_t i) const { return {prices.data() + i * stride(), stride()}; }
  double terminal(std::size_t i) const { return price(i, horizon); }
  double time(int step) const { return step * dt; }
  std::size_t stride() const { return static_cast<std::size_t>(horizon) + 1; }
};

// Fills `out` with one log-return per entry; entry i must come from substream
// first_stream + i of `seed`.
using ReturnSampler = std::function<void(std::uint64_t seed, std::uint64_t first_stream, std::span<double> out)>;

struct PathMeta {
  double s0 = 100.0;
  double dt = 1.0 / 252.0;
  int horizon = 0;
  Measure measure = Measure::Q;
  std::string generator;
  std::uint64_t params_hash = 0;
};

// Calendar step h (1-based) draws its batch from substreams substream(h-1, i).
PricePaths build_paths(const ReturnSampler& sampler, const PathMeta& meta, std::size_t n_paths, std::uint64_t seed);

// One row per path. Two header lines: "# seed=.. measure=.. generator=..
// params_hash=.. s0=.. dt=.." then "path,S_0,...,S_H". Prices are written in
// shortest round-trip form.
void write_paths_csv(std::ostream& out, const PricePaths& paths);

}  // namespace rndiff
