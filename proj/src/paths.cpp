#include "rndiff/paths.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "rndiff/format.hpp"
#include "rndiff/rng.hpp"

namespace rndiff {

const char* measure_name(Measure m) { return m == Measure::P ? "P" : "Q"; }

PricePaths build_paths(const ReturnSampler& sampler, const PathMeta& meta, std::size_t n_paths, std::uint64_t seed) {
  if (n_paths < 1) throw std::invalid_argument("build_paths: need at least one path");
  if (meta.horizon < 0) throw std::invalid_argument("build_paths: negative horizon");
  if (!(meta.s0 > 0.0)) throw std::invalid_argument("build_paths: s0 must be positive");

  PricePaths paths;
  paths.s0 = meta.s0;
  paths.dt = meta.dt;
  paths.n_paths = n_paths;
  paths.horizon = meta.horizon;
  paths.measure = meta.measure;
  paths.generator = meta.generator;
  paths.seed = seed;
  paths.params_hash = meta.params_hash;

  const auto H = static_cast<std::size_t>(meta.horizon);
  paths.prices.assign(n_paths * (H + 1), 0.0);
  paths.returns.assign(n_paths * H, 0.0);

  std::vector<double> batch(n_paths);
  for (std::size_t h = 0; h < H; ++h) {
    sampler(seed, substream(h, 0), batch);
    for (std::size_t i = 0; i < n_paths; ++i) paths.returns[i * H + h] = batch[i];
  }
  for (std::size_t i = 0; i < n_paths; ++i) {
    double* row = paths.prices.data() + i * (H + 1);
    row[0] = meta.s0;
    for (std::size_t h = 1; h <= H; ++h) row[h] = row[h - 1] * std::exp(paths.returns[i * H + h - 1]);
  }
  return paths;
}

void write_paths_csv(std::ostream& out, const PricePaths& paths) {
  out << "# seed=" << paths.seed << " measure=" << measure_name(paths.measure) << " generator=" << paths.generator
      << " params_hash=" << std::hex << paths.params_hash << std::dec << " s0=" << format_exact(paths.s0)
      << " dt=" << format_exact(paths.dt) << "\n";
  out << "path";
  for (int h = 0; h <= paths.horizon; ++h) out << ",S_" << h;
  out << "\n";
  for (std::size_t i = 0; i < paths.n_paths; ++i) {
    out << i;
    for (double s : paths.path(i)) out << ',' << format_exact(s);
    out << "\n";
  }
}

}  // namespace rndiff
