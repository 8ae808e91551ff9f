#include "cptquit/simulate.hpp"

#include <cmath>

#include "cptquit/errors.hpp"
#include "detail.hpp"
#include "parallel.hpp"

namespace cptquit {

namespace {

struct SplitMix64 {
  std::uint64_t state;

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

}  // namespace

SimReport simulate(const StrategyTree& tree, const CptParams& params, std::uint64_t paths, std::uint64_t seed) {
  params.validate();
  tree.validate();
  if (paths < 1) throw ContractError("simulate: paths must be >= 1");
  const int horizon = tree.horizon();
  const std::size_t width = 2 * static_cast<std::size_t>(horizon) + 1;
  const std::size_t chunks = static_cast<std::size_t>(std::min<std::uint64_t>(paths, 64));
  std::vector<std::vector<std::uint64_t>> partial(chunks, std::vector<std::uint64_t>(width, 0));
  detail::parallel_for(chunks, [&](std::size_t c) {
    auto& counts = partial[c];
    const std::uint64_t begin = paths * c / chunks;
    const std::uint64_t end = paths * (c + 1) / chunks;
    for (std::uint64_t i = begin; i < end; ++i) {
      SplitMix64 rng{detail::derive_seed(seed, i)};
      int x = 0;
      for (int t = 0; t < horizon; ++t) {
        const double s = tree.stop(t, x);
        if (s >= 1.0 || (s > 0.0 && rng.uniform() < s)) break;
        x += (rng.next() >> 63) != 0 ? 1 : -1;
      }
      ++counts[static_cast<std::size_t>(x + horizon)];
    }
  });

  SimReport report;
  report.paths = paths;
  report.seed = seed;
  report.horizon = horizon;
  report.counts.assign(width, 0);
  for (const auto& part : partial) {
    for (std::size_t i = 0; i < width; ++i) report.counts[i] += part[i];
  }
  report.empirical = ExitDistribution(horizon);
  report.std_error.assign(width, 0.0);
  const double n = static_cast<double>(paths);
  for (std::size_t i = 0; i < width; ++i) {
    const double p = static_cast<double>(report.counts[i]) / n;
    report.empirical.at(static_cast<int>(i) - horizon) = p;
    report.std_error[i] = std::sqrt(p * (1.0 - p) / n);
  }
  report.cpt_value = cpt_value(report.empirical, params);
  return report;
}

}  // namespace cptquit
