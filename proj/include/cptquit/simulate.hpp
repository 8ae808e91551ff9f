#pragma once

#include <cstdint>
#include <vector>

#include "cptquit/preferences.hpp"
#include "cptquit/root_embedding.hpp"

namespace cptquit {

struct SimReport {
  std::uint64_t paths = 0;
  std::uint64_t seed = 0;
  int horizon = 0;
  std::vector<std::uint64_t> counts;  // exits per state, indexed x + T
  ExitDistribution empirical;         // counts / paths
  std::vector<double> std_error;      // sqrt(p (1 - p) / paths) per state
  double cpt_value = 0.0;             // CPT of the empirical law

  bool operator==(const SimReport&) const = default;
};

/// Plays `paths` walks under the tree. Path i draws from its own SplitMix64
/// stream keyed by (seed, i), so results do not depend on the worker count.
SimReport simulate(const StrategyTree& tree, const CptParams& params, std::uint64_t paths, std::uint64_t seed);

}  // namespace cptquit
