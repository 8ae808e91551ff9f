#pragma once

#include <cstdint>

#include "cptquit/preferences.hpp"
#include "cptquit/root_embedding.hpp"

namespace cptquit {

struct OracleResult {
  double value = 0.0;
  StrategyTree tree;
  std::uint64_t candidates = 0;
};

/// Largest horizon accepted by exhaustive_markov.
inline constexpr int kMaxExhaustiveHorizon = 6;

/// Default cap on grid_randomized candidates.
inline constexpr double kDefaultGridBudget = 1e8;

/// Best non-randomized Markovian tree by full enumeration. Interior nodes are
/// ordered by t descending, then x ascending; node k is bit k of the candidate
/// index and ties keep the smallest index.
OracleResult exhaustive_markov(const CptParams& params, int horizon);

/// Best tree whose interior stop probabilities lie on {0, step, ..., 1}.
/// Candidates are enumerated in mixed radix over the same node order (node 0
/// is the least significant digit); ties keep the smallest index. Throws
/// ContractError when 1/step is not an integer or the candidate count exceeds
/// `budget`.
OracleResult grid_randomized(const CptParams& params, int horizon, double step, double budget = kDefaultGridBudget);

}  // namespace cptquit
