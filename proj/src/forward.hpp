#pragma once

#include <span>
#include <vector>

#include "cptquit/root_embedding.hpp"

namespace cptquit::detail {

/// Exit law of a dense stop table laid out as in StrategyTree (row t holds
/// states -T..T). Writes 2T+1 masses; `scratch` is reused between calls.
void forward_exit(std::span<const double> stop, int horizon, std::span<double> exit_mass,
                  std::vector<double>& scratch);

/// Root rule built from the evolutional sequence without the embeddability
/// check; the resulting tree is valid for any law on [-T, T].
RootRule root_rule_unchecked(const ExitDistribution& mu, int horizon);

}  // namespace cptquit::detail
