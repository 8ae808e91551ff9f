#include "cptquit/oracle.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "cptquit/errors.hpp"
#include "detail.hpp"
#include "forward.hpp"
#include "parallel.hpp"

namespace cptquit {

namespace {

// Dense offsets of the interior nodes, t descending then x ascending.
std::vector<std::size_t> interior_order(int horizon) {
  const std::size_t width = 2 * static_cast<std::size_t>(horizon) + 1;
  std::vector<std::size_t> order;
  for (int t = horizon - 1; t >= 0; --t) {
    for (int x = -t; x <= t; x += 2) order.push_back(static_cast<std::size_t>(t) * width + static_cast<std::size_t>(x + horizon));
  }
  return order;
}

struct Candidate {
  double value = 0.0;
  std::uint64_t index = 0;
  bool found = false;
};

// Enumerates candidate indices [0, count) where decode(index, stop) fills the
// interior entries; exact max with ties to the smallest index.
template <class Decode>
Candidate search(const CptParams& params, int horizon, std::uint64_t count, const Decode& decode) {
  const std::size_t width = 2 * static_cast<std::size_t>(horizon) + 1;
  const std::size_t chunks = std::min<std::uint64_t>(count, 256);
  std::vector<Candidate> best(chunks);
  detail::parallel_for(chunks, [&](std::size_t c) {
    const std::uint64_t begin = count * c / chunks;
    const std::uint64_t end = count * (c + 1) / chunks;
    StrategyTree base(horizon);
    std::vector<double> stop(base.raw().begin(), base.raw().end());
    std::vector<double> exit_mass(width);
    std::vector<double> scratch;
    Candidate local;
    for (std::uint64_t i = begin; i < end; ++i) {
      decode(i, stop);
      detail::forward_exit(stop, horizon, exit_mass, scratch);
      const double v = detail::cpt_value_unchecked(exit_mass, -horizon, params);
      if (!local.found || v > local.value) local = {v, i, true};
    }
    best[c] = local;
  });
  Candidate out;
  for (const auto& b : best) {
    if (b.found && (!out.found || b.value > out.value)) out = b;
  }
  return out;
}

OracleResult finish(int horizon, std::uint64_t count, const Candidate& best,
                    const std::vector<std::size_t>& order, const std::vector<double>& levels) {
  OracleResult out;
  out.value = best.value;
  out.candidates = count;
  out.tree = StrategyTree(horizon);
  const std::size_t width = 2 * static_cast<std::size_t>(horizon) + 1;
  std::uint64_t rest = best.index;
  for (std::size_t offset : order) {
    const int t = static_cast<int>(offset / width);
    const int x = static_cast<int>(offset % width) - horizon;
    out.tree.set_stop(t, x, levels[rest % levels.size()]);
    rest /= levels.size();
  }
  return out;
}

}  // namespace

OracleResult exhaustive_markov(const CptParams& params, int horizon) {
  params.validate();
  if (horizon < 1) throw ContractError("exhaustive_markov: horizon must be >= 1");
  const int nodes = horizon * (horizon + 1) / 2;
  if (horizon > kMaxExhaustiveHorizon) {
    std::ostringstream msg;
    msg << "exhaustive_markov: horizon " << horizon << " needs 2^" << nodes << " ~ " << std::ldexp(1.0, nodes)
        << " candidates; the limit is horizon " << kMaxExhaustiveHorizon;
    throw ContractError(msg.str());
  }
  const auto order = interior_order(horizon);
  const std::uint64_t count = std::uint64_t{1} << nodes;
  const Candidate best = search(params, horizon, count, [&order](std::uint64_t i, std::vector<double>& stop) {
    for (std::size_t k = 0; k < order.size(); ++k) stop[order[k]] = static_cast<double>((i >> k) & 1U);
  });
  return finish(horizon, count, best, order, {0.0, 1.0});
}

OracleResult grid_randomized(const CptParams& params, int horizon, double step, double budget) {
  params.validate();
  if (horizon < 1) throw ContractError("grid_randomized: horizon must be >= 1");
  if (!(step > 0.0 && step <= 1.0)) throw ContractError("grid_randomized: step must lie in (0,1]");
  const double divisions = 1.0 / step;
  const double rounded = std::round(divisions);
  if (std::abs(divisions - rounded) > 1e-9 * rounded) {
    throw ContractError("grid_randomized: 1/step must be an integer");
  }
  const auto levels_count = static_cast<std::uint64_t>(rounded) + 1;
  const int nodes = horizon * (horizon + 1) / 2;
  const double estimate = std::pow(static_cast<double>(levels_count), nodes);
  if (estimate > budget) {
    std::ostringstream msg;
    msg << "grid_randomized: " << levels_count << "^" << nodes << " ~ " << estimate
        << " candidates exceed the budget of " << budget;
    throw ContractError(msg.str());
  }
  std::vector<double> levels(levels_count);
  for (std::uint64_t k = 0; k < levels_count; ++k) {
    levels[k] = static_cast<double>(k) / static_cast<double>(levels_count - 1);
  }
  const auto order = interior_order(horizon);
  const auto count = static_cast<std::uint64_t>(estimate + 0.5);
  const Candidate best = search(params, horizon, count, [&](std::uint64_t i, std::vector<double>& stop) {
    for (std::size_t offset : order) {
      stop[offset] = levels[i % levels_count];
      i /= levels_count;
    }
  });
  return finish(horizon, count, best, order, levels);
}

}  // namespace cptquit
