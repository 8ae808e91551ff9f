#include "cptquit/gamblers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cptquit/errors.hpp"
#include "cptquit/solver.hpp"
#include "detail.hpp"
#include "parallel.hpp"

namespace cptquit {

std::string_view to_string(AgentKind kind) {
  switch (kind) {
    case AgentKind::Precommitted: return "precommitted";
    case AgentKind::Naive: return "naive";
    case AgentKind::Sophisticated: return "sophisticated";
  }
  return "unknown";
}

std::string_view to_string(ExitPattern pattern) {
  switch (pattern) {
    case ExitPattern::NoEnter: return "no-enter";
    case ExitPattern::LossExit: return "loss-exit";
    case ExitPattern::GainExit: return "gain-exit";
  }
  return "unknown";
}

std::string_view to_string(Action action) {
  switch (action) {
    case Action::Stop: return "stop";
    case Action::Continue: return "continue";
    case Action::Randomize: return "randomize";
  }
  return "unknown";
}

namespace {

constexpr double kTieTol = 1e-12;
constexpr int kScalarGrid = 1001;
constexpr double kGoldenTol = 1e-10;

struct ScalarBest {
  double arg = 0.0;
  double value = 0.0;
};

// Maximises f over a sorted grid, scanning from the preferred end so ties go
// there, then refines by golden section between the winner's neighbours.
template <class F>
ScalarBest grid_then_golden(const F& f, const std::vector<double>& grid, bool prefer_high) {
  const std::size_t n = grid.size();
  std::size_t best = prefer_high ? n - 1 : 0;
  double best_value = f(grid[best]);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = prefer_high ? n - 1 - k : k;
    const double v = f(grid[i]);
    if (v > best_value + kTieTol) {
      best = i;
      best_value = v;
    }
  }
  double a = grid[best > 0 ? best - 1 : 0];
  double b = grid[best + 1 < n ? best + 1 : n - 1];
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > kGoldenTol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double g = 0.5 * (a + b);
  const double fg = f(g);
  if (fg > best_value + kTieTol) return {g, fg};
  return {grid[best], best_value};
}

std::vector<double> linear_grid(double lo, double hi) {
  std::vector<double> g(kScalarGrid);
  for (int k = 0; k < kScalarGrid; ++k) g[k] = lo + (hi - lo) * k / (kScalarGrid - 1);
  return g;
}

// Linear grid on [0, hi] merged with a log-spaced grid reaching down to 1e-12.
std::vector<double> mixed_grid(double hi) {
  std::vector<double> g = linear_grid(0.0, hi);
  const double lo = std::log(1e-12);
  for (int k = 0; k < kScalarGrid; ++k) g.push_back(std::exp(lo + (std::log(hi) - lo) * k / (kScalarGrid - 1)));
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

double utility_step(int n, Side side, const CptParams& params) {
  return utility(n, side, params) - utility(n - 1, side, params);
}

// w' strictly decreasing on a grid over (0, hi].
bool concave_on(double hi, Side side, const CptParams& params) {
  double prev = weight_derivative(hi * 1e-6, side, params);
  for (int k = 1; k < kScalarGrid; ++k) {
    const double d = weight_derivative(hi * k / (kScalarGrid - 1), side, params);
    if (!(d < prev)) return false;
    prev = d;
  }
  return true;
}

// Root in (0, 1/2) of w+'(a q + c) / w+'(a (1-q) + c) = ratio, where the left
// side decreases from above ratio to 1.
double bisect_ratio(const CptParams& params, double a, double c, double ratio) {
  auto h = [&](double q) {
    return weight_derivative(q * a + c, Side::Gain, params) / weight_derivative((1.0 - q) * a + c, Side::Gain, params) -
           ratio;
  };
  double lo = 0.0;
  double hi = 0.5;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (h(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double stop_value(int state, const CptParams& params) {
  const double one = 1.0;
  return detail::cpt_value_unchecked(std::span<const double>(&one, 1), state, params);
}

}  // namespace

AgentSolution precommitted(const CptParams& params, int horizon, int restarts, std::uint64_t seed) {
  SolveOptions options;
  options.restarts = restarts;
  options.seed = seed;
  const SolveResult result = solve_program(params, horizon, options);
  AgentSolution out;
  out.kind = AgentKind::Precommitted;
  out.tree = root_rule_to_tree(build_root_rule(result.mu, horizon));
  out.value = cpt_value(strategy_distribution(out.tree).first, params);
  return out;
}

AgentSolution naive(const CptParams& params, int horizon, int restarts, std::uint64_t seed) {
  params.validate();
  if (horizon < 1) throw ContractError("naive: horizon must be >= 1");
  std::vector<NodeDiagnostic> nodes;
  for (int t = 0; t < horizon; ++t) {
    for (int x = -t; x <= t; x += 2) nodes.push_back({t, x, 0.0, 0.0});
  }
  detail::parallel_for(nodes.size(), [&](std::size_t k) {
    NodeDiagnostic& node = nodes[k];
    SolveOptions options;
    options.restarts = restarts;
    options.seed = detail::derive_seed(seed, k);
    options.shift = node.x;
    const SolveResult sub = solve_program(params, horizon - node.t, options);
    node.value = sub.value;
    if (sub.value <= stop_value(node.x, params) + kTieTol) {
      node.stop_prob = 1.0;
    } else {
      node.stop_prob = sub.rule.barrier_at(0) == 0 ? sub.rule.stop_at(0) : 0.0;
    }
  });
  AgentSolution out;
  out.kind = AgentKind::Naive;
  out.tree = StrategyTree(horizon);
  for (const auto& node : nodes) out.tree.set_stop(node.t, node.x, node.stop_prob);
  out.value = cpt_value(strategy_distribution(out.tree).first, params);
  out.nodes = std::move(nodes);
  return out;
}

AgentSolution sophisticated(const CptParams& params, int horizon) {
  params.validate();
  if (horizon < 1) throw ContractError("sophisticated: horizon must be >= 1");
  const std::size_t width = 2 * static_cast<std::size_t>(horizon) + 1;
  auto slot = [horizon](int x) { return static_cast<std::size_t>(x + horizon); };
  // law[x + T]: conditional exit law from the node at the current layer.
  std::vector<std::vector<double>> next(width, std::vector<double>(width, 0.0));
  for (int x = -horizon; x <= horizon; x += 2) next[slot(x)][slot(x)] = 1.0;

  AgentSolution out;
  out.kind = AgentKind::Sophisticated;
  out.tree = StrategyTree(horizon);
  const std::vector<double> grid = linear_grid(0.0, 1.0);
  std::vector<NodeDiagnostic> all;
  for (int t = horizon - 1; t >= 0; --t) {
    std::vector<NodeDiagnostic> layer;
    for (int x = -t; x <= t; x += 2) layer.push_back({t, x, 0.0, 0.0});
    std::vector<std::vector<double>> current(width);
    detail::parallel_for(layer.size(), [&](std::size_t k) {
      NodeDiagnostic& node = layer[k];
      std::vector<double> cont(width);
      const auto& down = next[slot(node.x - 1)];
      const auto& up = next[slot(node.x + 1)];
      for (std::size_t i = 0; i < width; ++i) cont[i] = 0.5 * (down[i] + up[i]);
      std::vector<double> mix(width);
      auto value_at = [&](double r) {
        for (std::size_t i = 0; i < width; ++i) mix[i] = (1.0 - r) * cont[i];
        mix[slot(node.x)] += r;
        return detail::cpt_value_unchecked(mix, -horizon, params);
      };
      const ScalarBest best = grid_then_golden(value_at, grid, true);
      node.stop_prob = best.arg;
      node.value = best.value;
      for (std::size_t i = 0; i < width; ++i) cont[i] *= 1.0 - best.arg;
      cont[slot(node.x)] += best.arg;
      current[slot(node.x)] = std::move(cont);
    });
    for (const auto& node : layer) out.tree.set_stop(node.t, node.x, node.stop_prob);
    all.insert(all.begin(), layer.begin(), layer.end());
    for (int x = -t; x <= t; x += 2) next[slot(x)] = std::move(current[slot(x)]);
  }
  out.value = cpt_value(strategy_distribution(out.tree).first, params);
  out.nodes = std::move(all);
  return out;
}

ExitPattern classify_pattern(const StrategyTree& tree) {
  if (tree.stop(0, 0) >= 1.0 - kTieTol) return ExitPattern::NoEnter;
  const auto flow = strategy_distribution(tree).second;
  double losses = 0.0;
  double gains = 0.0;
  for (int t = 1; t < tree.horizon(); ++t) {
    for (int x = -t; x <= t; x += 2) (x < 0 ? losses : gains) += x == 0 ? 0.0 : flow.exit(t, x);
  }
  return losses >= gains ? ExitPattern::LossExit : ExitPattern::GainExit;
}

EntryDecision enter_one_bet(const CptParams& params) {
  params.validate();
  const double up = utility(1, Side::Gain, params);
  const double down = params.lambda * utility(1, Side::Loss, params);
  auto f = [&](double q) {
    return up * detail::weight_unchecked(q, params.delta_plus) - down * detail::weight_unchecked(q, params.delta_minus);
  };
  const ScalarBest best = grid_then_golden(f, mixed_grid(0.5), false);
  return {best.arg, best.value};
}

double one_more_round_gain(const CptParams& params, int horizon, double p_top) {
  params.validate();
  if (horizon < 1) throw ContractError("one_more_round_gain: horizon must be >= 1");
  if (!(p_top > 0.0 && p_top < 1.0)) throw ContractError("one_more_round_gain: p_T must lie in (0,1)");
  if (params.alpha_plus == 1.0) return 0.5;
  if (!concave_on(p_top, Side::Gain, params)) {
    throw InfeasibleError("one_more_round_gain: [0, " + std::to_string(p_top) +
                          "] is not inside the concave region of w+");
  }
  const double ratio = utility_step(horizon, Side::Gain, params) / utility_step(horizon + 1, Side::Gain, params);
  return bisect_ratio(params, p_top, 0.0, ratio);
}

double one_more_round_loss(const CptParams& params, int horizon, double p_bottom) {
  params.validate();
  if (horizon < 1) throw ContractError("one_more_round_loss: horizon must be >= 1");
  if (!(p_bottom > 0.0 && p_bottom < 1.0)) throw ContractError("one_more_round_loss: p_-T must lie in (0,1)");
  const double d = params.delta_minus;
  const double step_t = utility_step(horizon, Side::Loss, params);
  const double step_next = utility_step(horizon + 1, Side::Loss, params);
  const double at_stop = detail::weight_unchecked(p_bottom, d) * step_t;
  const double at_continue = detail::weight_unchecked(0.5 * p_bottom, d) * (step_next + step_t);
  return at_continue < at_stop - kTieTol ? 0.5 : 0.0;
}

double one_more_round_interior(const CptParams& params, int n, double p_n, double pbar_next) {
  params.validate();
  if (n < 1) throw ContractError("one_more_round_interior: state must be >= 1");
  if (!(p_n > 0.0 && pbar_next >= 0.0 && p_n + pbar_next <= 1.0)) {
    throw ContractError("one_more_round_interior: need p_n > 0, pbar_next >= 0, p_n + pbar_next <= 1");
  }
  if (params.alpha_plus == 1.0) return 0.5;
  if (!concave_on(p_n + pbar_next, Side::Gain, params)) {
    throw InfeasibleError("one_more_round_interior: [0, " + std::to_string(p_n + pbar_next) +
                          "] is not inside the concave region of w+");
  }
  const double ratio = utility_step(n, Side::Gain, params) / utility_step(n + 1, Side::Gain, params);
  const double at_zero = pbar_next == 0.0
                             ? INFINITY
                             : weight_derivative(pbar_next, Side::Gain, params) /
                                   weight_derivative(p_n + pbar_next, Side::Gain, params);
  if (!(at_zero > ratio)) return 0.0;
  return bisect_ratio(params, p_n, pbar_next, ratio);
}

LayerDecision t_minus_1_rules(const CptParams& params, int x) {
  params.validate();
  if (x == 0) throw ContractError("t_minus_1_rules: state must be nonzero");
  const std::vector<double> grid = linear_grid(0.0, 0.5);
  LayerDecision out;
  if (x > 0) {
    const double d = params.delta_plus;
    for (double p : grid) {
      const double slack = 1.0 - detail::weight_unchecked(1.0 - p, d) - detail::weight_unchecked(p, d);
      if (slack < -kTieTol) {
        throw InfeasibleError("t_minus_1_rules: w+ is not subcertain at p=" + std::to_string(p));
      }
    }
    const double hi = utility_step(x + 1, Side::Gain, params);
    const double lo = utility_step(x, Side::Gain, params);
    auto g = [&](double q) {
      return hi * detail::weight_unchecked(q, d) - lo * (1.0 - detail::weight_unchecked(1.0 - q, d));
    };
    out.q = 0.0;
    out.objective = g(0.0);
    for (double q : grid) {
      const double v = g(q);
      if (v > out.objective + kTieTol) {
        out.q = q;
        out.objective = v;
      }
    }
  } else {
    const int a = -x;
    const double d = params.delta_minus;
    for (std::size_t k = 1; k < grid.size(); ++k) {
      const double p = grid[k];
      const double r = weight_derivative(1.0 - p, Side::Loss, params) / weight_derivative(p, Side::Loss, params);
      if (r < 1.0 - 1e-9) {
        throw InfeasibleError("t_minus_1_rules: w-'(1-p)/w-'(p) < 1 at p=" + std::to_string(p));
      }
    }
    const double hi = utility_step(a + 1, Side::Loss, params);
    const double lo = utility_step(a, Side::Loss, params);
    auto l = [&](double q) {
      return hi * detail::weight_unchecked(q, d) - lo * (1.0 - detail::weight_unchecked(1.0 - q, d));
    };
    out.q = 0.0;
    out.objective = l(0.0);
    for (double q : grid) {
      const double v = l(q);
      if (v < out.objective - kTieTol) {
        out.q = q;
        out.objective = v;
      }
    }
  }
  out.action = out.q == 0.0 ? Action::Stop : (out.q == 0.5 ? Action::Continue : Action::Randomize);
  return out;
}

}  // namespace cptquit
