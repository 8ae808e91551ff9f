#include "cptquit/root_embedding.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>

#include "cptquit/errors.hpp"
#include "forward.hpp"

namespace cptquit {

StrategyTree::StrategyTree(int horizon) : horizon_(horizon) {
  if (horizon < 0) throw ContractError("StrategyTree: negative horizon");
  stop_.assign(static_cast<std::size_t>(horizon + 1) * static_cast<std::size_t>(2 * horizon + 1),
               0.0);
  for (int x = -horizon; x <= horizon; x += 2) stop_[index(horizon, x)] = 1.0;
}

StrategyTree StrategyTree::stop_at_root(int horizon) {
  StrategyTree tree(horizon);
  tree.set_stop(0, 0, 1.0);
  return tree;
}

double StrategyTree::stop(int t, int x) const {
  if (t < 0 || t > horizon_ || !is_node(t, x)) {
    throw ContractError("StrategyTree: (" + std::to_string(t) + "," + std::to_string(x) +
                        ") is not a tree node");
  }
  return stop_[index(t, x)];
}

void StrategyTree::set_stop(int t, int x, double p) {
  if (t < 0 || t > horizon_ || !is_node(t, x)) {
    throw ContractError("StrategyTree: (" + std::to_string(t) + "," + std::to_string(x) +
                        ") is not a tree node");
  }
  if (!(p >= 0.0 && p <= 1.0)) throw ContractError("StrategyTree: stop probability outside [0,1]");
  if (t == horizon_ && p != 1.0) throw ContractError("StrategyTree: terminal nodes must stop");
  stop_[index(t, x)] = p;
}

void StrategyTree::validate() const {
  for (int t = 0; t <= horizon_; ++t) {
    for (int x = -t; x <= t; x += 2) {
      const double p = stop_[index(t, x)];
      if (!(p >= 0.0 && p <= 1.0)) {
        throw ContractError("StrategyTree: stop probability outside [0,1] at (" +
                            std::to_string(t) + "," + std::to_string(x) + ")");
      }
      if (t == horizon_ && p != 1.0) throw ContractError("StrategyTree: terminal node must stop");
    }
  }
}

NodeFlow::NodeFlow(int horizon) : horizon_(horizon) {
  const auto n = static_cast<std::size_t>(horizon + 1) * static_cast<std::size_t>(2 * horizon + 1);
  reach_.assign(n, 0.0);
  exit_.assign(n, 0.0);
}

// ---------------------------------------------------------------------------

RootRule build_root_rule(const ExitDistribution& mu, int horizon) {
  const EmbeddabilityCertificate cert = is_embeddable(mu, horizon);
  if (!cert.embeddable) {
    std::ostringstream msg;
    msg << "law cannot be embedded by horizon " << horizon << "; violated states:";
    for (const auto& v : cert.violations) msg << " " << v.state << " (slack " << v.slack << ")";
    throw InfeasibleError(msg.str());
  }
  return detail::root_rule_unchecked(mu, horizon);
}

namespace detail {

RootRule root_rule_unchecked(const ExitDistribution& mu, int horizon) {
  const EvolutionSeq seq = evolutional_sequence(mu, horizon);
  RootRule rule;
  rule.horizon = horizon;
  rule.barrier.assign(2 * static_cast<std::size_t>(horizon) + 1, horizon);
  rule.stop_prob.assign(2 * static_cast<std::size_t>(horizon) + 1, 1.0);
  for (int x = -horizon; x <= horizon; ++x) {
    const std::size_t i = static_cast<std::size_t>(x + horizon);
    int b = horizon;
    for (int t = std::abs(x); t < horizon; ++t) {
      if (std::abs(seq.layers[static_cast<std::size_t>(t + 1)](x) - seq.target(x)) <= kPotentialTol) {
        b = t;
        break;
      }
    }
    // The parity freeze of the evolution puts the first hit on t = x (mod 2);
    // guard against tolerance effects.
    if ((b - x) % 2 != 0) b = std::max(std::abs(x), b - 1);
    rule.barrier[i] = b;
    if (b >= horizon) {
      rule.stop_prob[i] = 1.0;
      continue;
    }
    const Potential& layer = seq.layers[static_cast<std::size_t>(b)];
    const double around = layer(x - 1) + layer(x + 1);
    const double denom = around - 2.0 * layer(x);
    if (denom <= 1e-12) {
      rule.stop_prob[i] = 1.0;
    } else {
      rule.stop_prob[i] = std::clamp((around - 2.0 * seq.target(x)) / denom, 0.0, 1.0);
    }
  }
  return rule;
}

}  // namespace detail

StrategyTree root_rule_to_tree(const RootRule& rule) {
  StrategyTree tree(rule.horizon);
  for (int t = 0; t < rule.horizon; ++t) {
    for (int x = -t; x <= t; x += 2) {
      const int b = rule.barrier_at(x);
      tree.set_stop(t, x, t < b ? 0.0 : (t == b ? rule.stop_at(x) : 1.0));
    }
  }
  return tree;
}

std::pair<ExitDistribution, NodeFlow> strategy_distribution(const StrategyTree& tree) {
  tree.validate();
  const int horizon = tree.horizon();
  NodeFlow flow(horizon);
  ExitDistribution dist(horizon);
  flow.reach_ref(0, 0) = 1.0;
  for (int t = 0; t <= horizon; ++t) {
    for (int x = -t; x <= t; x += 2) {
      const double r = flow.reach(t, x);
      const double s = tree.stop(t, x);
      const double out = r * s;
      flow.exit_ref(t, x) = out;
      dist.at(x) += out;
      if (t < horizon) {
        const double half = 0.5 * (r - out);
        flow.reach_ref(t + 1, x - 1) += half;
        flow.reach_ref(t + 1, x + 1) += half;
      }
    }
  }
  return {std::move(dist), std::move(flow)};
}

ExitDistribution stopped_law_at(const NodeFlow& flow, int t) {
  const int horizon = flow.horizon();
  ExitDistribution law(horizon);
  for (int s = 0; s < t; ++s) {
    for (int x = -s; x <= s; x += 2) law.at(x) += flow.exit(s, x);
  }
  for (int x = -t; x <= t; x += 2) law.at(x) += flow.reach(t, x);
  return law;
}

std::vector<Potential> running_potentials(const StrategyTree& tree) {
  const auto [dist, flow] = strategy_distribution(tree);
  std::vector<Potential> out;
  out.reserve(static_cast<std::size_t>(tree.horizon()) + 1);
  for (int t = 0; t <= tree.horizon(); ++t) out.push_back(potential_from_dist(stopped_law_at(flow, t)));
  return out;
}

// ---------------------------------------------------------------------------

namespace detail {

void forward_exit(std::span<const double> stop, int horizon, std::span<double> exit_mass,
                  std::vector<double>& scratch) {
  const std::size_t width = 2 * static_cast<std::size_t>(horizon) + 1;
  scratch.assign(2 * width, 0.0);
  double* cur = scratch.data();
  double* nxt = scratch.data() + width;
  std::fill(exit_mass.begin(), exit_mass.end(), 0.0);
  cur[static_cast<std::size_t>(horizon)] = 1.0;
  for (int t = 0; t <= horizon; ++t) {
    const double* row = stop.data() + static_cast<std::size_t>(t) * width;
    if (t < horizon) std::fill(nxt, nxt + width, 0.0);
    for (int x = -t; x <= t; x += 2) {
      const auto i = static_cast<std::size_t>(x + horizon);
      const double r = cur[i];
      if (r == 0.0) continue;
      const double out = t == horizon ? r : r * row[i];
      exit_mass[i] += out;
      if (t < horizon) {
        const double half = 0.5 * (r - out);
        nxt[i - 1] += half;
        nxt[i + 1] += half;
      }
    }
    std::swap(cur, nxt);
  }
}

}  // namespace detail

}  // namespace cptquit
