#pragma once

#include <span>
#include <utility>
#include <vector>

#include "cptquit/potential.hpp"
#include "cptquit/preferences.hpp"

namespace cptquit {

/// Randomized Root stopping rule: stop with probability r(x) when first at
/// (b(x), x), surely after b(x), never before.
struct RootRule {
  int horizon = 0;
  std::vector<int> barrier;       // indexed by x + T
  std::vector<double> stop_prob;  // indexed by x + T

  int barrier_at(int x) const { return barrier[static_cast<std::size_t>(x + horizon)]; }
  double stop_at(int x) const { return stop_prob[static_cast<std::size_t>(x + horizon)]; }

  bool operator==(const RootRule&) const = default;
};

/// Markovian randomized strategy on the binomial tree: stop(t, x) is the
/// probability of quitting on arrival at node (t, x). Nodes satisfy
/// |x| <= t <= T and x = t (mod 2); terminal nodes always stop.
class StrategyTree {
 public:
  StrategyTree() = default;
  /// All interior nodes continue; terminal nodes stop.
  explicit StrategyTree(int horizon);

  static StrategyTree stop_at_root(int horizon);

  static bool is_node(int t, int x) { return t >= 0 && x >= -t && x <= t && ((t - x) % 2 == 0); }

  int horizon() const { return horizon_; }
  double stop(int t, int x) const;
  void set_stop(int t, int x, double p);

  /// Throws ContractError for probabilities outside [0,1] or a terminal node
  /// that does not stop.
  void validate() const;

  /// Number of interior nodes, T(T+1)/2.
  int interior_count() const { return horizon_ * (horizon_ + 1) / 2; }

  std::span<const double> raw() const { return stop_; }

  bool operator==(const StrategyTree&) const = default;

 private:
  std::size_t index(int t, int x) const {
    return static_cast<std::size_t>(t) * static_cast<std::size_t>(2 * horizon_ + 1) +
           static_cast<std::size_t>(x + horizon_);
  }

  int horizon_ = 0;
  std::vector<double> stop_;
};

/// Forward flow on the tree: reach(t, x) is the probability of arriving at
/// (t, x) not yet stopped; exit(t, x) the probability of stopping there.
class NodeFlow {
 public:
  NodeFlow() = default;
  explicit NodeFlow(int horizon);

  int horizon() const { return horizon_; }
  double reach(int t, int x) const { return StrategyTree::is_node(t, x) ? reach_[index(t, x)] : 0.0; }
  double exit(int t, int x) const { return StrategyTree::is_node(t, x) ? exit_[index(t, x)] : 0.0; }
  double& reach_ref(int t, int x) { return reach_[index(t, x)]; }
  double& exit_ref(int t, int x) { return exit_[index(t, x)]; }

 private:
  std::size_t index(int t, int x) const {
    return static_cast<std::size_t>(t) * static_cast<std::size_t>(2 * horizon_ + 1) +
           static_cast<std::size_t>(x + horizon_);
  }

  int horizon_ = 0;
  std::vector<double> reach_;
  std::vector<double> exit_;
};

/// Barrier and boundary stop probabilities of the Root rule embedding `mu`
/// by the horizon. Throws InfeasibleError carrying the violated states when
/// `mu` fails the embeddability test.
RootRule build_root_rule(const ExitDistribution& mu, int horizon);

StrategyTree root_rule_to_tree(const RootRule& rule);

/// Exact law of the stopped walk plus the node flow that produced it.
std::pair<ExitDistribution, NodeFlow> strategy_distribution(const StrategyTree& tree);

/// Potentials of the laws of S_{tau ^ t}, t = 0..T.
std::vector<Potential> running_potentials(const StrategyTree& tree);

/// Law of S_{tau ^ t} taken from a node flow.
ExitDistribution stopped_law_at(const NodeFlow& flow, int t);

}  // namespace cptquit
