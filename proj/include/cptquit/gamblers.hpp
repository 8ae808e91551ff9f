#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "cptquit/preferences.hpp"
#include "cptquit/root_embedding.hpp"

namespace cptquit {

enum class AgentKind { Precommitted, Naive, Sophisticated };

std::string_view to_string(AgentKind kind);

/// Per-node record: the subproblem optimum (naive) or the node-conditional
/// value at the chosen stop probability (sophisticated).
struct NodeDiagnostic {
  int t = 0;
  int x = 0;
  double value = 0.0;
  double stop_prob = 0.0;

  bool operator==(const NodeDiagnostic&) const = default;
};

struct AgentSolution {
  AgentKind kind = AgentKind::Precommitted;
  StrategyTree tree;
  double value = 0.0;  // CPT value of the tree's exit law, reference 0
  std::vector<NodeDiagnostic> nodes;
};

AgentSolution precommitted(const CptParams& params, int horizon, int restarts = 64, std::uint64_t seed = 0);

/// Re-solves the remaining problem at every node and keeps only its first action.
AgentSolution naive(const CptParams& params, int horizon, int restarts = 64, std::uint64_t seed = 0);

/// Backward induction against the already fixed choices of later selves.
AgentSolution sophisticated(const CptParams& params, int horizon);

enum class ExitPattern { NoEnter, LossExit, GainExit };

std::string_view to_string(ExitPattern pattern);

/// No-enter when the root stops surely; otherwise compares the probability of
/// quitting before the horizon in losses against quitting before it in gains.
ExitPattern classify_pattern(const StrategyTree& tree);

struct EntryDecision {
  double q = 0.0;  // probability of each outcome +1 and -1
  double value = 0.0;
};

/// One-bet entry: maximises u+(1) w+(q) - lambda u-(1) w-(q) over q in [0, 1/2].
EntryDecision enter_one_bet(const CptParams& params);

/// Optimal continuation weight q at the top node (T, T) given one more round;
/// p_top = P(exit at T). Throws InfeasibleError when [0, p_top] is not in the
/// concave region of w+.
double one_more_round_gain(const CptParams& params, int horizon, double p_top);

/// Same at the bottom node (T, -T): 0 (stop) or 1/2 (continue), ties stop.
double one_more_round_loss(const CptParams& params, int horizon, double p_bottom);

/// Intermediate gain state n with p_n = P(exit at n), pbar_next = P(exit > n).
double one_more_round_interior(const CptParams& params, int n, double p_n, double pbar_next);

enum class Action { Stop, Continue, Randomize };

std::string_view to_string(Action action);

struct LayerDecision {
  Action action = Action::Stop;
  double q = 0.0;          // maximiser of g (gains) or minimiser of l (losses)
  double objective = 0.0;  // g(q) or l(q)
};

/// Last-decision rule at a nonzero state x. Checks subcertainty of w+ (x > 0)
/// or w-'(1-p) >= w-'(p) on [0, 1/2] (x < 0) on a grid and throws
/// InfeasibleError when the hypothesis fails.
LayerDecision t_minus_1_rules(const CptParams& params, int x);

}  // namespace cptquit
