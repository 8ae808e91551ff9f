#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cptquit/preferences.hpp"
#include "cptquit/root_embedding.hpp"

namespace cptquit {

/// Feasibility tolerance on the largest signed constraint residual.
inline constexpr double kConstraintTol = 1e-6;

struct ConstraintEntry {
  std::string name;
  double residual = 0.0;  // lhs - rhs of "lhs <= rhs"; positive is a violation
};

struct ConstraintReport {
  std::vector<ConstraintEntry> entries;
  double max_violation = 0.0;  // max(0, largest residual)
  bool feasible(double tol = kConstraintTol) const { return max_violation <= tol; }
};

/// Table f^m_n of the capped recursion, rows m = 1..T and columns n = 1..2T+1
/// (state n - (T+1)). Row m coincides with the evolutional layer U_{m-1}.
using FTable = std::vector<std::vector<double>>;
FTable f_recursion(const TailVectors& tails);

/// Signed residuals of every constraint of the tail program: monotone tails in
/// [0,1], x_1 + y_1 <= 1, equal tail sums (reported as |difference|), and the
/// parity-indexed inequalities on row f^T.
ConstraintReport evaluate_constraints(const TailVectors& tails);

/// Random Markovian tree with independent U(0,1) stop probabilities.
StrategyTree random_tree(int horizon, std::uint64_t seed);

/// Tails of the exit law of random_tree(horizon, seed); feasible by construction.
TailVectors random_feasible_point(int horizon, std::uint64_t seed);

struct SolveOptions {
  int restarts = 64;
  std::uint64_t seed = 0;
  /// Accumulated gain/loss at which the (sub)problem starts; the value keeps
  /// the initial wealth as reference.
  int shift = 0;
};

struct SolveDiagnostics {
  int starts = 0;           // restarts plus the two deterministic starts
  int best_start = 0;       // 0: never enter, 1: never stop, >= 2: random
  double residual = 0.0;    // max constraint violation of the returned tails
  double wall_seconds = 0.0;
  long evaluations = 0;
  bool polish_improved = false;

  bool operator==(const SolveDiagnostics&) const = default;
};

struct SolveResult {
  double value = 0.0;
  TailVectors tails;
  ExitDistribution mu;
  RootRule rule;
  StrategyTree tree;
  SolveDiagnostics diagnostics;

  bool operator==(const SolveResult&) const = default;
};

/// Maximises the CPT value over exit laws reachable within `horizon` bets.
/// Deterministic for a given seed.
SolveResult solve_program(const CptParams& params, int horizon, const SolveOptions& options = {});

}  // namespace cptquit
