#include "cptquit/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <string>

#include "cptquit/errors.hpp"
#include "detail.hpp"
#include "forward.hpp"
#include "parallel.hpp"

namespace cptquit {

FTable f_recursion(const TailVectors& tails) {
  const int t = tails.horizon();
  const Potential target = potential_from_tails(tails);
  const std::size_t width = 2 * static_cast<std::size_t>(t) + 1;
  FTable f(static_cast<std::size_t>(t), std::vector<double>(width, 0.0));
  if (t == 0) return f;
  for (std::size_t n = 0; n < width; ++n) f[0][n] = std::abs(static_cast<int>(n) - t);
  for (std::size_t m = 1; m < static_cast<std::size_t>(t); ++m) {
    f[m].front() = t;
    f[m].back() = t;
    for (std::size_t n = 1; n + 1 < width; ++n) {
      const double avg = 0.5 * (f[m - 1][n - 1] + f[m - 1][n + 1]);
      f[m][n] = std::min(avg, target(static_cast<int>(n) - t));
    }
  }
  return f;
}

ConstraintReport evaluate_constraints(const TailVectors& tails) {
  const int t = tails.horizon();
  ConstraintReport report;
  auto add = [&report](std::string name, double residual) {
    report.max_violation = std::max(report.max_violation, residual);
    report.entries.push_back({std::move(name), residual});
  };
  for (const auto& [side, v] : {std::pair{'x', &tails.x}, std::pair{'y', &tails.y}}) {
    const std::string s(1, side);
    if (t == 0) break;
    add(s + "_1 <= 1", (*v)[0] - 1.0);
    for (int n = 1; n < t; ++n) {
      add(s + "_" + std::to_string(n + 1) + " <= " + s + "_" + std::to_string(n), (*v)[n] - (*v)[n - 1]);
    }
    add(s + "_" + std::to_string(t) + " >= 0", -(*v)[t - 1]);
  }
  if (t == 0) return report;
  add("x_1 + y_1 <= 1", tails.x[0] + tails.y[0] - 1.0);
  double sx = 0.0;
  double sy = 0.0;
  for (int n = 0; n < t; ++n) {
    sx += tails.x[n];
    sy += tails.y[n];
  }
  add("sum x = sum y", std::abs(sx - sy));
  const Potential target = potential_from_tails(tails);
  const FTable f = f_recursion(tails);
  const auto& last = f.back();
  for (int x = -(t - 2); x <= t - 2; x += 2) {
    const auto n = static_cast<std::size_t>(x + t);
    add("embed at " + std::to_string(x), target(x) - 0.5 * (last[n - 1] + last[n + 1]));
  }
  return report;
}

StrategyTree random_tree(int horizon, std::uint64_t seed) {
  if (horizon < 1) throw ContractError("random_tree: horizon must be >= 1");
  std::mt19937_64 rng(detail::mix64(seed));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  StrategyTree tree(horizon);
  for (int t = 0; t < horizon; ++t) {
    for (int x = -t; x <= t; x += 2) tree.set_stop(t, x, unit(rng));
  }
  return tree;
}

TailVectors random_feasible_point(int horizon, std::uint64_t seed) {
  return TailVectors::from_distribution(strategy_distribution(random_tree(horizon, seed)).first);
}

namespace {

constexpr double kTreeStepInit = 0.25;
constexpr double kTreeStepMax = 0.5;
constexpr double kStepMin = 1e-7;
constexpr int kTreeRounds = 4;
constexpr double kPenaltyInit = 1e3;
constexpr int kPenaltyDoublings = 8;
constexpr double kPolishStepInit = 0.05;

bool improves(double candidate, double incumbent) {
  return candidate > incumbent + 1e-15 * std::max(1.0, std::abs(incumbent));
}

// Coordinate ascent over interior stop probabilities of a dense stop table.
class TreeSearch {
 public:
  TreeSearch(const CptParams& params, int horizon, int shift)
      : params_(params), horizon_(horizon), first_state_(shift - horizon), exit_(2 * static_cast<std::size_t>(horizon) + 1) {
    const std::size_t width = exit_.size();
    for (int t = 0; t < horizon; ++t) {
      for (int x = -t; x <= t; x += 2) {
        interior_.push_back(static_cast<std::size_t>(t) * width + static_cast<std::size_t>(x + horizon));
      }
    }
  }

  double evaluate(std::span<const double> stop) {
    ++evaluations_;
    detail::forward_exit(stop, horizon_, exit_, scratch_);
    return detail::cpt_value_unchecked(exit_, first_state_, params_);
  }

  double ascend(std::vector<double>& stop) {
    double best = evaluate(stop);
    double step_init = kTreeStepInit;
    for (int round = 0; round < kTreeRounds; ++round) {
      const double round_start = best;
      std::vector<double> step(interior_.size(), step_init);
      bool active = true;
      while (active) {
        active = false;
        for (std::size_t k = 0; k < interior_.size(); ++k) {
          if (step[k] < kStepMin) continue;
          active = true;
          double& s = stop[interior_[k]];
          const double old = s;
          bool moved = false;
          for (double dir : {1.0, -1.0}) {
            const double cand = std::clamp(old + dir * step[k], 0.0, 1.0);
            if (cand == old) continue;
            s = cand;
            const double v = evaluate(stop);
            if (improves(v, best)) {
              best = v;
              moved = true;
              break;
            }
            s = old;
          }
          step[k] = moved ? std::min(kTreeStepMax, 2.0 * step[k]) : 0.5 * step[k];
        }
      }
      if (!improves(best, round_start + 1e-13)) break;
      step_init = 1e-2;
    }
    return best;
  }

  long evaluations() const { return evaluations_; }

 private:
  const CptParams& params_;
  int horizon_;
  int first_state_;
  std::vector<double> exit_;
  std::vector<double> scratch_;
  std::vector<std::size_t> interior_;
  long evaluations_ = 0;
};

// Sum of positive constraint residuals of the tail program, without names.
double total_violation(std::span<const double> x, std::span<const double> y, std::vector<double>& u,
                       std::vector<double>& prev, std::vector<double>& next) {
  const int t = static_cast<int>(x.size());
  double v = 0.0;
  auto pos = [](double r) { return r > 0.0 ? r : 0.0; };
  double sx = 0.0;
  double sy = 0.0;
  for (int n = 0; n < t; ++n) {
    const double px = n == 0 ? 1.0 : x[n - 1];
    const double py = n == 0 ? 1.0 : y[n - 1];
    v += pos(x[n] - px) + pos(y[n] - py);
    sx += x[n];
    sy += y[n];
  }
  v += pos(-x[t - 1]) + pos(-y[t - 1]);
  v += pos(x[0] + y[0] - 1.0);
  v += std::abs(sx - sy);
  // Potential of the tails on states -T..T, index s + T.
  const std::size_t width = 2 * static_cast<std::size_t>(t) + 1;
  u.assign(width, 0.0);
  double ax = 0.0;
  double ay = 0.0;
  for (int n = t; n >= 0; --n) {
    u[static_cast<std::size_t>(t + n)] = 2.0 * ax + n;
    u[static_cast<std::size_t>(t - n)] = 2.0 * ay + n;
    if (n >= 1) {
      ax += x[n - 1];
      ay += y[n - 1];
    }
  }
  prev.resize(width);
  next.resize(width);
  for (std::size_t n = 0; n < width; ++n) prev[n] = std::abs(static_cast<double>(n) - t);
  for (int m = 1; m < t; ++m) {
    next.front() = t;
    next.back() = t;
    for (std::size_t n = 1; n + 1 < width; ++n) next[n] = std::min(0.5 * (prev[n - 1] + prev[n + 1]), u[n]);
    std::swap(prev, next);
  }
  for (int s = -(t - 2); s <= t - 2; s += 2) {
    const auto n = static_cast<std::size_t>(s + t);
    v += pos(u[n] - 0.5 * (prev[n - 1] + prev[n + 1]));
  }
  return v;
}

// Exact-penalty pattern search over the tail vectors.
class TailPolish {
 public:
  TailPolish(const CptParams& params, int horizon, int shift) : params_(params), horizon_(horizon), shift_(shift) {
    const std::size_t dim = 2 * static_cast<std::size_t>(horizon);
    auto unit = [dim](std::size_t i) {
      std::vector<double> d(dim, 0.0);
      d[i] = 1.0;
      return d;
    };
    for (std::size_t i = 0; i < dim; ++i) directions_.push_back(unit(i));
    const std::size_t t = static_cast<std::size_t>(horizon);
    for (std::size_t i = 0; i < t; ++i) {
      for (std::size_t j = 0; j < t; ++j) {
        auto d = unit(i);
        d[t + j] = 1.0;
        directions_.push_back(std::move(d));
      }
    }
    for (std::size_t side = 0; side < 2; ++side) {
      for (std::size_t i = 0; i < t; ++i) {
        for (std::size_t j = i + 1; j < t; ++j) {
          auto d = unit(side * t + i);
          d[side * t + j] = -1.0;
          directions_.push_back(std::move(d));
        }
      }
    }
  }

  double objective(std::span<const double> z) {
    ++evaluations_;
    const std::size_t t = static_cast<std::size_t>(horizon_);
    const auto x = z.subspan(0, t);
    const auto y = z.subspan(t, t);
    double value;
    if (shift_ == 0) {
      value = detail::tail_objective_unchecked(x, y, params_);
    } else {
      mass_.assign(2 * t + 1, 0.0);
      for (std::size_t n = 1; n <= t; ++n) {
        const double xn = x[n - 1] - (n < t ? x[n] : 0.0);
        const double yn = y[n - 1] - (n < t ? y[n] : 0.0);
        mass_[t + n] = std::max(0.0, xn);
        mass_[t - n] = std::max(0.0, yn);
      }
      mass_[t] = std::max(0.0, 1.0 - x[0] - y[0]);
      value = detail::cpt_value_unchecked(mass_, shift_ - horizon_, params_);
    }
    return value;
  }

  double violation(std::span<const double> z) {
    const std::size_t t = static_cast<std::size_t>(horizon_);
    return total_violation(z.subspan(0, t), z.subspan(t, t), u_, prev_, next_);
  }

  void search(std::vector<double>& z) {
    double rho = kPenaltyInit;
    double step0 = kPolishStepInit;
    for (int k = 0; k <= kPenaltyDoublings; ++k) {
      run(z, rho, step0);
      if (violation(z) <= 1e-12) return;
      rho *= 2.0;
      step0 = 1e-3;
    }
  }

  long evaluations() const { return evaluations_; }

 private:
  double merit(std::span<const double> z, double rho) { return objective(z) - rho * violation(z); }

  void run(std::vector<double>& z, double rho, double step) {
    std::vector<double> cand(z.size());
    double best = merit(z, rho);
    while (step >= kStepMin) {
      bool moved = false;
      for (const auto& d : directions_) {
        for (double sign : {1.0, -1.0}) {
          bool changed = false;
          for (std::size_t i = 0; i < z.size(); ++i) {
            cand[i] = std::clamp(z[i] + sign * step * d[i], 0.0, 1.0);
            changed = changed || cand[i] != z[i];
          }
          if (!changed) continue;
          const double v = merit(cand, rho);
          if (improves(v, best)) {
            best = v;
            z.swap(cand);
            moved = true;
            break;
          }
        }
      }
      if (!moved) step *= 0.5;
    }
  }

  const CptParams& params_;
  int horizon_;
  int shift_;
  std::vector<std::vector<double>> directions_;
  std::vector<double> mass_;
  std::vector<double> u_;
  std::vector<double> prev_;
  std::vector<double> next_;
  long evaluations_ = 0;
};

// Exit law of the Root tree built from (possibly slightly infeasible) tails.
ExitDistribution restore(const std::vector<double>& z, int horizon) {
  const std::size_t t = static_cast<std::size_t>(horizon);
  ExitDistribution mu(horizon);
  for (std::size_t n = 1; n <= t; ++n) {
    mu.at(static_cast<int>(n)) = std::max(0.0, z[n - 1] - (n < t ? z[n] : 0.0));
    mu.at(-static_cast<int>(n)) = std::max(0.0, z[t + n - 1] - (n < t ? z[t + n] : 0.0));
  }
  mu.at(0) = std::max(0.0, 1.0 - z[0] - z[t]);
  const double total = mu.total();
  for (double& m : mu.masses_mutable()) m /= total;
  return strategy_distribution(root_rule_to_tree(detail::root_rule_unchecked(mu, horizon))).first;
}

}  // namespace

SolveResult solve_program(const CptParams& params, int horizon, const SolveOptions& options) {
  params.validate();
  if (horizon < 1) throw ContractError("solve_program: horizon must be >= 1");
  if (options.restarts < 1) throw ContractError("solve_program: restarts must be >= 1");
  const auto start_clock = std::chrono::steady_clock::now();

  const int starts = options.restarts + 2;
  std::vector<std::vector<double>> tables(static_cast<std::size_t>(starts));
  std::vector<double> values(static_cast<std::size_t>(starts), 0.0);
  std::vector<long> evaluations(static_cast<std::size_t>(starts), 0);

  detail::parallel_for(static_cast<std::size_t>(starts), [&](std::size_t i) {
    StrategyTree init = i == 0   ? StrategyTree::stop_at_root(horizon)
                        : i == 1 ? StrategyTree(horizon)
                                 : random_tree(horizon, detail::derive_seed(options.seed, i - 2));
    std::vector<double> stop(init.raw().begin(), init.raw().end());
    TreeSearch search(params, horizon, options.shift);
    values[i] = search.ascend(stop);
    evaluations[i] = search.evaluations();
    tables[i] = std::move(stop);
  });

  std::size_t best = 0;
  long total_evaluations = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    total_evaluations += evaluations[i];
    if (values[i] > values[best]) best = i;
  }

  std::vector<double> exit_mass(2 * static_cast<std::size_t>(horizon) + 1);
  std::vector<double> scratch;
  detail::forward_exit(tables[best], horizon, exit_mass, scratch);
  ExitDistribution mu(horizon, exit_mass);
  double value = values[best];

  // Polish in tail space, then map back onto an embeddable law.
  const TailVectors seed_tails = TailVectors::from_distribution(mu);
  std::vector<double> z(seed_tails.x);
  z.insert(z.end(), seed_tails.y.begin(), seed_tails.y.end());
  TailPolish polish(params, horizon, options.shift);
  polish.search(z);
  total_evaluations += polish.evaluations();
  const ExitDistribution polished = restore(z, horizon);
  const double polished_value =
      detail::cpt_value_unchecked(polished.masses(), options.shift - horizon, params);
  bool polish_improved = false;
  if (improves(polished_value, value) && is_embeddable(polished, horizon).embeddable) {
    mu = polished;
    value = polished_value;
    polish_improved = true;
  }

  SolveResult result;
  result.tails = TailVectors::from_distribution(mu);
  result.value = objective_from_tails(result.tails, options.shift, params);
  result.rule = build_root_rule(mu, horizon);
  result.tree = root_rule_to_tree(result.rule);
  result.mu = std::move(mu);
  result.diagnostics.starts = starts;
  result.diagnostics.best_start = static_cast<int>(best);
  result.diagnostics.residual = evaluate_constraints(result.tails).max_violation;
  result.diagnostics.evaluations = total_evaluations;
  result.diagnostics.polish_improved = polish_improved;
  result.diagnostics.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_clock).count();
  return result;
}

}  // namespace cptquit
