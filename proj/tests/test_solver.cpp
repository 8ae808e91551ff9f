#include <doctest.h>

#include <cstdlib>
#include <random>

#include "cptquit/errors.hpp"
#include "cptquit/oracle.hpp"
#include "cptquit/potential.hpp"
#include "cptquit/solver.hpp"
#include "reference.hpp"

using namespace cptquit;

namespace {

const CptParams kCasino = CptParams::symmetric(0.95, 0.5, 1.5);
const TailVectors kPublishedTails{{0.1875, 0.1273, 0.1227, 0.03152, 0.03098}, {0.5, 0, 0, 0, 0}};

double residual_of(const ConstraintReport& r, const std::string& name) {
  for (const auto& e : r.entries) {
    if (e.name == name) return e.residual;
  }
  FAIL("missing constraint " << name);
  return 0.0;
}

SolveResult without_time(SolveResult r) {
  r.diagnostics.wall_seconds = 0.0;
  return r;
}

}  // namespace

TEST_CASE("f_recursion rows are the evolutional layers") {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 200; ++k) {
    const int horizon = 1 + k % 8;
    const TailVectors tails = random_feasible_point(horizon, 1000 + k);
    const FTable f = f_recursion(tails);
    const EvolutionSeq seq = evolutional_sequence(tails.reconstruct(), horizon);
    REQUIRE(f.size() == static_cast<std::size_t>(horizon));
    for (int m = 1; m <= horizon; ++m) {
      REQUIRE(f[m - 1].size() == static_cast<std::size_t>(2 * horizon + 1));
      for (int n = 1; n <= 2 * horizon + 1; ++n) {
        CHECK(f[m - 1][n - 1] == doctest::Approx(seq.layers[m - 1](n - (horizon + 1))).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("evaluate_constraints examples") {
  const ConstraintReport zero = evaluate_constraints(TailVectors::zeros(4));
  CHECK(zero.feasible());
  for (const auto& e : zero.entries) CHECK(e.residual <= 1e-15);

  CHECK(evaluate_constraints(kPublishedTails).feasible());

  TailVectors corner = TailVectors::zeros(3);
  corner.x[0] = corner.y[0] = 1.0;
  const ConstraintReport bad = evaluate_constraints(corner);
  CHECK_FALSE(bad.feasible());
  CHECK(residual_of(bad, "x_1 + y_1 <= 1") == doctest::Approx(1.0));
  CHECK(residual_of(bad, "sum x = sum y") == 0.0);

  TailVectors unbalanced = TailVectors::zeros(2);
  unbalanced.x[0] = 0.3;
  CHECK(residual_of(evaluate_constraints(unbalanced), "sum x = sum y") == doctest::Approx(0.3));
}

TEST_CASE("random feasible points satisfy every constraint") {
  for (int k = 0; k < 1000; ++k) {
    const int horizon = 1 + k % 10;
    const TailVectors tails = random_feasible_point(horizon, static_cast<std::uint64_t>(k));
    const ConstraintReport r = evaluate_constraints(tails);
    CHECK(r.feasible());
    CHECK(is_embeddable(tails.reconstruct(), horizon).embeddable);
  }
  CHECK(random_feasible_point(5, 3) == random_feasible_point(5, 3));
  CHECK_FALSE(random_feasible_point(5, 3) == random_feasible_point(5, 4));
}

TEST_CASE("solve_program on the five-step example") {
  const SolveResult r = solve_program(kCasino, 5, {64, 7, 0});
  CHECK(r.value == doctest::Approx(0.3369592).epsilon(1e-4));
  for (int n = 0; n < 5; ++n) CHECK(std::abs(r.tails.x[n] - kPublishedTails.x[n]) <= 5e-3);
  CHECK(std::abs(r.tails.y[0] - 0.5) <= 5e-3);
  CHECK(r.diagnostics.residual <= kConstraintTol);
  CHECK(is_embeddable(r.mu, 5).embeddable);
  CHECK(strategy_distribution(r.tree).first.max_abs_difference(r.mu) <= 1e-9);
  CHECK(cpt_value(r.mu, kCasino) == doctest::Approx(r.value).epsilon(1e-9));
  CHECK(r.diagnostics.starts == 66);
}

TEST_CASE("solve_program small-horizon and no-entry examples") {
  CHECK(solve_program(CptParams::symmetric(0.9, 0.5, 1.25), 2, {64, 1, 0}).value ==
        doctest::Approx(0.065696808).epsilon(1e-4));
  const SolveResult none = solve_program(CptParams::symmetric(0.95, 0.95, 1.5), 10, {32, 1, 0});
  CHECK(none.value == doctest::Approx(0.0));
  CHECK(none.tree.stop(0, 0) == 1.0);
  CHECK_THROWS_AS(solve_program(kCasino, 0), ContractError);
  CHECK_THROWS_AS(solve_program(kCasino, 3, {0, 1, 0}), ContractError);
}

TEST_CASE("solve_program dominates the non-randomized oracle") {
  const CptParams sets[] = {kCasino, CptParams::symmetric(0.9, 0.5, 1.25), CptParams::symmetric(0.5, 0.5, 1.0), CptParams{}};
  for (const auto& prm : sets) {
    for (int horizon = 1; horizon <= 5; ++horizon) {
      const double oracle = exhaustive_markov(prm, horizon).value;
      CHECK(solve_program(prm, horizon, {32, 5, 0}).value >= oracle - 1e-6);
    }
  }
}

TEST_CASE("solver value is monotone in horizon and loss aversion") {
  double prev = -1.0;
  for (int horizon = 1; horizon <= 8; ++horizon) {
    const double v = solve_program(CptParams{}, horizon, {32, 2, 0}).value;
    CHECK(v >= prev - 1e-9);
    prev = v;
  }
  prev = 1e9;
  for (double lambda = 1.0; lambda <= 3.0 + 1e-12; lambda += 0.5) {
    const double v = solve_program(CptParams::symmetric(0.95, 0.5, lambda), 6, {32, 2, 0}).value;
    CHECK(v <= prev + 1e-9);
    prev = v;
  }
}

TEST_CASE("shifted objective") {
  const TailVectors zero = TailVectors::zeros(2);
  // Stopping at once from a gain of 2 is worth u+(2).
  CHECK(objective_from_tails(zero, 2, kCasino) == doctest::Approx(utility(2, Side::Gain, kCasino)));
  const SolveResult r = solve_program(kCasino, 2, {16, 3, 2});
  CHECK(r.value >= utility(2, Side::Gain, kCasino) - 1e-12);
}

TEST_CASE("seed determinism and worker-count independence") {
  const SolveResult a = solve_program(CptParams{}, 6, {16, 11, 0});
  const SolveResult b = solve_program(CptParams{}, 6, {16, 11, 0});
  CHECK(without_time(a) == without_time(b));

  setenv("CPTQUIT_THREADS", "1", 1);
  const SolveResult serial = solve_program(CptParams{}, 6, {16, 11, 0});
  setenv("CPTQUIT_THREADS", "4", 1);
  const SolveResult wide = solve_program(CptParams{}, 6, {16, 11, 0});
  unsetenv("CPTQUIT_THREADS");
  CHECK(without_time(serial) == without_time(a));
  CHECK(without_time(wide) == without_time(a));
}
