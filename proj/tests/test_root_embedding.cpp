#include <doctest.h>

#include <cmath>
#include <random>

#include "cptquit/errors.hpp"
#include "cptquit/root_embedding.hpp"
#include "reference.hpp"

using namespace cptquit;

namespace {

StrategyTree tree_from(const std::vector<std::vector<double>>& stop) {
  const int horizon = static_cast<int>(stop.size()) - 1;
  StrategyTree tree(horizon);
  for (int t = 0; t < horizon; ++t) {
    for (int x = -t; x <= t; x += 2) tree.set_stop(t, x, stop[t][(x + t) / 2]);
  }
  return tree;
}

ExitDistribution published_mu() {
  return TailVectors{{0.1875, 0.1273, 0.1227, 0.03152, 0.03098}, {0.5, 0, 0, 0, 0}}.reconstruct();
}

ExitDistribution fig3_measure() {
  ExitDistribution d(5);
  d.at(5) = d.at(-5) = 1.0 / 32;
  d.at(3) = d.at(-3) = 5.0 / 32;
  d.at(1) = d.at(-1) = 5.0 / 16;
  return d;
}

}  // namespace

TEST_CASE("StrategyTree contract") {
  StrategyTree tree(3);
  CHECK(tree.interior_count() == 6);
  CHECK(tree.stop(3, 1) == 1.0);
  CHECK(tree.stop(2, 0) == 0.0);
  CHECK_THROWS_AS(tree.set_stop(2, 1, 0.5), ContractError);
  CHECK_THROWS_AS(tree.set_stop(1, 1, 1.5), ContractError);
  CHECK_THROWS_AS(tree.set_stop(3, 1, 0.5), ContractError);
  CHECK(StrategyTree::stop_at_root(3).stop(0, 0) == 1.0);
}

TEST_CASE("strategy_distribution examples") {
  CHECK(strategy_distribution(StrategyTree::stop_at_root(4)).first == ExitDistribution::point_mass(4, 0));
  const auto [binomial, flow] = strategy_distribution(StrategyTree(5));
  CHECK(binomial.max_abs_difference(fig3_measure()) <= 1e-15);
  CHECK(flow.reach(0, 0) == 1.0);
}

TEST_CASE("strategy_distribution matches the reference walk and conserves flow") {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 300; ++k) {
    const int horizon = 1 + k % 9;
    const auto stops = ref::random_stops(horizon, rng);
    const StrategyTree tree = tree_from(stops);
    const auto [dist, flow] = strategy_distribution(tree);
    const auto law = ref::walk(stops);
    for (int x = -horizon; x <= horizon; ++x) {
      const auto it = law.find(x);
      CHECK(dist[x] == doctest::Approx(it == law.end() ? 0.0 : it->second).epsilon(1e-14));
    }
    double total = 0.0;
    for (int t = 0; t <= horizon; ++t) {
      for (int x = -t; x <= t; x += 2) {
        CHECK(flow.exit(t, x) >= 0.0);
        total += flow.exit(t, x);
        if (t > 0) {
          auto alive = [&](int y) {
            return StrategyTree::is_node(t - 1, y) ? (1 - tree.stop(t - 1, y)) * flow.reach(t - 1, y) : 0.0;
          };
          const double in = 0.5 * (alive(x - 1) + alive(x + 1));
          CHECK(flow.reach(t, x) == doctest::Approx(in).epsilon(1e-15));
        }
      }
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("build_root_rule examples") {
  const RootRule zero = build_root_rule(ExitDistribution::point_mass(3, 0), 3);
  CHECK(zero.barrier_at(0) == 0);
  CHECK(zero.stop_at(0) == 1.0);
  CHECK(root_rule_to_tree(zero).stop(0, 0) == 1.0);

  const RootRule star = build_root_rule(published_mu(), 5);
  const StrategyTree tree = root_rule_to_tree(star);
  CHECK(tree.stop(4, 4) == doctest::Approx(0.00864).epsilon(2e-3));
  CHECK(tree.stop(4, 2) == doctest::Approx(0.0368).epsilon(2e-3));
  // Loss-exit shape: stop at -1 on arrival, continue along the gain side.
  CHECK(tree.stop(1, -1) == 1.0);
  CHECK(tree.stop(1, 1) == 0.0);
  CHECK(tree.stop(3, 3) == 0.0);
  CHECK(strategy_distribution(tree).first.max_abs_difference(published_mu()) <= 1e-12);

  const RootRule fig3 = build_root_rule(fig3_measure(), 5);
  CHECK(strategy_distribution(root_rule_to_tree(fig3)).first.max_abs_difference(fig3_measure()) <= 1e-12);

  ExitDistribution three(3);
  three.at(-3) = three.at(0) = three.at(3) = 1.0 / 3;
  CHECK_THROWS_WITH_AS(build_root_rule(three, 3), doctest::Contains("violated states: -1"), InfeasibleError);
}

TEST_CASE("root_rule_to_tree for the five-step barrier example") {
  RootRule rule;
  rule.horizon = 5;
  rule.barrier = {5, 4, 3, 2, 3, 2, 3, 4, 3, 4, 5};
  rule.stop_prob = {1, 1, 1, 1, 0.5, 0.25, 0.5, 1, 1, 1, 1};
  const StrategyTree tree = root_rule_to_tree(rule);
  CHECK(tree.stop(1, 1) == 0.0);
  CHECK(tree.stop(2, 0) == 0.25);
  CHECK(tree.stop(4, 0) == 1.0);
  CHECK(tree.stop(2, -2) == 1.0);
  CHECK(tree.stop(3, -1) == 0.5);
  CHECK(tree.stop(3, 3) == 1.0);
  CHECK(tree.stop(4, 2) == 1.0);
  CHECK(tree.stop(3, 1) == 0.5);
  CHECK(tree.stop(4, 4) == 1.0);
  CHECK(tree.stop(1, -1) == 0.0);
}

TEST_CASE("embedding round trip, barrier parity and Root optimality") {
  std::mt19937_64 rng(99);
  for (int horizon : {3, 5, 8}) {
    for (int k = 0; k < 200; ++k) {
      const StrategyTree tree = tree_from(ref::random_stops(horizon, rng));
      const auto [mu, flow] = strategy_distribution(tree);
      REQUIRE(is_embeddable(mu, horizon).embeddable);
      const RootRule rule = build_root_rule(mu, horizon);
      for (int x = -horizon; x <= horizon; ++x) {
        CHECK((rule.barrier_at(x) - x) % 2 == 0);
        CHECK(rule.barrier_at(x) >= std::abs(x));
        CHECK(rule.barrier_at(x) <= horizon);
      }
      const StrategyTree root = root_rule_to_tree(rule);
      CHECK(strategy_distribution(root).first.max_abs_difference(mu) <= 1e-9);

      const EvolutionSeq seq = evolutional_sequence(mu, horizon);
      const auto random_run = running_potentials(tree);
      const auto root_run = running_potentials(root);
      for (int t = 0; t <= horizon; ++t) {
        for (int x = -horizon - 1; x <= horizon + 1; ++x) {
          CHECK(random_run[t](x) <= seq.layers[t](x) + 1e-9);
        }
        CHECK(root_run[t].max_abs_difference(seq.layers[t]) <= 1e-9);
      }
    }
  }
}

TEST_CASE("running potentials follow the one-step update") {
  std::mt19937_64 rng(31);
  for (int k = 0; k < 50; ++k) {
    const int horizon = 2 + k % 6;
    const StrategyTree tree = tree_from(ref::random_stops(horizon, rng));
    const auto [mu, flow] = strategy_distribution(tree);
    const auto run = running_potentials(tree);
    for (int x = -horizon; x <= horizon; ++x) CHECK(run[0](x) == std::abs(x));
    for (int t = 1; t <= horizon; ++t) {
      // U_t(x) - U_{t-1}(x) = P(S_{t-1} = x, tau >= t) for the walk still alive after stopping at t-1.
      for (int x = -horizon; x <= horizon; ++x) {
        const double alive = StrategyTree::is_node(t - 1, x) ? flow.reach(t - 1, x) * (1 - tree.stop(t - 1, x)) : 0.0;
        CHECK(run[t](x) - run[t - 1](x) == doctest::Approx(alive).epsilon(1e-12));
      }
    }
  }
}
