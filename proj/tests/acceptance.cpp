// Acceptance suite: one PASS/FAIL line per criterion. Pass --slow to also run
// the long-horizon entry-threshold searches.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cptquit/gamblers.hpp"
#include "cptquit/oracle.hpp"
#include "cptquit/potential.hpp"
#include "cptquit/root_embedding.hpp"
#include "cptquit/simulate.hpp"
#include "cptquit/solver.hpp"

using namespace cptquit;

namespace {

const CptParams kCasino = CptParams::symmetric(0.95, 0.5, 1.5);
const CptParams kTk{};
const std::vector<double> kXStar{0.1875, 0.1273, 0.1227, 0.03152, 0.03098};

struct Behaviour {
  CptParams params;
  ExitPattern pattern;
};

// The four parameter groups of the T=10 study with their precommitted shapes.
const std::vector<Behaviour> kGroups{{CptParams::symmetric(0.95, 0.5, 1.5), ExitPattern::LossExit},
                                     {CptParams::symmetric(0.5, 0.95, 1.5), ExitPattern::GainExit},
                                     {CptParams::symmetric(0.5, 0.5, 1.5), ExitPattern::LossExit},
                                     {CptParams::symmetric(0.95, 0.95, 1.5), ExitPattern::NoEnter}};

class Check {
 public:
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass_ = false;
      if (failures_.size() < 6) failures_.push_back(what);
    }
  }
  void near(double got, double want, double tol, const std::string& what) {
    std::ostringstream s;
    s.precision(10);
    s << what << " = " << got << " (target " << want << " +- " << tol << ")";
    require(std::abs(got - want) <= tol, s.str());
    notes_.push_back(s.str());
  }
  void note(const std::string& text) { notes_.push_back(text); }
  bool pass() const { return pass_; }
  std::string summary() const {
    std::string out;
    for (const auto& f : pass_ ? notes_ : failures_) out += (out.empty() ? "" : "; ") + f;
    return out;
  }

 private:
  bool pass_ = true;
  std::vector<std::string> failures_;
  std::vector<std::string> notes_;
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(10);
  s << v;
  return s.str();
}

StrategyTree random_tree_of(int horizon, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  StrategyTree tree(horizon);
  for (int t = 0; t < horizon; ++t) {
    for (int x = -t; x <= t; x += 2) tree.set_stop(t, x, u(rng));
  }
  return tree;
}

void c1(Check& c) { c.near(exhaustive_markov(kCasino, 5).value, 0.3369398, 1e-6, "exhaustive T=5"); }

void c2(Check& c) {
  const SolveResult r = solve_program(kCasino, 5, {64, 7, 0});
  c.near(r.value, 0.3369592, 1e-4, "value");
  double worst = 0.0;
  for (std::size_t n = 0; n < kXStar.size(); ++n) worst = std::max(worst, std::abs(r.tails.x[n] - kXStar[n]));
  c.require(worst <= 5e-3, "max |x - x*| = " + fmt(worst));
  c.note("max |x - x*| = " + fmt(worst));
  c.near(r.tails.y[0], 0.5, 5e-3, "y_1");
  c.near(r.tree.stop(4, 4), 0.00864, 2e-3, "stop(4,4)");
  c.near(r.tree.stop(4, 2), 0.0368, 2e-3, "stop(4,2)");
}

void c3(Check& c) {
  const CptParams prm = CptParams::symmetric(0.9, 0.4, 2.25);
  const SolveResult r = solve_program(prm, 6, {64, 7, 0});
  c.near(r.value, 0.257483, 1e-3, "value");
  c.near(r.tree.stop(0, 0), 0.201, 5e-3, "stop(0,0)");
  c.near(r.tree.stop(5, 1), 0.436, 5e-3, "stop(5,1)");
  c.near(r.tree.stop(5, 3), 0.0292, 5e-3, "stop(5,3)");
  c.near(r.tree.stop(5, 5), 0.0113, 5e-3, "stop(5,5)");
  c.near(exhaustive_markov(prm, 6).value, 0.250440, 1e-6, "non-randomized T=6");
}

void c4(Check& c) {
  const CptParams a = CptParams::symmetric(0.9, 0.5, 1.25);
  const CptParams b = CptParams::symmetric(0.5, 0.5, 1.0);
  c.near(exhaustive_markov(a, 2).value, 0.058069135, 1e-8, "(0.9,0.5,1.25) exhaustive");
  c.near(grid_randomized(a, 2, 0.005).value, 0.065696808, 1e-4, "(0.9,0.5,1.25) grid");
  c.near(exhaustive_markov(b, 2).value, 0.0253839, 1e-8, "(0.5,0.5,1) exhaustive");
  c.near(grid_randomized(b, 2, 0.005).value, 0.0492624, 1e-4, "(0.5,0.5,1) grid");
}

void c5(Check& c) {
  const AgentSolution n = naive(kCasino, 5, 64, 7);
  const ExitPattern p = classify_pattern(n.tree);
  c.require(p == ExitPattern::GainExit, "pattern " + std::string(to_string(p)));
  c.note("pattern " + std::string(to_string(p)));
  c.near(n.tree.stop(2, 0), 0.179, 5e-3, "stop(2,0)");
}

void c6(Check& c) {
  const TailVectors tails{kXStar, {0.5, 0, 0, 0, 0}};
  const Potential u = potential_from_tails(tails);
  const double expected[] = {1.0, 1.625, 2.3704, 3.125, 4.06196};
  double worst = 0.0;
  for (int n = 0; n <= 4; ++n) worst = std::max(worst, std::abs(u(n) - expected[n]));
  c.require(worst <= 1e-4, "potential error " + fmt(worst));
  c.note("max potential error " + fmt(worst));
  const EvolutionSeq seq = evolutional_sequence(tails.reconstruct(), 5);
  const double gap = seq.layers[5].max_abs_difference(seq.target);
  c.require(gap <= 1e-6, "|U_5 - U_mu| = " + fmt(gap));
  c.note("|U_5 - U_mu| = " + fmt(gap));
}

void c7(Check& c) {
  std::mt19937_64 rng(2024);
  double worst_trip = 0.0;
  double worst_dom = -1e300;
  double worst_eq = 0.0;
  int certified = 0;
  for (int horizon : {3, 5, 8, 12}) {
    for (int k = 0; k < 1000; ++k) {
      const StrategyTree tree = random_tree_of(horizon, rng);
      const ExitDistribution mu = strategy_distribution(tree).first;
      if (!is_embeddable(mu, horizon).embeddable) continue;
      ++certified;
      const StrategyTree root = root_rule_to_tree(build_root_rule(mu, horizon));
      worst_trip = std::max(worst_trip, strategy_distribution(root).first.max_abs_difference(mu));
      const EvolutionSeq seq = evolutional_sequence(mu, horizon);
      const auto run = running_potentials(tree);
      const auto root_run = running_potentials(root);
      for (int t = 0; t <= horizon; ++t) {
        for (int x = -horizon - 1; x <= horizon + 1; ++x) worst_dom = std::max(worst_dom, run[t](x) - seq.layers[t](x));
        worst_eq = std::max(worst_eq, root_run[t].max_abs_difference(seq.layers[t]));
      }
    }
  }
  c.require(certified == 4000, "certified " + std::to_string(certified) + " of 4000");
  c.require(worst_trip <= 1e-9, "round trip error " + fmt(worst_trip));
  c.require(worst_dom <= 1e-9, "running potential exceeds layer by " + fmt(worst_dom));
  c.require(worst_eq <= 1e-9, "Root running potential gap " + fmt(worst_eq));
  c.note("4000 certified, round trip " + fmt(worst_trip) + ", domination " + fmt(worst_dom) + ", Root gap " +
         fmt(worst_eq));
}

void c8(Check& c) {
  for (const auto& g : kGroups) {
    const AgentSolution p = precommitted(g.params, 10, 64, 7);
    const ExitPattern got = classify_pattern(p.tree);
    const std::string tag = "(" + fmt(g.params.alpha_plus) + "," + fmt(g.params.delta_plus) + ")";
    c.require(got == g.pattern, tag + " pattern " + std::string(to_string(got)));
    c.note(tag + " " + std::string(to_string(got)));
    if (g.pattern == ExitPattern::NoEnter) c.near(p.value, 0.0, 1e-12, tag + " value");
  }
  int hit_zero = 0;
  for (const auto& g : kGroups) {
    double prev = 1e300;
    bool zero_before_3 = false;
    for (int k = 0; k <= 20; ++k) {
      CptParams prm = g.params;
      prm.lambda = 1.0 + 0.1 * k;
      const double v = solve_program(prm, 10, {64, 7, 0}).value;
      c.require(v <= prev + 1e-9, "value rises at lambda " + fmt(prm.lambda));
      if (k < 20 && v <= 1e-12) zero_before_3 = true;
      prev = v;
    }
    hit_zero += zero_before_3 ? 1 : 0;
  }
  c.require(hit_zero == 3, std::to_string(hit_zero) + " curves reach 0 before lambda 3");
  c.note(std::to_string(hit_zero) + " curves reach 0 before lambda 3");
  for (const auto& prm : {kGroups[0].params, kGroups[1].params, kGroups[2].params, kGroups[3].params, kTk}) {
    double prev = -1e300;
    for (int t = 1; t <= 12; ++t) {
      const double v = solve_program(prm, t, {64, 7, 0}).value;
      c.require(v >= prev - 1e-9, "value falls at T=" + std::to_string(t));
      prev = v;
    }
  }
  c.note("values non-decreasing in T=1..12");
}

void c9(Check& c) {
  int entered = 0;
  for (std::size_t i = 0; i < kGroups.size(); ++i) {
    const AgentSolution s = sophisticated(kGroups[i].params, 10);
    const AgentSolution n = naive(kGroups[i].params, 10, 64, 7);
    const bool enters = s.tree.stop(0, 0) < 1.0;
    entered += enters ? 1 : 0;
    c.require(enters == (i == 1), "sophisticated entry for group " + std::to_string(i));
    if (i == 1) c.require(s.tree == n.tree, "sophisticated tree differs from naive");
    for (int t = 0; t < 10; ++t) {
      for (int x = -t; x <= t; x += 2) {
        if (n.tree.stop(t, x) == 1.0 && s.tree.stop(t, x) != 1.0) {
          c.require(false, "naive stops but sophisticated continues at (" + std::to_string(t) + "," +
                               std::to_string(x) + ")");
        }
      }
    }
  }
  c.note("sophisticated enters in " + std::to_string(entered) + " group(s); naive stops are sophisticated stops");
  const AgentSolution n = naive(kTk, 10, 64, 7);
  const AgentSolution s = sophisticated(kTk, 10);
  for (int x = -9; x <= 9; x += 2) {
    const Action rule = t_minus_1_rules(kTk, x).action;
    const bool gain = x > 0;
    c.require(rule == (gain ? Action::Stop : Action::Continue), "T-1 rule at " + std::to_string(x));
    c.require(n.tree.stop(9, x) == (gain ? 1.0 : 0.0), "naive layer T-1 at " + std::to_string(x));
    c.require(s.tree.stop(9, x) == (gain ? 1.0 : 0.0), "sophisticated layer T-1 at " + std::to_string(x));
  }
  c.note("TK layer T-1: stop in gains, continue in losses");
}

void c10(Check& c) {
  auto du = [](int n) { return std::pow(n, 0.88) - std::pow(n - 1, 0.88); };
  auto w = [](double p) {
    const double d = 0.61;
    return std::pow(p, d) / std::pow(std::pow(p, d) + std::pow(1 - p, d), 1 / d);
  };
  const double p = std::ldexp(1.0, -10);
  double best_q = 0.0;
  double best = -1e300;
  for (int k = 0; k < 1000000; ++k) {
    const double q = 0.5 * k / 999999.0;
    const double v = du(11) * w(q * p) + du(10) * w((1 - q) * p);
    if (v > best) {
      best = v;
      best_q = q;
    }
  }
  c.near(one_more_round_gain(kTk, 10, p), best_q, 1e-6, "q*_10 vs grid");
  double prev = 0.0;
  for (int t = 5; t <= 15; ++t) {
    const double q = one_more_round_gain(kTk, t, std::ldexp(1.0, -t));
    c.require(q > prev, "q*_T not increasing at T=" + std::to_string(t));
    prev = q;
  }
  for (int t = 10; t <= 30; ++t) {
    c.require(one_more_round_loss(kTk, t, std::ldexp(1.0, -t)) == 0.0, "loss continues at T=" + std::to_string(t));
  }
  c.require(one_more_round_loss(kTk, 2, 0.25) == 0.0, "loss continues at T=2");
  c.note("q*_T increasing on T=5..15; loss side stops at T=2 and T=10..30");
}

void c11(Check& c) {
  const StrategyTree tree = solve_program(kCasino, 5, {64, 7, 0}).tree;
  const SimReport a = simulate(tree, kCasino, 1000000, 11);
  const ExitDistribution exact = strategy_distribution(tree).first;
  double worst = 0.0;
  for (int x = -5; x <= 5; ++x) {
    const auto i = static_cast<std::size_t>(x + 5);
    const double dev = std::abs(a.empirical[x] - exact[x]);
    const double se = a.std_error[i];
    if (dev > 0.0) worst = std::max(worst, se > 0.0 ? dev / se : 1e300);
  }
  c.require(worst <= 3.0, "largest deviation " + fmt(worst) + " standard errors");
  c.note("largest deviation " + fmt(worst) + " SE");
  c.near(a.cpt_value, 0.3369592, 0.005, "empirical CPT");
  c.require(a == simulate(tree, kCasino, 1000000, 11), "rerun differs");
}

void c12(Check& c, bool slow) {
  c.note("T=25 and T=39 entry thresholds not reproduced at desk scale (declared)");
  const CptParams prm = CptParams::symmetric(0.5, 0.95, 1.5);
  std::vector<double> v;
  for (int t = 1; t <= 12; ++t) v.push_back(solve_program(prm, t, {64, 7, 0}).value);
  for (std::size_t i = 1; i < v.size(); ++i) c.require(v[i] >= v[i - 1] - 1e-9, "value falls at T=" + std::to_string(i + 1));
  std::size_t entry = 0;
  while (entry < v.size() && v[entry] <= 1e-12) ++entry;
  c.require(entry + 4 < v.size(), "no positive value early enough to compare increments");
  for (std::size_t i = entry + 2; i + 2 < v.size(); ++i) {
    const double later = v[i + 2] - v[i];
    const double earlier = v[i] - v[i - 2];
    c.require(later <= earlier + 1e-9, "two-step increment grows at T=" + std::to_string(i + 1));
  }
  c.note("T=1..12 non-decreasing, two-step increments shrink after entry at T=" + std::to_string(entry + 1) +
         ", value(12) = " + fmt(v.back()));
  if (slow) {
    const CptParams tk65 = CptParams::symmetric(0.88, 0.65, 2.25);
    int first = 0;
    for (int t = 1; t <= 40 && first == 0; ++t) {
      if (solve_program(tk65, t, {64, 7, 0}).value > 1e-12) first = t;
    }
    c.note("slow: (0.88,0.65,2.25) first enters at T=" + std::to_string(first) + " (published 25)");
  }
}

}  // namespace

int main(int argc, char** argv) {
  bool slow = false;
  for (int i = 1; i < argc; ++i) slow = slow || std::strcmp(argv[i], "--slow") == 0;
  const std::vector<std::pair<int, std::function<void(Check&)>>> criteria{
      {1, c1}, {2, c2},   {3, c3},   {4, c4},   {5, c5},  {6, c6},
      {7, c7},                      {8, c8},   {9, c9},   {10, c10}, {11, c11},
      {12, [slow](Check& c) { c12(c, slow); }}};
  int failed = 0;
  for (const auto& [id, body] : criteria) {
    Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
      body(check);
    } catch (const std::exception& e) {
      check.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %2d: %s (%.1fs) %s\n", id, check.pass() ? "PASS" : "FAIL", secs, check.summary().c_str());
    std::fflush(stdout);
    failed += check.pass() ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
