#pragma once

#include <vector>

#include "cptquit/preferences.hpp"

namespace cptquit {

/// Absolute tolerance for equality of potential values (values are O(T)).
inline constexpr double kPotentialTol = 1e-9;

/// Potential U(x) = E|x - X| of a centred integer law, sampled on the integer
/// window [-(T+1), T+1]. Outside the window the value is |x|.
class Potential {
 public:
  Potential() = default;
  explicit Potential(int horizon);  // U(x) = |x|

  int horizon() const { return horizon_; }
  double operator()(int x) const;
  void set(int x, double value);

  /// Second difference U(x+1) + U(x-1) - 2 U(x), i.e. twice the mass at x.
  double curvature(int x) const { return (*this)(x + 1) + (*this)(x - 1) - 2.0 * (*this)(x); }

  double max_abs_difference(const Potential& other) const;

 private:
  int horizon_ = 0;
  std::vector<double> values_;
};

/// Evolutional functions U_0 .. U_T of a target law together with its potential.
struct EvolutionSeq {
  int horizon = 0;
  Potential target;
  std::vector<Potential> layers;  // layers[t] = U_t, t = 0..T
};

struct StateSlack {
  int state = 0;
  /// Right-hand side minus left-hand side; negative means violated.
  double slack = 0.0;
};

/// Outcome of the bounded-horizon embeddability test.
struct EmbeddabilityCertificate {
  bool embeddable = false;
  std::vector<StateSlack> checked;     // every tested state, in increasing order
  std::vector<StateSlack> violations;  // subset with slack < -kPotentialTol
};

Potential potential_from_dist(const ExitDistribution& mu);

/// Inverse of potential_from_dist. Throws InfeasibleError when U is not
/// convex beyond rounding (negative mass below -1e-12).
ExitDistribution dist_from_potential(const Potential& potential);

/// Closed form of the potential in terms of the tail vectors.
Potential potential_from_tails(const TailVectors& tails);

/// U_0 = |x|, U_t = min((U_{t-1}(x-1) + U_{t-1}(x+1)) / 2, U_mu(x)).
/// Requires mu supported on [-T, T].
EvolutionSeq evolutional_sequence(const ExitDistribution& mu, int horizon);

/// Checks U_mu(x) <= (U_{T-1}(x-1) + U_{T-1}(x+1)) / 2 for x = -(T-2), -(T-4), ..., T-2.
EmbeddabilityCertificate is_embeddable(const ExitDistribution& mu, int horizon);

/// Second characterisation: U_T == U_mu at every grid point.
bool evolution_reaches_target(const EvolutionSeq& seq, double tol = kPotentialTol);

}  // namespace cptquit
