#pragma once

#include <span>
#include <string>
#include <vector>

namespace cptquit {

enum class Side { Gain, Loss };

/// Preference parameters of a CPT gambler. The reference point is the
/// initial wealth and is not stored.
struct CptParams {
  double alpha_plus = 0.88;
  double alpha_minus = 0.88;
  double delta_plus = 0.61;
  double delta_minus = 0.69;
  double lambda = 2.25;

  /// Same exponents on both sides.
  static CptParams symmetric(double alpha, double delta, double lambda) {
    return {alpha, alpha, delta, delta, lambda};
  }

  /// Throws ContractError unless every exponent lies in (0, 1] and lambda >= 1.
  void validate() const;

  double alpha(Side s) const { return s == Side::Gain ? alpha_plus : alpha_minus; }
  double delta(Side s) const { return s == Side::Gain ? delta_plus : delta_minus; }

  bool operator==(const CptParams&) const = default;
};

/// Unsigned utility u_+(n) = n^alpha_+ or u_-(n) = n^alpha_-.
/// Loss aversion is applied by the aggregation, never here.
double utility(int n, Side side, const CptParams& params);

/// Inverse-S probability weighting p^d / (p^d + (1-p)^d)^(1/d).
double weight(double p, Side side, const CptParams& params);

/// First derivative of `weight`; +infinity at p = 0 when delta < 1.
double weight_derivative(double p, Side side, const CptParams& params);

/// Law of the accumulated gain/loss at exit, stored densely on [-T, T].
class ExitDistribution {
 public:
  ExitDistribution() = default;
  explicit ExitDistribution(int horizon);
  /// `mass` holds the probabilities of -T, ..., T in order.
  ExitDistribution(int horizon, std::vector<double> mass);

  static ExitDistribution point_mass(int horizon, int state = 0);

  int horizon() const { return horizon_; }
  double operator[](int state) const;
  double& at(int state);
  std::span<const double> masses() const { return mass_; }
  std::vector<double>& masses_mutable() { return mass_; }

  double total() const;
  double mean() const;

  /// Throws InfeasibleError naming the first violated invariant
  /// (nonnegativity, unit total, zero mean).
  void validate(double tol = 1e-9) const;

  double max_abs_difference(const ExitDistribution& other) const;

  bool operator==(const ExitDistribution&) const = default;

 private:
  int horizon_ = 0;
  std::vector<double> mass_;
};

/// Decision variables of the quantile program: x[n-1] = P(X >= n) and
/// y[n-1] = P(X <= -n) for n = 1..T.
struct TailVectors {
  std::vector<double> x;
  std::vector<double> y;

  int horizon() const { return static_cast<int>(x.size()); }
  static TailVectors zeros(int horizon);
  static TailVectors from_distribution(const ExitDistribution& dist);
  ExitDistribution reconstruct() const;

  /// Largest breach of 1 >= x_1 >= ... >= x_T >= 0 (and the same for y).
  double monotonicity_violation() const;

  bool operator==(const TailVectors&) const = default;
};

/// CPT value of an integer law whose masses start at `first_state`.
/// The law need not be centred.
double cpt_value(std::span<const double> mass, int first_state, const CptParams& params);
double cpt_value(const ExitDistribution& dist, const CptParams& params);

/// Objective of the tail program. With shift == 0 this is the closed form in
/// the tails; otherwise the law is rebuilt, moved by `shift`, and valued with
/// the reference point kept at the initial wealth.
double objective_from_tails(const TailVectors& tails, int shift, const CptParams& params);

}  // namespace cptquit
