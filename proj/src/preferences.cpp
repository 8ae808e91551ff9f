#include "cptquit/preferences.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cptquit/errors.hpp"
#include "detail.hpp"

namespace cptquit {

void CptParams::validate() const {
  auto in_unit = [](double v) { return v > 0.0 && v <= 1.0; };
  std::ostringstream msg;
  if (!in_unit(alpha_plus)) msg << "alpha_plus=" << alpha_plus << " not in (0,1]; ";
  if (!in_unit(alpha_minus)) msg << "alpha_minus=" << alpha_minus << " not in (0,1]; ";
  if (!in_unit(delta_plus)) msg << "delta_plus=" << delta_plus << " not in (0,1]; ";
  if (!in_unit(delta_minus)) msg << "delta_minus=" << delta_minus << " not in (0,1]; ";
  if (!(lambda >= 1.0)) msg << "lambda=" << lambda << " below 1; ";
  if (!msg.str().empty()) throw ContractError("invalid CptParams: " + msg.str());
}

double utility(int n, Side side, const CptParams& params) {
  if (n < 0) throw ContractError("utility: negative argument " + std::to_string(n));
  if (n == 0) return 0.0;
  return std::pow(static_cast<double>(n), params.alpha(side));
}

namespace detail {

double weight_unchecked(double p, double delta) {
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  if (delta == 1.0) return p;
  const double a = std::pow(p, delta);
  const double b = std::pow(1.0 - p, delta);
  return a / std::pow(a + b, 1.0 / delta);
}

}  // namespace detail

double weight(double p, Side side, const CptParams& params) {
  if (!(p >= -detail::kProbSlack && p <= 1.0 + detail::kProbSlack)) {
    throw ContractError("weight: probability outside [0,1]");
  }
  return detail::weight_unchecked(p, params.delta(side));
}

double weight_derivative(double p, Side side, const CptParams& params) {
  if (!(p >= 0.0 && p <= 1.0)) throw ContractError("weight_derivative: probability outside [0,1]");
  const double d = params.delta(side);
  if (d == 1.0) return 1.0;
  if (p == 0.0 || p == 1.0) return std::numeric_limits<double>::infinity();
  const double a = std::pow(p, d);
  const double b = std::pow(1.0 - p, d);
  const double s = a + b;
  const double w = a / std::pow(s, 1.0 / d);
  // d/dp log w = d/p - (p^(d-1) - (1-p)^(d-1)) / s
  return w * (d / p - (a / p - b / (1.0 - p)) / s);
}

// ---------------------------------------------------------------------------

ExitDistribution::ExitDistribution(int horizon) : horizon_(horizon) {
  if (horizon < 0) throw ContractError("ExitDistribution: negative horizon");
  mass_.assign(2 * static_cast<std::size_t>(horizon) + 1, 0.0);
}

ExitDistribution::ExitDistribution(int horizon, std::vector<double> mass)
    : horizon_(horizon), mass_(std::move(mass)) {
  if (horizon < 0 || mass_.size() != 2 * static_cast<std::size_t>(horizon) + 1) {
    throw ContractError("ExitDistribution: mass vector must have 2T+1 entries");
  }
}

ExitDistribution ExitDistribution::point_mass(int horizon, int state) {
  ExitDistribution d(horizon);
  d.at(state) = 1.0;
  return d;
}

double ExitDistribution::operator[](int state) const {
  if (state < -horizon_ || state > horizon_) return 0.0;
  return mass_[static_cast<std::size_t>(state + horizon_)];
}

double& ExitDistribution::at(int state) {
  if (state < -horizon_ || state > horizon_) {
    throw ContractError("ExitDistribution: state " + std::to_string(state) + " outside [-T,T]");
  }
  return mass_[static_cast<std::size_t>(state + horizon_)];
}

double ExitDistribution::total() const {
  double s = 0.0;
  for (double m : mass_) s += m;
  return s;
}

double ExitDistribution::mean() const {
  double s = 0.0;
  for (int x = -horizon_; x <= horizon_; ++x) s += x * (*this)[x];
  return s;
}

void ExitDistribution::validate(double tol) const {
  for (int x = -horizon_; x <= horizon_; ++x) {
    const double m = (*this)[x];
    if (!std::isfinite(m) || m < -tol) {
      throw InfeasibleError("exit distribution: negative or non-finite mass at state " +
                            std::to_string(x));
    }
  }
  if (std::abs(total() - 1.0) > tol) {
    throw InfeasibleError("exit distribution: masses sum to " + std::to_string(total()) +
                          ", not 1");
  }
  if (std::abs(mean()) > tol) {
    throw InfeasibleError("exit distribution: mean " + std::to_string(mean()) +
                          " is not 0 (law must be centred)");
  }
}

double ExitDistribution::max_abs_difference(const ExitDistribution& other) const {
  const int t = std::max(horizon_, other.horizon_);
  double d = 0.0;
  for (int x = -t; x <= t; ++x) d = std::max(d, std::abs((*this)[x] - other[x]));
  return d;
}

// ---------------------------------------------------------------------------

TailVectors TailVectors::zeros(int horizon) {
  return {std::vector<double>(horizon, 0.0), std::vector<double>(horizon, 0.0)};
}

TailVectors TailVectors::from_distribution(const ExitDistribution& dist) {
  const int t = dist.horizon();
  TailVectors tails = zeros(t);
  double up = 0.0;
  double down = 0.0;
  for (int n = t; n >= 1; --n) {
    up += dist[n];
    down += dist[-n];
    tails.x[n - 1] = up;
    tails.y[n - 1] = down;
  }
  return tails;
}

ExitDistribution TailVectors::reconstruct() const {
  const int t = horizon();
  ExitDistribution dist(t);
  for (int n = 1; n <= t; ++n) {
    const double xn1 = n < t ? x[n] : 0.0;
    const double yn1 = n < t ? y[n] : 0.0;
    dist.at(n) = x[n - 1] - xn1;
    dist.at(-n) = y[n - 1] - yn1;
  }
  dist.at(0) = t > 0 ? 1.0 - x[0] - y[0] : 1.0;
  return dist;
}

double TailVectors::monotonicity_violation() const {
  double v = 0.0;
  for (const auto* seq : {&x, &y}) {
    if (seq->empty()) continue;
    v = std::max(v, seq->front() - 1.0);
    v = std::max(v, -seq->back());
    for (std::size_t i = 0; i + 1 < seq->size(); ++i) v = std::max(v, (*seq)[i + 1] - (*seq)[i]);
  }
  return v;
}

// ---------------------------------------------------------------------------

namespace detail {

double cpt_value_unchecked(std::span<const double> mass, int first_state, const CptParams& p) {
  const int last_state = first_state + static_cast<int>(mass.size()) - 1;
  auto at = [&](int state) {
    return state < first_state || state > last_state
               ? 0.0
               : mass[static_cast<std::size_t>(state - first_state)];
  };
  double value = 0.0;
  // Gains: decumulative tails P(X >= n).
  double tail_above = 0.0;  // P(X >= n+1)
  double w_above = 0.0;
  for (int n = last_state; n >= 1; --n) {
    const double pn = tail_above + at(n);
    const double wn = weight_unchecked(pn, p.delta_plus);
    value += std::pow(static_cast<double>(n), p.alpha_plus) * (wn - w_above);
    tail_above = pn;
    w_above = wn;
  }
  // Losses: cumulative tails P(X <= -n).
  double tail_below = 0.0;
  double w_below = 0.0;
  double losses = 0.0;
  for (int n = -first_state; n >= 1; --n) {
    const double pn = tail_below + at(-n);
    const double wn = weight_unchecked(pn, p.delta_minus);
    losses += std::pow(static_cast<double>(n), p.alpha_minus) * (wn - w_below);
    tail_below = pn;
    w_below = wn;
  }
  return value - p.lambda * losses;
}

double tail_objective_unchecked(std::span<const double> x, std::span<const double> y,
                                const CptParams& p) {
  double gains = 0.0;
  double losses = 0.0;
  double prev_up = 0.0;
  double prev_down = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double n = static_cast<double>(i + 1);
    const double up = std::pow(n, p.alpha_plus);
    const double down = std::pow(n, p.alpha_minus);
    gains += (up - prev_up) * weight_unchecked(x[i], p.delta_plus);
    losses += (down - prev_down) * weight_unchecked(y[i], p.delta_minus);
    prev_up = up;
    prev_down = down;
  }
  return gains - p.lambda * losses;
}

}  // namespace detail

double cpt_value(std::span<const double> mass, int first_state, const CptParams& params) {
  for (double m : mass) {
    if (!(m >= -detail::kProbSlack)) throw ContractError("cpt_value: negative mass");
  }
  return detail::cpt_value_unchecked(mass, first_state, params);
}

double cpt_value(const ExitDistribution& dist, const CptParams& params) {
  return cpt_value(dist.masses(), -dist.horizon(), params);
}

double objective_from_tails(const TailVectors& tails, int shift, const CptParams& params) {
  if (tails.x.size() != tails.y.size()) throw ContractError("objective_from_tails: length mismatch");
  if (tails.monotonicity_violation() > 1e-9) {
    throw ContractError("objective_from_tails: tails are not monotone within [0,1]");
  }
  if (shift == 0) return detail::tail_objective_unchecked(tails.x, tails.y, params);
  const ExitDistribution dist = tails.reconstruct();
  return detail::cpt_value_unchecked(dist.masses(), shift - dist.horizon(), params);
}

}  // namespace cptquit
