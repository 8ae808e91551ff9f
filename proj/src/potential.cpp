#include "cptquit/potential.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "cptquit/errors.hpp"

namespace cptquit {

Potential::Potential(int horizon) : horizon_(horizon) {
  if (horizon < 0) throw ContractError("Potential: negative horizon");
  values_.resize(2 * static_cast<std::size_t>(horizon) + 3);
  for (int x = -horizon - 1; x <= horizon + 1; ++x) {
    values_[static_cast<std::size_t>(x + horizon + 1)] = std::abs(x);
  }
}

double Potential::operator()(int x) const {
  if (x < -horizon_ - 1 || x > horizon_ + 1) return std::abs(x);
  return values_[static_cast<std::size_t>(x + horizon_ + 1)];
}

void Potential::set(int x, double value) {
  if (x < -horizon_ - 1 || x > horizon_ + 1) {
    throw ContractError("Potential: state " + std::to_string(x) + " outside stored window");
  }
  values_[static_cast<std::size_t>(x + horizon_ + 1)] = value;
}

double Potential::max_abs_difference(const Potential& other) const {
  const int t = std::max(horizon_, other.horizon_) + 1;
  double d = 0.0;
  for (int x = -t; x <= t; ++x) d = std::max(d, std::abs((*this)(x) - other(x)));
  return d;
}

Potential potential_from_dist(const ExitDistribution& mu) {
  const int t = mu.horizon();
  Potential u(t);
  for (int x = -t - 1; x <= t + 1; ++x) {
    double v = 0.0;
    for (int y = -t; y <= t; ++y) v += std::abs(x - y) * mu[y];
    u.set(x, v);
  }
  return u;
}

ExitDistribution dist_from_potential(const Potential& potential) {
  const int t = potential.horizon();
  ExitDistribution mu(t);
  double clipped = 0.0;
  for (int x = -t; x <= t; ++x) {
    double m = 0.5 * potential.curvature(x);
    if (m < 0.0) {
      if (m < -1e-12) {
        throw InfeasibleError("potential is not convex at state " + std::to_string(x) +
                              " (implied mass " + std::to_string(m) + ")");
      }
      clipped -= m;
      m = 0.0;
    }
    mu.at(x) = m;
  }
  for (int x : {-t - 1, t + 1}) {
    if (std::abs(potential(x) - std::abs(x)) > kPotentialTol) {
      throw InfeasibleError("potential does not equal |x| at the window edge " + std::to_string(x));
    }
  }
  if (clipped > 0.0) {
    const double total = mu.total();
    for (double& m : mu.masses_mutable()) m /= total;
  }
  return mu;
}

Potential potential_from_tails(const TailVectors& tails) {
  const int t = tails.horizon();
  Potential u(t);
  double sum_x = 0.0;  // sum_{j=n+1..T} x_j
  double sum_y = 0.0;
  for (int n = t; n >= 0; --n) {
    u.set(n, 2.0 * sum_x + n);
    if (n > 0) u.set(-n, 2.0 * sum_y + n);
    if (n >= 1) {
      sum_x += tails.x[n - 1];
      sum_y += tails.y[n - 1];
    }
  }
  return u;
}

namespace {

ExitDistribution widen(const ExitDistribution& mu, int horizon) {
  if (mu.horizon() == horizon) return mu;
  for (int x = -mu.horizon(); x <= mu.horizon(); ++x) {
    if (std::abs(x) > horizon && mu[x] > 0.0) {
      throw ContractError("law has mass at state " + std::to_string(x) + " beyond horizon " +
                          std::to_string(horizon));
    }
  }
  ExitDistribution out(horizon);
  for (int x = -horizon; x <= horizon; ++x) out.at(x) = mu[x];
  return out;
}

}  // namespace

EvolutionSeq evolutional_sequence(const ExitDistribution& mu, int horizon) {
  if (horizon < 0) throw ContractError("evolutional_sequence: negative horizon");
  EvolutionSeq seq;
  seq.horizon = horizon;
  seq.target = potential_from_dist(widen(mu, horizon));
  seq.layers.reserve(static_cast<std::size_t>(horizon) + 1);
  seq.layers.emplace_back(horizon);
  for (int t = 1; t <= horizon; ++t) {
    const Potential& prev = seq.layers.back();
    Potential next(horizon);
    for (int x = -horizon - 1; x <= horizon + 1; ++x) {
      next.set(x, std::min(0.5 * (prev(x - 1) + prev(x + 1)), seq.target(x)));
    }
    seq.layers.push_back(std::move(next));
  }
  return seq;
}

EmbeddabilityCertificate is_embeddable(const ExitDistribution& mu, int horizon) {
  if (horizon < 1) throw ContractError("is_embeddable: horizon must be >= 1");
  const EvolutionSeq seq = evolutional_sequence(mu, horizon);
  const Potential& before_last = seq.layers[static_cast<std::size_t>(horizon - 1)];
  EmbeddabilityCertificate cert;
  for (int x = -(horizon - 2); x <= horizon - 2; x += 2) {
    const double rhs = 0.5 * (before_last(x - 1) + before_last(x + 1));
    StateSlack s{x, rhs - seq.target(x)};
    cert.checked.push_back(s);
    if (s.slack < -kPotentialTol) cert.violations.push_back(s);
  }
  cert.embeddable = cert.violations.empty();
  return cert;
}

bool evolution_reaches_target(const EvolutionSeq& seq, double tol) {
  return seq.layers.back().max_abs_difference(seq.target) <= tol;
}

}  // namespace cptquit
