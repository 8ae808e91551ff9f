#pragma once

// Internal helpers shared by the library translation units.

#include <cstdint>
#include <span>

#include "cptquit/preferences.hpp"

namespace cptquit::detail {

/// Rounding slack tolerated on probabilities before a contract error.
inline constexpr double kProbSlack = 1e-12;

double weight_unchecked(double p, double delta);
double cpt_value_unchecked(std::span<const double> mass, int first_state, const CptParams& p);
double tail_objective_unchecked(std::span<const double> x, std::span<const double> y,
                                const CptParams& p);

/// SplitMix64 finalizer; used to derive independent stream seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix64(mix64(seed) ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

}  // namespace cptquit::detail
