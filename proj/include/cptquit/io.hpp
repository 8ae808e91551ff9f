#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "cptquit/gamblers.hpp"
#include "cptquit/oracle.hpp"
#include "cptquit/potential.hpp"
#include "cptquit/root_embedding.hpp"
#include "cptquit/simulate.hpp"
#include "cptquit/solver.hpp"

// JSON text formats. Parsers throw InfeasibleError naming the offending field
// or invariant.
namespace cptquit::io {

/// {"horizon": T, "distribution": [{"state": x, "prob": p}, ...]}; states
/// omitted from the list carry no mass. The parsed law is validated.
std::string to_json(const ExitDistribution& dist);
ExitDistribution distribution_from_json(std::string_view text);

/// {"horizon": T, "strategy": [{"t": t, "x": x, "stop_prob": p}, ...]}; nodes
/// omitted from the list keep the StrategyTree defaults.
std::string to_json(const StrategyTree& tree);
StrategyTree strategy_from_json(std::string_view text);

/// {"horizon": T, "rule": [{"x": x, "barrier_time": b, "stop_prob": r}, ...]}
std::string to_json(const RootRule& rule);
RootRule rule_from_json(std::string_view text);

std::string to_json(const SolveResult& result);
SolveResult solve_result_from_json(std::string_view text);

std::string to_json(const AgentSolution& solution);
std::string to_json(const OracleResult& result);
std::string to_json(const SimReport& report);
std::string to_json(const EmbeddabilityCertificate& cert, int horizon);

/// Strategy as CSV rows t,x,stop_prob.
std::string strategy_csv(const StrategyTree& tree);

/// printf %.17g.
std::string format_double(double v);

std::string read_file(const std::filesystem::path& path);

/// Writes through a sibling temporary file and renames it into place.
void write_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace cptquit::io
