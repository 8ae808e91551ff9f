#include "cptquit/cli.hpp"

#include <chrono>
#include <cmath>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cptquit/errors.hpp"
#include "cptquit/gamblers.hpp"
#include "cptquit/io.hpp"
#include "cptquit/oracle.hpp"
#include "cptquit/potential.hpp"
#include "cptquit/simulate.hpp"
#include "cptquit/solver.hpp"

namespace cptquit::cli {

namespace {

using nlohmann::json;

struct Config {
  CptParams params;
  int horizon = 0;
  int restarts = 64;
  std::uint64_t seed = 0;
  std::string output;
  std::string format = "json";
  // oracle
  std::string method = "exhaustive";
  double grid_step = 0.005;
  double budget = kDefaultGridBudget;
  // feasible / embed / simulate
  std::string dist_path;
  std::string strategy_path;
  std::string strategy_output;
  std::uint64_t paths = 1000000;
  // sweep
  std::string vary = "horizon";
  double from = 1.0;
  double to = 1.0;
  double step = 0.0;
  // one-more-round
  std::string which = "gain";
  std::optional<double> p;
  int n = 1;
  double p_n = 0.0;
  double pbar_next = 0.0;
};

void add_params(CLI::App* cmd, Config& c) {
  cmd->add_option("--alpha-plus", c.params.alpha_plus, "Utility exponent for gains")->capture_default_str();
  cmd->add_option("--alpha-minus", c.params.alpha_minus, "Utility exponent for losses")->capture_default_str();
  cmd->add_option("--delta-plus", c.params.delta_plus, "Weighting parameter for gains")->capture_default_str();
  cmd->add_option("--delta-minus", c.params.delta_minus, "Weighting parameter for losses")->capture_default_str();
  cmd->add_option("--lambda", c.params.lambda, "Loss aversion")->capture_default_str();
}

void add_horizon(CLI::App* cmd, Config& c, bool required) {
  auto* opt = cmd->add_option("--horizon,-T", c.horizon, "Number of bets")->check(CLI::PositiveNumber);
  if (required) opt->required();
}

void add_search(CLI::App* cmd, Config& c) {
  cmd->add_option("--restarts", c.restarts, "Random starts of the solver")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--seed", c.seed, "Seed of the random starts")->required();
}

void add_output(CLI::App* cmd, Config& c) {
  cmd->add_option("--output,-o", c.output, "Output file (stdout when omitted)");
  cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
}

class Emitter {
 public:
  Emitter(const Config& c, std::ostream& out) : c_(c), out_(out) {}

  void operator()(const std::string& content) const {
    if (c_.output.empty()) {
      out_ << content;
      if (!content.empty() && content.back() != '\n') out_ << '\n';
    } else {
      io::write_atomic(c_.output, content);
    }
  }

 private:
  const Config& c_;
  std::ostream& out_;
};

ExitDistribution load_distribution(const Config& c) {
  ExitDistribution dist = io::distribution_from_json(io::read_file(c.dist_path));
  if (c.horizon == 0 || c.horizon == dist.horizon()) return dist;
  ExitDistribution widened(c.horizon);
  for (int x = -dist.horizon(); x <= dist.horizon(); ++x) {
    if (dist[x] != 0.0 && std::abs(x) > c.horizon) {
      throw InfeasibleError("distribution has mass at state " + std::to_string(x) + " beyond horizon " +
                            std::to_string(c.horizon));
    }
    if (std::abs(x) <= c.horizon) widened.at(x) = dist[x];
  }
  return widened;
}

int cmd_solve(const Config& c, const Emitter& emit) {
  SolveOptions options;
  options.restarts = c.restarts;
  options.seed = c.seed;
  const SolveResult result = solve_program(c.params, c.horizon, options);
  emit(c.format == "csv" ? io::strategy_csv(result.tree) : io::to_json(result));
  return kExitOk;
}

int cmd_agent(const Config& c, const Emitter& emit, AgentKind kind) {
  const AgentSolution s = kind == AgentKind::Naive ? naive(c.params, c.horizon, c.restarts, c.seed)
                                                   : sophisticated(c.params, c.horizon);
  emit(c.format == "csv" ? io::strategy_csv(s.tree) : io::to_json(s));
  return kExitOk;
}

int cmd_oracle(const Config& c, const Emitter& emit) {
  const OracleResult r = c.method == "grid" ? grid_randomized(c.params, c.horizon, c.grid_step, c.budget)
                                            : exhaustive_markov(c.params, c.horizon);
  emit(c.format == "csv" ? io::strategy_csv(r.tree) : io::to_json(r));
  return kExitOk;
}

int cmd_feasible(const Config& c, const Emitter& emit, std::ostream& err) {
  const ExitDistribution dist = load_distribution(c);
  const int horizon = dist.horizon();
  if (horizon < 1) throw InfeasibleError("feasible: horizon must be >= 1");
  const EmbeddabilityCertificate cert = is_embeddable(dist, horizon);
  emit(io::to_json(cert, horizon));
  if (cert.embeddable) return kExitOk;
  err << "not embeddable by horizon " << horizon << "; violated states:";
  for (const auto& v : cert.violations) err << " " << v.state << " (slack " << v.slack << ")";
  err << "\n";
  return kExitInfeasible;
}

int cmd_embed(const Config& c, const Emitter& emit) {
  const ExitDistribution dist = load_distribution(c);
  const RootRule rule = build_root_rule(dist, dist.horizon());
  emit(io::to_json(rule));
  if (!c.strategy_output.empty()) io::write_atomic(c.strategy_output, io::to_json(root_rule_to_tree(rule)));
  return kExitOk;
}

int cmd_simulate(const Config& c, const Emitter& emit) {
  StrategyTree tree;
  if (!c.strategy_path.empty()) {
    tree = io::strategy_from_json(io::read_file(c.strategy_path));
  } else {
    if (c.horizon < 1) throw ContractError("simulate: pass --strategy or --horizon");
    SolveOptions options;
    options.restarts = c.restarts;
    options.seed = c.seed;
    tree = solve_program(c.params, c.horizon, options).tree;
  }
  const SimReport report = simulate(tree, c.params, c.paths, c.seed);
  if (c.format == "csv") {
    std::ostringstream csv;
    csv << "state,count,prob,std_error\n";
    for (int x = -report.horizon; x <= report.horizon; ++x) {
      const auto i = static_cast<std::size_t>(x + report.horizon);
      csv << x << "," << report.counts[i] << "," << io::format_double(report.empirical[x]) << ","
          << io::format_double(report.std_error[i]) << "\n";
    }
    emit(csv.str());
  } else {
    emit(io::to_json(report));
  }
  return kExitOk;
}

int cmd_sweep(const Config& c, const Emitter& emit) {
  std::vector<double> grid;
  if (c.vary == "horizon") {
    const double step = c.step > 0.0 ? std::round(c.step) : 1.0;
    if (step < 1.0 || c.from < 1.0) throw ContractError("sweep: horizons must be integers >= 1");
    for (double v = std::round(c.from); v <= c.to + 1e-9; v += step) grid.push_back(v);
  } else {
    const double step = c.step > 0.0 ? c.step : 0.1;
    const auto count = static_cast<long>(std::floor((c.to - c.from) / step + 1e-9));
    for (long k = 0; k <= count; ++k) grid.push_back(c.from + step * static_cast<double>(k));
  }
  if (grid.empty()) throw ContractError("sweep: empty grid");
  std::ostringstream csv;
  json rows = json::array();
  csv << "grid_value,value,residual,wall_seconds\n";
  for (double g : grid) {
    CptParams params = c.params;
    int horizon = c.horizon;
    if (c.vary == "horizon") {
      horizon = static_cast<int>(g);
    } else {
      params.lambda = g;
      if (horizon < 1) throw ContractError("sweep --vary lambda needs --horizon");
    }
    SolveOptions options;
    options.restarts = c.restarts;
    options.seed = c.seed;
    const SolveResult r = solve_program(params, horizon, options);
    csv << io::format_double(g) << "," << io::format_double(r.value) << "," << io::format_double(r.diagnostics.residual)
        << "," << io::format_double(r.diagnostics.wall_seconds) << "\n";
    rows.push_back({{"grid_value", g},
                    {"value", r.value},
                    {"residual", r.diagnostics.residual},
                    {"wall_seconds", r.diagnostics.wall_seconds}});
  }
  emit(c.format == "json" ? json{{"vary", c.vary}, {"rows", rows}}.dump(2) : csv.str());
  return kExitOk;
}

int cmd_one_more_round(const Config& c, const Emitter& emit) {
  json doc{{"case", c.which}};
  double q = 0.0;
  if (c.which == "interior") {
    q = one_more_round_interior(c.params, c.n, c.p_n, c.pbar_next);
    doc["n"] = c.n;
    doc["p_n"] = c.p_n;
    doc["pbar_next"] = c.pbar_next;
  } else {
    if (c.horizon < 1) throw ContractError("one-more-round: --horizon is required for the gain and loss cases");
    const double p = c.p.value_or(std::ldexp(1.0, -c.horizon));
    q = c.which == "gain" ? one_more_round_gain(c.params, c.horizon, p) : one_more_round_loss(c.params, c.horizon, p);
    doc["horizon"] = c.horizon;
    doc["p"] = p;
  }
  doc["q_star"] = q;
  doc["stop_prob"] = 1.0 - 2.0 * q;
  emit(doc.dump(2));
  return kExitOk;
}

int cmd_enter_one_bet(const Config& c, const Emitter& emit) {
  const EntryDecision d = enter_one_bet(c.params);
  emit(json{{"q_star", d.q}, {"value", d.value}, {"enters", d.value > 0.0}}.dump(2));
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Config c;
  CLI::App app{"Optimal stopping for a CPT gambler in a fair casino"};
  app.require_subcommand(1);

  auto* solve = app.add_subcommand("solve", "Precommitted optimum via the tail program");
  add_params(solve, c);
  add_horizon(solve, c, true);
  add_search(solve, c);
  add_output(solve, c);

  auto* naive_cmd = app.add_subcommand("naive", "Strategy actually played by a naive gambler");
  add_params(naive_cmd, c);
  add_horizon(naive_cmd, c, true);
  add_search(naive_cmd, c);
  add_output(naive_cmd, c);

  auto* soph = app.add_subcommand("sophisticated", "Backward-induction strategy of a sophisticated gambler");
  add_params(soph, c);
  add_horizon(soph, c, true);
  add_output(soph, c);

  auto* oracle = app.add_subcommand("oracle", "Brute-force baselines");
  add_params(oracle, c);
  add_horizon(oracle, c, true);
  add_output(oracle, c);
  oracle->add_option("--method", c.method, "exhaustive or grid")->check(CLI::IsMember({"exhaustive", "grid"}))->capture_default_str();
  oracle->add_option("--grid-step", c.grid_step, "Grid step for stop probabilities")->capture_default_str();
  oracle->add_option("--budget", c.budget, "Maximum number of grid candidates")->capture_default_str();

  auto* feasible = app.add_subcommand("feasible", "Check that a distribution can be reached within the horizon");
  feasible->add_option("--dist", c.dist_path, "Distribution file")->required()->check(CLI::ExistingFile);
  add_horizon(feasible, c, false);
  add_output(feasible, c);

  auto* embed = app.add_subcommand("embed", "Root rule that reaches a distribution");
  embed->add_option("--dist", c.dist_path, "Distribution file")->required()->check(CLI::ExistingFile);
  add_horizon(embed, c, false);
  add_output(embed, c);
  embed->add_option("--strategy-output", c.strategy_output, "Also write the node strategy here");

  auto* sim = app.add_subcommand("simulate", "Monte Carlo run of a strategy");
  add_params(sim, c);
  add_horizon(sim, c, false);
  add_search(sim, c);
  add_output(sim, c);
  sim->add_option("--strategy", c.strategy_path, "Strategy file (default: solve first)")->check(CLI::ExistingFile);
  sim->add_option("--paths", c.paths, "Number of paths")->check(CLI::PositiveNumber)->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "Optimal values over a grid of horizons or lambdas (CSV)");
  add_params(sweep, c);
  add_horizon(sweep, c, false);
  add_search(sweep, c);
  add_output(sweep, c);
  sweep->add_option("--vary", c.vary, "horizon or lambda")->check(CLI::IsMember({"horizon", "lambda"}))->capture_default_str();
  sweep->add_option("--from", c.from, "First grid value")->required();
  sweep->add_option("--to", c.to, "Last grid value")->required();
  sweep->add_option("--step", c.step, "Grid step (1 for horizon, 0.1 for lambda)");

  auto* omr = app.add_subcommand("one-more-round", "Decision when one extra bet is offered");
  add_params(omr, c);
  add_horizon(omr, c, false);
  add_output(omr, c);
  omr->add_option("--case", c.which, "gain, loss or interior")->check(CLI::IsMember({"gain", "loss", "interior"}))->capture_default_str();
  omr->add_option("--p", c.p, "Exit probability at +-T (default 2^-T)");
  omr->add_option("--n", c.n, "Intermediate gain state")->capture_default_str();
  omr->add_option("--p-n", c.p_n, "Exit probability at n");
  omr->add_option("--pbar-next", c.pbar_next, "Exit probability above n");

  auto* entry = app.add_subcommand("enter-one-bet", "Best single randomized bet");
  add_params(entry, c);
  add_output(entry, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  if (sweep->parsed() && !sweep->count("--format")) c.format = "csv";

  const Emitter emit(c, out);
  try {
    if (solve->parsed()) return cmd_solve(c, emit);
    if (naive_cmd->parsed()) return cmd_agent(c, emit, AgentKind::Naive);
    if (soph->parsed()) return cmd_agent(c, emit, AgentKind::Sophisticated);
    if (oracle->parsed()) return cmd_oracle(c, emit);
    if (feasible->parsed()) return cmd_feasible(c, emit, err);
    if (embed->parsed()) return cmd_embed(c, emit);
    if (sim->parsed()) return cmd_simulate(c, emit);
    if (sweep->parsed()) return cmd_sweep(c, emit);
    if (omr->parsed()) return cmd_one_more_round(c, emit);
    if (entry->parsed()) return cmd_enter_one_bet(c, emit);
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const ContractError& e) {
    err << "usage: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace cptquit::cli
