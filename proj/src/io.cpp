#include "cptquit/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "cptquit/errors.hpp"

namespace cptquit::io {

using nlohmann::json;

namespace {

json parse(std::string_view text, std::string_view what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InfeasibleError(std::string(what) + ": not valid JSON (" + e.what() + ")");
  }
}

const json& field(const json& obj, const char* key, std::string_view what) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw InfeasibleError(std::string(what) + ": missing field '" + key + "'");
  }
  return obj.at(key);
}

int int_field(const json& obj, const char* key, std::string_view what) {
  const json& v = field(obj, key, what);
  if (!v.is_number_integer()) throw InfeasibleError(std::string(what) + ": field '" + key + "' must be an integer");
  return v.get<int>();
}

double number_field(const json& obj, const char* key, std::string_view what) {
  const json& v = field(obj, key, what);
  if (!v.is_number()) throw InfeasibleError(std::string(what) + ": field '" + key + "' must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw InfeasibleError(std::string(what) + ": field '" + key + "' is not finite");
  return d;
}

const json& array_field(const json& obj, const char* key, std::string_view what) {
  const json& v = field(obj, key, what);
  if (!v.is_array()) throw InfeasibleError(std::string(what) + ": field '" + key + "' must be a list");
  return v;
}

int horizon_field(const json& obj, std::string_view what) {
  const int t = int_field(obj, "horizon", what);
  if (t < 0) throw InfeasibleError(std::string(what) + ": horizon must be >= 0");
  return t;
}

json distribution_list(const ExitDistribution& dist) {
  json list = json::array();
  for (int x = -dist.horizon(); x <= dist.horizon(); ++x) list.push_back({{"state", x}, {"prob", dist[x]}});
  return list;
}

json strategy_list(const StrategyTree& tree) {
  json list = json::array();
  for (int t = 0; t <= tree.horizon(); ++t) {
    for (int x = -t; x <= t; x += 2) list.push_back({{"t", t}, {"x", x}, {"stop_prob", tree.stop(t, x)}});
  }
  return list;
}

json rule_list(const RootRule& rule) {
  json list = json::array();
  for (int x = -rule.horizon; x <= rule.horizon; ++x) {
    list.push_back({{"x", x}, {"barrier_time", rule.barrier_at(x)}, {"stop_prob", rule.stop_at(x)}});
  }
  return list;
}

ExitDistribution parse_distribution(const json& doc, std::string_view what) {
  const int horizon = horizon_field(doc, what);
  ExitDistribution dist(horizon);
  std::set<int> seen;
  for (const json& entry : array_field(doc, "distribution", what)) {
    const int state = int_field(entry, "state", what);
    const double prob = number_field(entry, "prob", what);
    if (state < -horizon || state > horizon) {
      throw InfeasibleError(std::string(what) + ": state " + std::to_string(state) + " outside [-horizon, horizon]");
    }
    if (!seen.insert(state).second) {
      throw InfeasibleError(std::string(what) + ": state " + std::to_string(state) + " listed twice");
    }
    dist.at(state) = prob;
  }
  dist.validate();
  return dist;
}

StrategyTree parse_strategy(const json& doc, std::string_view what) {
  const int horizon = horizon_field(doc, what);
  StrategyTree tree(horizon);
  for (const json& entry : array_field(doc, "strategy", what)) {
    const int t = int_field(entry, "t", what);
    const int x = int_field(entry, "x", what);
    const double p = number_field(entry, "stop_prob", what);
    if (!StrategyTree::is_node(t, x) || t > horizon) {
      throw InfeasibleError(std::string(what) + ": (" + std::to_string(t) + ", " + std::to_string(x) +
                            ") is not a node of the tree");
    }
    try {
      tree.set_stop(t, x, p);
    } catch (const ContractError& e) {
      throw InfeasibleError(std::string(what) + ": " + e.what());
    }
  }
  try {
    tree.validate();
  } catch (const ContractError& e) {
    throw InfeasibleError(std::string(what) + ": " + e.what());
  }
  return tree;
}

RootRule parse_rule(const json& doc, std::string_view what) {
  const int horizon = horizon_field(doc, what);
  RootRule rule;
  rule.horizon = horizon;
  rule.barrier.assign(2 * static_cast<std::size_t>(horizon) + 1, horizon);
  rule.stop_prob.assign(2 * static_cast<std::size_t>(horizon) + 1, 1.0);
  for (const json& entry : array_field(doc, "rule", what)) {
    const int x = int_field(entry, "x", what);
    const int b = int_field(entry, "barrier_time", what);
    const double r = number_field(entry, "stop_prob", what);
    if (x < -horizon || x > horizon) {
      throw InfeasibleError(std::string(what) + ": state " + std::to_string(x) + " outside [-horizon, horizon]");
    }
    if (b < std::abs(x) || b > horizon) {
      throw InfeasibleError(std::string(what) + ": barrier_time at state " + std::to_string(x) +
                            " must lie in [|x|, horizon]");
    }
    if (!(r >= 0.0 && r <= 1.0)) {
      throw InfeasibleError(std::string(what) + ": stop_prob at state " + std::to_string(x) + " outside [0,1]");
    }
    rule.barrier[static_cast<std::size_t>(x + horizon)] = b;
    rule.stop_prob[static_cast<std::size_t>(x + horizon)] = r;
  }
  return rule;
}

std::vector<double> double_list(const json& doc, const char* key, std::string_view what) {
  std::vector<double> out;
  for (const json& v : array_field(doc, key, what)) {
    if (!v.is_number()) throw InfeasibleError(std::string(what) + ": '" + key + "' must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string to_json(const ExitDistribution& dist) {
  return json{{"horizon", dist.horizon()}, {"distribution", distribution_list(dist)}}.dump(2);
}

ExitDistribution distribution_from_json(std::string_view text) {
  return parse_distribution(parse(text, "distribution file"), "distribution file");
}

std::string to_json(const StrategyTree& tree) {
  return json{{"horizon", tree.horizon()}, {"strategy", strategy_list(tree)}}.dump(2);
}

StrategyTree strategy_from_json(std::string_view text) {
  return parse_strategy(parse(text, "strategy file"), "strategy file");
}

std::string to_json(const RootRule& rule) {
  return json{{"horizon", rule.horizon}, {"rule", rule_list(rule)}}.dump(2);
}

RootRule rule_from_json(std::string_view text) { return parse_rule(parse(text, "rule file"), "rule file"); }

std::string to_json(const SolveResult& result) {
  const auto& d = result.diagnostics;
  json doc{{"horizon", result.mu.horizon()},
           {"value", result.value},
           {"tails", {{"x", result.tails.x}, {"y", result.tails.y}}},
           {"distribution", distribution_list(result.mu)},
           {"rule", rule_list(result.rule)},
           {"strategy", strategy_list(result.tree)},
           {"diagnostics",
            {{"starts", d.starts},
             {"best_start", d.best_start},
             {"residual", d.residual},
             {"wall_seconds", d.wall_seconds},
             {"evaluations", d.evaluations},
             {"polish_improved", d.polish_improved}}}};
  return doc.dump(2);
}

SolveResult solve_result_from_json(std::string_view text) {
  constexpr std::string_view what = "result file";
  const json doc = parse(text, what);
  SolveResult r;
  r.value = number_field(doc, "value", what);
  const json& tails = field(doc, "tails", what);
  r.tails.x = double_list(tails, "x", what);
  r.tails.y = double_list(tails, "y", what);
  r.mu = parse_distribution(doc, what);
  r.rule = parse_rule(doc, what);
  r.tree = parse_strategy(doc, what);
  const json& d = field(doc, "diagnostics", what);
  r.diagnostics.starts = int_field(d, "starts", what);
  r.diagnostics.best_start = int_field(d, "best_start", what);
  r.diagnostics.residual = number_field(d, "residual", what);
  r.diagnostics.wall_seconds = number_field(d, "wall_seconds", what);
  r.diagnostics.evaluations = field(d, "evaluations", what).get<long>();
  r.diagnostics.polish_improved = field(d, "polish_improved", what).get<bool>();
  return r;
}

std::string to_json(const AgentSolution& solution) {
  json nodes = json::array();
  for (const auto& n : solution.nodes) {
    nodes.push_back({{"t", n.t}, {"x", n.x}, {"value", n.value}, {"stop_prob", n.stop_prob}});
  }
  json doc{{"kind", to_string(solution.kind)},
           {"horizon", solution.tree.horizon()},
           {"value", solution.value},
           {"pattern", to_string(classify_pattern(solution.tree))},
           {"strategy", strategy_list(solution.tree)},
           {"nodes", nodes}};
  return doc.dump(2);
}

std::string to_json(const OracleResult& result) {
  json doc{{"horizon", result.tree.horizon()},
           {"value", result.value},
           {"candidates", result.candidates},
           {"strategy", strategy_list(result.tree)}};
  return doc.dump(2);
}

std::string to_json(const SimReport& report) {
  json states = json::array();
  for (int x = -report.horizon; x <= report.horizon; ++x) {
    const auto i = static_cast<std::size_t>(x + report.horizon);
    states.push_back({{"state", x},
                      {"count", report.counts[i]},
                      {"prob", report.empirical[x]},
                      {"std_error", report.std_error[i]}});
  }
  json doc{{"horizon", report.horizon},
           {"paths", report.paths},
           {"seed", report.seed},
           {"cpt_value", report.cpt_value},
           {"distribution", states}};
  return doc.dump(2);
}

std::string to_json(const EmbeddabilityCertificate& cert, int horizon) {
  auto list = [](const std::vector<StateSlack>& v) {
    json out = json::array();
    for (const auto& s : v) out.push_back({{"state", s.state}, {"slack", s.slack}});
    return out;
  };
  json doc{{"horizon", horizon},
           {"embeddable", cert.embeddable},
           {"checked", list(cert.checked)},
           {"violations", list(cert.violations)}};
  return doc.dump(2);
}

std::string strategy_csv(const StrategyTree& tree) {
  std::ostringstream out;
  out << "t,x,stop_prob\n";
  for (int t = 0; t <= tree.horizon(); ++t) {
    for (int x = -t; x <= t; x += 2) out << t << "," << x << "," << format_double(tree.stop(t, x)) << "\n";
  }
  return out.str();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InfeasibleError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot move output into " + path.string() + ": " + ec.message());
  }
}

}  // namespace cptquit::io
