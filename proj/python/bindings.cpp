#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>

#include "cptquit/errors.hpp"
#include "cptquit/gamblers.hpp"
#include "cptquit/io.hpp"
#include "cptquit/oracle.hpp"
#include "cptquit/potential.hpp"
#include "cptquit/root_embedding.hpp"
#include "cptquit/simulate.hpp"
#include "cptquit/solver.hpp"

namespace py = pybind11;
using namespace cptquit;

namespace {

ExitDistribution dist_from_dict(int horizon, const std::map<int, double>& probs) {
  ExitDistribution d(horizon);
  for (const auto& [x, p] : probs) {
    if (x < -horizon || x > horizon) throw ContractError("state " + std::to_string(x) + " outside [-horizon, horizon]");
    d.at(x) = p;
  }
  return d;
}

std::map<int, double> dist_to_dict(const ExitDistribution& d) {
  std::map<int, double> out;
  for (int x = -d.horizon(); x <= d.horizon(); ++x) out[x] = d[x];
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Optimal stopping for a CPT gambler on the binomial tree";

  static py::exception<ContractError> contract(m, "ContractError", PyExc_ValueError);
  static py::exception<InfeasibleError> infeasible(m, "InfeasibleError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ContractError& e) {
      py::set_error(contract, e.what());
    } catch (const InfeasibleError& e) {
      py::set_error(infeasible, e.what());
    }
  });

  py::class_<CptParams>(m, "CptParams")
      .def(py::init([](double ap, double am, double dp, double dm, double lambda) {
             CptParams p{ap, am, dp, dm, lambda};
             p.validate();
             return p;
           }),
           py::arg("alpha_plus") = 0.88, py::arg("alpha_minus") = 0.88, py::arg("delta_plus") = 0.61,
           py::arg("delta_minus") = 0.69, py::arg("lambda_") = 2.25)
      .def_static("symmetric", &CptParams::symmetric, py::arg("alpha"), py::arg("delta"), py::arg("lambda_"))
      .def_readwrite("alpha_plus", &CptParams::alpha_plus)
      .def_readwrite("alpha_minus", &CptParams::alpha_minus)
      .def_readwrite("delta_plus", &CptParams::delta_plus)
      .def_readwrite("delta_minus", &CptParams::delta_minus)
      .def_readwrite("lambda_", &CptParams::lambda)
      .def("__eq__", [](const CptParams& a, const CptParams& b) { return a == b; })
      .def("__repr__", [](const CptParams& p) {
        return "CptParams(alpha_plus=" + std::to_string(p.alpha_plus) + ", alpha_minus=" +
               std::to_string(p.alpha_minus) + ", delta_plus=" + std::to_string(p.delta_plus) +
               ", delta_minus=" + std::to_string(p.delta_minus) + ", lambda_=" + std::to_string(p.lambda) + ")";
      });

  py::class_<ExitDistribution>(m, "ExitDistribution")
      .def(py::init(&dist_from_dict), py::arg("horizon"), py::arg("probs"))
      .def_static("point_mass", &ExitDistribution::point_mass, py::arg("horizon"), py::arg("state") = 0)
      .def_property_readonly("horizon", &ExitDistribution::horizon)
      .def("__getitem__", &ExitDistribution::operator[])
      .def("to_dict", &dist_to_dict)
      .def("validate", &ExitDistribution::validate, py::arg("tol") = 1e-9)
      .def("max_abs_difference", &ExitDistribution::max_abs_difference)
      .def("__eq__", [](const ExitDistribution& a, const ExitDistribution& b) { return a == b; })
      .def("to_json", [](const ExitDistribution& d) { return io::to_json(d); })
      .def_static("from_json", [](const std::string& s) { return io::distribution_from_json(s); });

  py::class_<TailVectors>(m, "TailVectors")
      .def(py::init([](std::vector<double> x, std::vector<double> y) {
             if (x.size() != y.size()) throw ContractError("x and y must have the same length");
             return TailVectors{std::move(x), std::move(y)};
           }),
           py::arg("x"), py::arg("y"))
      .def_static("from_distribution", &TailVectors::from_distribution)
      .def_readonly("x", &TailVectors::x)
      .def_readonly("y", &TailVectors::y)
      .def("reconstruct", &TailVectors::reconstruct);

  py::class_<StrategyTree>(m, "StrategyTree")
      .def(py::init<int>(), py::arg("horizon"))
      .def_static("stop_at_root", &StrategyTree::stop_at_root)
      .def_property_readonly("horizon", &StrategyTree::horizon)
      .def("stop", &StrategyTree::stop, py::arg("t"), py::arg("x"))
      .def("set_stop", &StrategyTree::set_stop, py::arg("t"), py::arg("x"), py::arg("p"))
      .def("__eq__", [](const StrategyTree& a, const StrategyTree& b) { return a == b; })
      .def("to_json", [](const StrategyTree& t) { return io::to_json(t); })
      .def_static("from_json", [](const std::string& s) { return io::strategy_from_json(s); });

  py::class_<RootRule>(m, "RootRule")
      .def_readonly("horizon", &RootRule::horizon)
      .def_readonly("barrier", &RootRule::barrier)
      .def_readonly("stop_prob", &RootRule::stop_prob)
      .def("barrier_at", &RootRule::barrier_at)
      .def("stop_at", &RootRule::stop_at)
      .def("to_json", [](const RootRule& r) { return io::to_json(r); });

  py::class_<StateSlack>(m, "StateSlack").def_readonly("state", &StateSlack::state).def_readonly("slack", &StateSlack::slack);
  py::class_<EmbeddabilityCertificate>(m, "EmbeddabilityCertificate")
      .def_readonly("embeddable", &EmbeddabilityCertificate::embeddable)
      .def_readonly("checked", &EmbeddabilityCertificate::checked)
      .def_readonly("violations", &EmbeddabilityCertificate::violations);

  py::class_<SolveDiagnostics>(m, "SolveDiagnostics")
      .def_readonly("starts", &SolveDiagnostics::starts)
      .def_readonly("best_start", &SolveDiagnostics::best_start)
      .def_readonly("residual", &SolveDiagnostics::residual)
      .def_readonly("wall_seconds", &SolveDiagnostics::wall_seconds)
      .def_readonly("evaluations", &SolveDiagnostics::evaluations)
      .def_readonly("polish_improved", &SolveDiagnostics::polish_improved);

  py::class_<SolveResult>(m, "SolveResult")
      .def_readonly("value", &SolveResult::value)
      .def_readonly("tails", &SolveResult::tails)
      .def_readonly("mu", &SolveResult::mu)
      .def_readonly("rule", &SolveResult::rule)
      .def_readonly("tree", &SolveResult::tree)
      .def_readonly("diagnostics", &SolveResult::diagnostics)
      .def("to_json", [](const SolveResult& r) { return io::to_json(r); });

  py::class_<AgentSolution>(m, "AgentSolution")
      .def_property_readonly("kind", [](const AgentSolution& s) { return std::string(to_string(s.kind)); })
      .def_readonly("tree", &AgentSolution::tree)
      .def_readonly("value", &AgentSolution::value)
      .def_property_readonly("pattern",
                             [](const AgentSolution& s) { return std::string(to_string(classify_pattern(s.tree))); })
      .def("to_json", [](const AgentSolution& s) { return io::to_json(s); });

  py::class_<OracleResult>(m, "OracleResult")
      .def_readonly("value", &OracleResult::value)
      .def_readonly("tree", &OracleResult::tree)
      .def_readonly("candidates", &OracleResult::candidates);

  py::class_<SimReport>(m, "SimReport")
      .def_readonly("paths", &SimReport::paths)
      .def_readonly("seed", &SimReport::seed)
      .def_readonly("horizon", &SimReport::horizon)
      .def_readonly("counts", &SimReport::counts)
      .def_readonly("empirical", &SimReport::empirical)
      .def_readonly("std_error", &SimReport::std_error)
      .def_readonly("cpt_value", &SimReport::cpt_value)
      .def("__eq__", [](const SimReport& a, const SimReport& b) { return a == b; });

  m.def("cpt_value", py::overload_cast<const ExitDistribution&, const CptParams&>(&cpt_value), py::arg("dist"),
        py::arg("params"));
  m.def("objective_from_tails", &objective_from_tails, py::arg("tails"), py::arg("shift"), py::arg("params"));
  m.def("potential", [](const ExitDistribution& d) {
    const Potential u = potential_from_dist(d);
    std::map<int, double> out;
    for (int x = -d.horizon() - 1; x <= d.horizon() + 1; ++x) out[x] = u(x);
    return out;
  });
  m.def("is_embeddable", &is_embeddable, py::arg("mu"), py::arg("horizon"));
  m.def("strategy_distribution", [](const StrategyTree& t) { return strategy_distribution(t).first; });
  m.def("build_root_rule", &build_root_rule, py::arg("mu"), py::arg("horizon"));
  m.def("root_rule_to_tree", &root_rule_to_tree, py::arg("rule"));
  m.def(
      "solve_program",
      [](const CptParams& p, int horizon, int restarts, std::uint64_t seed, int shift) {
        py::gil_scoped_release release;
        return solve_program(p, horizon, {restarts, seed, shift});
      },
      py::arg("params"), py::arg("horizon"), py::arg("restarts") = 64, py::arg("seed") = 0, py::arg("shift") = 0);
  m.def("precommitted", &precommitted, py::arg("params"), py::arg("horizon"), py::arg("restarts") = 64,
        py::arg("seed") = 0, py::call_guard<py::gil_scoped_release>());
  m.def("naive", &naive, py::arg("params"), py::arg("horizon"), py::arg("restarts") = 64, py::arg("seed") = 0,
        py::call_guard<py::gil_scoped_release>());
  m.def("sophisticated", &sophisticated, py::arg("params"), py::arg("horizon"),
        py::call_guard<py::gil_scoped_release>());
  m.def("classify_pattern", [](const StrategyTree& t) { return std::string(to_string(classify_pattern(t))); });
  m.def("enter_one_bet", [](const CptParams& p) {
    const EntryDecision d = enter_one_bet(p);
    return py::make_tuple(d.q, d.value);
  });
  m.def("one_more_round_gain", &one_more_round_gain, py::arg("params"), py::arg("horizon"), py::arg("p_top"));
  m.def("one_more_round_loss", &one_more_round_loss, py::arg("params"), py::arg("horizon"), py::arg("p_bottom"));
  m.def("one_more_round_interior", &one_more_round_interior, py::arg("params"), py::arg("n"), py::arg("p_n"),
        py::arg("pbar_next"));
  m.def(
      "t_minus_1_rules",
      [](const CptParams& p, int x) {
        const LayerDecision d = t_minus_1_rules(p, x);
        return py::make_tuple(std::string(to_string(d.action)), d.q, d.objective);
      },
      py::arg("params"), py::arg("x"));
  m.def("exhaustive_markov", &exhaustive_markov, py::arg("params"), py::arg("horizon"),
        py::call_guard<py::gil_scoped_release>());
  m.def("grid_randomized", &grid_randomized, py::arg("params"), py::arg("horizon"), py::arg("step"),
        py::arg("budget") = kDefaultGridBudget, py::call_guard<py::gil_scoped_release>());
  m.def("simulate", &simulate, py::arg("tree"), py::arg("params"), py::arg("paths"), py::arg("seed"),
        py::call_guard<py::gil_scoped_release>());
}
