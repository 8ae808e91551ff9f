"""Optimal stopping for a CPT gambler on the binomial tree."""

from ._core import (
    AgentSolution,
    ContractError,
    CptParams,
    EmbeddabilityCertificate,
    ExitDistribution,
    InfeasibleError,
    OracleResult,
    RootRule,
    SimReport,
    SolveResult,
    StrategyTree,
    TailVectors,
    build_root_rule,
    classify_pattern,
    cpt_value,
    enter_one_bet,
    exhaustive_markov,
    grid_randomized,
    is_embeddable,
    naive,
    objective_from_tails,
    one_more_round_gain,
    one_more_round_interior,
    one_more_round_loss,
    potential,
    precommitted,
    root_rule_to_tree,
    simulate,
    solve_program,
    sophisticated,
    strategy_distribution,
    t_minus_1_rules,
)

__all__ = [name for name in dir() if not name.startswith("_")]
