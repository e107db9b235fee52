from .ltl import (
    Formula,
    LassoWord,
    eval_lasso,
    parse,
    random_lasso,
    to_text,
)
from .automata import (
    REJECT,
    Ldba,
    accepting_frontier,
    accepts_lasso,
    builtin_automaton,
    find_sinks,
    load_automaton,
    translate_fragment,
    validate_ldba,
)
from .product import (
    Epsilon,
    Policy,
    ProductState,
    RewardParams,
    available_actions,
    product_step,
    reward_and_update,
)
from .learner import (
    CountTables,
    LearnParams,
    QTable,
    evaluate_policy,
    greedy_policy,
    train,
    train_baseline,
)
from .psp import ModelEstimate, PspTable, avi_update, init_psp, psp_error, psp_fixed_point
from .oracle import build_product, chain_analysis, max_reach_probability, mec_decomposition, policy_values, solve


__all__ = [
    "Formula",
    "LassoWord",
    "eval_lasso",
    "parse",
    "random_lasso",
    "to_text",
    "REJECT",
    "Ldba",
    "accepting_frontier",
    "accepts_lasso",
    "builtin_automaton",
    "find_sinks",
    "load_automaton",
    "translate_fragment",
    "validate_ldba",
    "Epsilon",
    "Policy",
    "ProductState",
    "RewardParams",
    "available_actions",
    "product_step",
    "reward_and_update",
    "CountTables",
    "LearnParams",
    "QTable",
    "evaluate_policy",
    "greedy_policy",
    "train",
    "train_baseline",
    "ModelEstimate",
    "PspTable",
    "avi_update",
    "init_psp",
    "psp_error",
    "psp_fixed_point",
    "build_product",
    "chain_analysis",
    "max_reach_probability",
    "mec_decomposition",
    "policy_values",
    "solve",
]
