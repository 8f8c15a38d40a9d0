"""Combinatorial Bayesian optimization with parametrized submodular relaxation.

Binary black-box functions are minimized with a horseshoe-prior quadratic
surrogate and Thompson sampling; each acquisition problem is a binary
quadratic program solved by a min-cut based relaxation.
"""

from .afo import AfoResult, AfoSettings, local_search_afo, random_search_afo, solve_afo
from .benchmarks import (
    BqpInstance,
    ContaminationInstance,
    IsingInstance,
    LabsInstance,
    bqp_objective,
    contamination_objective,
    ising_objective,
    labs_objective,
    make_benchmark,
)
from .driver import (
    ConfigError,
    ExperimentConfig,
    ExperimentRecord,
    afo_metrics,
    oracle,
    random_search_inputs,
    run_bo,
)
from .flow import CutResult, FlowNetwork, solve_min_cut
from .pbf import (
    BudgetExceededError,
    QuadraticPBF,
    SignSplit,
    brute_force_minimize,
    evaluate,
    from_alpha,
    sign_split,
)
from .psr import (
    LinearForm,
    PsrParams,
    PsrResult,
    affine_lower_bound,
    build_cut_network,
    project_unit_box,
    psr_minimize,
    relaxed_objective,
    solve_relaxation,
    subgradient,
)
from .surrogate import AlphaSample, GibbsState, feature_map, gibbs_fit, thompson_draw

__version__ = "0.1.0"
