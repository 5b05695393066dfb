"""Tsallis-regularized dynamic programming for tabular MDPs.

The submodules are the public surface: :mod:`~tsallis_mdp.qmath`,
:mod:`~tsallis_mdp.policy`, :mod:`~tsallis_mdp.mdp`,
:mod:`~tsallis_mdp.solvers`, :mod:`~tsallis_mdp.oracles`,
:mod:`~tsallis_mdp.envs` and :mod:`~tsallis_mdp.cli`. The most used names
are re-exported here.
"""
from .envs import EnvKind, EnvSpec, make_chain, make_cliff, make_env, make_gridworld, make_random_mdp
from .errors import (
    ConvergenceError,
    DivergenceError,
    DomainError,
    MdpParseError,
    MdpValidationError,
    PreconditionError,
    SingularityError,
    TsallisMdpError,
    UnsupportedIndexError,
)
from .mdp import (
    TabularMdp,
    bellman_expectation,
    bellman_optimality,
    exact_policy_value,
    mdp_from_file,
    mdp_to_file,
    regularized_backup,
)
from .policy import (
    PolicySpec,
    SupportSet,
    greedy_policy,
    softmax_policy,
    sparsemax_policy,
    taylor_policy,
    tkl_greedy_policy,
)
from .qmath import EntropicIndex, q_exp, q_log, tsallis_entropy, tsallis_kl
from .solvers import (
    Algorithm,
    IterationTrace,
    Regularizer,
    SolverConfig,
    boltzmann_value,
    mq_value,
    run_cvi,
    run_mvi,
    run_mvi_q,
    run_naive_lnq,
    run_reg_vi,
    run_tsallis_vi,
    solve,
)

__version__ = "0.1.0"
