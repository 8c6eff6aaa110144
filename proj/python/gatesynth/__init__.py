"""Gate synthesis by polynomial optimisation over Magnus and BCH expansions."""

from ._core import (
    BenchConfig,
    ConfigError,
    Error,
    ProblemSpec,
    Propagation,
    SynthesisResult,
    Target,
    TrialRecord,
    build_ising,
    build_lambda,
    build_sigma,
    expm_antihermitian,
    gen_target,
    ibmq3,
    infidelity,
    minimize,
    objective,
    principal_log,
    propagate_reference,
    run_fidelity_bench,
    synthesize,
)

__all__ = [
    "BenchConfig",
    "ConfigError",
    "Error",
    "ProblemSpec",
    "Propagation",
    "SynthesisResult",
    "Target",
    "TrialRecord",
    "build_ising",
    "build_lambda",
    "build_sigma",
    "expm_antihermitian",
    "gen_target",
    "ibmq3",
    "infidelity",
    "minimize",
    "objective",
    "principal_log",
    "propagate_reference",
    "run_fidelity_bench",
    "synthesize",
]
