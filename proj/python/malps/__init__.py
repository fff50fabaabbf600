"""Hard-thresholding solvers for affine rank minimization and matrix completion."""

from malps._core import (
    DivergenceError,
    IterationRecord,
    LinearOperator,
    MomentumPolicy,
    ProblemSpec,
    ProjectorSpec,
    RunReport,
    SolverConfig,
    SubspaceBasis,
    TrialRecord,
    __version__,
    best_rank_k,
    denoise_image,
    emit_table,
    generate_problem,
    measured_epsilon,
    ortho_union,
    project,
    project_complement,
    project_subspace,
    raw_union,
    read_pgm,
    rip_probe,
    run_monte_carlo,
    solve,
    step_size_mu,
    svd,
    toy_example,
    toy_example_truth,
    write_pgm,
)

__all__ = [
    "DivergenceError",
    "IterationRecord",
    "LinearOperator",
    "MomentumPolicy",
    "ProblemSpec",
    "ProjectorSpec",
    "RunReport",
    "SolverConfig",
    "SubspaceBasis",
    "TrialRecord",
    "__version__",
    "best_rank_k",
    "denoise_image",
    "emit_table",
    "generate_problem",
    "measured_epsilon",
    "ortho_union",
    "project",
    "project_complement",
    "project_subspace",
    "raw_union",
    "read_pgm",
    "rip_probe",
    "run_monte_carlo",
    "solve",
    "step_size_mu",
    "svd",
    "toy_example",
    "toy_example_truth",
    "write_pgm",
]
