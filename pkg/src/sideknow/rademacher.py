"""Monte Carlo estimation of the exact empirical Rademacher complexity of a
constraint set, via per-draw linear maximization over the feasible region."""

from __future__ import annotations

import math
from typing import Optional, Tuple

import numpy as np

from .core import BoundReport, ConstraintSet, LabeledDataset, LinearModel, rademacher_signs
from .solver import ConsensusProblem, SolverError, SolverOptions


def sup_linear(
    g: np.ndarray,
    cset: ConstraintSet,
    options: Optional[SolverOptions] = None,
) -> Tuple[float, LinearModel]:
    """Maximize g . beta over the constraint set.

    The ball guarantees boundedness; the value is taken at a
    feasibility-repaired iterate.  Returns (value, argmax).
    """
    g = np.asarray(g, dtype=float)
    problem = ConsensusProblem(cset, p=g.size, options=options)
    values, Beta, info = problem.maximize(g[:, None])
    if not info.converged and info.primal_residual > 1e-5:
        raise SolverError(
            f"consensus solver stopped at residual {info.primal_residual:.3e}"
            f" after {info.iterations} iterations"
        )
    return float(values[0]), LinearModel(Beta[:, 0])


def estimate_empirical_rademacher(
    data: LabeledDataset,
    cset: ConstraintSet,
    mc: int,
    rng: np.random.Generator,
    options: Optional[SolverOptions] = None,
) -> BoundReport:
    """Monte Carlo estimate of E_sigma sup_F |sum_i sigma_i f(x_i)| / n.

    Per draw the supremum of the absolute sum is max(sup g.beta, sup -g.beta)
    with g = X sigma; both maximizations run in one batch.  Returns the mean
    with its Monte Carlo standard error.
    """
    if mc < 2:
        raise ValueError("mc must be at least 2")
    X, n = data.features, data.n
    sigma = rademacher_signs(rng, (n, mc))
    G = X @ sigma
    problem = ConsensusProblem(cset, p=data.p, options=options)
    values, _, info = problem.maximize(np.concatenate([G, -G], axis=1))
    if not info.converged and info.primal_residual > 1e-5:
        raise SolverError(
            f"consensus solver stopped at residual {info.primal_residual:.3e};"
            " estimate aborted"
        )
    per_draw = np.maximum(values[:mc], values[mc:]) / n
    mean = float(per_draw.mean())
    stderr = float(per_draw.std(ddof=1) / math.sqrt(mc))
    return BoundReport(
        kind="Rademacher",
        value=mean,
        theorem_tag="mc_estimate",
        parameters={
            "mc": mc,
            "n": n,
            "p": data.p,
            "solver_iterations": info.iterations,
            "solver_residual": info.primal_residual,
            "max_violation": info.max_violation,
        },
        mc_stderr=stderr,
    )
