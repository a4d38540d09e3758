"""Central numeric tolerances shared by every module."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    """Single source of truth for the package's numeric thresholds.

    feasibility     max allowed constraint violation of any returned point
    psd_slack       eigenvalue slack when checking positive semidefiniteness
    root_find       stopping width for 1-D root finding / golden section
    optimizer_stop  consensus-solver residual target
    symmetry        max allowed |A - A^T| entry for quadratic-form matrices
    """

    feasibility: float = 1e-6
    psd_slack: float = 1e-10
    root_find: float = 1e-10
    optimizer_stop: float = 1e-8
    symmetry: float = 1e-10


DEFAULT_TOLERANCES = Tolerances()
