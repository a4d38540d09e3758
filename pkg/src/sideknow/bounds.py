"""Complexity and generalization bounds for constrained linear classes.

Covering-number bounds are computed and reported in natural-log space
throughout: the ball covering term (2*B*X/eps + 1)^p overflows for a few
hundred dimensions, while its log never does.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg as sla
from scipy.special import betainc

from .config import DEFAULT_TOLERANCES, Tolerances
from .core import (
    BoundReport,
    ConstraintSet,
    EllipsoidConstraint,
    HalfSpace,
    LabeledDataset,
    SOConstraint,
    rademacher_signs,
)
from .geometry import grid_golden_min, kahan_combine, simplex_trace_min, trace_min_gamma, volume_min_gamma

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class NormPair:
    """Conjugate feature/coefficient norm orders: 1/r + 1/q = 1."""

    r: float
    q: float

    def __post_init__(self):
        r, q = float(self.r), float(self.q)
        if r < 1.0 or q < 1.0:
            raise ValueError("norm orders must be >= 1")
        inv = (0.0 if math.isinf(r) else 1.0 / r) + (0.0 if math.isinf(q) else 1.0 / q)
        if abs(inv - 1.0) > 1e-12:
            raise ValueError(f"orders are not conjugate: 1/{r} + 1/{q} != 1")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "q", q)


EUCLIDEAN = NormPair(2.0, 2.0)


@dataclass(frozen=True)
class LowerBoundConstants:
    """Absolute constant of the Gaussian-to-Rademacher comparison.

    Never fixed numerically by the source analysis, so it stays an explicit
    parameter with default one.
    """

    C: float = 1.0

    def __post_init__(self):
        if not self.C > 0.0:
            raise ValueError("C must be positive")


# ---------------------------------------------------------------------------
# single half-space: volumetric covering bound


def cap_fraction(p: int, a: np.ndarray, eps: float, B_b: float, X_b: float) -> float:
    """Fraction of the inflated coefficient ball kept by a half-space a.beta <= 1.

    The ball of radius r = B_b + eps/(2 X_b) loses the spherical cap beyond
    the inflated cut height 1/||a|| + eps/(2 X_b); the cap volume comes from
    the regularized incomplete beta representation.  Returns a value in
    (0, 1]; an inactive constraint (zero a, or cut height beyond the radius)
    gives exactly 1.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    if eps <= 0.0 or B_b <= 0.0 or X_b <= 0.0:
        raise ValueError("eps, B_b and X_b must be positive")
    a = np.asarray(a, dtype=float)
    r = B_b + eps / (2.0 * X_b)
    a_norm = float(np.linalg.norm(a))
    if a_norm == 0.0:
        return 1.0  # constraint reads 0 <= 1: vacuous
    t = 1.0 / a_norm + eps / (2.0 * X_b)
    if t >= r:
        return 1.0
    s = 1.0 - (t / r) ** 2
    cap = 0.5 * float(betainc((p + 1) / 2.0, 0.5, s))
    return float(min(max(1.0 - cap, np.finfo(float).tiny), 1.0))


def covering_single_halfspace(
    data: LabeledDataset, h: HalfSpace, eps: float, B_b: float
) -> BoundReport:
    """Log covering bound for a Euclidean ball cut by one half-space:
    log alpha + p log(2 B_b X_b / eps + 1).

    The half-space must normalize to a.beta <= 1 (positive offset); when it
    cannot, the unconstrained ball bound (alpha = 1) is reported instead of
    raising, with the reason recorded.
    """
    p = data.p
    X_b = data.feature_bound
    params = {"B_b": B_b, "X_b": X_b, "eps": float(eps), "p": p}
    if h.offset <= 0.0:
        alpha = 1.0
        params["normalization"] = "offset nonpositive; unconstrained bound used"
        params["a_norm"] = math.inf
    else:
        a = h.normal / h.offset
        alpha = cap_fraction(p, a, eps, B_b, X_b)
        params["a_norm"] = float(np.linalg.norm(a))
    params["alpha"] = alpha
    params["radius"] = B_b + eps / (2.0 * X_b)
    value = math.log(alpha) + p * math.log(2.0 * B_b * X_b / eps + 1.0)
    return BoundReport(
        kind="CoveringLog",
        value=value,
        theorem_tag="halfspace_covering",
        parameters=params,
    )


# ---------------------------------------------------------------------------
# single half-space: duality bound on the empirical Rademacher complexity


def _golden_min_columns(
    f: Callable[[np.ndarray], np.ndarray], lo: np.ndarray, hi: np.ndarray, tol: float
) -> np.ndarray:
    """Columnwise golden-section minimum of a vectorized unimodal function."""
    a = lo.astype(float).copy()
    b = hi.astype(float).copy()
    span = float(np.max(b - a))
    iters = max(int(math.ceil(math.log(tol / max(span, tol)) / math.log(_GOLDEN))), 1)
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(min(iters, 200)):
        take_left = f1 <= f2
        b = np.where(take_left, x2, b)
        a = np.where(take_left, a, x1)
        x1 = b - _GOLDEN * (b - a)
        x2 = a + _GOLDEN * (b - a)
        f1, f2 = f(x1), f(x2)
    xm = 0.5 * (a + b)
    return np.minimum(f(xm), np.minimum(f1, f2))


def _all_sign_columns(n: int) -> np.ndarray:
    if n > 20:
        raise ValueError("exhaustive enumeration limited to n <= 20")
    count = 1 << n
    bits = (np.arange(count)[None, :] >> np.arange(n)[:, None]) & 1
    return bits.astype(float) * 2.0 - 1.0


def rademacher_dual_halfspace(
    data: LabeledDataset,
    h: HalfSpace,
    B_b: float,
    mc: int,
    rng: Optional[np.random.Generator],
    variant: str = "sound",
    exhaustive: bool = False,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> BoundReport:
    """Duality bound for a ball cut by one half-space a.beta <= 1.

    Per sign draw the two one-dimensional convex problems
    min_{eta >= 0} B_b ||X sigma -/+ eta a|| + eta are solved by golden
    section.  variant='sound' averages the per-draw maximum of the two
    optimal values; variant='paper_literal' takes the maximum of the two
    averages, which can undercut the exact complexity (both are kept so the
    difference is observable).
    """
    if variant not in ("sound", "paper_literal"):
        raise ValueError("variant must be 'sound' or 'paper_literal'")
    if h.offset <= 0.0:
        raise ValueError("half-space offset must be positive to normalize a = w/b")
    if not exhaustive and mc < 1:
        raise ValueError("mc must be >= 1")
    X, n = data.features, data.n
    a = h.normal / h.offset
    if exhaustive:
        sigma = _all_sign_columns(n)
    else:
        sigma = rademacher_signs(rng, (n, mc))
    G = X @ sigma
    g_sq = np.sum(G * G, axis=0)
    a_sq = float(a @ a)

    if a_sq == 0.0:
        vals_minus = vals_plus = B_b * np.sqrt(g_sq)
    else:
        cross = a @ G
        eta_hi = 2.0 * np.sqrt(g_sq) / math.sqrt(a_sq) + 1.0

        def make(fsign: float):
            def f(eta):
                inner = np.clip(g_sq - 2.0 * fsign * eta * cross + eta * eta * a_sq, 0.0, None)
                return B_b * np.sqrt(inner) + eta

            return f

        zeros = np.zeros_like(eta_hi)
        # value accuracy ~ slope * bracket width, so shrink well below root_find
        width = 1e-2 * tol.root_find
        vals_minus = _golden_min_columns(make(+1.0), zeros, eta_hi, width)
        vals_plus = _golden_min_columns(make(-1.0), zeros, eta_hi, width)

    draws = sigma.shape[1]
    if variant == "sound":
        per_draw = np.maximum(vals_minus, vals_plus) / n
        value = float(per_draw.mean())
        spread = float(per_draw.std(ddof=1)) if draws > 1 else 0.0
    else:
        mean_minus = float(vals_minus.mean()) / n
        mean_plus = float(vals_plus.mean()) / n
        side = vals_minus if mean_minus >= mean_plus else vals_plus
        value = max(mean_minus, mean_plus)
        spread = float((side / n).std(ddof=1)) if draws > 1 else 0.0
    stderr = 0.0 if exhaustive else spread / math.sqrt(draws)
    return BoundReport(
        kind="Rademacher",
        value=value,
        theorem_tag="dual_halfspace",
        parameters={
            "variant": variant,
            "draws": draws,
            "exhaustive": exhaustive,
            "a_norm": math.sqrt(a_sq),
            "B_b": B_b,
            "n": n,
        },
        mc_stderr=stderr,
    )


# ---------------------------------------------------------------------------
# polygonal constraints: lattice covering bound


def lattice_count_cross_polytope(p: int, K: int) -> Tuple[int, float]:
    """Number of integer points with sum of |coordinates| <= K, exactly.

    Closed form sum_i 2^i C(p, i) C(K, i); Python integers keep it exact at
    any size, and the natural log is returned alongside.
    """
    if p < 1 or K < 0:
        raise ValueError("need p >= 1 and K >= 0")
    total = 0
    for i in range(min(p, K) + 1):
        total += (1 << i) * math.comb(p, i) * math.comb(K, i)
    return total, float(math.log(total))


def enumerate_cross_polytope(p: int, K: int) -> np.ndarray:
    """All integer points of the cross-polytope of radius K, as an (N, p) array."""
    if p < 1 or K < 0:
        raise ValueError("need p >= 1 and K >= 0")
    pts = np.zeros((1, 0), dtype=np.int64)
    budgets = np.array([K], dtype=np.int64)
    for _ in range(p):
        reps = 2 * budgets + 1
        starts = np.concatenate([[0], np.cumsum(reps)[:-1]])
        total = int(reps.sum())
        parent = np.repeat(np.arange(len(budgets)), reps)
        ks = np.arange(total) - starts[parent] - budgets[parent]
        pts = np.concatenate([pts[parent], ks[:, None]], axis=1)
        budgets = budgets[parent] - np.abs(ks)
    return pts


def _normalized_rows(halfspaces: Sequence[HalfSpace], p: int):
    """Coefficient rows a = w/b and margins for half-spaces a.beta <= 1 - margin."""
    C = np.zeros((len(halfspaces), p))
    margins = np.zeros(len(halfspaces))
    for v, h in enumerate(halfspaces):
        if h.offset <= 0.0:
            raise ValueError(
                f"half-space {v} has offset {h.offset} <= 0 and cannot be normalized"
            )
        if h.margin is None:
            raise ValueError(f"half-space {v} is missing the positive margin")
        C[v] = h.normal / h.offset
        margins[v] = h.margin
    return C, margins


def covering_polygonal(
    data: LabeledDataset,
    halfspaces: Sequence[HalfSpace],
    B_b: float,
    eps: float,
    norms: NormPair = EUCLIDEAN,
    enumeration_cap: int = 10_000_000,
) -> BoundReport:
    """Lattice-point covering bound for a norm ball cut by margin-carrying
    half-spaces, reported as min of the unconstrained and constrained counts.

    Half-spaces enter in normalized form a.beta <= 1 with their margins; the
    constrained lattice count is enumerated only while the surrounding
    cross-polytope stays under ``enumeration_cap`` points, otherwise the
    closed-form count is used alone and flagged.
    """
    p, n = data.p, data.n
    r = norms.r
    if math.isinf(r):
        X_b = float(np.max(np.abs(data.features)))
        n_pow = 1.0
    else:
        X_b = (
            data.feature_bound
            if r == 2.0
            else float(np.max(np.sum(np.abs(data.features) ** r, axis=0) ** (1.0 / r)))
        )
        n_pow = float(n ** (1.0 / r))
    params: dict = {"B_b": B_b, "X_b": X_b, "eps": float(eps), "p": p, "n": n, "r": r}

    if eps >= X_b * B_b:
        params["branch"] = "single_ball"
        return BoundReport(
            kind="CoveringLog", value=0.0, theorem_tag="polygonal_lattice", parameters=params
        )

    K0 = math.ceil((X_b * B_b / eps) ** 2)
    count0, log0 = lattice_count_cross_polytope(p, K0)
    params["K0"] = K0
    params["log_PK0"] = log0

    if not halfspaces:
        params["branch"] = "unconstrained"
        return BoundReport(
            kind="CoveringLog", value=log0, theorem_tag="polygonal_lattice", parameters=params
        )

    if math.isinf(r):
        feature_norms = np.max(np.abs(data.features), axis=1)
    else:
        feature_norms = np.sum(np.abs(data.features) ** r, axis=1) ** (1.0 / r)
    if np.any(feature_norms <= 0.0):
        j = int(np.argmin(feature_norms))
        raise ValueError(f"feature {j} is identically zero; scaling undefined")

    C, margins = _normalized_rows(halfspaces, p)
    scale = n_pow * X_b * B_b / feature_norms  # per-feature scaling
    C_tilde = C * scale[None, :]
    Xs = data.features * scale[:, None]
    lam_min = float(np.linalg.eigvalsh(Xs @ Xs.T).min())
    params["lambda_min"] = lam_min

    ratio = float(np.min(margins / np.sum(np.abs(C_tilde), axis=1)))
    params["min_margin_ratio"] = ratio

    if lam_min <= 1e-12:
        params["branch"] = "scaled_gram_degenerate"
        params["warning"] = "smallest eigenvalue of the scaled Gram matrix is ~0; K unbounded"
        return BoundReport(
            kind="CoveringLog", value=log0, theorem_tag="polygonal_lattice", parameters=params
        )

    K = max(K0, math.ceil(n * (X_b * B_b) ** 2 / (lam_min * ratio**2)))
    params["K"] = K
    countK, logK = lattice_count_cross_polytope(p, K)
    params["log_PK"] = logK

    if countK > enumeration_cap:
        params["branch"] = "enumeration_skipped"
        params["warning"] = f"|P^K| = {countK} exceeds cap {enumeration_cap}"
        return BoundReport(
            kind="CoveringLog", value=log0, theorem_tag="polygonal_lattice", parameters=params
        )

    pts = enumerate_cross_polytope(p, K)
    keep = np.all(pts @ C_tilde.T <= K, axis=1)
    count_c = int(np.count_nonzero(keep))
    params["count_PcK"] = count_c
    params["log_PcK"] = float(math.log(count_c)) if count_c > 0 else -math.inf
    best = min(count0, count_c) if count_c > 0 else count0
    params["branch"] = "constrained" if count_c < count0 and count_c > 0 else "closed_form"
    return BoundReport(
        kind="CoveringLog",
        value=float(math.log(best)),
        theorem_tag="polygonal_lattice",
        parameters=params,
    )


# ---------------------------------------------------------------------------
# quadratic constraints


def rademacher_ellipsoid_upper(data: LabeledDataset, a_int: EllipsoidConstraint) -> BoundReport:
    """Trace bound sqrt(trace(X^T A^(-1) X)) / n for a circumscribing
    ellipsoid matrix A (level normalized to one)."""
    A = a_int.normalized_matrix()
    try:
        cf = sla.cho_factor(A, lower=True)
    except np.linalg.LinAlgError:
        raise ValueError("circumscribing matrix must be positive-definite") from None
    X, n = data.features, data.n
    T = float(np.sum(X * sla.cho_solve(cf, X)))
    return BoundReport(
        kind="Rademacher",
        value=math.sqrt(T) / n,
        theorem_tag="ellipsoid_trace_upper",
        parameters={"trace": T, "n": n, "p": data.p},
    )


def rademacher_ellipsoid_lower(
    data: LabeledDataset,
    a_int: EllipsoidConstraint,
    X_b: Optional[float] = None,
    consts: LowerBoundConstants = LowerBoundConstants(),
) -> BoundReport:
    """Matching lower bound kappa / (n log n) * sqrt(trace(X^T A^(-1) X)).

    kappa couples the eigenbasis of the circumscribing matrix with the data:
    a zero row in P X collapses the bound to zero (reported, not raised).
    The log is natural.
    """
    X, n, p = data.features, data.n, data.p
    if n < 3:
        raise ValueError("lower bound needs n >= 3 so that log n >= 1")
    if X_b is None:
        X_b = data.feature_bound
    A = a_int.normalized_matrix()
    lam, V = np.linalg.eigh(A)
    if lam.min() <= 0.0:
        raise ValueError("circumscribing matrix must be positive-definite")
    PX = V.T @ X
    row_norms = np.linalg.norm(PX, axis=1)
    min_row = float(row_norms.min())
    T = float(np.sum(row_norms**2 / lam))
    params = {
        "trace": T,
        "min_row_norm": min_row,
        "C": consts.C,
        "n": n,
        "p": p,
        "X_b": X_b,
    }
    if min_row <= 1e-15 * float(np.linalg.norm(X)):
        params["kappa"] = 0.0
        return BoundReport(
            kind="Rademacher", value=0.0, theorem_tag="ellipsoid_trace_lower", parameters=params
        )
    kappa = 1.0 / (consts.C * math.sqrt(1.0 + 2.0 * math.pi * p * n * X_b**2 / min_row**2))
    params["kappa"] = kappa
    value = kappa / (n * math.log(n)) * math.sqrt(T)
    return BoundReport(
        kind="Rademacher", value=value, theorem_tag="ellipsoid_trace_lower", parameters=params
    )


def covering_ellipsoid_product(eigs: np.ndarray, X_b: float, eps: float) -> BoundReport:
    """Log covering bound sum_i log(2 X_b / (eps sqrt(lam_i)) + 1) for an
    ellipsoid with the given positive eigenvalues."""
    eigs = np.asarray(eigs, dtype=float)
    if np.any(eigs <= 0.0):
        raise ValueError("all eigenvalues must be positive")
    if eps <= 0.0 or X_b <= 0.0:
        raise ValueError("eps and X_b must be positive")
    value = float(np.sum(np.log(2.0 * X_b / (eps * np.sqrt(eigs)) + 1.0)))
    return BoundReport(
        kind="CoveringLog",
        value=value,
        theorem_tag="ellipsoid_product",
        parameters={"X_b": X_b, "eps": float(eps), "p": int(eigs.size)},
    )


def rademacher_quadratic_dual(
    data: LabeledDataset,
    a2: EllipsoidConstraint,
    B_b: float,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> BoundReport:
    """Duality bound for a B_b ball intersected with one ellipsoid:
    min over eta in [0,1] of trace(X^T (I + eta(A2 - I))^(-1) X) / (4n)
    + (B_b^2 + eta(1 - B_b^2)) / n.

    Minimized on a 64-point grid with golden-section refinement; ties break
    toward the smaller eta.
    """
    A2 = a2.normalized_matrix()
    lam, V = np.linalg.eigh(A2)
    X, n = data.features, data.n
    Xt = V.T @ X
    s = np.sum(Xt * Xt, axis=1)

    def objective(eta: float) -> float:
        denom = 1.0 + eta * (lam - 1.0)
        if np.any(denom <= 0.0):
            return math.inf
        return float(np.sum(s / denom)) / (4.0 * n) + (
            B_b**2 + eta * (1.0 - B_b**2)
        ) / n

    eta_star, value = grid_golden_min(objective, 0.0, 1.0, grid=64, tol=tol.root_find)
    return BoundReport(
        kind="Rademacher",
        value=value,
        theorem_tag="quadratic_dual",
        parameters={"eta_star": eta_star, "B_b": B_b, "n": n, "p": data.p},
    )


def covering_linear_quadratic(
    data: LabeledDataset,
    halfspaces: Sequence[HalfSpace],
    e1: EllipsoidConstraint,
    e2: EllipsoidConstraint,
    eps: float,
    gamma: float,
    enumeration_cap: int = 10_000_000,
) -> BoundReport:
    """Covering bound with both half-space and two-ellipsoid knowledge.

    The combined ellipsoid at the given gamma is relaxed to the ball of
    radius sqrt(largest eigenvalue of its inverse), and the polygonal
    lattice bound runs with that effective radius (Euclidean norms).
    """
    combined = kahan_combine(e1, e2, gamma)
    lam_min = float(np.linalg.eigvalsh(combined.normalized_matrix()).min())
    if lam_min <= 0.0:
        raise ValueError("combined ellipsoid matrix must be positive-definite")
    B_eff = 1.0 / math.sqrt(lam_min)
    report = covering_polygonal(
        data, halfspaces, B_eff, eps, norms=EUCLIDEAN, enumeration_cap=enumeration_cap
    )
    params = dict(report.parameters)
    params["gamma"] = float(gamma)
    params["lambda_max_inverse"] = B_eff**2
    return BoundReport(
        kind="CoveringLog",
        value=report.value,
        theorem_tag="linear_quadratic_lattice",
        parameters=params,
    )


# ---------------------------------------------------------------------------
# conic constraints


def rademacher_conic(
    n: int,
    X_b: float,
    B_b: float,
    cones: Sequence[SOConstraint],
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> BoundReport:
    """Conic duality bound
    (X_b / sqrt(n)) * min(B_b, sum_k (B_b ||a_k|| + d_k) / (K lam_min(A_k))).

    Every cone map must be square, symmetric, and positive-definite; with no
    cones the unconstrained ball bound X_b B_b / sqrt(n) is recovered.
    """
    if n < 1 or X_b <= 0.0 or B_b <= 0.0:
        raise ValueError("need n >= 1 and positive X_b, B_b")
    params: dict = {"n": n, "X_b": X_b, "B_b": B_b, "K": len(cones)}
    if not cones:
        params["branch"] = "ball"
        return BoundReport(
            kind="Rademacher",
            value=X_b * B_b / math.sqrt(n),
            theorem_tag="conic_dual",
            parameters=params,
        )
    K = len(cones)
    inner = 0.0
    min_eigs = []
    for idx, cone in enumerate(cones):
        A = cone.map
        if A.shape[0] != A.shape[1]:
            raise ValueError(f"cone {idx}: map must be square")
        if float(np.max(np.abs(A - A.T))) > tol.symmetry:
            raise ValueError(f"cone {idx}: map must be symmetric")
        lam_min = float(np.linalg.eigvalsh((A + A.T) / 2.0).min())
        if lam_min <= tol.psd_slack:
            raise ValueError(f"cone {idx}: map must be positive-definite")
        min_eigs.append(lam_min)
        inner += (B_b * float(np.linalg.norm(cone.slope)) + cone.shift) / (K * lam_min)
    params["inner_sum"] = inner
    params["min_eigenvalues"] = min_eigs
    params["branch"] = "cones" if inner < B_b else "ball"
    value = X_b / math.sqrt(n) * min(B_b, inner)
    return BoundReport(
        kind="Rademacher", value=value, theorem_tag="conic_dual", parameters=params
    )


# ---------------------------------------------------------------------------
# chaining and generalization


def _adaptive_trapezoid(
    f: Callable[[float], float], a: float, b: float, tol: float, max_depth: int = 48
) -> float:
    fa, fb = f(a), f(b)

    def recurse(x0, f0, x1, f1, whole, budget, depth):
        xm = 0.5 * (x0 + x1)
        fm = f(xm)
        left = 0.5 * (xm - x0) * (f0 + fm)
        right = 0.5 * (x1 - xm) * (fm + f1)
        if depth >= max_depth or abs(left + right - whole) <= 3.0 * budget:
            return left + right + (left + right - whole) / 3.0
        return recurse(x0, f0, xm, fm, left, budget / 2.0, depth + 1) + recurse(
            xm, fm, x1, f1, right, budget / 2.0, depth + 1
        )

    whole = 0.5 * (b - a) * (fa + fb)
    return recurse(a, fa, b, fb, whole, tol, 0)


def dudley_rademacher_from_covering(
    cover_fn: Callable[[float], float],
    n: int,
    eps_max: float,
    c_chain: float = 1.0,
    quad_tol: float = 1e-6,
) -> BoundReport:
    """Entropy-integral bound c * integral of sqrt(cover_fn(eps)/n) d eps.

    ``cover_fn`` maps eps to a log covering number at resolution sqrt(n)*eps
    and must be nonincreasing and identically zero beyond ``eps_max``.  The
    quadrature is adaptive trapezoid; the sliver below eps_min =
    1e-6 * eps_max is bounded by eps_min * sqrt(cover_fn(eps_min)/n).
    """
    if eps_max <= 0.0 or c_chain <= 0.0 or n < 1:
        raise ValueError("need positive eps_max, c_chain and n >= 1")
    seen: List[Tuple[float, float]] = []

    def logN(eps: float) -> float:
        val = float(cover_fn(eps))
        seen.append((eps, val))
        return val

    def integrand(eps: float) -> float:
        return math.sqrt(max(logN(eps), 0.0) / n)

    eps_min = 1e-6 * eps_max
    sliver = eps_min * integrand(eps_min)
    integral = _adaptive_trapezoid(integrand, eps_min, eps_max, quad_tol)

    seen.sort(key=lambda t: t[0])
    values = [v for _, v in seen]
    slack = 1e-9 * (1.0 + max(abs(v) for v in values))
    for earlier, later in zip(values, values[1:]):
        if later > earlier + slack:
            raise ValueError(
                "cover function must be nonincreasing in eps; detected increase"
                f" of {later - earlier:.3e} on the quadrature grid"
            )
    value = c_chain * (sliver + integral)
    return BoundReport(
        kind="Rademacher",
        value=value,
        theorem_tag="entropy_integral",
        parameters={
            "eps_max": eps_max,
            "eps_min": eps_min,
            "c_chain": c_chain,
            "n": n,
            "evaluations": len(seen),
            "sliver": sliver,
        },
    )


def generalization_bound(
    emp_risk: float,
    rad: BoundReport,
    lipschitz: float,
    n: int,
    delta: float,
    c_conf: float = 1.0,
) -> BoundReport:
    """Risk bound emp + 4 L R + c_conf sqrt(log(1/delta) / (2n)).

    ``rad`` must be a Rademacher report; the confidence constant is explicit
    because the underlying statement only fixes it up to a universal factor.
    """
    if rad.kind != "Rademacher":
        raise ValueError("rad must be a Rademacher bound report")
    if not 0.0 < delta <= 1.0:
        raise ValueError("delta must lie in (0, 1]")
    if delta == 1.0:
        warnings.warn("delta = 1 puts the confidence term at zero", RuntimeWarning, stacklevel=2)
    if lipschitz <= 0.0 or n < 1:
        raise ValueError("need positive lipschitz constant and n >= 1")
    conf = c_conf * math.sqrt(math.log(1.0 / delta) / (2.0 * n))
    value = emp_risk + 4.0 * lipschitz * rad.value + conf
    return BoundReport(
        kind="Generalization",
        value=value,
        theorem_tag="uniform_risk",
        parameters={
            "emp_risk": emp_risk,
            "lipschitz": lipschitz,
            "delta": delta,
            "c_conf": c_conf,
            "confidence_term": conf,
            "rademacher_value": rad.value,
            "rademacher_tag": rad.theorem_tag,
            "n": n,
        },
        mc_stderr=rad.mc_stderr,
    )


# ---------------------------------------------------------------------------
# orchestration helper


def circumscribing_matrix(
    cset: ConstraintSet,
    data: LabeledDataset,
    method: str = "trace",
) -> Tuple[EllipsoidConstraint, dict]:
    """Combine the ball and all ellipsoids of a set into one circumscribing
    ellipsoid, choosing the family weight by the requested criterion.

    method='trace' minimizes the trace bound; method='volume' (two ellipsoids
    only) minimizes the ellipsoid volume.  Returns the level-one ellipsoid
    and the optimizer diagnostics.
    """
    p = data.p
    ball = EllipsoidConstraint(np.eye(p) / cset.ball_radius**2, 1.0)
    members = [ball] + [
        EllipsoidConstraint(e.normalized_matrix(), 1.0) for e in cset.ellipsoids
    ]
    if len(members) == 1:
        return ball, {"gamma": 1.0, "members": 1}
    if len(members) == 2:
        if method == "volume":
            gamma, _, _, _ = volume_min_gamma(members[0], members[1])
        elif method == "trace":
            gamma, _ = trace_min_gamma(members[0], members[1], data)
        else:
            raise ValueError("method must be 'trace' or 'volume'")
        return kahan_combine(members[0], members[1], gamma), {
            "gamma": gamma,
            "members": 2,
            "method": method,
        }
    if method != "trace":
        raise ValueError("more than two ellipsoids support only the trace criterion")
    weights, value = simplex_trace_min(members, data)
    A = sum(w * m.normalized_matrix() for w, m in zip(weights, members))
    return EllipsoidConstraint(A, 1.0), {
        "weights": [float(w) for w in weights],
        "members": len(members),
        "method": method,
        "value": value,
    }
