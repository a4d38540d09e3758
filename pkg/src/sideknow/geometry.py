"""Circumscribing-ellipsoid constructions, simultaneous diagonalization, and
analytic projections onto the constraint primitives.

The combination family gamma*A1 + (1-gamma)*A2 over gamma in [0, 1] (levels
normalized to one) circumscribes the intersection of the two ellipsoids and
contains every tight circumscribing ellipsoid; the two optimizers below pick
the member minimizing either a trace criterion or the ellipsoid volume.
"""

from __future__ import annotations

import math
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg as sla

from .config import DEFAULT_TOLERANCES, Tolerances
from .core import EllipsoidConstraint, HalfSpace, LabeledDataset

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def kahan_combine(
    e1: EllipsoidConstraint, e2: EllipsoidConstraint, gamma: float
) -> EllipsoidConstraint:
    """Convex combination of two level-normalized ellipsoid matrices.

    The result circumscribes the intersection of the inputs for every
    gamma in [0, 1].
    """
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma}")
    A1 = e1.normalized_matrix()
    A2 = e2.normalized_matrix()
    if A1.shape != A2.shape:
        raise ValueError("ellipsoid dimensions disagree")
    return EllipsoidConstraint(matrix=gamma * A1 + (1.0 - gamma) * A2, level=1.0)


def _golden_refine(f: Callable[[float], float], lo: float, hi: float, tol: float) -> float:
    """Golden-section minimizer on [lo, hi]; assumes a unimodal bracket."""
    a, b = float(lo), float(hi)
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
    return 0.5 * (a + b)


def grid_golden_min(
    f: Callable[[float], float],
    lo: float = 0.0,
    hi: float = 1.0,
    grid: int = 64,
    tol: float = 1e-8,
) -> Tuple[float, float]:
    """Minimize a univariate function by a grid scan plus golden-section
    refinement around the best grid point.

    The grid guards against local minima; ties are broken toward the smaller
    argument.  Returns (argmin, value).
    """
    xs = np.linspace(lo, hi, grid)
    vals = np.array([f(x) for x in xs])
    if not np.any(np.isfinite(vals)):
        raise ValueError("objective is singular across the whole grid")
    i = int(np.nanargmin(np.where(np.isfinite(vals), vals, np.inf)))
    a = xs[max(i - 1, 0)]
    b = xs[min(i + 1, grid - 1)]
    x_ref = _golden_refine(f, a, b, tol)
    candidates = [(f(x_ref), x_ref), (vals[i], xs[i])]
    if np.isfinite(vals[0]):
        candidates.append((vals[0], xs[0]))
    best_val = min(c[0] for c in candidates)
    slack = 1e-12 * (1.0 + abs(best_val))
    best_x = min(x for v, x in candidates if v <= best_val + slack)
    return float(best_x), float(f(best_x))


def trace_min_gamma(
    e1: EllipsoidConstraint,
    e2: EllipsoidConstraint,
    X: LabeledDataset,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> Tuple[float, float]:
    """Pick the combination weight minimizing
    trace(X_L^T (gamma A1 + (1-gamma) A2)^(-1) X_L).

    Solved by a 64-point grid scan plus golden-section refinement; the
    objective is smooth but not assumed unimodal, so the grid guards against
    local minima.  Ties break toward the smaller gamma.
    """
    A1 = e1.normalized_matrix()
    A2 = e2.normalized_matrix()
    XL = X.features

    def objective(g: float) -> float:
        M = g * A1 + (1.0 - g) * A2
        try:
            cf = sla.cho_factor(M, lower=True)
        except np.linalg.LinAlgError:
            return math.inf
        except sla.LinAlgError:
            return math.inf
        return float(np.sum(XL * sla.cho_solve(cf, XL)))

    return grid_golden_min(objective, 0.0, 1.0, grid=64, tol=tol.root_find)


def simultaneous_diagonalization(A1: np.ndarray, A2: np.ndarray):
    """Congruence C with C^T A1 C and C^T A2 C both diagonal.

    Uses a Cholesky factor of whichever matrix is positive-definite followed
    by a symmetric eigen-solve of the transformed second matrix.  Returns
    (C, diag1, diag2).
    """
    def attempt(P: np.ndarray, S: np.ndarray):
        L = np.linalg.cholesky(P)
        Y = sla.solve_triangular(L, S, lower=True)
        M = sla.solve_triangular(L, Y.T, lower=True).T
        M = (M + M.T) / 2.0
        eigs, Q = np.linalg.eigh(M)
        C = sla.solve_triangular(L, Q, lower=True, trans="T")
        return C, eigs

    try:
        C, eigs = attempt(A1, A2)
        return C, np.ones(A1.shape[0]), eigs
    except np.linalg.LinAlgError:
        pass
    try:
        C, eigs = attempt(A2, A1)
        return C, eigs, np.ones(A1.shape[0])
    except np.linalg.LinAlgError:
        raise ValueError("at least one matrix must be positive-definite") from None


def volume_min_gamma(
    e1: EllipsoidConstraint,
    e2: EllipsoidConstraint,
    tol: Tolerances = DEFAULT_TOLERANCES,
):
    """Combination weight minimizing the volume of the circumscribing
    ellipsoid, i.e. maximizing prod(gamma*d1_i + (1-gamma)*d2_i) over the
    congruence-diagonalized entries.

    The log objective is concave; a guarded Newton iteration finds the
    maximizer.  Returns (gamma, C, diag1, diag2) with ties toward smaller
    gamma.
    """
    A1 = e1.normalized_matrix()
    A2 = e2.normalized_matrix()
    C, d1, d2 = simultaneous_diagonalization(A1, A2)

    delta = d1 - d2

    def deriv(g: float) -> float:
        return float(np.sum(delta / (g * d1 + (1.0 - g) * d2)))

    def deriv2(g: float) -> float:
        return -float(np.sum((delta / (g * d1 + (1.0 - g) * d2)) ** 2))

    # Endpoints may sit at -inf of the log objective when a diagonal entry
    # vanishes there; exclude them from the shortcut tests in that case.
    lo, hi = 0.0, 1.0
    lo_ok = np.all(d2 > 0.0)
    hi_ok = np.all(d1 > 0.0)
    if lo_ok and deriv(0.0) <= 0.0:
        return 0.0, C, d1, d2
    if hi_ok and deriv(1.0) >= 0.0:
        return 1.0, C, d1, d2
    if not lo_ok:
        lo = 1e-12
    if not hi_ok:
        hi = 1.0 - 1e-12
    g = 0.5 * (lo + hi)
    for _ in range(200):
        fp = deriv(g)
        if fp > 0.0:
            lo = g
        else:
            hi = g
        fpp = deriv2(g)
        step = -fp / fpp if fpp < 0.0 else 0.0
        g_new = g + step
        if not lo < g_new < hi:
            g_new = 0.5 * (lo + hi)
        if abs(g_new - g) < tol.root_find and hi - lo < math.sqrt(tol.root_find):
            g = g_new
            break
        g = g_new
    return float(min(max(g, 0.0), 1.0)), C, d1, d2


def _project_simplex_cols(V: np.ndarray) -> np.ndarray:
    """Euclidean projection of each column onto the probability simplex."""
    d, m = V.shape
    U = np.sort(V, axis=0)[::-1]
    css = np.cumsum(U, axis=0) - 1.0
    ks = np.arange(1, d + 1)[:, None]
    cond = U - css / ks > 0
    rho = d - 1 - np.argmax(cond[::-1], axis=0)
    theta = np.take_along_axis(css, rho[None, :], axis=0)[0] / (rho + 1.0)
    return np.maximum(V - theta[None, :], 0.0)


def simplex_trace_min(
    ellipsoids: Sequence[EllipsoidConstraint],
    X: LabeledDataset,
    restarts: int = 10,
    rng: Optional[np.random.Generator] = None,
    max_iter: int = 500,
    tol: Tolerances = DEFAULT_TOLERANCES,
):
    """Best-effort trace minimization over simplex weights for K ellipsoids.

    Projected gradient from the barycenter plus random restarts; global
    optimality is not claimed.  Returns (weights, value).
    """
    mats = [e.normalized_matrix() for e in ellipsoids]
    K = len(mats)
    if K == 0:
        raise ValueError("need at least one ellipsoid")
    XL = X.features
    if K == 1:
        M = mats[0]
        value = float(np.sum(XL * np.linalg.solve(M, XL)))
        return np.array([1.0]), value

    if rng is None:
        rng = np.random.default_rng(0)

    def objective_grad(g: np.ndarray):
        M = sum(gk * Ak for gk, Ak in zip(g, mats))
        try:
            cf = sla.cho_factor(M, lower=True)
        except (np.linalg.LinAlgError, sla.LinAlgError):
            return math.inf, None
        W = sla.cho_solve(cf, XL)
        val = float(np.sum(XL * W))
        grad = np.array([-float(np.sum(W * (Ak @ W))) for Ak in mats])
        return val, grad

    starts = [np.full(K, 1.0 / K)]
    for _ in range(max(restarts - 1, 0)):
        starts.append(rng.dirichlet(np.ones(K)))

    best_g, best_val = None, math.inf
    for g in starts:
        g = g.copy()
        val, grad = objective_grad(g)
        if not math.isfinite(val):
            continue
        step = 1.0
        for _ in range(max_iter):
            proposal = _project_simplex_cols((g - step * grad)[:, None])[:, 0]
            new_val, new_grad = objective_grad(proposal)
            if math.isfinite(new_val) and new_val < val:
                moved = float(np.linalg.norm(proposal - g))
                g, val, grad = proposal, new_val, new_grad
                step = min(step * 2.0, 1e6)
                if moved < tol.optimizer_stop:
                    break
            else:
                step *= 0.5
                if step < 1e-14:
                    break
        if val < best_val:
            best_val, best_g = val, g
    if best_g is None:
        raise ValueError("all simplex combinations were singular")
    return best_g, float(best_val)


# ---------------------------------------------------------------------------
# projections


def project_ball(z: np.ndarray, radius: float) -> np.ndarray:
    """Euclidean projection onto the ball of the given radius."""
    z = np.asarray(z, dtype=float)
    norm = float(np.linalg.norm(z))
    if norm <= radius:
        return z.copy()
    return z * (radius / norm)


def project_halfspace(z: np.ndarray, h: HalfSpace) -> np.ndarray:
    """Euclidean projection onto {beta : normal . beta <= offset}."""
    z = np.asarray(z, dtype=float)
    w = h.normal
    wn2 = float(w @ w)
    if wn2 == 0.0:
        return z.copy()
    excess = float(w @ z) - h.offset
    if excess <= 0.0:
        return z.copy()
    return z - (excess / wn2) * w


def project_soc(point: Tuple[np.ndarray, float]) -> Tuple[np.ndarray, float]:
    """Euclidean projection onto the standard cone {(u, t) : ||u|| <= t}."""
    u, t = point
    u = np.asarray(u, dtype=float)
    t = float(t)
    norm = float(np.linalg.norm(u))
    if norm <= t:
        return u.copy(), t
    if norm <= -t:
        return np.zeros_like(u), 0.0
    scale = (norm + t) / 2.0
    return (scale / norm) * u, scale


def project_ellipsoid(
    z: np.ndarray, e: EllipsoidConstraint, tol: Tolerances = DEFAULT_TOLERANCES
) -> np.ndarray:
    """Exact Euclidean projection onto {beta : beta^T A beta <= c}.

    In the eigenbasis of A the projection is beta_i = z_i / (1 + mu lam_i)
    with mu > 0 the unique root of sum(lam_i z_i^2 / (1 + mu lam_i)^2) = c,
    which is monotone decreasing in mu; found by safeguarded bisection plus
    Newton.  Directions with lam_i = 0 pass through unchanged.
    """
    z = np.asarray(z, dtype=float)
    A = (e.matrix + e.matrix.T) / 2.0
    c = e.level
    if float(z @ A @ z) <= c:
        return z.copy()
    lam, V = np.linalg.eigh(A)
    lam = np.clip(lam, 0.0, None)
    zt = V.T @ z

    def phi(mu: float) -> float:
        return float(np.sum(lam * zt**2 / (1.0 + mu * lam) ** 2)) - c

    def dphi(mu: float) -> float:
        return -2.0 * float(np.sum(lam**2 * zt**2 / (1.0 + mu * lam) ** 3))

    lo, hi = 0.0, 1.0
    while phi(hi) > 0.0:
        lo, hi = hi, hi * 4.0
        if hi > 1e30:
            break
    mu = 0.5 * (lo + hi)
    for _ in range(200):
        val = phi(mu)
        if val > 0.0:
            lo = mu
        else:
            hi = mu
        d = dphi(mu)
        mu_new = mu - val / d if d < 0.0 else 0.5 * (lo + hi)
        if not lo < mu_new < hi:
            mu_new = 0.5 * (lo + hi)
        if abs(mu_new - mu) <= tol.root_find * (1.0 + mu) and abs(val) <= tol.root_find * max(
            1.0, c
        ):
            mu = mu_new
            break
        mu = mu_new
    beta_t = zt / (1.0 + mu * lam)
    return V @ beta_t


def sample_intersection(
    e1: EllipsoidConstraint,
    e2: EllipsoidConstraint,
    count: int,
    rng: np.random.Generator,
    max_attempts: int = 50_000_000,
):
    """Uniform samples from the intersection of two ellipsoids by rejection
    from the smaller axis-aligned bounding box.

    Requires a positive-volume intersection (at least one matrix must be
    positive-definite).  Aborts with diagnostics when the acceptance rate
    drops below 1e-6.
    """
    if count == 0:
        return np.zeros((0, e1.dim))

    def box(e: EllipsoidConstraint):
        A = e.normalized_matrix()
        eigs = np.linalg.eigvalsh(A)
        if eigs.min() <= 0.0:
            return None
        inv_diag = np.diag(np.linalg.inv(A))
        return np.sqrt(inv_diag)

    boxes = [b for b in (box(e1), box(e2)) if b is not None]
    if not boxes:
        raise ValueError("at least one ellipsoid must be positive-definite")
    widths = min(boxes, key=lambda b: float(np.prod(b)))

    A1 = e1.normalized_matrix()
    A2 = e2.normalized_matrix()
    p = e1.dim
    out = []
    attempts = 0
    accepted = 0
    chunk = max(4 * count, 1024)
    while accepted < count:
        if attempts >= max_attempts or (
            attempts >= 1_000_000 and accepted / attempts < 1e-6
        ):
            raise RuntimeError(
                f"rejection sampling acceptance rate {accepted}/{attempts} below 1e-6"
            )
        Z = rng.uniform(-1.0, 1.0, size=(chunk, p)) * widths[None, :]
        attempts += chunk
        m1 = np.einsum("ij,jk,ik->i", Z, A1, Z) <= 1.0
        m2 = np.einsum("ij,jk,ik->i", Z, A2, Z) <= 1.0
        keep = Z[m1 & m2]
        accepted += keep.shape[0]
        out.append(keep)
    return np.concatenate(out, axis=0)[:count]
