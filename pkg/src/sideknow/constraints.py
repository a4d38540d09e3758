"""Compile side-knowledge statements about unlabeled examples into constraints.

Every compiler is pure and deterministic: the same inputs always produce the
same constraint objects.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .config import DEFAULT_TOLERANCES
from .core import (
    EllipsoidConstraint,
    HalfSpace,
    L1PredictionBlock,
    SOConstraint,
    UnlabeledSet,
)

MAX_EXPAND_INDICES = 12  # expansion emits 2^|I| half-spaces


@dataclass(frozen=True)
class PairSpec:
    """A constrained pair (i, j) of unlabeled examples with bound c."""

    i: int
    j: int
    c: float


@dataclass(frozen=True)
class GraphSpec:
    """Weighted graph over unlabeled examples: edges (i, j, weight >= 0)."""

    edges: tuple
    node_count: int

    def __post_init__(self):
        edges = tuple((int(i), int(j), float(w)) for i, j, w in self.edges)
        m = int(self.node_count)
        if m < 1:
            raise ValueError("node_count must be >= 1")
        for i, j, w in edges:
            if i == j:
                raise ValueError(f"self-loop at node {i}")
            if not (0 <= i < m and 0 <= j < m):
                raise ValueError(f"edge ({i},{j}) out of range for {m} nodes")
            if w < 0.0:
                raise ValueError(f"negative weight {w} on edge ({i},{j})")
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "node_count", m)


def _check_index(u: UnlabeledSet, i: int) -> None:
    if not 0 <= i < u.m:
        raise IndexError(f"index {i} out of range for {u.m} unlabeled examples")


def compile_poset(u: UnlabeledSet, pairs: Sequence[PairSpec]) -> list:
    """Ordering knowledge: prediction at example i exceeds the one at j by at
    most c, giving one half-space (x_i - x_j) . beta <= c per pair."""
    out = []
    for spec in pairs:
        _check_index(u, spec.i)
        _check_index(u, spec.j)
        w = u.column(spec.i) - u.column(spec.j)
        out.append(HalfSpace(normal=w, offset=spec.c))
    return out


def compile_must_link(u: UnlabeledSet, pairs: Sequence[PairSpec]) -> list:
    """Nearness knowledge |prediction_i - prediction_j| <= c, c >= 0; two
    half-spaces per pair."""
    out = []
    for spec in pairs:
        if spec.c < 0.0:
            raise ValueError(f"must-link bound must be nonnegative, got {spec.c}")
        _check_index(u, spec.i)
        _check_index(u, spec.j)
        w = u.column(spec.i) - u.column(spec.j)
        out.append(HalfSpace(normal=w, offset=spec.c))
        out.append(HalfSpace(normal=-w, offset=spec.c))
    return out


def compile_sparsity_l1(
    u: UnlabeledSet,
    index_set: Sequence[int],
    c_I: float,
    expand: bool = False,
) -> Union[L1PredictionBlock, list]:
    """Sparsity surrogate: the l1 norm of the predictions on the index set is
    at most c_I.

    With ``expand`` the block is rewritten as 2^|I| half-spaces (one per sign
    pattern), the form consumed by the polygonal covering bound; |I| <= 12
    keeps the expansion tractable.
    """
    indices = [int(i) for i in index_set]
    if not indices:
        raise ValueError("index set must be nonempty")
    for i in indices:
        _check_index(u, i)
    cols = u.features[:, indices]
    if not expand:
        return L1PredictionBlock(columns=cols, level=c_I, indices=tuple(indices))
    if len(indices) > MAX_EXPAND_INDICES:
        raise ValueError(
            f"expansion of {len(indices)} indices needs 2^{len(indices)} half-spaces;"
            f" limit is {MAX_EXPAND_INDICES}"
        )
    out = []
    for signs in itertools.product((1.0, -1.0), repeat=len(indices)):
        w = cols @ np.asarray(signs)
        out.append(HalfSpace(normal=w, offset=float(c_I)))
    return out


def compile_linf_box(u: UnlabeledSet, index_set: Sequence[int], c_I: float) -> list:
    """Max-norm knowledge |prediction_i| <= c_I on the index set; 2|I|
    half-spaces."""
    indices = [int(i) for i in index_set]
    if not indices:
        raise ValueError("index set must be nonempty")
    out = []
    for i in indices:
        _check_index(u, i)
        x = u.column(i)
        out.append(HalfSpace(normal=x, offset=float(c_I)))
        out.append(HalfSpace(normal=-x, offset=float(c_I)))
    return out


def compile_quadratic_pairwise(
    u: UnlabeledSet, pairs: Sequence[PairSpec], mode: str = "must_link"
) -> list:
    """Pairwise quadratic knowledge.

    mode='must_link': (prediction_i - prediction_j)^2 <= c via the rank-one
    outer product of the column difference.
    mode='product': prediction_i * prediction_j <= c via the symmetrized
    cross product, accepted only when that matrix is positive semidefinite
    (otherwise the set is not an ellipsoid and the pair is rejected).
    """
    if mode not in ("must_link", "product"):
        raise ValueError("mode must be 'must_link' or 'product'")
    out = []
    for spec in pairs:
        _check_index(u, spec.i)
        _check_index(u, spec.j)
        if not spec.c > 0.0:
            raise ValueError(f"pairwise quadratic level must be positive, got {spec.c}")
        xi, xj = u.column(spec.i), u.column(spec.j)
        if mode == "must_link":
            d = xi - xj
            A = np.outer(d, d)
        else:
            A = 0.5 * (np.outer(xi, xj) + np.outer(xj, xi))
            min_eig = float(np.linalg.eigvalsh(A).min())
            if min_eig < -DEFAULT_TOLERANCES.psd_slack:
                raise ValueError(
                    f"pair ({spec.i},{spec.j}): symmetrized product matrix has"
                    f" eigenvalue {min_eig:.3e} < 0; the product constraint is"
                    " ellipsoidal only when that matrix is positive semidefinite"
                )
        out.append(EllipsoidConstraint(matrix=A, level=spec.c))
    return out


def first_difference_operator(m: int) -> np.ndarray:
    """(m-1) x m banded matrix with rows (..., 1, -1, ...): a discrete
    derivative penalizing differences of neighboring predictions."""
    if m < 1:
        raise ValueError("m must be >= 1")
    G = np.zeros((max(m - 1, 0), m))
    for i in range(m - 1):
        G[i, i] = 1.0
        G[i, i + 1] = -1.0
    return G


def compile_quadratic_form(
    u: UnlabeledSet, gamma_op: Union[str, np.ndarray], c: float
) -> EllipsoidConstraint:
    """Energy/smoothness knowledge ||Gamma X_U^T beta||^2 <= c.

    gamma_op: 'identity' (prediction energy), 'first_difference' (smoothness
    of neighboring predictions), or an explicit matrix with m columns.
    """
    if isinstance(gamma_op, str):
        if gamma_op == "identity":
            G = np.eye(u.m)
        elif gamma_op == "first_difference":
            G = first_difference_operator(u.m)
        else:
            raise ValueError(f"unknown gamma_op {gamma_op!r}")
    else:
        G = np.asarray(gamma_op, dtype=float)
        if G.ndim != 2 or G.shape[1] != u.m:
            raise ValueError(f"gamma_op must have m={u.m} columns")
    XU = u.features
    if G.shape[0] == 0:
        A = np.zeros((u.p, u.p))
    else:
        GX = G @ XU.T
        A = GX.T @ GX
    return EllipsoidConstraint(matrix=A, level=c)


def laplacian_matrix(g: GraphSpec) -> np.ndarray:
    """Graph Laplacian (degree matrix minus adjacency) from edge weights."""
    L = np.zeros((g.node_count, g.node_count))
    for i, j, w in g.edges:
        L[i, i] += w
        L[j, j] += w
        L[i, j] -= w
        L[j, i] -= w
    return L


def compile_graph_laplacian(u: UnlabeledSet, g: GraphSpec, c: float) -> EllipsoidConstraint:
    """Neighborhood-similarity knowledge: the Laplacian quadratic form of the
    predictions is at most c."""
    if g.node_count != u.m:
        raise ValueError(f"graph has {g.node_count} nodes but sample has m={u.m}")
    L = laplacian_matrix(g)
    A = u.features @ L @ u.features.T
    return EllipsoidConstraint(matrix=(A + A.T) / 2.0, level=c)


def gaussian_edge_weights(
    u: UnlabeledSet, edges: Iterable, scale: float, norm_order: float = 2.0
) -> GraphSpec:
    """Build a GraphSpec with weights exp(-scale * ||x_i - x_j||_norm).

    Offered as a helper; any nonnegative weights can be supplied directly.
    """
    weighted = []
    for i, j in edges:
        d = float(np.linalg.norm(u.column(int(i)) - u.column(int(j)), ord=norm_order))
        weighted.append((int(i), int(j), math.exp(-scale * d)))
    return GraphSpec(edges=tuple(weighted), node_count=u.m)


def compile_robust_soc(mean: np.ndarray, spread: np.ndarray) -> SOConstraint:
    """Robust version of the linear constraint a . beta <= 1 when a is only
    known to lie in the ellipsoid {mean + spread u : ||u|| <= 1}:
    mean . beta + ||spread^T beta|| <= 1."""
    a_bar = np.asarray(mean, dtype=float)
    A = np.asarray(spread, dtype=float)
    if a_bar.ndim != 1 or A.ndim != 2 or A.shape[0] != a_bar.size:
        raise ValueError("spread must be a matrix with rows matching mean length")
    return SOConstraint(map=A.T, slope=-a_bar, shift=1.0)


def compile_chance_soc(mean: np.ndarray, covariance: np.ndarray, eta: float) -> SOConstraint:
    """Probabilistic version of a . beta <= 1 for Gaussian a with the given
    mean and covariance, required to hold with probability at least eta:
    mean . beta + z_eta ||covariance^(1/2) beta|| <= 1 with z_eta the standard
    normal quantile of eta.

    Only eta > 1/2 is supported; below that the quantile flips sign and the
    rearranged constraint is no longer a second-order cone of this form.
    """
    a_bar = np.asarray(mean, dtype=float)
    B = np.asarray(covariance, dtype=float)
    if not 0.5 < eta < 1.0:
        raise ValueError(f"eta must lie in (0.5, 1), got {eta}")
    if B.ndim != 2 or B.shape[0] != B.shape[1] or B.shape[0] != a_bar.size:
        raise ValueError("covariance must be square and match mean length")
    asym = float(np.max(np.abs(B - B.T)))
    if asym > DEFAULT_TOLERANCES.symmetry:
        raise ValueError(f"covariance asymmetry {asym:.3e}")
    eigs, vecs = np.linalg.eigh((B + B.T) / 2.0)
    if eigs.min() < -DEFAULT_TOLERANCES.psd_slack:
        raise ValueError(f"covariance has eigenvalue {eigs.min():.3e} < 0")
    root = (vecs * np.sqrt(np.clip(eigs, 0.0, None))) @ vecs.T
    z = inverse_normal_cdf(eta)
    return SOConstraint(map=z * root, slope=-a_bar, shift=1.0)


# ---------------------------------------------------------------------------
# standard-normal quantile

# Rational approximation coefficients (central region and tails), accurate to
# ~1.2e-9 before refinement.
_ICDF_A = (
    -3.969683028665376e01,
    2.209460984245205e02,
    -2.759285104469687e02,
    1.383577518672690e02,
    -3.066479806614716e01,
    2.506628277459239e00,
)
_ICDF_B = (
    -5.447609879822406e01,
    1.615858368580409e02,
    -1.556989798598866e02,
    6.680131188771972e01,
    -1.328068155288572e01,
)
_ICDF_C = (
    -7.784894002430293e-03,
    -3.223964580411365e-01,
    -2.400758277161838e00,
    -2.549732539343734e00,
    4.374664141464968e00,
    2.938163982698783e00,
)
_ICDF_D = (
    7.784695709041462e-03,
    3.224671290700398e-01,
    2.445134137142996e00,
    3.754408661907416e00,
)
_ICDF_SPLIT = 0.02425


def _icdf_raw(q: float) -> float:
    a, b, c, d = _ICDF_A, _ICDF_B, _ICDF_C, _ICDF_D
    if q < _ICDF_SPLIT:
        t = math.sqrt(-2.0 * math.log(q))
        return (((((c[0] * t + c[1]) * t + c[2]) * t + c[3]) * t + c[4]) * t + c[5]) / (
            (((d[0] * t + d[1]) * t + d[2]) * t + d[3]) * t + 1.0
        )
    r = q - 0.5
    s = r * r
    return (
        (((((a[0] * s + a[1]) * s + a[2]) * s + a[3]) * s + a[4]) * s + a[5])
        * r
        / (((((b[0] * s + b[1]) * s + b[2]) * s + b[3]) * s + b[4]) * s + 1.0)
    )


def inverse_normal_cdf(q: float) -> float:
    """Standard normal quantile, accurate to better than 1e-8 in probability.

    Rational approximation refined with one Halley step against the exact
    CDF (via erfc), so no dependency beyond the standard library is needed.
    """
    q = float(q)
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must lie strictly in (0, 1), got {q}")
    if q > 0.5:
        return -inverse_normal_cdf(1.0 - q)
    x = _icdf_raw(q)
    # Halley refinement: e = Phi(x) - q, u = e / phi(x)
    e = 0.5 * math.erfc(-x / math.sqrt(2.0)) - q
    u = e * math.sqrt(2.0 * math.pi) * math.exp(x * x / 2.0)
    return x - u / (1.0 + x * u / 2.0)
