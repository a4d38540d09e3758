"""Consensus-splitting (ADMM) machinery shared by the linear-maximization and
constrained-ridge solvers.

Each constraint owns one lifted block z = E beta + f projected onto a simple
set (ball, box, l1 ball, or second-order cone); the coordination step is a
p x p linear solve with a factorization computed once per problem.  Columns
of the iterate matrices are independent subproblems, so many right-hand
sides are solved in a single batch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np
import scipy.linalg as sla

from .config import DEFAULT_TOLERANCES
from .core import ConstraintSet, LabeledDataset
from .geometry import project_ball, project_ellipsoid, project_halfspace


class SolverError(RuntimeError):
    """Consensus solver failed to produce a usable iterate."""


class InfeasibleSetError(SolverError):
    """The constraint set appears to be empty.

    ``block`` names the constraint whose residual stayed largest, serving as
    the certificate of which requirement could not be met.
    """

    def __init__(self, block: str, residual: float):
        super().__init__(
            f"constraint set appears infeasible; worst block {block!r}"
            f" kept residual {residual:.3e}"
        )
        self.block = block
        self.residual = residual


@dataclass
class SolveInfo:
    converged: bool
    iterations: int
    primal_residual: float
    dual_residual: float
    max_violation: float
    rho: float


@dataclass(frozen=True)
class SolverOptions:
    tol: float = DEFAULT_TOLERANCES.optimizer_stop
    max_iter: int = 10_000
    rho: float = 1.0
    feasibility: float = DEFAULT_TOLERANCES.feasibility


# one projection routine per block kind, vectorized over columns -------------


def _project_ball_cols(Z: np.ndarray, radius: float) -> np.ndarray:
    norms = np.linalg.norm(Z, axis=0)
    scale = np.ones_like(norms)
    mask = norms > radius
    scale[mask] = radius / norms[mask]
    return Z * scale[None, :]


def _project_upper_box_cols(Z: np.ndarray, bounds: np.ndarray) -> np.ndarray:
    return np.minimum(Z, bounds[:, None])


def _project_l1_cols(V: np.ndarray, radius: float) -> np.ndarray:
    # sort-based Euclidean projection onto the l1 ball, column-wise
    d, m = V.shape
    A = np.abs(V)
    inside = A.sum(axis=0) <= radius
    U = np.sort(A, axis=0)[::-1]
    css = np.cumsum(U, axis=0) - radius
    ks = np.arange(1, d + 1)[:, None]
    cond = U * ks > css
    rho = d - 1 - np.argmax(cond[::-1], axis=0)
    theta = np.take_along_axis(css, rho[None, :], axis=0)[0] / (rho + 1.0)
    theta = np.maximum(theta, 0.0)
    W = np.sign(V) * np.maximum(A - theta[None, :], 0.0)
    W[:, inside] = V[:, inside]
    return W


def _project_soc_cols(Z: np.ndarray) -> np.ndarray:
    # last row is the cone height t
    U, t = Z[:-1, :], Z[-1, :]
    norms = np.linalg.norm(U, axis=0)
    out = Z.copy()
    polar = norms <= -t
    out[:, polar] = 0.0
    outside = (norms > t) & ~polar
    if np.any(outside):
        scale = 0.5 * (norms[outside] + t[outside])
        safe = np.where(norms[outside] > 0.0, norms[outside], 1.0)
        out[:-1, outside] = U[:, outside] * (scale / safe)[None, :]
        out[-1, outside] = scale
    return out


def _project_soc_grouped(Z: np.ndarray, count: int, rows: int) -> np.ndarray:
    """Project ``count`` stacked cones of ``rows`` lifted rows each (last row
    of each group is the height)."""
    W = Z.reshape(count, rows, -1)
    U, t = W[:, :-1, :], W[:, -1, :]
    norms = np.linalg.norm(U, axis=1)  # (count, m)
    inside = norms <= t
    polar = norms <= -t
    scale = 0.5 * (norms + t)
    safe = np.where(norms > 0.0, norms, 1.0)
    factor = np.where(inside, 1.0, scale / safe)
    factor = np.where(polar, 0.0, factor)
    out_u = U * factor[:, None, :]
    out_t = np.where(inside, t, np.where(polar, 0.0, scale))
    return np.concatenate([out_u, out_t[:, None, :]], axis=1).reshape(Z.shape)


def _project_unit_balls_grouped(Z: np.ndarray, count: int, rows: int) -> np.ndarray:
    """Project ``count`` stacked blocks of ``rows`` rows onto unit balls."""
    W = Z.reshape(count, rows, -1)
    norms = np.linalg.norm(W, axis=1)
    factor = np.where(norms > 1.0, 1.0 / np.where(norms > 0.0, norms, 1.0), 1.0)
    return (W * factor[:, None, :]).reshape(Z.shape)


@dataclass
class _Block:
    name: str
    rows: slice
    project: Callable[[np.ndarray], np.ndarray]
    violation: Callable[[np.ndarray], np.ndarray]  # beta (p, m) -> (m,)
    scale_cap: Callable[[np.ndarray], np.ndarray]  # largest t with t*beta feasible


def _build_blocks(cset: ConstraintSet, p: int) -> Tuple[np.ndarray, np.ndarray, List[_Block]]:
    """Stack all lifted maps into one (D, p) matrix plus offsets and blocks."""
    rows: List[np.ndarray] = []
    offsets: List[np.ndarray] = []
    blocks: List[_Block] = []
    cursor = 0

    def add(name, E, f, project, violation, scale_cap):
        nonlocal cursor
        d = E.shape[0]
        rows.append(E)
        offsets.append(f)
        blocks.append(_Block(name, slice(cursor, cursor + d), project, violation, scale_cap))
        cursor += d

    B = cset.ball_radius
    add(
        "ball",
        np.eye(p),
        np.zeros(p),
        lambda Z: _project_ball_cols(Z, B),
        lambda Beta: np.linalg.norm(Beta, axis=0) - B,
        lambda Beta: B / np.maximum(np.linalg.norm(Beta, axis=0), 1e-300),
    )

    if cset.halfspaces:
        W = np.stack([h.normal for h in cset.halfspaces])
        b = np.array([h.offset for h in cset.halfspaces])
        # unit-normal rows keep the lifted system well scaled
        row_scale = np.where(np.linalg.norm(W, axis=1) > 0.0, np.linalg.norm(W, axis=1), 1.0)
        W = W / row_scale[:, None]
        b = b / row_scale
        norms = np.maximum(np.linalg.norm(W, axis=1), 1.0)

        def hs_violation(Beta, W=W, b=b, norms=norms):
            return ((W @ Beta - b[:, None]) / norms[:, None]).max(axis=0)

        def hs_cap(Beta, W=W, b=b):
            vals = W @ Beta  # (V, m)
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios = np.where(vals > 0.0, b[:, None] / vals, np.inf)
            ratios = np.where(
                (vals <= 0.0) | (b[:, None] >= vals), np.inf, ratios
            )
            return np.clip(ratios.min(axis=0), 0.0, None)

        add(
            "halfspaces",
            W,
            -b,  # z = W beta - b, feasible when z <= 0
            lambda Z: np.minimum(Z, 0.0),
            hs_violation,
            hs_cap,
        )

    if cset.ellipsoids:
        # one grouped block: stacked matrix square roots, unit-ball sections
        roots = []
        for e in cset.ellipsoids:
            A = e.normalized_matrix()
            lam, V = np.linalg.eigh(A)
            lam = np.clip(lam, 0.0, None)
            roots.append((V * np.sqrt(lam)) @ V.T)  # ||M beta|| <= 1
        count = len(roots)
        M_stack = np.concatenate(roots, axis=0)

        def el_violation(Beta, M=M_stack, count=count):
            norms = np.linalg.norm((M @ Beta).reshape(count, p, -1), axis=1)
            return norms.max(axis=0) - 1.0

        def el_cap(Beta, M=M_stack, count=count):
            norms = np.linalg.norm((M @ Beta).reshape(count, p, -1), axis=1).max(axis=0)
            return np.where(norms > 0.0, 1.0 / norms, np.inf)

        add(
            "ellipsoids",
            M_stack,
            np.zeros(count * p),
            lambda Z, c=count: _project_unit_balls_grouped(Z, c, p),
            el_violation,
            el_cap,
        )

    for i, blk in enumerate(cset.l1_blocks):
        U = blk.columns.T  # (|I|, p)
        c = blk.level

        def l1_violation(Beta, U=U, c=c):
            return np.abs(U @ Beta).sum(axis=0) - c

        def l1_cap(Beta, U=U, c=c):
            norms = np.abs(U @ Beta).sum(axis=0)
            return np.where(norms > 0.0, c / norms, np.inf)

        add(
            f"l1_block[{i}]",
            U,
            np.zeros(U.shape[0]),
            lambda Z, c=c: _project_l1_cols(Z, c),
            l1_violation,
            l1_cap,
        )

    if cset.cones:
        # group cones by lifted row count so each group projects in one shot
        by_rows: dict = {}
        for i, k in enumerate(cset.cones):
            by_rows.setdefault(k.map.shape[0] + 1, []).append((i, k))
        for group_rows, members in by_rows.items():
            E = np.concatenate(
                [np.vstack([k.map, k.slope[None, :]]) for _, k in members], axis=0
            )
            f = np.concatenate(
                [np.concatenate([np.zeros(k.map.shape[0]), [k.shift]]) for _, k in members]
            )
            count = len(members)
            maps = np.stack([k.map for _, k in members])  # (count, rows-1, p)
            slopes = np.stack([k.slope for _, k in members])  # (count, p)
            shifts = np.array([k.shift for _, k in members])

            def cone_violation(Beta, maps=maps, slopes=slopes, shifts=shifts):
                norms = np.linalg.norm(maps @ Beta, axis=1)  # (count, m)
                rhs = slopes @ Beta + shifts[:, None]
                return (norms - rhs).max(axis=0)

            def cone_cap(Beta, maps=maps, slopes=slopes, shifts=shifts):
                # largest t with t*beta inside every cone of the group; valid
                # only when the origin is strictly feasible (all shifts > 0)
                gap = np.linalg.norm(maps @ Beta, axis=1) - slopes @ Beta
                if np.any(shifts <= 0.0):
                    vio = (gap - shifts[:, None]).max(axis=0)
                    return np.where(vio <= 0.0, 1.0, np.nan)
                with np.errstate(divide="ignore"):
                    caps = np.where(gap > 0.0, shifts[:, None] / gap, np.inf)
                return caps.min(axis=0)

            name = f"cones[{','.join(str(i) for i, _ in members)}]"
            add(
                name,
                E,
                f,
                lambda Z, c=count, r=group_rows: _project_soc_grouped(Z, c, r),
                cone_violation,
                cone_cap,
            )

    E_all = np.concatenate(rows, axis=0)
    f_all = np.concatenate(offsets)
    return E_all, f_all, blocks


class ConsensusProblem:
    """ADMM over the lifted blocks of one constraint set.

    ``quadratic`` adds a fixed quadratic term 0.5 beta^T H beta - h0 . beta to
    the objective (used by the ridge fitter); without it the problem is pure
    linear maximization of g . beta.
    """

    def __init__(
        self,
        cset: ConstraintSet,
        p: int,
        options: Optional[SolverOptions] = None,
    ):
        self.cset = cset
        self.p = p
        self.opts = options or SolverOptions()
        self.E, self.f, self.blocks = _build_blocks(cset, p)
        self.Q = self.E.T @ self.E
        self.D = self.E.shape[0]

    # ---- feasibility helpers ------------------------------------------------

    def violations(self, Beta: np.ndarray) -> np.ndarray:
        """(m,) worst violation per column across blocks."""
        worst = np.full(Beta.shape[1], -np.inf)
        for blk in self.blocks:
            worst = np.maximum(worst, blk.violation(Beta))
        return worst

    def repair(self, Beta: np.ndarray, passes: int = 30) -> np.ndarray:
        """Drive near-feasible iterates into the set.

        Cycles exact projections for the analytically projectable blocks
        (ball, half-spaces, ellipsoids) and scales toward the origin for any
        still-violated lifted block whose set contains it, so the reported
        point never exploits infeasibility beyond the feasibility tolerance.
        """
        target = self.opts.feasibility
        Beta = Beta.copy()
        for _ in range(passes):
            worst = self.violations(Beta)
            if np.all(worst <= target):
                break
            cols = np.where(worst > target)[0]
            for c in cols:
                beta = Beta[:, c]
                beta = project_ball(beta, self.cset.ball_radius)
                for h in self.cset.halfspaces:
                    beta = project_halfspace(beta, h)
                for e in self.cset.ellipsoids:
                    beta = project_ellipsoid(beta, e)
                Beta[:, c] = beta
            # lifted blocks without analytic projections: radial pullback
            for blk in self.blocks:
                if blk.name == "ball" or blk.name.startswith(("halfspaces", "ellipsoid")):
                    continue
                viol = blk.violation(Beta)
                need = viol > target
                if not np.any(need):
                    continue
                caps = blk.scale_cap(Beta)
                scale = np.where(need, np.minimum(caps, 1.0), 1.0)
                scale = np.where(np.isnan(scale), 1.0, scale)
                Beta = Beta * scale[None, :]
        return Beta

    # ---- core iteration ------------------------------------------------------

    def _project_cols(self, Z: np.ndarray) -> np.ndarray:
        out = np.empty_like(Z)
        for blk in self.blocks:
            out[blk.rows] = blk.project(Z[blk.rows])
        return out

    def _iterate(
        self,
        C0: np.ndarray,
        H: Optional[np.ndarray],
    ) -> Tuple[np.ndarray, SolveInfo]:
        """Run ADMM; the beta step solves (H + rho Q) beta = C0 + rho E^T(z-u-f).

        For pure linear objectives H is None and Q alone is factored, so the
        same factorization serves every penalty value.
        """
        opts = self.opts
        p, D = self.p, self.D
        m = C0.shape[1]
        rho = opts.rho
        reg = 1e-12 * (1.0 + float(np.trace(self.Q)) / p)

        def factor(rho_val):
            if H is None:
                M = self.Q + reg * np.eye(p)
            else:
                M = H / rho_val + self.Q + reg * np.eye(p)
            return sla.cho_factor(M, lower=True)

        cf = factor(rho)
        F = self.f[:, None]
        Z = np.zeros((D, m))
        U = np.zeros((D, m))
        Beta = np.zeros((p, m))
        denom_pri = math.sqrt(D * m)
        denom_dua = math.sqrt(p * m)

        info = SolveInfo(False, 0, math.inf, math.inf, math.inf, rho)
        stall_check = None
        it = 0
        for it in range(1, opts.max_iter + 1):
            rhs = C0 / rho + self.E.T @ (Z - U - F)
            Beta = sla.cho_solve(cf, rhs)
            EBf = self.E @ Beta + F
            Z_old = Z
            Z = self._project_cols(EBf + U)
            U = U + EBf - Z
            R = EBf - Z
            r_norm = float(np.linalg.norm(R)) / denom_pri
            s_norm = rho * float(np.linalg.norm(self.E.T @ (Z - Z_old))) / denom_dua
            scale = 1.0 + float(np.linalg.norm(Z)) / denom_pri
            if r_norm < opts.tol * scale and s_norm < opts.tol * scale:
                info = SolveInfo(True, it, r_norm, s_norm, math.inf, rho)
                break
            # residual balancing keeps the penalty in a useful range
            if it % 25 == 0:
                if r_norm > 10.0 * s_norm:
                    rho *= 2.0
                    U /= 2.0
                    cf = factor(rho)
                elif s_norm > 10.0 * r_norm:
                    rho /= 2.0
                    U *= 2.0
                    cf = factor(rho)
            if it % 500 == 0:
                if (
                    stall_check is not None
                    and r_norm > max(1e3 * opts.tol * scale, 1e-6)
                    and r_norm > 0.999 * stall_check
                ):
                    worst = self._worst_block(R)
                    raise InfeasibleSetError(worst, r_norm)
                stall_check = r_norm
        else:
            info = SolveInfo(False, it, r_norm, s_norm, math.inf, rho)
        return Beta, info

    def _worst_block(self, R: np.ndarray) -> str:
        worst_name, worst_val = "ball", -math.inf
        for blk in self.blocks:
            v = float(np.linalg.norm(R[blk.rows]))
            if v > worst_val:
                worst_name, worst_val = blk.name, v
        return worst_name

    # ---- public entry points --------------------------------------------------

    def maximize(self, G: np.ndarray) -> Tuple[np.ndarray, np.ndarray, SolveInfo]:
        """Maximize g . beta over the set for each column g of G.

        Returns (values, argmax columns, info); values come from the
        feasibility-repaired iterates.
        """
        G = np.atleast_2d(np.asarray(G, dtype=float))
        if G.shape[0] != self.p:
            raise ValueError(f"objective dimension {G.shape[0]} != p={self.p}")
        Beta, info = self._iterate(G, H=None)
        Beta = self.repair(Beta)
        info.max_violation = float(np.max(self.violations(Beta)))
        values = np.sum(G * Beta, axis=0)
        return values, Beta, info

    def ridge_fit(
        self, data: LabeledDataset, lam: float
    ) -> Tuple[np.ndarray, SolveInfo]:
        """Minimize (1/n)||y - X^T beta||^2 + lam ||beta||^2 over the set."""
        X, y, n = data.features, data.labels, data.n
        H = (2.0 / n) * (X @ X.T) + 2.0 * lam * np.eye(self.p)
        c0 = (2.0 / n) * (X @ y)
        Beta, info = self._iterate(c0[:, None], H=H)
        Beta = self.repair(Beta)
        info.max_violation = float(np.max(self.violations(Beta)))
        return Beta[:, 0], info
