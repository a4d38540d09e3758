"""Verification suites: every acceptance property runs as a named check.

Each check pairs an implementation path with an independent oracle (Monte
Carlo geometry, dense grids, exhaustive enumeration, or brute-force search)
and reports one pass/fail line.  The CLI ``verify`` subcommand and the
acceptance test module both run these.
"""

from __future__ import annotations

import inspect
import itertools
import math
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List

import numpy as np

from . import bounds as bnd
from .core import (
    ConstraintSet,
    EllipsoidConstraint,
    HalfSpace,
    L1PredictionBlock,
    LabeledDataset,
    SOConstraint,
    seeded_rng,
)
from .erm import fit_constrained_ridge, training_objective
from .experiment import desk_config, run_experiment, write_records_csv
from .geometry import (
    kahan_combine,
    sample_intersection,
    trace_min_gamma,
    volume_min_gamma,
)
from .rademacher import estimate_empirical_rademacher, sup_linear


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


def _result(name: str, start: float, failures: List[str], note: str = "") -> CheckResult:
    elapsed = time.perf_counter() - start
    if failures:
        detail = "; ".join(failures)
    else:
        detail = note or "all assertions held"
    return CheckResult(name, not failures, f"{detail} [{elapsed:.1f}s]", elapsed)


# ---------------------------------------------------------------------------
# shared instance generators and oracles


def _random_spd(rng: np.random.Generator, p: int, lo: float = 0.4, hi: float = 4.0) -> np.ndarray:
    Q, _ = np.linalg.qr(rng.standard_normal((p, p)))
    eigs = rng.uniform(lo, hi, p)
    return (Q * eigs) @ Q.T


def _random_data(rng: np.random.Generator, p: int, n: int) -> LabeledDataset:
    X = rng.standard_normal((p, n))
    X = X / np.linalg.norm(X, axis=0).max()  # X_b = 1
    y = rng.standard_normal(n)
    return LabeledDataset(X, y)


def _feasible_mask(P: np.ndarray, cset: ConstraintSet) -> np.ndarray:
    ok = np.linalg.norm(P, axis=0) <= cset.ball_radius
    for h in cset.halfspaces:
        ok &= h.normal @ P <= h.offset
    for e in cset.ellipsoids:
        A = e.normalized_matrix()
        ok &= np.einsum("in,il,ln->n", P, A, P) <= 1.0
    for k in cset.cones:
        ok &= np.linalg.norm(k.map @ P, axis=0) <= k.slope @ P + k.shift
    for b in cset.l1_blocks:
        ok &= np.abs(b.columns.T @ P).sum(axis=0) <= b.level
    return ok


def _grid_points(lo: np.ndarray, hi: np.ndarray, steps: int) -> np.ndarray:
    xs = np.linspace(lo[0], hi[0], steps)
    ys = np.linspace(lo[1], hi[1], steps)
    XX, YY = np.meshgrid(xs, ys, indexing="ij")
    return np.stack([XX.ravel(), YY.ravel()])


def grid_refine_max(g: np.ndarray, cset: ConstraintSet, steps: int = 1001, levels: int = 4):
    """Brute-force linear maximization over a 2-D constraint set: dense grid
    plus local window refinement around the best feasible point."""
    B = cset.ball_radius
    lo = np.array([-B, -B])
    hi = np.array([B, B])
    best_val, best_pt = -math.inf, None
    for _ in range(levels):
        P = _grid_points(lo, hi, steps)
        mask = _feasible_mask(P, cset)
        if np.any(mask):
            vals = g @ P[:, mask]
            i = int(np.argmax(vals))
            if vals[i] > best_val:
                best_val = float(vals[i])
                best_pt = P[:, mask][:, i]
        if best_pt is None:
            raise RuntimeError("no feasible grid point found")
        cell = (hi - lo) / (steps - 1)
        lo = best_pt - 3.0 * cell
        hi = best_pt + 3.0 * cell
    return best_val, best_pt


def grid_refine_min_objective(
    data: LabeledDataset, lam: float, cset: ConstraintSet, steps: int = 1001, levels: int = 4
):
    """Brute-force constrained ridge objective minimization in 2-D."""
    B = cset.ball_radius
    X, y, n = data.features, data.labels, data.n
    lo = np.array([-B, -B])
    hi = np.array([B, B])
    best_val, best_pt = math.inf, None

    def batch_obj(P):
        R = y[:, None] - X.T @ P
        return np.sum(R * R, axis=0) / n + lam * np.sum(P * P, axis=0)

    for _ in range(levels):
        P = _grid_points(lo, hi, steps)
        mask = _feasible_mask(P, cset)
        if np.any(mask):
            vals = batch_obj(P[:, mask])
            i = int(np.argmin(vals))
            if vals[i] < best_val:
                best_val = float(vals[i])
                best_pt = P[:, mask][:, i]
        if best_pt is None:
            raise RuntimeError("no feasible grid point found")
        cell = (hi - lo) / (steps - 1)
        lo = best_pt - 3.0 * cell
        hi = best_pt + 3.0 * cell
    return best_val, best_pt


def greedy_packing_count(vectors: np.ndarray, separation: float) -> int:
    """Size of a greedily built separated subset: pairwise distances strictly
    above ``separation``.  Any such set lower-bounds the covering number at
    half that scale."""
    chosen: List[np.ndarray] = []
    for v in vectors.T:
        if all(float(np.linalg.norm(v - c)) > separation for c in chosen):
            chosen.append(v)
    return len(chosen)


def sample_ball_halfspace(
    rng: np.random.Generator, count: int, B_b: float, h: HalfSpace
) -> np.ndarray:
    """Uniform 2-D ball samples filtered by a half-space."""
    out = []
    kept = 0
    while kept < count:
        m = max(2 * (count - kept), 256)
        radii = B_b * np.sqrt(rng.uniform(0.0, 1.0, m))
        ang = rng.uniform(0.0, 2.0 * math.pi, m)
        P = np.stack([radii * np.cos(ang), radii * np.sin(ang)])
        mask = h.normal @ P <= h.offset
        P = P[:, mask]
        kept += P.shape[1]
        out.append(P)
    return np.concatenate(out, axis=1)[:, :count]


# ---------------------------------------------------------------------------
# criterion checks


def check_sandwich_ellipsoid(
    seed: int = 7, n: int = 30, mc: int = 2000, instances: int = 20
) -> List[CheckResult]:
    """Trace upper/lower bounds and the quadratic duality bound sandwich the
    Monte Carlo estimate on random ball-plus-ellipsoid instances."""
    start = time.perf_counter()
    failures: List[str] = []
    dual_failures: List[str] = []
    rng = seeded_rng(seed, "sandwich")
    ps = ([2] * 7 + [5] * 7 + [10] * 6)[:instances]
    for idx, p in enumerate(ps):
        data = _random_data(rng, p, n)
        A2 = _random_spd(rng, p)
        ell = EllipsoidConstraint(A2, 1.0)
        cset = ConstraintSet(ball_radius=1.0, ellipsoids=(ell,))
        est = estimate_empirical_rademacher(
            data, cset, mc, seeded_rng(seed, f"sandwich-mc-{idx}")
        )
        a_int, _ = bnd.circumscribing_matrix(cset, data, method="trace")
        upper = bnd.rademacher_ellipsoid_upper(data, a_int)
        lower = bnd.rademacher_ellipsoid_lower(data, a_int)
        if est.value > upper.value + 3.0 * est.mc_stderr:
            failures.append(
                f"inst {idx} (p={p}): estimate {est.value:.5f} above upper {upper.value:.5f}"
            )
        if lower.value > upper.value:
            failures.append(
                f"inst {idx} (p={p}): lower {lower.value:.5f} above upper {upper.value:.5f}"
            )
        dual = bnd.rademacher_quadratic_dual(data, ell, 1.0)
        if dual.value < est.value - 3.0 * est.mc_stderr:
            dual_failures.append(
                f"inst {idx} (p={p}): duality bound {dual.value:.5f} below"
                f" estimate {est.value:.5f}"
            )
        eta = dual.parameters["eta_star"]
        if not 0.0 <= eta <= 1.0:
            dual_failures.append(f"inst {idx}: eta* {eta} outside [0,1]")
    elapsed = time.perf_counter() - start
    if elapsed > 120.0:
        failures.append(f"runtime {elapsed:.0f}s exceeded 120s")
    note = f"{len(ps)} instances, mc={mc}"
    return [
        _result("sandwich: trace bounds vs MC estimate", start, failures, note),
        _result("quadratic duality bound vs MC estimate", start, dual_failures, note),
    ]


def check_conic(seed: int = 7, p: int = 5, n: int = 30, mc: int = 2000) -> List[CheckResult]:
    """Conic duality bound dominates the MC estimate; the cone-free case
    equals the ball bound to 1e-12."""
    start = time.perf_counter()
    failures: List[str] = []
    rng = seeded_rng(seed, "conic")
    for K in (1, 3):
        data = _random_data(rng, p, n)
        cones = tuple(
            SOConstraint(
                map=_random_spd(rng, p, 0.8, 3.0),
                slope=0.3 * rng.standard_normal(p),
                shift=float(rng.uniform(0.5, 1.5)),
            )
            for _ in range(K)
        )
        cset = ConstraintSet(ball_radius=1.0, cones=cones)
        est = estimate_empirical_rademacher(
            data, cset, mc, seeded_rng(seed, f"conic-mc-{K}")
        )
        rep = bnd.rademacher_conic(n, data.feature_bound, 1.0, cones)
        if rep.value < est.value - 3.0 * est.mc_stderr:
            failures.append(
                f"K={K}: bound {rep.value:.5f} below estimate {est.value:.5f}"
                f" - 3*{est.mc_stderr:.5f}"
            )
    free = bnd.rademacher_conic(100, 1.0, 1.0, ())
    if abs(free.value - 1.0 / math.sqrt(100)) > 1e-12:
        failures.append(f"cone-free value {free.value} != ball bound")
    return [_result("conic duality bound vs MC estimate", start, failures)]


def check_halfspace_dual(seed: int = 7, mc: int = 2000) -> List[CheckResult]:
    """Half-space duality bound (sound variant) dominates the MC estimate;
    the documented witness instance separates the two variants."""
    start = time.perf_counter()
    failures: List[str] = []
    for p in (2, 5):
        rng = seeded_rng(seed, f"dual-{p}")
        data = _random_data(rng, p, 25)
        w = rng.standard_normal(p)
        b = float(rng.uniform(0.5, 1.5))
        h = HalfSpace(w, b)
        cset = ConstraintSet(ball_radius=1.0, halfspaces=(h,))
        # shared sign stream: the per-draw duality makes this a pointwise bound
        sound = bnd.rademacher_dual_halfspace(
            data, h, 1.0, mc, seeded_rng(seed, f"dual-sigma-{p}")
        )
        est = estimate_empirical_rademacher(
            data, cset, mc, seeded_rng(seed, f"dual-sigma-{p}")
        )
        if sound.value < est.value - 3.0 * est.mc_stderr:
            failures.append(
                f"p={p}: sound bound {sound.value:.5f} below estimate {est.value:.5f}"
            )
    # witness: p=2, n=1, x=(1,0), ball radius 1, half-space 4*beta_1 <= 1
    data_w = LabeledDataset(np.array([[1.0], [0.0]]), np.array([0.0]))
    h_w = HalfSpace(np.array([4.0, 0.0]), 1.0)
    lit = bnd.rademacher_dual_halfspace(data_w, h_w, 1.0, 0, None, "paper_literal", exhaustive=True)
    snd = bnd.rademacher_dual_halfspace(data_w, h_w, 1.0, 0, None, "sound", exhaustive=True)
    cset_w = ConstraintSet(ball_radius=1.0, halfspaces=(h_w,))
    exact = estimate_empirical_rademacher(data_w, cset_w, 16, seeded_rng(seed, "witness"))
    if abs(lit.value - 0.625) > 1e-9:
        failures.append(f"witness literal variant {lit.value} != 0.625")
    if abs(snd.value - 1.0) > 1e-9:
        failures.append(f"witness sound variant {snd.value} != 1.0")
    if abs(exact.value - 1.0) > 1e-6:
        failures.append(f"witness exact complexity {exact.value} != 1.0")
    if not lit.value < exact.value:
        failures.append("literal variant did not fall below the exact complexity")
    return [_result("half-space duality bound and witness", start, failures)]


def check_cap_fraction(seed: int = 7) -> List[CheckResult]:
    """Cap fraction is in (0,1] and nonincreasing in the constraint norm,
    matches a Monte Carlo disk-cap oracle, and the covering bound stays above
    a greedy packing lower bound."""
    start = time.perf_counter()
    failures: List[str] = []
    norms = np.linspace(0.5, 8.0, 10)
    alphas = [
        bnd.cap_fraction(3, np.array([t, 0.0, 0.0]), 0.2, 1.0, 1.0) for t in norms
    ]
    if not all(0.0 < a <= 1.0 for a in alphas):
        failures.append("alpha left (0,1]")
    if not all(a2 <= a1 + 1e-12 for a1, a2 in zip(alphas, alphas[1:])):
        failures.append("alpha not nonincreasing in the constraint norm")

    # Monte Carlo disk-cap oracle at p=2, eps=0.2, ||a||=2
    alpha = bnd.cap_fraction(2, np.array([2.0, 0.0]), 0.2, 1.0, 1.0)
    rng = seeded_rng(seed, "cap-mc")
    r = 1.0 + 0.2 / 2.0
    t = 0.5 + 0.2 / 2.0
    m = 1_000_000
    radii = r * np.sqrt(rng.uniform(0.0, 1.0, m))
    ang = rng.uniform(0.0, 2.0 * math.pi, m)
    alpha_mc = float(np.mean(radii * np.cos(ang) <= t))
    if abs(alpha - alpha_mc) > 1e-3:
        failures.append(f"alpha {alpha:.6f} vs MC oracle {alpha_mc:.6f}")

    # packing lower bound on sampled 2-D classes
    rng2 = seeded_rng(seed, "cap-packing")
    data = _random_data(rng2, 2, 8)
    h = HalfSpace(np.array([2.0, 0.4]), 1.0)
    samples = sample_ball_halfspace(rng2, 4000, 1.0, h)
    preds = data.features.T @ samples  # (n, N) prediction vectors
    for eps in (0.1, 0.3, 0.5):
        rep = bnd.covering_single_halfspace(data, h, eps, 1.0)
        count = greedy_packing_count(preds, 2.0 * math.sqrt(data.n) * eps)
        if rep.value < math.log(count):
            failures.append(
                f"eps={eps}: log bound {rep.value:.3f} below log packing {math.log(count):.3f}"
            )
    return [_result("half-space covering: cap fraction and packing", start, failures)]


def check_lattice(seed: int = 7) -> List[CheckResult]:
    """Closed-form lattice counts match exhaustive enumeration; constrained
    counts never exceed unconstrained; degenerate branches hold; the
    combined linear-quadratic bound reduces to the polygonal bound for ball
    ellipsoids."""
    start = time.perf_counter()
    failures: List[str] = []
    for p in range(1, 5):
        for K in range(0, 7):
            count, _ = bnd.lattice_count_cross_polytope(p, K)
            brute = sum(
                1
                for pt in itertools.product(range(-K, K + 1), repeat=p)
                if sum(abs(c) for c in pt) <= K
            )
            if count != brute:
                failures.append(f"count({p},{K}) = {count} != brute {brute}")

    rng = seeded_rng(seed, "lattice")
    data = _random_data(rng, 3, 10)
    # gentle constraint coefficients keep the constrained radius enumerable
    hs = (HalfSpace(0.2 * rng.standard_normal(3), 1.2, margin=0.9),)
    rep = bnd.covering_polygonal(data, hs, 1.0, 0.4)
    if "count_PcK" in rep.parameters:
        K = rep.parameters["K"]
        full, _ = bnd.lattice_count_cross_polytope(3, K)
        if rep.parameters["count_PcK"] > full:
            failures.append("constrained count exceeded the unconstrained count")
    else:
        failures.append(f"enumeration skipped unexpectedly: {rep.parameters}")

    rep0 = bnd.covering_polygonal(data, hs, 1.0, 1.5)  # eps above X_b * B_b
    if rep0.value != 0.0:
        failures.append("eps >= X_b B_b did not give log N = 0")

    B_b = 1.3
    ball_e = EllipsoidConstraint(np.eye(3) / B_b**2, 1.0)
    direct = bnd.covering_polygonal(data, hs, B_b, 0.4)
    combined = bnd.covering_linear_quadratic(data, hs, ball_e, ball_e, 0.4, 0.37)
    if abs(direct.value - combined.value) > 1e-12:
        failures.append(
            f"combined bound {combined.value} != polygonal bound {direct.value}"
        )
    return [_result("lattice counts and polygonal covering", start, failures)]


def check_geometry(seed: int = 7) -> List[CheckResult]:
    """Circumscription holds on rejection samples for the whole family;
    both weight optimizers match dense-grid oracles; congruence residuals
    vanish."""
    start = time.perf_counter()
    failures: List[str] = []
    rng = seeded_rng(seed, "geometry")
    gammas = np.linspace(0.0, 1.0, 11)
    for pair in range(10):
        p = 3
        e1 = EllipsoidConstraint(_random_spd(rng, p), 1.0)
        e2 = EllipsoidConstraint(_random_spd(rng, p), 1.0)
        pts = sample_intersection(e1, e2, 10_000, seeded_rng(seed, f"geom-{pair}"))
        for g in gammas:
            A = kahan_combine(e1, e2, float(g)).matrix
            forms = np.einsum("ij,jk,ik->i", pts, A, pts)
            if float(forms.max()) > 1.0 + 1e-9:
                failures.append(
                    f"pair {pair}: gamma={g:.1f} rejection sample outside"
                    f" (form {forms.max():.12f})"
                )
                break

    # dense grid oracles for both optimizers
    p = 4
    rng_o = seeded_rng(seed, "geometry-oracle")
    A1 = EllipsoidConstraint(_random_spd(rng_o, p), 1.0)
    A2 = EllipsoidConstraint(_random_spd(rng_o, p), 1.0)
    data = _random_data(rng_o, p, 6)
    g_star, _ = trace_min_gamma(A1, A2, data)
    grid = np.linspace(0.0, 1.0, 100_001)
    M = grid[:, None, None] * A1.matrix + (1.0 - grid)[:, None, None] * A2.matrix
    XL = data.features
    vals = np.einsum("ij,kji->k", XL @ XL.T, np.linalg.inv(M))
    g_oracle = float(grid[np.argmin(vals)])
    if abs(g_star - g_oracle) > 1e-4:
        failures.append(f"trace gamma* {g_star:.6f} vs grid oracle {g_oracle:.6f}")

    g_vol, C, d1, d2 = volume_min_gamma(A1, A2)
    dets = np.linalg.det(M)
    g_vol_oracle = float(grid[np.argmax(dets)])
    if abs(g_vol - g_vol_oracle) > 1e-4:
        failures.append(f"volume gamma* {g_vol:.6f} vs grid oracle {g_vol_oracle:.6f}")
    for Ai in (A1.matrix, A2.matrix):
        D = C.T @ Ai @ C
        off = float(np.max(np.abs(D - np.diag(np.diag(D)))))
        if off > 1e-8:
            failures.append(f"congruence off-diagonal residual {off:.2e}")
    return [_result("geometry: circumscription and weight optimizers", start, failures)]


def _solver_test_sets(rng: np.random.Generator) -> List[ConstraintSet]:
    def hs():
        return HalfSpace(rng.standard_normal(2), float(rng.uniform(0.3, 1.0)))

    def ell():
        return EllipsoidConstraint(_random_spd(rng, 2, 0.5, 3.0), float(rng.uniform(0.5, 1.5)))

    def cone():
        return SOConstraint(
            map=_random_spd(rng, 2, 0.8, 2.5),
            slope=0.3 * rng.standard_normal(2),
            shift=float(rng.uniform(0.5, 1.5)),
        )

    def l1():
        return L1PredictionBlock(rng.standard_normal((2, 2)), float(rng.uniform(0.5, 1.5)))

    recipes = [
        dict(halfspaces=(hs(),)),
        dict(ellipsoids=(ell(),)),
        dict(cones=(cone(),)),
        dict(l1_blocks=(l1(),)),
        dict(halfspaces=(hs(),), ellipsoids=(ell(),)),
        dict(halfspaces=(hs(),), cones=(cone(),)),
        dict(ellipsoids=(ell(),), l1_blocks=(l1(),)),
        dict(cones=(cone(),), l1_blocks=(l1(),)),
        dict(halfspaces=(hs(),), ellipsoids=(ell(),), cones=(cone(),)),
        dict(halfspaces=(hs(),), ellipsoids=(ell(),), cones=(cone(),), l1_blocks=(l1(),)),
    ]
    return [ConstraintSet(ball_radius=float(rng.uniform(0.8, 2.0)), **r) for r in recipes]


def check_solver_oracles(seed: int = 7) -> List[CheckResult]:
    """Consensus maximizer and constrained ridge match 2-D grid-plus-refine
    brute force, and their returned points are feasible."""
    start = time.perf_counter()
    failures: List[str] = []
    rng = seeded_rng(seed, "solver-sets")
    csets = _solver_test_sets(rng)
    for idx, cset in enumerate(csets):
        g = rng.standard_normal(2)
        value, model = sup_linear(g, cset)
        oracle, _ = grid_refine_max(g, cset)
        rel = abs(value - oracle) / max(1.0, abs(oracle))
        if rel > 1e-3:
            failures.append(f"set {idx}: sup {value:.6f} vs oracle {oracle:.6f}")
        if cset.max_violation(model.beta) > 1e-6 + 1e-9:
            failures.append(f"set {idx}: sup point violates by {cset.max_violation(model.beta):.2e}")

        data = _random_data(seeded_rng(seed, f"solver-data-{idx}"), 2, 20)
        lam = 0.1
        fit = fit_constrained_ridge(data, lam, cset)
        obj = training_objective(fit.beta, data, lam)
        obj_oracle, _ = grid_refine_min_objective(data, lam, cset)
        rel_obj = (obj - obj_oracle) / max(1.0, abs(obj_oracle))
        if rel_obj > 1e-4:
            failures.append(f"set {idx}: objective {obj:.6f} vs oracle {obj_oracle:.6f}")
        if cset.max_violation(fit.beta) > 1e-6 + 1e-9:
            failures.append(f"set {idx}: fit violates by {cset.max_violation(fit.beta):.2e}")
    return [_result("solver oracles: maximization and ridge", start, failures, f"{len(csets)} sets")]


def check_experiment_desk(seed: int = 7) -> List[CheckResult]:
    """Desk-scale study: constrained setups beat plain ridge at the smallest
    training size and the advantage shrinks with more data."""
    start = time.perf_counter()
    failures: List[str] = []
    cfg = desk_config(seed=seed)
    result = run_experiment(cfg)
    expected = 5 * len(cfg.train_sizes) * cfg.n_replicates
    if len(result.records) != expected:
        failures.append(f"record count {len(result.records)} != {expected}")
    smallest = cfg.train_sizes[0]
    ridge_med = result.median("ridge", smallest)
    for setup in ("ridge_polygonal", "ridge_quadratic", "ridge_conic"):
        if result.median(setup, smallest) > ridge_med:
            failures.append(
                f"{setup} median {result.median(setup, smallest):.4f} above"
                f" ridge {ridge_med:.4f} at n={smallest}"
            )
        gaps = [
            result.median("ridge", s) - result.median(setup, s) for s in cfg.train_sizes
        ]
        if not all(g2 <= g1 + 1e-12 for g1, g2 in zip(gaps, gaps[1:])):
            failures.append(f"{setup}: gap sequence {gaps} not nonincreasing")
    elapsed = time.perf_counter() - start
    if elapsed > 300.0:
        failures.append(f"runtime {elapsed:.0f}s exceeded 300s")
    return [_result("desk-scale study ordering", start, failures)]


def check_determinism(seed: int = 7) -> List[CheckResult]:
    """Stochastic paths repeated with the same seed give identical results,
    including on-disk CSV bytes."""
    start = time.perf_counter()
    failures: List[str] = []
    rng_data = seeded_rng(seed, "det-data")
    data = _random_data(rng_data, 3, 12)
    cset = ConstraintSet(
        ball_radius=1.0,
        ellipsoids=(EllipsoidConstraint(_random_spd(rng_data, 3), 1.0),),
    )
    a = estimate_empirical_rademacher(data, cset, 200, seeded_rng(seed, "det-mc"))
    b = estimate_empirical_rademacher(data, cset, 200, seeded_rng(seed, "det-mc"))
    if a.value != b.value or a.mc_stderr != b.mc_stderr:
        failures.append("repeated MC estimates differ")

    cfg = desk_config(
        seed=seed,
        train_sizes=(40,),
        n_replicates=2,
        n_test=50,
        n_knowledge=16,
        poset_pair_count=30,
        p=8,
    )
    r1 = run_experiment(cfg)
    r2 = run_experiment(cfg, threads=2)
    if r1.records != r2.records:
        failures.append("experiment records depend on run or thread count")
    with tempfile.TemporaryDirectory() as tmp:
        p1, p2 = Path(tmp) / "a.csv", Path(tmp) / "b.csv"
        write_records_csv(r1, p1)
        write_records_csv(r2, p2)
        if p1.read_bytes() != p2.read_bytes():
            failures.append("CSV bytes differ between repeated runs")
    return [_result("determinism of stochastic paths", start, failures)]


# ---------------------------------------------------------------------------
# suites


SUITES: Dict[str, List[Callable]] = {
    "sandwich": [check_sandwich_ellipsoid, check_conic, check_halfspace_dual],
    "oracles": [check_cap_fraction, check_lattice, check_geometry, check_solver_oracles],
    "experiment": [check_experiment_desk],
    "determinism": [check_determinism],
}
SUITES["all"] = (
    SUITES["sandwich"] + SUITES["oracles"] + SUITES["experiment"] + SUITES["determinism"]
)


def run_suite(suite: str, **params) -> List[CheckResult]:
    """Run one named suite, forwarding only the parameters each check accepts."""
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {sorted(SUITES)}")
    results: List[CheckResult] = []
    for fn in SUITES[suite]:
        accepted = inspect.signature(fn).parameters
        kwargs = {k: v for k, v in params.items() if k in accepted and v is not None}
        results.extend(fn(**kwargs))
    return results
