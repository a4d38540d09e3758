"""Synthetic side-knowledge study: data generation, knowledge-constraint
construction, five-setup comparison, and quantile summaries.

All generator details are fixed so runs are reproducible: equicorrelated
features (off-diagonal 0.3), a true coefficient vector of norm 3 drawn fresh
per replicate, unit label noise by default, and knowledge labels that are
exact linear responses (so the derived constraints are true statements about
the generating model).
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np

from .constraints import PairSpec, compile_poset, compile_quadratic_form
from .core import (
    ConstraintSet,
    LabeledDataset,
    SOConstraint,
    UnlabeledSet,
    seeded_rng,
)
from .erm import cross_validate_lambda, fit_constrained_ridge, predict_rmse
from .solver import SolverError, SolverOptions

SETUPS = ("mlr", "ridge", "ridge_polygonal", "ridge_quadratic", "ridge_conic")

FEATURE_CORRELATION = 0.3
TRUE_COEF_NORM = 3.0
BALL_RADIUS_FACTOR = 2.0  # bounding ball at twice the true coefficient norm

DEFAULT_LAMBDA_GRID = (1e-4, 1e-3, 1e-2, 1e-1, 1.0)


@dataclass(frozen=True)
class ExperimentConfig:
    p: int
    train_sizes: tuple
    n_test: int
    n_knowledge: int
    n_replicates: int
    noise_sd: float = 1.0
    r_cone: float = 0.5
    poset_pair_count: int = 200
    lambda_grid: tuple = DEFAULT_LAMBDA_GRID
    folds: int = 5
    seed: int = 0
    scale_preset: str = "custom"

    def __post_init__(self):
        object.__setattr__(self, "train_sizes", tuple(int(t) for t in self.train_sizes))
        object.__setattr__(self, "lambda_grid", tuple(float(l) for l in self.lambda_grid))
        if self.p < 1 or self.n_test < 1 or self.n_knowledge < 2 or self.n_replicates < 1:
            raise ValueError("invalid experiment sizes")
        if not self.train_sizes:
            raise ValueError("need at least one training size")
        max_pairs = self.n_knowledge * (self.n_knowledge - 1) // 2
        if self.poset_pair_count > max_pairs:
            raise ValueError(
                f"poset_pair_count {self.poset_pair_count} exceeds available pairs {max_pairs}"
            )


def desk_config(seed: int = 0, **overrides) -> ExperimentConfig:
    """Small-scale preset that completes in minutes on a laptop."""
    base = dict(
        p=20,
        train_sizes=(60, 100, 150),
        n_test=200,
        n_knowledge=40,
        n_replicates=10,
        poset_pair_count=200,
        seed=seed,
        scale_preset="desk",
    )
    base.update(overrides)
    return ExperimentConfig(**base)


def paper_config(seed: int = 0, **overrides) -> ExperimentConfig:
    """Full-scale preset: 600 fitted models across four training sizes."""
    base = dict(
        p=60,
        train_sizes=(300, 450, 600, 750),
        n_test=750,
        n_knowledge=120,
        n_replicates=30,
        poset_pair_count=1200,
        seed=seed,
        scale_preset="paper",
    )
    base.update(overrides)
    return ExperimentConfig(**base)


def preset_config(name: str, seed: int = 0, **overrides) -> ExperimentConfig:
    if name == "desk":
        return desk_config(seed, **overrides)
    if name == "paper":
        return paper_config(seed, **overrides)
    raise ValueError(f"unknown preset {name!r}")


# ---------------------------------------------------------------------------
# generation


def _feature_cholesky(p: int) -> np.ndarray:
    cov = np.full((p, p), FEATURE_CORRELATION)
    np.fill_diagonal(cov, 1.0)
    return np.linalg.cholesky(cov)


def generate_synthetic(cfg: ExperimentConfig, seed: int):
    """One replicate's data: nested training sets, knowledge sample, test set.

    Returns (trains, knowledge, test, beta_true) where ``trains`` maps each
    configured size to a LabeledDataset whose columns are a prefix of the
    largest one.  Knowledge labels are exact linear responses; training and
    test labels carry Gaussian noise of the configured standard deviation.
    """
    L = _feature_cholesky(cfg.p)
    rng_beta = seeded_rng(seed, "beta")
    direction = rng_beta.standard_normal(cfg.p)
    beta_true = TRUE_COEF_NORM * direction / np.linalg.norm(direction)

    def draw(stream: str, count: int) -> np.ndarray:
        rng = seeded_rng(seed, stream)
        return L @ rng.standard_normal((cfg.p, count))

    n_max = max(cfg.train_sizes)
    X_train = draw("train", n_max)
    X_test = draw("test", cfg.n_test)
    X_know = draw("knowledge", cfg.n_knowledge)

    rng_noise = seeded_rng(seed, "noise")
    y_train = beta_true @ X_train + cfg.noise_sd * rng_noise.standard_normal(n_max)
    y_test = beta_true @ X_test + cfg.noise_sd * rng_noise.standard_normal(cfg.n_test)
    y_know = beta_true @ X_know  # exact: knowledge is true side information

    trains = {
        size: LabeledDataset(X_train[:, :size], y_train[:size])
        for size in cfg.train_sizes
    }
    test = LabeledDataset(X_test, y_test)
    knowledge = UnlabeledSet(X_know, knowledge_labels=y_know)
    return trains, knowledge, test, beta_true


def build_knowledge_constraints(
    knowledge: UnlabeledSet,
    beta_true: np.ndarray,
    cfg: ExperimentConfig,
    rng: Optional[np.random.Generator] = None,
) -> Dict[str, ConstraintSet]:
    """The three knowledge-derived constraint sets.

    polygonal: ball + ordering constraints on randomly chosen label pairs
    with bounds equal to the label differences; quadratic: ball + smoothness
    of predictions along the label-sorted ordering with the true roughness
    as the level; conic: ball + one cone per knowledge point anchoring the
    prediction to the label, with slack proportional to the coefficient
    norm gap (the true norm enters the shift, a simulation convenience).
    """
    if knowledge.knowledge_labels is None:
        raise ValueError("knowledge labels are required to build constraints")
    if rng is None:
        rng = seeded_rng(cfg.seed, "pairs")
    y = knowledge.knowledge_labels
    m = knowledge.m
    ball = BALL_RADIUS_FACTOR * float(np.linalg.norm(beta_true))

    all_pairs = [(i, j) for i in range(m) for j in range(i + 1, m)]
    order = rng.permutation(len(all_pairs))
    chosen = [all_pairs[k] for k in order[: cfg.poset_pair_count]]
    pairs = [PairSpec(i, j, float(y[i] - y[j])) for i, j in chosen]
    polygonal = ConstraintSet(
        ball_radius=ball, halfspaces=tuple(compile_poset(knowledge, pairs))
    )

    sort_idx = np.argsort(y)
    sorted_know = UnlabeledSet(knowledge.features[:, sort_idx])
    y_sorted = y[sort_idx]
    level = float(np.sum(np.diff(y_sorted) ** 2))
    smooth = compile_quadratic_form(sorted_know, "first_difference", level)
    quadratic = ConstraintSet(ball_radius=ball, ellipsoids=(smooth,))

    r = cfg.r_cone
    shift_base = r * float(np.linalg.norm(beta_true))
    cones = tuple(
        SOConstraint(
            map=r * np.eye(cfg.p),
            slope=-knowledge.column(i),
            shift=float(y[i]) + shift_base,
        )
        for i in range(m)
    )
    conic = ConstraintSet(ball_radius=ball, cones=cones)
    return {"polygonal": polygonal, "quadratic": quadratic, "conic": conic}


# ---------------------------------------------------------------------------
# the study itself


@dataclass(frozen=True)
class CellRecord:
    setup: str
    train_size: int
    replicate: int
    rmse: float
    lam: float
    status: str = "ok"


@dataclass(frozen=True)
class SummaryRow:
    setup: str
    train_size: int
    q25: float
    q50: float
    q75: float


@dataclass(frozen=True)
class ExperimentResult:
    config: ExperimentConfig
    records: tuple
    summary: tuple

    def median(self, setup: str, train_size: int) -> float:
        for row in self.summary:
            if row.setup == setup and row.train_size == train_size:
                return row.q50
        raise KeyError((setup, train_size))


def _run_replicate(cfg: ExperimentConfig, replicate: int) -> List[CellRecord]:
    seed = seeded_rng(cfg.seed, f"replicate-{replicate}").integers(0, 2**63 - 1)
    trains, knowledge, test, beta_true = generate_synthetic(cfg, int(seed))
    sets = build_knowledge_constraints(
        knowledge, beta_true, cfg, rng=seeded_rng(cfg.seed, f"pairs-{replicate}")
    )
    # residuals at 1e-6 are far below RMSE differences of interest
    solver_opts = SolverOptions(tol=1e-6, max_iter=3000)
    records: List[CellRecord] = []
    for size in cfg.train_sizes:
        data = trains[size]
        for setup in SETUPS:
            cset = {
                "mlr": None,
                "ridge": None,
                "ridge_polygonal": sets["polygonal"],
                "ridge_quadratic": sets["quadratic"],
                "ridge_conic": sets["conic"],
            }[setup]
            try:
                if setup == "mlr":
                    lam = 0.0
                    model = fit_constrained_ridge(data, 0.0, None)
                else:
                    cv_rng = seeded_rng(cfg.seed, f"cv-{replicate}-{size}-{setup}")
                    lam, _ = cross_validate_lambda(
                        data, cset, cfg.lambda_grid, cfg.folds, cv_rng, solver_opts
                    )
                    model = fit_constrained_ridge(data, lam, cset, solver_opts)
                rmse = predict_rmse(model, test)
                records.append(CellRecord(setup, size, replicate, rmse, lam))
            except SolverError as exc:
                records.append(
                    CellRecord(setup, size, replicate, math.nan, math.nan, f"failed: {exc}")
                )
    return records


def run_experiment(cfg: ExperimentConfig, threads: int = 1) -> ExperimentResult:
    """Run all replicates and summarize per-setup quantiles.

    Fully deterministic given the config seed: replicates are independent
    tasks with derived random streams, so the thread count never changes the
    result.
    """
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(lambda r: _run_replicate(cfg, r), range(cfg.n_replicates)))
    else:
        chunks = [_run_replicate(cfg, r) for r in range(cfg.n_replicates)]
    records: List[CellRecord] = [rec for chunk in chunks for rec in chunk]
    records.sort(key=lambda r: (r.train_size, SETUPS.index(r.setup), r.replicate))

    summary: List[SummaryRow] = []
    for size in cfg.train_sizes:
        for setup in SETUPS:
            vals = [
                r.rmse
                for r in records
                if r.setup == setup and r.train_size == size and r.status == "ok"
            ]
            if vals:
                q25, q50, q75 = np.percentile(vals, [25.0, 50.0, 75.0])
            else:
                q25 = q50 = q75 = math.nan
            summary.append(SummaryRow(setup, size, float(q25), float(q50), float(q75)))
    return ExperimentResult(config=cfg, records=tuple(records), summary=tuple(summary))


# ---------------------------------------------------------------------------
# delimited output


def write_records_csv(result: ExperimentResult, path) -> None:
    # failed cells (status recorded in memory) appear as nan rmse
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["setup", "train_size", "replicate", "rmse"])
        for r in result.records:
            writer.writerow([r.setup, r.train_size, r.replicate, repr(r.rmse)])


def write_summary_csv(result: ExperimentResult, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["setup", "train_size", "q25", "q50", "q75"])
        for row in result.summary:
            writer.writerow(
                [row.setup, row.train_size, repr(row.q25), repr(row.q50), repr(row.q75)]
            )
