"""Constrained ridge regression over a constraint set.

The training objective is (1/n) * sum of squared residuals plus an
*unscaled* lam * ||beta||^2 penalty; lam's meaning depends on that scaling,
so it is fixed here and documented.  Data are assumed centered (no
intercept handling).
"""

from __future__ import annotations

import math
import warnings
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .core import ConstraintSet, LabeledDataset, LinearModel
from .solver import ConsensusProblem, SolverOptions  # noqa: F401  (re-exported)


def training_objective(beta: np.ndarray, data: LabeledDataset, lam: float) -> float:
    resid = data.labels - data.features.T @ beta
    return float(resid @ resid) / data.n + lam * float(beta @ beta)


def fit_constrained_ridge(
    data: LabeledDataset,
    lam: float,
    cset: Optional[ConstraintSet] = None,
    options: Optional[SolverOptions] = None,
    problem: Optional[ConsensusProblem] = None,
) -> LinearModel:
    """Minimize (1/n)||y - X^T beta||^2 + lam ||beta||^2, optionally over a
    constraint set.

    Without a set this is multiple linear regression (lam = 0) or ridge
    regression solved by the normal equations; rank-deficient unpenalized
    problems fall back to the minimum-norm solution with a warning.  With a
    set, the same consensus machinery as the linear maximizer runs with a
    ridge coordination step, and the returned point is feasible within the
    configured tolerance.
    """
    if lam < 0.0:
        raise ValueError("lam must be nonnegative")
    X, y, n, p = data.features, data.labels, data.n, data.p
    if cset is None:
        if lam == 0.0:
            XT = X.T
            rank = np.linalg.matrix_rank(XT)
            if rank < p:
                warnings.warn(
                    "design matrix is rank-deficient with lam = 0;"
                    " returning the minimum-norm least squares solution",
                    RuntimeWarning,
                    stacklevel=2,
                )
            beta, *_ = np.linalg.lstsq(XT, y, rcond=None)
            return LinearModel(beta)
        M = (X @ X.T) / n + lam * np.eye(p)
        return LinearModel(np.linalg.solve(M, X @ y / n))
    if problem is None:
        problem = ConsensusProblem(cset, p=p, options=options)
    beta, _ = problem.ridge_fit(data, lam)
    return LinearModel(beta)


def predict_rmse(model: LinearModel, test: LabeledDataset) -> float:
    """Root mean squared prediction error on a labeled sample."""
    resid = test.labels - model.predict(test.features)
    return math.sqrt(float(resid @ resid) / test.n)


def cross_validate_lambda(
    data: LabeledDataset,
    cset: Optional[ConstraintSet],
    grid: Sequence[float],
    folds: int,
    rng: np.random.Generator,
    options: Optional[SolverOptions] = None,
) -> Tuple[float, List[Tuple[float, int, float]]]:
    """K-fold cross validation of the ridge weight.

    Fold assignment comes from a seeded shuffle; the table rows are
    (lam, fold, validation rmse).  Returns the lam with the smallest mean
    validation RMSE, breaking ties toward the larger lam.
    """
    lams = sorted(set(float(l) for l in grid))
    if not lams:
        raise ValueError("lambda grid must be nonempty")
    if folds < 2:
        raise ValueError("need at least 2 folds")
    if data.n < folds:
        raise ValueError(f"n={data.n} examples cannot fill {folds} folds")
    order = rng.permutation(data.n)
    fold_of = np.empty(data.n, dtype=int)
    for pos, idx in enumerate(order):
        fold_of[idx] = pos % folds

    # one lifted-block setup serves every (fold, lam) fit
    problem = None if cset is None else ConsensusProblem(cset, p=data.p, options=options)
    table: List[Tuple[float, int, float]] = []
    means = []
    for lam in lams:
        errs = []
        for k in range(folds):
            train_mask = fold_of != k
            train = LabeledDataset(
                data.features[:, train_mask],
                data.labels[train_mask],
                feature_bound=data.feature_bound,
            )
            val = LabeledDataset(
                data.features[:, ~train_mask],
                data.labels[~train_mask],
                feature_bound=data.feature_bound,
            )
            model = fit_constrained_ridge(train, lam, cset, options, problem=problem)
            err = predict_rmse(model, val)
            errs.append(err)
            table.append((lam, k, err))
        means.append(float(np.mean(errs)))
    means_arr = np.asarray(means)
    best = np.flatnonzero(means_arr == means_arr.min())[-1]  # ties -> larger lam
    return lams[int(best)], table
