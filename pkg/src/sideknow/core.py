"""Domain types, validation, dataset I/O, and seeded randomness.

Examples are stored column-wise: a dataset of n examples in dimension p keeps
its features in a p x n matrix, which is the layout every formula downstream
consumes.  External CSV files are row-oriented by default, with an explicit
layout flag for transposed files.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .config import DEFAULT_TOLERANCES, Tolerances

BOUND_KINDS = ("CoveringLog", "Rademacher", "Generalization")


def _frozen_array(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class LabeledDataset:
    """Training sample: p x n feature matrix (examples as columns) plus labels.

    ``feature_bound`` is an upper bound on the column norms (Euclidean unless
    the caller computed it for another norm).  It may exceed the observed
    maximum but never undercut it.
    """

    features: np.ndarray
    labels: np.ndarray
    feature_bound: Optional[float] = None

    def __post_init__(self):
        X = _frozen_array(self.features)
        y = _frozen_array(self.labels)
        if X.ndim != 2:
            raise ValueError("features must be a p x n matrix")
        p, n = X.shape
        if p < 1 or n < 1:
            raise ValueError("need at least one feature and one example")
        if y.shape != (n,):
            raise ValueError(f"label count {y.shape} does not match n={n}")
        if not np.all(np.isfinite(X)) or not np.all(np.isfinite(y)):
            raise ValueError("features and labels must be finite")
        norms = np.linalg.norm(X, axis=0)
        observed = float(norms.max())
        bound = observed if self.feature_bound is None else float(self.feature_bound)
        if observed > bound * (1.0 + 1e-12):
            raise ValueError(
                f"column norm {observed} exceeds feature_bound {bound}"
            )
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)
        object.__setattr__(self, "feature_bound", bound)

    @property
    def p(self) -> int:
        return self.features.shape[0]

    @property
    def n(self) -> int:
        return self.features.shape[1]


@dataclass(frozen=True)
class UnlabeledSet:
    """Knowledge sample: p x m matrix of unlabeled examples as columns.

    ``knowledge_labels`` carries side information about the labels of those
    examples when available.
    """

    features: np.ndarray
    knowledge_labels: Optional[np.ndarray] = None

    def __post_init__(self):
        X = _frozen_array(self.features)
        if X.ndim != 2:
            raise ValueError("features must be a p x m matrix")
        p, m = X.shape
        if p < 1 or m < 1:
            raise ValueError("need at least one feature and one example")
        labels = self.knowledge_labels
        if labels is not None:
            labels = _frozen_array(labels)
            if labels.shape != (m,):
                raise ValueError(f"knowledge label count must be m={m}")
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "knowledge_labels", labels)

    @property
    def p(self) -> int:
        return self.features.shape[0]

    @property
    def m(self) -> int:
        return self.features.shape[1]

    def column(self, i: int) -> np.ndarray:
        return self.features[:, i]


@dataclass(frozen=True)
class HalfSpace:
    """Affine constraint {beta : normal . beta <= offset}.

    ``margin`` is the positive slack used by the polygonal covering bound;
    it has no effect on membership.
    """

    normal: np.ndarray
    offset: float
    margin: Optional[float] = None

    def __post_init__(self):
        w = _frozen_array(self.normal)
        if w.ndim != 1 or w.size < 1:
            raise ValueError("normal must be a nonempty vector")
        b = float(self.offset)
        if not np.any(w != 0.0) and b < 0.0:
            raise ValueError("all-zero normal with negative offset describes an empty set")
        if self.margin is not None and not float(self.margin) > 0.0:
            raise ValueError("margin must be positive when given")
        object.__setattr__(self, "normal", w)
        object.__setattr__(self, "offset", b)
        object.__setattr__(
            self, "margin", None if self.margin is None else float(self.margin)
        )

    @property
    def degenerate(self) -> bool:
        """True when the constraint holds for every beta (zero normal)."""
        return not bool(np.any(self.normal != 0.0))

    def violation(self, beta: np.ndarray) -> float:
        scale = max(1.0, float(np.linalg.norm(self.normal)))
        return float(self.normal @ beta - self.offset) / scale


@dataclass(frozen=True)
class EllipsoidConstraint:
    """Quadratic constraint {beta : beta^T matrix beta <= level}.

    The matrix is expected to be symmetric positive-semidefinite; violations
    of that expectation are reported by :func:`validate` rather than raised
    here, so that diagnostics can be produced for malformed inputs.
    """

    matrix: np.ndarray
    level: float

    def __post_init__(self):
        A = _frozen_array(self.matrix)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError("matrix must be square")
        c = float(self.level)
        if not c > 0.0:
            raise ValueError("level must be positive")
        object.__setattr__(self, "matrix", A)
        object.__setattr__(self, "level", c)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def normalized_matrix(self) -> np.ndarray:
        """Symmetrized matrix scaled so the level becomes one."""
        A = self.matrix
        return (A + A.T) / (2.0 * self.level)

    def violation(self, beta: np.ndarray) -> float:
        form = float(beta @ self.normalized_matrix() @ beta)
        return math.sqrt(max(form, 0.0)) - 1.0


@dataclass(frozen=True)
class SOConstraint:
    """Second-order cone constraint {beta : ||map beta|| <= slope . beta + shift}."""

    map: np.ndarray
    slope: np.ndarray
    shift: float

    def __post_init__(self):
        A = _frozen_array(self.map)
        a = _frozen_array(self.slope)
        if A.ndim != 2:
            raise ValueError("map must be a matrix")
        if a.ndim != 1 or a.size != A.shape[1]:
            raise ValueError("slope length must match map columns")
        object.__setattr__(self, "map", A)
        object.__setattr__(self, "slope", a)
        object.__setattr__(self, "shift", float(self.shift))

    @property
    def dim(self) -> int:
        return self.map.shape[1]

    def violation(self, beta: np.ndarray) -> float:
        return float(
            np.linalg.norm(self.map @ beta) - (self.slope @ beta + self.shift)
        )


@dataclass(frozen=True)
class L1PredictionBlock:
    """Constraint ||columns^T beta||_1 <= level on predictions at chosen columns."""

    columns: np.ndarray
    level: float
    indices: Optional[tuple] = None

    def __post_init__(self):
        U = _frozen_array(self.columns)
        if U.ndim != 2 or U.shape[1] < 1:
            raise ValueError("columns must be a p x |I| matrix with |I| >= 1")
        c = float(self.level)
        if not c > 0.0:
            raise ValueError("level must be positive")
        idx = None if self.indices is None else tuple(int(i) for i in self.indices)
        if idx is not None and len(idx) != U.shape[1]:
            raise ValueError("indices length must match column count")
        object.__setattr__(self, "columns", U)
        object.__setattr__(self, "level", c)
        object.__setattr__(self, "indices", idx)

    @property
    def dim(self) -> int:
        return self.columns.shape[0]

    @property
    def size(self) -> int:
        return self.columns.shape[1]

    def violation(self, beta: np.ndarray) -> float:
        return float(np.abs(self.columns.T @ beta).sum() - self.level)


@dataclass(frozen=True)
class ConstraintSet:
    """Hypothesis-space description: a mandatory Euclidean ball plus any number
    of half-spaces, ellipsoids, second-order cones, and l1 prediction blocks."""

    ball_radius: float
    halfspaces: tuple = ()
    ellipsoids: tuple = ()
    cones: tuple = ()
    l1_blocks: tuple = ()

    def __post_init__(self):
        if not float(self.ball_radius) > 0.0:
            raise ValueError("ball_radius must be positive")
        object.__setattr__(self, "ball_radius", float(self.ball_radius))
        object.__setattr__(self, "halfspaces", tuple(self.halfspaces))
        object.__setattr__(self, "ellipsoids", tuple(self.ellipsoids))
        object.__setattr__(self, "cones", tuple(self.cones))
        object.__setattr__(self, "l1_blocks", tuple(self.l1_blocks))
        dims = self._member_dims()
        if len(set(dims)) > 1:
            raise ValueError(f"constituent dimensions disagree: {sorted(set(dims))}")

    def _member_dims(self):
        dims = [h.normal.size for h in self.halfspaces]
        dims += [e.dim for e in self.ellipsoids]
        dims += [k.dim for k in self.cones]
        dims += [b.dim for b in self.l1_blocks]
        return dims

    @property
    def dim(self) -> Optional[int]:
        """Ambient dimension, or None when only the ball is present."""
        dims = self._member_dims()
        return dims[0] if dims else None

    def max_violation(self, beta: np.ndarray) -> float:
        """Largest constraint violation of ``beta`` across all members."""
        worst = float(np.linalg.norm(beta)) - self.ball_radius
        for h in self.halfspaces:
            worst = max(worst, h.violation(beta))
        for e in self.ellipsoids:
            worst = max(worst, e.violation(beta))
        for k in self.cones:
            worst = max(worst, k.violation(beta))
        for b in self.l1_blocks:
            worst = max(worst, b.violation(beta))
        return worst


@dataclass(frozen=True)
class LinearModel:
    """Coefficient vector of the linear predictor f(x) = beta . x."""

    beta: np.ndarray

    def __post_init__(self):
        b = _frozen_array(self.beta)
        if b.ndim != 1:
            raise ValueError("beta must be a vector")
        if not np.all(np.isfinite(b)):
            raise ValueError("beta entries must be finite")
        object.__setattr__(self, "beta", b)

    def predict(self, features: np.ndarray) -> np.ndarray:
        """Predictions for a p x k matrix of examples-as-columns."""
        return np.asarray(features).T @ self.beta


@dataclass(frozen=True)
class BoundReport:
    """One computed complexity or generalization bound with provenance.

    Covering-number values are stored as natural logs to avoid overflow.
    ``value`` may be +inf only when ``parameters['reason']`` explains why.
    """

    kind: str
    value: float
    theorem_tag: str
    parameters: dict = field(default_factory=dict)
    mc_stderr: Optional[float] = None

    def __post_init__(self):
        if self.kind not in BOUND_KINDS:
            raise ValueError(f"kind must be one of {BOUND_KINDS}")
        v = float(self.value)
        if math.isnan(v):
            raise ValueError("bound value must not be NaN")
        if math.isinf(v) and "reason" not in self.parameters:
            raise ValueError("infinite bound requires parameters['reason']")
        object.__setattr__(self, "value", v)
        object.__setattr__(self, "parameters", dict(self.parameters))
        object.__setattr__(
            self, "mc_stderr", None if self.mc_stderr is None else float(self.mc_stderr)
        )

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "theorem_tag": self.theorem_tag,
            "value": self.value,
            "parameters": dict(self.parameters),
            "mc_stderr": self.mc_stderr,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BoundReport":
        return cls(
            kind=d["kind"],
            value=d["value"],
            theorem_tag=d["theorem_tag"],
            parameters=dict(d.get("parameters", {})),
            mc_stderr=d.get("mc_stderr"),
        )


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class ValidationReport:
    """Diagnostics for a ConstraintSet; purely informational, never raises."""

    ok: bool
    dimension_mismatches: tuple
    psd_violations: tuple
    symmetry_violations: tuple
    origin_feasible: bool
    origin_blockers: tuple
    degenerate_halfspaces: tuple
    cone_min_eigenvalues: tuple
    cone_bound_eligible: tuple


def validate(cset: ConstraintSet, p: int, tol: Tolerances = DEFAULT_TOLERANCES) -> ValidationReport:
    """Check a constraint set against ambient dimension ``p``.

    Reports dimension mismatches, symmetry/PSD violations of quadratic forms,
    feasibility of beta = 0, and whether each cone qualifies for the conic
    complexity bound (square symmetric map with positive minimum eigenvalue).
    """
    dim_issues = []
    psd_issues = []
    sym_issues = []
    blockers = []
    degenerate = []
    cone_eigs = []
    cone_ok = []

    for i, h in enumerate(cset.halfspaces):
        if h.normal.size != p:
            dim_issues.append(f"halfspace[{i}]: dimension {h.normal.size} != {p}")
        if h.degenerate:
            degenerate.append(i)
        if h.offset < 0.0 and not h.degenerate:
            blockers.append(f"halfspace[{i}]: offset {h.offset} < 0")

    for i, e in enumerate(cset.ellipsoids):
        if e.dim != p:
            dim_issues.append(f"ellipsoid[{i}]: dimension {e.dim} != {p}")
            continue
        A = e.matrix
        asym = float(np.max(np.abs(A - A.T))) if A.size else 0.0
        if asym > tol.symmetry:
            sym_issues.append(f"ellipsoid[{i}]: |A - A^T| max entry {asym:.3e}")
        eigs = np.linalg.eigvalsh((A + A.T) / 2.0)
        if eigs.min() < -tol.psd_slack:
            psd_issues.append(f"ellipsoid[{i}]: min eigenvalue {eigs.min():.3e}")

    for i, k in enumerate(cset.cones):
        if k.dim != p:
            dim_issues.append(f"cone[{i}]: dimension {k.dim} != {p}")
            cone_eigs.append(float("nan"))
            cone_ok.append(False)
            continue
        A = k.map
        square = A.shape[0] == A.shape[1]
        symmetric = square and float(np.max(np.abs(A - A.T))) <= tol.symmetry
        if square and symmetric:
            lam_min = float(np.linalg.eigvalsh((A + A.T) / 2.0).min())
        else:
            lam_min = float("nan")
        cone_eigs.append(lam_min)
        cone_ok.append(bool(square and symmetric and lam_min > tol.psd_slack))
        if k.shift < 0.0:
            blockers.append(f"cone[{i}]: shift {k.shift} < 0")

    for i, b in enumerate(cset.l1_blocks):
        if b.dim != p:
            dim_issues.append(f"l1_block[{i}]: dimension {b.dim} != {p}")
        # level > 0 is a construction invariant, so blocks never block the origin

    origin_ok = not blockers
    ok = not dim_issues and not psd_issues and not sym_issues and origin_ok
    return ValidationReport(
        ok=ok,
        dimension_mismatches=tuple(dim_issues),
        psd_violations=tuple(psd_issues),
        symmetry_violations=tuple(sym_issues),
        origin_feasible=origin_ok,
        origin_blockers=tuple(blockers),
        degenerate_halfspaces=tuple(degenerate),
        cone_min_eigenvalues=tuple(cone_eigs),
        cone_bound_eligible=tuple(cone_ok),
    )


# ---------------------------------------------------------------------------
# dataset I/O


def _parse_csv_table(path) -> list:
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.reader(fh):
            if row and any(cell.strip() for cell in row):
                rows.append([cell.strip() for cell in row])
    return rows


def _to_float(cell: str, line: int, path) -> float:
    try:
        return float(cell)
    except ValueError:
        raise ValueError(f"{path}: line {line}: non-numeric cell {cell!r}") from None


def _read_table(path, layout: str):
    """Return (feature matrix p x n, labels or None) from a CSV file.

    layout='rows': header row x1..xp[,y], one example per data row.
    layout='columns': transposed file; each row starts with the feature name
    (x1..xp, optionally a final 'y' row) followed by one value per example.
    """
    if layout not in ("rows", "columns"):
        raise ValueError("layout must be 'rows' or 'columns'")
    rows = _parse_csv_table(path)
    if not rows:
        raise ValueError(f"{path}: empty file")

    if layout == "rows":
        header = rows[0]
        data_rows = rows[1:]
        if not data_rows:
            raise ValueError(f"{path}: no data rows (n = 0)")
        has_labels = header[-1] == "y"
        p = len(header) - (1 if has_labels else 0)
        if p < 1:
            raise ValueError(f"{path}: no feature columns in header")
        values = []
        for offset, row in enumerate(data_rows):
            line = offset + 2
            if len(row) != len(header):
                raise ValueError(
                    f"{path}: line {line}: expected {len(header)} cells, got {len(row)}"
                )
            values.append([_to_float(c, line, path) for c in row])
        table = np.array(values, dtype=float)
        X = table[:, :p].T
        y = table[:, p] if has_labels else None
        return X, y

    names = [row[0] for row in rows]
    has_labels = names[-1] == "y"
    feat_rows = rows[:-1] if has_labels else rows
    if not feat_rows:
        raise ValueError(f"{path}: no feature rows")
    width = len(rows[0])
    if width < 2:
        raise ValueError(f"{path}: no data columns (n = 0)")
    for idx, row in enumerate(rows):
        if len(row) != width:
            raise ValueError(
                f"{path}: line {idx + 1}: expected {width} cells, got {len(row)}"
            )
    X = np.array(
        [[_to_float(c, i + 1, path) for c in row[1:]] for i, row in enumerate(feat_rows)],
        dtype=float,
    )
    y = (
        np.array([_to_float(c, len(rows), path) for c in rows[-1][1:]], dtype=float)
        if has_labels
        else None
    )
    return X, y


def load_dataset(path, layout: str = "rows", feature_bound: Optional[float] = None) -> LabeledDataset:
    """Load a labeled CSV dataset (header x1..xp,y) into column-major form.

    ``feature_bound`` overrides the computed maximum column norm.
    """
    X, y = _read_table(path, layout)
    if y is None:
        raise ValueError(f"{path}: no 'y' column; use load_unlabeled for feature-only files")
    return LabeledDataset(features=X, labels=y, feature_bound=feature_bound)


def load_unlabeled(path, layout: str = "rows") -> UnlabeledSet:
    """Load an unlabeled CSV sample; a 'y' column becomes knowledge labels."""
    X, y = _read_table(path, layout)
    return UnlabeledSet(features=X, knowledge_labels=y)


# ---------------------------------------------------------------------------
# JSON serialization


def constraint_set_to_dict(cset: ConstraintSet) -> dict:
    return {
        "ball_radius": cset.ball_radius,
        "halfspaces": [
            {
                "normal": h.normal.tolist(),
                "offset": h.offset,
                "margin": h.margin,
            }
            for h in cset.halfspaces
        ],
        "ellipsoids": [
            {"matrix": e.matrix.tolist(), "level": e.level} for e in cset.ellipsoids
        ],
        "cones": [
            {"map": k.map.tolist(), "slope": k.slope.tolist(), "shift": k.shift}
            for k in cset.cones
        ],
        "l1_blocks": [
            {
                "columns": b.columns.tolist(),
                "level": b.level,
                "indices": list(b.indices) if b.indices is not None else None,
            }
            for b in cset.l1_blocks
        ],
    }


def constraint_set_from_dict(d: dict) -> ConstraintSet:
    return ConstraintSet(
        ball_radius=d["ball_radius"],
        halfspaces=tuple(
            HalfSpace(h["normal"], h["offset"], h.get("margin"))
            for h in d.get("halfspaces", [])
        ),
        ellipsoids=tuple(
            EllipsoidConstraint(e["matrix"], e["level"]) for e in d.get("ellipsoids", [])
        ),
        cones=tuple(
            SOConstraint(k["map"], k["slope"], k["shift"]) for k in d.get("cones", [])
        ),
        l1_blocks=tuple(
            L1PredictionBlock(b["columns"], b["level"], b.get("indices"))
            for b in d.get("l1_blocks", [])
        ),
    )


def save_constraint_set(cset: ConstraintSet, path) -> None:
    Path(path).write_text(json.dumps(constraint_set_to_dict(cset), indent=2) + "\n")


def load_constraint_set(path) -> ConstraintSet:
    return constraint_set_from_dict(json.loads(Path(path).read_text()))


# ---------------------------------------------------------------------------
# seeded randomness


def seeded_rng(seed: int, stream: str = "") -> np.random.Generator:
    """Deterministic generator for (seed, stream label).

    Identical arguments give identical sequences; distinct stream labels hash
    into the seed material and give independent-quality streams.
    """
    digest = hashlib.sha256(stream.encode("utf-8")).digest()
    words = [int.from_bytes(digest[i : i + 8], "little") for i in range(0, 32, 8)]
    entropy = [int(seed) & (2**64 - 1), *words]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def rademacher_signs(rng: np.random.Generator, shape) -> np.ndarray:
    """Draw +-1 signs with equal probability."""
    return rng.integers(0, 2, size=shape).astype(float) * 2.0 - 1.0
