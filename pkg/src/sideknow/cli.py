"""Command-line front end.

stdout carries data (JSON or CSV manifests), stderr carries logs and error
diagnostics.  Exit codes: 0 success, 1 computational failure (JSON diagnostics
on stderr), 2 usage errors (argparse).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import bounds as bnd
from .constraints import (
    GraphSpec,
    PairSpec,
    compile_chance_soc,
    compile_graph_laplacian,
    compile_linf_box,
    compile_must_link,
    compile_poset,
    compile_quadratic_form,
    compile_quadratic_pairwise,
    compile_robust_soc,
    compile_sparsity_l1,
)
from .core import (
    BoundReport,
    ConstraintSet,
    UnlabeledSet,
    constraint_set_to_dict,
    load_constraint_set,
    load_dataset,
    seeded_rng,
    validate,
)
from .erm import cross_validate_lambda, fit_constrained_ridge
from .experiment import preset_config, run_experiment, write_records_csv, write_summary_csv
from .rademacher import estimate_empirical_rademacher
from .solver import SolverError, SolverOptions
from .verify import run_suite

THEOREM_CHOICES = (
    "halfspace-covering",
    "halfspace-dual",
    "polygonal-covering",
    "ellipsoid-upper",
    "ellipsoid-lower",
    "ellipsoid-covering",
    "quadratic-dual",
    "linear-quadratic-covering",
    "conic",
    "dudley",
    "generalization",
)


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2)
    if out:
        Path(out).write_text(text + "\n")
        print(json.dumps({"written": str(out)}))
    else:
        print(text)


def _load_set(path: str) -> ConstraintSet:
    return load_constraint_set(path)


# ---------------------------------------------------------------------------
# compile


def _knowledge_from_json(doc: dict) -> UnlabeledSet:
    if "features" not in doc:
        raise ValueError("knowledge JSON needs a 'features' matrix (p x m)")
    return UnlabeledSet(
        np.asarray(doc["features"], dtype=float),
        knowledge_labels=(
            np.asarray(doc["labels"], dtype=float) if doc.get("labels") is not None else None
        ),
    )


def cmd_compile(args) -> int:
    doc = json.loads(Path(args.knowledge).read_text())
    u = _knowledge_from_json(doc)
    halfspaces: list = []
    ellipsoids: list = []
    cones: list = []
    l1_blocks: list = []

    def pairs_of(block):
        return [PairSpec(int(i), int(j), float(c)) for i, j, c in block["pairs"]]

    if "poset" in doc:
        halfspaces += compile_poset(u, pairs_of(doc["poset"]))
    if "must_link" in doc:
        halfspaces += compile_must_link(u, pairs_of(doc["must_link"]))
    if "sparsity" in doc:
        block = doc["sparsity"]
        got = compile_sparsity_l1(
            u, block["indices"], float(block["level"]), expand=bool(block.get("expand", False))
        )
        if isinstance(got, list):
            halfspaces += got
        else:
            l1_blocks.append(got)
    if "linf_box" in doc:
        block = doc["linf_box"]
        halfspaces += compile_linf_box(u, block["indices"], float(block["level"]))
    if "quadratic_pairwise" in doc:
        block = doc["quadratic_pairwise"]
        ellipsoids += compile_quadratic_pairwise(
            u, pairs_of(block), mode=block.get("mode", "must_link")
        )
    if "quadratic_form" in doc:
        block = doc["quadratic_form"]
        gamma = block.get("gamma", "identity")
        if isinstance(gamma, list):
            gamma = np.asarray(gamma, dtype=float)
        ellipsoids.append(compile_quadratic_form(u, gamma, float(block["level"])))
    if "graph_laplacian" in doc:
        block = doc["graph_laplacian"]
        spec = GraphSpec(
            edges=tuple((int(i), int(j), float(w)) for i, j, w in block["edges"]),
            node_count=u.m,
        )
        ellipsoids.append(compile_graph_laplacian(u, spec, float(block["level"])))
    for cone in doc.get("robust_cones", []):
        cones.append(compile_robust_soc(np.asarray(cone["mean"]), np.asarray(cone["spread"])))
    for cone in doc.get("chance_cones", []):
        cones.append(
            compile_chance_soc(
                np.asarray(cone["mean"]),
                np.asarray(cone["covariance"]),
                float(cone["eta"]),
            )
        )

    cset = ConstraintSet(
        ball_radius=float(doc.get("ball_radius", 1.0)),
        halfspaces=tuple(halfspaces),
        ellipsoids=tuple(ellipsoids),
        cones=tuple(cones),
        l1_blocks=tuple(l1_blocks),
    )
    report = validate(cset, u.p)
    if not report.ok:
        diag = {
            "validation": {
                "dimension_mismatches": list(report.dimension_mismatches),
                "psd_violations": list(report.psd_violations),
                "symmetry_violations": list(report.symmetry_violations),
                "origin_feasible": report.origin_feasible,
                "origin_blockers": list(report.origin_blockers),
            }
        }
        print(json.dumps(diag), file=sys.stderr)
    _emit(constraint_set_to_dict(cset), args.out)
    return 0


# ---------------------------------------------------------------------------
# fit


def cmd_fit(args) -> int:
    data = load_dataset(args.data, layout=args.layout)
    cset = _load_set(args.set) if args.set else None
    opts = SolverOptions(tol=args.tol) if args.tol else None
    if args.grid:
        grid = [float(x) for x in args.grid.split(",")]
        rng = seeded_rng(args.seed, "cv")
        lam, table = cross_validate_lambda(data, cset, grid, args.folds, rng, opts)
        if args.cv_out:
            with open(args.cv_out, "w", newline="", encoding="utf-8") as fh:
                writer = csv.writer(fh)
                writer.writerow(["lambda", "fold", "rmse"])
                for row in table:
                    writer.writerow([repr(row[0]), row[1], repr(row[2])])
    else:
        lam = args.lam
    model = fit_constrained_ridge(data, lam, cset, opts)
    _emit({"beta": model.beta.tolist(), "lambda": lam}, args.out)
    return 0


# ---------------------------------------------------------------------------
# bound


def _first_halfspace(cset: ConstraintSet):
    if not cset.halfspaces:
        raise ValueError("the constraint set carries no half-spaces")
    return cset.halfspaces[0]


def _first_ellipsoid(cset: ConstraintSet):
    if not cset.ellipsoids:
        raise ValueError("the constraint set carries no ellipsoids")
    return cset.ellipsoids[0]


def cmd_bound(args) -> int:
    data = load_dataset(args.data, layout=args.layout)
    cset = _load_set(args.set)
    B_b = cset.ball_radius
    theorem = args.theorem
    if theorem == "halfspace-covering":
        report = bnd.covering_single_halfspace(data, _first_halfspace(cset), args.eps, B_b)
    elif theorem == "halfspace-dual":
        rng = seeded_rng(args.seed, "dual")
        report = bnd.rademacher_dual_halfspace(
            data, _first_halfspace(cset), B_b, args.mc, rng, variant=args.variant
        )
    elif theorem == "polygonal-covering":
        report = bnd.covering_polygonal(
            data, cset.halfspaces, B_b, args.eps, norms=bnd.NormPair(args.norm_r, _conj(args.norm_r))
        )
    elif theorem == "ellipsoid-upper":
        a_int, info = bnd.circumscribing_matrix(cset, data, method=args.combiner)
        report = bnd.rademacher_ellipsoid_upper(data, a_int)
        report.parameters.update(info)
    elif theorem == "ellipsoid-lower":
        a_int, info = bnd.circumscribing_matrix(cset, data, method=args.combiner)
        report = bnd.rademacher_ellipsoid_lower(
            data, a_int, consts=bnd.LowerBoundConstants(C=args.lower_c)
        )
        report.parameters.update(info)
    elif theorem == "ellipsoid-covering":
        a_int, info = bnd.circumscribing_matrix(cset, data, method="volume")
        eigs = np.linalg.eigvalsh(a_int.normalized_matrix())
        report = bnd.covering_ellipsoid_product(eigs, data.feature_bound, args.eps)
        report.parameters.update(info)
    elif theorem == "quadratic-dual":
        report = bnd.rademacher_quadratic_dual(data, _first_ellipsoid(cset), B_b)
    elif theorem == "linear-quadratic-covering":
        ball_e = bnd.EllipsoidConstraint(np.eye(data.p) / B_b**2, 1.0)
        e2 = _first_ellipsoid(cset)
        if args.gamma is None:
            gamma, _ = bnd.trace_min_gamma(ball_e, e2, data)
        else:
            gamma = args.gamma
        report = bnd.covering_linear_quadratic(data, cset.halfspaces, ball_e, e2, args.eps, gamma)
    elif theorem == "conic":
        report = bnd.rademacher_conic(data.n, data.feature_bound, B_b, cset.cones)
    elif theorem == "dudley":
        report = _dudley_from_args(args, data, cset)
    elif theorem == "generalization":
        rad = BoundReport.from_dict(json.loads(Path(args.rad_report).read_text()))
        report = bnd.generalization_bound(
            args.emp, rad, args.lipschitz, data.n, args.delta, args.c_conf
        )
    else:  # pragma: no cover - argparse restricts choices
        raise ValueError(f"unknown theorem selector {theorem}")
    payload = report.to_dict()
    if report.kind == "CoveringLog":
        payload["value_log10"] = report.value / math.log(10.0)
    _emit(payload, args.out)
    return 0


def _conj(r: float) -> float:
    if math.isinf(r):
        return 1.0
    if r == 1.0:
        return math.inf
    return r / (r - 1.0)


def _dudley_from_args(args, data, cset) -> BoundReport:
    B_b = cset.ball_radius
    source = args.cover
    eps_max = args.eps_max if args.eps_max else data.feature_bound * B_b

    if source == "halfspace":
        h = _first_halfspace(cset)

        def fn(eps: float) -> float:
            if eps >= eps_max:
                return 0.0
            return bnd.covering_single_halfspace(data, h, eps, B_b).value

    elif source == "ellipsoid":
        a_int, _ = bnd.circumscribing_matrix(cset, data, method="volume")
        eigs = np.linalg.eigvalsh(a_int.normalized_matrix())

        def fn(eps: float) -> float:
            if eps >= eps_max:
                return 0.0
            return bnd.covering_ellipsoid_product(eigs, data.feature_bound, eps).value

    else:
        raise ValueError("cover source must be 'halfspace' or 'ellipsoid'")
    return bnd.dudley_rademacher_from_covering(fn, data.n, eps_max, c_chain=args.c_chain)


# ---------------------------------------------------------------------------
# estimate / experiment / verify


def cmd_estimate(args) -> int:
    data = load_dataset(args.data, layout=args.layout)
    cset = _load_set(args.set)
    rng = seeded_rng(args.seed, "rademacher")
    opts = SolverOptions(tol=args.tol) if args.tol else None
    report = estimate_empirical_rademacher(data, cset, args.mc, rng, opts)
    _emit(report.to_dict(), args.out)
    return 0


def cmd_experiment(args) -> int:
    overrides = {}
    if args.config:
        overrides = json.loads(Path(args.config).read_text())
    cfg = preset_config(args.preset, seed=args.seed, **overrides)
    result = run_experiment(cfg, threads=args.threads)
    outdir = Path(args.out or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    records_path = outdir / "results.csv"
    summary_path = outdir / "summary.csv"
    write_records_csv(result, records_path)
    write_summary_csv(result, summary_path)
    from .reporting import render_experiment_figure

    figure_path = render_experiment_figure(result, outdir / "summary.png")
    print(
        json.dumps(
            {
                "results": str(records_path),
                "summary": str(summary_path),
                "figure": str(figure_path),
                "records": len(result.records),
            },
            indent=2,
        )
    )
    return 0


def cmd_verify(args) -> int:
    results = run_suite(args.suite, seed=args.seed, mc=args.mc, p=args.p, n=args.n)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}: {r.detail}")
    if args.out:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        with open(outdir / "verify.csv", "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["name", "passed", "detail", "seconds"])
            for r in results:
                writer.writerow([r.name, int(r.passed), r.detail, repr(r.seconds)])
        from .reporting import render_verify_figure

        render_verify_figure(results, outdir / "verify.png")
    failed = [r for r in results if not r.passed]
    if failed:
        print(
            json.dumps({"error": "verification failures", "failed": [r.name for r in failed]}),
            file=sys.stderr,
        )
        return 1
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sideknow",
        description=(
            "Compile side knowledge into constraints, fit constrained ridge"
            " models, and compute complexity bounds"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0, help="seed for all randomness")
        p.add_argument("--out", default=None, help="output file or directory")
        p.add_argument(
            "--threads",
            type=int,
            default=int(os.environ.get("SIDEKNOW_THREADS", "1")),
            help="parallel task cap (env SIDEKNOW_THREADS)",
        )

    p = sub.add_parser("compile", help="knowledge JSON -> constraint set JSON")
    p.add_argument("--knowledge", required=True)
    common(p)
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("fit", help="fit a (constrained) ridge model")
    p.add_argument("--data", required=True)
    p.add_argument("--set", default=None)
    p.add_argument("--layout", choices=("rows", "columns"), default="rows")
    p.add_argument("--lam", type=float, default=0.0)
    p.add_argument("--grid", default=None, help="comma-separated lambda grid for CV")
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--cv-out", default=None, help="CSV path for the CV table")
    p.add_argument("--tol", type=float, default=None)
    common(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("bound", help="compute one complexity/generalization bound")
    p.add_argument("--theorem", required=True, choices=THEOREM_CHOICES)
    p.add_argument("--data", required=True)
    p.add_argument("--set", required=True)
    p.add_argument("--layout", choices=("rows", "columns"), default="rows")
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--mc", type=int, default=1000)
    p.add_argument("--variant", choices=("sound", "paper_literal"), default="sound")
    p.add_argument("--norm-r", type=float, default=2.0)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--combiner", choices=("trace", "volume"), default="trace")
    p.add_argument("--lower-c", type=float, default=1.0)
    p.add_argument("--cover", choices=("halfspace", "ellipsoid"), default="halfspace")
    p.add_argument("--eps-max", type=float, default=None)
    p.add_argument("--c-chain", type=float, default=1.0)
    p.add_argument("--emp", type=float, default=0.0)
    p.add_argument("--lipschitz", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--c-conf", type=float, default=1.0)
    p.add_argument("--rad-report", default=None, help="JSON bound report for generalization")
    common(p)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("estimate-rademacher", help="Monte Carlo complexity estimate")
    p.add_argument("--data", required=True)
    p.add_argument("--set", required=True)
    p.add_argument("--layout", choices=("rows", "columns"), default="rows")
    p.add_argument("--mc", type=int, default=1000)
    p.add_argument("--tol", type=float, default=None)
    common(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("experiment", help="run the synthetic side-knowledge study")
    p.add_argument("--preset", choices=("desk", "paper"), default="desk")
    p.add_argument("--config", default=None, help="JSON config overrides")
    common(p)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", default="all")
    p.add_argument("--mc", type=int, default=None)
    p.add_argument("--p", type=int, default=None)
    p.add_argument("--n", type=int, default=None)
    common(p)
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, SolverError, OSError, KeyError) as exc:
        print(
            json.dumps({"error": type(exc).__name__, "message": str(exc)}),
            file=sys.stderr,
        )
        return 1


if __name__ == "__main__":
    sys.exit(main())
