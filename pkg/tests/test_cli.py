"""Command-line interface: subcommands, outputs, exit codes, determinism."""

import json
import math

import numpy as np
import pytest

from sideknow.cli import main


@pytest.fixture
def data_csv(tmp_path):
    rng = np.random.default_rng(5)
    X = rng.standard_normal((8, 3))
    X /= np.abs(X).sum(axis=1).max()
    beta = np.array([1.0, -0.5, 0.25])
    y = X @ beta + 0.1 * rng.standard_normal(8)
    path = tmp_path / "data.csv"
    rows = ["x1,x2,x3,y"]
    for i in range(8):
        rows.append(",".join(repr(float(v)) for v in (*X[i], y[i])))
    path.write_text("\n".join(rows) + "\n")
    return path


@pytest.fixture
def set_json(tmp_path):
    doc = {
        "ball_radius": 1.0,
        "halfspaces": [{"normal": [2.0, 0.0, 0.0], "offset": 1.0, "margin": 0.2}],
        "ellipsoids": [{"matrix": np.diag([2.0, 1.0, 0.5]).tolist(), "level": 1.0}],
        "cones": [
            {
                "map": np.eye(3).tolist(),
                "slope": [0.1, 0.0, 0.0],
                "shift": 1.0,
            }
        ],
        "l1_blocks": [],
    }
    path = tmp_path / "set.json"
    path.write_text(json.dumps(doc))
    return path


@pytest.fixture
def conefree_set_json(tmp_path):
    path = tmp_path / "ball.json"
    path.write_text(json.dumps({"ball_radius": 1.0}))
    return path


def run_cli(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestCompile:
    def test_knowledge_to_set(self, tmp_path, capsys):
        doc = {
            "features": np.eye(3).tolist(),
            "labels": [1.0, 2.0, 3.0],
            "ball_radius": 2.0,
            "poset": {"pairs": [[0, 1, 0.5]]},
            "must_link": {"pairs": [[1, 2, 0.3]]},
            "sparsity": {"indices": [0, 1], "level": 0.7},
            "quadratic_form": {"gamma": "first_difference", "level": 1.3},
            "robust_cones": [{"mean": [0.1, 0.0, 0.0], "spread": np.eye(3).tolist()}],
            "chance_cones": [
                {"mean": [0.0, 0.1, 0.0], "covariance": np.eye(3).tolist(), "eta": 0.9}
            ],
        }
        path = tmp_path / "knowledge.json"
        path.write_text(json.dumps(doc))
        code, out, err = run_cli(capsys, ["compile", "--knowledge", str(path)])
        assert code == 0
        parsed = json.loads(out)
        assert parsed["ball_radius"] == 2.0
        assert len(parsed["halfspaces"]) == 1 + 2  # poset + must-link pair
        assert len(parsed["ellipsoids"]) == 1
        assert len(parsed["cones"]) == 2
        assert len(parsed["l1_blocks"]) == 1

    def test_missing_features_is_error(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"poset": {"pairs": []}}))
        code, out, err = run_cli(capsys, ["compile", "--knowledge", str(path)])
        assert code == 1
        assert "error" in json.loads(err.strip().splitlines()[-1])

    def test_remaining_knowledge_blocks(self, tmp_path, capsys):
        doc = {
            "features": [[1.0, 0.0, 2.0], [0.0, 1.0, 2.0], [0.0, 0.0, 1.0]],
            "ball_radius": 1.5,
            "linf_box": {"indices": [0, 1], "level": 0.4},
            "sparsity": {"indices": [0, 1], "level": 0.7, "expand": True},
            "quadratic_pairwise": {"pairs": [[1, 2, 0.9]], "mode": "must_link"},
            "graph_laplacian": {"edges": [[0, 1, 0.5], [1, 2, 1.0]], "level": 2.0},
        }
        path = tmp_path / "knowledge2.json"
        path.write_text(json.dumps(doc))
        code, out, _ = run_cli(capsys, ["compile", "--knowledge", str(path)])
        assert code == 0
        parsed = json.loads(out)
        assert len(parsed["halfspaces"]) == 4 + 4  # box pair + expanded sparsity
        assert len(parsed["ellipsoids"]) == 2  # pairwise + laplacian
        assert parsed["l1_blocks"] == []


class TestFit:
    def test_plain_fit(self, data_csv, capsys):
        code, out, _ = run_cli(capsys, ["fit", "--data", str(data_csv), "--lam", "0.1"])
        assert code == 0
        model = json.loads(out)
        assert len(model["beta"]) == 3

    def test_cv_grid_writes_table(self, data_csv, tmp_path, capsys):
        cv_path = tmp_path / "cv.csv"
        code, out, _ = run_cli(
            capsys,
            [
                "fit",
                "--data",
                str(data_csv),
                "--grid",
                "0.001,0.1",
                "--folds",
                "4",
                "--cv-out",
                str(cv_path),
            ],
        )
        assert code == 0
        lines = cv_path.read_text().strip().splitlines()
        assert lines[0] == "lambda,fold,rmse"
        assert len(lines) == 1 + 2 * 4

    def test_constrained_fit(self, data_csv, set_json, capsys):
        code, out, _ = run_cli(
            capsys,
            ["fit", "--data", str(data_csv), "--set", str(set_json), "--lam", "0.05"],
        )
        assert code == 0
        beta = np.array(json.loads(out)["beta"])
        assert np.linalg.norm(beta) <= 1.0 + 1e-6


class TestBound:
    def test_conic_on_conefree_set(self, data_csv, conefree_set_json, capsys):
        code, out, _ = run_cli(
            capsys,
            [
                "bound",
                "--theorem",
                "conic",
                "--data",
                str(data_csv),
                "--set",
                str(conefree_set_json),
            ],
        )
        assert code == 0
        rep = json.loads(out)
        # cone-free: X_b * B_b / sqrt(n)
        assert rep["parameters"]["branch"] == "ball"
        assert rep["value"] == pytest.approx(
            rep["parameters"]["X_b"] * 1.0 / math.sqrt(8)
        )

    @pytest.mark.parametrize(
        "theorem",
        [
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
        ],
    )
    def test_every_selector_produces_report(self, theorem, data_csv, set_json, capsys):
        code, out, _ = run_cli(
            capsys,
            [
                "bound",
                "--theorem",
                theorem,
                "--data",
                str(data_csv),
                "--set",
                str(set_json),
                "--eps",
                "0.3",
                "--mc",
                "50",
            ],
        )
        assert code == 0
        rep = json.loads(out)
        assert rep["kind"] in ("CoveringLog", "Rademacher")
        assert math.isfinite(rep["value"])
        if rep["kind"] == "CoveringLog":
            assert rep["value_log10"] == pytest.approx(rep["value"] / math.log(10))

    def test_generalization_composes(self, data_csv, conefree_set_json, tmp_path, capsys):
        code, out, _ = run_cli(
            capsys,
            [
                "bound",
                "--theorem",
                "conic",
                "--data",
                str(data_csv),
                "--set",
                str(conefree_set_json),
            ],
        )
        rad_path = tmp_path / "rad.json"
        rad_path.write_text(out)
        code, out, _ = run_cli(
            capsys,
            [
                "bound",
                "--theorem",
                "generalization",
                "--data",
                str(data_csv),
                "--set",
                str(conefree_set_json),
                "--emp",
                "0.2",
                "--lipschitz",
                "2.0",
                "--delta",
                "0.05",
                "--rad-report",
                str(rad_path),
            ],
        )
        assert code == 0
        rep = json.loads(out)
        assert rep["kind"] == "Generalization"
        assert rep["value"] > 0.2


class TestDeterminism:
    def test_fit_with_grid_repeats_identically(self, data_csv, set_json, capsys):
        argv = [
            "fit",
            "--data",
            str(data_csv),
            "--set",
            str(set_json),
            "--grid",
            "0.001,0.1",
            "--folds",
            "3",
            "--seed",
            "4",
        ]
        _, out1, _ = run_cli(capsys, argv)
        _, out2, _ = run_cli(capsys, argv)
        assert out1 == out2

    def test_dual_bound_repeats_identically(self, data_csv, set_json, capsys):
        argv = [
            "bound",
            "--theorem",
            "halfspace-dual",
            "--data",
            str(data_csv),
            "--set",
            str(set_json),
            "--mc",
            "80",
            "--seed",
            "13",
        ]
        _, out1, _ = run_cli(capsys, argv)
        _, out2, _ = run_cli(capsys, argv)
        assert out1 == out2


class TestEstimate:
    def test_deterministic_stdout(self, data_csv, set_json, capsys):
        argv = [
            "estimate-rademacher",
            "--data",
            str(data_csv),
            "--set",
            str(set_json),
            "--mc",
            "50",
            "--seed",
            "11",
        ]
        _, out1, _ = run_cli(capsys, argv)
        _, out2, _ = run_cli(capsys, argv)
        assert out1 == out2
        rep = json.loads(out1)
        assert rep["mc_stderr"] is not None


class TestExperiment:
    def test_byte_identical_outputs(self, tmp_path, capsys):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(
            json.dumps(
                {
                    "p": 6,
                    "train_sizes": [24],
                    "n_test": 30,
                    "n_knowledge": 10,
                    "n_replicates": 2,
                    "poset_pair_count": 12,
                }
            )
        )
        outs = []
        for run in ("a", "b"):
            outdir = tmp_path / run
            code, out, _ = run_cli(
                capsys,
                [
                    "experiment",
                    "--preset",
                    "desk",
                    "--config",
                    str(cfg_path),
                    "--seed",
                    "5",
                    "--out",
                    str(outdir),
                ],
            )
            assert code == 0
            manifest = json.loads(out)
            assert (outdir / "summary.png").exists()
            outs.append(
                (
                    (outdir / "results.csv").read_bytes(),
                    (outdir / "summary.csv").read_bytes(),
                )
            )
        assert outs[0] == outs[1]


class TestVerify:
    def test_sandwich_suite_prints_table(self, tmp_path, capsys):
        outdir = tmp_path / "verify"
        code, out, _ = run_cli(
            capsys,
            ["verify", "--suite", "sandwich", "--mc", "60", "--seed", "7", "--out", str(outdir)],
        )
        assert code == 0
        lines = [l for l in out.splitlines() if l.startswith(("PASS", "FAIL"))]
        assert len(lines) >= 3
        assert all(l.startswith("PASS") for l in lines)
        assert (outdir / "verify.csv").exists()
        assert (outdir / "verify.png").exists()

    def test_unknown_suite_fails_cleanly(self, capsys):
        code, out, err = run_cli(capsys, ["verify", "--suite", "bogus"])
        assert code == 1
        assert "error" in json.loads(err.strip().splitlines()[-1])


class TestExitCodes:
    def test_usage_error_is_2(self, capsys):
        with pytest.raises(SystemExit) as err:
            main(["bound", "--theorem", "nonsense", "--data", "x", "--set", "y"])
        assert err.value.code == 2

    def test_computational_failure_is_1(self, tmp_path, capsys):
        missing = tmp_path / "missing.csv"
        code, out, err = run_cli(
            capsys, ["fit", "--data", str(missing), "--lam", "0.1"]
        )
        assert code == 1
        diag = json.loads(err.strip().splitlines()[-1])
        assert "error" in diag
