"""Complexity-bound computations against independent oracles."""

import itertools
import math

import numpy as np
import pytest
from scipy.integrate import quad

from sideknow import (
    EllipsoidConstraint,
    HalfSpace,
    LabeledDataset,
    LowerBoundConstants,
    NormPair,
    SOConstraint,
    cap_fraction,
    covering_ellipsoid_product,
    covering_linear_quadratic,
    covering_polygonal,
    covering_single_halfspace,
    dudley_rademacher_from_covering,
    enumerate_cross_polytope,
    generalization_bound,
    lattice_count_cross_polytope,
    rademacher_conic,
    rademacher_dual_halfspace,
    rademacher_ellipsoid_lower,
    rademacher_ellipsoid_upper,
    rademacher_quadratic_dual,
    seeded_rng,
)
from sideknow.core import BoundReport, rademacher_signs


def random_spd(rng, p, lo=0.4, hi=4.0):
    Q, _ = np.linalg.qr(rng.standard_normal((p, p)))
    return (Q * rng.uniform(lo, hi, p)) @ Q.T


def unit_column_data(rng, p, n):
    X = rng.standard_normal((p, n))
    X /= np.linalg.norm(X, axis=0)
    return LabeledDataset(X, rng.standard_normal(n))


class TestNormPair:
    def test_conjugacy_enforced(self):
        NormPair(2.0, 2.0)
        NormPair(1.0, math.inf)
        NormPair(3.0, 1.5)
        with pytest.raises(ValueError, match="conjugate"):
            NormPair(2.0, 3.0)

    def test_lower_bound_constant_positive(self):
        with pytest.raises(ValueError):
            LowerBoundConstants(C=0.0)


class TestCapFraction:
    def test_vacuous_constraint(self):
        assert cap_fraction(3, np.zeros(3), 0.1, 1.0, 1.0) == 1.0

    def test_empty_cap(self):
        # cut height at or beyond the inflated radius keeps the whole ball
        assert cap_fraction(3, np.array([0.5, 0.0, 0.0]), 0.1, 1.0, 1.0) == 1.0

    def test_quadrature_oracle(self):
        # direct quadrature of the cap-volume integral
        p, eps, B, X = 2, 0.2, 1.0, 1.0
        a = np.array([2.0, 0.0])
        r = B + eps / (2 * X)
        t = 0.5 + eps / (2 * X)

        def vol(dim, rad):
            return math.pi ** (dim / 2) / math.gamma(dim / 2 + 1) * rad**dim

        cap, _ = quad(lambda u: vol(p - 1, math.sqrt(r * r - u * u)), t, r)
        alpha_quad = 1.0 - cap / vol(p, r)
        assert cap_fraction(p, a, eps, B, X) == pytest.approx(alpha_quad, abs=1e-12)

    def test_monte_carlo_disk_oracle(self):
        alpha = cap_fraction(2, np.array([2.0, 0.0]), 0.2, 1.0, 1.0)
        rng = seeded_rng(30, "cap")
        r, t = 1.1, 0.6
        m = 1_000_000
        radii = r * np.sqrt(rng.uniform(0.0, 1.0, m))
        ang = rng.uniform(0.0, 2.0 * math.pi, m)
        alpha_mc = float(np.mean(radii * np.cos(ang) <= t))
        assert abs(alpha - alpha_mc) <= 1e-3

    def test_nonincreasing_in_norm(self):
        alphas = [
            cap_fraction(4, np.array([s, 0.0, 0.0, 0.0]), 0.3, 1.0, 1.0)
            for s in np.linspace(0.5, 9.0, 10)
        ]
        assert all(b <= a + 1e-12 for a, b in zip(alphas, alphas[1:]))
        assert all(0.0 < a <= 1.0 for a in alphas)


class TestCoveringSingleHalfspace:
    def test_vacuous_reproduces_ball_bound(self):
        rng = seeded_rng(31, "csh")
        data = unit_column_data(rng, 3, 5)
        rep = covering_single_halfspace(data, HalfSpace(np.zeros(3), 1.0), 0.2, 1.0)
        assert rep.value == pytest.approx(3 * math.log(2.0 / 0.2 + 1.0))
        assert rep.parameters["alpha"] == 1.0

    def test_nonpositive_offset_falls_back(self):
        rng = seeded_rng(32, "csh2")
        data = unit_column_data(rng, 3, 5)
        rep = covering_single_halfspace(data, HalfSpace(np.ones(3), -1.0), 0.2, 1.0)
        assert rep.parameters["alpha"] == 1.0
        assert "normalization" in rep.parameters

    def test_monotone_in_constraint_norm(self):
        rng = seeded_rng(33, "csh3")
        data = unit_column_data(rng, 3, 5)
        r2 = covering_single_halfspace(data, HalfSpace(np.array([2.0, 0, 0]), 1.0), 0.2, 1.0)
        r4 = covering_single_halfspace(data, HalfSpace(np.array([4.0, 0, 0]), 1.0), 0.2, 1.0)
        assert r4.value <= r2.value

    def test_packing_lower_bound(self):
        rng = seeded_rng(34, "packing")
        data = unit_column_data(rng, 2, 6)
        h = HalfSpace(np.array([2.0, 0.5]), 1.0)
        # sample feasible coefficient vectors, map to prediction vectors
        pts = []
        while len(pts) < 3000:
            z = rng.uniform(-1.0, 1.0, 2)
            if z @ z <= 1.0 and h.normal @ z <= h.offset:
                pts.append(z)
        P = np.array(pts).T
        preds = data.features.T @ P
        for eps in (0.1, 0.3):
            rep = covering_single_halfspace(data, h, eps, 1.0)
            sep = 2.0 * math.sqrt(data.n) * eps
            chosen = []
            for v in preds.T:
                if all(np.linalg.norm(v - c) > sep for c in chosen):
                    chosen.append(v)
            assert rep.value >= math.log(len(chosen))


class TestDualHalfspace:
    def test_zero_normal_reduces_to_ball_term(self):
        rng = seeded_rng(35, "dh")
        data = unit_column_data(rng, 3, 6)
        h = HalfSpace(np.zeros(3), 1.0)
        rep = rademacher_dual_halfspace(data, h, 1.3, 200, seeded_rng(0, "s"))
        trace = float(np.sum(data.features**2))
        assert rep.value <= 1.3 * math.sqrt(trace) / data.n + 1e-12

    def test_minimizer_beats_eta_zero(self):
        rng = seeded_rng(36, "dh2")
        data = unit_column_data(rng, 3, 6)
        h = HalfSpace(rng.standard_normal(3), 0.8)
        rep = rademacher_dual_halfspace(data, h, 1.0, 300, seeded_rng(1, "s"))
        # eta = 0 gives the plain ball term in both subproblems
        signs = rademacher_signs(seeded_rng(1, "s"), (data.n, 300))
        G = data.features @ signs
        eta0 = float(np.mean(np.linalg.norm(G, axis=0))) / data.n
        assert rep.value <= eta0 + 1e-12

    def test_witness_instance(self):
        data = LabeledDataset(np.array([[1.0], [0.0]]), np.array([0.0]))
        h = HalfSpace(np.array([4.0, 0.0]), 1.0)
        lit = rademacher_dual_halfspace(data, h, 1.0, 0, None, "paper_literal", exhaustive=True)
        snd = rademacher_dual_halfspace(data, h, 1.0, 0, None, "sound", exhaustive=True)
        assert lit.value == pytest.approx(0.625, abs=1e-9)
        assert snd.value == pytest.approx(1.0, abs=1e-9)
        assert lit.mc_stderr == 0.0

    def test_matches_analytic_one_dimensional_oracle(self):
        # closed-form KKT solution of min_eta B||g - eta a|| + eta
        rng_data = seeded_rng(37, "dh3")
        data = unit_column_data(rng_data, 3, 5)
        w = rng_data.standard_normal(3)
        h = HalfSpace(w, 0.9)
        B = 1.2
        mc = 40
        rep = rademacher_dual_halfspace(data, h, B, mc, seeded_rng(4, "sigma"))
        a = w / 0.9
        signs = rademacher_signs(seeded_rng(4, "sigma"), (data.n, mc))
        G = data.features @ signs

        def exact_min(g, sgn):
            gsq = float(g @ g)
            c = sgn * float(a @ g)
            A = float(a @ a)

            def f(eta):
                return B * math.sqrt(max(gsq - 2 * eta * c + eta * eta * A, 0.0)) + eta

            cands = [0.0]
            aa = A * (B * B * A - 1.0)
            bb = -2.0 * c * (B * B * A - 1.0)
            cc = B * B * c * c - gsq
            if abs(aa) > 1e-14:
                disc = bb * bb - 4 * aa * cc
                if disc >= 0.0:
                    for root in ((-bb + math.sqrt(disc)) / (2 * aa), (-bb - math.sqrt(disc)) / (2 * aa)):
                        if root >= 0.0 and c - root * A >= -1e-12:
                            cands.append(root)
            elif abs(bb) > 1e-14:
                root = -cc / bb
                if root >= 0.0:
                    cands.append(root)
            return min(f(e) for e in cands)

        per_draw = [
            max(exact_min(G[:, j], +1.0), exact_min(G[:, j], -1.0)) for j in range(mc)
        ]
        oracle = float(np.mean(per_draw)) / data.n
        assert rep.value == pytest.approx(oracle, abs=1e-9)

    def test_variant_and_offset_validation(self):
        data = LabeledDataset([[1.0]], [0.0])
        h = HalfSpace([1.0], 1.0)
        with pytest.raises(ValueError, match="variant"):
            rademacher_dual_halfspace(data, h, 1.0, 10, seeded_rng(0, "x"), "bogus")
        with pytest.raises(ValueError, match="offset"):
            rademacher_dual_halfspace(data, HalfSpace([1.0], -1.0), 1.0, 10, seeded_rng(0, "x"))


class TestLattice:
    def test_small_counts(self):
        assert lattice_count_cross_polytope(1, 1)[0] == 3
        assert lattice_count_cross_polytope(2, 1)[0] == 5

    def test_brute_force_oracle(self):
        for p in range(1, 5):
            for K in range(0, 7):
                count, logc = lattice_count_cross_polytope(p, K)
                brute = sum(
                    1
                    for pt in itertools.product(range(-K, K + 1), repeat=p)
                    if sum(abs(c) for c in pt) <= K
                )
                assert count == brute
                assert logc == pytest.approx(math.log(brute))

    def test_enumeration_matches_count(self):
        pts = enumerate_cross_polytope(3, 4)
        assert pts.shape[0] == lattice_count_cross_polytope(3, 4)[0]
        assert np.abs(pts).sum(axis=1).max() <= 4

    def test_log_space_for_huge_counts(self):
        count, logc = lattice_count_cross_polytope(500, 500)
        assert logc > 710.0  # exp would overflow float64
        assert count > 10**308
        assert logc == pytest.approx(math.log(count // 10**100) + 100 * math.log(10), rel=1e-9)


class TestCoveringPolygonal:
    def _data(self, p=3, n=10, seed=38):
        rng = seeded_rng(seed, "poly")
        return unit_column_data(rng, p, n), rng

    def test_unconstrained_closed_form(self):
        data, _ = self._data()
        rep = covering_polygonal(data, (), 1.0, 0.4)
        K0 = math.ceil(1.0 / 0.4**2)
        assert rep.parameters["K0"] == K0
        assert rep.value == pytest.approx(lattice_count_cross_polytope(3, K0)[1])

    def test_large_eps_single_ball(self):
        data, _ = self._data()
        rep = covering_polygonal(data, (), 1.0, 1.5)
        assert rep.value == 0.0
        assert rep.parameters["branch"] == "single_ball"

    def test_missing_margin_rejected(self):
        data, rng = self._data()
        hs = (HalfSpace(rng.standard_normal(3), 1.0),)
        with pytest.raises(ValueError, match="margin"):
            covering_polygonal(data, hs, 1.0, 0.4)

    def test_constrained_count_vs_recount(self):
        data, rng = self._data()
        hs = (HalfSpace(0.2 * rng.standard_normal(3), 1.2, margin=0.9),)
        rep = covering_polygonal(data, hs, 1.0, 0.4)
        assert "count_PcK" in rep.parameters
        K = rep.parameters["K"]
        pts = enumerate_cross_polytope(3, K)
        # recount with the scaled constraint rows
        a = hs[0].normal / hs[0].offset
        feature_norms = np.linalg.norm(data.features, axis=1)
        scale = math.sqrt(data.n) * 1.0 * 1.0 / feature_norms
        ct = a * scale
        recount = int(np.count_nonzero(pts @ ct <= K))
        assert rep.parameters["count_PcK"] == recount
        full = lattice_count_cross_polytope(3, K)[0]
        assert recount <= full
        assert rep.value == pytest.approx(
            min(rep.parameters["log_PK0"], math.log(recount))
        )

    def test_enumeration_cap_falls_back(self):
        data, rng = self._data(seed=52)
        hs = (HalfSpace(rng.standard_normal(3), 1.2, margin=0.2),)
        rep = covering_polygonal(data, hs, 1.0, 0.4, enumeration_cap=100)
        assert rep.parameters["branch"] == "enumeration_skipped"
        assert rep.value == pytest.approx(rep.parameters["log_PK0"])

    def test_degenerate_gram_falls_back(self):
        # fewer examples than features: the scaled Gram matrix is singular
        rng = seeded_rng(39, "poly-degenerate")
        data = unit_column_data(rng, 4, 2)
        hs = (HalfSpace(rng.standard_normal(4), 1.0, margin=0.1),)
        rep = covering_polygonal(data, hs, 1.0, 0.4)
        assert rep.parameters["branch"] == "scaled_gram_degenerate"
        assert "warning" in rep.parameters

    def test_zero_feature_rejected(self):
        X = np.array([[1.0, -1.0], [0.0, 0.0]])
        data = LabeledDataset(X, np.zeros(2))
        hs = (HalfSpace(np.ones(2), 1.0, margin=0.1),)
        with pytest.raises(ValueError, match="identically zero"):
            covering_polygonal(data, hs, 1.0, 0.4)


class TestEllipsoidBounds:
    def test_upper_ball_case(self):
        rng = seeded_rng(40, "up")
        data = unit_column_data(rng, 4, 9)
        B = 1.7
        a_int = EllipsoidConstraint(np.eye(4) / B**2, 1.0)
        rep = rademacher_ellipsoid_upper(data, a_int)
        assert rep.value == pytest.approx(B / math.sqrt(9), rel=1e-12)

    def test_upper_diagonal_formula(self):
        rng = seeded_rng(41, "diag")
        data = unit_column_data(rng, 3, 7)
        lam = np.array([0.5, 1.5, 3.0])
        rep = rademacher_ellipsoid_upper(data, EllipsoidConstraint(np.diag(lam), 1.0))
        manual = math.sqrt(float(np.sum(data.features**2 / lam[:, None]))) / 7
        assert rep.value == pytest.approx(manual, rel=1e-12)

    def test_upper_scale_covariance(self):
        rng = seeded_rng(42, "scale")
        data = unit_column_data(rng, 3, 7)
        A = random_spd(rng, 3)
        v1 = rademacher_ellipsoid_upper(data, EllipsoidConstraint(A, 1.0)).value
        v2 = rademacher_ellipsoid_upper(data, EllipsoidConstraint(4.0 * A, 1.0)).value
        assert v2 == pytest.approx(v1 / 2.0, rel=1e-12)

    def test_upper_rejects_singular(self):
        data = LabeledDataset(np.eye(2), np.zeros(2))
        with pytest.raises(ValueError, match="positive-definite"):
            rademacher_ellipsoid_upper(data, EllipsoidConstraint(np.diag([1.0, 0.0]), 1.0))

    def test_lower_below_upper(self):
        rng = seeded_rng(43, "low")
        data = unit_column_data(rng, 3, 20)
        A = random_spd(rng, 3)
        e = EllipsoidConstraint(A, 1.0)
        up = rademacher_ellipsoid_upper(data, e)
        low = rademacher_ellipsoid_lower(data, e)
        assert low.value <= up.value

    def test_lower_zero_row_collapses(self):
        # data confined to one eigenvector: some rotated rows vanish
        A = np.diag([1.0, 2.0])
        X = np.array([[1.0, -1.0, 0.5], [0.0, 0.0, 0.0]])
        data = LabeledDataset(X, np.zeros(3))
        rep = rademacher_ellipsoid_lower(data, EllipsoidConstraint(A, 1.0))
        assert rep.value == 0.0
        assert rep.parameters["kappa"] == 0.0

    def test_lower_constant_scaling(self):
        rng = seeded_rng(44, "c-scale")
        data = unit_column_data(rng, 3, 10)
        e = EllipsoidConstraint(random_spd(rng, 3), 1.0)
        v1 = rademacher_ellipsoid_lower(data, e, consts=LowerBoundConstants(C=1.0)).value
        v2 = rademacher_ellipsoid_lower(data, e, consts=LowerBoundConstants(C=2.0)).value
        assert v2 == pytest.approx(v1 / 2.0, rel=1e-12)

    def test_lower_needs_three_examples(self):
        data = LabeledDataset(np.eye(2), np.zeros(2))
        with pytest.raises(ValueError, match="n >= 3"):
            rademacher_ellipsoid_lower(data, EllipsoidConstraint(np.eye(2), 1.0))

    def test_product_ball_reduction(self):
        B = 1.4
        rep = covering_ellipsoid_product(np.full(3, 1.0 / B**2), 1.0, 0.2)
        assert rep.value == pytest.approx(3 * math.log(2 * B / 0.2 + 1.0), rel=1e-12)

    def test_product_monotone_in_eigenvalues(self):
        eigs = np.array([0.5, 1.0, 2.0])
        v1 = covering_ellipsoid_product(eigs, 1.0, 0.2).value
        v2 = covering_ellipsoid_product(2.0 * eigs, 1.0, 0.2).value
        assert v2 < v1

    def test_product_packing_lower_bound(self):
        rng = seeded_rng(45, "prod-pack")
        data = unit_column_data(rng, 2, 6)
        A = np.diag([2.0, 0.8])
        eps = 0.3
        rep = covering_ellipsoid_product(np.linalg.eigvalsh(A), 1.0, eps)
        # sample the ellipsoid, map to prediction vectors, greedily pack
        pts = []
        box = np.sqrt(np.diag(np.linalg.inv(A)))
        while len(pts) < 3000:
            z = rng.uniform(-1.0, 1.0, 2) * box
            if z @ A @ z <= 1.0:
                pts.append(z)
        preds = data.features.T @ np.array(pts).T
        sep = 2.0 * math.sqrt(data.n) * eps
        chosen = []
        for v in preds.T:
            if all(np.linalg.norm(v - c) > sep for c in chosen):
                chosen.append(v)
        assert rep.value >= math.log(len(chosen))


class TestQuadraticDual:
    def test_identity_constant_objective(self):
        rng = seeded_rng(46, "qd")
        data = unit_column_data(rng, 3, 8)
        rep = rademacher_quadratic_dual(data, EllipsoidConstraint(np.eye(3), 1.0), 1.0)
        trace = float(np.sum(data.features**2))
        assert rep.value == pytest.approx(trace / (4 * 8) + 1.0 / 8, rel=1e-10)
        assert rep.parameters["eta_star"] == 0.0

    def test_value_beats_endpoints(self):
        rng = seeded_rng(47, "qd2")
        data = unit_column_data(rng, 4, 10)
        A2 = random_spd(rng, 4)
        rep = rademacher_quadratic_dual(data, EllipsoidConstraint(A2, 1.0), 1.0)
        lam, V = np.linalg.eigh(A2)
        s = np.sum((V.T @ data.features) ** 2, axis=1)

        def obj(eta):
            denom = 1.0 + eta * (lam - 1.0)
            return float(np.sum(s / denom)) / 40 + (1.0 + eta * 0.0) / 10

        assert rep.value <= obj(0.0) + 1e-9
        assert rep.value <= obj(1.0 - 1e-9) + 1e-6


class TestLinearQuadratic:
    def test_reduces_to_polygonal_for_ball_ellipsoids(self):
        rng = seeded_rng(48, "lq")
        data = unit_column_data(rng, 3, 10)
        hs = (HalfSpace(rng.standard_normal(3), 1.1, margin=0.2),)
        B = 1.3
        ball_e = EllipsoidConstraint(np.eye(3) / B**2, 1.0)
        direct = covering_polygonal(data, hs, B, 0.4)
        combined = covering_linear_quadratic(data, hs, ball_e, ball_e, 0.4, 0.37)
        assert abs(direct.value - combined.value) <= 1e-12

    def test_shrinking_second_ellipsoid_never_raises_bound(self):
        rng = seeded_rng(49, "lq2")
        data = unit_column_data(rng, 3, 10)
        hs = (HalfSpace(rng.standard_normal(3), 1.1, margin=0.2),)
        ball_e = EllipsoidConstraint(np.eye(3), 1.0)
        values = []
        for s in (0.5, 1.0, 2.0, 4.0, 8.0):
            e2 = EllipsoidConstraint(s * np.eye(3), 1.0)
            values.append(covering_linear_quadratic(data, hs, ball_e, e2, 0.3, 0.4).value)
        assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))

    def test_large_eps_single_ball(self):
        rng = seeded_rng(50, "lq3")
        data = unit_column_data(rng, 3, 10)
        ball_e = EllipsoidConstraint(np.eye(3), 1.0)
        rep = covering_linear_quadratic(data, (), ball_e, ball_e, 2.0, 0.5)
        assert rep.value == 0.0


class TestConic:
    def test_no_cones_ball_bound(self):
        rep = rademacher_conic(100, 1.0, 1.0, ())
        assert abs(rep.value - 0.1) <= 1e-15
        assert rep.parameters["branch"] == "ball"

    def test_hand_value(self):
        cone = SOConstraint(2.0 * np.eye(2), np.array([0.1, 0.0]), 0.1)
        rep = rademacher_conic(100, 1.0, 1.0, [cone])
        assert rep.value == pytest.approx(0.01, rel=1e-12)

    def test_parameter_family_ordering(self):
        # sharper cones tighten, larger slopes/offsets loosen
        def term(mu, delta):
            cone = SOConstraint(
                np.diag([2.0 * math.sqrt(mu), math.sqrt(mu)]),
                delta * np.array([2.0, 3.0]),
                4.0 * delta,
            )
            rep = rademacher_conic(30, 1.0, 3.0, [cone])
            return rep.parameters["inner_sum"]

        sharp = term(10.0, 1.0)
        base = term(1.0, 1.0)
        loose = term(1.0, 10.0)
        assert sharp < base < loose
        expected_base = (3.0 * math.sqrt(13.0) + 4.0) / 1.0
        assert base == pytest.approx(expected_base, rel=1e-12)

    def test_rejects_non_pd_map(self):
        cone = SOConstraint(np.zeros((2, 2)), np.zeros(2), 1.0)
        with pytest.raises(ValueError, match="positive-definite"):
            rademacher_conic(10, 1.0, 1.0, [cone])


class TestDudley:
    def test_zero_cover(self):
        rep = dudley_rademacher_from_covering(lambda e: 0.0, 10, 1.0)
        assert rep.value == pytest.approx(0.0, abs=1e-12)

    def test_constant_cover_analytic(self):
        L, n, eps_max = 7.0, 25, 0.8
        rep = dudley_rademacher_from_covering(lambda e: L, n, eps_max, c_chain=2.0)
        assert rep.value == pytest.approx(2.0 * eps_max * math.sqrt(L / n), rel=1e-6)

    def test_non_monotone_detected(self):
        with pytest.raises(ValueError, match="nonincreasing"):
            dudley_rademacher_from_covering(lambda e: e, 10, 1.0)

    def test_halfspace_cover_finite_and_monotone_in_norm(self):
        rng = seeded_rng(51, "dud")
        data = unit_column_data(rng, 2, 6)
        values = []
        for s in (2.0, 4.0):
            h = HalfSpace(np.array([s, 0.0]), 1.0)
            eps_max = 1.0

            def fn(eps, h=h):
                if eps >= eps_max:
                    return 0.0
                return covering_single_halfspace(data, h, eps, 1.0).value

            rep = dudley_rademacher_from_covering(fn, data.n, eps_max)
            assert math.isfinite(rep.value)
            values.append(rep.value)
        assert values[1] <= values[0]


class TestGeneralization:
    def _rad(self, value):
        return BoundReport(kind="Rademacher", value=value, theorem_tag="t")

    def test_zero_everything_returns_empirical(self):
        rep = generalization_bound(0.37, self._rad(0.0), 1.0, 50, 0.05, c_conf=0.0)
        assert rep.value == pytest.approx(0.37)

    def test_delta_one_boundary_warns(self):
        with pytest.warns(RuntimeWarning):
            rep = generalization_bound(0.1, self._rad(0.0), 1.0, 50, 1.0, c_conf=1.0)
        assert rep.value == pytest.approx(0.1)

    def test_monotone_in_n(self):
        vals = [
            generalization_bound(0.1, self._rad(0.0), 1.0, n, 0.05).value
            for n in (10, 100, 1000)
        ]
        assert vals[0] > vals[1] > vals[2]

    def test_validation(self):
        with pytest.raises(ValueError, match="delta"):
            generalization_bound(0.1, self._rad(0.0), 1.0, 10, 0.0)
        cov = BoundReport(kind="CoveringLog", value=1.0, theorem_tag="t")
        with pytest.raises(ValueError, match="Rademacher"):
            generalization_bound(0.1, cov, 1.0, 10, 0.05)
