import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_spec
from warpeinstein import conditions, curvature
from warpeinstein.conditions import TraceParams, warped_trace_identity
from warpeinstein.errors import DomainError, ParameterError, SingularityError
from warpeinstein.profiles import constant, exponential, linear, quadratic, scaled
from warpeinstein.signature import DirectionVector, Signature
from warpeinstein.warp import WarpSpec, block_views, build_metric


def hyperbolic_spec():
    e = Signature((1, 1, 1))
    return WarpSpec(3, 3, 2, e, e, DirectionVector((0.0, 0.0, 1.0)), DirectionVector((1.0, 0.0, 0.0)),
                    linear(1.0, 0.0), constant(1.0), constant(1.0), constant(0.0), -2.0)


def flat_spec():
    e = Signature((-1, 1, 1))
    a = DirectionVector((1.0, 0.5, 0.0))
    return WarpSpec(3, 3, 2, e, e, a, a, constant(2.0), constant(1.0), constant(0.5), constant(0.5), 0.0)


def numeric_covariant_hessian(metric, fn, x, h=1e-4):
    """Hess f = d_i d_j f - Gamma^k_ij d_k f with Christoffels from the curvature engine."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    grad = np.zeros(n)
    hess = np.zeros((n, n))
    for i in range(n):
        ei = np.eye(n)[i] * h
        grad[i] = (fn(x + ei) - fn(x - ei)) / (2 * h)
        for j in range(n):
            ej = np.eye(n)[j] * h
            hess[i, j] = (fn(x + ei + ej) - fn(x + ei - ej) - fn(x - ei + ej) + fn(x - ei - ej)) / (4 * h * h)
    gam = curvature.christoffel(metric, x)
    return hess - np.einsum("kij,k->ij", gam, grad)


class TestConformalPieces:
    def test_hyperbolic_ricci(self):
        spec = hyperbolic_spec()
        p = [0.3, -0.2, 1.4] + [0.0] * 5
        for i in range(3):
            for j in range(3):
                expected = -2.0 / 1.4**2 if i == j else 0.0
                assert conditions.conformal_ricci_B1(spec, i, j, p) == pytest.approx(expected, abs=1e-14)

    def test_constant_factor_flat(self):
        spec = flat_spec()
        p = np.linspace(-0.3, 0.3, 8)
        for i in range(3):
            assert conditions.conformal_ricci_B1(spec, i, i, p) == 0.0
            assert conditions.conformal_ricci_B2(spec, i, i, p) == 0.0
            assert conditions.conformal_hessian_f1(spec, i, i, p) == 0.0

    def test_linear_phi2_diagonal(self):
        s = 0.7
        e2 = Signature((-1, 1, 1))
        spec = WarpSpec(3, 3, 2, e2, e2, DirectionVector((1.0, 0.0, 0.0)),
                        DirectionVector((math.sqrt(2), 1.0, 0.0)), constant(1.0), constant(1.0),
                        linear(s, 2.0), constant(0.0), 0.0)
        p = [0.0] * 3 + [0.1, 0.2, 0.3] + [0.0] * 2
        phi2 = s * (math.sqrt(2) * 0.1 + 0.2) + 2.0
        for l in range(3):
            assert conditions.conformal_ricci_B2(spec, l, l, p) == pytest.approx((3 - 1) * s * s * e2.eps[l] / phi2**2)

    def test_flat_hessian(self):
        a = (0.3, -0.4, 0.5)
        spec = WarpSpec(3, 3, 2, Signature((1, -1, 1)), Signature((1, 1, 1)), DirectionVector(a),
                        DirectionVector((1.0, 0.0, 0.0)), constant(1.0), quadratic(0.8, 0.1, 2.0),
                        constant(1.0), constant(0.0), 0.0)
        p = [0.1, 0.2, -0.3] + [0.0] * 5
        for i in range(3):
            for j in range(3):
                assert conditions.conformal_hessian_f1(spec, i, j, p) == pytest.approx(1.6 * a[i] * a[j])

    @pytest.mark.parametrize("seed", range(4))
    def test_against_numeric_oracle(self, seed):
        rng = np.random.default_rng(seed)
        spec = random_spec(rng, n1=3, n2=3, d=2)
        b1, b2, _ = block_views(spec, scheme="hyperdual")
        p = spec.domain.sample(rng, 1)[0]
        x, y, _ = spec.split(p)
        r1 = curvature.ricci(b1, x)
        r2 = curvature.ricci(b2, y)
        h1 = numeric_covariant_hessian(b1, lambda z: spec.f1.eval(float(np.dot(spec.alpha1.alpha, z))), x)
        h2 = numeric_covariant_hessian(b2, lambda z: spec.f2.eval(float(np.dot(spec.alpha2.alpha, z))), y)
        for i in range(3):
            for j in range(3):
                assert conditions.conformal_ricci_B1(spec, i, j, p) == pytest.approx(r1[i, j], abs=1e-6)
                assert conditions.conformal_ricci_B2(spec, i, j, p) == pytest.approx(r2[i, j], abs=1e-6)
                assert conditions.conformal_hessian_f1(spec, i, j, p) == pytest.approx(h1[i, j], abs=1e-6)
                assert conditions.hessian_f2_residual(spec, i, j, p) == pytest.approx(h2[i, j], abs=1e-6)

    def test_hessian_f2_zero_for_constant(self, family_spec3):
        p = family_spec3.domain.sample(np.random.default_rng(0), 1)[0]
        for l in range(3):
            for r in range(3):
                assert conditions.hessian_f2_residual(family_spec3, l, r, p) == 0.0

    def test_hessian_f2_generic_nonzero(self):
        e = Signature((1, 1, 1))
        spec = WarpSpec(3, 3, 2, e, e, DirectionVector((1.0, 0.0, 0.0)), DirectionVector((1.0, 1.0, 0.0)),
                        constant(1.0), constant(1.0), linear(0.5, 2.0), linear(0.3, 1.0), 0.0)
        assert abs(conditions.hessian_f2_residual(spec, 0, 1, [0.1] * 8)) > 1e-3

    def test_singular_factor(self):
        spec = hyperbolic_spec()
        with pytest.raises(SingularityError):
            conditions.conformal_ricci_B1(spec, 0, 0, [0.0] * 8)


class TestRicciBlocks:
    def test_constant_profiles_zero(self):
        assert np.all(conditions.ricci_M_blocks(flat_spec(), np.zeros(8)) == 0.0)

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_numeric(self, seed):
        rng = np.random.default_rng(200 + seed)
        spec = random_spec(rng)
        p = spec.domain.sample(rng, 1)[0]
        closed = conditions.ricci_M_blocks(spec, p)
        num = curvature.ricci(build_metric(spec), p)
        assert np.max(np.abs(closed - num)) < 1e-5 * max(1.0, np.max(np.abs(num)))

    def test_unsquared_gradient_disagrees(self):
        rng = np.random.default_rng(5)
        e2 = Signature((1, -1, 1))
        spec = WarpSpec(3, 3, 2, Signature((-1, 1, 1)), e2, DirectionVector((1.0, 0.2, 0.0)),
                        DirectionVector((0.5, 0.3, -0.2)), constant(1.0), constant(1.0),
                        exponential(0.5, 0.9, 1.2), constant(0.5), 0.0)
        p = rng.uniform(-0.3, 0.3, 8)
        num = curvature.ricci(build_metric(spec, scheme="hyperdual"), p)
        good = conditions.ricci_M_blocks(spec, p)
        literal = conditions.ricci_M_blocks(spec, p, literal_y_diagonal=True)
        assert np.max(np.abs(good - num)) < 1e-8
        assert np.max(np.abs(literal - num)) > 1e-2

    def test_family_solution_is_einstein(self, family_spec3, traj3):
        spec = family_spec3
        a = spec.alpha1.alpha
        base = spec.domain.sample(np.random.default_rng(4), 1)[0]
        lo, hi = spec.domain.intervals[0]
        checked = 0
        for k in range(len(traj3)):
            # move x0 so that xi1 hits a trajectory knot, where the interpolant is exact
            x = base.copy()
            x[0] = (traj3.t[k] - a[1] * x[1] - a[2] * x[2]) / a[0]
            if not lo <= x[0] <= hi:
                continue
            g = build_metric(spec).eval(x)
            ric = conditions.ricci_M_blocks(spec, x)
            assert np.max(np.abs(ric - spec.lam * g)) < 1e-8 * np.max(np.abs(g))
            checked += 1
        assert checked > 20


class TestBlockConditions:
    def test_flat_all_zero(self):
        rep = conditions.theorem21_residuals(flat_spec(), np.full(8, 0.1))
        assert rep.max_abs == 0.0
        assert len(rep.labels) == len(rep.values)

    def test_hyperbolic_block(self):
        # B1 is hyperbolic with lambda = -2 but the y-block and the fiber are flat,
        # so exactly the IV and V conditions fail, each by -lambda
        rep = conditions.theorem21_residuals(hyperbolic_spec(), [0.1, 0.2, 1.3] + [0.0] * 5)
        for label, v in rep.as_dict().items():
            if label.startswith(("IV", "V")):
                assert abs(v) == pytest.approx(2.0)
            else:
                assert abs(v) < 1e-14

    def test_family_solution(self, family_spec3):
        rng = np.random.default_rng(1)
        for p in family_spec3.domain.sample(rng, 20):
            rep = conditions.theorem21_residuals(family_spec3, p)
            assert rep.normalized < 1e-7

    def test_perturbed_solution_detected(self, family_spec3):
        spec = WarpSpec(**{**family_spec3.__dict__, "phi1": scaled(family_spec3.phi1, 1.1)})
        p = spec.domain.sample(np.random.default_rng(2), 1)[0]
        assert conditions.theorem21_residuals(spec, p).max_abs > 1e-3

    def test_equivalence_with_numeric_einstein(self, family_spec3):
        rng = np.random.default_rng(3)
        bad = WarpSpec(**{**family_spec3.__dict__, "phi1": scaled(family_spec3.phi1, 1.02)})
        for spec, ok in ((family_spec3, True), (bad, False)):
            g = build_metric(spec, scheme="hyperdual")
            for p in spec.domain.sample(rng, 3):
                closed_ok = conditions.theorem21_residuals(spec, p).normalized < 1e-7
                numeric_ok = curvature.einstein_residual(g, spec.lam, p).relative_residual < 1e-5
                assert closed_ok == numeric_ok == ok

    def test_substituted_variants(self, rng):
        spec = random_spec(rng)
        p = spec.domain.sample(rng, 1)[0]
        rep = conditions.theorem21_residuals(spec, p).as_dict()
        x, y, _ = spec.split(p)
        xi1, xi2 = spec.xis(p)
        a1, a2 = spec.alpha1.alpha, spec.alpha2.alpha
        phi1, dphi1, ddphi1 = spec.phi1.jet(xi1)
        phi2, _, ddphi2 = spec.phi2.jet(xi2)
        f1, df1, ddf1 = spec.f1.jet(xi1)
        f = f1 + spec.f2.eval(xi2)
        d, n1, n2 = spec.d, spec.n1, spec.n2
        scale = 1.0 + max(abs(v) for v in rep.values())
        for i in range(n1):
            diag_i = ((n1 - 2) * f * ddphi1 - phi1 * ddf1 * d - 2 * dphi1 * df1 * d) * a1[i] ** 2
            assert rep[f"III[{i}]"] - rep[f"IIIs[{i}]"] == pytest.approx(phi1 * diag_i, abs=1e-12 * scale)
        for l in range(n2):
            expected = (n2 - 2) * phi2 * ddphi2 * a2[l] ** 2
            assert rep[f"IV[{l}]"] - rep[f"IVs[{l}]"] == pytest.approx(expected, abs=1e-12 * scale)

    @pytest.mark.parametrize("seed", range(6))
    def test_reduction_to_ode_conditions(self, seed):
        rng = np.random.default_rng(300 + seed)
        spec = random_spec(rng)
        p = spec.domain.sample(rng, 1)[0]
        xi1, xi2 = spec.xis(p)
        chart = conditions.theorem21_residuals(spec, p).as_dict()
        ode = conditions.theorem31_residuals(spec, spec.n1, spec.n2, spec.lam, xi1, xi2, "a",
                                             n1=spec.n1, d=spec.d, norm1=spec.norm1, norm2=spec.norm2).as_dict()
        a1, a2 = spec.alpha1.alpha, spec.alpha2.alpha
        e1, e2 = spec.eps1.eps, spec.eps2.eps
        phi1, phi2 = spec.phi1.eval(xi1), spec.phi2.eval(xi2)
        scale = 1.0 + max(abs(v) for v in chart.values())
        for i in range(spec.n1):
            for j in range(i + 1, spec.n1):
                assert chart[f"I[{i},{j}]"] == pytest.approx(a1[i] * a1[j] * ode["Ia"], abs=1e-10 * scale)
            expected = phi1 * a1[i] ** 2 * ode["Ia"] + e1[i] * ode["IIIa"]
            assert chart[f"III[{i}]"] == pytest.approx(expected, abs=1e-10 * scale)
        for l in range(spec.n2):
            expected = ((spec.n2 - 2) * phi2 * a2[l] ** 2 + e2[l] * spec.norm2 * phi2) * ode["IIa"] + e2[l] * ode["IVa"]
            assert chart[f"IV[{l}]"] == pytest.approx(expected, abs=1e-10 * scale)
        assert chart["V"] == pytest.approx(ode["Va"], abs=1e-10 * scale)


class TestReducedOdeConditions:
    def profiles(self, beta=1.0, gamma=2.0):
        class P:
            phi1 = constant(beta)
            f1 = constant(gamma - 1.0)
            phi2 = constant(1.0)
            f2 = constant(1.0)

        return P

    def test_constant_state(self):
        rep = conditions.theorem31_residuals(self.profiles(), 3, 3, 1.5, 0.0, 0.0, "b")
        assert rep["IIIb"] == pytest.approx(-3.0)
        assert rep["Vb"] == pytest.approx(-6.0)
        assert rep["Ib"] == 0.0
        assert rep["IVb"] == pytest.approx(-1.5)

    def test_gamma_nonpositive(self):
        with pytest.raises(DomainError):
            conditions.theorem31_residuals(self.profiles(gamma=-0.5), 3, 3, 1.5, 0.0, 0.0, "b")

    def test_unknown_variant(self):
        with pytest.raises(ParameterError):
            conditions.theorem31_residuals(self.profiles(), 3, 3, 1.5, 0.0, 0.0, "c")

    def test_variant_a_reduces_to_b(self, family_spec3):
        xi1 = float(np.mean(family_spec3.domain.intervals[0])) * family_spec3.alpha1.alpha[0]
        b = conditions.theorem31_residuals(family_spec3, 3, 3, 1.5, 0.9 * xi1, 0.05, "b").as_dict()
        a = conditions.theorem31_residuals(family_spec3, 3, 3, 1.5, 0.9 * xi1, 0.05, "a").as_dict()
        assert a["Ia"] == pytest.approx(b["Ib"], rel=1e-12, abs=1e-12)
        assert a["IIIa"] == pytest.approx(b["IIIb"], rel=1e-12, abs=1e-12)
        assert a["IVa"] == pytest.approx(b["IVb"], rel=1e-12, abs=1e-12)
        assert a["Va"] == pytest.approx(b["Vb"], rel=1e-12, abs=1e-12)


class TestSingleWarpConditions:
    def test_flat(self):
        rep = conditions.theorem11_residuals(flat_spec(), np.zeros(8))
        assert rep.max_abs == 0.0

    def test_family(self, family_spec3):
        p = family_spec3.domain.sample(np.random.default_rng(9), 1)[0]
        rep = conditions.theorem11_residuals(family_spec3, p)
        g = build_metric(family_spec3).eval(p)
        assert rep.max_abs < 1e-6 * np.max(np.abs(g))

    def test_mu_must_vanish(self):
        with pytest.raises(ParameterError):
            conditions.theorem11_residuals(flat_spec(), np.zeros(8), mu=1.0)


class TestTraceIdentity:
    def test_constant_warping(self):
        lam, f, n, d = 0.7, 1.3, 5, 3
        rep = warped_trace_identity(TraceParams(lam, lam * f * f, d, n, n * lam, f, 0.0, 0.0))
        assert rep.max_abs < 1e-14

    def test_ricci_flat_product(self):
        rep = warped_trace_identity(TraceParams(0.0, 0.0, 2, 4, 0.0, 2.0, 0.0, 0.0))
        assert rep.max_abs == 0.0

    def test_small_fiber(self):
        with pytest.raises(ParameterError):
            warped_trace_identity(TraceParams(0.0, 0.0, 1, 4, 0.0, 2.0, 0.0, 0.0))

    @settings(max_examples=200)
    @given(st.floats(-3, 3), st.floats(-3, 3), st.integers(2, 6), st.integers(1, 8), st.floats(-5, 5),
           st.floats(0.1, 4), st.floats(-5, 5), st.floats(0, 5))
    def test_linear_combination(self, lam, mu, d, n, rb, f, lap, g2):
        rep = warped_trace_identity(TraceParams(lam, mu, d, n, rb, f, lap, g2))
        combo = (rep["1.2"] + rep["1.3"]) / (d * (d - 1))
        scale = max(rep.scales) + 1.0
        assert rep["1.4"] == pytest.approx(combo, abs=1e-12 * scale)
