"""Acceptance suite: one test per criterion, each at its stated tolerance.

Every criterion records a PASS/FAIL line; the lines are printed together at
the end of the pytest run (see ``pytest_terminal_summary`` in conftest.py)
and immediately when this file is run as a script.
"""

import itertools
import math
import time
import warnings

import numpy as np
import pytest
from scipy.integrate import IntegrationWarning, quad

from conftest import integrate_default, random_spec
from warpeinstein import cli, conditions, curvature
from warpeinstein import family as fam
from warpeinstein.profiles import constant, linear, scaled
from warpeinstein.signature import DirectionVector, Signature
from warpeinstein.specfile import write_spec
from warpeinstein.warp import DomainBox, WarpSpec, block_views, build_metric

RESULTS: list[str] = []


def record(number: int, name: str, passed: bool, detail: str) -> bool:
    line = f"criterion {number} {'PASS' if passed else 'FAIL'}: {name} ({detail})"
    RESULTS.append(line)
    print(line)
    return passed


def pipeline_einstein(q: int, n2: int, points: int, seed: int):
    fp = fam.FamilyParams(q, 1.0, n2)
    traj = integrate_default(fp)
    spec = fam.reconstruct_profiles(traj)
    spec.require_family_form()
    g = build_metric(spec, scheme="hyperdual")
    pts = spec.domain.sample(np.random.default_rng(seed), points)
    worst = max(curvature.einstein_residual(g, spec.lam, p).relative_residual for p in pts)
    return spec, worst


class TestEndToEndEinstein:
    @pytest.mark.parametrize("q, n2", [(3, 3), (4, 4)])
    def test_pipeline(self, q, n2):
        start = time.perf_counter()
        spec, worst = pipeline_einstein(q, n2, points=20, seed=q)
        elapsed = time.perf_counter() - start
        assert spec.dim == 2 * q + n2
        if q == 3:
            assert spec.lam == pytest.approx(1.5)
        ok = worst < 1e-5 and elapsed < 300.0
        record(1, f"end-to-end Einstein q={q} n2={n2}", ok,
               f"dim {spec.dim}, 20 points, max rel residual {worst:.2e} < 1e-5, {elapsed:.1f}s")
        assert ok


class TestFirstIntegral:
    def test_conservation(self):
        rng = np.random.default_rng(2024)
        worst, runs, min_efolds = 0.0, 0, math.inf
        for k in range(12):
            q = 3 + k % 2
            fp = fam.FamilyParams(q, float(rng.uniform(0.5, 2.0)), q)
            beta0, gamma0, omega0 = rng.uniform(4.0, 16.0), rng.uniform(1.5, 4.0), rng.uniform(0.75, 3.0)
            for formulation in ("omega", "second_order"):
                tr = integrate_default(fp, beta0, gamma0, omega0, formulation=formulation)
                assert tr.reason == "beta_target", (k, formulation, tr.reason)
                min_efolds = min(min_efolds, math.log(tr.beta[0] / tr.beta[-1]))
                worst = max(worst, float(np.max(tr.Z_relative)))
                runs += 1
        ok = worst < 1e-8 and min_efolds >= 3.0
        record(2, "first-integral conservation", ok,
               f"{runs} trajectories, >= {min_efolds:.2f} e-folds, max |Z|/(q m^2 gamma^2) {worst:.2e} < 1e-8")
        assert ok


def states_on_surface(rng, count):
    """Random (fp, beta, gamma, beta', gamma') with gamma' solving Z = 0 exactly up to rounding."""
    out = []
    while len(out) < count:
        q = int(rng.integers(3, 9))
        fp = fam.FamilyParams(q, float(rng.uniform(0.3, 3.0)), int(rng.integers(3, 6)))
        beta = float(rng.uniform(0.2, 20.0)) * rng.choice([-1.0, 1.0])
        gamma = float(rng.uniform(1.01, 10.0))
        bd = float(rng.uniform(-5.0, 5.0))
        # q b^2 g'^2 - 2 q b g b' g' + (q-2) g^2 b'^2 - q m^2 g^2 = 0 as a quadratic in g'
        a, b, c = q * beta**2, -2 * q * beta * gamma * bd, (q - 2) * gamma**2 * bd**2 - q * fp.m**2 * gamma**2
        root = math.sqrt(b * b - 4 * a * c)
        gd = (-b + rng.choice([-1.0, 1.0]) * root) / (2 * a)
        out.append((fp, beta, gamma, bd, gd))
    return out


def compatibility(form: str):
    worst = 0.0
    for fp, beta, gamma, bd, gd in states_on_surface(np.random.default_rng(33), 1000):
        bdd, gdd = fam.system31_accelerations(fam.FamilyState(0.0, beta, gamma, 1.0), bd, gd, fp, form=form)
        rate, scale = fam.Z_rate(beta, gamma, bd, gd, bdd, gdd, fp)
        worst = max(worst, abs(rate) / scale)
    return worst


class TestCompatibility:
    def test_corrected(self):
        worst = compatibility("corrected")
        ok = worst < 1e-9
        record(3, "compatibility, corrected beta-equation", ok, f"1000 states, max |dZ/dt|/scale {worst:.2e} < 1e-9")
        assert ok

    @pytest.mark.xfail(strict=True, reason="the uncorrected beta-equation does not preserve Z = 0")
    def test_uncorrected(self):
        worst = compatibility("uncorrected")
        record(3, "compatibility, uncorrected beta-equation (expected failure)", worst < 1e-9,
               f"1000 states, max |dZ/dt|/scale {worst:.2e} < 1e-9")
        assert worst < 1e-9


def hyperbolic_spec():
    e = Signature((1, 1, 1))
    return WarpSpec(3, 3, 2, e, e, DirectionVector((0.0, 0.0, 1.0)), DirectionVector((1.0, 0.0, 0.0)),
                    linear(1.0, 0.0), constant(1.0), constant(1.0), constant(0.0), -2.0,
                    domain=DomainBox(((-0.5, 0.5), (-0.5, 0.5), (0.5, 2.0)) + ((-0.5, 0.5),) * 5))


class TestRicciOracle:
    def test_random_specs(self):
        worst = 0.0
        for seed in range(50):
            rng = np.random.default_rng(4000 + seed)
            spec = random_spec(rng)
            p = spec.domain.sample(rng, 1)[0]
            closed = conditions.ricci_M_blocks(spec, p)
            num = curvature.ricci(build_metric(spec, scheme="hyperdual"), p)
            worst = max(worst, float(np.max(np.abs(closed - num))) / max(1.0, float(np.max(np.abs(num)))))
        ok = worst < 1e-5
        record(4, "closed-form vs numeric Ricci", ok, f"50 random specs, max scaled entry error {worst:.2e} < 1e-5")
        assert ok

    def test_hyperbolic(self):
        spec = hyperbolic_spec()
        b1, _, _ = block_views(spec, scheme="hyperdual")
        g = build_metric(spec, scheme="hyperdual")
        worst = 0.0
        for p in spec.domain.sample(np.random.default_rng(41), 10):
            x = p[:3]
            worst = max(worst, float(np.max(np.abs(curvature.ricci(b1, x) + 2.0 * b1.eval(x)))))
            # f is constant, so the x-block of Ric_M is Ric of the hyperbolic factor
            ric = curvature.ricci(g, p)[:3, :3]
            worst = max(worst, float(np.max(np.abs(ric + 2.0 * b1.eval(x)))))
            worst = max(worst, float(np.max(np.abs(conditions.ricci_M_blocks(spec, p)[:3, :3] - ric))))
        ok = worst < 1e-6
        record(4, "hyperbolic oracle Ric = -2 g", ok, f"10 points, max error {worst:.2e} < 1e-6")
        assert ok


class TestOmegaSubstitution:
    def test_sweep(self):
        rng = np.random.default_rng(55)
        worst, count = 0.0, 0
        while count < 10_000:
            q = int(rng.integers(3, 9))
            fp = fam.FamilyParams(q, float(rng.uniform(0.3, 3.0)))
            omega = float(rng.uniform(-5.0, 5.0))
            if fam.D(omega, q) == 0.0:
                continue
            beta, gamma = float(rng.uniform(0.1, 20.0)), float(rng.uniform(1.01, 10.0))
            bd, gd = fam.omega_velocities(omega, beta, gamma, fp)
            z = fam.first_integral_Z(beta, gamma, bd, gd, fp)
            worst = max(worst, abs(z) / fam.Z_scale(beta, gamma, bd, gd, fp))
            count += 1
        ok = worst < 1e-12
        record(5, "omega-substitution identity", ok, f"{count} points, q in 3..8, max |Z|/scale {worst:.2e} < 1e-12")
        assert ok


def quadrature_errors(tr):
    """Per sample pair: |log-increment error|, relative t-increment error, distance of omega to the P roots.

    log beta and log gamma increments use adaptive quadrature of R and S; the
    t-increment is the nested quadrature of beta(w) T(w), with beta(w) itself
    from the inner adaptive quadrature of R and the outer integral on fixed
    Gauss-Legendre nodes.
    """
    fp = tr.params
    roots = np.array(fam.P_roots(fp.q))
    opts = dict(epsabs=1e-14, epsrel=1e-12, limit=200)
    nodes, weights = np.polynomial.legendre.leggauss(40)

    def integral(fn, a, b):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IntegrationWarning)
            return quad(fn, a, b, **opts)[0]

    log_err, t_err, sep = [], [], []
    for k in range(len(tr) - 1):
        w1, w2 = tr.omega[k], tr.omega[k + 1]
        step = tr.t[k + 1] - tr.t[k]
        r = integral(lambda w: fam.quadrature_RST(w, fp)[0], w1, w2)
        s = integral(lambda w: fam.quadrature_RST(w, fp)[1], w1, w2)
        dt = 0.0
        for x, wt in zip(nodes, weights):
            w = 0.5 * (w1 + w2) + 0.5 * (w2 - w1) * x
            beta = tr.beta[k] * math.exp(integral(lambda u: fam.quadrature_RST(u, fp)[0], w1, w))
            dt += 0.5 * (w2 - w1) * wt * beta * fam.quadrature_RST(w, fp)[2]
        log_err.append(max(abs(r - math.log(tr.beta[k + 1] / tr.beta[k])),
                           abs(s - math.log(tr.gamma[k + 1] / tr.gamma[k]))))
        t_err.append(abs(dt - step) / abs(step))
        sep.append(min(np.min(np.abs(w1 - roots)), np.min(np.abs(w2 - roots))))
    return np.array(log_err), np.array(t_err), np.array(sep)


@pytest.fixture(scope="module")
def quadrature_table():
    """Errors over every sample pair of ten seeded trajectories spanning 3.2 e-folds of beta."""
    rng = np.random.default_rng(2024)
    parts = []
    for k in range(10):
        q = 3 + k % 2
        fp = fam.FamilyParams(q, float(rng.uniform(0.5, 2.0)), q)
        tr = integrate_default(fp, rng.uniform(4.0, 16.0), rng.uniform(1.5, 4.0), rng.uniform(0.75, 3.0))
        parts.append(quadrature_errors(tr))
    return tuple(np.concatenate(col) for col in zip(*parts))


# omega is resolvable from its samples while its distance to the fixed point
# of the omega flow is far above rounding; 1e-6 leaves ten digits
RESOLVABLE = 1e-6


class TestQuadrature:
    def test_well_conditioned_pairs(self, quadrature_table):
        log_err, t_err, sep = quadrature_table
        keep = sep >= RESOLVABLE
        worst_log, worst_t = float(np.max(log_err[keep])), float(np.max(t_err[keep]))
        ok = worst_log < 1e-6 and worst_t < 1e-6
        record(6, "quadrature consistency, omega at least 1e-6 from a P root", ok,
               f"{int(keep.sum())} of {len(sep)} sample pairs, log-increment error {worst_log:.2e}, "
               f"relative t-increment error {worst_t:.2e} < 1e-6")
        assert ok

    @pytest.mark.xfail(strict=True, reason="omega stops resolving the flow once it is within rounding of the "
                                           "attracting root of P, so omega-quadrature cannot recover increments there")
    def test_all_pairs(self, quadrature_table):
        log_err, t_err, sep = quadrature_table
        worst_log, worst_t = float(np.max(log_err)), float(np.max(t_err))
        ok = worst_log < 1e-6 and worst_t < 1e-6
        record(6, "quadrature consistency, every sample pair (expected failure)", ok,
               f"{len(sep)} pairs, log-increment error {worst_log:.2e}, relative t-increment error {worst_t:.2e}, "
               f"closest omega to a P root {float(np.min(sep)):.1e}")
        assert ok


SYMMETRIES = [(2.0, 1.0, 0.0), (1.0, 3.0, 0.0), (1.0, 1.0, 5.0), (-1.0, 2.0, -1.0)]


class TestSymmetry:
    def test_solutions_map_to_solutions(self, traj3):
        worst = max(float(np.max(np.abs(fam.scaling_transform(traj3, *abc).residuals))) for abc in SYMMETRIES)
        ok = worst < 1e-8
        record(7, "scaling symmetry", ok, f"(a,b,c) in {len(SYMMETRIES)} elements, max residual {worst:.2e} < 1e-8")
        assert ok

    def test_composition(self, traj3):
        worst = 0.0
        for (a1, b1, c1), (a2, b2, c2) in itertools.product(SYMMETRIES, repeat=2):
            twice = fam.scaling_transform(fam.scaling_transform(traj3, a1, b1, c1), a2, b2, c2)
            once = fam.scaling_transform(traj3, a1 * a2, b1 * b2, a2 * c1 + c2)
            for name in ("t", "beta", "gamma", "omega"):
                x, y = getattr(twice, name), getattr(once, name)
                worst = max(worst, float(np.max(np.abs(x - y) / np.maximum(1.0, np.abs(y)))))
        ok = worst <= 1e-14
        record(7, "group composition law", ok, f"16 ordered pairs, max deviation {worst:.2e} <= 1e-14")
        assert ok


class TestNegativeControl:
    def test_perturbed_phi1(self, tmp_path, traj3):
        csv = traj3.write_csv(tmp_path / "trajectory.csv")
        spec = fam.reconstruct_profiles(traj3, trajectory_file=str(csv.resolve()))
        bad = WarpSpec(spec.n1, spec.n2, spec.d, spec.eps1, spec.eps2, spec.alpha1, spec.alpha2,
                       scaled(spec.phi1, 1.05), spec.f1, spec.phi2, spec.f2, spec.lam, domain=spec.domain)
        pts = spec.domain.sample(np.random.default_rng(8), 20)
        good_worst = max(conditions.theorem21_residuals(spec, p).max_abs for p in pts)
        bad_worst = max(conditions.theorem21_residuals(bad, p).max_abs for p in pts)
        path = write_spec(bad, tmp_path / "perturbed.yaml")
        code = cli.main(["residuals", "--spec", str(path)])
        ok = bad_worst > 1e-3 and code != 0 and good_worst < 1e-3
        record(8, "negative control", ok,
               f"max residual {bad_worst:.2e} > 1e-3 after 5% phi1 change (unperturbed {good_worst:.2e}), CLI exit {code}")
        assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
