"""The lambda > 0 solution family with xi-invariant profiles.

With ``q = n1 = d``, ``f2 = 1``, eps-norms -1 and ``lambda = q m^2 / 2`` the
unknowns become ``beta(t) = phi1`` and ``gamma(t) = f1 + 1`` of ``t = xi1``.
They obey three second-order equations (one redundant on the constraint
surface Z = 0), which the omega-parametrization reduces to a first-order
system in ``(beta, gamma, omega)``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterator

import numpy as np
from scipy.interpolate import BPoly

from . import kernels
from .errors import ParameterError, SingularityError
from .profiles import ProfileFunction, constant, linear, register_kind
from .signature import DirectionVector, Signature, normalize_direction
from .warp import DomainBox, WarpSpec, box_for_xi

# omega' = RATE_FACTOR * m * P(omega) / beta
CORRECTED_RATE = 0.25
UNCORRECTED_RATE = 1.0

TABLE_COLUMNS = ("t", "beta", "gamma", "omega", "Z", "res_eq1", "res_eq2", "res_eq3", "local_err")


@dataclass(frozen=True)
class FamilyParams:
    q: int
    m: float
    n2: int = 3

    def __post_init__(self):
        if int(self.q) != self.q or self.q < 3:
            raise ParameterError(f"q must be an integer >= 3 (got {self.q})")
        if int(self.n2) != self.n2 or self.n2 < 3:
            raise ParameterError(f"n2 must be an integer >= 3 (got {self.n2})")
        if not (math.isfinite(self.m) and self.m > 0):
            raise ParameterError(f"m must be positive (got {self.m})")
        object.__setattr__(self, "q", int(self.q))
        object.__setattr__(self, "n2", int(self.n2))
        object.__setattr__(self, "m", float(self.m))

    @property
    def lam(self) -> float:
        return self.q * self.m * self.m / 2.0


@dataclass(frozen=True)
class FamilyState:
    t: float
    beta: float
    gamma: float
    omega: float

    def problems(self) -> list[str]:
        out = []
        if self.beta == 0.0 or not math.isfinite(self.beta):
            out.append("beta must be nonzero and finite")
        if not self.gamma > 1.0:
            out.append(f"gamma must exceed 1 so that f1 = gamma - 1 > 0 (got {self.gamma})")
        if not (math.isfinite(self.t) and math.isfinite(self.omega)):
            out.append("t and omega must be finite")
        return out

    @property
    def is_valid(self) -> bool:
        return not self.problems()


def D(omega, q):
    """Denominator (q-2) w^2 - 2 q w + q of the omega-parametrization."""
    return (q - 2.0) * omega * omega - 2.0 * q * omega + q


def P(omega, q):
    """Polynomial q + 2 q w - (3q-2) w^2 governing the omega rate."""
    return q + 2.0 * q * omega - (3.0 * q - 2.0) * omega * omega


def D_roots(q) -> tuple[float, float]:
    r = math.sqrt(2.0 * q)
    return ((q - r) / (q - 2.0), (q + r) / (q - 2.0))


def P_roots(q) -> tuple[float, float]:
    r = math.sqrt(4.0 * q * q - 2.0 * q)
    return ((q - r) / (3.0 * q - 2.0), (q + r) / (3.0 * q - 2.0))


def _rate_factor(form: str) -> float:
    if form == "corrected":
        return CORRECTED_RATE
    if form == "uncorrected":
        return UNCORRECTED_RATE
    raise ParameterError(f"unknown form {form!r}; expected 'corrected' or 'uncorrected'")


def first_integral_Z(beta, gamma, beta_dot, gamma_dot, fp: FamilyParams):
    """Z = (q-2) g^2 b'^2 - 2q b g b' g' + q b^2 g'^2 - q m^2 g^2."""
    q, m = fp.q, fp.m
    return ((q - 2) * gamma**2 * beta_dot**2 - 2 * q * beta * gamma * beta_dot * gamma_dot
            + q * beta**2 * gamma_dot**2 - q * m * m * gamma**2)


def Z_scale(beta, gamma, beta_dot, gamma_dot, fp: FamilyParams):
    """Sum of the absolute values of the four terms of Z."""
    q, m = fp.q, fp.m
    return (abs((q - 2) * gamma**2 * beta_dot**2) + abs(2 * q * beta * gamma * beta_dot * gamma_dot)
            + abs(q * beta**2 * gamma_dot**2) + abs(q * m * m * gamma**2))


def Z_rate(beta, gamma, beta_dot, gamma_dot, beta_ddot, gamma_ddot, fp: FamilyParams):
    """dZ/dt along a curve, and the sum of absolute values of its four chain-rule terms."""
    q, m = fp.q, fp.m
    zb = -2 * q * gamma * beta_dot * gamma_dot + 2 * q * beta * gamma_dot**2
    zg = 2 * (q - 2) * gamma * beta_dot**2 - 2 * q * beta * beta_dot * gamma_dot - 2 * q * m * m * gamma
    zbd = 2 * (q - 2) * gamma**2 * beta_dot - 2 * q * beta * gamma * gamma_dot
    zgd = -2 * q * beta * gamma * beta_dot + 2 * q * beta**2 * gamma_dot
    terms = (zb * beta_dot, zg * gamma_dot, zbd * beta_ddot, zgd * gamma_ddot)
    return sum(terms), sum(abs(t) for t in terms)


def system31_accelerations(s: FamilyState, beta_dot: float, gamma_dot: float, fp: FamilyParams,
                           form: str = "corrected"):
    """(beta'', gamma'') from the beta- and gamma-equations of the second-order system.

    The default uses the beta-equation in the form that matches the reduced
    x-block condition: -g b b'' + (q-1) g b'^2 - q b b' g' - q m^2 g / 2 = 0.
    ``form="uncorrected"`` solves the variant with the opposite sign on the
    (q-1) term and no beta factor on the b' g' term,
    -b g b'' - (q-1) g b'^2 - q b' g' - q m^2 g / 2 = 0, which does not
    preserve the first integral.
    """
    beta, gamma = s.beta, s.gamma
    if beta == 0.0 or gamma == 0.0:
        raise SingularityError("beta and gamma must be nonzero", location=s, value=beta * gamma)
    q, m = fp.q, fp.m
    half = 0.5 * q * m * m
    if form == "corrected":
        bdd = ((q - 1) * gamma * beta_dot**2 - q * beta * beta_dot * gamma_dot - half * gamma) / (gamma * beta)
    elif form == "uncorrected":
        bdd = (-(q - 1) * gamma * beta_dot**2 - q * beta_dot * gamma_dot - half * gamma) / (gamma * beta)
    else:
        raise ParameterError(f"unknown form {form!r}; expected 'corrected' or 'uncorrected'")
    gdd = (half * gamma**2 + (q - 2) * beta * gamma * beta_dot * gamma_dot - (q - 1) * beta**2 * gamma_dot**2) / (
        gamma * beta**2
    )
    return bdd, gdd


def system31_residuals(beta, gamma, bd, gd, bdd, gdd, fp: FamilyParams, form: str = "corrected"):
    """Residuals of the three second-order equations and their term scales.

    ``form="uncorrected"`` evaluates the beta-equation variant described in
    :func:`system31_accelerations`.
    """
    q, m = fp.q, fp.m
    half = 0.5 * q * m * m
    t1 = [(q - 2) * gamma * bdd, -q * beta * gdd, -2 * q * bd * gd]
    if form == "corrected":
        t2 = [-beta * gamma * bdd, (q - 1) * gamma * bd**2, -q * beta * bd * gd, -half * gamma]
    elif form == "uncorrected":
        t2 = [-beta * gamma * bdd, -(q - 1) * gamma * bd**2, -q * bd * gd, -half * gamma]
    else:
        raise ParameterError(f"unknown form {form!r}")
    t3 = [gamma * beta**2 * gdd, -(q - 2) * beta * gamma * bd * gd, (q - 1) * beta**2 * gd**2, -half * gamma**2]
    res = np.array([sum(t1), sum(t2), sum(t3)])
    scale = np.array([sum(map(abs, t1)), sum(map(abs, t2)), sum(map(abs, t3))])
    return res, scale


def omega_velocities(omega, beta, gamma, fp: FamilyParams):
    """(beta', gamma') on the constraint surface Z = 0 parametrized by omega."""
    q, m = fp.q, fp.m
    den = D(omega, q)
    if den == 0.0:
        raise SingularityError(f"omega = {omega!r} is a root of D", location=omega, value=den)
    if beta == 0.0:
        raise SingularityError("beta must be nonzero", location=omega, value=beta)
    return 2 * m * q * omega * (omega - 1) / den, m * gamma * ((q - 2) * omega**2 - q) / (beta * den)


def omega_rate(omega, beta, fp: FamilyParams, form: str = "corrected"):
    """omega' along solutions.

    ``"corrected"`` is m P(omega) / (4 beta), the rate that makes the
    parametrized velocities solve the second-order system; ``"uncorrected"`` is
    m P(omega) / beta, four times faster.
    """
    if beta == 0.0:
        raise SingularityError("beta must be nonzero", location=omega, value=beta)
    return _rate_factor(form) * fp.m * P(omega, fp.q) / beta


def omega_accelerations(omega, beta, gamma, fp: FamilyParams, form: str = "corrected"):
    """(beta'', gamma'') by differentiating the omega velocities along the omega rate."""
    q, m = fp.q, fp.m
    den = D(omega, q)
    dden = 2 * (q - 2) * omega - 2 * q
    num_b = 2 * m * q * omega * (omega - 1)
    num_c = m * ((q - 2) * omega**2 - q)
    db_dw = (2 * m * q * (2 * omega - 1) * den - num_b * dden) / den**2
    dc_dw = (2 * m * (q - 2) * omega * den - num_c * dden) / den**2
    bd, gd = omega_velocities(omega, beta, gamma, fp)
    wd = omega_rate(omega, beta, fp, form)
    c = num_c / den
    bdd = db_dw * wd
    gdd = gd * c / beta + gamma * dc_dw * wd / beta - gamma * c * bd / beta**2
    return bdd, gdd


def omega_from_velocities(beta, gamma, beta_dot, gamma_dot, fp: FamilyParams, tol: float = 1e-8):
    """Invert the omega-parametrization.

    With u = beta' and v = beta gamma'/gamma the parametrization satisfies
    u = omega (v - m), which fixes omega; the result is checked against both
    velocity equations and rejected if they disagree by more than ``tol``
    (relative).

    Near omega = 1 both u and v - m vanish and the quotient loses digits, so
    the estimate is polished with Newton steps on v D(omega) = m A(omega),
    A = (q-2) omega^2 - q, which stays well conditioned there.
    """
    q, m = fp.q, fp.m
    v = beta * gamma_dot / gamma
    if v == m:
        if beta_dot == 0.0:
            omega = 1.0
        else:
            raise SingularityError("velocities correspond to omega at infinity", location=(beta_dot, gamma_dot))
    else:
        omega = beta_dot / (v - m)
    for _ in range(2):
        resid = v * D(omega, q) - m * ((q - 2) * omega * omega - q)
        slope = v * (2 * (q - 2) * omega - 2 * q) - 2 * m * (q - 2) * omega
        size = abs(v * (2 * (q - 2) * omega - 2 * q)) + abs(2 * m * (q - 2) * omega)
        if resid == 0.0 or abs(slope) <= 1e-3 * size:
            break
        omega -= resid / slope
    bd, gd = omega_velocities(omega, beta, gamma, fp)
    scale = max(abs(beta_dot), abs(gamma_dot), abs(bd), abs(gd), 1e-300)
    if abs(bd - beta_dot) > tol * scale or abs(gd - gamma_dot) > tol * scale:
        raise ParameterError(
            f"velocities ({beta_dot!r}, {gamma_dot!r}) are not on the constraint surface (omega={omega!r})"
        )
    return omega


def quadrature_RST(omega, fp: FamilyParams, form: str = "corrected"):
    """Rational integrands with d(log beta) = R dw, d(log gamma) = S dw, dt = beta T dw."""
    q, m = fp.q, fp.m
    den, pol = D(omega, q), P(omega, q)
    if den == 0.0 or pol == 0.0:
        raise SingularityError(f"omega = {omega!r} is a root of D or P", location=omega, value=den * pol)
    k = 1.0 / _rate_factor(form)
    return (
        k * 2 * q * omega * (omega - 1) / (den * pol),
        k * ((q - 2) * omega**2 - q) / (den * pol),
        k / (m * pol),
    )


@dataclass(frozen=True)
class Controls:
    """Integrator settings. ``rtol`` bounds the scaled local error of every accepted step."""

    rtol: float = 1e-10
    atol: float = 1e-13
    first_step: float | None = None
    max_step: float = math.inf
    min_step: float = 1e-12
    max_steps: int = 500_000
    d_guard: float = 1e-3
    omega_max: float = 1e6
    p_guard: float = 1e-12
    beta_floor: float = 1e-8
    gamma_margin: float = 1e-8
    beta_stop: float | None = None
    formulation: str = "omega"
    rate_form: str = "corrected"

    @property
    def tol(self) -> float:
        return self.rtol


@dataclass
class Trajectory:
    """Sampled integral curve with per-sample diagnostics.

    ``residuals`` holds the three second-order equation residuals divided by
    their term scales; ``Z`` is the raw first integral.
    """

    params: FamilyParams
    t: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray
    omega: np.ndarray
    beta_dot: np.ndarray
    gamma_dot: np.ndarray
    beta_ddot: np.ndarray
    gamma_ddot: np.ndarray
    Z: np.ndarray
    residuals: np.ndarray
    local_err: np.ndarray
    reason: str = "t_end"
    formulation: str = "omega"
    flags: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.flags is None:
            self.flags = np.array([not s.is_valid for s in self.states], dtype=bool)

    def __len__(self) -> int:
        return len(self.t)

    @property
    def states(self) -> list[FamilyState]:
        return [FamilyState(float(a), float(b), float(c), float(d))
                for a, b, c, d in zip(self.t, self.beta, self.gamma, self.omega)]

    def __iter__(self) -> Iterator[FamilyState]:
        return iter(self.states)

    @property
    def Z_relative(self) -> np.ndarray:
        """|Z| / (q m^2 gamma^2)."""
        return np.abs(self.Z) / (self.params.q * self.params.m**2 * self.gamma**2)

    def table(self) -> np.ndarray:
        return np.column_stack([self.t, self.beta, self.gamma, self.omega, self.Z, self.residuals, self.local_err])

    def write_csv(self, path) -> Path:
        path = Path(path)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(TABLE_COLUMNS)
            for row in self.table():
                w.writerow([repr(float(v)) for v in row])
        return path


def _diagnostics(fp, beta, gamma, omega, bd, gd, bdd, gdd):
    z = np.array([first_integral_Z(*a, fp) for a in zip(beta, gamma, bd, gd)])
    res = np.empty((len(beta), 3))
    for k in range(len(beta)):
        r, s = system31_residuals(beta[k], gamma[k], bd[k], gd[k], bdd[k], gdd[k], fp)
        res[k] = np.where(s > 0, r / np.where(s > 0, s, 1.0), 0.0)
    return z, res


def trajectory_from_samples(fp, t, beta, gamma, omega, local_err=None, reason="loaded", rate_form="corrected"):
    """Rebuild velocities, accelerations and diagnostics from (t, beta, gamma, omega) samples."""
    t, beta, gamma, omega = (np.asarray(a, dtype=float) for a in (t, beta, gamma, omega))
    vel = np.array([omega_velocities(w, b, g, fp) for w, b, g in zip(omega, beta, gamma)]).reshape(-1, 2)
    acc = np.array([omega_accelerations(w, b, g, fp, rate_form) for w, b, g in zip(omega, beta, gamma)]).reshape(-1, 2)
    z, res = _diagnostics(fp, beta, gamma, omega, vel[:, 0], vel[:, 1], acc[:, 0], acc[:, 1])
    return Trajectory(
        params=fp, t=t, beta=beta, gamma=gamma, omega=omega,
        beta_dot=vel[:, 0], gamma_dot=vel[:, 1], beta_ddot=acc[:, 0], gamma_ddot=acc[:, 1],
        Z=z, residuals=res,
        local_err=np.zeros_like(t) if local_err is None else np.asarray(local_err, dtype=float),
        reason=reason,
    )


def read_trajectory_csv(path, fp: FamilyParams) -> Trajectory:
    data = np.genfromtxt(path, delimiter=",", names=True)
    names = data.dtype.names
    if tuple(names) != TABLE_COLUMNS:
        raise ParameterError(f"{path}: expected columns {TABLE_COLUMNS}, found {names}")
    data = np.atleast_1d(data)
    return trajectory_from_samples(fp, data["t"], data["beta"], data["gamma"], data["omega"], data["local_err"])


def _guard(system, y, fp, controls, signs) -> str | None:
    beta, gamma = y[0], y[1]
    if not np.all(np.isfinite(y)):
        return "non_finite"
    if abs(beta) < controls.beta_floor or np.sign(beta) != signs["beta"]:
        return "beta_zero"
    if gamma - 1.0 < controls.gamma_margin:
        return "gamma_one"
    if system == kernels.OMEGA_SYSTEM:
        w = y[2]
        if abs(w) > controls.omega_max:
            return "omega_infinite"
        den = D(w, fp.q)
        if abs(den) < controls.d_guard or np.sign(den) != signs["D"]:
            return "D_root"
        if signs["P"] != 0:
            pol = P(w, fp.q)
            if abs(pol) < controls.p_guard or np.sign(pol) != signs["P"]:
                return "P_root"
    return None


def integrate_family(fp: FamilyParams, initial: FamilyState, t_span, controls: Controls | None = None) -> Trajectory:
    """Adaptive Dormand-Prince 5(4) integration with PI step control.

    ``controls.formulation`` selects the first-order omega system (default)
    or the second-order system in (beta, gamma, beta', gamma') started on
    Z = 0. Integration stops at ``t_span[1]``, when |beta| crosses
    ``controls.beta_stop``, or (with a labeled ``reason``) when the step size
    underflows while approaching a root of D or P, beta = 0 or gamma = 1.
    Reasons: ``t_end``, ``beta_target``, ``D_root``, ``P_root``,
    ``beta_zero``, ``gamma_one``, ``omega_infinite`` (omega escapes past
    ``controls.omega_max``; a chart singularity of the parametrization),
    ``non_finite``, ``step_underflow`` and ``max_steps``.
    """
    controls = controls or Controls()
    problems = initial.problems()
    if problems:
        raise ParameterError("invalid initial state: " + "; ".join(problems))
    t0, t1 = float(t_span[0]), float(t_span[1])
    if t1 == t0:
        raise ParameterError("empty t_span")
    if initial.t != t0:
        initial = replace(initial, t=t0)
    den0 = D(initial.omega, fp.q)
    if abs(den0) < controls.d_guard:
        raise ParameterError(f"initial omega {initial.omega!r} is at a root of D")
    rf = _rate_factor(controls.rate_form)
    bd0, gd0 = omega_velocities(initial.omega, initial.beta, initial.gamma, fp)
    if controls.formulation == "omega":
        system = kernels.OMEGA_SYSTEM
        y = np.array([initial.beta, initial.gamma, initial.omega])
    elif controls.formulation == "second_order":
        system = kernels.SECOND_ORDER_SYSTEM
        y = np.array([initial.beta, initial.gamma, bd0, gd0])
    else:
        raise ParameterError(f"unknown formulation {controls.formulation!r}")
    pol0 = P(initial.omega, fp.q)
    signs = {"beta": np.sign(initial.beta), "D": np.sign(den0), "P": 0 if abs(pol0) < controls.p_guard else np.sign(pol0)}

    direction = 1.0 if t1 > t0 else -1.0
    span = abs(t1 - t0)
    h = controls.first_step or min(1e-3 * max(1.0, abs(initial.beta)), span, controls.max_step)
    t = t0
    ts, ys, errs = [t0], [y.copy()], [0.0]
    err_prev = 1e-4
    reason = "t_end"
    pending = None
    steps = 0
    stop_level = None if controls.beta_stop is None else abs(controls.beta_stop)
    while True:
        remaining = abs(t1 - t)
        if remaining <= 1e-14 * max(1.0, abs(t1)):
            break
        if steps >= controls.max_steps:
            reason = "max_steps"
            break
        h = min(h, remaining, controls.max_step)
        y_new, err = kernels.dp54_step(system, y, direction * h, fp.q, fp.m, rf, controls.rtol, controls.atol)
        steps += 1
        problem = _guard(system, y_new, fp, controls, signs) if err <= 1.0 else None
        if err <= 1.0 and problem is None:
            t = t1 if h == remaining else t + direction * h
            y = np.asarray(y_new, dtype=float)
            ts.append(t)
            ys.append(y.copy())
            errs.append(err * controls.rtol)
            pending = None
            fac = 0.9 * max(err, 1e-10) ** (-0.7 / 5) * err_prev ** (0.4 / 5)
            h *= min(5.0, max(0.2, fac))
            err_prev = max(err, 1e-4)
            if stop_level is not None and (abs(ys[-2][0]) - stop_level) * (abs(y[0]) - stop_level) <= 0:
                reason = "beta_target"
                break
            continue
        if problem is not None:
            pending = problem
            h *= 0.5
        else:
            h *= max(0.1, 0.9 * err ** (-0.2)) if math.isfinite(err) else 0.1
        if h < controls.min_step * max(1.0, abs(t)):
            reason = pending or "step_underflow"
            break

    ts = np.array(ts)
    ys = np.array(ys)
    errs = np.array(errs)
    if system == kernels.OMEGA_SYSTEM:
        traj = trajectory_from_samples(fp, ts, ys[:, 0], ys[:, 1], ys[:, 2], errs, reason, controls.rate_form)
        return traj
    beta, gamma, bd, gd = ys.T
    acc = np.array([system31_accelerations(FamilyState(0.0, b, g, 0.0), u, v, fp)
                    for b, g, u, v in zip(beta, gamma, bd, gd)])
    omega = np.array([omega_from_velocities(b, g, u, v, fp, tol=1e-4) for b, g, u, v in zip(beta, gamma, bd, gd)])
    z, res = _diagnostics(fp, beta, gamma, omega, bd, gd, acc[:, 0], acc[:, 1])
    return Trajectory(
        params=fp, t=ts, beta=beta, gamma=gamma, omega=omega, beta_dot=bd, gamma_dot=gd,
        beta_ddot=acc[:, 0], gamma_ddot=acc[:, 1], Z=z, residuals=res, local_err=errs,
        reason=reason, formulation="second_order",
    )


def scaling_transform(traj: Trajectory, a: float, b: float, c: float) -> Trajectory:
    """Apply (t, beta, gamma) -> (a t + c, a beta, b gamma) samplewise.

    Velocities and accelerations follow by the chain rule from the original
    samples, so the residual columns of the result test whether the image is
    again a solution. omega is recomputed from the transformed velocities.
    Samples whose image violates gamma > 1 are flagged, not dropped.
    """
    if a == 0.0 or b == 0.0:
        raise ParameterError("a and b must be nonzero")
    fp = traj.params
    t = a * traj.t + c
    beta = a * traj.beta
    gamma = b * traj.gamma
    bd = traj.beta_dot.copy()
    gd = b / a * traj.gamma_dot
    bdd = traj.beta_ddot / a
    gdd = b / (a * a) * traj.gamma_ddot
    omega = np.array([omega_from_velocities(*args, fp) for args in zip(beta, gamma, bd, gd)])
    z, res = _diagnostics(fp, beta, gamma, omega, bd, gd, bdd, gdd)
    flags = np.array([not FamilyState(*s).is_valid for s in zip(t, beta, gamma, omega)], dtype=bool)
    return Trajectory(
        params=fp, t=t, beta=beta, gamma=gamma, omega=omega, beta_dot=bd, gamma_dot=gd,
        beta_ddot=bdd, gamma_ddot=gdd, Z=z, residuals=res, local_err=traj.local_err.copy(),
        reason=traj.reason, formulation=traj.formulation, flags=flags,
    )


def trajectory_profile(traj: Trajectory, column: str, scale: float = 1.0, shift: float = 0.0,
                       file: str | None = None) -> ProfileFunction:
    """scale * column(t) + shift as a piecewise quintic matching value, first and second derivative at every sample."""
    if len(traj) < 2:
        raise ParameterError("trajectory needs at least two samples")
    if column == "beta":
        jets = np.column_stack([traj.beta, traj.beta_dot, traj.beta_ddot])
    elif column == "gamma":
        jets = np.column_stack([traj.gamma, traj.gamma_dot, traj.gamma_ddot])
    else:
        raise ParameterError(f"unknown trajectory column {column!r}")
    t = traj.t
    if t[0] > t[-1]:
        t, jets = t[::-1], jets[::-1]
    if np.any(np.diff(t) <= 0):
        raise ParameterError("trajectory times must be strictly monotone")
    poly = BPoly.from_derivatives(t, jets.tolist())
    d1, d2 = poly.derivative(1), poly.derivative(2)
    params = {"file": file, "column": column, "q": traj.params.q, "m": traj.params.m,
              "scale": float(scale), "shift": float(shift), "n2": traj.params.n2}
    return ProfileFunction(
        "trajectory",
        params,
        lambda x: scale * float(poly(x)) + shift,
        lambda x: scale * float(d1(x)),
        lambda x: scale * float(d2(x)),
        (float(t[0]), float(t[-1])),
    )


@register_kind("trajectory", ("file", "column", "q", "m"), {"scale": 1.0, "shift": 0.0, "n2": 3},
               exact_derivatives=True)
def _trajectory_kind(file, column, q, m, scale, shift, n2):
    traj = read_trajectory_csv(file, FamilyParams(q, m, n2))
    prof = trajectory_profile(traj, column, scale, shift, file)
    return prof.f, prof.df, prof.d2f, prof.interval


def default_direction(n: int) -> tuple[Signature, DirectionVector]:
    """Lorentz-type signature (-,+,...,+) with the direction (sqrt 2, 1, 0, ...), eps-norm -1."""
    eps = Signature((-1,) + (1,) * (n - 1))
    alpha = DirectionVector((math.sqrt(2.0), 1.0) + (0.0,) * (n - 2))
    return eps, normalize_direction(alpha, eps)


def reconstruct_profiles(
    traj: Trajectory,
    fp: FamilyParams | None = None,
    *,
    eps1: Signature | None = None,
    eps2: Signature | None = None,
    alpha1: DirectionVector | None = None,
    alpha2: DirectionVector | None = None,
    phi2_sign: float = 1.0,
    phi2_offset: float = 1.0,
    margin: float = 0.05,
    trajectory_file: str | None = None,
) -> WarpSpec:
    """Warp spec with phi1 = beta, f1 = gamma - 1, f2 = 1 and phi2 linear with slope^2 = lambda/(n2-1).

    The domain box keeps xi1 inside the sampled t-range (shrunk by ``margin``
    of its length at each end) and xi2 where |phi2| >= |phi2_offset| / 2.
    """
    fp = fp or traj.params
    if len(traj) == 0:
        raise ParameterError("empty trajectory")
    if len(traj) < 2:
        raise ParameterError("trajectory needs at least two samples")
    q, n2 = fp.q, fp.n2
    if eps1 is None or alpha1 is None:
        e, a = default_direction(q)
        eps1, alpha1 = eps1 or e, alpha1 or a
    if eps2 is None or alpha2 is None:
        e, a = default_direction(n2)
        eps2, alpha2 = eps2 or e, alpha2 or a
    if phi2_offset == 0.0:
        raise ParameterError("phi2_offset must be nonzero")
    slope = math.copysign(math.sqrt(fp.lam / (n2 - 1)), phi2_sign)
    phi1 = trajectory_profile(traj, "beta", file=trajectory_file)
    f1 = trajectory_profile(traj, "gamma", shift=-1.0, file=trajectory_file)
    t_lo, t_hi = float(np.min(traj.t)), float(np.max(traj.t))
    pad = margin * (t_hi - t_lo)
    h2 = 0.5 * abs(phi2_offset) / abs(slope)
    intervals = (box_for_xi(alpha1.alpha, t_lo + pad, t_hi - pad)
                 + box_for_xi(alpha2.alpha, -h2, h2)
                 + [(-1.0, 1.0)] * q)
    spec = WarpSpec(
        n1=q, n2=n2, d=q, eps1=eps1, eps2=eps2, alpha1=alpha1, alpha2=alpha2,
        phi1=phi1, f1=f1, phi2=linear(slope, phi2_offset), f2=constant(1.0),
        lam=fp.lam, domain=DomainBox(tuple(intervals)),
    )
    spec.require_family_form()
    spec.check_domain()
    return spec
