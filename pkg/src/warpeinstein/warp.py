"""The sequential warped-product metric phi1^-2 g_B1 + phi2^-2 g_B2 + f^2 g_F.

Chart layout is always ``[x (n1) | y (n2) | u (d)]``. The conformal factors
and warping summands depend on the chart only through the invariants
``xi1 = <alpha1, x>`` and ``xi2 = <alpha2, y>``; the fiber metric is -delta.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .curvature import MetricField
from .errors import DimensionError, DomainError, ParameterError, SingularityError
from .hyperdual import real_part
from .profiles import ProfileFunction
from .signature import DirectionVector, Signature, eps_norm, xi


@dataclass(frozen=True)
class DomainBox:
    """Closed coordinate intervals ``[(lo, hi), ...]`` bounding a verification region."""

    intervals: tuple[tuple[float, float], ...]

    def __post_init__(self):
        ivs = tuple((float(lo), float(hi)) for lo, hi in self.intervals)
        for k, (lo, hi) in enumerate(ivs):
            if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
                raise ValueError(f"domain interval {k} = [{lo}, {hi}] is empty or not finite")
        object.__setattr__(self, "intervals", ivs)

    def __len__(self):
        return len(self.intervals)

    @property
    def lower(self) -> np.ndarray:
        return np.array([lo for lo, _ in self.intervals])

    @property
    def upper(self) -> np.ndarray:
        return np.array([hi for _, hi in self.intervals])

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        return self.lower + (self.upper - self.lower) * rng.random((count, len(self)))

    def contains(self, p) -> bool:
        p = np.asarray(p, dtype=float)
        return bool(np.all(p >= self.lower) and np.all(p <= self.upper))


def xi_range(alpha, intervals) -> tuple[float, float]:
    """Exact range of <alpha, x> over a box of coordinate intervals."""
    lo = hi = 0.0
    for a, (a_lo, a_hi) in zip(alpha, intervals):
        lo += min(a * a_lo, a * a_hi)
        hi += max(a * a_lo, a * a_hi)
    return lo, hi


def box_for_xi(alpha, lo: float, hi: float, free_width: float = 1.0) -> list[tuple[float, float]]:
    """Coordinate intervals whose image under <alpha, .> is exactly [lo, hi]."""
    a = np.asarray(alpha, dtype=float)
    mid = 0.5 * (lo + hi)
    center = a * mid / float(a @ a)
    half = 0.5 * (hi - lo) / float(np.sum(np.abs(a)))
    return [
        (c - half, c + half) if ai != 0.0 else (c - free_width, c + free_width)
        for c, ai in zip(center, a)
    ]


@dataclass(frozen=True)
class WarpSpec:
    """Complete description of (B1 x B2) x_f F with conformally flat base factors."""

    n1: int
    n2: int
    d: int
    eps1: Signature
    eps2: Signature
    alpha1: DirectionVector
    alpha2: DirectionVector
    phi1: ProfileFunction
    f1: ProfileFunction
    phi2: ProfileFunction
    f2: ProfileFunction
    lam: float
    domain: DomainBox | None = field(default=None)

    def __post_init__(self):
        issues = []
        if self.n1 < 3 or self.n2 < 3:
            issues.append(f"n1 and n2 must be >= 3 (got n1={self.n1}, n2={self.n2})")
        if self.d < 2:
            issues.append(f"fiber dimension d must be >= 2 (got {self.d})")
        for name, obj, n in (("eps1", self.eps1, self.n1), ("eps2", self.eps2, self.n2),
                             ("alpha1", self.alpha1, self.n1), ("alpha2", self.alpha2, self.n2)):
            if len(obj) != n:
                issues.append(f"{name} has length {len(obj)}, expected {n}")
        if self.domain is not None and len(self.domain) != self.dim:
            issues.append(f"domain has {len(self.domain)} intervals, expected {self.dim}")
        if issues:
            raise DimensionError("; ".join(issues))
        object.__setattr__(self, "lam", float(self.lam))

    @property
    def dim(self) -> int:
        return self.n1 + self.n2 + self.d

    @property
    def norm1(self) -> float:
        return eps_norm(self.alpha1, self.eps1)

    @property
    def norm2(self) -> float:
        return eps_norm(self.alpha2, self.eps2)

    def split(self, p):
        p = list(p)
        if len(p) != self.dim:
            raise DimensionError(f"point has {len(p)} coordinates, chart has {self.dim}")
        return p[: self.n1], p[self.n1 : self.n1 + self.n2], p[self.n1 + self.n2 :]

    def xis(self, p):
        x, y, _ = self.split(p)
        return xi(self.alpha1, x), xi(self.alpha2, y)

    def require_family_form(self):
        """Raise unless the spec has the normalization used by the lambda > 0 family."""
        if self.d != self.n1:
            raise ParameterError(f"family runs require d = n1 (got d={self.d}, n1={self.n1})")
        for k, norm in ((1, self.norm1), (2, self.norm2)):
            if abs(norm + 1.0) > 1e-12:
                raise ParameterError(f"family runs require eps-norm(alpha{k}) = -1 (got {norm!r})")

    def check_domain(self, box: DomainBox | None = None, samples: int = 2001) -> DomainBox:
        """Verify phi1, phi2 nonvanishing and f > 0 over the box by dense sampling in xi."""
        box = box or self.domain
        if box is None:
            raise ParameterError("no domain box given")
        if len(box) != self.dim:
            raise DimensionError(f"domain has {len(box)} intervals, expected {self.dim}")
        ivs = box.intervals
        lo1, hi1 = xi_range(self.alpha1.alpha, ivs[: self.n1])
        lo2, hi2 = xi_range(self.alpha2.alpha, ivs[self.n1 : self.n1 + self.n2])
        s1 = np.linspace(lo1, hi1, samples)
        s2 = np.linspace(lo2, hi2, samples)
        phi1 = np.array([self.phi1.eval(s) for s in s1])
        phi2 = np.array([self.phi2.eval(s) for s in s2])
        for name, vals, grid in (("phi1", phi1, s1), ("phi2", phi2, s2)):
            if np.any(vals == 0.0) or np.any(np.sign(vals) != np.sign(vals[0])):
                k = int(np.argmin(np.abs(vals)))
                raise DomainError(f"{name} vanishes in the domain near xi={grid[k]:.6g}", location=float(grid[k]))
        f1 = np.array([self.f1.eval(s) for s in s1])
        f2 = np.array([self.f2.eval(s) for s in s2])
        if f1.min() + f2.min() <= 0.0:
            raise DomainError(
                f"warping function not positive in the domain (min f1 + min f2 = {f1.min() + f2.min():.6g})",
                location=(float(s1[int(np.argmin(f1))]), float(s2[int(np.argmin(f2))])),
            )
        return box


def warping_function(spec: WarpSpec, p):
    """f = f1(xi1) + f2(xi2); raises :class:`DomainError` if not positive."""
    xi1, xi2 = spec.xis(p)
    f = spec.f1(xi1) + spec.f2(xi2)
    if not real_part(f) > 0.0:
        raise DomainError(f"warping function is {real_part(f):.6g} <= 0", location=[real_part(c) for c in p])
    return f


def _factor(profile, arg, name, p):
    val = profile(arg)
    if real_part(val) == 0.0:
        raise SingularityError(f"conformal factor {name} vanishes", location=[real_part(c) for c in p], value=0.0)
    return val


def build_metric(spec: WarpSpec, scheme: str = "richardson", step: float = 1e-3, det_floor: float = 1e-12) -> MetricField:
    """Diagonal metric eps_i/phi1^2 (x), eps_l/phi2^2 (y), -f^2 (u) on the full chart."""
    e1, e2 = spec.eps1.eps, spec.eps2.eps
    d = spec.d

    def diag(p):
        xi1, xi2 = spec.xis(p)
        phi1 = _factor(spec.phi1, xi1, "phi1", p)
        phi2 = _factor(spec.phi2, xi2, "phi2", p)
        f = warping_function(spec, p)
        a1 = 1.0 / (phi1 * phi1)
        a2 = 1.0 / (phi2 * phi2)
        fiber = -(f * f)
        return [e * a1 for e in e1] + [e * a2 for e in e2] + [fiber] * d

    return MetricField(spec.dim, diag, diagonal=True, scheme=scheme, step=step, det_floor=det_floor)


def block_views(spec: WarpSpec, scheme: str = "richardson", step: float = 1e-3):
    """Metrics of the conformal factors B1, B2 (on their own coordinates) and the fiber g_F = -delta."""
    e1, e2 = spec.eps1.eps, spec.eps2.eps

    def b1(x):
        phi = _factor(spec.phi1, xi(spec.alpha1, x), "phi1", x)
        a = 1.0 / (phi * phi)
        return [e * a for e in e1]

    def b2(y):
        phi = _factor(spec.phi2, xi(spec.alpha2, y), "phi2", y)
        a = 1.0 / (phi * phi)
        return [e * a for e in e2]

    return (
        MetricField(spec.n1, b1, diagonal=True, scheme=scheme, step=step),
        MetricField(spec.n2, b2, diagonal=True, scheme=scheme, step=step),
        MetricField(spec.d, lambda u: [-1.0] * spec.d, diagonal=True, scheme=scheme, step=step),
    )
