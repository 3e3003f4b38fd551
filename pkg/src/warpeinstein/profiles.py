"""Profile functions of one variable with analytic first and second derivatives.

Profiles are selected from a named catalog so that spec files can describe
them without executable code. Each kind registers a builder taking keyword
parameters and returning ``(f, df, d2f)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable

from .hyperdual import HyperDual

_CATALOG: dict[str, tuple[Callable[..., tuple], tuple[str, ...], dict[str, Any]]] = {}
_EXACT: set[str] = set()


def register_kind(kind: str, required: tuple[str, ...], optional: dict[str, Any] | None = None,
                  exact_derivatives: bool = False):
    """Decorator adding a profile builder to the catalog.

    Kinds whose derivatives are exact by construction (e.g. derivatives of a
    piecewise polynomial) pass ``exact_derivatives=True`` to skip the
    finite-difference self-check, which is unreliable across spline knots.
    """

    def deco(builder):
        _CATALOG[kind] = (builder, required, dict(optional or {}))
        if exact_derivatives:
            _EXACT.add(kind)
        return builder

    return deco


def catalog_kinds() -> tuple[str, ...]:
    return tuple(sorted(_CATALOG))


def kind_fields(kind: str) -> tuple[tuple[str, ...], dict[str, Any]]:
    _, required, optional = _CATALOG[kind]
    return required, optional


@dataclass(frozen=True, eq=False)
class ProfileFunction:
    """A smooth real function with its first two derivatives.

    Equality and hashing use ``(kind, params)`` only, so a profile parsed from
    a spec file compares equal to the one it was serialized from.
    """

    kind: str
    params: dict[str, Any]
    f: Callable[[float], float] = field(repr=False)
    df: Callable[[float], float] = field(repr=False)
    d2f: Callable[[float], float] = field(repr=False)
    interval: tuple[float, float] | None = None

    def eval(self, x: float) -> float:
        return self.f(x)

    def d1(self, x: float) -> float:
        return self.df(x)

    def d2(self, x: float) -> float:
        return self.d2f(x)

    def jet(self, x: float) -> tuple[float, float, float]:
        return self.f(x), self.df(x), self.d2f(x)

    def __call__(self, x):
        """Evaluate at a float or lift to a hyper-dual argument."""
        if isinstance(x, HyperDual):
            return x.apply(self.f(x.a), self.df(x.a), self.d2f(x.a))
        return self.f(x)

    def __eq__(self, other):
        if not isinstance(other, ProfileFunction):
            return NotImplemented
        return self.kind == other.kind and self.params == other.params

    def __hash__(self):
        return hash((self.kind, tuple(sorted(self.params.items()))))

    def is_constant(self) -> bool:
        return self.kind == "constant"

    def validate(self, interval: tuple[float, float] | None = None, points: int = 11, tol: float = 1e-6):
        """Check ``df`` and ``d2f`` against central differences on a grid."""
        lo, hi = interval or self.interval or (-1.0, 1.0)
        for k in range(points):
            x = lo + (hi - lo) * k / (points - 1)
            h = 1e-4 * max(1.0, abs(x), hi - lo)
            # keep the stencil inside the interval
            xc = min(max(x, lo + h), hi - h) if hi - lo > 2 * h else x
            f0, f1, f2 = self.jet(xc)
            fd1 = (self.f(xc + h) - self.f(xc - h)) / (2 * h)
            fd2 = (self.df(xc + h) - self.df(xc - h)) / (2 * h)
            scale = max(1.0, abs(f0), abs(f1), abs(f2))
            if not (abs(fd1 - f1) <= tol * scale and abs(fd2 - f2) <= tol * scale):
                raise ValueError(
                    f"profile {self.kind} derivatives inconsistent at x={xc:.6g}: "
                    f"d1={f1:.6g} vs {fd1:.6g}, d2={f2:.6g} vs {fd2:.6g}"
                )
        return self


def make_profile(kind: str, interval: tuple[float, float] | None = None, validate: bool = True, **params) -> ProfileFunction:
    """Build a catalog profile, e.g. ``make_profile("linear", slope=2.0, offset=1.0)``."""
    if kind not in _CATALOG:
        raise ValueError(f"unknown profile kind {kind!r}; available: {', '.join(catalog_kinds())}")
    builder, required, optional = _CATALOG[kind]
    missing = [name for name in required if name not in params]
    unknown = [name for name in params if name not in required and name not in optional]
    if missing or unknown:
        raise ValueError(f"profile {kind!r}: missing parameters {missing}, unknown parameters {unknown}")
    full = {**optional, **params}
    built = builder(**full)
    f, df, d2f = built[:3]
    # builders may report their own natural interval
    if interval is None and len(built) > 3:
        interval = built[3]
    prof = ProfileFunction(kind, full, f, df, d2f, interval)
    return prof.validate() if validate and kind not in _EXACT else prof


@register_kind("constant", ("value",))
def _constant(value):
    value = float(value)
    return (lambda x: value), (lambda x: 0.0), (lambda x: 0.0)


@register_kind("linear", ("slope", "offset"))
def _linear(slope, offset):
    slope, offset = float(slope), float(offset)
    return (lambda x: slope * x + offset), (lambda x: slope), (lambda x: 0.0)


@register_kind("quadratic", ("a", "b", "c"))
def _quadratic(a, b, c):
    a, b, c = float(a), float(b), float(c)
    return (lambda x: (a * x + b) * x + c), (lambda x: 2.0 * a * x + b), (lambda x: 2.0 * a)


@register_kind("exponential", ("amplitude", "rate", "offset"))
def _exponential(amplitude, rate, offset):
    amplitude, rate, offset = float(amplitude), float(rate), float(offset)
    return (
        (lambda x: amplitude * math.exp(rate * x) + offset),
        (lambda x: amplitude * rate * math.exp(rate * x)),
        (lambda x: amplitude * rate * rate * math.exp(rate * x)),
    )


def constant(value: float) -> ProfileFunction:
    return make_profile("constant", value=value)


def linear(slope: float, offset: float) -> ProfileFunction:
    return make_profile("linear", slope=slope, offset=offset)


def quadratic(a: float, b: float, c: float) -> ProfileFunction:
    return make_profile("quadratic", a=a, b=b, c=c)


def exponential(amplitude: float, rate: float, offset: float) -> ProfileFunction:
    return make_profile("exponential", amplitude=amplitude, rate=rate, offset=offset)


def scaled(profile: ProfileFunction, factor: float) -> ProfileFunction:
    """``factor * profile``, kept inside the catalog so it stays serializable."""
    p = dict(profile.params)
    if profile.kind == "constant":
        p["value"] *= factor
    elif profile.kind == "linear":
        p["slope"] *= factor
        p["offset"] *= factor
    elif profile.kind == "quadratic":
        for key in ("a", "b", "c"):
            p[key] *= factor
    elif profile.kind == "exponential":
        p["amplitude"] *= factor
        p["offset"] *= factor
    elif "scale" in p:
        p["scale"] *= factor
        p["shift"] *= factor
    else:
        raise ValueError(f"profile kind {profile.kind!r} cannot be scaled")
    f, df, d2f = profile.f, profile.df, profile.d2f
    return ProfileFunction(
        profile.kind,
        p,
        lambda x: factor * f(x),
        lambda x: factor * df(x),
        lambda x: factor * d2f(x),
        profile.interval,
    )
