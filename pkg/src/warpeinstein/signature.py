"""Signatures, invariant directions and the linear invariants xi = <alpha, x>."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionError, NotNormalizableError


@dataclass(frozen=True)
class Signature:
    """Diagonal pseudo-Euclidean signature, entries +1 or -1."""

    eps: tuple[int, ...]

    def __post_init__(self):
        eps = tuple(self.eps)
        if len(eps) < 1:
            raise DimensionError("signature must have at least one entry")
        bad = [e for e in eps if e not in (1, -1)]
        if bad:
            raise ValueError(f"signature entries must be +1 or -1, got {bad}")
        object.__setattr__(self, "eps", tuple(int(e) for e in eps))

    def __len__(self):
        return len(self.eps)

    def __iter__(self):
        return iter(self.eps)

    def as_array(self) -> np.ndarray:
        return np.array(self.eps, dtype=float)


@dataclass(frozen=True)
class DirectionVector:
    """Direction alpha defining the invariant xi = sum_i alpha_i x_i."""

    alpha: tuple[float, ...]

    def __post_init__(self):
        alpha = tuple(float(a) for a in self.alpha)
        if not alpha:
            raise DimensionError("direction vector must be non-empty")
        if not all(math.isfinite(a) for a in alpha):
            raise ValueError("direction vector entries must be finite")
        if all(a == 0.0 for a in alpha):
            raise ValueError("direction vector must not be identically zero")
        object.__setattr__(self, "alpha", alpha)

    def __len__(self):
        return len(self.alpha)

    def __iter__(self):
        return iter(self.alpha)

    def as_array(self) -> np.ndarray:
        return np.array(self.alpha, dtype=float)


def _as_eps(eps) -> tuple[int, ...]:
    return eps.eps if isinstance(eps, Signature) else Signature(tuple(eps)).eps


def _as_alpha(alpha) -> tuple[float, ...]:
    return alpha.alpha if isinstance(alpha, DirectionVector) else tuple(float(a) for a in alpha)


def eps_norm(alpha: DirectionVector | Sequence[float], eps: Signature | Sequence[int]) -> float:
    """Signature-weighted squared length sum_i eps_i alpha_i^2."""
    a = _as_alpha(alpha)
    e = _as_eps(eps)
    if len(a) != len(e):
        raise DimensionError(f"direction has length {len(a)} but signature has length {len(e)}")
    return math.fsum(ei * ai * ai for ei, ai in zip(e, a))


def xi(alpha: DirectionVector | Sequence[float], p: Sequence):
    """Linear invariant sum_i alpha_i p_i.

    ``p`` may hold floats or hyper-dual numbers; the result has the same type.
    """
    a = _as_alpha(alpha)
    if len(a) != len(p):
        raise DimensionError(f"direction has length {len(a)} but point has length {len(p)}")
    total = 0.0
    for ai, pi in zip(a, p):
        if ai != 0.0:
            total = total + ai * pi
    return total


def normalize_direction(alpha: DirectionVector | Sequence[float], eps: Signature | Sequence[int]) -> DirectionVector:
    """Rescale ``alpha`` so that its eps-norm is exactly -1.

    Only timelike directions (eps-norm < 0) can be normalized; null and
    spacelike directions raise :class:`NotNormalizableError`.
    """
    a = _as_alpha(alpha)
    norm = eps_norm(a, eps)
    if not norm < 0.0:
        kind = "null" if norm == 0.0 else "spacelike"
        raise NotNormalizableError(f"eps-norm is {norm!r} ({kind} direction); normalization requires eps-norm < 0")
    scale = 1.0 / math.sqrt(-norm)
    return DirectionVector(tuple(ai * scale for ai in a))
