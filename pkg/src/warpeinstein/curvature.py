"""Generic numerical curvature of a metric given on a coordinate chart.

Two independent differentiation schemes are available:

``"richardson"``
    nested central differences (the metric is differenced for the Christoffel
    symbols, which are differenced again for the Ricci tensor), each level
    with one Richardson extrapolation step.
``"hyperdual"``
    second-order forward-mode automatic differentiation. The metric function
    is evaluated on hyper-dual coordinates, giving first and second partial
    derivatives of every component with no truncation error.

Both feed the same index contraction kernels.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np

from . import kernels
from .errors import DimensionError, NumericError, SingularityError
from .hyperdual import HyperDual

SCHEMES = ("richardson", "hyperdual")


@dataclass(frozen=True)
class MetricField:
    """A smooth metric on an open set of R^dim.

    ``func`` maps a coordinate sequence to either a ``dim x dim`` array-like
    or, when ``diagonal`` is true, to the ``dim`` diagonal entries. It must be
    written with plain arithmetic so that it also accepts hyper-dual
    coordinates (required only for the ``"hyperdual"`` scheme).
    """

    dim: int
    func: Callable[[Sequence[Any]], Any]
    diagonal: bool = False
    scheme: str = "richardson"
    step: float = 1e-3
    det_floor: float = 1e-12

    def __post_init__(self):
        if self.dim < 1:
            raise DimensionError("metric dimension must be positive")
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown differentiation scheme {self.scheme!r}; expected one of {SCHEMES}")
        if not self.step > 0:
            raise ValueError("differencing step must be positive")

    def with_scheme(self, scheme: str, step: float | None = None) -> "MetricField":
        return dataclasses.replace(self, scheme=scheme, step=self.step if step is None else step)

    def raw(self, coords):
        """Evaluate ``func`` and return a ``dim x dim`` object or float array."""
        out = self.func(coords)
        if self.diagonal:
            entries = list(out)
            if len(entries) != self.dim:
                raise DimensionError(f"diagonal metric returned {len(entries)} entries, expected {self.dim}")
            mat = np.zeros((self.dim, self.dim), dtype=object)
            for i, e in enumerate(entries):
                mat[i, i] = e
            for i in range(self.dim):
                for j in range(self.dim):
                    if i != j:
                        mat[i, j] = 0.0
            return mat
        mat = np.asarray(out, dtype=object)
        if mat.shape != (self.dim, self.dim):
            raise DimensionError(f"metric returned shape {mat.shape}, expected {(self.dim, self.dim)}")
        return mat

    def eval(self, p) -> np.ndarray:
        """Metric matrix at ``p``; raises :class:`SingularityError` if it is (nearly) degenerate."""
        p = _point(p, self.dim)
        if self.diagonal:
            diag = np.array([float(e) for e in self.func(p)], dtype=float)
            if diag.shape != (self.dim,):
                raise DimensionError(f"diagonal metric returned {diag.shape[0]} entries, expected {self.dim}")
            det = float(np.prod(diag))
            mat = np.diag(diag)
        else:
            mat = np.array(self.func(p), dtype=float)
            if mat.shape != (self.dim, self.dim):
                raise DimensionError(f"metric returned shape {mat.shape}, expected {(self.dim, self.dim)}")
            scale = max(1.0, float(np.max(np.abs(mat))))
            if np.max(np.abs(mat - mat.T)) > 1e-12 * scale:
                raise ValueError("metric function returned a non-symmetric matrix")
            det = float(np.linalg.det(mat))
        if not np.all(np.isfinite(mat)):
            raise NumericError(f"metric is not finite at {p.tolist()}")
        if not abs(det) >= self.det_floor:
            raise SingularityError(
                f"metric determinant {det:.3e} below floor {self.det_floor:.1e} at {p.tolist()}",
                location=p.tolist(),
                value=det,
            )
        return mat


@dataclass(frozen=True)
class CurvatureReport:
    point: np.ndarray
    metric: np.ndarray
    ricci: np.ndarray
    scalar: float
    einstein_residual: np.ndarray
    max_abs_residual: float
    lam: float

    @property
    def relative_residual(self) -> float:
        """max |Ric - lambda g| / max |g|."""
        return self.max_abs_residual / float(np.max(np.abs(self.metric)))


def _point(p, dim) -> np.ndarray:
    p = np.asarray(p, dtype=float).reshape(-1)
    if p.shape[0] != dim:
        raise DimensionError(f"point has {p.shape[0]} coordinates, metric has dimension {dim}")
    return p


def _steps(g: MetricField, p: np.ndarray, step: float | None = None) -> np.ndarray:
    h = g.step if step is None else step
    return h * np.maximum(1.0, np.abs(p))


def _richardson_partial(fn, p: np.ndarray, k: int, h: float):
    """d fn / d p_k by central differences at h and h/2 plus one Richardson step."""
    e = np.zeros_like(p)
    e[k] = h
    coarse = (fn(p + e) - fn(p - e)) / (2.0 * h)
    e[k] = 0.5 * h
    fine = (fn(p + e) - fn(p - e)) / h
    return (4.0 * fine - coarse) / 3.0


def _metric_gradient_fd(g: MetricField, p: np.ndarray, step=None) -> np.ndarray:
    hs = _steps(g, p, step)
    return np.stack([_richardson_partial(g.eval, p, k, hs[k]) for k in range(g.dim)])


def _christoffel_fd(g: MetricField, p: np.ndarray, step=None) -> np.ndarray:
    ginv = np.linalg.inv(g.eval(p))
    dg = _metric_gradient_fd(g, p, step)
    return kernels.christoffel_contract(np.ascontiguousarray(ginv), np.ascontiguousarray(dg))


def _parts(x):
    if isinstance(x, HyperDual):
        return x.a, x.b, x.c, x.d
    x = float(x)
    return x, 0.0, 0.0, 0.0


def _metric_jets_ad(g: MetricField, p: np.ndarray, second: bool = True):
    """Metric value, gradient dg[l, i, j] and Hessian ddg[l, m, i, j] via hyper-dual evaluation."""
    n = g.dim
    g0 = g.eval(p)
    dg = np.zeros((n, n, n))
    ddg = np.zeros((n, n, n, n))
    pairs = [(l, m) for l in range(n) for m in range(l, n)] if second else [(l, l) for l in range(n)]
    for l, m in pairs:
        coords = [HyperDual(x) for x in p]
        if l == m:
            coords[l] = HyperDual(p[l], 1.0, 1.0, 0.0)
        else:
            coords[l] = HyperDual(p[l], 1.0, 0.0, 0.0)
            coords[m] = HyperDual(p[m], 0.0, 1.0, 0.0)
        mat = g.raw(coords)
        for i in range(n):
            for j in range(n):
                _, b, c, d = _parts(mat[i, j])
                dg[l, i, j] = b
                dg[m, i, j] = c
                ddg[l, m, i, j] = d
                ddg[m, l, i, j] = d
    if not (np.all(np.isfinite(dg)) and np.all(np.isfinite(ddg))):
        raise NumericError(f"non-finite metric derivative at {p.tolist()}")
    return g0, dg, ddg


def _connection(g: MetricField, p: np.ndarray, step=None):
    """Christoffel symbols and their partial derivatives dGamma[m, k, i, j]."""
    n = g.dim
    if g.scheme == "hyperdual":
        g0, dg, ddg = _metric_jets_ad(g, p)
        ginv = np.linalg.inv(g0)
        gamma = kernels.christoffel_contract(np.ascontiguousarray(ginv), np.ascontiguousarray(dg))
        lowered = 0.5 * (dg + dg.transpose(1, 0, 2) - dg.transpose(1, 2, 0))
        dlowered = 0.5 * (ddg + ddg.transpose(0, 2, 1, 3) - ddg.transpose(0, 2, 3, 1))
        dginv = -np.einsum("ka,mab,bl->mkl", ginv, dg, ginv)
        dgamma = np.einsum("mkl,ijl->mkij", dginv, lowered) + np.einsum("kl,mijl->mkij", ginv, dlowered)
        return gamma, dgamma
    hs = _steps(g, p, step)
    gamma = _christoffel_fd(g, p, step)
    dgamma = np.stack(
        [_richardson_partial(lambda x: _christoffel_fd(g, x, step), p, m, hs[m]) for m in range(n)]
    )
    return gamma, dgamma


def christoffel(g: MetricField, p) -> np.ndarray:
    """Gamma[k, i, j] = Gamma^k_ij of the Levi-Civita connection at ``p``."""
    p = _point(p, g.dim)
    if g.scheme == "hyperdual":
        g0, dg, _ = _metric_jets_ad(g, p, second=False)
        return kernels.christoffel_contract(np.ascontiguousarray(np.linalg.inv(g0)), np.ascontiguousarray(dg))
    return _christoffel_fd(g, p)


def ricci(g: MetricField, p, step: float | None = None) -> np.ndarray:
    """Ricci tensor R_ij = d_k G^k_ij - d_i G^k_kj + G^k_kl G^l_ij - G^k_il G^l_kj.

    The result is symmetrized; the exact tensor is symmetric and the
    antisymmetric part of the estimate is pure discretization noise.
    """
    p = _point(p, g.dim)
    gamma, dgamma = _connection(g, p, step)
    ric = kernels.ricci_contract(np.ascontiguousarray(gamma), np.ascontiguousarray(dgamma))
    if not np.all(np.isfinite(ric)):
        raise NumericError(f"non-finite Ricci component at {p.tolist()}")
    return 0.5 * (ric + ric.T)


def scalar_curvature(g: MetricField, p) -> float:
    p = _point(p, g.dim)
    return float(np.sum(np.linalg.inv(g.eval(p)) * ricci(g, p)))


def einstein_residual(g: MetricField, lam: float, p) -> CurvatureReport:
    """Ric - lambda g at ``p``, with the scalar curvature of the same Ricci estimate."""
    p = _point(p, g.dim)
    metric = g.eval(p)
    ric = ricci(g, p)
    scalar = float(np.sum(np.linalg.inv(metric) * ric))
    residual = ric - lam * metric
    return CurvatureReport(
        point=p,
        metric=metric,
        ricci=ric,
        scalar=scalar,
        einstein_residual=residual,
        max_abs_residual=float(np.max(np.abs(residual))),
        lam=float(lam),
    )
