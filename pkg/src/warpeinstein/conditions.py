"""Closed-form Einstein conditions for the conformally flat sequential warped product.

Every evaluator works from the analytic profile jets (value, first and second
derivative in xi); chart partials follow from ``phi_,i = phi' alpha_i`` and
``phi_,ij = phi'' alpha_i alpha_j``. Residuals are signed, left side minus
right side, in the arrangement of the corresponding equation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import DomainError, ParameterError, SingularityError
from .warp import WarpSpec


@dataclass
class ResidualReport:
    """Named residuals. ``scales`` holds the sum of absolute terms of each equation."""

    labels: list[str]
    values: list[float]
    scales: list[float] = field(default_factory=list)
    location: Any = None

    def __post_init__(self):
        if len(self.labels) != len(self.values):
            raise ValueError("labels and values must have equal length")
        if not self.scales:
            self.scales = [abs(v) for v in self.values]

    @property
    def max_abs(self) -> float:
        return max((abs(v) for v in self.values), default=0.0)

    @property
    def relative(self) -> list[float]:
        return [abs(v) / s if s > 0 else 0.0 for v, s in zip(self.values, self.scales)]

    @property
    def max_rel(self) -> float:
        return max(self.relative, default=0.0)

    @property
    def normalized(self) -> float:
        """max |value| divided by the largest term scale in the report."""
        top = max(self.scales, default=0.0)
        return self.max_abs / top if top > 0 else self.max_abs

    def __getitem__(self, label: str) -> float:
        return self.values[self.labels.index(label)]

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.labels, self.values))


def _add(labels, values, scales, label, terms):
    labels.append(label)
    values.append(float(sum(terms)))
    scales.append(float(sum(abs(t) for t in terms)))


@dataclass(frozen=True)
class _Jets:
    """Chart partials of the profiles at one point."""

    f: float
    phi1: float
    dphi1: np.ndarray
    ddphi1: np.ndarray
    df1: np.ndarray
    ddf1: np.ndarray
    phi2: float
    dphi2: np.ndarray
    ddphi2: np.ndarray
    df2: np.ndarray
    ddf2: np.ndarray


def _jets(spec: WarpSpec, p) -> _Jets:
    xi1, xi2 = spec.xis(p)
    a1 = spec.alpha1.as_array()
    a2 = spec.alpha2.as_array()
    p1, dp1, ddp1 = spec.phi1.jet(xi1)
    g1, dg1, ddg1 = spec.f1.jet(xi1)
    p2, dp2, ddp2 = spec.phi2.jet(xi2)
    g2, dg2, ddg2 = spec.f2.jet(xi2)
    if p1 == 0.0 or p2 == 0.0:
        raise SingularityError("conformal factor vanishes", location=list(map(float, p)), value=0.0)
    f = g1 + g2
    if not f > 0.0:
        raise DomainError(f"warping function is {f:.6g} <= 0", location=list(map(float, p)))
    return _Jets(
        f=f,
        phi1=p1,
        dphi1=dp1 * a1,
        ddphi1=ddp1 * np.outer(a1, a1),
        df1=dg1 * a1,
        ddf1=ddg1 * np.outer(a1, a1),
        phi2=p2,
        dphi2=dp2 * a2,
        ddphi2=ddp2 * np.outer(a2, a2),
        df2=dg2 * a2,
        ddf2=ddg2 * np.outer(a2, a2),
    )


def _conformal_ricci(n, eps, phi, dphi, ddphi, i, j):
    if i != j:
        return (n - 2) * ddphi[i, j] / phi
    lap = float(np.sum(eps * np.diag(ddphi)))
    grad2 = float(np.sum(eps * dphi * dphi))
    return ((n - 2) * ddphi[i, i] + eps[i] * lap) / phi - (n - 1) * eps[i] * grad2 / (phi * phi)


def _conformal_hessian(eps, phi, dphi, df, ddf, i, j):
    if i != j:
        return ddf[i, j] + dphi[j] / phi * df[i] + dphi[i] / phi * df[j]
    return ddf[i, i] + 2.0 * dphi[i] / phi * df[i] - eps[i] * float(np.sum(eps * dphi * df)) / phi


def _conformal_laplacian(n, eps, phi, dphi, df, ddf):
    return phi * phi * float(np.sum(eps * np.diag(ddf))) - (n - 2) * phi * float(np.sum(eps * dphi * df))


def conformal_ricci_B1(spec: WarpSpec, i: int, j: int, p) -> float:
    """Ricci tensor of phi1^-2 g_B1 in the x-block."""
    J = _jets(spec, p)
    return _conformal_ricci(spec.n1, spec.eps1.as_array(), J.phi1, J.dphi1, J.ddphi1, i, j)


def conformal_ricci_B2(spec: WarpSpec, l: int, r: int, p) -> float:
    """Ricci tensor of phi2^-2 g_B2 in the y-block."""
    J = _jets(spec, p)
    return _conformal_ricci(spec.n2, spec.eps2.as_array(), J.phi2, J.dphi2, J.ddphi2, l, r)


def conformal_hessian_f1(spec: WarpSpec, i: int, j: int, p) -> float:
    """Hessian of f1 for the conformal metric phi1^-2 g_B1."""
    J = _jets(spec, p)
    return _conformal_hessian(spec.eps1.as_array(), J.phi1, J.dphi1, J.df1, J.ddf1, i, j)


def hessian_f2_residual(spec: WarpSpec, l: int, r: int, p) -> float:
    """Hessian of f2 for phi2^-2 g_B2; zero exactly when the imposed condition Hess(f2) = 0 holds."""
    J = _jets(spec, p)
    return _conformal_hessian(spec.eps2.as_array(), J.phi2, J.dphi2, J.df2, J.ddf2, l, r)


def ricci_M_blocks(spec: WarpSpec, p, literal_y_diagonal: bool = False) -> np.ndarray:
    """Full Ricci matrix of the warped metric assembled from the closed forms.

    The y-block keeps the ``-(d/f) Hess(f2)`` term so the result is the true
    Ricci tensor even when f2 is not Hessian-free. ``literal_y_diagonal``
    evaluates the y-diagonal with the gradient term left unsquared; it disagrees with the numeric Ricci tensor and is kept only to
    document that.
    """
    J = _jets(spec, p)
    n1, n2, d = spec.n1, spec.n2, spec.d
    e1, e2 = spec.eps1.as_array(), spec.eps2.as_array()
    ric = np.zeros((spec.dim, spec.dim))
    for i in range(n1):
        for j in range(n1):
            ric[i, j] = _conformal_ricci(n1, e1, J.phi1, J.dphi1, J.ddphi1, i, j) - d / J.f * _conformal_hessian(
                e1, J.phi1, J.dphi1, J.df1, J.ddf1, i, j
            )
    for l in range(n2):
        for r in range(n2):
            if literal_y_diagonal and l == r:
                lap = float(np.sum(e2 * np.diag(J.ddphi2)))
                base = ((n2 - 2) * J.ddphi2[l, l] + e2[l] * lap) / J.phi2 - (n2 - 1) * e2[l] * float(
                    np.sum(e2 * J.dphi2)
                ) / J.phi2**2
            else:
                base = _conformal_ricci(n2, e2, J.phi2, J.dphi2, J.ddphi2, l, r)
            ric[n1 + l, n1 + r] = base - d / J.f * _conformal_hessian(e2, J.phi2, J.dphi2, J.df2, J.ddf2, l, r)
    lap = _conformal_laplacian(n1, e1, J.phi1, J.dphi1, J.df1, J.ddf1) + _conformal_laplacian(
        n2, e2, J.phi2, J.dphi2, J.df2, J.ddf2
    )
    grad2 = J.phi1**2 * float(np.sum(e1 * J.df1**2)) + J.phi2**2 * float(np.sum(e2 * J.df2**2))
    # g_M(U, U) = -f^2, so Ric(U, U) = f Lap f + (d - 1)|grad f|^2
    fiber = J.f * lap + (d - 1) * grad2
    for a in range(d):
        ric[n1 + n2 + a, n1 + n2 + a] = fiber
    return ric


def theorem21_residuals(spec: WarpSpec, p) -> ResidualReport:
    """Residuals of the five chart-level Einstein conditions, plus the Hess(f2) = 0 constraint.

    Labels: ``I[i,j]`` (i<j), ``II[l,r]`` (l<r), ``III[i]``, ``IV[l]``, ``V``
    and ``H2[l,r]`` (l<=r) for the Hessian of f2. ``III`` and ``IV`` are
    evaluated literally; ``IIIs[i]`` and ``IVs[l]`` are the same conditions
    with the second derivative phi_ii eliminated through the diagonal
    version of ``I`` (resp. ``II``), so they differ from the literal ones by
    phi1 * I[i,i] (resp. (n2-2) phi2 phi2_ll).
    """
    J = _jets(spec, p)
    n1, n2, d, lam, f = spec.n1, spec.n2, spec.d, spec.lam, J.f
    e1, e2 = spec.eps1.as_array(), spec.eps2.as_array()
    phi1, dphi1, ddphi1, df1, ddf1 = J.phi1, J.dphi1, J.ddphi1, J.df1, J.ddf1
    phi2, dphi2, ddphi2 = J.phi2, J.dphi2, J.ddphi2
    labels: list[str] = []
    values: list[float] = []
    scales: list[float] = []
    for i in range(n1):
        for j in range(i + 1, n1):
            _add(labels, values, scales, f"I[{i},{j}]", [
                (n1 - 2) * f * ddphi1[i, j],
                -phi1 * ddf1[i, j] * d,
                -dphi1[i] * df1[j] * d,
                -dphi1[j] * df1[i] * d,
            ])
    for l in range(n2):
        for r in range(l + 1, n2):
            _add(labels, values, scales, f"II[{l},{r}]", [(n2 - 2) * ddphi2[l, r]])
    lap_phi1 = [e1[k] * ddphi1[k, k] for k in range(n1)]
    grad_phi1 = [e1[k] * dphi1[k] ** 2 for k in range(n1)]
    mix1 = [e1[k] * dphi1[k] * df1[k] for k in range(n1)]
    for i in range(n1):
        terms = [
            phi1 * (n1 - 2) * f * ddphi1[i, i],
            -phi1 * phi1 * ddf1[i, i] * d,
            -phi1 * 2.0 * dphi1[i] * df1[i] * d,
        ]
        terms += [e1[i] * f * phi1 * t for t in lap_phi1]
        terms += [-e1[i] * (n1 - 1) * f * t for t in grad_phi1]
        terms += [e1[i] * phi1 * d * t for t in mix1]
        terms.append(-e1[i] * lam * f)
        _add(labels, values, scales, f"III[{i}]", terms)
        # same condition after eliminating phi1_ii with the diagonal analogue of (I)
        _add(labels, values, scales, f"IIIs[{i}]", terms[3:])
    for l in range(n2):
        terms = [phi2 * (n2 - 2) * ddphi2[l, l]]
        terms += [e2[l] * phi2 * e2[s] * ddphi2[s, s] for s in range(n2)]
        terms += [-(n2 - 1) * e2[l] * e2[s] * dphi2[s] ** 2 for s in range(n2)]
        terms.append(-lam * e2[l])
        _add(labels, values, scales, f"IV[{l}]", terms)
        _add(labels, values, scales, f"IVs[{l}]", terms[1:])
    terms = [-f * phi1 * phi1 * e1[k] * ddf1[k, k] for k in range(n1)]
    terms += [(n1 - 2) * f * phi1 * t for t in mix1]
    terms += [-(d - 1) * phi1 * phi1 * e1[k] * df1[k] ** 2 for k in range(n1)]
    terms += [-(d - 1) * phi2 * phi2 * e2[s] * J.df2[s] ** 2 for s in range(n2)]
    terms.append(-lam * f * f)
    _add(labels, values, scales, "V", terms)
    df2, ddf2 = J.df2, J.ddf2
    for l in range(n2):
        for r in range(l, n2):
            if l != r:
                terms = [ddf2[l, r], dphi2[r] / phi2 * df2[l], dphi2[l] / phi2 * df2[r]]
            else:
                terms = [ddf2[l, l], 2.0 * dphi2[l] / phi2 * df2[l]]
                terms += [-e2[l] * e2[s] * dphi2[s] / phi2 * df2[s] for s in range(n2)]
            _add(labels, values, scales, f"H2[{l},{r}]", terms)
    return ResidualReport(labels, values, scales, location=list(map(float, p)))


def theorem11_residuals(spec: WarpSpec, p, mu: float = 0.0) -> ResidualReport:
    """Block form of the Einstein condition with its traced companions.

    ``1.6a[i,j]``: Ric_B1 - (d/f) Hess(f1) - lambda g_B1; ``1.6b[l,r]``: Hess(f2);
    ``1.6c[l,r]``: Ric_B2 - lambda g_B2; ``1.6e``: f Lap f1 + (d-1)|grad f|^2 + lambda f^2 - mu;
    ``1.7a``, ``1.7b``, ``1.7c``: the traces of the first three.
    The fiber is flat, so the fiber Einstein constant ``mu`` must be 0.
    """
    if mu != 0.0:
        raise ParameterError(f"flat fiber forces the fiber Einstein constant to 0 (got mu={mu})")
    J = _jets(spec, p)
    n1, n2, d, lam, f = spec.n1, spec.n2, spec.d, spec.lam, J.f
    e1, e2 = spec.eps1.as_array(), spec.eps2.as_array()
    labels, values = [], []
    for i in range(n1):
        for j in range(i, n1):
            g = e1[i] / J.phi1**2 if i == j else 0.0
            val = _conformal_ricci(n1, e1, J.phi1, J.dphi1, J.ddphi1, i, j) - d / f * _conformal_hessian(
                e1, J.phi1, J.dphi1, J.df1, J.ddf1, i, j) - lam * g
            labels.append(f"1.6a[{i},{j}]")
            values.append(float(val))
    for l in range(n2):
        for r in range(l, n2):
            labels.append(f"1.6b[{l},{r}]")
            values.append(float(_conformal_hessian(e2, J.phi2, J.dphi2, J.df2, J.ddf2, l, r)))
    for l in range(n2):
        for r in range(l, n2):
            g = e2[l] / J.phi2**2 if l == r else 0.0
            labels.append(f"1.6c[{l},{r}]")
            values.append(float(_conformal_ricci(n2, e2, J.phi2, J.dphi2, J.ddphi2, l, r) - lam * g))
    lap1 = _conformal_laplacian(n1, e1, J.phi1, J.dphi1, J.df1, J.ddf1)
    lap2 = _conformal_laplacian(n2, e2, J.phi2, J.dphi2, J.df2, J.ddf2)
    grad2 = J.phi1**2 * float(np.sum(e1 * J.df1**2)) + J.phi2**2 * float(np.sum(e2 * J.df2**2))
    labels.append("1.6e")
    values.append(float(f * lap1 + (d - 1) * grad2 + lam * f * f - mu))
    r1 = sum(J.phi1**2 * e1[i] * _conformal_ricci(n1, e1, J.phi1, J.dphi1, J.ddphi1, i, i) for i in range(n1))
    r2 = sum(J.phi2**2 * e2[l] * _conformal_ricci(n2, e2, J.phi2, J.dphi2, J.ddphi2, l, l) for l in range(n2))
    labels += ["1.7a", "1.7b", "1.7c"]
    values += [float(r1 * f - lap1 * d - n1 * f * lam), float(lap2), float(r2 - lam * n2)]
    return ResidualReport(labels, values, location=list(map(float, p)))


@dataclass(frozen=True)
class TraceParams:
    lam: float
    mu: float
    d: int
    n: int
    R_B: float
    f: float
    laplacian_f: float
    grad_f_sq: float


def warped_trace_identity(tp: TraceParams) -> ResidualReport:
    """Residuals of the fiber equation of a warped Einstein metric and its traced forms.

    ``1.1c``: f Lap f + (d-1)|grad f|^2 + lambda f^2 - mu;
    ``1.2``: R_B f^2 - f Lap f d - n f^2 lambda;
    ``1.3``: d times ``1.1c``;
    ``1.4``: |grad f|^2 + (lambda(d-n) + R_B) f^2 / (d(d-1)) - mu/(d-1).
    """
    if tp.d < 2:
        raise ParameterError(f"the trace identities need d >= 2 (got d={tp.d})")
    lam, mu, d, n = tp.lam, tp.mu, tp.d, tp.n
    f, lap, g2, rb = tp.f, tp.laplacian_f, tp.grad_f_sq, tp.R_B
    labels, values, scales = [], [], []
    _add(labels, values, scales, "1.1c", [f * lap, (d - 1) * g2, lam * f * f, -mu])
    _add(labels, values, scales, "1.2", [rb * f * f, -f * lap * d, -n * f * f * lam])
    _add(labels, values, scales, "1.3", [f * lap * d, d * (d - 1) * g2, lam * f * f * d, -mu * d])
    _add(labels, values, scales, "1.4", [g2, (lam * (d - n) + rb) / (d * (d - 1)) * f * f, -mu / (d - 1)])
    return ResidualReport(labels, values, scales)


def theorem31_residuals(
    profiles,
    q: int,
    n2: int,
    lam: float,
    xi1: float,
    xi2: float,
    variant: str = "b",
    *,
    n1: int | None = None,
    d: int | None = None,
    norm1: float = -1.0,
    norm2: float = -1.0,
) -> ResidualReport:
    """Residuals of the ODE-level conditions for profiles of xi1, xi2.

    ``profiles`` is anything with ``phi1``, ``f1``, ``phi2``, ``f2`` profile
    attributes (a :class:`WarpSpec` works). Variant ``"a"`` is the general
    reduction with explicit eps-norms ``norm1``, ``norm2``, base dimension
    ``n1`` and fiber dimension ``d`` (both default to ``q``). Variant ``"b"``
    fixes f2 = 1, n1 = d = q and both eps-norms to -1, so f = f1 + 1.
    """
    p1, dp1, ddp1 = profiles.phi1.jet(xi1)
    g1, dg1, ddg1 = profiles.f1.jet(xi1)
    p2, dp2, ddp2 = profiles.phi2.jet(xi2)
    labels, values, scales = [], [], []
    if variant == "b":
        gamma = g1 + 1.0
        if not gamma > 0.0:
            raise DomainError(f"f1 + 1 = {gamma:.6g} must be positive", location=(xi1, xi2))
        _add(labels, values, scales, "Ib", [(q - 2) * gamma * ddp1, -q * p1 * ddg1, -2 * q * dp1 * dg1])
        _add(labels, values, scales, "IIb", [ddp2])
        _add(labels, values, scales, "IIIb",
             [-gamma * p1 * ddp1, (q - 1) * gamma * dp1**2, -q * p1 * dp1 * dg1, -lam * gamma])
        _add(labels, values, scales, "IVb", [(n2 - 1) * dp2**2, -lam])
        _add(labels, values, scales, "Vb", [gamma * p1**2 * ddg1, -(q - 2) * gamma * p1 * dp1 * dg1,
                                             (q - 1) * p1**2 * dg1**2, -lam * gamma**2])
    elif variant == "a":
        n1 = q if n1 is None else n1
        d = q if d is None else d
        g2, dg2, _ = profiles.f2.jet(xi2)
        f = g1 + g2
        if not f > 0.0:
            raise DomainError(f"f = {f:.6g} must be positive", location=(xi1, xi2))
        _add(labels, values, scales, "Ia", [(n1 - 2) * f * ddp1, -p1 * ddg1 * d, -2 * dp1 * dg1 * d])
        _add(labels, values, scales, "IIa", [ddp2])
        _add(labels, values, scales, "IIIa", [norm1 * f * p1 * ddp1, -norm1 * (n1 - 1) * f * dp1**2,
                                               norm1 * p1 * dp1 * dg1 * d, -lam * f])
        _add(labels, values, scales, "IVa", [-norm2 * (n2 - 1) * dp2**2, -lam])
        _add(labels, values, scales, "Va", [-norm1 * f * p1**2 * ddg1, norm1 * (n1 - 2) * f * p1 * dp1 * dg1,
                                             -norm1 * (d - 1) * p1**2 * dg1**2,
                                             -norm2 * (d - 1) * p2**2 * dg2**2, -lam * f * f])
    else:
        raise ParameterError(f"unknown variant {variant!r}; expected 'a' or 'b'")
    return ResidualReport(labels, values, scales, location=(float(xi1), float(xi2)))
