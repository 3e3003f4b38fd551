"""Pure-Python reference kernels.

Same signatures and results as the compiled ``_ckernels`` module; selected
automatically when the extension is not importable.
"""

import numpy as np

OMEGA_SYSTEM = 0
SECOND_ORDER_SYSTEM = 1

# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)
_E = tuple(b5 - b4 for b5, b4 in zip(_B5, _B4))


def family_rhs(system, y, q, m, rate_factor):
    """Right-hand side of the omega system (beta, gamma, omega) or the
    second-order system (beta, gamma, beta', gamma')."""
    if system == OMEGA_SYSTEM:
        beta, gamma, omega = y[0], y[1], y[2]
        den = (q - 2.0) * omega * omega - 2.0 * q * omega + q
        return np.array(
            [
                2.0 * m * q * omega * (omega - 1.0) / den,
                m * gamma * ((q - 2.0) * omega * omega - q) / (beta * den),
                rate_factor * m * (q + 2.0 * q * omega - (3.0 * q - 2.0) * omega * omega) / beta,
            ]
        )
    beta, gamma, bd, gd = y[0], y[1], y[2], y[3]
    half = 0.5 * q * m * m
    bdd = ((q - 1.0) * gamma * bd * bd - q * beta * bd * gd - half * gamma) / (gamma * beta)
    gdd = (half * gamma * gamma + (q - 2.0) * beta * gamma * bd * gd - (q - 1.0) * beta * beta * gd * gd) / (
        gamma * beta * beta
    )
    return np.array([bd, gd, bdd, gdd])


def dp54_step(system, y, h, q, m, rate_factor, rtol, atol):
    """One Dormand-Prince step. Returns ``(y_new, err)`` where ``err`` is the
    max-norm of the embedded error scaled by ``atol + rtol*|y|``."""
    y = np.asarray(y, dtype=float)
    k = []
    for stage in range(7):
        yi = y.copy()
        for j, a in enumerate(_A[stage]):
            yi += h * a * k[j]
        k.append(family_rhs(system, yi, q, m, rate_factor))
    y_new = y + h * sum(b * ki for b, ki in zip(_B5, k))
    e = h * sum(c * ki for c, ki in zip(_E, k))
    scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
    err = float(np.max(np.abs(e) / scale))
    if not np.all(np.isfinite(y_new)):
        err = float("inf")
    return y_new, err


def christoffel_contract(ginv, dg):
    """Gamma^k_ij = 1/2 g^kl (d_i g_jl + d_j g_il - d_l g_ij), with dg[l, i, j] = d_l g_ij."""
    lowered = 0.5 * (dg + dg.transpose(1, 0, 2) - dg.transpose(1, 2, 0))
    return np.einsum("kl,ijl->kij", ginv, lowered)


def ricci_contract(gamma, dgamma):
    """Ricci tensor from Gamma[k, i, j] and dGamma[m, k, i, j] = d_m Gamma^k_ij."""
    term1 = np.einsum("kkij->ij", dgamma)
    term2 = np.einsum("ikkj->ij", dgamma)
    trace = np.einsum("kkl->l", gamma)
    term3 = np.einsum("l,lij->ij", trace, gamma)
    term4 = np.einsum("kil,lkj->ij", gamma, gamma)
    return term1 - term2 + term3 - term4
