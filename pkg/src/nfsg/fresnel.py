"""Fresnel integrals C and S.

C(x) = integral of cos(pi t^2 / 2) from 0 to x
S(x) = integral of sin(pi t^2 / 2) from 0 to x

Evaluated by the alternating power series for x < 1.6 and by the auxiliary
functions f, g for x >= 1.6:

    C(x) = 1/2 + f(x) sin(pi x^2/2) - g(x) cos(pi x^2/2)
    S(x) = 1/2 - f(x) cos(pi x^2/2) - g(x) sin(pi x^2/2)

f and g are rational approximations in u = (1.6/x)^2, fit against 50-digit
reference values; max absolute error ~1.4e-13 on [1.6, inf), well inside the
1e-9 contract for x in [0, 100].
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError

_SERIES_CUTOFF = 1.6

# Rational coefficients for f(x) = P_F(u)/Q_F(u) / (pi x), u = (1.6/x)^2.
_PF = np.array([
    1.00000000000286,
    2.5476462019104535,
    3.883680984492454,
    -0.30817294593354005,
    -1.913896070778303,
    0.04279502517493945,
    1.632334884216931,
    0.0662016283376404,
])
_QF = np.array([
    1.0,
    2.5476462034782665,
    3.930062001649735,
    -0.19000519646182107,
    -1.756806549491114,
    -0.02887373317756971,
    1.4823794858666361,
    0.21028979466543032,
])
# g(x) = P_G(u)/Q_G(u) / (pi^2 x^3)
_PG = np.array([
    1.000000000023233,
    4.1755849616485055,
    10.136747971065946,
    8.943165716103051,
    -2.0296099056969794,
    -11.85830522898513,
    -6.336564085668839,
    0.10806895785743491,
])
_QG = np.array([
    1.0,
    4.175584974992102,
    10.36865251522612,
    9.911553800012571,
    0.14817145995977835,
    -10.492387752836327,
    -8.225790120791032,
    -2.069123427782831,
])


def _polyval(coeffs: np.ndarray, u: np.ndarray) -> np.ndarray:
    acc = np.full_like(u, coeffs[-1])
    for c in coeffs[-2::-1]:
        acc = acc * u + c
    return acc


def _series(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # C term k: (-1)^k (pi/2)^(2k) x^(4k+1) / ((2k)! (4k+1))
    # S term k: (-1)^k (pi/2)^(2k+1) x^(4k+3) / ((2k+1)! (4k+3))
    half_pi = np.pi / 2.0
    x2 = x * x
    x4 = x2 * x2
    tc = x.copy()  # k=0 base without the 1/(4k+1) factor
    ts = half_pi * x2 * x
    c = tc.copy()
    s = ts / 3.0
    for k in range(1, 60):
        tc = tc * (-(half_pi * half_pi) * x4) / ((2 * k - 1) * (2 * k))
        ts = ts * (-(half_pi * half_pi) * x4) / ((2 * k) * (2 * k + 1))
        dc = tc / (4 * k + 1)
        ds = ts / (4 * k + 3)
        c += dc
        s += ds
        if np.all(np.abs(dc) < 1e-18) and np.all(np.abs(ds) < 1e-18):
            break
    return c, s


def _auxiliary(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    u = (_SERIES_CUTOFF / x) ** 2
    f = _polyval(_PF, u) / (_polyval(_QF, u) * np.pi * x)
    g = _polyval(_PG, u) / (_polyval(_QG, u) * np.pi**2 * x**3)
    phase = 0.5 * np.pi * x * x
    sp, cp = np.sin(phase), np.cos(phase)
    c = 0.5 + f * sp - g * cp
    s = 0.5 - f * cp - g * sp
    return c, s


def fresnel_integrals(beta):
    """Return (C(beta), S(beta)) for beta >= 0 (scalar or array)."""
    b = np.asarray(beta, dtype=float)
    if np.any(b < 0):
        raise DomainError("fresnel_integrals requires beta >= 0")
    scalar = b.ndim == 0
    b = np.atleast_1d(b)
    c = np.empty_like(b)
    s = np.empty_like(b)
    lo = b < _SERIES_CUTOFF
    if np.any(lo):
        c[lo], s[lo] = _series(b[lo])
    if np.any(~lo):
        c[~lo], s[~lo] = _auxiliary(b[~lo])
    if scalar:
        return float(c[0]), float(s[0])
    return c, s
