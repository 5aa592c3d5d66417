"""Pure-numpy reference implementation of the hot kernels.

Semantics must match nfsg.kernels._fastkern exactly; the compiled module is
preferred at import time when present. All gains use the Fresnel-phase sum

    G = |sum_n exp(j*(2*pi*n*phi + c*n^2))|^2 / N^2,
    phi = (sin(theta_obs) - sin(theta_focal)) / 2,
    c   = (pi*lambda/4) * ((1-sin^2(theta_focal))/r_focal
                           - (1-sin^2(theta_obs))/r_obs),

folded over the symmetric antenna index set: integers {-(N-1)/2..(N-1)/2} for
odd N, half-integers {-(N-1)/2, ..., (N-1)/2} for even N:

    Re = [1 if N odd] + 2*sum_{n>0} cos(c n^2) cos(2 pi n phi)
    Im =                2*sum_{n>0} sin(c n^2) cos(2 pi n phi)
"""

from __future__ import annotations

import numpy as np

# elements per chunk across the antenna axis, keeps temporaries ~30 MB
_CHUNK = 1 << 15


def _positive_offsets(n_antennas: int) -> tuple[np.ndarray, float]:
    n = int(n_antennas)
    if n % 2:
        return np.arange(1.0, (n - 1) // 2 + 1.0), 1.0
    return np.arange(n // 2) + 0.5, 0.0


def _fold_gain(sa, ra, sb, rb, n_antennas, lam):
    n, base = _positive_offsets(n_antennas)
    phi = 0.5 * (sa - sb)
    c = (0.25 * np.pi * lam) * ((1.0 - sb * sb) / rb - (1.0 - sa * sa) / ra)
    ang = np.cos((2.0 * np.pi) * phi[:, None] * n[None, :])
    quad = c[:, None] * (n * n)[None, :]
    re = base + 2.0 * np.einsum("bn,bn->b", np.cos(quad), ang)
    im = 2.0 * np.einsum("bn,bn->b", np.sin(quad), ang)
    nn = float(n_antennas)
    return (re * re + im * im) / (nn * nn)


def gain_pairs(theta_a, r_a, theta_b, r_b, n_antennas, wavelength):
    """Elementwise pattern gain for point pairs (arrays broadcast together)."""
    ta, ra, tb, rb = np.broadcast_arrays(
        np.asarray(theta_a, float), np.asarray(r_a, float),
        np.asarray(theta_b, float), np.asarray(r_b, float),
    )
    shape = ta.shape
    ta, ra, tb, rb = (x.ravel() for x in (ta, ra, tb, rb))
    out = np.empty(ta.size)
    for lo in range(0, ta.size, _CHUNK):
        hi = min(lo + _CHUNK, ta.size)
        out[lo:hi] = _fold_gain(
            np.sin(ta[lo:hi]), ra[lo:hi], np.sin(tb[lo:hi]), rb[lo:hi],
            int(n_antennas), wavelength,
        )
    return out.reshape(shape)


def interference_sums(theta, r, n_antennas, wavelength):
    """Per-user interference sums for batched user sets.

    theta, r: (trials, K) arrays. Returns (trials, K) where entry [t, k] is
    the sum of pattern cross-gains from the other K-1 users of trial t.
    """
    theta = np.asarray(theta, float)
    r = np.asarray(r, float)
    trials, k = theta.shape
    iu, ju = np.triu_indices(k, 1)
    gains = gain_pairs(theta[:, iu], r[:, iu], theta[:, ju], r[:, ju],
                       n_antennas, wavelength)
    out = np.zeros((trials, k))
    for p in range(iu.size):
        out[:, iu[p]] += gains[:, p]
        out[:, ju[p]] += gains[:, p]
    return out


def cf_reduce(gains, weights, t):
    """sum_i w_i * exp(1j * t * g_i) for each t; returns complex array."""
    g = np.asarray(gains, float)
    w = np.asarray(weights, float)
    t = np.asarray(t, float)
    out = np.empty(t.size, complex)
    step = max(1, _CHUNK * 8 // max(1, g.size))
    for lo in range(0, t.size, step):
        hi = min(lo + step, t.size)
        phase = t[lo:hi, None] * g[None, :]
        out[lo:hi] = (np.cos(phase) @ w) + 1j * (np.sin(phase) @ w)
    return out
