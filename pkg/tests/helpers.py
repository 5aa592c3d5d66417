"""Shared oracle helpers for the test suite.

These deliberately re-derive quantities through independent routes (direct
sampling, quadrature of defining integrals, brute enumeration) so the library
code under test never checks itself against itself.
"""

import numpy as np

from nfsg.fresnel import fresnel_integrals
from nfsg.pattern import angular_gain


def mlap_cross_gains(scn, theta_f, r_f, theta_o, r_o):
    """Vectorized quantized-pattern gain ghat(observer; focal).

    Re-implements the level construction directly from the defining formulas
    (depth interval, asymptotic floor, mid-lobe levels) for use as a bulk
    Monte Carlo oracle.
    """
    arr, ml = scn.array, scn.mlap
    n = arr.n_antennas
    m = ml.n_levels
    lam = arr.wavelength
    d = arr.spacing
    delta = ml.delta
    theta_f, r_f, theta_o, r_o = np.broadcast_arrays(theta_f, r_f, theta_o, r_o)
    g_shared = np.array(
        [delta / 2.0]
        + [delta / 2.0 * float(angular_gain(n, (2 * i - 1) / (2.0 * n)))
           for i in range(2, m + 1)]
        + [0.0])
    s2f = np.sin(theta_f) ** 2
    a_f = n * n * d * d * (1.0 - s2f) / (2.0 * lam)
    limit = a_f / ml.beta_gamma**2
    d_left = r_f * limit / (limit + r_f)
    with np.errstate(divide="ignore"):
        d_right = np.where(r_f < limit,
                           r_f * limit / np.maximum(limit - r_f, 1e-300), np.inf)
    beta_inf = np.sqrt(a_f / r_f)
    c, s = fresnel_integrals(beta_inf.ravel())
    prof = ((c * c + s * s)
            / np.maximum(beta_inf.ravel(), 1e-300) ** 2).reshape(beta_inf.shape)
    g0 = (delta / 2.0) * np.where(beta_inf < 1e-6, 1.0, prof)
    phi = np.abs(0.5 * (np.sin(theta_o) - np.sin(theta_f)))
    idx = np.ceil(phi * n).astype(int)
    np.clip(idx, 2, m + 1, out=idx)
    out = np.zeros_like(phi)
    mask_side = (phi > 1.0 / n) & (idx <= m)
    out[mask_side] = g_shared[idx[mask_side] - 1]
    main = phi <= 1.0 / n
    inside = main & (r_o > d_left) & (r_o < d_right)
    beyond = main & np.isfinite(d_right) & (r_o >= d_right)
    out[inside] = delta / 2.0
    out[beyond] = g0[beyond]
    return out


def mlap_interference_on_anchor(scn, anchor, theta, r, kappa):
    """Quantized-model interference on the pinned user for conditioned draws
    (theta, r) of shape (n, n_active); the anchor's own pattern is evaluated
    at every interferer location."""
    n = theta.shape[0]
    obs = np.delete(np.arange(scn.n_active), kappa - 1)
    return mlap_cross_gains(scn, np.full((n, 1), anchor.theta),
                            np.full((n, 1), anchor.r),
                            theta[:, obs], r[:, obs]).sum(axis=1)


def mlap_network_interference(scn, theta, r):
    """Quantized-model interference matrix for (trials, n_active) draws."""
    trials, k = theta.shape
    out = np.zeros((trials, k))
    for kk in range(k):
        o = np.delete(np.arange(k), kk)
        out[:, kk] = mlap_cross_gains(scn, theta[:, kk][:, None],
                                      r[:, kk][:, None],
                                      theta[:, o], r[:, o]).sum(axis=1)
    return out


def ks_distance(samples, cdf):
    """Kolmogorov-Smirnov distance between sorted draws and a CDF callable."""
    x = np.sort(np.asarray(samples))
    n = x.size
    f = cdf(x)
    up = np.max(np.arange(1, n + 1) / n - f)
    dn = np.max(f - np.arange(0, n) / n)
    return max(up, dn)


def two_level_sum_cdf(values, probs, counts):
    """Exact CDF of a sum of independent finite discrete variables.

    values/probs describe one variable's support; counts is how many i.i.d.
    copies enter the sum. Returns (atoms, cdf_at_atoms) with the CDF
    right-continuous.
    """
    atoms = {0.0: 1.0}
    for _ in range(counts):
        nxt = {}
        for a, pa in atoms.items():
            for v, pv in zip(values, probs):
                key = a + v
                nxt[key] = nxt.get(key, 0.0) + pa * pv
        atoms = nxt
    xs = np.array(sorted(atoms))
    ps = np.array([atoms[x] for x in xs])
    return xs, np.cumsum(ps)
