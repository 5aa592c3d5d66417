# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels: Fresnel-phase pattern gains and CF reductions.

Same contracts as nfsg.kernels._reference. The per-pair antenna sum is folded
over the symmetric index and driven by rotation/Chebyshev recurrences so the
inner loop is trig-free.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin

cnp.import_array()

cdef double PI = 3.141592653589793238462643383279503
cdef double TWO_PI = 6.283185307179586476925286766559006


cdef inline double _pair_gain(double sa, double ra, double sb, double rb,
                              int n_ant, double lam) noexcept nogil:
    # Folded over positive offsets: integers 1..(N-1)/2 plus a center element
    # for odd N, half-integers 1/2..(N-1)/2 for even N. Per-step recurrences:
    #   cos(n a): Chebyshev with multiplier 2 cos(a)
    #   exp(j c n^2): z *= rot, rot *= exp(j 2c)  (n^2 increments are linear)
    cdef double phi = 0.5 * (sa - sb)
    cdef double c = (0.25 * PI * lam) * ((1.0 - sb * sb) / rb - (1.0 - sa * sa) / ra)
    cdef double a = TWO_PI * phi
    cdef double ca = cos(a)
    cdef bint odd = n_ant & 1
    cdef int npairs = (n_ant - 1) // 2 if odd else n_ant // 2
    cdef double base, cos_prev, cos_cur, zr, zi, rr, ri
    if odd:
        base = 1.0
        cos_prev = 1.0
        cos_cur = ca
        zr = cos(c); zi = sin(c)
        rr = cos(3.0 * c); ri = sin(3.0 * c)
    else:
        base = 0.0
        cos_cur = cos(0.5 * a)
        cos_prev = cos_cur
        zr = cos(0.25 * c); zi = sin(0.25 * c)
        rr = cos(2.0 * c); ri = sin(2.0 * c)
    cdef double sr = cos(2.0 * c), si = sin(2.0 * c)
    cdef double sre = 0.0, sim = 0.0
    cdef double tmp, nn
    cdef int n = 1
    while True:
        sre += zr * cos_cur
        sim += zi * cos_cur
        if n == npairs:
            break
        tmp = 2.0 * ca * cos_cur - cos_prev
        cos_prev = cos_cur
        cos_cur = tmp
        tmp = zr * rr - zi * ri
        zi = zr * ri + zi * rr
        zr = tmp
        tmp = rr * sr - ri * si
        ri = rr * si + ri * sr
        rr = tmp
        n += 1
    sre = base + 2.0 * sre
    sim = 2.0 * sim
    nn = <double> n_ant
    return (sre * sre + sim * sim) / (nn * nn)


def gain_pairs(theta_a, r_a, theta_b, r_b, n_antennas, wavelength):
    """Elementwise pattern gain for point pairs (arrays broadcast together)."""
    ta, ra, tb, rb = np.broadcast_arrays(
        np.asarray(theta_a, float), np.asarray(r_a, float),
        np.asarray(theta_b, float), np.asarray(r_b, float),
    )
    shape = ta.shape
    cdef cnp.ndarray[cnp.float64_t, ndim=1] fa = np.ascontiguousarray(ta, float).ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] fra = np.ascontiguousarray(ra, float).ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] fb = np.ascontiguousarray(tb, float).ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] frb = np.ascontiguousarray(rb, float).ravel()
    cdef Py_ssize_t m = fa.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(m)
    cdef int nant = int(n_antennas)
    cdef double lam = wavelength
    cdef Py_ssize_t i
    with nogil:
        for i in range(m):
            out[i] = _pair_gain(sin(fa[i]), fra[i], sin(fb[i]), frb[i], nant, lam)
    return out.reshape(shape)


def interference_sums(theta, r, n_antennas, wavelength):
    """Per-user interference sums for batched user sets; see reference kernel."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] th = np.ascontiguousarray(theta, float)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] rr = np.ascontiguousarray(r, float)
    cdef Py_ssize_t trials = th.shape[0]
    cdef Py_ssize_t k = th.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.zeros((trials, k))
    cdef cnp.ndarray[cnp.float64_t, ndim=2] sa = np.sin(th)
    cdef int nant = int(n_antennas)
    cdef double lam = wavelength
    cdef Py_ssize_t t, i, j
    cdef double g
    with nogil:
        for t in range(trials):
            for i in range(k):
                for j in range(i + 1, k):
                    g = _pair_gain(sa[t, i], rr[t, i], sa[t, j], rr[t, j], nant, lam)
                    out[t, i] += g
                    out[t, j] += g
    return out


def cf_reduce(gains, weights, t):
    """sum_i w_i * exp(1j * t * g_i) for each t; returns complex array."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] g = np.ascontiguousarray(gains, float)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] w = np.ascontiguousarray(weights, float)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] tt = np.ascontiguousarray(t, float)
    cdef Py_ssize_t nt = tt.shape[0]
    cdef Py_ssize_t ng = g.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] outr = np.empty(nt)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] outi = np.empty(nt)
    cdef Py_ssize_t a, b
    cdef double accr, acci, ph, tv
    with nogil:
        for a in range(nt):
            accr = 0.0
            acci = 0.0
            tv = tt[a]
            for b in range(ng):
                ph = tv * g[b]
                accr += w[b] * cos(ph)
                acci += w[b] * sin(ph)
            outr[a] = accr
            outi[a] = acci
    return outr + 1j * outi
