"""Near-field array physics: response vectors, polar-domain beam patterns,
beam-depth geometry, and the multi-level quantized pattern.

A half-wavelength ULA with an odd number of elements is centered at the
origin. A beam focused on (theta_f, r_f) produces, at an observation point
(theta, r), the normalized gain

    G = |sum_n exp(j Phi_n)|^2 / N^2,
    Phi_n = 2*pi*n*phi + c*n^2,
    phi = (sin theta - sin theta_f)/2,
    c = (pi*lambda/4)*((1-sin^2 theta_f)/r_f - (1-sin^2 theta)/r),

which peaks at 1 on the focal point, collapses to the angle-only squared
Dirichlet kernel in the far field, and along the focal angle reduces to a
Fresnel-integral profile whose -gamma-dB extent is the beam depth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import kernels
from .errors import DomainError, InvalidArgumentError
from .fresnel import fresnel_integrals
from .geometry import PolarPoint

C_LIGHT = 299792458.0


@dataclass(frozen=True)
class ArrayConfig:
    """Half-wavelength ULA. Wavelength, spacing and aperture derive from the
    carrier frequency and are never set independently."""

    n_antennas: int
    carrier_freq: float

    def __post_init__(self):
        if self.n_antennas < 3:
            raise InvalidArgumentError("n_antennas must be >= 3")
        if not self.carrier_freq > 0:
            raise InvalidArgumentError("carrier_freq must be positive")

    @property
    def wavelength(self) -> float:
        return C_LIGHT / self.carrier_freq

    @property
    def spacing(self) -> float:
        return 0.5 * self.wavelength

    @property
    def aperture(self) -> float:
        return (self.n_antennas - 1) * self.spacing

    @property
    def element_offsets(self) -> np.ndarray:
        """Element positions in units of the spacing, symmetric about the
        center (integers for odd N, half-integers for even N)."""
        return np.arange(self.n_antennas, dtype=float) - (self.n_antennas - 1) / 2.0

    @property
    def rayleigh_distance(self) -> float:
        """2 D^2 / lambda: beyond this the planar-wavefront model suffices."""
        return 2.0 * self.aperture**2 / self.wavelength

    @property
    def fresnel_distance(self) -> float:
        """0.62 sqrt(D^3/lambda): inner edge of the radiative near field."""
        return 0.62 * math.sqrt(self.aperture**3 / self.wavelength)


@dataclass(frozen=True)
class MlapConfig:
    """Multi-level pattern parameters: lobe count M, -3 dB depth constant
    beta_gamma, and the roll-off compensation factor delta."""

    n_levels: int
    beta_gamma: float = 1.3
    delta: float = 1.0 / math.sqrt(2.0)

    def __post_init__(self):
        if self.n_levels < 1:
            raise InvalidArgumentError("n_levels must be >= 1")
        if not self.beta_gamma > 0:
            raise InvalidArgumentError("beta_gamma must be positive")


@dataclass(frozen=True)
class BeamDepthInterval:
    """Distance interval around the focal point where the distance-cut gain
    stays above the gamma-dB level. d_right is None when the interval is
    unbounded (focal distance at or beyond focal_limit)."""

    d_left: float
    d_right: float | None
    focal_limit: float

    @property
    def unbounded(self) -> bool:
        return self.d_right is None

    @property
    def right_or_inf(self) -> float:
        return math.inf if self.d_right is None else self.d_right

    @property
    def depth(self) -> float:
        return self.right_or_inf - self.d_left


@dataclass(frozen=True)
class MlapLevels:
    """Quantized gains g_0..g_{M+1} built for one focal point.

    gains[0] is the beyond-depth mainlobe level g_1 * distance_floor,
    gains[1] the in-depth mainlobe level, gains[m] the m-th lobe level, and
    gains[M+1] is exactly 0.
    """

    gains: tuple[float, ...]
    focal: PolarPoint
    depth: BeamDepthInterval = field(compare=False)
    distance_floor: float = field(compare=False)

    @property
    def n_levels(self) -> int:
        return len(self.gains) - 2


class MStar(NamedTuple):
    m: int
    saturated: bool


def array_response(cfg: ArrayConfig, p: PolarPoint) -> np.ndarray:
    """Unit-norm response vector from exact element distances.

    Element n carries phase -(2*pi/lambda)*(r_n - r) with
    r_n = sqrt(r^2 + n^2 d^2 - 2 r n d sin(theta)); the difference is formed
    as (n^2 d^2 - 2 r n d sin(theta)) / (r_n + r) to avoid cancellation at
    large r.
    """
    if not p.r > 0:
        raise DomainError("array_response requires r > 0")
    n = cfg.element_offsets
    d = cfg.spacing
    a = n * n * d * d - 2.0 * p.r * n * d * math.sin(p.theta)
    rn = np.sqrt(p.r * p.r + a)
    delta_r = a / (rn + p.r)
    phase = -(2.0 * math.pi / cfg.wavelength) * delta_r
    return np.exp(1j * phase) / math.sqrt(cfg.n_antennas)


def exact_gain(cfg: ArrayConfig, obs: PolarPoint, focal: PolarPoint) -> float:
    """Fresnel-phase pattern gain of a beam focused on `focal`, seen at `obs`."""
    if not (obs.r > 0 and focal.r > 0):
        raise DomainError("exact_gain requires r > 0 for both points")
    g = kernels.gain_pairs(obs.theta, obs.r, focal.theta, focal.r,
                           cfg.n_antennas, cfg.wavelength)
    return float(g)


def exact_gain_many(cfg: ArrayConfig, theta_obs, r_obs, focal: PolarPoint):
    """Vectorized exact_gain over arrays of observation points."""
    return kernels.gain_pairs(theta_obs, r_obs, focal.theta, focal.r,
                              cfg.n_antennas, cfg.wavelength)


def angular_gain(n_antennas: int, phi):
    """Squared Dirichlet kernel sin^2(pi N phi) / (N sin(pi phi))^2.

    Removable singularities at integer phi evaluate to 1 via the series
    1 - (N^2-1)(pi e)^2/6 for |e| < 1e-6, e the distance to the nearest
    integer.
    """
    n = int(n_antennas)
    phi = np.asarray(phi, float)
    scalar = phi.ndim == 0
    phi = np.atleast_1d(phi)
    e = phi - np.round(phi)
    ratio = np.empty_like(e)
    tiny = np.abs(e) < 1e-6
    et = e[tiny]
    ratio[tiny] = 1.0 - (n * n - 1) * (math.pi * et) ** 2 / 6.0
    eb = e[~tiny]
    ratio[~tiny] = np.sin(math.pi * n * eb) / (n * np.sin(math.pi * eb))
    out = ratio * ratio
    return float(out[0]) if scalar else out


def ff_gain(cfg: ArrayConfig, theta: float, theta_focal: float) -> float:
    """Far-field (angle-only) pattern; identical to angular_gain at the
    spatial-angle offset (sin theta - sin theta_focal)/2."""
    phi = 0.5 * (math.sin(theta) - math.sin(theta_focal))
    return float(angular_gain(cfg.n_antennas, phi))


def _beta(cfg: ArrayConfig, theta_focal: float, r_focal: float, r_obs: float) -> float:
    s2 = math.sin(theta_focal) ** 2
    arg = (cfg.n_antennas**2 * cfg.spacing**2 * (1.0 - s2) / (2.0 * cfg.wavelength)
           * abs(1.0 / r_focal - 1.0 / r_obs))
    return math.sqrt(arg)


def _fresnel_profile(beta: float) -> float:
    # (C(b)^2 + S(b)^2)/b^2 with the b -> 0 limit handled by series
    if beta < 1e-6:
        return 1.0 - math.pi**2 * beta**4 / 45.0
    c, s = fresnel_integrals(beta)
    return (c * c + s * s) / (beta * beta)


def distance_gain(cfg: ArrayConfig, theta_focal: float, r_focal: float,
                  r_obs: float) -> float:
    """Gain along the focal angle as a function of observation distance only:
    |(C(beta) + j S(beta))/beta|^2 with beta the distance-mismatch argument."""
    if not (r_focal > 0 and r_obs > 0):
        raise DomainError("distance_gain requires positive distances")
    return _fresnel_profile(_beta(cfg, theta_focal, r_focal, r_obs))


def asymptotic_gain(cfg: ArrayConfig, theta_focal: float, r_focal: float) -> float:
    """Limit of distance_gain as the observation distance grows without bound."""
    if not r_focal > 0:
        raise DomainError("asymptotic_gain requires r_focal > 0")
    s2 = math.sin(theta_focal) ** 2
    beta_inf = math.sqrt(cfg.n_antennas**2 * cfg.spacing**2 * (1.0 - s2)
                         / (2.0 * cfg.wavelength * r_focal))
    return _fresnel_profile(beta_inf)


def beam_depth(cfg: ArrayConfig, theta_focal: float, r_focal: float,
               beta_gamma: float) -> BeamDepthInterval:
    """Distance interval where the distance-cut gain exceeds the gamma level
    G_D(beta_gamma).

    The interval endpoints satisfy |1/r_focal - 1/r_end| = beta_gamma^2 / A
    with A = N^2 d^2 (1-sin^2 theta)/(2 lambda), so the depth scale is
    A / beta_gamma^2; unbounded on the right once r_focal reaches it.
    """
    if not r_focal > 0:
        raise DomainError("beam_depth requires r_focal > 0")
    if not beta_gamma > 0:
        raise DomainError("beam_depth requires beta_gamma > 0")
    s2 = math.sin(theta_focal) ** 2
    limit = (cfg.n_antennas**2 * cfg.spacing**2 * (1.0 - s2)
             / (2.0 * cfg.wavelength * beta_gamma**2))
    left = r_focal * limit / (limit + r_focal)
    if r_focal < limit:
        right = r_focal * limit / (limit - r_focal)
    else:
        right = None
    return BeamDepthInterval(d_left=left, d_right=right, focal_limit=limit)


def solve_beta_gamma(gamma_db: float) -> float:
    """Root of G_D(beta) = 10^(gamma_db/10) on the monotone head of the
    Fresnel profile (gamma_db in (-9, 0))."""
    if not -9.0 < gamma_db < 0.0:
        raise DomainError("gamma_db must lie in (-9, 0)")
    target = 10.0 ** (gamma_db / 10.0)
    lo, hi = 1e-9, 2.2
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _fresnel_profile(mid) > target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def three_level_distance_gain(cfg: ArrayConfig, theta_focal: float, r_focal: float,
                              r_obs: float, beta_gamma: float) -> float:
    """Three-level quantization of the distance cut: 1 inside the beam-depth
    interval, the asymptotic floor beyond it, 0 below it. Diagnostic pattern
    only; the composite multi-level pattern scales its mainlobe differently."""
    interval = beam_depth(cfg, theta_focal, r_focal, beta_gamma)
    if interval.d_left < r_obs < interval.right_or_inf:
        return 1.0
    if not interval.unbounded and r_obs >= interval.d_right:
        return asymptotic_gain(cfg, theta_focal, r_focal)
    return 0.0


def mlap_levels(cfg: ArrayConfig, mlap: MlapConfig, focal: PolarPoint) -> MlapLevels:
    """Quantized gain levels for a beam focused on `focal`.

    g_1 = (delta/2) * G_A(0), g_m = (delta/2) * G_A((2m-1)/(2N)) for m >= 2,
    g_0 = g_1 * distance floor, g_{M+1} = 0.
    """
    m = mlap.n_levels
    n = cfg.n_antennas
    if m > n // 2:
        raise InvalidArgumentError("n_levels must not exceed floor(n_antennas/2)")
    half = mlap.delta / 2.0
    g1 = half  # G_A(0) = 1
    gm = [half * float(angular_gain(n, (2 * i - 1) / (2.0 * n))) for i in range(2, m + 1)]
    floor = asymptotic_gain(cfg, focal.theta, focal.r)
    gains = (g1 * floor, g1, *gm, 0.0)
    depth = beam_depth(cfg, focal.theta, focal.r, mlap.beta_gamma)
    return MlapLevels(gains=gains, focal=focal, depth=depth, distance_floor=floor)


def mlap_level_index(cfg: ArrayConfig, levels: MlapLevels, obs: PolarPoint) -> int:
    """Index into levels.gains selected by the piecewise pattern."""
    n = cfg.n_antennas
    m_max = levels.n_levels
    phi = abs(0.5 * (math.sin(obs.theta) - math.sin(levels.focal.theta)))
    if phi <= 1.0 / n:
        depth = levels.depth
        if not depth.unbounded and obs.r >= depth.d_right:
            return 0
        if depth.d_left < obs.r < depth.right_or_inf:
            return 1
        return m_max + 1
    m = max(2, int(math.ceil(phi * n)))
    return m if m <= m_max else m_max + 1


def mlap_gain(cfg: ArrayConfig, levels: MlapLevels, mlap: MlapConfig,
              obs: PolarPoint) -> float:
    """Multi-level pattern gain at an observation point."""
    if levels.n_levels != mlap.n_levels:
        raise InvalidArgumentError("levels were built for a different n_levels")
    return levels.gains[mlap_level_index(cfg, levels, obs)]


def mlap_level_index_many(cfg: ArrayConfig, levels: MlapLevels, theta_obs, r_obs):
    """Vectorized level selection over arrays of observation points."""
    n = cfg.n_antennas
    m_max = levels.n_levels
    phi = np.abs(0.5 * (np.sin(np.asarray(theta_obs, float))
                        - math.sin(levels.focal.theta)))
    r = np.asarray(r_obs, float)
    idx = np.ceil(phi * n).astype(int)
    np.clip(idx, 2, m_max + 1, out=idx)
    main = phi <= 1.0 / n
    depth = levels.depth
    inside = main & (r > depth.d_left) & (r < depth.right_or_inf)
    if depth.unbounded:
        beyond = np.zeros_like(main)
    else:
        beyond = main & (r >= depth.d_right)
    below = main & ~inside & ~beyond
    idx[inside] = 1
    idx[beyond] = 0
    idx[below] = m_max + 1
    return idx


def mlap_gain_many(cfg: ArrayConfig, levels: MlapLevels, theta_obs, r_obs):
    """Vectorized multi-level gain over arrays of observation points."""
    gains = np.asarray(levels.gains)
    return gains[mlap_level_index_many(cfg, levels, theta_obs, r_obs)]


def m_star(cfg: ArrayConfig, mlap: MlapConfig, tau: float) -> MStar:
    """Smallest lobe count whose reference level drops below 1/tau.

    Levels are scored by the uniform mid-lobe rule
    (delta/2) * G_A((2m-1)/(2N)) for every m >= 1, i.e. the mainlobe counts
    at its half-offset midpoint, so low thresholds resolve to m = 1. Capped
    at floor(N/2); `saturated` marks a capped result.
    """
    if not tau > 0:
        raise DomainError("tau must be positive")
    n = cfg.n_antennas
    cap = n // 2
    inv = 1.0 / tau
    half = mlap.delta / 2.0
    for m in range(1, cap + 1):
        if half * float(angular_gain(n, (2 * m - 1) / (2.0 * n))) < inv:
            return MStar(m, False)
    return MStar(cap, True)
