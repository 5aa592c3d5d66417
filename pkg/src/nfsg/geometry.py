"""Sector spatial model: uniform binomial point process over one cell sector,
with ordered and conditional distance distributions.

The sector spans angles [-pi/n_sectors, pi/n_sectors] with the base station at
the origin. A fixed number of active users is dropped i.i.d. uniformly over the
sector area, so radial distances have CDF (r/R_c)^2, and users are indexed by
increasing distance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSupportError, DomainError, InvalidArgumentError


@dataclass(frozen=True)
class SectorGeometry:
    """Cell sector: sector count, cell radius, LoS ball radius (meters)."""

    n_sectors: int
    cell_radius: float
    los_radius: float

    def __post_init__(self):
        if self.n_sectors < 1 or int(self.n_sectors) != self.n_sectors:
            raise InvalidArgumentError("n_sectors must be a positive integer")
        if not self.cell_radius > 0:
            raise InvalidArgumentError("cell_radius must be positive")
        if self.cell_radius > self.los_radius:
            raise InvalidArgumentError("cell_radius must not exceed los_radius")

    @property
    def half_width(self) -> float:
        """Angular half-width of the sector, pi / n_sectors."""
        return math.pi / self.n_sectors

    @property
    def spatial_angle_bound(self) -> float:
        """Support bound of the spatial angle (1/2) sin(theta): (1/2) sin(pi/n_sectors)."""
        return 0.5 * math.sin(math.pi / self.n_sectors)


@dataclass(frozen=True)
class PolarPoint:
    """Polar location (theta in radians, r in meters) relative to the array."""

    theta: float
    r: float


@dataclass(frozen=True)
class OrderedUserSet:
    """Active-user locations for one realization, sorted by distance."""

    users: tuple[PolarPoint, ...]

    def __post_init__(self):
        radii = [u.r for u in self.users]
        if any(a > b for a, b in zip(radii, radii[1:])):
            raise InvalidArgumentError("users must be sorted by nondecreasing distance")

    @property
    def n_active(self) -> int:
        return len(self.users)

    def as_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        theta = np.array([u.theta for u in self.users])
        r = np.array([u.r for u in self.users])
        return theta, r

    @classmethod
    def from_arrays(cls, theta, r) -> "OrderedUserSet":
        return cls(tuple(PolarPoint(float(t), float(d)) for t, d in zip(theta, r)))


def _sorted_by_distance(theta: np.ndarray, r: np.ndarray):
    # ties broken by angle, then by draw index, for reproducible ordering
    idx = np.broadcast_to(np.arange(r.shape[-1]), r.shape)
    order = np.lexsort((idx, theta, r), axis=-1)
    return np.take_along_axis(theta, order, axis=-1), np.take_along_axis(r, order, axis=-1)


def sample_user_arrays(sector: SectorGeometry, n_active: int, n_sets: int,
                       rng: np.random.Generator):
    """Draw `n_sets` independent user sets; returns (theta, r) of shape (n_sets, n_active),
    each row sorted by distance."""
    if n_active < 1:
        raise InvalidArgumentError("n_active must be >= 1")
    theta = rng.uniform(-sector.half_width, sector.half_width, (n_sets, n_active))
    r = sector.cell_radius * np.sqrt(rng.random((n_sets, n_active)))
    return _sorted_by_distance(theta, r)


def sample_user_set(sector: SectorGeometry, n_active: int,
                    rng: np.random.Generator) -> OrderedUserSet:
    """One BPP realization: i.i.d. uniform-over-sector users sorted by distance."""
    theta, r = sample_user_arrays(sector, n_active, 1, rng)
    return OrderedUserSet.from_arrays(theta[0], r[0])


def unordered_distance_dist(r, sector: SectorGeometry):
    """(CDF, PDF) of the distance of a random (non-ordered) user: r^2/R_c^2, 2r/R_c^2."""
    r = np.asarray(r, float)
    if np.any(r < 0) or np.any(r > sector.cell_radius):
        raise DomainError("r must lie in [0, cell_radius]")
    q = r / sector.cell_radius
    cdf = q * q
    pdf = 2.0 * r / sector.cell_radius**2
    if cdf.ndim == 0:
        return float(cdf), float(pdf)
    return cdf, pdf


def ordered_distance_dist(kappa: int, r, n_active: int, sector: SectorGeometry):
    """(CDF, PDF) of the distance of the kappa-th closest of n_active users.

    Binomial sums are evaluated in log space so large user counts do not
    overflow the binomial coefficients.
    """
    if not 1 <= kappa <= n_active:
        raise InvalidArgumentError("kappa must be in [1, n_active]")
    r = np.asarray(r, float)
    if np.any(r < 0) or np.any(r > sector.cell_radius):
        raise DomainError("r must lie in [0, cell_radius]")
    scalar = r.ndim == 0
    r = np.atleast_1d(r)
    q = (r / sector.cell_radius) ** 2

    lgn = math.lgamma(n_active + 1)
    cdf = np.ones_like(q)
    interior = (q > 0) & (q < 1)
    qi = q[interior]
    if qi.size:
        acc = np.zeros_like(qi)
        lq = np.log(qi)
        l1q = np.log1p(-qi)
        for u in range(kappa):
            logterm = (lgn - math.lgamma(u + 1) - math.lgamma(n_active - u + 1)
                       + u * lq + (n_active - u) * l1q)
            acc += np.exp(logterm)
        cdf[interior] = 1.0 - acc
    cdf[q <= 0] = 0.0
    cdf = np.clip(cdf, 0.0, 1.0)

    pdf = np.zeros_like(q)
    if qi.size:
        logc = lgn - math.lgamma(kappa + 1) - math.lgamma(n_active - kappa + 1)
        lpdf = (math.log(2.0 * kappa) - np.log(r[interior]) + logc
                + kappa * np.log(qi) + (n_active - kappa) * np.log1p(-qi))
        pdf[interior] = np.exp(lpdf)
    if scalar:
        return float(cdf[0]), float(pdf[0])
    return cdf, pdf


def conditional_distance_dist(side: str, r, r_kappa: float, sector: SectorGeometry):
    """(CDF, PDF) of an interferer's distance given the reference user at r_kappa.

    side="inner": users closer than r_kappa, support [0, r_kappa);
    side="outer": users farther, support [r_kappa, cell_radius].
    """
    if side not in ("inner", "outer"):
        raise InvalidArgumentError("side must be 'inner' or 'outer'")
    rc = sector.cell_radius
    if not 0 <= r_kappa <= rc:
        raise DomainError("r_kappa must lie in [0, cell_radius]")
    if side == "inner" and r_kappa == 0.0:
        raise DegenerateSupportError("inner side empty: r_kappa = 0")
    if side == "outer" and r_kappa == rc:
        raise DegenerateSupportError("outer side empty: r_kappa = cell_radius")
    r = np.asarray(r, float)
    scalar = r.ndim == 0
    if side == "inner":
        if np.any(r < 0) or np.any(r >= r_kappa):
            raise DomainError("inner side requires 0 <= r < r_kappa")
        cdf = (r / r_kappa) ** 2
        pdf = 2.0 * r / r_kappa**2
    else:
        if np.any(r < r_kappa) or np.any(r > rc):
            raise DomainError("outer side requires r_kappa <= r <= cell_radius")
        denom = rc**2 - r_kappa**2
        cdf = (r * r - r_kappa**2) / denom
        pdf = 2.0 * r / denom
    if scalar:
        return float(cdf), float(pdf)
    return cdf, pdf


def conditional_cdf_extended(side: str, r, r_kappa: float, sector: SectorGeometry):
    """Conditional distance CDF extended to the whole line (0 below the support,
    1 above). Used for interval probabilities with clamped limits."""
    rc = sector.cell_radius
    r = np.asarray(r, float)
    if side == "inner":
        rr = np.clip(r, 0.0, r_kappa)
        out = (rr / r_kappa) ** 2
    else:
        rr = np.clip(r, r_kappa, rc)
        out = (rr * rr - r_kappa**2) / (rc**2 - r_kappa**2)
    return float(out) if out.ndim == 0 else out


def spatial_angle_dist(vartheta, sector: SectorGeometry):
    """(CDF, PDF) of the spatial angle (1/2) sin(theta) of a uniform sector angle."""
    bound = sector.spatial_angle_bound
    v = np.asarray(vartheta, float)
    if np.any(np.abs(v) > bound):
        raise DomainError("spatial angle outside the sector support")
    ns = sector.n_sectors
    cdf = (ns / (2.0 * math.pi)) * (np.arcsin(2.0 * v) + math.pi / ns)
    with np.errstate(divide="ignore"):
        pdf = ns / (math.pi * np.sqrt(np.maximum(1.0 - 4.0 * v * v, 0.0)))
    if cdf.ndim == 0:
        return float(cdf), float(pdf)
    return cdf, pdf


def spatial_angle_cdf_extended(vartheta, sector: SectorGeometry):
    """Spatial-angle CDF with arguments clamped to the sector support."""
    bound = sector.spatial_angle_bound
    v = np.clip(np.asarray(vartheta, float), -bound, bound)
    ns = sector.n_sectors
    out = (ns / (2.0 * math.pi)) * (np.arcsin(2.0 * v) + math.pi / ns)
    return float(out) if out.ndim == 0 else out


def sample_conditional_arrays(kappa: int, anchor: PolarPoint, n_active: int,
                              sector: SectorGeometry, n_sets: int,
                              rng: np.random.Generator):
    """Draw user sets conditioned on user `kappa` fixed at `anchor`.

    Returns (theta, r) of shape (n_sets, n_active); column kappa-1 holds the
    anchor, columns before it the sorted inner users, columns after it the
    sorted outer users.
    """
    if not 1 <= kappa <= n_active:
        raise InvalidArgumentError("kappa must be in [1, n_active]")
    rc = sector.cell_radius
    if not (abs(anchor.theta) <= sector.half_width and 0 <= anchor.r <= rc):
        raise InvalidArgumentError("anchor must lie inside the sector")
    n_in, n_out = kappa - 1, n_active - kappa
    if anchor.r == 0.0 and n_in > 0:
        raise DegenerateSupportError("inner users requested with anchor at r = 0")
    if anchor.r == rc and n_out > 0:
        raise DegenerateSupportError("outer users requested with anchor at r = cell_radius")

    theta = rng.uniform(-sector.half_width, sector.half_width, (n_sets, n_active))
    theta[:, kappa - 1] = anchor.theta
    r = np.empty((n_sets, n_active))
    if n_in:
        ri = anchor.r * np.sqrt(rng.random((n_sets, n_in)))
        ti = theta[:, :n_in]
        ti_s, ri_s = _sorted_by_distance(ti, ri)
        theta[:, :n_in] = ti_s
        r[:, :n_in] = ri_s
    r[:, kappa - 1] = anchor.r
    if n_out:
        u = rng.random((n_sets, n_out))
        ro = np.sqrt(anchor.r**2 + u * (rc**2 - anchor.r**2))
        to = theta[:, kappa:]
        to_s, ro_s = _sorted_by_distance(to, ro)
        theta[:, kappa:] = to_s
        r[:, kappa:] = ro_s
    return theta, r


def sample_conditional_user_set(kappa: int, anchor: PolarPoint, n_active: int,
                                sector: SectorGeometry,
                                rng: np.random.Generator) -> OrderedUserSet:
    """One conditioned realization with the anchor at ordered position kappa."""
    theta, r = sample_conditional_arrays(kappa, anchor, n_active, sector, 1, rng)
    return OrderedUserSet.from_arrays(theta[0], r[0])
