"""Brute-force validation engine.

Simulates the physical model directly: drop users, form the pairwise
Fresnel-phase cross gains, sum them into per-user beam interference, and
count threshold exceedances. Serves as the independent oracle for the
analytical routes.

Reproducibility: trials are grouped into fixed-size blocks; block b of a plan
draws from a counter-based Philox stream keyed (root_seed, b), and block
partials are reduced in block order, so estimates are bit-identical for any
worker count. NFSG_THREADS > 1 runs blocks on a thread pool.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InvalidArgumentError
from .geometry import (OrderedUserSet, PolarPoint, sample_conditional_arrays,
                       sample_user_arrays)
from .pattern import array_response
from .scenario import ScenarioConfig


@dataclass(frozen=True)
class TrialPlan:
    """Deterministic simulation request; identical plans give identical
    estimates."""

    n_trials: int
    root_seed: int
    scenario: ScenarioConfig
    block_size: int = 8192

    def __post_init__(self):
        if self.n_trials < 1:
            raise InvalidArgumentError("n_trials must be >= 1")
        if self.block_size < 1:
            raise InvalidArgumentError("block_size must be >= 1")


@dataclass(frozen=True)
class EstimateWithError:
    value: float
    std_error: float
    n_trials: int


def _block_rng(root_seed: int, block_index: int) -> np.random.Generator:
    key = np.array([root_seed & 0xFFFFFFFFFFFFFFFF, block_index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _blocks(plan: TrialPlan):
    full, rem = divmod(plan.n_trials, plan.block_size)
    sizes = [plan.block_size] * full + ([rem] if rem else [])
    return list(enumerate(sizes))


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("NFSG_THREADS", "1")))
    except ValueError:
        return 1


def _map_blocks(plan: TrialPlan, fn):
    """Apply fn(block_index, size, rng) to every block; results in block order."""
    blocks = _blocks(plan)
    nw = _workers()
    if nw <= 1 or len(blocks) <= 1:
        return [fn(b, size, _block_rng(plan.root_seed, b)) for b, size in blocks]
    with ThreadPoolExecutor(max_workers=nw) as pool:
        futures = [pool.submit(fn, b, size, _block_rng(plan.root_seed, b))
                   for b, size in blocks]
        return [f.result() for f in futures]


def _interference_matrix(theta: np.ndarray, r: np.ndarray,
                         scenario: ScenarioConfig) -> np.ndarray:
    return kernels.interference_sums(theta, r, scenario.array.n_antennas,
                                     scenario.array.wavelength)


def realize_sir(users: OrderedUserSet, scenario: ScenarioConfig,
                exact_distances: bool = False) -> np.ndarray:
    """Per-user SIR for one realization: 1 / sum of cross gains.

    A single user has no interference and reports an infinite SIR. The
    opt-in exact-distance mode rebuilds the gains from raw response-vector
    inner products instead of the Fresnel-phase sum, for cross-validation.
    """
    theta, r = users.as_arrays()
    k = theta.size
    if k == 1:
        return np.array([math.inf])
    if exact_distances:
        vecs = np.stack([array_response(scenario.array, PolarPoint(t, d))
                         for t, d in zip(theta, r)])
        cross = np.abs(np.conj(vecs) @ vecs.T) ** 2
        interference = cross.sum(axis=1) - np.diag(cross)
    else:
        interference = _interference_matrix(theta[None, :], r[None, :], scenario)[0]
    with np.errstate(divide="ignore"):
        return 1.0 / interference


def realize_sinr(users: OrderedUserSet, scenario: ScenarioConfig) -> np.ndarray:
    """Per-user SINR: the interference sum plus the location-dependent noise
    term n_active * sigma^2 / (P_t N zeta r^-alpha)."""
    theta, r = users.as_arrays()
    if theta.size == 1:
        interference = np.zeros(1)
    else:
        interference = _interference_matrix(theta[None, :], r[None, :], scenario)[0]
    noise = np.array([scenario.noise_term(float(d)) for d in r])
    with np.errstate(divide="ignore"):
        return 1.0 / (interference + noise)


def _coverage_counts(sir_kappa: np.ndarray, tau_grid: np.ndarray) -> np.ndarray:
    return (sir_kappa[:, None] > tau_grid[None, :]).sum(axis=0)


def estimate_overall_cp(plan: TrialPlan, tau_grid, kappa: int
                        ) -> list[EstimateWithError]:
    """Empirical P{SIR_kappa > tau} over fresh user sets, one estimate per
    threshold."""
    scn = plan.scenario
    if not 1 <= kappa <= scn.n_active:
        raise InvalidArgumentError("kappa must be in [1, n_active]")
    taus = np.asarray(tau_grid, float)
    if scn.n_active == 1:
        return [EstimateWithError(1.0, 0.0, plan.n_trials) for _ in taus]

    def block(b, size, rng):
        theta, r = sample_user_arrays(scn.sector, scn.n_active, size, rng)
        sir = 1.0 / _interference_matrix(theta, r, scn)[:, kappa - 1]
        return _coverage_counts(sir, taus)

    counts = sum(_map_blocks(plan, block))
    return _binomial_estimates(counts, plan.n_trials)


def _binomial_estimates(counts: np.ndarray, n: int) -> list[EstimateWithError]:
    out = []
    for c in np.atleast_1d(counts):
        p = float(c) / n
        out.append(EstimateWithError(p, math.sqrt(max(p * (1.0 - p), 0.0) / n), n))
    return out


def conditional_interference_samples(plan: TrialPlan, kappa: int,
                                     anchor: PolarPoint) -> np.ndarray:
    """Beam-interference draws for a user pinned at `anchor` with order kappa;
    oracle material for the conditional Laplace transform and CP."""
    scn = plan.scenario
    if scn.n_active == 1:
        return np.zeros(plan.n_trials)

    def block(b, size, rng):
        theta, r = sample_conditional_arrays(kappa, anchor, scn.n_active,
                                             scn.sector, size, rng)
        others = np.delete(np.arange(scn.n_active), kappa - 1)
        gains = kernels.gain_pairs(theta[:, others], r[:, others],
                                   anchor.theta, anchor.r,
                                   scn.array.n_antennas, scn.array.wavelength)
        return gains.sum(axis=1)

    return np.concatenate(_map_blocks(plan, block))


def estimate_conditional_cp(plan: TrialPlan, kappa: int, anchor: PolarPoint,
                            tau_grid, use_sinr: bool = False
                            ) -> list[EstimateWithError]:
    """Empirical conditional coverage for a user pinned at `anchor`."""
    scn = plan.scenario
    taus = np.asarray(tau_grid, float)
    if scn.n_active == 1:
        return [EstimateWithError(1.0, 0.0, plan.n_trials) for _ in taus]
    interference = conditional_interference_samples(plan, kappa, anchor)
    if use_sinr:
        interference = interference + scn.noise_term(anchor.r)
    with np.errstate(divide="ignore"):
        sir = 1.0 / interference
    counts = _coverage_counts(sir, taus)
    return _binomial_estimates(counts, plan.n_trials)


def estimate_network(plan: TrialPlan, tau_grid):
    """One simulation pass giving per-user overall CP and the aggregate ASE.

    Returns (cp, ase): cp[k-1] is the per-threshold estimate list for user k,
    ase the per-threshold aggregate list.
    """
    scn = plan.scenario
    taus = np.asarray(tau_grid, float)
    n_a = scn.n_active
    if n_a == 1:
        cp = [[EstimateWithError(1.0, 0.0, plan.n_trials) for _ in taus]]
        const = scn.sector.n_sectors / (math.pi * scn.sector.cell_radius**2)
        ase = [EstimateWithError(const * math.log2(1.0 + t), 0.0, plan.n_trials)
               for t in taus]
        return cp, ase

    def block(b, size, rng):
        theta, r = sample_user_arrays(scn.sector, n_a, size, rng)
        with np.errstate(divide="ignore"):
            sir = 1.0 / _interference_matrix(theta, r, scn)
        covered = sir[:, :, None] > taus[None, None, :]
        per_user = covered.sum(axis=0)                 # (n_a, n_tau)
        per_trial = covered.sum(axis=1).astype(float)  # (size, n_tau)
        return per_user, per_trial.sum(axis=0), (per_trial**2).sum(axis=0)

    parts = _map_blocks(plan, block)
    per_user = sum(p[0] for p in parts)
    s1 = sum(p[1] for p in parts)
    s2 = sum(p[2] for p in parts)

    n = plan.n_trials
    cp = [_binomial_estimates(per_user[k], n) for k in range(n_a)]
    const = scn.sector.n_sectors / (math.pi * scn.sector.cell_radius**2)
    ase = []
    for i, t in enumerate(taus):
        mean = s1[i] / n
        var = max(s2[i] / n - mean * mean, 0.0)
        scale = const * math.log2(1.0 + float(t))
        ase.append(EstimateWithError(scale * mean, scale * math.sqrt(var / n), n))
    return cp, ase


def estimate_ase(plan: TrialPlan, tau_grid) -> list[EstimateWithError]:
    """Aggregate per-area efficiency estimate per threshold."""
    return estimate_network(plan, tau_grid)[1]
