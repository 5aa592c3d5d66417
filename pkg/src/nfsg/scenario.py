"""Full experiment description: array + sector + load, power and noise."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import InvalidArgumentError
from .geometry import SectorGeometry
from .pattern import ArrayConfig, MlapConfig


@dataclass(frozen=True)
class ScenarioConfig:
    array: ArrayConfig
    sector: SectorGeometry
    n_active: int
    pathloss_exponent: float
    tx_power: float
    noise_power: float
    mlap: MlapConfig

    def __post_init__(self):
        if self.n_active < 1:
            raise InvalidArgumentError("n_active must be >= 1")
        if self.pathloss_exponent < 2:
            raise InvalidArgumentError("pathloss_exponent must be >= 2")
        if not self.tx_power > 0:
            raise InvalidArgumentError("tx_power must be positive")
        if self.noise_power < 0:
            raise InvalidArgumentError("noise_power must be >= 0")
        if self.mlap.n_levels > self.array.n_antennas // 2:
            raise InvalidArgumentError("mlap.n_levels must not exceed floor(n_antennas/2)")

    @property
    def ref_pathloss(self) -> float:
        """(lambda / 4 pi)^2, derived from the array so it can never disagree
        with the carrier frequency."""
        return (self.array.wavelength / (4.0 * math.pi)) ** 2

    def noise_term(self, r_k: float) -> float:
        """Noise contribution in the SINR denominator for a user at r_k:
        N_a sigma^2 / (P_t N zeta r_k^-alpha)."""
        signal = (self.tx_power * self.array.n_antennas * self.ref_pathloss
                  * r_k ** (-self.pathloss_exponent))
        return self.n_active * self.noise_power / signal

    def with_(self, **changes) -> "ScenarioConfig":
        return replace(self, **changes)


def thermal_noise_power(bandwidth_hz: float, noise_figure_db: float) -> float:
    """Receiver noise power in watts: -174 dBm/Hz + 10 log10(B) + F."""
    dbm = -174.0 + 10.0 * math.log10(bandwidth_hz) + noise_figure_db
    return 10.0 ** ((dbm - 30.0) / 10.0)


def default_scenario() -> ScenarioConfig:
    """Baseline configuration: N=256 at 28 GHz, 3 sectors of 150 m, 15 active
    users, alpha=2, 10 W, noiseless, 10-level pattern with beta_gamma=1.3."""
    return ScenarioConfig(
        array=ArrayConfig(n_antennas=256, carrier_freq=28e9),
        sector=SectorGeometry(n_sectors=3, cell_radius=150.0, los_radius=150.0),
        n_active=15,
        pathloss_exponent=2.0,
        tx_power=10.0,
        noise_power=0.0,
        mlap=MlapConfig(n_levels=10, beta_gamma=1.3),
    )
