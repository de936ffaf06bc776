"""Stochastic resistive memory cell model.

Cells are high-resistance-state (HRS) devices with lognormal resistance
spread; a configurable fraction is stuck in the low-resistance ON state.
Read current follows Ohm's law with a semi-exponential voltage nonlinearity
(fixed factor per 100 mV step) and Arrhenius-style thermal activation.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

BOLTZMANN_EV = 8.617333262e-5
"""Boltzmann constant in eV/K."""

# exponent step of the voltage nonlinearity
_VOLT_STEP = 0.1


class CellState(enum.Enum):
    HRS = "hrs"
    STUCK_ON = "stuck_on"


@dataclass(frozen=True)
class DeviceParams:
    """Fabrication-time distribution parameters for one cell population.

    :param mu_ln_r: mean of ln(resistance) for functional HRS cells.  The
        default centers the distribution at sqrt(1e5 * 1e6) ohm, the geometric
        middle of the nominal HRS decade.
    :param sigma_ln_r: std of ln(resistance).  The default puts ~95% of HRS
        samples inside [100 kOhm, 1 MOhm].
    :param stuck_on_prob: probability that a cell is stuck in the ON state.
    :param lrs_range: (low, high) resistance bounds for stuck-ON cells,
        sampled uniformly.
    :param nonlin_alpha: current multiplication factor per 100 mV of READ
        voltage above ref_voltage.
    :param activation_energy: thermal activation energy in eV.
    :param ref_voltage: READ voltage at which the nonlinearity factor is 1.
    :param ref_temperature: temperature at which the thermal factor is 1.
    """

    mu_ln_r: float = math.log(316227.7660168379)
    sigma_ln_r: float = 0.5874
    stuck_on_prob: float = 0.0
    lrs_range: tuple[float, float] = (1e3, 1e4)
    nonlin_alpha: float = 2.0
    activation_energy: float = 0.1
    ref_voltage: float = 0.1
    ref_temperature: float = 300.0

    def __post_init__(self):
        if not 0.0 <= self.stuck_on_prob <= 1.0:
            raise ValueError("stuck_on_prob must be in [0, 1]")
        lo, hi = self.lrs_range
        if not (0.0 < lo <= hi):
            raise ValueError("lrs_range must satisfy 0 < low <= high")
        if self.sigma_ln_r < 0.0:
            raise ValueError("sigma_ln_r must be non-negative")
        if self.nonlin_alpha <= 0.0:
            raise ValueError("nonlin_alpha must be positive")
        if self.ref_voltage <= 0.0 or self.ref_temperature <= 0.0:
            raise ValueError("reference voltage and temperature must be positive")


@dataclass(frozen=True)
class Environment:
    """Operating conditions for a READ.

    :param read_voltage: nominal READ voltage in volts, must be in (0, 0.5].
    :param temperature: ambient temperature in kelvin, must be in [275, 450].
    :param supply_sigma_frac: 1-sigma fractional supply variation; the
        effective voltage of a read is read_voltage * (1 + N(0, sigma^2)).
    :param temp_jitter: half-width in kelvin of the uniform per-cell
        temperature fluctuation.
    """

    read_voltage: float = 0.1
    temperature: float = 300.0
    supply_sigma_frac: float = 0.0
    temp_jitter: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.read_voltage <= 0.5:
            raise ValueError("read_voltage must be in (0, 0.5] V")
        if not 275.0 <= self.temperature <= 450.0:
            raise ValueError("temperature must be in [275, 450] K")
        if self.supply_sigma_frac < 0.0:
            raise ValueError("supply_sigma_frac must be non-negative")
        if self.temp_jitter < 0.0:
            raise ValueError("temp_jitter must be non-negative")
        if self.temperature - self.temp_jitter <= 0.0:
            raise ValueError("temp_jitter would allow non-physical temperatures")


@dataclass(frozen=True)
class ReRAMCell:
    """One cell: its state and fabricated base resistance in ohms."""

    state: CellState
    base_resistance: float

    def __post_init__(self):
        if self.base_resistance <= 0.0:
            raise ValueError("base_resistance must be positive")


def sample_cell(params: DeviceParams, rng: np.random.Generator) -> ReRAMCell:
    """Sample one cell from the device population.

    With probability ``stuck_on_prob`` the cell is stuck ON with resistance
    uniform over ``lrs_range``; otherwise resistance is
    exp(N(mu_ln_r, sigma_ln_r^2)).
    """
    if rng.random() < params.stuck_on_prob:
        lo, hi = params.lrs_range
        return ReRAMCell(CellState.STUCK_ON, float(rng.uniform(lo, hi)))
    return ReRAMCell(CellState.HRS, float(math.exp(rng.normal(params.mu_ln_r, params.sigma_ln_r))))


def current_law(resistance, v_eff, t_eff, params: DeviceParams):
    """Deterministic read current for given effective voltage and temperature.

    I = (v_eff / R) * alpha^((v_eff - ref_voltage) / 0.1 V)
        * exp(-(Ea / kB) * (1 / t_eff - 1 / ref_temperature))

    Vectorizes over any broadcastable mix of array arguments.
    """
    ohmic = v_eff / np.asarray(resistance, dtype=np.float64)
    nonlin = np.power(params.nonlin_alpha, (v_eff - params.ref_voltage) / _VOLT_STEP)
    thermal = np.exp(
        -(params.activation_energy / BOLTZMANN_EV)
        * (1.0 / np.asarray(t_eff, dtype=np.float64) - 1.0 / params.ref_temperature)
    )
    return ohmic * nonlin * thermal


def cell_current(
    cell: ReRAMCell,
    env: Environment,
    params: DeviceParams,
    rng: np.random.Generator | None = None,
) -> float:
    """Read current of a single cell under ``env``.

    Supply and temperature jitter are drawn fresh per call; with both jitter
    scales at zero the result is deterministic and ``rng`` may be omitted.
    """
    if env.supply_sigma_frac > 0.0 or env.temp_jitter > 0.0:
        if rng is None:
            raise ValueError("rng required when supply or temperature jitter is enabled")
        v_eff = env.read_voltage * (1.0 + rng.normal(0.0, env.supply_sigma_frac))
        t_eff = env.temperature + rng.uniform(-env.temp_jitter, env.temp_jitter)
    else:
        v_eff = env.read_voltage
        t_eff = env.temperature
    return float(current_law(cell.base_resistance, v_eff, t_eff, params))
