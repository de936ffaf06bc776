"""Crossbar array construction and row read-out.

A crossbar holds an M x N grid of independently sampled cells.  A read
selects one column set and one row; the row current is the sum of the
selected cells' currents.  Because cells are independent, the mean and
variance of a multi-cell read are the sums of the per-cell means and
variances, which is what makes wider column selections spread read currents
by sqrt(CS).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .device import CellState, DeviceParams, Environment, ReRAMCell, current_law


@dataclass(frozen=True)
class SumStats:
    """Mean and variance of a current population, in amps and amps^2."""

    mean: float
    variance: float

    def __post_init__(self):
        if self.variance < 0.0:
            raise ValueError("variance must be non-negative")

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)


def combine_stats(parts: Iterable[SumStats]) -> SumStats:
    """Statistics of a sum of independent reads: means add, variances add."""
    parts = list(parts)
    if not parts:
        raise ValueError("combine_stats needs at least one entry")
    return SumStats(
        mean=float(sum(p.mean for p in parts)),
        variance=float(sum(p.variance for p in parts)),
    )


@dataclass(frozen=True)
class Selection:
    """A read address: CS distinct columns plus an ordered pair of rows.

    The row order matters: the comparator senses current(row_pair[0]) against
    current(row_pair[1]).
    """

    columns: tuple[int, ...]
    row_pair: tuple[int, int]

    def __post_init__(self):
        if len(self.columns) == 0:
            raise ValueError("selection needs at least one column")
        if len(set(self.columns)) != len(self.columns):
            raise ValueError("columns must be distinct")
        if len(self.row_pair) != 2 or self.row_pair[0] == self.row_pair[1]:
            raise ValueError("row_pair must be two distinct rows")
        if min(self.columns) < 0 or min(self.row_pair) < 0:
            raise ValueError("indices must be non-negative")

    def validate_for(self, rows: int, cols: int) -> None:
        if max(self.columns) >= cols or max(self.row_pair) >= rows:
            raise ValueError("selection indices out of array bounds")


class CrossbarArray:
    """An M x N grid of sampled cells plus the parameters that produced it."""

    def __init__(
        self,
        resistances: np.ndarray,
        stuck: np.ndarray,
        params: DeviceParams,
    ):
        resistances = np.asarray(resistances, dtype=np.float64)
        stuck = np.asarray(stuck, dtype=bool)
        if resistances.ndim != 2 or resistances.shape != stuck.shape:
            raise ValueError("resistances and stuck mask must be matching 2-D arrays")
        if resistances.shape[0] < 1 or resistances.shape[1] < 1:
            raise ValueError("array dims must be at least 1 x 1")
        if np.any(resistances <= 0.0):
            raise ValueError("resistances must be positive")
        lo, hi = params.lrs_range
        stuck_r = resistances[stuck]
        if stuck_r.size and (stuck_r.min() < lo or stuck_r.max() > hi):
            raise ValueError("stuck-ON resistances must lie in lrs_range")
        self.resistances = resistances
        self.stuck = stuck
        self.params = params

    @property
    def rows(self) -> int:
        return self.resistances.shape[0]

    @property
    def cols(self) -> int:
        return self.resistances.shape[1]

    @property
    def stuck_count(self) -> int:
        return int(self.stuck.sum())

    def cell(self, row: int, col: int) -> ReRAMCell:
        state = CellState.STUCK_ON if self.stuck[row, col] else CellState.HRS
        return ReRAMCell(state, float(self.resistances[row, col]))


def build_array(
    rows: int, cols: int, params: DeviceParams, rng: np.random.Generator
) -> CrossbarArray:
    """Sample a full crossbar.

    Cells are independent.  The grid is drawn in three vectorized passes
    (stuck mask, HRS resistances, stuck-ON resistances), so the stream
    consumption differs from a cell-by-cell loop of :func:`sample_cell`, but
    the result is deterministic for a given generator state.
    """
    if rows < 1 or cols < 1:
        raise ValueError("array dims must be at least 1 x 1")
    stuck = rng.random((rows, cols)) < params.stuck_on_prob
    hrs = np.exp(rng.normal(params.mu_ln_r, params.sigma_ln_r, (rows, cols)))
    lo, hi = params.lrs_range
    lrs = rng.uniform(lo, hi, (rows, cols))
    return CrossbarArray(np.where(stuck, lrs, hrs), stuck, params)


def row_current(
    array: CrossbarArray,
    row: int,
    columns: Sequence[int],
    env: Environment,
    rng: np.random.Generator | None = None,
) -> float:
    """Summed read current of one row over the selected columns.

    One READ applies a single rail voltage to all selected columns, so the
    supply jitter draw is shared by the whole read; temperature jitter is
    drawn per cell.  Deterministic when both jitter scales are zero.
    """
    cols = list(columns)
    if len(cols) != len(set(cols)):
        raise ValueError("columns must be distinct")
    if not 0 <= row < array.rows:
        raise ValueError("row out of bounds")
    if cols and (min(cols) < 0 or max(cols) >= array.cols):
        raise ValueError("column index out of bounds")
    if not cols:
        return 0.0
    r = array.resistances[row, cols]
    if env.supply_sigma_frac > 0.0 or env.temp_jitter > 0.0:
        if rng is None:
            raise ValueError("rng required when supply or temperature jitter is enabled")
        v_eff = env.read_voltage * (1.0 + rng.normal(0.0, env.supply_sigma_frac))
        t_eff = env.temperature + rng.uniform(-env.temp_jitter, env.temp_jitter, len(cols))
    else:
        v_eff = env.read_voltage
        t_eff = env.temperature
    return float(np.sum(current_law(r, v_eff, t_eff, array.params)))


def cell_current_stats(params: DeviceParams, env: Environment) -> SumStats:
    """Analytic mean/variance of a single-cell read at nominal conditions.

    Jitter is excluded; the spread comes from the fabrication distribution
    (lognormal HRS mixed with uniform stuck-ON cells).
    """
    # current = scale / R at nominal conditions; scale folds in voltage,
    # nonlinearity and thermal activation (all deterministic here)
    scale = float(current_law(1.0, env.read_voltage, env.temperature, params))
    mu, sig = params.mu_ln_r, params.sigma_ln_r
    e_inv_r = math.exp(-mu + sig * sig / 2.0)
    e_inv_r2 = math.exp(-2.0 * mu + 2.0 * sig * sig)
    lo, hi = params.lrs_range
    if hi > lo:
        l_inv_r = math.log(hi / lo) / (hi - lo)
        l_inv_r2 = (1.0 / lo - 1.0 / hi) / (hi - lo)
    else:
        l_inv_r = 1.0 / lo
        l_inv_r2 = 1.0 / (lo * lo)
    p = params.stuck_on_prob
    m1 = (1.0 - p) * e_inv_r + p * l_inv_r
    m2 = (1.0 - p) * e_inv_r2 + p * l_inv_r2
    return SumStats(mean=scale * m1, variance=scale * scale * (m2 - m1 * m1))
