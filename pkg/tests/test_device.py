"""Cell model: conduction law oracle points and variability statistics."""

import math

import numpy as np
import pytest

from nrpuf import (
    CellState,
    DeviceParams,
    Environment,
    ReRAMCell,
    cell_current,
    current_law,
    sample_cell,
)

KB = 8.617333262e-5


def test_reference_point_is_ohmic():
    # at (ref_voltage, ref_temperature) both correction factors are exactly 1
    p = DeviceParams()
    assert float(current_law(1e5, 0.1, 300.0, p)) == 1e-6
    assert float(current_law(2e3, 0.1, 300.0, p)) == 0.1 / 2e3


def test_voltage_nonlinearity_doubles_per_100mv():
    p = DeviceParams()  # nonlin_alpha = 2
    assert float(current_law(1e5, 0.2, 300.0, p)) == pytest.approx(4e-6, rel=1e-12)
    assert float(current_law(1e5, 0.05, 300.0, p)) == pytest.approx(
        3.535533905932738e-07, rel=1e-12
    )


def test_alpha_exponent_against_hand_formula():
    p = DeviceParams(nonlin_alpha=3.0)
    got = float(current_law(2e3, 0.25, 300.0, p))
    want = (0.25 / 2e3) * 3.0 ** ((0.25 - 0.1) / 0.1)
    assert got == pytest.approx(want, rel=1e-12)


def test_arrhenius_factor():
    p = DeviceParams()  # activation_energy = 0.1 eV
    got = float(current_law(1e5, 0.1, 350.0, p))
    want = 1e-6 * math.exp(-(0.1 / KB) * (1.0 / 350.0 - 1.0 / 300.0))
    assert got == pytest.approx(want, rel=1e-12)
    assert got == pytest.approx(1.737758563717478e-06, rel=1e-12)
    # colder cell conducts less
    assert float(current_law(1e5, 0.1, 290.0, p)) < 1e-6


def test_current_law_vectorizes():
    p = DeviceParams()
    rs = np.array([1e5, 2e5, 4e5])
    batch = current_law(rs, 0.1, 300.0, p)
    np.testing.assert_allclose(batch, [1e-6, 5e-7, 2.5e-7], rtol=1e-12)


def test_hrs_population_sits_in_its_decade():
    """95% of formed HRS cells must land within one decade around the median."""
    p = DeviceParams()
    rng = np.random.default_rng(17)
    rs = np.array(
        [sample_cell(p, rng).base_resistance for _ in range(20_000)]
    )
    med = np.median(rs)
    assert med == pytest.approx(316227.766, rel=0.02)
    frac = np.mean((rs >= 1e5) & (rs <= 1e6))
    assert 0.93 < frac < 0.97


def test_stuck_on_population():
    p = DeviceParams(stuck_on_prob=0.1)
    rng = np.random.default_rng(23)
    cells = [sample_cell(p, rng) for _ in range(20_000)]
    stuck = [c for c in cells if c.state is CellState.STUCK_ON]
    assert len(stuck) / len(cells) == pytest.approx(0.1, abs=0.01)
    lo, hi = p.lrs_range
    assert all(lo <= c.base_resistance <= hi for c in stuck)
    # stuck cells conduct at least an order of magnitude above the HRS median
    assert max(c.base_resistance for c in stuck) * 10 <= 316227.766 * 1.1


def test_cell_current_without_jitter_is_deterministic():
    p = DeviceParams()
    env = Environment(read_voltage=0.1, temperature=300.0)
    cell = ReRAMCell(CellState.HRS, 1e5)
    a = cell_current(cell, env, p)
    b = cell_current(cell, env, p)
    assert a == b == 1e-6


def test_cell_current_jitter_needs_rng():
    p = DeviceParams()
    env = Environment(
        read_voltage=0.1, temperature=300.0, supply_sigma_frac=0.03, temp_jitter=10.0
    )
    cell = ReRAMCell(CellState.HRS, 1e5)
    with pytest.raises(ValueError):
        cell_current(cell, env, p)
    rng = np.random.default_rng(0)
    draws = np.array([cell_current(cell, env, p, rng=rng) for _ in range(4000)])
    assert draws.std() > 0.0
    assert abs(draws.mean() / 1e-6 - 1.0) < 0.01


def test_param_validation():
    with pytest.raises(ValueError):
        DeviceParams(sigma_ln_r=-1.0)
    with pytest.raises(ValueError):
        DeviceParams(lrs_range=(1e4, 1e3))
    with pytest.raises(ValueError):
        DeviceParams(nonlin_alpha=0.0)
    with pytest.raises(ValueError):
        Environment(read_voltage=0.0, temperature=300.0)
    with pytest.raises(ValueError):
        Environment(read_voltage=0.1, temperature=200.0)
