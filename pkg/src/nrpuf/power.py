"""Power-trace collection and differential-leakage SNR."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .core import PowerParams, PufInstance, evaluate_grid
from .device import Environment

__all__ = ["PowerTrace", "collect_traces", "snr", "trace_to_csv"]


@dataclass(frozen=True)
class PowerTrace:
    """Per-evaluation (output bit, read power) samples at one dummy setting."""

    bits: np.ndarray
    powers: np.ndarray
    dummy_count: int

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=np.uint8).reshape(-1)
        powers = np.asarray(self.powers, dtype=np.float64).reshape(-1)
        if bits.shape != powers.shape or bits.size == 0:
            raise ValueError("bits and powers must be equal-length and non-empty")
        if not np.isin(bits, (0, 1)).all():
            raise ValueError("bits must be 0 or 1")
        if powers.min() < 0.0:
            raise ValueError("power cannot be negative")
        bits.setflags(write=False)
        powers.setflags(write=False)
        object.__setattr__(self, "bits", bits)
        object.__setattr__(self, "powers", powers)

    def __len__(self) -> int:
        return len(self.bits)


def collect_traces(
    puf: PufInstance,
    challenges,
    env: Environment,
    dummy_count: int = 0,
    power_params: PowerParams | None = None,
    trial: int = 0,
) -> PowerTrace:
    """One power sample per challenge.

    Noise comes from the per-(instance, challenge, trial) substreams, so a
    trace is reproducible and independent of collection order.
    """
    words = np.asarray(challenges, dtype=np.uint64)
    if words.size == 0:
        raise ValueError("challenge list is empty")
    grid = evaluate_grid(
        puf, words, env, dummy_count=dummy_count,
        trials=trial + 1, power_params=power_params,
    )
    return PowerTrace(grid["bit"][:, trial], grid["power"][:, trial], dummy_count)


def snr(trace: PowerTrace) -> float:
    """Two-class leakage SNR: |mean(P|1) - mean(P|0)| / pooled within-class std."""
    ones = trace.powers[trace.bits == 1]
    zeros = trace.powers[trace.bits == 0]
    if len(ones) == 0 or len(zeros) == 0:
        raise ValueError("SNR needs both output classes in the trace")
    n1, n0 = len(ones), len(zeros)
    dof = n1 + n0 - 2
    if dof <= 0:
        raise ValueError("SNR needs more than one sample per trace")
    pooled_var = (
        (n1 - 1) * ones.var(ddof=1) if n1 > 1 else 0.0
    ) + ((n0 - 1) * zeros.var(ddof=1) if n0 > 1 else 0.0)
    pooled_std = math.sqrt(pooled_var / dof)
    if pooled_std == 0.0:
        raise ValueError("within-class power spread is zero, SNR undefined")
    return abs(float(ones.mean()) - float(zeros.mean())) / pooled_std


def trace_to_csv(trace: PowerTrace, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["challenge_index", "output_bit", "power_w", "dummy_count"])
        for i in range(len(trace)):
            writer.writerow(
                [i, int(trace.bits[i]), repr(float(trace.powers[i])), trace.dummy_count]
            )
