"""PUF quality statistics over response records, plus avalanche probes.

All Hamming-distance aggregates use the exact column-count identity
sum_{i<j} HD(R_i, R_j) = sum_bits k_b (rows - k_b), so every percentage is an
integer ratio evaluated in one division and matches pairwise brute force
bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ComparatorParams, PufInstance, expand_batch, pack_selection
from .crossbar import Selection
from .device import Environment, current_law

__all__ = [
    "ResponseRecord",
    "SacMap",
    "bit_aliasing",
    "bit_error_rate",
    "diffuseness",
    "mean_bit_aliasing",
    "mean_bit_error_rate",
    "mean_diffuseness",
    "mean_uniformity",
    "noise_free_variant",
    "reliability",
    "sac_challenge_test",
    "sac_map",
    "uniformity",
    "uniqueness",
]


class ResponseRecord:
    """Response bits of a PUF population, indexed (instance, challenge
    vector, trial, bit)."""

    def __init__(self, bits):
        arr = np.asarray(bits, dtype=np.uint8)
        if arr.ndim != 4:
            raise ValueError("bits must have dims (p, c, tr, n)")
        if arr.size == 0:
            raise ValueError("all dims must be at least 1")
        if not np.isin(arr, (0, 1)).all():
            raise ValueError("bits must be 0 or 1")
        arr.setflags(write=False)
        self.bits = arr

    @property
    def p(self) -> int:
        return self.bits.shape[0]

    @property
    def c(self) -> int:
        return self.bits.shape[1]

    @property
    def tr(self) -> int:
        return self.bits.shape[2]

    @property
    def n(self) -> int:
        return self.bits.shape[3]


def _pairwise_hd_percent(mat: np.ndarray) -> float:
    """Mean pairwise HD/n over the rows of a (rows, n) bit matrix, percent."""
    rows, n = mat.shape
    if rows < 2:
        raise ValueError("need at least two rows to compare")
    k = mat.sum(axis=0, dtype=np.int64)
    total = int((k * (rows - k)).sum())
    return 100.0 * total / (rows * (rows - 1) // 2 * n)


def uniformity(response) -> float:
    """Percentage of ones in a single response vector."""
    r = np.asarray(response, dtype=np.uint8).reshape(-1)
    if r.size == 0:
        raise ValueError("empty response")
    if not np.isin(r, (0, 1)).all():
        raise ValueError("bits must be 0 or 1")
    return 100.0 * int(r.sum(dtype=np.int64)) / r.size


def bit_aliasing(records: ResponseRecord, bit_index: int, challenge: int = 0, trial: int = 0) -> float:
    """Percentage of instances producing 1 at one bit position."""
    if records.p < 2:
        raise ValueError("bit aliasing needs at least two instances")
    if not 0 <= bit_index < records.n:
        raise ValueError("bit index out of range")
    col = records.bits[:, challenge, trial, bit_index]
    return 100.0 * int(col.sum(dtype=np.int64)) / records.p


def uniqueness(records: ResponseRecord) -> float:
    """Mean pairwise HD between instances, same challenge and trial."""
    if records.p < 2:
        raise ValueError("uniqueness needs at least two instances")
    k = records.bits.sum(axis=0, dtype=np.int64)  # (c, tr, n)
    total = int((k * (records.p - k)).sum())
    pairs = records.p * (records.p - 1) // 2
    return 100.0 * total / (pairs * records.c * records.tr * records.n)


def diffuseness(records: ResponseRecord, instance: int) -> float:
    """Mean pairwise HD between challenge vectors within one instance."""
    if records.c < 2:
        raise ValueError("diffuseness needs at least two challenge vectors")
    bits = records.bits[instance]  # (c, tr, n)
    k = bits.sum(axis=0, dtype=np.int64)  # (tr, n)
    total = int((k * (records.c - k)).sum())
    pairs = records.c * (records.c - 1) // 2
    return 100.0 * total / (pairs * records.tr * records.n)


def bit_error_rate(records: ResponseRecord, instance: int, challenge: int) -> float:
    """Mean pairwise HD between repeated trials of one challenge vector."""
    if records.tr < 2:
        raise ValueError("bit error rate needs at least two trials")
    return _pairwise_hd_percent(records.bits[instance, challenge])


def reliability(records: ResponseRecord, instance: int, challenge: int) -> float:
    return 100.0 - bit_error_rate(records, instance, challenge)


def mean_uniformity(records: ResponseRecord) -> float:
    bits = records.bits
    return 100.0 * int(bits.sum(dtype=np.int64)) / bits.size


def mean_bit_aliasing(records: ResponseRecord) -> float:
    """Bit aliasing averaged over every (challenge, trial, bit) slice.

    Individual positions spread widely at small populations; the aggregate is
    the stable figure.
    """
    if records.p < 2:
        raise ValueError("bit aliasing needs at least two instances")
    return mean_uniformity(records)


def mean_diffuseness(records: ResponseRecord) -> float:
    return float(np.mean([diffuseness(records, i) for i in range(records.p)]))


def mean_bit_error_rate(records: ResponseRecord) -> float:
    k = records.bits.sum(axis=2, dtype=np.int64)  # (p, c, n)
    if records.tr < 2:
        raise ValueError("bit error rate needs at least two trials")
    total = int((k * (records.tr - k)).sum())
    pairs = records.tr * (records.tr - 1) // 2
    return 100.0 * total / (pairs * records.p * records.c * records.n)


# ---------------------------------------------------------------------------
# avalanche probes
# ---------------------------------------------------------------------------


def noise_free_variant(puf: PufInstance) -> PufInstance:
    """Same arrays and offsets, but zero sense margin, so a read is a pure
    function of the addresses."""
    zero = lambda c: ComparatorParams(c.offset_sigma, 0.0, c.offset_value)  # noqa: E731
    return PufInstance(
        puf.cba_a,
        puf.cba_b,
        puf.dummy,
        zero(puf.comp_a),
        zero(puf.comp_b),
        puf.cs,
        puf.instance_seed,
    )


def _row_sums(array, rows: np.ndarray, cols: np.ndarray, env: Environment) -> np.ndarray:
    r_p = array.resistances[rows[:, 0:1], cols]
    r_q = array.resistances[rows[:, 1:2], cols]
    i_p = current_law(r_p, env.read_voltage, env.temperature, array.params).sum(axis=1)
    i_q = current_law(r_q, env.read_voltage, env.temperature, array.params).sum(axis=1)
    return i_p - i_q


def _selection_bits(
    puf: PufInstance, cols: np.ndarray, rows: np.ndarray, env: Environment, pipeline: str
) -> np.ndarray:
    """Noise-free output bits for explicit stage-A selections.

    The second-stage address is derived from the selection itself (its
    canonical packing seeds the array-B expansion), so two selections that
    differ anywhere read unrelated array-B locations.
    """
    hidden = (_row_sums(puf.cba_a, rows, cols, env) + puf.comp_a.offset_value) > 0.0
    if pipeline == "single":
        return hidden.astype(np.uint8)
    words = np.empty(len(cols), dtype=np.uint64)
    for i in range(len(cols)):
        words[i] = pack_selection(
            Selection(tuple(int(x) for x in cols[i]), (int(rows[i, 0]), int(rows[i, 1])))
        )
    cols_b, rows_b = expand_batch(
        words, hidden.astype(np.uint64), True, puf.cs, puf.rows, puf.cols
    )
    delta_b = _row_sums(puf.cba_b, rows_b, cols_b, env) + puf.comp_b.offset_value
    return (delta_b > 0.0).astype(np.uint8)


class _EmptyDistanceClass(Exception):
    """No selection exists at the requested (column, row) distance."""


def _row_pairs_at_distance(pair: tuple[int, int], k: int, m_rows: int) -> list:
    """All ordered row pairs whose positional HD from ``pair`` is exactly k."""
    p, q = pair
    if k == 0:
        return [pair]
    if k == 1:
        out = [(p, b) for b in range(m_rows) if b != q and b != p]
        out += [(a, q) for a in range(m_rows) if a != p and a != q]
        return out
    return [
        (a, b)
        for a in range(m_rows)
        for b in range(m_rows)
        if a != b and a != p and b != q
    ]


def _replace_columns(base: np.ndarray, j: int, n_cols: int, rng) -> np.ndarray:
    """One column set with exactly j positions replaced, all entries distinct."""
    cs = len(base)
    for _ in range(20):
        out = base.copy()
        positions = rng.choice(cs, size=j, replace=False)
        kept = {int(base[t]) for t in range(cs) if t not in set(int(x) for x in positions)}
        chosen: set[int] = set()
        ok = True
        for t in positions:
            banned = kept | chosen | {int(base[t])}
            pool = [v for v in range(n_cols) if v not in banned]
            if not pool:
                ok = False
                break
            out[t] = pool[int(rng.integers(len(pool)))]
            chosen.add(int(out[t]))
        if ok:
            return out
    raise _EmptyDistanceClass


def _perturb_selections(
    reference: Selection,
    j: int,
    k: int,
    samples: int,
    n_cols: int,
    m_rows: int,
    rng: np.random.Generator,
):
    """Selections at exactly (j columns, k rows) positional distance from the
    reference; raises _EmptyDistanceClass when no such selection exists."""
    base_cols = np.asarray(reference.columns, dtype=np.int64)
    cols = np.tile(base_cols, (samples, 1))
    rows = np.empty((samples, 2), dtype=np.int64)
    pairs = _row_pairs_at_distance(reference.row_pair, k, m_rows)
    if not pairs:
        raise _EmptyDistanceClass
    picks = rng.integers(len(pairs), size=samples)
    for s in range(samples):
        rows[s] = pairs[int(picks[s])]
        if j:
            cols[s] = _replace_columns(base_cols, j, n_cols, rng)
    return cols, rows


@dataclass(frozen=True)
class SacMap:
    """Output transition rates over (columns changed, rows changed).

    Cells whose distance class holds no selection (replacing exactly one row
    of a two-row array, say) are NaN.
    """

    grid: np.ndarray

    def max_deviation(self, include_origin: bool = False) -> float:
        """Largest |rate - 50| over the map; the unchanged-selection corner
        is excluded by default since its ideal is 0, not 50."""
        dev = np.abs(self.grid - 50.0)
        if include_origin:
            return float(np.nanmax(dev))
        masked = dev.copy()
        masked[0, 0] = np.nan
        if np.isnan(masked).all():
            raise ValueError("map has only the unchanged corner")
        return float(np.nanmax(masked))


def sac_map(
    puf: PufInstance,
    env: Environment,
    reference: Selection,
    max_j: int,
    max_k: int,
    samples: int,
    rng: np.random.Generator,
    pipeline: str = "dual",
) -> SacMap:
    """Transition-rate map versus the number of replaced address indices.

    Bypasses challenge expansion: selections are perturbed directly and
    evaluated noise-free against the reference output.
    """
    if not 0 <= max_j <= puf.cs:
        raise ValueError("max_j cannot exceed the column-selection width")
    if not 0 <= max_k <= 2:
        raise ValueError("max_k cannot exceed the two-row read")
    if samples < 1:
        raise ValueError("samples must be at least 1")
    reference.validate_for(puf.rows, puf.cols)
    quiet = noise_free_variant(puf)
    env0 = Environment(read_voltage=env.read_voltage, temperature=env.temperature)
    ref_cols = np.asarray([reference.columns], dtype=np.int64)
    ref_rows = np.asarray([reference.row_pair], dtype=np.int64)
    ref_bit = _selection_bits(quiet, ref_cols, ref_rows, env0, pipeline)[0]
    grid = np.zeros((max_j + 1, max_k + 1))
    for j in range(max_j + 1):
        for k in range(max_k + 1):
            if j == 0 and k == 0:
                continue  # identical selection, rate stays 0
            try:
                cols, rows = _perturb_selections(
                    reference, j, k, samples, puf.cols, puf.rows, rng
                )
            except _EmptyDistanceClass:
                grid[j, k] = np.nan
                continue
            bits = _selection_bits(quiet, cols, rows, env0, pipeline)
            grid[j, k] = 100.0 * float(np.mean(bits != ref_bit))
    return SacMap(grid)


def sac_challenge_test(
    puf: PufInstance,
    env: Environment,
    base_challenges,
    hd: int,
    rng: np.random.Generator,
    pipeline: str = "dual",
    expand_mode: str = "lfsr",
) -> float:
    """Transition rate when hd random challenge bits are flipped."""
    from .core import evaluate_grid  # local import avoids a cycle

    if not 0 <= hd <= 64:
        raise ValueError("hd must be in [0, 64]")
    words = np.asarray(base_challenges, dtype=np.uint64)
    flipped = words.copy()
    if hd:
        for i in range(len(words)):
            pos = rng.choice(64, size=hd, replace=False)
            mask = np.uint64(0)
            for b in pos:
                mask |= np.uint64(1) << np.uint64(b)
            flipped[i] ^= mask
    quiet = noise_free_variant(puf)
    env0 = Environment(read_voltage=env.read_voltage, temperature=env.temperature)
    base = evaluate_grid(quiet, words, env0, pipeline=pipeline, expand_mode=expand_mode)
    other = evaluate_grid(quiet, flipped, env0, pipeline=pipeline, expand_mode=expand_mode)
    return 100.0 * float(np.mean(base["bit"] != other["bit"]))
