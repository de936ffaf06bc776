"""Dual-crossbar PUF core.

A response bit is produced in two stages.  The challenge is expanded into a
read address (CS columns, two rows) on crossbar A; comparing the two row
currents yields a hidden bit that never leaves the device.  The challenge and
the hidden bit are then expanded into a second address on crossbar B, whose
comparison is the response bit.  A dummy array drawing random cells in
parallel obscures the power signature of the read.

All evaluation randomness comes from counter-addressed substreams keyed on
(instance_seed, challenge, trial), so any batching or process layout produces
identical results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .crossbar import CrossbarArray, Selection, build_array
from .device import DeviceParams, Environment, current_law
from . import streams
from .streams import (
    DOMAIN_ARRAY_A,
    DOMAIN_ARRAY_B,
    DOMAIN_ARRAY_DUMMY,
    DOMAIN_COMPARATORS,
    DOMAIN_EVAL,
    DOMAIN_INSTANCE,
    EvalStream,
    block_normal,
    block_uniform,
    derive_key,
    derive_key_int,
    prf_normal,
    prf_u64,
    prf_uniform,
)

_U64 = np.uint64
_MASK64 = 0xFFFFFFFFFFFFFFFF

# Fibonacci LFSR, taps at polynomial positions (64, 63, 61, 60); maximal length.
_TAP_SHIFTS = (_U64(63), _U64(62), _U64(60), _U64(59))
# challenge scrambling constant for the second crossbar
_WHITEN_B = _U64(0x9E3779B97F4A7C15)
# replacement for the all-zero LFSR state (first 64 fraction bits of pi, so it
# cannot collide with the hidden-bit-flipped variant of the same challenge)
_ZERO_STATE_SUB = _U64(0x243F6A8885A308D3)

MAX_CS = 5

# ---------------------------------------------------------------------------
# counter layout of one evaluation's substream (uniform slot addresses)
# ---------------------------------------------------------------------------
_SLOT_SUPPLY_A = 0      # normal, consumes (0, 1)
_SLOT_SUPPLY_B = 2
_SLOT_SUPPLY_D = 4
_SLOT_COIN_A = 8
_SLOT_COIN_B = 9
_SLOT_PNOISE = 12       # normal, consumes (12, 13)
_BASE_TEMP_A_P = 64     # one uniform per selected cell
_BASE_TEMP_A_Q = 128
_BASE_TEMP_B_P = 192
_BASE_TEMP_B_Q = 256
_BASE_DUMMY_SEL = 1024  # sequential draws, region extends to _BASE_DUMMY_TEMP
_BASE_DUMMY_TEMP = 1 << 21


@dataclass(frozen=True)
class Challenge:
    """A 64-bit input word."""

    word: int

    def __post_init__(self):
        if not 0 <= self.word <= _MASK64:
            raise ValueError("challenge must fit in 64 bits")


@dataclass(frozen=True)
class ComparatorParams:
    """Behavioral sense-amplifier model.

    :param offset_sigma: std of the static input-referred offset population.
    :param sense_margin: half-width of the metastable band in amps; a current
        difference inside the band resolves to a fair coin flip.
    :param offset_value: this comparator's sampled static offset in amps.
    """

    offset_sigma: float = 5e-9
    sense_margin: float = 20e-9
    offset_value: float = 0.0

    def __post_init__(self):
        if self.offset_sigma < 0.0 or self.sense_margin < 0.0:
            raise ValueError("offset_sigma and sense_margin must be non-negative")


@dataclass(frozen=True)
class PowerParams:
    """Read power model parameters.

    power = V * (sum of array and dummy currents) + baseline_cmos_power
            + bit * output_driver_power + N(0, p_noise^2), clamped at 0.

    The output driver term models the asymmetric latch/driver dynamic power
    that makes the output bit observable in the first place; set it to 0 for
    an array-currents-only trace.
    """

    baseline_cmos_power: float = 0.0
    p_noise: float = 5e-9
    output_driver_power: float = 1e-6

    def __post_init__(self):
        if min(self.baseline_cmos_power, self.p_noise, self.output_driver_power) < 0.0:
            raise ValueError("power parameters must be non-negative")


@dataclass(frozen=True)
class EvalOutcome:
    """Result of one response-bit evaluation."""

    bit: int
    hidden_bit: int
    i_p: float
    i_q: float
    i_d: float
    power: float


def pelgrom_offset(sigma_ref: float, w_ref: float, l_ref: float, w: float, l: float) -> float:
    """Offset sigma of a comparator sized (w, l), scaled from a reference design.

    Mismatch shrinks with the square root of gate area:
    sigma = sigma_ref * sqrt((w_ref * l_ref) / (w * l)).
    """
    if sigma_ref < 0.0:
        raise ValueError("sigma_ref must be non-negative")
    if min(w_ref, l_ref, w, l) <= 0.0:
        raise ValueError("dimensions must be positive")
    return sigma_ref * math.sqrt((w_ref * l_ref) / (w * l))


class PufInstance:
    """One fabricated device: two addressed crossbars, a dummy array, two
    comparators, and the seed that reproduces all of it."""

    def __init__(
        self,
        cba_a: CrossbarArray,
        cba_b: CrossbarArray,
        dummy: CrossbarArray,
        comp_a: ComparatorParams,
        comp_b: ComparatorParams,
        cs: int,
        instance_seed: int,
        hidden_bits: int = 1,
    ):
        if cba_a.rows != cba_b.rows or cba_a.cols != cba_b.cols:
            raise ValueError("crossbars A and B must share dimensions")
        if not 1 <= cs <= MAX_CS:
            raise ValueError(f"cs must be in [1, {MAX_CS}]")
        if cba_a.cols < cs:
            raise ValueError("arrays need at least cs columns")
        if cba_a.rows < 2:
            raise ValueError("arrays need at least two rows")
        if hidden_bits != 1:
            raise ValueError("only a 1-bit hidden challenge is supported")
        self.cba_a = cba_a
        self.cba_b = cba_b
        self.dummy = dummy
        self.comp_a = comp_a
        self.comp_b = comp_b
        self.cs = cs
        self.instance_seed = instance_seed & _MASK64
        self.hidden_bits = hidden_bits

    @property
    def rows(self) -> int:
        return self.cba_a.rows

    @property
    def cols(self) -> int:
        return self.cba_a.cols


def make_instance(
    device: DeviceParams,
    instance_seed: int,
    rows: int = 128,
    cols: int = 128,
    cs: int = 5,
    offset_sigma: float = 5e-9,
    sense_margin: float = 20e-9,
    dummy_rows: int | None = None,
    dummy_cols: int | None = None,
) -> PufInstance:
    """Build a complete instance deterministically from its seed."""
    seed = instance_seed & _MASK64
    cba_a = build_array(rows, cols, device,
                        np.random.default_rng(derive_key_int(DOMAIN_ARRAY_A, seed)))
    cba_b = build_array(rows, cols, device,
                        np.random.default_rng(derive_key_int(DOMAIN_ARRAY_B, seed)))
    dummy = build_array(dummy_rows or rows, dummy_cols or cols, device,
                        np.random.default_rng(derive_key_int(DOMAIN_ARRAY_DUMMY, seed)))
    rng = np.random.default_rng(derive_key_int(DOMAIN_COMPARATORS, seed))
    off_a, off_b = rng.normal(0.0, offset_sigma, 2) if offset_sigma > 0 else (0.0, 0.0)
    comp_a = ComparatorParams(offset_sigma, sense_margin, float(off_a))
    comp_b = ComparatorParams(offset_sigma, sense_margin, float(off_b))
    return PufInstance(cba_a, cba_b, dummy, comp_a, comp_b, cs, seed)


def derive_instance_seed(master_seed: int, index: int) -> int:
    """Seed of the index-th instance of a population keyed on master_seed."""
    return derive_key_int(DOMAIN_INSTANCE, master_seed & _MASK64, index)


# ---------------------------------------------------------------------------
# challenge expansion
# ---------------------------------------------------------------------------


def _lfsr_next_word(state: np.ndarray) -> np.ndarray:
    """Advance each 64-bit Fibonacci LFSR state by 64 single-bit steps."""
    one = _U64(1)
    for _ in range(64):
        fb = (
            (state >> _TAP_SHIFTS[0])
            ^ (state >> _TAP_SHIFTS[1])
            ^ (state >> _TAP_SHIFTS[2])
            ^ (state >> _TAP_SHIFTS[3])
        ) & one
        state = (state << one) | fb
    return state


def _seed_states(words: np.ndarray, hidden, for_array_b: bool) -> np.ndarray:
    state = words.astype(np.uint64).copy()
    if for_array_b:
        state ^= _WHITEN_B
        state ^= np.asarray(hidden, dtype=np.uint64) & _U64(1)
    # the LFSR itself is linear over GF(2); conditioning the seed through the
    # finalizer makes a single flipped challenge bit perturb the whole stream
    state = streams.mix64(state)
    state[state == _U64(0)] = _ZERO_STATE_SUB
    return state


def _expand_lfsr_batch(
    words: np.ndarray, hidden, for_array_b: bool, cs: int, m_rows: int, n_cols: int
):
    """Expand challenge words into (columns, row pairs) via the LFSR stream.

    Each successive LFSR word proposes one index: first cs distinct columns
    (word mod n_cols), then two distinct rows (word mod m_rows); duplicate
    proposals are discarded.
    """
    k = len(words)
    state = _seed_states(words, hidden, for_array_b)
    cols = np.full((k, cs), -1, dtype=np.int64)
    rows = np.full((k, 2), -1, dtype=np.int64)
    ncol = np.zeros(k, dtype=np.int64)
    nrow = np.zeros(k, dtype=np.int64)
    # worst realistic case is tiny; the guard only catches degenerate dims
    for _ in range(64 * (cs + 2) + 4096):
        unfinished = (ncol < cs) | (nrow < 2)
        if not unfinished.any():
            break
        state = _lfsr_next_word(state)
        col_phase = ncol < cs
        cand_c = (state % _U64(n_cols)).astype(np.int64)
        dup_c = (cols == cand_c[:, None]).any(axis=1)
        take_c = col_phase & ~dup_c
        if take_c.any():
            cols[take_c, ncol[take_c]] = cand_c[take_c]
            ncol[take_c] += 1
        row_phase = ~col_phase & (nrow < 2)
        cand_r = (state % _U64(m_rows)).astype(np.int64)
        dup_r = (rows == cand_r[:, None]).any(axis=1)
        take_r = row_phase & ~dup_r
        if take_r.any():
            rows[take_r, nrow[take_r]] = cand_r[take_r]
            nrow[take_r] += 1
    else:
        raise RuntimeError("challenge expansion failed to converge")
    return cols, rows


def _bit_reverse64(x: np.ndarray) -> np.ndarray:
    x = x.astype(np.uint64).copy()
    masks = (
        (0x5555555555555555, 1),
        (0x3333333333333333, 2),
        (0x0F0F0F0F0F0F0F0F, 4),
        (0x00FF00FF00FF00FF, 8),
        (0x0000FFFF0000FFFF, 16),
        (0x00000000FFFFFFFF, 32),
    )
    for mask, shift in masks:
        m = _U64(mask)
        s = _U64(shift)
        x = ((x >> s) & m) | ((x & m) << s)
    return x


def _expand_direct_batch(
    words: np.ndarray, hidden, for_array_b: bool, cs: int, m_rows: int, n_cols: int
):
    """Decoder-style expansion: consecutive 7-bit challenge fields map to
    indices, so nearby challenges select nearby addresses.

    Array B reads the bit-reversed, rescrambled word and shifts every index by
    half the array when the hidden bit is set, which moves the second-stage
    read to an unrelated address region while preserving locality within each
    hidden-bit branch.
    """
    w = words.astype(np.uint64)
    if for_array_b:
        w = _bit_reverse64(w) ^ _WHITEN_B
        h = np.asarray(hidden, dtype=np.int64)
    else:
        h = None
    k = len(w)
    cols = np.full((k, cs), -1, dtype=np.int64)
    field = _U64(0x7F)
    for j in range(cs):
        idx = ((w >> _U64(7 * j)) & field).astype(np.int64) % n_cols
        if h is not None:
            idx = (idx + h * (n_cols // 2)) % n_cols
        # linear probing keeps indices distinct without losing locality
        if j > 0:
            for _ in range(n_cols):
                dup = (cols[:, :j] == idx[:, None]).any(axis=1)
                if not dup.any():
                    break
                idx[dup] = (idx[dup] + 1) % n_cols
        cols[:, j] = idx
    rows = np.full((k, 2), -1, dtype=np.int64)
    for j in range(2):
        idx = ((w >> _U64(7 * (cs + j))) & field).astype(np.int64) % m_rows
        if h is not None:
            idx = (idx + h * (m_rows // 2)) % m_rows
        if j > 0:
            for _ in range(m_rows):
                dup = rows[:, 0] == idx
                if not dup.any():
                    break
                idx[dup] = (idx[dup] + 1) % m_rows
        rows[:, j] = idx
    return cols, rows


def expand_batch(
    words: np.ndarray,
    hidden,
    for_array_b: bool,
    cs: int,
    m_rows: int,
    n_cols: int,
    mode: str = "lfsr",
):
    words = np.asarray(words, dtype=np.uint64)
    if for_array_b and hidden is None:
        raise ValueError("array B expansion requires the hidden bit")
    if not for_array_b and hidden is not None:
        raise ValueError("array A expansion takes no hidden bit")
    if cs > n_cols:
        raise ValueError("cs exceeds column count")
    if m_rows < 2:
        raise ValueError("row pair needs at least two rows")
    if mode == "lfsr":
        return _expand_lfsr_batch(words, hidden, for_array_b, cs, m_rows, n_cols)
    if mode == "direct":
        return _expand_direct_batch(words, hidden, for_array_b, cs, m_rows, n_cols)
    raise ValueError(f"unknown expansion mode: {mode!r}")


def expand_challenge(
    challenge: Challenge | int,
    hidden_bit: int | None,
    for_array_b: bool,
    cs: int,
    m_rows: int,
    n_cols: int,
    mode: str = "lfsr",
) -> Selection:
    """Expand one challenge into a read address for one crossbar.

    :param hidden_bit: required (0 or 1) when expanding for array B, must be
        None for array A.
    """
    word = challenge.word if isinstance(challenge, Challenge) else int(challenge)
    hidden = None if hidden_bit is None else np.asarray([hidden_bit & 1])
    cols, rows = expand_batch(
        np.asarray([word], dtype=np.uint64), hidden, for_array_b, cs, m_rows, n_cols, mode
    )
    return Selection(tuple(int(c) for c in cols[0]), (int(rows[0, 0]), int(rows[0, 1])))


def pack_selection(sel: Selection) -> int:
    """Canonical 64-bit encoding of a selection (column order ignored)."""
    return derive_key_int(*sorted(sel.columns), sel.row_pair[0], sel.row_pair[1])


# ---------------------------------------------------------------------------
# comparator
# ---------------------------------------------------------------------------


def msal_compare(
    i_p: float,
    i_q: float,
    comp: ComparatorParams,
    rng: np.random.Generator | None = None,
) -> int:
    """Sense-amplifier decision: 1 if i_p - i_q + offset is positive.

    Differences inside the sense margin are metastable and resolve to a fair
    coin flip drawn from ``rng``.
    """
    delta = i_p - i_q + comp.offset_value
    if abs(delta) <= comp.sense_margin:
        if rng is None:
            raise ValueError("rng required for a metastable comparison")
        return 1 if rng.random() < 0.5 else 0
    return 1 if delta > 0.0 else 0


# ---------------------------------------------------------------------------
# evaluation engine
# ---------------------------------------------------------------------------


def _pair_currents(
    array: CrossbarArray,
    rows: np.ndarray,
    cols: np.ndarray,
    keys: np.ndarray,
    env: Environment,
    supply_slot: int,
    temp_base_p: int,
    temp_base_q: int,
):
    """Currents of two rows read simultaneously over a shared column set.

    One supply draw covers the whole read; temperature jitter is per cell.
    """
    cs = cols.shape[1]
    r_p = array.resistances[rows[:, 0:1], cols]
    r_q = array.resistances[rows[:, 1:2], cols]
    if env.supply_sigma_frac > 0.0:
        dv = block_normal(keys, supply_slot, 1)[..., 0] * env.supply_sigma_frac
        v_eff = env.read_voltage * (1.0 + dv)
    else:
        v_eff = np.full(len(keys), env.read_voltage)
    if env.temp_jitter > 0.0:
        t_p = env.temperature + (block_uniform(keys, temp_base_p, cs) * 2.0 - 1.0) * env.temp_jitter
        t_q = env.temperature + (block_uniform(keys, temp_base_q, cs) * 2.0 - 1.0) * env.temp_jitter
    else:
        t_p = env.temperature
        t_q = env.temperature
    i_p = current_law(r_p, v_eff[:, None], t_p, array.params).sum(axis=1)
    i_q = current_law(r_q, v_eff[:, None], t_q, array.params).sum(axis=1)
    return i_p, i_q


def _dummy_current(
    dummy: CrossbarArray, keys: np.ndarray, env: Environment, dummy_count: int
) -> np.ndarray:
    """Summed current of dummy_count distinct dummy cells, freshly drawn per
    evaluation from the substream (never from the challenge)."""
    k = len(keys)
    ncells = dummy.rows * dummy.cols
    if dummy_count > ncells:
        raise ValueError("dummy_count exceeds dummy array cell count")
    picked = np.full((k, dummy_count), -1, dtype=np.int64)
    npick = np.zeros(k, dtype=np.int64)
    ctr = _BASE_DUMMY_SEL
    while True:
        open_slots = npick < dummy_count
        if not open_slots.any():
            break
        if ctr >= _BASE_DUMMY_TEMP:
            raise RuntimeError("dummy cell draw exhausted its counter region")
        cand = (prf_u64(keys, _U64(ctr)) % _U64(ncells)).astype(np.int64)
        dup = (picked == cand[:, None]).any(axis=1)
        take = open_slots & ~dup
        if take.any():
            picked[take, npick[take]] = cand[take]
            npick[take] += 1
        ctr += 1
    r_d = dummy.resistances.reshape(-1)[picked]
    if env.supply_sigma_frac > 0.0:
        dv = block_normal(keys, _SLOT_SUPPLY_D, 1)[..., 0] * env.supply_sigma_frac
        v_eff = env.read_voltage * (1.0 + dv)
    else:
        v_eff = np.full(k, env.read_voltage)
    if env.temp_jitter > 0.0:
        t_d = env.temperature + (
            block_uniform(keys, _BASE_DUMMY_TEMP, dummy_count) * 2.0 - 1.0
        ) * env.temp_jitter
    else:
        t_d = env.temperature
    return current_law(r_d, v_eff[:, None], t_d, dummy.params).sum(axis=1)


def _evaluate_keys(
    puf: PufInstance,
    expansions: dict,
    word_index: np.ndarray,
    keys: np.ndarray,
    env: Environment,
    dummy_count: int,
    power_params: PowerParams,
    pipeline: str,
):
    """Evaluate one substream key per entry; expansions are indexed by
    word_index so repeated trials of a challenge share its addresses."""
    cols_a = expansions["cols_a"][word_index]
    rows_a = expansions["rows_a"][word_index]
    i_p_a, i_q_a = _pair_currents(
        puf.cba_a, rows_a, cols_a, keys, env, _SLOT_SUPPLY_A, _BASE_TEMP_A_P, _BASE_TEMP_A_Q
    )
    delta_a = i_p_a - i_q_a + puf.comp_a.offset_value
    coin_a = prf_uniform(keys, _U64(_SLOT_COIN_A)) < 0.5
    hidden = np.where(np.abs(delta_a) <= puf.comp_a.sense_margin, coin_a, delta_a > 0.0)

    if pipeline == "single":
        bit = hidden.astype(np.uint8)
        i_p, i_q = i_p_a, i_q_a
        i_d = np.zeros(len(keys))
        total_i = i_p_a + i_q_a
    elif pipeline == "dual":
        cols_b = np.where(
            hidden[:, None], expansions["cols_b1"][word_index], expansions["cols_b0"][word_index]
        )
        rows_b = np.where(
            hidden[:, None], expansions["rows_b1"][word_index], expansions["rows_b0"][word_index]
        )
        i_p, i_q = _pair_currents(
            puf.cba_b, rows_b, cols_b, keys, env, _SLOT_SUPPLY_B, _BASE_TEMP_B_P, _BASE_TEMP_B_Q
        )
        delta_b = i_p - i_q + puf.comp_b.offset_value
        coin_b = prf_uniform(keys, _U64(_SLOT_COIN_B)) < 0.5
        bit = np.where(
            np.abs(delta_b) <= puf.comp_b.sense_margin, coin_b, delta_b > 0.0
        ).astype(np.uint8)
        if dummy_count > 0:
            i_d = _dummy_current(puf.dummy, keys, env, dummy_count)
        else:
            i_d = np.zeros(len(keys))
        total_i = i_p_a + i_q_a + i_p + i_q + i_d
    else:
        raise ValueError(f"unknown pipeline: {pipeline!r}")

    power = env.read_voltage * total_i + power_params.baseline_cmos_power
    power = power + bit * power_params.output_driver_power
    if power_params.p_noise > 0.0:
        power = power + prf_normal(keys, _U64(_SLOT_PNOISE)) * power_params.p_noise
    power = np.maximum(power, 0.0)
    return {
        "bit": bit,
        "hidden": hidden.astype(np.uint8),
        "i_p": i_p,
        "i_q": i_q,
        "i_d": i_d,
        "power": power,
    }


def _expansions_for(puf: PufInstance, words: np.ndarray, pipeline: str, mode: str) -> dict:
    zeros = np.zeros(len(words), dtype=np.uint64)
    ones = np.ones(len(words), dtype=np.uint64)
    cols_a, rows_a = expand_batch(words, None, False, puf.cs, puf.rows, puf.cols, mode)
    exp = {"cols_a": cols_a, "rows_a": rows_a}
    if pipeline == "dual":
        exp["cols_b0"], exp["rows_b0"] = expand_batch(
            words, zeros, True, puf.cs, puf.rows, puf.cols, mode
        )
        exp["cols_b1"], exp["rows_b1"] = expand_batch(
            words, ones, True, puf.cs, puf.rows, puf.cols, mode
        )
    return exp


def evaluate_grid(
    puf: PufInstance,
    words,
    env: Environment,
    dummy_count: int = 0,
    trials: int = 1,
    power_params: PowerParams | None = None,
    pipeline: str = "dual",
    expand_mode: str = "lfsr",
) -> dict:
    """Evaluate a challenge list over repeated trials.

    Returns arrays of shape (len(words), trials): response bits, hidden bits,
    second-stage row currents, dummy current, and read power.  Entry (i, j)
    depends only on (instance_seed, words[i], j), never on batch shape.
    """
    words = np.asarray(words, dtype=np.uint64)
    if words.ndim != 1:
        raise ValueError("words must be a 1-D array of 64-bit challenges")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    power_params = power_params or PowerParams()
    exp = _expansions_for(puf, words, pipeline, expand_mode)
    n = len(words)
    word_index = np.repeat(np.arange(n), trials)
    trial_nums = np.tile(np.arange(trials, dtype=np.uint64), n)
    keys = derive_key(DOMAIN_EVAL, puf.instance_seed, words[word_index], trial_nums)
    out = _evaluate_keys(
        puf, exp, word_index, keys, env, dummy_count, power_params, pipeline
    )
    return {name: arr.reshape(n, trials) for name, arr in out.items()}


def evaluate_bit(
    puf: PufInstance,
    challenge: Challenge | int,
    env: Environment,
    dummy_count: int = 0,
    stream: EvalStream | None = None,
    trial: int = 0,
    power_params: PowerParams | None = None,
) -> EvalOutcome:
    """Produce one response bit.

    Noise draws come from ``stream`` if given, else from the canonical
    substream for (instance_seed, challenge, trial); with all noise sources
    at zero the bit is a pure function of (instance_seed, challenge).
    """
    word = challenge.word if isinstance(challenge, Challenge) else int(challenge)
    if not 0 <= word <= _MASK64:
        raise ValueError("challenge must fit in 64 bits")
    power_params = power_params or PowerParams()
    words = np.asarray([word], dtype=np.uint64)
    exp = _expansions_for(puf, words, "dual", "lfsr")
    if stream is None:
        stream = EvalStream.for_eval(puf.instance_seed, word, trial)
    keys = np.asarray([stream.key], dtype=np.uint64)
    out = _evaluate_keys(
        puf, exp, np.zeros(1, dtype=np.int64), keys, env, dummy_count, power_params, "dual"
    )
    return EvalOutcome(
        bit=int(out["bit"][0]),
        hidden_bit=int(out["hidden"][0]),
        i_p=float(out["i_p"][0]),
        i_q=float(out["i_q"][0]),
        i_d=float(out["i_d"][0]),
        power=float(out["power"][0]),
    )


# ---------------------------------------------------------------------------
# challenge-response space size
# ---------------------------------------------------------------------------


def crp_count(
    n_cols: int,
    m_rows: int,
    cs: int,
    l: int = 1,
    formula: str = "eq5",
    floor_log2: bool = False,
) -> int:
    """Size of the challenge-response space, in exact integer arithmetic.

    ``eq5`` counts addressable configurations: C(N, CS) * C(M, 2) * l.
    ``table1`` weighs the row-pair choice by its information content:
    C(N, CS) * C(M, 2) * log2(C(M, 2)), rounded down after an exact
    rational product; ``floor_log2`` truncates log2 to an integer first.
    """
    if cs < 1 or n_cols < cs:
        raise ValueError("need 1 <= cs <= n_cols")
    if m_rows < 2:
        raise ValueError("need at least two rows")
    if l < 1:
        raise ValueError("hidden-challenge multiplicity must be at least 1")
    pairs = math.comb(m_rows, 2)
    base = math.comb(n_cols, cs) * pairs
    if formula == "eq5":
        return base * l
    if formula == "table1":
        if pairs == 1:
            return 0
        if floor_log2:
            return base * int(math.log2(pairs))
        return int(base * Fraction(math.log2(pairs)))
    raise ValueError(f"unknown formula: {formula!r}")
