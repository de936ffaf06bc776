"""Deterministic counter-based random substreams.

Every stochastic quantity in an evaluation is addressed as ``prf(key, counter)``
where ``key`` identifies the (instance, challenge, trial) substream and the
counter identifies the draw within it.  Results therefore never depend on how
work is batched or scheduled across processes, which is what makes reports
byte-identical for any worker count.

The mixer is the splitmix64 finalizer; streams are the splitmix64 output
sequence seeded at ``key``.  All helpers operate on uint64 ndarrays so numpy's
wrapping arithmetic applies (scalar uint64 ops would warn on overflow).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX_M1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX_M2 = np.uint64(0x94D049BB133111EB)
_CHAIN_INIT = np.uint64(0xA0761D6478BD642F)

_U64_MASK = (1 << 64) - 1

# fixed domain tags so unrelated draws can never share a substream
DOMAIN_EVAL = 1
DOMAIN_INSTANCE = 2
DOMAIN_ARRAY_A = 3
DOMAIN_ARRAY_B = 4
DOMAIN_ARRAY_DUMMY = 5
DOMAIN_COMPARATORS = 6
DOMAIN_EXPERIMENT = 7


def _as_u64(x) -> np.ndarray:
    return np.asarray(x, dtype=np.uint64)


def mix64(x) -> np.ndarray:
    """Splitmix64 finalizer, a bijection on 64-bit words.

    Wrapping multiplication is intended; errstate silences numpy's scalar
    overflow warning (array ops already wrap silently).
    """
    with np.errstate(over="ignore"):
        z = _as_u64(x).copy()
        z ^= z >> np.uint64(30)
        z *= _MIX_M1
        z ^= z >> np.uint64(27)
        z *= _MIX_M2
        z ^= z >> np.uint64(31)
    return z


def derive_key(*fields) -> np.ndarray:
    """Chain-mix integer fields (scalars or broadcastable arrays) into a key.

    Order matters: derive_key(a, b) != derive_key(b, a) except by accident.
    """
    h = _CHAIN_INIT
    for field in fields:
        h = mix64(np.bitwise_xor(h, mix64(_as_u64(field) + _GAMMA)))
    return h


def derive_key_int(*fields) -> int:
    return int(derive_key(*fields))


def prf_u64(keys, ctrs) -> np.ndarray:
    """Raw 64-bit draw; ``keys`` and ``ctrs`` broadcast against each other."""
    with np.errstate(over="ignore"):
        seq = _as_u64(keys) + (_as_u64(ctrs) + np.uint64(1)) * _GAMMA
    return mix64(seq)


def prf_uniform(keys, ctrs) -> np.ndarray:
    """Uniform float64 in [0, 1)."""
    return (prf_u64(keys, ctrs) >> np.uint64(11)).astype(np.float64) * 2.0**-53


def _uniform_open(keys, ctrs) -> np.ndarray:
    # (0, 1]; safe as a log() argument
    return ((prf_u64(keys, ctrs) >> np.uint64(11)) + np.uint64(1)).astype(
        np.float64
    ) * 2.0**-53


def prf_normal(keys, even_ctrs) -> np.ndarray:
    """Standard normal via Box-Muller; consumes counters (c, c+1) per draw."""
    c = _as_u64(even_ctrs)
    u1 = _uniform_open(keys, c)
    u2 = prf_uniform(keys, c + np.uint64(1))
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


def block_uniform(keys, base: int, count: int) -> np.ndarray:
    """Uniforms at counters base..base+count-1, shape keys.shape + (count,)."""
    ctrs = np.arange(base, base + count, dtype=np.uint64)
    return prf_uniform(_as_u64(keys)[..., None], ctrs)


def block_normal(keys, base: int, count: int) -> np.ndarray:
    """Normals at counter pairs (base+2i, base+2i+1)."""
    ctrs = np.arange(0, 2 * count, 2, dtype=np.uint64) + np.uint64(base)
    return prf_normal(_as_u64(keys)[..., None], ctrs)


@dataclass(frozen=True)
class EvalStream:
    """One evaluation's substream, addressed by purpose-specific counters."""

    key: int

    @classmethod
    def for_eval(cls, instance_seed: int, challenge_word: int, trial: int) -> "EvalStream":
        """Derive the canonical substream for one (instance, challenge, trial)."""
        return cls(derive_key_int(DOMAIN_EVAL, instance_seed & _U64_MASK,
                                  challenge_word & _U64_MASK, trial))

    def uniform(self, ctr: int, count: int | None = None):
        if count is None:
            return float(prf_uniform(np.uint64(self.key), np.uint64(ctr)))
        return block_uniform(np.uint64(self.key), ctr, count)

    def normal(self, ctr: int, count: int | None = None):
        if count is None:
            return float(prf_normal(np.uint64(self.key), np.uint64(ctr)))
        return block_normal(np.uint64(self.key), ctr, count)
