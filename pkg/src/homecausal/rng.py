"""Deterministic, portable random number generation.

All sampling in this package is driven by a counter-based SplitMix64
stream so that fixtures are reproducible across platforms, Python
versions, and kernel backends (compiled and pure-Python kernels consume
the identical stream).

Stream definition, for external consumers of the file formats:

    output(seed, i) = mix64((seed + (i + 1) * 0x9E3779B97F4A7C15) mod 2^64)

where ``mix64`` is the standard SplitMix64 finalizer

    z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9  (mod 2^64)
    z ^= z >> 27;  z *= 0x94D049BB133111EB  (mod 2^64)
    z ^= z >> 31

and a uniform double in [0, 1) is ``(output >> 11) * 2**-53``.

When sampling a dataset of n records over m variables, the draw for
record r and variable column c uses counter ``r * m + c``.  Derived
seeds for sub-tasks are produced by folding labelled tokens into the
seed with :func:`derive_seed`.
"""
from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3

TWO_NEG53 = 2.0 ** -53


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a 64-bit integer."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return z ^ (z >> 31)


def stream_u64(seed: int, counter: int) -> int:
    """The ``counter``-th 64-bit output of the stream for ``seed``."""
    return mix64((seed + ((counter + 1) * GOLDEN)) & MASK64)


def stream_uniform(seed: int, counter: int) -> float:
    """The ``counter``-th uniform double in [0, 1)."""
    return (stream_u64(seed, counter) >> 11) * TWO_NEG53


def _token_u64(token: int | str) -> int:
    if isinstance(token, int):
        return token & MASK64
    h = _FNV_OFFSET
    for byte in token.encode("utf-8"):
        h = ((h ^ byte) * _FNV_PRIME) & MASK64
    return h


def derive_seed(seed: int, *tokens: int | str) -> int:
    """Fold labelled tokens into ``seed``, yielding an independent sub-seed.

    The derivation is order-sensitive and collision-resistant enough for
    test scheduling: ``h = mix64(h ^ mix64(token))`` per token.
    """
    h = seed & MASK64
    for token in tokens:
        h = mix64(h ^ mix64(_token_u64(token)))
    return h
