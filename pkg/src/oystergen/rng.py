"""Deterministic random streams and stable seed derivation.

Every random draw in this package goes through :class:`Rng`, a SplitMix64
generator, so that output bytes never depend on Python or numpy RNG
internals and can be reproduced from the documented algorithm alone.

Stream contract:

* state advances by the golden-ratio gamma ``0x9E3779B97F4A7C15`` and each
  output is the standard SplitMix64 finalizer (xor-shift 30 / 27 / 31 with
  multipliers ``0xBF58476D1CE4E5B9`` and ``0x94D049BB133111EB``);
* uniform doubles take the top 53 bits of one output;
* gaussians use Box-Muller, consuming two uniforms per pair and caching the
  second variate, so the underlying stream position is the same no matter
  how the pair is consumed;
* child seeds are 64-bit FNV-1a over ``le64(parent) + label + le64(index)``.
"""

from __future__ import annotations

import math

_MASK64 = (1 << 64) - 1

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3

_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a hash of a byte string."""
    h = _FNV_OFFSET
    for b in data:
        h ^= b
        h = (h * _FNV_PRIME) & _MASK64
    return h


def fnv1a64_file(path) -> int:
    """FNV-1a of a file's bytes, streamed in 64 KiB chunks."""
    h = _FNV_OFFSET
    with open(path, "rb") as fh:
        while True:
            chunk = fh.read(65536)
            if not chunk:
                return h
            for b in chunk:
                h ^= b
                h = (h * _FNV_PRIME) & _MASK64


def derive_seed(master_seed: int, label: str, index: int = 0) -> int:
    """Stable 64-bit child seed for (master_seed, label, index).

    Identical across platforms and worker counts; used to give every
    generated artifact its own independent stream.
    """
    payload = (
        (master_seed & _MASK64).to_bytes(8, "little")
        + label.encode("utf-8")
        + (index & _MASK64).to_bytes(8, "little")
    )
    return fnv1a64(payload)


class Rng:
    """SplitMix64 stream with uniform and gaussian draws."""

    __slots__ = ("_state", "_gauss_cache")

    def __init__(self, seed: int):
        self._state = seed & _MASK64
        self._gauss_cache: float | None = None

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
        return z ^ (z >> 31)

    def random(self) -> float:
        """Uniform double in [0, 1), 53 random bits."""
        return (self.next_u64() >> 11) * 2.0**-53

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.random()

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi], both ends inclusive.

        Modulo reduction; the bias is unobservable for the tiny ranges used
        here (span << 2**64).
        """
        if hi < lo:
            raise ValueError(f"empty integer range [{lo}, {hi}]")
        return lo + self.next_u64() % (hi - lo + 1)

    def normal(self, mu: float = 0.0, sigma: float = 1.0) -> float:
        """Gaussian draw via Box-Muller on the uniform stream."""
        z = self._gauss_cache
        if z is None:
            u1 = self.random()
            u2 = self.random()
            # 1 - u1 lies in (0, 1], so the log is finite.
            r = math.sqrt(-2.0 * math.log(1.0 - u1))
            z = r * math.cos(2.0 * math.pi * u2)
            self._gauss_cache = r * math.sin(2.0 * math.pi * u2)
        else:
            self._gauss_cache = None
        return mu + sigma * z

    def child(self, label: str, index: int = 0) -> "Rng":
        """Independent stream derived from this stream's current state."""
        return Rng(derive_seed(self._state, label, index))
