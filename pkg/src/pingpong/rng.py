"""Counter-based random streams, one per protocol round.

Every round owns an independent stream derived from ``(seed, round_index)``,
so a round's draws never depend on how rounds are scheduled across workers.

Construction (all arithmetic mod 2**64)::

    mix(z)      = SplitMix64 finalizer:
                  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
                  z = (z ^ (z >> 27)) * 0x94D049BB133111EB
                  z =  z ^ (z >> 31)
    key         = mix(mix(seed) ^ round_index)
    word[k]     = mix(key + (k + 1) * 0x9E3779B97F4A7C15)     k = 0, 1, 2, ...
    uniform[k]  = (word[k] >> 11) * 2**-53                    in [0, 1)

``mix`` is a bijection, so distinct round indices under one seed get
distinct keys; ``word`` is plain SplitMix64 started from ``key``.
"""
from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_INV_2_53 = 1.0 / (1 << 53)


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def round_key(seed: int, round_index: int) -> int:
    if not 0 <= seed <= MASK64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    if round_index < 0:
        raise ValueError("round index must be non-negative")
    return mix64(mix64(seed) ^ (round_index & MASK64))


class RoundStream:
    """Uniform draws for a single round."""

    __slots__ = ("_state", "draws")

    def __init__(self, seed: int, round_index: int):
        self._state = round_key(seed, round_index)
        self.draws = 0

    def next_u64(self) -> int:
        self._state = (self._state + GOLDEN) & MASK64
        self.draws += 1
        return mix64(self._state)

    def random(self) -> float:
        return (self.next_u64() >> 11) * _INV_2_53
