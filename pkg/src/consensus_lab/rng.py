"""Counter-derived deterministic RNG streams (splitmix64).

Every Monte Carlo replication draws from its own stream derived from
(seed, replication index), so results are bit-identical no matter how
replications are scheduled across workers. The compiled kernels implement
exactly the same generator and draw discipline; tests assert draw-for-draw
equality between the two backends.

Draw primitives:

* ``next_u64``  - raw 64-bit output
* ``below(k)``  - integer in [0, k) via the multiply-high reduction
  (bias < k/2^64, irrelevant at our k <= ~1e7)
* ``unit()``    - float in [0, 1) with 53 random bits
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """Finalizing bijection on 64-bit words (splitmix64 output function)."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def stream_state(seed: int, index: int) -> int:
    """Initial generator state for stream ``index`` of ``seed``.

    Injective in ``index`` for a fixed seed, and mixed so distinct streams
    start at unrelated points of the underlying sequence.
    """
    return mix64((seed + _GOLDEN * (index + 1)) & _MASK64)


class Stream:
    """One deterministic random stream."""

    __slots__ = ("state",)

    def __init__(self, seed: int, index: int = 0):
        self.state = stream_state(seed, index)

    def next_u64(self) -> int:
        self.state = (self.state + _GOLDEN) & _MASK64
        return mix64(self.state)

    def below(self, k: int) -> int:
        """Uniform integer in [0, k)."""
        return (self.next_u64() * k) >> 64

    def unit(self) -> float:
        """Uniform float in [0, 1)."""
        return (self.next_u64() >> 11) * (1.0 / 9007199254740992.0)
