"""Counter-based random streams.

Every trial owns a stream keyed on ``(seed, stream_id)``; the k-th draw of
that stream is a pure function of ``(seed, stream_id, k)``.  Results are
therefore independent of how trials are scheduled, and the compiled trial
kernel reproduces the same draws bit for bit.

The mixing function is the SplitMix64 finalizer.
"""

from __future__ import annotations

MASK64 = 0xFFFFFFFFFFFFFFFF
GOLDEN = 0x9E3779B97F4A7C15
_INV_2_53 = 1.0 / 9007199254740992.0


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def stream_key(seed: int, stream_id: int) -> int:
    return mix64(seed + (stream_id + 1) * GOLDEN)


def uniform_at(key: int, counter: int) -> float:
    """Uniform double in [0, 1) for draw ``counter`` of the stream ``key``."""
    return (mix64(key + (counter + 1) * GOLDEN) >> 11) * _INV_2_53


def check_seed(seed) -> int:
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise TypeError(f"seed must be an int, got {type(seed).__name__}")
    if not 0 <= seed <= MASK64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


class RandomStream:
    """Sequential view of one counter-based stream.

    Parameters
    ----------
    seed : int
        64-bit unsigned run seed.
    stream_id : int
        Index of the stream within the run, e.g. the trial index.
    """

    __slots__ = ("seed", "stream_id", "_key", "_counter")

    def __init__(self, seed: int, stream_id: int = 0):
        self.seed = check_seed(seed)
        self.stream_id = stream_id
        self._key = stream_key(seed, stream_id)
        self._counter = 0

    def random(self) -> float:
        u = uniform_at(self._key, self._counter)
        self._counter += 1
        return u

    @property
    def draws(self) -> int:
        return self._counter

    def __repr__(self):
        return f"RandomStream(seed={self.seed}, stream_id={self.stream_id}, draws={self._counter})"
