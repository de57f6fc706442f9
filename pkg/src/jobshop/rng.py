"""Deterministic random streams for search tie-breaking and shuffles.

Built on numpy's counter-based Philox generator so that streams are
splittable: a (seed, key) pair fully determines the stream, and distinct
keys give statistically independent streams.  A benchmark harness can
therefore run many (instance, seed) cells in parallel while each cell
remains bit-reproducible in isolation.
"""

from __future__ import annotations

import numpy as np

__all__ = ["RandomStream"]

_BUF = 4096


class RandomStream:
    """Buffered uniform integers from a keyed Philox generator.

    randint(n) uses a simple modulo reduction; the bias is far below
    anything that matters for tie-breaking, and keeping the reduction
    trivial makes the stream easy to reproduce in other languages.
    """

    __slots__ = ("seed", "key", "_gen", "_buf")

    def __init__(self, seed: int = 0, key: int = 0):
        self.seed = seed
        self.key = key
        self._gen = np.random.Generator(
            np.random.Philox(key=[seed & (2**64 - 1), key & (2**64 - 1)])
        )
        self._buf: list[int] = []

    def randint(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        if n <= 1:
            return 0
        buf = self._buf
        if not buf:
            self._buf = buf = self._gen.integers(
                0, 1 << 62, size=_BUF, dtype=np.int64
            ).tolist()
        return buf.pop() % n

    def choice(self, seq):
        return seq[self.randint(len(seq))]

    def shuffle(self, seq) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(seq) - 1, 0, -1):
            j = self.randint(i + 1)
            seq[i], seq[j] = seq[j], seq[i]

    def spawn(self, key: int) -> "RandomStream":
        """Independent stream derived from the same seed with a new key."""
        return RandomStream(self.seed, key)
