"""Reproducible random streams.

A ``(seed, stream_id)`` pair fully determines a sample sequence, and distinct
stream ids give statistically independent sequences (Philox keyed through
``SeedSequence`` spawn keys).  Estimators split work into fixed-size chunks
and derive one child stream per chunk, so results are bit-identical no matter
how chunks are scheduled across workers.
"""

from dataclasses import dataclass

import numpy as np

# child streams occupy the low 20 bits of the id; chunk indices stay well
# below that in practice (2^20 chunks = 1.4e11 samples at the default size)
_CHILD_SPAN = 1 << 20


@dataclass(frozen=True)
class RandomStream:
    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.Philox(ss))

    def child(self, index: int) -> "RandomStream":
        """Substream ``index`` of this stream (one per work chunk)."""
        if not 0 <= index < _CHILD_SPAN - 1:
            raise ValueError(f"substream index out of range: {index}")
        return RandomStream(self.seed, self.stream_id * _CHILD_SPAN + index + 1)


def as_generator(rng) -> np.random.Generator:
    """Accept a RandomStream or a ready numpy Generator."""
    if isinstance(rng, RandomStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected RandomStream or numpy Generator, got {type(rng)!r}")
