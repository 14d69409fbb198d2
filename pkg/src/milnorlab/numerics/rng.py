"""Deterministic random streams."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RngSpec:
    """``(master_seed, stream_id)`` pins down a pseudo-random sequence.

    ``path`` records the parent streams when a stream is derived from
    another one, so nested consumers never share draws.
    """

    master_seed: int = 42
    stream_id: int = 0
    path: tuple = ()

    def __post_init__(self):
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")
        if self.stream_id < 0:
            raise ValueError("stream_id must be a natural number")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.master_seed, spawn_key=self.path + (self.stream_id,))
        return np.random.Generator(np.random.PCG64(ss))

    def stream(self, stream_id: int) -> RngSpec:
        """Sub-stream ``stream_id`` below this one."""
        return RngSpec(self.master_seed, stream_id, self.path + (self.stream_id,))


def chunked_map(fn, n_items: int, chunk: int, rng: RngSpec, workers: int = 1) -> list:
    """Run ``fn(count, rng_chunk)`` over fixed-size chunks of ``n_items``.

    Chunk ``c`` always gets ``rng.stream(c)`` and results come back in chunk
    order, so the output does not depend on ``workers``.
    """
    sizes = [min(chunk, n_items - s) for s in range(0, n_items, chunk)]
    jobs = [(size, rng.stream(c)) for c, size in enumerate(sizes)]
    if workers <= 1 or len(jobs) <= 1:
        return [fn(size, r) for size, r in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda job: fn(*job), jobs))
