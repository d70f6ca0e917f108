"""Seeded Monte Carlo bit generation and empirical bit statistics.

Uniform stream
--------------
The stream named :data:`STREAM_NAME` is Philox4x64 with 10 rounds (numpy's
``Philox`` bit generator). For a 64-bit ``seed`` and a 64-bit ``substream``
the 128-bit key is ``seed + 2**64 * substream``. Draw ``r`` (0-based) is the
``r``-th raw 64-bit output, i.e. lane ``r % 4`` of counter block ``r // 4``,
mapped to ``u = (raw >> 11) * 2**-53`` in [0, 1). Any draw can be reached by
setting the counter, so a run can be cut into chunks or spread over workers
without changing a single bit.
"""

from __future__ import annotations

import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numpy.random import Philox

from .dyadic import check_bit_index, expand_array
from .exact import BitStatistics
from .exceptions import DomainError

STREAM_NAME = "philox4x64-10/u53/v1"

#: Above this many rows, draw_bits keeps only the counts by default.
STORE_LIMIT = 10_000_000

DEFAULT_CHUNK = 1 << 16

_U64 = 1 << 64


def check_seed(seed, name="seed"):
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise DomainError(f"{name} must be an integer, got {seed!r}")
    if not 0 <= seed < _U64:
        raise DomainError(f"{name} must be an unsigned 64-bit integer, got {seed}")
    return int(seed)


def uniforms(seed, count, *, substream=0, start=0):
    """Draws ``start .. start + count - 1`` of the seeded uniform stream."""
    seed, substream = check_seed(seed), check_seed(substream, "substream")
    if count < 0 or start < 0:
        raise DomainError("count and start must be nonnegative")
    block, lane = divmod(int(start), 4)
    gen = Philox(key=seed + (substream << 64), counter=[block, 0, 0, 0])
    raw = gen.random_raw(count + lane)[lane:]
    return (raw >> np.uint64(11)).astype(np.float64) * 2.0 ** -53


def bits_from_uniforms(model, n, u):
    """Rows ``expand(inverse_cdf(model, u_k), n)`` for given uniform variates."""
    return expand_array(model.inverse_cdf(np.asarray(u, dtype=np.float64)), n)


@dataclass
class BitCounts:
    """Mergeable sufficient statistics of a bit matrix: row count, column
    sums and pairwise co-occurrence counts."""

    n: int
    rows: int = 0
    ones: np.ndarray = None
    both: np.ndarray = None

    def __post_init__(self):
        if self.ones is None:
            self.ones = np.zeros(self.n, dtype=np.int64)
        if self.both is None:
            self.both = np.zeros((self.n, self.n), dtype=np.int64)

    def update(self, bits):
        bits = np.asarray(bits)
        if bits.ndim != 2 or bits.shape[1] != self.n:
            raise DomainError(f"expected a (rows, {self.n}) bit matrix, got {bits.shape}")
        f = bits.astype(np.float64)
        self.rows += bits.shape[0]
        self.ones += bits.sum(axis=0, dtype=np.int64)
        # float64 products of 0/1 entries are exact below 2**53 rows
        self.both += np.rint(f.T @ f).astype(np.int64)
        return self

    def merge(self, other):
        if other.n != self.n:
            raise DomainError("cannot merge counts for different precisions")
        return BitCounts(self.n, self.rows + other.rows,
                         self.ones + other.ones, self.both + other.both)

    def statistics(self, seed=None):
        if self.rows < 2:
            raise DomainError("empirical statistics need at least 2 rows")
        p = self.ones / self.rows
        joint = self.both / self.rows
        return BitStatistics.from_moments(p, joint, source="empirical",
                                          sample_count=self.rows, seed=seed,
                                          var_floor=0.0)


@dataclass
class SampleRun:
    model: object
    n: int
    count: int
    seed: int
    substream: int = 0
    bits: np.ndarray | None = None
    counts: BitCounts = field(default=None, repr=False)


def _row_ranges(count, chunk_size):
    return [(s, min(chunk_size, count - s)) for s in range(0, count, chunk_size)]


def iter_bit_chunks(model, n, count, seed, *, substream=0, chunk_size=DEFAULT_CHUNK):
    """Yield successive ``(rows, n)`` uint8 blocks of a run without storing it."""
    n = check_bit_index(n, "n")
    for start, size in _row_ranges(count, chunk_size):
        yield bits_from_uniforms(model, n, uniforms(seed, size, substream=substream,
                                                    start=start))


def draw_bits(model, n, count, seed, *, substream=0, store=None,
              chunk_size=DEFAULT_CHUNK, workers=1):
    """Draw ``count`` variates from ``model`` by inverse transform and expand each to ``n`` bits.

    Parameters
    ----------
    store : bool, optional
        Keep the full bit matrix on the run. Defaults to ``count <= 1e7``;
        counts are always accumulated.
    workers : int
        Threads used to process chunks. The output does not depend on it.
    """
    n = check_bit_index(n, "n")
    seed = check_seed(seed)
    if isinstance(count, bool) or not isinstance(count, (int, np.integer)) or count < 1:
        raise DomainError(f"count must be a positive integer, got {count!r}")
    count = int(count)
    if store is None:
        store = count <= STORE_LIMIT

    def work(rng):
        start, size = rng
        bits = bits_from_uniforms(
            model, n, uniforms(seed, size, substream=substream, start=start))
        return bits, BitCounts(n).update(bits)

    ranges = _row_ranges(count, chunk_size)
    counts = BitCounts(n)
    blocks = []
    if workers > 1 and len(ranges) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = pool.map(work, ranges)
            for bits, c in results:
                counts = counts.merge(c)
                if store:
                    blocks.append(bits)
    else:
        for rng in ranges:
            bits, c = work(rng)
            counts = counts.merge(c)
            if store:
                blocks.append(bits)
    matrix = np.concatenate(blocks) if store else None
    return SampleRun(model, n, count, seed, substream, matrix, counts)


def empirical_statistics(run):
    """Column means, co-occurrence frequencies and Pearson correlations of a run."""
    counts = run.counts
    if counts is None:
        counts = BitCounts(run.n).update(run.bits)
    return counts.statistics(seed=run.seed)


def write_bits(bits, out):
    """Write one ``'0'/'1'`` line per row of ``bits`` to a binary or text stream."""
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.ndim != 2:
        raise DomainError("expected a 2-D bit matrix")
    buf = np.empty((bits.shape[0], bits.shape[1] + 1), dtype=np.uint8)
    buf[:, :-1] = bits + ord("0")
    buf[:, -1] = ord("\n")
    data = buf.tobytes()
    if isinstance(out, io.TextIOBase):
        out.write(data.decode("ascii"))
    else:
        out.write(data)


def read_bits(stream):
    """Parse the raw-bit export format back into a uint8 matrix."""
    text = stream.read()
    if isinstance(text, bytes):
        text = text.decode("ascii")
    rows = text.splitlines()
    if not rows:
        return np.zeros((0, 0), dtype=np.uint8)
    width = len(rows[0])
    if any(len(r) != width or set(r) - {"0", "1"} for r in rows):
        raise DomainError("malformed bit stream: rows must be equal-length 0/1 strings")
    return (np.frombuffer("".join(rows).encode("ascii"), dtype=np.uint8)
            .reshape(len(rows), width) - ord("0"))
