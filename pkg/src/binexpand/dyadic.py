"""Binary expansions of numbers in [0, 1] and the dyadic partitions they induce.

Bit ``i`` (1-based, most significant first) of ``x`` is ``floor(x * 2**i) mod 2``.
The set of points where bit ``i`` equals 1 is the union of the ``2**(i-1)``
half-open intervals ``[(2j - 1) / 2**i, 2j / 2**i)``; the final interval is
closed at 1 so that ``x = 1`` expands to all ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .exceptions import DomainError

#: Largest supported expansion precision (fraction bits of a float64).
MAX_BITS = 52

#: Largest bit index whose interval list is materialised in memory.
MAX_ENUMERATED_BIT = 26


def check_bit_index(i, name="i"):
    if isinstance(i, bool) or not isinstance(i, (int, np.integer)):
        raise DomainError(f"{name} must be an integer, got {i!r}")
    if not 1 <= i <= MAX_BITS:
        raise DomainError(f"{name} must lie in [1, {MAX_BITS}], got {i}")
    return int(i)


def check_unit(x, name="x"):
    x = float(x)
    if not 0.0 <= x <= 1.0:  # also rejects nan
        raise DomainError(f"{name} must lie in [0, 1], got {x!r}")
    return x


@dataclass(frozen=True)
class BitVector:
    """An ``n``-bit truncated binary expansion ``0.b1 b2 ... bn``."""

    bits: tuple

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if not bits:
            raise DomainError("a BitVector needs at least one bit")
        if len(bits) > MAX_BITS:
            raise DomainError(f"at most {MAX_BITS} bits are supported")
        if any(b not in (0, 1) for b in bits):
            raise DomainError(f"bits must be 0 or 1, got {self.bits!r}")
        object.__setattr__(self, "bits", bits)

    @property
    def n(self):
        return len(self.bits)

    def __len__(self):
        return len(self.bits)

    def __iter__(self):
        return iter(self.bits)

    def __getitem__(self, k):
        return self.bits[k]

    def __str__(self):
        return "".join(map(str, self.bits))

    @classmethod
    def from_string(cls, s):
        return cls(tuple(int(c) for c in s.strip()))

    @property
    def value(self):
        return value_of(self)


@dataclass(frozen=True)
class DyadicIntervalSet:
    """Intervals of [0, 1] on which bit ``bit_index`` equals ``bit_value``.

    The endpoint arrays are built on first access. Membership tests and the
    total length are computed arithmetically, so sets for large indices can be
    queried without enumerating ``2**(i-1)`` intervals.
    """

    bit_index: int
    bit_value: int

    def __post_init__(self):
        check_bit_index(self.bit_index, "bit_index")
        if self.bit_value not in (0, 1):
            raise DomainError(f"bit_value must be 0 or 1, got {self.bit_value!r}")

    def __len__(self):
        return 1 << (self.bit_index - 1)

    @property
    def width(self):
        return 2.0 ** -self.bit_index

    @property
    def total_length(self):
        return 0.5

    @cached_property
    def lo(self):
        if self.bit_index > MAX_ENUMERATED_BIT:
            raise DomainError(
                f"refusing to enumerate 2**{self.bit_index - 1} intervals; "
                f"bit indices above {MAX_ENUMERATED_BIT} are membership-only")
        k = 2 * np.arange(len(self), dtype=np.float64) + self.bit_value
        return k * self.width

    @cached_property
    def hi(self):
        return self.lo + self.width

    @property
    def intervals(self):
        """List of ``(lo, hi)`` pairs sorted by ``lo``."""
        return list(zip(self.lo.tolist(), self.hi.tolist()))

    def __iter__(self):
        return iter(self.intervals)

    @property
    def closed_at_one(self):
        # only the value-1 set reaches the right edge
        return self.bit_value == 1

    def __contains__(self, x):
        x = check_unit(x)
        return expand_array(np.array([x]), self.bit_index)[0, -1] == self.bit_value


def expand_array(x, n):
    """Vectorised expansion: an array of shape ``x.shape + (n,)`` of uint8 bits.

    Bits are produced by exact repeated doubling, so the result does not depend
    on float formatting. ``x == 1`` maps to all ones.
    """
    n = check_bit_index(n, "n")
    x = np.asarray(x, dtype=np.float64)
    if np.any(~((x >= 0.0) & (x <= 1.0))):
        raise DomainError("all values must lie in [0, 1]")
    out = np.empty(x.shape + (n,), dtype=np.uint8)
    frac = np.where(x == 1.0, 0.0, x)
    for i in range(n):
        frac = frac * 2.0
        bit = frac >= 1.0
        out[..., i] = bit
        frac = frac - bit
    out[x == 1.0] = 1
    return out


def expand(x, n):
    """Truncate the binary expansion of ``x`` to ``n`` bits.

    >>> str(expand(0.72, 6))
    '101110'
    """
    x = check_unit(x)
    return BitVector(tuple(expand_array(np.array(x), n).tolist()))


def bit_intervals(i, value):
    """The dyadic intervals on which bit ``i`` takes ``value``."""
    return DyadicIntervalSet(check_bit_index(i), value)


def value_of(bits):
    """``sum(b_i * 2**-i)``; exact in float64 for up to 52 bits."""
    bits = bits.bits if isinstance(bits, BitVector) else BitVector(tuple(bits)).bits
    return float(sum(b * 2.0 ** -(k + 1) for k, b in enumerate(bits)))


def intersect(a, b):
    """Intersect two dyadic interval sets, returning ``(lo, hi)`` arrays.

    Both sets are unions of equal-width dyadic intervals, so the finer set's
    intervals either lie inside one coarser interval or miss it entirely. The
    intersection is therefore the finer intervals whose midpoint falls in the
    coarser set.
    """
    fine, coarse = (a, b) if a.bit_index >= b.bit_index else (b, a)
    mid = 0.5 * (fine.lo + fine.hi)
    shift = coarse.bit_index
    keep = (np.floor(mid * 2.0 ** shift).astype(np.int64) & 1) == coarse.bit_value
    return fine.lo[keep], fine.hi[keep]
