"""Finite strict partial orders and the antichain/chain/interval toolkit.

Elements are the integers ``0..n-1``.  The strict order is stored fully
transitively closed as two tuples of int bitmasks: ``down[j]`` holds every
``i`` with ``i < j`` and ``up[i]`` every ``j`` with ``i < j``.  Sets of
elements are exchanged as ``frozenset[int]`` at the public surface and as
bitmasks internally.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import (
    CycleError,
    ExtensionFailed,
    NotAntichain,
    NotMaximalAntichain,
    OrderViolation,
    OutOfRange,
)

ElementSet = frozenset


def bits(mask: int):
    """Yield the set bit positions of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def members(mask: int) -> frozenset:
    return frozenset(bits(mask))


def popcount(mask: int) -> int:
    return bin(mask).count("1")


@dataclass(frozen=True)
class Poset:
    n: int
    down: tuple
    up: tuple

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[Sequence[int]]) -> "Poset":
        """Transitive closure of ``pairs`` (each ``(i, j)`` meaning ``i < j``)."""
        if n < 0:
            raise OutOfRange(f"negative element count {n}")
        up = [0] * n
        for pair in pairs:
            i, j = int(pair[0]), int(pair[1])
            if not (0 <= i < n and 0 <= j < n):
                raise OutOfRange(f"pair ({i}, {j}) outside 0..{n - 1}")
            up[i] |= 1 << j
        for k in range(n):
            kbit = 1 << k
            upk = up[k]
            for i in range(n):
                if up[i] & kbit:
                    up[i] |= upk
        for i in range(n):
            if up[i] >> i & 1:
                raise CycleError(f"relation has a cycle through element {i}")
        down = [0] * n
        for i in range(n):
            for j in bits(up[i]):
                down[j] |= 1 << i
        return cls(n, tuple(down), tuple(up))

    @classmethod
    def from_matrix(cls, lt: Sequence[Sequence[bool]]) -> "Poset":
        n = len(lt)
        return cls.from_pairs(n, [(i, j) for i in range(n) for j in range(n) if lt[i][j]])

    @classmethod
    def chain(cls, k: int) -> "Poset":
        return cls.from_pairs(k, [(i, i + 1) for i in range(k - 1)])

    @classmethod
    def antichain(cls, k: int) -> "Poset":
        return cls.from_pairs(k, [])

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def lt(self, i: int, j: int) -> bool:
        return bool(self.up[i] >> j & 1)

    def le(self, i: int, j: int) -> bool:
        return i == j or bool(self.up[i] >> j & 1)

    def comparable(self, i: int, j: int) -> bool:
        return bool((self.up[i] | self.down[i]) >> j & 1)

    def comparable_mask(self, i: int) -> int:
        return self.up[i] | self.down[i]

    def incomparable_mask(self, i: int) -> int:
        """Elements other than ``i`` that are incomparable to ``i``."""
        return self.full & ~(self.up[i] | self.down[i] | (1 << i))

    def matrix(self) -> list:
        return [[self.lt(i, j) for j in range(self.n)] for i in range(self.n)]

    def pairs(self) -> list:
        return [(i, j) for i in range(self.n) for j in bits(self.up[i])]

    def covers(self) -> list:
        """Hasse diagram edges: ``i < j`` with nothing strictly between."""
        out = []
        for i in range(self.n):
            for j in bits(self.up[i]):
                if not (self.up[i] & self.down[j]):
                    out.append((i, j))
        return out

    def height_below(self) -> list:
        """Number of elements strictly below each element."""
        return [popcount(d) for d in self.down]

    def linear_extension(self) -> list:
        """Elements sorted by (number of predecessors, index)."""
        return sorted(range(self.n), key=lambda i: (popcount(self.down[i]), i))

    def mask(self, S: Iterable[int]) -> int:
        """Bitmask of ``S``; raises :class:`OutOfRange` for foreign elements."""
        if isinstance(S, int):
            if S < 0 or S >> self.n:
                raise OutOfRange(f"mask {S:#x} outside 0..{self.n - 1}")
            return S
        m = 0
        for i in S:
            if not 0 <= i < self.n:
                raise OutOfRange(f"element {i} outside 0..{self.n - 1}")
            m |= 1 << i
        return m


# masks --------------------------------------------------------------------

def down_of(P: Poset, mask: int) -> int:
    """D(A): elements strictly below some member of ``mask``."""
    out = 0
    for j in bits(mask):
        out |= P.down[j]
    return out


def up_of(P: Poset, mask: int) -> int:
    out = 0
    for j in bits(mask):
        out |= P.up[j]
    return out


def mask_is_antichain(P: Poset, mask: int) -> bool:
    for i in bits(mask):
        if P.up[i] & mask:
            return False
    return True


def mask_is_chain(P: Poset, mask: int) -> bool:
    for i in bits(mask):
        if P.incomparable_mask(i) & mask:
            return False
    return True


def mask_is_maximal_antichain(P: Poset, mask: int) -> bool:
    return mask_is_antichain(P, mask) and (
        down_of(P, mask) | mask | up_of(P, mask)
    ) == P.full


# public surface -------------------------------------------------------------

def is_antichain(P: Poset, S: Iterable[int]) -> bool:
    return mask_is_antichain(P, P.mask(S))


def is_chain(P: Poset, S: Iterable[int]) -> bool:
    return mask_is_chain(P, P.mask(S))


def closure(P: Poset, A: Iterable[int], direction: str = "down") -> frozenset:
    """D(A) for ``direction="down"``, U(A) for ``"up"``."""
    m = P.mask(A)
    if direction == "down":
        return members(down_of(P, m))
    if direction == "up":
        return members(up_of(P, m))
    raise ValueError(f"direction must be 'down' or 'up', got {direction!r}")


def is_maximal_antichain(P: Poset, A: Iterable[int]) -> bool:
    m = P.mask(A)
    if not mask_is_antichain(P, m):
        raise NotAntichain(f"{sorted(members(m))} is not an antichain")
    return mask_is_maximal_antichain(P, m)


def extend_mask_to_maximal(P: Poset, start: int, region: int) -> int:
    """Grow the antichain ``start`` inside ``region`` to a maximal antichain of P.

    Candidates are scanned by increasing index.  A candidate outside the
    region is replaced by a region element below it that is still
    compatible with the current antichain (smallest index wins).
    """
    if not mask_is_antichain(P, start):
        raise NotAntichain(f"{sorted(members(start))} is not an antichain")
    if start & ~region:
        raise ExtensionFailed("starting antichain is not inside the region")
    cur = start
    while True:
        blocked = cur | down_of(P, cur) | up_of(P, cur)
        free = P.full & ~blocked
        if not free:
            return cur
        j = (free & -free).bit_length() - 1
        if region >> j & 1:
            cur |= 1 << j
            continue
        witnesses = P.down[j] & region & free
        if not witnesses:
            raise ExtensionFailed(
                f"element {j} is compatible with {sorted(members(cur))} but has no "
                "substitute inside the region"
            )
        cur |= witnesses & -witnesses


def extend_to_maximal(
    P: Poset, A: Iterable[int], region: Optional[Iterable[int]] = None
) -> frozenset:
    region_mask = P.full if region is None else P.mask(region)
    return members(extend_mask_to_maximal(P, P.mask(A), region_mask))


def mask_antichain_leq(P: Poset, a: int, b: int) -> bool:
    return not (a & ~(b | down_of(P, b)))


def antichain_leq(P: Poset, A: Iterable[int], B: Iterable[int]) -> bool:
    """``A <= B`` on maximal antichains: A is inside D(B) united with B."""
    a, b = P.mask(A), P.mask(B)
    for m in (a, b):
        if not mask_is_maximal_antichain(P, m):
            raise NotMaximalAntichain(f"{sorted(members(m))} is not a maximal antichain")
    return mask_antichain_leq(P, a, b)


INTERVAL_KINDS = ("closed-open", "closed-closed", "open-open", "open-closed")


def interval_mask(P: Poset, lo: Optional[int], hi: Optional[int], kind: str = "closed-open") -> int:
    """Interval between maximal antichains given as masks; ``None`` is an infinity."""
    if kind not in INTERVAL_KINDS:
        raise ValueError(f"unknown interval kind {kind!r}")
    lo_closed = kind.startswith("closed")
    hi_closed = kind.endswith("closed")
    below = P.full
    if lo is not None:
        below = up_of(P, lo) | (lo if lo_closed else 0)
    above = P.full
    if hi is not None:
        above = down_of(P, hi) | (hi if hi_closed else 0)
    return below & above


def interval(
    P: Poset,
    lo: Optional[Iterable[int]],
    hi: Optional[Iterable[int]],
    kind: str = "closed-open",
) -> frozenset:
    """[A, A'), [A, A'], (A, A') and friends; ``None`` stands for -inf / +inf."""
    lo_m = None if lo is None else P.mask(lo)
    hi_m = None if hi is None else P.mask(hi)
    for m in (lo_m, hi_m):
        if m is not None and not mask_is_maximal_antichain(P, m):
            raise NotMaximalAntichain(f"{sorted(members(m))} is not a maximal antichain")
    if lo_m is not None and hi_m is not None and not mask_antichain_leq(P, lo_m, hi_m):
        raise OrderViolation("lower antichain is not below the upper one")
    return members(interval_mask(P, lo_m, hi_m, kind))


def point_interval(P: Poset, i0: int, i1: int) -> frozenset:
    """``{i : i0 <= i <= i1}``."""
    if not P.le(i0, i1):
        return frozenset()
    lo = P.up[i0] | 1 << i0
    hi = P.down[i1] | 1 << i1
    return members(lo & hi)


def point_interval_mask(P: Poset, i0: int, i1: int) -> int:
    if not P.le(i0, i1):
        return 0
    return (P.up[i0] | 1 << i0) & (P.down[i1] | 1 << i1)


def levels_mask(P: Poset, within: Optional[int] = None, direction: str = "below") -> list:
    """All levels of the suborder on ``within``, as masks, lowest first."""
    if direction not in ("below", "above"):
        raise ValueError(f"direction must be 'below' or 'above', got {direction!r}")
    rest = P.full if within is None else within
    rel = P.down if direction == "below" else P.up
    out = []
    while rest:
        lev = 0
        for i in bits(rest):
            if not rel[i] & rest:
                lev |= 1 << i
        out.append(lev)
        rest &= ~lev
    return out


def level(
    P: Poset, n: int, direction: str = "below", within: Optional[Iterable[int]] = None
) -> frozenset:
    """The ``n``-th level from below (or above); empty once P is exhausted."""
    if n < 0:
        raise ValueError("level index must be non-negative")
    w = None if within is None else P.mask(within)
    levs = levels_mask(P, w, direction)
    return members(levs[n]) if n < len(levs) else frozenset()


def sorted_chain(P: Poset, mask: int) -> list:
    """Members of a chain listed in increasing order."""
    return sorted(bits(mask), key=lambda i: (popcount(P.down[i]), i))
