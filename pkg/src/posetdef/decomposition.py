"""Decomposition of an N-indiscernible colouring into blocks and chains.

Throughout ``M = (2N+1)(N+1)``.  :func:`breakdown` builds maximal antichains
``A_0 < ... < A_{K-1}`` such that inside each block ``[A_{n-1}, A_n)`` every
antichain holds at most ``M`` elements of colour ``n mod 2``.  Those
elements are then covered by at most ``M`` chains per block, which lets the
colour of every element be recomputed from the blocks and chains alone.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from . import _kernels
from .chains import restricted_cover_mask
from .coloring import DEFAULT_MAX_ELEMENTS, ColoredPoset, verify_coloring
from .errors import (
    BadMajority,
    InternalBoundViolation,
    InvalidColoring,
    NotChain,
    NotMaximalAntichain,
    NotMonochromatic,
    SizeCapExceeded,
)
from .poset import (
    Poset,
    bits,
    down_of,
    interval_mask,
    mask_antichain_leq,
    mask_is_chain,
    mask_is_maximal_antichain,
    members,
    point_interval_mask,
    popcount,
    sorted_chain,
    up_of,
)


def _lex_key(mask: int) -> tuple:
    return tuple(bits(mask))


@dataclass(frozen=True)
class BlockSequence:
    antichains: tuple  # of frozensets, A_0 .. A_{K-1}

    @property
    def K(self) -> int:
        return len(self.antichains)

    def bounds(self, P: Poset, n: int) -> tuple:
        """Masks ``(A_{n-1}, A_n)`` with ``None`` for the infinities."""
        lo = P.mask(self.antichains[n - 1]) if n >= 1 else None
        hi = P.mask(self.antichains[n]) if n < self.K else None
        return lo, hi

    def block_mask(self, P: Poset, n: int) -> int:
        lo, hi = self.bounds(P, n)
        return interval_mask(P, lo, hi, "closed-open")

    def to_dict(self) -> dict:
        return {"K": self.K, "antichains": [sorted(a) for a in self.antichains]}


def stage_candidates(
    CP: ColoredPoset, prev: Optional[int], parity: int, threshold: int
) -> list:
    """Maximal antichains above ``prev`` (strictly) with more than
    ``threshold`` elements of colour ``parity``, as masks."""
    P = CP.poset
    allowed = P.full if prev is None else prev | up_of(P, prev)
    incomp = [P.incomparable_mask(i) for i in range(P.n)]
    found = _kernels.maximal_antichains(
        P.n, incomp, allowed, CP.color_mask(parity), threshold
    )
    return [
        m
        for m in found
        if m != prev
        and mask_is_maximal_antichain(P, m)
        and (prev is None or mask_antichain_leq(P, prev, m))
    ]


def leq_minimal(P: Poset, cands: list) -> list:
    """Candidates with no other candidate strictly below them."""
    closed = [c | down_of(P, c) for c in cands]
    return [
        c
        for c, cc in zip(cands, closed)
        if not any(dd != cc and dd & ~cc == 0 for dd in closed)
    ]


def leq_maximal(P: Poset, cands: list) -> list:
    closed = [c | down_of(P, c) for c in cands]
    return [
        c
        for c, cc in zip(cands, closed)
        if not any(dd != cc and cc & ~dd == 0 for dd in closed)
    ]


def _require_valid(CP: ColoredPoset, max_elements: int) -> None:
    report = verify_coloring(CP, max_elements)
    if not report.passed:
        raise InvalidColoring(
            f"colouring violates condition ({report.condition}) "
            f"with witness {list(report.witness)}",
            report,
        )


def breakdown(
    CP: ColoredPoset, max_elements: int = DEFAULT_MAX_ELEMENTS, check: bool = True
) -> BlockSequence:
    """Greedy block construction.

    At stage ``n`` pick, among maximal antichains strictly above ``A_{n-1}``
    with more than ``M`` elements of colour ``n mod 2``, a minimal one
    (lexicographically least among minimal candidates); stop when none
    exists.
    """
    P = CP.poset
    if P.n > max_elements:
        raise SizeCapExceeded(f"{P.n} elements exceeds the cap of {max_elements}")
    if check:
        _require_valid(CP, max_elements)
    M = CP.M
    chosen = []
    prev = None
    while True:
        n = len(chosen)
        cands = stage_candidates(CP, prev, n % 2, M)
        if not cands:
            break
        if n >= 2 * CP.N + 2:
            raise InternalBoundViolation(
                f"stage {n} still finds a candidate; K would exceed 2N+2={2 * CP.N + 2}"
            )
        best = min(leq_minimal(P, cands), key=_lex_key)
        chosen.append(best)
        prev = best
    return BlockSequence(tuple(members(m) for m in chosen))


def check_block_sequence(CP: ColoredPoset, bs: BlockSequence) -> list:
    """Return the list of violated block-sequence invariants (empty if none)."""
    P = CP.poset
    problems = []
    if bs.K > 2 * CP.N + 2:
        problems.append(f"K={bs.K} exceeds 2N+2")
    masks = [P.mask(a) for a in bs.antichains]
    for k, m in enumerate(masks):
        if not mask_is_maximal_antichain(P, m):
            problems.append(f"A_{k} is not a maximal antichain")
    for k in range(1, len(masks)):
        if masks[k - 1] == masks[k] or not mask_antichain_leq(P, masks[k - 1], masks[k]):
            problems.append(f"A_{k - 1} is not strictly below A_{k}")
    if problems:
        return problems
    for n in range(bs.K + 1):
        block = bs.block_mask(P, n)
        width = len(restricted_cover_mask(P, block & CP.color_mask(n % 2)).chains)
        if width > CP.M:
            problems.append(f"block {n} has an antichain with {width} > M elements of colour {n % 2}")
    return problems


@dataclass(frozen=True)
class Decomposition:
    poset: Poset
    N: int
    blocks: BlockSequence
    chain_covers: tuple  # per block: tuple of increasing element tuples

    @property
    def M(self) -> int:
        return (2 * self.N + 1) * (self.N + 1)

    def block_of(self, i: int) -> int:
        for n in range(self.blocks.K + 1):
            if self.blocks.block_mask(self.poset, n) >> i & 1:
                return n
        raise InternalBoundViolation(f"element {i} lies in no block")

    def ones(self) -> frozenset:
        """P^1 assembled from the blocks and chains."""
        P = self.poset
        out = 0
        for n in range(self.blocks.K + 1):
            block = self.blocks.block_mask(P, n)
            covered = P.mask(i for c in self.chain_covers[n] for i in c)
            out |= block & ~covered if n % 2 == 0 else covered
        return members(out)

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "M": self.M,
            "blocks": self.blocks.to_dict(),
            "chain_covers": [[list(c) for c in cover] for cover in self.chain_covers],
        }


def decompose(
    CP: ColoredPoset, max_elements: int = DEFAULT_MAX_ELEMENTS, check: bool = True
) -> Decomposition:
    P = CP.poset
    bs = breakdown(CP, max_elements, check)
    covers = []
    for n in range(bs.K + 1):
        target = bs.block_mask(P, n) & CP.color_mask(n % 2)
        cover = restricted_cover_mask(P, target)
        if check and len(cover.chains) > CP.M:
            raise InternalBoundViolation(
                f"block {n} needs {len(cover.chains)} chains, more than M={CP.M}"
            )
        covers.append(cover.chains)
    return Decomposition(P, CP.N, bs, tuple(covers))


def evaluate(D: Decomposition, i: int) -> int:
    """Colour of ``i`` read off the decomposition (the colouring is not consulted)."""
    n = D.block_of(i)
    in_chain = any(i in c for c in D.chain_covers[n])
    if n % 2 == 0:
        return 0 if in_chain else 1
    return 1 if in_chain else 0


# chain compression -----------------------------------------------------------

@dataclass(frozen=True)
class ChainCompression:
    pairs: tuple  # ((i_0, i'_0), ..., (i_K, i'_K))
    t: int

    @property
    def K(self) -> int:
        return len(self.pairs) - 1

    def cover_mask(self, P: Poset) -> int:
        out = 0
        for a, b in self.pairs:
            out |= point_interval_mask(P, a, b)
        return out

    def to_dict(self) -> dict:
        return {"t": self.t, "pairs": [list(p) for p in self.pairs]}


def compress_chain(CP: ColoredPoset, C: Iterable[int], t: int) -> ChainCompression:
    """Cover a monochromatic chain by at most N+1 intervals inside its colour class.

    The scan jumps over opposite-coloured interlopers ``j``; each is
    bracketed by its nearest chain members ``i-_j < j < i+_j``.  From the
    current start the next cut uses the interloper whose ``i+_j`` is least
    (then ``i-_j``, then ``j``), so no interloper is left inside an interval.
    """
    P = CP.poset
    cm = P.mask(C)
    if not mask_is_chain(P, cm):
        raise NotChain(f"{sorted(members(cm))} is not a chain")
    if cm & ~CP.color_mask(t):
        raise NotMonochromatic(f"chain is not inside colour class {t}")
    if not cm:
        return ChainCompression((), t)
    order = sorted_chain(P, cm)
    rank = {c: k for k, c in enumerate(order)}
    lo, hi = order[0], order[-1]
    span = point_interval_mask(P, lo, hi) & CP.color_mask(1 - t)
    bracket = {}
    for j in bits(span):
        below = [c for c in order if P.lt(c, j)]
        above = [c for c in order if P.lt(j, c)]
        bracket[j] = (below[-1], above[0])

    pairs = []
    cur = lo
    while True:
        options = [
            (rank[plus], rank[minus], j)
            for j, (minus, plus) in bracket.items()
            if rank[minus] >= rank[cur]
        ]
        if not options:
            pairs.append((cur, hi))
            break
        _, _, j = min(options)
        plus = bracket[j][1]
        pairs.append((cur, order[rank[plus] - 1]))
        cur = plus
    comp = ChainCompression(tuple(pairs), t)
    cover = comp.cover_mask(P)
    if cm & ~cover or cover & ~CP.color_mask(t):
        raise InternalBoundViolation("interval cover misses the chain or leaves its colour class")
    if comp.K > CP.N:
        raise InternalBoundViolation(f"{len(pairs)} intervals exceed N+1={CP.N + 1}")
    return comp


# antichain compression -----------------------------------------------------------

@dataclass(frozen=True)
class AntichainCompression:
    A0: frozenset
    J_minus: frozenset
    J_plus: frozenset
    t: int

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "A0": sorted(self.A0),
            "J_minus": sorted(self.J_minus),
            "J_plus": sorted(self.J_plus),
        }


def _greedy_barrier(P: Poset, cands: int, base: int, rel: tuple, rev: tuple) -> int:
    """Grow the ``J`` set: repeatedly take the first candidate compatible with
    ``base | J`` and add an extreme candidate beyond it.

    ``rel[x]`` is the strict relation away from the antichain (``up`` for
    J-, i.e. towards A), ``rev`` the opposite one.
    """
    J = 0
    while True:
        taken = base | J
        pick = -1
        for j in bits(cands & ~taken):
            if not (P.comparable_mask(j) & taken):
                pick = j
                break
        if pick < 0:
            return J
        beyond = (rel[pick] & cands) | 1 << pick
        extremes = [x for x in bits(beyond) if not rel[x] & beyond]
        J |= 1 << min(extremes)


def compress_antichain_mask(CP: ColoredPoset, A: int, t: int) -> AntichainCompression:
    P = CP.poset
    if not mask_is_maximal_antichain(P, A):
        raise NotMaximalAntichain(f"{sorted(members(A))} is not a maximal antichain")
    minority = A & CP.color_mask(1 - t)
    if popcount(minority) > CP.N:
        raise BadMajority(
            f"{popcount(minority)} elements of colour {1 - t} exceed N={CP.N}"
        )
    if popcount(A) <= 2 * CP.N:
        return AntichainCompression(members(A), frozenset(), frozenset(), t)
    majority = list(bits(A & CP.color_mask(t)))[: CP.N + 1]
    A0 = minority | P.mask(majority)
    other = CP.color_mask(1 - t)
    J_minus = _greedy_barrier(P, other & down_of(P, A), A0, P.up, P.down)
    J_plus = _greedy_barrier(P, other & up_of(P, A), A0, P.down, P.up)
    for J in (J_minus, J_plus):
        if popcount(J) > CP.N:
            raise InternalBoundViolation(f"barrier set of size {popcount(J)} exceeds N={CP.N}")
    return AntichainCompression(members(A0), members(J_minus), members(J_plus), t)


def compress_antichain(CP: ColoredPoset, A: Iterable[int], t: int) -> AntichainCompression:
    """Bounded witnesses for the minority colour's position relative to ``A``.

    For every ``j`` of colour ``1-t``: ``j < A`` iff ``j < A0`` or
    ``j <= J-``, and ``A < j`` iff ``A0 < j`` or ``J+ <= j``.
    """
    return compress_antichain_mask(CP, CP.poset.mask(A), t)


def check_antichain_compression(CP: ColoredPoset, A: Iterable[int], comp: AntichainCompression) -> list:
    """Elements ``j`` of colour ``1-t`` where one of the two equivalences fails."""
    P = CP.poset
    a = P.mask(A)
    a0 = P.mask(comp.A0)
    jm = P.mask(comp.J_minus)
    jp = P.mask(comp.J_plus)
    bad = []
    for j in bits(CP.color_mask(1 - comp.t)):
        below_a = bool(P.up[j] & a)
        below_rhs = bool(P.up[j] & a0) or bool((P.up[j] | 1 << j) & jm)
        above_a = bool(P.down[j] & a)
        above_rhs = bool(P.down[j] & a0) or bool((P.down[j] | 1 << j) & jp)
        if below_a != below_rhs or above_a != above_rhs:
            bad.append(j)
    return bad


@dataclass(frozen=True)
class BarrierPartition:
    compression: AntichainCompression
    blocks: dict  # frozenset I -> frozenset X_I

    def to_dict(self) -> dict:
        return {
            "compression": self.compression.to_dict(),
            "blocks": [
                {"I": sorted(k), "X": sorted(v)}
                for k, v in sorted(self.blocks.items(), key=lambda kv: sorted(kv[0]))
            ],
        }


def barrier_partition(CP: ColoredPoset, A: Iterable[int], t: int) -> BarrierPartition:
    """Partition ``[A, inf)`` by which members of ``A0 | J-`` lie weakly below."""
    P = CP.poset
    a = P.mask(A)
    comp = compress_antichain_mask(CP, a, t)
    base = P.mask(comp.A0) | P.mask(comp.J_minus)
    blocks: dict = {}
    for i in bits(a | up_of(P, a)):
        key = members((P.down[i] | 1 << i) & base)
        blocks[key] = blocks.get(key, 0) | 1 << i
    return BarrierPartition(comp, {k: members(v) for k, v in blocks.items()})


def check_barrier_partition(CP: ColoredPoset, A: Iterable[int], bp: BarrierPartition) -> list:
    """Pairs ``(j, i)`` where the stated barrier equivalence fails.

    For ``j`` of colour ``1-t`` below ``A`` and ``i`` in ``[A, inf)`` the
    claim is: ``j < i`` iff ``i`` lies in the block keyed by
    ``{a in A0 : j < a} | {j' in J- : j <= j'}``.
    """
    P = CP.poset
    a = P.mask(A)
    comp = bp.compression
    a0 = P.mask(comp.A0)
    jm = P.mask(comp.J_minus)
    region = a | up_of(P, a)
    where = {}
    for key, xs in bp.blocks.items():
        for i in xs:
            where[i] = key
    bad = []
    for j in bits(CP.color_mask(1 - comp.t) & down_of(P, a)):
        key = members((P.up[j] & a0) | ((P.up[j] | 1 << j) & jm))
        for i in bits(region):
            if P.lt(j, i) != (where[i] == key):
                bad.append((j, i))
    return bad
