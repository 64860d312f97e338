"""Deterministic instance generators.

Randomness comes from the Philox4x64-10 counter-based generator keyed by
``(seed, stream)``.  Only raw 64-bit outputs are consumed and they are
mapped by fixed rules, so another implementation of Philox reproduces the
same corpora:

* ``below(k)``: ``raw % k``
* ``random()``: ``(raw >> 11) * 2**-53``
* ``shuffle``: Fisher-Yates from the last index down, ``below(i + 1)``
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional, Sequence

import numpy as np

from .coloring import ColoredPoset, verify_coloring
from .poset import Poset, bits
from .trace import IndexedSequence, TraceStructure, independence_dimension, is_delta_indiscernible


class Stream:
    def __init__(self, seed: int, stream: int = 0):
        key = np.array([seed & (2**64 - 1), stream & (2**64 - 1)], dtype=np.uint64)
        self._bg = np.random.Philox(key=key)

    def raw(self) -> int:
        return int(self._bg.random_raw())

    def below(self, k: int) -> int:
        if k <= 0:
            raise ValueError("range must be positive")
        return self.raw() % k

    def random(self) -> float:
        return (self.raw() >> 11) * 2.0**-53

    def coin(self, p: float) -> bool:
        return self.random() < p

    def shuffle(self, xs: list) -> list:
        for i in range(len(xs) - 1, 0, -1):
            j = self.below(i + 1)
            xs[i], xs[j] = xs[j], xs[i]
        return xs

    def choice(self, xs: Sequence):
        return xs[self.below(len(xs))]


# posets ---------------------------------------------------------------------

def random_poset(s: Stream, n: int, p: float) -> Poset:
    """Random order: each pair of a hidden linear order is related with
    probability ``p`` before closing; labels are then shuffled."""
    perm = s.shuffle(list(range(n)))
    pairs = [(perm[i], perm[j]) for i in range(n) for j in range(i + 1, n) if s.coin(p)]
    return Poset.from_pairs(n, pairs)


def relabel(P: Poset, perm: Sequence[int]) -> Poset:
    """Element ``i`` becomes ``perm[i]``."""
    return Poset.from_pairs(P.n, [(perm[i], perm[j]) for i, j in P.pairs()])


def ideals(P: Poset) -> list:
    """All down-closed subsets as masks, in increasing mask order."""
    out = [0]
    for i in P.linear_extension():
        out += [D | 1 << i for D in out if P.down[i] & ~D == 0]
    return sorted(out)


def _refine(P: Poset, colors: list) -> list:
    while True:
        sig = [
            (colors[i], tuple(sorted(colors[j] for j in bits(P.down[i]))), tuple(sorted(colors[j] for j in bits(P.up[i]))))
            for i in range(P.n)
        ]
        ranks = {s: r for r, s in enumerate(sorted(set(sig)))}
        new = [ranks[s] for s in sig]
        if len(set(new)) == len(set(colors)):
            return new
        colors = new


def canonical_form(P: Poset) -> tuple:
    """Label-independent certificate: equal exactly for isomorphic posets.

    Colour refinement, then individualisation of one element at a time in
    the first ambiguous class; twins (equal strict up- and down-sets) are
    tried once.  The certificate is the least up-set list over all leaves.
    """
    n = P.n
    best = None

    def leaf(colors):
        order = sorted(range(n), key=lambda i: colors[i])
        pos = {v: k for k, v in enumerate(order)}
        return tuple(sum(1 << pos[j] for j in bits(P.up[v])) for v in order)

    def search(colors):
        nonlocal best
        colors = _refine(P, colors)
        classes: dict = {}
        for i, c in enumerate(colors):
            classes.setdefault(c, []).append(i)
        target = None
        for c in sorted(classes):
            cls = classes[c]
            if len(cls) > 1 and len({(P.down[i], P.up[i]) for i in cls}) > 1:
                target = cls
                break
        if target is None:
            # only twin classes left: any order inside them gives the same leaf
            twin_colors = list(colors)
            for c in sorted(classes):
                for k, i in enumerate(classes[c]):
                    twin_colors[i] = (c, k)
            cand = leaf(twin_colors)
            if best is None or cand < best:
                best = cand
            return
        seen = set()
        for v in target:
            key = (P.down[v], P.up[v])
            if key in seen:
                continue
            seen.add(key)
            # v goes ahead of its classmates; the order between classes is kept
            search([2 * c + (i != v) for i, c in enumerate(colors)])

    search([0] * n)
    return (n, best)


@lru_cache(maxsize=None)
def unlabeled_posets(n: int) -> tuple:
    """One representative per isomorphism class of posets on ``n`` points.

    Built by adding a new maximal element over every ideal of each poset on
    ``n-1`` points and dropping isomorphic repeats.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return (Poset.from_pairs(0, []),)
    seen = {}
    for Q in unlabeled_posets(n - 1):
        for D in ideals(Q):
            P = Poset.from_pairs(n, Q.pairs() + [(i, n - 1) for i in bits(D)])
            key = canonical_form(P)
            if key not in seen:
                seen[key] = P
    return tuple(seen[k] for k in sorted(seen))


# colourings ---------------------------------------------------------------------

def _candidate_coloring(s: Stream, P: Poset, N: int) -> tuple:
    kind = s.below(4)
    n = P.n
    if kind == 0:
        # alternate colours across a few cuts in the height order, then flip a few
        height = [0] * n
        for i in P.linear_extension():
            height[i] = max((height[j] + 1 for j in bits(P.down[i])), default=0)
        top = max(height, default=0) + 1
        cuts = sorted({s.below(top + 1) for _ in range(s.below(2 * N + 2) + 1)})
        base = s.below(2)
        f = [(base + sum(1 for c in cuts if height[i] >= c)) % 2 for i in range(n)]
        for _ in range(s.below(N + 1)):
            if n:
                k = s.below(n)
                f[k] ^= 1
        return tuple(f)
    if kind == 1:
        # a union of up-sets minus another one: few colour changes along chains
        u1 = 0
        for _ in range(1 + s.below(2)):
            if n:
                v = s.below(n)
                u1 |= P.up[v] | 1 << v
        v = s.below(n) if n else 0
        u2 = (P.up[v] | 1 << v) if n and s.coin(0.5) else 0
        return tuple(1 if (u1 >> i & 1) and not (u2 >> i & 1) else 0 for i in range(n))
    if kind == 2:
        c = s.below(2)
        f = [c] * n
        for _ in range(s.below(N + 1)):
            if n:
                f[s.below(n)] ^= 1
        return tuple(f)
    p = s.random()
    return tuple(int(s.coin(p)) for _ in range(n))


def random_colored_poset(s: Stream, n: int, N: int, p: Optional[float] = None, tries: int = 200) -> Optional[ColoredPoset]:
    """A random poset with an N-indiscernible colouring, or ``None``."""
    P = random_poset(s, n, s.random() * 0.4 + 0.02 if p is None else p)
    for _ in range(tries):
        CP = ColoredPoset(P, _candidate_coloring(s, P, N), N)
        if verify_coloring(CP).passed:
            return CP
    return None


def colored_corpus(seed: int, count: int, Ns: Sequence[int] = (1, 2, 3), max_n: int = 40) -> list:
    """``count`` valid colourings; instance ``k`` uses stream ``k``."""
    out = []
    k = 0
    while len(out) < count:
        s = Stream(seed, k)
        N = Ns[k % len(Ns)]
        n = 1 + s.below(max_n)
        CP = random_colored_poset(s, n, N)
        if CP is not None:
            out.append(CP)
        k += 1
    return out


# trace structures ---------------------------------------------------------------------

@dataclass(frozen=True)
class TraceInstance:
    family: str
    T: TraceStructure
    seq: IndexedSequence
    N: int


def ideals_instance(Q: Poset) -> tuple:
    """Rows are the down-sets of ``Q``, columns its elements."""
    rows = ideals(Q)
    R = np.array([[D >> i & 1 for i in range(Q.n)] for D in rows], dtype=np.uint8).reshape(len(rows), Q.n)
    return TraceStructure(R), IndexedSequence(Q, tuple(range(Q.n)))


def singletons_instance(n: int) -> tuple:
    """An antichain indexing the singletons of ``n`` points, plus an empty row."""
    R = np.vstack([np.eye(n, dtype=np.uint8), np.zeros((1, n), dtype=np.uint8)])
    return TraceStructure(R), IndexedSequence(Poset.antichain(n), tuple(range(n)))


def halflines_instance(n: int, upward: bool) -> tuple:
    """A chain indexing the half-lines ``{u >= i}`` (or ``{u <= i}``) of ``n+1`` points."""
    R = np.array([[int(u >= i) if upward else int(u <= i) for i in range(n)] for u in range(n + 1)], dtype=np.uint8)
    return TraceStructure(R.reshape(n + 1, n)), IndexedSequence(Poset.chain(n), tuple(range(n)))


def laminar_instance(s: Stream, n: int) -> tuple:
    """Sets ordered by inclusion in a random forest; each node owns one point."""
    parent = [-1] + [s.below(i) if s.coin(0.8) else -1 for i in range(1, n)]
    pairs = []
    for i in range(1, n):
        j = parent[i]
        if j >= 0:
            pairs.append((i, j))
    P = Poset.from_pairs(n, pairs)
    # column i = points of nodes at or below i; one extra point outside everything
    R = np.zeros((n + 1, n), dtype=np.uint8)
    for i in range(n):
        for u in bits(P.down[i] | 1 << i):
            R[u, i] = 1
    return TraceStructure(R), IndexedSequence(P, tuple(range(n)))


def constant_instance(s: Stream, n: int) -> tuple:
    P = random_poset(s, n, s.random() * 0.5)
    R = np.array([[0, 1], [1, 1], [0, 0]], dtype=np.uint8)
    return TraceStructure(R), IndexedSequence(P, tuple([s.below(2)] * n))


def random_trace_instance(s: Stream, n: int, max_rows: int = 64) -> tuple:
    P = random_poset(s, n, s.random() * 0.6)
    B = n
    U = 2 + s.below(max_rows - 1)
    p = s.random()
    R = np.array([[int(s.coin(p)) for _ in range(B)] for _ in range(U)], dtype=np.uint8).reshape(U, B)
    return TraceStructure(R), IndexedSequence(P, tuple(range(n)))


FAMILIES = ("ideals", "singletons", "halflines", "laminar", "constant", "random", "colaminar", "cosingletons")


def trace_candidate(family: str, s: Stream, n: int) -> tuple:
    if family == "ideals":
        Q = random_poset(s, n, 0.3 + 0.6 * s.random())
        return ideals_instance(Q)
    if family == "singletons":
        return singletons_instance(n)
    if family == "halflines":
        return halflines_instance(n, s.coin(0.5))
    if family == "laminar":
        return laminar_instance(s, n)
    if family == "constant":
        return constant_instance(s, n)
    if family == "random":
        return random_trace_instance(s, n)
    if family.startswith("co") and family != "constant":
        T, seq = trace_candidate(family[2:], s, n)
        return TraceStructure(1 - T.R), seq
    raise ValueError(f"unknown family {family!r}")


def trace_instances(seed: int, n: int, count: int, families: Sequence[str] = FAMILIES, max_rows: int = 64, max_attempts: int = 100000) -> Iterator[TraceInstance]:
    """Generate-and-filter: yields up to ``count`` instances on ``n`` elements
    that pass the indiscernibility check at ``N`` equal to the independence
    dimension.  Attempt ``k`` uses stream ``k`` and family ``k mod len``."""
    made = 0
    for k in range(max_attempts):
        if made >= count:
            return
        family = families[k % len(families)]
        s = Stream(seed, k)
        T, seq = trace_candidate(family, s, n)
        if T.U > max_rows:
            continue
        N = independence_dimension(T)[0]
        if not is_delta_indiscernible(T, seq, N).ok:
            continue
        made += 1
        yield TraceInstance(family, T, seq, N)


__all__ = [
    "FAMILIES",
    "Stream",
    "TraceInstance",
    "canonical_form",
    "colored_corpus",
    "halflines_instance",
    "ideals",
    "ideals_instance",
    "laminar_instance",
    "random_colored_poset",
    "random_poset",
    "relabel",
    "singletons_instance",
    "trace_candidate",
    "trace_instances",
    "unlabeled_posets",
]
