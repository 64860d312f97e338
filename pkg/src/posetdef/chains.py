"""Poset width and minimum chain covers (Dilworth) via bipartite matching.

The split graph has a left copy and a right copy of every element and an
edge ``i -> j`` whenever ``i < j``.  A maximum matching links each element
to its successor in some chain; unmatched right copies start chains.  The
maximum antichain is read off a minimum vertex cover (Konig).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional

from .poset import Poset, bits

_INF = float("inf")


@dataclass(frozen=True)
class ChainCover:
    chains: tuple  # tuple of increasing element tuples, sorted by minimum
    width_witness: frozenset

    @property
    def width(self) -> int:
        return len(self.chains)

    def chain_sets(self) -> list:
        return [frozenset(c) for c in self.chains]


def hopcroft_karp(adj: dict) -> dict:
    """Maximum matching of a bipartite graph ``{left: [right, ...]}``.

    Returns ``{left: right}``.  Neighbour lists are scanned in the order
    given, so results are deterministic.
    """
    left = list(adj)
    pair_l: dict = {}
    pair_r: dict = {}
    dist: dict = {}

    def bfs() -> bool:
        q = deque()
        for u in left:
            if u in pair_l:
                dist[u] = _INF
            else:
                dist[u] = 0
                q.append(u)
        found = False
        while q:
            u = q.popleft()
            for v in adj[u]:
                w = pair_r.get(v)
                if w is None:
                    found = True
                elif dist[w] == _INF:
                    dist[w] = dist[u] + 1
                    q.append(w)
        return found

    def dfs(u) -> bool:
        for v in adj[u]:
            w = pair_r.get(v)
            if w is None or (dist[w] == dist[u] + 1 and dfs(w)):
                pair_l[u] = v
                pair_r[v] = u
                return True
        dist[u] = _INF
        return False

    while bfs():
        for u in left:
            if u not in pair_l:
                dfs(u)
    return pair_l


def _cover_on(P: Poset, X: int) -> ChainCover:
    elems = list(bits(X))
    if not elems:
        return ChainCover((), frozenset())
    adj = {i: list(bits(P.up[i] & X)) for i in elems}
    match = hopcroft_karp(adj)
    has_pred = set(match.values())

    chains = []
    for s in elems:
        if s in has_pred:
            continue
        chain = [s]
        while chain[-1] in match:
            chain.append(match[chain[-1]])
        chains.append(tuple(chain))
    chains.sort(key=lambda c: min(c))

    # Konig: Z = vertices reachable from free left vertices by alternating paths.
    matched_from = {r: l for l, r in match.items()}
    z_left = set(i for i in elems if i not in match)
    z_right = set()
    q = deque(z_left)
    while q:
        u = q.popleft()
        for v in adj[u]:
            if v in z_right:
                continue
            z_right.add(v)
            w = matched_from.get(v)
            if w is not None and w not in z_left:
                z_left.add(w)
                q.append(w)
    antichain = frozenset(i for i in elems if i in z_left and i not in z_right)
    return ChainCover(tuple(chains), antichain)


def min_chain_cover(P: Poset) -> ChainCover:
    return _cover_on(P, P.full)


def restricted_cover(P: Poset, X: Iterable[int]) -> ChainCover:
    """Minimum chain cover of the suborder induced on ``X``."""
    return _cover_on(P, P.mask(X))


def restricted_cover_mask(P: Poset, X: int) -> ChainCover:
    return _cover_on(P, X)


def width_mask(P: Poset, X: Optional[int] = None) -> int:
    return len(_cover_on(P, P.full if X is None else X).chains)
