"""Rough definitions of colour classes over a Delta-indiscernible sequence.

Fix a trace structure, a poset-indexed sequence of its columns and a row
``a``; element ``i`` has colour ``R[a, seq(i)]``.  A rough definition of a
set ``X`` of colour ``t`` is a formula over a few elements that holds on all
of ``X`` and holds only at elements of colour ``t``.  The constructions here
cover antichains, chains (both when chains are homogeneous and when they are
not) and the band between two maximal antichains, and glue them into one
formula that recovers the whole colouring.

Every construction returns its formula together with the data needed to
check it; :meth:`RoughDefinition.problems` re-evaluates it on every element.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Sequence

from . import _kernels
from .chains import restricted_cover_mask
from .coloring import ColoredPoset
from .decomposition import (
    breakdown,
    compress_antichain_mask,
    compress_chain,
    decompose,
    leq_maximal,
)
from .errors import (
    BadMajority,
    CaseMismatch,
    IndiscernibilityBroken,
    InternalBoundViolation,
    NoOrderSensitiveDelta,
    NotAntichain,
    NotChain,
    NotMaximalAntichain,
    NotMonochromatic,
    OrderViolation,
    OutOfRange,
)
from .formula import FALSE, Delta, Eq, Evaluator, Formula, Not, conj, disj, parameters, template
from .poset import (
    bits,
    down_of,
    extend_mask_to_maximal,
    interval_mask,
    levels_mask,
    mask_antichain_leq,
    mask_is_antichain,
    mask_is_chain,
    mask_is_maximal_antichain,
    members,
    point_interval_mask,
    popcount,
    sorted_chain,
    up_of,
)
from .trace import (
    IndexedSequence,
    OrderSensitive,
    TraceStructure,
    independence_dimension,
    order_sensitive_from_type,
    permute_type,
)


def antichain_budget(N: int) -> int:
    return N + (N + 1) * 2 ** (2 * N + 2)


def chain_budget(N: int) -> int:
    return N * (2 * (N + 1) ** 2 + N)


def block_budget(N: int) -> int:
    return 2 ** (2 * N + 2) * (2 * N + 2 * (N + 1) ** 2)


class Ctx:
    """Trace structure, indexed sequence, bound ``N`` and (optionally) a row."""

    def __init__(self, T: TraceStructure, seq: IndexedSequence, N: Optional[int] = None, row: Optional[int] = None):
        seq.check_columns(T)
        self.T = T
        self.seq = seq
        self.P = seq.poset
        self.N = independence_dimension(T)[0] if N is None else N
        self.M = (2 * self.N + 1) * (self.N + 1)
        self.cols = seq.assign
        self.ev = Evaluator(T, seq)
        self._types: dict = {}
        self._case = None
        self.row = None
        self.f: tuple = ()
        if row is not None:
            self.set_row(row)

    def set_row(self, row: int) -> None:
        if not 0 <= row < self.T.U:
            raise OutOfRange(f"row {row} outside 0..{self.T.U - 1}")
        self.row = row
        self.f = tuple(int(self.T.R[row, c]) for c in self.cols)
        self.__dict__.pop("cp", None)

    def with_row(self, row: int) -> "Ctx":
        other = Ctx.__new__(Ctx)
        other.__dict__.update(self.__dict__)
        other.__dict__.pop("cp", None)
        other.set_row(row)
        return other

    @cached_property
    def cp(self) -> ColoredPoset:
        if self.row is None:
            raise ValueError("no row fixed")
        return ColoredPoset(self.P, self.f, self.N)

    def color_mask(self, t: int) -> int:
        return self.cp.color_mask(t)

    # Delta-types of element tuples
    def tmask(self, elems: Sequence[int]) -> int:
        key = tuple(self.cols[i] for i in elems)
        hit = self._types.get(key)
        if hit is None:
            hit = self.T.type_mask(key)
            self._types[key] = hit
        return hit

    def common_type(self, elems: Sequence[int]) -> Optional[int]:
        """Shared type of all ordered ``(N+1)``-tuples of distinct members,
        or ``None`` when they differ.  ``-1`` when there are too few members."""
        elems = sorted(elems)
        k = self.N + 1
        if len(elems) < k:
            return -1
        tau = None
        swaps = []
        for p in range(k - 1):
            perm = list(range(k))
            perm[p], perm[p + 1] = perm[p + 1], perm[p]
            swaps.append(perm)
        for combo in itertools.combinations(elems, k):
            m = self.tmask(combo)
            if tau is None:
                if any(permute_type(m, s) != m for s in swaps):
                    return None
                tau = m
            elif m != tau:
                return None
        return tau

    def homogeneous(self, elems: Iterable[int]) -> bool:
        return self.common_type(list(elems)) is not None

    def literals(self, base: Sequence[int], free_pos: int, value_of) -> frozenset:
        """One literal per ordered ``N``-tuple of distinct members of ``base``
        and per sign pattern; ``value_of(tuple_slots, s)`` gives its sign."""
        out = set()
        for tup in itertools.permutations(sorted(base), self.N):
            slots = tup[:free_pos] + (None,) + tup[free_pos:]
            for s in range(1 << (self.N + 1)):
                out.add(Delta(s, bool(value_of(slots, s)), slots))
        return frozenset(out)

    def type_literals(self, base: Sequence[int], tau: int) -> frozenset:
        """Literals saying the free slot, placed last, completes a tuple of type ``tau``."""
        return self.literals(base, self.N, lambda slots, s: tau >> s & 1)

    def complete_type(self, base: Sequence[int], i: int, free_pos: int) -> frozenset:
        """All literals true of ``i`` over ``base`` with the free slot at ``free_pos``."""

        def value(slots, s):
            elems = tuple(i if x is None else x for x in slots)
            return self.tmask(elems) >> s & 1

        return self.literals(base, free_pos, value)


def _lits(literals: frozenset) -> Formula:
    return conj(sorted(literals, key=lambda d: (d.slots.index(None), tuple(-1 if x is None else x for x in d.slots), d.pattern, d.sign)))


def _eqs(elems: Iterable[int]) -> Formula:
    return disj(Eq(i) for i in sorted(elems))


def _neqs(elems: Iterable[int]) -> list:
    return [Not(Eq(i)) for i in sorted(elems)]


@dataclass
class RoughDefinition:
    formula: Formula
    target: frozenset
    t: int
    kind: str
    budget: int
    region: frozenset = frozenset()  # condition (ii) is only required outside this set
    parts: tuple = ()
    info: dict = field(default_factory=dict)

    @property
    def params(self) -> frozenset:
        return parameters(self.formula)

    def problems(self, ctx: Ctx) -> list:
        out = []
        support = ctx.ev.mask(self.formula)
        target = ctx.P.mask(self.target)
        missed = target & ~support
        if missed:
            out.append(f"{self.kind}: formula fails on target elements {sorted(bits(missed))}")
        outside = ctx.P.full & ~ctx.P.mask(self.region)
        wrong = support & outside & ~ctx.color_mask(self.t)
        if wrong:
            out.append(f"{self.kind}: formula holds on elements of colour {1 - self.t}: {sorted(bits(wrong))}")
        if len(self.params) > self.budget:
            out.append(f"{self.kind}: {len(self.params)} parameters exceed the budget {self.budget}")
        return out

    def all_definitions(self) -> list:
        out = [self]
        for p in self.parts:
            out.extend(p.all_definitions())
        return out


def _constant_columns(ctx: Ctx, X: int, t: int, kind: str, budget: int) -> RoughDefinition:
    """With ``N = 0`` every column is constant over the rows, so colour ``t`` is
    defined without parameters by asking whether the column takes value ``t``."""
    formula = Delta(t, True, (None,))
    return RoughDefinition(formula, members(X), t, kind, budget)


# antichains ---------------------------------------------------------------------

def _maj_check(ctx: Ctx, A: int, t: int) -> None:
    minority = popcount(A & ctx.color_mask(1 - t))
    if minority > ctx.N:
        raise BadMajority(f"{minority} elements of colour {1 - t} exceed N={ctx.N}")


def bounded_core_mask(ctx: Ctx, A: int, t: int) -> int:
    P = ctx.P
    if not mask_is_maximal_antichain(P, A):
        raise NotMaximalAntichain(f"{sorted(bits(A))} is not a maximal antichain")
    _maj_check(ctx, A, t)
    if popcount(A) <= 2 * ctx.N:
        return A
    comp = compress_antichain_mask(ctx.cp, A, t)
    J0 = P.mask(comp.A0) | P.mask(comp.J_minus)
    J1 = P.mask(comp.A0) | P.mask(comp.J_plus)
    regions: dict = {}
    for i in bits(A):
        key = ((P.down[i] | 1 << i) & J0, (P.up[i] | 1 << i) & J1)
        regions.setdefault(key, []).append(i)
    core = 0
    for elems in regions.values():
        for i in elems[: ctx.N + 1]:
            core |= 1 << i
    return core


def bounded_core(ctx: Ctx, A: Iterable[int], t: int) -> frozenset:
    """Bounded ``A0`` inside ``A`` deciding homogeneity with minority sets.

    Members of ``A`` are grouped by which barrier elements lie below and
    above them; each group keeps its first ``N+1`` members.
    """
    return members(bounded_core_mask(ctx, ctx.P.mask(A), t))


def _grow_homogeneous(ctx: Ctx, base: Sequence[int], candidates: int) -> list:
    """Greedy maximal ``I`` inside ``candidates`` keeping ``base | I`` homogeneous."""
    cur = list(base)
    added = []
    for j in bits(candidates):
        if j in cur:
            continue
        if ctx.homogeneous(cur + [j]):
            cur.append(j)
            added.append(j)
            if len(added) > ctx.N:
                raise IndiscernibilityBroken(
                    f"{len(added)} minority elements keep the set homogeneous, more than N={ctx.N}"
                )
    return added


def _check_colour_set(ctx: Ctx, X: int, t: int) -> None:
    if X & ~ctx.color_mask(t):
        raise NotMonochromatic(f"set {sorted(bits(X))} is not inside colour class {t}")


def define_antichain(ctx: Ctx, A: Iterable[int], t: int) -> RoughDefinition:
    P, N = ctx.P, ctx.N
    a = P.mask(A)
    if not mask_is_antichain(P, a):
        raise NotAntichain(f"{sorted(bits(a))} is not an antichain")
    _check_colour_set(ctx, a, t)
    budget = antichain_budget(N)
    if N == 0:
        return _constant_columns(ctx, a, t, "antichain", budget)
    if popcount(a) <= N:
        return RoughDefinition(_eqs(bits(a)), members(a), t, "antichain", budget)
    full = extend_mask_to_maximal(P, a, P.full)
    if popcount(full & ctx.color_mask(1 - t)) > N:
        raise IndiscernibilityBroken("extended antichain has no majority colour")
    core = bounded_core_mask(ctx, full, t)
    minority = ctx.color_mask(1 - t)
    I0 = _grow_homogeneous(ctx, list(bits(core)), minority & ~core)
    S = sorted(set(bits(core)) | set(I0))
    tau = ctx.common_type(S)
    if tau is None:
        raise IndiscernibilityBroken("core and added minority elements are not homogeneous")
    excluded = (core & minority) | P.mask(I0)
    formula = disj(
        [conj([_lits(ctx.type_literals(S, tau))] + _neqs(bits(excluded)))]
        + [Eq(i) for i in bits(core & ctx.color_mask(t))]
    )
    info = {"core": sorted(bits(core)), "I0": I0, "extended": sorted(bits(full))}
    return RoughDefinition(formula, members(a), t, "antichain", budget, info=info)


# case split ---------------------------------------------------------------------

@dataclass(frozen=True)
class CaseSplit:
    case: int
    chain: tuple = ()
    sigma: tuple = ()
    chain_type: int = 0
    order_sensitive: Optional[OrderSensitive] = None

    def to_dict(self) -> dict:
        out = {"case": self.case}
        if self.case == 2:
            out["chain"] = list(self.chain)
            out["sigma"] = list(self.sigma)
            out["order_sensitive"] = self.order_sensitive.to_dict() if self.order_sensitive else None
        return out


def _chains_of_length(P, k: int):
    order = P.linear_extension()

    def extend(chain):
        if len(chain) == k:
            yield tuple(chain)
            return
        for j in bits(P.up[chain[-1]]):
            yield from extend(chain + [j])

    for i in sorted(order):
        yield from extend([i])


def case_split(ctx: Ctx) -> CaseSplit:
    """Case 1 when every chain of ``N+1`` elements has a permutation-invariant type."""
    if ctx._case is not None:
        return ctx._case
    k = ctx.N + 1
    result = CaseSplit(1)
    for chain in _chains_of_length(ctx.P, k):
        tau = ctx.tmask(chain)
        for sigma in itertools.permutations(range(k)):
            if permute_type(tau, sigma) != tau:
                result = CaseSplit(2, chain, sigma, tau, order_sensitive_from_type(tau, k))
                break
        if result.case == 2:
            break
    ctx._case = result
    return result


# Case 1 ---------------------------------------------------------------------

@dataclass(frozen=True)
class SimpleDecomposition:
    t: int
    chains: tuple
    antichains: tuple
    pivot: Optional[int] = None  # block index where the colour was fixed early, if any

    def problems(self, ctx: Ctx) -> list:
        P, N, M = ctx.P, ctx.N, ctx.M
        out = []
        cover = 0
        for c in self.chains:
            m = P.mask(c)
            if not mask_is_chain(P, m):
                out.append(f"{sorted(c)} is not a chain")
            cover |= m
        for a in self.antichains:
            m = P.mask(a)
            if not mask_is_antichain(P, m):
                out.append(f"{sorted(a)} is not an antichain")
            cover |= m
        if cover != ctx.color_mask(self.t):
            out.append(f"pieces do not cover colour class {self.t} exactly")
        if len(self.chains) > M * (2 * N + 2):
            out.append(f"{len(self.chains)} chains exceed M(2N+2)={M * (2 * N + 2)}")
        if len(self.antichains) > N * (2 * N + 2):
            out.append(f"{len(self.antichains)} antichains exceed N(2N+2)={N * (2 * N + 2)}")
        return out

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "chains": [list(c) for c in self.chains],
            "antichains": [sorted(a) for a in self.antichains],
        }


def _levels_and_cover(P, X: int, count: int, direction: str) -> tuple:
    levs = [m for m in levels_mask(P, X, direction)[:count] if m]
    rest = X
    for m in levs:
        rest &= ~m
    return levs, restricted_cover_mask(P, rest).chains


def simple_decomposition(ctx: Ctx) -> SimpleDecomposition:
    """Cover one colour class by boundedly many chains and antichains (Case 1)."""
    if case_split(ctx).case != 1:
        raise CaseMismatch("chains are not homogeneous")
    P, N, M = ctx.P, ctx.N, ctx.M
    cp = ctx.cp
    D = decompose(cp)
    K = D.blocks.K
    opp_parts = []
    fail = None
    for n in range(K + 1):
        block = D.blocks.block_mask(P, n)
        levs, chains = _levels_and_cover(P, block & cp.color_mask((n + 1) % 2), N, "below")
        opp_parts.append((levs, chains))
        if len(chains) > M:
            fail = n
            break
    chains: list = []
    antichains: list = []

    def take(n: int, t: int) -> None:
        if n % 2 == t:
            chains.extend(D.chain_covers[n])
        else:
            levs, cs = opp_parts[n]
            antichains.extend(members(m) for m in levs)
            chains.extend(cs)

    if fail is None or fail == K:
        t = K % 2
        for n in range(K + 1):
            take(n, t)
        pivot = None
    else:
        t = fail % 2
        for n in range(fail + 1):
            take(n, t)
        An = P.mask(D.blocks.antichains[fail])
        cands = _kernels.maximal_antichains(
            P.n, [P.incomparable_mask(i) for i in range(P.n)], An | up_of(P, An), cp.color_mask(t), M
        )
        cands = [c for c in cands if mask_is_maximal_antichain(P, c) and mask_antichain_leq(P, An, c)]
        if not cands:
            raise InternalBoundViolation("no maximal antichain above the pivot block")
        star = min(leq_maximal(P, cands), key=lambda m: tuple(bits(m)))
        mid = interval_mask(P, An, star, "closed-closed") & cp.color_mask(t)
        levs, cs = _levels_and_cover(P, mid, N, "above")
        antichains.extend(members(m) for m in levs)
        chains.extend(cs)
        high = up_of(P, star) & cp.color_mask(t)
        chains.extend(restricted_cover_mask(P, high).chains)
        pivot = fail
    sd = SimpleDecomposition(t, tuple(chains), tuple(antichains), pivot)
    cover = 0
    for c in sd.chains:
        cover |= P.mask(c)
    for a in sd.antichains:
        cover |= P.mask(a)
    if cover != cp.color_mask(t):
        raise InternalBoundViolation(f"pieces do not cover colour class {t}")
    return sd


def _chain_input(ctx: Ctx, C: Iterable[int], t: int) -> int:
    c = ctx.P.mask(C)
    if not mask_is_chain(ctx.P, c):
        raise NotChain(f"{sorted(bits(c))} is not a chain")
    _check_colour_set(ctx, c, t)
    return c


def _pieces(ctx: Ctx, c: int, t: int) -> list:
    comp = compress_chain(ctx.cp, bits(c), t)
    return [sorted_chain(ctx.P, c & point_interval_mask(ctx.P, lo, hi)) for lo, hi in comp.pairs]


def _near(order: list, m: int, below: int, above: int) -> list:
    return order[max(0, m - below): m] + order[m: m + above]


def define_chain_case1(ctx: Ctx, C: Iterable[int], t: int) -> RoughDefinition:
    P, N = ctx.P, ctx.N
    c = _chain_input(ctx, C, t)
    if case_split(ctx).case != 1:
        raise CaseMismatch("chains are not homogeneous")
    budget = chain_budget(N)
    if N == 0:
        return _constant_columns(ctx, c, t, "chain", budget)
    if popcount(c) <= N:
        return RoughDefinition(_eqs(bits(c)), members(c), t, "chain", budget)
    minority = ctx.color_mask(1 - t)
    parts = []
    info = []
    for order in _pieces(ctx, c, t):
        if len(order) <= N:
            parts.append(_eqs(order))
            continue
        rank = {x: k for k, x in enumerate(order)}
        kept = set(order[: N + 1]) | set(order[-(N + 1):])
        added: list = []
        while True:
            pick = None
            for j in bits(minority):
                if j not in added and ctx.homogeneous(sorted(kept) + added + [j]):
                    pick = j
                    break
            if pick is None:
                break
            if len(added) == N:
                raise IndiscernibilityBroken(f"chain growth did not stop after N={N} steps")
            added.append(pick)
            below = [x for x in order if P.lt(x, pick)]
            above = [x for x in order if P.lt(pick, x)]
            if below:
                m = rank[below[-1]]
                kept |= set(_near(order, m + 1, N + 1, N + 1))
            elif above:
                m = rank[above[0]]
                kept |= set(_near(order, m, N + 1, N + 1))
        S = sorted(kept | set(added))
        tau = ctx.common_type(S)
        if tau is None:
            raise IndiscernibilityBroken("grown chain core is not homogeneous")
        parts.append(
            disj([conj([_lits(ctx.type_literals(S, tau))] + _neqs(added))] + [Eq(i) for i in sorted(kept)])
        )
        info.append({"piece": order, "kept": sorted(kept), "I0": added})
    return RoughDefinition(disj(parts), members(c), t, "chain", budget, info={"pieces": info})


# Case 2 ---------------------------------------------------------------------

def _order_sensitive(ctx: Ctx) -> OrderSensitive:
    cs = case_split(ctx)
    if cs.case != 2:
        raise CaseMismatch("chains are homogeneous")
    if cs.order_sensitive is None:
        raise NoOrderSensitiveDelta("no order-sensitive literal for the chain type")
    return cs.order_sensitive


def _order_homogeneous_with(ctx: Ctx, X: list, pos: int, j: int, tau: int) -> bool:
    """Would inserting ``j`` at ``pos`` keep every increasing tuple at type ``tau``?"""
    k = ctx.N + 1
    new = X[:pos] + [j] + X[pos:]
    others = [k_ for k_ in range(len(new)) if k_ != pos]
    for combo in itertools.combinations(others, k - 1):
        idx = sorted(combo + (pos,))
        if ctx.tmask([new[q] for q in idx]) != tau:
            return False
    return True


def _insertion_ok(ctx: Ctx, X: list, in_chain: set, added: list, j: int, pos: int) -> bool:
    P, N = ctx.P, ctx.N
    new = X[:pos] + [j] + X[pos:]
    where = {x: q for q, x in enumerate(new)}
    anchors = [-1, len(new)] + [where[x] for x in added]
    for q in anchors:
        lo, hi = sorted((q, pos))
        between = sum(1 for x in new[lo + 1: hi] if x in in_chain)
        if between < N + 1:
            return False
    if any(P.lt(j, x) for x in in_chain):
        if any((pos < where[x]) != P.lt(j, x) for x in in_chain):
            return False
    if any(P.lt(x, j) for x in in_chain):
        if any((where[x] < pos) != P.lt(x, j) for x in in_chain):
            return False
    return True


def define_chain_case2(ctx: Ctx, C: Iterable[int], t: int) -> RoughDefinition:
    P, N = ctx.P, ctx.N
    c = _chain_input(ctx, C, t)
    delta = _order_sensitive(ctx)
    ell = delta.ell
    budget = chain_budget(N)
    if N == 0:
        return _constant_columns(ctx, c, t, "chain", budget)
    if popcount(c) <= N:
        return RoughDefinition(_eqs(bits(c)), members(c), t, "chain", budget)
    minority = ctx.color_mask(1 - t)
    parts = []
    info = []
    for order in _pieces(ctx, c, t):
        if len(order) <= N:
            parts.append(_eqs(order))
            continue
        in_chain = set(order)
        X = list(order)
        tau = ctx.tmask(X[: N + 1])
        added: list = []
        while True:
            found = None
            for j in bits(minority):
                if j in added:
                    continue
                for pos in range(len(X) + 1):
                    if _insertion_ok(ctx, X, in_chain, added, j, pos) and _order_homogeneous_with(
                        ctx, X, pos, j, tau
                    ):
                        found = (j, pos)
                        break
                if found:
                    break
            if found is None:
                break
            if len(added) == N:
                raise IndiscernibilityBroken(f"order extension did not stop after N={N} steps")
            j, pos = found
            X.insert(pos, j)
            added.append(j)
        js = [x for x in X if x not in in_chain]
        plus = [order[: N + 1]]
        minus = []
        for j in js:
            q = X.index(j)
            before = [x for x in X[:q] if x in in_chain]
            after = [x for x in X[q + 1:] if x in in_chain]
            minus.append(before[-(N + 1):])
            plus.append(after[: N + 1])
        minus.append(order[-(N + 1):])
        kept = set()
        for blk in plus + minus:
            kept |= set(blk)
        rank = {x: k for k, x in enumerate(order)}
        gap_defs = []
        for n in range(len(js) + 1):
            lo, hi = rank[plus[n][0]], rank[minus[n][-1]]
            gap = [x for x in order[lo + 1: hi] if x not in kept]
            if not gap:
                continue
            base = sorted(set(plus[n]) | set(minus[n]) | set(js))
            seq_ = plus[n][-(ell + 1):] + minus[n][: N - ell]
            first = tuple(seq_[:ell]) + (None,) + tuple(seq_[ell + 1:])
            second = tuple(seq_[:ell]) + (None, seq_[ell]) + tuple(seq_[ell + 2:])
            theta = conj([Delta(delta.pattern, delta.sign, first), Delta(delta.pattern, not delta.sign, second)])
            types = {ctx.complete_type(base, g, N) for g in gap}
            gap_defs.append(conj([theta, disj(_lits(ty) for ty in sorted(types, key=sorted_key))]))
        body = [Eq(i) for i in sorted(kept)]
        if gap_defs:
            body.append(conj([disj(gap_defs)] + _neqs(js)))
        parts.append(disj(body))
        info.append({"piece": order, "order": X, "kept": sorted(kept), "added": js})
    return RoughDefinition(disj(parts), members(c), t, "chain", budget, info={"pieces": info})


def sorted_key(lits: frozenset) -> tuple:
    return tuple(sorted((tuple(-1 if x is None else x for x in d.slots), d.pattern, d.sign) for d in lits))


def _region_key(P, i: int, J0: int, J1: int) -> tuple:
    return ((P.down[i] | 1 << i) & J0, (P.up[i] | 1 << i) & J1)


def _chain_down(P, start: int, within: int, level_of: dict, steps: int) -> list:
    out = [start]
    cur = start
    for _ in range(steps):
        nxt = [x for x in bits(P.down[cur] & within) if level_of[x] == level_of[cur] - 1]
        if not nxt:
            raise InternalBoundViolation(f"no level predecessor below {cur}")
        cur = nxt[0]
        out.append(cur)
    return out


def _level_index(P, X: int, direction: str) -> dict:
    out = {}
    for k, m in enumerate(levels_mask(P, X, direction)):
        for i in bits(m):
            out[i] = k
    return out


def _define_region(
    ctx: Ctx,
    t: int,
    ell: int,
    Xt: int,
    Xs: int,
    Xss: int,
    outside: int,
    region: int,
    parts: list,
    formulas: list,
    info: list,
) -> None:
    """Separate ``Xss`` from the outside minority by complete types over a
    bounded core, recursing on elements whose type an outsider shares."""
    P, N = ctx.P, ctx.N
    if not Xss:
        return
    mins = [i for i in bits(Xss) if not P.down[i] & Xss]
    maxs = [i for i in bits(Xss) if not P.up[i] & Xss]
    if len(mins) < N + 1 or len(maxs) < N + 1:
        for ch in restricted_cover_mask(P, Xss).chains:
            d = define_chain_case2(ctx, ch, t)
            parts.append(d)
            formulas.append(d.formula)
        info.append({"region": sorted(bits(region)), "elements": sorted(bits(Xss)), "chains_fallback": True})
        return
    Am, Ap = mins[: N + 1], maxs[: N + 1]
    Im = _grow_homogeneous(ctx, Am, outside)
    Ip = _grow_homogeneous(ctx, Ap, outside)
    below_lv = _level_index(P, Xt, "below")
    above_lv = _level_index(P, Xs, "above")
    Xm = set()
    for i in Am:
        Xm |= set(_chain_down(P, i, Xt, below_lv, ell))
    Xp = set()
    for i in Ap:
        x = i
        Xp.add(x)
        for _ in range(max(0, N - ell - 1)):
            nxt = [y for y in bits(P.up[x] & Xs) if above_lv[y] == above_lv[x] - 1]
            if not nxt:
                raise InternalBoundViolation(f"no level successor above {x}")
            x = nxt[0]
            Xp.add(x)
    X0 = sorted(Xm | Xp | set(Im) | set(Ip))
    # members of X0 have a degenerate type over X0; name them directly
    named = [i for i in bits(Xss) if i in X0]
    type_of = {i: ctx.complete_type(X0, i, 0) for i in bits(Xss) if i not in X0}
    excluded = set(Im) | set(Ip)
    clash = {ctx.complete_type(X0, j, 0) for j in bits(outside) if j not in excluded and j not in X0}
    rest = 0
    types = set()
    for i, ty in type_of.items():
        if ty in clash:
            rest |= 1 << i
        else:
            types.add(ty)
    pieces = [Eq(i) for i in named]
    if types:
        typed = disj(_lits(ty) for ty in sorted(types, key=sorted_key))
        pieces.insert(0, conj([typed] + _neqs(excluded)))
    formulas.append(disj(pieces) if pieces else FALSE)
    info.append(
        {
            "region": sorted(bits(region)),
            "A_minus": Am,
            "A_plus": Ap,
            "I_minus": Im,
            "I_plus": Ip,
            "X0": X0,
            "unseparated": sorted(bits(rest)),
        }
    )
    _define_region(ctx, t, ell, Xt, Xs, rest, outside, region, parts, formulas, info)


def define_block_case2(
    ctx: Ctx, A: Optional[Iterable[int]], A2: Optional[Iterable[int]], t: int
) -> RoughDefinition:
    """Rough definition of the colour-``t`` part of ``[A, A2]`` over the rest of P.

    ``None`` for ``A`` (``A2``) means the band is unbounded below (above).
    """
    P, N = ctx.P, ctx.N
    delta = _order_sensitive(ctx)
    ell = delta.ell
    lo = None if A is None else P.mask(A)
    hi = None if A2 is None else P.mask(A2)
    for m in (lo, hi):
        if m is None:
            continue
        if not mask_is_maximal_antichain(P, m):
            raise NotMaximalAntichain(f"{sorted(bits(m))} is not a maximal antichain")
        if popcount(m & ctx.color_mask(t)) <= N:
            raise BadMajority(f"antichain {sorted(bits(m))} has at most N elements of colour {t}")
    if lo is not None and hi is not None and not mask_antichain_leq(P, lo, hi):
        raise OrderViolation("lower antichain is not below the upper one")
    J0 = J1 = 0
    if lo is not None:
        comp = compress_antichain_mask(ctx.cp, lo, t)
        J0 = P.mask(comp.A0) | P.mask(comp.J_minus)
    if hi is not None:
        comp = compress_antichain_mask(ctx.cp, hi, t)
        J1 = P.mask(comp.A0) | P.mask(comp.J_plus)
    band = interval_mask(P, lo, hi, "closed-closed")
    outside_minority = ctx.color_mask(1 - t) & ~band
    regions: dict = {}
    for i in bits(band):
        key = _region_key(P, i, J0, J1)
        regions[key] = regions.get(key, 0) | 1 << i

    parts: list = []
    formulas: list = []
    info = []
    for key in sorted(regions, key=lambda k: (tuple(bits(k[0])), tuple(bits(k[1])))):
        Xt = regions[key] & ctx.color_mask(t)
        if not Xt:
            continue
        low_levels = [m for m in levels_mask(P, Xt, "below")[:ell] if m]
        Xs = Xt
        for m in low_levels:
            Xs &= ~m
        top_levels = [m for m in levels_mask(P, Xs, "above")[: max(0, N - ell - 1)] if m]
        Xss = Xs
        for m in top_levels:
            Xss &= ~m
        for m in low_levels + top_levels:
            d = define_antichain(ctx, bits(m), t)
            parts.append(d)
            formulas.append(d.formula)
        _define_region(ctx, t, ell, Xt, Xs, Xss, outside_minority, regions[key], parts, formulas, info)

    target = members(band & ctx.color_mask(t))
    return RoughDefinition(
        disj(formulas) if formulas else FALSE,
        target,
        t,
        "block",
        block_budget(N),
        region=members(band),
        parts=tuple(parts),
        info={"regions": info},
    )


# assembly ---------------------------------------------------------------------

@dataclass
class PsiResult:
    formula: Formula
    case: int
    definitions: list
    mismatches: tuple
    info: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.mismatches

    @property
    def template(self) -> str:
        return template(self.formula)


def _stage_max(ctx: Ctx, allowed: int, t: int) -> Optional[int]:
    P = ctx.P
    cands = _kernels.maximal_antichains(
        P.n, [P.incomparable_mask(i) for i in range(P.n)], allowed, ctx.color_mask(t), ctx.M
    )
    cands = [c for c in cands if mask_is_maximal_antichain(P, c)]
    if not cands:
        return None
    return min(leq_maximal(P, cands), key=lambda m: tuple(bits(m)))


def assemble_psi(ctx: Ctx, row: Optional[int] = None) -> PsiResult:
    """Formula holding exactly at the elements whose column row ``a`` satisfies."""
    if row is not None:
        ctx = ctx.with_row(row)
    P = ctx.P
    cp = ctx.cp
    cs = case_split(ctx)
    defs: list = []
    info: dict = {"case": cs.case}
    if cs.case == 1:
        sd = simple_decomposition(ctx)
        for ch in sd.chains:
            defs.append(define_chain_case1(ctx, ch, sd.t))
        for a in sd.antichains:
            defs.append(define_antichain(ctx, a, sd.t))
        gamma = disj(d.formula for d in defs) if defs else FALSE
        psi = gamma if sd.t == 1 else Not(gamma)
        info["t"] = sd.t
        info["decomposition"] = sd.to_dict()
    else:
        bs = breakdown(cp)
        K = bs.K
        masks = [P.mask(a) for a in bs.antichains]
        disjuncts = []
        covered = 0
        bands = []
        for n in range(0, K + 1, 2):
            lo = masks[n - 1] if n >= 1 else None
            hi = masks[n] if n < K else None
            star = _stage_max(ctx, interval_mask(P, lo, hi, "closed-closed"), 1)
            if star is None:
                continue
            band = interval_mask(P, lo, hi=star, kind="closed-closed")
            covered |= band
            block_def = define_block_case2(ctx, None if lo is None else bits(lo), bits(star), 1)
            zero_defs = [
                define_chain_case2(ctx, ch, 0)
                for ch in restricted_cover_mask(P, band & cp.color_mask(0)).chains
            ]
            defs.append(block_def)
            defs.extend(zero_defs)
            disjuncts.append(conj([block_def.formula] + [Not(d.formula) for d in zero_defs]))
            bands.append({"n": n, "upper": sorted(bits(star)), "zero_chains": len(zero_defs)})
        rest = P.full & ~covered
        one_chains = []
        for n in range(K + 1):
            part = rest & bs.block_mask(P, n) & cp.color_mask(1)
            for ch in restricted_cover_mask(P, part).chains:
                d = define_chain_case2(ctx, ch, 1)
                defs.append(d)
                disjuncts.append(d.formula)
                one_chains.append(list(ch))
        psi = disj(disjuncts) if disjuncts else FALSE
        info["blocks"] = bs.to_dict()
        info["bands"] = bands
        info["one_chains"] = one_chains
    support = ctx.ev.mask(psi)
    ones = cp.color_mask(1)
    mismatches = tuple(bits(support ^ ones))
    return PsiResult(psi, cs.case, defs, mismatches, info)
