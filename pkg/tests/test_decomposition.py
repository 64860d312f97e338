import itertools

import pytest
from conftest import colored

from oracles import maximal_antichains, width
from posetdef.decomposition import (
    barrier_partition,
    breakdown,
    check_antichain_compression,
    compress_antichain,
    compress_chain,
    decompose,
    evaluate,
)
from posetdef.errors import BadMajority, InvalidColoring, NotChain, NotMaximalAntichain, NotMonochromatic
from posetdef.generate import colored_corpus
from posetdef.poset import Poset, closure, interval

SMALL = colored_corpus(seed=5, count=60, Ns=(0, 1), max_n=11)


def _leq(lt, A, B):
    n = len(lt)
    below_b = {x for x in range(n) if any(lt[x][b] for b in B)}
    return A <= (B | below_b)


def _block_sets(P, bs):
    out = []
    for n in range(bs.K + 1):
        lo = bs.antichains[n - 1] if n >= 1 else None
        hi = bs.antichains[n] if n < bs.K else None
        out.append(interval(P, lo, hi, "closed-open"))
    return out


def test_constant_one_has_no_blocks(DIAMOND):
    assert breakdown(colored(DIAMOND, [1] * 4, 1)).K == 0


def test_chain6():
    CP = colored(Poset.chain(6), [1, 1, 1, 0, 0, 0], 1)
    D = decompose(CP)
    assert D.blocks.K == 0
    assert [list(c) for c in D.chain_covers[0]] == [[3, 4, 5]]
    assert D.ones() == {0, 1, 2}


def test_constant_zero(DIAMOND):
    D = decompose(colored(DIAMOND, [0] * 4, 1))
    assert D.ones() == set()
    assert sorted(i for c in D.chain_covers[0] for i in c) == [0, 1, 2, 3]


def test_balanced_antichain_is_rejected():
    # 7 zeros and 7 ones on one antichain break the bichromatic bound for N=1
    CP = colored(Poset.antichain(14), [0] * 7 + [1] * 7, 1)
    with pytest.raises(InvalidColoring) as exc:
        breakdown(CP)
    assert exc.value.report.condition == "i"
    D = decompose(CP, check=False)
    assert D.ones() == set(range(7, 14))


def test_single_element():
    for c in (0, 1):
        D = decompose(colored(Poset.chain(1), [c], 0))
        assert evaluate(D, 0) == c


@pytest.mark.parametrize("k", range(len(SMALL)))
def test_breakdown_against_oracle(k):
    CP = SMALL[k]
    P, N, M = CP.poset, CP.N, CP.M
    lt = P.matrix()
    D = decompose(CP)
    bs = D.blocks
    assert bs.K <= 2 * N + 2
    assert [evaluate(D, i) for i in range(P.n)] == list(CP.f)
    blocks = _block_sets(P, bs)
    assert sorted(i for b in blocks for i in b) == list(range(P.n))
    for n, B in enumerate(blocks):
        part = sorted(i for i in B if CP.f[i] == n % 2)
        sub = [[lt[a][b] for b in part] for a in part]
        assert (width(sub) if part else 0) <= M
        assert len(D.chain_covers[n]) <= M
    # each A_n is a leq-minimal maximal antichain above its predecessor with > M of colour n%2
    mas = maximal_antichains(lt)
    prev = None
    for n, A in enumerate(bs.antichains):
        def ok(X):
            return sum(1 for i in X if CP.f[i] == n % 2) > M and (prev is None or (X != prev and _leq(lt, prev, X)))
        cands = [X for X in mas if ok(X)]
        assert A in cands
        assert not any(X != A and _leq(lt, X, A) for X in cands)
        prev = A
    last = bs.K
    assert not [X for X in mas if sum(1 for i in X if CP.f[i] == last % 2) > M and (prev is None or (X != prev and _leq(lt, prev, X)))]


def test_compress_chain_examples():
    C5 = Poset.chain(5)
    assert compress_chain(colored(C5, [1] * 5, 1), range(5), 1).pairs == ((0, 4),)
    assert compress_chain(colored(C5, [1, 1, 0, 1, 1], 1), {0, 1, 3, 4}, 1).pairs == ((0, 1), (3, 4))
    assert compress_chain(colored(C5, [1, 1, 0, 1, 1], 1), {3}, 1).pairs == ((3, 3),)
    with pytest.raises(NotChain):
        compress_chain(colored(Poset.antichain(2), [1, 1], 1), {0, 1}, 1)
    with pytest.raises(NotMonochromatic):
        compress_chain(colored(C5, [1, 1, 0, 1, 1], 1), {1, 2}, 1)


def _minimal_interval_cover(lt, f, chain, t):
    """Fewest chain-intervals [a, b] (inside colour t) covering ``chain``."""
    n = len(lt)
    order = sorted(chain, key=lambda i: sum(lt[j][i] for j in range(n)))
    best = len(order)
    for cuts in range(len(order)):
        for split in itertools.combinations(range(1, len(order)), cuts):
            bounds = [0, *split, len(order)]
            good = True
            for a, b in zip(bounds, bounds[1:]):
                lo, hi = order[a], order[b - 1]
                inside = [x for x in range(n) if (x == lo or lt[lo][x]) and (x == hi or lt[x][hi])]
                if any(f[x] != t for x in inside):
                    good = False
                    break
            if good:
                return cuts + 1
    return best


def test_compress_chain_is_minimal_on_chains():
    for f in itertools.product((0, 1), repeat=7):
        CP = colored(Poset.chain(7), f, 3)
        for t in (0, 1):
            C = [i for i in range(7) if f[i] == t]
            if not C:
                continue
            comp = compress_chain(CP, C, t)
            assert comp.K + 1 == _minimal_interval_cover(CP.poset.matrix(), f, C, t)


def _antichain_equivalences_hold(P, f, A, comp):
    lt = P.matrix()
    A0, Jm, Jp = comp.A0, comp.J_minus, comp.J_plus
    for j in range(P.n):
        if f[j] != 1 - comp.t:
            continue
        below = any(lt[j][a] for a in A)
        above = any(lt[a][j] for a in A)
        below_rhs = any(lt[j][a] for a in A0) or any(j == x or lt[j][x] for x in Jm)
        above_rhs = any(lt[a][j] for a in A0) or any(j == x or lt[x][j] for x in Jp)
        if below != below_rhs or above != above_rhs:
            return False
    return True


@pytest.mark.parametrize("k", range(len(SMALL)))
def test_compress_antichain_random(k):
    CP = SMALL[k]
    P = CP.poset
    for A in maximal_antichains(P.matrix()):
        for t in (0, 1):
            if sum(1 for i in A if CP.f[i] != t) > CP.N:
                with pytest.raises(BadMajority):
                    compress_antichain(CP, A, t)
                continue
            comp = compress_antichain(CP, A, t)
            assert len(comp.A0) <= 2 * CP.N + 1
            assert len(comp.J_minus) <= CP.N and len(comp.J_plus) <= CP.N
            assert all(CP.f[j] != t for j in comp.J_minus | comp.J_plus)
            assert comp.A0 <= A
            assert _antichain_equivalences_hold(P, CP.f, A, comp)
            assert check_antichain_compression(CP, A, comp) == []
            if len(A) <= 2 * CP.N:
                assert comp.A0 == A and not comp.J_minus and not comp.J_plus


def test_compress_antichain_rejects_non_maximal(DIAMOND):
    with pytest.raises(NotMaximalAntichain):
        compress_antichain(colored(DIAMOND, [0] * 4, 1), {1}, 0)


def test_barrier_partition_diamond(DIAMOND):
    CP = colored(DIAMOND, [0, 0, 0, 0], 1)
    bp = barrier_partition(CP, {1, 2}, 0)
    assert set().union(*bp.blocks.values()) == {1, 2, 3}
    # the region above the top element is empty
    assert barrier_partition(CP, {3}, 0).blocks == {frozenset({3}): frozenset({3})}
    assert closure(DIAMOND, {3}, "up") == set()
