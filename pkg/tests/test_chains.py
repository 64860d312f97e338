import pytest

from oracles import labeled_posets, min_chain_partition, width
from posetdef.chains import hopcroft_karp, min_chain_cover, restricted_cover
from posetdef.generate import Stream, random_poset
from posetdef.poset import Poset, is_antichain, is_chain


def _check_cover(P, cover, X=None):
    X = set(range(P.n)) if X is None else set(X)
    seen = [i for c in cover.chains for i in c]
    assert sorted(seen) == sorted(X)
    assert all(is_chain(P, c) for c in cover.chains)
    assert is_antichain(P, cover.width_witness)
    assert cover.width_witness <= X
    assert len(cover.width_witness) == len(cover.chains)


def test_diamond(DIAMOND):
    cover = min_chain_cover(DIAMOND)
    _check_cover(DIAMOND, cover)
    assert cover.width == 2 == min_chain_partition(DIAMOND.matrix())
    assert cover.width_witness == {1, 2}


@pytest.mark.parametrize("k", [1, 2, 5])
def test_antichain_and_chain(k):
    A = min_chain_cover(Poset.antichain(k))
    assert A.width == k and A.width_witness == set(range(k))
    C = min_chain_cover(Poset.chain(k))
    assert C.width == 1 and len(C.width_witness) == 1


def test_restricted(DIAMOND):
    assert restricted_cover(DIAMOND, {1, 2}).width == 2
    assert restricted_cover(DIAMOND, {0, 1, 3}).width == 1
    assert restricted_cover(DIAMOND, set()).width == 0


def test_all_small_posets_match_partition_oracle():
    for n in range(1, 5):
        for lt in labeled_posets(n):
            P = Poset.from_matrix(lt)
            cover = min_chain_cover(P)
            _check_cover(P, cover)
            assert cover.width == min_chain_partition(lt) == width(lt)


def test_random_restricted_covers():
    s = Stream(42)
    for _ in range(40):
        P = random_poset(s, 9, s.random())
        X = [i for i in range(P.n) if s.coin(0.6)]
        cover = restricted_cover(P, X)
        _check_cover(P, cover, X)
        sub = [[P.lt(a, b) for b in X] for a in X]
        assert cover.width == width(sub)


def test_hopcroft_karp_small():
    match = hopcroft_karp({0: [0, 1], 1: [0], 2: [1, 2]})
    assert len(match) == 3
    assert len(set(match.values())) == 3
