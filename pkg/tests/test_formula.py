import pytest

from posetdef.formula import (
    FALSE,
    TRUE,
    And,
    Delta,
    Eq,
    Evaluator,
    Not,
    Or,
    delta_holds_direct,
    dumps,
    evaluate,
    loads,
    parameters,
    template,
)
from posetdef.generate import Stream, trace_candidate
from posetdef.poset import Poset
from posetdef.trace import IndexedSequence, TraceStructure


def _instance():
    T = TraceStructure.from_sets(5, [{0}, {0, 1, 2}, {2, 3, 4}, {4}])
    return T, IndexedSequence(Poset.antichain(4), (0, 1, 2, 3))


def test_eq_holds_at_itself():
    T, seq = _instance()
    for j in range(4):
        assert evaluate(Eq(j), T, seq, j)


def test_eq_compares_columns():
    T = TraceStructure.from_rows(["01"])
    seq = IndexedSequence(Poset.antichain(3), (0, 1, 0))
    assert Evaluator(T, seq).support(Eq(0)) == {0, 2}


def test_contradiction_false_everywhere():
    T, seq = _instance()
    F = Or((Eq(1), Delta(0b01, True, (2, None))))
    ev = Evaluator(T, seq)
    assert ev.mask(And((F, Not(F)))) == 0
    assert ev.mask(TRUE) == 0b1111 and ev.mask(FALSE) == 0


def test_delta_matches_direct_scan():
    s = Stream(4)
    for k in range(40):
        T, seq = trace_candidate("random", s, 5)
        ev = Evaluator(T, seq)
        arity = 1 + s.below(3)
        free = s.below(arity)
        slots = tuple(None if p == free else s.below(5) for p in range(arity))
        atom = Delta(s.below(1 << arity), s.coin(0.5), slots)
        for j in range(5):
            assert ev.holds(atom, j) == delta_holds_direct(T, seq, atom, j)


def test_delta_needs_one_free_slot():
    with pytest.raises(ValueError):
        Delta(0, True, (1, 2))
    with pytest.raises(ValueError):
        Delta(0, True, (None, None))


def test_text_round_trip():
    F = Or((And((Eq(3), Delta(0b0110, True, (0, 1, None, 2)))), Not(Eq(7)), FALSE, TRUE))
    text = dumps(F)
    assert "(delta s=0110 sign=+ slots=[p0,p1,*,p2])" in text
    assert loads(text) == F


@pytest.mark.parametrize("bad", ["(= 3)", "(delta s=01 sign=+ slots=[p0])", "(and (= p1)", "(xor)", "(= p1) extra", "(not (= p1) (= p2))"])
def test_loads_rejects(bad):
    with pytest.raises(ValueError):
        loads(bad)


def test_template_erases_parameters():
    F = Or((Eq(1), Eq(2), And((Delta(0b01, True, (4, None)), Not(Eq(5))))))
    G = Or((Eq(9), And((Delta(0b01, True, (0, None)), Not(Eq(3))))))
    assert template(F) == template(G)
    assert template(F) != template(Or((Eq(1), Delta(0b01, False, (4, None)))))
    assert parameters(F) == {1, 2, 4, 5}
