import itertools

import pytest

from oracles import maximal_antichains
from posetdef.chains import restricted_cover
from posetdef.definability import (
    Ctx,
    assemble_psi,
    bounded_core,
    case_split,
    define_antichain,
    define_block_case2,
    define_chain_case1,
    define_chain_case2,
    simple_decomposition,
)
from posetdef.errors import BadMajority, CaseMismatch, NotAntichain, NotChain, NotMonochromatic
from posetdef.formula import FALSE, Eq, Or, parameters
from posetdef.generate import halflines_instance, singletons_instance, trace_instances
from posetdef.poset import Poset, level
from posetdef.trace import IndexedSequence, TraceStructure

CASE1 = list(trace_instances(seed=21, n=9, count=24, families=("singletons", "cosingletons", "constant", "ideals")))
CASE2 = list(trace_instances(seed=22, n=10, count=24, families=("halflines", "laminar", "colaminar", "ideals")))


def _ctxs(instances, case):
    out = []
    for inst in instances:
        ctx = Ctx(inst.T, inst.seq, inst.N)
        if case_split(ctx).case == case:
            out.append(ctx)
    return out


def _sound(ctx, d):
    for dd in d.all_definitions():
        assert dd.problems(ctx) == [], dd.kind


def test_corpora_cover_both_cases():
    assert len(_ctxs(CASE1, 1)) >= 10
    assert len(_ctxs(CASE2, 2)) >= 10


def test_case_split_examples():
    T = TraceStructure.from_rows(["01", "11"])
    assert case_split(Ctx(T, IndexedSequence(Poset.chain(4), (0,) * 4), 1)).case == 1
    T, seq = singletons_instance(5)
    assert case_split(Ctx(T, seq)).case == 1
    T, seq = halflines_instance(5, upward=True)
    cs = case_split(Ctx(T, seq))
    assert cs.case == 2 and len(cs.chain) == 2
    perm = [cs.chain[p] for p in cs.sigma]
    assert T.type_mask(cs.chain) != T.type_mask(tuple(perm))
    assert cs.order_sensitive is not None


def test_small_antichain_is_equality_disjunction():
    T, seq = singletons_instance(6)
    ctx = Ctx(T, seq, row=6)  # the empty row: everything has colour 0
    d = define_antichain(ctx, {2}, 0)
    assert d.formula == Eq(2)
    _sound(ctx, d)


def test_antichain_input_errors():
    T, seq = halflines_instance(4, upward=True)
    ctx = Ctx(T, seq, row=4)
    with pytest.raises(NotAntichain):
        define_antichain(ctx, {0, 1}, 1)
    ctx0 = Ctx(*singletons_instance(4), row=0)
    with pytest.raises(NotMonochromatic):
        define_antichain(ctx0, {0, 1}, 1)


def test_antichain_on_constant_sequence():
    T = TraceStructure.from_rows(["01", "11", "00"])
    P = Poset.antichain(6)
    ctx = Ctx(T, IndexedSequence(P, (1,) * 6), row=0)
    d = define_antichain(ctx, range(6), 1)
    _sound(ctx, d)


@pytest.mark.parametrize("which", ["case1", "case2"])
def test_antichains_defined_soundly(which):
    insts = CASE1 if which == "case1" else CASE2
    count = 0
    for inst in insts:
        base = Ctx(inst.T, inst.seq, inst.N)
        for a in range(inst.T.U):
            ctx = base.with_row(a)
            P = ctx.P
            for k in range(P.n):
                lev = level(P, k)
                for t in (0, 1):
                    A = {i for i in lev if ctx.f[i] == t}
                    if not A:
                        continue
                    d = define_antichain(ctx, A, t)
                    _sound(ctx, d)
                    assert len(d.params) <= d.budget
                    count += 1
    assert count > 100


def test_bounded_core_small_antichain():
    ctx = Ctx(*singletons_instance(4), row=4)
    assert bounded_core(ctx, range(4), 0) == set(range(4)) or len(range(4)) > 2 * ctx.N


def test_bounded_core_preserves_homogeneity():
    checked = 0
    for inst in CASE1 + CASE2:
        base = Ctx(inst.T, inst.seq, inst.N)
        lt = base.P.matrix()
        mas = maximal_antichains(lt)
        for a in range(min(inst.T.U, 6)):
            ctx = base.with_row(a)
            N = ctx.N
            for A in mas:
                for t in (0, 1):
                    if sum(1 for i in A if ctx.f[i] != t) > N:
                        with pytest.raises(BadMajority):
                            bounded_core(ctx, A, t)
                        continue
                    A0 = bounded_core(ctx, A, t)
                    assert A0 <= A
                    if len(A) <= 2 * N:
                        assert A0 == A
                    minority = [j for j in range(ctx.P.n) if ctx.f[j] != t and j not in A]
                    for r in range(N + 1):
                        for I0 in itertools.combinations(minority, r):
                            assert ctx.homogeneous(sorted(A | set(I0))) == ctx.homogeneous(sorted(A0 | set(I0)))
                            checked += 1
    assert checked > 100


def test_simple_decomposition_constant_colouring():
    T = TraceStructure.from_rows(["01", "11"])
    P = Poset.from_pairs(5, [(0, 1), (1, 2), (3, 4)])
    ctx = Ctx(T, IndexedSequence(P, (1,) * 5), 1, row=0)
    sd = simple_decomposition(ctx)
    # the empty colour class is covered trivially
    assert sd.t == 0 and sd.chains == () and sd.antichains == ()
    assert sd.problems(ctx) == []


def test_simple_decomposition_bounds():
    for ctx0 in _ctxs(CASE1, 1):
        for a in range(ctx0.T.U):
            ctx = ctx0.with_row(a)
            sd = simple_decomposition(ctx)
            assert sd.problems(ctx) == []


def test_simple_decomposition_refuses_case2():
    ctx = _ctxs(CASE2, 2)[0].with_row(0)
    with pytest.raises(CaseMismatch):
        simple_decomposition(ctx)
    with pytest.raises(CaseMismatch):
        define_chain_case1(ctx, {0}, ctx.f[0])


def test_chain_case1_singleton_and_errors():
    T = TraceStructure.from_rows(["01", "11"])
    P = Poset.chain(4)
    ctx = Ctx(T, IndexedSequence(P, (1,) * 4), 1, row=0)
    assert define_chain_case1(ctx, {2}, 1).formula == Eq(2)
    d = define_chain_case1(ctx, range(4), 1)
    _sound(ctx, d)
    with pytest.raises(NotChain):
        define_chain_case1(Ctx(*singletons_instance(3), row=3), {0, 1}, 0)


@pytest.mark.parametrize("case", [1, 2])
def test_chains_defined_soundly(case):
    define = define_chain_case1 if case == 1 else define_chain_case2
    count = 0
    for ctx0 in _ctxs(CASE1 if case == 1 else CASE2, case):
        for a in range(ctx0.T.U):
            ctx = ctx0.with_row(a)
            for t in (0, 1):
                for ch in restricted_cover(ctx.P, [i for i in range(ctx.P.n) if ctx.f[i] == t]).chains:
                    d = define(ctx, ch, t)
                    _sound(ctx, d)
                    count += 1
    assert count > 50


def test_chain_case2_interval_only():
    # no interlopers of the other colour: the chain is one interval
    T, seq = halflines_instance(6, upward=True)
    ctx = Ctx(T, seq, row=6)
    d = define_chain_case2(ctx, range(6), 1)
    _sound(ctx, d)


def test_blocks_defined_soundly():
    # bands taken from the breakdown, as used by the assembled formula
    count = 0
    insts = trace_instances(seed=23, n=14, count=8, families=("colaminar", "cosingletons"))
    for ctx0 in _ctxs(CASE2, 2) + _ctxs(insts, 2):
        for a in range(ctx0.T.U):
            ctx = ctx0.with_row(a)
            r = assemble_psi(ctx)
            for d in r.definitions:
                if d.kind == "block":
                    _sound(ctx, d)
                    assert set(d.target) <= set(d.region)
                    count += 1
    assert count > 5


def test_block_bad_majority():
    ctx = _ctxs(CASE2, 2)[0].with_row(0)
    lt = ctx.P.matrix()
    for A in maximal_antichains(lt):
        for t in (0, 1):
            if sum(1 for i in A if ctx.f[i] == t) <= ctx.N:
                with pytest.raises(BadMajority):
                    define_block_case2(ctx, A, None, t)
                return
    pytest.skip("every maximal antichain has a large colour-t part")


def test_psi_constant_rows():
    T = TraceStructure.from_rows(["11", "00"])
    P = Poset.from_pairs(4, [(0, 1), (2, 3)])
    ctx = Ctx(T, IndexedSequence(P, (0, 1, 0, 1)), 1)
    for a, expect in ((0, 0b1111), (1, 0)):
        r = assemble_psi(ctx, a)
        assert r.ok and ctx.ev.mask(r.formula) == expect


@pytest.mark.parametrize("case", [1, 2])
def test_psi_matches_rows(case):
    for ctx0 in _ctxs(CASE1 if case == 1 else CASE2, case):
        for a in range(ctx0.T.U):
            r = assemble_psi(ctx0, a)
            assert r.ok, r.mismatches
            row = [int(ctx0.T.R[a, c]) for c in ctx0.cols]
            assert [int(ctx0.ev.holds(r.formula, i)) for i in range(ctx0.P.n)] == row
            ctx = ctx0.with_row(a)
            for d in r.definitions:
                _sound(ctx, d)


def test_zero_dimension_uses_no_parameters():
    T = TraceStructure.from_rows(["0110", "0110"])
    P = Poset.from_pairs(5, [(0, 1), (1, 2), (3, 4)])
    ctx = Ctx(T, IndexedSequence(P, (1, 2, 2, 1, 1)))
    assert ctx.N == 0
    d = define_chain_case1(ctx.with_row(0), {0, 1, 2}, 1)
    assert parameters(d.formula) == frozenset()
    assert assemble_psi(ctx, 0).ok
