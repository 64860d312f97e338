"""Finite trace structures and Delta-types over poset-indexed sequences.

A trace structure is a 0/1 matrix ``R`` with ``U`` rows and ``B`` columns;
row ``u`` satisfies column ``b`` when ``R[u, b] = 1``.  A sign pattern of
arity ``k`` is an integer whose bit ``j`` gives the sign at tuple position
``j``.  The Delta-type of a column tuple is the set of patterns realised by
some row, stored as a bitmask over the ``2^k`` patterns.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from . import _kernels
from .coloring import ColoredPoset
from .errors import NotTotal, OutOfRange, RepeatedIndex, SizeCapExceeded
from .poset import Poset, bits

DEFAULT_MAX_TUPLES = 10**7


def pattern_str(s: int, arity: int) -> str:
    return "".join("1" if s >> j & 1 else "0" for j in range(arity))


def parse_pattern(text: str) -> int:
    if not text or any(c not in "01" for c in text):
        raise ValueError(f"bad sign pattern {text!r}")
    return sum(1 << j for j, c in enumerate(text) if c == "1")


def permute_pattern(s: int, perm: Sequence[int]) -> int:
    """Pattern seen by the tuple ``(x[perm[0]], ..., x[perm[k-1]])``."""
    return sum(1 << j for j, p in enumerate(perm) if s >> p & 1)


def permute_type(mask: int, perm: Sequence[int]) -> int:
    out = 0
    for s in bits(mask):
        out |= 1 << permute_pattern(s, perm)
    return out


@dataclass(frozen=True, eq=False)
class TraceStructure:
    R: np.ndarray  # U x B, uint8

    def __post_init__(self):
        R = np.ascontiguousarray(np.asarray(self.R, dtype=np.uint8))
        if R.ndim != 2:
            raise ValueError("relation matrix must be two-dimensional")
        if R.size and R.max() > 1:
            raise ValueError("relation matrix must be 0/1")
        R.setflags(write=False)
        object.__setattr__(self, "R", R)
        ones = []
        zeros = []
        for b in range(R.shape[1]):
            col = R[:, b]
            m1 = 0
            for u in np.flatnonzero(col):
                m1 |= 1 << int(u)
            ones.append(m1)
            zeros.append(((1 << R.shape[0]) - 1) & ~m1)
        object.__setattr__(self, "_rows", (tuple(zeros), tuple(ones)))

    @property
    def U(self) -> int:
        return self.R.shape[0]

    @property
    def B(self) -> int:
        return self.R.shape[1]

    @classmethod
    def from_rows(cls, rows: Sequence[str]) -> "TraceStructure":
        if not rows:
            raise ValueError("need at least one row")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ValueError("rows have different lengths")
        return cls(np.array([[int(c) for c in r] for r in rows], dtype=np.uint8).reshape(len(rows), width))

    @classmethod
    def from_sets(cls, universe: int, sets: Sequence[Iterable[int]]) -> "TraceStructure":
        """Rows are points ``0..universe-1``, columns are the given sets."""
        R = np.zeros((universe, len(sets)), dtype=np.uint8)
        for b, S in enumerate(sets):
            for u in S:
                if not 0 <= u < universe:
                    raise OutOfRange(f"point {u} outside 0..{universe - 1}")
                R[u, b] = 1
        return cls(R)

    def rows_with(self, col: int, sign: int) -> int:
        """Bitmask of rows ``u`` with ``R[u, col] == sign``."""
        return self._rows[sign][col]

    def realized(self, cols: Sequence[int], s: int) -> bool:
        m = (1 << self.U) - 1
        for j, c in enumerate(cols):
            m &= self._rows[s >> j & 1][c]
            if not m:
                return False
        return True

    def type_mask(self, cols: Sequence[int]) -> int:
        out = 0
        for s in range(1 << len(cols)):
            if self.realized(cols, s):
                out |= 1 << s
        return out

    def row_strings(self) -> list:
        return ["".join(str(int(v)) for v in row) for row in self.R]


@dataclass(frozen=True)
class DeltaType:
    arity: int
    mask: int

    @property
    def satisfied(self) -> frozenset:
        return frozenset(pattern_str(s, self.arity) for s in bits(self.mask))

    def __contains__(self, pattern) -> bool:
        s = parse_pattern(pattern) if isinstance(pattern, str) else int(pattern)
        return bool(self.mask >> s & 1)


def delta_type(T: TraceStructure, N: int, cols: Sequence[int]) -> DeltaType:
    """Delta-type of a column tuple.  The arity is the tuple length (normally N+1)."""
    cols = tuple(int(c) for c in cols)
    for c in cols:
        if not 0 <= c < T.B:
            raise OutOfRange(f"column {c} outside 0..{T.B - 1}")
    return DeltaType(len(cols), T.type_mask(cols))


def type_masks(T: TraceStructure, col_tuples: np.ndarray) -> list:
    """Delta-type masks for many column tuples at once."""
    col_tuples = np.asarray(col_tuples, dtype=np.int64)
    if col_tuples.ndim != 2 or col_tuples.shape[0] == 0:
        return []
    if col_tuples.shape[1] <= 6:
        return [int(m) for m in _kernels.tuple_type_masks(T.R, col_tuples)]
    return [T.type_mask(tuple(int(c) for c in row)) for row in col_tuples]


def independence_dimension(T: TraceStructure) -> tuple:
    """Largest shattered column set, as ``(N, witness)``.

    Level-wise search: a set of size ``k+1`` can only be shattered if all its
    ``k``-subsets are.  The witness is the lexicographically least shattered
    set of maximum size.
    """
    if T.U < 1:
        raise ValueError("trace structure needs at least one row")

    def shattered(cols):
        return T.type_mask(cols) == (1 << (1 << len(cols))) - 1

    level = [(c,) for c in range(T.B) if shattered((c,))]
    if not level:
        return 0, ()
    best = level[0]
    k = 1
    while level:
        seen = set(level)
        nxt = []
        for a in level:
            for c in range(a[-1] + 1, T.B):
                cand = a + (c,)
                if all(cand[:j] + cand[j + 1:] in seen for j in range(k)) and shattered(cand):
                    nxt.append(cand)
        if nxt:
            best = nxt[0]
        level = nxt
        k += 1
    return len(best), best


@dataclass(frozen=True)
class IndexedSequence:
    poset: Poset
    assign: tuple

    def __post_init__(self):
        a = tuple(int(c) for c in self.assign)
        if len(a) != self.poset.n:
            raise OutOfRange(f"assignment has {len(a)} entries for {self.poset.n} elements")
        object.__setattr__(self, "assign", a)

    def check_columns(self, T: TraceStructure) -> None:
        for c in self.assign:
            if not 0 <= c < T.B:
                raise OutOfRange(f"column {c} outside 0..{T.B - 1}")


def qf_order_type(P: Poset, idx: Sequence[int]) -> tuple:
    """Order pattern of a tuple: one code per position pair ``(a, b)``, ``a < b``.

    ``0`` incomparable, ``1`` when ``idx[a] < idx[b]``, ``2`` when
    ``idx[b] < idx[a]``.
    """
    idx = tuple(idx)
    if len(set(idx)) != len(idx):
        raise RepeatedIndex(f"tuple {idx} repeats an index")
    for i in idx:
        if not 0 <= i < P.n:
            raise OutOfRange(f"element {i} outside 0..{P.n - 1}")
    out = []
    for a in range(len(idx)):
        for b in range(a + 1, len(idx)):
            x, y = idx[a], idx[b]
            out.append(1 if P.lt(x, y) else 2 if P.lt(y, x) else 0)
    return tuple(out)


def _perm_array(n: int, k: int) -> np.ndarray:
    if k == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.array(list(itertools.permutations(range(n), k)), dtype=np.int64).reshape(-1, k)


def _order_keys(P: Poset, tuples: np.ndarray) -> np.ndarray:
    lt = np.array(P.matrix(), dtype=np.int64).reshape(P.n, P.n)
    k = tuples.shape[1]
    key = np.zeros(tuples.shape[0], dtype=np.int64)
    for a in range(k):
        for b in range(a + 1, k):
            x, y = tuples[:, a], tuples[:, b]
            key = key * 3 + lt[x, y] + 2 * lt[y, x]
    return key


@dataclass(frozen=True)
class IndiscernibilityResult:
    ok: bool
    counterexample: Optional[tuple] = None  # (tuple, tuple) with equal order type, different Delta-type
    tuples_checked: int = 0


def is_delta_indiscernible(
    T: TraceStructure,
    seq: IndexedSequence,
    N: int,
    all_arities: bool = False,
    max_tuples: int = DEFAULT_MAX_TUPLES,
) -> IndiscernibilityResult:
    """Tuples of distinct indices with the same order pattern must have the
    same Delta-type.  Arity ``N+1`` by default, every arity up to ``N+1``
    with ``all_arities``.

    The counterexample is the lexicographically least pair ``(x, y)``.
    """
    P = seq.poset
    seq.check_columns(T)
    cols = np.array(seq.assign, dtype=np.int64)
    arities = range(1, N + 2) if all_arities else [N + 1]
    checked = 0
    for k in arities:
        if k > P.n:
            continue
        count = 1
        for j in range(k):
            count *= P.n - j
        if count > max_tuples:
            raise SizeCapExceeded(f"{count} tuples exceeds the cap of {max_tuples}")
        tuples = _perm_array(P.n, k)
        checked += len(tuples)
        keys = _order_keys(P, tuples)
        masks = type_masks(T, cols[tuples])
        first: dict = {}
        bad_rep = None
        for r, (key, m) in enumerate(zip(keys.tolist(), masks)):
            rep = first.setdefault(key, r)
            if masks[rep] != m and (bad_rep is None or rep < bad_rep[0]):
                bad_rep = (rep, r)
        if bad_rep is not None:
            x, y = bad_rep
            return IndiscernibilityResult(
                False, (tuple(tuples[x].tolist()), tuple(tuples[y].tolist())), checked
            )
    return IndiscernibilityResult(True, None, checked)


def trace_coloring(T: TraceStructure, seq: IndexedSequence, a: int, N: Optional[int] = None) -> ColoredPoset:
    """Colour ``i`` by whether row ``a`` satisfies column ``seq(i)``."""
    if not 0 <= a < T.U:
        raise OutOfRange(f"row {a} outside 0..{T.U - 1}")
    seq.check_columns(T)
    if N is None:
        N = independence_dimension(T)[0]
    f = tuple(int(T.R[a, c]) for c in seq.assign)
    return ColoredPoset(seq.poset, f, N)


def _common_type(T: TraceStructure, cols: Sequence[int], tuples: np.ndarray) -> Optional[int]:
    """The shared type mask of all tuples, or None when two differ."""
    if len(tuples) == 0:
        return -1
    masks = type_masks(T, np.asarray(cols, dtype=np.int64)[tuples])
    first = masks[0]
    return first if all(m == first for m in masks) else None


def is_homogeneous(T: TraceStructure, seq: IndexedSequence, N: int, X: Iterable[int]) -> bool:
    """All ``(N+1)``-tuples of distinct members of ``X``, in every order, share a type."""
    xs = list(bits(seq.poset.mask(X)))
    if len(xs) <= N:
        return True
    cols = [seq.assign[i] for i in xs]
    return _common_type(T, cols, _perm_array(len(xs), N + 1)) is not None


def _check_order(P: Poset, X: Iterable[int], linear_order: Sequence[int]) -> list:
    xs = set(bits(P.mask(X)))
    order = [int(i) for i in linear_order]
    if len(set(order)) != len(order) or set(order) != xs:
        raise NotTotal("linear order must list every member of X exactly once")
    return order


def _increasing(n: int, k: int) -> np.ndarray:
    if k == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.array(list(itertools.combinations(range(n), k)), dtype=np.int64).reshape(-1, k)


def is_order_homogeneous(
    T: TraceStructure, seq: IndexedSequence, N: int, X: Iterable[int], linear_order: Sequence[int]
) -> bool:
    order = _check_order(seq.poset, X, linear_order)
    if len(order) <= N:
        return True
    cols = [seq.assign[i] for i in order]
    return _common_type(T, cols, _increasing(len(order), N + 1)) is not None


@dataclass(frozen=True)
class OrderSensitive:
    ell: int
    pattern: int
    sign: bool
    arity: int

    def to_dict(self) -> dict:
        return {
            "ell": self.ell,
            "pattern": pattern_str(self.pattern, self.arity),
            "sign": "+" if self.sign else "-",
        }


def order_sensitive_from_type(tau: int, arity: int) -> Optional[OrderSensitive]:
    """First ``(ell, s, sign)`` whose literal holds on a tuple of type ``tau``
    and fails once positions ``ell`` and ``ell+1`` are swapped."""
    for ell in range(arity - 1):
        perm = list(range(arity))
        perm[ell], perm[ell + 1] = perm[ell + 1], perm[ell]
        swapped = permute_type(tau, perm)
        for s in range(1 << arity):
            a, b = tau >> s & 1, swapped >> s & 1
            if a and not b:
                return OrderSensitive(ell, s, True, arity)
            if b and not a:
                return OrderSensitive(ell, s, False, arity)
    return None


def find_order_sensitive(
    T: TraceStructure, seq: IndexedSequence, N: int, X: Iterable[int], linear_order: Sequence[int]
) -> Optional[OrderSensitive]:
    """Order-sensitive literal for an order-homogeneous ``(X, <=_X)``.

    Returns ``None`` when ``X`` is homogeneous (or too small).  All increasing
    tuples share one type, so the literal is read off that type.
    """
    order = _check_order(seq.poset, X, linear_order)
    if len(order) <= N:
        return None
    cols = [seq.assign[i] for i in order]
    tau = _common_type(T, cols, _increasing(len(order), N + 1))
    if tau is None:
        raise NotTotal("X is not order homogeneous under the given order")
    return order_sensitive_from_type(tau, N + 1)


# Example on five points ----------------------------------------------------------

EXAMPLE_SETS = ((0,), (0, 1, 2), (2, 3, 4), (4,))


def example_structure() -> TraceStructure:
    return TraceStructure.from_sets(5, EXAMPLE_SETS)


def labeled_posets(n: int) -> list:
    """Every strict partial order on ``0..n-1``, each pair of elements
    choosing incomparable, below or above, kept when transitive."""
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    out = []
    for choice in itertools.product(range(3), repeat=len(pairs)):
        rel = []
        for (i, j), c in zip(pairs, choice):
            if c == 1:
                rel.append((i, j))
            elif c == 2:
                rel.append((j, i))
        s = set(rel)
        if all((a, d) in s for (a, b) in s for (c, d) in s if b == c):
            out.append(Poset.from_pairs(n, rel))
    return out


def count_partial_orders_naive(n: int) -> int:
    """Count strict partial orders by filtering all ``2^(n(n-1))`` relations."""
    cells = [(i, j) for i in range(n) for j in range(n) if i != j]
    count = 0
    for bits_ in range(1 << len(cells)):
        rel = {cells[k] for k in range(len(cells)) if bits_ >> k & 1}
        if any((j, i) in rel for (i, j) in rel):
            continue
        if all((a, d) in rel for (a, b) in rel for (c, d) in rel if b == c):
            count += 1
    return count


@dataclass(frozen=True)
class ExampleSearchResult:
    posets_tested: int
    admissible: int
    rejections: tuple  # (relation pairs, counterexample) per tested order

    def to_dict(self) -> dict:
        return {"posets_tested": self.posets_tested, "admissible": self.admissible}


def example_4_1_search() -> ExampleSearchResult:
    """Try every partial order on the four sets as a Delta_1-indiscernible index."""
    T = example_structure()
    tested = 0
    admissible = 0
    rejections = []
    for P in labeled_posets(len(EXAMPLE_SETS)):
        tested += 1
        res = is_delta_indiscernible(T, IndexedSequence(P, tuple(range(P.n))), 1)
        if res.ok:
            admissible += 1
        else:
            rejections.append((tuple(P.pairs()), res.counterexample))
    return ExampleSearchResult(tested, admissible, tuple(rejections))
