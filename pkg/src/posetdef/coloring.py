"""Two-colourings of a finite poset and the N-indiscernibility checker.

A colouring is N-indiscernible when

(i)  every antichain has at most N elements of one of the two colours, and
(ii) no chain ``i0 < i1 < ... < i_{2N+1}`` alternates colour at every step.

Condition (i) is read with the colour classes taken inside the antichain.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from . import _kernels
from .errors import NotUnique, OutOfRange, SizeCapExceeded, TooSmall
from .poset import Poset, bits, members

DEFAULT_MAX_ELEMENTS = 64


@dataclass(frozen=True)
class ColoredPoset:
    poset: Poset
    f: tuple
    N: int

    def __post_init__(self):
        f = tuple(int(c) for c in self.f)
        if len(f) != self.poset.n:
            raise OutOfRange(f"colouring has {len(f)} entries for {self.poset.n} elements")
        if any(c not in (0, 1) for c in f):
            raise ValueError("colours must be 0 or 1")
        if self.N < 0:
            raise ValueError("N must be non-negative")
        object.__setattr__(self, "f", f)

    @property
    def M(self) -> int:
        return (2 * self.N + 1) * (self.N + 1)

    @property
    def ones(self) -> int:
        m = 0
        for i, c in enumerate(self.f):
            if c:
                m |= 1 << i
        return m

    def color_mask(self, t: int) -> int:
        return self.ones if t else self.poset.full & ~self.ones


def color_class(CP: ColoredPoset, X: Iterable[int], t: int) -> frozenset:
    """``X^t``: members of ``X`` with colour ``t``."""
    if t not in (0, 1):
        raise ValueError("colour must be 0 or 1")
    return members(CP.poset.mask(X) & CP.color_mask(t))


def max_alternation(CP: ColoredPoset) -> tuple:
    """Longest chain whose colour flips between consecutive picks.

    Returns ``(length, witness)`` with the witness listed in increasing
    order.  Ties go to the smallest end element and smallest predecessors.
    """
    P, f = CP.poset, CP.f
    if P.n == 0:
        return 0, ()
    alt = [0] * P.n
    pred = [-1] * P.n
    for i in P.linear_extension():
        best, arg = 0, -1
        for j in bits(P.down[i]):
            if f[j] != f[i] and alt[j] > best:
                best, arg = alt[j], j
        alt[i] = best + 1
        pred[i] = arg
    length = max(alt)
    end = alt.index(length)
    chain = []
    while end != -1:
        chain.append(end)
        end = pred[end]
    return length, tuple(reversed(chain))


def max_bichromatic_antichain(
    CP: ColoredPoset, max_elements: int = DEFAULT_MAX_ELEMENTS
) -> tuple:
    """Maximise ``min(|A^0|, |A^1|)`` over antichains ``A``.

    Exact branch and bound.  Returns ``(value, witness)``; the witness is the
    lexicographically least optimal antichain.
    """
    P = CP.poset
    if P.n > max_elements:
        raise SizeCapExceeded(f"{P.n} elements exceeds the cap of {max_elements}")
    if P.n == 0:
        return 0, frozenset()
    incomp = [P.incomparable_mask(i) for i in range(P.n)]
    value, mask = _kernels.best_bichromatic_antichain(P.n, incomp, CP.ones)
    return value, members(mask)


@dataclass(frozen=True)
class VerificationReport:
    N: int
    bichromatic: int
    bichromatic_witness: tuple
    alternation: int
    alternation_witness: tuple
    failures: tuple = field(default=())

    @property
    def passed(self) -> bool:
        return not self.failures

    @property
    def condition(self) -> Optional[str]:
        return self.failures[0][0] if self.failures else None

    @property
    def witness(self) -> Optional[tuple]:
        return self.failures[0][1] if self.failures else None

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "N": self.N,
            "max_bichromatic_antichain": self.bichromatic,
            "max_alternation": self.alternation,
            "failures": [
                {"condition": c, "witness": list(w)} for c, w in self.failures
            ],
        }


def verify_coloring(
    CP: ColoredPoset, max_elements: int = DEFAULT_MAX_ELEMENTS
) -> VerificationReport:
    value, anti = max_bichromatic_antichain(CP, max_elements)
    length, chain = max_alternation(CP)
    failures = []
    if value > CP.N:
        failures.append(("i", tuple(sorted(anti))))
    if length >= 2 * CP.N + 2:
        failures.append(("ii", chain))
    return VerificationReport(
        N=CP.N,
        bichromatic=value,
        bichromatic_witness=tuple(sorted(anti)),
        alternation=length,
        alternation_witness=chain,
        failures=tuple(failures),
    )


def majority(N: int, colors: Sequence[int]) -> int:
    """Majority colour of a large antichain given its members' colours."""
    if len(colors) <= 2 * N:
        raise TooSmall(f"antichain of size {len(colors)} needs more than {2 * N} elements")
    ones = sum(colors)
    zeros = len(colors) - ones
    if zeros > N and ones > N:
        raise NotUnique(f"{zeros} zeros and {ones} ones both exceed N={N}")
    return 0 if ones <= N else 1


def maj(CP: ColoredPoset, A: Iterable[int]) -> int:
    m = CP.poset.mask(A)
    return majority(CP.N, [CP.f[i] for i in bits(m)])
