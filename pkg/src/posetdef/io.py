"""JSON schemas and DOT rendering.

Poset        {"n": int, "lt": [[i, j], ...]}     strict pairs, closed on load
Colouring    {"f": [0, 1, ...], "N": int}
Trace        {"U": int, "B": int, "rows": ["0110", ...]}
Sequence     {"assign": [column per element]}
"""

from __future__ import annotations

import json
from typing import Any, Optional, Sequence

from .coloring import ColoredPoset
from .errors import PosetDefError, SchemaError
from .poset import Poset
from .trace import IndexedSequence, TraceStructure


def load_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as e:
        raise SchemaError(f"cannot read {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise SchemaError(f"{path}: invalid JSON ({e.msg} at line {e.lineno})") from None


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _field(obj: Any, key: str, kind, what: str):
    if not isinstance(obj, dict):
        raise SchemaError(f"{what}: expected a JSON object")
    if key not in obj:
        raise SchemaError(f"{what}: missing field {key!r}")
    val = obj[key]
    if kind is int and (isinstance(val, bool) or not isinstance(val, int)):
        raise SchemaError(f"{what}: field {key!r} must be an integer")
    if kind is list and not isinstance(val, list):
        raise SchemaError(f"{what}: field {key!r} must be a list")
    return val


def _int_list(xs: list, what: str) -> list:
    if any(isinstance(x, bool) or not isinstance(x, int) for x in xs):
        raise SchemaError(f"{what}: entries must be integers")
    return xs


def poset_from_json(obj: Any) -> Poset:
    n = _field(obj, "n", int, "poset")
    lt = _field(obj, "lt", list, "poset")
    pairs = []
    for p in lt:
        if not isinstance(p, list) or len(p) != 2:
            raise SchemaError("poset: every entry of 'lt' must be a pair")
        pairs.append(tuple(_int_list(p, "poset")))
    return Poset.from_pairs(n, pairs)


def poset_to_json(P: Poset) -> dict:
    return {"n": P.n, "lt": [list(p) for p in P.pairs()]}


def coloring_from_json(obj: Any, P: Poset, N: Optional[int] = None) -> ColoredPoset:
    f = _int_list(_field(obj, "f", list, "coloring"), "coloring")
    if N is None:
        N = _field(obj, "N", int, "coloring")
    if len(f) != P.n:
        raise SchemaError(f"coloring: {len(f)} colours for {P.n} elements")
    if any(x not in (0, 1) for x in f):
        raise SchemaError("coloring: colours must be 0 or 1")
    if N < 0:
        raise SchemaError("coloring: N must be non-negative")
    return ColoredPoset(P, tuple(f), N)


def coloring_to_json(CP: ColoredPoset) -> dict:
    return {"f": list(CP.f), "N": CP.N}


def trace_from_json(obj: Any) -> TraceStructure:
    U = _field(obj, "U", int, "trace")
    B = _field(obj, "B", int, "trace")
    rows = _field(obj, "rows", list, "trace")
    if len(rows) != U:
        raise SchemaError(f"trace: {len(rows)} rows, expected U={U}")
    for r in rows:
        if not isinstance(r, str) or len(r) != B or set(r) - {"0", "1"}:
            raise SchemaError(f"trace: rows must be 0/1 strings of length B={B}")
    if U == 0:
        raise SchemaError("trace: need at least one row")
    return TraceStructure.from_rows(rows)


def trace_to_json(T: TraceStructure) -> dict:
    return {"U": T.U, "B": T.B, "rows": T.row_strings()}


def seq_from_json(obj: Any, P: Poset) -> IndexedSequence:
    assign = _int_list(_field(obj, "assign", list, "sequence"), "sequence")
    try:
        return IndexedSequence(P, tuple(assign))
    except PosetDefError as e:
        raise SchemaError(f"sequence: {e}") from None


def seq_to_json(seq: IndexedSequence) -> dict:
    return {"assign": list(seq.assign)}


# DOT ---------------------------------------------------------------------

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")


def poset_dot(
    P: Poset,
    colors: Optional[Sequence[int]] = None,
    blocks: Optional[Sequence[int]] = None,
    chains: Sequence[Sequence[int]] = (),
) -> str:
    """Hasse diagram, bottom to top.

    ``colors`` fills nodes (0 white, 1 grey); ``blocks`` gives each element a
    block index, drawn as ranked clusters; ``chains`` are drawn as coloured
    paths on top of the cover edges.
    """
    lines = ["digraph poset {", "  rankdir=BT;", "  node [shape=circle, style=filled, fillcolor=white];"]

    def node(i: int) -> str:
        fill = "grey70" if colors is not None and colors[i] else "white"
        return f'  {i} [label="{i}", fillcolor="{fill}"];'

    if blocks is None:
        lines += [node(i) for i in range(P.n)]
    else:
        for b in sorted(set(blocks)):
            lines.append(f"  subgraph cluster_{b} {{")
            lines.append(f'    label="block {b}";')
            lines += ["  " + node(i) for i in range(P.n) if blocks[i] == b]
            lines.append("  }")
    on_chain = set()
    for k, ch in enumerate(chains):
        color = _PALETTE[k % len(_PALETTE)]
        for a, b in zip(ch, ch[1:]):
            on_chain.add((a, b))
            lines.append(f'  {a} -> {b} [color="{color}", penwidth=2];')
    for a, b in P.covers():
        if (a, b) not in on_chain:
            lines.append(f"  {a} -> {b};")
    lines.append("}")
    return "\n".join(lines) + "\n"
