"""Finite partial orders, N-indiscernible colourings and definable types over
poset-indexed indiscernible sequences."""

from ._kernels import BACKEND
from .chains import ChainCover, min_chain_cover, restricted_cover
from .coloring import ColoredPoset, VerificationReport, maj, majority, verify_coloring
from .decomposition import (
    BlockSequence,
    Decomposition,
    barrier_partition,
    breakdown,
    compress_antichain,
    compress_chain,
    decompose,
    evaluate,
)
from .definability import (
    Ctx,
    RoughDefinition,
    assemble_psi,
    bounded_core,
    case_split,
    define_antichain,
    define_block_case2,
    define_chain_case1,
    define_chain_case2,
    simple_decomposition,
)
from .errors import PosetDefError
from .poset import Poset, antichain_leq, closure, extend_to_maximal, interval, is_antichain, is_chain, is_maximal_antichain, level
from .trace import (
    IndexedSequence,
    TraceStructure,
    delta_type,
    independence_dimension,
    is_delta_indiscernible,
    is_homogeneous,
    is_order_homogeneous,
    trace_coloring,
)

__all__ = [
    "BACKEND",
    "BlockSequence",
    "ChainCover",
    "ColoredPoset",
    "Ctx",
    "Decomposition",
    "IndexedSequence",
    "Poset",
    "PosetDefError",
    "RoughDefinition",
    "TraceStructure",
    "VerificationReport",
    "antichain_leq",
    "assemble_psi",
    "barrier_partition",
    "bounded_core",
    "breakdown",
    "case_split",
    "closure",
    "compress_antichain",
    "compress_chain",
    "decompose",
    "define_antichain",
    "define_block_case2",
    "define_chain_case1",
    "define_chain_case2",
    "delta_type",
    "evaluate",
    "extend_to_maximal",
    "independence_dimension",
    "interval",
    "is_antichain",
    "is_chain",
    "is_delta_indiscernible",
    "is_homogeneous",
    "is_maximal_antichain",
    "is_order_homogeneous",
    "level",
    "maj",
    "majority",
    "min_chain_cover",
    "restricted_cover",
    "simple_decomposition",
    "trace_coloring",
    "verify_coloring",
]
