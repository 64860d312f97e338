"""Kernel backend selection.

The compiled extension is used when it imports and the environment does not
ask otherwise.  ``POSETDEF_BACKEND=python`` forces the reference
implementation, ``POSETDEF_BACKEND=cython`` makes a missing extension an
import error.  Inputs wider than 64 elements always take the Python path.
"""

import importlib
import os

from . import _py

_choice = os.environ.get("POSETDEF_BACKEND", "auto").lower()
_cy = None
if _choice != "python":
    try:
        _cy = importlib.import_module(__name__ + "._cy")
    except ImportError:
        if _choice == "cython":
            raise

BACKEND = "cython" if _cy is not None else "python"


def best_bichromatic_antichain(n, incomp, ones):
    if _cy is not None and n <= 64:
        return _cy.best_bichromatic_antichain(n, incomp, ones)
    return _py.best_bichromatic_antichain(n, incomp, ones)


def maximal_antichains(n, incomp, allowed, counted, threshold):
    if _cy is not None and n <= 64:
        return _cy.maximal_antichains(n, incomp, allowed, counted, threshold)
    return _py.maximal_antichains(n, incomp, allowed, counted, threshold)


def tuple_type_masks(R, tuples):
    if _cy is not None and (len(tuples) == 0 or len(tuples[0]) <= 6):
        return _cy.tuple_type_masks(R, tuples)
    return _py.tuple_type_masks(R, tuples)


__all__ = [
    "BACKEND",
    "best_bichromatic_antichain",
    "maximal_antichains",
    "tuple_type_masks",
]
