"""Model-enumeration kernels behind a small compiled/pure-Python switch.

The compiled ``_ckernel`` extension is used when it has been built; the
pure-Python ``_pykernel`` is the fallback and the reference. Setting
``CSPROVE_PURE_PYTHON=1`` forces the fallback.
"""

from __future__ import annotations

import itertools
import os
from functools import lru_cache

from ..formula import Atom, Bot, Box, Imp, Tri, children
from . import _pykernel

try:
    if os.environ.get("CSPROVE_PURE_PYTHON"):
        raise ImportError("pure Python forced")
    from . import _ckernel
except ImportError:
    _ckernel = None

BACKENDS = {"python": _pykernel}
if _ckernel is not None:
    BACKENDS["cython"] = _ckernel

BACKEND = "cython" if _ckernel is not None else "python"


def get_backend(name: str | None = None):
    name = name or BACKEND
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"kernel backend {name!r} is not available") from None


class Program:
    """Formulas flattened into a post-order instruction list with sharing."""

    def __init__(self, formulas, atom_names):
        self.atom_names = list(atom_names)
        atom_index = {a: i for i, a in enumerate(self.atom_names)}
        self.ops: list[int] = []
        self.a1: list[int] = []
        self.a2: list[int] = []
        self.index: dict = {}
        for f in formulas:
            self._add(f, atom_index)

    def _add(self, f, atom_index) -> int:
        if f in self.index:
            return self.index[f]
        kids = [self._add(c, atom_index) for c in children(f)]
        if isinstance(f, Bot):
            op, x, y = _pykernel.OP_BOT, 0, 0
        elif isinstance(f, Atom):
            op, x, y = _pykernel.OP_ATOM, atom_index[f.name], 0
        elif isinstance(f, Imp):
            op, x, y = _pykernel.OP_IMP, kids[0], kids[1]
        elif isinstance(f, Box):
            op, x, y = _pykernel.OP_BOX, kids[0], 0
        elif isinstance(f, Tri):
            op, x, y = _pykernel.OP_TRI, kids[0], 0
        else:
            raise TypeError(f"not a formula: {f!r}")
        self.index[f] = len(self.ops)
        self.ops.append(op)
        self.a1.append(x)
        self.a2.append(y)
        return self.index[f]


@lru_cache(maxsize=None)
def strict_orders(n: int) -> tuple[tuple[int, ...], ...]:
    """All strict partial orders on worlds 0..n-1 as successor bitmasks.

    Enumerated by increasing bit pattern over the off-diagonal pairs and
    kept when transitive (irreflexive by construction, hence acyclic).
    """
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    out = []
    for bits in range(1 << len(pairs)):
        succ = [0] * n
        for k, (i, j) in enumerate(pairs):
            if bits >> k & 1:
                succ[i] |= 1 << j
        if _transitive(succ):
            out.append(tuple(succ))
    return tuple(out)


def _transitive(succ) -> bool:
    for i, si in enumerate(succ):
        for j in range(len(succ)):
            if si >> j & 1 and succ[j] & ~si:
                return False
    return True


def model_count(n: int, n_atoms: int) -> int:
    return len(strict_orders(n)) * 4 ** n * 2 ** (n * n_atoms)


def _flat_orders(n: int) -> list[int]:
    return list(itertools.chain.from_iterable(strict_orders(n)))


def first_refutation(program: Program, root, n: int, backend: str | None = None):
    """Least model with ``n`` worlds where ``root`` fails somewhere.

    Returns ``(succ, m0, m1, valuation_masks, world)`` using bitmasks, or None.
    """
    k = get_backend(backend)
    orders = strict_orders(n)
    hit = k.first_refutation(program.ops, program.a1, program.a2, program.index[root],
                             n, _flat_orders(n), len(orders), len(program.atom_names))
    if hit is None:
        return None
    oi, m0, m1, vc, w = hit
    full = (1 << n) - 1
    val = [(vc >> (i * n)) & full for i in range(len(program.atom_names))]
    return orders[oi], m0, m1, val, w


def sequent_table(program: Program, labelled, rels, n_labels: int, n: int,
                  backend: str | None = None) -> bytes:
    """Truth of an encoded sequent in each model with ``n`` worlds.

    ``labelled`` holds ``(label, formula, side)`` with side 0 left / 1 right,
    ``rels`` holds ``(src, kind, dst)`` with kind 0 for R / 1 for S; labels
    are already numbered 0..n_labels-1.
    """
    k = get_backend(backend)
    orders = strict_orders(n)
    return bytes(k.sequent_table(
        program.ops, program.a1, program.a2, n_labels,
        [lab for lab, _, _ in labelled], [program.index[f] for _, f, _ in labelled],
        [side for _, _, side in labelled],
        [s for s, _, _ in rels], [kind for _, kind, _ in rels], [d for _, _, d in rels],
        n, _flat_orders(n), len(orders), len(program.atom_names),
    ))


def decode_model_index(index: int, n: int, n_atoms: int):
    """Inverse of the enumeration order: ``(succ, m0, m1, valuation_masks)``."""
    nv = 1 << (n * n_atoms)
    vc = index % nv
    index //= nv
    m1 = index % (1 << n)
    index //= 1 << n
    m0 = index % (1 << n)
    oi = index // (1 << n)
    full = (1 << n) - 1
    return strict_orders(n)[oi], m0, m1, [(vc >> (i * n)) & full for i in range(n_atoms)]
