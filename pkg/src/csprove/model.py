"""Carlson models: forcing, sequent truth, countermodel extraction, and a
bounded enumeration oracle.

Worlds are integers and print as ``x<N>``, so countermodels read off a
sequent keep the names of the labels they came from.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping

from . import kernels
from .formula import Atom, Bot, Box, Formula, Imp, Tri, atoms, parse, to_str
from .sequent import (
    LEFT,
    R,
    S,
    Sequent,
    is_fully_saturated,
    label_name,
    labels_of,
    parse_label,
)


@dataclass(frozen=True)
class CarlsonModel:
    worlds: tuple[int, ...]
    prec: frozenset = frozenset()
    m0: frozenset = frozenset()
    m1: frozenset = frozenset()
    valuation: Mapping[str, frozenset] = field(default_factory=dict, hash=False)

    @classmethod
    def of(cls, worlds, prec=(), m0=(), m1=(), valuation=None) -> "CarlsonModel":
        return cls(
            tuple(sorted(worlds)),
            frozenset(tuple(p) for p in prec),
            frozenset(m0),
            frozenset(m1),
            {k: frozenset(v) for k, v in sorted((valuation or {}).items())},
        )

    @cached_property
    def successors(self) -> dict[int, frozenset]:
        out: dict[int, set] = {w: set() for w in self.worlds}
        for a, b in self.prec:
            out.setdefault(a, set()).add(b)
        return {w: frozenset(v) for w, v in out.items()}

    def holds(self, atom: str) -> frozenset:
        return self.valuation.get(atom, frozenset())


class InvalidModel(ValueError):
    def __init__(self, condition: str, witness):
        super().__init__(f"{condition} violated; witness {witness!r}")
        self.condition = condition
        self.witness = witness


def validate_model(m: CarlsonModel) -> None:
    """Raise :class:`InvalidModel` unless ``m`` satisfies the frame conditions."""
    ws = set(m.worlds)
    if len(ws) != len(m.worlds):
        raise InvalidModel("distinct worlds", m.worlds)
    for a, b in sorted(m.prec):
        if a not in ws or b not in ws:
            raise InvalidModel("prec within worlds", (a, b))
        if a == b:
            raise InvalidModel("irreflexive", (a, b))
    for a, b in sorted(m.prec):
        for c in sorted(m.successors.get(b, ())):
            if (a, c) not in m.prec:
                raise InvalidModel("transitive", (a, b, c))
    # transitive + irreflexive already rules out cycles; checked anyway so a
    # broken transitivity report never masks a cycle
    cycle = _find_cycle(m)
    if cycle:
        raise InvalidModel("acyclic", cycle)
    for name, sub in (("m0", m.m0), ("m1", m.m1)):
        if not sub <= ws:
            raise InvalidModel(f"{name} within worlds", sorted(sub - ws))
    for atom, sub in sorted(m.valuation.items()):
        if not sub <= ws:
            raise InvalidModel("valuation within worlds", (atom, sorted(sub - ws)))


def _find_cycle(m: CarlsonModel):
    state: dict[int, int] = {}
    path: list[int] = []

    def visit(w):
        state[w] = 1
        path.append(w)
        for v in sorted(m.successors.get(w, ())):
            if state.get(v) == 1:
                return path[path.index(v):] + [v]
            if v not in state:
                found = visit(v)
                if found:
                    return found
        state[w] = 2
        path.pop()
        return None

    for w in m.worlds:
        if w not in state:
            found = visit(w)
            if found:
                return found
    return None


# ---------------------------------------------------------------------------
# forcing

def truth_set(m: CarlsonModel, f: Formula, cache: dict | None = None) -> frozenset:
    """Worlds of ``m`` forcing ``f``."""
    if cache is None:
        cache = {}
    if f in cache:
        return cache[f]
    if isinstance(f, Bot):
        out = frozenset()
    elif isinstance(f, Atom):
        out = m.holds(f.name) & frozenset(m.worlds)
    elif isinstance(f, Imp):
        a = truth_set(m, f.left, cache)
        b = truth_set(m, f.right, cache)
        out = frozenset(w for w in m.worlds if w not in a or w in b)
    else:
        body = truth_set(m, f.body, cache)
        scope = m.m0 if isinstance(f, Box) else m.m1
        out = frozenset(w for w in m.worlds if all(v in body for v in m.successors[w] if v in scope))
    cache[f] = out
    return out


def forces(m: CarlsonModel, w: int, f: Formula) -> bool:
    if w not in m.successors:
        raise ValueError(f"unknown world {w!r}")
    return w in truth_set(m, f)


def is_interpretation(m: CarlsonModel, s: Sequent, i: Mapping[int, int]) -> bool:
    if not labels_of(s) <= set(i):
        raise ValueError("interpretation must be total on the labels of the sequent")
    for r in s.rels:
        a, b = i[r.src], i[r.dst]
        if (a, b) not in m.prec:
            return False
        if b not in (m.m0 if r.kind == R else m.m1):
            return False
    return True


def falsifying_interpretation(m: CarlsonModel, s: Sequent) -> dict[int, int] | None:
    """An interpretation making every left formula true and every right one
    false, or ``None`` if ``s`` holds in ``m``.

    Labels are assigned one at a time; each candidate world is filtered by the
    formulas at that label and by relational atoms to labels already placed.
    """
    cache: dict = {}
    labels = sorted(labels_of(s))
    allowed = {x: set(m.worlds) for x in labels}
    for lf in s.left:
        allowed[lf.label] &= truth_set(m, lf.formula, cache)
    for lf in s.right:
        allowed[lf.label] -= truth_set(m, lf.formula, cache)
    for r in s.rels:
        allowed[r.dst] &= m.m0 if r.kind == R else m.m1
    order = sorted(labels, key=lambda x: (len(allowed[x]), x))
    pos = {x: k for k, x in enumerate(order)}
    constraints: dict[int, list] = {x: [] for x in labels}
    for r in s.rels:
        later, earlier = (r.src, r.dst) if pos[r.src] >= pos[r.dst] else (r.dst, r.src)
        constraints[later].append(r)
    assign: dict[int, int] = {}

    def ok(x, w):
        for r in constraints[x]:
            a = w if r.src == x else assign[r.src]
            b = w if r.dst == x else assign[r.dst]
            if (a, b) not in m.prec:
                return False
        return True

    def go(k):
        if k == len(order):
            return True
        x = order[k]
        for w in sorted(allowed[x]):
            if ok(x, w):
                assign[x] = w
                if go(k + 1):
                    return True
                del assign[x]
        return False

    return dict(assign) if go(0) else None


def sequent_holds(m: CarlsonModel, s: Sequent) -> bool:
    return falsifying_interpretation(m, s) is None


# ---------------------------------------------------------------------------
# extraction and the oracle

def extract_model(s: Sequent) -> tuple[CarlsonModel, dict[int, int]]:
    """Countermodel read off a fully saturated sequent, with the identity
    interpretation that falsifies it."""
    if not is_fully_saturated(s):
        raise ValueError("countermodel extraction needs a fully saturated sequent")
    worlds = labels_of(s)
    atoms_left: dict[str, set] = {}
    for lf in s.left:
        if isinstance(lf.formula, Atom):
            atoms_left.setdefault(lf.formula.name, set()).add(lf.label)
    for lf in s.left | s.right:
        for name in atoms(lf.formula):
            atoms_left.setdefault(name, set())
    model = CarlsonModel.of(
        worlds,
        prec={(r.src, r.dst) for r in s.rels},
        m0={r.dst for r in s.rels if r.kind == R},
        m1={r.dst for r in s.rels if r.kind == S},
        valuation=atoms_left,
    )
    return model, {x: x for x in sorted(worlds)}


def model_from_masks(n: int, succ, m0: int, m1: int, val, atom_names) -> CarlsonModel:
    ws = range(n)
    return CarlsonModel.of(
        ws,
        prec={(i, j) for i in ws for j in ws if succ[i] >> j & 1},
        m0={i for i in ws if m0 >> i & 1},
        m1={i for i in ws if m1 >> i & 1},
        valuation={a: {i for i in ws if val[k] >> i & 1} for k, a in enumerate(atom_names)},
    )


def refute_semantic(f: Formula, max_worlds: int, backend: str | None = None):
    """Least ``(model, world)`` with at most ``max_worlds`` worlds refuting ``f``.

    Models are searched by size, then in the kernel's fixed enumeration
    order, so the witness is deterministic.
    """
    if max_worlds < 1:
        raise ValueError("max_worlds must be at least 1")
    names = sorted(atoms(f))
    program = kernels.Program([f], names)
    for n in range(1, max_worlds + 1):
        hit = kernels.first_refutation(program, f, n, backend)
        if hit is not None:
            succ, m0, m1, val, w = hit
            return model_from_masks(n, succ, m0, m1, val, names), w
    return None


def enumerate_models(n: int, atom_names=("p",)):
    """Every Carlson model on worlds 0..n-1 in the kernels' enumeration order."""
    names = list(atom_names)
    for index in range(kernels.model_count(n, len(names))):
        succ, m0, m1, val = kernels.decode_model_index(index, n, len(names))
        yield model_from_masks(n, succ, m0, m1, val, names)


def sequent_truth_table(s: Sequent, n: int, atom_names, backend: str | None = None) -> bytes:
    """``sequent_holds`` over every model with ``n`` worlds, as one byte per model."""
    labels = sorted(labels_of(s))
    num = {x: k for k, x in enumerate(labels)}
    formulas = [lf.formula for lf in s.left] + [lf.formula for lf in s.right]
    program = kernels.Program(formulas, atom_names)
    labelled = [(num[lf.label], lf.formula, 0) for lf in s.left]
    labelled += [(num[lf.label], lf.formula, 1) for lf in s.right]
    rels = [(num[r.src], 0 if r.kind == R else 1, num[r.dst]) for r in s.rels]
    return kernels.sequent_table(program, labelled, rels, len(labels), n, backend)


# ---------------------------------------------------------------------------
# serialisation

def model_to_obj(m: CarlsonModel) -> dict:
    return {
        "worlds": [label_name(w) for w in m.worlds],
        "prec": [[label_name(a), label_name(b)] for a, b in sorted(m.prec)],
        "m0": [label_name(w) for w in sorted(m.m0)],
        "m1": [label_name(w) for w in sorted(m.m1)],
        "valuation": {a: [label_name(w) for w in sorted(ws)] for a, ws in sorted(m.valuation.items())},
    }


def model_from_obj(obj: dict) -> CarlsonModel:
    return CarlsonModel.of(
        [parse_label(w) for w in obj["worlds"]],
        prec=[(parse_label(a), parse_label(b)) for a, b in obj.get("prec", [])],
        m0=[parse_label(w) for w in obj.get("m0", [])],
        m1=[parse_label(w) for w in obj.get("m1", [])],
        valuation={a: [parse_label(w) for w in ws] for a, ws in obj.get("valuation", {}).items()},
    )


def model_to_json(m: CarlsonModel, indent: int | None = None) -> str:
    return json.dumps(model_to_obj(m), indent=indent)


def model_from_json(text: str) -> CarlsonModel:
    return model_from_obj(json.loads(text))


def model_to_dot(m: CarlsonModel, name: str = "countermodel") -> str:
    """Graphviz rendering: doublecircle for M0, diamond for M1, box for both."""
    lines = [f"digraph {name} {{"]
    for w in m.worlds:
        in0, in1 = w in m.m0, w in m.m1
        shape = "box" if in0 and in1 else "doublecircle" if in0 else "diamond" if in1 else "circle"
        true_atoms = [a for a, ws in sorted(m.valuation.items()) if w in ws]
        label = label_name(w) + ("\\n" + ", ".join(true_atoms) if true_atoms else "")
        lines.append(f'  {label_name(w)} [shape={shape}, label="{label}"];')
    for a, b in sorted(m.prec):
        lines.append(f"  {label_name(a)} -> {label_name(b)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def refutes_at(m: CarlsonModel, w: int, text_or_formula) -> bool:
    f = parse(text_or_formula) if isinstance(text_or_formula, str) else text_or_formula
    return not forces(m, w, f)


__all__ = [
    "CarlsonModel", "InvalidModel", "validate_model", "truth_set", "forces",
    "is_interpretation", "falsifying_interpretation", "sequent_holds",
    "extract_model", "refute_semantic", "enumerate_models", "sequent_truth_table",
    "model_to_obj", "model_from_obj", "model_to_json", "model_from_json", "model_to_dot",
    "to_str", "LEFT",
]
