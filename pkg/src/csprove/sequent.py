"""Labelled sequents over two sorts of relational atoms (R and S).

Labels are plain non-negative integers and print as ``x<N>``. A sequent
is a value: three frozensets (relational atoms, left and right labelled
formulas). Sets rather than multisets suffice because every saturation
clause is phrased in terms of membership.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, NamedTuple

from .formula import Atom, Bot, Box, Formula, Imp, Tri, parse, to_str

R = "R"
S = "S"
KINDS = (R, S)

LEFT = "left"
RIGHT = "right"

_LABEL_RE = re.compile(r"x(0|[1-9][0-9]*)")


def label_name(label: int) -> str:
    return f"x{label}"


def parse_label(text: str) -> int:
    m = _LABEL_RE.fullmatch(text)
    if m is None:
        raise ValueError(f"invalid label {text!r}; expected x<N>")
    return int(m.group(1))


class RelAtom(NamedTuple):
    src: int
    kind: str
    dst: int

    def __str__(self):
        return f"{label_name(self.src)}{self.kind}{label_name(self.dst)}"


class LabelledFormula(NamedTuple):
    label: int
    formula: Formula

    def __str__(self):
        return f"{label_name(self.label)}:{to_str(self.formula)}"


def rel_key(r: RelAtom):
    return (r.src, r.dst, r.kind)


def lf_key(lf: LabelledFormula):
    return (lf.label, to_str(lf.formula))


@dataclass(frozen=True)
class Sequent:
    rels: frozenset = frozenset()
    left: frozenset = frozenset()
    right: frozenset = frozenset()

    @classmethod
    def of(cls, rels: Iterable = (), left: Iterable = (), right: Iterable = ()) -> "Sequent":
        """Build a sequent from loose data.

        Relational atoms may be ``(src, kind, dst)`` tuples; labelled formulas
        may be ``(label, formula)`` pairs where the formula is an AST or text.
        """
        return cls(
            frozenset(RelAtom(*r) for r in rels),
            frozenset(_lf(x) for x in left),
            frozenset(_lf(x) for x in right),
        )

    def side(self, side: str) -> frozenset:
        if side == LEFT:
            return self.left
        if side == RIGHT:
            return self.right
        raise ValueError(f"unknown side {side!r}")

    def add(self, rels=(), left=(), right=()) -> "Sequent":
        return Sequent(self.rels | frozenset(rels), self.left | frozenset(left), self.right | frozenset(right))

    def remove(self, left=(), right=()) -> "Sequent":
        return Sequent(self.rels, self.left - frozenset(left), self.right - frozenset(right))

    def issubset(self, other: "Sequent") -> bool:
        return self.rels <= other.rels and self.left <= other.left and self.right <= other.right

    def rename(self, mapping: dict) -> "Sequent":
        def m(x):
            return mapping.get(x, x)

        return Sequent(
            frozenset(RelAtom(m(r.src), r.kind, m(r.dst)) for r in self.rels),
            frozenset(LabelledFormula(m(lf.label), lf.formula) for lf in self.left),
            frozenset(LabelledFormula(m(lf.label), lf.formula) for lf in self.right),
        )

    def formulas_at(self, label: int, side: str) -> frozenset:
        return frozenset(lf.formula for lf in self.side(side) if lf.label == label)

    def __str__(self):
        rels = ", ".join(str(r) for r in sorted(self.rels, key=rel_key))
        left = ", ".join(str(x) for x in sorted(self.left, key=lf_key))
        right = ", ".join(str(x) for x in sorted(self.right, key=lf_key))
        ante = ", ".join(p for p in (rels, left) if p)
        return f"{ante} => {right}".strip()


def _lf(x) -> LabelledFormula:
    label, f = x
    if isinstance(f, str):
        f = parse(f)
    return LabelledFormula(label, f)


def labels_of(s: Sequent) -> frozenset[int]:
    out = set()
    for r in s.rels:
        out.add(r.src)
        out.add(r.dst)
    out.update(lf.label for lf in s.left)
    out.update(lf.label for lf in s.right)
    return frozenset(out)


def is_initial(s: Sequent):
    """Return the closing rule (``Rule.ID`` or ``Rule.BOT``) or ``None``."""
    from .calculus import Rule

    if find_identity(s) is not None:
        return Rule.ID
    if find_bot(s) is not None:
        return Rule.BOT
    return None


def find_identity(s: Sequent):
    hits = [lf for lf in s.left if isinstance(lf.formula, Atom) and lf in s.right]
    return min(hits, key=lf_key) if hits else None


def find_bot(s: Sequent):
    hits = [lf for lf in s.left if isinstance(lf.formula, Bot)]
    return min(hits, key=lf_key) if hits else None


def successors(rels: Iterable[RelAtom], label: int, kind: str) -> list[int]:
    if not isinstance(rels, frozenset):
        rels = frozenset(rels)
    return list(rel_index(rels)[1].get((label, kind), ()))


def modal_kind(f: Formula) -> str | None:
    if isinstance(f, Box):
        return R
    if isinstance(f, Tri):
        return S
    return None


def formula_saturated(s: Sequent, occ: LabelledFormula, side: str) -> bool:
    """Whether ``occ`` already has everything its decomposition would add.

    A right-hand [b]A / [d]A at x counts as saturated once some fresh witness
    y with xRy / xSy and y:A on the right exists, i.e. after its label-phase
    expansion. Left-hand clauses follow the usual membership conditions.
    """
    x, f = occ
    if isinstance(f, (Atom, Bot)):
        return True
    if isinstance(f, Imp):
        if side == LEFT:
            return LabelledFormula(x, f.left) in s.right or LabelledFormula(x, f.right) in s.left
        return LabelledFormula(x, f.left) in s.left and LabelledFormula(x, f.right) in s.right
    kind = modal_kind(f)
    if side == LEFT:
        return all(LabelledFormula(y, f.body) in s.left for y in successors(s.rels, x, kind))
    return any(LabelledFormula(y, f.body) in s.right for y in successors(s.rels, x, kind))


def trans_saturated(s_or_rels) -> bool:
    rels = s_or_rels.rels if isinstance(s_or_rels, Sequent) else frozenset(s_or_rels)
    return not missing_trans(rels)


def missing_trans(rels) -> list[tuple[RelAtom, RelAtom, RelAtom]]:
    """Every (first, second, composite) with the composite absent, sorted."""
    out = []
    by_src: dict[int, list[RelAtom]] = {}
    for r in rels:
        by_src.setdefault(r.src, []).append(r)
    for a in rels:
        for b in by_src.get(a.dst, ()):
            c = RelAtom(a.src, b.kind, b.dst)
            if c not in rels:
                out.append((a, b, c))
    out.sort(key=lambda t: (rel_key(t[0]), rel_key(t[1])))
    return out


def trans_closure(rels: Iterable[RelAtom]) -> frozenset[RelAtom]:
    """Least superset closed under the four transitivity rules.

    The composite of x?y and y?z carries the kind of the second atom.
    """
    out = set(rels)
    while True:
        new = {c for _, _, c in missing_trans(out)}
        if not new:
            return frozenset(out)
        out |= new


def is_saturated(s: Sequent) -> bool:
    """Saturated in the sense of the saturation phase (right modals excluded)."""
    if not trans_saturated(s):
        return False
    for lf in s.left:
        if not formula_saturated(s, lf, LEFT):
            return False
    for lf in s.right:
        if modal_kind(lf.formula) is None and not formula_saturated(s, lf, RIGHT):
            return False
    return True


def unexpanded_modals(s: Sequent) -> list[LabelledFormula]:
    out = [lf for lf in s.right if modal_kind(lf.formula) and not formula_saturated(s, lf, RIGHT)]
    return sorted(out, key=lf_key)


def is_label_saturated(s: Sequent) -> bool:
    return not unexpanded_modals(s)


def is_fully_saturated(s: Sequent) -> bool:
    return is_saturated(s) and is_label_saturated(s) and is_initial(s) is None


@lru_cache(maxsize=4096)
def rel_index(rels: frozenset) -> tuple[dict, dict]:
    """``(preds, succs)``: label -> sorted source labels, and
    (label, kind) -> sorted target labels. Cached on the (immutable) set."""
    preds: dict[int, set] = {}
    succs: dict[tuple, set] = {}
    for r in rels:
        preds.setdefault(r.dst, set()).add(r.src)
        succs.setdefault((r.src, r.kind), set()).add(r.dst)
    return ({k: tuple(sorted(v)) for k, v in preds.items()},
            {k: tuple(sorted(v)) for k, v in succs.items()})


def ancestors(rels: Iterable[RelAtom], label: int) -> frozenset[int]:
    """Labels a with a (R u S)+ label."""
    if not isinstance(rels, frozenset):
        rels = frozenset(rels)
    preds = rel_index(rels)[0]
    seen: set[int] = set()
    stack = [label]
    while stack:
        for p in preds.get(stack.pop(), ()):
            if p not in seen:
                seen.add(p)
                stack.append(p)
    return frozenset(seen)


def related_plus(rels: Iterable[RelAtom], a: int, b: int) -> bool:
    return a in ancestors(rels, b)


# ---------------------------------------------------------------------------
# JSON

def sequent_to_obj(s: Sequent) -> dict:
    return {
        "rels": [[label_name(r.src), r.kind, label_name(r.dst)] for r in sorted(s.rels, key=rel_key)],
        "left": [[label_name(lf.label), to_str(lf.formula)] for lf in sorted(s.left, key=lf_key)],
        "right": [[label_name(lf.label), to_str(lf.formula)] for lf in sorted(s.right, key=lf_key)],
    }


def sequent_from_obj(obj: dict) -> Sequent:
    if not isinstance(obj, dict):
        raise ValueError("sequent must be a JSON object")
    unknown = set(obj) - {"rels", "left", "right"}
    if unknown:
        raise ValueError(f"unknown sequent keys: {sorted(unknown)}")
    rels = []
    for item in obj.get("rels", []):
        src, kind, dst = item
        if kind not in KINDS:
            raise ValueError(f"relational atom kind must be R or S, got {kind!r}")
        rels.append((parse_label(src), kind, parse_label(dst)))
    left = [(parse_label(x), parse(f)) for x, f in obj.get("left", [])]
    right = [(parse_label(x), parse(f)) for x, f in obj.get("right", [])]
    return Sequent.of(rels, left, right)


def sequent_to_json(s: Sequent) -> str:
    return json.dumps(sequent_to_obj(s))


def sequent_from_json(text: str) -> Sequent:
    return sequent_from_obj(json.loads(text))
