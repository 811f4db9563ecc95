"""Test inputs: axiom instances, derived theorems, known non-theorems and
exhaustive enumeration of small formulas."""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator

from .formula import BOT, Atom, Box, Formula, Imp, Tri, parse, to_str

PROVABLE = "provable"
REFUTABLE = "refutable"


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    formula: Formula
    expected: str

    def __post_init__(self):
        if self.expected not in (PROVABLE, REFUTABLE):
            raise ValueError(f"expected must be provable or refutable, got {self.expected!r}")


def axiom_instances(a: Formula, b: Formula) -> list[Formula]:
    """K, L and the mixed 4 schema for each modality, in that order, [b] first."""
    out = []
    for M, N in ((Box, Tri), (Tri, Box)):
        out.append(Imp(M(Imp(a, b)), Imp(M(a), M(b))))
        out.append(Imp(M(Imp(M(a), a)), M(a)))
        out.append(Imp(M(a), N(M(a))))
    return out


AXIOM_NAMES = ("k_box", "lob_box", "four_tri_box", "k_tri", "lob_tri", "four_box_tri")

_EXTRA_PROVABLE = (
    ("four_box", "[b]p -> [b][b]p"),
    ("four_tri", "[d]p -> [d][d]p"),
    ("mixed_lob", "[b]([b]p -> p) -> [d][b]p"),
)

_REFUTABLE = (
    ("mix_down", "[d]p -> [b]p"),
    ("mix_up", "[b]p -> [d]p"),
    ("nec_box", "p -> [b]p"),
    ("refl_box", "[b]p -> p"),
    ("tri_box", "[d]p -> [d][b]p"),
)


def standard_corpus() -> list[CorpusEntry]:
    p, q = Atom("p"), Atom("q")
    out = [CorpusEntry(n, f, PROVABLE) for n, f in zip(AXIOM_NAMES, axiom_instances(p, q))]
    out += [CorpusEntry(n, parse(t), PROVABLE) for n, t in _EXTRA_PROVABLE]
    out += [CorpusEntry(n, parse(t), REFUTABLE) for n, t in _REFUTABLE]
    return out


def enumerate_formulas(atom_names: Iterable[str] = ("p",), max_nodes: int = 6) -> list[Formula]:
    """Every formula with at most ``max_nodes`` AST nodes, smallest first."""
    names = tuple(atom_names)
    out = []
    for n in range(1, max_nodes + 1):
        out.extend(_of_size(names, n))
    return out


@lru_cache(maxsize=None)
def _of_size(names: tuple, n: int) -> tuple:
    if n == 1:
        return (BOT,) + tuple(Atom(a) for a in names)
    out = []
    for body in _of_size(names, n - 1):
        out.append(Box(body))
        out.append(Tri(body))
    for k in range(1, n - 1):
        for left in _of_size(names, k):
            for right in _of_size(names, n - 1 - k):
                out.append(Imp(left, right))
    return tuple(out)


def entry_to_obj(e: CorpusEntry) -> dict:
    return {"name": e.name, "formula": to_str(e.formula), "expected": e.expected}


def entry_from_obj(obj: dict) -> CorpusEntry:
    return CorpusEntry(obj["name"], parse(obj["formula"]), obj["expected"])


def dump_corpus(entries: Iterable[CorpusEntry]) -> str:
    return "".join(json.dumps(entry_to_obj(e)) + "\n" for e in entries)


def load_corpus(text: str) -> Iterator[CorpusEntry]:
    for line in text.splitlines():
        if line.strip():
            yield entry_from_obj(json.loads(line))
