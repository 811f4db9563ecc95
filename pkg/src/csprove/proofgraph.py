"""Regular proof objects and their checker.

A proof graph is a finite tree of rule applications in which some leaves
carry a back-edge to an ancestor. Unfolding the back-edges gives the
infinite proof; the checker certifies that unfolding without building it.

Rule shapes are re-derived here from the rule schemas alone and do not go
through :mod:`csprove.calculus`, so the checker stays independent of the
code that produced the graph.

Progress is certified per back-edge. A back-edge from leaf ``src`` to
ancestor ``dst`` carries a renaming that moves exactly one label, the pivot
``a``, to a label ``x`` with ``a (R u S)+ x`` in the leaf, and fixes every
other label of ``dst``. Following a falsifying interpretation around such a
cycle can only push the world of ``a`` strictly up the model order while
leaving every other old label where it was, so an infinite falsified path
would yield an infinite ascending chain.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field

from .calculus import LABEL_RULES, Rule, RuleInstance, instance_from_obj, instance_to_obj
from .formula import Atom, Bot, Box, Imp, Tri
from .sequent import (
    LEFT,
    RIGHT,
    R,
    S,
    LabelledFormula,
    RelAtom,
    Sequent,
    label_name,
    labels_of,
    parse_label,
    related_plus,
    sequent_from_obj,
    sequent_to_obj,
)


@dataclass(frozen=True)
class ProofNode:
    sequent: Sequent
    rule: RuleInstance | None = None
    children: tuple[int, ...] = ()


@dataclass(frozen=True)
class BackEdge:
    target: int
    renaming: dict = field(hash=False)
    pivot: tuple[int, int] = (0, 0)


@dataclass
class ProofGraph:
    nodes: dict[int, ProofNode]
    root: int
    back_edges: dict[int, BackEdge] = field(default_factory=dict)

    @property
    def root_sequent(self) -> Sequent:
        return self.nodes[self.root].sequent

    def parents(self) -> dict[int, int]:
        out = {}
        for nid, node in self.nodes.items():
            for c in node.children:
                out[c] = nid
        return out

    def rule_counts(self) -> Counter:
        return Counter(n.rule.rule for n in self.nodes.values() if n.rule is not None)

    def __len__(self):
        return len(self.nodes)


class ProofCheckError(Exception):
    def __init__(self, node, condition: str, detail: str = ""):
        msg = f"node {node}: {condition}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)
        self.node = node
        self.condition = condition
        self.detail = detail


# ---------------------------------------------------------------------------
# local check

def _tree_order(g: ProofGraph) -> list[int]:
    if g.root not in g.nodes:
        raise ProofCheckError(g.root, "missing root")
    order = []
    seen = set()
    stack = [g.root]
    while stack:
        nid = stack.pop()
        if nid in seen:
            raise ProofCheckError(nid, "not a tree", "node reached twice")
        seen.add(nid)
        order.append(nid)
        for c in reversed(g.nodes[nid].children):
            if c not in g.nodes:
                raise ProofCheckError(nid, "dangling child", str(c))
            stack.append(c)
    stray = set(g.nodes) - seen
    if stray:
        raise ProofCheckError(min(stray), "unreachable node")
    return order


def check_local(g: ProofGraph) -> None:
    """Raise :class:`ProofCheckError` unless every step is a legal rule instance."""
    order = _tree_order(g)
    for nid in order:
        node = g.nodes[nid]
        inst = node.rule
        if inst is None:
            if nid not in g.back_edges:
                raise ProofCheckError(nid, "open leaf")
            continue
        if nid in g.back_edges:
            raise ProofCheckError(nid, "back-edge source is not a leaf")
        if inst.conclusion != node.sequent:
            raise ProofCheckError(nid, "rule conclusion differs from node sequent")
        if len(inst.premises) != len(node.children):
            raise ProofCheckError(nid, "premise count differs from child count")
        for prem, c in zip(inst.premises, node.children):
            if g.nodes[c].sequent != prem:
                raise ProofCheckError(nid, "premise differs from child sequent", f"child {c}")
        try:
            check_instance(inst)
        except ValueError as e:
            raise ProofCheckError(nid, f"illegal {inst.rule}", str(e)) from None
    parents = g.parents()
    for src in sorted(g.back_edges):
        edge = g.back_edges[src]
        if src not in g.nodes or edge.target not in g.nodes:
            raise ProofCheckError(src, "back-edge endpoint missing")
        if edge.target not in _ancestors(parents, src):
            raise ProofCheckError(src, "back-edge target is not a strict ancestor", str(edge.target))
        image = g.nodes[edge.target].sequent.rename(edge.renaming)
        if not image.issubset(g.nodes[src].sequent):
            raise ProofCheckError(src, "renamed target is not contained in back-edge source")


def _ancestors(parents: dict[int, int], nid: int) -> list[int]:
    out = []
    while nid in parents:
        nid = parents[nid]
        out.append(nid)
    return out


def _one_of(actual, *options):
    return any(actual == o for o in options)


def check_instance(inst: RuleInstance) -> None:
    """Raise ``ValueError`` unless ``inst`` matches its rule schema.

    Contexts are sets, so a premise may either drop the principal or keep it
    (the context may already contain it); both shapes are accepted.
    """
    c, p, rule = inst.conclusion, inst.premises, inst.rule
    pr = inst.principal
    arity = {Rule.ID: 0, Rule.BOT: 0, Rule.IMP_L: 2}.get(rule, 1)
    if len(p) != arity:
        raise ValueError(f"expected {arity} premises")
    if (inst.fresh is not None) != (rule in LABEL_RULES):
        raise ValueError("fresh label present iff BoxR/TriR")
    lf = pr.formula

    if rule.trans_kinds:
        first, second = rule.trans_kinds
        if lf is not None or len(pr.rels) != 2:
            raise ValueError("trans principal must be two relational atoms")
        a, b = pr.rels
        if a not in c.rels or b not in c.rels:
            raise ValueError("principal atoms missing from conclusion")
        if a.dst != b.src or a.kind != first or b.kind != second:
            raise ValueError("principal atoms do not compose")
        if p[0] != c.add(rels=[RelAtom(a.src, second, b.dst)]):
            raise ValueError("premise shape")
        return

    if lf is None:
        raise ValueError("missing principal formula")
    x, f = lf
    if rule == Rule.ID:
        if not isinstance(f, Atom) or lf not in c.left or lf not in c.right:
            raise ValueError("no atom on both sides")
        return
    if rule == Rule.BOT:
        if not isinstance(f, Bot) or lf not in c.left:
            raise ValueError("no bot on the left")
        return

    side = RIGHT if rule in (Rule.IMP_R, Rule.BOX_R, Rule.TRI_R) else LEFT
    if pr.side != side or lf not in c.side(side):
        raise ValueError("principal not in conclusion")

    if rule == Rule.IMP_R:
        if not isinstance(f, Imp):
            raise ValueError("principal is not an implication")
        a, b = LabelledFormula(x, f.left), LabelledFormula(x, f.right)
        if p[0].rels != c.rels or p[0].left != c.left | {a}:
            raise ValueError("premise shape")
        if not _one_of(p[0].right, c.right | {b}, (c.right - {lf}) | {b}):
            raise ValueError("premise shape")
    elif rule == Rule.IMP_L:
        if not isinstance(f, Imp):
            raise ValueError("principal is not an implication")
        a, b = LabelledFormula(x, f.left), LabelledFormula(x, f.right)
        p1, p2 = p
        if p1.rels != c.rels or p2.rels != c.rels or p2.right != c.right:
            raise ValueError("premise shape")
        if p1.right != c.right | {a} or not _one_of(p1.left, c.left, c.left - {lf}):
            raise ValueError("first premise shape")
        if not _one_of(p2.left, c.left | {b}, (c.left - {lf}) | {b}):
            raise ValueError("second premise shape")
    elif rule in (Rule.BOX_R, Rule.TRI_R):
        want = Box if rule == Rule.BOX_R else Tri
        kind = R if rule == Rule.BOX_R else S
        if not isinstance(f, want):
            raise ValueError("principal has the wrong modality")
        y = inst.fresh
        if y in labels_of(c):
            raise ValueError(f"freshness: {label_name(y)} occurs in the conclusion")
        new = LabelledFormula(y, f.body)
        if p[0].rels != c.rels | {RelAtom(x, kind, y)} or p[0].left != c.left:
            raise ValueError("premise shape")
        if not _one_of(p[0].right, c.right | {new}, (c.right - {lf}) | {new}):
            raise ValueError("premise shape")
    elif rule in (Rule.BOX_L, Rule.TRI_L):
        want = Box if rule == Rule.BOX_L else Tri
        kind = R if rule == Rule.BOX_L else S
        if not isinstance(f, want):
            raise ValueError("principal has the wrong modality")
        if len(pr.rels) != 1:
            raise ValueError("principal needs exactly one relational atom")
        (atom,) = pr.rels
        if atom not in c.rels or atom.src != x or atom.kind != kind:
            raise ValueError("principal atom does not match")
        if p[0] != c.add(left=[LabelledFormula(atom.dst, f.body)]):
            raise ValueError("premise shape")
    else:
        raise ValueError(f"unknown rule {rule}")


# ---------------------------------------------------------------------------
# progress

def check_progress(g: ProofGraph) -> None:
    """Raise :class:`ProofCheckError` unless every back-edge is a progressing cycle.

    Assumes :func:`check_local` passed.
    """
    parents = g.parents()
    for src in sorted(g.back_edges):
        edge = g.back_edges[src]
        a, x = edge.pivot
        moved = {k: v for k, v in edge.renaming.items() if k != v}
        where = f"cycle {edge.target}->{src}"
        if moved != {a: x}:
            raise ProofCheckError(src, "renaming must move exactly the pivot", where)
        if a not in labels_of(g.nodes[edge.target].sequent):
            raise ProofCheckError(src, "pivot does not occur at the back-edge target", where)
        if not related_plus(g.nodes[src].sequent.rels, a, x):
            raise ProofCheckError(src, "pivot labels are not related", where)
        path = [src] + _ancestors(parents, src)
        path = path[1: path.index(edge.target) + 1]
        if not any(g.nodes[n].rule.rule in LABEL_RULES for n in path):
            raise ProofCheckError(src, "cycle contains no BoxR/TriR step", where)


def check_proof(g: ProofGraph) -> None:
    check_local(g)
    check_progress(g)


# ---------------------------------------------------------------------------
# JSON

def graph_to_obj(g: ProofGraph) -> dict:
    nodes = []
    for nid in sorted(g.nodes):
        n = g.nodes[nid]
        nodes.append({
            "id": nid,
            "sequent": sequent_to_obj(n.sequent),
            "rule": None if n.rule is None else instance_to_obj(n.rule),
            "children": list(n.children),
        })
    edges = []
    for src in sorted(g.back_edges):
        e = g.back_edges[src]
        edges.append({
            "from": src,
            "to": e.target,
            "renaming": {label_name(k): label_name(v) for k, v in sorted(e.renaming.items())},
            "pivot": [label_name(e.pivot[0]), label_name(e.pivot[1])],
        })
    return {"root": g.root, "nodes": nodes, "back_edges": edges}


def graph_from_obj(obj: dict) -> ProofGraph:
    nodes = {}
    for item in obj["nodes"]:
        seq = sequent_from_obj(item["sequent"])
        rule = None if item.get("rule") is None else instance_from_obj(item["rule"], seq)
        nid = int(item["id"])
        if nid in nodes:
            raise ValueError(f"duplicate node id {nid}")
        nodes[nid] = ProofNode(seq, rule, tuple(int(c) for c in item.get("children", [])))
    edges = {}
    for e in obj.get("back_edges", []):
        renaming = {parse_label(k): parse_label(v) for k, v in e.get("renaming", {}).items()}
        a, x = e["pivot"]
        edges[int(e["from"])] = BackEdge(int(e["to"]), renaming, (parse_label(a), parse_label(x)))
    return ProofGraph(nodes, int(obj["root"]), edges)


def graph_to_json(g: ProofGraph, indent: int | None = None) -> str:
    return json.dumps(graph_to_obj(g), indent=indent)


def graph_from_json(text: str) -> ProofGraph:
    return graph_from_obj(json.loads(text))
