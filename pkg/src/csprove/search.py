"""Proof search: saturation rounds alternating with label rounds, closed
eagerly by Id/Bot and finitized by a loop check on label signatures.

Every branch of the search tree ends in one of three ways: an axiom, a
back-edge to an earlier label expansion with the same signature, or a fully
saturated open leaf. The first open leaf found is turned into a countermodel
and the search stops. If no leaf stays open the tree with its back-edges is
handed to the independent checker before it is returned.

Within ``decide`` a label round expands only the right modals present when
the round starts. Each label is therefore expanded exactly once, while it is
saturated and has no successors yet, and its formulas never change after
that. This is what makes the signature recorded at expansion time a sound
thing to compare against.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import IO, Union

from .calculus import LABEL_RULES, TRANS_RULES, Principal, Rule, RuleInstance, apply, iter_applicable
from .formula import Formula, closure_of, parse
from .model import CarlsonModel, extract_model, sequent_holds
from .proofgraph import BackEdge, ProofCheckError, ProofGraph, ProofNode, check_proof
from .sequent import (
    LEFT,
    RIGHT,
    LabelledFormula,
    RelAtom,
    Sequent,
    ancestors,
    is_initial,
    find_bot,
    find_identity,
    label_name,
    labels_of,
    missing_trans,
    modal_kind,
    sequent_to_obj,
    trans_closure,
    unexpanded_modals,
)

SATURATION_RULES = TRANS_RULES | frozenset({Rule.BOX_L, Rule.TRI_L, Rule.IMP_L, Rule.IMP_R})

MAX_RERUNS = 16


@dataclass
class Config:
    max_steps: int | None = None
    trace: IO | None = None
    # also look for back-edges right after each saturation step, not only
    # when a label is about to be expanded
    early_loop_check: bool = True
    # expand only the newest due label in each label round
    one_label_per_round: bool = False


@dataclass
class Proved:
    proof: ProofGraph
    stats: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return "PROVED"


@dataclass
class Refuted:
    model: CarlsonModel
    leaf: Sequent
    interpretation: dict
    stats: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return "REFUTED"


Verdict = Union[Proved, Refuted]


class SearchError(RuntimeError):
    """An internal invariant failed; never a logical outcome."""


class BudgetExceeded(SearchError):
    pass


class CheckerRejected(SearchError):
    def __init__(self, error: ProofCheckError):
        super().__init__(f"proof rejected by checker: {error}")
        self.error = error


# ---------------------------------------------------------------------------
# single phases, exposed for inspection and tests

def _axiom(s: Sequent) -> RuleInstance | None:
    rule = is_initial(s)
    if rule is None:
        return None
    lf = find_identity(s) if rule == Rule.ID else find_bot(s)
    return apply(s, rule, Principal(lf, LEFT))


def _saturation_step(s: Sequent, rels_closed: bool = False) -> RuleInstance | None:
    rules = SATURATION_RULES - TRANS_RULES if rels_closed else SATURATION_RULES
    for rule, principal in iter_applicable(s, rules):
        return apply(s, rule, principal)
    return None


class _Builder:
    def __init__(self):
        self.nodes: dict[int, list] = {}

    def new(self, s: Sequent) -> int:
        nid = len(self.nodes)
        self.nodes[nid] = [s, None, ()]
        return nid

    def expand(self, nid: int, inst: RuleInstance) -> list[int]:
        kids = [self.new(p) for p in inst.premises]
        self.nodes[nid][1] = inst
        self.nodes[nid][2] = tuple(kids)
        return kids

    def graph(self, back_edges=None) -> ProofGraph:
        nodes = {k: ProofNode(s, r, c) for k, (s, r, c) in self.nodes.items()}
        return ProofGraph(nodes, 0, dict(back_edges or {}))


def saturation_phase(s: Sequent) -> ProofGraph:
    """Apply trans, BoxL/TriL and ImpL/ImpR until every open leaf is saturated.

    Leaves where Id or Bot applies are closed on the spot. The result is a
    derivation whose remaining leaves carry no rule.
    """
    b = _Builder()
    stack = [b.new(s)]
    while stack:
        nid = stack.pop()
        seq = b.nodes[nid][0]
        inst = _axiom(seq) or _saturation_step(seq)
        if inst is not None:
            stack.extend(reversed(b.expand(nid, inst)))
    return b.graph()


def label_phase(s: Sequent, next_label: int | None = None, exhaustive: bool = True) -> ProofGraph:
    """A chain of BoxR/TriR steps, one fresh label each.

    With ``exhaustive`` the chain continues through modals created along the
    way until nothing is left to expand; otherwise only the modals present
    in ``s`` are expanded.
    """
    fresh = max(labels_of(s), default=-1) + 1 if next_label is None else next_label
    b = _Builder()
    nid = b.new(s)
    todo = unexpanded_modals(s)
    while todo:
        lf = todo.pop(0)
        seq = b.nodes[nid][0]
        rule = Rule.BOX_R if modal_kind(lf.formula) == "R" else Rule.TRI_R
        inst = apply(seq, rule, Principal(lf, RIGHT), fresh)
        fresh += 1
        (nid,) = b.expand(nid, inst)
        if exhaustive and not todo:
            todo = unexpanded_modals(b.nodes[nid][0])
    return b.graph()


def leaves(g: ProofGraph) -> list[int]:
    return sorted(k for k, n in g.nodes.items() if n.rule is None)


# ---------------------------------------------------------------------------
# decide

def signature(s: Sequent, x: int):
    """(incoming kind, left formulas at x, right formulas at x)."""
    kinds = {r.kind for r in s.rels if r.dst == x}
    kind = min(kinds) if kinds else None
    return kind, s.formulas_at(x, LEFT), s.formulas_at(x, RIGHT)


@dataclass(frozen=True)
class _Record:
    """What a label looked like when its expansion began at ``node``."""

    sig: tuple
    node: int
    preds: frozenset  # (src, kind) of atoms into the label
    succs: frozenset  # (kind, dst) of atoms out of the label

    @classmethod
    def of(cls, s: Sequent, a: int, node: int) -> "_Record":
        return cls(
            signature(s, a),
            node,
            frozenset((r.src, r.kind) for r in s.rels if r.dst == a),
            frozenset((r.kind, r.dst) for r in s.rels if r.src == a),
        )

    def embeds(self, s: Sequent, x: int) -> bool:
        """Whether renaming the recorded label to ``x`` lands inside ``s``.

        Only the recorded label needs checking: premises are cumulative, so
        everything else in the recorded node is still present in ``s``.
        """
        _, left, right = self.sig
        return (left <= s.formulas_at(x, LEFT) and right <= s.formulas_at(x, RIGHT)
                and all(RelAtom(p, k, x) in s.rels for p, k in self.preds)
                and all(RelAtom(x, k, q) in s.rels for k, q in self.succs))


def _check_root(root: Sequent) -> None:
    closed = trans_closure(root.rels)
    for r in closed:
        if r.src == r.dst:
            raise ValueError(f"root relational atoms are cyclic at {label_name(r.src)}")
    incoming: dict[int, set] = {}
    for r in root.rels:
        incoming.setdefault(r.dst, set()).add(r.kind)
    for x, kinds in sorted(incoming.items()):
        if len(kinds) > 1:
            raise ValueError(f"label {label_name(x)} has both R and S predecessors")


def _emit(config: Config, event: str, **data) -> None:
    if config.trace is None:
        return
    obj = {"event": event}
    for k, v in data.items():
        obj[k] = sequent_to_obj(v) if isinstance(v, Sequent) else v
    config.trace.write(json.dumps(obj) + "\n")


def decide(root: Sequent, config: Config | None = None) -> Verdict:
    """Prove ``root`` with a checked cyclic proof or refute it with a model."""
    config = config or Config()
    _check_root(root)
    blacklist: set = set()
    for _ in range(MAX_RERUNS):
        verdict, edges_used = _search(root, config, frozenset(blacklist))
        if isinstance(verdict, Refuted):
            if sequent_holds(verdict.model, root):
                raise SearchError("extracted model does not falsify the root")
            return verdict
        try:
            check_proof(verdict.proof)
        except ProofCheckError as e:
            key = edges_used.get(e.node)
            if key is None or key in blacklist:
                raise CheckerRejected(e) from None
            blacklist.add(key)
            _emit(config, "rerun", blacklisted=e.node)
            continue
        return verdict
    raise SearchError("too many checker reruns")


def _touched(inst: RuleInstance) -> int:
    """The label that a saturation step added material to."""
    if inst.rule in (Rule.BOX_L, Rule.TRI_L):
        return inst.principal.rels[0].dst
    return inst.principal.formula.label


def _search(root: Sequent, config: Config, blacklist: frozenset):
    closure = closure_of(lf.formula for lf in root.left | root.right)
    cap = config.max_steps if config.max_steps is not None else 4 ** len(closure) + 1
    counter = max(labels_of(root), default=-1) + 1
    b = _Builder()
    back_edges: dict[int, BackEdge] = {}
    edge_keys: dict[int, tuple] = {}
    stats = {"nodes": 0, "labels": 0, "back_edges": 0, "cap": cap, "max_expansions": 0}

    def close(nid, s, edge):
        a, x, target = edge
        back_edges[nid] = BackEdge(target, {a: x}, (a, x))
        edge_keys[nid] = (s, a, x)
        _emit(config, "back_edge", node=nid, to=target, pivot=[label_name(a), label_name(x)])

    # frame: node id, expansion records on this branch, label expansions so
    # far, labels touched by the step that produced the node, and whether
    # the relational atoms are known to be closed under trans
    stack = [(b.new(root), {}, 0, (), False)]
    while stack:
        nid, records, used, touched, closed = stack.pop()
        s = b.nodes[nid][0]
        inst = _axiom(s)
        if inst is not None:
            b.expand(nid, inst)
            _emit(config, "close", node=nid, rule=inst.rule.value)
            continue
        if config.early_loop_check and touched and records:
            edge = _loop_check(s, touched, records, blacklist, exact=False)
            if edge is not None:
                close(nid, s, edge)
                continue
        inst = _saturation_step(s, closed)
        if inst is not None and inst.rule in TRANS_RULES:
            # close under trans in one go: one node per composite, but the
            # missing composites are computed once for the whole chain
            touched = set()
            for a, c, new in missing_trans(s.rels):
                cur = b.nodes[nid][0]
                if new in cur.rels:
                    continue
                inst = apply(cur, Rule.trans(a.kind, c.kind), Principal(rels=(a, c)))
                _emit(config, "saturation", node=nid, rule=inst.rule.value)
                (nid,) = b.expand(nid, inst)
                touched.add(new.dst)
            stack.append((nid, records, used, tuple(sorted(touched)), True))
            continue
        if inst is not None:
            kids = b.expand(nid, inst)
            _emit(config, "saturation", node=nid, rule=inst.rule.value)
            x = (_touched(inst),)
            for k in reversed(kids):
                stack.append((k, records if len(kids) == 1 else dict(records), used, x, True))
            continue
        due = sorted({lf.label for lf in unexpanded_modals(s)})
        if not due:
            model, interp = extract_model(s)
            stats["nodes"] = len(b.nodes)
            stats["labels"] = counter
            _emit(config, "open", node=nid, sequent=s)
            return Refuted(model, s, interp, stats), {}
        edge = _loop_check(s, due, records, blacklist, exact=True)
        if edge is not None:
            close(nid, s, edge)
            continue
        if config.one_label_per_round:
            due = due[-1:]
        used += len(due)
        if used > cap:
            raise BudgetExceeded(f"more than {cap} label expansions on one branch")
        stats["max_expansions"] = max(stats["max_expansions"], used)
        records = dict(records)
        _emit(config, "label", node=nid, labels=[label_name(x) for x in due])
        todo = unexpanded_modals(s)
        for x in due:
            records[x] = _Record.of(s, x, nid)
            for lf in todo:
                if lf.label == x:
                    rule = Rule.BOX_R if modal_kind(lf.formula) == "R" else Rule.TRI_R
                    inst = apply(b.nodes[nid][0], rule, Principal(lf, RIGHT), counter)
                    counter += 1
                    (nid,) = b.expand(nid, inst)
        stack.append((nid, records, used, (), False))
    stats["nodes"] = len(b.nodes)
    stats["labels"] = counter
    stats["back_edges"] = len(back_edges)
    return Proved(b.graph(back_edges), stats), edge_keys


def _loop_check(s: Sequent, labels, records, blacklist, exact: bool):
    """First (ancestor, label, node) such that an ancestor's record repeats at a label.

    ``exact`` compares signatures and requires the ancestor to have had no
    successors when it was expanded; otherwise the record only has to embed.
    """
    for x in labels:
        sig = signature(s, x) if exact else None
        for a in sorted(ancestors(s.rels, x)):
            rec = records.get(a)
            if rec is None or (s, a, x) in blacklist:
                continue
            if exact:
                if rec.succs or rec.sig != sig:
                    continue
            elif not rec.embeds(s, x):
                continue
            return a, x, rec.node
    return None


def decide_formula(f: Union[Formula, str], config: Config | None = None) -> Verdict:
    if isinstance(f, str):
        f = parse(f)
    return decide(Sequent(frozenset(), frozenset(), frozenset({LabelledFormula(0, f)})), config)


__all__ = [
    "Config", "Proved", "Refuted", "Verdict", "SearchError", "BudgetExceeded",
    "CheckerRejected", "saturation_phase", "label_phase", "leaves", "signature",
    "decide", "decide_formula", "LABEL_RULES",
]
