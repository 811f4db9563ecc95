"""Inference rules: applicability and premise construction.

Premises are cumulative by default: the principal occurrence stays in the
context of every premise. With set-based sequents this is still an exact
instance of each rule schema (the context simply contains the principal),
and it keeps every sequent on a branch a subset of its successors, which
the saturation guards and the loop check both rely on. Pass
``keep_principal=False`` to obtain the deleting shape instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .formula import Atom, Imp, parse, to_str
from .sequent import (
    LEFT,
    RIGHT,
    R,
    S,
    LabelledFormula,
    RelAtom,
    Sequent,
    find_bot,
    formula_saturated,
    label_name,
    labels_of,
    missing_trans,
    modal_kind,
    parse_label,
    rel_index,
    lf_key,
)


class Rule(str, Enum):
    ID = "Id"
    BOT = "Bot"
    IMP_R = "ImpR"
    IMP_L = "ImpL"
    BOX_R = "BoxR"
    BOX_L = "BoxL"
    TRI_R = "TriR"
    TRI_L = "TriL"
    TRANS_RR = "TransRR"
    TRANS_RS = "TransRS"
    TRANS_SR = "TransSR"
    TRANS_SS = "TransSS"

    @classmethod
    def trans(cls, first: str, second: str) -> "Rule":
        return cls("Trans" + first + second)

    @property
    def trans_kinds(self) -> tuple[str, str] | None:
        if self.value.startswith("Trans"):
            return self.value[5], self.value[6]
        return None

    def __str__(self):
        return self.value


AXIOM_RULES = frozenset({Rule.ID, Rule.BOT})
LABEL_RULES = frozenset({Rule.BOX_R, Rule.TRI_R})
TRANS_RULES = frozenset({Rule.TRANS_RR, Rule.TRANS_RS, Rule.TRANS_SR, Rule.TRANS_SS})


@dataclass(frozen=True)
class Principal:
    """The principal occurrence(s) of a rule application.

    ``formula``/``side`` name the labelled formula (absent for trans);
    ``rels`` holds the relational atoms involved: the chosen xRy / xSy for
    BoxL / TriL and the two composed atoms for trans.
    """

    formula: LabelledFormula | None = None
    side: str | None = None
    rels: tuple[RelAtom, ...] = ()

    def __str__(self):
        parts = []
        if self.formula is not None:
            parts.append(f"{self.formula} ({self.side})")
        parts.extend(str(r) for r in self.rels)
        return ", ".join(parts)


@dataclass(frozen=True)
class RuleInstance:
    rule: Rule
    conclusion: Sequent
    principal: Principal
    fresh: int | None = None
    premises: tuple[Sequent, ...] = field(default=())


class RuleError(ValueError):
    pass


def applicable(s: Sequent) -> list[tuple[Rule, Principal]]:
    """All rule applications that would add something new to ``s``.

    Ordered as the search consumes them: closing axioms, trans, BoxL/TriL,
    ImpL/ImpR (newest label first), then BoxR/TriR.
    """
    return list(iter_applicable(s))


def iter_applicable(s: Sequent, include=None):
    """Lazy :func:`applicable`; ``include`` restricts to a set of rules."""

    def want(rule):
        return include is None or rule in include

    if want(Rule.ID):
        for lf in sorted(s.left, key=lf_key):
            if isinstance(lf.formula, Atom) and lf in s.right:
                yield Rule.ID, Principal(lf, LEFT)
    if want(Rule.BOT):
        bot = find_bot(s)
        if bot is not None:
            yield Rule.BOT, Principal(bot, LEFT)
    if include is None or include & TRANS_RULES:
        for a, b, _ in missing_trans(s.rels):
            rule = Rule.trans(a.kind, b.kind)
            if want(rule):
                yield rule, Principal(rels=(a, b))
    succ = rel_index(s.rels)[1]
    left = sorted(s.left, key=lf_key)
    if want(Rule.BOX_L) or want(Rule.TRI_L):
        for lf in left:
            kind = modal_kind(lf.formula)
            if not kind:
                continue
            rule = Rule.BOX_L if kind == R else Rule.TRI_L
            if not want(rule):
                continue
            for y in succ.get((lf.label, kind), ()):
                if LabelledFormula(y, lf.formula.body) not in s.left:
                    yield rule, Principal(lf, LEFT, (RelAtom(lf.label, kind, y),))
    # implications at the newest labels first, so a repeating label gets
    # decomposed (and caught by the loop check) before its older siblings
    if want(Rule.IMP_L):
        for lf in sorted(s.left, key=_newest_first):
            if isinstance(lf.formula, Imp) and not formula_saturated(s, lf, LEFT):
                yield Rule.IMP_L, Principal(lf, LEFT)
    right = sorted(s.right, key=lf_key)
    if want(Rule.IMP_R):
        for lf in sorted(s.right, key=_newest_first):
            if isinstance(lf.formula, Imp) and not formula_saturated(s, lf, RIGHT):
                yield Rule.IMP_R, Principal(lf, RIGHT)
    if want(Rule.BOX_R) or want(Rule.TRI_R):
        for lf in right:
            kind = modal_kind(lf.formula)
            if not kind:
                continue
            rule = Rule.BOX_R if kind == R else Rule.TRI_R
            if want(rule) and not any(LabelledFormula(y, lf.formula.body) in s.right
                                      for y in succ.get((lf.label, kind), ())):
                yield rule, Principal(lf, RIGHT)


def _newest_first(lf: LabelledFormula):
    return (-lf.label, to_str(lf.formula))


def is_applicable(s: Sequent, rule: Rule, principal: Principal) -> bool:
    """Membership in :func:`applicable` without building the whole list."""
    rule = Rule(rule)
    lf = principal.formula
    if rule in TRANS_RULES:
        if lf is not None or len(principal.rels) != 2:
            return False
        a, b = principal.rels
        return (a in s.rels and b in s.rels and a.dst == b.src and (a.kind, b.kind) == rule.trans_kinds
                and RelAtom(a.src, b.kind, b.dst) not in s.rels)
    if lf is None:
        return False
    x, f = lf
    if rule == Rule.ID:
        return principal.side == LEFT and not principal.rels and isinstance(f, Atom) and lf in s.left and lf in s.right
    if rule == Rule.BOT:
        return principal.side == LEFT and not principal.rels and lf == find_bot(s)
    if rule in (Rule.BOX_L, Rule.TRI_L):
        kind = R if rule == Rule.BOX_L else S
        if principal.side != LEFT or lf not in s.left or modal_kind(f) != kind or len(principal.rels) != 1:
            return False
        (atom,) = principal.rels
        return (atom in s.rels and atom.src == x and atom.kind == kind
                and LabelledFormula(atom.dst, f.body) not in s.left)
    if principal.rels:
        return False
    if rule == Rule.IMP_L:
        return principal.side == LEFT and lf in s.left and isinstance(f, Imp) and not formula_saturated(s, lf, LEFT)
    if rule == Rule.IMP_R:
        return principal.side == RIGHT and lf in s.right and isinstance(f, Imp) and not formula_saturated(s, lf, RIGHT)
    kind = R if rule == Rule.BOX_R else S
    return principal.side == RIGHT and lf in s.right and modal_kind(f) == kind and not formula_saturated(s, lf, RIGHT)


def apply(s: Sequent, rule: Rule, principal: Principal, fresh: int | None = None,
          keep_principal: bool = True) -> RuleInstance:
    """Apply ``rule`` at ``principal`` reading bottom-up.

    ``fresh`` is required for BoxR/TriR and must not occur in ``s``.
    """
    rule = Rule(rule)
    if not is_applicable(s, rule, principal):
        raise RuleError(f"{rule} is not applicable at {principal} in {s}")
    if rule in LABEL_RULES:
        if fresh is None:
            raise RuleError(f"{rule} needs a fresh label")
        if fresh in labels_of(s):
            raise RuleError(f"label {label_name(fresh)} is not fresh for {s}")
    elif fresh is not None:
        raise RuleError(f"{rule} does not introduce a label")

    def ctx(side):
        if keep_principal:
            return s
        return s.remove(**{side: [principal.formula]})

    if rule in (Rule.ID, Rule.BOT):
        premises = ()
    elif rule in TRANS_RULES:
        a, b = principal.rels
        premises = (s.add(rels=[RelAtom(a.src, b.kind, b.dst)]),)
    elif rule in (Rule.BOX_L, Rule.TRI_L):
        y = principal.rels[0].dst
        premises = (s.add(left=[LabelledFormula(y, principal.formula.formula.body)]),)
    elif rule == Rule.IMP_R:
        x, f = principal.formula
        premises = (ctx(RIGHT).add(left=[LabelledFormula(x, f.left)], right=[LabelledFormula(x, f.right)]),)
    elif rule == Rule.IMP_L:
        x, f = principal.formula
        base = ctx(LEFT)
        premises = (
            base.add(right=[LabelledFormula(x, f.left)]),
            base.add(left=[LabelledFormula(x, f.right)]),
        )
    else:
        x, f = principal.formula
        kind = R if rule == Rule.BOX_R else S
        premises = (ctx(RIGHT).add(rels=[RelAtom(x, kind, fresh)], right=[LabelledFormula(fresh, f.body)]),)
    return RuleInstance(rule, s, principal, fresh, premises)


def trace_step(s1: Sequent, s2: Sequent, x1: int, x2: int) -> bool:
    """Whether label x1 in ``s1`` may be followed by x2 in its premise ``s2``."""
    return x1 == x2 or RelAtom(x1, R, x2) in s1.rels or RelAtom(x1, S, x2) in s1.rels


# ---------------------------------------------------------------------------
# JSON

def principal_to_obj(p: Principal) -> dict:
    obj: dict = {}
    if p.formula is not None:
        obj["label"] = label_name(p.formula.label)
        obj["formula"] = to_str(p.formula.formula)
        obj["side"] = p.side
    if p.rels:
        obj["rels"] = [[label_name(r.src), r.kind, label_name(r.dst)] for r in p.rels]
    return obj


def principal_from_obj(obj: dict) -> Principal:
    formula = None
    if "formula" in obj:
        formula = LabelledFormula(parse_label(obj["label"]), parse(obj["formula"]))
    rels = tuple(RelAtom(parse_label(a), k, parse_label(b)) for a, k, b in obj.get("rels", []))
    return Principal(formula, obj.get("side"), rels)


def instance_to_obj(inst: RuleInstance) -> dict:
    from .sequent import sequent_to_obj

    return {
        "rule": inst.rule.value,
        "principal": principal_to_obj(inst.principal),
        "fresh": None if inst.fresh is None else label_name(inst.fresh),
        "premises": [sequent_to_obj(p) for p in inst.premises],
    }


def instance_from_obj(obj: dict, conclusion: Sequent) -> RuleInstance:
    from .sequent import sequent_from_obj

    try:
        rule = Rule(obj["rule"])
    except ValueError:
        raise ValueError(f"unknown rule {obj['rule']!r}") from None
    fresh = obj.get("fresh")
    return RuleInstance(
        rule,
        conclusion,
        principal_from_obj(obj.get("principal", {})),
        None if fresh is None else parse_label(fresh),
        tuple(sequent_from_obj(p) for p in obj.get("premises", [])),
    )
