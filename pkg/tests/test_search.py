import io
import json
import random

import pytest

from csprove.calculus import Rule
from csprove.corpus import axiom_instances
from csprove.formula import Imp, parse, subformula_closure
from csprove.model import forces, sequent_holds, validate_model
from csprove.proofgraph import check_proof, graph_to_json
from csprove.search import (
    BudgetExceeded,
    Config,
    Proved,
    Refuted,
    decide,
    decide_formula,
    label_phase,
    leaves,
    saturation_phase,
    signature,
)
from csprove.sequent import LEFT, RIGHT, R, S, Sequent, formula_saturated, is_fully_saturated, trans_saturated

from conftest import random_formula

x, y, z = 0, 1, 2


def rules_of(g):
    return [n.rule.rule for _, n in sorted(g.nodes.items()) if n.rule is not None]


def test_saturation_phase_trivial():
    s = Sequent.of([], [(x, "p")], [(x, "q")])
    g = saturation_phase(s)
    assert len(g.nodes) == 1 and leaves(g) == [0]


def test_saturation_phase_mixed_lob_segment():
    s = Sequent.of([(x, S, y), (y, R, z)], [(x, "[b]([b]p->p)")], [(z, "p")])
    g = saturation_phase(s)
    assert rules_of(g) == [Rule.TRANS_SR, Rule.BOX_L, Rule.IMP_L, Rule.ID]
    (open_leaf,) = leaves(g)
    assert g.nodes[open_leaf].sequent.right == Sequent.of([], [], [(z, "p"), (z, "[b]p")]).right


def test_saturation_phase_respects_saturated_imp():
    # x:p->q on the left is already saturated because x:p sits on the right
    s = Sequent.of([], [(x, "p->q")], [(x, "p")])
    assert len(saturation_phase(s).nodes) == 1
    s = Sequent.of([], [(x, "p->q")], [(x, "r")])
    g = saturation_phase(s)
    assert rules_of(g) == [Rule.IMP_L]
    assert len(leaves(g)) == 2


def test_saturation_phase_leaves_are_saturated():
    rng = random.Random(12)
    for _ in range(100):
        f = random_formula(rng, 4)
        g = saturation_phase(Sequent.of([], [], [(x, f)]))
        for k in leaves(g):
            s = g.nodes[k].sequent
            assert trans_saturated(s)
            for lf in s.left:
                assert formula_saturated(s, lf, LEFT)
            for lf in s.right:
                if isinstance(lf.formula, Imp):
                    assert formula_saturated(s, lf, RIGHT)


def test_label_phase_examples():
    g = label_phase(Sequent.of([], [], [(x, "[b]p")]))
    assert rules_of(g) == [Rule.BOX_R]
    assert g.nodes[leaves(g)[0]].sequent == Sequent.of([(x, R, y)], [], [(x, "[b]p"), (y, "p")])

    g = label_phase(Sequent.of([], [], [(x, "[d][b]p")]))
    assert rules_of(g) == [Rule.TRI_R, Rule.BOX_R]
    leaf = g.nodes[leaves(g)[0]].sequent
    assert leaf.rels == Sequent.of([(x, S, y), (y, R, z)]).rels
    assert leaf.formulas_at(z, RIGHT) == {parse("p")}

    s = Sequent.of([], [(x, "p")], [(x, "q")])
    assert len(label_phase(s).nodes) == 1


def test_label_phase_non_exhaustive():
    g = label_phase(Sequent.of([], [], [(x, "[d][b]p")]), next_label=10, exhaustive=False)
    assert rules_of(g) == [Rule.TRI_R]
    assert g.nodes[1].rule is None and 10 in {r.dst for r in g.nodes[1].sequent.rels}


def test_signature():
    s = Sequent.of([(x, S, y)], [(y, "[b]p")], [(y, "p"), (x, "q")])
    assert signature(s, y) == (S, {parse("[b]p")}, {parse("p")})
    assert signature(s, x)[0] is None


def test_decide_examples():
    v = decide_formula("[b]([b]p->p) -> [d][b]p")
    assert isinstance(v, Proved) and v.verdict == "PROVED"
    check_proof(v.proof)
    v = decide_formula("[b]([b]p->p) -> [b]p")
    assert isinstance(v, Proved) and len(v.proof.back_edges) >= 1
    v = decide_formula("[d]p -> [b]p")
    assert isinstance(v, Refuted) and v.verdict == "REFUTED"
    m = v.model
    assert len(m.worlds) == 2
    (w1,) = [w for w in m.worlds if w != 0]
    assert (0, w1) in m.prec and w1 in m.m0 and w1 not in m.m1 and w1 not in m.holds("p")


def test_decide_formula_trivial():
    v = decide_formula("p -> p")
    assert isinstance(v, Proved)
    assert rules_of(v.proof) == [Rule.IMP_R, Rule.ID]
    v = decide_formula("bot")
    assert isinstance(v, Refuted) and len(v.model.worlds) == 1


def test_axiom_instances_proved():
    for f in axiom_instances(parse("p"), parse("q")):
        v = decide_formula(f)
        assert isinstance(v, Proved), f
        check_proof(v.proof)


def test_general_identity_needs_search():
    # Id is atomic only; [b]p => [b]p is still provable through BoxR then BoxL
    v = decide(Sequent.of([], [(x, "[b]p")], [(x, "[b]p")]))
    assert isinstance(v, Proved)
    assert Rule.BOX_R in rules_of(v.proof) and Rule.BOX_L in rules_of(v.proof)


def test_refuted_verdict_invariants():
    rng = random.Random(21)
    seen = 0
    while seen < 40:
        f = random_formula(rng, 4)
        v = decide_formula(f)
        if isinstance(v, Refuted):
            validate_model(v.model)
            assert is_fully_saturated(v.leaf)
            assert not forces(v.model, 0, f)
            assert not sequent_holds(v.model, v.leaf)
            seen += 1
        else:
            check_proof(v.proof)


def test_budget_exceeded():
    with pytest.raises(BudgetExceeded):
        decide_formula("[b]([b]p->p) -> [b]p", Config(max_steps=0))


def test_budget_respected_by_default():
    f = parse("[b]([b]p->p) -> [d][b]p")
    v = decide_formula(f)
    assert v.stats["cap"] == 4 ** len(subformula_closure(f)) + 1
    assert v.stats["max_expansions"] <= v.stats["cap"]


def test_trace_is_json_lines():
    buf = io.StringIO()
    decide_formula("[b]([b]p->p) -> [b]p", Config(trace=buf))
    events = [json.loads(line) for line in buf.getvalue().splitlines()]
    kinds = {e["event"] for e in events}
    assert {"saturation", "label", "close", "back_edge"} <= kinds
    buf = io.StringIO()
    decide_formula("[d]p -> [b]p", Config(trace=buf))
    last = json.loads(buf.getvalue().splitlines()[-1])
    assert last["event"] == "open" and "rels" in last["sequent"]


@pytest.mark.parametrize("rels,message", [
    ([(x, R, y), (y, R, x)], "cyclic"),
    ([(x, R, x)], "cyclic"),
    ([(x, R, z), (y, S, z)], "both R and S"),
])
def test_root_preconditions(rels, message):
    with pytest.raises(ValueError, match=message):
        decide(Sequent.of(rels, [], [(x, "p")]))


def test_decide_sequent_with_relations():
    s = Sequent.of([(x, R, y)], [(x, "[b]p")], [(y, "p")])
    assert isinstance(decide(s), Proved)
    s = Sequent.of([(x, S, y)], [(x, "[b]p")], [(y, "p")])
    v = decide(s)
    assert isinstance(v, Refuted)
    assert not sequent_holds(v.model, s)


def test_deterministic_output():
    a = decide_formula("[b]([b]p->p) -> [d][b]p")
    b = decide_formula("[b]([b]p->p) -> [d][b]p")
    assert graph_to_json(a.proof) == graph_to_json(b.proof)


@pytest.mark.parametrize("config", [
    Config(early_loop_check=False),
    Config(one_label_per_round=True),
    Config(early_loop_check=False, one_label_per_round=True),
])
def test_alternate_modes_agree(config):
    rng = random.Random(33)
    for _ in range(60):
        f = random_formula(rng, 4)
        a = decide_formula(f)
        b = decide_formula(f, config)
        assert a.verdict == b.verdict, f
        if isinstance(b, Proved):
            check_proof(b.proof)
