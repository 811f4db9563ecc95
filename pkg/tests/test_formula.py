import pickle

import pytest
from hypothesis import given, settings

from csprove.formula import (
    BOT,
    Atom,
    Box,
    FormulaSyntaxError,
    Imp,
    Tri,
    atoms,
    height,
    modal_depth,
    parse,
    print_formula,
    size,
    subformula_closure,
    to_str,
)

from conftest import formulas

p, q, r = Atom("p"), Atom("q"), Atom("r")


def test_parse_mixed_lob_root():
    f = parse("[b]([b]p -> p) -> [d][b]p")
    assert f == Imp(Box(Imp(Box(p), p)), Tri(Box(p)))


def test_parse_bot_and_negation():
    assert parse("bot") == BOT
    assert parse("~p") == Imp(p, BOT)
    assert parse("~~p") == Imp(Imp(p, BOT), BOT)


def test_sugar():
    assert parse("p | q") == Imp(Imp(p, BOT), q)
    assert parse("p & q") == Imp(Imp(p, Imp(q, BOT)), BOT)
    pq, qp = Imp(p, q), Imp(q, p)
    assert parse("p <-> q") == Imp(Imp(pq, Imp(qp, BOT)), BOT)


def test_associativity():
    assert parse("p -> q -> r") == Imp(p, Imp(q, r))
    assert parse("(p -> q) -> r") == Imp(Imp(p, q), r)
    # & and | group to the left
    assert parse("p & q & r") == parse("(p & q) & r")
    assert parse("p | q | r") == parse("(p | q) | r")
    assert parse("p <-> q <-> r") == parse("(p <-> q) <-> r")


def test_precedence():
    assert parse("p & q | r") == parse("(p & q) | r")
    assert parse("p | q <-> r") == parse("(p | q) <-> r")
    assert parse("p <-> q -> r") == parse("(p <-> q) -> r")
    assert parse("~p & q") == parse("(~p) & q")
    assert parse("[b]p -> q") == Imp(Box(p), q)
    assert parse("[d]~p") == Tri(Imp(p, BOT))


def test_whitespace_is_insignificant():
    assert parse("  [b] ( p->q )\t->\n[d]p ") == parse("[b](p -> q) -> [d]p")


def test_identifiers():
    assert parse("p_1 -> abc9") == Imp(Atom("p_1"), Atom("abc9"))
    # "bott" is an ordinary identifier, only "bot" itself is reserved
    assert parse("bott") == Atom("bott")


@pytest.mark.parametrize("text,offset", [
    ("p ->", 4),
    ("", 0),
    ("p q", 2),
    ("(p -> q", 7),
    ("p $ q", 2),
    ("P", 0),
    ("[x]p", 0),
    ("p -> )", 5),
    ("λ -> p", 0),
    ("p -> λ", 5),
    ("(λ)", 1),
])
def test_syntax_errors_carry_byte_offsets(text, offset):
    with pytest.raises(FormulaSyntaxError) as e:
        parse(text)
    assert e.value.offset == offset
    assert f"byte offset {offset}" in str(e.value)


def test_byte_offset_counts_utf8_bytes():
    # "λ" is two bytes, so the stray ")" sits at byte 9, not character 8
    with pytest.raises(FormulaSyntaxError) as e:
        parse("(p) -> p λ")
    assert e.value.offset == 9


def test_reserved_word():
    with pytest.raises(ValueError):
        Atom("bot")
    with pytest.raises(ValueError):
        Atom("Bad")
    with pytest.raises(FormulaSyntaxError):
        parse("bot bot")


def test_print_examples():
    assert to_str(Imp(p, BOT)) == "p -> bot"
    assert to_str(Box(p)) == "[b]p"
    assert to_str(Tri(Box(p))) == "[d][b]p"
    assert to_str(Imp(Imp(p, q), r)) == "(p -> q) -> r"
    assert to_str(Imp(p, Imp(q, r))) == "p -> q -> r"
    assert to_str(Box(Imp(p, q))) == "[b](p -> q)"
    assert print_formula is to_str


def test_print_never_emits_sugar():
    text = to_str(parse("~p & (q | r) <-> p"))
    for sym in ("~", "&", "|", "<->"):
        assert sym not in text


def test_closure_examples():
    assert subformula_closure(Box(p)) == {Box(p), p}
    assert subformula_closure(Imp(p, p)) == {Imp(p, p), p}
    f = parse("[b]([b]p->p)->[d][b]p")
    expected = {f, parse("[b]([b]p->p)"), parse("[b]p->p"), parse("[d][b]p"), parse("[b]p"), p}
    assert subformula_closure(f) == expected
    assert len(subformula_closure(f)) == 6


def test_modal_depth_examples():
    assert modal_depth(p) == 0
    assert modal_depth(Tri(Box(p))) == 2
    assert modal_depth(parse("[b]([b]p->p)->[d][b]p")) == 2


def test_measures():
    f = parse("[b](p -> q) -> bot")
    assert size(f) == 6
    assert height(f) == 3
    assert atoms(f) == {"p", "q"}
    assert atoms(BOT) == frozenset()


def test_value_semantics():
    a = parse("[b]([b]p->p)->[d][b]p")
    b = parse("[b]([b]p->p)->[d][b]p")
    assert a == b and hash(a) == hash(b)
    assert len({a, b}) == 1
    assert Box(p) != Tri(p)


def test_pickle_does_not_carry_hash():
    f = parse("[b]p -> q")
    hash(f)
    g = pickle.loads(pickle.dumps(f))
    assert g == f
    assert "_hash" not in g.__dict__
    assert hash(g) == hash(f)


@settings(max_examples=300)
@given(formulas())
def test_round_trip(f):
    assert parse(to_str(f)) == f


@settings(max_examples=200)
@given(formulas())
def test_closure_properties(f):
    cl = subformula_closure(f)
    assert f in cl
    assert len(cl) <= size(f)
    for g in cl:
        assert subformula_closure(g) <= cl


@settings(max_examples=200)
@given(formulas())
def test_modal_depth_bounded_by_height(f):
    assert modal_depth(f) <= height(f)
