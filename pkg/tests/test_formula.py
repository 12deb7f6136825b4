import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from lutkit.formula import (Ann, And, Atom, BOT, Complexity, Know, Neg, ParseError, TOP, Top, Unk,
                            agents, atoms, bullet, diamond, disj, iff, implies, is_el, is_pal,
                            less_complex, measures, parse, random_formula, render, size,
                            subformulas, udepth)

from conftest import formulas

P, Q, R = Atom("p"), Atom("q"), Atom("r")


@pytest.mark.parametrize("text, expected", [
    ("U_a (p & ~K_a p)", Unk("a", And(P, Neg(Know("a", P))))),
    ("B_a p", And(P, Neg(Know("a", P)))),
    ("<p> K_a p", Neg(Ann(P, Neg(Know("a", P))))),
    ("p -> q", Neg(And(P, Neg(Q)))),
    ("p | q", Neg(And(Neg(P), Neg(Q)))),
    ("p <-> q", And(Neg(And(P, Neg(Q))), Neg(And(Q, Neg(P))))),
    ("bot", Neg(TOP)),
    ("top", TOP),
    ("[p] [q] r", Ann(P, Ann(Q, R))),
    ("K_agent1 p", Know("agent1", P)),
])
def test_parse_examples(text, expected):
    assert parse(text) == expected


def test_implication_is_right_associative():
    assert parse("p -> q -> r") == implies(P, implies(Q, R))


def test_precedence_and_binds_tighter_than_or():
    assert parse("p & q | r") == disj(And(P, Q), R)
    assert parse("~p & q") == And(Neg(P), Q)
    assert parse("K_a p & q") == And(Know("a", P), Q)
    assert parse("[p] q & r") == And(Ann(P, Q), R)


def test_whitespace_is_insignificant():
    assert parse("  [ p ]K_a(q&r) ") == parse("[p] K_a (q & r)")


@pytest.mark.parametrize("text, offset", [
    ("p &", 3),
    ("(p", 2),
    ("p q", 2),
    ("", 0),
    ("K_ p", 0),
    ("p $ q", 2),
    ("[p q", 3),
])
def test_parse_errors_carry_offsets(text, offset):
    with pytest.raises(ParseError) as err:
        parse(text)
    assert err.value.position == offset
    assert f"at offset {offset}" in str(err.value)


@pytest.mark.parametrize("f, text", [
    (Neg(P), "~p"),
    (Ann(P, Know("a", Q)), "[p] K_a q"),
    (Unk("a", TOP), "U_a top"),
    (Know("a", And(P, Q)), "K_a (p & q)"),
    (BOT, "bot"),
    (diamond(P, Know("a", P)), "<p> K_a p"),
    (bullet("a", P), "B_a p"),
    (implies(implies(P, Q), R), "(p -> q) -> r"),
    (implies(P, implies(Q, R)), "p -> q -> r"),
])
def test_render_examples(f, text):
    assert render(f) == text


def test_render_without_sugar_shows_primitives():
    assert render(implies(P, Q), sugar=False) == "~(p & ~q)"


@given(formulas(atoms=("p", "q", "r"), agents=("a", "b")))
def test_round_trip(f):
    assert parse(render(f)) == f
    assert parse(render(f, sugar=False)) == f


@pytest.mark.parametrize("f, udepth_, size_", [
    (P, 0, 1),
    (TOP, 0, 1),
    (Ann(P, Q), 0, 6),
    (Unk("a", P), 1, 2),
    (implies(P, Q), 0, 5),
    (parse("[p] K_a q"), 0, 12),
    (parse("[p] [q] r"), 0, 36),
    (parse("[U_a p] U_a q"), 2, 14),
])
def test_measures_oracle(f, udepth_, size_):
    assert measures(f) == Complexity(udepth_, size_)
    assert udepth(f) == udepth_ and size(f) == size_


@given(formulas(), formulas())
def test_implication_size_identity(a, b):
    assert size(implies(a, b)) == size(a) + size(b) + 3
    assert udepth(implies(a, b)) == max(udepth(a), udepth(b))


@given(formulas())
def test_measure_positivity(f):
    c = measures(f)
    assert c.size >= 1
    assert (c.udepth == 0) == (not any(isinstance(g, Unk) for g in subformulas(f)))


def test_less_complex_examples():
    assert less_complex(P, Unk("a", P))
    assert not less_complex(P, P)
    assert less_complex(parse("[p & [p] q] r"), parse("[p] [q] r"))


@given(formulas(), formulas(), formulas())
def test_less_complex_is_strict_order(a, b, c):
    assert not less_complex(a, a)
    if less_complex(a, b) and less_complex(b, c):
        assert less_complex(a, c)
    assert not (less_complex(a, b) and less_complex(b, a))


def test_fragments():
    assert is_el(Know("a", P))
    assert not is_el(Ann(P, Q))
    assert not is_el(Unk("a", P))
    assert is_pal(Ann(P, Q)) and not is_pal(Unk("a", P))


def test_atoms_and_agents():
    f = parse("[K_a p] U_b (q | top)")
    assert atoms(f) == {"p", "q"}
    assert agents(f) == {"a", "b"}


def test_formulas_are_immutable_and_hashable():
    f = parse("K_a p")
    with pytest.raises(AttributeError):
        f.agent = "b"
    assert hash(f) == hash(parse("K_a p"))
    assert len({f, parse("K_a p"), parse("K_b p")}) == 2


def test_atom_names_are_validated():
    with pytest.raises(ValueError):
        Atom("top")
    with pytest.raises(ValueError):
        Atom("P")


def test_sugar_helpers():
    assert iff(P, Q) == parse("p <-> q")
    assert isinstance(TOP, Top)


@given(st.integers(0, 2**32))
def test_random_formula_respects_switches(seed):
    rng = random.Random(seed)
    f = random_formula(rng, 4, announcements=False, unknowability=False)
    assert is_el(f)
    g = random_formula(rng, 4, unknowability=False)
    assert is_pal(g)
