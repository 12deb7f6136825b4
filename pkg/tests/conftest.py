from pathlib import Path

import pytest
from hypothesis import settings
from hypothesis import strategies as st

from lutkit.formula import Ann, And, Atom, Know, Neg, TOP, Unk
from lutkit.kripke import Model
from lutkit.suite import moore_model, three_state_model

DATA = Path(__file__).resolve().parent.parent / "data"

settings.register_profile("default", deadline=None, max_examples=150)
settings.load_profile("default")


@pytest.fixture
def data_dir():
    return DATA


@pytest.fixture
def moore():
    return moore_model()


@pytest.fixture
def three():
    return three_state_model()


def formulas(atoms=("p", "q"), agents=("i",), announcements=True, unknowability=True,
             max_leaves=12):
    leaves = st.sampled_from([Atom(a) for a in atoms] + [TOP])

    def extend(children):
        options = [
            st.builds(Neg, children),
            st.builds(And, children, children),
            st.builds(Know, st.sampled_from(agents), children),
        ]
        if announcements:
            options.append(st.builds(Ann, children, children))
        if unknowability:
            options.append(st.builds(Unk, st.sampled_from(agents), children))
        return st.one_of(options)

    return st.recursive(leaves, extend, max_leaves=max_leaves)


@st.composite
def models(draw, max_states=4, agents=("i",), atoms=("p", "q")):
    n = draw(st.integers(1, max_states))
    masks = st.integers(0, (1 << n) - 1)
    succ = tuple(tuple((1 << k) | draw(masks) for k in range(n)) for _ in agents)
    valuation = tuple((a, draw(masks)) for a in sorted(atoms))
    return Model(tuple(f"s{k}" for k in range(n)), tuple(agents), succ, valuation)
