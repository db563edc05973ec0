"""Shared fixtures: the default grammar, a reference concept, and small
rendering configurations that keep unit tests fast."""

import numpy as np
import pytest
from hypothesis import settings

from growthlab import grammar as gr
from growthlab import render
from growthlab.lsystem import LSystem

settings.register_profile("suite", deadline=None, max_examples=50)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def default_grammar():
    return gr.default_grammar()


@pytest.fixture(scope="session")
def ink():
    return render.InkParams()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def reference_concept():
    """The worked-example concept: a five-segment sprout at 60 degrees."""
    return LSystem(axiom="F", angle_deg=60.0, f_rule="G-G+F+G-G", g_rule="G")


@pytest.fixture(scope="session")
def finite_grammar():
    """A fully enumerable grammar used for exactness checks."""
    return gr.parse_grammar(
        "angles: 60 90\n"
        "Start -> F | X F X | + X F X +\n"
        "X -> G | + | -\n"
    )


def random_symbol_string(rng, n, alphabet="FG+- "):
    letters = rng.choice(list(alphabet), size=n)
    return "".join(letters)
