"""Shared fixtures and hypothesis strategies."""

import pytest
from hypothesis import strategies as st

from lib.generate import make_rng, random_cont, random_inter, random_term
from lib.syntax import parse_term

OMEGA_TEXT = "(\\x.x x) (\\x.x x)"


def seeded(build):
    """Hypothesis strategy drawing a seed and handing a generator to ``build``."""
    return st.integers(min_value=0, max_value=2**32 - 1).map(lambda seed: build(make_rng(seed)))


terms = seeded(lambda rng: random_term(rng, int(rng.integers(1, 9))))
impure_terms = seeded(lambda rng: random_term(rng, int(rng.integers(1, 9)), pure=False))
small_terms = seeded(lambda rng: random_term(rng, int(rng.integers(1, 6))))
inter_type_samples = seeded(lambda rng: random_inter(rng, 4))
cont_type_samples = seeded(lambda rng: random_cont(rng, 4))


@pytest.fixture
def omega():
    return parse_term(OMEGA_TEXT)


@pytest.fixture
def state_dir(tmp_path):
    return str(tmp_path / "state")
