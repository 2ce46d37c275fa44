import random

import pytest

from ccspt import alphabet, build_lts, parse_term
from ccspt.semantics import Lts


def lts_of(source, sigma=()):
    """Build an LTS from concrete syntax or a term, with extra alphabet."""
    term = parse_term(source) if isinstance(source, str) else source
    return build_lts(term, sigma=frozenset(sigma) | alphabet(term))


def pair_lts(s1, s2, sigma=()):
    t1 = parse_term(s1) if isinstance(s1, str) else s1
    t2 = parse_term(s2) if isinstance(s2, str) else s2
    sig = frozenset(sigma) | alphabet(t1) | alphabet(t2)
    return build_lts(t1, sigma=sig), build_lts(t2, sigma=sig), sig


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)
