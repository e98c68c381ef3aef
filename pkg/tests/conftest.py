import random

import pytest
from hypothesis import settings, strategies as st

from diokex.polyring import Polynomial, RingSpec, poly_parse
from diokex.quotient import Relation

# big-integer powers make per-example timing noisy
settings.register_profile("diokex", deadline=None)
settings.load_profile("diokex")

TOY = RingSpec(2)


@pytest.fixture
def toy_rel():
    return Relation(poly_parse("x1^3 - x2^2 + 1", TOY))


@pytest.fixture
def rng():
    return random.Random(1234)


def polynomials(spec: RingSpec, max_terms=5, max_exp=3, coef=20):
    mono = st.tuples(*[st.integers(0, max_exp)] * spec.varcount)
    return st.dictionaries(mono, st.integers(-coef, coef), max_size=max_terms).map(
        lambda d: Polynomial(d, spec)
    )


def pivot_relations(spec: RingSpec, max_deg=4):
    """Relations whose leading monomial is monic and strictly largest."""

    @st.composite
    def build(draw):
        m = spec.varcount
        deg = draw(st.integers(1, max_deg))
        pivot = [0] * m
        for i in draw(st.lists(st.integers(0, m - 1), min_size=deg, max_size=deg)):
            pivot[i] += 1
        terms = {tuple(pivot): draw(st.sampled_from([1, -1]))}
        for _ in range(draw(st.integers(0, 4))):
            mono = [0] * m
            for i in draw(st.lists(st.integers(0, m - 1), max_size=deg - 1)):
                mono[i] += 1
            terms[tuple(mono)] = terms.get(tuple(mono), 0) + draw(st.integers(-9, 9))
        return Relation(Polynomial(terms, spec))

    return build()
