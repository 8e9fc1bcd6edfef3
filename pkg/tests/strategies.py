"""Hypothesis strategies for scalars and forms."""
from hypothesis import strategies as st

from crcartan.exterior import Form
from crcartan.qi import QI
from crcartan.scalar import LETTERS, Scalar

BASE_NAMES = ("A", "B", "P", "Q", "R")

coeffs = st.builds(QI, st.integers(-3, 3), st.integers(-3, 3))
words = st.lists(st.sampled_from(LETTERS), max_size=2).map(tuple)


@st.composite
def group_factor(draw):
    name = draw(st.sampled_from("abcde"))
    lo = -2 if name == "a" else 0
    return Scalar.param(name, draw(st.booleans()), draw(st.integers(lo, 2)))


@st.composite
def base_factor(draw):
    return Scalar.sym(draw(st.sampled_from(BASE_NAMES)), draw(st.booleans()), draw(words))


@st.composite
def monomials(draw):
    out = Scalar.const(draw(coeffs))
    for f in draw(st.lists(st.one_of(group_factor(), base_factor()), max_size=3)):
        out = out * f
    return out


@st.composite
def scalars(draw, max_terms=3):
    out = Scalar()
    for m in draw(st.lists(monomials(), min_size=1, max_size=max_terms)):
        out = out + m
    return out


@st.composite
def forms(draw, names, degree, max_terms=2):
    out = Form(degree)
    for _ in range(draw(st.integers(1, max_terms))):
        mono = draw(st.lists(st.sampled_from(names), min_size=degree, max_size=degree, unique=True))
        out = out + Form.mono(mono, draw(scalars(max_terms=2)))
    return out
