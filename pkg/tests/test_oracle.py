"""Engine output evaluated on an explicit CR structure.

The symbolic engine treats A, B, P, Q, R as unconstrained; on an actual
structure they obey the frame's Jacobi relations.  These tests evaluate
engine expressions on a concrete perturbed cubic and confirm that
everything the symbolic normal form cannot discharge vanishes there.
"""
import itertools

import pytest
import sympy as sp
from hypothesis import given, strategies as st

from cr_oracle import ConcreteStructure
from crcartan.qi import QI
from crcartan.scalar import LETTERS, parse, reorder_derivations, reorder_leftmost
from crcartan.vecfield import z, zb
from strategies import BASE_NAMES

ZERO, I = QI(0), QI(0, 1)


def test_frame_relations(concrete):
    b = concrete.brackets
    nonzero = lambda k: {x: v.at_base() for x, v in b[k].items() if v.at_base()}
    assert nonzero(("L", "T")) == {"S": QI(1)}
    assert nonzero(("Lb", "T")) == {"Sb": QI(1)}
    assert nonzero(("L", "Lb")) == {"T": -I}


def test_bracket_table_conjugation(concrete):
    b = concrete.brackets
    assert b[("L", "Sb")]["Sb"].at_base() == concrete.functions["B"].conjugate().at_base()
    assert b[("S", "Sb")]["Sb"].at_base() == -concrete.functions["K"].conjugate().at_base()
    assert concrete.value(parse("A")) == concrete.value(parse("A")).conjugate()


def test_structure_is_generic(concrete):
    assert all(concrete.value(parse(n)) for n in ("B", "P", "Q", "R"))


@pytest.mark.parametrize("name", ["E", "F", "G", "J", "K"])
def test_secondary_functions(concrete, secondary, name):
    assert concrete.value(secondary.table[name]) == concrete.functions[name].at_base()


def test_j_real(concrete, secondary):
    j = concrete.value(secondary.table["J"])
    assert j == j.conjugate()


def test_d2_residuals_vanish(concrete, secondary):
    assert len(secondary.residuals) == 18
    for label, r in secondary.residuals:
        assert concrete.value(r) == ZERO, label


def test_confluence_length3(concrete):
    for w in itertools.product(LETTERS, repeat=3):
        d = reorder_derivations(w, "B") - reorder_leftmost(w, "B")
        assert concrete.value(d) == ZERO, w


@given(st.sampled_from(BASE_NAMES), st.booleans(),
       st.lists(st.sampled_from(LETTERS), min_size=1, max_size=3).map(tuple))
def test_confluence_random(concrete, name, conj, word):
    d = reorder_derivations(word, name, conj) - reorder_leftmost(word, name, conj)
    assert concrete.value(d) == ZERO


def test_oracle_on_flat_model():
    model = ConcreteStructure(sp.I * zb, sp.I * (2 * z * zb + zb**2), 2 * z * zb - zb**2)
    for name, f in model.functions.items():
        assert f.at_base() == ZERO, name
