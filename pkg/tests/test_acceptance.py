"""One line per acceptance criterion.

Every comparison is exact equality of canonical forms over Q(i); no
numerical tolerance is involved anywhere.  Each criterion aggregates its
sub-checks and prints ``[PASS]`` or ``[FAIL]`` with the failing names.
Run directly (``python3 tests/test_acceptance.py``) or through pytest,
which repeats the lines in the terminal summary.
"""
import itertools
import sys

import pytest
from hypothesis import given, strategies as st

from conftest import ACCEPTANCE
from crcartan import exterior as ext
from crcartan import reduce as red
from crcartan.exterior import BASE, LIFTED, Form, change_basis, exterior_d, wedge
from crcartan.report import RANK_POINTS, SUITES, Context, RunConfig
from crcartan.scalar import LETTERS, Scalar, parse, printed_secondary_table, reorder_derivations, reorder_leftmost
from strategies import forms, scalars

TOLERANCE = "exact"


@pytest.fixture(scope="module")
def ctx(reduction, secondary):
    c = Context(RunConfig("reduce"))
    c.__dict__["reduction"] = reduction
    c.__dict__["secondary"] = secondary
    return c


def status(ctx, suite, check):
    return SUITES[suite][check](ctx)


def record(n, title, results):
    bad = [k for k, ok in results.items() if not ok]
    line = f"[{'FAIL' if bad else 'PASS'}] criterion {n}: {title} ({len(results) - len(bad)}/{len(results)}, {TOLERANCE})"
    if bad:
        line += " failing: " + ", ".join(bad)
    ACCEPTANCE[n] = line
    print(line)
    assert not bad, line


def passes(ctx, suite, *checks):
    return {c: status(ctx, suite, c).status == "pass" for c in checks}


def flagged(ctx, suite, check):
    """Printed display proven inconsistent: reported as derived-only with a diff."""
    e = status(ctx, suite, check)
    return e.status == "derived-only" and e.diff is not None


def test_criterion_1_model(ctx):
    res = passes(ctx, "verify-model", "commutator-table", "model-frame", "rank-5", "isotropy",
                 "n54-isomorphism", "tangency")
    res["rank points >= 5 incl. origin"] = len(RANK_POINTS) >= 5 and any(
        all(v == 0 for v in p.values()) for p in RANK_POINTS)
    record(1, "model suite", res)


def test_criterion_2_integrability(ctx, secondary):
    res = passes(ctx, "verify-model", "jacobi-n54", "jacobi-g7")
    table = dict(printed_secondary_table())
    table.update({k: secondary.table[k] for k in "JK"})
    res["d2 of Darboux structure vanishes"] = ext.check_d2(ext.darboux_structure(), table, symbols=BASE) == {}
    j = secondary.table["J"]
    res["J = conjugate(J)"] = j.conjugate() == j
    record(2, "Jacobi and d^2 integrability", res)


def test_criterion_3_reduction(ctx, reduction):
    res = passes(ctx, "reduce", "group-inverse", "mc-pattern", "alpha1", "alpha2",
                 *(f"torsion-{k}" for k in ("X2", "X3", "X4", "X6", "X7", "Y8bar")),
                 "essential-torsion", "normalization-b", "normalization-c", "normalization-e")
    targets = red.essential_targets(reduction.first.torsion)
    for k in ("X2", "X4", "X6bar+X7-3Y8bar"):
        res[f"normalizations annihilate {k}"] = not targets[k].substitute_group(reduction.first.normalization)
    res["normalization-d diff reported and flagged"] = flagged(ctx, "reduce", "normalization-d")
    record(3, "reduction goldens", res)


def test_criterion_4_second_loop(ctx):
    res = passes(ctx, "reduce", "second-loop-X2-X4", "beta1", "beta2", "second-loop-Y4", "second-loop-Y8")
    record(4, "second loop", res)


def test_criterion_5_final(ctx):
    res = passes(ctx, "reduce", "final-absorption", "final-dsigma", "final-weights", "dlambda-semibasic",
                 "drho-real", "flat-equations")
    res["final-drho display flagged"] = flagged(ctx, "reduce", "final-drho")
    res["final-dzeta display flagged"] = flagged(ctx, "reduce", "final-dzeta")
    record(5, "final {e}-structure", res)


def test_criterion_6_cartan(ctx):
    res = passes(ctx, "cartan-check", "condition-i", "condition-ii", "condition-iii",
                 "interior-products", "flat-curvature")
    comps = status(ctx, "cartan-check", "condition-iii").payload["components"]
    res["14 componentwise checks"] = len(comps) == 14 and all(c["equal"] for c in comps)
    record(6, "Cartan connection", res)


def _holds(prop) -> bool:
    try:
        prop()
    except AssertionError:
        return False
    return True


def test_criterion_7_properties(reduction):
    rules = ext.darboux_structure()
    names = BASE + ("da", "dabar")

    @given(scalars())
    def idempotence(x):
        assert parse(str(x)) == x

    @given(scalars(), scalars())
    def involution(x, y):
        assert x.conjugate().conjugate() == x
        assert (x * y).conjugate() == x.conjugate() * y.conjugate()

    @given(scalars(), scalars(), st.sampled_from(LETTERS))
    def leibniz(x, y, letter):
        assert (x * y).derive(letter) == x.derive(letter) * y + x * y.derive(letter)

    @given(forms(names, 1), forms(names, 1))
    def antiderivation(x, y):
        assert exterior_d(wedge(x, y), rules) == wedge(exterior_d(x, rules), y) - wedge(x, exterior_d(y, rules))

    @given(forms(names, 1), forms(names, 2))
    def graded(x, y):
        assert wedge(x, y) == wedge(y, x)
        assert wedge(x, x) == Form(2)

    stages = [reduction.first.stage, reduction.second.stage, reduction.final.stage]

    @given(st.integers(0, 2), st.lists(scalars(max_terms=2), min_size=5, max_size=5))
    def round_trip(k, coeffs):
        stage = stages[k]
        back = stage.lifted_in_base()
        x0 = change_basis(sum((Form.one(n, c) for n, c in zip(LIFTED, coeffs)), Form(1)), back)
        assert change_basis(stage.d(x0), back) == exterior_d(x0, stage.rules)

    res = {name: _holds(f) for name, f in (("normal-form idempotence", idempotence), ("involution", involution),
                                           ("Leibniz", leibniz), ("antiderivation", antiderivation),
                                           ("graded anticommutativity", graded), ("round trip", round_trip))}
    words = [w for n in range(1, 5) for w in itertools.product(LETTERS, repeat=n)]
    res["confluence, all words of length <= 4"] = all(
        reorder_derivations(w, s) == reorder_leftmost(w, s) for s in ("A", "B") for w in words)
    record(7, "property suites", res)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
