import pytest

from crcartan import cartan, liealg
from crcartan.exterior import Form, conj_symbol
from crcartan.qi import QI

G7 = liealg.g7()


def perturbed(pair, target, delta):
    consts = {k: dict(v) for k, v in G7.constants.items()}
    i, j = (G7.labels.index(x) for x in pair)
    row = consts.setdefault((i, j), {})
    row[target] = row.get(target, QI(0)) + delta
    return liealg.LieAlgebra(G7.labels, consts, G7.conjugation, G7.dual)


def test_condition_i(connection):
    assert cartan.check_condition_i(connection).ok


def test_condition_ii(connection):
    assert cartan.check_condition_ii(connection).ok


def test_condition_iii(connection):
    c = cartan.check_condition_iii(connection)
    assert c.ok and len(c.components) == 14


def test_condition_iii_conjugation_equivariant(connection):
    for n in cartan.FORMS:
        lhs = cartan.interior("lambda", connection.equations[n])
        lhs_bar = cartan.interior("lambdabar", connection.equations[conj_symbol(n)])
        assert lhs_bar == lhs.conjugate(), n


def test_interior_products(connection):
    got = cartan.interior_products(connection)
    want = {"sigma": Form.one("sigma", 2), "rho": Form.one("rho"), "zeta": Form.one("zeta"),
            "sigmabar": Form.one("sigmabar")}
    for n in cartan.FORMS:
        assert got[n] == want.get(n, Form(1)), n


@pytest.mark.parametrize("pair,target,component", [
    (("e_alpha", "e_sigma"), "e_sigma", "e_alpha: sigma"),
    (("e_alphabar", "e_zetabar"), "e_zetabar", "e_alphabar: zetabar"),
    (("e_alphabar", "e_alpha"), "e_rho", ["e_alpha: rho", "e_alphabar: rho"]),
])
def test_perturbed_g7_fails_matching_component(connection, pair, target, component):
    alg = perturbed(pair, target, QI(1))
    bad = [label for label, *_, eq in cartan.check_condition_iii(connection, alg).components if not eq]
    assert bad == (component if isinstance(component, list) else [component])


def test_perturbation_away_from_fundamental_caught_by_curvature(connection):
    alg = perturbed(("e_sigma", "e_rho"), "e_sigma", QI(1))
    assert cartan.check_condition_iii(connection, alg).ok
    curv = cartan.curvature(connection, alg)
    assert any(cartan.flatten(f) for f in curv.values())


def test_flat_curvature(connection):
    curv = cartan.curvature(connection)
    assert all(not cartan.flatten(f) for f in curv.values())


def test_flat_equations_match_model(connection):
    model = liealg.model_structure()
    flat = cartan.flat_equations(connection)
    assert set(flat) == set(model)
    for k in model:
        assert flat[k] == model[k], k


def test_curvature_is_semibasic(connection):
    for n, f in cartan.curvature(connection).items():
        assert not any(s in ("lambda", "lambdabar") for m in f.terms for s in m), n


def test_certificate(reduction):
    cert = cartan.certificate(reduction.final)
    assert cert["condition_i"]["ok"] and cert["condition_ii"]["ok"] and cert["condition_iii"]["ok"]
    assert cert["flat_curvature_vanishes"] and cert["flat_equations_match_model"]
