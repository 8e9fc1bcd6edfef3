"""The g7-valued parallelism form and the three Cartan-connection conditions."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from . import exterior as ext
from . import liealg
from .exterior import Form, LIFTED, change_basis, form_to_string, interior, wedge
from .reduce import FinalStructure, flat, p, rows_as_forms
from .scalar import Scalar

FORMS = ("lambdabar", "lambda") + LIFTED
PAIRING = dict(zip(FORMS, liealg.G7_LABELS))
FUNDAMENTAL = {"e_alpha": "lambda", "e_alphabar": "lambdabar"}
STAGE2 = ext.coframe_names("2")


@dataclass
class ConnectionForm:
    """``varpi = sum form_k * e_k`` together with the structure equations."""

    forms: dict            # name -> Form over (dabar, da) and the lifted coframe
    equations: dict        # name -> d(name) in the parallelism basis
    weights: list          # diagonal of the lifted-over-stage-2 matrix

    def names(self) -> tuple:
        return tuple(n for n in FORMS if n in self.forms)


def connection_form(final: FinalStructure) -> ConnectionForm:
    forms = {"lambda": final.connection, "lambdabar": final.connection.conjugate()}
    for n in LIFTED:
        forms[n] = Form.one(n)
    return ConnectionForm(forms, dict(final.equations), [final.stage.g[i][i] for i in range(5)])


def _over_stage2(w: ConnectionForm) -> dict:
    lifted = dict(zip(LIFTED, rows_as_forms(_diag(w.weights), STAGE2)))
    return {n: change_basis(f, lifted) for n, f in w.forms.items()}


def _diag(ws):
    z = Scalar()
    return [[ws[i] if i == j else z for j in range(5)] for i in range(5)]


def coefficient_matrix(w: ConnectionForm, names=None) -> list:
    cols = ("dabar", "da") + STAGE2
    exp = _over_stage2(w)
    return [[exp[n].coeff(c) for c in cols] for n in (names or w.names())]


@dataclass
class Check:
    ok: bool
    components: list = field(default_factory=list)   # (label, lhs, rhs, equal)
    note: str = ""

    def to_json(self) -> dict:
        return {"ok": self.ok, "note": self.note,
                "components": [{"component": c, "lhs": l, "rhs": r, "equal": e} for c, l, r, e in self.components]}


def check_condition_i(w: ConnectionForm, names=None) -> Check:
    """The forms are a pointwise basis: square triangular matrix, invertible diagonal."""
    names = tuple(names or w.names())
    m = coefficient_matrix(w, names)
    n = len(m)
    if n != 7:
        return Check(False, note=f"{n} forms for a 7-dimensional algebra")
    upper = all(not m[i][j] for i in range(n) for j in range(i))
    lower = all(not m[i][j] for i in range(n) for j in range(i + 1, n))
    diag = [m[i][i] for i in range(n)]
    comps = [(names[i], str(diag[i]), "invertible", bool(diag[i]) and diag[i].is_invertible_monomial())
             for i in range(n)]
    ok = (upper or lower) and all(c[3] for c in comps)
    return Check(ok, comps, "" if upper or lower else "coefficient matrix is not triangular")


def check_condition_ii(w: ConnectionForm) -> Check:
    """``lambda - da/a`` and its conjugate have no group differentials."""
    comps = []
    for name, dx, par in (("lambda", "da", p("a")), ("lambdabar", "dabar", p("a", True))):
        rest = w.forms[name] - Form.one(dx, par.inverse())
        bad = [m for m in rest.terms if any(ext.generation(s) == "group" for s in m)]
        comps.append((name, form_to_string(rest), "semibasic", not bad))
    return Check(all(c[3] for c in comps), comps)


def minus_ad(alg: liealg.LieAlgebra, e: str, w: ConnectionForm) -> dict:
    """Components of ``-ad_e o varpi`` indexed by the paired form names."""
    back = {v: k for k, v in PAIRING.items()}
    out = {n: Form(1) for n in FORMS}
    for n in FORMS:
        for target, c in liealg.bracket(alg, e, PAIRING[n]).items():
            out[back[target]] = out[back[target]] - Form.one(n, Scalar.const(c))
    return out


def check_condition_iii(w: ConnectionForm, alg: liealg.LieAlgebra | None = None) -> Check:
    """``e_dagger _| d varpi = -ad_e o varpi`` for both fundamental vectors."""
    alg = alg or liealg.g7()
    comps = []
    for e, dual in FUNDAMENTAL.items():
        rhs = minus_ad(alg, e, w)
        for n in FORMS:
            lhs = interior(dual, w.equations[n])
            comps.append((f"{e}: {n}", form_to_string(lhs), form_to_string(rhs[n]), lhs == rhs[n]))
    return Check(all(c[3] for c in comps), comps)


def interior_products(w: ConnectionForm, dual: str = "lambda") -> dict:
    return {n: interior(dual, w.equations[n]) for n in FORMS}


def curvature(w: ConnectionForm, alg: liealg.LieAlgebra | None = None) -> dict:
    """``d varpi + 1/2 [varpi, varpi]`` componentwise."""
    alg = alg or liealg.g7()
    back = {v: k for k, v in PAIRING.items()}
    out = {n: w.equations[n] for n in FORMS}
    for (i, j), val in alg.constants.items():
        x, y = back[alg.labels[i]], back[alg.labels[j]]
        for target, c in val.items():
            k = back[target]
            out[k] = out[k] + wedge(Form.one(x), Form.one(y)).scale(Scalar.const(c))
    return out


def flatten(f: Form) -> Form:
    return f.map_coeffs(flat)


def model_rename() -> dict:
    return dict(zip(FORMS, (liealg.G7_DUAL[PAIRING[n]] for n in FORMS)))


def flat_equations(w: ConnectionForm) -> dict:
    """Structure equations with every base function set to zero, renamed to the model coframe."""
    ren = model_rename()
    sub = {n: Form.one(ren[n]) for n in FORMS}
    return {ren[n]: change_basis(flatten(w.equations[n]), sub) for n in FORMS}


def certificate(final: FinalStructure, alg: liealg.LieAlgebra | None = None) -> dict:
    w = connection_form(final)
    alg = alg or liealg.g7()
    curv = curvature(w, alg)
    flat_ok = all(not flatten(f) for f in curv.values())
    model = liealg.model_structure()
    flat_eq = flat_equations(w)
    return {
        "condition_i": check_condition_i(w).to_json(),
        "condition_ii": check_condition_ii(w).to_json(),
        "condition_iii": check_condition_iii(w, alg).to_json(),
        "flat_curvature_vanishes": flat_ok,
        "flat_equations_match_model": all(flat_eq[k] == model[k] for k in model),
        "curvature": {n: form_to_string(f) for n, f in curv.items()},
    }
