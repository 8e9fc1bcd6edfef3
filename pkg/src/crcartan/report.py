"""Verification suites behind the command-line front end.

Every check produces an :class:`Entry` ``{check, status, payload,
golden_anchor?, diff?}``.  Status is ``pass``, ``fail`` or
``derived-only`` (a computed quantity with nothing printed to compare
against, or a printed display shown to be internally inconsistent).
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from importlib import resources
from pathlib import Path
from typing import Any, Callable

import sympy as sp

from . import cartan, goldens, liealg, linalg, reduce as red, render, vecfield as vf
from . import exterior as ext
from .exterior import LIFTED, Form, form_to_json
from .qi import QI
from .scalar import GROUP_NAMES, Scalar, parse, to_string

PASS, FAIL, DERIVED = "pass", "fail", "derived-only"
FORMATS = ("json", "latex")


class ConfigError(ValueError):
    pass


@dataclass
class Entry:
    check: str
    status: str
    payload: Any = None
    golden_anchor: str | None = None
    diff: Any = None

    def to_json(self) -> dict:
        out = {"check": self.check, "status": self.status, "payload": to_jsonable(self.payload)}
        if self.golden_anchor is not None:
            out["golden_anchor"] = self.golden_anchor
        if self.diff is not None:
            out["diff"] = to_jsonable(self.diff)
        return out


def to_jsonable(x):
    if isinstance(x, Form):
        return form_to_json(x)
    if isinstance(x, Scalar):
        return to_string(x)
    if isinstance(x, QI):
        return str(x)
    if isinstance(x, (Fraction, sp.Basic)):
        return str(x)
    if isinstance(x, dict):
        return {(k if isinstance(k, str) else "^".join(k) if isinstance(k, tuple) else str(k)): to_jsonable(v)
                for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    return x


def status_of(ok: bool) -> str:
    return PASS if ok else FAIL


@dataclass
class RunConfig:
    command: str
    fmt: str = "json"
    trace: bool = False
    flat: bool = False
    checks: tuple | None = None
    goldens: str | None = None
    algebra: str | None = None
    surface: str | None = None


class Context:
    """Lazily computed artifacts shared by the checks of one run."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self._algebra = None
        self._surface = None
        if cfg.algebra:
            try:
                self._algebra = liealg.load_json(Path(cfg.algebra).read_text(encoding="utf-8"))
            except (OSError, ValueError, KeyError, IndexError) as exc:
                raise ConfigError(f"cannot load algebra {cfg.algebra}: {exc}") from None
            if tuple(self._algebra.labels) != liealg.G7_LABELS:
                raise ConfigError(f"algebra labels must be {list(liealg.G7_LABELS)}")
            self._algebra = liealg.LieAlgebra(self._algebra.labels, self._algebra.constants,
                                              liealg.G7_CONJ, liealg.G7_DUAL)
        if cfg.surface:
            try:
                self._surface = vf.load_surface(Path(cfg.surface).read_text(encoding="utf-8"))
            except (OSError, ValueError, KeyError, sp.SympifyError) as exc:
                raise ConfigError(f"cannot load surface {cfg.surface}: {exc}") from None

    @property
    def algebra(self) -> liealg.LieAlgebra:
        return self._algebra or liealg.g7()

    @property
    def surface(self) -> vf.ModelSurface:
        return self._surface or vf.beloshapka_cubic()

    @cached_property
    def reduction(self) -> red.Reduction:
        return red.run_reduction()

    @cached_property
    def connection(self) -> cartan.ConnectionForm:
        return cartan.connection_form(self.reduction.final)

    @cached_property
    def secondary(self):
        return ext.derive_secondary_brackets()


# helpers ----------------------------------------------------------------
def debar(x: Scalar) -> Scalar:
    """Erase every conjugation mark (used to detect lost bars in a display)."""
    x = x.substitute_group({(n, True): red.p(n) for n in GROUP_NAMES})
    names = {atom[1] for m in x.terms for atom, _ in m if atom[0] == 1 and atom[2]}
    return x.substitute_symbols({(n, True): Scalar.sym(n) for n in names})


def golden_form(doc: dict, degree: int) -> Form:
    f = Form(degree)
    for key, c in doc.items():
        f = f + Form.mono(key.split("^"), parse(c))
    return f


def golden_matrix(rows) -> list:
    return [[parse(c) for c in row] for row in rows]


_LINEAR = re.compile(r"([+-]?)\s*(\d*)\s*\*?\s*([a-z]+\d+)")


def parse_linear(text: str) -> dict:
    """``"alpha1 + 2*alphabar1"`` -> ``{name: QI}``."""
    out = {}
    if text.strip() == "0":
        return out
    for sign, num, name in _LINEAR.findall(text):
        c = QI(int(num or 1) * (-1 if sign == "-" else 1))
        out[name] = out.get(name, QI(0)) + c
    return out


def sympy_qi(c) -> QI:
    c = sp.nsimplify(c)
    return QI(Fraction(str(sp.re(c))), Fraction(str(sp.im(c))))


def _anchor(key: str) -> str:
    return goldens.anchor(key)


# verify-model -----------------------------------------------------------
RANK_POINTS = (
    {},
    {"z": 1, "zb": 1},
    {"z": sp.I, "zb": -sp.I, "u1": 1},
    {"z": 1 + sp.I, "zb": 1 - sp.I, "u2": -2, "u3": sp.Rational(1, 2)},
    {"z": 2, "zb": 2, "u1": -1, "u2": 3, "u3": 5},
    {"z": sp.Rational(-1, 3) + 2 * sp.I, "zb": sp.Rational(-1, 3) - 2 * sp.I, "u1": 7},
)


def chk_model_frame(ctx):
    frame = vf.adapted_frame()
    printed = vf.printed_frame()
    bad = [k for k in printed if frame[k] != printed[k]]
    return Entry("model-frame", status_of(not bad),
                 {k: str(frame[k]) for k in ("L", "Lb", "T", "S", "Sb")},
                 _anchor("model-frame"), {k: {"computed": str(frame[k]), "printed": str(printed[k])} for k in bad} or None)


def chk_rank(ctx):
    frame = vf.adapted_frame()
    fields = [frame[k] for k in ("Sb", "S", "T", "Lb", "L")]
    ranks = [{"point": {k: str(v) for k, v in pt.items()}, "rank": vf.rank_at_point(fields, pt)}
             for pt in RANK_POINTS]
    return Entry("rank-5", status_of(all(r["rank"] == 5 for r in ranks)), ranks)


def chk_tangency(ctx):
    res = {k: vf.check_tangency(x, ctx.surface) for k, x in vf.automorphisms().items()}
    bad = [k for k, ok in res.items() if not ok]
    return Entry("tangency", status_of(not bad), res, diff=bad or None)


def chk_commutators(ctx):
    fields = vf.automorphisms()
    computed = vf.commutator_table(fields)
    table = liealg.aut_table()
    rows, bad = [], []
    for i, x in enumerate(liealg.AUT_LABELS):
        for y in liealg.AUT_LABELS[i + 1:]:
            got = {k: sympy_qi(c) for k, c in computed[(x, y)].items()}
            want = liealg.bracket(table, x, y)
            rows.append({"pair": [x, y], "bracket": liealg.vector_to_string(got)})
            if got != want:
                bad.append({"pair": [x, y], "computed": liealg.vector_to_string(got),
                            "printed": liealg.vector_to_string(want)})
    return Entry("commutator-table", status_of(not bad and len(rows) == 21), rows,
                 _anchor("aut-table"), bad or None)


def chk_n54(ctx):
    aut = liealg.aut_table()
    sub = liealg.SubalgebraTag(aut, ("S2", "S1", "T", "L2", "L1"))
    ok, witness = liealg.check_nilpotent_iso(sub, liealg.n54())
    payload = {k: f"{c}*{m}" for k, (c, m) in witness.items()} if ok else None
    return Entry("n54-isomorphism", status_of(ok and sub.is_closed()), payload, _anchor("n54"))


def chk_isotropy(ctx):
    van = vf.vanishing_at_origin(vf.automorphisms())
    sub = liealg.SubalgebraTag(liealg.aut_table(), ("D", "R"))
    ok = van == ["D", "R"] and sub.is_closed() and sub.is_abelian()
    return Entry("isotropy", status_of(ok), {"vanishing_at_origin": van, "closed": sub.is_closed(),
                                            "abelian": sub.is_abelian()})


def chk_ad_d(ctx):
    span = ("S2", "S1", "T", "L2", "L1")
    m = liealg.ad_matrix(liealg.aut_table(), "D", span)
    ad = liealg.triangular_eigenvalues(m)
    right = [-x for x in ad]                     # x -> [x, D]
    want = [QI(v) for v in goldens.value("ad-D-eigenvalues")]
    return Entry("ad-D-eigenvalues", status_of(right == want),
                 {"ad_D": [str(x) for x in ad], "x -> [x, D]": [str(x) for x in right]},
                 _anchor("ad-D-eigenvalues"))


def _jacobi(name, alg):
    res = liealg.jacobi_residual(alg)
    diff = [{"triple": list(t), "residual": liealg.vector_to_string(v)} for t, v in res]
    return Entry(name, status_of(not res), {"dim": alg.dim, "triples": len(alg.labels) * (len(alg.labels) - 1)
                                           * (len(alg.labels) - 2) // 6}, diff=diff or None)


def chk_jacobi_n54(ctx):
    return _jacobi("jacobi-n54", liealg.n54())


def chk_jacobi_aut(ctx):
    return _jacobi("jacobi-aut", liealg.aut_table())


def chk_jacobi_g7(ctx):
    return _jacobi("jacobi-g7", ctx.algebra)


def chk_g7_printed(ctx):
    printed = liealg.g7_printed_list()
    res = liealg.jacobi_residual(printed)
    diff = {"jacobi": [{"triple": list(t), "residual": liealg.vector_to_string(v)} for t, v in res],
            "against_structure_equations": [
                {"pair": list(p), "printed": liealg.vector_to_string(v), "from_structure_equations":
                 liealg.vector_to_string(u)} for p, v, u in
                ((p, v, u) for p, u, v in liealg.diff_tables(liealg.g7(), printed))]}
    return Entry("g7-printed-list", DERIVED, {"brackets": len(goldens.value("g7-brackets"))},
                 _anchor("g7-brackets"), diff if res or diff["against_structure_equations"] else None)


def chk_mc_duality(ctx):
    alg = ctx.algebra
    got = liealg.mc_equations(alg)
    want = {k: golden_form(v, 2) for k, v in goldens.value("model-equations").items()}
    bad = [k for k in want if got.get(k, Form(2)) != want[k]]
    dd = liealg.mc_d_squared(alg)
    diff = {k: {"computed": got.get(k), "printed": want[k]} for k in bad}
    if dd:
        diff["d_squared"] = dd
    return Entry("mc-duality", status_of(not bad and not dd), got, _anchor("model-equations"), diff or None)


# reduce -----------------------------------------------------------------
def chk_group_inverse(ctx):
    gi = red.invert_lower(red.build_group_matrix())
    restored = golden_matrix(goldens.value("group-inverse", restored=True))
    verbatim = golden_matrix(goldens.value("group-inverse"))
    diff = []
    for i in range(5):
        for j in range(5):
            if gi[i][j] != verbatim[i][j]:
                diff.append({"entry": [i + 1, j + 1], "computed": gi[i][j], "verbatim": verbatim[i][j],
                             "equal_without_bars": debar(gi[i][j]) == debar(verbatim[i][j])})
    ok = all(gi[i][j] == restored[i][j] for i in range(5) for j in range(5)) and \
        all(d["equal_without_bars"] for d in diff)
    return Entry("group-inverse", status_of(ok), [[gi[i][j] for j in range(5)] for i in range(5)],
                 _anchor("group-inverse"), diff or None)


def chk_mc_pattern(ctx):
    pat = ctx.reduction.first.mc.pattern
    want = goldens.value("mc-pattern")
    bad = []
    for i in range(5):
        for j in range(5):
            w = parse_linear(want[i][j])
            g = pat.get((i, j), {})
            if {k: v for k, v in g.items() if v} != w:
                bad.append({"entry": [i + 1, j + 1], "computed": liealg.vector_to_string(g), "printed": want[i][j]})
    return Entry("mc-pattern", status_of(not bad), {f"{i + 1},{j + 1}": liealg.vector_to_string(v)
                                                    for (i, j), v in sorted(pat.items())},
                 _anchor("mc-pattern"), bad or None)


def _mc_form(ctx, key, name, loop):
    mc = getattr(ctx.reduction, loop).mc
    got = mc.forms[name]
    want = golden_form(goldens.value(key, restored=True), 1)
    diff = None
    if "restored" in goldens.entry(key):
        verb = golden_form(goldens.value(key), 1)
        if verb != got:
            same = verb.map_coeffs(debar) == got.map_coeffs(debar)
            diff = {"verbatim": verb, "equal_without_bars": same}
            if not same:
                return Entry(key, FAIL, got, _anchor(key), diff)
    return Entry(key, status_of(got == want), got, _anchor(key), diff)


def chk_alpha1(ctx):
    return _mc_form(ctx, "alpha1", "alpha1", "first")


def chk_alpha2(ctx):
    return _mc_form(ctx, "alpha2", "alpha2", "first")


TORSION_SLOTS = {
    "torsion-X2": ("sigma", "sigmabar", "rho", False),
    "torsion-X3": ("sigma", "sigmabar", "zetabar", False),
    "torsion-X4": ("sigma", "sigmabar", "zeta", False),
    "torsion-X6": ("sigma", "sigma", "zetabar", False),
    "torsion-X7": ("sigma", "sigma", "zeta", False),
    "torsion-Y8bar": ("rho", "rho", "zetabar", True),
}


def _torsion_check(key):
    def run(ctx):
        form, x, y, conj = TORSION_SLOTS[key]
        c = ctx.reduction.first.torsion.coeff(form, x, y)
        c = c.conjugate() if conj else c
        want = parse(goldens.value(key))
        return Entry(key, status_of(c == want), {"form": form, "monomial": [x, y], "coefficient": c},
                     _anchor(key), None if c == want else {"printed": want, "difference": c - want})
    return run


def chk_essential(ctx):
    ab = ctx.reduction.first.absorption
    res = {k: ab.is_essential(ab.vector(v)) for k, v in red.ESSENTIAL_VECTORS.items()}
    combo = ab.evaluate(ab.vector(red.ESSENTIAL_VECTORS["X6bar+X7-3Y8bar"]))
    ok = all(res.values()) and ctx.reduction.first.checks["invariant combination"]
    return Entry("essential-torsion", status_of(ok), {"cokernel_dimension": len(ab.cokernel), "essential": res,
                                                      "X6bar+X7-3Y8bar": combo})


def _full_sub(sol: dict) -> dict:
    out = dict(sol)
    for (n, conj), v in sol.items():
        out.setdefault((n, not conj), v.conjugate())
    return out


def _normalization_check(name):
    key = f"normalization-{name}"

    def run(ctx):
        r = ctx.reduction
        loop = r.second if name == "e" else r.first
        engine = loop.normalization[(name, False)]
        if name == "e":
            targets = {"conj(Y'4)": r.second.torsion.coeff("rho", "sigmabar", "zeta").conjugate()}
        else:
            targets = red.essential_targets(r.first.torsion)
        sub = _full_sub(loop.normalization)
        left = {k: t.substitute_group(sub) for k, t in targets.items()}
        annihilates = all(not v for v in left.values())
        payload = {"value": engine, "targets_after_substitution": left}
        if name == "e":
            cof = engine * red.p("a").inverse()
            ok = annihilates and cof.group_free()
            payload["e/a"] = cof
            return Entry(key, status_of(ok), payload, _anchor(key))
        printed = parse(goldens.value(key))
        if printed == engine:
            return Entry(key, status_of(annihilates), payload, _anchor(key))
        # substitute the printed value in place of the engine one
        alt = dict(sub)
        alt[(name, False)], alt[(name, True)] = printed, printed.conjugate()
        residue = {k: t.substitute_group(alt) for k, t in targets.items()}
        inconsistent = any(residue.values())
        diff = {"printed": printed, "engine_minus_printed": engine - printed,
                "targets_with_printed_value": residue}
        return Entry(key, DERIVED if annihilates and inconsistent else FAIL, payload, _anchor(key), diff)
    return run


def chk_second_zero(ctx):
    rep = ctx.reduction.second.torsion
    x2, x4 = rep.coeff("sigma", "sigmabar", "rho"), rep.coeff("sigma", "sigmabar", "zeta")
    return Entry("second-loop-X2-X4", status_of(not x2 and not x4), {"X'2": x2, "X'4": x4})


def chk_beta1(ctx):
    return _mc_form(ctx, "beta1", "beta1", "second")


def chk_beta2(ctx):
    return _mc_form(ctx, "beta2", "beta2", "second")


def chk_y4(ctx):
    s = ctx.reduction.second
    y4 = s.torsion.coeff("rho", "sigmabar", "zeta")
    want = parse(goldens.value("second-loop-Y4")).substitute_symbols({("T", False): s.t_rho1})
    ess = s.checks["Y'4 essential"]
    return Entry("second-loop-Y4", status_of(y4 == want and ess),
                 {"Y'4": y4, "T^rho1_(sigmabar1,zeta1)": s.t_rho1, "essential": ess}, _anchor("second-loop-Y4"))


def chk_y8(ctx):
    rep = ctx.reduction.second.torsion
    x6, x7 = rep.coeff("sigma", "sigma", "zetabar"), rep.coeff("sigma", "sigma", "zeta")
    expr = parse(goldens.value("second-loop-Y8"))
    want = expr.substitute_symbols({("X6", False): x6, ("X7", True): x7.conjugate()})
    got, got_c = rep.coeff("rho", "rho", "zetabar"), rep.coeff("rho", "rho", "zeta")
    ok = got == want and got_c == want.conjugate()
    return Entry("second-loop-Y8", status_of(ok), {"rho^zetabar": got, "rho^zeta": got_c}, _anchor("second-loop-Y8"))


def chk_dsigma(ctx):
    got = ctx.reduction.final.equations["sigma"]
    want = golden_form(goldens.value("final-dsigma"), 2)
    return Entry("final-dsigma", status_of(got == want), got, _anchor("final-dsigma"),
                 None if got == want else {"difference": got - want})


def _weights_hold(form: Form, weights: dict):
    bad = []
    for key, (wa, wb) in weights.items():
        c = form.coeff(*key.split("^"))
        if red.factor_weight(c, (wa, wb)) is None:
            bad.append(key)
    return bad


def chk_drho(ctx):
    eq = ctx.reduction.final.equations["rho"]
    doc = goldens.value("final-drho-shape")
    exact = {k: v for k, v in doc.items() if k != "weights"}
    exact_bad = [k for k, v in exact.items() if eq.coeff(*k.split("^")) != parse(v)]
    weight_bad = _weights_hold(eq, doc["weights"])
    shown = set(exact) | set(doc["weights"])
    extra = {"^".join(m): c for m, c in eq.sorted_terms() if "^".join(m) not in shown}
    empty = sorted(k for k in doc["weights"] if not eq.coeff(*k.split("^")))
    diff = None
    if extra or empty:
        diff = {"unprinted_nonzero": extra, "printed_but_zero": empty,
                "real": red.is_real_equation(ctx.reduction.final, "rho")}
    ok = not exact_bad and not weight_bad
    status = FAIL if not ok else DERIVED if diff else PASS
    return Entry("final-drho", status, eq, _anchor("final-drho-shape"), diff)


def chk_dzeta(ctx):
    eq = ctx.reduction.final.equations["zeta"]
    weights = goldens.value("final-dzeta-weights")
    bad = _weights_hold(eq, weights)
    lam_ok = eq.coeff("lambda", "zeta") == Scalar.const(1) and not eq.coeff("lambdabar", "zeta")
    zero = sorted(k for k in weights if not eq.coeff(*k.split("^")))
    diff = {}
    if bad:
        diff["weight_mismatch"] = bad
    if zero:
        diff["printed_but_zero"] = zero
    status = FAIL if bad or not lam_ok else DERIVED if zero else PASS
    return Entry("final-dzeta", status, eq, _anchor("final-dzeta-weights"), diff or None)


def chk_weights(ctx):
    res = red.torsion_weights_ok(ctx.reduction.final)
    return Entry("final-weights", status_of(res["ok"]), {"checked": ["lambda"] + list(LIFTED)},
                 diff=[list(b) for b in res["bad"]] or None)


def chk_dlambda(ctx):
    f = ctx.reduction.final.equations["lambda"]
    bad = sorted({s for m in f.terms for s in m if ext.generation(s) in ("group", "connection")})
    return Entry("dlambda-semibasic", status_of(not bad), f, diff=bad or None)


def chk_final_checks(ctx):
    ch = ctx.reduction.final.checks
    return Entry("final-absorption", status_of(all(ch.values())), ch,
                 diff=[k for k, v in ch.items() if not v] or None)


def chk_flat_equations(ctx):
    got = cartan.flat_equations(ctx.connection)
    want = {k: golden_form(v, 2) for k, v in goldens.value("model-equations").items()}
    bad = [k for k in want if got[k] != want[k]]
    return Entry("flat-equations", status_of(not bad), got, _anchor("model-equations"),
                 {k: {"computed": got[k], "printed": want[k]} for k in bad} or None)


def chk_drho_real(ctx):
    return Entry("drho-real", status_of(red.is_real_equation(ctx.reduction.final, "rho")), None)


def chk_equations(ctx):
    eq = ctx.reduction.final.equations
    if ctx.cfg.flat:
        return Entry("equations", DERIVED, cartan.flat_equations(ctx.connection))
    return Entry("equations", DERIVED, {n: eq[n] for n in cartan.FORMS})


def chk_connection(ctx):
    return Entry("connection", DERIVED, {"lambda": ctx.reduction.final.connection,
                                         "lambdabar": ctx.reduction.final.connection.conjugate()})


def chk_invariants(ctx):
    table = red.invariant_table(ctx.reduction.final)
    return Entry("invariants", DERIVED, [v.to_json() for v in table.values()])


# derive-secondary -------------------------------------------------------
def _secondary_check(name):
    def run(ctx):
        got = ctx.secondary.table[name]
        want = parse(goldens.value("secondary")[name])
        return Entry(f"secondary-{name}", status_of(got == want), got, _anchor("secondary"),
                     None if got == want else {"printed": want})
    return run


def chk_secondary_jk(ctx):
    t = ctx.secondary.table
    return Entry("secondary-J-K", DERIVED, {"J": t["J"], "K": t["K"]})


def _relation_span(residuals) -> list:
    """The residual relations together with their conjugates."""
    return [c for _, c in residuals] + [c.conjugate() for _, c in residuals]


def _combination(target: Scalar, rels: list):
    keys = sorted({m for r in rels + [target] for m in r.terms}, key=repr)
    rows = [[r.terms.get(k, QI(0)) for k in keys] for r in rels]
    vec = [target.terms.get(k, QI(0)) for k in keys]
    return linalg.in_row_space(vec, rows)


def chk_j_real(ctx):
    j = ctx.secondary.table["J"]
    d = j.conjugate() - j
    return Entry("J-real", status_of(not d), {"J": j}, diff=None if not d else {"conj(J) - J": d})


def chk_j_real_mod(ctx):
    j = ctx.secondary.table["J"]
    d = j.conjugate() - j
    ok = not d or _combination(d, _relation_span(ctx.secondary.residuals))
    return Entry("J-real-modulo-relations", status_of(ok),
                 {"conj(J) - J": d, "relations": len(ctx.secondary.residuals)})


def chk_d2(ctx):
    res = ctx.secondary.residuals
    diff = [{"component": list(label), "residual": c} for label, c in res]
    return Entry("d2-vanishes", status_of(not res), {"residual_components": len(res)}, diff=diff or None)


# cartan-check -----------------------------------------------------------
def _condition(name, fn):
    def run(ctx):
        c = fn(ctx)
        bad = [comp for comp in c.to_json()["components"] if not comp["equal"]]
        return Entry(name, status_of(c.ok), c.to_json(), diff=bad or ([c.note] if c.note and not c.ok else None))
    return run


def chk_interior(ctx):
    got = cartan.interior_products(ctx.connection)
    want = {k: golden_form(v, 1) for k, v in goldens.value("interior-products").items()}
    bad = [k for k in want if got[k] != want[k]]
    return Entry("interior-products", status_of(not bad), got, _anchor("interior-products"),
                 {k: {"computed": got[k], "printed": want[k]} for k in bad} or None)


def chk_flat_curvature(ctx):
    curv = cartan.curvature(ctx.connection, ctx.algebra)
    flat = {n: cartan.flatten(f) for n, f in curv.items()}
    bad = [n for n, f in flat.items() if f]
    return Entry("flat-curvature", status_of(not bad), {"forms": list(flat)}, diff={n: flat[n] for n in bad} or None)


def chk_curvature(ctx):
    curv = cartan.curvature(ctx.connection, ctx.algebra)
    if ctx.cfg.flat:
        curv = {n: cartan.flatten(f) for n, f in curv.items()}
    return Entry("curvature", DERIVED, curv)


SUITES: dict[str, dict[str, Callable]] = {
    "verify-model": {
        "model-frame": chk_model_frame,
        "rank-5": chk_rank,
        "tangency": chk_tangency,
        "commutator-table": chk_commutators,
        "n54-isomorphism": chk_n54,
        "isotropy": chk_isotropy,
        "ad-D-eigenvalues": chk_ad_d,
        "jacobi-n54": chk_jacobi_n54,
        "jacobi-aut": chk_jacobi_aut,
        "jacobi-g7": chk_jacobi_g7,
        "g7-printed-list": chk_g7_printed,
        "mc-duality": chk_mc_duality,
    },
    "reduce": {
        "group-inverse": chk_group_inverse,
        "mc-pattern": chk_mc_pattern,
        "alpha1": chk_alpha1,
        "alpha2": chk_alpha2,
        **{k: _torsion_check(k) for k in TORSION_SLOTS},
        "essential-torsion": chk_essential,
        **{f"normalization-{n}": _normalization_check(n) for n in "bcd"},
        "second-loop-X2-X4": chk_second_zero,
        "beta1": chk_beta1,
        "beta2": chk_beta2,
        "second-loop-Y4": chk_y4,
        "second-loop-Y8": chk_y8,
        "normalization-e": _normalization_check("e"),
        "final-absorption": chk_final_checks,
        "final-dsigma": chk_dsigma,
        "final-drho": chk_drho,
        "final-dzeta": chk_dzeta,
        "final-weights": chk_weights,
        "dlambda-semibasic": chk_dlambda,
        "drho-real": chk_drho_real,
        "flat-equations": chk_flat_equations,
        "equations": chk_equations,
        "invariants": chk_invariants,
    },
    "derive-secondary": {
        **{f"secondary-{n}": _secondary_check(n) for n in "EFG"},
        "secondary-J-K": chk_secondary_jk,
        "J-real": chk_j_real,
        "J-real-modulo-relations": chk_j_real_mod,
        "d2-vanishes": chk_d2,
    },
    "cartan-check": {
        "condition-i": _condition("condition-i", lambda c: cartan.check_condition_i(c.connection)),
        "condition-ii": _condition("condition-ii", lambda c: cartan.check_condition_ii(c.connection)),
        "condition-iii": _condition("condition-iii", lambda c: cartan.check_condition_iii(c.connection, c.algebra)),
        "interior-products": chk_interior,
        "flat-curvature": chk_flat_curvature,
        "drho-real": chk_drho_real,
        "curvature": chk_curvature,
    },
    "emit": {
        "equations": chk_equations,
        "connection": chk_connection,
        "invariants": chk_invariants,
    },
}


def select(cfg: RunConfig) -> list:
    if cfg.command not in SUITES:
        raise ConfigError(f"unknown command {cfg.command!r}")
    if cfg.fmt not in FORMATS:
        raise ConfigError(f"unknown format {cfg.fmt!r}")
    suite = SUITES[cfg.command]
    if cfg.checks is None:
        return list(suite)
    unknown = [c for c in cfg.checks if c not in suite]
    if unknown:
        raise ConfigError(f"unknown check(s) for {cfg.command}: {', '.join(unknown)}; "
                          f"available: {', '.join(suite)}")
    return list(dict.fromkeys(cfg.checks))


def trace_records(r: red.Reduction) -> list:
    out = []
    for stage, eqs in (("initial", r.first.torsion.full), ("second", r.second.torsion.full),
                       ("final", r.final.equations)):
        for name in cartan.FORMS:
            if name not in eqs:
                continue
            for m, c in eqs[name].sorted_terms():
                out.append({"stage": stage, "form": name, "monomial": list(m), "coefficient": to_string(c)})
    return out


def run(cfg: RunConfig) -> tuple[dict, int]:
    """Validate the configuration, run the selected checks, return (document, exit code)."""
    names = select(cfg)
    if cfg.goldens:
        if not Path(cfg.goldens).is_file():
            raise ConfigError(f"no such goldens file {cfg.goldens}")
        goldens.use_file(cfg.goldens)
        try:
            goldens.keys()
        except (ValueError, KeyError) as exc:
            goldens.use_file(None)
            raise ConfigError(f"unreadable goldens file: {exc}") from None
    try:
        ctx = Context(cfg)
        entries = []
        for n in names:
            try:
                entries.append(SUITES[cfg.command][n](ctx))
            except goldens.GoldenError as exc:
                raise ConfigError(str(exc)) from None
        doc = {"command": cfg.command, "flat": cfg.flat,
               "reports": [e.to_json() for e in entries]}
        doc["status"] = FAIL if any(e.status == FAIL for e in entries) else PASS
        if cfg.trace and cfg.command in ("reduce", "emit", "cartan-check"):
            doc["trace"] = trace_records(ctx.reduction)
        doc["_entries"] = entries
        return doc, 1 if doc["status"] == FAIL else 0
    finally:
        if cfg.goldens:
            goldens.use_file(None)


def report_schema() -> dict:
    """JSON schema that every ``--format json`` document satisfies."""
    return json.loads(resources.files("crcartan").joinpath("data/report.schema.json").read_text(encoding="utf-8"))


def dumps_json(doc: dict) -> str:
    return json.dumps({k: v for k, v in doc.items() if k != "_entries"}, indent=2, ensure_ascii=False) + "\n"


def dumps_latex(doc: dict) -> str:
    lines = [f"% command: {doc['command']}  status: {doc['status']}"]
    for e in doc["_entries"]:
        lines.append(f"% [{e.status}] {e.check}")
        if e.golden_anchor:
            lines.append(f"% anchor: {e.golden_anchor}")
        lines.extend(_latex_payload(e.payload))
        if e.diff is not None:
            lines.append("% diff: " + json.dumps(to_jsonable(e.diff), ensure_ascii=False))
    return "\n".join(lines) + "\n"


def _latex_payload(x) -> list:
    if isinstance(x, Form):
        return [r"\begin{equation*}", render.form_latex(x), r"\end{equation*}"]
    if isinstance(x, Scalar):
        return [r"\begin{equation*}", render.scalar_latex(x), r"\end{equation*}"]
    if isinstance(x, dict) and x and all(isinstance(v, Form) for v in x.values()):
        body = [render.equation_latex(k, v) + r" \\" if v.degree == 2 else
                f"{render.symbol_latex(k)} &= {render.form_latex(v)} \\\\" for k, v in x.items()]
        return [r"\begin{align*}"] + body + [r"\end{align*}"]
    if isinstance(x, dict) and x and all(isinstance(v, Scalar) for v in x.values()):
        return [r"\begin{align*}"] + [f"{k} &= {render.scalar_latex(v)} \\\\" for k, v in x.items()] + [r"\end{align*}"]
    if x is None:
        return []
    return ["% " + json.dumps(to_jsonable(x), ensure_ascii=False)]
