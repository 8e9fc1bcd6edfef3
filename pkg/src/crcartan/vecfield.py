"""Polynomial vector fields with Gaussian-rational coefficients."""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping, Sequence

import sympy as sp

z, zb = sp.symbols("z zb")
u1, u2, u3 = sp.symbols("u1 u2 u3")
w1, w2, w3 = sp.symbols("w1 w2 w3")
REAL_CHART = (z, zb, u1, u2, u3)
HOLO_CHART = (z, w1, w2, w3)
I = sp.I


class VectorFieldError(ValueError):
    pass


def conj_expr(e):
    """Complex conjugate on the real chart: z <-> zb, u real, constants conjugated."""
    return sp.expand(sp.sympify(e).xreplace({z: zb, zb: z, I: -I}))


@dataclass(frozen=True)
class PolyVectorField:
    chart: tuple
    components: tuple      # one polynomial per chart coordinate

    @staticmethod
    def make(chart: Sequence, comps: Mapping) -> "PolyVectorField":
        chart = tuple(chart)
        names = {str(c): c for c in chart}
        out = []
        for c in chart:
            e = sp.expand(sp.sympify(comps.get(c, comps.get(str(c), 0))))
            if not e.is_polynomial(*chart) or e.free_symbols - set(chart):
                raise VectorFieldError(f"component along {c} is not a polynomial in the chart")
            out.append(e)
        for k in comps:
            if str(k) not in names:
                raise VectorFieldError(f"{k} is not a coordinate of the chart")
        return PolyVectorField(chart, tuple(out))

    def __call__(self, f):
        return sp.expand(sum(c * sp.diff(f, x) for c, x in zip(self.components, self.chart)))

    def __add__(self, other):
        _same_chart(self, other)
        return PolyVectorField(self.chart, tuple(sp.expand(a + b) for a, b in zip(self.components, other.components)))

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        return PolyVectorField(self.chart, tuple(sp.expand(c * a) for a in self.components))

    def is_zero(self) -> bool:
        return all(a == 0 for a in self.components)

    def at(self, point: Mapping) -> list:
        sub = {x: sp.nsimplify(point.get(x, point.get(str(x), 0))) for x in self.chart}
        return [sp.expand(a.xreplace(sub)) for a in self.components]

    def conjugate(self) -> "PolyVectorField":
        """Conjugate field on the real chart."""
        if self.chart != REAL_CHART:
            raise VectorFieldError("conjugation is defined on the real chart")
        c = dict(zip(self.chart, self.components))
        return PolyVectorField.make(REAL_CHART, {z: conj_expr(c[zb]), zb: conj_expr(c[z]),
                                                 u1: conj_expr(c[u1]), u2: conj_expr(c[u2]),
                                                 u3: conj_expr(c[u3])})

    def __eq__(self, other):
        return isinstance(other, PolyVectorField) and self.chart == other.chart and \
            all(sp.expand(a - b) == 0 for a, b in zip(self.components, other.components))

    def __hash__(self):
        return hash((self.chart, self.components))

    def __str__(self):
        parts = [f"({a})*d/d{x}" for a, x in zip(self.components, self.chart) if a != 0]
        return " + ".join(parts) or "0"


def _same_chart(x: PolyVectorField, y: PolyVectorField):
    if x.chart != y.chart:
        raise VectorFieldError("vector fields live on different charts")


def lie_bracket(x: PolyVectorField, y: PolyVectorField) -> PolyVectorField:
    _same_chart(x, y)
    return PolyVectorField(x.chart, tuple(sp.expand(x(b) - y(a)) for a, b in zip(x.components, y.components)))


def rank_at_point(fields: Sequence[PolyVectorField], point: Mapping) -> int:
    if not fields:
        return 0
    for f in fields[1:]:
        _same_chart(fields[0], f)
    return sp.Matrix([f.at(point) for f in fields]).rank(simplify=True)


def _coefficient_rows(f: PolyVectorField) -> dict:
    rows = {}
    for k, a in enumerate(f.components):
        for mon, c in sp.Poly(a, *f.chart).terms():
            rows[(k, mon)] = c
    return rows


def expand_in(field: PolyVectorField, basis: Mapping[str, PolyVectorField]) -> dict:
    """Constant coefficients of ``field`` in the given fields, or raise with the remainder."""
    labels = list(basis)
    rows_b = [_coefficient_rows(basis[l]) for l in labels]
    rows_f = _coefficient_rows(field)
    keys = sorted(set().union(rows_f, *rows_b), key=str)
    m = sp.Matrix([[rb.get(k, 0) for rb in rows_b] for k in keys]) if keys else sp.zeros(0, len(labels))
    rhs = sp.Matrix([rows_f.get(k, 0) for k in keys]) if keys else sp.zeros(0, 1)
    if not keys:
        return {}
    try:
        sol, params = m.gauss_jordan_solve(rhs)
    except ValueError:
        raise VectorFieldError(f"bracket leaves the span; offending field: {field}") from None
    sol = sol.subs({p: 0 for p in params})
    return {l: sp.nsimplify(sp.expand(c)) for l, c in zip(labels, sol) if sp.expand(c) != 0}


def commutator_table(fields: Mapping[str, PolyVectorField]) -> dict:
    """``{(x, y): {label: coeff}}`` for every ordered pair of distinct labels."""
    labels = list(fields)
    out = {}
    for i, x in enumerate(labels):
        for y in labels[i + 1:]:
            v = expand_in(lie_bracket(fields[x], fields[y]), fields)
            out[(x, y)] = v
            out[(y, x)] = {k: -c for k, c in v.items()}
    return out


@dataclass(frozen=True)
class ModelSurface:
    """Graph ``v_j = phi_j(z, zb)`` in coordinates ``w_j = u_j + i v_j``."""

    phis: tuple

    def __post_init__(self):
        for p in self.phis:
            if sp.expand(conj_expr(p) - p) != 0:
                raise VectorFieldError(f"defining function {p} is not real")
            if p.free_symbols - {z, zb}:
                raise VectorFieldError("defining functions may depend on z, zb only")

    def w_substitution(self) -> dict:
        return {w: u + I * p for w, u, p in zip((w1, w2, w3), (u1, u2, u3), self.phis)}


def beloshapka_cubic() -> ModelSurface:
    return ModelSurface((sp.expand(z * zb), sp.expand(z**2 * zb + z * zb**2),
                         sp.expand(-I * (z**2 * zb - z * zb**2))))


def check_tangency(x: PolyVectorField, m: ModelSurface) -> bool:
    """Whether ``Re X`` is tangent to the surface.

    For a (1,0) field on the holomorphic chart, ``X(v_j - phi_j)`` is
    ``X^{w_j} / (2i) - X^z dphi_j/dz`` restricted to the surface; the real
    part vanishes identically iff the field is tangent.  Fields given on
    the real chart already live on the surface.
    """
    if x.chart == REAL_CHART:
        return True
    if x.chart != HOLO_CHART:
        raise VectorFieldError("unknown chart")
    comp = dict(zip(x.chart, x.components))
    sub = m.w_substitution()
    for w, p in zip((w1, w2, w3), m.phis):
        e = sp.expand((comp[w] / (2 * I) - comp[z] * sp.diff(p, z)).xreplace(sub))
        if sp.expand(e + conj_expr(e)) != 0:
            return False
    return True


def load_surface(doc) -> ModelSurface:
    """``{"vars": ["z", "zb"], "equations": ["z*zb", ...]}``."""
    if isinstance(doc, str):
        doc = json.loads(doc)
    local = {"I": I, "z": z, "zb": zb}
    if list(doc.get("vars", ["z", "zb"])) != ["z", "zb"]:
        raise VectorFieldError("model surfaces are graphs over (z, zb)")
    phis = tuple(sp.expand(sp.sympify(e, locals=local)) for e in doc["equations"])
    if len(phis) != 3:
        raise VectorFieldError("expected three defining equations")
    return ModelSurface(phis)


# the cubic model --------------------------------------------------------
def adapted_generator() -> PolyVectorField:
    return PolyVectorField.make(REAL_CHART, {
        z: 1, u1: I * zb, u2: I * (2 * z * zb + zb**2), u3: 2 * z * zb - zb**2})


def adapted_frame(lgen: PolyVectorField | None = None) -> dict:
    """``L, Lb, T = i[L, Lb], S = [L, T], Sb = [Lb, T]``."""
    L = lgen or adapted_generator()
    Lb = L.conjugate()
    T = lie_bracket(L, Lb).scale(I)
    return {"L": L, "Lb": Lb, "T": T, "S": lie_bracket(L, T), "Sb": lie_bracket(Lb, T)}


def printed_frame() -> dict:
    from . import goldens
    local = {"I": I, "z": z, "zb": zb}
    return {k: PolyVectorField.make(REAL_CHART, {c: sp.sympify(e, locals=local) for c, e in comps.items()})
            for k, comps in goldens.value("model-frame").items()}


def automorphisms() -> dict:
    h = lambda **c: PolyVectorField.make(HOLO_CHART, c)
    return {
        "S2": h(w3=1),
        "S1": h(w2=1),
        "T": h(w1=1),
        "L2": h(z=I, w1=2 * z, w2=2 * z**2, w3=-(2 * I * z**2 - 4 * w1)),
        "L1": h(z=1, w1=2 * I * z, w2=2 * I * z**2 + 4 * w1, w3=2 * z**2),
        "D": h(z=z, w1=2 * w1, w2=3 * w2, w3=3 * w3),
        "R": h(z=I * z, w2=-w3, w3=w2),
    }


def vanishing_at_origin(fields: Mapping[str, PolyVectorField]) -> list:
    return [k for k, f in fields.items() if all(c == 0 for c in f.at({}))]
