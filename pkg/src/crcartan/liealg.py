"""Finite-dimensional Lie algebras given by exact structure constants."""
from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from . import exterior as ext
from .exterior import Form
from .qi import QI, I
from .scalar import Scalar


class LieError(ValueError):
    pass


Vector = dict  # label -> QI, zero entries dropped


def _clean(v: Mapping) -> dict:
    return {k: QI.coerce(c) for k, c in v.items() if c}


@dataclass(frozen=True)
class LieAlgebra:
    """Basis labels plus ``[e_i, e_j] = sum_k c^k_ij e_k`` stored for ``i < j``."""

    labels: tuple
    constants: dict = field(default_factory=dict)   # (i, j) with i < j -> {k: QI}
    conjugation: dict | None = None                 # label -> label
    dual: dict | None = None                        # label -> one-form symbol

    @staticmethod
    def from_brackets(labels: Sequence[str], brackets: Mapping[tuple, Mapping],
                      conjugation=None, dual=None) -> "LieAlgebra":
        """Build from ``{(x, y): {z: coeff}}``; antisymmetry fills the rest.

        Entries given for both orders must agree up to sign.
        """
        labels = tuple(labels)
        pos = {x: k for k, x in enumerate(labels)}
        table: dict = {}
        for (x, y), out in brackets.items():
            if x not in pos or y not in pos:
                raise LieError(f"unknown basis label in [{x}, {y}]")
            v = {z: QI.coerce(c) for z, c in out.items()}
            if any(z not in pos for z in v):
                raise LieError(f"unknown basis label in the value of [{x}, {y}]")
            if x == y:
                if any(v.values()):
                    raise LieError(f"[{x}, {x}] must vanish")
                continue
            i, j = pos[x], pos[y]
            key, val = ((i, j), v) if i < j else ((j, i), {z: -c for z, c in v.items()})
            val = _clean(val)
            if key in table and table[key] != val:
                raise LieError(f"inconsistent entries for [{x}, {y}]")
            table[key] = val
        return LieAlgebra(labels, {k: v for k, v in table.items() if v}, conjugation, dual)

    @property
    def dim(self) -> int:
        return len(self.labels)

    def basis(self, label: str) -> dict:
        return {label: QI(1)}

    def structure(self, x: str, y: str) -> dict:
        i, j = self.labels.index(x), self.labels.index(y)
        if i == j:
            return {}
        if i < j:
            return dict(self.constants.get((i, j), {}))
        return {k: -c for k, c in self.constants.get((j, i), {}).items()}

    def bracket(self, x: Mapping, y: Mapping) -> dict:
        out: dict = {}
        for a, ca in x.items():
            for b, cb in y.items():
                for z, c in self.structure(a, b).items():
                    out[z] = out.get(z, QI(0)) + QI.coerce(ca) * QI.coerce(cb) * c
        return _clean(out)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "labels": list(self.labels),
            "brackets": [[i, j, [[k, str(c)] for k, c in sorted((self.labels.index(z), c) for z, c in v.items())]]
                         for (i, j), v in sorted(self.constants.items())],
        }


def bracket(alg: LieAlgebra, x, y) -> dict:
    """Bilinear bracket; ``x`` and ``y`` are labels or ``{label: coeff}``."""
    x = alg.basis(x) if isinstance(x, str) else x
    y = alg.basis(y) if isinstance(y, str) else y
    return alg.bracket(x, y)


def _add(*vs) -> dict:
    out: dict = {}
    for v in vs:
        for k, c in v.items():
            out[k] = out.get(k, QI(0)) + c
    return _clean(out)


def jacobi_residual(alg: LieAlgebra) -> list:
    """All triples ``i < j < k`` with nonzero cyclic sum, and the sums."""
    bad = []
    for x, y, z in itertools.combinations(alg.labels, 3):
        r = _add(bracket(alg, x, bracket(alg, y, z)), bracket(alg, y, bracket(alg, z, x)),
                 bracket(alg, z, bracket(alg, x, y)))
        if r:
            bad.append(((x, y, z), r))
    return bad


def ad_matrix(alg: LieAlgebra, k: str, on: Sequence[str] | None = None) -> list:
    """Matrix of ``ad_k(l) = [k, l]``; column ``j`` holds the image of ``on[j]``."""
    on = tuple(on or alg.labels)
    images = [bracket(alg, k, l) for l in on]
    for img in images:
        if any(z not in on for z in img):
            raise LieError(f"ad_{k} does not preserve the given span")
    return [[img.get(r, QI(0)) for img in images] for r in on]


def triangular_eigenvalues(m: list) -> list:
    """Eigenvalues of a triangular matrix (its diagonal)."""
    n = len(m)
    upper = all(not m[i][j] for i in range(n) for j in range(i))
    lower = all(not m[i][j] for i in range(n) for j in range(i + 1, n))
    if not (upper or lower):
        raise LieError("matrix is not triangular")
    return [m[i][i] for i in range(n)]


def dual_names(alg: LieAlgebra) -> dict:
    """One-form symbols dual to the basis, registered for exterior algebra."""
    dual = alg.dual or {x: f"w_{x}" for x in alg.labels}
    conj = alg.conjugation or {}
    pairs = []
    for x in alg.labels:
        if dual[x] not in ext._ORDER:
            pairs.append((dual[x], dual[conj.get(x, x)]))
    ext.declare("dual", pairs)
    return dual


def mc_equations(alg: LieAlgebra) -> dict:
    """``d w^k = -sum_{i<j} c^k_ij w^i ^ w^j`` on the dual coframe."""
    dual = dual_names(alg)
    rules = {dual[x]: Form(2) for x in alg.labels}
    for (i, j), out in alg.constants.items():
        for z, c in out.items():
            rules[dual[z]] = rules[dual[z]] + Form.mono([dual[alg.labels[i]], dual[alg.labels[j]]], -c)
    return rules


def from_mc_equations(labels: Sequence[str], dual: Mapping[str, str], rules: Mapping[str, Form],
                      conjugation=None) -> LieAlgebra:
    """Inverse of :func:`mc_equations`; coefficients must be constants."""
    back = {v: k for k, v in dual.items()}
    brackets: dict = {}
    for name, f in rules.items():
        for m, c in f.terms.items():
            if not c.is_constant():
                raise LieError(f"non-constant coefficient in d{name}")
            x, y = back[m[0]], back[m[1]]
            brackets.setdefault((x, y), {})
            brackets[(x, y)][back[name]] = -c.constant_value()
    return LieAlgebra.from_brackets(labels, brackets, conjugation, dict(dual))


def mc_d_squared(alg: LieAlgebra) -> dict:
    """``d(d w)`` for the Maurer-Cartan rules; nonzero entries only."""
    rules = mc_equations(alg)
    out = {}
    for name, f in rules.items():
        dd = ext.exterior_d(f, rules)
        if dd:
            out[name] = dd
    return out


@dataclass(frozen=True)
class SubalgebraTag:
    parent: LieAlgebra
    members: tuple

    def is_closed(self) -> bool:
        return all(set(bracket(self.parent, x, y)) <= set(self.members)
                   for x, y in itertools.combinations(self.members, 2))

    def algebra(self) -> LieAlgebra:
        if not self.is_closed():
            raise LieError("members are not bracket-closed")
        brackets = {(x, y): bracket(self.parent, x, y) for x, y in itertools.combinations(self.members, 2)}
        return LieAlgebra.from_brackets(self.members, brackets)

    def is_abelian(self) -> bool:
        return all(not bracket(self.parent, x, y) for x, y in itertools.combinations(self.members, 2))


SCALES = tuple(QI(s) for s in (1, -1, 2, -2, 4, -4, 8, -8, 16, -16, Fraction(1, 2), Fraction(-1, 2),
                               Fraction(1, 4), Fraction(-1, 4))) + (I, -I)


def check_nilpotent_iso(sub, target: LieAlgebra, scales: Sequence[QI] = SCALES):
    """Search ``target_i -> s_i * member_pi(i)`` preserving brackets.

    Returns ``(True, {target label: (scale, member)})`` or ``(False, None)``.
    Scales are chosen by backtracking: a scale forced by an earlier bracket
    is taken directly, the others are drawn from ``scales``.
    """
    src = sub.algebra() if isinstance(sub, SubalgebraTag) else sub
    if src.dim != target.dim:
        raise LieError("dimension mismatch")
    if bool(src.constants) != bool(target.constants):
        return False, None
    n = target.dim
    tl = target.labels

    def consistent(assign: dict) -> bool:
        for a, b in itertools.combinations(assign, 2):
            want = bracket(target, a, b)
            if any(z not in assign for z in want):
                continue
            lhs = bracket(src, {assign[a][1]: assign[a][0]}, {assign[b][1]: assign[b][0]})
            rhs = _add(*({assign[z][1]: c * assign[z][0]} for z, c in want.items())) if want else {}
            if lhs != rhs:
                return False
        return True

    def forced(assign: dict, t: str, member: str):
        for a, b in itertools.combinations(assign, 2):
            want = bracket(target, a, b)
            if set(want) == {t}:
                lhs = bracket(src, {assign[a][1]: assign[a][0]}, {assign[b][1]: assign[b][0]})
                if set(lhs) != {member}:
                    return None
                return lhs[member] / want[t]
        return "free"

    for perm in itertools.permutations(src.labels):
        def search(k: int, assign: dict):
            if k == n:
                return dict(assign)
            t, member = tl[k], perm[k]
            f = forced(assign, t, member)
            if f is None:
                return None
            for s in ([f] if f != "free" else scales):
                assign[t] = (s, member)
                if consistent(assign):
                    hit = search(k + 1, assign)
                    if hit:
                        return hit
                del assign[t]
            return None
        hit = search(0, {})
        if hit:
            return True, hit
    return False, None


# loaders ----------------------------------------------------------------
def _parse_coeff(c) -> QI:
    if isinstance(c, (int, float)) and not isinstance(c, bool):
        if isinstance(c, float) and not c.is_integer():
            raise LieError("floating-point structure constants are not accepted")
        return QI(int(c))
    if isinstance(c, list) and len(c) == 2:
        return QI(Fraction(str(c[0])), Fraction(str(c[1])))
    from .scalar import parse
    s = parse(str(c))
    if not s.is_constant():
        raise LieError(f"structure constant {c!r} is not a constant")
    return s.constant_value()


def load_json(doc) -> LieAlgebra:
    """``{dim, labels, brackets: [[i, j, [[k, coeff]]]]}`` with 0-based indices."""
    if isinstance(doc, str):
        doc = json.loads(doc)
    labels = doc["labels"]
    if doc.get("dim", len(labels)) != len(labels):
        raise LieError("dim does not match the number of labels")
    brackets: dict = {}
    for i, j, out in doc["brackets"]:
        v = brackets.setdefault((labels[i], labels[j]), {})
        for k, c in out:
            v[labels[k]] = v.get(labels[k], QI(0)) + _parse_coeff(c)
    return LieAlgebra.from_brackets(labels, brackets, doc.get("conjugation"))


# built-in tables --------------------------------------------------------
def n54() -> LieAlgebra:
    from . import goldens
    return LieAlgebra.from_brackets(("x1", "x2", "x3", "x4", "x5"), _golden_brackets(goldens.value("n54")))


AUT_LABELS = ("S2", "S1", "T", "L2", "L1", "D", "R")


def _golden_brackets(rows) -> dict:
    return {(x, y): {z: _parse_coeff(c) for z, c in out.items()} for x, y, out in rows}


def aut_table() -> LieAlgebra:
    """Brackets of the seven model automorphisms, row label bracketed with column label."""
    from . import goldens
    doc = goldens.value("aut-table")
    labels = doc["labels"]
    b = {}
    for x, row in zip(labels, doc["rows"]):
        for y, cell in zip(labels, row):
            if cell == "*":
                continue
            b[(x, y)] = _parse_vector(cell, labels)
    return LieAlgebra.from_brackets(labels, b)


def _parse_vector(text: str, labels) -> dict:
    """``"3*S2"`` or ``"-L1"`` into ``{label: coeff}``."""
    text = text.replace(" ", "")
    if text == "0":
        return {}
    out = {}
    for part in re.findall(r"[+-]?[^+-]+", text):
        coeff, _, label = part.rpartition("*")
        if coeff in ("", "+", "-"):
            sign = -1 if part.startswith("-") else 1
            label = label.lstrip("+-")
            c = QI(sign)
        else:
            c = _parse_coeff(coeff)
        if label not in labels:
            raise LieError(f"unknown label {label!r} in {text!r}")
        out[label] = out.get(label, QI(0)) + c
    return out


G7_LABELS = ("e_alphabar", "e_alpha", "e_sigmabar", "e_sigma", "e_rho", "e_zetabar", "e_zeta")
G7_DUAL = dict(zip(G7_LABELS, ("alphabar_c", "alpha_c", "sigmabar_c", "sigma_c", "rho_c",
                               "zetabar_c", "zeta_c")))
G7_CONJ = {"e_alphabar": "e_alpha", "e_alpha": "e_alphabar", "e_sigmabar": "e_sigma",
           "e_sigma": "e_sigmabar", "e_rho": "e_rho", "e_zetabar": "e_zeta", "e_zeta": "e_zetabar"}

ext.declare("model", [("alphabar_c", "alpha_c"), ("sigmabar_c", "sigma_c"), "rho_c",
                      ("zetabar_c", "zeta_c")])


def model_structure() -> dict:
    """Flat structure equations of the cubic model on its complex-friendly coframe."""
    ab, al, sb, sg, rh, zb, zt = (G7_DUAL[x] for x in G7_LABELS)
    m = Form.mono
    return {
        ab: Form(2), al: Form(2),
        sb: m([al, sb], 1) + m([ab, sb], 2) + m([rh, zb], 1),
        sg: m([al, sg], 2) + m([ab, sg], 1) + m([rh, zt], 1),
        rh: m([al, rh], 1) + m([ab, rh], 1) + m([zt, zb], I),
        zb: m([ab, zb], 1),
        zt: m([al, zt], 1),
    }


def g7() -> LieAlgebra:
    """The 7-dimensional model algebra read off the flat structure equations."""
    return from_mc_equations(G7_LABELS, G7_DUAL, model_structure(), G7_CONJ)


def g7_printed_list() -> LieAlgebra:
    """The stored bracket list taken verbatim, unwritten brackets zero."""
    from . import goldens
    return LieAlgebra.from_brackets(G7_LABELS, _golden_brackets(goldens.value("g7-brackets")), G7_CONJ, G7_DUAL)


def diff_tables(x: LieAlgebra, y: LieAlgebra) -> list:
    """Brackets on which two algebras over the same labels disagree."""
    if x.labels != y.labels:
        raise LieError("label mismatch")
    out = []
    for a, b in itertools.combinations(x.labels, 2):
        u, v = bracket(x, a, b), bracket(y, a, b)
        if u != v:
            out.append(((a, b), u, v))
    return out


def vector_to_string(v: Mapping) -> str:
    if not v:
        return "0"
    return " + ".join(f"({c})*{k}" for k, c in v.items())
