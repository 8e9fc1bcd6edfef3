"""Exterior forms with :class:`~crcartan.scalar.Scalar` coefficients.

One-form symbols are plain strings (``"sigma0"``, ``"da"``, ``"zetabar"``).
Every symbol is registered with a sort position, a generation and its
complex conjugate; wedge monomials are stored as position-sorted tuples.
"""
from __future__ import annotations

from typing import Iterable, Mapping

from .qi import I
from .scalar import GROUP_NAMES, LETTERS, Scalar, ScalarError, apply_rewrites, frame_bracket, SECONDARY


class FormError(ValueError):
    pass


_ORDER: dict[str, int] = {}
_CONJ: dict[str, str] = {}
_GEN: dict[str, str] = {}


def declare(generation: str, pairs: Iterable) -> None:
    """Register symbols; ``pairs`` holds names or ``(name, conjugate)`` tuples."""
    for p in pairs:
        names = (p, p) if isinstance(p, str) else p
        for n in dict.fromkeys(names):
            if n in _ORDER:
                if _GEN[n] != generation:
                    raise FormError(f"{n} already declared in generation {_GEN[n]}")
                continue
            _ORDER[n] = len(_ORDER)
            _GEN[n] = generation
        _CONJ[names[0]] = names[1]
        _CONJ[names[1]] = names[0]


def coframe_names(suffix: str = "") -> tuple:
    return tuple(n + suffix for n in ("sigmabar", "sigma", "rho", "zetabar", "zeta"))


def group_differential(name: str, conj: bool = False) -> str:
    return "d" + name + ("bar" if conj else "")


GROUP_DIFFERENTIALS = tuple(group_differential(n, c) for n in GROUP_NAMES for c in (False, True))

declare("group", [(group_differential(n), group_differential(n, True)) for n in GROUP_NAMES])
declare("connection", [("lambdabar", "lambda")])
declare("maurer-cartan", [(f"alpha{k}", f"alphabar{k}") for k in range(1, 6)]
        + [(f"beta{k}", f"betabar{k}") for k in (1, 2)] + [("gamma1", "gammabar1")])
for _suffix, _gen in (("", "lifted"), ("2", "intermediate-2"), ("1", "intermediate-1"), ("0", "base")):
    _n = coframe_names(_suffix)
    declare(_gen, [(_n[0], _n[1]), _n[2], (_n[3], _n[4])])

BASE = coframe_names("0")
LIFTED = coframe_names()
# base one-form dual to each frame derivation
DUAL_LETTER = dict(zip(BASE, LETTERS))


def order(name: str) -> int:
    if name not in _ORDER:
        raise FormError(f"undeclared one-form symbol {name!r}")
    return _ORDER[name]


def conj_symbol(name: str) -> str:
    order(name)
    return _CONJ[name]


def generation(name: str) -> str:
    order(name)
    return _GEN[name]


def _sort_sign(mono: tuple):
    """Sorted monomial and permutation sign, or ``(None, 0)`` on repetition."""
    if len(set(mono)) != len(mono):
        return None, 0
    keys = [order(s) for s in mono]
    sign = 1
    keys = list(keys)
    mono = list(mono)
    for i in range(1, len(keys)):
        j = i
        while j > 0 and keys[j - 1] > keys[j]:
            keys[j - 1], keys[j] = keys[j], keys[j - 1]
            mono[j - 1], mono[j] = mono[j], mono[j - 1]
            sign = -sign
            j -= 1
    return tuple(mono), sign


class Form:
    """Homogeneous exterior form ``sum coeff * (theta_1 ^ ... ^ theta_k)``."""

    __slots__ = ("degree", "terms")

    def __init__(self, degree: int, terms: Mapping[tuple, Scalar] | None = None):
        self.degree = degree
        self.terms = {}
        for m, c in (terms or {}).items():
            if len(m) != degree:
                raise FormError(f"monomial {m} has wrong degree for {degree}-form")
            if c:
                self.terms[m] = c

    @staticmethod
    def zero(degree: int) -> "Form":
        return Form(degree)

    @staticmethod
    def scalar(c) -> "Form":
        c = c if isinstance(c, Scalar) else Scalar.const(c)
        return Form(0, {(): c})

    @staticmethod
    def one(name: str, coeff=1) -> "Form":
        order(name)
        c = coeff if isinstance(coeff, Scalar) else Scalar.const(coeff)
        return Form(1, {(name,): c})

    @staticmethod
    def mono(names: Iterable[str], coeff=1) -> "Form":
        m, sign = _sort_sign(tuple(names))
        c = coeff if isinstance(coeff, Scalar) else Scalar.const(coeff)
        if m is None:
            return Form(len(tuple(names)))
        return Form(len(m), {m: c * sign})

    def __add__(self, other: "Form") -> "Form":
        if other.degree != self.degree:
            raise FormError("cannot add forms of different degree")
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out[m] + c if m in out else c
        return Form(self.degree, out)

    def __neg__(self):
        return Form(self.degree, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "Form":
        c = c if isinstance(c, Scalar) else Scalar.const(c)
        return Form(self.degree, {m: c * v for m, v in self.terms.items()})

    def __rmul__(self, c):
        return self.scale(c)

    def __xor__(self, other: "Form") -> "Form":
        return wedge(self, other)

    def __eq__(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        return self.degree == other.degree and self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    def coeff(self, *names: str) -> Scalar:
        m, sign = _sort_sign(tuple(names))
        if m is None:
            return Scalar()
        return self.terms.get(m, Scalar()) * sign

    def symbols(self) -> set:
        return {s for m in self.terms for s in m}

    def map_coeffs(self, f) -> "Form":
        return Form(self.degree, {m: f(c) for m, c in self.terms.items()})

    def conjugate(self) -> "Form":
        out = Form(self.degree)
        for m, c in self.terms.items():
            out = out + Form.mono([conj_symbol(s) for s in m], c.conjugate())
        return out

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: [order(s) for s in t[0]])

    def __str__(self):
        return form_to_string(self)

    __repr__ = __str__


def wedge(x: Form, y: Form) -> Form:
    out: dict = {}
    for m1, c1 in x.terms.items():
        for m2, c2 in y.terms.items():
            m, sign = _sort_sign(m1 + m2)
            if m is None:
                continue
            c = c1 * c2 if sign > 0 else -(c1 * c2)
            out[m] = out[m] + c if m in out else c
    return Form(x.degree + y.degree, out)


def wedge_all(forms: Iterable[Form]) -> Form:
    out = Form.scalar(1)
    for f in forms:
        out = wedge(out, f)
    return out


def differential(f: Scalar) -> Form:
    """``df`` on the base coframe plus group differentials."""
    out = Form(1)
    for theta, letter in DUAL_LETTER.items():
        c = f.derive(letter)
        if c:
            out = out + Form.one(theta, c)
    for atom in sorted(f.atoms()):
        if atom[0] == 0:
            _, name, conj, _ = atom
            out = out + Form.one(group_differential(name, conj), f.partial(name, conj))
    return out


def exterior_d(x: Form, rules: Mapping[str, Form]) -> Form:
    """Exterior derivative; ``rules[name]`` gives ``d name`` for one-form symbols."""
    out = Form(x.degree + 1)
    for m, c in x.terms.items():
        out = out + wedge(differential(c), Form(x.degree, {m: Scalar.const(1)}))
        for k, s in enumerate(m):
            if s in rules:
                ds = rules[s]
            elif generation(s) == "group":
                continue
            else:
                raise FormError(f"no structure rule for d{s}")
            left = Form(k, {m[:k]: Scalar.const(1)})
            right = Form(len(m) - k - 1, {m[k + 1:]: Scalar.const(1)})
            term = wedge(wedge(left, ds), right).scale(c)
            out = out + (term if k % 2 == 0 else -term)
    return out


def change_basis(x: Form, mapping: Mapping[str, Form]) -> Form:
    """Substitute one-forms for the symbols in ``mapping``."""
    out = Form(x.degree)
    for m, c in x.terms.items():
        if not any(s in mapping for s in m):
            out = out + Form(x.degree, {m: c})
            continue
        out = out + wedge_all(mapping.get(s, Form.one(s)) for s in m).scale(c)
    return out


def interior(symbol: str, x: Form) -> Form:
    """Contract with the vector dual to ``symbol`` in the current basis."""
    out = Form(x.degree - 1)
    for m, c in x.terms.items():
        if symbol in m:
            k = m.index(symbol)
            out = out + Form(x.degree - 1, {m[:k] + m[k + 1:]: c if k % 2 == 0 else -c})
    return out


def form_to_string(x: Form) -> str:
    if not x.terms:
        return "0"
    parts = []
    for m, c in x.sorted_terms():
        parts.append(f"({c})*{'^'.join(m)}" if m else f"({c})")
    return " + ".join(parts)


def form_to_json(x: Form) -> dict:
    return {"degree": x.degree,
            "terms": [{"monomial": list(m), "coeff": str(c)} for m, c in x.sorted_terms()]}


def ordered_two_forms(names: tuple) -> list:
    """The ten 2-form monomials in the triangular display order."""
    return [(names[i], names[j]) for i in range(len(names)) for j in range(i + 1, len(names))]


def free_module_independent(monos: list) -> bool:
    """The wedge monomials are pairwise distinct and nonzero after sorting."""
    seen = set()
    for m in monos:
        s, sign = _sort_sign(m)
        if s is None or s in seen:
            return False
        seen.add(s)
    return True


# initial Darboux structure ----------------------------------------------
def frame_structure_rules() -> dict:
    """``d theta^k = -sum_{i<j} c^k_ij theta^i ^ theta^j`` for the frame brackets."""
    letter_of = dict(zip(LETTERS, BASE))
    rules = {}
    for k, letter_k in enumerate(LETTERS):
        out = Form(2)
        for i in range(5):
            for j in range(i + 1, 5):
                c = frame_bracket(LETTERS[i], LETTERS[j]).get(letter_k)
                if c:
                    out = out + Form.mono([BASE[i], BASE[j]], -c)
        rules[letter_of[letter_k]] = out
    return rules


def darboux_structure() -> dict:
    """The initial Darboux structure as displayed, with E, F, G, J, K opaque."""
    s = Scalar.sym
    sb, sg, rh, zb, zt = BASE

    def f(*pairs):
        out = Form(2)
        for c, x, y in pairs:
            out = out + Form.mono([x, y], c)
        return out

    one = Scalar.const(1)
    d_sigmabar = f((-s("K", True), sb, sg), (s("F", True), sb, rh), (s("Q", True), sb, zb),
                   (s("B", True), sb, zt), (s("G"), sg, rh), (s("B", True), sg, zb),
                   (s("R"), sg, zt), (one, rh, zb))
    d_sigma = f((s("K"), sb, sg), (s("G", True), sb, rh), (s("R", True), sb, zb),
                (s("B"), sb, zt), (s("F"), sg, rh), (s("B"), sg, zb),
                (s("Q"), sg, zt), (one, rh, zt))
    d_rho = f((I * s("J"), sb, sg), (s("E", True), sb, rh), (s("P", True), sb, zb),
              (s("A"), sb, zt), (s("E"), sg, rh), (s("A"), sg, zb),
              (s("P"), sg, zt), (-I * one, zb, zt))
    return {sb: d_sigmabar, sg: d_sigma, rh: d_rho, zb: Form(2), zt: Form(2)}


def rewrite_rules(rules: Mapping[str, Form], table: Mapping[str, Scalar]) -> dict:
    return {k: v.map_coeffs(lambda c: apply_rewrites(c, table)) for k, v in rules.items()}


def check_d2(rules: Mapping[str, Form], table: Mapping[str, Scalar] | None = None,
             symbols: Iterable[str] | None = None) -> dict:
    """``d(d theta)`` for each symbol after applying ``table``; only nonzero ones are kept."""
    table = table or {}
    rules = rewrite_rules(rules, table) if table else dict(rules)
    out = {}
    for name in (symbols or list(rules) + list(GROUP_DIFFERENTIALS)):
        dd = exterior_d(rules[name], rules) if name in rules else Form(3)
        dd = dd.map_coeffs(lambda c: apply_rewrites(c, table)) if table else dd
        if dd:
            out[name] = dd
    return out


class SecondaryResult:
    def __init__(self, table, residuals, equations):
        self.table = table
        self.residuals = residuals
        self.equations = equations


def derive_secondary_brackets(rules: Mapping[str, Form] | None = None,
                              unknowns: Iterable[str] = SECONDARY) -> SecondaryResult:
    """Solve ``d^2 = 0`` on the base coframe for the secondary functions.

    Each round keeps the 3-form components that are affine in the still
    unknown functions (bare, constant coefficients), solves them by exact
    elimination, and substitutes.  Components left nonzero at the end are
    returned as residual relations among the primary functions.
    """
    from .linalg import solve_affine

    rules = rules or darboux_structure()
    unknowns = tuple(unknowns)
    comps = []
    for name in BASE:
        dd = exterior_d(rules[name], rules)
        for m, c in dd.sorted_terms():
            comps.append(((name,) + m, c))

    solved: dict[str, Scalar] = {}
    used: dict[str, tuple] = {}
    while True:
        pending = [u for u in unknowns if u not in solved]
        if not pending:
            break
        eqs = []
        for label, c in comps:
            c = apply_rewrites(c, solved)
            lin = _affine_in(c, pending)
            if lin is not None:
                eqs.append((label, lin))
        found = solve_affine([lin for _, lin in eqs])
        new = {k: v for k, v in found.items() if k[0] in pending}
        if not new:
            raise FormError(f"cannot determine {pending} from d^2 = 0")
        for (name, conj), val in new.items():
            if conj:
                if name not in new and (name, False) not in new:
                    solved[name] = val.conjugate()
            else:
                solved[name] = val
            used.setdefault(name, tuple(label for label, _ in eqs))
    residuals = []
    for label, c in comps:
        r = apply_rewrites(c, solved)
        if r:
            residuals.append((label, r))
    return SecondaryResult(solved, residuals, used)


def _affine_in(expr: Scalar, names: Iterable[str]):
    """``({(name, conj): QI}, rest)`` if ``expr`` is affine in bare unknowns."""
    names = set(names)
    coeffs: dict = {}
    rest = {}
    for m, c in expr.terms.items():
        hits = [(atom, e) for atom, e in m if atom[0] == 1 and atom[1] in names]
        if not hits:
            rest[m] = c
            continue
        if len(m) != 1 or len(hits) != 1 or hits[0][1] != 1 or hits[0][0][3]:
            return None
        atom = hits[0][0]
        key = (atom[1], atom[2])
        coeffs[key] = coeffs.get(key, 0) + c
    if not coeffs:
        return None
    return coeffs, Scalar(rest)
