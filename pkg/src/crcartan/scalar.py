"""Coefficient algebra for the equivalence computations.

A :class:`Scalar` is a finite sum of terms ``c * m`` where ``c`` lies in
Q(i) and ``m`` is a monomial in

* group parameters ``a, b, c, d, e`` and their conjugates (integer
  exponents; only ``a`` and ``abar`` may carry negative ones), and
* base functions ``A, B, P, ...`` on the CR manifold, each decorated with a
  word of frame derivations drawn from ``Sb, S, T, Lb, L``.

Derivation words are kept in canonical order: read outermost-first, the
letters are nondecreasing for ``Sb < S < T < Lb < L``.  Out-of-order words
are rewritten with the frame bracket relations, so two scalars are equal
iff their normal forms coincide.
"""
from __future__ import annotations

import ast
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Mapping

from .qi import QI, ONE, I

GROUP = 0
BASE = 1

GROUP_NAMES = ("a", "b", "c", "d", "e")
INVERTIBLE = frozenset({"a"})

LETTERS = ("Sb", "S", "T", "Lb", "L")
RANK = {x: k for k, x in enumerate(LETTERS)}
CONJ_LETTER = {"Sb": "S", "S": "Sb", "T": "T", "Lb": "L", "L": "Lb"}

# base functions fixed by conjugation
REAL_SYMBOLS = {"A", "J"}
# E, F, G, J, K are produced by Jacobi identities of the frame
SECONDARY = ("E", "F", "G", "J", "K")


class ScalarError(ValueError):
    pass


def _group_atom(name: str, conj: bool = False):
    return (GROUP, name, conj, ())


def _base_atom(name: str, conj: bool = False, word: tuple = ()):
    if name in REAL_SYMBOLS:
        conj = False
    return (BASE, name, conj, tuple(word))


def _mono_mul(m1: tuple, m2: tuple) -> tuple:
    if not m1:
        return m2
    if not m2:
        return m1
    exps = dict(m1)
    for atom, e in m2:
        exps[atom] = exps.get(atom, 0) + e
    return tuple(sorted((k, v) for k, v in exps.items() if v))


class Scalar:
    """Immutable normal-form expression; see module docstring."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[tuple, QI] | None = None):
        self.terms = {m: c for m, c in (terms or {}).items() if c}
        self._hash = None

    # constructors -----------------------------------------------------
    @staticmethod
    def const(c) -> "Scalar":
        c = QI.coerce(c)
        return Scalar({(): c}) if c else Scalar()

    @staticmethod
    def param(name: str, conj: bool = False, exp: int = 1) -> "Scalar":
        if name not in GROUP_NAMES:
            raise ScalarError(f"unknown group parameter {name!r}")
        if exp < 0 and name not in INVERTIBLE:
            raise ScalarError(f"group parameter {name!r} is not invertible")
        if exp == 0:
            return Scalar.const(1)
        return Scalar({((_group_atom(name, conj), exp),): ONE})

    @staticmethod
    def sym(name: str, conj: bool = False, word: Iterable[str] = ()) -> "Scalar":
        """Base function with a derivation word applied (outermost letter first)."""
        bare = Scalar({((_base_atom(name, conj), 1),): ONE})
        word = tuple(word)
        if not word:
            return bare
        return apply_word(bare, word)

    # ring structure ---------------------------------------------------
    def __add__(self, other):
        other = _lift(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out[m] + c if m in out else c
        return Scalar(out)

    __radd__ = __add__

    def __neg__(self):
        return Scalar({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-_lift(other))

    def __rsub__(self, other):
        return _lift(other) - self

    def __mul__(self, other):
        other = _lift(other)
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                c = c1 * c2
                out[m] = out[m] + c if m in out else c
        return Scalar(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * _lift(other).inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = Scalar.const(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def inverse(self) -> "Scalar":
        """Inverse of a monomial in invertible parameters; anything else raises."""
        if len(self.terms) != 1:
            raise ScalarError(f"not invertible: {self}")
        (m, c), = self.terms.items()
        for atom, _ in m:
            if atom[0] != GROUP or atom[1] not in INVERTIBLE:
                raise ScalarError(f"not invertible: {self}")
        return Scalar({tuple((atom, -e) for atom, e in m): c.inverse()})

    # predicates -------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction, QI)):
            other = Scalar.const(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not m for m in self.terms)

    def constant_value(self) -> QI:
        if not self.is_constant():
            raise ScalarError(f"not a constant: {self}")
        return self.terms.get((), QI(0))

    def is_invertible_monomial(self) -> bool:
        try:
            self.inverse()
        except ScalarError:
            return False
        return True

    def atoms(self) -> set:
        return {atom for m in self.terms for atom, _ in m}

    def group_free(self) -> bool:
        return all(atom[0] != GROUP for atom in self.atoms())

    def symbol_names(self) -> set:
        return {atom[1] for atom in self.atoms() if atom[0] == BASE}

    # structure --------------------------------------------------------
    def split_group(self) -> dict:
        """Map each group monomial to its (group-free) cofactor."""
        out: dict = {}
        for m, c in self.terms.items():
            g = tuple(p for p in m if p[0][0] == GROUP)
            f = tuple(p for p in m if p[0][0] != GROUP)
            out.setdefault(g, {})[f] = c
        return {g: Scalar(t) for g, t in out.items()}

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: t[0])

    # operations -------------------------------------------------------
    def conjugate(self) -> "Scalar":
        out = Scalar()
        for m, c in self.terms.items():
            t = Scalar.const(c.conjugate())
            for atom, e in m:
                t = t * (_conj_atom(atom) ** e)
            out = out + t
        return out

    def derive(self, letter: str) -> "Scalar":
        """Apply the frame derivation ``letter`` (Leibniz rule)."""
        if letter not in RANK:
            raise ScalarError(f"unknown derivation {letter!r}")
        out: dict = {}
        for m, c in self.terms.items():
            for k, (atom, e) in enumerate(m):
                if atom[0] != BASE:
                    continue
                rest = m[:k] + ((atom, e - 1),) + m[k + 1:] if e > 1 else m[:k] + m[k + 1:]
                d = _insert(atom, letter)
                for dm, dc in d.terms.items():
                    mm = _mono_mul(rest, dm)
                    cc = c * dc * e
                    out[mm] = out[mm] + cc if mm in out else cc
        return Scalar(out)

    def partial(self, name: str, conj: bool = False) -> "Scalar":
        """Partial derivative in a group parameter (fiber variable)."""
        target = _group_atom(name, conj)
        out: dict = {}
        for m, c in self.terms.items():
            for k, (atom, e) in enumerate(m):
                if atom != target:
                    continue
                mm = m[:k] + ((atom, e - 1),) + m[k + 1:] if e != 1 else m[:k] + m[k + 1:]
                out[mm] = out.get(mm, QI(0)) + c * e
        return Scalar(out)

    def substitute_group(self, mapping: Mapping[tuple, "Scalar"]) -> "Scalar":
        """Simultaneous substitution ``{(name, conj): Scalar}`` of group parameters."""
        return self._substitute(lambda atom: mapping.get((atom[1], atom[2])) if atom[0] == GROUP else None)

    def substitute_symbols(self, mapping: Mapping[tuple, "Scalar"]) -> "Scalar":
        """Replace bare base functions ``{(name, conj): Scalar}``; derivatives follow."""
        def repl(atom):
            if atom[0] != BASE:
                return None
            v = mapping.get((atom[1], atom[2]))
            if v is None:
                return None
            return apply_word(v, atom[3]) if atom[3] else v
        return self._substitute(repl)

    def _substitute(self, repl: Callable) -> "Scalar":
        out = Scalar()
        cache: dict = {}
        for m, c in self.terms.items():
            t = Scalar.const(c)
            for atom, e in m:
                if atom not in cache:
                    cache[atom] = repl(atom)
                v = cache[atom]
                if v is None:
                    t = t * Scalar({((atom, e),): ONE})
                elif e < 0:
                    if not v.is_invertible_monomial():
                        raise ScalarError(f"cannot substitute non-invertible {v} for {atom[1]}")
                    t = t * v.inverse() ** (-e)
                else:
                    t = t * v ** e
            out = out + t
        return out

    # printing ---------------------------------------------------------
    def __str__(self):
        return to_string(self)

    def __repr__(self):
        return f"Scalar({to_string(self)!r})"


def _lift(x) -> Scalar:
    if isinstance(x, Scalar):
        return x
    return Scalar.const(x)


# derivation words ---------------------------------------------------------
def _bracket_table() -> dict:
    """[X, Y] for rank(X) > rank(Y), as ``{letter: coefficient}``."""
    s = Scalar.sym
    return {
        ("S", "Sb"): {"T": I * s("J"), "S": s("K"), "Sb": -s("K", True)},
        ("T", "Sb"): {"T": s("E", True), "S": s("G", True), "Sb": s("F", True)},
        ("T", "S"): {"T": s("E"), "S": s("F"), "Sb": s("G")},
        ("Lb", "Sb"): {"T": s("P", True), "S": s("R", True), "Sb": s("Q", True)},
        ("Lb", "S"): {"T": s("A"), "S": s("B"), "Sb": s("B", True)},
        ("Lb", "T"): {"Sb": Scalar.const(1)},
        ("L", "Sb"): {"T": s("A"), "S": s("B"), "Sb": s("B", True)},
        ("L", "S"): {"T": s("P"), "S": s("Q"), "Sb": s("R")},
        ("L", "T"): {"S": Scalar.const(1)},
        ("L", "Lb"): {"T": -I * Scalar.const(1)},
    }


_BRACKETS: dict | None = None


def frame_bracket(x: str, y: str) -> dict:
    """Coefficients of ``[x, y]`` on the frame ``{Sb, S, T, Lb, L}``."""
    global _BRACKETS
    if _BRACKETS is None:
        _BRACKETS = _bracket_table()
    if x == y:
        return {}
    if RANK[x] > RANK[y]:
        return _BRACKETS[(x, y)]
    return {k: -v for k, v in _BRACKETS[(y, x)].items()}


@lru_cache(maxsize=None)
def _insert(atom: tuple, letter: str) -> Scalar:
    """``letter`` applied to a base-function atom, result in canonical order."""
    _, name, conj, word = atom
    if not word or RANK[letter] <= RANK[word[0]]:
        return Scalar({(((BASE, name, conj, (letter,) + word), 1),): ONE})
    # X(u0(v)) = u0(X(v)) + [X, u0](v)
    u0 = word[0]
    inner = (BASE, name, conj, word[1:])
    out = _insert(inner, letter).derive(u0)
    for y, coeff in frame_bracket(letter, u0).items():
        out = out + coeff * _insert(inner, y)
    return out


def apply_word(x: Scalar, word: Iterable[str]) -> Scalar:
    """Apply letters of ``word`` (outermost first) to ``x``."""
    for letter in reversed(tuple(word)):
        x = x.derive(letter)
    return x


def reorder_derivations(word: Iterable[str], name: str, conj: bool = False) -> Scalar:
    return apply_word(Scalar.sym(name, conj), word)


def is_canonical_word(word: tuple) -> bool:
    return all(RANK[word[k]] <= RANK[word[k + 1]] for k in range(len(word) - 1))


@lru_cache(maxsize=None)
def _conj_atom(atom: tuple) -> Scalar:
    kind, name, conj, word = atom
    if kind == GROUP:
        return Scalar({((_group_atom(name, not conj), 1),): ONE})
    bare = Scalar({((_base_atom(name, not conj), 1),): ONE})
    return apply_word(bare, [CONJ_LETTER[x] for x in word])


def reorder_leftmost(word: Iterable[str], name: str, conj: bool = False) -> Scalar:
    """Second normal-ordering strategy, used to audit confluence.

    Works on differential operators ``sum coeff * word`` and always resolves
    the outermost inversion first, the opposite of :func:`apply_word`.
    """
    ops = {tuple(word): Scalar.const(1)}
    done: dict = {}
    while ops:
        w, coeff = ops.popitem()
        pos = next((k for k in range(len(w) - 1) if RANK[w[k]] > RANK[w[k + 1]]), None)
        if pos is None:
            done[w] = done.get(w, Scalar()) + coeff
            continue
        u, x, y, v = w[:pos], w[pos], w[pos + 1], w[pos + 2:]
        _acc(ops, u + (y, x) + v, coeff)
        for z, c in frame_bracket(x, y).items():
            # u applied to (c * (z v f)) by Leibniz over subsets of u
            n = len(u)
            for mask in range(1 << n):
                on_c = tuple(u[k] for k in range(n) if mask >> k & 1)
                rest = tuple(u[k] for k in range(n) if not mask >> k & 1)
                dc = apply_word(c, on_c)
                if dc:
                    _acc(ops, rest + (z,) + v, coeff * dc)
    out = Scalar()
    for w, coeff in done.items():
        out = out + coeff * Scalar({(((BASE, name, False if name in REAL_SYMBOLS else conj, w), 1),): ONE})
    return out


def _acc(d: dict, key, val: Scalar):
    s = d.get(key, Scalar()) + val
    if s:
        d[key] = s
    else:
        d.pop(key, None)


# secondary functions -------------------------------------------------------
def printed_secondary_table() -> dict:
    """The displayed expressions of E, F, G through A, B, P, Q, R."""
    from . import goldens
    return {k: parse(v) for k, v in goldens.value("secondary").items()}


def rewrite_map(table: Mapping[str, Scalar]) -> dict:
    """Expand ``{name: expr}`` into substitutions for both ``name`` and its conjugate."""
    out = {}
    for name, expr in table.items():
        out[(name, False)] = expr
        if name not in REAL_SYMBOLS:
            out[(name, True)] = expr.conjugate()
    return out


def apply_rewrites(x: Scalar, table: Mapping[str, Scalar], rounds: int = 8) -> Scalar:
    """Substitute ``table`` until no rewritable symbol is left."""
    mapping = rewrite_map(table)
    names = set(table)
    for _ in range(rounds):
        if not (x.symbol_names() & names):
            return x
        x = x.substitute_symbols(mapping)
    if x.symbol_names() & names:
        raise ScalarError("rewrite table does not terminate")
    return x


# printing and parsing ---------------------------------------------------
def atom_to_string(atom: tuple) -> str:
    kind, name, conj, word = atom
    s = name + ("bar" if conj else "")
    for letter in reversed(word):
        s = f"{letter}({s})"
    return s


def _mono_to_string(m: tuple) -> str:
    parts = []
    for atom, e in m:
        s = atom_to_string(atom)
        parts.append(s if e == 1 else f"{s}**{e}" if e > 0 else f"{s}**({e})")
    return "*".join(parts)


def to_string(x: Scalar) -> str:
    """Canonical string; parseable back with :func:`parse`."""
    if not x.terms:
        return "0"
    out = []
    for m, c in x.sorted_terms():
        ms = _mono_to_string(m)
        cs = str(c)
        neg = False
        if not c.im and c.re < 0:
            neg, cs = True, str(-c)
        elif not c.re and c.im < 0:
            neg, cs = True, str(-c)
        if ms:
            body = ms if cs == "1" else f"{cs}*{ms}"
        else:
            body = cs
        out.append(("- " if neg else "+ ") + body)
    s = " ".join(out)
    return s[2:] if s.startswith("+ ") else "-" + s[2:]


_NAME_CACHE: dict = {}


def _name_to_scalar(name: str) -> Scalar:
    if name == "I":
        return Scalar.const(I)
    conj = name.endswith("bar")
    base = name[:-3] if conj else name
    if base in GROUP_NAMES:
        return Scalar.param(base, conj)
    if not base or not (base[0].isupper()):
        raise ScalarError(f"unknown name {name!r}")
    return Scalar.sym(base, conj)


def parse(text: str) -> Scalar:
    """Parse strings such as ``"I*(L(A) - Lb(P)) + a**2*abar*Bbar"``."""
    try:
        tree = ast.parse(text.strip(), mode="eval").body
    except SyntaxError as exc:
        raise ScalarError(f"cannot parse {text!r}") from exc
    return _eval(tree)


def _eval(node) -> Scalar:
    if isinstance(node, ast.Constant) and isinstance(node.value, int):
        return Scalar.const(node.value)
    if isinstance(node, ast.Name):
        return _name_to_scalar(node.id)
    if isinstance(node, ast.UnaryOp):
        v = _eval(node.operand)
        if isinstance(node.op, ast.USub):
            return -v
        if isinstance(node.op, ast.UAdd):
            return v
    if isinstance(node, ast.BinOp):
        left = _eval(node.left)
        if isinstance(node.op, ast.Pow):
            exp = _eval(node.right)
            if not exp.is_constant() or exp.constant_value().im or exp.constant_value().re.denominator != 1:
                raise ScalarError("exponent must be an integer")
            return left ** int(exp.constant_value().re)
        right = _eval(node.right)
        if isinstance(node.op, ast.Add):
            return left + right
        if isinstance(node.op, ast.Sub):
            return left - right
        if isinstance(node.op, ast.Mult):
            return left * right
        if isinstance(node.op, ast.Div):
            if right.is_constant():
                return left * Scalar.const(right.constant_value().inverse())
            return left * right.inverse()
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and len(node.args) == 1:
        letter = node.func.id
        if letter not in RANK:
            raise ScalarError(f"unknown derivation {letter!r}")
        return _eval(node.args[0]).derive(letter)
    raise ScalarError(f"unsupported syntax: {ast.dump(node)}")
