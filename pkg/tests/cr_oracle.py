"""Concrete CR structures: structure functions computed straight from vector fields.

A generator ``L = d/dz + sum f_j d/du_j`` on (z, zb, u1, u2, u3) determines
the frame ``Lb, T = i[L, Lb], S = [L, T], Sb = [Lb, T]`` and every bracket
function by expanding brackets in that frame.  Symbols of the scalar
algebra are evaluated at a base point by applying their derivation words
to these explicit functions.

The frame inverse is not polynomial, so everything is carried as a Taylor
jet at the base point, truncated below total degree ``DEPTH``.  Each
derivation loses one order of validity; frame fields are valid to order
``DEPTH - 1`` and the evaluated words are short enough that values at the
base point are exact.
"""
from __future__ import annotations

from fractions import Fraction

import sympy as sp

from crcartan.qi import QI
from crcartan.scalar import BASE, Scalar
from crcartan.vecfield import REAL_CHART, z, zb, u1, u2, u3

ORDER = ("Sb", "S", "T", "Lb", "L")
DEPTH = 7
NV = 5


class Jet:
    """Truncated power series in (z, zb, u1, u2, u3) with Q(i) coefficients."""

    __slots__ = ("c",)

    def __init__(self, c=None):
        self.c = {m: v for m, v in (c or {}).items() if v and sum(m) < DEPTH}

    @staticmethod
    def const(v) -> "Jet":
        return Jet({(0,) * NV: QI.coerce(v)})

    @staticmethod
    def from_sympy(e) -> "Jet":
        p = sp.Poly(sp.expand(e), *REAL_CHART)
        out = {}
        for m, c in p.terms():
            re, im = sp.re(c), sp.im(c)
            out[tuple(m)] = QI(Fraction(str(re)), Fraction(str(im)))
        return Jet(out)

    def __add__(self, o):
        out = dict(self.c)
        for m, v in o.c.items():
            out[m] = out.get(m, QI(0)) + v
        return Jet(out)

    def __neg__(self):
        return Jet({m: -v for m, v in self.c.items()})

    def __sub__(self, o):
        return self + (-o)

    def __mul__(self, o):
        if not isinstance(o, Jet):
            o = Jet.const(o)
        out: dict = {}
        for m1, v1 in self.c.items():
            d1 = sum(m1)
            for m2, v2 in o.c.items():
                if d1 + sum(m2) >= DEPTH:
                    continue
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, QI(0)) + v1 * v2
        return Jet(out)

    def diff(self, k: int) -> "Jet":
        out = {}
        for m, v in self.c.items():
            if m[k]:
                mm = m[:k] + (m[k] - 1,) + m[k + 1:]
                out[mm] = v * m[k]
        return Jet(out)

    def conjugate(self) -> "Jet":
        return Jet({(m[1], m[0]) + m[2:]: v.conjugate() for m, v in self.c.items()})

    def at_base(self) -> QI:
        return self.c.get((0,) * NV, QI(0))

    def __bool__(self):
        return bool(self.c)


class Field:
    def __init__(self, comps):
        self.comps = list(comps)

    def __call__(self, g: Jet) -> Jet:
        out = Jet()
        for k, c in enumerate(self.comps):
            if c:
                out = out + c * g.diff(k)
        return out

    def conjugate(self) -> "Field":
        cs = [c.conjugate() for c in self.comps]
        return Field([cs[1], cs[0]] + cs[2:])

    def scale(self, v) -> "Field":
        return Field([c * v for c in self.comps])


def bracket(x: Field, y: Field) -> Field:
    return Field([x(b) - y(a) for a, b in zip(x.comps, y.comps)])


def _inverse_jet(cols):
    """Jet inverse of the matrix whose columns are the given fields' components."""
    n = len(cols)
    a = [[cols[k].comps[i] for k in range(n)] for i in range(n)]
    inv0 = _invert([[x.at_base() for x in row] for row in a])
    j0 = [[Jet.const(x) for x in row] for row in inv0]
    # a = a0 (1 + h), inverse = sum (-h)^k a0^-1 with h = a0^-1 (a - a0)
    h = [[sum((Jet.const(inv0[i][k]) * (a[k][j] - Jet.const(a[k][j].at_base())) for k in range(n)), Jet())
          for j in range(n)] for i in range(n)]
    out, term = j0, j0
    for _ in range(DEPTH):
        term = [[-sum((h[i][k] * term[k][j] for k in range(n)), Jet()) for j in range(n)] for i in range(n)]
        out = [[out[i][j] + term[i][j] for j in range(n)] for i in range(n)]
    return out


def _invert(a):
    n = len(a)
    m = [list(r) + [QI(int(i == j)) for j in range(n)] for i, r in enumerate(a)]
    for col in range(n):
        piv = next(r for r in range(col, n) if m[r][col])
        m[col], m[piv] = m[piv], m[col]
        p = m[col][col].inverse()
        m[col] = [x * p for x in m[col]]
        for r in range(n):
            if r != col and m[r][col]:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [row[n:] for row in m]


class ConcreteStructure:
    def __init__(self, f1, f2, f3, base=(0, 0, 0, 0)):
        """``f_j`` are sympy polynomials; ``base = (z0, u10, u20, u30)`` becomes the origin."""
        z0, *u0 = (sp.nsimplify(b) for b in base)
        shift = {z: z + z0, zb: zb + sp.conjugate(z0), u1: u1 + u0[0], u2: u2 + u0[1], u3: u3 + u0[2]}
        fs = [Jet.from_sympy(sp.sympify(f).xreplace(shift)) for f in (f1, f2, f3)]
        L = Field([Jet.const(1), Jet()] + fs)
        Lb = L.conjugate()
        T = bracket(L, Lb).scale(QI(0, 1))
        S, Sb = bracket(L, T), bracket(Lb, T)
        self.frame = {"Sb": Sb, "S": S, "T": T, "Lb": Lb, "L": L}
        self._cache: dict = {}
        self.brackets = {}
        inv = _inverse_jet([self.frame[k] for k in ORDER])
        for x, y in (("L", "S"), ("L", "Sb"), ("T", "S"), ("S", "Sb"), ("L", "T"), ("Lb", "T"), ("L", "Lb")):
            v = bracket(self.frame[x], self.frame[y]).comps
            c = [sum((inv[k][i] * v[i] for i in range(len(ORDER))), Jet()) for k in range(len(ORDER))]
            self.brackets[(x, y)] = dict(zip(ORDER, c))
        ls, lsb, ts, ssb = (self.brackets[k] for k in (("L", "S"), ("L", "Sb"), ("T", "S"), ("S", "Sb")))
        self.functions = {
            "P": ls["T"], "Q": ls["S"], "R": ls["Sb"],
            "A": lsb["T"], "B": lsb["S"],
            "E": ts["T"], "F": ts["S"], "G": ts["Sb"],
            "J": ssb["T"] * QI(0, -1), "K": ssb["S"],
        }

    def atom_value(self, atom) -> Jet:
        if atom in self._cache:
            return self._cache[atom]
        kind, name, conj, word = atom
        if word:
            val = self.frame[word[0]](self.atom_value((kind, name, conj, word[1:])))
        else:
            val = self.functions[name]
            if conj:
                val = val.conjugate()
        self._cache[atom] = val
        return val

    def value(self, x: Scalar) -> QI:
        """Exact value at the base point of a group-free scalar."""
        total = QI(0)
        for m, c in x.terms.items():
            t = c
            for atom, e in m:
                if atom[0] != BASE:
                    raise ValueError("group parameters have no concrete value")
                v = self.atom_value(atom).at_base()
                t = t * (v.inverse() ** -e if e < 0 else _pow(v, e))
            total = total + t
        return total


def _pow(v: QI, e: int) -> QI:
    out = QI(1)
    for _ in range(e):
        out = out * v
    return out


def sample_structure(base=(sp.Rational(1, 2) + sp.I / 3, 1, -1, sp.Rational(1, 3))) -> ConcreteStructure:
    """The cubic model perturbed by terms depending on every coordinate."""
    I = sp.I
    return ConcreteStructure(
        I * zb + u2 * zb / 5,
        I * (2 * z * zb + zb**2) + z**2 * zb**2 / 3 + I * u1 * zb,
        2 * z * zb - zb**2 + u3 * z * zb / 2 - I * z**3,
        base,
    )
