"""LaTeX rendering of scalars and forms."""
from __future__ import annotations

from fractions import Fraction

from .exterior import Form
from .qi import QI
from .scalar import GROUP, Scalar

_GREEK = {"alpha", "beta", "gamma", "lambda", "sigma", "rho", "zeta", "omega"}
_GROUP_DIFF = {f"d{n}{b}" for n in "abcde" for b in ("", "bar")}
_LETTER = {"L": r"\mathcal{L}", "Lb": r"\overline{\mathcal{L}}", "T": r"\mathcal{T}",
           "S": r"\mathcal{S}", "Sb": r"\overline{\mathcal{S}}"}


def _frac(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return rf"\frac{{{q.numerator}}}{{{q.denominator}}}"


def _qi(c: QI) -> str:
    return rf"\left({_frac(c.re)} + {_frac(c.im)}\sqrt{{-1}}\right)"


def _name(base: str, conj: bool) -> str:
    head = rf"\{base}" if base in _GREEK else base
    return rf"\bar{{{head}}}" if conj else head


def symbol_latex(name: str) -> str:
    """``sigmabar1`` -> ``\\bar{\\sigma}_1``, ``dabar`` -> ``d\\bar{a}``."""
    if name in _GROUP_DIFF:
        return "d" + _name(name[1], name.endswith("bar"))
    stem, _, tail = name.partition("_")
    digits = ""
    while stem and stem[-1].isdigit():
        stem, digits = stem[:-1], stem[-1] + digits
    conj = stem.endswith("bar") and stem != "bar"
    if conj:
        stem = stem[:-3]
    s = _name(stem, conj)
    if stem in ("alpha", "beta", "gamma") and digits:
        return s + "^" + digits
    sub = digits or tail
    return f"{s}_{{{sub}}}" if sub else s


def _atom(atom) -> str:
    kind, name, conj, word = atom
    s = _name(name, conj)
    for letter in reversed(word):
        s = f"{_LETTER[letter]}({s})"
    return s


def scalar_latex(x: Scalar) -> str:
    if not x.terms:
        return "0"
    out = []
    for m, c in x.sorted_terms():
        num, den = [], []
        for atom, e in m:
            s = _atom(atom)
            target = num if e > 0 else den
            k = abs(e)
            target.append(s if k == 1 else f"{s}^{{{k}}}" if atom[0] == GROUP or not atom[3] else f"({s})^{{{k}}}")
        neg = (not c.im and c.re < 0) or (not c.re and c.im < 0)
        if neg:
            c = -c
        body = " ".join(num)
        if c.im and not c.re:
            coeff = ("" if c.im == 1 else _frac(c.im) + " ") + r"\sqrt{-1}"
        elif c.im:
            coeff = _qi(c)
        else:
            coeff = "" if c.re == 1 and (num or den) else _frac(c.re)
        if den:
            term = rf"{coeff} \frac{{{body or '1'}}}{{{' '.join(den)}}}".strip()
        else:
            term = f"{coeff} {body}".strip()
        out.append(("- " if neg else "+ ") + term)
    s = " ".join(out)
    return s[2:] if s.startswith("+ ") else "-" + s[2:]


def form_latex(x: Form) -> str:
    if not x.terms:
        return "0"
    parts = []
    for m, c in x.sorted_terms():
        mono = r" \wedge ".join(symbol_latex(s) for s in m)
        cs = scalar_latex(c)
        if cs == "1":
            parts.append("+ " + mono)
        elif cs == "-1":
            parts.append("- " + mono)
        elif len(c.terms) == 1:
            parts.append(("- " + cs[1:] if cs.startswith("-") else "+ " + cs) + " " + mono)
        else:
            parts.append(rf"+ \left({cs}\right) {mono}")
    s = " ".join(parts)
    return s[2:] if s.startswith("+ ") else "-" + s[2:]


def equation_latex(name: str, x: Form) -> str:
    return f"d{symbol_latex(name)} &= {form_latex(x)}"
