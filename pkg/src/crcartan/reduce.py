"""Reduction of the initial G-structure to an {e}-structure.

The lifted coframe of every stage is stored as a lower-triangular matrix
over the base coframe ``theta0``; exterior derivatives are always taken in
``theta0`` (plus group differentials) and then re-expressed in the lifted
basis, so there is one source of truth for ``d``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from . import exterior as ext
from .exterior import BASE, LIFTED, Form, FormError, change_basis, exterior_d, wedge
from .linalg import left_kernel, rref
from .qi import QI, I
from .scalar import GROUP, GROUP_NAMES, Scalar, ScalarError

FRAME = ("Sb", "S", "T", "Lb", "L")
N = 5


class ReductionError(RuntimeError):
    pass


def p(name: str, conj: bool = False, exp: int = 1) -> Scalar:
    return Scalar.param(name, conj, exp)


def one() -> Scalar:
    return Scalar.const(1)


def zero() -> Scalar:
    return Scalar()


# matrices ---------------------------------------------------------------
def identity():
    return [[one() if i == j else zero() for j in range(N)] for i in range(N)]


def matmul(x, y):
    return [[sum((x[i][k] * y[k][j] for k in range(N)), Scalar()) for j in range(N)] for i in range(N)]


def invert_lower(m):
    """Inverse of a lower-triangular matrix whose diagonal is invertible."""
    for i in range(N):
        for j in range(i + 1, N):
            if m[i][j]:
                raise ReductionError("matrix is not lower triangular")
    inv = [[zero() for _ in range(N)] for _ in range(N)]
    for i in range(N):
        dinv = m[i][i].inverse()
        inv[i][i] = dinv
        for j in range(i):
            s = Scalar()
            for k in range(j, i):
                s = s + m[i][k] * inv[k][j]
            inv[i][j] = -(dinv * s)
    return inv


def build_group_matrix():
    """Lifted coframe matrix of G_III1 acting on (sigmabar0, sigma0, rho0, zetabar0, zeta0)."""
    a, ab = p("a"), p("a", True)
    b, bb, c, cb = p("b"), p("b", True), p("c"), p("c", True)
    d, db, e, eb = p("d"), p("d", True), p("e"), p("e", True)
    z = zero()
    return [
        [a * ab * ab, z, z, z, z],
        [z, a * a * ab, z, z, z],
        [cb, c, a * ab, z, z],
        [eb, d, bb, ab, z],
        [db, e, b, z, a],
    ]


def substitute_matrix(m, f):
    return [[f(x) for x in row] for row in m]


def rows_as_forms(m, names: Sequence[str]) -> list[Form]:
    out = []
    for row in m:
        f = Form(1)
        for c, n in zip(row, names):
            if c:
                f = f + Form.one(n, c)
        out.append(f)
    return out


# Maurer-Cartan forms ----------------------------------------------------
def maurer_cartan_matrix(g):
    """Entries of ``dg . g^-1`` as 1-forms in the group differentials."""
    ginv = invert_lower(g)
    dg = [[ext.differential(x) for x in row] for row in g]
    out = []
    for i in range(N):
        row = []
        for j in range(N):
            f = Form(1)
            for k in range(N):
                if dg[i][k] and ginv[k][j]:
                    f = f + dg[i][k].scale(ginv[k][j])
            row.append(f)
        out.append(row)
    return out


def decompose(form: Form, basis: Mapping[str, Form]):
    """Constants ``c`` with ``form = sum c[name] * basis[name]``, or ``None``."""
    names = list(basis)
    keys = sorted({(m, mono) for f in list(basis.values()) + [form]
                   for m, c in f.terms.items() for mono in c.terms},
                  key=repr)
    rows = []
    for m, mono in keys:
        row = [basis[n].terms.get(m, Scalar()).terms.get(mono, QI(0)) for n in names]
        row.append(form.terms.get(m, Scalar()).terms.get(mono, QI(0)))
        rows.append(row)
    if not rows:
        return {}
    red, piv = rref(rows)
    if len(names) in piv:
        return None
    out = {}
    for r, col in enumerate(piv):
        if red[r][col] and red[r][len(names)]:
            out[names[col]] = red[r][len(names)]
    check = Form(1)
    for n, c in out.items():
        check = check + basis[n].scale(Scalar.const(c))
    return out if check == form else None


# printed shape of dg.g^-1 at the first stage: entry -> named combination
STAGE0_PATTERN = {
    (0, 0): {"alpha1": 1, "alphabar1": 2},
    (1, 1): {"alpha1": 2, "alphabar1": 1},
    (2, 0): {"alphabar2": 1}, (2, 1): {"alpha2": 1}, (2, 2): {"alpha1": 1, "alphabar1": 1},
    (3, 0): {"alphabar3": 1}, (3, 1): {"alphabar4": 1}, (3, 2): {"alphabar5": 1}, (3, 3): {"alphabar1": 1},
    (4, 0): {"alpha4": 1}, (4, 1): {"alpha3": 1}, (4, 2): {"alpha5": 1}, (4, 4): {"alpha1": 1},
}


@dataclass
class MaurerCartan:
    matrix: list
    forms: dict            # name -> Form in group differentials
    pattern: dict          # (i, j) -> {name: QI}


def extract_mc(omega, definitions: Mapping[str, tuple], conj_pairs: Mapping[str, str],
               pattern: Mapping | None = None) -> MaurerCartan:
    """Name entries of ``omega`` and express every entry through the names.

    ``definitions`` maps a name to the matrix position defining it.  Each
    name's conjugate must equal the entry defining the conjugate name, and
    when ``pattern`` is given every entry must match it exactly.
    """
    forms = {n: omega[i][j] for n, (i, j) in definitions.items()}
    for n, nb in conj_pairs.items():
        if forms[n].conjugate() != forms[nb]:
            raise ReductionError(f"{n} and {nb} are not conjugate")
    found = {}
    for i in range(N):
        for j in range(N):
            ent = omega[i][j]
            if pattern is not None:
                want = pattern.get((i, j), {})
                f = Form(1)
                for n, c in want.items():
                    f = f + forms[n].scale(Scalar.const(c))
                if f != ent:
                    raise ReductionError(f"dg.g^-1 entry ({i + 1},{j + 1}) violates the expected pattern")
                found[(i, j)] = {n: QI.coerce(c) for n, c in want.items()}
            else:
                dec = decompose(ent, forms)
                if dec is None:
                    raise ReductionError(f"entry ({i + 1},{j + 1}) is not a combination of named forms")
                if dec:
                    found[(i, j)] = dec
    return MaurerCartan(omega, forms, found)


# stages -----------------------------------------------------------------
@dataclass
class TorsionReport:
    stage: str
    full: dict          # lifted name -> d(name) in lifted basis + group differentials
    mc_part: dict       # lifted name -> group-differential part
    torsion: dict       # lifted name -> semibasic 2-form

    def coeff(self, form: str, x: str, y: str) -> Scalar:
        return self.torsion[form].coeff(x, y)

    def table(self) -> dict:
        return {n: [(m, self.torsion[n].coeff(*m)) for m in ext.ordered_two_forms(LIFTED)]
                for n in LIFTED}

    def reconstructs(self) -> bool:
        return all(self.mc_part[n] + self.torsion[n] == self.full[n] for n in LIFTED)


class Stage:
    """Lifted coframe ``theta = g . n . theta0``."""

    def __init__(self, name: str, g, n, rules: Mapping[str, Form] | None = None):
        self.name = name
        self.g = g
        self.n = n
        self.rules = dict(rules or ext.darboux_structure())
        self.total = matmul(g, n)
        self.total_inv = invert_lower(self.total)
        self._report = None

    def inverse_map(self) -> dict:
        """theta0 in terms of the lifted coframe."""
        return dict(zip(BASE, rows_as_forms(self.total_inv, LIFTED)))

    def lifted_in_base(self) -> dict:
        return dict(zip(LIFTED, rows_as_forms(self.total, BASE)))

    def to_lifted(self, form: Form) -> Form:
        return change_basis(form, self.inverse_map())

    def d(self, form_in_base: Form) -> Form:
        """Exterior derivative of a base-coframe form, returned in the lifted basis."""
        return self.to_lifted(exterior_d(form_in_base, self.rules))

    def torsion(self) -> TorsionReport:
        if self._report is None:
            full, mc, tor = {}, {}, {}
            for name, f in self.lifted_in_base().items():
                df = self.d(f)
                full[name] = df
                is_mc = lambda m: any(ext.generation(s) == "group" for s in m)
                mc[name] = Form(2, {m: c for m, c in df.terms.items() if is_mc(m)})
                tor[name] = Form(2, {m: c for m, c in df.terms.items() if not is_mc(m)})
            self._report = TorsionReport(self.name, full, mc, tor)
        return self._report

    def maurer_cartan(self, definitions, conj_pairs, pattern=None) -> MaurerCartan:
        return extract_mc(maurer_cartan_matrix(self.g), definitions, conj_pairs, pattern)

    def mc_reconstruction(self, mc: MaurerCartan) -> dict:
        """Group-differential part predicted by ``dg.g^-1 ^ theta``."""
        out = {}
        for i, name in enumerate(LIFTED):
            f = Form(2)
            for j, other in enumerate(LIFTED):
                if mc.matrix[i][j]:
                    f = f + wedge(mc.matrix[i][j], Form.one(other))
            out[name] = f
        return out

    def intermediate_rules(self, names: Sequence[str]) -> dict:
        """``d`` of the intermediate coframe ``n . theta0`` expressed in itself."""
        inv = dict(zip(BASE, rows_as_forms(invert_lower(self.n), names)))
        out = {}
        for name, f in zip(names, rows_as_forms(self.n, BASE)):
            out[name] = change_basis(exterior_d(f, self.rules), inv)
        return out


# absorption -------------------------------------------------------------
@dataclass
class AbsorptionSystem:
    rows: list             # (form, monomial)
    unknowns: list         # (mc name, lifted name)
    matrix: list           # rows x unknowns of QI
    t0: list               # Scalars
    cokernel: list         # left-kernel basis vectors

    def row_index(self, form: str, *mono: str) -> tuple[int, int]:
        m, sign = ext._sort_sign(tuple(mono))
        return self.rows.index((form, m)), sign

    def vector(self, entries: Iterable[tuple]) -> list:
        """Row-combination vector from ``(coeff, form, x, y)`` entries."""
        v = [QI(0)] * len(self.rows)
        for c, form, x, y in entries:
            k, sign = self.row_index(form, x, y)
            v[k] = v[k] + QI.coerce(c) * sign
        return v

    def is_essential(self, vec: list) -> bool:
        return all(not sum((vec[r] * self.matrix[r][col] for r in range(len(self.rows))), QI(0))
                   for col in range(len(self.unknowns)))

    def evaluate(self, vec: list) -> Scalar:
        out = Scalar()
        for c, t in zip(vec, self.t0):
            if c:
                out = out + t * Scalar.const(c)
        return out

    def essential_torsion(self) -> list:
        return [self.evaluate(v) for v in self.cokernel]


def absorb(report: TorsionReport, mc: MaurerCartan, modified: Sequence[str],
           rows: Sequence[str] = LIFTED) -> AbsorptionSystem:
    """Affine map ``t(u) = t0 + M u`` for ``F -> F~ + sum_k u[F,k] theta_k``."""
    monos = ext.ordered_two_forms(LIFTED)
    row_labels = [(f, m) for f in rows for m in monos]
    unknowns = [(F, k) for F in modified for k in LIFTED]
    mat = []
    for form, mono in row_labels:
        i = LIFTED.index(form)
        row = []
        for F, k in unknowns:
            v = QI(0)
            for j in range(N):
                c = mc.pattern.get((i, j), {}).get(F)
                if not c:
                    continue
                m, sign = ext._sort_sign((k, LIFTED[j]))
                if m == mono:
                    v = v + c * sign
            row.append(v)
        mat.append(row)
    t0 = [report.coeff(form, *mono) for form, mono in row_labels]
    return AbsorptionSystem(row_labels, unknowns, mat, t0, left_kernel(mat))


# normalization ----------------------------------------------------------
def _group_linear(expr: Scalar, unknowns: set):
    """``{(name, conj): coeff}, rest`` if ``expr`` is affine in the unknown parameters."""
    coeffs: dict = {}
    rest = {}
    for m, c in expr.terms.items():
        hits = [(atom, e) for atom, e in m if atom[0] == GROUP and (atom[1], atom[2]) in unknowns]
        if not hits:
            rest[m] = c
            continue
        if len(hits) != 1 or hits[0][1] != 1:
            return None
        atom = hits[0][0]
        key = (atom[1], atom[2])
        cof = tuple(x for x in m if x[0] != atom)
        coeffs[key] = coeffs.get(key, Scalar()) + Scalar({cof: c})
    return coeffs, Scalar(rest)


def solve_normalizations(targets: Sequence[Scalar], unknowns: Iterable[str]) -> dict:
    """Solve ``targets = 0`` (and conjugates) for group parameters.

    Elimination proceeds one parameter at a time, always through an
    equation where the parameter's coefficient is an invertible monomial.
    Returns ``{(name, conj): Scalar}`` for every parameter and conjugate.
    """
    unknowns = {(n, c) for n in unknowns for c in (False, True)}
    eqs = []
    for t in targets:
        eqs.append(t)
        eqs.append(t.conjugate())
    solved: dict = {}
    pending = list(eqs)
    while unknowns - set(solved):
        progress = False
        for k, eq in enumerate(pending):
            eq = eq.substitute_group(solved) if solved else eq
            pending[k] = eq
            lin = _group_linear(eq, unknowns - set(solved))
            if lin is None:
                continue
            coeffs, rest = lin
            for key in sorted(coeffs):
                c = coeffs[key]
                if c and c.is_invertible_monomial():
                    others = Scalar()
                    for k2, c2 in coeffs.items():
                        if k2 != key:
                            others = others + c2 * Scalar.param(k2[0], k2[1])
                    val = -(rest + others) * c.inverse()
                    solved = {kk: vv.substitute_group({key: val}) for kk, vv in solved.items()}
                    solved[key] = val
                    conj_key = (key[0], not key[1])
                    if conj_key in unknowns and conj_key not in solved:
                        cv = val.conjugate()
                        solved = {kk: vv.substitute_group({conj_key: cv}) for kk, vv in solved.items()}
                        solved[conj_key] = cv
                    progress = True
                    break
            if progress:
                break
        if not progress:
            missing = sorted(unknowns - set(solved))
            raise ReductionError(f"no target is linear with invertible coefficient in {missing}")
    for _ in range(len(solved)):
        solved = {k: v.substitute_group(solved) for k, v in solved.items()}
    for k, v in solved.items():
        if any(atom[0] == GROUP and (atom[1], atom[2]) in unknowns for atom in v.atoms()):
            raise ReductionError(f"normalization of {k} is not explicit")
    for t in targets:
        if t.substitute_group(solved):
            raise ReductionError("normalization does not annihilate its target")
    return solved


def split_normalized(g_sub, keep: Iterable[str]):
    """Factor ``g_sub = g' . n`` with ``n`` group-free and unit diagonal.

    Entries involving the still-free parameters ``keep`` (other than the
    diagonal ``a``) stay in ``g'``; the remaining entries, divided by the
    row's diagonal weight, form ``n``.
    """
    keep = set(keep)
    g2 = [[zero() for _ in range(N)] for _ in range(N)]
    n = [[zero() for _ in range(N)] for _ in range(N)]
    for i in range(N):
        diag = g_sub[i][i]
        dinv = diag.inverse()
        g2[i][i] = diag
        n[i][i] = one()
        for j in range(i):
            free_part, kept = Scalar(), Scalar()
            for m, c in g_sub[i][j].terms.items():
                t = Scalar({m: c})
                if any(atom[0] == GROUP and atom[1] in keep for atom, _ in m):
                    kept = kept + t
                else:
                    free_part = free_part + t
            q = free_part * dinv
            if not q.group_free():
                raise ReductionError(f"entry ({i + 1},{j + 1}) does not carry the row weight")
            n[i][j] = q
            g2[i][j] = kept
    # g_sub = g2' . n requires kept parts to sit only on columns with unit n-rows
    if matmul(g2, n) != g_sub:
        g2 = [[zero() for _ in range(N)] for _ in range(N)]
        for i in range(N):
            g2[i][i] = g_sub[i][i]
            for j in range(i):
                s = g_sub[i][j]
                for k in range(j + 1, i + 1):
                    s = s - g2[i][k] * n[k][j]
                g2[i][j] = s
        if matmul(g2, n) != g_sub:
            raise ReductionError("cannot factor the normalized group matrix")
    return g2, n


# weights ----------------------------------------------------------------
WEIGHTS = {
    "sigmabar": (1, 2), "sigma": (2, 1), "rho": (1, 1), "zetabar": (0, 1), "zeta": (1, 0),
    "lambda": (0, 0), "lambdabar": (0, 0),
}


def weight_scalar(w: tuple) -> Scalar:
    return p("a", False, w[0]) * p("a", True, w[1]) if w != (0, 0) else one()


def coefficient_weight(form: str, x: str, y: str) -> tuple:
    wf, wx, wy = WEIGHTS[form], WEIGHTS[x], WEIGHTS[y]
    return (wf[0] - wx[0] - wy[0], wf[1] - wx[1] - wy[1])


def factor_weight(c: Scalar, w: tuple):
    """Group-free cofactor of ``c`` w.r.t. the a-weight ``w``, or ``None``."""
    q = c * weight_scalar(w).inverse()
    return q if q.group_free() else None


def flat(x: Scalar) -> Scalar:
    """Drop every term carrying a base function (the model case)."""
    return Scalar({m: c for m, c in x.terms.items() if all(atom[0] == GROUP for atom, _ in m)})


# the reduction ----------------------------------------------------------
STAGE0_DEFS = {"alpha1": (4, 4), "alphabar1": (3, 3), "alpha2": (2, 1), "alphabar2": (2, 0),
               "alpha3": (4, 1), "alphabar3": (3, 0), "alpha4": (4, 0), "alphabar4": (3, 1),
               "alpha5": (4, 2), "alphabar5": (3, 2)}
STAGE1_DEFS = {"beta1": (4, 4), "betabar1": (3, 3), "beta2": (4, 1), "betabar2": (3, 0)}
STAGE2_DEFS = {"gamma1": (4, 4), "gammabar1": (3, 3)}


def _pairs(defs):
    return {n: n.replace(n.rstrip("0123456789"), n.rstrip("0123456789") + "bar", 1)
            for n in defs if "bar" not in n}


def essential_targets(rep: TorsionReport) -> dict:
    """The first-loop normalization targets by name."""
    c = rep.coeff
    x6b = c("sigma", "sigma", "zetabar").conjugate()
    return {
        "X2": c("sigma", "sigmabar", "rho"),
        "X4": c("sigma", "sigmabar", "zeta"),
        "X6bar+X7-3Y8bar": x6b + c("sigma", "sigma", "zeta")
        - Scalar.const(3) * c("rho", "rho", "zetabar").conjugate(),
    }


ESSENTIAL_VECTORS = {
    "X2": [(1, "sigma", "sigmabar", "rho")],
    "X3": [(1, "sigma", "sigmabar", "zetabar")],
    "X4": [(1, "sigma", "sigmabar", "zeta")],
    "X6bar+X7-3Y8bar": [(1, "sigmabar", "sigmabar", "zeta"), (1, "sigma", "sigma", "zeta"),
                        (-3, "rho", "rho", "zeta")],
}


@dataclass
class LoopResult:
    stage: Stage
    mc: MaurerCartan
    torsion: TorsionReport
    absorption: AbsorptionSystem
    normalization: dict
    checks: dict = field(default_factory=dict)


def first_loop() -> LoopResult:
    st = Stage("initial", build_group_matrix(), identity())
    mc = st.maurer_cartan(STAGE0_DEFS, _pairs(STAGE0_DEFS), STAGE0_PATTERN)
    rep = st.torsion()
    ab = absorb(rep, mc, ["alpha1", "alphabar1", "alpha2", "alphabar2"], rows=("sigmabar", "sigma", "rho"))
    targets = essential_targets(rep)
    sol = solve_normalizations([targets["X2"], targets["X4"], targets["X6bar+X7-3Y8bar"]], ["b", "c", "d"])
    checks = {f"{k} essential": ab.is_essential(ab.vector(v)) for k, v in ESSENTIAL_VECTORS.items()}
    combo = ab.vector(ESSENTIAL_VECTORS["X6bar+X7-3Y8bar"])
    checks["invariant combination"] = ab.evaluate(combo) == targets["X6bar+X7-3Y8bar"]
    recon = st.mc_reconstruction(mc)
    checks["maurer-cartan reconstructs"] = all(recon[n] == rep.mc_part[n] for n in LIFTED)
    return LoopResult(st, mc, rep, ab, sol, checks)


def second_loop(first: LoopResult) -> LoopResult:
    gsub = substitute_matrix(first.stage.total, lambda x: x.substitute_group(first.normalization))
    g1, n1 = split_normalized(gsub, ["e"])
    st = Stage("second", g1, n1)
    mc = st.maurer_cartan(STAGE1_DEFS, _pairs(STAGE1_DEFS))
    rep = st.torsion()
    ab = absorb(rep, mc, ["beta1", "betabar1"], rows=("sigmabar", "sigma", "rho"))
    y4 = rep.coeff("rho", "sigmabar", "zeta")
    sol = solve_normalizations([y4.conjugate()], ["e"])
    inter = st.intermediate_rules(ext.coframe_names("1"))
    t = inter["rho1"].coeff("sigmabar1", "zeta1")
    a_, ab_ = p("a"), p("a", True)
    predicted = t * (a_ * ab_).inverse() + Scalar.const(I) * p("e", True) * (a_ * ab_ * ab_).inverse()
    checks = {
        "Y'4 essential": ab.is_essential(ab.vector([(1, "rho", "sigmabar", "zeta")])),
        "Y'4 formula": y4 == predicted,
        "maurer-cartan reconstructs": all(st.mc_reconstruction(mc)[n] == rep.mc_part[n] for n in LIFTED),
    }
    x6 = rep.coeff("sigma", "sigma", "zetabar")
    x7 = rep.coeff("sigma", "sigma", "zeta")
    third = Scalar.const(QI(1, 0) / 3)
    checks["Y'8 = X'6/3 + conj(X'7)/3"] = rep.coeff("rho", "rho", "zetabar") == third * (x6 + x7.conjugate())
    checks["X'2 = X'4 = 0"] = not rep.coeff("sigma", "sigmabar", "rho") and not rep.coeff("sigma", "sigmabar", "zeta")
    res = LoopResult(st, mc, rep, ab, sol, checks)
    res.t_rho1 = t
    return res


@dataclass
class FinalStructure:
    stage: Stage
    solution: dict          # (mc name, lifted) -> Scalar, for lambda and lambdabar
    equations: dict         # lifted/lambda name -> Form in (lambdabar, lambda, sigmabar, ..., zeta)
    connection: Form        # lambda in the lifted basis plus da
    checks: dict
    killed: list            # (form, monomial) rows forced to zero


FINAL_PRIORITY = ("sigma", "sigmabar", "rho", "zeta", "zetabar")


def _choose_rows(ab: AbsorptionSystem, priority: Sequence[str]) -> list:
    """Greedy independent rows in priority order, closed under conjugation."""
    chosen, mat = [], []
    from .linalg import rank
    order = [(f, m) for f in priority for (ff, m) in ab.rows if ff == f]
    for f, m in order:
        k = ab.rows.index((f, m))
        if k in chosen:
            continue
        cf = ext.conj_symbol(f)
        cm, _ = ext._sort_sign(tuple(ext.conj_symbol(s) for s in m))
        kc = ab.rows.index((cf, cm))
        trial = mat + [ab.matrix[k]] + ([ab.matrix[kc]] if kc != k else [])
        if rank(trial) == len(trial):
            chosen.extend([k] + ([kc] if kc != k else []))
            mat = trial
    return chosen


def final_structure(second: LoopResult) -> FinalStructure:
    gsub = substitute_matrix(second.stage.total, lambda x: x.substitute_group(second.normalization))
    g2, n2 = split_normalized(gsub, [])
    st = Stage("final", g2, n2)
    mc = st.maurer_cartan(STAGE2_DEFS, _pairs(STAGE2_DEFS))
    rep = st.torsion()
    ab = absorb(rep, mc, ["gamma1", "gammabar1"], rows=LIFTED)
    rows = _choose_rows(ab, FINAL_PRIORITY)
    from .linalg import solve_affine
    eqs = []
    for k in rows:
        coeffs = {u: c for u, c in zip(ab.unknowns, ab.matrix[k]) if c}
        eqs.append((coeffs, ab.t0[k]))
    sol = solve_affine(eqs)
    for u in ab.unknowns:
        sol.setdefault(u, Scalar())
    # connection form: lambda = da/a - sum u theta
    lam = Form.one("da", p("a").inverse())
    for (F, k), v in sol.items():
        if F == "gamma1" and v:
            lam = lam - Form.one(k, v)
    lam_bar = lam.conjugate()
    # rewrite da, dabar through lambda, lambdabar
    da_sub = {"da": (Form.one("lambda") - lam + Form.one("da", p("a").inverse())).scale(p("a"))}
    da_sub["dabar"] = (Form.one("lambdabar") - lam_bar + Form.one("dabar", p("a", True).inverse())).scale(p("a", True))
    eqs_out = {}
    for name in LIFTED:
        eqs_out[name] = change_basis(rep.full[name], da_sub)
    # d lambda = -sum d(u_k theta_k), computed on the base coframe
    base_of = st.lifted_in_base()
    corr = Form(1)
    for (F, k), v in sol.items():
        if F == "gamma1" and v:
            corr = corr + base_of[k].scale(v)
    dlam = -change_basis(st.d(corr), da_sub)
    eqs_out["lambda"] = dlam
    eqs_out["lambdabar"] = dlam.conjugate()
    checks = {
        "lambdabar is conjugate": all(sol[("gammabar1", ext.conj_symbol(k))] == sol[("gamma1", k)].conjugate()
                                     for k in LIFTED),
        "absorbed rows vanish": all(not eqs_out[ab.rows[k][0]].coeff(*ab.rows[k][1]) for k in rows),
        "no group differentials": all(not any(ext.generation(s) == "group" for m in f.terms for s in m)
                                      for f in eqs_out.values()),
    }
    return FinalStructure(st, sol, eqs_out, lam, checks, [ab.rows[k] for k in rows])


def torsion_weights_ok(final: FinalStructure) -> dict:
    """Every torsion coefficient equals its a-weight times a group-free function."""
    bad = []
    names = ("lambdabar", "lambda") + LIFTED
    for name in ("lambda",) + LIFTED:
        for m, c in final.equations[name].terms.items():
            if any(s in ("lambda", "lambdabar") for s in m):
                if not c.is_constant():
                    bad.append((name, m))
                continue
            w = coefficient_weight(name, *m)
            if factor_weight(c, w) is None:
                bad.append((name, m))
    return {"ok": not bad, "bad": bad}


@dataclass
class Reduction:
    first: LoopResult
    second: LoopResult
    final: FinalStructure


def run_reduction() -> Reduction:
    first = first_loop()
    second = second_loop(first)
    return Reduction(first, second, final_structure(second))


# invariants -------------------------------------------------------------
W_MONOMIALS = ext.ordered_two_forms(LIFTED)

INVARIANT_SLOTS = [("Rbar", "sigma", ("sigmabar", "zetabar")),
                   ("V1", "rho", ("sigmabar", "sigma")),
                   ("V3", "rho", ("sigmabar", "zetabar"))] + \
    [(f"W{k + 1}", "zeta", m) for k, m in enumerate(W_MONOMIALS)]


@dataclass
class Invariant:
    name: str
    form: str
    monomial: tuple
    weight: tuple
    value: Scalar          # group-free cofactor

    def to_json(self) -> dict:
        from .scalar import to_string
        return {"name": self.name, "form": self.form, "monomial": list(self.monomial),
                "weight": {"a": self.weight[0], "abar": self.weight[1]}, "value": to_string(self.value)}


def invariant_table(final: FinalStructure) -> dict:
    """Named torsion of the final equations, each divided by its a-weight.

    Every nonzero torsion coefficient is listed: the named slots first,
    then any other coefficient of d sigma, d rho (named by form and
    monomial), then the ``I`` entries of d lambda.
    """
    eq = final.equations
    out: dict = {}
    seen = set()

    def put(name, form, mono):
        c = eq[form].coeff(*mono)
        w = coefficient_weight(form, *mono)
        v = factor_weight(c, w)
        if v is None:
            raise ReductionError(f"a-weight factorization fails for d{form} on {'^'.join(mono)}")
        out[name] = Invariant(name, form, mono, w, v)
        seen.add((form, mono))

    for name, form, mono in INVARIANT_SLOTS:
        put(name, form, mono)
    for form in ("sigmabar", "sigma", "rho", "zetabar"):
        for mono in W_MONOMIALS:
            if (form, mono) not in seen and eq[form].coeff(*mono):
                put(f"d{form}[{'^'.join(mono)}]", form, mono)
    for mono in W_MONOMIALS:
        put(f"I[{mono[0]},{mono[1]}]", "lambda", mono)
    return out


def printed_shape_report(final: FinalStructure) -> dict:
    """Which torsion slots are nonzero, per form, against the displayed shape."""
    displayed = {
        "sigma": {("sigmabar", "zetabar"), ("rho", "zeta")},
        "rho": {("sigmabar", "sigma"), ("sigmabar", "zetabar"), ("sigma", "rho"), ("zetabar", "zeta")},
        "zeta": set(W_MONOMIALS),
    }
    out = {}
    for form, shape in displayed.items():
        got = {m for m in W_MONOMIALS if final.equations[form].coeff(*m)}
        out[form] = {"computed": sorted(got), "displayed": sorted(shape),
                     "only_computed": sorted(got - shape), "only_displayed": sorted(shape - got)}
    return out


def is_real_equation(final: FinalStructure, name: str = "rho") -> bool:
    """``d name`` is fixed by conjugation (``name`` self-conjugate)."""
    f = final.equations[name]
    return f.conjugate() == f
