"""Exact checks for the two-variable confluent hypergeometric connection

    nabla = d + dlog U,  U = u1^a u2^b s^c exp(alpha (x u1 + y u2)),  s = 1 + u1 + u2,

on the complement of u1 u2 s = 0 in the plane: the action on 1-forms, the
de Rham relations among 2-forms, reduction of polynomial 2-forms to the
basis du, u1 du, u2 du, and the Gauss-Manin system in (x, y).

Parameters are exact rationals. Every identity is checked as a polynomial
identity with zero residual, so nothing here has a tolerance.
"""

from __future__ import annotations

import functools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import qlinalg
from .polynomial import Poly, RatFunc2, XY_LIN
from .qlinalg import SparseMatrixQ


class InvalidParams(ValueError):
    pass


class IdentityFailed(AssertionError):
    pass


class ReductionDiverged(RuntimeError):
    pass


class MatrixMismatch(AssertionError):
    pass


class IntegrabilityFailed(AssertionError):
    pass


def _q(v) -> Fraction:
    if isinstance(v, float):
        raise InvalidParams("use exact rationals (Fraction or str), not floats")
    return Fraction(v)


@dataclass(frozen=True)
class CHGParams:
    """Exponents a, b, c with a + b + c = -3 and the scale alpha.

    Integral exponents are rejected unless ``allow_integral`` is set. The
    polynomial identities hold for every value; the flag exists because the
    standard numerical test case has c = -2. Even then 1 + c must not vanish,
    since the three-term relation is divided by it.
    """

    a: Fraction
    b: Fraction
    c: Fraction
    alpha: Fraction
    allow_integral: bool = False

    def __post_init__(self):
        for name in ("a", "b", "c", "alpha"):
            object.__setattr__(self, name, _q(getattr(self, name)))
        if self.a + self.b + self.c != -3:
            raise InvalidParams(f"a + b + c must be -3, got {self.a + self.b + self.c}")
        for name in ("a", "b", "c"):
            v = getattr(self, name)
            if v.denominator == 1 and (not self.allow_integral or v == -1):
                raise InvalidParams(f"{name} = {v} is an integer")
        if self.alpha == 0:
            raise InvalidParams("alpha must be nonzero")

    @classmethod
    def from_abalpha(cls, a, b, alpha, allow_integral: bool = False) -> "CHGParams":
        a, b = _q(a), _q(b)
        return cls(a, b, -3 - a - b, alpha, allow_integral)

    def as_tuple(self) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
        return self.a, self.b, self.c, self.alpha

    def to_json(self) -> dict:
        return {k: str(v) for k, v in zip(("a", "b", "c", "alpha"), self.as_tuple())}


def _check_point(x, y) -> Tuple[Fraction, Fraction]:
    x, y = _q(x), _q(y)
    if x == 0 or y == 0 or x == y:
        raise InvalidParams(f"(x, y) = ({x}, {y}) is on x = 0, y = 0 or x = y")
    return x, y


# --------------------------------------------------------------------------
# forms


S = Poly.linear(1, 1, 1)
U1 = Poly.monomial(1, 0)
U2 = Poly.monomial(0, 1)


@dataclass(frozen=True)
class OneForm:
    f: RatFunc2
    g: RatFunc2

    @classmethod
    def from_polys(cls, f: Poly, g: Poly) -> "OneForm":
        return cls(RatFunc2.poly(f), RatFunc2.poly(g))


@dataclass(frozen=True)
class TwoForm:
    """Coefficient of du = du1 ^ du2."""

    h: RatFunc2

    def is_zero(self) -> bool:
        return self.h.simplify().is_zero()

    def poly(self) -> Poly:
        return self.h.as_poly()


def _dlog(params: CHGParams, x: Fraction, y: Fraction) -> Tuple[RatFunc2, RatFunc2]:
    """Coefficients of du1 and du2 in dlog U."""
    a, b, c, al = params.as_tuple()
    w1 = RatFunc2(Poly.const(a), (1, 0, 0)) + RatFunc2(Poly.const(c), (0, 0, 1)) + al * x
    w2 = RatFunc2(Poly.const(b), (0, 1, 0)) + RatFunc2(Poly.const(c), (0, 0, 1)) + al * y
    return w1, w2


def nabla_function(params: CHGParams, x, y, h: RatFunc2) -> OneForm:
    x, y = _q(x), _q(y)
    w1, w2 = _dlog(params, x, y)
    return OneForm((h.diff(0) + h * w1).simplify(), (h.diff(1) + h * w2).simplify())


def nabla_one_form(params: CHGParams, x, y, form: OneForm) -> TwoForm:
    """(dg/du1 - df/du2 + g w1 - f w2) du for the form f du1 + g du2."""
    x, y = _q(x), _q(y)
    w1, w2 = _dlog(params, x, y)
    h = form.g.diff(0) - form.f.diff(1) + form.g * w1 - form.f * w2
    return TwoForm(h.simplify())


def exact_du2(params: CHGParams, x, y, p: int, q: int) -> Poly:
    """nabla(u1^p u2^q s du2) as a polynomial (needs p >= 1 to stay polynomial).

    Expanded by hand as (p+a) u1^(p-1) u2^q s + (1+c) u1^p u2^q + alpha x u1^p u2^q s.
    The ``_generic`` variants below go through ``nabla_one_form`` instead.
    """
    if p < 1 or q < 0:
        raise ValueError("need p >= 1, q >= 0")
    a, _, c, al = params.as_tuple()
    m = Poly.monomial(p, q)
    return Poly.monomial(p - 1, q, p + a) * S + m * (1 + c) + m * S * (al * _q(x))


def exact_du1(params: CHGParams, x, y, p: int, q: int) -> Poly:
    """nabla(u1^p u2^q s du1) as a polynomial (needs q >= 1)."""
    if q < 1 or p < 0:
        raise ValueError("need q >= 1, p >= 0")
    _, b, c, al = params.as_tuple()
    m = Poly.monomial(p, q)
    return -(Poly.monomial(p, q - 1, q + b) * S + m * (1 + c) + m * S * (al * _q(y)))


def exact_du2_generic(params: CHGParams, x, y, p: int, q: int) -> Poly:
    m = Poly.monomial(p, q)
    return nabla_one_form(params, x, y, OneForm.from_polys(Poly(), m * S)).poly()


def exact_du1_generic(params: CHGParams, x, y, p: int, q: int) -> Poly:
    m = Poly.monomial(p, q)
    return nabla_one_form(params, x, y, OneForm.from_polys(m * S, Poly())).poly()


# --------------------------------------------------------------------------
# the de Rham relations


@dataclass(frozen=True)
class Relation:
    """A claimed identity nabla(form) = sum coef_i * monomial_i."""

    name: str
    form: Tuple[Tuple[Tuple[Tuple[int, int], Fraction], ...], Tuple[Tuple[Tuple[int, int], Fraction], ...]]
    claimed: Tuple[Tuple[Tuple[int, int], Fraction], ...]

    def form_polys(self) -> Tuple[Poly, Poly]:
        return Poly(dict(self.form[0])), Poly(dict(self.form[1]))

    def claimed_poly(self) -> Poly:
        return Poly(dict(self.claimed))


def _terms(p: Poly):
    return tuple(sorted(p.terms.items()))


def relations(params: CHGParams, x, y) -> List[Relation]:
    """The two basic exact 2-forms with their expanded right-hand sides.

    The du2 form u1 s du2 is the one carrying alpha*x; the du1 form u2 s du1
    carries alpha*y.
    """
    a, b, c, al = params.as_tuple()
    x, y = _q(x), _q(y)
    gm_x = {(2, 0): al * x, (1, 1): al * x, (1, 0): al * x - (1 + b), (0, 1): 1 + a, (0, 0): 1 + a}
    gm_y = {(0, 2): -al * y, (1, 1): -al * y, (1, 0): -(1 + b), (0, 1): -(al * y - (1 + a)), (0, 0): -(1 + b)}
    return [
        Relation("GM_x: nabla(u1 s du2)", ((), _terms(U1 * S)), tuple(sorted(gm_x.items()))),
        Relation("GM_y: nabla(u2 s du1)", (_terms(U2 * S), ()), tuple(sorted(gm_y.items()))),
    ]


def combination_form(params: CHGParams, x, y) -> Tuple[Poly, Poly]:
    """(alpha x u1 + 1 + a) u2 s du1 + (alpha y u2 + 1 + b) u1 s du2."""
    a, b, c, al = params.as_tuple()
    x, y = _q(x), _q(y)
    f = (Poly({(1, 0): al * x, (0, 0): 1 + a}) * U2) * S
    g = (Poly({(0, 1): al * y, (0, 0): 1 + b}) * U1) * S
    return f, g


def gm3_poly(params: CHGParams, x, y) -> Poly:
    """alpha u1 u2 + (1+b)/(y-x) u1 - (1+a)/(y-x) u2, which must be exact."""
    a, b, c, al = params.as_tuple()
    x, y = _check_point(x, y)
    return Poly({(1, 1): al, (1, 0): (1 + b) / (y - x), (0, 1): -(1 + a) / (y - x)})


@dataclass
class IdentityRecord:
    name: str
    params: dict
    point: Tuple[str, str]
    residual: str
    passed: bool
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"identity": self.name, "instantiation": {**self.params, "x": self.point[0], "y": self.point[1]},
                "residual": self.residual, "pass": self.passed, **({"detail": self.detail} if self.detail else {})}


def _perturbed(rel: Relation, perturb: Optional[Tuple[str, Tuple[int, int], Fraction]]) -> Poly:
    claimed = rel.claimed_poly()
    if perturb and perturb[0] == rel.name:
        claimed = claimed + Poly({perturb[1]: perturb[2]})
    return claimed


def check_gm_relations(params: CHGParams, x, y, perturb=None, strict: bool = True) -> List[IdentityRecord]:
    """Verify the basic relations and the derived three-term relation.

    ``perturb = (relation name, monomial, delta)`` adds ``delta`` to one
    claimed coefficient; it exists for negative controls. Relation names are
    those of :func:`relations` plus ``"GM_3"``.
    """
    x, y = _check_point(x, y)
    records: List[IdentityRecord] = []
    pj, pt = params.to_json(), (str(x), str(y))
    for rel in relations(params, x, y):
        f, g = rel.form_polys()
        lhs = nabla_one_form(params, x, y, OneForm.from_polys(f, g)).poly()
        res = lhs - _perturbed(rel, perturb)
        records.append(IdentityRecord(rel.name, pj, pt, res.to_str(), res.is_zero()))

    # nabla of the combination is a multiple of the three-term polynomial
    f, g = combination_form(params, x, y)
    lhs = nabla_one_form(params, x, y, OneForm.from_polys(f, g)).poly()
    target = gm3_poly(params, x, y)
    if perturb and perturb[0] == "GM_3":
        target = target + Poly({perturb[1]: perturb[2]})
    basics = [nabla_one_form(params, x, y, OneForm.from_polys(*r.form_polys())).poly() for r in relations(params, x, y)]
    coeffs, res = _fit_combination(lhs, [target] + basics)
    ok = res.is_zero() and coeffs is not None and coeffs[0] != 0
    detail = {}
    if coeffs is not None:
        detail = {"scale": str(coeffs[0]), "GM_x": str(coeffs[1]), "GM_y": str(coeffs[2])}
    records.append(IdentityRecord("GM_3: nabla(combination) ~ three-term relation", pj, pt, res.to_str(), ok, detail))

    if strict:
        bad = [r for r in records if not r.passed]
        if bad:
            raise IdentityFailed("; ".join(f"{r.name}: residual {r.residual}" for r in bad))
    return records


def _fit_combination(lhs: Poly, basis: Sequence[Poly]) -> Tuple[Optional[List[Fraction]], Poly]:
    """Least-structure fit lhs = sum c_i basis_i by exact solve on coefficients."""
    monos = sorted(set(lhs.terms).union(*(set(b.terms) for b in basis)))
    row = {m: i for i, m in enumerate(monos)}
    rows: List[Dict[int, Fraction]] = [{} for _ in monos]
    for j, b in enumerate(basis):
        for m, v in b.terms.items():
            rows[row[m]][j] = v
    mat = SparseMatrixQ(len(monos), len(basis), rows)
    sol = qlinalg.solve(mat, {row[m]: v for m, v in lhs.terms.items()})
    if sol is None:
        # report the residual after the best triangular attempt: lhs itself
        return None, lhs
    coeffs = [sol.get(j, Fraction(0)) for j in range(len(basis))]
    res = lhs
    for cj, b in zip(coeffs, basis):
        res = res - b * cj
    return coeffs, res


# --------------------------------------------------------------------------
# reduction to the basis du, u1 du, u2 du


BASIS: Tuple[Tuple[int, int], ...] = ((0, 0), (1, 0), (0, 1))


def exact_generators(params: CHGParams, x, y, max_degree: int) -> List[Tuple[str, Poly]]:
    """All nabla(u1^p u2^q s du_i) that are polynomial, of degree <= max_degree."""
    gens = []
    for n in range(0, max_degree):
        for p in range(0, n + 1):
            q = n - p
            if p >= 1:
                gens.append((f"du2[{p},{q}]", exact_du2(params, x, y, p, q)))
            if q >= 1:
                gens.append((f"du1[{p},{q}]", exact_du1(params, x, y, p, q)))
    return gens


def _monomial_order(max_degree: int, larger_k_first: bool) -> List[Tuple[int, int]]:
    """Columns: highest total degree first; ties by k."""
    out = []
    for n in range(max_degree, -1, -1):
        ks = range(n, -1, -1) if larger_k_first else range(0, n + 1)
        out.extend((k, n - k) for k in ks)
    return out


class _Rewriter:
    """Echelon form of the exact generators in a fixed monomial order."""

    def __init__(self, params: CHGParams, x, y, max_degree: int, larger_k_first: bool = True):
        self.order = _monomial_order(max_degree, larger_k_first)
        self.col = {m: i for i, m in enumerate(self.order)}
        gens = exact_generators(params, x, y, max_degree)
        rows = [{self.col[m]: v for m, v in g.terms.items()} for _, g in gens]
        self.pivots = qlinalg.echelon(SparseMatrixQ(len(rows), len(self.order), rows))

    def normal_form(self, poly: Poly) -> Dict[Tuple[int, int], Fraction]:
        vec = {self.col[m]: v for m, v in poly.terms.items()}
        # rewrite the leading pivot monomial until none is left
        while True:
            hits = [c for c in vec if c in self.pivots]
            if not hits:
                break
            lead = min(hits)
            prow = self.pivots[lead]
            factor = vec[lead] / prow[lead]
            for c, v in prow.items():
                nv = vec.get(c, Fraction(0)) - factor * v
                if nv:
                    vec[c] = nv
                else:
                    vec.pop(c, None)
        return {self.order[c]: v for c, v in vec.items()}


@functools.lru_cache(maxsize=256)
def _rewriter(params: CHGParams, x: Fraction, y: Fraction, max_degree: int, larger_k_first: bool) -> _Rewriter:
    return _Rewriter(params, x, y, max_degree, larger_k_first)


def reduce_polynomial(params: CHGParams, x, y, poly: Poly, *, check_confluence: bool = True,
                      extra_degree: int = 2) -> Tuple[Fraction, Fraction, Fraction]:
    """Class of ``poly du`` in the basis (du, u1 du, u2 du).

    Runs the rewriting in two tie-break orders (and one extra degree of
    generators for the second) and insists on the same answer.
    """
    x, y = _check_point(x, y)
    top = max(poly.degree(), 1) + extra_degree
    runs = [(top, True)] + ([(top + 1, False)] if check_confluence else [])
    results = []
    for deg, larger in runs:
        nf = _rewriter(params, x, y, deg, larger).normal_form(poly)
        leftover = {m: v for m, v in nf.items() if m not in BASIS}
        if leftover:
            raise ReductionDiverged(f"monomials {sorted(leftover)} not reducible with generators up to degree {deg}")
        results.append(tuple(nf.get(m, Fraction(0)) for m in BASIS))
    if any(r != results[0] for r in results[1:]):
        raise ReductionDiverged(f"rewriting orders disagree: {results}")
    return results[0]


def reduce_to_basis(params: CHGParams, x, y, monomial: Tuple[int, int]) -> Tuple[Fraction, Fraction, Fraction]:
    k, l = monomial
    if k < 0 or l < 0:
        raise ValueError("exponents must be >= 0")
    return reduce_polynomial(params, x, y, Poly.monomial(k, l))


# --------------------------------------------------------------------------
# Gauss-Manin matrices


Matrix3 = List[List[RatFunc2]]


def _xy(num: Poly, den=(0, 0, 0)) -> RatFunc2:
    return RatFunc2(num, den, XY_LIN)


@dataclass
class GMMatrix:
    """Connection matrices in (x, y); column j is the image of basis element j."""

    params: CHGParams
    Ax: Matrix3
    Ay: Matrix3

    def at(self, x, y) -> Tuple[List[List[Fraction]], List[List[Fraction]]]:
        x, y = _check_point(x, y)
        return ([[e.evaluate(x, y) for e in row] for row in self.Ax],
                [[e.evaluate(x, y) for e in row] for row in self.Ay])

    def perturbed(self, which: str, i: int, j: int, delta=1) -> "GMMatrix":
        Ax = [row[:] for row in self.Ax]
        Ay = [row[:] for row in self.Ay]
        target = Ax if which == "x" else Ay
        target[i][j] = (target[i][j] + _xy(Poly.const(delta))).simplify()
        return GMMatrix(self.params, Ax, Ay)


def gm_matrix_literal(params: CHGParams) -> GMMatrix:
    """The closed-form connection matrices, entries as rational functions of (x, y)."""
    a, b, c, al = params.as_tuple()
    X, Y = Poly.monomial(1, 0), Poly.monomial(0, 1)
    zero = _xy(Poly())
    A = 1 + a
    B = 1 + b
    Ax = [
        [zero, _xy(Poly.const(-A), (1, 0, 0)), zero],
        [_xy(Poly.const(al)), _xy(Y * B, (1, 0, 1)) - al, _xy(Poly.const(-B), (0, 0, 1))],
        [zero, _xy(Y * (-A), (1, 0, 1)), _xy(Poly.const(A), (0, 0, 1))],
    ]
    Ay = [
        [zero, zero, _xy(Poly.const(-B), (0, 1, 0))],
        [zero, _xy(Poly.const(-B), (0, 0, 1)), _xy(X * B, (0, 1, 1))],
        [_xy(Poly.const(al)), _xy(Poly.const(A), (0, 0, 1)), _xy(X * (-A), (0, 1, 1)) - al],
    ]
    return GMMatrix(params, [[e.simplify() for e in r] for r in Ax], [[e.simplify() for e in r] for r in Ay])


def derived_columns(params: CHGParams, x, y) -> Tuple[List[List[Fraction]], List[List[Fraction]]]:
    """Columns obtained by reducing alpha u1 * basis and alpha u2 * basis."""
    x, y = _check_point(x, y)
    al = params.alpha
    Ax = [[Fraction(0)] * 3 for _ in range(3)]
    Ay = [[Fraction(0)] * 3 for _ in range(3)]
    for j, (k, l) in enumerate(BASIS):
        cx = reduce_to_basis(params, x, y, (k + 1, l))
        cy = reduce_to_basis(params, x, y, (k, l + 1))
        for i in range(3):
            Ax[i][j] = al * cx[i]
            Ay[i][j] = al * cy[i]
    return Ax, Ay


DEFAULT_POINTS: Tuple[Tuple[Fraction, Fraction], ...] = tuple(
    (Fraction(p), Fraction(q)) for p, q in
    [(-1, -2), (2, 5), (-3, 7), ("1/2", "-5/3"), (4, "-1/7"), ("-2/3", "-9/4"), (5, 11), ("7/5", "3/2")]
)


def verify_gm_matrix(matrix: GMMatrix, points: Sequence[Tuple[object, object]] = DEFAULT_POINTS) -> List[dict]:
    """Compare every entry with the derived columns at each point."""
    records = []
    mismatches = []
    for x, y in points:
        x, y = _check_point(x, y)
        lit_x, lit_y = matrix.at(x, y)
        der_x, der_y = derived_columns(matrix.params, x, y)
        for name, lit, der in (("Ax", lit_x, der_x), ("Ay", lit_y, der_y)):
            for i in range(3):
                for j in range(3):
                    ok = lit[i][j] == der[i][j]
                    records.append({"matrix": name, "entry": [i, j], "x": str(x), "y": str(y),
                                    "closed_form": str(lit[i][j]), "derived": str(der[i][j]), "pass": ok})
                    if not ok:
                        mismatches.append(f"{name}[{i}][{j}] at ({x},{y}): {lit[i][j]} vs {der[i][j]}")
    if mismatches:
        raise MatrixMismatch("; ".join(mismatches[:6]))
    return records


def gm_matrix(params: CHGParams, points: Sequence[Tuple[object, object]] = DEFAULT_POINTS) -> GMMatrix:
    m = gm_matrix_literal(params)
    verify_gm_matrix(m, points)
    return m


def _matmul(A, B):
    return [[sum((A[i][k] * B[k][j] for k in range(3)), Fraction(0)) for j in range(3)] for i in range(3)]


def integrability_residuals(matrix: GMMatrix, x, y) -> Dict[str, List[List[Fraction]]]:
    """Exact residuals of dAy/dx - dAx/dy - [Ax, Ay] and the transposed form."""
    x, y = _check_point(x, y)
    Ax, Ay = matrix.at(x, y)
    dAy_dx = [[e.diff(0).evaluate(x, y) for e in row] for row in matrix.Ay]
    dAx_dy = [[e.diff(1).evaluate(x, y) for e in row] for row in matrix.Ax]
    xy = _matmul(Ax, Ay)
    yx = _matmul(Ay, Ax)
    curl = [[dAy_dx[i][j] - dAx_dy[i][j] for j in range(3)] for i in range(3)]
    return {
        "curl - [Ax,Ay]": [[curl[i][j] - (xy[i][j] - yx[i][j]) for j in range(3)] for i in range(3)],
        "curl - [Ay,Ax]": [[curl[i][j] - (yx[i][j] - xy[i][j]) for j in range(3)] for i in range(3)],
    }


def check_integrability(params: CHGParams, sample_points: Sequence[Tuple[object, object]],
                        matrix: Optional[GMMatrix] = None) -> List[dict]:
    """Both commutator conventions must vanish exactly at every sample point."""
    matrix = matrix if matrix is not None else gm_matrix_literal(params)
    records = []
    failures = []
    for x, y in sample_points:
        res = integrability_residuals(matrix, x, y)
        for name, r in res.items():
            ok = all(v == 0 for row in r for v in row)
            records.append({"identity": name, "x": str(x), "y": str(y),
                            "residual": [[str(v) for v in row] for row in r], "pass": ok})
            if not ok:
                failures.append((name, (str(x), str(y)), [[str(v) for v in row] for row in r]))
    if failures:
        raise IntegrabilityFailed(json.dumps(failures[:2]))
    return records
