"""Periods of the confluent hypergeometric example over the chamber cycle.

F_omega(x, y) = int_{(0,inf)^2} u1^a u2^b s^c exp(alpha (x u1 + y u2)) omega,
omega in {du, u1 du, u2 du}, with principal branches on the open quadrant.
The quadrant is a rapid-decay cycle as long as Re(alpha x) and Re(alpha y)
are negative; outside that chamber nothing is computed.

Two engines: the tensor exp-sinh rule of :mod:`quadrature` and an oracle
made of nested QUADPACK calls. They share no code beyond the integrand
parameters.
"""

from __future__ import annotations

import cmath
import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import mpmath
import numpy as np
from scipy import integrate

from . import chg_symbolic
from .chg_symbolic import CHGParams
from .quadrature import AxisMap, NoConvergence, QuadResult, integrate_product

__all__ = [
    "ChamberViolation", "NoConvergence", "StepTooLarge", "NotIntegrable",
    "EvaluationPoint", "QuadratureSpec", "PeriodVector", "Mesh",
    "integrand", "moments", "period_vector", "oracle_period_vector",
    "exactness_polys", "exactness_residual", "gm_residual", "period_table_csv",
]

OMEGA_TAGS = {"du": (0, 0), "u1du": (1, 0), "u2du": (0, 1)}
BASIS = ((0, 0), (1, 0), (0, 1))


class ChamberViolation(ValueError):
    pass


class NotIntegrable(ValueError):
    pass


class StepTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class EvaluationPoint:
    x: complex
    y: complex
    decays_x: bool
    decays_y: bool

    @classmethod
    def make(cls, params: CHGParams, x, y) -> "EvaluationPoint":
        al = complex(params.alpha)
        x, y = complex(x), complex(y)
        return cls(x, y, (al * x).real < 0, (al * y).real < 0)

    @property
    def in_chamber(self) -> bool:
        return self.decays_x and self.decays_y

    def shifted(self, params: CHGParams, dx=0, dy=0) -> "EvaluationPoint":
        return EvaluationPoint.make(params, self.x + dx, self.y + dy)

    def to_json(self) -> dict:
        return {"x": [self.x.real, self.x.imag], "y": [self.y.real, self.y.imag],
                "decays_x": self.decays_x, "decays_y": self.decays_y}


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_level: int = 8
    precision: int = 25

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_level < 1:
            raise ValueError("max_level must be >= 1")
        if self.rel_tol < 10.0 ** -(self.precision - 6):
            raise ValueError(f"rel_tol {self.rel_tol} needs more than {self.precision} working digits")


@dataclass(frozen=True)
class Mesh:
    """Axis maps and level; reusing one mesh makes nearby evaluations comparable."""

    axes: Tuple[AxisMap, AxisMap]
    level: int


@dataclass(frozen=True)
class PeriodVector:
    F_du: complex
    F_u1du: complex
    F_u2du: complex
    err: Tuple[float, float, float]
    point: EvaluationPoint
    params: CHGParams
    mesh: Optional[Mesh] = None

    def as_array(self) -> np.ndarray:
        return np.array([self.F_du, self.F_u1du, self.F_u2du], dtype=complex)

    def norm(self) -> float:
        return float(np.max(np.abs(self.as_array())))


# --------------------------------------------------------------------------
# integrand


def _checked(params: CHGParams, point: EvaluationPoint) -> None:
    if not point.in_chamber:
        raise ChamberViolation(f"Re(alpha x) and Re(alpha y) must be negative, got point {point}")
    if params.a <= -1 or params.b <= -1:
        raise NotIntegrable("need Re a > -1 and Re b > -1 for integrability at the axes")


def integrand(params: CHGParams, point: EvaluationPoint, omega_tag: str, u1: float, u2: float) -> complex:
    """U(u1, u2) times the monomial of omega, principal branch, double precision."""
    if u1 <= 0 or u2 <= 0:
        raise ValueError("u1, u2 must be positive")
    i, j = OMEGA_TAGS[omega_tag]
    a, b, c, al = (float(v) for v in params.as_tuple())
    s = 1.0 + u1 + u2
    log_u = a * math.log(u1) + b * math.log(u2) + c * math.log(s)
    return cmath.exp(log_u + al * (point.x * u1 + point.y * u2)) * u1 ** i * u2 ** j


def _mp_const(v) -> object:
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / v.denominator
    v = complex(v)
    return mpmath.mpf(v.real) if v.imag == 0 else mpmath.mpc(v.real, v.imag)


def default_mesh_axes(params: CHGParams, point: EvaluationPoint, degree: int, spec: QuadratureSpec):
    al = complex(params.alpha)
    a, b, c = (float(v) for v in (params.a, params.b, params.c))
    grow = degree + max(c, 0.0) + 1
    ax1 = AxisMap.for_decay(1 / abs((al * point.x).real), a, grow + max(a, 0.0), spec.precision)
    ax2 = AxisMap.for_decay(1 / abs((al * point.y).real), b, grow + max(b, 0.0), spec.precision)
    return ax1, ax2


def moments(params: CHGParams, point: EvaluationPoint, monomials: Sequence[Tuple[int, int]],
            spec: QuadratureSpec = QuadratureSpec(), mesh: Optional[Mesh] = None) -> Tuple[List[complex], List[float], Mesh]:
    """int U u1^i u2^j du over the chamber, all monomials on one mesh.

    With ``mesh`` given the rule runs at exactly that mesh (no adaptivity).
    """
    _checked(params, point)
    degree = max(i + j for i, j in monomials)
    axes = mesh.axes if mesh else default_mesh_axes(params, point, degree, spec)
    use_mp = spec.precision > 15
    if use_mp:
        with mpmath.workdps(spec.precision):
            a, b, c, al = (_mp_const(v) for v in params.as_tuple())
            ax_, ay_ = al * _mp_const(point.x), al * _mp_const(point.y)
            c_int = int(params.c) if params.c.denominator == 1 else None

        def left(u):
            return mpmath.power(u, a) * mpmath.exp(ax_ * u)

        def right(u):
            return mpmath.power(u, b) * mpmath.exp(ay_ * u)

        def coupling(u1, u2):
            s = 1 + u1 + u2
            sc = s ** c_int if c_int is not None else mpmath.power(s, c)
            return [sc * u1 ** i * u2 ** j for i, j in monomials]
    else:
        a, b, c, al = (float(v) for v in params.as_tuple())
        ax_, ay_ = complex(params.alpha) * point.x, complex(params.alpha) * point.y

        def left(u):
            return u ** a * np.exp(ax_ * u)

        def right(u):
            return u ** b * np.exp(ay_ * u)

        def coupling(u1, u2):
            sc = (1 + u1 + u2) ** c
            return [sc * u1 ** i * u2 ** j for i, j in monomials]

    kw = dict(rel_tol=spec.rel_tol, abs_tol=spec.abs_tol, precision=spec.precision)
    if mesh:
        res: QuadResult = integrate_product(left, right, coupling, axes, fixed_level=mesh.level, **kw)
    else:
        res = integrate_product(left, right, coupling, axes, max_level=spec.max_level, **kw)
    return res.values, res.errors, Mesh(tuple(axes), res.level)


def period_vector(params: CHGParams, point: EvaluationPoint, spec: QuadratureSpec = QuadratureSpec(),
                  mesh: Optional[Mesh] = None) -> PeriodVector:
    vals, errs, used = moments(params, point, BASIS, spec, mesh)
    return PeriodVector(vals[0], vals[1], vals[2], tuple(errs), point, params, used)


# --------------------------------------------------------------------------
# oracle: nested adaptive Gauss-Kronrod


def _quad_complex_half_line(f, power: float, epsrel: float) -> Tuple[complex, float]:
    re, e_re = _quad_real(lambda u: f(u).real, power, epsrel)
    im, e_im = _quad_real(lambda u: f(u).imag, power, epsrel)
    return complex(re, im), e_re + e_im


def _quad_real(g, power: float, epsrel: float) -> Tuple[float, float]:
    v1, e1 = integrate.quad(g, 0.0, 1.0, weight="alg", wvar=(power, 0.0), epsabs=1e-300, epsrel=epsrel, limit=200)
    v2, e2 = integrate.quad(lambda u: u ** power * g(u), 1.0, np.inf, epsabs=1e-300, epsrel=epsrel, limit=200)
    return v1 + v2, e1 + e2


def oracle_period_vector(params: CHGParams, point: EvaluationPoint, epsrel: float = 1e-12,
                         monomials: Sequence[Tuple[int, int]] = BASIS) -> Tuple[List[complex], List[float]]:
    """Iterated scipy.integrate.quad in double precision, u2 inner, u1 outer."""
    _checked(params, point)
    a, b, c = float(params.a), float(params.b), float(params.c)
    ax_, ay_ = complex(params.alpha) * point.x, complex(params.alpha) * point.y
    vals, errs = [], []
    for i, j in monomials:
        def inner(u1, i=i, j=j):
            def g(u2):
                return (1 + u1 + u2) ** c * u2 ** j * cmath.exp(ay_ * u2)
            v, e = _quad_complex_half_line(g, b, epsrel)
            return v * u1 ** i * cmath.exp(ax_ * u1), e

        err_acc = [0.0]

        def outer(u1):
            v, e = inner(u1)
            err_acc[0] = max(err_acc[0], e)
            return v

        v, e = _quad_complex_half_line(outer, a, epsrel)
        vals.append(v)
        errs.append(e + err_acc[0])
    return vals, errs


# --------------------------------------------------------------------------
# residual checks


def exactness_polys(params: CHGParams, point: EvaluationPoint) -> Dict[str, Dict[Tuple[int, int], complex]]:
    """Coefficients of the three exact 2-forms, complex-valued in (x, y)."""
    a, b, al = complex(params.a), complex(params.b), complex(params.alpha)
    x, y = point.x, point.y
    if x == y:
        raise ValueError("x = y is excluded")
    return {
        "GM_x": {(2, 0): al * x, (1, 1): al * x, (1, 0): al * x - (1 + b), (0, 1): 1 + a, (0, 0): 1 + a},
        "GM_y": {(0, 2): -al * y, (1, 1): -al * y, (1, 0): -(1 + b), (0, 1): -(al * y - (1 + a)), (0, 0): -(1 + b)},
        "GM_3": {(1, 1): al, (1, 0): (1 + b) / (y - x), (0, 1): -(1 + a) / (y - x)},
    }


@dataclass
class ExactnessResidual:
    residuals: Dict[str, complex]
    relative: Dict[str, float]
    period_norm: float
    errors: Dict[str, float]

    def max_relative(self) -> float:
        return max(self.relative.values())


def exactness_residual(params: CHGParams, point: EvaluationPoint,
                       spec: QuadratureSpec = QuadratureSpec()) -> ExactnessResidual:
    polys = exactness_polys(params, point)
    monos = sorted({m for p in polys.values() for m in p} | set(BASIS))
    vals, errs, _ = moments(params, point, monos, spec)
    M = dict(zip(monos, vals))
    E = dict(zip(monos, errs))
    norm = max(abs(M[m]) for m in BASIS)
    res = {k: sum(c * M[m] for m, c in p.items()) for k, p in polys.items()}
    err = {k: sum(abs(c) * E[m] for m, c in p.items()) for k, p in polys.items()}
    return ExactnessResidual(res, {k: abs(v) / norm for k, v in res.items()}, norm, err)


@dataclass
class GMResidual:
    """Finite-difference derivatives of F against the connection matrices.

    ``per_identity`` maps names such as ``d/dx F[0]`` to relative residuals
    after Richardson extrapolation. ``plain`` holds the central-difference
    residual at step and step/2, ``order`` the observed convergence order.
    """

    residual: float
    per_identity: Dict[str, float]
    plain: Tuple[float, float]
    plain_per_identity: Tuple[Dict[str, float], Dict[str, float]]
    order: float
    fd_error_estimate: float
    step: float
    center: PeriodVector = field(repr=False, default=None)

    def to_json(self) -> dict:
        return {"residual": self.residual, "per_identity": self.per_identity, "plain": list(self.plain),
                "plain_per_identity": list(self.plain_per_identity), "order": self.order,
                "fd_error_estimate": self.fd_error_estimate, "step": self.step}


def _gm_numeric(params: CHGParams, point: EvaluationPoint) -> Tuple[np.ndarray, np.ndarray]:
    m = chg_symbolic.gm_matrix_literal(params)
    x, y = point.x, point.y
    if x == 0 or y == 0 or x == y:
        raise ValueError("x, y must avoid 0 and the diagonal")
    ev = lambda M: np.array([[complex(e.evaluate(x, y)) for e in row] for row in M])  # noqa: E731
    return ev(m.Ax), ev(m.Ay)


def gm_residual(params: CHGParams, point: EvaluationPoint, step: float = 1e-3,
                spec: QuadratureSpec = QuadratureSpec(), max_fd_error: float = 1e-3) -> GMResidual:
    """dF/dx = Ax^T F and dF/dy = Ay^T F, checked by central differences.

    Column j of Ax is the image of basis form j, so the period of the image
    is row j of Ax^T F; this fixes the transpose. All shifted evaluations
    reuse the mesh of the centre so quadrature error does not leak into the
    differences.
    """
    _checked(params, point)
    scale = min(abs(point.x), abs(point.y), abs(point.x - point.y))
    if step <= 0 or step > 0.1 * scale:
        raise StepTooLarge(f"step {step} not small against |x|, |y|, |x-y| (min {scale:.3g})")
    centre = period_vector(params, point, spec)
    F = centre.as_array()
    norm = centre.norm()
    Ax, Ay = _gm_numeric(params, point)
    want = {"x": Ax.T @ F, "y": Ay.T @ F}

    def deriv(h):
        out = {}
        for var, (dx, dy) in (("x", (h, 0)), ("y", (0, h))):
            fp = period_vector(params, point.shifted(params, dx, dy), spec, centre.mesh).as_array()
            fm = period_vector(params, point.shifted(params, -dx, -dy), spec, centre.mesh).as_array()
            out[var] = (fp - fm) / (2 * h)
        return out

    d1, d2 = deriv(step), deriv(step / 2)
    rich = {v: (4 * d2[v] - d1[v]) / 3 for v in ("x", "y")}

    def per_id(d):
        return {f"d/d{v} F[{i}]": float(abs(d[v][i] - want[v][i])) / norm for v in ("x", "y") for i in range(3)}

    fd_err = max(float(np.max(np.abs(rich[v] - d2[v]))) for v in ("x", "y")) / norm
    if fd_err > max_fd_error:
        raise StepTooLarge(f"Richardson error estimate {fd_err:.3g} exceeds {max_fd_error:g}")
    per, p1, p2 = per_id(rich), per_id(d1), per_id(d2)
    r1, r2 = max(p1.values()), max(p2.values())
    order = math.log2(r1 / r2) if r1 > 0 and r2 > 0 else float("inf")
    return GMResidual(max(per.values()), per, (r1, r2), (p1, p2), order, fd_err, step, centre)


# --------------------------------------------------------------------------
# output


CSV_FIELDS = ["a", "b", "c", "alpha", "x_re", "x_im", "y_re", "y_im",
              "F_du_re", "F_du_im", "F_u1du_re", "F_u1du_im", "F_u2du_re", "F_u2du_im",
              "err_du", "err_u1du", "err_u2du"]


def period_row(pv: PeriodVector) -> dict:
    p = pv.params
    row = {"a": str(p.a), "b": str(p.b), "c": str(p.c), "alpha": str(p.alpha),
           "x_re": pv.point.x.real, "x_im": pv.point.x.imag, "y_re": pv.point.y.real, "y_im": pv.point.y.imag}
    for tag, v in (("du", pv.F_du), ("u1du", pv.F_u1du), ("u2du", pv.F_u2du)):
        row[f"F_{tag}_re"] = repr(v.real)
        row[f"F_{tag}_im"] = repr(v.imag)
    for tag, e in zip(("du", "u1du", "u2du"), pv.err):
        row[f"err_{tag}"] = repr(e)
    return row


def period_table_csv(vectors: Sequence[PeriodVector]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for pv in vectors:
        w.writerow(period_row(pv))
    return buf.getvalue()
