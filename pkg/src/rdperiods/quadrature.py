"""Tensor exp-sinh (double-exponential) quadrature on (0, inf)^2.

Each axis is mapped by u = scale * exp(pi/2 * sinh t) and integrated with the
trapezoidal rule in t. Levels halve the step; the error estimate is the
difference between the last two levels. The integrand is given as a product
of per-axis factors and a coupling term, so the axis factors (the expensive
singular and exponential parts) are evaluated once per node.

Working precision above 15 digits runs on mpmath, otherwise on numpy.
"""

from __future__ import annotations

import contextlib
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import mpmath
import numpy as np


_HALF_ULP = 2.0 ** -53


class NoConvergence(RuntimeError):
    pass


@dataclass(frozen=True)
class AxisMap:
    """u = scale * exp(pi/2 sinh t) for t in [t_lo, t_hi]."""

    scale: float
    t_lo: float
    t_hi: float

    @classmethod
    def for_decay(cls, scale: float, endpoint_power: float, growth_power: float, digits: int) -> "AxisMap":
        """Truncation fitted to u^endpoint_power near 0 and u^growth_power e^(-u/scale) at infinity.

        Both ends are cut where the integrand has fallen below 10^-(digits+5)
        relative to its size at u ~ scale.
        """
        if scale <= 0:
            raise ValueError("scale must be positive")
        if endpoint_power <= -1:
            raise ValueError("endpoint singularity is not integrable")
        log_eps = -(digits + 5) * math.log(10)
        # left: (u/scale)^(1+p) < eps, the extra 1 comes from du
        xi_lo = log_eps / (1 + endpoint_power)
        t_lo = math.asinh(2 / math.pi * xi_lo)
        # right: xi^P e^-xi < eps with xi = u/scale
        P = max(growth_power, 0.0) + 2
        xi = -log_eps
        for _ in range(50):
            xi = -log_eps + P * math.log(max(xi, 1.0))
        t_hi = math.asinh(2 / math.pi * math.log(xi))
        return cls(float(scale), t_lo, t_hi)


def _level_indices(axis: AxisMap, level: int, h0: float, max_level: int) -> List[int]:
    """Integer node labels k with t = k * h0 / 2^max_level, at step h0 / 2^level."""
    stride = 2 ** (max_level - level)
    unit = h0 / 2 ** max_level
    lo = math.ceil(axis.t_lo / unit / stride) * stride
    hi = math.floor(axis.t_hi / unit / stride) * stride
    return list(range(lo, hi + 1, stride))


@dataclass
class QuadResult:
    values: List[complex]
    errors: List[float]
    level: int
    n_nodes: int
    history: List[List[complex]] = field(default_factory=list)


class _Axis:
    """Node positions and weights for one axis, cached across levels."""

    def __init__(self, amap: AxisMap, h0: float, max_level: int, use_mp: bool):
        self.amap = amap
        self.unit = h0 / 2 ** max_level
        self.use_mp = use_mp
        self._cache: Dict[int, Tuple[object, object]] = {}

    def node(self, k: int):
        hit = self._cache.get(k)
        if hit is None:
            if self.use_mp:
                t = mpmath.mpf(k) * mpmath.mpf(self.unit)
                e = mpmath.exp(mpmath.pi / 2 * mpmath.sinh(t))
                u = self.amap.scale * e
                w = u * mpmath.pi / 2 * mpmath.cosh(t)
            else:
                t = k * self.unit
                e = math.exp(math.pi / 2 * math.sinh(t))
                u = self.amap.scale * e
                w = u * math.pi / 2 * math.cosh(t)
            hit = (u, w)
            self._cache[k] = hit
        return hit


def integrate_product(
    left: Callable,
    right: Callable,
    coupling: Callable,
    axes: Tuple[AxisMap, AxisMap],
    *,
    rel_tol: float,
    abs_tol: float,
    max_level: int = 8,
    min_level: int = 3,
    precision: int = 25,
    h0: float = 0.5,
    fixed_level: Optional[int] = None,
) -> QuadResult:
    """Integrate left(u1) * right(u2) * coupling(u1, u2) over (0, inf)^2.

    ``coupling`` returns a sequence of components, all integrated on the same
    mesh. With ``precision > 15`` the callables receive mpmath numbers and
    are called pointwise; otherwise they receive numpy arrays (coupling gets
    a broadcast 2-D grid) and must return arrays.

    Converged when every component changes by at most
    max(rel_tol * |value|, abs_tol) between consecutive levels. With
    ``fixed_level`` the rule runs exactly that level and reports the
    difference to the level below as the error.
    """
    use_mp = precision > 15
    top = fixed_level if fixed_level is not None else max_level
    if top < 1:
        raise ValueError("need at least level 1")
    ctx = mpmath.workdps(precision) if use_mp else contextlib.nullcontext()
    with ctx:
        ax = [_Axis(a, h0, top, use_mp) for a in axes]
        lcache: Dict[int, object] = {}
        rcache: Dict[int, object] = {}
        pair_cache: Dict[Tuple[int, int], Sequence] = {}
        history: List[List[complex]] = []
        start = max(0, (fixed_level - 1) if fixed_level is not None else 0)
        prev = None
        for level in range(start, top + 1):
            i1 = _level_indices(axes[0], level, h0, top)
            i2 = _level_indices(axes[1], level, h0, top)
            h = h0 / 2 ** level
            if use_mp:
                raw = [v * h * h for v in _sum_mp(ax, i1, i2, left, right, coupling, lcache, rcache, pair_cache)]
            else:
                raw = [v * h * h for v in _sum_np(ax, i1, i2, left, right, coupling)]
            vals = [complex(v) for v in raw]
            history.append(vals)
            if prev is not None:
                # level difference at working precision plus rounding to double
                errs = [float(abs(r - p)) + abs(v) * _HALF_ULP for r, p, v in zip(raw, prev, vals)]
                done = all(e <= max(rel_tol * abs(v), abs_tol) for e, v in zip(errs, vals))
                if fixed_level is not None or (done and level >= min_level):
                    return QuadResult(vals, errs, level, len(i1) * len(i2), history)
            prev = raw
    raise NoConvergence(f"no convergence by level {top}; last values {history[-1]}, "
                        f"change {[abs(v - p) for v, p in zip(history[-1], history[-2])]}")


def _sum_mp(ax, i1, i2, left, right, coupling, lcache, rcache, pair_cache):
    L = []
    for k in i1:
        if k not in lcache:
            u, w = ax[0].node(k)
            lcache[k] = (u, w * left(u))
        L.append(lcache[k])
    R = []
    for k in i2:
        if k not in rcache:
            u, w = ax[1].node(k)
            rcache[k] = (u, w * right(u))
        R.append(rcache[k])
    total = None
    for a, (u1, f1) in zip(i1, L):
        for b, (u2, f2) in zip(i2, R):
            key = (a, b)
            comps = pair_cache.get(key)
            if comps is None:
                c = coupling(u1, u2)
                comps = [f1 * f2 * ci for ci in c]
                pair_cache[key] = comps
            if total is None:
                total = list(comps)
            else:
                for n, v in enumerate(comps):
                    total[n] += v
    return total


def _sum_np(ax, i1, i2, left, right, coupling):
    n1 = [ax[0].node(k) for k in i1]
    n2 = [ax[1].node(k) for k in i2]
    u1 = np.array([u for u, _ in n1])
    w1 = np.array([w for _, w in n1])
    u2 = np.array([u for u, _ in n2])
    w2 = np.array([w for _, w in n2])
    f1 = w1 * left(u1)
    f2 = w2 * right(u2)
    comps = coupling(u1[:, None], u2[None, :])
    return [np.sum(f1[:, None] * f2[None, :] * c) for c in comps]

