"""Good rank-one local models exp(x1^-m1 x2^-m2 u(x)) and their invariants.

Only (m1, m2, u(0)) is kept: the dimension formulas and the Stokes set
depend on nothing else.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np
from scipy import ndimage


class NotGood(ValueError):
    pass


class NotIrregular(ValueError):
    pass


class ZeroUnit(ValueError):
    pass


class InvalidStratum(ValueError):
    pass


class ResolutionTooCoarse(RuntimeError):
    pass


class StratumKind(str, enum.Enum):
    CROSSING = "crossing"
    COMPONENT = "component"
    SMOOTH = "smooth"

    @classmethod
    def parse(cls, text: str) -> "StratumKind":
        aliases = {
            "crossing": cls.CROSSING, "crossingpoint": cls.CROSSING,
            "component": cls.COMPONENT, "componentatcrossing": cls.COMPONENT,
            "smooth": cls.SMOOTH, "smoothpoint": cls.SMOOTH,
        }
        key = text.replace("_", "").replace("-", "").lower()
        if key not in aliases:
            raise InvalidStratum(f"unknown stratum {text!r}")
        return aliases[key]


@dataclass(frozen=True)
class ExponentialFactor:
    m1: int
    m2: int
    u0: complex

    def to_json(self) -> dict:
        return {"m1": self.m1, "m2": self.m2, "u0_re": self.u0.real, "u0_im": self.u0.imag}


DimensionTable = Dict[int, int]


def make_model(m1: int, m2: int, u0: complex = 1.0) -> ExponentialFactor:
    if m1 < 0 or m2 < 0:
        raise NotGood(f"pole orders must be non-negative, got ({m1}, {m2})")
    if m1 + m2 < 1:
        raise NotIrregular("m1 = m2 = 0 is a regular model")
    u0 = complex(u0)
    if u0 == 0:
        raise ZeroUnit("u(0) must be nonzero")
    return ExponentialFactor(int(m1), int(m2), u0)


def gcd0(m1: int, m2: int) -> int:
    """gcd with gcd(0, m) = m."""
    return math.gcd(m1, m2)


def _phase(model: ExponentialFactor, theta1, theta2):
    return -model.m1 * theta1 - model.m2 * theta2 + cmath.phase(model.u0)


def stokes_contains(model: ExponentialFactor, theta1: float, theta2: float) -> bool:
    """Whether exp(alpha) decays along the direction (theta1, theta2).

    The test is Re(alpha) < 0 on the ray, i.e. the phase lies in the open
    interval (pi/2, 3pi/2) mod 2pi; it is done with the cosine so the two
    boundary directions are rejected without an explicit mod.
    """
    ph = _phase(model, theta1, theta2)
    c = math.cos(ph)
    # treat cosines at rounding level as zero so boundary angles stay outside
    return c < -1e-12


def stokes_grid(model: ExponentialFactor, samples_per_axis: int) -> np.ndarray:
    """Boolean n x n mask of Stokes cell centres on the torus."""
    n = samples_per_axis
    theta = (np.arange(n) + 0.5) * (2 * np.pi / n)
    t1, t2 = np.meshgrid(theta, theta, indexing="ij")
    return np.cos(_phase(model, t1, t2)) < 0


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb


def count_torus_components(mask: np.ndarray) -> int:
    """Connected components of a periodic boolean grid, 4-neighbour adjacency."""
    labels, n = ndimage.label(mask)
    if n == 0:
        return 0
    uf = UnionFind(n + 1)
    # glue the seams: last row to first row, last column to first column
    for a, b in ((labels[-1, :], labels[0, :]), (labels[:, -1], labels[:, 0])):
        for x, y in zip(a, b):
            if x and y:
                uf.union(int(x), int(y))
    return len({uf.find(i) for i in range(1, n + 1)})


def stokes_component_count(model: ExponentialFactor, samples_per_axis: int = 512) -> int:
    if model.m1 < 1 or model.m2 < 1:
        raise ValueError("component count needs m1, m2 >= 1")
    if samples_per_axis < 8 * (model.m1 + model.m2):
        raise ResolutionTooCoarse(f"need at least {8 * (model.m1 + model.m2)} samples per axis")
    count = count_torus_components(stokes_grid(model, samples_per_axis))
    finer = count_torus_components(stokes_grid(model, 2 * samples_per_axis))
    if count != finer:
        raise ResolutionTooCoarse(f"{count} components at n={samples_per_axis}, {finer} at 2n")
    return count


def _check_stratum(model: ExponentialFactor, stratum: StratumKind) -> StratumKind:
    if not isinstance(stratum, StratumKind):
        stratum = StratumKind.parse(stratum)
    if stratum is StratumKind.SMOOTH and model.m2 != 0:
        raise InvalidStratum("a smooth point has a single divisor component, m2 must be 0")
    if stratum is not StratumKind.CROSSING and model.m1 < 1:
        raise InvalidStratum("component and smooth strata need m1 >= 1")
    return stratum


def rd_dimensions(model: ExponentialFactor, stratum) -> DimensionTable:
    """Rapid-decay homology dimensions in degrees >= 1."""
    stratum = _check_stratum(model, stratum)
    if stratum is StratumKind.CROSSING:
        d = gcd0(model.m1, model.m2)
        return {2: d, 3: d}
    if stratum is StratumKind.COMPONENT:
        return {1: model.m1, 2: model.m1}
    return {1: model.m1}


def dr_dimensions(model: ExponentialFactor, stratum) -> DimensionTable:
    """Irregularity de Rham cohomology dimensions."""
    stratum = _check_stratum(model, stratum)
    if stratum is StratumKind.CROSSING:
        d = gcd0(model.m1, model.m2)
        return {0: d, 1: d}
    if stratum is StratumKind.COMPONENT:
        return {0: model.m1, 1: model.m1}
    return {0: model.m1}


# dR degree -> rd degree
DUALITY_PAIRS: Dict[StratumKind, Tuple[Tuple[int, int], ...]] = {
    StratumKind.CROSSING: ((0, 2), (1, 3)),
    StratumKind.COMPONENT: ((0, 1), (1, 2)),
    StratumKind.SMOOTH: ((0, 1),),
}


def duality_check(model: ExponentialFactor, stratum) -> bool:
    stratum = _check_stratum(model, stratum)
    rd = rd_dimensions(model, stratum)
    dr = dr_dimensions(model, stratum)
    pairs = DUALITY_PAIRS[stratum]
    paired_dr = {p for p, _ in pairs}
    paired_rd = {q for _, q in pairs}
    if any(v for p, v in dr.items() if p not in paired_dr):
        return False
    if any(v for q, v in rd.items() if q not in paired_rd):
        return False
    return all(dr.get(p, 0) == rd.get(q, 0) for p, q in pairs)


def table_json(table: DimensionTable) -> Dict[str, int]:
    return {str(k): v for k, v in sorted(table.items())}
