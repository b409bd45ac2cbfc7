"""Cellular chain complexes over Q for the quotient spaces behind the
rapid-decay dimension tables.

Spaces are assembled from small CW complexes with two operations, the
product and the collapse of a subcomplex to a point, and their homology is
read off by exact rank computations.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Hashable, List, Optional, Tuple, Union

from . import qlinalg
from .qlinalg import SparseMatrixQ


class SpecTooCoarse(ValueError):
    pass


class NotAComplex(ValueError):
    pass


# --------------------------------------------------------------------------
# chain complexes


@dataclass
class ChainComplexQ:
    """``boundaries[k]`` maps degree k to degree k-1 (shape dims[k-1] x dims[k]).

    ``boundaries[0]`` is the zero map out of degree 0. ``reduced`` marks a
    pointed quotient space, for which homology is reported reduced.
    """

    dims: List[int]
    boundaries: List[SparseMatrixQ]
    reduced: bool = False

    def __post_init__(self):
        if len(self.boundaries) != len(self.dims):
            raise NotAComplex("need one boundary matrix per degree")
        for k, b in enumerate(self.boundaries):
            rows = self.dims[k - 1] if k > 0 else 0
            if b.shape != (rows, self.dims[k]):
                raise NotAComplex(f"boundary[{k}] has shape {b.shape}, expected {(rows, self.dims[k])}")
        for k in range(2, len(self.dims)):
            if not self.boundaries[k - 1].matmul(self.boundaries[k]).is_zero():
                raise NotAComplex(f"boundary[{k - 1}] . boundary[{k}] != 0")

    @classmethod
    def zero(cls) -> "ChainComplexQ":
        return cls([], [])

    def euler_from_cells(self) -> int:
        return sum((-1) ** k * d for k, d in enumerate(self.dims)) - (1 if self.reduced else 0)

    def to_json(self) -> dict:
        return {
            "cells": list(self.dims),
            "reduced": self.reduced,
            "boundaries": [[[i, j, int(v)] for i, j, v in b.triplets()] for b in self.boundaries],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def homology_dims(complex_: ChainComplexQ) -> Dict[int, int]:
    """Betti numbers over Q, reduced when the complex is flagged reduced."""
    ranks = [qlinalg.rank(b) for b in complex_.boundaries] + [0]
    out: Dict[int, int] = {}
    for k, d in enumerate(complex_.dims):
        h = d - ranks[k] - ranks[k + 1]
        if k == 0 and complex_.reduced:
            h -= 1
        if h:
            out[k] = h
    return out


# --------------------------------------------------------------------------
# CW complexes


Cell = Hashable


@dataclass
class CWComplex:
    """Cells by dimension with integer cellular boundaries."""

    cells: List[List[Cell]] = field(default_factory=list)
    boundary: Dict[Tuple[int, Cell], Dict[Cell, int]] = field(default_factory=dict)

    def add(self, dim: int, cell: Cell, faces: Optional[Dict[Cell, int]] = None) -> Cell:
        while len(self.cells) <= dim:
            self.cells.append([])
        self.cells[dim].append(cell)
        self.boundary[(dim, cell)] = {f: c for f, c in (faces or {}).items() if c}
        return cell

    @property
    def dim(self) -> int:
        return len(self.cells) - 1

    def chain_complex(self, reduced: bool = False) -> ChainComplexQ:
        dims = [len(c) for c in self.cells]
        index = [{c: i for i, c in enumerate(cs)} for cs in self.cells]
        mats = [SparseMatrixQ(0, dims[0] if dims else 0)] if dims else []
        for k in range(1, len(dims)):
            rows: List[Dict[int, Fraction]] = [{} for _ in range(dims[k - 1])]
            for j, cell in enumerate(self.cells[k]):
                for face, coef in self.boundary[(k, cell)].items():
                    i = index[k - 1][face]
                    rows[i][j] = rows[i].get(j, Fraction(0)) + coef
            mats.append(SparseMatrixQ(dims[k - 1], dims[k], rows))
        return ChainComplexQ(dims, mats, reduced)


def point() -> CWComplex:
    cw = CWComplex()
    cw.add(0, "pt")
    return cw


def circle(n: int = 1) -> CWComplex:
    """S^1 with n vertices and n edges."""
    cw = CWComplex()
    for i in range(n):
        cw.add(0, ("v", i))
    for i in range(n):
        a, b = ("v", i), ("v", (i + 1) % n)
        cw.add(1, ("e", i), {b: 1, a: -1} if a != b else {})
    return cw


def wedge_of_circles(m: int, n: int = 1) -> CWComplex:
    """m circles, each with n edges, sharing the vertex ("v", 0)."""
    cw = CWComplex()
    cw.add(0, ("v", 0))
    for c in range(m):
        verts = [("v", 0)] + [("v", c, i) for i in range(1, n)]
        for v in verts[1:]:
            cw.add(0, v)
        for i in range(n):
            a, b = verts[i], verts[(i + 1) % n]
            cw.add(1, ("e", c, i), {b: 1, a: -1} if a != b else {})
    return cw


def square() -> CWComplex:
    """[0,1]^2 with four vertices, four edges and one face."""
    cw = CWComplex()
    for v in ("00", "10", "11", "01"):
        cw.add(0, v)
    cw.add(1, "b", {"10": 1, "00": -1})
    cw.add(1, "r", {"11": 1, "10": -1})
    cw.add(1, "t", {"11": 1, "01": -1})
    cw.add(1, "l", {"01": 1, "00": -1})
    cw.add(2, "F", {"b": 1, "r": 1, "t": -1, "l": -1})
    return cw


def sphere2() -> CWComplex:
    cw = CWComplex()
    cw.add(0, "pt")
    cw.add(2, "D")
    return cw


def product(x: CWComplex, y: CWComplex) -> CWComplex:
    """Product cell structure with d(a x b) = da x b + (-1)^|a| a x db."""
    out = CWComplex()
    for p in range(len(x.cells)):
        for q in range(len(y.cells)):
            for a in x.cells[p]:
                for b in y.cells[q]:
                    faces: Dict[Cell, int] = {}
                    for fa, c in x.boundary[(p, a)].items():
                        faces[(fa, b)] = faces.get((fa, b), 0) + c
                    sign = -1 if p % 2 else 1
                    for fb, c in y.boundary[(q, b)].items():
                        faces[(a, fb)] = faces.get((a, fb), 0) + sign * c
                    out.add(p + q, (a, b), faces)
    return out


BASEPOINT = ("*",)


def collapse(x: CWComplex, sub: set) -> CWComplex:
    """X/A for a subcomplex A given as a set of (dim, cell) pairs.

    Vertices of A become the basepoint; higher cells of A disappear, and so
    do their occurrences in boundaries.
    """
    out = CWComplex()
    out.add(0, BASEPOINT)
    for k, cells in enumerate(x.cells):
        for c in cells:
            if (k, c) in sub:
                continue
            faces: Dict[Cell, int] = {}
            for f, coef in x.boundary[(k, c)].items():
                if (k - 1, f) in sub:
                    if k - 1 == 0:
                        faces[BASEPOINT] = faces.get(BASEPOINT, 0) + coef
                    continue
                faces[f] = faces.get(f, 0) + coef
            out.add(k, c, faces)
    return out


def subcomplex_cells(x: CWComplex, predicate) -> set:
    return {(k, c) for k, cells in enumerate(x.cells) for c in cells if predicate(k, c)}


# --------------------------------------------------------------------------
# the Stokes core curve on the torus


def knot_graph(m1: int, m2: int, n: int, offset: Optional[Fraction] = None) -> CWComplex:
    """Graph of the curve m1 x + m2 y = q (mod 1) cut by an n x n grid.

    Coordinates are in turns. Vertices are the crossings with grid lines,
    edges the pieces of the curve inside one grid square. The offset q is
    chosen so that the curve never meets a grid vertex.
    """
    q = offset if offset is not None else Fraction(1, 2) + Fraction(1, 3 * n)
    pts = []
    for i in range(n):
        x = Fraction(i, n)
        for s in range(m2):
            pts.append((x, (q - m1 * x + s) / m2 % 1))
    for j in range(n):
        y = Fraction(j, n)
        for s in range(m1):
            pts.append(((q - m2 * y + s) / m1 % 1, y))
    index = {p: i for i, p in enumerate(pts)}
    if len(index) != len(pts):
        raise SpecTooCoarse("curve meets a grid vertex; pick another offset")

    cw = CWComplex()
    for i in range(len(pts)):
        cw.add(0, ("k", i))
    step = Fraction(1, n)
    for i, (x, y) in enumerate(pts):
        # walk along (m2, -m1) to the next grid line
        nx = (math.floor(x / step) + 1) * step
        ny = (math.ceil(y / step) - 1) * step
        tx = (nx - x) / m2
        ty = (y - ny) / m1
        t = min(tx, ty)
        nxt = ((x + m2 * t) % 1, (y - m1 * t) % 1)
        if nxt not in index:
            raise SpecTooCoarse(f"lost the curve at {nxt}")
        cw.add(1, ("s", i), {("k", index[nxt]): 1, ("k", i): -1})
    return cw


# --------------------------------------------------------------------------
# cell models


@dataclass(frozen=True)
class WedgeOfCircles:
    m: int


@dataclass(frozen=True)
class Sphere2:
    pass


@dataclass(frozen=True)
class Torus2:
    pass


@dataclass(frozen=True)
class WedgeBundleOverCircle:
    """(S^1 x wedge of m circles) / (S^1 x wedge point)."""

    m: int
    subdivision: int = 3


@dataclass(frozen=True)
class RadialSheetQuotient:
    """(radial square x Stokes core curve) / (radial boundary x curve)."""

    m1: int
    m2: int
    n_sectors: int


CellModel = Union[WedgeOfCircles, Sphere2, Torus2, WedgeBundleOverCircle, RadialSheetQuotient]


def build_cw(model: CellModel) -> Tuple[CWComplex, bool]:
    if isinstance(model, WedgeOfCircles):
        if model.m < 1:
            raise ValueError("m >= 1")
        return wedge_of_circles(model.m), False
    if isinstance(model, Sphere2):
        return sphere2(), False
    if isinstance(model, Torus2):
        return product(circle(1), circle(1)), False
    if isinstance(model, WedgeBundleOverCircle):
        if model.m < 1:
            raise ValueError("m >= 1")
        s = model.subdivision
        x = product(circle(s), wedge_of_circles(model.m, s))
        base = ("v", 0)
        sub = subcomplex_cells(x, lambda k, c: c[1] == base)
        return collapse(x, sub), True
    if isinstance(model, RadialSheetQuotient):
        m1, m2, n = model.m1, model.m2, model.n_sectors
        if m1 < 1 or m2 < 1:
            raise ValueError("m1, m2 >= 1")
        if n < 4 * (m1 + m2):
            raise SpecTooCoarse(f"n_sectors={n} below {4 * (m1 + m2)}")
        sq = square()
        x = product(sq, knot_graph(m1, m2, n))
        sub = subcomplex_cells(x, lambda k, c: c[0] != "F")
        return collapse(x, sub), True
    raise TypeError(f"unknown cell model {model!r}")


def build_complex(model: CellModel) -> ChainComplexQ:
    cw, reduced = build_cw(model)
    return cw.chain_complex(reduced=reduced)
