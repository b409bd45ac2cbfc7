"""Exact sparse linear algebra over the rationals.

Matrices are stored row-wise as ``{column: Fraction}`` dictionaries. The
only operations the rest of the package needs are rank, row echelon form
and nullspace, so that is all this module does.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

SparseRow = Dict[int, Fraction]


class SparseMatrixQ:
    """Row-sparse exact rational matrix with a fixed shape."""

    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, nrows: int, ncols: int, rows: Sequence[Mapping[int, object]] | None = None):
        self.nrows = nrows
        self.ncols = ncols
        if rows is None:
            rows = [{} for _ in range(nrows)]
        if len(rows) != nrows:
            raise ValueError(f"expected {nrows} rows, got {len(rows)}")
        self.rows: List[SparseRow] = []
        for r in rows:
            clean: SparseRow = {}
            for c, v in r.items():
                if not 0 <= c < ncols:
                    raise IndexError(f"column {c} out of range for {ncols} columns")
                v = Fraction(v)
                if v:
                    clean[c] = v
            self.rows.append(clean)

    @classmethod
    def from_dense(cls, dense: Sequence[Sequence[object]]) -> "SparseMatrixQ":
        nrows = len(dense)
        ncols = len(dense[0]) if nrows else 0
        return cls(nrows, ncols, [{j: v for j, v in enumerate(row) if v} for row in dense])

    @classmethod
    def from_triplets(cls, nrows: int, ncols: int, triplets: Iterable[Tuple[int, int, object]]) -> "SparseMatrixQ":
        rows: List[SparseRow] = [{} for _ in range(nrows)]
        for i, j, v in triplets:
            rows[i][j] = rows[i].get(j, Fraction(0)) + Fraction(v)
        return cls(nrows, ncols, rows)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.nrows, self.ncols

    def nnz(self) -> int:
        return sum(len(r) for r in self.rows)

    def to_dense(self) -> List[List[Fraction]]:
        out = [[Fraction(0)] * self.ncols for _ in range(self.nrows)]
        for i, r in enumerate(self.rows):
            for j, v in r.items():
                out[i][j] = v
        return out

    def triplets(self) -> List[Tuple[int, int, Fraction]]:
        return [(i, j, v) for i, r in enumerate(self.rows) for j, v in sorted(r.items())]

    def transpose(self) -> "SparseMatrixQ":
        return SparseMatrixQ.from_triplets(self.ncols, self.nrows, ((j, i, v) for i, j, v in self.triplets()))

    def matmul(self, other: "SparseMatrixQ") -> "SparseMatrixQ":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        out: List[SparseRow] = []
        for r in self.rows:
            acc: SparseRow = {}
            for k, v in r.items():
                for j, w in other.rows[k].items():
                    acc[j] = acc.get(j, Fraction(0)) + v * w
            out.append({j: v for j, v in acc.items() if v})
        return SparseMatrixQ(self.nrows, other.ncols, out)

    def is_zero(self) -> bool:
        return all(not r for r in self.rows)

    def select_columns(self, keep: Iterable[int]) -> "SparseMatrixQ":
        """Submatrix on the given columns, renumbered in the order supplied."""
        keep = list(keep)
        remap = {c: i for i, c in enumerate(keep)}
        rows = [{remap[c]: v for c, v in r.items() if c in remap} for r in self.rows]
        return SparseMatrixQ(self.nrows, len(keep), rows)

    def select_rows(self, keep: Iterable[int]) -> "SparseMatrixQ":
        keep = list(keep)
        return SparseMatrixQ(len(keep), self.ncols, [self.rows[i] for i in keep])

    def apply(self, vec: Mapping[int, object]) -> SparseRow:
        """Matrix-vector product for a sparse vector; returns a sparse result."""
        out: SparseRow = {}
        for i, r in enumerate(self.rows):
            s = sum((v * Fraction(vec[c]) for c, v in r.items() if c in vec), Fraction(0))
            if s:
                out[i] = s
        return out

    def __repr__(self) -> str:
        return f"SparseMatrixQ({self.nrows}x{self.ncols}, nnz={self.nnz()})"


def _reduce(row: SparseRow, pivots: Dict[int, SparseRow]) -> SparseRow:
    """Reduce ``row`` against pivot rows until its leading column is new."""
    row = dict(row)
    while row:
        lead = min(row)
        prow = pivots.get(lead)
        if prow is None:
            return row
        factor = row[lead] / prow[lead]
        for c, v in prow.items():
            nv = row.get(c, Fraction(0)) - factor * v
            if nv:
                row[c] = nv
            else:
                row.pop(c, None)
    return row


def echelon(matrix: SparseMatrixQ) -> Dict[int, SparseRow]:
    """Row echelon form as ``{pivot column: row}``.

    Each stored row has its pivot as the smallest column index, so the rows
    are upper triangular with respect to the column order.
    """
    pivots: Dict[int, SparseRow] = {}
    for r in matrix.rows:
        red = _reduce(r, pivots)
        if red:
            pivots[min(red)] = red
    return pivots


def rank(matrix: SparseMatrixQ) -> int:
    return len(echelon(matrix))


def nullspace(matrix: SparseMatrixQ) -> List[SparseRow]:
    """Basis of the right kernel, one vector per free column."""
    pivots = echelon(matrix)
    order = sorted(pivots, reverse=True)
    basis: List[SparseRow] = []
    for free in range(matrix.ncols):
        if free in pivots:
            continue
        vec: SparseRow = {free: Fraction(1)}
        for p in order:
            if p > free:
                continue
            prow = pivots[p]
            s = sum((v * vec[c] for c, v in prow.items() if c != p and c in vec), Fraction(0))
            if s:
                vec[p] = -s / prow[p]
        basis.append(vec)
    return basis


def nullity(matrix: SparseMatrixQ) -> int:
    return matrix.ncols - rank(matrix)


def cokernel_dim(matrix: SparseMatrixQ) -> int:
    return matrix.nrows - rank(matrix)


def projected_kernel_dim(matrix: SparseMatrixQ, keep: Iterable[int]) -> int:
    """Dimension of the kernel after projecting onto the columns ``keep``.

    Uses dim pr(ker M) = dim ker M - dim(ker M restricted to the other
    columns), which needs two ranks and no kernel basis.
    """
    keep = set(keep)
    rest = [c for c in range(matrix.ncols) if c not in keep]
    full_nullity = matrix.ncols - rank(matrix)
    rest_nullity = len(rest) - rank(matrix.select_columns(rest))
    return full_nullity - rest_nullity


def solve(matrix: SparseMatrixQ, rhs: Mapping[int, object]) -> SparseRow | None:
    """One solution of ``matrix @ x = rhs``, or None if inconsistent."""
    aug_col = matrix.ncols
    rows = []
    for i, r in enumerate(matrix.rows):
        row = dict(r)
        if i in rhs and Fraction(rhs[i]):
            row[aug_col] = Fraction(rhs[i])
        rows.append(row)
    pivots = echelon(SparseMatrixQ(matrix.nrows, matrix.ncols + 1, rows))
    if aug_col in pivots:
        return None
    sol: SparseRow = {}
    for p in sorted(pivots, reverse=True):
        prow = pivots[p]
        s = prow.get(aug_col, Fraction(0))
        s -= sum((v * sol[c] for c, v in prow.items() if c != p and c != aug_col and c in sol), Fraction(0))
        if s:
            sol[p] = s / prow[p]
    return sol
