"""Coefficient-recursion operators as finite exact linear systems.

Every operator acts on (vectors of) two-variable series through a stencil:
a source monomial ``x1^k x2^l`` in component ``c`` contributes
``coef(k, l)`` to the target monomial ``x1^(k+dk) x2^(l+dl)`` of component
``c'``. A truncated system keeps the source monomials inside a finite
window and only those target rows whose entire stencil is inside the
window. Indices that are not in a source space at all are structural
zeros, not unknowns, so they never exclude a row.

Kernel dimensions are read off after projecting onto a small window, which
removes the free coefficients of the top layer; see
:func:`stabilized_kernel_dim`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Callable, Dict, Iterator, List, Optional, Tuple

from . import qlinalg
from .qlinalg import SparseMatrixQ

Index = Tuple[int, int]
Key = Tuple[int, int, int]  # (component, k, l)


class WindowTooSmall(ValueError):
    pass


class NotStabilized(RuntimeError):
    pass


# --------------------------------------------------------------------------
# series spaces


@dataclass(frozen=True)
class SeriesSpace:
    """A set of admissible monomial indices.

    kind is one of ``full`` (k, l >= 0), ``pstrip`` (P_{MN}: k <= M or l <= N
    inside the full quadrant), ``shifted`` (x1^s1 x2^s2 times the full
    quadrant), ``quotient_p`` (full quadrant modulo P_{MN}, i.e. k > M and
    l > N), ``polar`` (one-variable tails z^-j, all j; the window decides which
    are unknowns), ``essential_x1`` (x1^-j x2^l, l >= 0, or any l when
    ``laurent_x2``), ``neg_strips`` (k, l <= 0 with k >= -S or l >= -S) and
    ``neg_quadrant`` (k <= a and l <= b).
    """

    kind: str
    a: int = 0
    b: int = 0
    laurent_x2: bool = False

    def contains(self, idx: Index) -> bool:
        k, l = idx
        kind = self.kind
        if kind == "full":
            return k >= 0 and l >= 0
        if kind == "pstrip":
            return k >= 0 and l >= 0 and (k <= self.a or l <= self.b)
        if kind == "shifted":
            return k >= self.a and l >= self.b
        if kind == "quotient_p":
            return k > self.a and l > self.b
        if kind == "polar":
            return l == 0
        if kind == "essential_x1":
            return self.laurent_x2 or l >= 0
        if kind == "neg_strips":
            return k <= 0 and l <= 0 and (k >= -self.a or l >= -self.a)
        if kind == "neg_quadrant":
            return k <= self.a and l <= self.b
        raise ValueError(f"unknown series space kind {kind!r}")

    @property
    def is_quotient(self) -> bool:
        return self.kind in ("quotient_p", "polar", "essential_x1", "neg_strips", "neg_quadrant")


def full_power() -> SeriesSpace:
    return SeriesSpace("full")


def p_strip(m: int, n: int) -> SeriesSpace:
    return SeriesSpace("pstrip", m, n)


def shifted_full(s1: int, s2: int) -> SeriesSpace:
    return SeriesSpace("shifted", s1, s2)


def quotient_by_p(m: int, n: int) -> SeriesSpace:
    return SeriesSpace("quotient_p", m, n)


def one_var_polar() -> SeriesSpace:
    return SeriesSpace("polar")


# --------------------------------------------------------------------------
# operators


Coef = Callable[[int, int], Fraction]


@dataclass(frozen=True)
class Term:
    src: int
    tgt: int
    shift: Index
    coef: Coef


@dataclass(frozen=True)
class OperatorKind:
    """A named stencil operator together with its source and target spaces."""

    name: str
    m1: int
    m2: int
    sources: Tuple[SeriesSpace, ...]
    targets: Tuple[SeriesSpace, ...]
    terms: Tuple[Term, ...] = field(repr=False)
    window_kind: str = "degree"  # degree | polar | neg
    min_window: int = 1

    @property
    def period(self) -> int:
        """Window increment used by the stabilization loop."""
        return self.m1 + self.m2 + 1

    def in_window(self, idx: Index, T: int) -> bool:
        k, l = idx
        if self.window_kind == "degree":
            return k + l <= T
        if self.window_kind == "polar":
            return 1 <= k and k + abs(l) <= T
        if self.window_kind == "neg":
            return -k - l <= T
        raise ValueError(self.window_kind)

    def source_window(self, T: int) -> Iterator[Index]:
        """All indices of the window box; callers filter by space."""
        if self.window_kind == "degree":
            for k in range(0, T + 1):
                for l in range(0, T + 1 - k):
                    yield k, l
        elif self.window_kind == "polar":
            for k in range(1, T + 1):
                for l in range(-(T - k), T - k + 1):
                    yield k, l
        else:
            for k in range(-T, 1):
                for l in range(-T - k, 1):
                    yield k, l


def _c(v) -> Fraction:
    return Fraction(v)


def D_crossing(m1: int, m2: int) -> OperatorKind:
    """u -> -(x1^2 u_x1 + m1 x1^(m1+1) x2^m2 u, x2^2 u_x2 + m2 x1^m1 x2^(m2+1) u)."""
    _check_orders(m1, m2)
    terms = (
        Term(0, 0, (1, 0), lambda k, l: _c(-k)),
        Term(0, 0, (m1 + 1, m2), lambda k, l: _c(-m1)),
        Term(0, 1, (0, 1), lambda k, l: _c(-l)),
        Term(0, 1, (m1, m2 + 1), lambda k, l: _c(-m2)),
    )
    return OperatorKind(
        "D_crossing", m1, m2,
        sources=(full_power(),),
        targets=(quotient_by_p(m1, m2 - 1), quotient_by_p(m1 - 1, m2)),
        terms=terms,
        min_window=m1 + m2 + 1,
    )


def _e_terms(m1: int, m2: int) -> Tuple[Term, ...]:
    # E(w1, w2) = -x1^2 d(w2)/dx1 + x2^2 d(w1)/dx2 + m2 x2 a w1 - m1 x1 a w2,
    # a = x1^m1 x2^m2
    return (
        Term(0, 0, (0, 1), lambda k, l: _c(l)),
        Term(0, 0, (m1, m2 + 1), lambda k, l: _c(m2)),
        Term(1, 0, (1, 0), lambda k, l: _c(-k)),
        Term(1, 0, (m1 + 1, m2), lambda k, l: _c(-m1)),
    )


def E_crossing(m1: int, m2: int) -> OperatorKind:
    _check_orders(m1, m2)
    return OperatorKind(
        "E_crossing", m1, m2,
        sources=(shifted_full(m1 + 1, m2), shifted_full(m1, m2 + 1)),
        targets=(quotient_by_p(2 * m1, 2 * m2),),
        terms=_e_terms(m1, m2),
        min_window=2 * (m1 + m2) + 2,
    )


def E_on_P(m1: int, m2: int) -> OperatorKind:
    _check_orders(m1, m2)
    return OperatorKind(
        "E_on_P", m1, m2,
        sources=(p_strip(m1, m2 - 1), p_strip(m1 - 1, m2)),
        targets=(p_strip(2 * m1, 2 * m2),),
        terms=_e_terms(m1, m2),
        min_window=2 * (m1 + m2) + 1,
    )


def A_op() -> OperatorKind:
    """(w1, w2) -> -x1^2 d(w2)/dx1 + x2^2 d(w1)/dx2 on H/x1^2 + H/x2^2."""
    terms = (
        Term(0, 0, (0, 1), lambda k, l: _c(l)),
        Term(1, 0, (1, 0), lambda k, l: _c(-k)),
    )
    return OperatorKind(
        "A_op", 0, 0,
        sources=(p_strip(1, -1), p_strip(-1, 1)),
        targets=(p_strip(1, 1),),
        terms=terms,
        min_window=4,
    )


def rho_onevar(m: int) -> OperatorKind:
    """f -> f' - m z^(-m-1) f on tails sum_j c_j z^-j (index k = j)."""
    _check_orders(m, 1)
    terms = (
        Term(0, 0, (1, 0), lambda j, l: _c(-j)),
        Term(0, 0, (m + 1, 0), lambda j, l: _c(-m)),
    )
    return OperatorKind(
        "rho_onevar", m, 0,
        sources=(one_var_polar(),),
        targets=(one_var_polar(),),
        terms=terms,
        window_kind="polar",
        min_window=m + 2,
    )


def phi_smooth(m: int, laurent_x2: bool = False) -> OperatorKind:
    """u -> (u_x1 - m x1^(-m-1) u, u_x2) on x1^-j x2^l (index (j, l)).

    ``laurent_x2=False`` is the quotient by meromorphic sections at a smooth
    point; ``True`` allows poles in x2 too, which is the quotient by L2 at a
    crossing (the contribution of one component).
    """
    _check_orders(m, 1)
    sp = SeriesSpace("essential_x1", laurent_x2=laurent_x2)
    terms = (
        Term(0, 0, (1, 0), lambda j, l: _c(-j)),
        Term(0, 0, (m + 1, 0), lambda j, l: _c(-m)),
        Term(0, 1, (0, -1), lambda j, l: _c(l)),
    )
    return OperatorKind(
        "phi_smooth", m, 0, sources=(sp,), targets=(sp, sp), terms=terms,
        window_kind="polar", min_window=m + 3,
    )


def psi_smooth(m: int, laurent_x2: bool = False) -> OperatorKind:
    """(w1, w2) -> d(w2)/dx1 - m x1^(-m-1) w2 - d(w1)/dx2."""
    _check_orders(m, 1)
    sp = SeriesSpace("essential_x1", laurent_x2=laurent_x2)
    terms = (
        Term(1, 0, (1, 0), lambda j, l: _c(-j)),
        Term(1, 0, (m + 1, 0), lambda j, l: _c(-m)),
        Term(0, 0, (0, -1), lambda j, l: _c(-l)),
    )
    return OperatorKind(
        "psi_smooth", m, 0, sources=(sp, sp), targets=(sp,), terms=terms,
        window_kind="polar", min_window=m + 3,
    )


def phi_bar(m1: int, m2: int, strip: Optional[int] = None) -> OperatorKind:
    """First-column operator on (L1+L2)/K_{1,1} in raw Laurent exponents.

    u -> (u_x1 - m1 x1^(-m1-1) x2^(-m2) u, u_x2 - m2 x1^(-m1) x2^(-m2-1) u).
    Elements of L1+L2 vanish when both exponents are very negative; ``strip``
    is how negative one exponent may get while the other is unbounded
    (default m1 + m2 + 1).
    """
    _check_orders(m1, m2)
    width = strip if strip is not None else m1 + m2 + 1
    sp_src = SeriesSpace("neg_strips", width)
    terms = (
        Term(0, 0, (-1, 0), lambda k, l: _c(k)),
        Term(0, 0, (-m1 - 1, -m2), lambda k, l: _c(-m1)),
        Term(0, 1, (0, -1), lambda k, l: _c(l)),
        Term(0, 1, (-m1, -m2 - 1), lambda k, l: _c(-m2)),
    )
    # targets: complements of K_{-m1,-m2+1} and K_{-m1+1,-m2}
    return OperatorKind(
        "phi_bar", m1, m2,
        sources=(sp_src,),
        targets=(SeriesSpace("neg_quadrant", -m1 - 1, -m2), SeriesSpace("neg_quadrant", -m1, -m2 - 1)),
        terms=terms,
        window_kind="neg",
        min_window=2 * (m1 + m2) + 2,
    )


def _check_orders(m1: int, m2: int) -> None:
    if m1 < 1 or m2 < 1:
        raise ValueError(f"pole orders must be >= 1, got ({m1}, {m2})")


OPERATORS: Dict[str, Callable[..., OperatorKind]] = {
    "D": D_crossing,
    "D_crossing": D_crossing,
    "E": E_crossing,
    "E_crossing": E_crossing,
    "E_on_P": E_on_P,
    "A": lambda *a: A_op(),
    "A_op": lambda *a: A_op(),
    "rho": rho_onevar,
    "rho_onevar": rho_onevar,
    "phi_smooth": phi_smooth,
    "psi_smooth": psi_smooth,
    "phi_bar": phi_bar,
}


# --------------------------------------------------------------------------
# truncated systems


@dataclass
class LaurentSystem:
    op: OperatorKind
    T: int
    columns: List[Key]
    rows: List[Key]
    matrix: SparseMatrixQ

    def column_index(self) -> Dict[Key, int]:
        return {key: i for i, key in enumerate(self.columns)}

    def window_columns(self, T_small: int) -> List[int]:
        return [i for i, (c, k, l) in enumerate(self.columns) if self.op.in_window((k, l), T_small)]

    def to_triplet_text(self) -> str:
        """One ``row col num/den`` line per nonzero entry."""
        lines = [f"# {self.op.name}({self.op.m1},{self.op.m2}) T={self.T} shape={self.matrix.nrows}x{self.matrix.ncols}"]
        for i, j, v in self.matrix.triplets():
            lines.append(f"{i} {j} {v.numerator}/{v.denominator}")
        return "\n".join(lines) + "\n"


def build_system(op: OperatorKind, T: int) -> LaurentSystem:
    """Truncate ``op`` to the window of size ``T``.

    Columns are the in-window monomials of every source component. A target
    monomial becomes a row when it lies in its target space and every source
    monomial its stencil touches with a nonzero coefficient is a column.
    """
    if T < op.min_window:
        raise WindowTooSmall(f"{op.name}: T={T} below minimal window {op.min_window}")

    columns: List[Key] = []
    for c, space in enumerate(op.sources):
        for idx in op.source_window(T):
            if space.contains(idx):
                columns.append((c, idx[0], idx[1]))
    col_of = {key: i for i, key in enumerate(columns)}

    by_target: Dict[int, List[Term]] = {}
    for t in op.terms:
        by_target.setdefault(t.tgt, []).append(t)

    # rows with an empty stencil are genuine cokernel directions, so the
    # window itself is scanned as well as the images of the columns
    candidates = set()
    for tc, space in enumerate(op.targets):
        for idx in op.source_window(T):
            if space.contains(idx):
                candidates.add((tc, idx[0], idx[1]))
    for (c, k, l) in columns:
        for t in op.terms:
            if t.src == c:
                candidates.add((t.tgt, k + t.shift[0], l + t.shift[1]))

    rows: List[Key] = []
    row_data: List[Dict[int, Fraction]] = []
    for (tc, k, l) in sorted(candidates, key=lambda key: (key[0], abs(key[1]) + abs(key[2]), key[1], key[2])):
        if not op.targets[tc].contains((k, l)):
            continue
        entry: Dict[int, Fraction] = {}
        complete = True
        for t in by_target.get(tc, ()):
            src_idx = (k - t.shift[0], l - t.shift[1])
            if not op.sources[t.src].contains(src_idx):
                continue
            v = t.coef(*src_idx)
            if not v:
                continue
            col = col_of.get((t.src, src_idx[0], src_idx[1]))
            if col is None:
                complete = False
                break
            entry[col] = entry.get(col, Fraction(0)) + v
        if complete:
            rows.append((tc, k, l))
            row_data.append(entry)
    matrix = SparseMatrixQ(len(rows), len(columns), row_data)
    return LaurentSystem(op, T, columns, rows, matrix)


# --------------------------------------------------------------------------
# stabilized dimensions


@dataclass
class Stabilization:
    value: int
    windows: List[int]
    values: List[int]

    @property
    def stabilized(self) -> bool:
        return True


def _stabilize(values_at: Callable[[int], int], T0: int, delta: int, steps: int) -> Stabilization:
    if steps < 3:
        raise ValueError("steps must be >= 3")
    windows: List[int] = []
    values: List[int] = []
    for i in range(steps + 1):
        T = T0 + i * delta
        windows.append(T)
        values.append(values_at(T))
        if len(values) >= 3 and values[-1] == values[-2] == values[-3]:
            return Stabilization(values[-1], windows, values)
    raise NotStabilized(f"no three consecutive agreements in {list(zip(windows, values))}")


def kernel_stabilization(op: OperatorKind, T0: Optional[int] = None, steps: int = 4) -> Stabilization:
    T0 = op.min_window if T0 is None else T0

    def value(T: int) -> int:
        sys_ = build_system(op, T)
        return qlinalg.projected_kernel_dim(sys_.matrix, sys_.window_columns(T0))

    return _stabilize(value, T0, op.period, steps)


def cokernel_stabilization(op: OperatorKind, T0: Optional[int] = None, steps: int = 4) -> Stabilization:
    T0 = op.min_window if T0 is None else T0

    def value(T: int) -> int:
        return qlinalg.cokernel_dim(build_system(op, T).matrix)

    return _stabilize(value, T0, op.period, steps)


def stabilized_kernel_dim(op: OperatorKind, T0: Optional[int] = None, steps: int = 4) -> int:
    """Kernel dimension, projected onto the T0 window, once it stops moving."""
    return kernel_stabilization(op, T0, steps).value


def stabilized_cokernel_dim(op: OperatorKind, T0: Optional[int] = None, steps: int = 4) -> int:
    return cokernel_stabilization(op, T0, steps).value


def middle_cohomology(first: OperatorKind, second: OperatorKind, T0: int, T: int) -> int:
    """dim of (ker second / im first) seen through the T0 window at size T.

    The kernel of ``second`` is projected onto the window; the image of
    ``first`` meets the window exactly in the span of its in-window rows.
    """
    a = build_system(first, T)
    b = build_system(second, T)
    rows = [i for i, (c, k, l) in enumerate(a.rows) if first.in_window((k, l), T0)]
    return qlinalg.projected_kernel_dim(b.matrix, b.window_columns(T0)) - qlinalg.rank(a.matrix.select_rows(rows))


@dataclass
class ComplexDims:
    h0: int
    h1: int
    h2: int

    @property
    def euler(self) -> int:
        return self.h0 - self.h1 + self.h2


def complex_dims(first: OperatorKind, second: OperatorKind, T0: Optional[int] = None, steps: int = 4) -> ComplexDims:
    """Stabilized cohomology of 0 -> . -first-> . -second-> . -> 0."""
    T0 = max(first.min_window, second.min_window) if T0 is None else T0
    h0 = stabilized_kernel_dim(first, T0, steps)
    h2 = stabilized_cokernel_dim(second, T0, steps)
    h1 = _stabilize(lambda T: middle_cohomology(first, second, T0, T), T0, first.period, steps).value
    return ComplexDims(h0, h1, h2)


def holomorphic_complex_dims(m1: int, m2: int, T0: Optional[int] = None, steps: int = 4) -> ComplexDims:
    return complex_dims(D_crossing(m1, m2), E_crossing(m1, m2), T0, steps)


def euler_characteristic(m1: int, m2: int, T: Optional[int] = None) -> int:
    """h0 - h1 + h2 of the truncated holomorphic complex, windows from T."""
    return holomorphic_complex_dims(m1, m2, T).euler


# --------------------------------------------------------------------------
# case tally for E on P


@dataclass
class CaseTally:
    """Per-case (kernel, cokernel) contributions of E on P_{m1,m2-1} + P_{m1-1,m2}."""

    m1: int
    m2: int
    contributions: Dict[str, Tuple[int, int]]

    @property
    def kernel(self) -> int:
        return sum(v[0] for v in self.contributions.values())

    @property
    def cokernel(self) -> int:
        return sum(v[1] for v in self.contributions.values())


def _case_label(base: Index, m1: int, m2: int) -> str:
    k, l = base
    if (k, l) == (0, 0):
        return "iv"
    if k == 0:
        return "ii"
    if l == 0:
        return "iii"
    return "i"


def pfred_blocks(m1: int, m2: int, reach: Optional[int] = None):
    """Yield (label, base, rows, cols, matrix) for each coupled block.

    The stencil of E couples a source anchored at (k, l) (g at (k, l-1),
    h at (k-1, l)) only to the targets (k, l) and (k+m1, l+m2), so the system
    splits along chains {base + t(m1, m2)}. Each chain is finite inside the
    target strip. A chain may split further into independent pieces; the
    piece through (m1, m2) on the chain of the origin is labelled ``v``.
    """
    _check_orders(m1, m2)
    op = E_on_P(m1, m2)
    src, tgt = op.sources, op.targets[0]
    reach = reach if reach is not None else 4 * (m1 + m2) + 4
    bases = [(k, l) for k in range(reach + 1) for l in range(reach + 1)
             if (k < m1 or l < m2) and tgt.contains((k, l))]
    for base in bases:
        rows: List[Index] = []
        cols: List[Key] = []
        t = 0
        while True:
            a = (base[0] + t * m1, base[1] + t * m2)
            anchored = [(0, a[0], a[1] - 1), (1, a[0] - 1, a[1])]
            live = [c for c in anchored if src[c[0]].contains((c[1], c[2]))]
            in_target = tgt.contains(a)
            if not in_target and not live:
                break
            if in_target:
                rows.append(a)
            cols.extend(live)
            t += 1
        row_of = {r: i for i, r in enumerate(rows)}
        col_of = {c: j for j, c in enumerate(cols)}
        entries: List[Dict[int, Fraction]] = [{} for _ in rows]
        for (c, k, l), j in col_of.items():
            for term in op.terms:
                if term.src != c:
                    continue
                v = term.coef(k, l)
                r = row_of.get((k + term.shift[0], l + term.shift[1]))
                if v and r is not None:
                    entries[r][j] = entries[r].get(j, Fraction(0)) + v
        # split the chain into connected pieces of the row/column graph
        for piece_rows, piece_cols in _pieces(entries, len(cols)):
            sub = SparseMatrixQ(len(piece_rows), len(piece_cols), [
                {piece_cols.index(j): v for j, v in entries[i].items()} for i in piece_rows
            ])
            piece = [rows[i] for i in piece_rows]
            label = _case_label(base, m1, m2)
            if label == "iv" and piece != [(0, 0)]:
                label = "v"
            yield label, base, piece, [cols[j] for j in piece_cols], sub


def _pieces(entries: List[Dict[int, Fraction]], ncols: int):
    parent = list(range(len(entries) + ncols))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    nr = len(entries)
    for i, r in enumerate(entries):
        for j in r:
            parent[find(i)] = find(nr + j)
    groups: Dict[int, Tuple[List[int], List[int]]] = {}
    for i in range(nr):
        groups.setdefault(find(i), ([], []))[0].append(i)
    for j in range(ncols):
        groups.setdefault(find(nr + j), ([], []))[1].append(j)
    return list(groups.values())


def pfred_case_tally(m1: int, m2: int) -> CaseTally:
    """Exact contribution of every case of chains to ker and coker of E on P.

    Blocks far out along the strips are square and invertible; the tally
    checks this on the outer half of the scanned region and refuses to
    answer if it fails, since the region would then be too small.
    """
    reach = 4 * (m1 + m2) + 4
    contrib: Dict[str, List[int]] = {key: [0, 0] for key in ("i", "ii", "iii", "iv", "v")}
    for label, base, rows, cols, sub in pfred_blocks(m1, m2, reach):
        r = qlinalg.rank(sub)
        ker, coker = len(cols) - r, len(rows) - r
        if max(base) > reach // 2 and (ker or coker):
            raise NotStabilized(f"block at base {base} is singular; scan region too small")
        contrib[label][0] += ker
        contrib[label][1] += coker
    return CaseTally(m1, m2, {key: (v[0], v[1]) for key, v in contrib.items()})


def pfred_case_count(m1: int, m2: int) -> Tuple[int, int]:
    """(dim ker, dim coker) of E on P from the chain-by-chain case tally."""
    tally = pfred_case_tally(m1, m2)
    return tally.kernel, tally.cokernel


def pfred_case_formula(m1: int, m2: int) -> CaseTally:
    """Closed-form per-case contributions, d = gcd(m1, m2).

    i: d (or d - 1 when m1 = m2) to both; ii, iii: 1 to both; iv: 1 to the
    cokernel; v: 1 to both when m1 = m2, nothing otherwise. The totals are
    (d + 2, d + 3) in every case.
    """
    _check_orders(m1, m2)
    d = gcd(m1, m2)
    i = d - 1 if m1 == m2 else d
    v = (1, 1) if m1 == m2 else (0, 0)
    return CaseTally(m1, m2, {"i": (i, i), "ii": (1, 1), "iii": (1, 1), "iv": (0, 1), "v": v})
