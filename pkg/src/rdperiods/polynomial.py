"""Sparse bivariate polynomials over Q and rational functions whose
denominator is a monomial in the variables and one fixed linear form.

The chart of the example needs exactly these: denominators are products of
u1, u2 and s = 1 + u1 + u2, and the parameter plane needs x, y and y - x.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Mapping, Tuple

Exp = Tuple[int, int]

U_LIN = (Fraction(1), Fraction(1), Fraction(1))  # s = 1 + u1 + u2
XY_LIN = (Fraction(0), Fraction(-1), Fraction(1))  # y - x


class Poly:
    """Polynomial in two variables, ``{(i, j): coefficient}``."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Exp, object] | None = None):
        clean: Dict[Exp, Fraction] = {}
        for e, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                clean[(int(e[0]), int(e[1]))] = clean.get(e, Fraction(0)) + c
        self.terms = {e: c for e, c in clean.items() if c}

    @classmethod
    def const(cls, c) -> "Poly":
        return cls({(0, 0): c})

    @classmethod
    def monomial(cls, i: int, j: int, c=1) -> "Poly":
        return cls({(i, j): c})

    @classmethod
    def linear(cls, c0, c1, c2) -> "Poly":
        return cls({(0, 0): c0, (1, 0): c1, (0, 1): c2})

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((i + j for i, j in self.terms), default=-1)

    def __add__(self, other: "Poly") -> "Poly":
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, Fraction(0)) + c
        return Poly(out)

    def __neg__(self) -> "Poly":
        return Poly({e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            other = Fraction(other)
            return Poly({e: c * other for e, c in self.terms.items()})
        out: Dict[Exp, Fraction] = {}
        for (i, j), c in self.terms.items():
            for (k, l), d in other.terms.items():
                key = (i + k, j + l)
                out[key] = out.get(key, Fraction(0)) + c * d
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        out = Poly.const(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def diff(self, var: int) -> "Poly":
        out: Dict[Exp, Fraction] = {}
        for (i, j), c in self.terms.items():
            if var == 0 and i:
                out[(i - 1, j)] = c * i
            elif var == 1 and j:
                out[(i, j - 1)] = c * j
        return Poly(out)

    def shift(self, di: int, dj: int) -> "Poly":
        """Multiply by v1^di v2^dj (exponents must stay >= 0)."""
        out = {}
        for (i, j), c in self.terms.items():
            if i + di < 0 or j + dj < 0:
                raise ValueError("negative exponent")
            out[(i + di, j + dj)] = c
        return Poly(out)

    def evaluate(self, v1, v2):
        return sum((c * v1 ** i * v2 ** j for (i, j), c in self.terms.items()), Fraction(0))

    def min_exponents(self) -> Exp:
        if not self.terms:
            return (0, 0)
        return min(i for i, _ in self.terms), min(j for _, j in self.terms)

    def __repr__(self) -> str:
        return f"Poly({self.to_str()})"

    def to_str(self, names: Tuple[str, str] = ("u1", "u2")) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (i, j), c in sorted(self.terms.items(), key=lambda t: (-(t[0][0] + t[0][1]), -t[0][0])):
            mono = "*".join(
                f"{n}^{p}" if p > 1 else n for n, p in ((names[0], i), (names[1], j)) if p
            )
            coef = str(c)
            parts.append(f"({coef})*{mono}" if mono else f"({coef})")
        return " + ".join(parts)


@dataclass(frozen=True)
class RatFunc2:
    """num / (v1^p v2^q L^r) with L = lin[0] + lin[1] v1 + lin[2] v2."""

    num: Poly
    den: Tuple[int, int, int] = (0, 0, 0)
    lin: Tuple[Fraction, Fraction, Fraction] = U_LIN

    def __post_init__(self):
        if min(self.den) < 0:
            raise ValueError("denominator exponents must be >= 0")

    @classmethod
    def poly(cls, p: Poly, lin=U_LIN) -> "RatFunc2":
        return cls(p, (0, 0, 0), lin)

    def L(self) -> Poly:
        return Poly.linear(*self.lin)

    def _check(self, other: "RatFunc2") -> None:
        if tuple(self.lin) != tuple(other.lin):
            raise ValueError("rational functions over different linear forms")

    def _lift(self, den: Tuple[int, int, int]) -> Poly:
        p, q, r = (den[0] - self.den[0], den[1] - self.den[1], den[2] - self.den[2])
        return self.num.shift(p, q) * (self.L() ** r)

    def __add__(self, other) -> "RatFunc2":
        if not isinstance(other, RatFunc2):
            other = RatFunc2(Poly.const(other), (0, 0, 0), self.lin)
        self._check(other)
        den = tuple(max(a, b) for a, b in zip(self.den, other.den))
        return RatFunc2(self._lift(den) + other._lift(den), den, self.lin)

    __radd__ = __add__

    def __neg__(self) -> "RatFunc2":
        return RatFunc2(-self.num, self.den, self.lin)

    def __sub__(self, other) -> "RatFunc2":
        return self + (-other)

    def __rsub__(self, other) -> "RatFunc2":
        return (-self) + other

    def __mul__(self, other) -> "RatFunc2":
        if isinstance(other, Poly):
            return RatFunc2(self.num * other, self.den, self.lin)
        if not isinstance(other, RatFunc2):
            return RatFunc2(self.num * Fraction(other), self.den, self.lin)
        self._check(other)
        den = tuple(a + b for a, b in zip(self.den, other.den))
        return RatFunc2(self.num * other.num, den, self.lin)

    __rmul__ = __mul__

    def diff(self, var: int) -> "RatFunc2":
        """Formal partial derivative in v1 (var=0) or v2 (var=1)."""
        p, q, r = self.den
        v = Poly.monomial(1, 0) if var == 0 else Poly.monomial(0, 1)
        exp_v = p if var == 0 else q
        dL = self.lin[1 + var]
        L = self.L()
        # d(N / (v^e L^r)) = (N' v L - e N L - r dL N v) / (v^(e+1) L^(r+1))
        new = self.num.diff(var) * v * L - self.num * L * exp_v - self.num * v * (dL * r)
        den = (p + 1, q, r + 1) if var == 0 else (p, q + 1, r + 1)
        return RatFunc2(new, den, self.lin).simplify()

    def simplify(self) -> "RatFunc2":
        """Cancel common powers of v1, v2 and L."""
        if self.num.is_zero():
            return RatFunc2(Poly(), (0, 0, 0), self.lin)
        num, (p, q, r) = self.num, self.den
        i, j = num.min_exponents()
        i, j = min(i, p), min(j, q)
        num, p, q = num.shift(-i, -j), p - i, q - j
        while r:
            quo = divide_linear(num, self.lin)
            if quo is None:
                break
            num, r = quo, r - 1
        return RatFunc2(num, (p, q, r), self.lin)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def equals(self, other: "RatFunc2") -> bool:
        """Cross-multiplied comparison with L expanded."""
        self._check(other)
        return (self.num * other._den_poly() - other.num * self._den_poly()).is_zero()

    def _den_poly(self) -> Poly:
        p, q, r = self.den
        return Poly.monomial(p, q) * (self.L() ** r)

    def evaluate(self, v1, v2) -> Fraction:
        d = self._den_poly().evaluate(v1, v2)
        if d == 0:
            raise ZeroDivisionError("denominator vanishes")
        return self.num.evaluate(v1, v2) / d

    def as_poly(self) -> Poly:
        """The polynomial this function equals; raises if it has poles."""
        red = self.simplify()
        if red.den != (0, 0, 0):
            raise ValueError(f"not a polynomial: denominator {red.den}")
        return red.num


def divide_linear(num: Poly, lin) -> Poly | None:
    """Exact quotient num / L, or None when L does not divide num."""
    c0, c1, c2 = (Fraction(c) for c in lin)
    var = 0 if c1 else 1
    lead = c1 if c1 else c2
    if not lead:
        return num * (1 / c0) if c0 else None
    L = Poly.linear(c0, c1, c2)
    rem, quo = num, Poly()
    while not rem.is_zero():
        e, c = max(rem.terms.items(), key=lambda t: (t[0][var], t[0][1 - var]))
        if e[var] == 0:
            return None
        step = Poly.monomial(e[0] - (var == 0), e[1] - (var == 1), c / lead)
        quo = quo + step
        rem = rem - step * L
    return quo


def const(c, lin) -> RatFunc2:
    return RatFunc2(Poly.const(c), (0, 0, 0), lin)
