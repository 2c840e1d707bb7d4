"""Exact coefficient arithmetic: Gaussian rationals and multivariate Laurent polynomials.

Every symbolic computation in this package runs over Q(i); floating point only
enters through quadrature.  ``CRational`` wraps a pair of ``fractions.Fraction``
values, ``MPoly`` is a sparse Laurent polynomial over ``CRational`` in a fixed
tuple of named generators (used for symbolic potentials, the symbol N, and the
map-model couplings).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Union

Scalarish = Union[int, Fraction, "CRational"]


class CRational:
    """A complex number with exact rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re: Union[int, Fraction, str] = 0, im: Union[int, Fraction, str] = 0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @staticmethod
    def coerce(x: Scalarish) -> "CRational":
        if isinstance(x, CRational):
            return x
        if isinstance(x, (int, Fraction)):
            return CRational(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to CRational")

    # -- ring operations ---------------------------------------------------

    def __add__(self, other):
        other = CRational.coerce(other)
        return CRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = CRational.coerce(other)
        return CRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return CRational.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CRational(self.re * other, self.im * other)
        if not isinstance(other, CRational):
            return NotImplemented
        return CRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = CRational.coerce(other)
        den = other.re * other.re + other.im * other.im
        if den == 0:
            raise ZeroDivisionError("division by zero CRational")
        return CRational(
            (self.re * other.re + self.im * other.im) / den,
            (self.im * other.re - self.re * other.im) / den,
        )

    def __rtruediv__(self, other):
        return CRational.coerce(other) / self

    def __neg__(self):
        return CRational(-self.re, -self.im)

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("CRational powers must be integers")
        if n < 0:
            return CRational(1) / self ** (-n)
        out = CRational(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- comparisons and helpers -------------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.re == other and self.im == 0
        if isinstance(other, CRational):
            return self.re == other.re and self.im == other.im
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def conjugate(self) -> "CRational":
        return CRational(self.re, -self.im)

    def to_complex(self) -> complex:
        return complex(self.re) + 1j * complex(self.im)

    def __complex__(self):
        return self.to_complex()

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}*i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}*i"

    def __repr__(self):
        return f"CRational({self.re!r}, {self.im!r})"

    def to_pair(self) -> tuple[str, str]:
        """Serialize as decimal-free rational strings."""
        return (str(self.re), str(self.im))

    @staticmethod
    def from_pair(pair) -> "CRational":
        re, im = pair
        return CRational(Fraction(str(re)), Fraction(str(im)))


ZERO = CRational(0)
ONE = CRational(1)
I = CRational(0, 1)


class MPoly:
    """Sparse Laurent polynomial over CRational in named generators.

    Exponent vectors are integer tuples aligned with ``vars``; negative
    exponents are allowed (needed for N^(chi-n) bookkeeping and the 1/t
    propagator weight).
    """

    __slots__ = ("vars", "terms")

    def __init__(self, vars: tuple[str, ...], terms: Mapping[tuple[int, ...], CRational]):
        self.vars = tuple(vars)
        self.terms = {e: c for e, c in terms.items() if c}

    @staticmethod
    def zero(vars: tuple[str, ...]) -> "MPoly":
        return MPoly(vars, {})

    @staticmethod
    def const(c: Scalarish, vars: tuple[str, ...]) -> "MPoly":
        c = CRational.coerce(c)
        if not c:
            return MPoly(vars, {})
        return MPoly(vars, {(0,) * len(vars): c})

    @staticmethod
    def gen(name: str, vars: tuple[str, ...], power: int = 1) -> "MPoly":
        idx = vars.index(name)
        e = tuple(power if i == idx else 0 for i in range(len(vars)))
        return MPoly(vars, {e: ONE})

    def _check(self, other: "MPoly"):
        if self.vars != other.vars:
            raise ValueError(f"generator mismatch: {self.vars} vs {other.vars}")

    def __add__(self, other):
        if isinstance(other, (int, Fraction, CRational)):
            other = MPoly.const(other, self.vars)
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, ZERO) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return MPoly(self.vars, out)

    __radd__ = __add__

    def __neg__(self):
        return MPoly(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, CRational)):
            other = MPoly.const(other, self.vars)
        return self + (-other)

    def __rsub__(self, other):
        return MPoly.const(other, self.vars) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, CRational)):
            c = CRational.coerce(other)
            if not c:
                return MPoly.zero(self.vars)
            return MPoly(self.vars, {e: v * c for e, v in self.terms.items()})
        if not isinstance(other, MPoly):
            return NotImplemented
        self._check(other)
        out: dict[tuple[int, ...], CRational] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e, ZERO) + c1 * c2
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return MPoly(self.vars, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        c = CRational.coerce(other)
        return MPoly(self.vars, {e: v / c for e, v in self.terms.items()})

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative MPoly power; multiply by the inverse generator instead")
        out = MPoly.const(1, self.vars)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, CRational)):
            other = MPoly.const(other, self.vars)
        if not isinstance(other, MPoly):
            return NotImplemented
        return self.vars == other.vars and self.terms == other.terms

    def __hash__(self):
        return hash((self.vars, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def embed(self, vars: tuple[str, ...]) -> "MPoly":
        """Reinterpret in a superset of generators."""
        pos = [vars.index(v) for v in self.vars]
        out: dict[tuple[int, ...], CRational] = {}
        for e, c in self.terms.items():
            ne = [0] * len(vars)
            for p, x in zip(pos, e):
                ne[p] = x
            out[tuple(ne)] = c
        return MPoly(vars, out)

    def eval(self, values: Mapping[str, Scalarish]) -> CRational:
        missing = [v for v in self.vars if v not in values]
        if missing:
            raise ValueError(f"no value for generator(s) {missing}")
        vals = [CRational.coerce(values[v]) for v in self.vars]
        total = CRational(0)
        for e, c in self.terms.items():
            term = c
            for base, exp in zip(vals, e):
                if exp:
                    term = term * base ** exp
            total = total + term
        return total

    def coefficient(self, exponents: tuple[int, ...]) -> CRational:
        return self.terms.get(tuple(exponents), ZERO)

    def __str__(self):
        if not self.terms:
            return "0"
        bits = []
        for e in sorted(self.terms, key=lambda x: (sum(x), x), reverse=True):
            c = self.terms[e]
            mono = "*".join(
                f"{v}^{p}" if p != 1 else v for v, p in zip(self.vars, e) if p
            )
            if mono:
                bits.append(f"({c})*{mono}")
            else:
                bits.append(f"({c})")
        return " + ".join(bits)

    def __repr__(self):
        return f"MPoly({self.vars!r}, {self.terms!r})"


def parse_rational_pair(obj) -> CRational:
    """Parse a [re, im] JSON pair of rational strings (or numbers)."""
    if not isinstance(obj, (list, tuple)) or len(obj) != 2:
        raise ValueError(f"expected [re, im] pair, got {obj!r}")
    return CRational.from_pair(obj)
