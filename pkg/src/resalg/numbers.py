"""Exact scalar arithmetic for the symbolic layers.

Coefficients produced by ladder-operator expansions live in the ring
Q(sqrt2, i): rational combinations of {1, sqrt2, i, i*sqrt2}.  Keeping them
exact lets the algebraic identity tests assert residuals of literally zero
instead of chasing float noise.  ``HPoly`` adds a Laurent polynomial in the
(symbolic, positive real) Planck parameter on top of that ring.
"""

from __future__ import annotations

from fractions import Fraction
from math import sqrt

_SQRT2 = sqrt(2.0)


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10**12) if not x.is_integer() else Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot coerce {x!r} to Fraction")


class Exact:
    """Number a + b*sqrt2 + i*(c + d*sqrt2) with rational a, b, c, d."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a=0, b=0, c=0, d=0):
        self.a = _frac(a)
        self.b = _frac(b)
        self.c = _frac(c)
        self.d = _frac(d)

    @staticmethod
    def of(x) -> "Exact":
        if isinstance(x, Exact):
            return x
        if isinstance(x, complex):
            return Exact(_frac(x.real), 0, _frac(x.imag), 0)
        return Exact(_frac(x))

    def __add__(self, other):
        o = Exact.of(other)
        return Exact(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)

    __radd__ = __add__

    def __neg__(self):
        return Exact(-self.a, -self.b, -self.c, -self.d)

    def __sub__(self, other):
        return self + (-Exact.of(other))

    def __rsub__(self, other):
        return Exact.of(other) + (-self)

    def __mul__(self, other):
        o = Exact.of(other)
        a1, b1, c1, d1 = self.a, self.b, self.c, self.d
        a2, b2, c2, d2 = o.a, o.b, o.c, o.d
        return Exact(
            a1 * a2 + 2 * b1 * b2 - c1 * c2 - 2 * d1 * d2,
            a1 * b2 + b1 * a2 - c1 * d2 - d1 * c2,
            a1 * c2 + c1 * a2 + 2 * (b1 * d2 + d1 * b2),
            a1 * d2 + d1 * a2 + b1 * c2 + c1 * b2,
        )

    __rmul__ = __mul__

    def inverse(self) -> "Exact":
        # 1/z = conj(z) / |z|^2 with |z|^2 = x + y*sqrt2 real, then rationalize.
        cj = self.conjugate()
        m = self * cj
        x, y = m.a, m.b
        den = x * x - 2 * y * y
        if den == 0:
            if x == 0 and y == 0:
                raise ZeroDivisionError("inverse of exact zero")
            # |z|^2 itself is a pure multiple of sqrt2 (x=0) or similar
            inv_re = Exact(0, 0) if x == 0 and y == 0 else None
            raise ZeroDivisionError("non-invertible exact value")
        inv_mod = Exact(x / den, -y / den)
        return cj * inv_mod

    def __pow__(self, n: int) -> "Exact":
        if n < 0:
            return self.inverse() ** (-n)
        out = Exact(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __truediv__(self, other):
        return self * Exact.of(other).inverse()

    def __rtruediv__(self, other):
        return Exact.of(other) * self.inverse()

    def conjugate(self) -> "Exact":
        return Exact(self.a, self.b, -self.c, -self.d)

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0 and self.c == 0 and self.d == 0

    def is_real(self) -> bool:
        return self.c == 0 and self.d == 0

    def __eq__(self, other):
        o = Exact.of(other)
        return (self.a, self.b, self.c, self.d) == (o.a, o.b, o.c, o.d)

    def __hash__(self):
        return hash((self.a, self.b, self.c, self.d))

    def __complex__(self):
        return complex(
            float(self.a) + float(self.b) * _SQRT2,
            float(self.c) + float(self.d) * _SQRT2,
        )

    def __repr__(self):
        parts = []
        for coef, tag in ((self.a, ""), (self.b, "*r2"), (self.c, "*i"), (self.d, "*i*r2")):
            if coef != 0:
                parts.append(f"{coef}{tag}")
        return "Exact(" + (" + ".join(parts) if parts else "0") + ")"


ONE = Exact(1)
ZERO = Exact(0)
I = Exact(0, 0, 1, 0)
SQRT2 = Exact(0, 1, 0, 0)
INV_SQRT2 = Exact(0, Fraction(1, 2), 0, 0)  # sqrt2/2


class HPoly:
    """Laurent polynomial in the Planck parameter with ``Exact`` coefficients.

    Keys are integer powers (negative powers appear in homological-equation
    solutions), values are ``Exact``.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        if terms:
            for p, c in terms.items():
                c = Exact.of(c)
                if not c.is_zero():
                    self.terms[int(p)] = c

    @staticmethod
    def const(c) -> "HPoly":
        return HPoly({0: Exact.of(c)})

    @staticmethod
    def hbar(power: int = 1, coef=1) -> "HPoly":
        return HPoly({power: Exact.of(coef)})

    def __add__(self, other):
        o = other if isinstance(other, HPoly) else HPoly.const(other)
        out = dict(self.terms)
        for p, c in o.terms.items():
            s = out.get(p, ZERO) + c
            if s.is_zero():
                out.pop(p, None)
            else:
                out[p] = s
        r = HPoly()
        r.terms = out
        return r

    __radd__ = __add__

    def __neg__(self):
        r = HPoly()
        r.terms = {p: -c for p, c in self.terms.items()}
        return r

    def __sub__(self, other):
        o = other if isinstance(other, HPoly) else HPoly.const(other)
        return self + (-o)

    def __mul__(self, other):
        o = other if isinstance(other, HPoly) else HPoly.const(other)
        out = {}
        for p1, c1 in self.terms.items():
            for p2, c2 in o.terms.items():
                p = p1 + p2
                s = out.get(p, ZERO) + c1 * c2
                if s.is_zero():
                    out.pop(p, None)
                else:
                    out[p] = s
        r = HPoly()
        r.terms = out
        return r

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "HPoly":
        if n < 0:
            raise ValueError("negative power of an HPoly")
        out = HPoly.const(1)
        for _ in range(n):
            out = out * self
        return out

    def shift(self, dp: int) -> "HPoly":
        r = HPoly()
        r.terms = {p + dp: c for p, c in self.terms.items()}
        return r

    def conjugate(self) -> "HPoly":
        r = HPoly()
        r.terms = {p: c.conjugate() for p, c in self.terms.items()}
        return r

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, power: int) -> Exact:
        return self.terms.get(power, ZERO)

    def __eq__(self, other):
        o = other if isinstance(other, HPoly) else HPoly.const(other)
        return self.terms == o.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __call__(self, hbar_value: float) -> complex:
        return sum(
            (complex(c) * hbar_value**p for p, c in self.terms.items()),
            start=0j,
        )

    def __repr__(self):
        if not self.terms:
            return "HPoly(0)"
        bits = [f"h^{p}*{c!r}" for p, c in sorted(self.terms.items())]
        return "HPoly(" + " + ".join(bits) + ")"
