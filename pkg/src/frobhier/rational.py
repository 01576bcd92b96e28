"""Rational functions of jet variables with factored denominators.

The engine's core ring JetPoly has no division; expressions such as the
quasi-Miura coefficients or the genus jet functions live here instead, as
numerator / product-of-factors pairs.  No polynomial gcd is attempted: the
denominator is kept as a multiset of factors, and equality/zero tests reduce
to JetPoly identities after cross multiplication.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

from .jets import JetPoly, exact_div
from .scalars import ExactScalar


class JetRational:
    __slots__ = ("n", "num", "den")

    def __init__(self, num: JetPoly, den: Union[dict, None] = None):
        self.n = num.n
        self.num = num
        # den: dict JetPoly -> positive int power
        self.den: dict[JetPoly, int] = {}
        if den:
            for f, e in den.items():
                if e:
                    self.den[f] = self.den.get(f, 0) + e
        if num.is_zero():
            self.den = {}

    @staticmethod
    def from_poly(p: JetPoly) -> "JetRational":
        return JetRational(p)

    @staticmethod
    def zero(n: int) -> "JetRational":
        return JetRational(JetPoly.zero(n))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def den_poly(self) -> JetPoly:
        d = JetPoly.const(self.n, 1)
        for f, e in self.den.items():
            d = d * f ** e
        return d

    def _coerce(self, other) -> "JetRational":
        if isinstance(other, JetRational):
            return other
        if isinstance(other, JetPoly):
            return JetRational(other)
        return JetRational(JetPoly.const(self.n, other))

    def __add__(self, other) -> "JetRational":
        other = self._coerce(other)
        den: dict[JetPoly, int] = dict(self.den)
        for f, e in other.den.items():
            den[f] = max(den.get(f, 0), e)
        extra_self = JetPoly.const(self.n, 1)
        for f, e in den.items():
            d = e - self.den.get(f, 0)
            if d:
                extra_self = extra_self * f ** d
        extra_other = JetPoly.const(self.n, 1)
        for f, e in den.items():
            d = e - other.den.get(f, 0)
            if d:
                extra_other = extra_other * f ** d
        return JetRational(self.num * extra_self + other.num * extra_other, den)

    __radd__ = __add__

    def __neg__(self) -> "JetRational":
        return JetRational(-self.num, self.den)

    def __sub__(self, other) -> "JetRational":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "JetRational":
        return self._coerce(other) + (-self)

    def __mul__(self, other) -> "JetRational":
        if isinstance(other, (int, Fraction, ExactScalar)):
            return JetRational(self.num * other, self.den)
        other = self._coerce(other)
        den = dict(self.den)
        for f, e in other.den.items():
            den[f] = den.get(f, 0) + e
        num = self.num * other.num
        # cancel factors dividing the numerator exactly (cheap, keeps sizes sane)
        out = JetRational(num, den)
        out._cancel()
        return out

    __rmul__ = __mul__

    def __truediv__(self, other) -> "JetRational":
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero jet function")
        inv = JetRational(other.den_poly(), {other.num: 1})
        return self * inv

    def __pow__(self, k: int) -> "JetRational":
        if k < 0:
            return (JetRational(self.den_poly(), {self.num: 1})) ** (-k)
        out = JetRational(JetPoly.const(self.n, 1))
        for _ in range(k):
            out = out * self
        return out

    def _cancel(self) -> None:
        for f in list(self.den):
            while self.den.get(f, 0) > 0:
                try:
                    q = exact_div(self.num, f)
                except ValueError:
                    break
                self.num = q
                self.den[f] -= 1
                if self.den[f] == 0:
                    del self.den[f]
        if self.num.is_zero():
            self.den = {}

    def __eq__(self, other) -> bool:
        if not isinstance(other, (JetRational, JetPoly, int, Fraction, ExactScalar)):
            return NotImplemented
        other = self._coerce(other)
        return (self.num * other.den_poly() - other.num * self.den_poly()).is_zero()

    def __hash__(self):
        raise TypeError("JetRational is unhashable")

    def total_x_derivative(self) -> "JetRational":
        # d/dx (n / prod f^e) = (n' - n * sum e f'/f) / prod f^e, cleared
        n = self.num
        parts = n.total_x_derivative()
        out = JetRational(parts, self.den)
        for f, e in self.den.items():
            out = out - JetRational(n * f.total_x_derivative() * Fraction(e),
                                    _den_bump(self.den, f))
        return out

    def dx(self, k: int = 1) -> "JetRational":
        r = self
        for _ in range(k):
            r = r.total_x_derivative()
        return r

    def diff(self, alpha: int, s: int = 0) -> "JetRational":
        """Partial derivative with respect to v[alpha, s] (quotient rule)."""
        out = JetRational(self.num.diff(alpha, s), self.den)
        for f, e in self.den.items():
            out = out - JetRational(self.num * f.diff(alpha, s) * Fraction(e),
                                    _den_bump(self.den, f))
        return out

    def subs_eps_squared(self, factor) -> "JetRational":
        den = {f.subs_eps_squared(factor): e for f, e in self.den.items()}
        return JetRational(self.num.subs_eps_squared(factor), den)

    def eps_part(self, k: int) -> "JetRational":
        """Coefficient of eps^k when all denominator factors are eps-free."""
        for f in self.den:
            if any(key[0] != 0 for key in f.terms):
                raise ValueError("eps_part needs eps-free denominators")
        return JetRational(self.num.eps_part(k), self.den)

    def __str__(self) -> str:
        if not self.den:
            return str(self.num)
        dens = "*".join(
            f"({f})" + (f"^{e}" if e != 1 else "") for f, e in sorted(self.den.items(), key=lambda kv: str(kv[0]))
        )
        return f"({self.num})/({dens})"

    __repr__ = __str__


def _den_bump(den: dict, f: JetPoly) -> dict:
    out = dict(den)
    out[f] = out.get(f, 0) + 1
    return out
