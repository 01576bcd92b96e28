"""Truncated multivariate power series in the hierarchy times and eps.

Variables are time labels (alpha, p); the small parameter eps is kept as a
separate (possibly negative) integer exponent.  A series carries truncation
bounds: maximal total degree, maximal time level, and an eps window.  All
arithmetic is exact within the combined bounds of its inputs; the reliable
window of a product is propagated from the supports (a factor with positive
minimal degree extends the reliable range of the product).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Optional, Union

from .errors import TruncationInsufficient
from .scalars import ExactScalar

INF = 10**9


def _clamp(x: int) -> int:
    return max(-INF, min(INF, x))


def _clamp_lo(x: int) -> int:
    return max(-INF, min(INF, x))


# monomial: sorted tuple of ((alpha, p), exponent)
Mono = tuple


def _mono_deg(m: Mono) -> int:
    return sum(e for _, e in m)


def _mono_level(m: Mono) -> int:
    return max((p for (_, p), _ in m), default=0)


def _mono_mul(a: Mono, b: Mono) -> Mono:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for k, e in b:
        d[k] = d.get(k, 0) + e
    return tuple(sorted(d.items()))


class TauSeries:
    __slots__ = ("terms", "max_degree", "max_level", "eps_lo", "eps_hi")

    def __init__(self, max_degree: int, max_level: int = INF,
                 eps_lo: int = -INF, eps_hi: int = INF, terms: Optional[dict] = None):
        self.max_degree = max_degree
        self.max_level = max_level
        self.eps_lo = eps_lo
        self.eps_hi = eps_hi
        self.terms: dict[tuple[Mono, int], ExactScalar] = {}
        if terms:
            for (m, e), c in terms.items():
                c = c if isinstance(c, ExactScalar) else ExactScalar(c)
                if not c.is_zero() and _mono_deg(m) <= max_degree and eps_lo <= e <= eps_hi:
                    self.terms[(m, e)] = c

    # -- constructors ---------------------------------------------------------

    @staticmethod
    def const(c, max_degree: int, max_level: int = INF,
              eps_lo: int = -INF, eps_hi: int = INF) -> "TauSeries":
        return TauSeries(max_degree, max_level, eps_lo, eps_hi, {((), 0): c})

    @staticmethod
    def time_var(alpha: int, p: int, max_degree: int, max_level: int = INF,
                 eps_lo: int = -INF, eps_hi: int = INF) -> "TauSeries":
        return TauSeries(max_degree, max_level, eps_lo, eps_hi,
                         {((((alpha, p), 1),), 0): 1})

    def zero_like(self) -> "TauSeries":
        return TauSeries(self.max_degree, self.max_level, self.eps_lo, self.eps_hi)

    def with_bounds(self, max_degree=None, max_level=None, eps_lo=None, eps_hi=None) -> "TauSeries":
        out = TauSeries(
            self.max_degree if max_degree is None else max_degree,
            self.max_level if max_level is None else max_level,
            self.eps_lo if eps_lo is None else eps_lo,
            self.eps_hi if eps_hi is None else eps_hi,
        )
        for k, c in self.terms.items():
            m, e = k
            if _mono_deg(m) <= out.max_degree and out.eps_lo <= e <= out.eps_hi:
                out.terms[k] = c
        return out

    # -- inspection -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, ExactScalar)):
            other = TauSeries.const(other, self.max_degree, self.max_level,
                                    self.eps_lo, self.eps_hi)
        if not isinstance(other, TauSeries):
            return NotImplemented
        return self.terms == other.terms

    def coefficient(self, mono: Union[Mono, dict], eps: int = 0) -> ExactScalar:
        """Exact coefficient; raises TruncationInsufficient outside bounds."""
        if isinstance(mono, dict):
            mono = tuple(sorted((k, e) for k, e in mono.items() if e))
        if _mono_deg(mono) > self.max_degree or not (self.eps_lo <= eps <= self.eps_hi):
            raise TruncationInsufficient(
                f"coefficient at degree {_mono_deg(mono)}, eps {eps} outside bounds")
        if _mono_level(mono) > self.max_level:
            raise TruncationInsufficient("monomial level outside bounds")
        return self.terms.get((mono, eps), ExactScalar(0))

    def constant_term(self) -> ExactScalar:
        return self.terms.get(((), 0), ExactScalar(0))

    def min_degree(self) -> int:
        return min((_mono_deg(m) for m, _ in self.terms), default=INF)

    def min_eps(self) -> int:
        return min((e for _, e in self.terms), default=INF)

    def _deg_floor(self) -> int:
        """Exact lower bound for the true total degree of the support."""
        if self.terms:
            return self.min_degree()
        return _clamp(self.max_degree + 1)

    def _eps_floor(self) -> int:
        """Lower bound for the true eps support (unknown region counts)."""
        stored = self.min_eps() if self.terms else _clamp(self.eps_hi + 1)
        if self.eps_lo > -INF:
            stored = min(stored, self.eps_lo)
        return stored

    def cap_degree(self, max_degree: int) -> "TauSeries":
        """Lower the degree ceiling (never raises bounds)."""
        if self.max_degree <= max_degree:
            return self
        return self.with_bounds(max_degree=max_degree)

    # -- arithmetic -----------------------------------------------------------

    def _coerce(self, other) -> "TauSeries":
        if isinstance(other, TauSeries):
            return other
        return TauSeries.const(other, self.max_degree, self.max_level,
                               self.eps_lo, self.eps_hi)

    def __add__(self, other) -> "TauSeries":
        other = self._coerce(other)
        out = TauSeries(min(self.max_degree, other.max_degree),
                        min(self.max_level, other.max_level),
                        max(self.eps_lo, other.eps_lo),
                        min(self.eps_hi, other.eps_hi))
        for src in (self, other):
            for k, c in src.terms.items():
                m, e = k
                if _mono_deg(m) > out.max_degree or not (out.eps_lo <= e <= out.eps_hi):
                    continue
                s = out.terms.get(k)
                s = c if s is None else s + c
                if s.is_zero():
                    out.terms.pop(k, None)
                else:
                    out.terms[k] = s
        return out

    __radd__ = __add__

    def __neg__(self) -> "TauSeries":
        out = TauSeries(self.max_degree, self.max_level, self.eps_lo, self.eps_hi)
        out.terms = {k: -c for k, c in self.terms.items()}
        return out

    def __sub__(self, other) -> "TauSeries":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "TauSeries":
        return self._coerce(other) + (-self)

    def __mul__(self, other) -> "TauSeries":
        if isinstance(other, (int, Fraction, ExactScalar)):
            c0 = other if isinstance(other, ExactScalar) else ExactScalar(other)
            out = TauSeries(self.max_degree, self.max_level, self.eps_lo, self.eps_hi)
            if not c0.is_zero():
                out.terms = {k: c * c0 for k, c in self.terms.items()}
            return out
        other = self._coerce(other)
        # reliable ceilings extend by the partner's support floor
        deg = min(_clamp(self.max_degree + other._deg_floor()),
                  _clamp(other.max_degree + self._deg_floor()))
        ehi = min(_clamp(self.eps_hi + other._eps_floor()),
                  _clamp(other.eps_hi + self._eps_floor()))
        elo = max(_clamp_lo(self.eps_lo + other._eps_floor()),
                  _clamp_lo(other.eps_lo + self._eps_floor()))
        if self.eps_lo == -INF and other.eps_lo == -INF:
            elo = -INF
        elo = min(elo, ehi)
        out = TauSeries(deg, min(self.max_level, other.max_level), elo, ehi)
        items1 = [(_mono_deg(m), m, e, c) for (m, e), c in self.terms.items()]
        items2 = sorted(
            ((_mono_deg(m), m, e, c) for (m, e), c in other.terms.items()),
            key=lambda t: t[0])
        bound = out.max_degree
        terms = out.terms
        for d1, m1, e1, c1 in items1:
            for d2, m2, e2, c2 in items2:
                if d1 + d2 > bound:
                    break
                e = e1 + e2
                if not (out.eps_lo <= e <= out.eps_hi):
                    continue
                k = (_mono_mul(m1, m2), e)
                c = c1 * c2
                s = terms.get(k)
                s = c if s is None else s + c
                if s.is_zero():
                    terms.pop(k, None)
                else:
                    terms[k] = s
        return out

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "TauSeries":
        if n < 0:
            return self.inverse() ** (-n)
        out = TauSeries.const(1, self.max_degree, self.max_level, self.eps_lo, self.eps_hi)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def _cap(self, other: "TauSeries") -> "TauSeries":
        """Truncate `other` back to self's declared bounds."""
        return other.with_bounds(self.max_degree, self.max_level,
                                 self.eps_lo, self.eps_hi)

    def inverse(self) -> "TauSeries":
        c0 = self.constant_term()
        if c0.is_zero():
            raise ZeroDivisionError("series with zero constant term has no inverse")
        inv0 = c0.inverse()
        r = self._cap(-(self * inv0 - 1))  # r has zero constant term
        out = TauSeries.const(1, self.max_degree, self.max_level, self.eps_lo, self.eps_hi)
        power = out
        guard = 0
        while True:
            power = self._cap(power * r)
            if power.is_zero():
                break
            out = out + power
            guard += 1
            if guard > 100000:
                raise RuntimeError("series inverse did not terminate; unbounded eps window?")
        return out * inv0

    def __truediv__(self, other) -> "TauSeries":
        if isinstance(other, (int, Fraction, ExactScalar)):
            c = other if isinstance(other, ExactScalar) else ExactScalar(other)
            return self * c.inverse()
        return self * self._coerce(other).inverse()

    def exp(self) -> "TauSeries":
        if not self.constant_term().is_zero():
            raise ValueError("series exponential needs zero constant term")
        out = TauSeries.const(1, self.max_degree, self.max_level, self.eps_lo, self.eps_hi)
        term = out
        k = 0
        while True:
            k += 1
            term = self._cap(term * self / Fraction(k))
            if term.is_zero():
                break
            out = out + term
            if k > 100000:
                raise RuntimeError("series exp did not terminate; check eps grading")
        return out

    def log(self) -> "TauSeries":
        c0 = self.constant_term()
        if not c0 == ExactScalar(1):
            raise ValueError("series log implemented for constant term 1")
        r = self - 1
        out = self.zero_like()
        term = TauSeries.const(-1, self.max_degree, self.max_level, self.eps_lo, self.eps_hi)
        k = 0
        while True:
            k += 1
            term = self._cap(-(term * r))
            if term.is_zero():
                break
            out = out + term / Fraction(k)
            if k > 100000:
                raise RuntimeError("series log did not terminate")
        return out

    # -- calculus -------------------------------------------------------------

    def diff(self, alpha: int, p: int) -> "TauSeries":
        if p > self.max_level:
            raise TruncationInsufficient(
                f"derivative in t[{alpha},{p}] beyond level bound {self.max_level}")
        out = TauSeries(self.max_degree - 1, self.max_level, self.eps_lo, self.eps_hi)
        key = (alpha, p)
        for (m, e), c in self.terms.items():
            d = dict(m)
            k = d.get(key, 0)
            if not k:
                continue
            if k == 1:
                del d[key]
            else:
                d[key] = k - 1
            mono = tuple(sorted(d.items()))
            if _mono_deg(mono) > out.max_degree:
                continue
            kk = (mono, e)
            add = c * Fraction(k)
            s = out.terms.get(kk)
            s = add if s is None else s + add
            if s.is_zero():
                out.terms.pop(kk, None)
            else:
                out.terms[kk] = s
        return out

    def mul_eps(self, power: int) -> "TauSeries":
        out = TauSeries(self.max_degree, self.max_level,
                        self.eps_lo + power, self.eps_hi + power)
        out.terms = {(m, e + power): c for (m, e), c in self.terms.items()}
        return out

    def eps_part(self, e0: int) -> "TauSeries":
        """Coefficient of eps^e0, with eps window collapsed to {0}."""
        if not (self.eps_lo <= e0 <= self.eps_hi):
            raise TruncationInsufficient(f"eps^{e0} outside window")
        out = TauSeries(self.max_degree, self.max_level, 0, 0)
        out.terms = {(m, 0): c for (m, e), c in self.terms.items() if e == e0}
        return out

    # -- rendering ------------------------------------------------------------

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (m, e) in sorted(self.terms, key=lambda k: (sum(x for _, x in k[0]), k[1], k[0])):
            c = self.terms[(m, e)]
            fs = [f"({c})"] if not c.is_rational() else [str(c)]
            if e:
                fs.append(f"eps^{e}" if e != 1 else "eps")
            for (a, p), k in m:
                fs.append(f"t[{a},{p}]" + (f"^{k}" if k != 1 else ""))
            parts.append("*".join(fs))
        return " + ".join(parts)

    __repr__ = __str__
