"""Exact scalars: rationals extended by declared algebraic generators.

The coefficient field of the whole engine is Q adjoined finitely many
algebraic numbers, each given by a monic minimal polynomial over Q.  Values
are kept reduced: the exponent of every generator stays below the degree of
its minimal polynomial.  No floating point is used anywhere.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Union

Rat = Union[int, Fraction]

# name -> tuple of Fraction coefficients (c_0, ..., c_{d-1}) meaning
# g^d = c_{d-1} g^{d-1} + ... + c_1 g + c_0
_GENERATORS: dict[str, tuple[Fraction, ...]] = {}


def declare_generator(name: str, reduction: Iterable[Rat]) -> None:
    """Register generator `name` with g^d = sum_i reduction[i] * g^i.

    Re-declaring with the same reduction rule is a no-op; conflicting
    re-declarations raise ValueError.
    """
    rule = tuple(Fraction(c) for c in reduction)
    if not rule:
        raise ValueError("reduction rule must have at least one coefficient")
    old = _GENERATORS.get(name)
    if old is not None:
        if old != rule:
            raise ValueError(f"generator {name!r} already declared differently")
        return
    _GENERATORS[name] = rule


def generator_degree(name: str) -> int:
    return len(_GENERATORS[name])


# The two constants needed by the builtin models.
declare_generator("i", (-1, 0))      # i^2 = -1
declare_generator("sqrt(2)", (2, 0))  # sqrt(2)^2 = 2


# A monomial in the generators: sorted tuple of (name, exponent) pairs,
# "" tuple for the rational part.
Mono = tuple[tuple[str, int], ...]


def _mono_mul(a: Mono, b: Mono) -> dict[Mono, Fraction]:
    """Product of two reduced generator monomials, reduced again."""
    powers: dict[str, int] = {}
    for name, e in a:
        powers[name] = powers.get(name, 0) + e
    for name, e in b:
        powers[name] = powers.get(name, 0) + e
    return _reduce_powers(powers)


def _reduce_powers(powers: dict[str, int]) -> dict[Mono, Fraction]:
    # repeatedly rewrite g^d via the reduction rule
    terms: dict[Mono, Fraction] = {tuple(sorted((n, e) for n, e in powers.items() if e)): Fraction(1)}
    while True:
        for mono, coeff in terms.items():
            bad = next(((n, e) for n, e in mono if e >= generator_degree(n)), None)
            if bad is not None:
                break
        else:
            return terms
        name, e = bad
        del terms[mono]
        rule = _GENERATORS[name]
        d = len(rule)
        rest = tuple((n, x) for n, x in mono if n != name)
        for i, c in enumerate(rule):
            if c == 0:
                continue
            new_powers = dict(rest)
            new_e = e - d + i
            if new_e:
                new_powers[name] = new_e
            for sub_mono, sub_c in _reduce_powers(new_powers).items():
                key = sub_mono
                terms[key] = terms.get(key, Fraction(0)) + coeff * c * sub_c
                if terms[key] == 0:
                    del terms[key]


class ExactScalar:
    """Element of Q(g_1, ..., g_m), kept in reduced canonical form."""

    __slots__ = ("terms",)

    def __init__(self, value: Union[Rat, "ExactScalar", dict] = 0):
        if isinstance(value, ExactScalar):
            self.terms = dict(value.terms)
        elif isinstance(value, dict):
            self.terms = {m: Fraction(c) for m, c in value.items() if c != 0}
        else:
            q = Fraction(value)
            self.terms = {(): q} if q else {}

    @staticmethod
    def generator(name: str, power: int = 1) -> "ExactScalar":
        if name not in _GENERATORS:
            raise KeyError(f"unknown generator {name!r}")
        out = ExactScalar()
        for mono, c in _reduce_powers({name: power}).items():
            out.terms[mono] = c
        return out

    # -- predicates ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_rational(self) -> bool:
        return all(m == () for m in self.terms)

    def as_fraction(self) -> Fraction:
        if not self.terms:
            return Fraction(0)
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.terms[()]

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> "ExactScalar":
        if isinstance(other, ExactScalar):
            return other
        return ExactScalar(other)

    def __add__(self, other) -> "ExactScalar":
        if not isinstance(other, (int, Fraction, ExactScalar)):
            return NotImplemented
        other = self._coerce(other)
        st, ot = self.terms, other.terms
        if len(st) == 1 and len(ot) == 1:
            (ma, ca), = st.items()
            (mb, cb), = ot.items()
            if ma == mb:
                s = ca + cb
                out = ExactScalar.__new__(ExactScalar)
                out.terms = {ma: s} if s else {}
                return out
        terms = dict(st)
        for m, c in ot.items():
            s = terms.get(m, Fraction(0)) + c
            if s:
                terms[m] = s
            else:
                terms.pop(m, None)
        out = ExactScalar.__new__(ExactScalar)
        out.terms = terms
        return out

    __radd__ = __add__

    def __neg__(self) -> "ExactScalar":
        out = ExactScalar.__new__(ExactScalar)
        out.terms = {m: -c for m, c in self.terms.items()}
        return out

    def __sub__(self, other) -> "ExactScalar":
        if not isinstance(other, (int, Fraction, ExactScalar)):
            return NotImplemented
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "ExactScalar":
        return self._coerce(other) + (-self)

    def __mul__(self, other) -> "ExactScalar":
        if not isinstance(other, (int, Fraction, ExactScalar)):
            return NotImplemented
        other = self._coerce(other)
        st, ot = self.terms, other.terms
        if len(st) == 1 and len(ot) == 1:
            (ma, ca), = st.items()
            (mb, cb), = ot.items()
            if not ma or not mb:
                out = ExactScalar.__new__(ExactScalar)
                c = ca * cb
                out.terms = {(ma or mb): c} if c else {}
                return out
        if self.is_rational():
            q = st.get((), Fraction(0))
            out = ExactScalar.__new__(ExactScalar)
            out.terms = {m: q * c for m, c in ot.items()} if q else {}
            return out
        if other.is_rational():
            return other * self
        terms: dict[Mono, Fraction] = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                for m, f in _mono_mul(ma, mb).items():
                    s = terms.get(m, Fraction(0)) + ca * cb * f
                    if s:
                        terms[m] = s
                    else:
                        terms.pop(m, None)
        out = ExactScalar()
        out.terms = terms
        return out

    __rmul__ = __mul__

    def inverse(self) -> "ExactScalar":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero scalar")
        if self.is_rational():
            return ExactScalar(1 / self.terms[()])
        # invert in the finite-dimensional Q-algebra spanned by the reduced
        # monomials of the generators that actually occur
        names = sorted({n for m in self.terms for n, _ in m})
        basis: list[Mono] = [()]
        for n in names:
            d = generator_degree(n)
            basis = [
                tuple(sorted(m + (((n, e),) if e else ()))) for m in basis for e in range(d)
            ]
        index = {m: i for i, m in enumerate(basis)}
        size = len(basis)
        # columns: self * basis_j expressed in the basis; solve M x = e_0
        mat = [[Fraction(0)] * size for _ in range(size)]
        for j, bm in enumerate(basis):
            prod = self * ExactScalar({bm: 1})
            for m, c in prod.terms.items():
                mat[index[m]][j] = c
        rhs = [Fraction(0)] * size
        rhs[0] = Fraction(1)
        sol = _solve_linear(mat, rhs)
        if sol is None:
            raise ZeroDivisionError(f"{self} is a zero divisor")
        out = ExactScalar()
        for j, x in enumerate(sol):
            if x:
                out.terms[basis[j]] = x
        return out

    def __truediv__(self, other) -> "ExactScalar":
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other) -> "ExactScalar":
        return self._coerce(other) * self.inverse()

    def __pow__(self, n: int) -> "ExactScalar":
        if n < 0:
            return self.inverse() ** (-n)
        out = ExactScalar(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- comparisons / hashing ---------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, ExactScalar)):
            return self.terms == self._coerce(other).terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self) -> bool:
        return bool(self.terms)

    # -- rendering ----------------------------------------------------------

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for mono in sorted(self.terms):
            c = self.terms[mono]
            factors = [str(c)]
            for name, e in mono:
                factors.append(name if e == 1 else f"{name}^{e}")
            text = "*".join(factors)
            if parts and not text.startswith("-"):
                parts.append("+" + text)
            else:
                parts.append(text)
        return "".join(parts)

    __repr__ = __str__


def _solve_linear(mat: list[list[Fraction]], rhs: list[Fraction]):
    """Gaussian elimination over Q; returns None if the system is singular."""
    n = len(mat)
    a = [row[:] + [rhs[i]] for i, row in enumerate(mat)]
    col = 0
    pivots = []
    for col in range(n):
        piv = next((r for r in range(len(pivots), n) if a[r][col] != 0), None)
        if piv is None:
            continue
        a[len(pivots)], a[piv] = a[piv], a[len(pivots)]
        r0 = len(pivots)
        inv = 1 / a[r0][col]
        a[r0] = [x * inv for x in a[r0]]
        for r in range(n):
            if r != r0 and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[r0])]
        pivots.append(col)
        if len(pivots) == n:
            break
    if len(pivots) < n:
        # singular: consistent only if residual rows vanish
        for r in range(len(pivots), n):
            if a[r][n] != 0:
                return None
        return None
    sol = [Fraction(0)] * n
    for r, c in enumerate(pivots):
        sol[c] = a[r][n]
    return sol


def sqrt_scalar(value: Rat) -> ExactScalar:
    """Exact square root of a positive rational, as generator where needed.

    Radicands are normalized to squarefree integers so that all square roots
    live in a shared tower: sqrt(1/2) = sqrt(2)/2 uses the sqrt(2) generator.
    """
    q = Fraction(value)
    if q < 0:
        raise ValueError("use i * sqrt_scalar(-q) for negative radicands")
    if q == 0:
        return ExactScalar(0)
    # sqrt(p/q) = sqrt(p*q)/q with p*q = s^2 * r, r squarefree
    s, r = _split_square(q.numerator * q.denominator)
    outside = Fraction(s, q.denominator)
    if r == 1:
        return ExactScalar(outside)
    name = f"sqrt({r})"
    declare_generator(name, (r, 0))
    return ExactScalar(outside) * ExactScalar.generator(name)


def _split_square(n: int) -> tuple[int, int]:
    """n = s^2 * r with r squarefree (trial division; desk-scale inputs)."""
    s, r = 1, 1
    d = 2
    while d * d <= n:
        while n % (d * d) == 0:
            s *= d
            n //= d * d
        if n % d == 0:
            r *= d
            n //= d
        d += 1
    return s, r * n


ONE = ExactScalar(1)
ZERO = ExactScalar(0)
I = ExactScalar.generator("i")
SQRT2 = ExactScalar.generator("sqrt(2)")


def rat(p, q=None) -> ExactScalar:
    """Convenience constructor for rational ExactScalars."""
    return ExactScalar(Fraction(p) if q is None else Fraction(p, q))
