"""Differential polynomials in flat coordinates and their jets.

A JetPoly is a finite sum of terms

    coeff * eps^e * prod v[a,s]^k * prod exp(q * v[g])

with ExactScalar coefficients.  Jet variables v[a,s] (s >= 1) carry integer
exponents; the position variables v[a] = v[a,0] may carry rational exponents
(the I2(kappa) potentials need them).  Exponential generators multiply by
adding their frequencies: exp(q*v[g]) * exp(r*v[g]) = exp((q+r)*v[g]).

Grading: deg v[a,s] = s for s >= 1, deg eps = -1, everything else degree 0.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Iterable, Optional, Union

from .scalars import ExactScalar, Rat, rat

# jet part: sorted tuple of ((alpha, s), exponent); exponent is Fraction for
# s == 0 and positive int for s >= 1.
# exp part: sorted tuple of (gamma, frequency Fraction), frequency != 0.
JetKey = tuple[int, tuple, tuple]


def _norm_exp(s: int, e) -> Union[int, Fraction]:
    e = Fraction(e)
    if s > 0:
        if e.denominator != 1 or e < 0:
            raise ValueError(f"jet exponent for s={s} must be a nonnegative integer")
        return int(e)
    if e < 0:
        raise ValueError("negative powers are not supported in JetPoly")
    return int(e) if e.denominator == 1 else e


class JetPoly:
    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Optional[dict] = None):
        self.n = n
        self.terms: dict[JetKey, ExactScalar] = {}
        if terms:
            for key, c in terms.items():
                c = c if isinstance(c, ExactScalar) else ExactScalar(c)
                if not c.is_zero():
                    self.terms[key] = c

    # -- constructors --------------------------------------------------------

    @staticmethod
    def const(n: int, c) -> "JetPoly":
        c = c if isinstance(c, ExactScalar) else ExactScalar(c)
        return JetPoly(n, {(0, (), ()): c})

    @staticmethod
    def zero(n: int) -> "JetPoly":
        return JetPoly(n)

    @staticmethod
    def var(n: int, alpha: int, s: int = 0, power: Rat = 1) -> "JetPoly":
        if not 1 <= alpha <= n:
            raise ValueError(f"coordinate index {alpha} out of range 1..{n}")
        e = _norm_exp(s, power)
        if e == 0:
            return JetPoly.const(n, 1)
        return JetPoly(n, {(0, (((alpha, s), e),), ()): ExactScalar(1)})

    @staticmethod
    def exp_gen(n: int, gamma: int, freq: Rat = 1) -> "JetPoly":
        if not 1 <= gamma <= n:
            raise ValueError(f"coordinate index {gamma} out of range 1..{n}")
        q = Fraction(freq)
        if q == 0:
            return JetPoly.const(n, 1)
        return JetPoly(n, {(0, (), ((gamma, q),)): ExactScalar(1)})

    @staticmethod
    def eps(n: int, power: int = 1) -> "JetPoly":
        return JetPoly(n, {(power, (), ()): ExactScalar(1)})

    # -- inspection ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, ExactScalar)):
            other = JetPoly.const(self.n, other)
        if not isinstance(other, JetPoly):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, frozenset((k, hash(c)) for k, c in self.terms.items())))

    def constant_term(self) -> ExactScalar:
        return self.terms.get((0, (), ()), ExactScalar(0))

    def is_constant(self) -> bool:
        return all(k == (0, (), ()) for k in self.terms)

    def as_scalar(self) -> ExactScalar:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.constant_term()

    def jet_degree_terms(self) -> set:
        """Set of gradings deg = sum(s*e) - eps occurring in the polynomial."""
        out = set()
        for eps, jets, _ in self.terms:
            out.add(sum(s * e for (_, s), e in jets) - eps)
        return out

    def max_jet_order(self) -> int:
        return max((s for _, jets, _ in self.terms for (_, s), _ in jets), default=0)

    def eps_orders(self) -> set:
        return {eps for eps, _, _ in self.terms}

    def eps_part(self, k: int) -> "JetPoly":
        """Coefficient of eps^k, as an eps-free JetPoly."""
        return JetPoly(
            self.n, {(0, jets, ex): c for (eps, jets, ex), c in self.terms.items() if eps == k}
        )

    # -- arithmetic -----------------------------------------------------------

    def _coerce(self, other) -> "JetPoly":
        if isinstance(other, JetPoly):
            if other.n != self.n:
                raise ValueError("mixing JetPoly of different dimensions")
            return other
        return JetPoly.const(self.n, other)

    def __add__(self, other) -> "JetPoly":
        other = self._coerce(other)
        terms = dict(self.terms)
        for k, c in other.terms.items():
            s = terms.get(k)
            s = c if s is None else s + c
            if s.is_zero():
                terms.pop(k, None)
            else:
                terms[k] = s
        out = JetPoly(self.n)
        out.terms = terms
        return out

    __radd__ = __add__

    def __neg__(self) -> "JetPoly":
        out = JetPoly(self.n)
        out.terms = {k: -c for k, c in self.terms.items()}
        return out

    def __sub__(self, other) -> "JetPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "JetPoly":
        return self._coerce(other) + (-self)

    def __mul__(self, other) -> "JetPoly":
        if isinstance(other, (int, Fraction, ExactScalar)):
            c0 = other if isinstance(other, ExactScalar) else ExactScalar(other)
            out = JetPoly(self.n)
            if not c0.is_zero():
                out.terms = {k: c * c0 for k, c in self.terms.items()}
            return out
        other = self._coerce(other)
        terms: dict[JetKey, ExactScalar] = {}
        for (e1, j1, x1), c1 in self.terms.items():
            for (e2, j2, x2), c2 in other.terms.items():
                key = (e1 + e2, _jet_mul(j1, j2), _exp_mul(x1, x2))
                c = c1 * c2
                s = terms.get(key)
                s = c if s is None else s + c
                if s.is_zero():
                    terms.pop(key, None)
                else:
                    terms[key] = s
        out = JetPoly(self.n)
        out.terms = terms
        return out

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "JetPoly":
        if k < 0:
            raise ValueError("negative powers are not supported in JetPoly")
        out = JetPoly.const(self.n, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __truediv__(self, other) -> "JetPoly":
        if isinstance(other, (int, Fraction)):
            return self * ExactScalar(Fraction(1, 1) / Fraction(other))
        if isinstance(other, ExactScalar):
            return self * other.inverse()
        raise TypeError("JetPoly division only by scalars; use exact_div for polynomials")

    # -- calculus -------------------------------------------------------------

    def diff(self, alpha: int, s: int = 0) -> "JetPoly":
        """Partial derivative with respect to v[alpha, s].

        For s = 0 the exponential generators contribute via the chain rule.
        """
        terms: dict[JetKey, ExactScalar] = {}

        def _acc(key, c):
            if c.is_zero():
                return
            sm = terms.get(key)
            sm = c if sm is None else sm + c
            if sm.is_zero():
                terms.pop(key, None)
            else:
                terms[key] = sm

        for (eps, jets, exps), c in self.terms.items():
            for idx, ((a, t), e) in enumerate(jets):
                if a == alpha and t == s:
                    new_e = e - 1
                    rest = jets[:idx] + jets[idx + 1 :]
                    if new_e != 0:
                        rest = tuple(sorted(rest + (((a, t), new_e),)))
                    _acc((eps, rest, exps), c * ExactScalar(Fraction(e)))
            if s == 0:
                for g, q in exps:
                    if g == alpha:
                        _acc((eps, jets, exps), c * ExactScalar(q))
        out = JetPoly(self.n)
        out.terms = terms
        return out

    def total_x_derivative(self) -> "JetPoly":
        """Leibniz extension of v[a,s] -> v[a,s+1], exp(q v[g]) -> q v[g,1] exp."""
        out = JetPoly(self.n)
        for (eps, jets, exps), c in self.terms.items():
            base = JetPoly(self.n, {(eps, jets, exps): c})
            for (a, s), e in jets:
                # d/dx of v[a,s]^e = e v[a,s]^(e-1) v[a,s+1]
                piece = dict(jets)
                piece[(a, s)] = piece[(a, s)] - 1
                new_jets = {k: v for k, v in piece.items() if v != 0}
                new_jets[(a, s + 1)] = new_jets.get((a, s + 1), 0) + 1
                key = (eps, tuple(sorted(new_jets.items())), exps)
                out = out + JetPoly(self.n, {key: c * ExactScalar(Fraction(e))})
            for g, q in exps:
                piece = dict(jets)
                piece[(g, 1)] = piece.get((g, 1), 0) + 1
                key = (eps, tuple(sorted(piece.items())), exps)
                out = out + JetPoly(self.n, {key: c * ExactScalar(q)})
        return out

    def dx(self, k: int = 1) -> "JetPoly":
        p = self
        for _ in range(k):
            p = p.total_x_derivative()
        return p

    def variational_derivative(self, alpha: int) -> "JetPoly":
        """Euler-Lagrange operator: sum_s (-1)^s d_x^s (d/dv[alpha,s])."""
        out = JetPoly.zero(self.n)
        max_s = self.max_jet_order()
        for s in range(max_s + 1):
            d = self.diff(alpha, s)
            if d.is_zero():
                continue
            term = d.dx(s)
            out = out + (term if s % 2 == 0 else -term)
        return out

    def subs_eps_squared(self, factor: Rat) -> "JetPoly":
        """Substitute eps^2 -> factor * eps^2 (all eps powers must be even)."""
        f = Fraction(factor)
        out = JetPoly(self.n)
        for (eps, jets, exps), c in self.terms.items():
            if eps % 2 != 0:
                raise ValueError("odd eps power encountered in eps^2 substitution")
            out.terms[(eps, jets, exps)] = c * ExactScalar(f ** (eps // 2))
        return out

    def truncate_eps(self, max_eps: int) -> "JetPoly":
        return JetPoly(
            self.n, {k: c for k, c in self.terms.items() if k[0] <= max_eps}
        )

    def substitute(self, images: dict[int, "JetPoly"], max_eps: Optional[int] = None) -> "JetPoly":
        """Substitute v[a] -> images[a], extending to jets by d_x.

        Exponential generators exp(q*v[g]) are supported when the image of
        v[g] is a linear combination of position variables plus a rational
        constant (then the image is a product of exp generators).
        """
        d_images: dict[tuple[int, int], JetPoly] = {}

        def image_jet(a: int, s: int) -> JetPoly:
            if (a, s) not in d_images:
                if s == 0:
                    d_images[(a, 0)] = images[a]
                else:
                    d_images[(a, s)] = image_jet(a, s - 1).total_x_derivative()
            return d_images[(a, s)]

        out = JetPoly.zero(self.n)
        for (eps, jets, exps), c in self.terms.items():
            piece = JetPoly(self.n, {(eps, (), ()): c})
            for (a, s), e in jets:
                img = image_jet(a, s)
                if isinstance(e, Fraction) and e.denominator != 1:
                    raise ValueError("cannot substitute into fractional powers")
                piece = piece * img ** int(e)
                if max_eps is not None:
                    piece = piece.truncate_eps(max_eps)
            for g, q in exps:
                piece = piece * _exp_of(images[g], q)
                if max_eps is not None:
                    piece = piece.truncate_eps(max_eps)
            out = out + piece
        return out

    # -- rendering ------------------------------------------------------------

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for key in sorted(self.terms, key=_term_sort_key):
            eps, jets, exps = key
            c = self.terms[key]
            factors = []
            ctext = str(c)
            if ("+" in ctext[1:]) or ("-" in ctext[1:]):
                ctext = f"({ctext})"
            if ctext != "1" or (not jets and not exps and eps == 0):
                factors.append(ctext)
            if eps:
                factors.append("eps" if eps == 1 else f"eps^{eps}")
            for (a, s), e in jets:
                v = f"v[{a}]" if s == 0 else f"v[{a},{s}]"
                if e == 1:
                    factors.append(v)
                elif isinstance(e, Fraction) and e.denominator != 1:
                    factors.append(f"{v}^({e})")
                else:
                    factors.append(f"{v}^{e}")
            for g, q in exps:
                if q == 1:
                    factors.append(f"exp(v[{g}])")
                elif q.denominator == 1:
                    factors.append(f"exp({q}*v[{g}])")
                else:
                    factors.append(f"exp({q}*v[{g}])")
            text = "*".join(factors)
            if parts and not text.startswith("-"):
                parts.append("+" + text)
            else:
                parts.append(text)
        return "".join(parts)

    __repr__ = __str__


def _term_sort_key(key: JetKey):
    eps, jets, exps = key
    return (eps, tuple((a, s, str(e)) for (a, s), e in jets), tuple((g, str(q)) for g, q in exps))


def _jet_mul(j1, j2):
    if not j1:
        return j2
    if not j2:
        return j1
    d = dict(j1)
    for k, e in j2:
        d[k] = d.get(k, 0) + e
    return tuple(sorted((k, e) for k, e in d.items() if e != 0))


def _exp_mul(x1, x2):
    if not x1:
        return x2
    if not x2:
        return x1
    d = dict(x1)
    for g, q in x2:
        d[g] = d.get(g, Fraction(0)) + q
    return tuple(sorted((g, q) for g, q in d.items() if q != 0))


def _exp_of(p: JetPoly, freq: Fraction) -> JetPoly:
    """exp(freq * p) for p a rational-linear combination of position variables."""
    out = JetPoly.const(p.n, 1)
    for (eps, jets, exps), c in p.terms.items():
        if eps != 0 or exps:
            raise ValueError("exp substitution needs a linear polynomial in v")
        if not c.is_rational():
            raise ValueError("exp substitution needs rational coefficients")
        q = c.as_fraction() * freq
        if not jets:
            if q != 0:
                raise ValueError("exp of a nonzero constant is not algebraic")
            continue
        if len(jets) != 1 or jets[0][1] != 1 or jets[0][0][1] != 0:
            raise ValueError("exp substitution needs a linear polynomial in v")
        (g, _), _ = jets[0]
        out = out * JetPoly.exp_gen(p.n, g, q)
    return out


# -- integration by parts -----------------------------------------------------


def integrate_by_parts(p: JetPoly) -> tuple[JetPoly, Optional[JetPoly]]:
    """Reduce p modulo Im(d_x); also find an exact primitive when one exists.

    Returns (reduced, primitive): `primitive` is g with d_x g = p when p is a
    total derivative, else None; `reduced` is the canonical representative of
    p mod Im(d_x).  The elimination order is lexicographic on (s, alpha) with
    higher jets first; a term is integrated by parts only when the rewrite
    strictly lowers that rank, which pins a unique irreducible representative
    and guarantees termination.
    """
    n = p.n
    reduced = JetPoly.zero(n)
    primitive = JetPoly.zero(n)
    work = p
    guard = 0
    while not work.is_zero():
        guard += 1
        if guard > 200000:
            raise RuntimeError("integrate_by_parts failed to terminate")
        key = max(work.terms, key=_ibp_rank)
        eps, jets, exps = key
        c = work.terms[key]
        term = JetPoly(n, {key: c})
        g = _ibp_step(n, key, c)
        if g is None:
            reduced = reduced + term
            work = work - term
        else:
            primitive = primitive + g
            work = work - g.total_x_derivative()
    if reduced.is_zero():
        return reduced, primitive
    return reduced, None


def _ibp_rank(key: JetKey):
    eps, jets, exps = key
    if not jets:
        return ((0, 0), str(key))
    s = max(t for (_, t), _ in jets)
    if s == 0:
        return ((0, 0), str(key))
    a = max(b for (b, t), _ in jets if t == s)
    return ((s, a), str(key))


def _ibp_step(n: int, key: JetKey, c: ExactScalar) -> Optional[JetPoly]:
    """One elimination step for a single term, or None if irreducible."""
    eps, jets, exps = key
    if not jets:
        return None
    s = max(t for (_, t), _ in jets)
    if s == 0:
        return None
    a = max(b for (b, t), _ in jets if t == s)
    jd = dict(jets)
    e = jd[(a, s)]
    if e != 1:
        return None
    if s == 1:
        # reducible iff v[a,1] is the only first-order jet and a dominates
        # every occurring index (otherwise the rewrite escalates the rank)
        if any(t == 1 for (b, t) in jd if b != a):
            return None
        occurring = {b for (b, t) in jd} | {g for g, _ in exps}
        if max(occurring) != a:
            return None
        coeff_jets = tuple(sorted((k, v) for k, v in jd.items() if k != (a, 1)))
        coeff = JetPoly(n, {(eps, coeff_jets, exps): c})
        return _integrate_position(coeff, a)
    # s >= 2: other factors must have order <= s-2, except v[a,s-1]^k and
    # v[b,s-1] with b < a
    for (b, t), _ in jets:
        if (b, t) == (a, s):
            continue
        if t >= s:
            return None
        if t == s - 1 and b > a:
            return None
    k = jd.get((a, s - 1), 0)
    rest = tuple(sorted((kk, v) for kk, v in jd.items() if kk not in ((a, s), (a, s - 1))))
    new_jets = _jet_mul(rest, (((a, s - 1), k + 1),))
    return JetPoly(n, {(eps, new_jets, exps): c / ExactScalar(Fraction(k + 1))})


def _integrate_position(term: JetPoly, a: int) -> Optional[JetPoly]:
    """Integrate a single position-only term with respect to v[a]."""
    [(key, c)] = term.terms.items()
    eps, jets, exps = key
    e_a = dict(jets).get((a, 0), 0)
    freqs = [q for g, q in exps if g == a]
    q = freqs[0] if freqs else Fraction(0)
    if q == 0:
        new_jets = _jet_mul(tuple((k, v) for k, v in jets if k != (a, 0)), (((a, 0), e_a + 1),))
        return JetPoly(term.n, {(eps, new_jets, exps): c / ExactScalar(Fraction(e_a) + 1)})
    # integral of v^m e^{qv}: by parts, m must be a nonnegative integer
    if isinstance(e_a, Fraction) and e_a.denominator != 1:
        return None
    m = int(e_a)
    rest_jets = tuple((k, v) for k, v in jets if k != (a, 0))
    out = JetPoly.zero(term.n)
    coeff = ExactScalar(1) / ExactScalar(q)
    for j in range(m, -1, -1):
        jj = _jet_mul(rest_jets, (((a, 0), j),)) if j else rest_jets
        out = out + JetPoly(term.n, {(eps, jj, exps): c * coeff})
        if j:
            coeff = -coeff * ExactScalar(Fraction(j)) / ExactScalar(q)
    return out


def integrate_position(p: JetPoly, a: int) -> JetPoly:
    """Antiderivative of p with respect to the position variable v[a].

    Supports polynomial and rational powers of v[a] and exp(q*v[a]) factors
    (integer v[a]-powers in the exponential case).  Jets of v[a] may appear
    as spectator factors.
    """
    out = JetPoly.zero(p.n)
    for key, c in p.terms.items():
        term = JetPoly(p.n, {key: c})
        g = _integrate_position(term, a)
        if g is None:
            raise ValueError(f"cannot integrate term {term} in v[{a}]")
        out = out + g
    return out


def exact_div(p: JetPoly, q: JetPoly) -> JetPoly:
    """Exact polynomial division p / q; raises ValueError if q does not divide p."""
    if q.is_zero():
        raise ZeroDivisionError("division by zero JetPoly")
    n = p.n
    qlead = max(q.terms, key=_term_order)
    qc = q.terms[qlead]
    quot = JetPoly.zero(n)
    work = p
    guard = 0
    while not work.is_zero():
        guard += 1
        if guard > 20000:
            raise ValueError("exact_div: does not divide (no termination)")
        wlead = max(work.terms, key=_term_order)
        factor = _term_div(wlead, qlead)
        if factor is None:
            raise ValueError("exact_div: does not divide")
        c = work.terms[wlead] / qc
        t = JetPoly(n, {factor: c})
        quot = quot + t
        work = work - t * q
    return quot


def _term_order(key: JetKey):
    eps, jets, exps = key
    deg = sum(Fraction(e) for _, e in jets) + sum(abs(qq) for _, qq in exps)
    return (deg, eps, _term_sort_key(key))


def _term_div(a: JetKey, b: JetKey) -> Optional[JetKey]:
    ea, ja, xa = a
    eb, jb, xb = b
    jd = dict(ja)
    for k, e in jb:
        jd[k] = jd.get(k, 0) - e
        if jd[k] < 0:
            return None
    xd = dict(xa)
    for g, qq in xb:
        xd[g] = xd.get(g, Fraction(0)) - qq
    return (
        ea - eb,
        tuple(sorted((k, e) for k, e in jd.items() if e != 0)),
        tuple(sorted((g, qq) for g, qq in xd.items() if qq != 0)),
    )
