"""Evaluate differential polynomials on series solutions."""

from __future__ import annotations

from fractions import Fraction
from math import comb
from typing import Union

from .errors import TruncationInsufficient
from .jets import JetPoly
from .scalars import ExactScalar
from .series import TauSeries


def evaluate_on_solution(p: JetPoly, sol: dict[int, TauSeries],
                         x_var: tuple[int, int] = (1, 0),
                         cache: dict | None = None) -> TauSeries:
    """Substitute v[a,s] -> (d/dx)^s sol[a] into p, with x = t[x_var].

    Exponential generators become exact series exponentials (the substituted
    series must have zero constant term); rational powers expand by the
    binomial series around constant term 1.  A mutable `cache` may be shared
    between calls evaluating on the same solution.
    """
    any_series = next(iter(sol.values()))
    jets_cache = cache if cache is not None else {}

    def jet(a: int, s: int) -> TauSeries:
        if ("jet", a, s) not in jets_cache:
            if s == 0:
                jets_cache[("jet", a, 0)] = sol[a]
            else:
                jets_cache[("jet", a, s)] = jet(a, s - 1).diff(*x_var)
        return jets_cache[("jet", a, s)]

    def expval(g: int, q) -> TauSeries:
        if ("exp", g, q) not in jets_cache:
            base = sol[g] * q
            if not base.constant_term().is_zero():
                raise TruncationInsufficient(
                    "exponential of a series with nonzero constant term")
            jets_cache[("exp", g, q)] = base.exp()
        return jets_cache[("exp", g, q)]

    cap = any_series.max_degree
    out = None
    for (eps, jets, exps), c in p.terms.items():
        piece = TauSeries.const(c, any_series.max_degree, any_series.max_level,
                                any_series.eps_lo, any_series.eps_hi)
        if eps:
            piece = piece.mul_eps(eps)
        for (a, s), e in jets:
            base = jet(a, s)
            if isinstance(e, Fraction) and e.denominator != 1:
                piece = (piece * _pow_frac(base, e)).cap_degree(cap)
            else:
                for _ in range(int(e)):
                    piece = (piece * base).cap_degree(cap)
        for g, q in exps:
            piece = (piece * expval(g, q)).cap_degree(cap)
        out = piece if out is None else out + piece
    if out is None:
        return TauSeries(any_series.max_degree, any_series.max_level,
                         any_series.eps_lo, any_series.eps_hi)
    return out


def _pow_frac(s: TauSeries, q: Fraction) -> TauSeries:
    c0 = s.constant_term()
    if not c0 == ExactScalar(1):
        raise TruncationInsufficient(
            "fractional power of a series needs constant term 1")
    r = s - 1
    bounds = (s.max_degree, s.max_level, s.eps_lo, s.eps_hi)
    out = TauSeries.const(1, *bounds)
    term = out
    k = 0
    while True:
        term = (term * r * Fraction(q - k, k + 1)).with_bounds(*bounds)
        k += 1
        if term.is_zero():
            break
        out = out + term
        if k > 100000:
            raise RuntimeError("fractional power did not terminate")
    return out
