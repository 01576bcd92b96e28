"""Deformation of the polytropic gas equations through eps^4.

The flows are for t = -t^{1,1} of the I2(kappa) Principal Hierarchy in the
normal coordinates of the genus expansion:

    u_t   + d_x( u^2/2 + rho^kappa + eps^2 [...] + eps^4 [...] ) = 0
    rho_t + d_x( rho u           + eps^2 [...] + eps^4 [...] ) = 0

The eps^4 coefficient tables a_1..a_9, b_1..b_7 are installed verbatim.  The
eps^2 u-flux coefficients are kappa(kappa-2)/8 and kappa^2/12: the printed
ones lack a factor kappa, which is pinned down by re-deriving the eps^2 layer
from the genus-one quasi-Miura transformation (see derive_eps2_deformation).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

from .frobenius import i2_model
from .genus import genus1
from .hierarchy import ThetaTable, flow_rhs
from .jets import JetPoly
from .rational import JetRational

Rat = Union[int, Fraction]


def polytropic_tables(kappa: Rat) -> dict[str, Fraction]:
    """The sixteen eps^4 coefficients as exact rational functions of kappa."""
    k = Fraction(kappa)
    if k == 0:
        raise ValueError("kappa must be nonzero")
    return {
        "a1": (36 + 144 * k - 59 * k ** 2 + 19 * k ** 3) / (5760 * k ** 3),
        "a2": (60 + 176 * k + 433 * k ** 2 - 182 * k ** 3 + 17 * k ** 4) / (5760 * k ** 3),
        "a3": (6 - 19 * k - 11 * k ** 2 - 4 * k ** 3) / (1440 * k ** 3),
        "a4": (-6 - 5 * k + 13 * k ** 2) / (1440 * k ** 3),
        "a5": (-42 + 13 * k - 7 * k ** 2) / (2880 * k ** 2),
        "a6": (-36 - 72 * k - 245 * k ** 2 - 61 * k ** 3 + 30 * k ** 4) / (2880 * k ** 2),
        "a7": (6 + 5 * k + 15 * k ** 2 + 5 * k ** 3 + 5 * k ** 4) / (1440 * k ** 2),
        "a8": Fraction(1) / (120 * k),
        "a9": (2 + 5 * k) / Fraction(240),
        "b1": (108 + 192 * k - 97 * k ** 2 + 17 * k ** 3) / (2880 * k ** 3),
        "b2": (-18 - 75 * k + 47 * k ** 2 - 10 * k ** 3) / (1440 * k ** 3),
        "b3": -(6 + 17 * k - 5 * k ** 2 + 2 * k ** 3) / (288 * k ** 3),
        "b4": (6 - 4 * k + k ** 2) / (180 * k ** 2),
        "b5": (6 + k + k ** 2) / (720 * k ** 2),
        "b6": (6 + k + k ** 2) / (720 * k ** 2),
        "b7": -Fraction(1) / (360 * k),
    }


def polytropic_fluxes(kappa: Rat) -> tuple[JetRational, JetRational]:
    """Flux densities (u-equation, rho-equation) through eps^4.

    Rational powers of rho appear for non-integer exponents; negative powers
    are kept as denominators.
    """
    k = Fraction(kappa)
    n = 2
    u = JetPoly.var(n, 1)
    rho = JetPoly.var(n, 2)
    ux, uxx, uxxx, uxxxx = (JetPoly.var(n, 1, s) for s in (1, 2, 3, 4))
    rx, rxx, rxxx, rxxxx = (JetPoly.var(n, 2, s) for s in (1, 2, 3, 4))
    eps2 = JetPoly.eps(n, 2)
    eps4 = JetPoly.eps(n, 4)
    t = polytropic_tables(k)

    def rp(power: Fraction) -> JetRational:
        power = Fraction(power)
        if power >= 0:
            return JetRational(JetPoly.var(n, 2, 0, power))
        return JetRational(JetPoly.const(n, 1), {JetPoly.var(n, 2, 0, -power): 1})

    pre4 = (k - 2) * (k - 3)
    flux_u = (JetRational(u ** 2 * Fraction(1, 2)) + rp(k)
              + rp(k - 3) * (rx ** 2) * (eps2 * Fraction(k * (k - 2), 8))
              + rp(k - 2) * rxx * (eps2 * Fraction(k * k, 12))
              + (rp(-4) * (ux ** 2 * rx ** 2) * t["a1"]
                 + rp(k - 6) * (rx ** 4) * t["a2"]
                 + rp(-3) * (uxx * ux * rx) * t["a3"]
                 + rp(-2) * (uxx ** 2) * t["a4"]
                 + rp(-3) * (ux ** 2 * rxx) * t["a5"]
                 + rp(k - 5) * (rx ** 2 * rxx) * t["a6"]
                 + rp(k - 4) * (rxx ** 2) * t["a7"]
                 + rp(-2) * (ux * uxxx) * t["a8"]
                 + rp(k - 4) * (rx * rxxx) * t["a9"]) * (eps4 * pre4)
              + rp(k - 3) * rxxxx * (eps4 * Fraction(k * (k * k - 1) * (k * k - 4), 360)))
    flux_r = (JetRational(rho * u)
              + rp(-1) * (ux * rx) * (eps2 * Fraction((2 - k) * (k - 3), 12 * k))
              + JetRational(uxx) * (eps2 * Fraction(1, 6))
              + (rp(-4) * (ux * rx ** 3) * t["b1"]
                 + rp(-3) * (rx ** 2 * uxx) * t["b2"]
                 + rp(-3) * (ux * rx * rxx) * t["b3"]
                 + rp(-2) * (uxx * rxx) * t["b4"]
                 + rp(-2) * (uxxx * rx) * t["b5"]
                 + rp(-2) * (ux * rxxx) * t["b6"]
                 + rp(-1) * uxxxx * t["b7"]) * (eps4 * pre4))
    return flux_u, flux_r


def derive_eps2_deformation(kappa: Rat) -> dict[int, JetRational]:
    """The eps^2 layer of the deformed t^{1,1}-flow from the genus-one
    quasi-Miura transformation (the independent oracle for the tables)."""
    k = Fraction(kappa)
    m = i2_model(k)
    can = m.canonical_coordinates()
    table = ThetaTable(m)
    g1 = genus1(m)
    n = 2
    args = [(g1.u12_coeff, can.u12_in_v),
            (g1.du_coeffs[1], can.u_exprs[0].total_x_derivative()),
            (g1.du_coeffs[2], can.u_exprs[1].total_x_derivative())]

    def prolong_poly(p: JetPoly, flow) -> JetPoly:
        out = JetPoly.zero(n)
        for g in range(1, n + 1):
            for s in range(p.max_jet_order() + 1):
                d = p.diff(g, s)
                if not d.is_zero():
                    out = out + d * flow[g - 1].dx(s)
        return out

    def dF1_along(flow) -> JetRational:
        out = JetRational.zero(n)
        for c, arg in args:
            if c:
                out = out + JetRational(prolong_poly(arg, flow) * c, {arg: 1})
        return out

    D = flow_rhs(table, 1, 1)
    # raised components: eta is antidiagonal
    G = {1: dF1_along(flow_rhs(table, 2, 0)).dx(),
         2: dF1_along(flow_rhs(table, 1, 0)).dx()}

    def prolong_rat(r: JetRational, flow) -> JetRational:
        out = JetRational.zero(n)
        maxo = r.num.max_jet_order() + sum(f.max_jet_order() * e for f, e in r.den.items())
        for g in range(1, n + 1):
            for s in range(maxo + 1):
                d = r.diff(g, s)
                if not d.is_zero():
                    out = out + d * flow[g - 1].dx(s)
        return out

    def frechet_D(alpha: int) -> JetRational:
        out = JetRational.zero(n)
        Da = D[alpha - 1]
        for g in range(1, n + 1):
            for s in range(Da.max_jet_order() + 1):
                d = Da.diff(g, s)
                if not d.is_zero():
                    out = out + JetRational(d) * G[g].dx(s)
        return out

    return {a: prolong_rat(G[a], D) - frechet_D(a) for a in (1, 2)}


def kappa2_decoupled_residuals() -> tuple[JetRational, JetRational]:
    """Residuals of d u+-/dt + u+- u+-' +- (sqrt2/6) eps^2 u+-''' = 0 at
    kappa = 2, with u+- = u +- sqrt2 rho, through eps^2."""
    from .scalars import sqrt_scalar

    k = Fraction(2)
    flux_u, flux_r = polytropic_fluxes(k)
    n = 2
    # d u/dt = -d_x flux_u, d rho/dt = -d_x flux_r
    du = -flux_u.dx()
    dr = -flux_r.dx()
    s2 = sqrt_scalar(2)
    out = []
    for sign in (1, -1):
        dpm = du + dr * (s2 * sign)
        upm_x = JetRational(JetPoly.var(n, 1, 1) + JetPoly.var(n, 2, 1) * (s2 * sign))
        upm = JetRational(JetPoly.var(n, 1) + JetPoly.var(n, 2) * (s2 * sign))
        upm_3 = JetRational(JetPoly.var(n, 1, 3) + JetPoly.var(n, 2, 3) * (s2 * sign))
        resid = dpm + upm * upm_x \
            + upm_3 * (JetPoly.eps(n, 2) * (s2 * Fraction(sign, 6)))
        out.append(resid)
    return tuple(out)
