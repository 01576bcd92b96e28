"""Frobenius manifold models: validation, structure constants, pencils.

A model is given in flat coordinates by a constant metric eta, a potential
F(v), an affine Euler field, the charge, and the monodromy data (mu, R).  The
builtin models carry closed-form canonical-coordinate data (eigenvalues of
multiplication by the Euler field, idempotent frame lengths, the constant V
matrix) used by the genus expansion.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .errors import UnsupportedModel
from .jets import JetPoly, exact_div
from .poisson import LocalBivector, normalize_antisymmetric, _invert_scalar_matrix
from .scalars import ExactScalar, I, rat, sqrt_scalar


@dataclass
class CanonicalData:
    """Closed-form canonical-coordinate frame of a builtin model."""

    n: int
    u_exprs: list  # u_i as JetPoly in the flat coordinates
    V: list  # constant matrix of the antisymmetric operator in the orthonormal frame
    # h-monomial evaluation: prod_i h_i^{e_i} = coeff * (u_1 - u_2)^power
    h_mono: Callable[[dict[int, int]], tuple[ExactScalar, Fraction]]
    log_J_u12_coeff: Fraction  # log |J| = c * log(u_1 - u_2) + const
    tau_I_u12_exponent: Fraction  # tau_I = (u_1 - u_2)^e (0 for n = 1)
    u12_in_v: Optional[JetPoly] = None  # u_1 - u_2 as expression in v


class FrobeniusModel:
    def __init__(self, n: int, eta, potential: JetPoly, euler_linear, euler_const,
                 charge: Fraction, mu: list, R=None, name: str = "",
                 canonical: Optional[CanonicalData] = None):
        self.n = n
        self.eta = [[_scal(x) for x in row] for row in eta]
        self.eta_inv = _invert_scalar_matrix(self.eta)
        if self.eta_inv is None:
            raise ValueError("eta must be invertible")
        self.F = potential
        # E^a = sum_b euler_linear[a][b] v^b + euler_const[a]
        self.euler_linear = [[Fraction(x) for x in row] for row in euler_linear]
        self.euler_const = [Fraction(x) for x in euler_const]
        self.charge = Fraction(charge)
        self.mu = [Fraction(x) for x in mu]
        self.R = [[_scal(x) for x in row] for row in (R or [[0] * n for _ in range(n)])]
        self.name = name
        self.canonical = canonical
        self._c3: dict[tuple[int, int, int], JetPoly] = {}

    # -- basic tensors --------------------------------------------------------

    def third_derivative(self, a: int, b: int, c: int) -> JetPoly:
        key = tuple(sorted((a, b, c)))
        if key not in self._c3:
            p = self.F
            for idx in key:
                p = p.diff(idx)
            self._c3[key] = p
        return self._c3[key]

    def euler_components(self) -> list[JetPoly]:
        out = []
        for a in range(self.n):
            p = JetPoly.const(self.n, self.euler_const[a])
            for b in range(self.n):
                if self.euler_linear[a][b]:
                    p = p + JetPoly.var(self.n, b + 1) * self.euler_linear[a][b]
            out.append(p)
        return out

    def structure_constants(self) -> dict[tuple[int, int, int], JetPoly]:
        """c_{ab}^g = eta^{ge} F_{eab}; includes the unity normalization."""
        out = {}
        for a in range(1, self.n + 1):
            for b in range(1, self.n + 1):
                for g in range(1, self.n + 1):
                    acc = JetPoly.zero(self.n)
                    for e in range(1, self.n + 1):
                        ge = self.eta_inv[g - 1][e - 1]
                        if not ge.is_zero():
                            acc = acc + self.third_derivative(e, a, b) * ge
                    out[(a, b, g)] = acc
        return out

    def vmatrix(self) -> list[list[ExactScalar]]:
        """Matrix of (2-d)/2 - grad E in the flat frame (rows upper index)."""
        half = Fraction(2 - self.charge, 2) if isinstance(self.charge, int) else (2 - self.charge) / 2
        out = []
        for a in range(self.n):
            row = []
            for b in range(self.n):
                x = ExactScalar(-Fraction(self.euler_linear[a][b]))
                if a == b:
                    x = x + ExactScalar(half)
                row.append(x)
            out.append(row)
        return out

    # -- validation -----------------------------------------------------------

    def validate(self) -> dict:
        """Residuals of the unity, associativity, and quasihomogeneity axioms."""
        n = self.n
        unity = []
        for a in range(1, n + 1):
            for b in range(1, n + 1):
                unity.append(self.third_derivative(1, a, b) - JetPoly.const(n, self.eta[a - 1][b - 1]))
        assoc = []
        for a in range(1, n + 1):
            for b in range(1, n + 1):
                for g in range(1, n + 1):
                    for d in range(1, n + 1):
                        lhs = JetPoly.zero(n)
                        for lam in range(1, n + 1):
                            for mu_ in range(1, n + 1):
                                e = self.eta_inv[lam - 1][mu_ - 1]
                                if e.is_zero():
                                    continue
                                lhs = lhs + self.third_derivative(a, b, lam) * self.third_derivative(mu_, g, d) * e
                                lhs = lhs - self.third_derivative(d, b, lam) * self.third_derivative(mu_, g, a) * e
                        assoc.append(lhs)
        # quasihomogeneity: E^e d_e F - (3-d) F must be at most quadratic in v
        E = self.euler_components()
        eF = JetPoly.zero(n)
        for a in range(1, n + 1):
            eF = eF + E[a - 1] * self.F.diff(a)
        resid = eF - self.F * (3 - self.charge)
        quasi = _beyond_quadratic(resid)
        return {
            "unity": [p for p in unity if not p.is_zero()],
            "associativity": [p for p in assoc if not p.is_zero()],
            "quasihomogeneity": [] if quasi.is_zero() else [quasi],
        }

    def is_valid(self) -> bool:
        rep = self.validate()
        return not (rep["unity"] or rep["associativity"] or rep["quasihomogeneity"])

    # -- intersection form and pencil ------------------------------------------

    def intersection_form(self):
        """(g^{ab}(v), Gamma^{ab}_c(v)) of the second flat metric."""
        n = self.n
        E = self.euler_components()
        g = [[JetPoly.zero(n) for _ in range(n)] for _ in range(n)]
        for a in range(1, n + 1):
            for b in range(1, n + 1):
                for e in range(1, n + 1):
                    # c_e^{ab} = eta^{am} eta^{bn} F_{emn}
                    for m_ in range(1, n + 1):
                        for nu in range(1, n + 1):
                            coeff = self.eta_inv[a - 1][m_ - 1] * self.eta_inv[b - 1][nu - 1]
                            if coeff.is_zero():
                                continue
                            g[a - 1][b - 1] = g[a - 1][b - 1] + E[e - 1] * self.third_derivative(e, m_, nu) * coeff
        V = self.vmatrix()
        gamma = {}
        for a in range(1, n + 1):
            for b in range(1, n + 1):
                for c in range(1, n + 1):
                    acc = JetPoly.zero(n)
                    for e in range(1, n + 1):
                        # (1/2 - V)^b_e
                        coeff = ExactScalar(Fraction(1, 2) if b == e else 0) - V[b - 1][e - 1]
                        if coeff.is_zero():
                            continue
                        # c^{ae}_c = eta^{am} eta^{en} F_{mnc}
                        for m_ in range(1, n + 1):
                            for nu in range(1, n + 1):
                                cc = self.eta_inv[a - 1][m_ - 1] * self.eta_inv[e - 1][nu - 1] * coeff
                                if cc.is_zero():
                                    continue
                                acc = acc + self.third_derivative(m_, nu, c) * cc
                    gamma[(a, b, c)] = acc
        return g, gamma

    def hydrodynamic_pencil(self) -> tuple[LocalBivector, LocalBivector]:
        """The pair eta^{ab} delta', g^{ab} delta' + Gamma^{ab}_c v^c_x delta."""
        n = self.n
        p1_raw = {}
        for a in range(1, n + 1):
            for b in range(a, n + 1):
                e = self.eta_inv[a - 1][b - 1]
                if not e.is_zero():
                    p1_raw[(a, b)] = {1: JetPoly.const(n, e)}
        P1 = normalize_antisymmetric(n, p1_raw)
        g, gamma = self.intersection_form()
        p2_raw = {}
        for a in range(1, n + 1):
            for b in range(1, n + 1):
                tbl = {}
                if not g[a - 1][b - 1].is_zero():
                    tbl[1] = g[a - 1][b - 1]
                delta_term = JetPoly.zero(n)
                for c in range(1, n + 1):
                    delta_term = delta_term + gamma[(a, b, c)] * JetPoly.var(n, c, 1)
                if not delta_term.is_zero():
                    tbl[0] = delta_term
                if tbl:
                    p2_raw[(a, b)] = tbl
        P2 = normalize_antisymmetric(n, p2_raw)
        return P1, P2

    # -- canonical frame -------------------------------------------------------

    def canonical_coordinates(self) -> CanonicalData:
        if self.canonical is None:
            raise UnsupportedModel(
                f"no closed-form canonical coordinates for model {self.name!r}")
        return self.canonical

    def isomonodromic_tau(self) -> dict:
        """Closed-form d log tau_I data: H_i and the (u1 - u2) exponent."""
        can = self.canonical_coordinates()
        if self.n == 1:
            return {"exponent": Fraction(0), "H": [JetPoly.zero(1)]}
        V12 = can.V[0][1]
        expo = V12 * V12 * rat(1, 2)
        if not expo.is_rational():
            raise UnsupportedModel("tau_I exponent is not rational for this frame")
        return {"exponent": expo.as_fraction(), "V12": V12}

    def __repr__(self) -> str:
        return f"FrobeniusModel({self.name or 'custom'}, n={self.n})"


def _scal(x) -> ExactScalar:
    return x if isinstance(x, ExactScalar) else ExactScalar(Fraction(x))


def _beyond_quadratic(p: JetPoly) -> JetPoly:
    out = JetPoly(p.n)
    for (eps, jets, exps), c in p.terms.items():
        deg = sum(Fraction(e) for _, e in jets)
        if exps or deg > 2:
            out.terms[(eps, jets, exps)] = c
    return out


# -- builtin models -------------------------------------------------------------


def kdv_model() -> FrobeniusModel:
    """n = 1, F = v^3/6: the dispersionless KdV (Riemann) Frobenius manifold."""
    n = 1
    F = JetPoly.var(n, 1) ** 3 * Fraction(1, 6)
    can = CanonicalData(
        n=1,
        u_exprs=[JetPoly.var(1, 1)],
        V=[[ExactScalar(0)]],
        h_mono=lambda powers: (ExactScalar(1), Fraction(0)),
        log_J_u12_coeff=Fraction(0),
        tau_I_u12_exponent=Fraction(0),
    )
    return FrobeniusModel(
        n, [[1]], F, [[1]], [0], Fraction(0), [Fraction(0)], name="kdv", canonical=can)


def cp1_model() -> FrobeniusModel:
    """F = (1/2) v1^2 v2 + exp(v2): quantum cohomology of the projective line."""
    n = 2
    v1 = JetPoly.var(n, 1)
    v2 = JetPoly.var(n, 2)
    F = v1 ** 2 * v2 * Fraction(1, 2) + JetPoly.exp_gen(n, 2)
    # canonical coordinates u_{1,2} = v1 +- 2 exp(v2/2)
    e_half = JetPoly.exp_gen(n, 2, Fraction(1, 2))
    u1 = v1 + 2 * e_half
    u2 = v1 - 2 * e_half
    sqrt2 = sqrt_scalar(2)

    def h_mono(powers: dict[int, int]) -> tuple[ExactScalar, Fraction]:
        # h1 = sqrt2 (u1-u2)^(-1/2), h2 = -i sqrt2 (u1-u2)^(-1/2)
        e1 = powers.get(1, 0)
        e2 = powers.get(2, 0)
        tot = e1 + e2
        if tot % 2:
            raise ValueError("odd total h power has no rational closed form")
        coeff = sqrt2 ** tot if tot >= 0 else sqrt2.inverse() ** (-tot)
        minus_i = I * (-1)
        ii = minus_i ** e2 if e2 >= 0 else minus_i.inverse() ** (-e2)
        return coeff * ii, Fraction(-tot, 2)

    can = CanonicalData(
        n=2,
        u_exprs=[u1, u2],
        V=[[ExactScalar(0), I * rat(-1, 2)], [I * rat(1, 2), ExactScalar(0)]],
        h_mono=h_mono,
        # J = prod h_i (up to sign) = -2i/(u1-u2): log|J| = -log u12 + const
        log_J_u12_coeff=Fraction(-1),
        tau_I_u12_exponent=Fraction(-1, 8),
        u12_in_v=4 * e_half,
    )
    return FrobeniusModel(
        n, [[0, 1], [1, 0]], F, [[1, 0], [0, 0]], [0, 2], Fraction(1),
        [Fraction(-1, 2), Fraction(1, 2)], R=[[0, 0], [2, 0]], name="cp1", canonical=can)


def i2_model(kappa) -> FrobeniusModel:
    """Two-dimensional model F = (1/2) v1^2 v2 + v2^(kappa+1)/(kappa^2-1)."""
    kappa = Fraction(kappa)
    if kappa in (Fraction(-1), Fraction(0), Fraction(1)):
        raise ValueError("kappa must avoid -1, 0, 1")
    n = 2
    v1 = JetPoly.var(n, 1)
    F = v1 ** 2 * JetPoly.var(n, 2) * Fraction(1, 2) \
        + JetPoly.var(n, 2, 0, kappa + 1) * (Fraction(1) / (kappa * kappa - 1))
    m = Fraction(1, 2) - 1 / kappa
    # u_{1,2} = v1 +- (2/sqrt(kappa)) v2^(kappa/2); V12 = -i m
    sqrtk_inv = sqrt_scalar(Fraction(1) / kappa)
    w_pow = JetPoly.var(n, 2, 0, kappa / 2)
    u1 = v1 + 2 * sqrtk_inv * w_pow
    u2 = v1 - 2 * sqrtk_inv * w_pow

    def h_mono(powers: dict[int, int]) -> tuple[ExactScalar, Fraction]:
        raise UnsupportedModel("I2 h-monomials are not rational in u1 - u2")

    can = CanonicalData(
        n=2,
        u_exprs=[u1, u2],
        V=[[ExactScalar(0), I * (-m)], [I * m, ExactScalar(0)]],
        h_mono=h_mono,
        # J = det(dv/du) = -1/(2w), w ~ u12^((kappa-2)/kappa)
        log_J_u12_coeff=-Fraction(kappa - 2, kappa),
        tau_I_u12_exponent=(-m * m / 2),
        u12_in_v=4 * sqrtk_inv * w_pow,
    )
    return FrobeniusModel(
        n, [[0, 1], [1, 0]], F, [[1, 0], [0, Fraction(2, 1) / kappa]], [0, 0],
        1 - Fraction(2, 1) / kappa,
        [Fraction(-1, 2) + 1 / kappa, Fraction(1, 2) - 1 / kappa],
        name=f"i2({kappa})", canonical=can)


def builtin_model(name: str, parameter=None) -> FrobeniusModel:
    name = name.lower()
    if name == "kdv":
        return kdv_model()
    if name == "cp1":
        return cp1_model()
    if name == "i2":
        if parameter is None:
            raise ValueError("I2 needs the rational parameter kappa")
        return i2_model(parameter)
    raise UnsupportedModel(f"unknown builtin model {name!r}")
