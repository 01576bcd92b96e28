"""The complete n = 1 vertical: Riccati recursion, KdV Hamiltonians and
flows, tau-symmetry, quasi-Miura transformation, and the loop equation.

Two eps-normalizations coexist behind an explicit flag: "paper" is the
bihamiltonian normalization with bracket -(eps^2/4) delta''' and densities
h_0 = u^2/2 - eps^2 u''/6; "string" is the topological-gravity normalization
related by eps^2 -> -eps^2/2 (h_0 = u^2/2 + eps^2 u''/12).  Every operation
takes the flag; there is no default.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb
from typing import Optional, Union

from .jets import JetPoly, integrate_by_parts
from .rational import JetRational
from .scalars import ExactScalar, I, rat

NORMALIZATIONS = ("paper", "string")


def _check_norm(normalization: str) -> None:
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"normalization must be one of {NORMALIZATIONS}")


def U(s: int = 0) -> JetPoly:
    return JetPoly.var(1, 1, s)


def riccati_chi(max_m: int) -> dict[int, JetPoly]:
    """Coefficients chi_m of the solution chi = k + sum chi_m k^{-m} of
    i eps chi' - chi^2 = u - lambda, k = sqrt(lambda)."""
    chi: dict[int, JetPoly] = {}
    chi[1] = -U() * Fraction(1, 2)
    for m in range(2, max_m + 1):
        acc = JetPoly.eps(1, 1) * chi[m - 1].total_x_derivative() * I
        for a in range(1, m - 1):
            b = m - 1 - a
            acc = acc - chi[a] * chi[b]
        chi[m] = acc * Fraction(1, 2)
    return chi


_CHI_CACHE: dict[int, JetPoly] = {}


def _chi(m: int) -> JetPoly:
    if m not in _CHI_CACHE or len(_CHI_CACHE) < m:
        _CHI_CACHE.update(riccati_chi(max(m, len(_CHI_CACHE) + 4)))
    return _CHI_CACHE[m]


def kdv_integral_density(k: int) -> JetPoly:
    """Density of I_k = -4 int chi_{2k+3} dx (Gardner-Kruskal-Miura ladder)."""
    if k < -1:
        raise ValueError("k >= -1")
    if k == -1:
        return U()
    return _chi(2 * k + 3) * (-4)


def kdv_hamiltonian_density(k: int, normalization: str) -> JetPoly:
    """Tau-symmetric density h_k = prod_{i=1}^{k+1} (i + 1/2)^{-1} dI_{k+1}/du."""
    _check_norm(normalization)
    if k < -1:
        raise ValueError("k >= -1")
    if k == -1:
        return U()
    grad = kdv_integral_density(k + 1).variational_derivative(1)
    c = Fraction(1)
    for i in range(1, k + 2):
        c /= Fraction(2 * i + 1, 2)
    h = grad * c
    if normalization == "string":
        h = h.subs_eps_squared(Fraction(-1, 2))
    return h


def kdv_flow(k: int, normalization: str) -> JetPoly:
    """Right-hand side of du/dt~^k = d_x (delta h_k / delta u)."""
    _check_norm(normalization)
    h = kdv_hamiltonian_density(k, normalization)
    return h.variational_derivative(1).total_x_derivative()


def check_tau_symmetry(i: int, j: int, normalization: str) -> JetPoly:
    """Residual of d h_{i-1} / d t~^j = d h_{j-1} / d t~^i by prolongation."""
    _check_norm(normalization)
    hi = kdv_hamiltonian_density(i - 1, normalization)
    hj = kdv_hamiltonian_density(j - 1, normalization)
    fi = kdv_flow(i, normalization)
    fj = kdv_flow(j, normalization)
    return _prolong(hi, fj) - _prolong(hj, fi)


def _prolong(h: JetPoly, flow: JetPoly) -> JetPoly:
    out = JetPoly.zero(1)
    for s in range(h.max_jet_order() + 1):
        d = h.diff(1, s)
        if not d.is_zero():
            out = out + d * flow.dx(s)
    return out


# -- quasi-Miura transformation ---------------------------------------------------


def kdv_quasimiura(order: int, normalization: str) -> JetRational:
    """The quasitriviality map u = v + eps^2 (...)'' + eps^4 (...)''.

    paper normalization: u = v - (eps^2/12)(log v')''
      + eps^4 [v''''/(288 v'^2) - 7 v'' v'''/(480 v'^3) + v''^3/(90 v'^4)]''.
    string normalization: coefficients 1/24, 1/1152, 7/1920, 1/360.
    """
    _check_norm(normalization)
    if order not in (0, 2, 4):
        raise ValueError("order must be 0, 2 or 4")
    out = JetRational(U())
    if order >= 2:
        # (log v')' = v''/v'
        dlog = JetRational(U(2), {U(1): 1})
        c2 = Fraction(-1, 12) if normalization == "paper" else Fraction(1, 24)
        out = out + dlog.dx() * JetPoly.eps(1, 2) * c2
    if order >= 4:
        f2 = genus2_three_term(normalization)
        out = out + f2.dx(2) * JetPoly.eps(1, 4)
    return out


def genus2_three_term(normalization: str) -> JetRational:
    """F_2 for n = 1: the three-term rational jet function."""
    _check_norm(normalization)
    if normalization == "paper":
        c = (Fraction(1, 288), Fraction(-7, 480), Fraction(1, 90))
    else:
        c = (Fraction(1, 1152), Fraction(-7, 1920), Fraction(1, 360))
    return (JetRational(U(4) * c[0], {U(1): 2})
            + JetRational(U(2) * U(3) * c[1], {U(1): 3})
            + JetRational(U(2) ** 3 * c[2], {U(1): 4}))


def pushforward_flow(qm: JetRational, riemann_rhs: JetPoly) -> JetRational:
    """Image sum_s (dQ/dv^{(s)}) d_x^s (rhs) of an evolutionary field."""
    out = JetRational.zero(1)
    smax = qm.num.max_jet_order() + sum(f.max_jet_order() * e for f, e in qm.den.items())
    for s in range(smax + 1):
        d = qm.diff(1, s)
        if not d.is_zero():
            out = out + d * riemann_rhs.dx(s)
    return out


def check_riemann_flow_pushforward(order: int, normalization: str,
                                   k: int = 1) -> JetRational:
    """Residual of quasi-Miura(Riemann t^k flow) = KdV t~^k flow, through
    eps^order, after substituting u = Q(v) into the KdV right-hand side."""
    _check_norm(normalization)
    qm = kdv_quasimiura(order, normalization)
    riemann = U() ** k * U(1) * Fraction(1, _fact(k))
    lhs = pushforward_flow(qm, riemann)
    flow = kdv_flow(k, normalization)
    rhs = JetRational.zero(1)
    for (eps, jets, exps), c in flow.terms.items():
        piece = JetRational(JetPoly.eps(1, eps) * c)
        for (a, s), e in jets:
            piece = piece * (qm.dx(s) ** int(e))
        rhs = rhs + piece
    resid = lhs - rhs
    return _truncate_eps_rational(resid, order)


def _truncate_eps_rational(r: JetRational, order: int) -> JetRational:
    num = r.num.truncate_eps(order + max(0, _den_eps(r)))
    return JetRational(num, r.den)


def _den_eps(r: JetRational) -> int:
    return sum(max(f.eps_orders(), default=0) * e for f, e in r.den.items())


def _fact(k: int) -> int:
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


def frechet_rational(qm: JetRational):
    """Frechet derivative of the quasi-Miura map and its adjoint, as
    differential operators with JetRational coefficients."""
    smax = qm.num.max_jet_order() + sum(f.max_jet_order() * e for f, e in qm.den.items())
    L: dict[int, JetRational] = {}
    Lstar: dict[int, JetRational] = {}
    for s in range(smax + 1):
        f = qm.diff(1, s)
        if f.is_zero():
            continue
        Lstar[s] = Lstar.get(s, JetRational.zero(1)) + f
        for r in range(s + 1):
            piece = f.dx(r) * Fraction((-1) ** s * comb(s, r))
            L[s - r] = L.get(s - r, JetRational.zero(1)) + piece
    return L, Lstar


def op_compose_rational(P: dict[int, JetRational], Q: dict[int, JetRational]):
    out: dict[int, JetRational] = {}
    for m, pc in P.items():
        for r, qc in Q.items():
            for j in range(m + 1):
                piece = pc * qc.dx(j) * Fraction(comb(m, j))
                if piece.is_zero():
                    continue
                d = m + r - j
                out[d] = out.get(d, JetRational.zero(1)) + piece
    return {d: c for d, c in out.items() if not c.is_zero()}


def check_pencil_pushforward(order: int, normalization: str) -> dict:
    """Residuals of L* P_i^Riemann L = P_i^KdV(u -> Q(v)) through eps^order.

    P_1 = delta' maps to delta'; P_2 = v d' + v'/2 d maps to the Magri bracket
    u d' + u'/2 d + c3 eps^2 d''' with c3 = -1/4 (paper) or 1/8 (string).
    """
    _check_norm(normalization)
    qm = kdv_quasimiura(order, normalization)
    L, Lstar = frechet_rational(qm)
    c3 = Fraction(-1, 4) if normalization == "paper" else Fraction(1, 8)
    out = {}
    # P1
    mid = {1: JetRational(JetPoly.const(1, 1))}
    img = op_compose_rational(op_compose_rational(Lstar, mid), L)
    target = {1: JetRational(JetPoly.const(1, 1))}
    out["P1"] = _op_residual(img, target, order)
    # P2
    mid = {1: JetRational(U()), 0: JetRational(U(1) * Fraction(1, 2))}
    img = op_compose_rational(op_compose_rational(Lstar, mid), L)
    target = {
        1: qm,
        0: qm.dx() * Fraction(1, 2),
        3: JetRational(JetPoly.eps(1, 2) * c3),
    }
    out["P2"] = _op_residual(img, target, order)
    return out


def _op_residual(img: dict, target: dict, order: int) -> dict:
    resid = {}
    for d in set(img) | set(target):
        r = img.get(d, JetRational.zero(1)) - target.get(d, JetRational.zero(1))
        r = _truncate_eps_rational(r, order)
        if not r.is_zero():
            resid[d] = r
    return resid


# -- the n = 1 loop equation -----------------------------------------------------


class LambdaRational:
    """Rational function of lambda with JetRational coefficients.

    Partial-fraction representation over the pole set {v, 0}: a sum of
    c_j * (v - lambda)^(-j) for half-integer j >= 0 plus d_k * lambda^(-k).
    """

    __slots__ = ("vpoles", "lpoles")

    def __init__(self, vpoles: Optional[dict] = None, lpoles: Optional[dict] = None):
        # vpoles: Fraction j -> JetRational coefficient of (v-lambda)^(-j)
        self.vpoles: dict[Fraction, JetRational] = {}
        self.lpoles: dict[int, JetRational] = {}
        for j, c in (vpoles or {}).items():
            if not c.is_zero():
                self.vpoles[Fraction(j)] = c
        for k, c in (lpoles or {}).items():
            if not c.is_zero():
                self.lpoles[int(k)] = c

    @staticmethod
    def vpole(j, coeff: Union[JetRational, JetPoly]) -> "LambdaRational":
        c = coeff if isinstance(coeff, JetRational) else JetRational(coeff)
        return LambdaRational({Fraction(j): c})

    @staticmethod
    def lpole(k: int, coeff: Union[JetRational, JetPoly]) -> "LambdaRational":
        c = coeff if isinstance(coeff, JetRational) else JetRational(coeff)
        return LambdaRational(lpoles={k: c})

    def __add__(self, other: "LambdaRational") -> "LambdaRational":
        v = dict(self.vpoles)
        for j, c in other.vpoles.items():
            v[j] = v.get(j, JetRational.zero(1)) + c
        l = dict(self.lpoles)
        for k, c in other.lpoles.items():
            l[k] = l.get(k, JetRational.zero(1)) + c
        return LambdaRational(v, l)

    def __neg__(self) -> "LambdaRational":
        return LambdaRational({j: -c for j, c in self.vpoles.items()},
                              {k: -c for k, c in self.lpoles.items()})

    def __sub__(self, other: "LambdaRational") -> "LambdaRational":
        return self + (-other)

    def __mul__(self, other) -> "LambdaRational":
        if isinstance(other, LambdaRational):
            if self.lpoles and other.lpoles or (self.lpoles and other.vpoles) \
                    or (self.vpoles and other.lpoles):
                raise ValueError("mixed-pole products are not needed by the loop equation")
            v = {}
            for j1, c1 in self.vpoles.items():
                for j2, c2 in other.vpoles.items():
                    j = j1 + j2
                    v[j] = v.get(j, JetRational.zero(1)) + c1 * c2
            return LambdaRational(v)
        return LambdaRational({j: c * other for j, c in self.vpoles.items()},
                              {k: c * other for k, c in self.lpoles.items()})

    def dx(self, times: int = 1) -> "LambdaRational":
        out = self
        for _ in range(times):
            v: dict[Fraction, JetRational] = {}
            for j, c in out.vpoles.items():
                v[j] = v.get(j, JetRational.zero(1)) + c.total_x_derivative()
                # d_x (v-lambda)^(-j) = -j v' (v-lambda)^(-j-1)
                extra = c * JetRational(U(1)) * (-Fraction(j))
                v[j + 1] = v.get(j + 1, JetRational.zero(1)) + extra
            out = LambdaRational(v, {k: c.total_x_derivative() for k, c in out.lpoles.items()})
        return out

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.vpoles.values()) and \
            all(c.is_zero() for c in self.lpoles.values())

    def eps_part(self, e: int) -> "LambdaRational":
        return LambdaRational({j: c.eps_part(e) for j, c in self.vpoles.items()},
                              {k: c.eps_part(e) for k, c in self.lpoles.items()})

    def nonzero_keys(self):
        return ([("v", j) for j, c in sorted(self.vpoles.items()) if not c.is_zero()]
                + [("lambda", k) for k, c in sorted(self.lpoles.items()) if not c.is_zero()])

    def __str__(self) -> str:
        parts = [f"(v-lam)^(-{j}): {c}" for j, c in sorted(self.vpoles.items()) if not c.is_zero()]
        parts += [f"lam^(-{k}): {c}" for k, c in sorted(self.lpoles.items()) if not c.is_zero()]
        return "\n".join(parts) or "0"


def kdv_loop_residual(partials: dict[int, JetRational], kappa0,
                      eps_orders=(0, 2)) -> dict[int, LambdaRational]:
    """Residual of the n = 1 loop equation for Delta-F with the given jet
    partials (string normalization; eps carried inside the coefficients).

    `partials[r]` is d(Delta F)/d v^{(r)}; kappa0 is the constant.  Returns
    the residual split by eps order.
    """
    kappa0 = Fraction(kappa0)
    one = JetRational(JetPoly.const(1, 1))
    inv_v = LambdaRational.vpole(1, one)          # 1/(v - lambda)
    sqrt_inv = LambdaRational.vpole(Fraction(1, 2), one)  # (v - lambda)^(-1/2)
    inv_v2 = LambdaRational.vpole(2, one)

    rmax = max(partials) if partials else 0
    lhs = LambdaRational()
    for r, dF in partials.items():
        if dF.is_zero():
            continue
        lhs = lhs + inv_v.dx(r) * dF
        for k in range(1, r + 1):
            lhs = lhs + (sqrt_inv.dx(k - 1) * sqrt_inv.dx(r - k + 1)) * (dF * Fraction(comb(r, k)))
    rhs = LambdaRational.lpole(2, JetPoly.const(1, Fraction(1, 16) - kappa0)) \
        - LambdaRational.vpole(2, JetPoly.const(1, Fraction(1, 16)))
    eps2 = JetPoly.eps(1, 2)
    for k in range(rmax + 1):
        for l in range(rmax + 1):
            dk = partials.get(k, JetRational.zero(1))
            dl = partials.get(l, JetRational.zero(1))
            second = dk.diff(1, l)
            combo = second + dk * dl
            if combo.is_zero():
                continue
            rhs = rhs + (sqrt_inv.dx(k + 1) * sqrt_inv.dx(l + 1)) * (combo * eps2 * Fraction(1, 2))
    for k in range(rmax + 1):
        dk = partials.get(k, JetRational.zero(1))
        if dk.is_zero():
            continue
        rhs = rhs - inv_v2.dx(k + 2) * (dk * eps2 * Fraction(1, 16))
    resid = lhs - rhs
    return {e: resid.eps_part(e) for e in eps_orders}


def kdv_genus_partials(include_f2: bool = True,
                       f1_coeff: Fraction = Fraction(1, 24),
                       f2_scale: Fraction = Fraction(1),
                       f2_perturb: Optional[dict] = None) -> dict[int, JetRational]:
    """Jet partials of Delta F = f1_coeff log v' + eps^2 F_2 (string form)."""
    out: dict[int, JetRational] = {1: JetRational(JetPoly.const(1, f1_coeff), {U(1): 1})}
    if include_f2:
        c = [Fraction(1, 1152), Fraction(-7, 1920), Fraction(1, 360)]
        if f2_perturb:
            for idx, scale in f2_perturb.items():
                c[idx] *= scale
        f2 = (JetRational(U(4) * c[0], {U(1): 2})
              + JetRational(U(2) * U(3) * c[1], {U(1): 3})
              + JetRational(U(2) ** 3 * c[2], {U(1): 4})) * f2_scale
        eps2 = JetPoly.eps(1, 2)
        for r in range(1, 5):
            d = f2.diff(1, r)
            if not d.is_zero():
                out[r] = out.get(r, JetRational.zero(1)) + d * eps2
    return out
