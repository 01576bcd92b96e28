"""The Principal Hierarchy: theta recursion, flows, Omega pairing, checks.

Hamiltonian densities theta_{a,p}(v) are computed from the recursion on
second derivatives with the Levelt normalization fixing the linear-in-v
ambiguity: (p+1) Theta_{p+1} + [Theta_{p+1}, V] = U Theta_p - sum Theta R_k.
The CP1 model is resonant there; its closed forms (harmonic-number series,
with Euler's gamma dropped) are installed instead.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional

from .errors import Degenerate, ResonanceUnresolved
from .frobenius import FrobeniusModel
from .jets import JetPoly, integrate_position
from .poisson import hamiltonian_flow
from .scalars import ExactScalar, _solve_linear


class ThetaTable:
    def __init__(self, model: FrobeniusModel):
        self.model = model
        self._theta: dict[tuple[int, int], JetPoly] = {}
        self._c = model.structure_constants()

    def theta(self, alpha: int, p: int) -> JetPoly:
        if (alpha, p) not in self._theta:
            self._compute_level(p)
        return self._theta[(alpha, p)]

    def grad(self, alpha: int, p: int) -> list[JetPoly]:
        """nabla theta: components (eta^{bg} d_g theta)_b."""
        m = self.model
        th = self.theta(alpha, p)
        out = []
        for b in range(1, m.n + 1):
            acc = JetPoly.zero(m.n)
            for g in range(1, m.n + 1):
                e = m.eta_inv[b - 1][g - 1]
                if not e.is_zero():
                    acc = acc + th.diff(g) * e
            out.append(acc)
        return out

    # -- construction ----------------------------------------------------------

    def _compute_level(self, p: int) -> None:
        m = self.model
        for q in range(p + 1):
            if all((a, q) in self._theta for a in range(1, m.n + 1)):
                continue
            if q == 0:
                for a in range(1, m.n + 1):
                    va = JetPoly.zero(m.n)
                    for e in range(1, m.n + 1):
                        va = va + JetPoly.var(m.n, e) * m.eta[a - 1][e - 1]
                    self._theta[(a, 0)] = va
                continue
            if m.name == "cp1":
                for a in range(1, m.n + 1):
                    self._theta[(a, q)] = _cp1_theta(a, q)
                continue
            for a in range(1, m.n + 1):
                self._theta[(a, q)] = self._integrate_step(a, q)
            self._normalize_level(q)

    def _integrate_step(self, alpha: int, p: int) -> JetPoly:
        """A particular theta with the right Hessian (linear part arbitrary)."""
        m = self.model
        prev = self._theta[(alpha, p - 1)]
        T = integrate_position(prev, 1)
        if m.n == 1:
            return T
        if m.n != 2:
            raise NotImplementedError("generic theta recursion implemented for n <= 2")
        # fix the v2-only part: g'' = W_22 - d2 d2 T
        w22 = JetPoly.zero(m.n)
        for nu in range(1, m.n + 1):
            w22 = w22 + self._c[(2, 2, nu)] * prev.diff(nu)
        resid = w22 - T.diff(2).diff(2)
        # the residual must be v1-free (unity direction is already exact)
        for (eps, jets, exps) in resid.terms:
            if any(a == 1 for (a, s), _ in jets) or any(g == 1 for g, _ in exps):
                raise ResonanceUnresolved("theta Hessian residual depends on v1")
        g = integrate_position(integrate_position(resid, 2), 2)
        return T + g

    def _normalize_level(self, p: int) -> None:
        """Fix the linear ambiguity by the Levelt constraint at level p."""
        m = self.model
        n = m.n
        V = m.vmatrix()
        U = self._euler_mult_matrix()
        theta_mats = {}

        def theta_mat(q: int):
            if q not in theta_mats:
                theta_mats[q] = [
                    [_nabla_alpha(m, self._theta[(b + 1, q)], a + 1) for b in range(n)]
                    for a in range(n)
                ]
            return theta_mats[q]

        Tp = theta_mat(p)
        Tp1 = theta_mat(p - 1)
        # RHS = U Theta_{p-1} - sum_{k>=1} Theta_{p-k} R_k
        rhs = _mat_mul_poly(U, Tp1, n)
        Rk = _r_decomposition(m)
        for k, Rmat in Rk.items():
            if k == 0 or p - k < 0:
                continue
            rhs = _mat_sub(rhs, _mat_mul_scal(theta_mat(p - k), Rmat, n), n)
        # D = RHS - p*Theta_p - [Theta_p, V]  must be constant
        lhs = _mat_add(_mat_scale(Tp, Fraction(p)), _mat_comm_scal(Tp, V, n), n)
        D = _mat_sub(rhs, lhs, n)
        for row in D:
            for e in row:
                if not e.is_constant():
                    raise ResonanceUnresolved(
                        "normalization residual is not constant; recursion data inconsistent")
        # solve p*C + [C, V] = D for a constant matrix C
        size = n * n
        mat = [[ExactScalar(0)] * size for _ in range(size)]
        vec = [ExactScalar(0)] * size

        def idx(a, b):
            return a * n + b

        for a in range(n):
            for b in range(n):
                mat[idx(a, b)][idx(a, b)] = mat[idx(a, b)][idx(a, b)] + ExactScalar(Fraction(p))
                # [C, V] = C V - V C
                for c in range(n):
                    mat[idx(a, b)][idx(a, c)] = mat[idx(a, b)][idx(a, c)] + V[c][b]
                    mat[idx(a, b)][idx(c, b)] = mat[idx(a, b)][idx(c, b)] - V[a][c]
                vec[idx(a, b)] = D[a][b].as_scalar()
        sol = _solve_exact(mat, vec)
        if sol is None:
            raise ResonanceUnresolved(
                f"Levelt normalization system is singular at level {p}")
        # C^a_b = eta^{a nu} coeff_{b nu}:  theta_{b,p} += sum coeff_{b nu} v^nu
        for b in range(n):
            add = JetPoly.zero(n)
            for nu in range(n):
                # coeff_{b nu} = sum_a eta_{nu a} C^a_b
                cc = ExactScalar(0)
                for a in range(n):
                    cc = cc + m.eta[nu][a] * sol[idx(a, b)]
                if not cc.is_zero():
                    add = add + JetPoly.var(n, nu + 1) * cc
            self._theta[(b + 1, p)] = self._theta[(b + 1, p)] + add

    def _euler_mult_matrix(self):
        m = self.model
        n = m.n
        E = m.euler_components()
        U = [[JetPoly.zero(n) for _ in range(n)] for _ in range(n)]
        for a in range(1, n + 1):
            for b in range(1, n + 1):
                for e in range(1, n + 1):
                    U[a - 1][b - 1] = U[a - 1][b - 1] + E[e - 1] * self._c[(e, b, a)]
        return U


def _nabla_alpha(m: FrobeniusModel, theta: JetPoly, a: int) -> JetPoly:
    acc = JetPoly.zero(m.n)
    for g in range(1, m.n + 1):
        e = m.eta_inv[a - 1][g - 1]
        if not e.is_zero():
            acc = acc + theta.diff(g) * e
    return acc


def _mat_mul_poly(A, B, n):
    return [[sum((A[i][k] * B[k][j] for k in range(n)), JetPoly.zero(B[0][0].n))
             for j in range(n)] for i in range(n)]


def _mat_mul_scal(A, S, n):
    # A: JetPoly matrix, S: scalar matrix; returns A*S
    zero = JetPoly.zero(A[0][0].n)
    return [[sum((A[i][k] * S[k][j] for k in range(n)), zero) for j in range(n)]
            for i in range(n)]


def _mat_comm_scal(A, S, n):
    # [A, S] = A S - S A with S scalar
    zero = JetPoly.zero(A[0][0].n)
    out = [[zero for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            acc = JetPoly.zero(A[0][0].n)
            for k in range(n):
                acc = acc + A[i][k] * S[k][j] - A[k][j] * S[i][k]
            out[i][j] = acc
    return out


def _mat_add(A, B, n):
    return [[A[i][j] + B[i][j] for j in range(n)] for i in range(n)]


def _mat_sub(A, B, n):
    return [[A[i][j] - B[i][j] for j in range(n)] for i in range(n)]


def _mat_scale(A, c):
    return [[x * c for x in row] for row in A]


def _r_decomposition(m: FrobeniusModel) -> dict[int, list]:
    """Split R into mu-graded parts R_k with [mu, R_k] = k R_k (diagonal mu)."""
    n = m.n
    out: dict[int, list] = {}
    for i in range(n):
        for j in range(n):
            x = m.R[i][j]
            if x.is_zero():
                continue
            diff = m.mu[i] - m.mu[j]
            if diff.denominator != 1:
                raise ValueError("R entry at non-integer mu difference")
            k = int(diff)
            out.setdefault(k, [[ExactScalar(0)] * n for _ in range(n)])[i][j] = x
    return out


def _solve_exact(mat, vec):
    n = len(mat)
    frac_ok = all(x.is_rational() for row in mat for x in row) and all(
        x.is_rational() for x in vec)
    if frac_ok:
        sol = _solve_linear([[x.as_fraction() for x in row] for row in mat],
                            [x.as_fraction() for x in vec])
        return None if sol is None else [ExactScalar(s) for s in sol]
    # general ExactScalar elimination
    aug = [row[:] + [vec[i]] for i, row in enumerate(mat)]
    pivots = []
    for col in range(n):
        piv = next((r for r in range(len(pivots), n) if not aug[r][col].is_zero()), None)
        if piv is None:
            continue
        r0 = len(pivots)
        aug[r0], aug[piv] = aug[piv], aug[r0]
        inv = aug[r0][col].inverse()
        aug[r0] = [x * inv for x in aug[r0]]
        for r in range(n):
            if r != r0 and not aug[r][col].is_zero():
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[r0])]
        pivots.append(col)
    if len(pivots) < n:
        return None
    sol = [ExactScalar(0)] * n
    for r, c in enumerate(pivots):
        sol[c] = aug[r][n]
    return sol


def _cp1_theta(alpha: int, p: int) -> JetPoly:
    """Closed-form CP1 densities (Bessel series; Euler gamma dropped)."""
    n = 2
    out = JetPoly.zero(n)
    if alpha == 2:
        # theta_{2,p} = sum_{2m+k=p+1} e^{m v2} v1^k / (k! m!^2)
        for m_ in range(0, (p + 1) // 2 + 1):
            k = p + 1 - 2 * m_
            if k < 0:
                continue
            c = Fraction(1, _fact(k) * _fact(m_) ** 2)
            out = out + JetPoly.exp_gen(n, 2, m_) * JetPoly.var(n, 1) ** k * c
        return out
    # theta_{1,p} = -2 sum_{2m+k=p} (H_m - v2/2) e^{m v2} v1^k / (k! m!^2)
    for m_ in range(0, p // 2 + 1):
        k = p - 2 * m_
        if k < 0:
            continue
        H = sum((Fraction(1, j) for j in range(1, m_ + 1)), Fraction(0))
        c = Fraction(1, _fact(k) * _fact(m_) ** 2)
        coeff = (JetPoly.const(n, H) - JetPoly.var(n, 2) * Fraction(1, 2))
        out = out + coeff * JetPoly.exp_gen(n, 2, m_) * JetPoly.var(n, 1) ** k * (-2 * c)
    return out


def _fact(k: int) -> int:
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


# -- flows and pairings ----------------------------------------------------------


def flow_rhs(table: ThetaTable, alpha: int, p: int) -> list[JetPoly]:
    """d v^b / d t^{a,p} = eta^{bg} d_x d_g theta_{a,p+1}."""
    g = table.grad(alpha, p + 1)
    return [x.total_x_derivative() for x in g]


def omega(table: ThetaTable, alpha: int, p: int, beta: int, q: int) -> JetPoly:
    """Flux density Omega_{a,p;b,q}(v) from the generating formula."""
    m = table.model
    out = JetPoly.zero(m.n)
    for j in range(q + 1):
        ga = table.grad(alpha, p + 1 + j)
        gb = table.grad(beta, q - j)
        pair = JetPoly.zero(m.n)
        for b in range(m.n):
            for c in range(m.n):
                e = m.eta[b][c]
                if e:
                    pair = pair + ga[b] * gb[c] * e
        out = out + pair * ((-1) ** j)
    return out


def check_flow_commutativity(table: ThetaTable, fp1: tuple[int, int],
                             fp2: tuple[int, int]) -> list[JetPoly]:
    """Residual of [d_{t1}, d_{t2}] v computed by prolongation."""
    a = flow_rhs(table, *fp1)
    b = flow_rhs(table, *fp2)
    return commutator_of_flows(a, b)


def commutator_of_flows(a: list[JetPoly], b: list[JetPoly]) -> list[JetPoly]:
    n = a[0].n
    out = []
    for g in range(n):
        acc = JetPoly.zero(n)
        mx = max(a[g].max_jet_order(), b[g].max_jet_order())
        for sig in range(1, n + 1):
            for s in range(mx + 1):
                da = a[g].diff(sig, s)
                db = b[g].diff(sig, s)
                if not da.is_zero():
                    acc = acc + da * b[sig - 1].dx(s)
                if not db.is_zero():
                    acc = acc - db * a[sig - 1].dx(s)
        out.append(acc)
    return out


def check_bihamiltonian_recursion(table: ThetaTable, alpha: int, p: int) -> list[JetPoly]:
    """Residual of the pencil recursion at level p for the alpha-chain.

    R d_{t^{p-1}} = d_{t^p} (p + mu + 1/2) + sum_k d_{t^{p-k}} R_k, spelled as
    flows: P2-flow of theta_{a,p} minus the right-hand P1-flow combination.
    Reports Degenerate when the spectrum contains half-integers.
    """
    m = table.model
    if any((mu - Fraction(1, 2)).denominator == 1 for mu in m.mu):
        raise Degenerate("spectrum contains half-integers; recursion operator degenerate")
    P1, P2 = m.hydrodynamic_pencil()
    lhs = hamiltonian_flow(P2, table.theta(alpha, p))
    n = m.n
    rhs = [JetPoly.zero(n) for _ in range(n)]
    for b in range(1, n + 1):
        coeff = ExactScalar(Fraction(p) + m.mu[b - 1] + Fraction(1, 2)) if b == alpha else ExactScalar(0)
        if not coeff.is_zero():
            f = hamiltonian_flow(P1, table.theta(b, p + 1))
            rhs = [r + x * coeff for r, x in zip(rhs, f)]
    Rk = _r_decomposition(m)
    for k, Rmat in Rk.items():
        if k < 0 or p - k < 0:
            continue
        for b in range(1, n + 1):
            c = Rmat[b - 1][alpha - 1]
            if not c.is_zero():
                f = hamiltonian_flow(P1, table.theta(b, p + 1 - k))
                rhs = [r + x * c for r, x in zip(rhs, f)]
    return [l - r for l, r in zip(lhs, rhs)]


def check_tau_symmetry(table: ThetaTable, alpha: int, p: int,
                       beta: int, q: int) -> JetPoly:
    """d_{t^{b,q}} h_{a,p-1} - d_x Omega_{a,p;b,q} as a JetPoly identity.

    The dispersionless tau-structure density at level p-1 is theta_{a,p}.
    """
    m = table.model
    th = table.theta(alpha, p)
    fl = flow_rhs(table, beta, q)
    lhs = JetPoly.zero(m.n)
    for g in range(1, m.n + 1):
        lhs = lhs + th.diff(g) * fl[g - 1]
    rhs = omega(table, alpha, p, beta, q).total_x_derivative()
    return lhs - rhs
