"""Solutions of the Principal Hierarchy and their genus-zero free energy.

Solutions are exact truncated series in the times t[a,p] (p <= max_level,
total degree <= max_degree), with x absorbed into t[1,0].  The topological
solution is the fixed point v = grad Phi with c^{a,p} = delta^a_1 delta^p_1;
general hodograph solutions are Newton-iterated around an exact seed.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional

from .errors import NonMonotoneSeed, TruncationInsufficient
from .evaluate import evaluate_on_solution
from .frobenius import FrobeniusModel
from .hierarchy import ThetaTable, omega
from .jets import JetPoly
from .scalars import ExactScalar
from .series import TauSeries
from .poisson import _invert_scalar_matrix


class HierarchySolution:
    def __init__(self, table: ThetaTable, c: dict, v: dict[int, TauSeries],
                 max_degree: int, max_level: int):
        self.table = table
        self.model = table.model
        self.c = dict(c)  # (alpha, p) -> ExactScalar
        self.v = v
        self.max_degree = max_degree
        self.max_level = max_level

    def tilde_t(self, alpha: int, p: int) -> TauSeries:
        t = TauSeries.time_var(alpha, p, self.max_degree, self.max_level)
        c = self.c.get((alpha, p))
        if c is not None and not (c if isinstance(c, ExactScalar) else ExactScalar(c)).is_zero():
            t = t - c
        return t

    def hodograph_residual(self) -> list[TauSeries]:
        """x e + sum tilde-t grad theta evaluated on the solution (vanishes)."""
        m = self.model
        out = []
        cache: dict = {}
        for a in range(1, m.n + 1):
            acc = TauSeries(self.max_degree, self.max_level)
            for (b, q) in _time_range(m.n, self.max_level):
                g = self.table.grad(b, q)[a - 1]
                acc = (acc + self.tilde_t(b, q) * evaluate_on_solution(g, self.v, cache=cache)).cap_degree(self.max_degree)
            out.append(acc)
        return out

    def check_flows(self, pairs) -> list[TauSeries]:
        """Residuals d v / d t^{a,p} - flow_rhs evaluated on the solution."""
        from .hierarchy import flow_rhs
        out = []
        cache: dict = {}
        for (a, p) in pairs:
            f = flow_rhs(self.table, a, p)
            for b in range(1, self.model.n + 1):
                lhs = self.v[b].diff(a, p)
                rhs = evaluate_on_solution(f[b - 1], self.v, cache=cache).with_bounds(
                    lhs.max_degree)
                out.append(lhs - rhs)
        return out


def _time_range(n: int, max_level: int):
    for p in range(max_level + 1):
        for a in range(1, n + 1):
            yield (a, p)


def topological_solution(table: ThetaTable, max_degree: int, max_level: int) -> HierarchySolution:
    """Fixed point v^a = t^{a,0} + higher of v = grad Phi_{x,t}(v)."""
    m = table.model
    n = m.n
    grads = {
        (b, q): table.grad(b, q) for (b, q) in _time_range(n, max_level)
    }
    # grow the degree cap: an iteration exact to degree d-1 yields degree d,
    # since every term of grad Phi carries an explicit time prefactor.  The
    # seed is exact only to degree 0 (gradients may have constant terms), so
    # the loop starts at d = 1.
    v = {a: TauSeries.time_var(a, 0, 1, max_level) for a in range(1, n + 1)}
    for d in range(1, max_degree + 1):
        v = {a: s.with_bounds(max_degree=d) for a, s in v.items()}
        new = {}
        cache: dict = {}
        for a in range(1, n + 1):
            acc = TauSeries(d, max_level)
            for (b, q), g in grads.items():
                t = TauSeries.time_var(b, q, d, max_level)
                acc = (acc + t * evaluate_on_solution(g[a - 1], v, cache=cache)).cap_degree(d)
            new[a] = acc
        v = new
    v = {a: s.with_bounds(max_degree=max_degree) for a, s in v.items()}
    c = {(1, 1): ExactScalar(1)}
    return HierarchySolution(table, c, v, max_degree, max_level)


def hodograph_solution(table: ThetaTable, c: dict, seed: list,
                       max_degree: int, max_level: int) -> HierarchySolution:
    """Solution of x e + sum (t - c) grad theta = 0 around the exact seed v0.

    The multiplication operator built from c must be invertible at the seed
    (monotonicity); otherwise NonMonotoneSeed is raised.
    """
    m = table.model
    n = m.n
    cc = {k: (x if isinstance(x, ExactScalar) else ExactScalar(x)) for k, x in c.items()}
    seed = [x if isinstance(x, ExactScalar) else ExactScalar(x) for x in seed]
    # G^a(v; t) = t~{1,0} e^a + sum_{(b,q)} t~^{b,q} grad^a theta_{b,q}(v)
    maxp = max((q for (_, q) in cc), default=0)
    levels = max(max_level, maxp)
    grads = {(b, q): table.grad(b, q) for (b, q) in _time_range(n, levels)}

    # seed consistency: G(v0; t=0) = - sum c^{b,q} grad theta_{b,q}(v0) = 0
    at_seed = {}
    for (b, q), g in grads.items():
        at_seed[(b, q)] = [_eval_at_point(x, seed) for x in g]
    for a in range(n):
        acc = ExactScalar(0)
        for (b, q), vals in at_seed.items():
            ci = cc.get((b, q))
            if ci is not None:
                acc = acc - ci * vals[a]
        if not acc.is_zero():
            raise NonMonotoneSeed(f"seed does not solve the t=0 hodograph equation (component {a + 1})")
    # Jacobian of G at the seed: J0[a][g] = - sum c^{b,q} d_g grad^a theta_{b,q}(v0)
    J0 = [[ExactScalar(0)] * n for _ in range(n)]
    for (b, q), g in grads.items():
        ci = cc.get((b, q))
        if ci is None:
            continue
        for a in range(n):
            for gx in range(1, n + 1):
                J0[a][gx - 1] = J0[a][gx - 1] - ci * _eval_at_point(g[a].diff(gx), seed)
    J0inv = _invert_scalar_matrix(J0)
    if J0inv is None:
        raise NonMonotoneSeed("multiplication operator is singular at the seed")

    v = {a + 1: TauSeries.const(seed[a], max_degree, max_level) for a in range(n)}
    for _ in range(max_degree + 2):
        G = []
        for a in range(n):
            acc = TauSeries(max_degree, max_level)
            for (b, q), g in grads.items():
                t = TauSeries.time_var(b, q, max_degree, max_level) if q <= max_level \
                    else TauSeries(max_degree, max_level)
                ci = cc.get((b, q))
                if ci is not None:
                    t = t - ci
                acc = (acc + t * _evaluate_shifted(g[a], v, seed)).cap_degree(max_degree)
            G.append(acc)
        delta = {}
        for a in range(n):
            acc = TauSeries(max_degree, max_level)
            for b in range(n):
                acc = acc + G[b] * J0inv[a][b]
            delta[a + 1] = acc
        if all(d.is_zero() for d in delta.values()):
            break
        for a in range(1, n + 1):
            v[a] = v[a] - delta[a]
    return HierarchySolution(table, cc, v, max_degree, max_level)


def _eval_at_point(p: JetPoly, point: list) -> ExactScalar:
    """Value of a v-only JetPoly at a rational point (no jets, no eps)."""
    out = ExactScalar(0)
    for (eps, jets, exps), c in p.terms.items():
        if eps:
            raise ValueError("eps-dependent expression at a point")
        val = c
        for (a, s), e in jets:
            if s != 0:
                raise ValueError("jet variable at a point evaluation")
            base = point[a - 1]
            if isinstance(e, Fraction) and e.denominator != 1:
                raise ValueError("fractional power at point evaluation")
            val = val * base ** int(e)
        for g, q in exps:
            if not point[g - 1].is_zero():
                raise ValueError("exp generator at a nonzero point")
        out = out + val
    return out


def _evaluate_shifted(p: JetPoly, v: dict[int, TauSeries], seed: list) -> TauSeries:
    """Evaluate a v-only JetPoly on series with nonzero rational constant term."""
    any_s = next(iter(v.values()))
    out = TauSeries(any_s.max_degree, any_s.max_level)
    for (eps, jets, exps), c in p.terms.items():
        piece = TauSeries.const(c, any_s.max_degree, any_s.max_level)
        for (a, s), e in jets:
            if s != 0:
                raise ValueError("hodograph gradients are v-only")
            piece = piece * v[a] ** int(e)
        for g, q in exps:
            base = v[g] * q
            if not base.constant_term().is_zero():
                raise TruncationInsufficient("exp of nonzero constant term")
            piece = piece * base.exp()
        out = out + piece
    return out


def genus0_free_energy(sol: HierarchySolution) -> TauSeries:
    """F_0 = (1/2) sum tilde-t tilde-t Omega(v(t)) for the given solution."""
    m = sol.model
    out = TauSeries(sol.max_degree, sol.max_level)
    pairs = list(_time_range(m.n, sol.max_level))
    omegas = {}
    cache: dict = {}
    for i, (a, p) in enumerate(pairs):
        for (b, q) in pairs[i:]:
            om = omega(sol.table, a, p, b, q)
            omegas[((a, p), (b, q))] = evaluate_on_solution(om, sol.v, cache=cache)
    for i, (a, p) in enumerate(pairs):
        for j, (b, q) in enumerate(pairs):
            key = ((a, p), (b, q)) if j >= i else ((b, q), (a, p))
            term = sol.tilde_t(a, p) * sol.tilde_t(b, q) * omegas[key]
            out = (out + term * Fraction(1, 2)).cap_degree(sol.max_degree)
    return out


def genus0_first_derivative(sol: HierarchySolution, alpha: int, p: int) -> TauSeries:
    """d F_0 / d t^{a,p} = sum tilde-t Omega_{a,p;b,q}(v(t))."""
    m = sol.model
    out = TauSeries(sol.max_degree, sol.max_level)
    cache: dict = {}
    for (b, q) in _time_range(m.n, sol.max_level):
        om = omega(sol.table, alpha, p, b, q)
        out = (out + sol.tilde_t(b, q) * evaluate_on_solution(om, sol.v, cache=cache)).cap_degree(sol.max_degree)
    return out


def check_trr0(sol: HierarchySolution, F0: TauSeries, alpha: int, p: int,
               beta: int, q: int, gamma: int, r: int) -> TauSeries:
    """Genus-zero TRR residual for <<tau_p(a) tau_q(b) tau_r(g)>>."""
    m = sol.model
    lhs = F0.diff(alpha, p).diff(beta, q).diff(gamma, r)
    rhs = None
    for nu in range(1, m.n + 1):
        for mu in range(1, m.n + 1):
            e = m.eta_inv[nu - 1][mu - 1]
            if e.is_zero():
                continue
            term = F0.diff(alpha, p - 1).diff(nu, 0) \
                * F0.diff(mu, 0).diff(beta, q).diff(gamma, r) * e
            rhs = term if rhs is None else rhs + term
    return lhs - rhs
