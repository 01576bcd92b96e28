"""Local translation-invariant multivectors on the formal loop space.

A local bivector is stored as the full matrix of coefficients A[i][j][s]
(JetPoly, eps-graded) of delta^(s)(x-y).  Trivectors are normalized to the
functional form

    sum_{i,j,k,p,q}  int B[i,j,k][p,q] * w1_i * d_x^p(w2_j) * d_x^q(w3_k) dx

with the first test form underived; that representative is unique, so zero
testing is decidable.  The Schouten-Nijenhuis bracket is computed from the
componentwise formula with each component based at its own first argument.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb
from typing import Optional, Union

from .errors import DimensionMismatch, NonInvertibleJacobian, NotAntisymmetric
from .jets import JetPoly, exact_div
from .scalars import ExactScalar


class LocalBivector:
    __slots__ = ("n", "coeffs")

    def __init__(self, n: int, coeffs: dict):
        self.n = n
        # coeffs: (i, j) -> {s: JetPoly}
        self.coeffs: dict[tuple[int, int], dict[int, JetPoly]] = {}
        for (i, j), table in coeffs.items():
            clean = {s: p for s, p in table.items() if not p.is_zero()}
            if clean:
                self.coeffs[(i, j)] = clean

    def coeff(self, i: int, j: int, s: int) -> JetPoly:
        return self.coeffs.get((i, j), {}).get(s, JetPoly.zero(self.n))

    def max_eps(self) -> int:
        return max(
            (e for t in self.coeffs.values() for p in t.values() for e in p.eps_orders()),
            default=0,
        )

    def truncate_eps(self, order: int) -> "LocalBivector":
        return LocalBivector(
            self.n,
            {
                ij: {s: p.truncate_eps(order) for s, p in t.items()}
                for ij, t in self.coeffs.items()
            },
        )

    def __add__(self, other: "LocalBivector") -> "LocalBivector":
        out: dict = {}
        for src in (self, other):
            for ij, t in src.coeffs.items():
                d = out.setdefault(ij, {})
                for s, p in t.items():
                    d[s] = d.get(s, JetPoly.zero(self.n)) + p
        return LocalBivector(self.n, out)

    def __sub__(self, other: "LocalBivector") -> "LocalBivector":
        return self + other.scale(-1)

    def scale(self, c) -> "LocalBivector":
        return LocalBivector(
            self.n, {ij: {s: p * c for s, p in t.items()} for ij, t in self.coeffs.items()}
        )

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other) -> bool:
        if not isinstance(other, LocalBivector):
            return NotImplemented
        return self.n == other.n and (self - other).is_zero()

    def __str__(self) -> str:
        lines = []
        for (i, j) in sorted(self.coeffs):
            for s in sorted(self.coeffs[(i, j)]):
                lines.append(f"A[{i},{j}]_{s} = {self.coeffs[(i, j)][s]}")
        return "\n".join(lines) or "0"


def antisymmetry_partner(table: dict[int, JetPoly], n: int) -> dict[int, JetPoly]:
    """Coefficients of A^{ji} from those of A^{ij} via the antisymmetry identity.

    A^{ji}_s = sum_{t >= s} (-1)^(t+1) C(t, s) d_x^(t-s) A^{ij}_t
    """
    out: dict[int, JetPoly] = {}
    if not table:
        return out
    smax = max(table)
    for s in range(smax + 1):
        acc = JetPoly.zero(n)
        for t in range(s, smax + 1):
            p = table.get(t)
            if p is None:
                continue
            sign = -1 if (t + 1) % 2 else 1
            acc = acc + p.dx(t - s) * Fraction(sign * comb(t, s))
        if not acc.is_zero():
            out[s] = acc
    return out


def normalize_antisymmetric(n: int, raw: dict, check_grading: bool = True) -> LocalBivector:
    """Build a LocalBivector from raw coefficients, enforcing antisymmetry.

    `raw` maps (i, j) to {s: JetPoly}.  Missing transposed entries are filled
    from the antisymmetry identity; present ones are verified.  The eps
    grading (the eps^k part of the delta^(s) coefficient has jet degree
    k - s + 1) is verified and violations are rejected.
    """
    coeffs: dict[tuple[int, int], dict[int, JetPoly]] = {}
    for (i, j), table in raw.items():
        coeffs[(i, j)] = {s: p for s, p in table.items() if not p.is_zero()}
    for i in range(1, n + 1):
        for j in range(i, n + 1):
            upper = coeffs.get((i, j), {})
            expected = antisymmetry_partner(upper, n)
            if (j, i) in coeffs and (j, i) != (i, j):
                given = coeffs[(j, i)]
                keys = set(given) | set(expected)
                for s in keys:
                    got = given.get(s, JetPoly.zero(n))
                    want = expected.get(s, JetPoly.zero(n))
                    if not (got - want).is_zero():
                        raise NotAntisymmetric(j, i, s)
            else:
                if (i, j) == (j, i):
                    # diagonal entries must satisfy the identity with themselves
                    for s in set(upper) | set(expected):
                        got = upper.get(s, JetPoly.zero(n))
                        want = expected.get(s, JetPoly.zero(n))
                        if not (got - want).is_zero():
                            raise NotAntisymmetric(i, i, s)
                else:
                    coeffs[(j, i)] = expected
    biv = LocalBivector(n, coeffs)
    if check_grading:
        _check_grading(biv)
    return biv


def _check_grading(b: LocalBivector) -> None:
    for (i, j), table in b.coeffs.items():
        for s, p in table.items():
            for (eps, jets, exps) in p.terms:
                deg = sum(t * e for (_, t), e in jets)
                if deg != eps - s + 1:
                    raise ValueError(
                        f"ungraded bivector coefficient at ({i},{j}) delta^({s}): "
                        f"eps^{eps} term has jet degree {deg}, expected {eps - s + 1}"
                    )


class LocalTrivector:
    """Normalized trivector: (i,j,k) -> {(p,q): JetPoly}."""

    __slots__ = ("n", "coeffs")

    def __init__(self, n: int, coeffs: Optional[dict] = None):
        self.n = n
        self.coeffs: dict[tuple[int, int, int], dict[tuple[int, int], JetPoly]] = {}
        if coeffs:
            for ijk, table in coeffs.items():
                clean = {pq: p for pq, p in table.items() if not p.is_zero()}
                if clean:
                    self.coeffs[ijk] = clean

    def add_term(self, i: int, j: int, k: int, a: int, b: int, c: int, coeff: JetPoly):
        """Accumulate coeff * w1_i^(a) w2_j^(b) w3_k^(c), reducing a -> 0."""
        if coeff.is_zero():
            return
        if a > 0:
            minus = -coeff
            self.add_term(i, j, k, a - 1, b, c, minus.total_x_derivative())
            self.add_term(i, j, k, a - 1, b + 1, c, minus)
            self.add_term(i, j, k, a - 1, b, c + 1, minus)
            return
        table = self.coeffs.setdefault((i, j, k), {})
        cur = table.get((b, c))
        cur = coeff if cur is None else cur + coeff
        if cur.is_zero():
            table.pop((b, c), None)
            if not table:
                del self.coeffs[(i, j, k)]
        else:
            table[(b, c)] = cur

    def is_zero(self) -> bool:
        return not self.coeffs

    def scale(self, c) -> "LocalTrivector":
        out = LocalTrivector(self.n)
        for ijk, table in self.coeffs.items():
            out.coeffs[ijk] = {pq: p * c for pq, p in table.items()}
        return out

    def __sub__(self, other: "LocalTrivector") -> "LocalTrivector":
        out = LocalTrivector(self.n, {k: dict(v) for k, v in self.coeffs.items()})
        for ijk, table in other.coeffs.items():
            for (b, c), p in table.items():
                out.add_term(*ijk, 0, b, c, -p)
        return out

    def __str__(self) -> str:
        lines = []
        for ijk in sorted(self.coeffs):
            for pq in sorted(self.coeffs[ijk]):
                lines.append(f"B[{ijk}]_{pq} = {self.coeffs[ijk][pq]}")
        return "\n".join(lines) or "0"


def schouten_bracket(A: LocalBivector, B: LocalBivector,
                     max_eps: Optional[int] = None) -> LocalTrivector:
    """Schouten-Nijenhuis bracket [A, B] of two local bivectors.

    Both inputs must carry the full (antisymmetry-completed) coefficient
    matrix.  With every component A^{ij}(x,y) written on jets at its first
    argument, six of the twelve terms of the componentwise formula survive;
    they are collected here in functional normal form.
    """
    if A.n != B.n:
        raise DimensionMismatch(f"bivector dimensions {A.n} != {B.n}")
    n = A.n
    out = LocalTrivector(n)

    def accumulate(P: LocalBivector, Q: LocalBivector, role: str):
        # role 'x':  dP^{ij}/du^{l,s}(x) d_x^s Q^{lk}(x,z): slots (0, t, m+r)
        # role 'z':  dP^{ki}/du^{l,s}(z) d_z^s Q^{lj}(z,y): slots (t, m+r, 0)
        # role 'y':  dP^{jk}/du^{l,s}(y) d_y^s Q^{li}(y,x): slots (m+r, 0, t)
        for (p1, p2), table in P.coeffs.items():
            for t, coeff in table.items():
                smax = coeff.max_jet_order()
                for l in range(1, n + 1):
                    for s in range(smax + 1):
                        d = coeff.diff(l, s)
                        if d.is_zero():
                            continue
                        if max_eps is not None:
                            d = d.truncate_eps(max_eps)
                        for (q1, q2), qtable in Q.coeffs.items():
                            if q1 != l:
                                continue
                            for m, qc in qtable.items():
                                for r in range(s + 1):
                                    piece = d * qc.dx(s - r) * Fraction(comb(s, r))
                                    if max_eps is not None:
                                        piece = piece.truncate_eps(max_eps)
                                    if piece.is_zero():
                                        continue
                                    if role == "x":
                                        i, j, k = p1, p2, q2
                                        out.add_term(i, j, k, 0, t, m + r, piece)
                                    elif role == "z":
                                        k_, i = p1, p2
                                        j = q2
                                        out.add_term(i, j, k_, t, m + r, 0, piece)
                                    else:  # 'y'
                                        j, k_ = p1, p2
                                        i = q2
                                        out.add_term(i, j, k_, m + r, 0, t, piece)

    accumulate(A, B, "x")
    accumulate(B, A, "x")
    accumulate(A, B, "z")
    accumulate(B, A, "z")
    accumulate(A, B, "y")
    accumulate(B, A, "y")
    return out


def jacobi_residual(A: LocalBivector, max_eps: Optional[int] = None) -> LocalTrivector:
    """(1/2)[A, A]; vanishes iff A is a Poisson structure."""
    return schouten_bracket(A, A, max_eps=max_eps).scale(Fraction(1, 2))


def compatibility_residual(A: LocalBivector, B: LocalBivector,
                           max_eps: Optional[int] = None) -> LocalTrivector:
    """[A, B]; vanishes iff the pencil A - lambda B is Poisson for all lambda."""
    return schouten_bracket(A, B, max_eps=max_eps)


def hamiltonian_flow(A: LocalBivector, density: JetPoly) -> list[JetPoly]:
    """Evolutionary vector field a^i = A^{ij}_s d_x^s (delta H / delta u^j)."""
    n = A.n
    grads = [density.variational_derivative(j) for j in range(1, n + 1)]
    out = []
    for i in range(1, n + 1):
        acc = JetPoly.zero(n)
        for j in range(1, n + 1):
            table = A.coeffs.get((i, j), {})
            for s, c in table.items():
                acc = acc + c * grads[j - 1].dx(s)
        out.append(acc)
    return out


# -- Miura group ---------------------------------------------------------------


class MiuraMap:
    """Transformation u^i = F^i(v; v_x, ...; eps) with graded coefficients."""

    __slots__ = ("n", "components")

    def __init__(self, n: int, components: list[JetPoly]):
        if len(components) != n:
            raise ValueError("need n component expressions")
        self.n = n
        self.components = components
        for i, F in enumerate(components, start=1):
            for (eps, jets, exps) in F.terms:
                deg = sum(s * e for (_, s), e in jets)
                if deg != eps:
                    raise ValueError(
                        f"component {i}: eps^{eps} term has jet degree {deg}, "
                        "Miura coefficients must be homogeneous of degree k at eps^k"
                    )

    @staticmethod
    def identity(n: int) -> "MiuraMap":
        return MiuraMap(n, [JetPoly.var(n, i) for i in range(1, n + 1)])

    def leading_jacobian(self) -> list[list[JetPoly]]:
        """Matrix d F^i_0 / d v^j of the dispersionless part."""
        return [
            [self.components[i].eps_part(0).diff(j + 1) for j in range(self.n)]
            for i in range(self.n)
        ]

    def eps_order(self) -> int:
        return max((e for F in self.components for e in F.eps_orders()), default=0)

    def __str__(self) -> str:
        return "; ".join(f"u{i+1} = {F}" for i, F in enumerate(self.components))


def compose_miura(outer: MiuraMap, inner: MiuraMap, order: int) -> MiuraMap:
    """Function composition outer(inner(v)), truncated at eps^order."""
    images = {a + 1: inner.components[a] for a in range(inner.n)}
    comps = [F.substitute(images, max_eps=order).truncate_eps(order) for F in outer.components]
    return MiuraMap(outer.n, comps)


def invert_miura(M: MiuraMap, order: int) -> MiuraMap:
    """Inverse of M through eps^order by successive approximation.

    Supported for affine dispersionless part (constant invertible Jacobian);
    this covers the near-identity subgroup used throughout.
    """
    n = M.n
    J = M.leading_jacobian()
    if any(not e.is_constant() for row in J for e in row):
        raise NonInvertibleJacobian("inversion needs an affine dispersionless part")
    Jc = [[e.as_scalar() for e in row] for row in J]
    Jinv = _invert_scalar_matrix(Jc)
    if Jinv is None:
        raise NonInvertibleJacobian("leading Jacobian is singular")
    # affine leading inverse: v0 = Jinv (u - c) where c = F0(0)
    consts = [M.components[i].eps_part(0).substitute({a: JetPoly.zero(n) for a in range(1, n + 1)})
              for i in range(n)]
    comps = []
    for i in range(n):
        acc = JetPoly.zero(n)
        for j in range(n):
            acc = acc + (JetPoly.var(n, j + 1) - consts[j]) * Jinv[i][j]
        comps.append(acc)
    N = MiuraMap(n, comps)
    for k in range(1, order + 1):
        cur = compose_miura(M, N, order)
        resid = [cur.components[i] - JetPoly.var(n, i + 1) for i in range(n)]
        resid_k = [r.eps_part(k) for r in resid]
        if all(r.is_zero() for r in resid_k):
            continue
        # correction at eps^k: N -= Jinv(N0(v)) . resid_k;  with affine leading
        # part the Jacobian inverse is constant
        new_comps = []
        for i in range(n):
            corr = JetPoly.zero(n)
            for j in range(n):
                corr = corr + resid_k[j] * Jinv[i][j]
            new_comps.append(N.components[i] - JetPoly.eps(n, k) * corr)
        N = MiuraMap(n, new_comps)
    return N


def _invert_scalar_matrix(m: list[list[ExactScalar]]):
    n = len(m)
    aug = [[ExactScalar(x) for x in row] + [ExactScalar(1 if r == c else 0) for c in range(n)]
           for r, row in enumerate(m)]
    for col in range(n):
        piv = next((r for r in range(col, n) if not aug[r][col].is_zero()), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = aug[col][col].inverse()
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and not aug[r][col].is_zero():
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [[aug[r][n + c] for c in range(n)] for r in range(n)]


# -- differential operators and the bracket transformation law -----------------


def op_compose(P: dict[int, JetPoly], Q: dict[int, JetPoly], n: int,
               max_eps: Optional[int] = None) -> dict[int, JetPoly]:
    """Compose sum P_m d^m  o  sum Q_r d^r as differential operators."""
    out: dict[int, JetPoly] = {}
    for m, pc in P.items():
        for r, qc in Q.items():
            for j in range(m + 1):
                piece = pc * qc.dx(j) * Fraction(comb(m, j))
                if max_eps is not None:
                    piece = piece.truncate_eps(max_eps)
                if piece.is_zero():
                    continue
                d = m + r - j
                cur = out.get(d)
                cur = piece if cur is None else cur + piece
                if cur.is_zero():
                    out.pop(d, None)
                else:
                    out[d] = cur
    return out


def frechet_operator(M: MiuraMap, i: int, k: int, adjoint: bool,
                     max_order: Optional[int] = None) -> dict[int, JetPoly]:
    """L^i_k = sum_s (-d)^s o (dF^i/dv^{k,s}) or its adjoint (dF/dv)d^s."""
    n = M.n
    F = M.components[i - 1]
    out: dict[int, JetPoly] = {}
    for s in range(F.max_jet_order() + 1):
        f = F.diff(k, s)
        if f.is_zero():
            continue
        if adjoint:
            out[s] = out.get(s, JetPoly.zero(n)) + f
        else:
            # (-d)^s o f = sum_r (-1)^s C(s,r) f^(r) d^(s-r)
            for r in range(s + 1):
                piece = f.dx(r) * Fraction((-1) ** s * comb(s, r))
                d = s - r
                cur = out.get(d)
                cur = piece if cur is None else cur + piece
                if cur.is_zero():
                    out.pop(d, None)
                else:
                    out[d] = cur
    return {d: c for d, c in out.items() if not c.is_zero()}


def miura_transform_bracket(A: LocalBivector, M: MiuraMap, order: int) -> LocalBivector:
    """Bracket in the v coordinates, where A is given in u and u = M(v).

    Solves L* Atilde L = A(M(v)) for Atilde order by order in eps and delta
    order; requires the result to be polynomial (exact divisions by the
    Jacobian determinant must succeed).
    """
    n = A.n
    images = {a + 1: M.components[a] for a in range(n)}
    # right-hand side: substitute u -> M(v) into the coefficients of A
    target: dict[tuple[int, int], dict[int, JetPoly]] = {}
    for (i, j), table in A.coeffs.items():
        target[(i, j)] = {
            s: c.substitute(images, max_eps=order).truncate_eps(order) for s, c in table.items()
        }
    # Frechet operators
    Ls = {(j, l): frechet_operator(M, j, l, adjoint=False) for j in range(1, n + 1) for l in range(1, n + 1)}
    Lstars = {(i, k): frechet_operator(M, i, k, adjoint=True) for i in range(1, n + 1) for k in range(1, n + 1)}
    J = M.leading_jacobian()
    detJ, adjJ = _det_adj(J)
    det2 = detJ * detJ

    result: dict[tuple[int, int], dict[int, JetPoly]] = {
        (i, j): {} for i in range(1, n + 1) for j in range(1, n + 1)
    }

    def lhs_of(current: dict) -> dict:
        out = {}
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                acc: dict[int, JetPoly] = {}
                for k in range(1, n + 1):
                    for l in range(1, n + 1):
                        mid = current.get((k, l))
                        if not mid:
                            continue
                        piece = op_compose(
                            op_compose(Lstars[(i, k)], mid, n, max_eps=order),
                            Ls[(j, l)], n, max_eps=order)
                        for d, c in piece.items():
                            cur = acc.get(d)
                            cur = c if cur is None else cur + c
                            if cur.is_zero():
                                acc.pop(d, None)
                            else:
                                acc[d] = cur
                out[(i, j)] = acc
        return out

    for e in range(order + 1):
        lhs = lhs_of(result)
        for m in range(e + 2, -1, -1):
            # residual at eps^e, delta-order m
            resid = {}
            nonzero = False
            for ij in target:
                want = target[ij].get(m, JetPoly.zero(n)).eps_part(e)
                have = lhs.get(ij, {}).get(m, JetPoly.zero(n)).eps_part(e)
                r = want - have
                resid[ij] = r
                if not r.is_zero():
                    nonzero = True
            if not nonzero:
                continue
            # solve J X J^T = resid for the delta-order-m coefficient matrix
            X = [[JetPoly.zero(n) for _ in range(n)] for _ in range(n)]
            for i in range(n):
                for j in range(n):
                    acc = JetPoly.zero(n)
                    for k in range(n):
                        for l in range(n):
                            r = resid.get((k + 1, l + 1), JetPoly.zero(n))
                            if r.is_zero():
                                continue
                            acc = acc + adjJ[i][k] * r * adjJ[j][l]
                    if not acc.is_zero():
                        try:
                            X[i][j] = exact_div(acc, det2)
                        except ValueError as exc:
                            raise NonInvertibleJacobian(
                                "transformed bracket is not polynomial") from exc
            for i in range(n):
                for j in range(n):
                    if not X[i][j].is_zero():
                        d = result[(i + 1, j + 1)]
                        d[m] = d.get(m, JetPoly.zero(n)) + JetPoly.eps(n, e) * X[i][j]
            lhs = lhs_of(result)
        # sanity: eps^e layer fully matched
        for ij in target:
            for m in set(target[ij]) | set(lhs.get(ij, {})):
                want = target[ij].get(m, JetPoly.zero(n)).eps_part(e)
                have = lhs.get(ij, {}).get(m, JetPoly.zero(n)).eps_part(e)
                if not (want - have).is_zero():
                    raise NonInvertibleJacobian(
                        f"no consistent transformed bracket at eps^{e}, delta^{m}")
    return LocalBivector(
        n, {ij: {s: c for s, c in t.items() if not c.is_zero()} for ij, t in result.items()}
    )


def _det_adj(J: list[list[JetPoly]]):
    n = len(J)
    if n == 1:
        one = JetPoly.const(J[0][0].n, 1)
        return J[0][0], [[one]]
    if n == 2:
        det = J[0][0] * J[1][1] - J[0][1] * J[1][0]
        adj = [[J[1][1], -J[0][1]], [-J[1][0], J[0][0]]]
        return det, adj
    raise NotImplementedError("determinants implemented for n <= 2")
