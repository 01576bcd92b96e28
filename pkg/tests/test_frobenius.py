from fractions import Fraction

import pytest

from frobhier.errors import UnsupportedModel
from frobhier.frobenius import builtin_model, cp1_model, i2_model, kdv_model
from frobhier.jets import JetPoly
from frobhier.poisson import compatibility_residual, jacobi_residual
from frobhier.scalars import I, rat


def test_validate_builtins():
    for m in (kdv_model(), cp1_model(), i2_model(3), i2_model(Fraction(5, 2))):
        rep = m.validate()
        assert not rep["unity"], m.name
        assert not rep["associativity"], m.name
        assert not rep["quasihomogeneity"], m.name


def test_validate_rejects_wrong_charge():
    # F = (1/2) v1^2 v2 + v2^4 demands d = 1/2; a wrong charge leaves a
    # nonzero quasihomogeneity residual
    n = 2
    F = JetPoly.var(n, 1) ** 2 * JetPoly.var(n, 2) * rat(1, 2) + JetPoly.var(n, 2) ** 4
    from frobhier.frobenius import FrobeniusModel
    good = FrobeniusModel(n, [[0, 1], [1, 0]], F, [[1, 0], [0, Fraction(2, 3)]], [0, 0],
                          Fraction(1, 3), [0, 0], name="quartic")
    assert not good.validate()["quasihomogeneity"]
    bad = FrobeniusModel(n, [[0, 1], [1, 0]], F, [[1, 0], [0, Fraction(2, 3)]], [0, 0],
                         Fraction(1), [0, 0], name="quartic-bad")
    assert bad.validate()["quasihomogeneity"]


def test_structure_constants_cp1():
    m = cp1_model()
    c = m.structure_constants()
    assert c[(2, 2, 1)] == JetPoly.exp_gen(2, 2)
    assert c[(2, 2, 2)].is_zero()
    assert c[(1, 2, 2)] == JetPoly.const(2, 1)
    # unity: c_{1b}^g = delta
    for b in (1, 2):
        for g in (1, 2):
            want = JetPoly.const(2, 1 if b == g else 0)
            assert c[(1, b, g)] == want


def test_structure_constants_kdv():
    # n = 1 unity axiom forces c_{11}^1 = F''' = 1 (multiplication by E has
    # the matrix v, which is the intersection form, not the c-tensor)
    m = kdv_model()
    assert m.structure_constants()[(1, 1, 1)] == JetPoly.const(1, 1)


def test_intersection_form_cp1():
    m = cp1_model()
    g, gamma = m.intersection_form()
    assert g[0][0] == 2 * JetPoly.exp_gen(2, 2)
    assert g[0][1] == JetPoly.var(2, 1)
    assert g[1][1] == JetPoly.const(2, 2)
    assert gamma[(1, 1, 2)] == JetPoly.exp_gen(2, 2)
    assert gamma[(1, 2, 1)].is_zero() and gamma[(1, 2, 2)].is_zero()
    assert gamma[(2, 2, 1)].is_zero() and gamma[(2, 2, 2)].is_zero()


def test_intersection_form_i2():
    kappa = Fraction(3)
    m = i2_model(kappa)
    g, _ = m.intersection_form()
    v2 = JetPoly.var(2, 2)
    assert g[0][0] == 2 * JetPoly.var(2, 2, 0, kappa - 1)
    assert g[0][1] == JetPoly.var(2, 1)
    assert g[1][1] == v2 * Fraction(2, 3)


def test_intersection_form_kdv():
    m = kdv_model()
    g, _ = m.intersection_form()
    assert g[0][0] == JetPoly.var(1, 1)


def test_g_equals_E_dot_c_identity():
    # g . eta^{-1} = multiplication by E: g^{ag} = E^e c_e^{ag}
    # (this is how intersection_form computes g; re-check against the raw
    # contraction built independently from third derivatives)
    for m in (cp1_model(), i2_model(3)):
        g, _ = m.intersection_form()
        E = m.euler_components()
        for a in range(1, m.n + 1):
            for b in range(1, m.n + 1):
                acc = JetPoly.zero(m.n)
                for e in range(1, m.n + 1):
                    for mm in range(1, m.n + 1):
                        for nn in range(1, m.n + 1):
                            coeff = m.eta_inv[a - 1][mm - 1] * m.eta_inv[b - 1][nn - 1]
                            if not coeff.is_zero():
                                acc = acc + E[e - 1] * m.third_derivative(e, mm, nn) * coeff
                assert acc == g[a - 1][b - 1]


def test_pencils_poisson_and_compatible():
    for m in (kdv_model(), cp1_model(), i2_model(3)):
        P1, P2 = m.hydrodynamic_pencil()
        assert jacobi_residual(P1).is_zero(), m.name
        assert jacobi_residual(P2).is_zero(), m.name
        assert compatibility_residual(P1, P2).is_zero(), m.name


def test_kdv_pencil_shape():
    P1, P2 = kdv_model().hydrodynamic_pencil()
    assert P1.coeff(1, 1, 1) == JetPoly.const(1, 1)
    assert P2.coeff(1, 1, 1) == JetPoly.var(1, 1)
    assert P2.coeff(1, 1, 0) == JetPoly.var(1, 1, 1) * rat(1, 2)


def test_canonical_coordinates_cp1():
    m = cp1_model()
    can = m.canonical_coordinates()
    u1, u2 = can.u_exprs
    assert u1 - u2 == 4 * JetPoly.exp_gen(2, 2, Fraction(1, 2))
    assert can.V[0][1] == I * rat(-1, 2)
    # h1^2 = 2/(u1-u2), h2^2 = -2/(u1-u2), h1 h2 = -2i/(u1-u2)
    c, p = can.h_mono({1: 2})
    assert (c, p) == (rat(2), Fraction(-1))
    c, p = can.h_mono({2: 2})
    assert (c, p) == (rat(-2), Fraction(-1))
    c, p = can.h_mono({1: 1, 2: 1})
    assert (c, p) == (I * rat(-2), Fraction(-1))
    c, p = can.h_mono({1: 1, 2: -1})  # h1/h2 = i
    assert (c, p) == (I, Fraction(0))


def test_canonical_frame_consistency():
    # u_i are eigenvalues of E.: check (E.) u-gradient relation via the
    # characteristic identity u^2 - tr(E.) u + det(E.) = 0 on each model
    for m in (cp1_model(), i2_model(Fraction(5, 2))):
        c = m.structure_constants()
        E = m.euler_components()
        n = m.n
        # multiplication-by-E matrix M^g_b = E^a c_{ab}^g
        M = [[JetPoly.zero(n) for _ in range(n)] for _ in range(n)]
        for g in range(1, n + 1):
            for b in range(1, n + 1):
                for a in range(1, n + 1):
                    M[g - 1][b - 1] = M[g - 1][b - 1] + E[a - 1] * c[(a, b, g)]
        tr = M[0][0] + M[1][1]
        det = M[0][0] * M[1][1] - M[0][1] * M[1][0]
        for u in m.canonical_coordinates().u_exprs:
            assert (u * u - tr * u + det).is_zero()


def test_metric_in_canonical_frame_cp1():
    # sum_i h_i^2 du_i^2 reproduces eta: check eta(d/dv_a, d/dv_b) via the
    # Jacobian: sum_i h_i^2 (du_i/dv^a)(du_i/dv^b) = eta_{ab} with
    # h_i^2 = (coeff) * (u1-u2)^pow expressed through u12_in_v
    m = cp1_model()
    can = m.canonical_coordinates()
    u12 = can.u12_in_v
    for a in (1, 2):
        for b in (1, 2):
            acc = JetPoly.zero(2)
            for i in (1, 2):
                coeff, pw = can.h_mono({i: 2})
                assert pw == Fraction(-1)
                # h_i^2 * u12 = coeff: so h_i^2 du du = coeff/u12 * (du/dv)^2
                acc = acc + can.u_exprs[i - 1].diff(a) * can.u_exprs[i - 1].diff(b) * coeff
            # acc must equal eta_{ab} * u12
            assert acc == u12 * m.eta[a - 1][b - 1]


def test_isomonodromic_tau():
    assert kdv_model().isomonodromic_tau()["exponent"] == 0
    cp1 = cp1_model().isomonodromic_tau()
    assert cp1["exponent"] == Fraction(-1, 8)
    # I2(kappa): V12 = -i(1/2 - 1/kappa); exponent = V12^2/2 = -(1/2-1/kappa)^2/2
    for kappa in (Fraction(3), Fraction(5, 2)):
        m = i2_model(kappa)
        t = m.isomonodromic_tau()
        mm = Fraction(1, 2) - 1 / kappa
        assert t["exponent"] == -mm * mm / 2
        assert t["V12"] == I * (-mm)


def test_i2_v_matrix_constancy():
    # V = Psi V Psi^{-1} is constant: verify J V_flat adj(J) = det(J) * C with
    # constant C, where J is the Jacobian du_i/dv^a
    for kappa in (Fraction(3), Fraction(5, 2), Fraction(2)):
        m = i2_model(kappa) if kappa != 2 else i2_model(Fraction(2))
        can = m.canonical_coordinates()
        n = 2
        J = [[can.u_exprs[i].diff(a + 1) for a in range(n)] for i in range(n)]
        V = m.vmatrix()  # flat-frame matrix of the operator
        det = J[0][0] * J[1][1] - J[0][1] * J[1][0]
        adj = [[J[1][1], -J[0][1]], [-J[1][0], J[0][0]]]
        K = [[JetPoly.zero(n) for _ in range(n)] for _ in range(n)]
        for i in range(n):
            for j in range(n):
                for a in range(n):
                    for b in range(n):
                        K[i][j] = K[i][j] + J[i][a] * V[a][b] * adj[b][j]
        from frobhier.jets import exact_div
        C = [[exact_div(K[i][j], det) if not K[i][j].is_zero() else JetPoly.zero(n)
              for j in range(n)] for i in range(n)]
        for i in range(n):
            for j in range(n):
                assert C[i][j].is_constant()
        # conjugating by diag(h1, h2) with the branch h2 = -i h1:
        # V12 = (h1/h2) C12 = i C12 and V21 = -i C21
        assert C[0][1].as_scalar() * I == can.V[0][1]
        assert C[1][0].as_scalar() * I * (-1) == can.V[1][0]
        assert C[0][0].is_zero() and C[1][1].is_zero()


def test_unsupported_model_raises():
    from frobhier.frobenius import FrobeniusModel
    m = FrobeniusModel(1, [[1]], JetPoly.var(1, 1) ** 3 * rat(1, 6), [[1]], [0],
                       Fraction(0), [0], name="anon")
    with pytest.raises(UnsupportedModel):
        m.canonical_coordinates()


def test_builtin_loader():
    assert builtin_model("kdv").name == "kdv"
    assert builtin_model("cp1").n == 2
    assert builtin_model("i2", Fraction(3)).charge == Fraction(1, 3)
    with pytest.raises(UnsupportedModel):
        builtin_model("nope")
