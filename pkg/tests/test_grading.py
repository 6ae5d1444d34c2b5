import numpy as np
import pytest
from scipy.linalg import expm

from tubelet.errors import FactorizationFailed, StripViolation
from tubelet.grading import (
    GradedLieAlgebra,
    WedgeElement,
    central_factorize,
    edge_factorize,
    semigroup_polar_check,
    sl2_central_form,
    strip_map,
)

SL2 = GradedLieAlgebra.build("sl2")
SP4 = GradedLieAlgebra.build("sp4")


@pytest.mark.parametrize("alg", [SL2, SP4], ids=lambda a: a.name)
def test_ad_h_spectrum_and_grading(alg):
    h = alg.euler
    basis = alg.basis()
    # matrix of ad h in the chosen basis is diagonal with entries -1, 0, 1
    for X in basis:
        A = alg.bracket(h, X)
        xm, x0, xp = alg.grade_components(X)
        assert np.allclose(A, xp - xm, atol=1e-12)
        assert np.allclose(X, xm + x0 + xp, atol=1e-12)
    # eigenvalue multiplicities: dim g^{+-1} = k(k+1)/2, dim g^0 = k^2
    k = alg.k
    dims = [0, 0, 0]
    for X in basis:
        xm, x0, xp = alg.grade_components(X)
        norms = [np.linalg.norm(m) for m in (xm, x0, xp)]
        dims[int(np.argmax(norms))] += 1
    assert dims == [k * (k + 1) // 2, k * k, k * (k + 1) // 2]


def test_sl2_euler_is_half_diag():
    assert np.allclose(SL2.euler, 0.5 * np.diag([1.0, -1.0]))
    q_plus = SL2.upper([[1.0]])
    assert np.allclose(SL2.bracket(SL2.euler, q_plus), q_plus)


def test_sp4_upper_block_is_sym2():
    assert SP4.k == 2
    # dim g^1 = dim Sym_2(R) = 3
    dims = sum(
        1 for X in SP4.basis() if np.linalg.norm(SP4.grade_components(X)[2]) > 0.5
    )
    assert dims == 3


@pytest.mark.parametrize("alg", [SL2, SP4], ids=lambda a: a.name)
def test_tau_signs_on_grades(alg):
    rng = np.random.default_rng(40)
    xp = alg.random_cone_plus(rng)
    xm = alg.random_cone_minus(rng)
    g0 = alg.bracket(alg.upper(np.eye(alg.k)), alg.lower(np.eye(alg.k)))
    assert np.allclose(alg.tau(xp), -xp)
    assert np.allclose(alg.tau(xm), -xm)
    assert np.allclose(alg.tau(g0), g0)


@pytest.mark.parametrize("alg", [SL2, SP4], ids=lambda a: a.name)
def test_bracket_grading_rules(alg):
    rng = np.random.default_rng(41)
    for _ in range(10):
        xp = alg.random_cone_plus(rng)
        yp = alg.random_cone_plus(rng)
        xm = alg.random_cone_minus(rng)
        # [g^1, g^1] = 0 and [g^1, g^{-1}] in g^0
        assert np.linalg.norm(alg.bracket(xp, yp)) < 1e-12
        comm = alg.bracket(xp, xm)
        cm, c0, cp = alg.grade_components(comm)
        assert np.linalg.norm(cm) + np.linalg.norm(cp) < 1e-12 * max(1.0, np.linalg.norm(comm))


@pytest.mark.parametrize("alg", [SL2, SP4], ids=lambda a: a.name)
def test_exp_2pi_ad_h_is_identity(alg):
    rng = np.random.default_rng(42)
    X = alg.random_cone_plus(rng) + alg.random_cone_minus(rng)
    g = expm(2j * np.pi * alg.euler)
    assert np.allclose(g @ X.astype(complex) @ np.linalg.inv(g), X, atol=1e-12)


@pytest.mark.parametrize("alg", [SL2, SP4], ids=lambda a: a.name)
def test_cone_is_ad_invariant(alg):
    # oracle: conjugation by random symplectic group elements preserves C
    rng = np.random.default_rng(43)
    for _ in range(20):
        X = alg.random_cone_plus(rng) - alg.tau(alg.random_cone_plus(rng))
        # X = xp + (-tau xp') with xp' in C_+ => element of C
        assert alg.in_cone(X)
        coeffs = 0.3 * rng.standard_normal(len(alg.basis()))
        g = expm(sum(c * B for c, B in zip(coeffs, alg.basis())))
        assert alg.in_cone(g @ X @ np.linalg.inv(g))


def test_euler_not_in_cone():
    for alg in (SL2, SP4):
        assert not alg.in_cone(alg.euler)
        assert not alg.in_cone(-alg.euler)


@pytest.mark.parametrize("alg", [SL2, SP4], ids=lambda a: a.name)
def test_semigroup_polar_roundtrip(alg):
    rng = np.random.default_rng(44)
    for _ in range(10):
        g0 = alg.random_centralizer(rng)
        xp = alg.random_cone_plus(rng)
        xm = alg.random_cone_minus(rng)
        assert semigroup_polar_check(alg, g0, xp, xm)


def test_trivial_polar_form():
    for alg in (SL2, SP4):
        rng = np.random.default_rng(45)
        g0 = alg.random_centralizer(rng)
        z = np.zeros((alg.size, alg.size))
        assert semigroup_polar_check(alg, g0, z, z)


@pytest.mark.parametrize("alg", [SL2, SP4], ids=lambda a: a.name)
def test_product_of_semigroup_elements_refactors(alg):
    rng = np.random.default_rng(46)
    for _ in range(10):
        a = WedgeElement(alg, alg.random_centralizer(rng), alg.random_cone_plus(rng), alg.random_cone_minus(rng))
        b = WedgeElement(alg, alg.random_centralizer(rng), alg.random_cone_plus(rng), alg.random_cone_minus(rng))
        M = a.matrix() @ b.matrix()
        back = edge_factorize(alg, M)
        assert np.linalg.norm(back.matrix() - M) < 1e-8 * max(1.0, np.linalg.norm(M))
        assert alg.in_cone_plus(back.x_plus, tol=1e-8)
        assert alg.in_cone_minus(back.x_minus, tol=1e-8)
        g, yp, ym = central_factorize(alg, M)
        assert np.linalg.norm(g @ expm(yp + ym) - M) < 1e-8 * max(1.0, np.linalg.norm(M))


def test_wrong_cone_direction_fails():
    rng = np.random.default_rng(47)
    for alg in (SL2, SP4):
        g0 = alg.random_centralizer(rng)
        xp = alg.random_cone_plus(rng)
        xm = alg.random_cone_minus(rng)
        assert not semigroup_polar_check(alg, g0, -xp, xm)


def test_sl2_closed_form_matches_matrix_log():
    rng = np.random.default_rng(48)
    for _ in range(20):
        w = WedgeElement(
            SL2, SL2.random_centralizer(rng), SL2.random_cone_plus(rng), SL2.random_cone_minus(rng)
        )
        M = w.matrix()
        g1, yp1, ym1 = sl2_central_form(M)
        g2, yp2, ym2 = central_factorize(SL2, M)
        assert np.linalg.norm(g1 - g2) < 1e-9 * max(1.0, np.linalg.norm(g1))
        assert np.linalg.norm(yp1 - yp2) < 1e-9
        assert np.linalg.norm(ym1 - ym2) < 1e-9


@pytest.mark.parametrize("alg", [SL2, SP4], ids=lambda a: a.name)
def test_strip_map_real_axis_is_conjugation(alg):
    rng = np.random.default_rng(49)
    w = WedgeElement(alg, alg.random_centralizer(rng), alg.random_cone_plus(rng), alg.random_cone_minus(rng))
    for t in (-0.7, 0.0, 1.3):
        beta, cert = strip_map(alg, w, t)
        direct = expm(t * alg.euler) @ w.matrix() @ expm(-t * alg.euler)
        assert np.linalg.norm(beta - direct) < 1e-9 * max(1.0, np.linalg.norm(direct))
        assert cert["imag_matches_sine_formula"]


@pytest.mark.parametrize("alg", [SL2, SP4], ids=lambda a: a.name)
def test_strip_map_interior_certificate(alg):
    rng = np.random.default_rng(50)
    for _ in range(5):
        w = WedgeElement(
            alg, alg.random_centralizer(rng), alg.random_cone_plus(rng), alg.random_cone_minus(rng)
        )
        for z in (0.3 + 0.5j, -0.2 + 1.1j, 0.1 + 2.9j):
            beta, cert = strip_map(alg, w, z)
            assert cert["imag_matches_sine_formula"]
            assert cert["imag_in_cone"]
            assert cert["imag_in_open_cone"]


def test_strip_map_pi_boundary_flips_sign():
    rng = np.random.default_rng(51)
    alg = SL2
    w = WedgeElement(alg, np.eye(2), alg.random_cone_plus(rng), alg.random_cone_minus(rng))
    beta, _ = strip_map(alg, w, 1j * np.pi)
    g, yp, ym = w.central_form()
    assert np.linalg.norm(beta - (g @ expm(-(yp + ym))).astype(complex)) < 1e-9


def test_strip_violation():
    rng = np.random.default_rng(52)
    w = WedgeElement(SL2, np.eye(2), SL2.random_cone_plus(rng), SL2.random_cone_minus(rng))
    with pytest.raises(StripViolation):
        strip_map(SL2, w, 1.0 + 3.5j)
    with pytest.raises(StripViolation):
        strip_map(SL2, w, -0.5j)


def test_factorization_failure_outside_semigroup():
    # pure rotation is elliptic: no hyperbolic polar form
    theta = 0.7
    M = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
    with pytest.raises(FactorizationFailed):
        sl2_central_form(M)
