import numpy as np
import pytest

from tubelet.errors import DescriptorMismatch, SingularElement
from tubelet.jordan import (
    AlgebraDescriptor,
    elem_from_json,
    in_positive_cone,
    jordan_det,
    jordan_inverse,
    jordan_product,
    jordan_trace,
    lmul_matrix,
    norm,
    quad_rep,
    spectral_decomp,
    spectral_eigenvalues,
)

ALGEBRAS = [
    AlgebraDescriptor("sym_real", 2),
    AlgebraDescriptor("sym_real", 3),
    AlgebraDescriptor("herm_complex", 2),
    AlgebraDescriptor("spin_factor", 4),
]


def random_celem(d, rng):
    return d.celement(rng.standard_normal(d.dim) + 1j * rng.standard_normal(d.dim))


@pytest.mark.parametrize("desc", ALGEBRAS, ids=str)
def test_dimension_identity(desc):
    r, d = desc.rank, desc.peirce_d
    assert desc.dim == r + d * r * (r - 1) // 2


@pytest.mark.parametrize("desc", ALGEBRAS, ids=str)
def test_unit_element(desc):
    rng = np.random.default_rng(0)
    e = desc.unit()
    x = desc.random_element(rng)
    assert norm(jordan_product(e, x) - x) < 1e-12 * max(1.0, norm(x))
    assert abs(jordan_det(e.complexify()) - 1.0) < 1e-12


def test_sym2_product_matches_matrix_anticommutator():
    d = AlgebraDescriptor("sym_real", 2)
    x = d.element([1.0, 2.0, 0.0])            # diag(1, 2)
    y = d.element([0.0, 0.0, np.sqrt(2.0)])   # offdiag(1)
    xy = jordan_product(x, y)
    # 0.5 (xy + yx) = offdiag(1.5)
    assert np.allclose(d.to_matrix(xy.coeffs.astype(complex)),
                       np.array([[0.0, 1.5], [1.5, 0.0]]))


def test_spin_product_against_spectral_oracle():
    # eigenvalues of x are x0 +- |xv|; the product spectrum of x o x must
    # reproduce their squares
    d = AlgebraDescriptor("spin_factor", 4)
    rng = np.random.default_rng(1)
    for _ in range(20):
        x = d.random_element(rng)
        sq = jordan_product(x, x)
        lam = spectral_eigenvalues(x)
        assert np.allclose(np.sort(lam**2), spectral_eigenvalues(sq), atol=1e-10)


@pytest.mark.parametrize("desc", ALGEBRAS, ids=str)
def test_jordan_identity(desc):
    rng = np.random.default_rng(7)
    for _ in range(100):
        x = random_celem(desc, rng)
        y = random_celem(desc, rng)
        x2 = jordan_product(x, x)
        lhs = jordan_product(x, jordan_product(x2, y))
        rhs = jordan_product(x2, jordan_product(x, y))
        assert norm(lhs - rhs) < 1e-10 * max(1.0, norm(x) ** 3 * norm(y))


@pytest.mark.parametrize("desc", ALGEBRAS, ids=str)
def test_fundamental_identity(desc):
    rng = np.random.default_rng(11)
    for _ in range(25):
        x = random_celem(desc, rng)
        y = random_celem(desc, rng)
        Px = quad_rep(x)
        Py = quad_rep(y)
        Pyx = quad_rep(desc.celement(Py @ x.coeffs))
        scale = max(1.0, np.linalg.norm(Py, 2) ** 2 * np.linalg.norm(Px, 2))
        assert np.linalg.norm(Pyx - Py @ Px @ Py, 2) < 1e-9 * scale


def test_quad_rep_unit_values():
    for desc in ALGEBRAS:
        e = desc.unit().complexify()
        ie = desc.celement(1j * e.coeffs)
        assert np.allclose(quad_rep(e), np.eye(desc.dim))
        assert np.allclose(quad_rep(ie), -np.eye(desc.dim))


def test_quad_rep_is_matrix_sandwich_sym2():
    d = AlgebraDescriptor("sym_real", 2)
    rng = np.random.default_rng(3)
    for _ in range(20):
        x, y = d.random_element(rng), d.random_element(rng)
        lhs = d.to_matrix((quad_rep(y.complexify()) @ x.coeffs).astype(complex))
        ym, xm = d.to_matrix(y.coeffs.astype(complex)), d.to_matrix(x.coeffs.astype(complex))
        assert np.allclose(lhs, ym @ xm @ ym, atol=1e-10)


@pytest.mark.parametrize("desc", ALGEBRAS, ids=str)
def test_det_composition_rule(desc):
    rng = np.random.default_rng(5)
    for _ in range(100):
        x = random_celem(desc, rng)
        y = random_celem(desc, rng)
        lhs = jordan_det(desc.celement(quad_rep(y) @ x.coeffs))
        rhs = jordan_det(y) ** 2 * jordan_det(x)
        assert abs(lhs - rhs) < 1e-9 * max(1.0, abs(rhs))


@pytest.mark.parametrize("desc", ALGEBRAS, ids=str)
def test_det_homogeneity(desc):
    rng = np.random.default_rng(6)
    r = desc.rank
    for lam in (2.0, -0.7, 1.3 + 0.4j):
        z = random_celem(desc, rng)
        assert abs(jordan_det(lam * z) - lam**r * jordan_det(z)) < 1e-9 * abs(lam) ** r * max(
            1.0, abs(jordan_det(z))
        )


def test_spin_det_closed_form():
    d = AlgebraDescriptor("spin_factor", 4)
    rng = np.random.default_rng(8)
    for _ in range(20):
        x = d.random_element(rng)
        ev = spectral_eigenvalues(x)
        assert abs(jordan_det(x.complexify()) - ev[0] * ev[1]) < 1e-10
        assert abs(jordan_trace(x.complexify()) - (ev[0] + ev[1])) < 1e-12


@pytest.mark.parametrize("desc", ALGEBRAS, ids=str)
def test_spectral_reconstruction_and_idempotents(desc):
    rng = np.random.default_rng(9)
    for _ in range(20):
        x = desc.random_element(rng)
        parts = spectral_decomp(x)
        recon = desc.zero()
        total = desc.zero()
        for lam, c in parts:
            recon = recon + lam * c
            total = total + c
            assert norm(jordan_product(c, c) - c) < 1e-9
        assert norm(recon - x) < 1e-10 * max(1.0, norm(x))
        assert norm(total - desc.unit()) < 1e-10
        for i, (_, ci) in enumerate(parts):
            for j, (_, cj) in enumerate(parts):
                if i != j:
                    assert norm(jordan_product(ci, cj)) < 1e-9


def test_spectral_matches_dense_eigensolver_sym3():
    d = AlgebraDescriptor("sym_real", 3)
    rng = np.random.default_rng(10)
    for _ in range(20):
        x = d.random_element(rng)
        mat = d.to_matrix(x.coeffs.astype(complex)).real
        assert np.allclose(spectral_eigenvalues(x), np.linalg.eigvalsh(mat), atol=1e-10)


def test_unit_spectral_decomp_is_trivial():
    for desc in ALGEBRAS:
        parts = spectral_decomp(desc.unit())
        assert len(parts) == 1
        lam, c = parts[0]
        assert abs(lam - 1.0) < 1e-12
        assert norm(c - desc.unit()) < 1e-12


@pytest.mark.parametrize("desc", ALGEBRAS, ids=str)
def test_positive_cone(desc):
    rng = np.random.default_rng(12)
    e = desc.unit()
    assert in_positive_cone(e)
    assert not in_positive_cone(-1.0 * e)
    # cone convexity spot check
    for _ in range(20):
        x = desc.random_cone_element(rng)
        y = desc.random_cone_element(rng)
        assert in_positive_cone(x) and in_positive_cone(y)
        assert in_positive_cone(x + y)


def test_closed_versus_open_cone_boundary():
    d = AlgebraDescriptor("sym_real", 2)
    # rank-one projector: eigenvalues (1, 0)
    x = d.element([1.0, 0.0, 0.0])
    assert in_positive_cone(x, open_cone=False)
    assert not in_positive_cone(x, open_cone=True)


@pytest.mark.parametrize("desc", ALGEBRAS, ids=str)
def test_inverse(desc):
    rng = np.random.default_rng(13)
    e = desc.unit()
    assert norm(jordan_inverse(e) - e) < 1e-12
    ie = desc.celement(1j * e.complexify().coeffs)
    assert norm(jordan_inverse(ie) - desc.celement(-1j * e.coeffs)) < 1e-12
    for _ in range(20):
        z = random_celem(desc, rng)
        zinv = jordan_inverse(z)
        # P(z) z^{-1} = z
        assert norm(desc.celement(quad_rep(z) @ zinv.coeffs) - z) < 1e-8 * max(1.0, norm(z) ** 3)


def test_inverse_matches_matrix_inverse_sym2():
    d = AlgebraDescriptor("sym_real", 2)
    rng = np.random.default_rng(14)
    for _ in range(20):
        x = d.random_element(rng)
        if abs(jordan_det(x.complexify())) < 1e-3:
            continue
        xinv = jordan_inverse(x)
        assert np.allclose(
            d.to_matrix(xinv.coeffs.astype(complex)),
            np.linalg.inv(d.to_matrix(x.coeffs.astype(complex))),
            atol=1e-8,
        )


def test_singular_element_raises():
    d = AlgebraDescriptor("sym_real", 2)
    with pytest.raises(SingularElement):
        jordan_inverse(d.element([1.0, 0.0, 0.0]))


def test_descriptor_mismatch_raises():
    with pytest.raises(DescriptorMismatch):
        jordan_product(
            AlgebraDescriptor("sym_real", 2).unit(),
            AlgebraDescriptor("spin_factor", 4).unit(),
        )


def test_lmul_is_symmetric():
    rng = np.random.default_rng(15)
    for desc in ALGEBRAS:
        z = random_celem(desc, rng)
        L = lmul_matrix(z)
        assert np.allclose(L, L.T, atol=1e-12)


def test_json_roundtrip():
    d = AlgebraDescriptor("herm_complex", 2)
    rng = np.random.default_rng(16)
    z = random_celem(d, rng)
    back = elem_from_json(z.to_json())
    assert back.descriptor == d
    assert np.allclose(back.coeffs, z.coeffs)
