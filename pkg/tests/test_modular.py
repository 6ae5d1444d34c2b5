import numpy as np
import pytest

from tubelet.errors import EmptyRegion, HypothesisViolated, NotStandard
from tubelet.modular import (
    Bump,
    ModularPair,
    RealSubspace,
    RegionSmear,
    box_bumps,
    kms_membership,
    longo_inclusion_test,
    pair_from_generator,
    random_standard_pair,
    standard_subspace_from_pair,
)


def test_real_span_of_all_reals_is_standard():
    m = 4
    gens = list(np.eye(m).astype(complex))
    V = RealSubspace.from_generators(gens)
    rep = V.standardness()
    assert rep == {
        "cyclic": True,
        "separating": True,
        "real_dim": m,
        "ambient_dim": m,
        "span_rank": 2 * m,
    }
    # (R^m)' = R^m under the conjugation pairing
    assert V.symplectic_complement().equals(V)


def test_coordinate_plane_is_not_cyclic():
    gens = [np.array([1.0 + 0j, 0.0]), np.array([1j, 0.0])]
    V = RealSubspace.from_generators(gens)
    rep = V.standardness()
    assert not rep["cyclic"]
    assert not rep["separating"]  # V = i V here


def test_double_complement_random_subspaces():
    rng = np.random.default_rng(70)
    m = 5
    for k in (2, 4, 7):
        gens = [rng.standard_normal(m) + 1j * rng.standard_normal(m) for _ in range(k)]
        V = RealSubspace.from_generators(gens)
        W = V.symplectic_complement()
        assert V.dim + W.dim == 2 * m
        back = W.symplectic_complement()
        assert back.equals(V, tol=1e-9)
        angles = back.angles_to(V)
        assert angles.size == 0 or angles.max() < 1e-9


def test_modular_pair_validation():
    with pytest.raises(NotStandard):
        ModularPair(np.eye(2).astype(complex), np.diag([1.0, -1.0]).astype(complex))
    lam = 2.0
    K = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    D = np.diag([lam, 1.0 / lam]).astype(complex)
    pair = ModularPair(K, D)
    v = np.array([0.3 + 0.1j, -0.2 + 0.5j])
    assert np.allclose(pair.apply_j(pair.apply_j(v)), v)


def test_standard_subspace_explicit_two_dim():
    lam = 2.0
    K = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    pair = ModularPair(K, np.diag([lam, 1.0 / lam]).astype(complex))
    V = standard_subspace_from_pair(pair)
    # V = { (lam^{-1/2} conj(t), t) : t in C }
    for t in (1.0, 1j, 0.7 - 0.3j):
        vec = np.array([lam ** -0.5 * np.conj(t), t])
        r = np.concatenate([vec.real, vec.imag])
        proj = V.basis @ (V.basis.T @ r)
        assert np.linalg.norm(proj - r) < 1e-10


def test_trivial_pair_gives_reals():
    m = 3
    pair = ModularPair(np.eye(m).astype(complex), np.eye(m).astype(complex))
    V = standard_subspace_from_pair(pair)
    R = RealSubspace.from_generators(list(np.eye(m).astype(complex)))
    assert V.equals(R, tol=1e-10)


@pytest.mark.parametrize("m", [2, 3, 5])
def test_random_pairs_consistency(m):
    rng = np.random.default_rng(71)
    for _ in range(17):
        pair = random_standard_pair(m, rng)
        V = standard_subspace_from_pair(pair)
        # double complement
        assert V.symplectic_complement().symplectic_complement().equals(V, tol=1e-9)
        # complement equals the standard subspace of the inverse pair
        Vp = V.symplectic_complement()
        Vp2 = standard_subspace_from_pair(pair.inverse_pair())
        assert Vp.equals(Vp2, tol=1e-8)
        angles = Vp.angles_to(Vp2)
        assert angles.max() < 1e-8
        # modular flow preserves V
        moved = V.apply_unitary(pair.modular_flow(0.8))
        assert moved.equals(V, tol=1e-8)


def test_longo_inclusion_trivial_and_toy_rejection():
    rng = np.random.default_rng(72)
    pair = random_standard_pair(4, rng)
    V = standard_subspace_from_pair(pair)
    assert longo_inclusion_test(V, V, pair.modular_flow)

    # Delta-invariant real line spanned by an eigenvector is not standard
    ev, U = np.linalg.eigh(pair.delta)
    V1 = RealSubspace.from_generators([U[:, 0]])
    with pytest.raises(HypothesisViolated):
        longo_inclusion_test(V1, V, pair.modular_flow)


def test_longo_detects_broken_invariance():
    rng = np.random.default_rng(73)
    pair = random_standard_pair(4, rng)
    V = standard_subspace_from_pair(pair)
    other = random_standard_pair(4, rng)
    W = standard_subspace_from_pair(other)
    if not W.equals(V):
        with pytest.raises(HypothesisViolated):
            longo_inclusion_test(W, W, pair.modular_flow)


def test_pair_from_generator_enforces_modular_relation():
    rng = np.random.default_rng(74)
    m = 5
    K = np.zeros((m, m), dtype=complex)
    K[: m // 2, m // 2 : 2 * (m // 2)] = np.eye(m // 2)
    K[m // 2 : 2 * (m // 2), : m // 2] = np.eye(m // 2)
    K[-1, -1] = 1.0
    deriv = 0.3 * (rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m)))
    pair = pair_from_generator(K, deriv)
    rel = pair.conj_matrix @ np.conj(pair.delta) @ np.conj(pair.conj_matrix)
    assert np.linalg.norm(rel - np.linalg.inv(pair.delta)) < 1e-9 * np.linalg.norm(
        np.linalg.inv(pair.delta)
    )


def test_bump_profile_and_mass():
    b = Bump(0.5, 0.25)
    x, w = b.nodes(96)
    assert abs(np.sum(w * b(x)) - 1.0) < 1e-12
    assert b(0.5 - 0.25) == 0.0 and b(0.76) == 0.0
    h = 1e-6
    mid = 0.55
    fd = (b(mid + h) - b(mid - h)) / (2 * h)
    assert abs(fd - b.deriv(mid)) < 1e-5 * max(1.0, abs(fd))


def test_box_bumps_stay_inside():
    bumps = box_bumps([(0.0, 1.0), (-2.0, -1.0)], n_per_axis=3)
    assert len(bumps) == 9
    region = RegionSmear(boxes=[[(0.0, 1.0), (-2.0, -1.0)]], bumps=bumps)
    assert len(region.bumps) == 9
    with pytest.raises(ValueError):
        RegionSmear(boxes=[[(0.0, 0.5), (-2.0, -1.0)]], bumps=bumps)


class _ToyModel:
    """Diagonal modular toy: H = C^2, Delta = diag(l, 1/l), J = swap-conj."""

    def __init__(self, lam=3.0):
        self.lam = lam
        self.pair = ModularPair(
            np.array([[0, 1], [1, 0]], dtype=complex),
            np.diag([lam, 1.0 / lam]).astype(complex),
        )

    def materialize(self, xi):
        return np.asarray(xi, dtype=complex)

    def modular_orbit(self, xi, z):
        # Delta^{-iz/2pi} on eigenvectors, closed form
        l1, l2 = self.lam, 1.0 / self.lam
        phase = np.array([l1 ** (-1j * z / (2 * np.pi)), l2 ** (-1j * z / (2 * np.pi))])
        return phase * self.materialize(xi)

    def apply_j(self, v):
        return self.pair.apply_j(v)

    def inner(self, u, v):
        return complex(np.vdot(u, v))

    def norm(self, v):
        return float(np.linalg.norm(v))


def test_kms_membership_toy_model():
    model = _ToyModel()
    pair = model.pair
    V = standard_subspace_from_pair(pair)
    # vectors in V satisfy the boundary condition, others fail
    t = 0.4 + 0.2j
    inside = np.array([model.lam ** -0.5 * np.conj(t), t])
    probes = [np.array([1.0 + 0j, 0.0]), np.array([0.0, 1.0 + 0j]), np.array([0.5, -0.3j])]
    rep = kms_membership(model, inside, probes)
    assert rep["passed"], rep
    rep_bad = kms_membership(model, np.array([1.0 + 0j, 0.0]), probes)
    assert not rep_bad["passed"]
    assert rep_bad["residual"] > 0.1


def test_empty_region():
    from tubelet.modular import cyclic_subspace

    class _M:
        def smear(self, combo, eta):
            return np.zeros(2, dtype=complex)

    with pytest.raises(EmptyRegion):
        cyclic_subspace(_M(), [0], RegionSmear(boxes=[], bumps=[]))
