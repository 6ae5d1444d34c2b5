"""Finite-dimensional modular theory of standard subspaces.

Complex vectors v in C^m are identified with real vectors [Re v; Im v] in
R^{2m}; multiplication by i is the orthogonal matrix Omega = [[0,-I],[I,0]]
and Im<u, v> = -u^T Omega v for the first-antilinear inner product.
Closures of real spans become column-reduced spans with a singular-value
threshold; density statements become rank statements at fixed truncation.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm, subspace_angles

from .errors import EmptyRegion, HypothesisViolated, NotStandard

RANK_TOL = 1e-10        # singular-value threshold for span closures
STRUCT_TOL = 1e-8       # structural identity tolerance


def _omega(m):
    out = np.zeros((2 * m, 2 * m))
    out[:m, m:] = -np.eye(m)
    out[m:, :m] = np.eye(m)
    return out


def to_real(columns) -> np.ndarray:
    """Stack complex column vectors (m x k) into real 2m x k form."""
    V = np.asarray(columns, dtype=complex)
    if V.ndim == 1:
        V = V.reshape(-1, 1)
    return np.vstack([V.real, V.imag])


def to_complex(R: np.ndarray) -> np.ndarray:
    m = R.shape[0] // 2
    return R[:m] + 1j * R[m:]


def real_unitary(U: np.ndarray) -> np.ndarray:
    """Real 2m x 2m form of a complex-linear map."""
    A, B = U.real, U.imag
    return np.block([[A, -B], [B, A]])


@dataclass
class RealSubspace:
    """Closed real subspace of C^m with an orthonormal real basis."""

    m: int
    basis: np.ndarray  # 2m x k, orthonormal columns

    @staticmethod
    def from_generators(generators, rank_tol=RANK_TOL) -> "RealSubspace":
        gens = [np.asarray(g, dtype=complex).ravel() for g in generators]
        if not gens:
            raise EmptyRegion("no generators given")
        m = gens[0].size
        R = to_real(np.column_stack(gens))
        u, sv, _ = np.linalg.svd(R, full_matrices=False)
        keep = sv > rank_tol * max(sv[0], 1e-300) if sv.size else []
        return RealSubspace(m, u[:, keep])

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def complex_span_rank(self) -> int:
        both = np.hstack([self.basis, _omega(self.m) @ self.basis])
        sv = np.linalg.svd(both, compute_uv=False)
        return int(np.sum(sv > RANK_TOL * max(sv[0] if sv.size else 0.0, 1e-300))) // 2

    def symplectic_complement(self) -> "RealSubspace":
        """V' = { x : Im<x, V> = 0 }, the Euclidean complement of Omega V."""
        m = self.m
        OB = _omega(m) @ self.basis
        u, sv, _ = np.linalg.svd(OB, full_matrices=True)
        k = int(np.sum(sv > RANK_TOL * max(sv[0] if sv.size else 0.0, 1e-300)))
        return RealSubspace(m, u[:, k:])

    def apply_unitary(self, U: np.ndarray) -> "RealSubspace":
        B = real_unitary(U) @ self.basis
        q, _ = np.linalg.qr(B)
        return RealSubspace(self.m, q)

    def angles_to(self, other: "RealSubspace") -> np.ndarray:
        if self.dim == 0 or other.dim == 0:
            return np.array([])
        return subspace_angles(self.basis, other.basis)

    def contained_in(self, other: "RealSubspace", tol=STRUCT_TOL) -> bool:
        if self.dim == 0:
            return True
        if self.dim > other.dim:
            return False
        proj = other.basis @ (other.basis.T @ self.basis)
        return float(np.linalg.norm(proj - self.basis, 2)) <= tol

    def equals(self, other: "RealSubspace", tol=STRUCT_TOL) -> bool:
        return self.dim == other.dim and self.contained_in(other, tol) and other.contained_in(self, tol)

    def project(self, v) -> np.ndarray:
        """Orthogonal projection of a complex vector onto the real span."""
        r = to_real(v)[:, 0]
        return to_complex((self.basis @ (self.basis.T @ r)).reshape(-1, 1))[:, 0]

    def standardness(self) -> dict:
        m = self.m
        both = np.hstack([self.basis, _omega(m) @ self.basis])
        sv = np.linalg.svd(both, compute_uv=False)
        rank = int(np.sum(sv > STRUCT_TOL * max(sv[0] if sv.size else 0.0, 1e-300)))
        cyclic = rank == 2 * m
        separating = rank == 2 * self.dim
        return {
            "cyclic": bool(cyclic),
            "separating": bool(separating),
            "real_dim": self.dim,
            "ambient_dim": m,
            "span_rank": rank,
        }


# ---------------------------------------------------------------------------
# modular pairs


@dataclass
class ModularPair:
    """Conjugation J v = K conj(v) and positive operator Delta on C^m.

    ``log_eigs``/``log_vecs``, when supplied, are the spectral data of the
    generator H with Delta = exp(-2 pi H); they keep the dynamic range
    under control for pairs built from compressed flows.
    """

    conj_matrix: np.ndarray  # K
    delta: np.ndarray = None
    validate_tol: float = 1e-10
    log_eigs: np.ndarray = None
    log_vecs: np.ndarray = None

    def __post_init__(self):
        K = self.conj_matrix
        m = K.shape[0]
        if self.delta is None:
            d = np.exp(-2.0 * np.pi * self.log_eigs)
            self.delta = (self.log_vecs * d) @ self.log_vecs.conj().T
        D = self.delta
        if not np.isfinite(self.validate_tol):
            return
        if np.linalg.norm(K @ np.conj(K) - np.eye(m)) > self.validate_tol * m:
            raise NotStandard("J is not an involution")
        if np.linalg.norm(D - D.conj().T) > self.validate_tol * max(1.0, np.linalg.norm(D)):
            raise NotStandard("Delta is not hermitian")
        ev = np.linalg.eigvalsh(D)
        if ev.min() <= 0:
            raise NotStandard("Delta is not positive definite")
        rel = K @ np.conj(D) @ np.conj(K) - np.linalg.inv(D)
        if np.linalg.norm(rel) > self.validate_tol * max(1.0, np.linalg.norm(np.linalg.inv(D))):
            raise NotStandard("J Delta J != Delta^{-1}")

    @property
    def m(self) -> int:
        return self.conj_matrix.shape[0]

    def spectral(self):
        """(h, U) with Delta = U diag(e^{-2 pi h}) U^dagger."""
        if self.log_eigs is not None:
            return self.log_eigs, self.log_vecs
        ev, U = np.linalg.eigh(self.delta)
        return -np.log(ev) / (2.0 * np.pi), U

    def apply_j(self, v) -> np.ndarray:
        return self.conj_matrix @ np.conj(np.asarray(v, dtype=complex))

    def delta_power(self, z) -> np.ndarray:
        h, U = self.spectral()
        return (U * np.exp(-2.0 * np.pi * z * h)) @ U.conj().T

    def modular_flow(self, t) -> np.ndarray:
        """Delta^{-it/2pi}."""
        h, U = self.spectral()
        return (U * np.exp(1j * t * h)) @ U.conj().T

    def inverse_pair(self) -> "ModularPair":
        h, U = self.spectral()
        return ModularPair(
            self.conj_matrix, validate_tol=self.validate_tol, log_eigs=-h, log_vecs=U
        )


def standard_subspace_from_pair(pair: ModularPair, rank_tol=STRUCT_TOL) -> RealSubspace:
    """V = Fix(J Delta^{1/2}); raises NotStandard on rank defects.

    The fixed-point equation is solved in the Delta eigenbasis after the
    balancing substitution c = D^{-1/4} b, which turns the antilinear
    involution into an isometric one regardless of the spectral spread.
    """
    m = pair.m
    h, U = pair.spectral()
    Kp = U.conj().T @ pair.conj_matrix @ np.conj(U)
    tol = 1e-6 * (1.0 + float(np.abs(h).max()))

    # group indices into blocks {h = +a} u {h = -a}; J acts within blocks
    order = np.argsort(np.abs(h))
    unused = list(order)
    blocks = []
    while unused:
        i = unused.pop(0)
        blk = [i] + [j for j in unused if abs(abs(h[j]) - abs(h[i])) < tol]
        for j in blk[1:]:
            unused.remove(j)
        blocks.append(sorted(blk))

    gens = []
    for blk in blocks:
        idx = np.array(blk)
        hb = h[idx]
        d4 = np.exp(-0.5 * np.pi * hb)
        Kb = Kp[np.ix_(idx, idx)]
        # entries off the h <-> -h pairing support are amplified rounding
        Kb = np.where(np.abs(hb[:, None] + hb[None, :]) < tol, Kb, 0.0)
        N = (d4[:, None] * Kb) * d4[None, :]
        nb = len(blk)
        if np.linalg.norm(N @ np.conj(N) - np.eye(nb)) > 1e-6 * nb:
            raise NotStandard("balanced involution fails to square to one")
        A, B = N.real, N.imag
        R = np.block([[A, B], [B, -A]])
        P = 0.5 * (np.eye(2 * nb) + 0.5 * (R + R.T))
        u, sv, _ = np.linalg.svd(P)
        k = int(np.sum(sv > 0.5))
        if k != nb:
            raise NotStandard(f"block fixed-point dimension {k}, expected {nb}")
        scale = np.exp(0.5 * np.pi * hb)
        for j in range(k):
            b = scale * (u[:nb, j] + 1j * u[nb:, j])
            vec = np.zeros(m, dtype=complex)
            vec[idx] = b / np.linalg.norm(b)
            gens.append(U @ vec)
    V = RealSubspace.from_generators(gens)
    rep = V.standardness()
    if not (rep["cyclic"] and rep["separating"] and rep["real_dim"] == m):
        raise NotStandard(f"fixed-point space fails rank checks: {rep}")
    return V


def random_standard_pair(m: int, rng, spread=1.0) -> ModularPair:
    """Random (Delta, J) pair with J Delta J = Delta^{-1}."""
    k = m // 2
    d = np.exp(spread * rng.standard_normal(k))
    if m % 2:
        diag = np.concatenate([d, 1.0 / d, [1.0]])
    else:
        diag = np.concatenate([d, 1.0 / d])
    D = np.diag(diag).astype(complex)
    K = np.zeros((m, m))
    K[:k, k : 2 * k] = np.eye(k)
    K[k : 2 * k, :k] = np.eye(k)
    if m % 2:
        K[-1, -1] = 1.0
    A = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    W, _ = np.linalg.qr(A)
    return ModularPair(W @ K @ W.T, W @ D @ W.conj().T)


def involution_correct(K0: np.ndarray) -> np.ndarray:
    """Nearest exact conjugation matrix: K = T^{-1/2} K0 with T = K0 conj(K0).

    K0 must be symmetric (as produced by compressing an antiunitary
    involution to an almost-invariant subspace); then T is hermitian
    positive and the result satisfies K conj(K) = 1 exactly.
    """
    T = K0 @ np.conj(K0)
    ev, U = np.linalg.eigh(0.5 * (T + T.conj().T))
    if ev.min() <= 0:
        raise NotStandard("compressed conjugation is too far from an involution")
    Tm = (U * ev**-0.5) @ U.conj().T
    return Tm @ K0


def pair_from_generator(K: np.ndarray, deriv: np.ndarray, validate_tol=None,
                        spectral_clip=None) -> ModularPair:
    """Modular pair from the derivative of a one-parameter flow.

    ``deriv`` approximates d/dt U(t) at t = 0 for the flow implementing
    Delta^{-it/2pi}.  The hermitian part is extracted and the modular
    anticommutation J H J = -H is enforced before exponentiating, so the
    pair relation holds up to rounding; the projection residual is up to
    the caller to monitor.  ``spectral_clip`` truncates compression
    artifacts in the generator spectrum.
    """
    H = deriv / 1j
    H = 0.5 * (H + H.conj().T)
    H = 0.5 * (H - K @ np.conj(H) @ np.conj(K))
    ev, U = np.linalg.eigh(H)
    if spectral_clip is not None:
        ev = np.clip(ev, -spectral_clip, spectral_clip)
        # re-enforce the anticommutation after clipping
        Hc = (U * ev) @ U.conj().T
        Hc = 0.5 * (Hc - K @ np.conj(Hc) @ np.conj(K))
        ev, U = np.linalg.eigh(Hc)
    return ModularPair(K, validate_tol=np.inf, log_eigs=ev, log_vecs=U)


# ---------------------------------------------------------------------------
# inclusion and KMS tests


def longo_inclusion_test(V1: RealSubspace, V2: RealSubspace, flow, t_samples=(0.3, -0.7, 1.1),
                         tol=STRUCT_TOL, equality_tol=None) -> bool:
    """Inclusion V1 <= V2 plus flow-invariance forces V1 = V2.

    ``flow`` maps t to the unitary implementing the modular group of V2.
    HypothesisViolated is raised when the preconditions fail; the return
    value reports the equality check.
    """
    if not V1.contained_in(V2, tol):
        raise HypothesisViolated("V1 is not contained in V2")
    for V, lbl in ((V1, "V1"), (V2, "V2")):
        rep = V.standardness()
        if not (rep["cyclic"] and rep["separating"]):
            raise HypothesisViolated(f"{lbl} is not standard: {rep}")
    for t in t_samples:
        moved = V1.apply_unitary(flow(t))
        if not moved.equals(V1, tol):
            raise HypothesisViolated(f"flow at t={t} does not preserve V1")
    return V1.equals(V2, equality_tol if equality_tol is not None else tol)


def kms_membership(model, xi, probes, tol=1e-6) -> dict:
    """Boundary test alpha^xi(i pi) = J xi against a probe family.

    The model must provide ``modular_orbit(xi, z)``, ``apply_j(v)`` and
    ``materialize(xi)`` (see the group models); probes are ambient vectors
    paired through the model inner product.
    """
    boundary = model.modular_orbit(xi, 1j * np.pi)
    jvec = model.apply_j(model.materialize(xi))
    nx = model.norm(jvec)
    worst = 0.0
    for chi in probes:
        gap = model.inner(chi, boundary - jvec)
        worst = max(worst, abs(gap) / (model.norm(chi) * max(nx, 1e-300)))
    return {"residual": worst, "passed": bool(worst < tol), "tol": tol}


# ---------------------------------------------------------------------------
# smearing regions


_BUMP_NORM = None
_BUMP_POLYS = {}


def _bump_norm() -> float:
    global _BUMP_NORM
    if _BUMP_NORM is None:
        x, w = np.polynomial.legendre.leggauss(128)
        _BUMP_NORM = float(np.sum(w * np.exp(-1.0 / (1.0 - x**2))))
    return _BUMP_NORM


def _bump_deriv_poly(k):
    """P_k with psi^(k) = psi P_k (1-u^2)^{-2k}, psi = exp(-1/(1-u^2))."""
    from numpy.polynomial import Polynomial

    if k not in _BUMP_POLYS:
        if k == 0:
            _BUMP_POLYS[0] = Polynomial([1.0])
        else:
            P = _bump_deriv_poly(k - 1)
            u = Polynomial([0.0, 1.0])
            w = Polynomial([1.0, 0.0, -1.0])  # 1 - u^2
            _BUMP_POLYS[k] = w**2 * P.deriv() + (4 * (k - 1) * u * w - 2 * u) * P
    return _BUMP_POLYS[k]


@dataclass(frozen=True)
class Bump:
    """Standard smooth bump on (center - width, center + width), unit mass."""

    center: float
    width: float

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        u = (x - self.center) / self.width
        out = np.zeros_like(u)
        inside = np.abs(u) < 1.0
        ui = u[inside]
        out[inside] = np.exp(-1.0 / (1.0 - ui**2))
        return out / (self.width * _bump_norm())

    def deriv(self, x):
        x = np.asarray(x, dtype=float)
        u = (x - self.center) / self.width
        out = np.zeros_like(u)
        inside = np.abs(u) < 1.0
        ui = u[inside]
        out[inside] = np.exp(-1.0 / (1.0 - ui**2)) * (-2.0 * ui / (1.0 - ui**2) ** 2)
        return out / (self.width**2 * _bump_norm())

    def deriv2(self, x):
        return self.nth_deriv(x, 2)

    def nth_deriv(self, x, k):
        """k-th derivative from the rational recursion
        psi^(k)(u) = psi(u) P_k(u) / (1-u^2)^{2k}."""
        x = np.asarray(x, dtype=float)
        u = (x - self.center) / self.width
        out = np.zeros_like(u)
        inside = np.abs(u) < 1.0
        ui = u[inside]
        P = _bump_deriv_poly(k)
        out[inside] = np.exp(-1.0 / (1.0 - ui**2)) * P(ui) / (1.0 - ui**2) ** (2 * k)
        return out / (self.width ** (k + 1) * _bump_norm())

    def nodes(self, n=64):
        x, w = np.polynomial.legendre.leggauss(n)
        return self.center + self.width * x, self.width * w

    @property
    def support(self):
        return (self.center - self.width, self.center + self.width)


def box_bumps(box, n_per_axis=2, shrink=0.45):
    """Tensor bumps on a coordinate box, supports strictly inside."""
    axes = []
    for lo, hi in box:
        span = hi - lo
        width = shrink * span / n_per_axis
        centers = lo + span * (np.arange(n_per_axis) + 0.5) / n_per_axis
        axes.append([Bump(c, width) for c in centers])
    out = [[]]
    for axis in axes:
        out = [combo + [b] for combo in out for b in axis]
    return [tuple(combo) for combo in out]


@dataclass
class RegionSmear:
    """A finite union of coordinate boxes with a bump family inside it."""

    boxes: list
    bumps: list = field(default_factory=list)

    def __post_init__(self):
        if not self.bumps:
            self.bumps = [b for box in self.boxes for b in box_bumps(box)]
        for combo in self.bumps:
            if not any(self._inside(combo, box) for box in self.boxes):
                raise ValueError("bump support leaves the region")

    @staticmethod
    def _inside(combo, box) -> bool:
        for bump, (lo, hi) in zip(combo, box):
            a, b = bump.support
            if a < lo - 1e-12 or b > hi + 1e-12:
                return False
        return True


def cyclic_subspace(model, handles, region: RegionSmear, rank_tol=RANK_TOL) -> RealSubspace:
    """Column-reduced real span of all smears of the handles over the region."""
    if not region.bumps:
        raise EmptyRegion("region carries no bumps")
    gens = [model.smear(combo, eta) for combo in region.bumps for eta in handles]
    return RealSubspace.from_generators(gens, rank_tol=rank_tol)
