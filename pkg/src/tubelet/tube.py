"""Tube-domain geometry, the operator kernel, and the conformal word engine.

The tube T = E + i E_+ sits inside the complexified Jordan algebra.  The
bounded picture is the spectral unit ball D, reached through the Cayley
transform p(z) = (z - ie)(z + ie)^{-1} with inverse
c(z) = i(e + z)(e - z)^{-1}.

Scalar quantities that live on a covering (powers of the Jordan
determinant, scalar cocycles) are represented as value/log pairs with the
log continued along explicit paths; the base point is ie on the tube and 0
on the ball.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import LeftTube, PathLeftDomain
from .jordan import (
    AlgebraDescriptor,
    CJordanElem,
    JordanElem,
    in_positive_cone,
    jordan_det,
    jordan_inverse,
    norm,
    quad_rep,
)

# ---------------------------------------------------------------------------
# domains


def in_tube(z: CJordanElem, open_cone=True) -> bool:
    return in_positive_cone(z.imag(), open_cone=open_cone)


def assert_tube(z: CJordanElem):
    if not in_tube(z):
        raise LeftTube(f"point with Im-part eigenvalues outside the cone: {z!r}")


def in_ball(z: CJordanElem) -> bool:
    """Spectral-norm ball membership, checked through the Cayley criterion."""
    try:
        return in_tube(cayley_to_tube(z, check=False))
    except Exception:
        return False


def random_tube_point(desc: AlgebraDescriptor, rng, spread=1.0) -> CJordanElem:
    x = desc.random_element(rng, scale=spread)
    y = desc.random_cone_element(rng)
    return CJordanElem(desc, x.coeffs + 1j * y.coeffs)


def unit_tube_base(desc: AlgebraDescriptor) -> CJordanElem:
    """The base point ie."""
    return desc.celement(1j * desc.unit().coeffs)


# ---------------------------------------------------------------------------
# continued logarithms


def continued_log(f, base_log=None, initial_panels=16, _max_depth=48):
    """Continuous log of t -> f(t) along [0, 1], starting from ``base_log``.

    ``f`` must be zero-free on the path; panels are bisected until each
    ratio stays well away from the negative real axis.  The initial mesh
    bounds the resolvable winding (roughly one turn per two panels).
    Returns the log at t = 1.
    """
    v0 = complex(f(0.0))
    if v0 == 0.0:
        raise PathLeftDomain("path starts at a zero")
    log = np.log(v0) if base_log is None else complex(base_log)

    def advance(t0, v0_, t1, log_, depth):
        v1 = complex(f(t1))
        if v1 == 0.0:
            raise PathLeftDomain(f"zero on continuation path at t={t1}")
        ratio = v1 / v0_
        if abs(np.angle(ratio)) <= np.pi / 4 and 0.25 < abs(ratio) < 4.0:
            return log_ + np.log(ratio), v1
        if depth >= _max_depth:
            raise PathLeftDomain("continuation step cannot be refined")
        tm = 0.5 * (t0 + t1)
        logm, vm = advance(t0, v0_, tm, log_, depth + 1)
        return advance(tm, vm, t1, logm, depth + 1)

    val = v0
    grid = np.linspace(0.0, 1.0, initial_panels + 1)
    for t0, t1 in zip(grid[:-1], grid[1:]):
        log, val = advance(t0, val, t1, log, 0)
    return log


def tube_log_det(z: CJordanElem) -> complex:
    """log det_J(z) for z in the tube, continued from the base point ie.

    The base value is r * log(i) = r i pi / 2, itself the continuation of
    log 1 from the unit element along e -> ie.
    """
    d = z.descriptor
    base = unit_tube_base(d)
    r = d.rank

    def f(t):
        return jordan_det(d.celement((1.0 - t) * base.coeffs + t * z.coeffs))

    return continued_log(f, base_log=r * 0.5j * np.pi, initial_panels=8)


def halfspace_log_det(u: CJordanElem) -> complex:
    """log det_J(u) for Re(u) in the open cone, continued from Re(u).

    This is the canonical branch on the right-half-space tube E_+ + iE,
    real on the cone itself.
    """
    d = u.descriptor
    re = u.real()
    if not in_positive_cone(re):
        raise PathLeftDomain("real part not in the open cone")
    base_val = jordan_det(re.complexify())
    base_log = np.log(base_val.real)

    def f(t):
        return jordan_det(d.celement(re.coeffs + 1j * t * u.coeffs.imag))

    # the path lives in the zero-free half-space tube: few panels needed
    return continued_log(f, base_log=base_log, initial_panels=4)


def ball_log_det_e_minus(z: CJordanElem) -> complex:
    """log det_J(e - z) for z in the ball, continued from z = 0."""
    d = z.descriptor
    e = d.unit().coeffs

    def f(t):
        return jordan_det(d.celement(e - t * z.coeffs))

    return continued_log(f, base_log=0.0, initial_panels=8)


@dataclass(frozen=True)
class TrackedScalar:
    """A nonzero complex value together with a continued logarithm."""

    value: complex
    log: complex

    def power(self, alpha) -> complex:
        return complex(np.exp(alpha * self.log))

    def __mul__(self, other: "TrackedScalar") -> "TrackedScalar":
        return TrackedScalar(self.value * other.value, self.log + other.log)

    def inverse(self) -> "TrackedScalar":
        return TrackedScalar(1.0 / self.value, -self.log)

    @staticmethod
    def one() -> "TrackedScalar":
        return TrackedScalar(1.0 + 0.0j, 0.0 + 0.0j)

    @staticmethod
    def from_log(log) -> "TrackedScalar":
        return TrackedScalar(complex(np.exp(log)), complex(log))


def tracked_power(base: TrackedScalar, alpha) -> complex:
    return base.power(alpha)


# ---------------------------------------------------------------------------
# Cayley transform


def cayley_to_ball(z: CJordanElem, check=True) -> CJordanElem:
    """p(z) = (z - ie)(z + ie)^{-1} = e - 2i (z + ie)^{-1}."""
    if check:
        assert_tube(z)
    d = z.descriptor
    zi = d.celement(z.coeffs + 1j * d.unit().coeffs)
    return d.celement(d.unit().coeffs - 2j * jordan_inverse(zi).coeffs)


def cayley_to_tube(z: CJordanElem, check=True) -> CJordanElem:
    """c(z) = i(e + z)(e - z)^{-1} = -ie + 2i (e - z)^{-1}."""
    d = z.descriptor
    ez = d.celement(d.unit().coeffs - z.coeffs)
    w = d.celement(-1j * d.unit().coeffs + 2j * jordan_inverse(ez).coeffs)
    if check:
        assert_tube(w)
    return w


def cayley_differential(z: CJordanElem) -> np.ndarray:
    """dp(z) = 2i P(z + ie)^{-1}."""
    d = z.descriptor
    zi = d.celement(z.coeffs + 1j * d.unit().coeffs)
    return 2j * np.linalg.inv(quad_rep(zi))


def cayley_inv_differential(z: CJordanElem) -> np.ndarray:
    """dc(z) at a ball point, the inverse of dp at c(z)."""
    d = z.descriptor
    w = cayley_to_tube(z, check=False)
    wi = d.celement(w.coeffs + 1j * d.unit().coeffs)
    return -0.5j * quad_rep(wi)


# ---------------------------------------------------------------------------
# universal kernel


def universal_kernel(z: CJordanElem, w: CJordanElem) -> np.ndarray:
    """Q(z, w) = P((z - wbar)/2i), operator valued, sesquiholomorphic."""
    d = z.descriptor
    u = d.celement(-0.5j * (z.coeffs - np.conj(w.coeffs)))
    return quad_rep(u)


def kernel_log_det(z: CJordanElem, w: CJordanElem) -> TrackedScalar:
    """Tracked log det_J((z - wbar)/2i); real on the diagonal z = w = iy."""
    d = z.descriptor
    u = d.celement(-0.5j * (z.coeffs - np.conj(w.coeffs)))
    lg = halfspace_log_det(u)
    return TrackedScalar(complex(np.exp(lg)), lg)


# ---------------------------------------------------------------------------
# conformal words


@dataclass(frozen=True)
class Trans:
    v: JordanElem

    def image(self, z):
        return z.descriptor.celement(z.coeffs + self.v.coeffs)

    def jacobian(self, z):
        return np.eye(z.descriptor.dim, dtype=complex)

    def scalar_log(self, z, s):
        return 0.0j

    def inverse(self):
        return Trans(-1.0 * self.v)


@dataclass(frozen=True)
class StructP:
    """Action of P(a) for an invertible cone element a."""

    a: JordanElem

    def _matrix(self):
        return quad_rep(self.a)

    def image(self, z):
        return z.descriptor.celement(self._matrix() @ z.coeffs)

    def jacobian(self, z):
        return self._matrix()

    def scalar_log(self, z, s):
        if not in_positive_cone(self.a):
            raise PathLeftDomain("scalar cocycle defined for cone elements only")
        det = jordan_det(self.a.complexify()).real
        return -s * np.log(det)

    def inverse(self):
        return StructP(jordan_inverse(self.a))


@dataclass(frozen=True)
class Dilate:
    t: float

    def image(self, z):
        return z.descriptor.celement(np.exp(self.t) * z.coeffs)

    def jacobian(self, z):
        return np.exp(self.t) * np.eye(z.descriptor.dim, dtype=complex)

    def scalar_log(self, z, s):
        d = z.descriptor
        return -0.5 * d.rank * s * self.t + 0.0j

    def inverse(self):
        return Dilate(-self.t)


@dataclass(frozen=True)
class Automorph:
    """A Jordan-algebra automorphism given by its coefficient matrix."""

    matrix: tuple  # nested tuple for hashability

    def _m(self):
        return np.array(self.matrix)

    def image(self, z):
        return z.descriptor.celement(self._m() @ z.coeffs)

    def jacobian(self, z):
        return self._m().astype(complex)

    def scalar_log(self, z, s):
        d = z.descriptor
        det = np.linalg.det(self._m())
        return (-d.rank * s / (2.0 * d.dim)) * np.log(complex(det))

    def inverse(self):
        return Automorph(tuple(map(tuple, np.linalg.inv(self._m()))))


@dataclass(frozen=True)
class Inversion:
    def image(self, z):
        return -1.0 * jordan_inverse(z)

    def jacobian(self, z):
        return np.linalg.inv(quad_rep(z))

    def scalar_log(self, z, s):
        return s * tube_log_det(z)

    def inverse(self):
        return Inversion()


@dataclass
class ConformalWord:
    """Word in tube-preserving generators; leftmost letter acts last."""

    descriptor: AlgebraDescriptor
    letters: list = field(default_factory=list)

    def apply(self, z: CJordanElem, s=None):
        """Evaluate (g.z, J(g, z)) and, if s is given, the weight-s scalar.

        Raises LeftTube when an intermediate image leaves the tube.
        """
        assert_tube(z)
        d = self.descriptor
        cur = z
        J = np.eye(d.dim, dtype=complex)
        slog = 0.0j
        for letter in reversed(self.letters):
            J = letter.jacobian(cur) @ J
            if s is not None:
                slog = slog + letter.scalar_log(cur, s)
            cur = letter.image(cur)
            assert_tube(cur)
        if s is None:
            return cur, J
        return cur, J, TrackedScalar.from_log(slog)

    def inverse(self) -> "ConformalWord":
        return ConformalWord(self.descriptor, [l.inverse() for l in reversed(self.letters)])

    def __mul__(self, other: "ConformalWord") -> "ConformalWord":
        return ConformalWord(self.descriptor, self.letters + other.letters)

    def to_json(self):
        out = []
        for l in self.letters:
            if isinstance(l, Trans):
                out.append({"op": "trans", "v": list(map(float, l.v.coeffs))})
            elif isinstance(l, StructP):
                out.append({"op": "quad", "a": list(map(float, l.a.coeffs))})
            elif isinstance(l, Dilate):
                out.append({"op": "dilate", "t": l.t})
            elif isinstance(l, Automorph):
                out.append({"op": "autom", "m": [list(r) for r in l.matrix]})
            else:
                out.append({"op": "inv"})
        return out

    @staticmethod
    def from_json(desc: AlgebraDescriptor, data) -> "ConformalWord":
        letters = []
        for item in data:
            op = item["op"]
            if op == "trans":
                letters.append(Trans(desc.element(item["v"])))
            elif op == "quad":
                letters.append(StructP(desc.element(item["a"])))
            elif op == "dilate":
                letters.append(Dilate(float(item["t"])))
            elif op == "autom":
                letters.append(Automorph(tuple(map(tuple, item["m"]))))
            elif op == "inv":
                letters.append(Inversion())
            else:
                raise ValueError(f"unknown word letter {op!r}")
        return ConformalWord(desc, letters)


def automorphism_letter(desc: AlgebraDescriptor, rng) -> Automorph:
    """Random inner automorphism: rotation conjugation, or spin rotation."""
    n = desc.n
    if desc.family == "spin_factor":
        q, _ = np.linalg.qr(rng.standard_normal((n - 1, n - 1)))
        if np.linalg.det(q) < 0:
            q[:, 0] = -q[:, 0]
        m = np.eye(n)
        m[1:, 1:] = q
        return Automorph(tuple(map(tuple, m)))
    if desc.family == "sym_real":
        q, _ = np.linalg.qr(rng.standard_normal((n, n)))
        if np.linalg.det(q) < 0:
            q[:, 0] = -q[:, 0]
    else:
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        q, _ = np.linalg.qr(a)
        q = q / np.linalg.det(q) ** (1.0 / n)
    basis = desc.basis_matrices()
    cols = [desc.from_matrix(q @ b @ q.conj().T).real for b in basis]
    return Automorph(tuple(map(tuple, np.array(cols).T)))


def random_word(desc: AlgebraDescriptor, rng, n_letters=3, with_inversion=True) -> ConformalWord:
    letters = []
    kinds = ["trans", "quad", "dilate", "autom"] + (["inv"] if with_inversion else [])
    for _ in range(n_letters):
        kind = kinds[rng.integers(len(kinds))]
        if kind == "trans":
            letters.append(Trans(desc.random_element(rng)))
        elif kind == "quad":
            letters.append(StructP(desc.random_cone_element(rng)))
        elif kind == "dilate":
            letters.append(Dilate(float(rng.uniform(-0.8, 0.8))))
        elif kind == "autom":
            letters.append(automorphism_letter(desc, rng))
        else:
            letters.append(Inversion())
    return ConformalWord(desc, letters)


# ---------------------------------------------------------------------------
# ball picture and the Cayley intertwiner


@dataclass
class BallWord:
    """Cayley conjugate of a tube word, acting on the spectral unit ball."""

    tube_word: ConformalWord

    def apply(self, z: CJordanElem, s=None):
        w = cayley_to_tube(z)
        out = self.tube_word.apply(w, s=s)
        if s is None:
            w2, J = out
        else:
            w2, J, scal = out
        img = cayley_to_ball(w2)
        Jball = cayley_differential(w2) @ J @ cayley_inv_differential(z)
        if s is None:
            return img, Jball
        d = z.descriptor
        e = d.unit().coeffs
        l2 = tube_log_det(d.celement(w2.coeffs + 1j * e))
        l1 = tube_log_det(d.celement(w.coeffs + 1j * e))
        return img, Jball, TrackedScalar.from_log(s * (l2 - l1) + scal.log)

    def inverse(self):
        return BallWord(self.tube_word.inverse())


def gamma_log_factor(z_ball: CJordanElem, s) -> complex:
    """log of the scalar P_rho((c(z)+ie)/2)^{-1} = det_J((c(z)+ie)/2)^s."""
    d = z_ball.descriptor
    r = d.rank
    # (c(z) + ie)/2 = i (e - z)^{-1}
    return s * (r * 0.5j * np.pi - ball_log_det_e_minus(z_ball))


def gamma_apply(F_tube, z_ball: CJordanElem, s) -> complex:
    """Cayley intertwiner on scalar-weight functions:
    (Gamma F)(z) = det_J((c(z)+ie)/2)^s F(c(z)), branch tracked from z = 0.
    """
    return complex(np.exp(gamma_log_factor(z_ball, s))) * complex(F_tube(cayley_to_tube(z_ball)))


def ball_kernel_scalar(z: CJordanElem, w: CJordanElem, s) -> complex:
    """Scalar ball kernel obtained from the tube kernel by conjugation."""
    zt, wt = cayley_to_tube(z), cayley_to_tube(w)
    k = kernel_log_det(zt, wt)
    return complex(
        np.exp(gamma_log_factor(z, s) - s * k.log + np.conj(gamma_log_factor(w, s)))
    )


def scalar_tube_kernel(z: CJordanElem, w: CJordanElem, s) -> complex:
    """det_J((z - wbar)/2i)^{-s} with the canonical (diagonal-real) branch."""
    return kernel_log_det(z, w).power(-s)
