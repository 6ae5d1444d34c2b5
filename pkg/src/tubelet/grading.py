"""Euler gradings, invariant cones, and wedge semigroups for sl2 and sp4.

Both algebras are realized as sp_{2k}(R) = { X : X^T J + J X = 0 } with
J = [[0, I], [-I, 0]] and Euler element h = diag(I, -I)/2.  The grade
spaces are the block strict-upper / diagonal / strict-lower parts, the
involution is conjugation by sigma = diag(I, -I), and the invariant cone
is C = { X in sp : J X negative semidefinite }, oriented so that
C cap g^1 consists of the positive-semidefinite upper blocks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm, logm

from .errors import FactorizationFailed, StripViolation

CONE_TOL = 1e-10


@dataclass(frozen=True)
class GradedLieAlgebra:
    name: str
    k: int  # block size; matrices are 2k x 2k

    @staticmethod
    def build(name: str) -> "GradedLieAlgebra":
        if name == "sl2":
            return GradedLieAlgebra("sl2", 1)
        if name == "sp4":
            return GradedLieAlgebra("sp4", 2)
        raise ValueError(f"unknown algebra {name!r}")

    @property
    def size(self) -> int:
        return 2 * self.k

    @property
    def j_sym(self) -> np.ndarray:
        k = self.k
        out = np.zeros((2 * k, 2 * k))
        out[:k, k:] = np.eye(k)
        out[k:, :k] = -np.eye(k)
        return out

    @property
    def euler(self) -> np.ndarray:
        k = self.k
        return 0.5 * np.diag(np.concatenate([np.ones(k), -np.ones(k)]))

    @property
    def sigma(self) -> np.ndarray:
        k = self.k
        return np.diag(np.concatenate([np.ones(k), -np.ones(k)]))

    # -- algebra structure -------------------------------------------------

    def in_algebra(self, X, tol=1e-10) -> bool:
        J = self.j_sym
        return np.linalg.norm(X.T @ J + J @ X) <= tol * max(1.0, np.linalg.norm(X))

    def tau(self, X) -> np.ndarray:
        s = self.sigma
        return s @ X @ s

    def grade_components(self, X):
        """(X_{-1}, X_0, X_1) from the block structure of ad h."""
        A = self.bracket(self.euler, X)
        A2 = self.bracket(self.euler, A)
        x_plus = 0.5 * (A2 + A)
        x_minus = 0.5 * (A2 - A)
        return x_minus, X - A2, x_plus

    @staticmethod
    def bracket(X, Y) -> np.ndarray:
        return X @ Y - Y @ X

    def basis(self):
        """Basis of the algebra as a list of matrices."""
        k = self.k
        out = []
        # A-block: [[A, 0], [0, -A^T]]
        for i in range(k):
            for j in range(k):
                m = np.zeros((2 * k, 2 * k))
                m[i, j] = 1.0
                m[k + j, k + i] = -1.0
                out.append(m)
        # symmetric upper and lower blocks
        for i in range(k):
            for j in range(i, k):
                m = np.zeros((2 * k, 2 * k))
                m[i, k + j] = 1.0
                m[j, k + i] = 1.0
                out.append(m)
                m = np.zeros((2 * k, 2 * k))
                m[k + i, j] = 1.0
                m[k + j, i] = 1.0
                out.append(m)
        return out

    def upper(self, B) -> np.ndarray:
        """Element of g^1 with symmetric block B."""
        B = np.atleast_2d(np.asarray(B, dtype=float))
        k = self.k
        m = np.zeros((2 * k, 2 * k))
        m[:k, k:] = B
        return m

    def lower(self, Cm) -> np.ndarray:
        Cm = np.atleast_2d(np.asarray(Cm, dtype=float))
        k = self.k
        m = np.zeros((2 * k, 2 * k))
        m[k:, :k] = Cm
        return m

    # -- invariant cone ----------------------------------------------------

    def in_cone(self, X, tol=CONE_TOL, strict=False) -> bool:
        """Membership in C = { X in sp : J X <= 0 }."""
        if not self.in_algebra(X, tol=mixed_tol(X, tol)):
            return False
        ev = np.linalg.eigvalsh(sym_part(self.j_sym @ X))
        bound = mixed_tol(X, tol)
        if strict:
            return bool(np.all(ev < -bound))
        return bool(np.all(ev <= bound))

    def in_cone_plus(self, X, tol=CONE_TOL, strict=False) -> bool:
        """X in C_+ = C cap g^1 (PSD upper block)."""
        xm, x0, xp = self.grade_components(X)
        if np.linalg.norm(xm) + np.linalg.norm(x0) > mixed_tol(X, tol):
            return False
        B = X[: self.k, self.k :]
        ev = np.linalg.eigvalsh(0.5 * (B + B.T))
        bound = mixed_tol(X, tol)
        return bool(np.all(ev > bound)) if strict else bool(np.all(ev >= -bound))

    def in_cone_minus(self, X, tol=CONE_TOL, strict=False) -> bool:
        """X in C_- = -C cap g^{-1} (PSD lower block)."""
        xm, x0, xp = self.grade_components(X)
        if np.linalg.norm(xp) + np.linalg.norm(x0) > mixed_tol(X, tol):
            return False
        B = X[self.k :, : self.k]
        ev = np.linalg.eigvalsh(0.5 * (B + B.T))
        bound = mixed_tol(X, tol)
        return bool(np.all(ev > bound)) if strict else bool(np.all(ev >= -bound))

    def random_cone_plus(self, rng, strict=True, scale=0.7) -> np.ndarray:
        k = self.k
        v = rng.standard_normal((k, k))
        B = (scale / k) * (v @ v.T) + (0.1 if strict else 0.0) * np.eye(k)
        return self.upper(B)

    def random_cone_minus(self, rng, strict=True, scale=0.7) -> np.ndarray:
        k = self.k
        v = rng.standard_normal((k, k))
        B = (scale / k) * (v @ v.T) + (0.1 if strict else 0.0) * np.eye(k)
        return self.lower(B)

    def random_centralizer(self, rng, scale=0.4) -> np.ndarray:
        """Random element of exp(g^0), the identity component of G_V."""
        k = self.k
        A = scale * rng.standard_normal((k, k))
        m = np.zeros((2 * k, 2 * k))
        m[:k, :k] = A
        m[k:, k:] = -A.T
        return expm(m)


def sym_part(M):
    return 0.5 * (M + M.T)


def mixed_tol(X, tol):
    return tol * max(1.0, float(np.linalg.norm(X)))


# ---------------------------------------------------------------------------
# wedge semigroup elements


@dataclass
class WedgeElement:
    """Semigroup element in edge polar form exp(x_plus) g0 exp(x_minus)."""

    algebra: GradedLieAlgebra
    g0: np.ndarray
    x_plus: np.ndarray
    x_minus: np.ndarray

    def matrix(self) -> np.ndarray:
        return expm(self.x_plus) @ self.g0 @ expm(self.x_minus)

    def central_form(self):
        """(g, y_plus, y_minus) with matrix() = g expm(y_plus + y_minus)."""
        return central_factorize(self.algebra, self.matrix())


def central_factorize(alg: GradedLieAlgebra, M: np.ndarray):
    """Factor M = g exp(Y), g in exp(g^0), Y in g^1 + g^{-1}.

    Uses tau_G(M)^{-1} M = exp(2Y); fails when the principal matrix log
    does not exist or the residuals do not vanish.
    """
    s = alg.sigma
    try:
        W = s @ np.linalg.inv(M) @ s @ M
    except np.linalg.LinAlgError as exc:
        raise FactorizationFailed("singular semigroup matrix") from exc
    ev = np.linalg.eigvals(W)
    if np.any((ev.real <= 0) & (np.abs(ev.imag) < 1e-12)):
        raise FactorizationFailed("polar log hits the negative real axis")
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)  # logm accuracy note
        Y = 0.5 * logm(W)
    if np.linalg.norm(Y.imag) > 1e-8 * max(1.0, np.linalg.norm(Y)):
        raise FactorizationFailed("complex logarithm in polar factorization")
    Y = Y.real
    ym, y0, yp = alg.grade_components(Y)
    if np.linalg.norm(y0) > 1e-8 * max(1.0, np.linalg.norm(Y)):
        raise FactorizationFailed("polar exponent has a grade-0 component")
    g = M @ expm(-Y)
    if np.linalg.norm(alg.tau(g) - g) > 1e-8 * max(1.0, np.linalg.norm(g)):
        raise FactorizationFailed("group part not tau-fixed")
    return g, yp, ym


def sl2_central_form(M: np.ndarray):
    """Closed-form central factorization for SL(2, R).

    M = diag(c, 1/c) expm([[0, u], [v, 0]]) in the hyperbolic regime
    m12 m21 >= 0, m22 > 0.
    """
    m11, m12 = M[0]
    m21, m22 = M[1]
    prod = m12 * m21
    if m22 <= 0 or m11 * m22 <= 0:
        raise FactorizationFailed("outside the factorizable region")
    if prod < -1e-14:
        raise FactorizationFailed("elliptic exponent (m12 m21 < 0)")
    c = np.sqrt(m11 / m22)
    theta = np.arcsinh(np.sqrt(max(prod, 0.0)))
    if theta < 1e-12:
        # nilpotent limit: exp Y = I + Y
        u = m12 / c
        v = m21 * c
    else:
        sh, ch = np.sinh(theta), np.cosh(theta)
        u = m12 * theta / (c * sh)
        v = m21 * c * theta / sh
        if abs(ch - np.sqrt(m11 * m22)) > 1e-8 * max(1.0, ch):
            raise FactorizationFailed("inconsistent hyperbolic data")
    g = np.diag([c, 1.0 / c])
    alg = GradedLieAlgebra.build("sl2")
    return g, alg.upper([[u]]), alg.lower([[v]])


def edge_factorize(alg: GradedLieAlgebra, M: np.ndarray):
    """Factor M = exp(x_plus) g0 exp(x_minus) by block Gauss elimination."""
    k = alg.k
    M11, M12 = M[:k, :k], M[:k, k:]
    M21, M22 = M[k:, :k], M[k:, k:]
    if abs(np.linalg.det(M22)) < 1e-12 * max(1.0, np.linalg.norm(M) ** k):
        raise FactorizationFailed("lower-right block singular")
    A = np.linalg.inv(M22).T
    if np.linalg.det(A) <= 0:
        raise FactorizationFailed("group part outside the identity component")
    B = M12 @ np.linalg.inv(M22)
    Cm = np.linalg.inv(M22) @ M21
    for blk in (B, Cm):
        if np.linalg.norm(blk - blk.T) > 1e-8 * max(1.0, np.linalg.norm(blk)):
            raise FactorizationFailed("non-symmetric nilpotent block")
    g0 = np.zeros_like(M)
    g0[:k, :k] = A
    g0[k:, k:] = np.linalg.inv(A).T
    resid = np.linalg.norm(expm(alg.upper(B)) @ g0 @ expm(alg.lower(Cm)) - M)
    if resid > 1e-8 * max(1.0, np.linalg.norm(M)):
        raise FactorizationFailed(f"edge refactorization residual {resid:.2e}")
    return WedgeElement(alg, g0, alg.upper(B), alg.lower(Cm))


def semigroup_polar_check(alg: GradedLieAlgebra, g0, x_plus, x_minus, tol=1e-8) -> bool:
    """Edge and central polar forms agree and respect the cones."""
    if not alg.in_cone_plus(x_plus, tol=tol):
        return False
    if not alg.in_cone_minus(x_minus, tol=tol):
        return False
    w = WedgeElement(alg, np.asarray(g0, dtype=float), x_plus, x_minus)
    M = w.matrix()
    try:
        g, yp, ym = central_factorize(alg, M)
        if alg.name == "sl2":
            g2, yp2, ym2 = sl2_central_form(M)
            if (
                np.linalg.norm(g - g2) + np.linalg.norm(yp - yp2) + np.linalg.norm(ym - ym2)
                > tol * max(1.0, np.linalg.norm(M))
            ):
                return False
        back = edge_factorize(alg, M)
    except FactorizationFailed:
        return False
    if not alg.in_cone_plus(yp, tol=tol) or not alg.in_cone_minus(ym, tol=tol):
        return False
    if not alg.in_cone_plus(back.x_plus, tol=tol) or not alg.in_cone_minus(back.x_minus, tol=tol):
        return False
    resid = np.linalg.norm(g @ expm(yp + ym) - M)
    return resid <= tol * max(1.0, np.linalg.norm(M))


# ---------------------------------------------------------------------------
# strip map


def strip_map(alg: GradedLieAlgebra, elem: WedgeElement, z: complex):
    """beta^s(z) = g exp(e^z y_+ + e^{-z} y_-) on the closed strip.

    Returns (matrix, certificate) where the certificate reports cone
    membership of the imaginary part of the exponent.
    """
    b = float(np.imag(z))
    if b < -1e-12 or b > np.pi + 1e-12:
        raise StripViolation(f"Im z = {b} outside [0, pi]")
    g, yp, ym = elem.central_form()
    arg = np.exp(z) * yp + np.exp(-z) * ym
    beta = g.astype(complex) @ expm(arg)
    a = float(np.real(z))
    im_expected = np.sin(b) * (np.exp(a) * yp - np.exp(-a) * ym)
    im_actual = arg.imag
    cert = {
        "imag_matches_sine_formula": bool(
            np.linalg.norm(im_actual - im_expected) <= 1e-10 * max(1.0, np.linalg.norm(arg))
        ),
        "imag_in_cone": alg.in_cone(im_actual) if b > 1e-12 else True,
        "imag_in_open_cone": alg.in_cone(im_actual, strict=True) if 1e-6 < b < np.pi - 1e-6 else False,
    }
    return beta, cert
