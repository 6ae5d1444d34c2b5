"""Simple euclidean Jordan algebras and their complexifications.

Three families are supported, identified by a string tag:

* ``sym_real``     -- real symmetric matrices Sym_n(R), rank n
* ``herm_complex`` -- complex hermitian matrices Herm_n(C), rank n
* ``spin_factor``  -- R x R^{n-1} with product
  (x0, xv) o (y0, yv) = (x0 y0 + <xv, yv>, x0 yv + y0 xv), rank 2

Elements are stored as coefficient vectors in a fixed basis that is
orthonormal for the matrix trace form (matrix families) or the plain dot
product (spin factor).  Complexified elements carry complex coefficients;
the conjugation z -> zbar is componentwise on coefficients, which for
``herm_complex`` corresponds to the matrix adjoint.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DescriptorMismatch, SingularElement

FAMILIES = ("sym_real", "herm_complex", "spin_factor")

# relative threshold for eigenvalue clustering / cone membership
SPECTRAL_TOL = 1e-12


@dataclass(frozen=True)
class AlgebraDescriptor:
    """A simple euclidean Jordan algebra from one of the shipped families."""

    family: str
    n: int

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.family == "spin_factor":
            if self.n < 2:
                raise ValueError("spin factor needs n >= 2")
        elif self.n < 1:
            raise ValueError("matrix families need n >= 1")
        # dimension identity N = r + d r(r-1)/2 must hold for the
        # hard-coded Peirce multiplicities
        r, d, N = self.rank, self.peirce_d, self.dim
        if 2 * N != 2 * r + d * r * (r - 1):
            raise ValueError("inconsistent (rank, peirce, dim) data")

    @property
    def dim(self) -> int:
        if self.family == "sym_real":
            return self.n * (self.n + 1) // 2
        if self.family == "herm_complex":
            return self.n * self.n
        return self.n

    @property
    def rank(self) -> int:
        if self.family == "spin_factor":
            return 2
        return self.n

    @property
    def peirce_d(self) -> int:
        if self.family == "sym_real":
            return 1
        if self.family == "herm_complex":
            return 2
        return self.n - 2

    # -- canonical basis (matrix families) --------------------------------

    def basis_matrices(self) -> np.ndarray:
        """Orthonormal hermitian basis, shape (dim, n, n)."""
        if self.family == "spin_factor":
            raise ValueError("spin factor has no matrix basis")
        n = self.n
        mats = []
        for i in range(n):
            m = np.zeros((n, n), dtype=complex)
            m[i, i] = 1.0
            mats.append(m)
        isq = 1.0 / np.sqrt(2.0)
        for i in range(n):
            for j in range(i + 1, n):
                m = np.zeros((n, n), dtype=complex)
                m[i, j] = isq
                m[j, i] = isq
                mats.append(m)
                if self.family == "herm_complex":
                    m = np.zeros((n, n), dtype=complex)
                    m[i, j] = -1j * isq
                    m[j, i] = 1j * isq
                    mats.append(m)
        return np.array(mats)

    def to_matrix(self, coeffs: np.ndarray) -> np.ndarray:
        return np.tensordot(coeffs, self.basis_matrices(), axes=(0, 0))

    def from_matrix(self, mat: np.ndarray) -> np.ndarray:
        """Coefficients of a matrix in the canonical basis (complex linear)."""
        basis = self.basis_matrices()
        # tr(B_k Z) for an orthonormal hermitian basis
        return np.einsum("kij,ji->k", basis, mat)

    # -- elements ----------------------------------------------------------

    def unit(self) -> "JordanElem":
        c = np.zeros(self.dim)
        if self.family == "spin_factor":
            c[0] = 1.0
        else:
            c[: self.n] = 1.0
        return JordanElem(self, c)

    def zero(self) -> "JordanElem":
        return JordanElem(self, np.zeros(self.dim))

    def element(self, coeffs) -> "JordanElem":
        return JordanElem(self, np.asarray(coeffs, dtype=float))

    def celement(self, coeffs) -> "CJordanElem":
        return CJordanElem(self, np.asarray(coeffs, dtype=complex))

    def random_element(self, rng, scale=1.0) -> "JordanElem":
        return JordanElem(self, scale * rng.standard_normal(self.dim))

    def random_cone_element(self, rng, spread=0.5) -> "JordanElem":
        """Random element of the open cone: unit plus a small perturbation."""
        x = self.random_element(rng, scale=spread)
        sq = jordan_product(x, x)
        return self.unit() + (1.0 / max(1.0, 2.0 * norm(sq))) * sq

    def trace_inner(self, x: "JordanElem", y: "JordanElem") -> float:
        """Trace-form pairing tr L(x o y); identifies E* with E."""
        w = 2.0 if self.family == "spin_factor" else 1.0
        return w * float(np.dot(x.coeffs, y.coeffs))

    def to_json(self) -> dict:
        return {"family": self.family, "n": self.n}

    @staticmethod
    def from_json(data: dict) -> "AlgebraDescriptor":
        return AlgebraDescriptor(data["family"], int(data["n"]))


class _ElemBase:
    __slots__ = ("descriptor", "coeffs")

    def __init__(self, descriptor, coeffs):
        self.descriptor = descriptor
        coeffs = np.asarray(coeffs)
        if coeffs.shape != (descriptor.dim,):
            raise ValueError("coefficient vector has wrong length")
        self.coeffs = coeffs

    def __add__(self, other):
        _check_same(self, other)
        return _wrap(self.descriptor, self.coeffs + other.coeffs)

    def __sub__(self, other):
        _check_same(self, other)
        return _wrap(self.descriptor, self.coeffs - other.coeffs)

    def __neg__(self):
        return _wrap(self.descriptor, -self.coeffs)

    def __rmul__(self, scalar):
        return _wrap(self.descriptor, scalar * self.coeffs)

    def __repr__(self):
        d = self.descriptor
        return f"<{type(self).__name__} {d.family}({d.n}) {self.coeffs!r}>"

    def to_json(self) -> dict:
        data = self.descriptor.to_json()
        c = np.asarray(self.coeffs, dtype=complex)
        data["coeffs"] = [[float(v.real), float(v.imag)] for v in c]
        return data


class JordanElem(_ElemBase):
    """Real element, coefficients in the canonical basis."""

    def __init__(self, descriptor, coeffs):
        super().__init__(descriptor, np.asarray(coeffs, dtype=float))

    def complexify(self) -> "CJordanElem":
        return CJordanElem(self.descriptor, self.coeffs.astype(complex))


class CJordanElem(_ElemBase):
    """Element of the complexified algebra E_C."""

    def __init__(self, descriptor, coeffs):
        super().__init__(descriptor, np.asarray(coeffs, dtype=complex))

    def conj(self) -> "CJordanElem":
        return CJordanElem(self.descriptor, np.conj(self.coeffs))

    def real(self) -> JordanElem:
        return JordanElem(self.descriptor, self.coeffs.real.copy())

    def imag(self) -> JordanElem:
        return JordanElem(self.descriptor, self.coeffs.imag.copy())


def _wrap(descriptor, coeffs):
    if np.iscomplexobj(coeffs):
        return CJordanElem(descriptor, coeffs)
    return JordanElem(descriptor, coeffs)


def _check_same(x, y):
    if x.descriptor != y.descriptor:
        raise DescriptorMismatch(f"{x.descriptor} vs {y.descriptor}")


def elem_from_json(data: dict):
    desc = AlgebraDescriptor.from_json(data)
    c = np.array([complex(re, im) for re, im in data["coeffs"]])
    if np.max(np.abs(c.imag)) == 0.0:
        return JordanElem(desc, c.real)
    return CJordanElem(desc, c)


def norm(x) -> float:
    """Coefficient 2-norm."""
    return float(np.linalg.norm(x.coeffs))


# ---------------------------------------------------------------------------
# arithmetic


def jordan_product(x, y):
    """Commutative bilinear product x o y."""
    _check_same(x, y)
    d = x.descriptor
    if d.family == "spin_factor":
        a, b = x.coeffs, y.coeffs
        out = np.empty(d.dim, dtype=np.result_type(a, b))
        out[0] = a[0] * b[0] + np.dot(a[1:], b[1:])
        out[1:] = a[0] * b[1:] + b[0] * a[1:]
        return _wrap(d, out)
    zx, zy = d.to_matrix(x.coeffs), d.to_matrix(y.coeffs)
    out = d.from_matrix(0.5 * (zx @ zy + zy @ zx))
    if not (np.iscomplexobj(x.coeffs) or np.iscomplexobj(y.coeffs)):
        out = out.real
    return _wrap(d, out)


def lmul_matrix(z) -> np.ndarray:
    """Matrix of L(z): w -> z o w in canonical coordinates."""
    d = z.descriptor
    c = np.asarray(z.coeffs, dtype=complex)
    if d.family == "spin_factor":
        L = np.zeros((d.dim, d.dim), dtype=complex)
        L[0, 0] = c[0]
        L[0, 1:] = c[1:]
        L[1:, 0] = c[1:]
        L[1:, 1:] = c[0] * np.eye(d.dim - 1)
        return L
    basis = d.basis_matrices()
    zm = d.to_matrix(c)
    prod = 0.5 * (np.einsum("ij,kjl->kil", zm, basis)
                  + np.einsum("kij,jl->kil", basis, zm))
    # entry [m, k] = m-th coefficient of z o B_k
    return np.einsum("mij,kji->mk", basis, prod)


def quad_rep(z) -> np.ndarray:
    """Quadratic representation P(z) = 2 L(z)^2 - L(z^2) as an N x N matrix."""
    L = lmul_matrix(z)
    z2 = jordan_product(z, z)
    return 2.0 * (L @ L) - lmul_matrix(z2)


def jordan_det(z) -> complex:
    """Jordan determinant, a degree-rank polynomial with det(e) = 1."""
    d = z.descriptor
    c = np.asarray(z.coeffs, dtype=complex)
    if d.family == "spin_factor":
        return complex(c[0] ** 2 - np.dot(c[1:], c[1:]))
    return complex(np.linalg.det(d.to_matrix(c)))


def jordan_trace(z) -> complex:
    """Sum of the spectral eigenvalues (matrix trace for matrix families)."""
    d = z.descriptor
    c = np.asarray(z.coeffs, dtype=complex)
    if d.family == "spin_factor":
        return complex(2.0 * c[0])
    return complex(np.sum(c[: d.n]))


def jordan_inverse(z):
    """Jordan inverse; raises SingularElement near the zero set of det."""
    d = z.descriptor
    r = d.rank
    scale = max(norm(z), 1e-300)
    if abs(jordan_det(z)) < 1e-12 * scale**r:
        raise SingularElement("element too close to the determinant zero set")
    c = np.asarray(z.coeffs, dtype=complex)
    if d.family == "spin_factor":
        out = np.concatenate(([c[0]], -c[1:])) / jordan_det(z)
        return _wrap(d, out if np.iscomplexobj(z.coeffs) else out.real)
    inv = np.linalg.inv(d.to_matrix(c))
    out = d.from_matrix(inv)
    return _wrap(d, out if np.iscomplexobj(z.coeffs) else out.real)


# ---------------------------------------------------------------------------
# spectral theory (real elements)


def spectral_decomp(x: JordanElem, cluster_tol=SPECTRAL_TOL):
    """Decompose x = sum_i lam_i c_i with orthogonal idempotents c_i.

    Eigenvalues closer than ``cluster_tol * max(1, |x|)`` are grouped and a
    single summed idempotent is returned for the cluster.
    """
    d = x.descriptor
    gap = cluster_tol * max(1.0, norm(x))
    if d.family == "spin_factor":
        x0, xv = x.coeffs[0], x.coeffs[1:]
        nv = float(np.linalg.norm(xv))
        if nv <= gap:
            return [(float(x0), d.unit())]
        u = xv / nv
        cplus = d.element(np.concatenate(([0.5], 0.5 * u)))
        cminus = d.element(np.concatenate(([0.5], -0.5 * u)))
        return [(float(x0 + nv), cplus), (float(x0 - nv), cminus)]

    mat = d.to_matrix(x.coeffs.astype(complex))
    evals, vecs = np.linalg.eigh(mat)
    pairs = []
    i = 0
    while i < len(evals):
        j = i
        while j + 1 < len(evals) and evals[j + 1] - evals[j] <= gap:
            j += 1
        proj = sum(np.outer(vecs[:, k], vecs[:, k].conj()) for k in range(i, j + 1))
        lam = float(np.mean(evals[i : j + 1]))
        pairs.append((lam, JordanElem(d, d.from_matrix(proj).real)))
        i = j + 1
    return pairs


def spectral_eigenvalues(x: JordanElem) -> np.ndarray:
    """All spectral eigenvalues with multiplicity (ascending)."""
    d = x.descriptor
    if d.family == "spin_factor":
        x0, xv = x.coeffs[0], x.coeffs[1:]
        nv = float(np.linalg.norm(xv))
        return np.array([x0 - nv, x0 + nv])
    mat = d.to_matrix(x.coeffs.astype(complex))
    return np.linalg.eigvalsh(mat)


def spectral_norm(x: JordanElem) -> float:
    return float(np.max(np.abs(spectral_eigenvalues(x))))


def in_positive_cone(x: JordanElem, open_cone=True, tol=SPECTRAL_TOL) -> bool:
    """Membership in the cone of squares (open) or its closure."""
    eps = tol * max(1.0, norm(x))
    ev = spectral_eigenvalues(x)
    if open_cone:
        return bool(np.all(ev > eps))
    return bool(np.all(ev > -eps))
