"""Positive-definiteness laboratory for scalar tube kernels.

The scalar kernel K_s(z, w) = det_J((z - wbar)/2i)^{-s} is positive
definite exactly when s lies in the set

    {0, d/2, ..., (r-1) d/2}  union  ((r-1) d/2, infinity),

a finite arithmetic progression plus a half line.  This module classifies
parameters, assembles Gram matrices, hunts for indefiniteness witnesses at
gap parameters, and verifies the Laplace-transform identity
L(mu_s)(x) = det_J(x)^{-s} for the rank-1 and rank-2 measures.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln, roots_genlaguerre, roots_jacobi

from .errors import DuplicatePointsWarning, GridUnderflow, QuadratureNotConverged
from .jordan import AlgebraDescriptor, CJordanElem, JordanElem, in_positive_cone, jordan_det
from .tube import (
    Trans,
    cayley_to_tube,
    in_ball,
    kernel_log_det,
    random_tube_point,
    TrackedScalar,
)

PSD_TOL = 1e-8          # relative verdict tolerance
WITNESS_TOL = 1e-6      # stricter threshold for gap witnesses


# ---------------------------------------------------------------------------
# parameter classification


def wallach_discrete(desc: AlgebraDescriptor) -> np.ndarray:
    r, d = desc.rank, desc.peirce_d
    return 0.5 * d * np.arange(r)


def wallach_edge(desc: AlgebraDescriptor) -> float:
    return 0.5 * desc.peirce_d * (desc.rank - 1)


@dataclass(frozen=True)
class WallachParams:
    descriptor: AlgebraDescriptor
    s: float

    @property
    def classification(self) -> str:
        edge = wallach_edge(self.descriptor)
        if self.s > edge + 1e-12:
            return "continuous_part"
        if np.min(np.abs(wallach_discrete(self.descriptor) - self.s)) < 1e-12:
            return "discrete_point"
        return "gap"


# ---------------------------------------------------------------------------
# scalar kernel and Gram matrices


def scalar_kernel(z: CJordanElem, w: CJordanElem, s: float) -> TrackedScalar:
    """K_s(z, w) with a continued log; K_s(ie, ie) = 1."""
    base = kernel_log_det(z, w)
    return TrackedScalar.from_log(-s * base.log)


def gram_matrix(points, s: float) -> np.ndarray:
    m = len(points)
    G = np.empty((m, m), dtype=complex)
    for i, z in enumerate(points):
        G[i, i] = scalar_kernel(z, z, s).value
        for j in range(i + 1, m):
            val = scalar_kernel(z, points[j], s).value
            G[i, j] = val
            G[j, i] = np.conj(val)
    return G


@dataclass
class GramReport:
    descriptor: AlgebraDescriptor
    s: float
    classification: str
    eigenvalues: np.ndarray
    min_eig: float
    gram_norm: float
    psd: bool
    tol: float

    def to_json(self):
        return {
            "algebra": self.descriptor.to_json(),
            "s": self.s,
            "classification": self.classification,
            "min_eig": self.min_eig,
            "gram_norm": self.gram_norm,
            "verdict": "PSD" if self.psd else "indefinite",
            "tol": self.tol,
        }


def gram_scan(points, s_values, tol=PSD_TOL):
    """Eigenvalue verdicts of the Gram matrices for each s."""
    if len(points) < 2:
        raise ValueError("need at least two points")
    desc = points[0].descriptor
    for i, z in enumerate(points):
        for w in points[i + 1 :]:
            if np.linalg.norm(z.coeffs - w.coeffs) < 1e-12:
                warnings.warn("duplicate Gram points collapse the rank", DuplicatePointsWarning)
    reports = []
    for s in sorted(s_values):
        G = gram_matrix(points, float(s))
        asym = np.linalg.norm(G - G.conj().T)
        if asym > 1e-10 * max(1.0, np.linalg.norm(G)):
            raise ValueError(f"Gram asymmetry {asym:.2e} exceeds the pre-check bound")
        H = 0.5 * (G + G.conj().T)
        ev = np.linalg.eigvalsh(H)
        nrm = float(np.linalg.norm(H, 2))
        reports.append(
            GramReport(
                descriptor=desc,
                s=float(s),
                classification=WallachParams(desc, float(s)).classification,
                eigenvalues=ev,
                min_eig=float(ev.min()),
                gram_norm=nrm,
                psd=bool(ev.min() >= -tol * max(nrm, 1e-300)),
                tol=tol,
            )
        )
    return reports


def random_point_set(desc: AlgebraDescriptor, rng, n_points: int, spread=1.0):
    return [random_tube_point(desc, rng, spread=spread) for _ in range(n_points)]


# ---------------------------------------------------------------------------
# gap witnesses


def _det_stencil(desc: AlgebraDescriptor):
    """Ball-coordinate stencil exciting the rank-two determinant direction."""
    N = desc.dim
    pts = [np.zeros(N)]
    if desc.family == "spin_factor":
        for k in range(N):
            e = np.zeros(N)
            e[k] = 1.0
            pts += [e, -e]
        return pts
    e1 = np.zeros(N)
    e1[0] = 1.0
    e2 = np.zeros(N)
    e2[1] = 1.0
    pts += [e1, e2, e1 + e2]
    off = np.zeros(N)
    off[desc.n] = 1.0
    pts += [off, -off]
    if desc.family == "herm_complex":
        off2 = np.zeros(N)
        off2[desc.n + 1] = 1.0
        pts += [off2, -off2]
    return pts


def find_gap_witness(desc: AlgebraDescriptor, s: float, seed=0, n_trials=2000,
                     witness_tol=WITNESS_TOL):
    """Search for a point set whose Gram is indefinite at the gap value s.

    Samples jittered, scaled determinant stencils in the bounded picture.
    Returns (tube_points, relative_min_eigenvalue) or None.
    """
    if WallachParams(desc, s).classification != "gap":
        raise ValueError(f"s={s} is not a gap value for {desc}")
    rng = np.random.default_rng(seed)
    base = _det_stencil(desc)
    for _ in range(n_trials):
        eps = np.exp(rng.uniform(np.log(0.05), np.log(0.9)))
        pts = []
        for p in base:
            zb = desc.celement(eps * (p + 0.05 * rng.standard_normal(desc.dim)) + 0j)
            if not in_ball(zb):
                pts = None
                break
            pts.append(cayley_to_tube(zb))
        if pts is None:
            continue
        G = gram_matrix(pts, s)
        H = 0.5 * (G + G.conj().T)
        rel = float(np.linalg.eigvalsh(H).min() / max(np.linalg.norm(H, 2), 1e-300))
        if rel < -witness_tol:
            return pts, rel
    return None


# ---------------------------------------------------------------------------
# Riesz measures and the Laplace identity


def log_gamma_cone(desc: AlgebraDescriptor, s: float) -> float:
    """log of the cone Gamma factor (2 pi)^{(N-r)/2} prod_j Gamma(s - (j-1)d/2)."""
    r, d, N = desc.rank, desc.peirce_d, desc.dim
    out = 0.5 * (N - r) * np.log(2.0 * np.pi)
    for j in range(r):
        out += gammaln(s - 0.5 * j * d)
    return float(out)


@dataclass
class RieszMeasure:
    """mu_s with density det_J(lam)^{s - N/r} / Gamma_cone(s) on the open cone.

    Quadrature is implemented for rank one and for Sym_2(R); the dual cone
    is identified with the cone through the trace form.
    """

    descriptor: AlgebraDescriptor
    s: float
    levels: tuple = (1, 2, 4)

    def __post_init__(self):
        if WallachParams(self.descriptor, self.s).classification != "continuous_part":
            raise ValueError("Riesz density is integrable only in the continuous part")
        if self.descriptor.rank == 1:
            return
        if (self.descriptor.family, self.descriptor.n) != ("sym_real", 2):
            raise NotImplementedError("rank-2 quadrature is implemented for Sym_2(R)")

    def laplace(self, x: JordanElem, level=1) -> float:
        """Quadrature of integral exp(-<lam, x>) d mu_s(lam)."""
        if not in_positive_cone(x):
            raise ValueError("Laplace transform evaluated outside the open cone")
        if self.descriptor.rank == 1:
            return self._laplace_rank1(x, 48 * level)
        return self._laplace_sym2(x, 40 * level, 64 * level)

    def _laplace_rank1(self, x: JordanElem, n: int) -> float:
        # trace pairing <lam, x> = a * lam in the 1-dim coordinate
        a = float(x.coeffs[0])
        t, w = roots_genlaguerre(n, self.s - 1.0)
        return float(np.exp(-gammaln(self.s)) * np.sum(w * np.exp(-(a - 1.0) * t)))

    def _laplace_sym2(self, x: JordanElem, n_xi: int, n_theta: int) -> float:
        s = self.s
        xm = self.descriptor.to_matrix(x.coeffs.astype(complex)).real
        xj, wj = roots_jacobi(n_xi, s - 1.5, 1.0)
        xi = 0.5 * (1.0 + xj)
        wxi = wj * 0.5 ** (s + 0.5)
        thetas = (np.arange(n_theta) + 0.5) * np.pi / n_theta
        total = 0.0
        for th in thetas:
            u = np.array([np.cos(th), np.sin(th)])
            v = np.array([-np.sin(th), np.cos(th)])
            al = float(u @ xm @ u)
            be = float(v @ xm @ v)
            total += float(np.sum(wxi * (al + (1.0 - xi) * be) ** (-2.0 * s)))
        total *= np.pi / n_theta * np.sqrt(2.0)
        return float(total * np.exp(gammaln(2.0 * s) - log_gamma_cone(self.descriptor, s)))


def riesz_laplace_check(measure: RieszMeasure, x: JordanElem, rtol=1e-4):
    """(numeric, exact, relerr); raises QuadratureNotConverged on failure."""
    exact = float(np.real(jordan_det(x.complexify()) ** (-measure.s)))
    prev = None
    for level in measure.levels:
        numeric = measure.laplace(x, level=level)
        relerr = abs(numeric - exact) / abs(exact)
        if relerr < rtol and (prev is None or abs(numeric - prev) < rtol * abs(exact)):
            return numeric, exact, relerr
        prev = numeric
    raise QuadratureNotConverged(
        f"Laplace quadrature stalled at relerr {relerr:.2e} for s={measure.s}"
    )


# ---------------------------------------------------------------------------
# rank-1 L^2 model map into holomorphic functions


@dataclass
class RadialL2Grid:
    """Log grid discretizing L^2((0, inf), mu_s) for a rank-1 algebra."""

    s: float
    n: int = 4096
    lam_min: float = 1e-7
    lam_max: float = 2e3
    nodes: np.ndarray = field(init=False)
    weights: np.ndarray = field(init=False)

    def __post_init__(self):
        u = np.linspace(np.log(self.lam_min), np.log(self.lam_max), self.n)
        du = u[1] - u[0]
        lam = np.exp(u)
        self.nodes = lam
        # d mu_s = lam^{s-1} d lam / Gamma(s); d lam = lam du on the log grid
        self.weights = np.exp(self.s * u - gammaln(self.s)) * du

    def inner(self, f, g) -> complex:
        return complex(np.sum(self.weights * np.conj(f) * g))

    def norm(self, f) -> float:
        return float(np.sqrt(max(self.inner(f, f).real, 0.0)))

    def phi(self, fvals, z: complex) -> complex:
        """(Phi f)(z) = integral e^{i lam z / 2} f(lam) d mu_s(lam)."""
        osc = np.exp(0.5j * self.nodes * z)
        if np.max(np.abs(osc)) < 1e-300:
            raise GridUnderflow("oscillatory factor underflows on the whole grid")
        return complex(np.sum(self.weights * osc * fvals))


def l2_to_hol(fvals, grid: RadialL2Grid, z: complex) -> complex:
    return grid.phi(fvals, z)
