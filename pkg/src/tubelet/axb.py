"""Discretized irreducible positive-energy model of the affine group.

The Hilbert space is L^2((0, inf), dp/p) on a log grid; the group acts by

    (U(b, e^t) f)(p) = e^{i b p} f(e^t p),        U(0, -1) f = conj(f),

with left Haar measure e^{-t} db dt in (b, t) coordinates and modular
function 1/a.  Power handles p^s (Re s > 0) are never materialized; only
their smears are, and those have the closed form c * phi_hat(p) p^s which
the model tracks symbolically so that modular orbits and flow derivatives
stay exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import ContinuationUnavailable, GridCoverage, SupportOverflow
from .modular import Bump, RealSubspace, pair_from_generator

# default truncation window, log-uniform
GRID_SIZE = 512
P_MIN = 1e-4
P_MAX = 1e4


@dataclass(frozen=True)
class AffElement:
    """(b, a): x -> a x + b with a > 0."""

    b: float
    a: float

    def __post_init__(self):
        if self.a <= 0:
            raise ValueError("dilation part must be positive; use J for the flip")

    def __mul__(self, other: "AffElement") -> "AffElement":
        return AffElement(self.b + self.a * other.b, self.a * other.a)

    def inverse(self) -> "AffElement":
        return AffElement(-self.b / self.a, 1.0 / self.a)

    @property
    def t(self) -> float:
        return float(np.log(self.a))

    def modular_function(self) -> float:
        """Delta_G(b, a) = 1/a for left Haar db da / a^2."""
        return 1.0 / self.a


def haar_weight(t):
    """Density of left Haar measure in (b, t) coordinates."""
    return np.exp(-np.asarray(t, dtype=float))


@dataclass(frozen=True)
class DistVecHandle:
    """Power-function distribution vector p^s with a phase convention.

    variant: 'plain' eta_s | 'phased' e^{-i pi s / 2} eta_s (real s)
             | 'paired' eta_s + e^{-i pi conj(s)} eta_{conj(s)}
    """

    s: complex
    variant: str = "plain"

    def __post_init__(self):
        if self.s.real <= 0:
            raise ValueError("need Re s > 0")
        if not 0 < self.s.real <= 4:
            raise ValueError("Re s outside the supported window (0, 4]")
        if self.variant not in ("plain", "phased", "paired"):
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.variant == "paired" and abs(complex(self.s).imag) < 1e-14:
            raise ValueError("paired variant is for non-real s")

    def terms(self):
        """[(coefficient, exponent)] describing the handle."""
        s = complex(self.s)
        if self.variant == "plain":
            return [(1.0 + 0.0j, s)]
        if self.variant == "phased":
            return [(complex(np.exp(-0.5j * np.pi * s)), s)]
        sbar = np.conj(s)
        return [(1.0 + 0.0j, s), (complex(np.exp(-1j * np.pi * sbar)), sbar)]


class _XDeriv:
    """Profile x -> x f'(x), used by the exact dilation derivative."""

    def __init__(self, base):
        self.base = base

    def __call__(self, x):
        return np.asarray(x) * self.base.deriv(x)

    def deriv(self, x):
        x = np.asarray(x)
        return self.base.deriv(x) + x * self.base.deriv2(x)

    def deriv2(self, x, _h=None):
        # finite-difference fallback for nested derivative profiles
        h = _h if _h is not None else 1e-6 * max(1.0, self.width)
        return (self.deriv(np.asarray(x) + h) - self.deriv(np.asarray(x) - h)) / (2.0 * h)

    def nodes(self, n=64):
        return self.base.nodes(n)

    @property
    def width(self):
        return self.base.width


# a scaled bump transform decays superexponentially; beyond this phase
# budget the value is below roundoff and the oscillatory quadrature is cut
TRANSFORM_PHASE_MAX = 400.0


def _profile_halfwidth(profile) -> float:
    w = getattr(profile, "width", None)
    if w is not None:
        return float(w)
    x, _ = profile.nodes(8)
    return 0.5 * float(x.max() - x.min())


def profile_transform(profile, zeta):
    """phi_hat(zeta) = integral e^{i zeta x} phi(x) dx, entire in zeta.

    The Gauss node count follows the oscillation budget |Re zeta| * width;
    past TRANSFORM_PHASE_MAX the result is treated as zero.
    """
    zeta = np.asarray(zeta, dtype=complex)
    scalar = zeta.ndim == 0
    zeta = np.atleast_1d(zeta)
    hw = _profile_halfwidth(profile)
    phase = np.abs(zeta.real) * hw
    live = phase <= TRANSFORM_PHASE_MAX
    out = np.zeros(zeta.shape, dtype=complex)
    if np.any(live):
        budget = float(phase[live].max())
        n = int(min(1024, max(96, 1.6 * budget + 48)))
        x, w = profile.nodes(n)
        vals = w * profile(x)
        out[live] = np.exp(1j * np.multiply.outer(zeta[live], x)) @ vals
    return out[0] if scalar else out


@dataclass
class SmearedVector:
    """Finite sum sum_k c_k phi_hat_k(p) p^{s_k} tracked symbolically."""

    model: "GridModel"
    terms: list  # (coeff, profile, s)

    def vector(self) -> np.ndarray:
        p = self.model.p
        out = np.zeros(p.size, dtype=complex)
        for c, prof, s in self.terms:
            out += c * profile_transform(prof, p) * np.exp(s * self.model.u)
        return out

    def orbit(self, z: complex) -> np.ndarray:
        """Continuation of Delta^{-iz/2pi}-flow: U(0, e^z) applied formally."""
        p = self.model.p
        out = np.zeros(p.size, dtype=complex)
        ez = np.exp(z)
        for c, prof, s in self.terms:
            out += c * np.exp(s * z) * profile_transform(prof, ez * p) * np.exp(s * self.model.u)
        return out

    def conjugated(self) -> "SmearedVector":
        """Exact image under J (componentwise conjugation on the grid)."""
        new = []
        for c, prof, s in self.terms:
            new.append((np.conj(c), _reflect_profile(prof), np.conj(s)))
        return SmearedVector(self.model, new)

    def dilation_derivative(self) -> "SmearedVector":
        """d/dt U(0, e^t) at t = 0, exact within the smear family."""
        new = []
        for c, prof, s in self.terms:
            new.append((c * (s - 1.0), prof, s))
            new.append((-c, _XDeriv(prof), s))
        return SmearedVector(self.model, new)

    def scaled(self, factor) -> "SmearedVector":
        return SmearedVector(self.model, [(factor * c, prof, s) for c, prof, s in self.terms])

    def __add__(self, other: "SmearedVector") -> "SmearedVector":
        return SmearedVector(self.model, self.terms + other.terms)


class _Reflected:
    def __init__(self, base):
        self.base = base

    def __call__(self, x):
        return self.base(-np.asarray(x))

    def deriv(self, x):
        return -self.base.deriv(-np.asarray(x))

    def deriv2(self, x):
        return self.base.deriv2(-np.asarray(x))

    def nodes(self, n=64):
        x, w = self.base.nodes(n)
        return -x[::-1], w[::-1]

    @property
    def width(self):
        return self.base.width


def _reflect_profile(prof):
    if isinstance(prof, Bump):
        return Bump(-prof.center, prof.width)
    return _Reflected(prof)


class GridModel:
    """Log-grid quadrature model of L^2((0, inf), dp/p)."""

    def __init__(self, n=GRID_SIZE, p_min=P_MIN, p_max=P_MAX):
        self.u = np.linspace(np.log(p_min), np.log(p_max), n)
        self.du = float(self.u[1] - self.u[0])
        self.p = np.exp(self.u)
        self.n = n
        # trapezoid in log p: integrates constants against dp/p exactly
        self.weights = np.full(n, self.du)
        self.weights[0] = self.weights[-1] = 0.5 * self.du

    # -- inner product ------------------------------------------------------

    def inner(self, f, g) -> complex:
        return complex(np.sum(self.weights * np.conj(f) * g))

    def embed(self, f) -> np.ndarray:
        """Scale by sqrt(weights): plain dot products equal model inner ones."""
        return np.sqrt(self.weights) * np.asarray(f, dtype=complex)

    def norm(self, f) -> float:
        return float(np.sqrt(max(self.inner(f, f).real, 0.0)))

    # -- representation -----------------------------------------------------

    def rep_apply(self, g: AffElement, f, leak_tol=1e-10) -> np.ndarray:
        """(U(b, a) f)(p) = e^{i b p} f(a p); exact index shift when log a
        is a grid-step multiple, monotone-cubic resample otherwise."""
        f = np.asarray(f, dtype=complex)
        t = g.t
        steps = t / self.du
        if abs(t) < 1e-15:
            shifted = f
        else:
            self._coverage_check(f, g.a, leak_tol)
            if abs(steps - round(steps)) < 1e-9:
                k = int(round(steps))
                shifted = np.zeros_like(f)
                if k >= 0:
                    shifted[: self.n - k] = f[k:]
                else:
                    shifted[-k:] = f[: self.n + k]
            else:
                re = PchipInterpolator(self.u, f.real, extrapolate=False)
                im = PchipInterpolator(self.u, f.imag, extrapolate=False)
                uq = self.u + t
                shifted = np.where(
                    (uq >= self.u[0]) & (uq <= self.u[-1]),
                    np.nan_to_num(re(uq)) + 1j * np.nan_to_num(im(uq)),
                    0.0,
                )
        return np.exp(1j * g.b * self.p) * shifted

    def _coverage_check(self, f, a, leak_tol):
        total = float(np.sum(self.weights * np.abs(f) ** 2))
        if total == 0.0:
            return
        needed_lo, needed_hi = self.u[0] + np.log(a), self.u[-1] + np.log(a)
        lost = (self.u < needed_lo) | (self.u > needed_hi)
        leak = float(np.sum(self.weights[lost] * np.abs(f[lost]) ** 2))
        if leak > leak_tol * total:
            raise GridCoverage(
                f"dilation by a={a:.4g} drops relative mass {leak / total:.2e}"
            )

    def apply_j(self, f) -> np.ndarray:
        return np.conj(np.asarray(f, dtype=complex))

    # -- smears -------------------------------------------------------------

    def smear_translation(self, phi: Bump, handle: DistVecHandle) -> SmearedVector:
        """U(phi) applied to the handle, phi a real bump on the b-axis."""
        return SmearedVector(self, [(c, phi, s) for c, s in handle.terms()])

    def smear_group(self, combo, handle: DistVecHandle) -> SmearedVector:
        """Tensor bump phi_b x phi_t over (b, t); the t-leg integrates out
        against the eigenvalue weight e^{t s} and the Haar density."""
        if len(combo) == 1:
            return self.smear_translation(combo[0], handle)
        phi_b, phi_t = combo
        terms = []
        for c, s in handle.terms():
            tt, wt = phi_t.nodes(96)
            ct = complex(np.sum(wt * phi_t(tt) * np.exp((s - 1.0) * tt)))
            terms.append((c * ct, phi_b, s))
        return SmearedVector(self, terms)

    def smear(self, combo, handle: DistVecHandle) -> np.ndarray:
        return self.smear_group(combo, handle).vector()

    # -- KMS interface (modular.kms_membership) ------------------------------

    def materialize(self, xi) -> np.ndarray:
        if isinstance(xi, SmearedVector):
            return xi.vector()
        if isinstance(xi, DistVecHandle):
            raise ContinuationUnavailable("raw power handles are not square-integrable")
        return np.asarray(xi, dtype=complex)

    def modular_orbit(self, xi, z: complex) -> np.ndarray:
        if not isinstance(xi, SmearedVector):
            raise ContinuationUnavailable("closed-form orbit needs a tracked smear")
        return xi.orbit(z)


# ---------------------------------------------------------------------------
# group test functions and the convolution algebra


@dataclass
class GroupFunc:
    """Real or complex function on the group, carried on a (b, t) box."""

    fn: object          # callable (b, t) -> values
    box: tuple          # ((b_lo, b_hi), (t_lo, t_hi))
    n_nodes: int = 24

    def __call__(self, b, t):
        return self.fn(b, t)

    def nodes(self):
        (blo, bhi), (tlo, thi) = self.box
        xb, wb = np.polynomial.legendre.leggauss(self.n_nodes)
        xt, wt = np.polynomial.legendre.leggauss(self.n_nodes)
        b = 0.5 * (blo + bhi) + 0.5 * (bhi - blo) * xb
        t = 0.5 * (tlo + thi) + 0.5 * (thi - tlo) * xt
        return b, 0.5 * (bhi - blo) * wb, t, 0.5 * (thi - tlo) * wt


def tensor_group_func(phi_b: Bump, phi_t: Bump, n_nodes=24) -> GroupFunc:
    return GroupFunc(
        fn=lambda b, t: phi_b(b) * phi_t(t),
        box=(phi_b.support, phi_t.support),
        n_nodes=n_nodes,
    )


def group_apply(model: GridModel, phi: GroupFunc, f) -> np.ndarray:
    """U(phi) f = integral phi(g) U(g) f dmu_G(g) by tensor quadrature."""
    b, wb, t, wt = phi.nodes()
    out = np.zeros(model.n, dtype=complex)
    for tj, wtj in zip(t, wt):
        base = model.rep_apply(AffElement(0.0, float(np.exp(tj))), f, leak_tol=np.inf)
        vals = phi(b[:, None], tj) * (wb * haar_weight(tj) * wtj)[:, None]
        phases = np.exp(1j * np.outer(b, model.p))
        out += (vals * phases).sum(axis=0) * base
    return out


def star(phi: GroupFunc) -> GroupFunc:
    """phi^*(g) = conj(phi(g^{-1})) Delta_G(g)^{-1}; real phi assumed real."""
    (blo, bhi), (tlo, thi) = phi.box
    # g^{-1} = (-b e^{-t}, -t); support bounds from the corners
    corners = [-b * np.exp(-tau) for b in (blo, bhi) for tau in (-thi, -tlo)]
    new_box = ((min(corners), max(corners)), (-thi, -tlo))

    def fn(b, t):
        return np.conj(phi(-np.asarray(b) * np.exp(-np.asarray(t)), -np.asarray(t))) * np.exp(t)

    return GroupFunc(fn, new_box, phi.n_nodes)


def check_inv(phi: GroupFunc) -> GroupFunc:
    """phi^vee(g) = phi(g^{-1}) Delta_G(g)^{-1}."""
    st = star(phi)
    return GroupFunc(lambda b, t: np.conj(st(b, t)), st.box, phi.n_nodes)


def left_translate(g: AffElement, phi: GroupFunc) -> GroupFunc:
    """(lambda_g phi)(x) = phi(g^{-1} x)."""
    (blo, bhi), (tlo, thi) = phi.box
    new_box = ((g.b + g.a * blo, g.b + g.a * bhi), (tlo + g.t, thi + g.t))

    def fn(b, t):
        gin = g.inverse()
        return phi(gin.b + gin.a * np.asarray(b), np.asarray(t) - g.t)

    return GroupFunc(fn, new_box, phi.n_nodes)


def right_translate(g: AffElement, phi: GroupFunc) -> GroupFunc:
    """(rho_g phi)(x) = phi(x g) Delta_G(g)."""
    (blo, bhi), (tlo, thi) = phi.box
    # x g = (b + e^t g.b, t + g.t): support shifts non-uniformly in b
    cand = [blo - np.exp(tau) * g.b for tau in (tlo, thi)] + [
        bhi - np.exp(tau) * g.b for tau in (tlo, thi)
    ]
    new_box = ((min(cand), max(cand)), (tlo - g.t, thi - g.t))

    def fn(b, t):
        return phi(np.asarray(b) + np.exp(np.asarray(t)) * g.b, np.asarray(t) + g.t) * g.modular_function()

    return GroupFunc(fn, new_box, phi.n_nodes)


def convolve(phi: GroupFunc, psi: GroupFunc, window=((-60.0, 60.0), (-20.0, 20.0))) -> GroupFunc:
    """(phi * psi)(x) = integral phi(g) psi(g^{-1} x) dmu_G(g), tabulated."""
    (pb, pt), (qb, qt) = phi.box, psi.box
    # support of the product: b in b1 + e^{t1} b2, t in t1 + t2
    bcand = [b1 + np.exp(t1) * b2 for b1 in pb for t1 in pt for b2 in qb]
    new_box = ((min(bcand), max(bcand)), (pt[0] + qt[0], pt[1] + qt[1]))
    if (
        new_box[0][0] < window[0][0]
        or new_box[0][1] > window[0][1]
        or new_box[1][0] < window[1][0]
        or new_box[1][1] > window[1][1]
    ):
        raise SupportOverflow(f"convolution support {new_box} exits the window")
    b, wb, t, wt = phi.nodes()
    BB, TT = np.meshgrid(b, t, indexing="ij")
    W = np.outer(wb, wt) * phi(BB, TT) * haar_weight(TT)

    def fn(bq, tq):
        bq = np.asarray(bq, dtype=float)
        tq = np.asarray(tq, dtype=float)
        out = np.zeros(np.broadcast(bq, tq).shape, dtype=float)
        flat_b = BB.ravel()
        flat_t = TT.ravel()
        flat_w = W.ravel()
        for bi, ti, wi in zip(flat_b, flat_t, flat_w):
            if wi == 0.0:
                continue
            out = out + wi * psi((bq - bi) * np.exp(-ti), tq - ti)
        return out

    return GroupFunc(fn, new_box, phi.n_nodes)


# ---------------------------------------------------------------------------
# the power distribution D_s


def distribution_pairing(model: GridModel, phi: Bump, psi: Bump, s: complex):
    """<U(phi) eta_s, U(psi) eta_s> by two routes.

    Route 1 is the grid inner product of the smears; route 2 integrates
    p^{2 Re s} conj(phi_hat) psi_hat dp/p adaptively.  Returns
    (grid_value, integral_value).
    """
    from scipy.integrate import quad

    h = DistVecHandle(s, "plain")
    f1 = model.smear_translation(phi, h).vector()
    f2 = model.smear_translation(psi, h).vector()
    grid_val = model.inner(f1, f2)

    sig = 2.0 * complex(s).real

    def integrand(p, part):
        val = p ** (sig - 1.0) * np.conj(profile_transform(phi, p)) * profile_transform(psi, p)
        return val.real if part == 0 else val.imag

    re, _ = quad(lambda p: integrand(p, 0), 0.0, np.inf, limit=400)
    im, _ = quad(lambda p: integrand(p, 1), 0.0, np.inf, limit=400)
    return grid_val, complex(re, im)


def support_criterion_residual(model: GridModel, phi: Bump, psi: Bump, s: float,
                               route="quad") -> float:
    """Phase-corrected duality residual |Im e^{i pi s} <U(phi) eta, U(psi') eta>|.

    phi is supported in b > 0 and psi' = reflected psi in b < 0; the value
    vanishes when wedge duality holds for the phased generators.  The
    default route evaluates the pairing by adaptive quadrature (the grid
    route is limited by the log-grid resolution of fast phases).
    """
    from scipy.integrate import quad

    h = DistVecHandle(s, "plain")
    a = model.smear_translation(phi, h).vector()
    b = model.smear_translation(_reflect_profile(psi), h).vector()
    na, nb = model.norm(a), model.norm(b)
    if route == "grid":
        val = np.exp(1j * np.pi * s) * model.inner(a, b)
        return abs(val.imag) / (na * nb)

    cut = TRANSFORM_PHASE_MAX / min(phi.width, psi.width)

    def integrand(p, part):
        v = (
            p ** (2.0 * s - 1.0)
            * np.conj(profile_transform(phi, p))
            * np.conj(profile_transform(psi, p))
        )
        v = np.exp(1j * np.pi * s) * v
        return v.real if part == 0 else v.imag

    im, _ = quad(lambda p: integrand(p, 1), 0.0, cut, limit=600)
    return abs(im) / (na * nb)


# ---------------------------------------------------------------------------
# the net and its modular comparison


def wedge_region_boxes(b_range=(0.5, 3.0), t_range=(-0.6, 0.6)):
    return [[(b_range[0], b_range[1]), (t_range[0], t_range[1])]]


def net_generators(model: GridModel, region_boxes, handle: DistVecHandle, n_per_axis=2):
    """Smears of the handle over tensor bumps filling the region boxes."""
    from .modular import RegionSmear

    region = RegionSmear(boxes=region_boxes)
    if n_per_axis != 2:
        from .modular import box_bumps

        region = RegionSmear(
            boxes=region_boxes,
            bumps=[b for box in region_boxes for b in box_bumps(box, n_per_axis)],
        )
    return [model.smear_group(combo, handle) for combo in region.bumps]


def truncated_pair_comparison(model: GridModel, smears, depth=1, keep_tol=3e-6,
                              spectral_clip=3.0):
    """Build (Delta, J) on the truncation spanned by the smears and their
    J-images plus flow derivatives (up to ``depth``), then compare the
    smeared real span with the fixed-point subspace of the pair.

    Returns a dict with the largest inclusion angle and the pair residual.
    """
    base = list(smears) + [sv.conjugated() for sv in smears]
    enriched = list(base)
    layer = base
    for _ in range(depth):
        layer = [sv.dilation_derivative() for sv in layer]
        enriched += layer
    family = enriched + [sv.conjugated() for sv in enriched]

    raw = [model.embed(sv.vector()) for sv in family]
    cols = np.column_stack([v / np.linalg.norm(v) for v in raw])
    q, r = np.linalg.qr(cols)
    keep = np.abs(np.diag(r)) > keep_tol
    q, _ = np.linalg.qr(cols[:, keep])
    rank = q.shape[1]

    def coords(vec):
        return q.conj().T @ model.embed(vec)

    # J in coordinates: J (q c) = q (K conj c) when the span is J-closed
    from .modular import involution_correct

    K0 = q.conj().T @ np.conj(q)
    j_resid = float(np.linalg.norm(K0 @ np.conj(K0) - np.eye(rank)))
    K = involution_correct(K0)

    kept = [f for f, k in zip(family, keep) if k]
    dcols = np.column_stack(
        [coords(sv.dilation_derivative().vector()) / np.linalg.norm(rv)
         for sv, rv in zip(kept, [raw[i] for i in np.flatnonzero(keep)])]
    )
    A = dcols @ np.linalg.pinv(q.conj().T @ cols[:, keep], rcond=1e-6)

    from .modular import standard_subspace_from_pair

    # |h| beyond a few units is compression junk; larger values would also
    # be numerically invisible in the pair (e^{-pi h} below the rank tol)
    pair = pair_from_generator(K, A, spectral_clip=spectral_clip)
    v_pair = standard_subspace_from_pair(pair)
    gen_coords = [coords(sv.vector()) for sv in smears]
    h_span = RealSubspace.from_generators(gen_coords)
    angles = h_span.angles_to(v_pair)
    return {
        "rank": rank,
        "j_closure_residual": j_resid,
        "max_inclusion_angle": float(angles.max()) if angles.size else 0.0,
        "pair": pair,
        "h_dim": h_span.dim,
        "v_dim": v_pair.dim,
    }
