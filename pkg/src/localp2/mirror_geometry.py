"""Elliptic-fibration geometry over the base coordinate of the mirror curve.

The fiber over z is the double cover Y^2 = X^3 + (z/2)^2 X^2 + (z/2) X + 1/4.
Its branch roots are tracked with continuous labels along polyline paths, the
one-dimensional vanishing-cycle integrals are evaluated both through a
two-term hypergeometric closed form and through branch-tracked quadrature,
and the three-cycle periods are obtained by contour quadrature of a fixed
two-segment combination along the ray from the fibration degeneration point
through the origin to a critical value of the elliptic fibration.

Conventions frozen here (measured, not assumed):
  * internal primitive cube root ``OMEGA = exp(2 pi i/3)``; critical values
    are ``3 * OMEGA**k`` and the cycle with index k is integrated to exactly
    that endpoint;
  * per-cycle segment combinations and their signs are seeded at z = 0 and
    normalized so the alternating sum of the three periods equals +1;
  * the large-|y| tails of the periods carry sixth-root-of-unity phases
    ``TAIL_PHASE**k`` and ``TAIL_PHASE**(-k)`` on the y^(-1/3) and y^(-2/3)
    terms respectively.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels
from .errors import DomainError, QuadratureError, RootCollisionError
from .specfun import PrecisionConfig, hyp2f1_half, f_prime_minus_omega

__all__ = [
    "OMEGA",
    "TAIL_PHASE",
    "CubicRoots",
    "PathZ",
    "PeriodVector",
    "critical_points",
    "roots_at_origin",
    "cubic_roots_along",
    "vanishing_integral_Jk",
    "jk_quadrature",
    "period_Ik",
    "periods",
    "b_expansion",
    "expected_period_tail",
    "f_at_origin",
    "f_prime_at_origin",
]

OMEGA = cmath.exp(2j * cmath.pi / 3)

# Phase base of the period tails.  A sixth root: the cube-root rotation of the
# fibration composed with the orientation flip of alternating cycles.
TAIL_PHASE = cmath.exp(1j * cmath.pi / 3)

_ROOT_SCALE = 2.0 ** (-2.0 / 3.0)
_G13 = math.gamma(1.0 / 3.0) ** 3
_G23 = math.gamma(2.0 / 3.0) ** 3

# |coefficients| of the y^(-1/3) and y^(-2/3) period tails.
TAIL_COEFF_1 = math.sqrt(3.0) * _G13 / (8.0 * math.pi ** 3)
TAIL_COEFF_2 = math.sqrt(3.0) * _G23 / (16.0 * math.pi ** 3)

PATH_CLEARANCE = 1e-6
COLLISION_TOL = 1e-9
VIETA_TOL = 1e-12
MAX_ROOT_STEP = 0.25

# Fiber-cycle combination entering the period contour for each cycle index:
# list of (sign, segment family) pairs, where family m is the branch-tracked
# integral 2*Int dX/sqrt(cubic) from root m to root m+1.  Signs are the
# once-per-cycle seeds at z = 0; they are fixed by the torus normalization
# (alternating period sum = +1) and by the measured degeneration tails.
_CYCLE_SEGMENTS = {
    0: ((-1, 0), (-1, 2)),
    1: ((+1, 1), (-1, 2)),
    2: ((+1, 0), (+1, 1)),
}

_TWO_PI = 2.0 * math.pi
_EIGHT_PI_SQ = 8.0 * math.pi ** 2


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CubicRoots:
    """Labeled root triple of the fiber cubic at one base point."""

    x0: complex
    x1: complex
    x2: complex
    z: complex
    branch_seed: str = "origin"

    @property
    def triple(self) -> tuple[complex, complex, complex]:
        return (self.x0, self.x1, self.x2)

    def min_gap(self) -> float:
        a, b, c = self.triple
        return min(abs(a - b), abs(a - c), abs(b - c))

    def vieta_residual(self) -> float:
        a, b, c = self.triple
        h = 0.5 * self.z
        r1 = abs(a + b + c + h * h)
        r2 = abs(a * b + a * c + b * c - h)
        r3 = abs(a * b * c + 0.25)
        return max(r1, r2, r3)


@dataclass(frozen=True)
class PathZ:
    """Polyline in the base plane with a per-segment sampling density."""

    vertices: tuple
    refinement: int = 64

    def __post_init__(self):
        verts = tuple(complex(v) for v in self.vertices)
        object.__setattr__(self, "vertices", verts)
        if len(verts) < 2:
            raise DomainError("path needs at least two vertices")
        if self.refinement < 2:
            raise DomainError("refinement must be at least 2")
        for a, b in zip(verts[:-1], verts[1:]):
            if abs(a - b) == 0.0:
                raise DomainError("consecutive path vertices must be distinct")

    def samples(self) -> np.ndarray:
        """All sample points, each interior vertex emitted once."""
        out = [np.array([self.vertices[0]], dtype=np.complex128)]
        t = np.linspace(0.0, 1.0, self.refinement + 1)[1:]
        for a, b in zip(self.vertices[:-1], self.vertices[1:]):
            out.append(a + (b - a) * t)
        return np.concatenate(out)

    def validate_clearance(self, critical) -> None:
        """Interior points must stay PATH_CLEARANCE away from critical z."""
        pts = self.samples()
        ends = (self.vertices[0], self.vertices[-1])
        for c in critical:
            d = np.abs(pts - complex(c))
            near = d < PATH_CLEARANCE
            if not near.any():
                continue
            for p in pts[near]:
                if min(abs(p - ends[0]), abs(p - ends[1])) > PATH_CLEARANCE:
                    raise DomainError(
                        f"path passes within {PATH_CLEARANCE} of critical "
                        f"point {c:.6g} at interior sample {p:.6g}")


@dataclass(frozen=True)
class PeriodVector:
    """The three contour periods at one modulus value, with error estimates."""

    i0: complex
    i1: complex
    i2: complex
    y: complex
    err: tuple

    def as_vector(self) -> list:
        return [self.i0, self.i1, self.i2]

    def alternating_sum(self) -> complex:
        return self.i0 - self.i1 + self.i2


# ---------------------------------------------------------------------------
# critical points and root tracking
# ---------------------------------------------------------------------------


def critical_points(y: complex):
    """Degeneration point z_* and the three elliptic critical values.

    z_* = -y^(-1/3) (principal root) is where the ambient C*-fiber pinches;
    the elliptic fiber itself degenerates at the cube roots 3*OMEGA**k.
    """
    y = complex(y)
    if y == 0:
        raise DomainError("critical points undefined at y = 0")
    z_star = -(y ** (-1.0 / 3.0))
    return (z_star, 3.0 + 0.0j, 3.0 * OMEGA, 3.0 * OMEGA ** 2)


def _origin_triple() -> np.ndarray:
    return np.array([-_ROOT_SCALE * OMEGA ** j for j in range(3)],
                    dtype=np.complex128)


def roots_at_origin() -> CubicRoots:
    """Exact labeled roots at z = 0: x_j = -2^(-2/3) OMEGA^j."""
    t = _origin_triple()
    return CubicRoots(complex(t[0]), complex(t[1]), complex(t[2]), 0.0j)


def _check_tracked(zs: np.ndarray, roots: np.ndarray, endpoints) -> None:
    """Vieta, collision and step-bound guards on a tracked root array."""
    h = 0.5 * zs
    e1 = np.abs(roots.sum(axis=1) + h * h)
    e2 = np.abs(roots[:, 0] * roots[:, 1] + roots[:, 0] * roots[:, 2]
                + roots[:, 1] * roots[:, 2] - h)
    e3 = np.abs(roots.prod(axis=1) + 0.25)
    scale = np.maximum(1.0, np.abs(h) ** 2)
    worst = max(np.max(e1 / scale), np.max(e2 / scale), np.max(e3 / scale))
    if worst > 10.0 * VIETA_TOL:
        raise DomainError(f"cubic solve lost precision: vieta residual {worst:.3e}")
    gaps = np.minimum(
        np.abs(roots[:, 0] - roots[:, 1]),
        np.minimum(np.abs(roots[:, 0] - roots[:, 2]),
                   np.abs(roots[:, 1] - roots[:, 2])))
    tight = gaps < COLLISION_TOL
    if tight.any():
        for z in zs[tight]:
            if min(abs(z - complex(e)) for e in endpoints) > PATH_CLEARANCE:
                raise RootCollisionError(
                    f"roots collide at z = {z:.6g}, away from any declared "
                    "endpoint; path runs into the discriminant")
    if len(roots) > 1:
        step = np.max(np.abs(np.diff(roots, axis=0)))
        if step > MAX_ROOT_STEP:
            raise DomainError(
                f"root step {step:.3g} exceeds bound {MAX_ROOT_STEP}; "
                "refine the path sampling")


def cubic_roots_along(path: PathZ, seed: CubicRoots | None = None):
    """Labeled root triples at every sample of ``path``.

    The path must start at z = 0 (labels seeded by the exact origin roots)
    or a starting ``seed`` must be supplied.
    """
    if seed is None:
        if abs(path.vertices[0]) > 1e-12:
            raise DomainError("path must start at z = 0 unless a seed is given")
        seed_arr = _origin_triple()
        label = "origin"
    else:
        seed_arr = np.array(seed.triple, dtype=np.complex128)
        label = seed.branch_seed
    zs = path.samples()
    tracked = _kernels.track_roots(zs, seed_arr)
    _check_tracked(zs, tracked, (path.vertices[0], path.vertices[-1]))
    return [
        CubicRoots(complex(r[0]), complex(r[1]), complex(r[2]), complex(z), label)
        for z, r in zip(zs, tracked)
    ]


# ---------------------------------------------------------------------------
# vanishing-cycle integrals
# ---------------------------------------------------------------------------


def _seg_quad(xa, xb, xc, n) -> complex:
    return 2.0 * _kernels.segment_integral(xa, xb, xc, n)


def _hyp(z: complex) -> complex:
    vals, ok = _kernels.hyp2f1_half_array(np.array([z], dtype=np.complex128))
    if not ok:
        raise QuadratureError(f"hypergeometric AGM failed to converge at {z:.6g}")
    return complex(vals[0])


def _on_unit_cut(r: complex) -> bool:
    return abs(r.imag) < 1e-9 and r.real >= 1.0 - 1e-9


def jk_quadrature(roots: CubicRoots, k: int, n: int = 256) -> complex:
    """Vanishing-cycle integral by branch-tracked quadrature.

    Two double-cover segments joined at the root with the cycle's label:
    from root i = k+2 to root k, then from root k to root j = k+1, the
    second with reversed orientation.
    """
    i, j = (k + 2) % 3, (k + 1) % 3
    t = roots.triple
    return _seg_quad(t[i], t[k], t[j], n) - _seg_quad(t[k], t[j], t[i], n)


def vanishing_integral_Jk(roots: CubicRoots, k: int) -> complex:
    """Closed-form vanishing-cycle integral at one root configuration.

    Two hypergeometric terms built on the segments meeting at root k:

        2 pi F(r1)/sqrt(x_j - x_i)  -  eps * 2 pi F(r2)/sqrt(x_i - x_j)

    with r1 = (x_k - x_i)/(x_j - x_i), r2 = (x_k - x_j)/(x_i - x_j), and
    F = 2F1(1/2, 1/2; 1; .).  The factor eps (always +/-1) reconciles the
    principal square roots of the two prefactors with the branch that is
    continuous along the integration segments: it is the ratio between the
    principal root of a quotient and the quotient of principal roots.  With
    it the value agrees with ``jk_quadrature`` wherever neither argument
    touches the hypergeometric cut [1, oo); on the cut the closed form is
    abandoned for quadrature and a warning flags the fallback.
    """
    if k not in (0, 1, 2):
        raise DomainError(f"cycle index must be 0, 1 or 2, got {k}")
    if roots.min_gap() < COLLISION_TOL:
        raise RootCollisionError(
            f"degenerate root triple at z = {roots.z:.6g}: gap {roots.min_gap():.3e}")
    i, j = (k + 2) % 3, (k + 1) % 3
    t = roots.triple
    xi, xj, xk = t[i], t[j], t[k]
    r1 = (xk - xi) / (xj - xi)
    r2 = (xk - xj) / (xi - xj)
    if _on_unit_cut(r1) or _on_unit_cut(r2):
        warnings.warn(
            "hypergeometric argument on the cut [1, oo); "
            "falling back to segment quadrature", RuntimeWarning, stacklevel=2)
        return jk_quadrature(roots, k)
    term1 = _TWO_PI * _hyp(r1) / cmath.sqrt(xj - xi)
    term2 = _TWO_PI * _hyp(r2) / cmath.sqrt(xi - xj)
    eps = (((xi - xj) / (xi - xk)) ** -0.5
           * cmath.sqrt(xi - xj) / cmath.sqrt(xi - xk))
    eps = 1.0 if eps.real > 0.0 else -1.0
    return term1 - eps * term2


# ---------------------------------------------------------------------------
# period quadrature
# ---------------------------------------------------------------------------


@lru_cache(maxsize=8)
def _gl_grid(n_panels: int, n_nodes: int, cascade: int):
    """Panelized Gauss-Legendre grid on [0, 1], geometric squeeze at t = 1.

    The squeeze resolves the endpoint where two branch roots collide; the
    integrand stays bounded there but loses analyticity, so fixed panels
    converge slowly without it.
    """
    x, w = np.polynomial.legendre.leggauss(n_nodes)
    bounds = list(np.linspace(0.0, 1.0, n_panels + 1))
    last = bounds[-2]
    width = 1.0 - last
    cascade_pts = [1.0 - width * 0.5 ** j for j in range(1, cascade)]
    bounds = bounds[:-1] + cascade_pts + [1.0]
    ts, ws = [], []
    for a, b in zip(bounds[:-1], bounds[1:]):
        ts.append(0.5 * (b - a) * x + 0.5 * (a + b))
        ws.append(0.5 * (b - a) * w)
    t = np.concatenate(ts)
    wt = np.concatenate(ws)
    t.setflags(write=False)
    wt.setflags(write=False)
    return t, wt


@lru_cache(maxsize=16)
def _segment_anchor(m: int, seg_n: int) -> complex:
    t = _origin_triple()
    return _seg_quad(t[m], t[(m + 1) % 3], t[(m + 2) % 3], seg_n)


def _threaded_family(roots: np.ndarray, m: int, seg_n: int) -> np.ndarray:
    """Segment-family values along a tracked ray, sign-threaded from z = 0."""
    a, b, c = m, (m + 1) % 3, (m + 2) % 3
    vals = np.empty(len(roots), dtype=np.complex128)
    prev = _segment_anchor(m, seg_n)
    for idx in range(len(roots)):
        v = _seg_quad(roots[idx, a], roots[idx, b], roots[idx, c], seg_n)
        if abs(v - prev) > abs(v + prev):
            v = -v
        vals[idx] = v
        prev = v
    return vals


@lru_cache(maxsize=256)
def _ray_integral(endpoint: complex, k: int, n_panels: int, n_nodes: int,
                  seg_n: int, cascade: int) -> complex:
    """Integral of the cycle-k fiber combination along the ray 0 -> endpoint."""
    t, wt = _gl_grid(n_panels, n_nodes, cascade)
    zs = t * endpoint
    tracked = _kernels.track_roots(zs, _origin_triple())
    _check_tracked(zs, tracked, (0.0j, endpoint))
    (sa, a), (sb, b) = _CYCLE_SEGMENTS[k]
    h = (sa * _threaded_family(tracked, a, seg_n)
         + sb * _threaded_family(tracked, b, seg_n))
    return complex(np.sum(h * wt) * endpoint)


def _period_value(y: complex, k: int, n_panels: int, n_nodes: int = 32,
                  seg_n: int = 64, cascade: int = 10) -> complex:
    z_star, *crit = critical_points(y)
    a_side = _ray_integral(complex(crit[k]), k, n_panels, n_nodes, seg_n, cascade)
    b_side = _ray_integral(complex(z_star), k, n_panels, n_nodes, seg_n, cascade)
    return -(a_side - b_side) / _EIGHT_PI_SQ


def _resolve_quad_tol(quad: PrecisionConfig | None) -> float:
    if quad is None:
        return 1e-9
    return max(float(quad.target_rel_err), 1e-12)


def _period_adaptive(y: complex, k: int, tol: float,
                     n_panels: int = 12) -> tuple[complex, float]:
    prev = _period_value(y, k, n_panels)
    panels = n_panels
    while True:
        panels *= 2
        cur = _period_value(y, k, panels)
        err = abs(cur - prev)
        if err <= tol * max(1.0, abs(cur)):
            return cur, err
        if panels >= 96:
            z_star, *crit = critical_points(y)
            da = abs(_ray_integral(complex(crit[k]), k, panels, 32, 64, 10)
                     - _ray_integral(complex(crit[k]), k, panels // 2, 32, 64, 10))
            db = abs(_ray_integral(complex(z_star), k, panels, 32, 64, 10)
                     - _ray_integral(complex(z_star), k, panels // 2, 32, 64, 10))
            worst = ("critical ray 0 -> z_k" if da >= db
                     else "degeneration ray 0 -> z_*")
            raise QuadratureError(
                f"period quadrature not converged at {panels} panels "
                f"(err {err:.3e} > tol {tol:.1e}); worst segment: {worst}")
        prev = cur


def _default_path(y: complex, k: int) -> PathZ:
    z_star, *crit = critical_points(y)
    return PathZ((z_star, 0.0j, crit[k]))


def _validate_period_path(path: PathZ, y: complex, k: int) -> None:
    z_star, *crit = critical_points(y)
    if abs(path.vertices[0] - z_star) > 1e-9:
        raise DomainError(
            f"period path must start at the degeneration point {z_star:.6g}")
    if abs(path.vertices[-1] - crit[k]) > 1e-9:
        raise DomainError(
            f"period path for cycle {k} must end at {complex(crit[k]):.6g}")
    if not any(abs(v) < 1e-12 for v in path.vertices):
        raise DomainError("period path must pass through z = 0")
    path.validate_clearance([z_star] + [c for m, c in enumerate(crit) if m != k])


def period_Ik(y: complex, k: int, path: PathZ | None = None,
              quad: PrecisionConfig | None = None) -> complex:
    """Contour period of the three-cycle attached to critical value k.

    Quadrature of the fiber-cycle combination along the ray from the
    degeneration point z_* through the origin to the k-th critical value,
    normalized by -1/(8 pi^2) (the circle factor of the third fibration
    direction is already absorbed).
    """
    y = complex(y)
    if k not in (0, 1, 2):
        raise DomainError(f"cycle index must be 0, 1 or 2, got {k}")
    if abs(y) <= 27.0:
        raise DomainError(
            f"period contour requires |y| > 27, got |y| = {abs(y):.4g}")
    if path is not None:
        _validate_period_path(path, y, k)
    value, _ = _period_adaptive(y, k, _resolve_quad_tol(quad))
    return value


def periods(y: complex, quad: PrecisionConfig | None = None) -> PeriodVector:
    """All three periods at one modulus value, with error estimates."""
    y = complex(y)
    if abs(y) <= 27.0:
        raise DomainError(
            f"period contour requires |y| > 27, got |y| = {abs(y):.4g}")
    tol = _resolve_quad_tol(quad)
    vals = []
    errs = []
    for k in range(3):
        v, e = _period_adaptive(y, k, tol)
        vals.append(v)
        errs.append(e)
    return PeriodVector(vals[0], vals[1], vals[2], y, tuple(errs))


# ---------------------------------------------------------------------------
# degeneration-tail expansion
# ---------------------------------------------------------------------------


def f_at_origin(config: PrecisionConfig | None = None) -> complex:
    """Value at z = 0 of the tail-generating density f(z).

    f(z) = F(sigma(z)) / (4 pi sqrt(x0(z) - x1(z))) with
    sigma = (x2 - x1)/(x0 - x1); the principal branches at the origin make
    this the germ of the branch-tracked segment family, and the value equals
    -i Gamma(1/3)^3 / (8 pi^3).
    """
    t = _origin_triple()
    sigma = (t[2] - t[1]) / (t[0] - t[1])
    val = hyp2f1_half(complex(sigma), config)
    return val / (4.0 * math.pi * cmath.sqrt(complex(t[0] - t[1])))


def f_prime_at_origin(config: PrecisionConfig | None = None) -> complex:
    """d/dz at z = 0 of the tail-generating density, by the chain rule.

    Uses the exact root velocities dx_m/dz(0) = OMEGA^(2m)/(2^(1/3) * 3) and
    the closed-form derivative of F at the sixth root of unity; the value
    equals -i Gamma(2/3)^3 / (8 pi^3).
    """
    t = _origin_triple()
    dt = np.array([OMEGA ** (2 * m) / (2.0 ** (1.0 / 3.0) * 3.0)
                   for m in range(3)], dtype=np.complex128)
    sigma = (t[2] - t[1]) / (t[0] - t[1])
    d01 = complex(t[0] - t[1])
    f_val = hyp2f1_half(complex(sigma), config)
    # F has a real power series, so its derivative at the conjugate point is
    # the conjugate of the tabulated closed-form derivative.
    f_der = complex(f_prime_minus_omega("closed_form", config)).conjugate()
    dsigma = ((dt[2] - dt[1]) * d01 - (t[2] - t[1]) * (dt[0] - dt[1])) / d01 ** 2
    val = (-0.5 * d01 ** -1.5 * (dt[0] - dt[1]) * f_val
           + d01 ** -0.5 * f_der * dsigma)
    return complex(val) / (4.0 * math.pi)


def b_expansion(y: complex):
    """Two-term large-|y| tails of the three periods.

    Assembled from f(0) and f'(0); the per-cycle phase factors are the
    products of the cube-root rotation with the alternating cycle
    orientation, fixed against the measured quadrature.  Equivalent closed
    form: TAIL_PHASE^k * TAIL_COEFF_1 * y^(-1/3)
          + TAIL_PHASE^(-k) * TAIL_COEFF_2 * y^(-2/3).
    """
    y = complex(y)
    if abs(y) <= 27.0:
        raise DomainError(
            f"tail expansion requires |y| > 27, got |y| = {abs(y):.4g}")
    f0 = f_at_origin()
    fp0 = f_prime_at_origin()
    w = OMEGA ** 2  # conjugate cube root: the rotation seen by the labels
    u = y ** (-1.0 / 3.0)
    out = []
    for k in range(3):
        sign = (-1.0) ** k
        first = -u * f0 * sign * (w ** (k + 1) - w ** (k - 1))
        second = 0.5 * u * u * fp0 * sign * (w ** (2 * k + 2) - w ** (2 * k + 1))
        out.append(first + second)
    return tuple(out)


def expected_period_tail(y: complex, k: int) -> complex:
    """Constant term plus two-term tail: the large-|y| period prediction."""
    if k not in (0, 1, 2):
        raise DomainError(f"cycle index must be 0, 1 or 2, got {k}")
    y = complex(y)
    u = y ** (-1.0 / 3.0)
    return ((-1.0) ** k / 3.0
            + TAIL_PHASE ** k * TAIL_COEFF_1 * u
            + TAIL_PHASE ** (-k) * TAIL_COEFF_2 * u * u)
