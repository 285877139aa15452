"""Cartesian electric/magnetic multipole moments of divergence-free fields on
the unit ball, the product quadratures used to integrate them, and the
moment-based assembler for the scattering amplitude."""

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np


@dataclass(frozen=True)
class SphereQuadrature:
    """Product Gauss(cos theta) x trapezoid(phi) rule on the unit sphere."""

    points: np.ndarray   # (N, 3) unit vectors
    weights: np.ndarray  # (N,), sums to 4 pi
    degree: int


@dataclass(frozen=True)
class BallQuadrature:
    """Tensor rule on the unit ball: Gauss-Legendre radii (r^2 folded into the
    weights) times a product sphere rule."""

    points: np.ndarray   # (N, 3)
    weights: np.ndarray  # (N,), sums to 4 pi / 3
    degree: int
    radial_nodes: np.ndarray = field(repr=False, default=None)
    radial_weights: np.ndarray = field(repr=False, default=None)  # r^2 folded in
    angular: SphereQuadrature = field(repr=False, default=None)


def sphere_quadrature(n_theta: int = 64, n_phi: int = 128) -> SphereQuadrature:
    u, wu = np.polynomial.legendre.leggauss(n_theta)
    phi = 2 * math.pi * np.arange(n_phi) / n_phi
    wphi = 2 * math.pi / n_phi
    cos_t = np.repeat(u, n_phi)
    sin_t = np.sqrt(1 - cos_t ** 2)
    pp = np.tile(phi, n_theta)
    pts = np.stack([sin_t * np.cos(pp), sin_t * np.sin(pp), cos_t], axis=-1)
    w = np.repeat(wu, n_phi) * wphi
    degree = min(2 * n_theta - 1, n_phi - 1)
    return SphereQuadrature(pts, w, degree)


def ball_quadrature(n_r: int = 32, n_theta: int = 64, n_phi: int = 128) -> BallQuadrature:
    x, wx = np.polynomial.legendre.leggauss(n_r)
    r = 0.5 * (x + 1)
    wr = 0.5 * wx * r ** 2
    ang = sphere_quadrature(n_theta, n_phi)
    pts = (r[:, None, None] * ang.points[None, :, :]).reshape(-1, 3)
    w = (wr[:, None] * ang.weights[None, :]).ravel()
    degree = min(2 * n_r - 1 - 2, ang.degree)
    return BallQuadrature(pts, w, degree, radial_nodes=r, radial_weights=wr, angular=ang)


@dataclass
class DecomposedField:
    """Caller-supplied Helmholtz decomposition of a divergence-free field:
    the curl potential phi (with vanishing tangential trace on the boundary)
    and the gradient part grad p.  Either sampler may be None for zero."""

    curl_potential: Optional[Callable[[np.ndarray], np.ndarray]] = None
    grad_potential_gradient: Optional[Callable[[np.ndarray], np.ndarray]] = None
    poly_degree: Optional[int] = None

    def curl_part(self, pts):
        if self.curl_potential is None:
            return np.zeros((len(pts), 3), dtype=complex)
        return np.asarray(self.curl_potential(pts), dtype=complex)

    def grad_part(self, pts):
        if self.grad_potential_gradient is None:
            return np.zeros((len(pts), 3), dtype=complex)
        return np.asarray(self.grad_potential_gradient(pts), dtype=complex)

    def boundary_tangential_residual(self, sphere_quad: SphereQuadrature) -> float:
        """Max |nu x phi| over boundary sample points (membership check)."""
        vals = self.curl_part(sphere_quad.points)
        return float(np.max(np.abs(np.cross(sphere_quad.points, vals))))


@dataclass(frozen=True)
class MomentTensor:
    kind: str      # "magnetic" or "electric"
    order_l: int
    entries: np.ndarray  # rank l (magnetic) or l+1 (electric)


def _check_quadrature_degree(f: DecomposedField, l: int, quad: BallQuadrature):
    if f.poly_degree is not None and f.poly_degree + l > quad.degree:
        warnings.warn(
            f"integrand degree {f.poly_degree + l} exceeds quadrature exactness {quad.degree}",
            stacklevel=3,
        )


def magnetic_moment(l: int, f: DecomposedField, q: BallQuadrature) -> MomentTensor:
    """Magnetic l-moment: l * \\int_B phi(y) (x) y (x) ... (x) y dy (l-1 copies of y).

    The result is independent of the gauge representative of phi once it is
    contracted into the radiation bracket; order 0 is identically zero.
    """
    if l < 0:
        raise ValueError("moment order must be >= 0")
    if l == 0:
        return MomentTensor("magnetic", 0, np.zeros(()))
    if l > 4:
        raise ValueError("magnetic moments are only needed up to order 4")
    _check_quadrature_degree(f, l - 1, q)
    vals = f.curl_part(q.points)
    entries = _weighted_outer(q.weights, vals, q.points, l - 1) * l
    return MomentTensor("magnetic", l, entries)


def electric_moment(l: int, f: DecomposedField, q: BallQuadrature) -> MomentTensor:
    """Electric l-moment: \\int_B grad p(y) (x) y (x) ... (x) y dy (l copies)."""
    if l < 0:
        raise ValueError("moment order must be >= 0")
    if l > 2:
        raise ValueError("electric moments are only needed up to order 2")
    _check_quadrature_degree(f, l, q)
    vals = f.grad_part(q.points)
    entries = _weighted_outer(q.weights, vals, q.points, l)
    return MomentTensor("electric", l, entries)


def _weighted_outer(w, vecs, pts, n_y):
    letters = "abcd"[:n_y]
    spec = "p,pi" + ("".join(f",p{c}" for c in letters)) + "->i" + letters
    args = [w, vecs] + [pts] * n_y
    return np.einsum(spec, *args)


_TRUNCATIONS = {
    "dipole-pair": [("electric", 0), ("magnetic", 1)],
    "order4": [("electric", 0), ("magnetic", 1), ("electric", 1), ("magnetic", 2)],
    "orderL": None,
}


def amplitude_from_moments(moments, delta: float, tau: complex, omega: complex,
                           xhat, truncation: str = "order4") -> np.ndarray:
    """Scattering amplitude assembled from Cartesian moments:

        (tau w^2 d^3 / 4pi) (I - x(x)x) sum_l (-i d w)^l / l!
            [ M_l(., x..x) cross x + Q_l(., x..x) ]

    The tangential projector guarantees x-hat . result = 0.
    """
    if truncation not in _TRUNCATIONS:
        raise ValueError(f"unknown truncation {truncation!r}")
    xhat = np.asarray(xhat, dtype=float)
    table = {}
    for mt in moments:
        table[(mt.kind, mt.order_l)] = mt
    wanted = _TRUNCATIONS[truncation]
    if wanted is None:
        wanted = sorted(table.keys(), key=lambda km: km[1])
    total = np.zeros(3, dtype=complex)
    for kind, l in wanted:
        if (kind, l) not in table:
            raise KeyError(f"missing {kind} moment of order {l} for truncation {truncation!r}")
        mt = table[(kind, l)]
        coef = (-1j * delta * omega) ** l / math.factorial(l)
        if kind == "magnetic":
            if l == 0:
                continue
            vec = _contract_trailing(mt.entries, xhat, l - 1)
            total = total + coef * np.cross(vec, xhat)
        else:
            vec = _contract_trailing(mt.entries, xhat, l)
            total = total + coef * vec
    total = total - xhat * np.dot(xhat, total)
    return tau * omega ** 2 * delta ** 3 / (4 * math.pi) * total


def _contract_trailing(tensor, xhat, count):
    out = np.asarray(tensor, dtype=complex)
    for _ in range(count):
        out = out @ xhat
    return out
