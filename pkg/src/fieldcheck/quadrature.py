"""Deterministic product quadrature over balls and spheres.

Both rules are Gauss-Legendre in the polar cosine and uniform trapezoid in
azimuth; the ball rule adds Gauss-Legendre in radius. Rules are stored on the
unit ball / unit sphere and mapped to a centre and radius on demand, so one
rule object serves every source and every flux sphere.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

DEFAULT_RADIAL = 24
DEFAULT_POLAR = 24
DEFAULT_AZIMUTHAL = 48
MIN_ORDER = 2


class QuadratureError(ValueError):
    """Invalid rule resolution or a non-finite integrand value."""

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


def _check_order(name, value):
    if int(value) != value or value < MIN_ORDER:
        raise QuadratureError(f"{name} order must be an integer >= {MIN_ORDER}, got {value!r}")
    return int(value)


def _polar_azimuthal(n_polar, n_azimuthal):
    mu, w_mu = np.polynomial.legendre.leggauss(n_polar)
    phi = 2.0 * np.pi * np.arange(n_azimuthal) / n_azimuthal
    w_phi = np.full(n_azimuthal, 2.0 * np.pi / n_azimuthal)
    sin_t = np.sqrt(1.0 - mu * mu)
    dirs = np.empty((n_polar, n_azimuthal, 3))
    dirs[..., 0] = sin_t[:, None] * np.cos(phi)[None, :]
    dirs[..., 1] = sin_t[:, None] * np.sin(phi)[None, :]
    dirs[..., 2] = mu[:, None]
    weights = w_mu[:, None] * w_phi[None, :]
    return dirs.reshape(-1, 3), weights.reshape(-1)


def pairwise_sum(values) -> float:
    """Fixed-order reduction; numpy's contiguous sum is pairwise."""
    return float(np.sum(np.ascontiguousarray(values, dtype=float)))


@dataclass(frozen=True)
class VolumeRule:
    radial: int = DEFAULT_RADIAL
    polar: int = DEFAULT_POLAR
    azimuthal: int = DEFAULT_AZIMUTHAL

    def __post_init__(self):
        object.__setattr__(self, "radial", _check_order("radial", self.radial))
        object.__setattr__(self, "polar", _check_order("polar", self.polar))
        object.__setattr__(self, "azimuthal", _check_order("azimuthal", self.azimuthal))

    @cached_property
    def unit_nodes(self) -> tuple[np.ndarray, np.ndarray]:
        """Nodes and weights on the unit ball (weights sum to 4 pi / 3)."""
        x, w_x = np.polynomial.legendre.leggauss(self.radial)
        s = 0.5 * (x + 1.0)
        w_s = 0.5 * w_x * s * s
        dirs, w_dir = _polar_azimuthal(self.polar, self.azimuthal)
        points = (s[:, None, None] * dirs[None, :, :]).reshape(-1, 3)
        weights = (w_s[:, None] * w_dir[None, :]).reshape(-1)
        points.setflags(write=False)
        weights.setflags(write=False)
        return points, weights

    @property
    def size(self) -> int:
        return self.radial * self.polar * self.azimuthal

    def nodes(self, center=(0.0, 0.0, 0.0), radius=1.0) -> tuple[np.ndarray, np.ndarray]:
        if radius <= 0:
            raise QuadratureError(f"ball radius must be positive, got {radius}")
        pts, w = self.unit_nodes
        return np.asarray(center, dtype=float) + radius * pts, w * radius**3

    def scaled(self, factor: float) -> "VolumeRule":
        return VolumeRule(
            max(MIN_ORDER, round(self.radial * factor)),
            max(MIN_ORDER, round(self.polar * factor)),
            max(MIN_ORDER, round(self.azimuthal * factor)),
        )


@dataclass(frozen=True)
class SphereRule:
    radius: float = 1.0
    polar: int = 16
    azimuthal: int = 32

    def __post_init__(self):
        if not self.radius > 0:
            raise QuadratureError(f"sphere radius must be positive, got {self.radius}")
        object.__setattr__(self, "radius", float(self.radius))
        object.__setattr__(self, "polar", _check_order("polar", self.polar))
        object.__setattr__(self, "azimuthal", _check_order("azimuthal", self.azimuthal))

    @cached_property
    def _unit(self):
        dirs, w = _polar_azimuthal(self.polar, self.azimuthal)
        dirs.setflags(write=False)
        w.setflags(write=False)
        return dirs, w

    @property
    def directions(self) -> np.ndarray:
        return self._unit[0]

    @property
    def weights(self) -> np.ndarray:
        """Area weights, including the ``r**2`` factor."""
        return self._unit[1] * self.radius**2

    @property
    def size(self) -> int:
        return self.polar * self.azimuthal

    def at_radius(self, radius: float) -> "SphereRule":
        return SphereRule(radius, self.polar, self.azimuthal)


def _evaluate_all(f, points):
    values = np.empty(len(points))
    for i, p in enumerate(points):
        v = float(f(p))
        if not math.isfinite(v):
            raise QuadratureError(f"integrand is not finite at node {tuple(p)}", node=tuple(p))
        values[i] = v
    return values


def integrate_volume(f, rule: VolumeRule, center=(0.0, 0.0, 0.0), radius=1.0, vectorized=False) -> float:
    """Integrate ``f(point)`` over the ball; ``vectorized`` means ``f`` takes an (N, 3) array."""
    points, weights = rule.nodes(center, radius)
    if vectorized:
        values = np.asarray(f(points), dtype=float)
        bad = ~np.isfinite(values)
        if bad.any():
            node = tuple(points[np.argmax(bad)])
            raise QuadratureError(f"integrand is not finite at node {node}", node=node)
    else:
        values = _evaluate_all(f, points)
    return pairwise_sum(weights * values)


def integrate_sphere(g, rule: SphereRule, vectorized=False) -> float:
    """Integrate ``g(direction)`` over the sphere of radius ``rule.radius``."""
    if vectorized:
        values = np.asarray(g(rule.directions), dtype=float)
        bad = ~np.isfinite(values)
        if bad.any():
            node = tuple(rule.directions[np.argmax(bad)])
            raise QuadratureError(f"integrand is not finite at node {node}", node=node)
    else:
        values = _evaluate_all(g, rule.directions)
    return pairwise_sum(rule.weights * values)
