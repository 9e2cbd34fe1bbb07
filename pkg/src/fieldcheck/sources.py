"""Compactly supported scalar densities and four-currents.

Every source is a finite sum of separable terms
``scale * q(t) * profile(x)`` where ``q`` is a harmonic time profile and
``profile`` a smooth bump (or its directional derivative) vanishing outside a
ball. The separable form lets the solver tabulate the spatial factors once per
quadrature rule, and gives exact time derivatives.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .quadrature import VolumeRule, pairwise_sum

# (1 - s^2/a^2)^4 integrates to 4 pi a^3 * 128/3465 over the ball
_BUMP_NORM = 3465.0 / (512.0 * math.pi)
OMEGA_A_WARNING = 0.5


class SourceWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Harmonic:
    """``amplitude * sin(omega * t + phase) + offset``."""

    amplitude: float = 0.0
    omega: float = 0.0
    phase: float = 0.0
    offset: float = 0.0

    @classmethod
    def constant(cls, value: float) -> "Harmonic":
        return cls(0.0, 0.0, 0.0, float(value))

    def __call__(self, t):
        return self.amplitude * np.sin(self.omega * np.asarray(t, dtype=float) + self.phase) + self.offset

    def derivative(self) -> "Harmonic":
        return Harmonic(self.amplitude * self.omega, self.omega, self.phase + 0.5 * math.pi, 0.0)

    def scaled(self, c: float) -> "Harmonic":
        return Harmonic(self.amplitude * c, self.omega, self.phase, self.offset * c)

    @property
    def is_static(self) -> bool:
        return self.amplitude == 0.0 or self.omega == 0.0


@dataclass(frozen=True)
class Bump:
    """Normalized bump ``C_a (1 - s^2/a^2)^4`` for ``s < a``; integrates to 1."""

    center: tuple = (0.0, 0.0, 0.0)
    radius: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if not self.radius > 0:
            raise ValueError(f"support radius must be positive, got {self.radius}")
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def norm(self) -> float:
        return _BUMP_NORM / self.radius**3

    def _offset(self, points):
        d = np.asarray(points, dtype=float) - np.asarray(self.center)
        q = np.einsum("...i,...i->...", d, d) / self.radius**2
        return d, q

    def __call__(self, points):
        _, q = self._offset(points)
        inside = q < 1.0
        return np.where(inside, self.norm * np.clip(1.0 - q, 0.0, None) ** 4, 0.0)

    def gradient(self, points):
        d, q = self._offset(points)
        g = np.where(q < 1.0, -8.0 * self.norm / self.radius**2 * np.clip(1.0 - q, 0.0, None) ** 3, 0.0)
        return g[..., None] * d


@dataclass(frozen=True)
class BumpSlope:
    """Directional derivative ``(axis . grad) w_a`` of a :class:`Bump`."""

    center: tuple = (0.0, 0.0, 0.0)
    radius: float = 1.0
    axis: tuple = (0.0, 0.0, 1.0)

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        object.__setattr__(self, "radius", float(self.radius))
        ax = np.asarray(self.axis, dtype=float)
        object.__setattr__(self, "axis", tuple(float(c) for c in ax / np.linalg.norm(ax)))

    def __call__(self, points):
        grad = Bump(self.center, self.radius).gradient(points)
        return grad @ np.asarray(self.axis)


@dataclass(frozen=True)
class Term:
    component: int
    profile: object
    time: Harmonic
    scale: float = 1.0

    def value(self, points, t):
        return self.scale * self.time(t) * self.profile(points)

    def rate(self, points, t):
        return self.scale * self.time.derivative()(t) * self.profile(points)


@dataclass(frozen=True)
class _Source:
    terms: tuple = field(default_factory=tuple)

    n_components = 1

    def __post_init__(self):
        terms = tuple(self.terms)
        for term in terms:
            if not 0 <= term.component < self.n_components:
                raise ValueError(f"component {term.component} out of range for {type(self).__name__}")
        object.__setattr__(self, "terms", terms)

    def _sum(self, points, t, which):
        pts = np.asarray(points, dtype=float)
        out = np.zeros(pts.shape[:-1] + (self.n_components,))
        for term in self.terms:
            out[..., term.component] += getattr(term, which)(pts, t)
        return out

    @property
    def supports(self) -> list[tuple[tuple, float]]:
        """Distinct support balls as ``(center, radius)``."""
        seen = []
        for term in self.terms:
            ball = (term.profile.center, term.profile.radius)
            if ball not in seen:
                seen.append(ball)
        return seen

    @property
    def radius(self) -> float:
        """Largest support radius (the length scale ``a``)."""
        return max(r for _, r in self.supports)

    @property
    def center(self) -> np.ndarray:
        return np.asarray(self.supports[0][0])

    @property
    def max_omega(self) -> float:
        return max((t.time.omega for t in self.terms if not t.time.is_static), default=0.0)

    def distance_to_support(self, point) -> float:
        """Smallest ``|point - center| / a`` over the support balls."""
        p = np.asarray(point, dtype=float)
        return min(float(np.linalg.norm(p - np.asarray(c))) / r for c, r in self.supports)

    def __add__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return type(self)(self.terms + other.terms)

    def scaled(self, c: float):
        return type(self)(tuple(replace(t, scale=t.scale * c) for t in self.terms))


class ScalarSource(_Source):
    """Charge density ``rho(x, t)``."""

    n_components = 1

    def evaluate(self, points, t):
        return self._sum(points, t, "value")[..., 0]

    def time_derivative(self, points, t):
        return self._sum(points, t, "rate")[..., 0]


class CurrentSource(_Source):
    """Four-current ``j^mu(x, t)``; component 0 is the charge density."""

    n_components = 4

    def evaluate(self, points, t):
        return self._sum(points, t, "value")

    def time_derivative(self, points, t):
        return self._sum(points, t, "rate")


def _check_scale(a, omega=0.0):
    if not a > 0:
        raise ValueError(f"support radius a must be positive, got {a}")
    if omega < 0:
        raise ValueError(f"omega must be non-negative, got {omega}")
    if omega * a >= OMEGA_A_WARNING:
        warnings.warn(
            f"omega*a = {omega * a:.3g} >= {OMEGA_A_WARNING}: finite-size corrections are not small",
            SourceWarning,
            stacklevel=3,
        )


def static_monopole(Q: float, a: float, center=(0.0, 0.0, 0.0)) -> ScalarSource:
    _check_scale(a)
    return ScalarSource((Term(0, Bump(center, a), Harmonic.constant(Q)),))


def oscillating_monopole(q0: float, omega: float, a: float, center=(0.0, 0.0, 0.0)) -> ScalarSource:
    """``rho = q0 sin(omega t) w_a``."""
    _check_scale(a, omega)
    return ScalarSource((Term(0, Bump(center, a), Harmonic(q0, omega)),))


def static_charge(e: float, a: float, center=(0.0, 0.0, 0.0)) -> CurrentSource:
    _check_scale(a)
    return CurrentSource((Term(0, Bump(center, a), Harmonic.constant(e)),))


def hertzian_dipole(p0: float, omega: float, a: float, axis=(0.0, 0.0, 1.0), center=(0.0, 0.0, 0.0)) -> CurrentSource:
    """Mollified oscillating dipole ``p(t) = p0 sin(omega t)`` along ``axis``.

    ``j = p'(t) w_a axis`` and ``j^0 = -p(t) (axis . grad) w_a``, so charge is
    conserved identically.
    """
    _check_scale(a, omega)
    p = Harmonic(p0, omega)
    ax = np.asarray(axis, dtype=float)
    ax = ax / np.linalg.norm(ax)
    terms = [Term(0, BumpSlope(center, a, tuple(ax)), p, -1.0)]
    bump = Bump(center, a)
    for k in range(3):
        if ax[k] != 0.0:
            terms.append(Term(k + 1, bump, p.derivative(), float(ax[k])))
    return CurrentSource(tuple(terms))


def total_charge(src, t: float, rule: VolumeRule = VolumeRule()) -> float:
    """Volume integral of the charge density (component 0) by quadrature."""
    total = 0.0
    for term in src.terms:
        if term.component != 0:
            continue
        pts, w = rule.nodes(term.profile.center, term.profile.radius)
        total += pairwise_sum(w * term.value(pts, t))
    return total


def continuity_residual(src: CurrentSource, t: float, rule: VolumeRule = VolumeRule()) -> float:
    """Max of ``|d_t j^0 + div j|`` over quadrature nodes, in units of ``max|j| / a``.

    The divergence uses central differences with step ``a / 200``.
    """
    if not src.terms:
        return 0.0
    a = src.radius
    h = a / 200.0
    points = np.concatenate([rule.nodes(c, r)[0] for c, r in src.supports])
    j = src.evaluate(points, t)
    scale = float(np.max(np.abs(j)))
    if scale == 0.0:
        return 0.0
    div = src.time_derivative(points, t)[:, 0]
    for k in range(3):
        step = np.zeros(3)
        step[k] = h
        div = div + (src.evaluate(points + step, t)[:, k + 1] - src.evaluate(points - step, t)[:, k + 1]) / (2 * h)
    return float(np.max(np.abs(div))) / (scale / a)
