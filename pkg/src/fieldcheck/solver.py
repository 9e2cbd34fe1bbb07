"""Retarded and advanced potentials by quadrature of the kernel ``rho(x', t -+ R) / R``.

First derivatives are obtained by differentiating the kernel under the
integral sign, which needs the analytic time derivative of the source and
avoids differencing a potential that is itself ``O(1/r)``. Finite differences
appear only in :func:`wave_residual` and in tests.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels
from .minkowski import (
    ETA,
    CoVector,
    ContraVector,
    Event,
    Orientation,
    Tensor2,
    alternate,
)
from .quadrature import VolumeRule
from .sources import CurrentSource, ScalarSource

SUPPORT_BUFFER = 1.01
SINGULAR_FRACTION = 1e-9
DEFAULT_RULE = VolumeRule()


class SolverError(ArithmeticError):
    """Numerical failure inside the solver."""


class PreconditionError(SolverError):
    def __init__(self, message, event=None):
        super().__init__(message)
        self.event = event


class NearSingularityError(SolverError):
    pass


@dataclass(frozen=True)
class KernelGeometry:
    """Separation between a field event and one source point."""

    R: float
    emission_time: float
    direction: tuple

    @classmethod
    def between(cls, event: Event, source_point, orientation=Orientation.RETARDED) -> "KernelGeometry":
        d = event.spatial - np.asarray(source_point, dtype=float)
        R = float(np.linalg.norm(d))
        sign = Orientation.parse(orientation).sign
        direction = tuple(d / R) if R > 0 else (math.nan,) * 3
        return cls(R, event.t - sign * R, direction)


@dataclass(frozen=True)
class FieldSample:
    event: Event
    value: float
    gradient: CoVector | None
    inside_support: bool = False


@dataclass(frozen=True)
class PotentialSample:
    event: Event
    potential: ContraVector
    jacobian: Tensor2
    field: Tensor2
    lorenz: float

    @property
    def potential_co(self) -> CoVector:
        return self.potential.lowered()

    @property
    def electric(self) -> np.ndarray:
        """``E_k = f_{0k}``."""
        return np.array(self.field.components[0, 1:])

    @property
    def magnetic(self) -> np.ndarray:
        """``H_k = -(1/2) eps_{kij} f_{ij}``."""
        f = self.field.components
        return np.array([-f[2, 3], -f[3, 1], -f[1, 2]])


@dataclass(frozen=True)
class _Block:
    nodes: np.ndarray
    spatial: np.ndarray
    comp: np.ndarray
    freq: np.ndarray
    ac: np.ndarray
    as_: np.ndarray
    off: np.ndarray


def _omegas(src):
    return np.array(sorted({t.time.omega for t in src.terms}) or [0.0])


def _blocks(src, ball_nodes):
    """Tabulate each term's weighted spatial factor on the nodes of its ball.

    ``ball_nodes`` maps ``(center, radius)`` of a support ball to the
    ``(points, weights)`` that cover it.
    """
    omegas = _omegas(src)
    index = {w: i for i, w in enumerate(omegas)}
    blocks = []
    for ball, (pts, w) in ball_nodes.items():
        terms = [t for t in src.terms if (t.profile.center, t.profile.radius) == ball]
        spatial = np.stack([t.scale * w * t.profile(pts) for t in terms])
        h = [t.time for t in terms]
        blocks.append(
            _Block(
                np.ascontiguousarray(pts),
                np.ascontiguousarray(spatial),
                np.array([t.component for t in terms], dtype=np.int_),
                np.array([index[x.omega] for x in h], dtype=np.int_),
                np.array([x.amplitude * math.cos(x.phase) for x in h]),
                np.array([x.amplitude * math.sin(x.phase) for x in h]),
                np.array([x.offset for x in h]),
            )
        )
    return tuple(blocks), omegas


@lru_cache(maxsize=32)
def _discretize(src, rule: VolumeRule):
    return _blocks(src, {ball: rule.nodes(*ball) for ball in src.supports})


def _as_events(events) -> np.ndarray:
    if isinstance(events, Event):
        events = [events]
    rows = [e.coords if isinstance(e, Event) else np.asarray(e, dtype=float) for e in events]
    return np.ascontiguousarray(np.reshape(rows, (-1, 4)), dtype=float)


def _check_singular(min_r, events, a):
    bad = min_r < SINGULAR_FRACTION * a
    if bad.any():
        ev = events[np.argmax(bad)]
        raise NearSingularityError(f"quadrature node within {min_r[bad].min():.3g} of field event {tuple(ev)}")


def _kernel_sums(src, events: np.ndarray, orientation, blocks, omegas):
    sign = Orientation.parse(orientation).sign
    total = np.zeros((len(events), src.n_components, 5))
    for b in blocks:
        out, min_r = kernels.retarded_sums(
            events, sign, b.nodes, b.spatial, b.comp, b.freq, b.ac, b.as_, b.off, omegas, src.n_components
        )
        _check_singular(min_r, events, src.radius)
        total += out
    return total


def _inside_mask(src, events):
    return np.array([src.distance_to_support(e[1:]) <= SUPPORT_BUFFER for e in events], dtype=bool)


def _sums(src, events, orientation, rule, need_gradient):
    """Kernel sums at every event; events inside the support use a rule centred on the event."""
    events = _as_events(events)
    inside = _inside_mask(src, events)
    if need_gradient and inside.any():
        ev = events[np.argmax(inside)]
        raise PreconditionError(
            f"derivatives requested at event (t, x, y, z) = {tuple(float(c) for c in ev)}, "
            f"which is not outside the source support (buffer {SUPPORT_BUFFER} a)",
            event=Event(*ev),
        )
    out = np.zeros((len(events), src.n_components, 5))
    if (~inside).any():
        blocks, omegas = _discretize(src, rule)
        out[~inside] = _kernel_sums(src, events[~inside], orientation, blocks, omegas)
    for m in np.flatnonzero(inside):
        ball_nodes = {}
        for center, radius in src.supports:
            reach = float(np.linalg.norm(events[m, 1:] - np.asarray(center))) + radius
            ball_nodes[(center, radius)] = rule.nodes(events[m, 1:], reach)
        blocks, omegas = _blocks(src, ball_nodes)
        out[m] = _kernel_sums(src, events[m:m + 1], orientation, blocks, omegas)[0]
    return out, inside


def _require(src, kind):
    if not isinstance(src, kind):
        raise TypeError(f"expected {kind.__name__}, got {type(src).__name__}")


def scalar_potentials(src: ScalarSource, events, orientation=Orientation.RETARDED, rule=DEFAULT_RULE) -> np.ndarray:
    out, _ = _sums(src, events, orientation, rule, need_gradient=False)
    return out[:, 0, 0]


def scalar_potential(src: ScalarSource, event: Event, orientation=Orientation.RETARDED, rule=DEFAULT_RULE) -> float:
    """``phi = int rho(x', t -+ R) / R dV'``.

    Events inside the support are allowed; they are integrated with a ball
    rule centred on the event, at reduced accuracy.
    """
    _require(src, ScalarSource)
    return float(scalar_potentials(src, [event], orientation, rule)[0])


def scalar_samples(src: ScalarSource, events, orientation=Orientation.RETARDED, rule=DEFAULT_RULE) -> list[FieldSample]:
    _require(src, ScalarSource)
    ev = _as_events(events)
    out, _ = _sums(src, ev, orientation, rule, need_gradient=True)
    return [FieldSample(Event(*e), float(o[0, 0]), CoVector(o[0, 1:])) for e, o in zip(ev, out)]


def scalar_gradient(src: ScalarSource, event: Event, orientation=Orientation.RETARDED, rule=DEFAULT_RULE) -> CoVector:
    """``phi_{,sigma}``; the event must lie outside the support."""
    return scalar_samples(src, [event], orientation, rule)[0].gradient


def _potential_sample(event, sums) -> PotentialSample:
    potential = sums[:, 0]
    d_contra = sums[:, 1:]  # d_contra[mu, sigma] = d_sigma A^mu
    jac = ETA.diagonal()[:, None] * d_contra
    jacobian = Tensor2(jac)
    return PotentialSample(
        event=event,
        potential=ContraVector(potential),
        jacobian=jacobian,
        field=alternate(jacobian),
        lorenz=float(np.trace(d_contra)),
    )


def vector_potentials(src: CurrentSource, events, orientation=Orientation.RETARDED, rule=DEFAULT_RULE, gauge=None) -> list[PotentialSample]:
    _require(src, CurrentSource)
    ev = _as_events(events)
    out, _ = _sums(src, ev, orientation, rule, need_gradient=True)
    samples = [_potential_sample(Event(*e), o) for e, o in zip(ev, out)]
    if gauge is not None:
        samples = [gauge.apply(s) for s in samples]
    return samples


def vector_potential(src: CurrentSource, event: Event, orientation=Orientation.RETARDED, rule=DEFAULT_RULE, gauge=None) -> PotentialSample:
    """``A^mu``, ``A_{rho,sigma}``, ``f_{mu nu}`` and ``A^nu_{,nu}`` at one event."""
    return vector_potentials(src, [event], orientation, rule, gauge)[0]


def _stencil(event: Event, h: float) -> list[Event]:
    pts = [event]
    for axis in range(4):
        step = np.zeros(4)
        step[axis] = h
        pts.append(Event(*(event.coords + step)))
        pts.append(Event(*(event.coords - step)))
    return pts


def wave_residual(src, event: Event, orientation=Orientation.RETARDED, rule=DEFAULT_RULE, h: float = 1e-2) -> float:
    """``|Laplacian(phi) - d_t^2 phi|`` by second central differences of the potential.

    For a current source the maximum over the four components is returned.
    """
    events = _stencil(event, h)
    out, _ = _sums(src, events, orientation, rule, need_gradient=False)
    vals = out[:, :, 0]
    second = [(vals[1 + 2 * a] - 2.0 * vals[0] + vals[2 + 2 * a]) / (h * h) for a in range(4)]
    residual = second[1] + second[2] + second[3] - second[0]
    return float(np.max(np.abs(residual)))


@dataclass(frozen=True)
class SphericalGauge:
    """Gauge function ``chi = c sin(omega (t - |x - x0|)) / |x - x0|``.

    ``chi`` solves the source-free wave equation away from ``x0``, so the
    shifted potential ``A_mu + chi_{,mu}`` still obeys the Lorenz condition.
    """

    amplitude: float
    omega: float
    center: tuple = (0.0, 0.0, 0.0)

    def derivatives(self, event: Event):
        """``(chi, chi_{,mu}, chi_{,mu nu})`` at the event."""
        d = event.spatial - np.asarray(self.center, dtype=float)
        r = float(np.linalg.norm(d))
        n = d / r
        c, w = self.amplitude, self.omega
        s, co = math.sin(w * (event.t - r)), math.cos(w * (event.t - r))
        g = c * s / r
        g_t = c * w * co / r
        g_r = -c * w * co / r - c * s / r**2
        g_tt = -c * w * w * s / r
        g_tr = c * w * w * s / r - c * w * co / r**2
        g_rr = -c * w * w * s / r + 2 * c * w * co / r**2 + 2 * c * s / r**3
        grad = np.concatenate(([g_t], g_r * n))
        hess = np.empty((4, 4))
        hess[0, 0] = g_tt
        hess[0, 1:] = hess[1:, 0] = g_tr * n
        hess[1:, 1:] = g_rr * np.outer(n, n) + g_r / r * (np.eye(3) - np.outer(n, n))
        hess = 0.5 * (hess + hess.T)
        return g, grad, hess

    def apply(self, sample: PotentialSample) -> PotentialSample:
        _, grad, hess = self.derivatives(sample.event)
        a_co = sample.potential.lowered().components + grad
        jac = Tensor2(sample.jacobian.components + hess)
        d_contra = ETA.diagonal()[:, None] * jac.components
        return PotentialSample(
            event=sample.event,
            potential=CoVector(a_co).raised(),
            jacobian=jac,
            field=alternate(jac),
            lorenz=float(np.trace(d_contra)),
        )
