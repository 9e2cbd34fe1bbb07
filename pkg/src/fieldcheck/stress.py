"""Stress-energy tensors, radiated energy-momentum flux and Gauss-law charge."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .asymptotics import extract_B, extract_psi
from .minkowski import ETA, CoVector, Event, NullDirection, Orientation, Tensor2, minkowski_square
from .quadrature import SphereRule, pairwise_sum
from .solver import DEFAULT_RULE, scalar_samples, vector_potentials
from .sources import CurrentSource, ScalarSource

FOUR_PI = 4.0 * math.pi
EXACT = "exact-integrand"
ASYMPTOTIC = "asymptotic-amplitude"


class StressError(ValueError):
    pass


@dataclass(frozen=True)
class StressTensor:
    components: Tensor2  # covariant T_{mu nu}
    lagrangian: float | None = None

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.components.components)

    def mixed_flux(self, n) -> np.ndarray:
        """``T^s_mu n^s`` summed over the spatial index ``s``."""
        t = self.array
        return -np.asarray(n) @ t[1:, :]

    def trace(self) -> float:
        return float(np.sum(ETA * self.array))


@dataclass(frozen=True)
class FluxVector:
    W: CoVector
    radius: float
    method: str
    time: float | None = None

    @property
    def energy(self) -> float:
        return float(self.W[0])

    def to_dict(self):
        return {"W": self.W.components.tolist(), "radius": self.radius, "method": self.method, "time": self.time}


def scalar_stress(grad: CoVector) -> StressTensor:
    """``T_{mu nu} = L eta_{mu nu} + phi_{,mu} phi_{,nu} / 4 pi`` with ``L = -phi_{,rho} phi^{,rho} / 8 pi``."""
    g = np.asarray(grad.components)
    L = -minkowski_square(grad) / (2.0 * FOUR_PI)
    T = L * ETA + np.outer(g, g) / FOUR_PI
    return StressTensor(Tensor2(0.5 * (T + T.T)), L)


def em_stress(f: Tensor2) -> StressTensor:
    """``4 pi T_{mu nu} = (1/4) eta_{mu nu} f_{rho sigma} f^{rho sigma} - f_{mu rho} f_nu^rho``."""
    fc = np.asarray(f.covariant().components)
    if not np.allclose(fc, -fc.T, rtol=0.0, atol=1e-14 * max(1.0, np.max(np.abs(fc)))):
        raise StressError("field tensor is not antisymmetric")
    f_up = ETA @ fc @ ETA
    invariant = float(np.sum(fc * f_up))
    f_mixed = fc @ ETA  # f_nu^rho
    T = (0.25 * ETA * invariant - fc @ f_mixed.T) / FOUR_PI
    return StressTensor(Tensor2(0.5 * (T + T.T)))


def _surface(src, radius, t, sphere: SphereRule):
    rule = sphere.at_radius(radius)
    c = np.asarray(src.center)
    events = [Event.at(t, c + radius * n) for n in rule.directions]
    return rule, events


def flux(field_at, sphere: SphereRule, radius: float | None = None, time=None) -> FluxVector:
    """``W_mu = oint T^s_mu n^s dS`` from a callable ``direction -> StressTensor``."""
    rule = sphere if radius is None else sphere.at_radius(radius)
    integrand = np.array([field_at(n).mixed_flux(n) for n in rule.directions])
    W = [pairwise_sum(rule.weights * integrand[:, mu]) for mu in range(4)]
    return FluxVector(CoVector(W), rule.radius, EXACT, time)


def phase_locked_time(u0: float, radius: float, orientation=Orientation.RETARDED) -> float:
    return u0 + Orientation.parse(orientation).sign * radius


def scalar_flux(src: ScalarSource, radius: float, u0: float, sphere: SphereRule = SphereRule(), orientation=Orientation.RETARDED, rule=DEFAULT_RULE, method=EXACT) -> FluxVector:
    """Radiated energy-momentum per unit time through a sphere at fixed emission phase ``u0``."""
    orientation = Orientation.parse(orientation)
    t = phase_locked_time(u0, radius, orientation)
    surf, events = _surface(src, radius, t, sphere)
    samples = scalar_samples(src, events, orientation, rule)
    if method == EXACT:
        stresses = {i: scalar_stress(s.gradient) for i, s in enumerate(samples)}
        integrand = np.array([stresses[i].mixed_flux(n) for i, n in enumerate(surf.directions)])
    elif method == ASYMPTOTIC:
        rows = []
        for n, s in zip(surf.directions, samples):
            d = NullDirection(tuple(n), orientation)
            psi, _ = extract_psi(s.gradient, d)
            rows.append(psi * psi * d.k_co.components / FOUR_PI)
        integrand = np.array(rows)
    else:
        raise ValueError(f"unknown flux method {method!r}")
    W = [pairwise_sum(surf.weights * integrand[:, mu]) for mu in range(4)]
    return FluxVector(CoVector(W), radius, method, t)


def em_flux(src: CurrentSource, radius: float, u0: float, sphere: SphereRule = SphereRule(), orientation=Orientation.RETARDED, rule=DEFAULT_RULE, method=EXACT, gauge=None) -> FluxVector:
    orientation = Orientation.parse(orientation)
    t = phase_locked_time(u0, radius, orientation)
    surf, events = _surface(src, radius, t, sphere)
    samples = vector_potentials(src, events, orientation, rule, gauge)
    if method == EXACT:
        integrand = np.array([em_stress(s.field).mixed_flux(n) for n, s in zip(surf.directions, samples)])
    elif method == ASYMPTOTIC:
        rows = []
        for n, s in zip(surf.directions, samples):
            d = NullDirection(tuple(n), orientation)
            B = extract_B(s.jacobian)
            rows.append(-minkowski_square(B) * d.k_co.components / FOUR_PI)
        integrand = np.array(rows)
    else:
        raise ValueError(f"unknown flux method {method!r}")
    W = [pairwise_sum(surf.weights * integrand[:, mu]) for mu in range(4)]
    return FluxVector(CoVector(W), radius, method, t)


def time_averaged_flux(flux_fn, omega: float, samples: int = 8, u_start: float = 0.0) -> FluxVector:
    """Average ``flux_fn(u0)`` over one period with the trapezoid rule (exact for harmonic products)."""
    period = 2.0 * math.pi / omega
    fluxes = [flux_fn(u_start + period * i / samples) for i in range(samples)]
    W = np.mean([f.W.components for f in fluxes], axis=0)
    return FluxVector(CoVector(W), fluxes[0].radius, fluxes[0].method + ":period-average", None)


def gauss_charge(src: CurrentSource, radius: float, t: float, sphere: SphereRule = SphereRule(), rule=DEFAULT_RULE, orientation=Orientation.RETARDED, gauge=None) -> float:
    """``e = (1/4 pi) oint f^{k0} n^k dS`` with ``f`` from the solver."""
    surf, events = _surface(src, radius, t, sphere)
    samples = vector_potentials(src, events, orientation, rule, gauge)
    radial = []
    for n, s in zip(surf.directions, samples):
        f_up = s.field.contravariant().components
        radial.append(float(np.dot(f_up[1:, 0], n)))
    return pairwise_sum(surf.weights * np.array(radial)) / FOUR_PI
