"""Fields along null rays: falloff fits, radiation amplitudes, condition checks.

Samples along a ray are phase-locked: at radius ``r`` the event is taken at
``t = u0 + r`` for a retarded ladder and ``t = u0 - r`` for an advanced one, so
the emission phase stays fixed and the fits see the ``1/r`` law rather than
the time profile of the source.

A quantity is declared ``O(r^-k)`` when the log-log slope of its magnitude
along the ladder is at least ``k - slack``. Magnitudes below
:data:`AMPLITUDE_FLOOR` count as identically zero; if every sample is below
the floor the check passes vacuously.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .minkowski import (
    CoVector,
    Event,
    NullDirection,
    Orientation,
    Tensor2,
    contract,
    minkowski_square,
    wedge,
)
from .solver import DEFAULT_RULE, scalar_samples, vector_potentials

AMPLITUDE_FLOOR = 1e-14
MIN_SAMPLES = 4
SIGN_FLOOR = 1e-12

# exponent targets and slack
DEFAULT_THRESHOLDS = {
    "potential": (1.0, 0.1),
    "amplitude": (1.0, 0.1),
    "residual": (2.0, 0.15),
    "sommerfeld": (1.0, 0.15),
}


class InsufficientDataError(ValueError):
    pass


@dataclass(frozen=True)
class FalloffFit:
    exponent: float
    amplitude: float
    max_residual: float
    n_samples: int

    def to_dict(self):
        return {
            "exponent": self.exponent,
            "amplitude": self.amplitude,
            "max_residual": self.max_residual,
            "n_samples": self.n_samples,
        }


def fit_falloff(samples, floor: float = AMPLITUDE_FLOOR) -> FalloffFit:
    """Least-squares fit of ``log|value| = log M - k log r``."""
    data = np.asarray(list(samples), dtype=float).reshape(-1, 2)
    r, v = data[:, 0], np.abs(data[:, 1])
    keep = (v >= floor) & np.isfinite(v) & (r > 0)
    if keep.sum() < MIN_SAMPLES:
        raise InsufficientDataError(
            f"need at least {MIN_SAMPLES} samples above {floor:g}, have {int(keep.sum())}"
        )
    x, y = np.log(r[keep]), np.log(v[keep])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return FalloffFit(-float(slope), float(math.exp(intercept)), float(np.max(np.abs(resid))), int(keep.sum()))


@dataclass(frozen=True)
class RayLadder:
    direction: NullDirection
    u0: float = 0.0
    radii: tuple = ()

    def __post_init__(self):
        radii = tuple(float(r) for r in self.radii)
        if len(radii) < MIN_SAMPLES:
            raise ValueError(f"a ladder needs at least {MIN_SAMPLES} rungs")
        if any(b <= a for a, b in zip(radii, radii[1:])):
            raise ValueError("ladder radii must be strictly increasing")
        object.__setattr__(self, "radii", radii)

    @classmethod
    def geometric(cls, direction: NullDirection, r0: float, growth: float = math.sqrt(2.0), rungs: int = 12, u0: float = 0.0) -> "RayLadder":
        if not growth > 1:
            raise ValueError("ladder growth factor must exceed 1")
        return cls(direction, u0, tuple(r0 * growth**i for i in range(rungs)))

    @classmethod
    def default_for(cls, source, direction: NullDirection, u0: float = 0.0) -> "RayLadder":
        a = source.radius
        omega = source.max_omega
        r0 = 20.0 * a * max(1.0, 1.0 / omega if omega > 0 else 1.0)
        return cls.geometric(direction, r0, u0=u0)

    @property
    def orientation(self) -> Orientation:
        return self.direction.orientation

    def events(self, center=(0.0, 0.0, 0.0)) -> list[Event]:
        n = self.direction.unit
        sign = self.orientation.sign
        c = np.asarray(center, dtype=float)
        return [Event.at(self.u0 + sign * r, c + r * n) for r in self.radii]

    def check_clear_of(self, source) -> None:
        if self.radii[0] <= 2.0 * source.radius:
            raise ValueError(f"ladder starts at r = {self.radii[0]:g}, inside 2a = {2 * source.radius:g}")


@dataclass(frozen=True)
class Condition:
    name: str
    kind: str  # "falloff" or "sign"
    passed: bool
    threshold: float
    measured: float | None = None
    fit: FalloffFit | None = None
    vacuous: bool = False
    note: str = ""

    def to_dict(self):
        out = {
            "name": self.name,
            "kind": self.kind,
            "passed": self.passed,
            "threshold": self.threshold,
            "measured": self.measured,
            "vacuous": self.vacuous,
        }
        if self.fit is not None:
            out["fit"] = self.fit.to_dict()
        if self.note:
            out["note"] = self.note
        return out


@dataclass
class ConditionReport:
    label: str
    conditions: list[Condition] = field(default_factory=list)
    data: dict = field(default_factory=dict)

    @property
    def verdict(self) -> bool:
        return all(c.passed for c in self.conditions)

    def __getitem__(self, name) -> Condition:
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)

    @property
    def failed(self) -> list[str]:
        return [c.name for c in self.conditions if not c.passed]

    def to_dict(self):
        return {
            "label": self.label,
            "verdict": "pass" if self.verdict else "fail",
            "conditions": [c.to_dict() for c in self.conditions],
            "data": self.data,
        }


def falloff_condition(name, radii, values, target, slack, floor=AMPLITUDE_FLOOR) -> Condition:
    values = np.abs(np.asarray(values, dtype=float))
    threshold = target - slack
    if np.all(values < floor):
        return Condition(name, "falloff", True, threshold, None, None, True, "all samples below amplitude floor")
    try:
        fit = fit_falloff(zip(radii, values), floor)
    except InsufficientDataError as exc:
        return Condition(name, "falloff", False, threshold, None, None, False, str(exc))
    return Condition(name, "falloff", fit.exponent >= threshold, threshold, fit.exponent, fit)


def extract_psi(grad: CoVector, direction: NullDirection):
    """Least-squares ``psi`` with ``grad ~ psi k_nu``; returns ``(psi, grad - psi k)``.

    Sums are Euclidean over covariant components because ``k`` has zero
    Minkowski norm.
    """
    k = direction.k_co.components
    g = np.asarray(grad.components)
    psi = float(np.dot(g, k) / np.dot(k, k))
    return psi, CoVector(g - psi * k)


def extract_B(jacobian: Tensor2) -> CoVector:
    """``B_rho = A_{rho,0}``: the ``k_0 = 1`` column of ``A_{rho,sigma} ~ B_rho k_sigma``."""
    return CoVector(np.asarray(jacobian.components)[:, 0])


def _thresholds(overrides):
    th = dict(DEFAULT_THRESHOLDS)
    if overrides:
        th.update({k: tuple(v) for k, v in overrides.items()})
    return th


def verify_scalar(src, ladder: RayLadder, rule=DEFAULT_RULE, orientation=Orientation.RETARDED, thresholds=None) -> ConditionReport:
    """Check ``phi = O(1/r)``, ``phi_{,nu} = psi k_nu + O(1/r^2)`` and the Sommerfeld limit.

    ``orientation`` selects the solution (retarded or advanced); the ladder's
    own orientation fixes ``k`` and the sampling phase.
    """
    ladder.check_clear_of(src)
    th = _thresholds(thresholds)
    orientation = Orientation.parse(orientation)
    direction = ladder.direction
    k_contra = direction.k_contra
    samples = scalar_samples(src, ladder.events(src.center), orientation, rule)
    radii = np.array(ladder.radii)
    phi = np.array([s.value for s in samples])
    psi, resid, sommer = [], [], []
    for r, s in zip(radii, samples):
        p, res = extract_psi(s.gradient, direction)
        psi.append(p)
        resid.append(res.euclidean_norm())
        sommer.append(r * contract(k_contra, s.gradient))
    report = ConditionReport(f"scalar/{orientation.value} solution/{direction.orientation.value} ladder n={direction.n}")
    report.conditions = [
        falloff_condition("phi_falloff", radii, phi, *th["potential"]),
        falloff_condition("psi_falloff", radii, psi, *th["amplitude"]),
        falloff_condition("psi_residual", radii, resid, *th["residual"]),
        falloff_condition("sommerfeld", radii, sommer, *th["sommerfeld"]),
    ]
    report.data = {
        "direction": list(direction.n),
        "ladder_orientation": direction.orientation.value,
        "solution_orientation": orientation.value,
        "u0": ladder.u0,
        "r": radii.tolist(),
        "phi": phi.tolist(),
        "psi": psi,
        "residual_norm": resid,
        "sommerfeld": sommer,
    }
    return report


def _cross(a, b):
    return np.cross(a, b)


def em_rung(sample, direction: NullDirection) -> dict:
    """Amplitude ``B`` and every residual used by :func:`verify_em` at one event."""
    k_co = direction.k_co
    k = k_co.components
    B = extract_B(sample.jacobian)
    Bc = B.components
    jac = sample.jacobian.components
    # spatial part of k^sigma plays the role of n in the vector identities
    n = direction.spatial_k
    B_vec = B.raised().spatial
    E, H = sample.electric, sample.magnetic
    f_asym = wedge(k_co, B)
    return {
        "B": Bc.copy(),
        "jacobian_residual": float(np.linalg.norm(jac - np.outer(Bc, k))),
        "null_contraction": contract(B, direction.k_contra),
        "B_square": minkowski_square(B),
        "field_residual": float(np.linalg.norm(sample.field.components - f_asym)),
        "E_residual": float(np.linalg.norm(E - _cross(_cross(B_vec, n), n))),
        "H_residual": float(np.linalg.norm(H - _cross(B_vec, n))),
    }


def verify_em(src, ladder: RayLadder, rule=DEFAULT_RULE, orientation=Orientation.RETARDED, thresholds=None, gauge=None) -> ConditionReport:
    """Check ``A^mu = O(1/r)``, ``A_{rho,sigma} = B_rho k_sigma + O(1/r^2)``,
    ``B_rho k^rho = O(1/r^2)``, the plane-wave form of ``f`` and the sign of ``B_rho B^rho``."""
    ladder.check_clear_of(src)
    th = _thresholds(thresholds)
    orientation = Orientation.parse(orientation)
    direction = ladder.direction
    samples = vector_potentials(src, ladder.events(src.center), orientation, rule, gauge)
    radii = np.array(ladder.radii)
    rungs = [em_rung(s, direction) for s in samples]
    A = np.array([s.potential.components for s in samples])
    B = np.array([r["B"] for r in rungs])
    col = {key: np.array([r[key] for r in rungs]) for key in rungs[0] if key != "B"}

    conditions = [falloff_condition(f"A{mu}_falloff", radii, A[:, mu], *th["potential"]) for mu in range(4)]
    conditions.append(falloff_condition("B_falloff", radii, np.linalg.norm(B, axis=1), *th["amplitude"]))
    conditions.append(falloff_condition("jacobian_residual", radii, col["jacobian_residual"], *th["residual"]))
    conditions.append(falloff_condition("null_contraction", radii, col["null_contraction"], *th["residual"]))
    conditions.append(falloff_condition("field_structure", radii, col["field_residual"], *th["residual"]))
    conditions.append(falloff_condition("E_structure", radii, col["E_residual"], *th["residual"]))
    conditions.append(falloff_condition("H_structure", radii, col["H_residual"], *th["residual"]))

    scale = np.max(np.sum(B * B, axis=1)) if len(B) else 0.0
    limit = SIGN_FLOOR * scale
    worst = float(np.max(col["B_square"]))
    conditions.append(
        Condition("B_spacelike", "sign", bool(np.all(col["B_square"] <= limit)), limit, worst,
                  note="max over rungs of B_rho B^rho")
    )

    report = ConditionReport(f"maxwell/{orientation.value} solution/{direction.orientation.value} ladder n={direction.n}")
    report.conditions = conditions
    report.data = {
        "direction": list(direction.n),
        "ladder_orientation": direction.orientation.value,
        "solution_orientation": orientation.value,
        "gauge": None if gauge is None else {"amplitude": gauge.amplitude, "omega": gauge.omega},
        "u0": ladder.u0,
        "r": radii.tolist(),
        "A": A.tolist(),
        "B": B.tolist(),
        "lorenz": [s.lorenz for s in samples],
        **{k: v.tolist() for k, v in col.items()},
    }
    return report


def combine(label: str, reports) -> ConditionReport:
    """Merge per-direction reports; the verdict is the conjunction of all conditions."""
    merged = ConditionReport(label)
    merged.data = {"reports": [r.to_dict() for r in reports]}
    for r in reports:
        for c in r.conditions:
            merged.conditions.append(Condition(f"{r.label}:{c.name}", c.kind, c.passed, c.threshold, c.measured, c.fit, c.vacuous, c.note))
    return merged
