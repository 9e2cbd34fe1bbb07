"""Flat spacetime conventions.

Coordinates are ``x^0 = t`` and ``(x^1, x^2, x^3)`` Cartesian, with c = 1.
Indices are raised and lowered with the metric ``diag(+1, -1, -1, -1)``.

Index position is carried by the type: :class:`CoVector` holds lower-index
components, :class:`ContraVector` upper-index ones, and :func:`contract`
refuses to pair two vectors of the same kind.

Two-index alternation is ``A_[nu,mu] = A_{nu,mu} - A_{mu,nu}`` with no 1/2
factor. That is the convention under which ``A_{rho,sigma} = B_rho k_sigma``
produces ``f_{mu nu} = k_mu B_nu - k_nu B_mu``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

ETA = np.diag([1.0, -1.0, -1.0, -1.0])
ETA.setflags(write=False)
ETA_INV = ETA  # the Minkowski metric is its own inverse
DELTA3 = np.eye(3)
DELTA3.setflags(write=False)

_SIGN = np.array([1.0, -1.0, -1.0, -1.0])


def _frozen(values, shape) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(shape)
    arr.setflags(write=False)
    return arr


class Orientation(str, Enum):
    RETARDED = "retarded"
    ADVANCED = "advanced"

    @property
    def sign(self) -> float:
        """+1 for retarded (emission at t - R), -1 for advanced (t + R)."""
        return 1.0 if self is Orientation.RETARDED else -1.0

    def flipped(self) -> "Orientation":
        if self is Orientation.RETARDED:
            return Orientation.ADVANCED
        return Orientation.RETARDED

    @classmethod
    def parse(cls, value) -> "Orientation":
        if isinstance(value, cls):
            return value
        return cls(str(value).lower())


@dataclass(frozen=True)
class Event:
    t: float
    x: float
    y: float
    z: float

    @classmethod
    def at(cls, t: float, point) -> "Event":
        px, py, pz = (float(c) for c in point)
        return cls(float(t), px, py, pz)

    @property
    def spatial(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    @property
    def coords(self) -> np.ndarray:
        return np.array([self.t, self.x, self.y, self.z])

    @property
    def r(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    @property
    def n(self) -> np.ndarray:
        r = self.r
        if r == 0.0:
            raise ValueError("direction undefined at the spatial origin")
        return self.spatial / r

    def shifted(self, dt=0.0, dx=0.0, dy=0.0, dz=0.0) -> "Event":
        return Event(self.t + dt, self.x + dx, self.y + dy, self.z + dz)


class _FourVector:
    __slots__ = ("components",)

    def __init__(self, components):
        object.__setattr__(self, "components", _frozen(components, (4,)))

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def __getitem__(self, i):
        return self.components[i]

    def __iter__(self):
        return iter(self.components)

    def __len__(self):
        return 4

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.components, dtype=dtype)

    def __eq__(self, other):
        return type(other) is type(self) and bool(np.all(self.components == other.components))

    def __hash__(self):
        return hash((type(self).__name__, tuple(self.components)))

    def __add__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return type(self)(self.components + other.components)

    def __sub__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return type(self)(self.components - other.components)

    def __mul__(self, scalar):
        if isinstance(scalar, _FourVector):
            return NotImplemented
        return type(self)(self.components * float(scalar))

    __rmul__ = __mul__

    def __neg__(self):
        return type(self)(-self.components)

    def euclidean_norm(self) -> float:
        return float(np.linalg.norm(self.components))

    def __repr__(self):
        vals = ", ".join(f"{c:.6g}" for c in self.components)
        return f"{type(self).__name__}({vals})"


class CoVector(_FourVector):
    """Lower-index four-vector ``a_mu``."""

    __slots__ = ()

    def raised(self) -> "ContraVector":
        return raise_index(self)


class ContraVector(_FourVector):
    """Upper-index four-vector ``a^mu``."""

    __slots__ = ()

    def lowered(self) -> CoVector:
        return lower_index(self)

    @property
    def spatial(self) -> np.ndarray:
        return self.components[1:].copy()


def raise_index(v: CoVector) -> ContraVector:
    if not isinstance(v, CoVector):
        raise TypeError(f"raise_index expects a CoVector, got {type(v).__name__}")
    return ContraVector(_SIGN * v.components)


def lower_index(v: ContraVector) -> CoVector:
    if not isinstance(v, ContraVector):
        raise TypeError(f"lower_index expects a ContraVector, got {type(v).__name__}")
    return CoVector(_SIGN * v.components)


def contract(a, b) -> float:
    """``a_nu b^nu`` for one covariant and one contravariant vector (either order)."""
    if isinstance(a, CoVector) and isinstance(b, ContraVector):
        return float(np.dot(a.components, b.components))
    if isinstance(a, ContraVector) and isinstance(b, CoVector):
        return float(np.dot(a.components, b.components))
    raise TypeError(
        f"cannot contract {type(a).__name__} with {type(b).__name__} without the metric"
    )


def minkowski_square(v) -> float:
    """``v_mu v^mu`` for a vector of either index position."""
    return float(np.dot(_SIGN * v.components, v.components))


class IndexPosition(str, Enum):
    CO = "co"
    CONTRA = "contra"


_CO_CO = (IndexPosition.CO, IndexPosition.CO)


class Tensor2:
    """Rank-2 tensor with tagged index positions.

    ``antisymmetric=True`` is only accepted for components that satisfy
    ``F[i, j] == -F[j, i]`` exactly.
    """

    __slots__ = ("components", "positions", "antisymmetric")

    def __init__(self, components, positions=_CO_CO, antisymmetric=False):
        comps = _frozen(components, (4, 4))
        pos = tuple(IndexPosition(p) for p in positions)
        if antisymmetric and not np.array_equal(comps, -comps.T):
            raise ValueError("components are not exactly antisymmetric")
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "antisymmetric", bool(antisymmetric))

    def __setattr__(self, name, value):
        raise AttributeError("Tensor2 is immutable")

    def __getitem__(self, idx):
        return self.components[idx]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.components, dtype=dtype)

    def __repr__(self):
        tag = "/".join(p.value for p in self.positions)
        return f"Tensor2<{tag}>({self.components.tolist()})"

    def _move(self, target) -> np.ndarray:
        out = self.components
        for axis, (cur, want) in enumerate(zip(self.positions, target)):
            if cur != want:
                shape = [1, 1]
                shape[axis] = 4
                out = out * _SIGN.reshape(shape)
        return out

    def with_positions(self, first, second) -> "Tensor2":
        target = (IndexPosition(first), IndexPosition(second))
        return Tensor2(self._move(target), target, self.antisymmetric)

    def covariant(self) -> "Tensor2":
        return self.with_positions("co", "co")

    def contravariant(self) -> "Tensor2":
        return self.with_positions("contra", "contra")

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.components)))


def alternate(grad: Tensor2) -> Tensor2:
    """``f_{mu nu} = A_{nu,mu} - A_{mu,nu}`` from ``grad[rho, sigma] = A_{rho,sigma}``."""
    a = np.asarray(grad.components)
    f = a.T - a  # IEEE subtraction is exactly anti-commutative
    return Tensor2(f, grad.positions, antisymmetric=True)


def wedge(k: CoVector, b: CoVector) -> np.ndarray:
    """``k_mu b_nu - k_nu b_mu`` as a plain array."""
    kc, bc = k.components, b.components
    return np.outer(kc, bc) - np.outer(bc, kc)


@dataclass(frozen=True)
class NullDirection:
    """Spatial unit vector ``n`` with its outgoing (retarded) or incoming null vector.

    ``k^sigma = (1, n)`` for retarded, ``(1, -n)`` for advanced.
    """

    n: tuple
    orientation: Orientation = Orientation.RETARDED

    def __post_init__(self):
        vec = np.asarray(self.n, dtype=float).reshape(3)
        if not np.all(np.isfinite(vec)):
            raise ValueError("direction must be finite")
        object.__setattr__(self, "n", tuple(float(c) for c in vec))
        object.__setattr__(self, "orientation", Orientation.parse(self.orientation))
        if abs(np.linalg.norm(vec) - 1.0) > 1e-12:
            raise ValueError(f"direction {tuple(vec)} is not a unit vector")

    @classmethod
    def towards(cls, vector, orientation=Orientation.RETARDED) -> "NullDirection":
        vec = np.asarray(vector, dtype=float)
        norm = np.linalg.norm(vec)
        if norm == 0.0:
            raise ValueError("zero vector has no direction")
        return cls(tuple(vec / norm), orientation)

    @property
    def unit(self) -> np.ndarray:
        return np.array(self.n)

    @property
    def spatial_k(self) -> np.ndarray:
        """Spatial part of ``k^sigma``: ``n`` (retarded) or ``-n`` (advanced)."""
        return self.orientation.sign * self.unit

    @property
    def k_contra(self) -> ContraVector:
        return ContraVector(np.concatenate(([1.0], self.spatial_k)))

    @property
    def k_co(self) -> CoVector:
        return lower_index(self.k_contra)

    def flipped(self) -> "NullDirection":
        return NullDirection(self.n, self.orientation.flipped())
