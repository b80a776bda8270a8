"""The Engel group in exponential-like coordinates (x1, x2, y, z).

Left-invariant frame X1..X4, the Lorentzian metric on span{X1, X2}
(g(X1, X1) = -1, g(X2, X2) = 1) and causal classification of horizontal
vectors.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

LIGHTCONE_BAND = 1e-14


@dataclass(frozen=True)
class GroupPoint:
    x1: float
    x2: float
    y: float
    z: float

    def __post_init__(self):
        if not all(np.isfinite(v) for v in (self.x1, self.x2, self.y, self.z)):
            raise ValueError(f"non-finite group coordinates {self}")

    @classmethod
    def identity(cls) -> GroupPoint:
        return cls(0.0, 0.0, 0.0, 0.0)

    @classmethod
    def from_array(cls, a) -> GroupPoint:
        x1, x2, y, z = (float(v) for v in a)
        return cls(x1, x2, y, z)

    def as_array(self) -> np.ndarray:
        return np.array([self.x1, self.x2, self.y, self.z])

    def __iter__(self):
        return iter((self.x1, self.x2, self.y, self.z))


@dataclass(frozen=True)
class HorizontalVector:
    """Coefficients of u1 X1 + u2 X2."""

    u1: float
    u2: float

    def norm2(self) -> float:
        return -self.u1 ** 2 + self.u2 ** 2


class Causal(str, Enum):
    TIMELIKE = "timelike"
    SPACELIKE = "spacelike"
    LIGHTLIKE = "lightlike"
    ZERO = "zero"


def group_mul(p: GroupPoint, q: GroupPoint) -> GroupPoint:
    x1, x2, y, z = p
    a1, a2, b, w = q
    return GroupPoint(
        x1 + a1,
        x2 + a2,
        y + b + (x1 * a2 - a1 * x2) / 2.0,
        z + w + x2 * a2 * (x2 + a2) / 2.0 + x1 * b + x1 * a2 * (x1 + a1) / 2.0,
    )


def group_inv(p: GroupPoint) -> GroupPoint:
    # the bracket terms vanish for collinear (x1, x2); only z picks up x1*y
    x1, x2, y, z = p
    return GroupPoint(-x1, -x2, -y, -z + x1 * y)


def lmul_array(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Vectorised group law on (..., 4) arrays."""
    x1, x2, y, z = np.moveaxis(np.asarray(p, dtype=float), -1, 0)
    a1, a2, b, w = np.moveaxis(np.asarray(q, dtype=float), -1, 0)
    return np.stack([
        x1 + a1,
        x2 + a2,
        y + b + (x1 * a2 - a1 * x2) / 2.0,
        z + w + x2 * a2 * (x2 + a2) / 2.0 + x1 * b + x1 * a2 * (x1 + a1) / 2.0,
    ], axis=-1)


def frame_at(q: GroupPoint) -> np.ndarray:
    """Columns X1(q), X2(q), X3(q), X4(q) as a 4x4 matrix."""
    x1, x2, _, _ = q
    return np.array([
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [-x2 / 2.0, x1 / 2.0, 1.0, 0.0],
        [0.0, (x1 ** 2 + x2 ** 2) / 2.0, x1, 1.0],
    ])


def frame_jacobians(q: GroupPoint) -> list[np.ndarray]:
    """d X_i / d q for each frame field (exact, the fields are polynomial)."""
    x1, x2, _, _ = q
    d1 = np.zeros((4, 4))
    d1[2, 1] = -0.5
    d2 = np.zeros((4, 4))
    d2[2, 0] = 0.5
    d2[3, 0] = x1
    d2[3, 1] = x2
    d3 = np.zeros((4, 4))
    d3[3, 0] = 1.0
    return [d1, d2, d3, np.zeros((4, 4))]


def lie_bracket(i: int, j: int, q: GroupPoint) -> np.ndarray:
    """Coordinate vector of [X_i, X_j](q), indices 1-based."""
    frame = frame_at(q)
    jac = frame_jacobians(q)
    xi, xj = frame[:, i - 1], frame[:, j - 1]
    return jac[j - 1] @ xi - jac[i - 1] @ xj


def metric(v: HorizontalVector, w: HorizontalVector) -> float:
    return -v.u1 * w.u1 + v.u2 * w.u2


def causal_class(v: HorizontalVector) -> Causal:
    """Causal character; the zero vector is reported as ``ZERO``.

    By the usual convention the zero vector also counts as spacelike, see
    :func:`is_spacelike`.
    """
    if v.u1 == 0.0 and v.u2 == 0.0:
        return Causal.ZERO
    g = v.norm2()
    scale = max(v.u1 ** 2, v.u2 ** 2)
    if abs(g) <= LIGHTCONE_BAND * scale:
        return Causal.LIGHTLIKE
    return Causal.TIMELIKE if g < 0 else Causal.SPACELIKE


def is_spacelike(v: HorizontalVector) -> bool:
    return causal_class(v) in (Causal.SPACELIKE, Causal.ZERO)


def horizontal_coeffs(q: GroupPoint, qdot) -> HorizontalVector:
    """Express a tangent vector at q in the frame; raises if not horizontal."""
    coeffs = np.linalg.solve(frame_at(q), np.asarray(qdot, dtype=float))
    scale = max(1.0, float(np.max(np.abs(qdot))))
    if abs(coeffs[2]) > 1e-6 * scale or abs(coeffs[3]) > 1e-6 * scale:
        raise ValueError(f"vector {qdot} is not horizontal at {q}")
    return HorizontalVector(float(coeffs[0]), float(coeffs[1]))
