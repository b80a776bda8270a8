"""Discrete symmetries eps^1, eps^2, eps^3 (and eps^0) of the exponential map.

Each symmetry acts on covectors (the preimage) and on group points (the
image).  Reflections that reverse time act on the covector through the
endpoint of the vertical flow; the others act on the covector directly.
The preimage maps here are the ones induced by the reflections of whole
extremals, which is what makes Exp equivariant.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from . import elliptic as ell
from .engel import Causal, GroupPoint
from .expmap import exp, t_supr
from .vertical import (
    ELLIPTIC_STRATA,
    Covector,
    Stratum,
    StratumError,
    classify,
    eps0_points,
    integrate,
    rectify,
    vertical_flow,
)

FIXED_BAND = 1e-10

Signs = tuple[int, int, int]


@dataclass(frozen=True)
class SymmetryAction:
    index: int
    causal: Causal
    signs: Signs  # multipliers on (theta, c, alpha)
    image_map: Callable[[np.ndarray], np.ndarray]
    time_reversing: bool

    def preimage_map(self, theta, c, alpha):
        s1, s2, s3 = self.signs
        return s1 * theta, s2 * c, s3 * alpha


def _tl_image(i: int, q: np.ndarray) -> np.ndarray:
    x1, x2, y, z = np.moveaxis(q, -1, 0)
    if i == 1:
        out = (x1, -x2, -y, -z)
    elif i == 2:
        out = (x1, x2, -y, z - x1 * y)
    else:
        out = (x1, -x2, y, x1 * y - z)
    return np.stack(out, axis=-1)


def _sl_image(i: int, q: np.ndarray) -> np.ndarray:
    x1, x2, y, z = np.moveaxis(q, -1, 0)
    if i == 1:
        out = (x1, x2, -y, z - x1 * y)
    elif i == 2:
        out = (-x1, x2, y, z - x1 * y)
    else:
        out = (-x1, x2, -y, z)
    return np.stack(out, axis=-1)


_TL_SIGNS = {1: (-1, -1, -1), 2: (1, -1, 1), 3: (-1, 1, -1)}
_SL_SIGNS = {1: (1, -1, 1), 2: (-1, 1, 1), 3: (-1, -1, 1)}
# the spacelike displays for eps^1 and eps^3 also flip alpha; kept for audit
PRINTED_SL_SIGNS = {1: (1, -1, -1), 2: (-1, 1, 1), 3: (-1, -1, -1)}

ACTIONS: dict[tuple[Causal, int], SymmetryAction] = {}
for _i in (1, 2, 3):
    ACTIONS[(Causal.TIMELIKE, _i)] = SymmetryAction(
        _i, Causal.TIMELIKE, _TL_SIGNS[_i], lambda q, i=_i: _tl_image(i, q), _i != 1)
    ACTIONS[(Causal.SPACELIKE, _i)] = SymmetryAction(
        _i, Causal.SPACELIKE, _SL_SIGNS[_i], lambda q, i=_i: _sl_image(i, q), _i != 3)


def action(i: int, causal) -> SymmetryAction:
    if i not in (1, 2, 3):
        raise ValueError(f"symmetry index must be 1, 2 or 3, got {i}")
    return ACTIONS[(Causal(causal), i)]


def compose_signs(a: Signs, b: Signs) -> Signs:
    return tuple(x * y for x, y in zip(a, b))


# ------------------------------------------------------------ preimage / image

def apply_preimage(i: int, lam: Covector, t: float, signs: Signs | None = None) -> tuple[Covector, float]:
    """(lambda^i, t).  ``signs`` overrides the map, e.g. with PRINTED_SL_SIGNS[i]."""
    act = action(i, lam.causal)
    s1, s2, s3 = signs or act.signs
    if act.time_reversing:
        th, c = vertical_flow(lam, t)
        th, c = float(th), float(c)
    else:
        th, c = lam.theta, lam.c
    return replace(lam, theta=s1 * th, c=s2 * c, alpha=s3 * lam.alpha), t


def apply_image(i: int, q, causal) -> GroupPoint | np.ndarray:
    """Endpoint map; GroupPoint in, GroupPoint out, arrays (..., 4) pass through."""
    act = action(i, causal)
    if isinstance(q, GroupPoint):
        return GroupPoint.from_array(act.image_map(q.as_array()))
    return act.image_map(np.asarray(q, dtype=float))


def eps0_preimage(lam: Covector) -> Covector:
    """Other branch of h1 (timelike) or h2 (spacelike) with the same extremal up to eps^0."""
    if lam.causal is Causal.TIMELIKE:
        return replace(lam, c=-lam.c, branch_sign=-lam.branch_sign)
    return replace(lam, c=-lam.c, alpha=-lam.alpha, branch_sign=-lam.branch_sign)


def eps0_image(q, causal):
    return eps0_points(causal, np.asarray(q, dtype=float))


def check_commutation(i: int, lam: Covector, t: float, signs: Signs | None = None) -> float:
    """|Exp(eps^i(lambda, t)) - eps^i(Exp(lambda, t))|, raising outside the domain."""
    lam_i, _ = apply_preimage(i, lam, t, signs)
    lhs = exp(lam_i, t)
    rhs = apply_image(i, exp(lam, t), lam.causal)
    return float(np.max(np.abs(lhs - rhs)))


def endpoint_residual(i: int, lam: Covector, T: float, n: int = 10_000) -> float:
    """Endpoint lemma checked by integration alone: RK4 from eps^i(lambda, T)
    against eps^i applied to the RK4 endpoint from lambda."""
    lam_i, _ = apply_preimage(i, lam, T)
    q = integrate(lam, T, n).points[-1]
    qi = integrate(lam_i, T, n).points[-1]
    return float(np.max(np.abs(qi - apply_image(i, q, lam.causal))))


# ------------------------------------------------------------ fixed points

def _zero(v) -> bool:
    return abs(float(v)) < FIXED_BAND


def fixed_image(i: int, q, causal) -> bool:
    x1, x2, y, z = (float(v) for v in (q if not isinstance(q, GroupPoint) else q.as_array()))
    action(i, causal)
    if Causal(causal) is Causal.TIMELIKE:
        if i == 1:
            return _zero(x2) and _zero(y) and _zero(z)
        if i == 2:
            return _zero(y)
        return _zero(x2) and _zero(z - x1 * y / 2.0)
    if i == 1:
        return _zero(y)
    if i == 2:
        return _zero(x1)
    return _zero(x1) and _zero(y)


def midpoint_jacobi(lam: Covector, t: float):
    """sn, cn at tau = (psi_t + psi_0)/2, from rectified coordinates."""
    rc = rectify(lam)
    tau = rc.psi0 + rc.ae * t / 2.0
    jb = rc.jacobi(tau)
    return jb.sn, jb.cn, tau


def fixed_preimage(i: int, lam: Covector, t: float) -> bool:
    """Whether eps^i(lambda, t) = (lambda, t), by the per-stratum conditions."""
    action(i, lam.causal)
    red, _ = lam.reduced()
    st = classify(red)
    th, c = red.theta, red.c
    if st.timelike:
        if i == 1:
            return st is Stratum.TL_C00 and _zero(th)
        if i == 2:
            if st is Stratum.TL_C00:
                return True
            if st in (Stratum.TL_CPLUS, Stratum.TL_CMINUS):
                return _zero(midpoint_jacobi(red, t)[2])
            return False
        # theta at the midpoint: theta' = -c
        if st in (Stratum.TL_C0, Stratum.TL_C00):
            return _zero(th - c * t / 2.0)
        return False
    if st in (Stratum.LIGHT_PLUS, Stratum.LIGHT_MINUS):
        raise StratumError("no preimage chart for lightlike extremals")
    if i == 1:
        if st in (Stratum.SL_C1, Stratum.SL_C2):
            return _zero(midpoint_jacobi(red, t)[0])
        if st in (Stratum.SL_C5, Stratum.SL_C7):
            return _zero(c)
        return False
    if i == 2:
        if st is Stratum.SL_C1:
            return _zero(midpoint_jacobi(red, t)[1])
        if st is Stratum.SL_C3:
            return _zero(midpoint_jacobi(red, t)[0])
        if st in (Stratum.SL_C5, Stratum.SL_C6, Stratum.SL_C7):
            return _zero(th - c * t / 2.0)
        return False
    if st in (Stratum.SL_C5, Stratum.SL_C7):
        return _zero(th) and _zero(c)
    return False


def preimage_is_fixed_direct(i: int, lam: Covector, t: float, tol: float = 1e-9) -> bool:
    """Brute-force counterpart of fixed_preimage: compare eps^i(lambda, t) with lambda."""
    lam_i, _ = apply_preimage(i, lam, t)
    return (abs(lam_i.theta - lam.theta) < tol and abs(lam_i.c - lam.c) < tol
            and abs(lam_i.alpha - lam.alpha) < tol)


def valid_time(lam: Covector, t: float) -> bool:
    """t lies below t_supr for lambda and for each of its symmetric images."""
    if not 0 < t < t_supr(lam):
        return False
    for i in (1, 2, 3):
        lam_i, _ = apply_preimage(i, lam, t)
        if not t < t_supr(lam_i):
            return False
    return True


__all__ = [
    "ACTIONS", "ELLIPTIC_STRATA", "FIXED_BAND", "PRINTED_SL_SIGNS", "SymmetryAction",
    "action", "apply_image", "apply_preimage", "check_commutation", "compose_signs",
    "endpoint_residual", "eps0_image", "eps0_preimage", "fixed_image", "fixed_preimage",
    "midpoint_jacobi", "preimage_is_fixed_direct", "valid_time",
]
