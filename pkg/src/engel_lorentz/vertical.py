"""Normal Hamiltonian system of the maximum principle on the Engel group.

Covectors live on the level surfaces H = -1/2 (timelike) or H = +1/2
(spacelike) in the chart (theta, c, alpha).  This module holds the full
Hamiltonian vector field, the fixed-step RK4 oracle, the energy integral,
the stratification of the covector space and the rectifying coordinates in
which the vertical flow becomes phi' = 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from . import elliptic as ell
from .engel import Causal

ZERO_BAND = 1e-12
EDGE = 1e-9


class StratumError(ValueError):
    """Operation is not defined on the covector's stratum."""


class UnresolvedBoundary(StratumError):
    """Spacelike covector sits on E = -alpha but only one of c, theta is zero."""


class InversionError(RuntimeError):
    pass


class Stratum(str, Enum):
    TL_C00 = "TL_C00"
    TL_C0 = "TL_C0"
    TL_CPLUS = "TL_Cplus"
    TL_CMINUS = "TL_Cminus"
    SL_C1 = "SL_C1"
    SL_C2 = "SL_C2"
    SL_C3 = "SL_C3"
    SL_C4 = "SL_C4"
    SL_C5 = "SL_C5"
    SL_C6 = "SL_C6"
    SL_C7 = "SL_C7"
    LIGHT_PLUS = "LIGHT_plus"
    LIGHT_MINUS = "LIGHT_minus"

    @property
    def timelike(self) -> bool:
        return self.value.startswith("TL")

    @property
    def spacelike(self) -> bool:
        return self.value.startswith("SL")


TIMELIKE_STRATA = (Stratum.TL_C00, Stratum.TL_C0, Stratum.TL_CPLUS, Stratum.TL_CMINUS)
SPACELIKE_STRATA = tuple(Stratum(f"SL_C{i}") for i in range(1, 8))
ELLIPTIC_STRATA = (Stratum.TL_CPLUS, Stratum.TL_CMINUS, Stratum.SL_C1, Stratum.SL_C2, Stratum.SL_C3)
RECTIFIABLE = ELLIPTIC_STRATA + (Stratum.SL_C4,)


@dataclass(frozen=True)
class Covector:
    """Initial covector in the (theta, c, alpha) chart.

    ``branch_sign`` is the sign of h1 (timelike) or h2 (spacelike).
    """

    causal: Causal
    theta: float
    c: float
    alpha: float
    branch_sign: int = 1

    def __post_init__(self):
        object.__setattr__(self, "causal", Causal(self.causal))
        if self.causal not in (Causal.TIMELIKE, Causal.SPACELIKE):
            raise ValueError("covector charts exist only for timelike and spacelike extremals")
        if self.branch_sign not in (1, -1):
            raise ValueError(f"branch_sign must be +1 or -1, got {self.branch_sign}")

    def h(self) -> np.ndarray:
        ch, sh = np.cosh(self.theta), np.sinh(self.theta)
        b = self.branch_sign
        if self.causal is Causal.TIMELIKE:
            return np.array([b * ch, sh, self.c, self.alpha])
        return np.array([sh, b * ch, self.c, self.alpha])

    def reduced(self) -> tuple[Covector, int]:
        """Map a branch -1 covector to branch +1 by the symmetry eps^0."""
        if self.branch_sign == 1:
            return self, 1
        if self.causal is Causal.TIMELIKE:
            return replace(self, c=-self.c, branch_sign=1), -1
        return replace(self, c=-self.c, alpha=-self.alpha, branch_sign=1), -1


def eps0_points(causal: Causal, pts: np.ndarray) -> np.ndarray:
    """Action of eps^0 on group points, shape (..., 4)."""
    out = np.array(pts, dtype=float, copy=True)
    if Causal(causal) is Causal.TIMELIKE:
        out[..., 0] *= -1
        out[..., 2] *= -1
    else:
        out[..., 1:] *= -1
    return out


# ------------------------------------------------------------ Hamiltonian

def hamiltonian_H(q, h) -> float:
    """H = (-h1^2 + h2^2)/2 in frame Hamiltonians; q does not enter."""
    h = np.asarray(h, dtype=float)
    return 0.5 * (-h[..., 0] ** 2 + h[..., 1] ** 2)


def full_rhs(state, causal, branch_sign: int = 1) -> np.ndarray:
    """Hamiltonian vector field on (x1, x2, y, z, theta, c, alpha), shape (..., 7)."""
    state = np.asarray(state, dtype=float)
    x1, x2, _, _, th, c, al = np.moveaxis(state, -1, 0)
    with np.errstate(over="raise"):
        ch, sh = np.cosh(th), np.sinh(th)
    b = branch_sign
    if Causal(causal) is Causal.TIMELIKE:
        h1, h2 = b * ch, sh
        dth = -b * c
        dc = -al * h1
    else:
        h1, h2 = sh, b * ch
        dth = -b * c
        dc = -al * h1
    r2 = (x1 ** 2 + x2 ** 2) / 2.0
    return np.stack([
        -h1,
        h2,
        (x2 * h1 + x1 * h2) / 2.0,
        r2 * h2,
        dth,
        dc,
        np.zeros_like(al),
    ], axis=-1)


def energy(lam: Covector) -> float:
    """E = c^2/2 - h2 * alpha."""
    return 0.5 * lam.c ** 2 - lam.h()[1] * lam.alpha


def energy_of_state(states, causal, branch_sign: int = 1) -> np.ndarray:
    th, c, al = states[..., 4], states[..., 5], states[..., 6]
    h2 = np.sinh(th) if Causal(causal) is Causal.TIMELIKE else branch_sign * np.cosh(th)
    return 0.5 * c ** 2 - h2 * al


def hamiltonian_of_state(states, causal, branch_sign: int = 1) -> np.ndarray:
    """H along states, evaluated as (h2 - |h1|)(h2 + |h1|)/2 (timelike) or
    (|h2| - h1)(|h2| + h1)/2 (spacelike) so that large |theta| does not
    cancel cosh^2 against sinh^2."""
    th = np.asarray(states, dtype=float)[..., 4]
    ep, em = np.exp(th), np.exp(-th)
    # sinh - cosh = -e^{-theta}, sinh + cosh = e^{theta}
    if Causal(causal) is Causal.TIMELIKE:
        return 0.5 * (-em) * ep
    return 0.5 * em * ep


# ------------------------------------------------------------ RK4 oracle

def rk4(rhs, y0, T, n: int, record_every: int = 1) -> np.ndarray:
    """Classical fixed-step RK4 on [0, T]; T may be an array broadcasting
    against the batch dimensions of y0 (..., d).

    Returns states at steps 0, record_every, 2*record_every, ..., n with
    shape (n // record_every + 1, ..., d).
    """
    if n % record_every:
        raise ValueError("record_every must divide n")
    y = np.asarray(y0, dtype=float)
    h = (np.asarray(T, dtype=float) / n)[..., None]
    out = [y]
    for i in range(1, n + 1):
        k1 = rhs(y)
        k2 = rhs(y + 0.5 * h * k1)
        k3 = rhs(y + 0.5 * h * k2)
        k4 = rhs(y + h * k3)
        y = y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if i % record_every == 0:
            out.append(y)
    return np.stack(out)


@dataclass
class ExtremalArc:
    lam: Covector
    stratum: Stratum
    times: np.ndarray
    points: np.ndarray
    theta: np.ndarray
    c: np.ndarray
    t_supr: float = np.inf
    h_drift: float = 0.0
    e_drift: float = 0.0
    extra: dict = field(default_factory=dict)


def initial_state(lam: Covector) -> np.ndarray:
    return np.array([0.0, 0.0, 0.0, 0.0, lam.theta, lam.c, lam.alpha])


def integrate(lam: Covector, T: float, n: int = 10_000, record_every: int = 1) -> ExtremalArc:
    """RK4 oracle for the extremal starting at the identity."""
    if n < 16:
        raise ValueError("need at least 16 steps")
    states = rk4(lambda s: full_rhs(s, lam.causal, lam.branch_sign), initial_state(lam), T, n, record_every)
    if not np.all(np.isfinite(states)):
        raise OverflowError(f"trajectory exploded before T={T}")
    H = hamiltonian_of_state(states, lam.causal, lam.branch_sign)
    E = energy_of_state(states, lam.causal, lam.branch_sign)
    times = np.linspace(0.0, T, states.shape[0])
    return ExtremalArc(
        lam=lam,
        stratum=classify(lam),
        times=times,
        points=states[:, :4],
        theta=states[:, 4],
        c=states[:, 5],
        h_drift=float(np.max(np.abs(H - H[0]))),
        e_drift=float(np.max(np.abs(E - E[0]))),
    )


def integrate_batch(lams: list[Covector], T, n: int = 10_000, record_every: int = 1) -> np.ndarray:
    """RK4 on many covectors of one causal type at once.

    T is a scalar or one horizon per covector.  Returns the full states,
    shape (n // record_every + 1, len(lams), 7).
    """
    causal = {lam.causal for lam in lams}
    if len(causal) != 1:
        raise ValueError("integrate_batch needs covectors of a single causal type")
    (causal,) = causal
    y0 = np.stack([initial_state(lam) for lam in lams])
    b = np.array([lam.branch_sign for lam in lams], dtype=float)
    T = np.broadcast_to(np.asarray(T, dtype=float), (len(lams),))
    return rk4(lambda s: full_rhs(s, causal, b), y0, T, n, record_every)


# ------------------------------------------------------------ strata

def classify(lam: Covector) -> Stratum:
    red, _ = lam.reduced()
    th, c, al = red.theta, red.c, red.alpha
    a0, c0, th0 = abs(al) < ZERO_BAND, abs(c) < ZERO_BAND, abs(th) < ZERO_BAND
    if red.causal is Causal.TIMELIKE:
        if a0:
            return Stratum.TL_C00 if c0 else Stratum.TL_C0
        return Stratum.TL_CPLUS if al > 0 else Stratum.TL_CMINUS
    E = energy(red)
    if a0:
        return Stratum.SL_C7 if c0 else Stratum.SL_C6
    if c0 and th0:
        return Stratum.SL_C5
    if al < 0:
        return Stratum.SL_C1
    gap = _gap(red)
    if abs(gap) < ZERO_BAND:
        if c0 != th0:
            raise UnresolvedBoundary(f"E = -alpha but only one of c, theta vanishes: {lam}")
        return Stratum.SL_C4
    return Stratum.SL_C2 if gap < 0 else Stratum.SL_C3


def sample_covector(stratum: Stratum, rng: np.random.Generator, box: float = 2.0) -> Covector:
    """Random branch +1 covector in the given stratum.

    Open strata are drawn uniformly from [-box, box]^3 by rejection; the
    thin strata are parametrised directly (C4 via c = +-2 sqrt(alpha) sinh(theta/2)).
    """
    def u(lo=-box, hi=box):
        return float(rng.uniform(lo, hi))

    def nonzero(lo=-box, hi=box):
        while True:
            v = u(lo, hi)
            if abs(v) >= ZERO_BAND:
                return v

    tl, sl = Causal.TIMELIKE, Causal.SPACELIKE
    if stratum is Stratum.TL_C00:
        return Covector(tl, u(), 0.0, 0.0)
    if stratum is Stratum.TL_C0:
        return Covector(tl, u(), nonzero(), 0.0)
    if stratum is Stratum.SL_C5:
        return Covector(sl, 0.0, 0.0, nonzero())
    if stratum is Stratum.SL_C6:
        return Covector(sl, u(), nonzero(), 0.0)
    if stratum is Stratum.SL_C7:
        return Covector(sl, u(), 0.0, 0.0)
    if stratum is Stratum.SL_C4:
        th, al = nonzero(), nonzero(0.0, box)
        sgn = 1.0 if rng.random() < 0.5 else -1.0
        return Covector(sl, th, sgn * 2.0 * np.sqrt(al) * np.sinh(th / 2.0), al)
    if stratum in (Stratum.LIGHT_PLUS, Stratum.LIGHT_MINUS):
        raise StratumError("lightlike extremals carry no (theta, c, alpha) chart")
    causal = tl if stratum.timelike else sl
    for _ in range(100_000):
        lam = Covector(causal, u(), u(), u())
        if classify(lam) is stratum:
            return lam
    raise RuntimeError(f"rejection sampling never hit {stratum}")


# ------------------------------------------------------------ rectification

@dataclass(frozen=True)
class RectifiedCoords:
    phi0: float
    energy: float
    alpha: float
    k2: float
    ae: float
    psi0: float
    stratum: Stratum
    sign: int = 1  # sgn alpha (C+-), sgn theta (C2, C4) or sgn c (C3)
    kp2: float | None = None  # 1 - k2 computed without cancellation

    @property
    def kc2(self) -> float:
        return self.kp2 if self.kp2 is not None else 1.0 - self.k2

    @property
    def K(self) -> float:
        return ell.complete_K(self.k2, self.kc2) if self.stratum is not Stratum.SL_C4 else np.inf

    def jacobi(self, psi) -> ell.JacobiBundle:
        return ell.jacobi(psi, self.k2, self.kc2)


def _tl_moduli(E: float, al: float) -> tuple[float, float, float]:
    """(k2, 1 - k2, ae) on C+-, each free of cancellation for small alpha."""
    r = np.hypot(E, al)
    ae = np.sqrt(r / 2.0)
    # k2 = (r + E) / (2r), 1 - k2 = (r - E) / (2r); rewrite the difference via al^2
    if E >= 0:
        hi = (r + E) / (2.0 * r)
        lo = al * al / (2.0 * r * (r + E))
        return hi, lo, ae
    lo = al * al / (2.0 * r * (r - E))
    return lo, (r - E) / (2.0 * r), ae


def _gap(lam: Covector) -> float:
    """E + alpha on the spacelike surface, as c^2/2 - 2 alpha sinh^2(theta/2)."""
    return 0.5 * lam.c ** 2 - 2.0 * lam.alpha * np.sinh(lam.theta / 2.0) ** 2


def _modulus(stratum: Stratum, E: float, al: float, gap: float | None = None) -> tuple[float, float, float]:
    """(k2, 1 - k2, ae) for an elliptic stratum; gap = E + alpha when known accurately."""
    if stratum in (Stratum.TL_CPLUS, Stratum.TL_CMINUS):
        return _tl_moduli(E, al)
    gap = E + al if gap is None else gap
    if stratum is Stratum.SL_C1:
        return gap / (E - al), -2.0 * al / (E - al), np.sqrt((E - al) / 2.0)
    if stratum is Stratum.SL_C2:
        return 2.0 * al / (al - E), -gap / (al - E), np.sqrt((al - E) / 2.0)
    if stratum is Stratum.SL_C3:
        return (E - al) / gap, 2.0 * al / gap, np.sqrt(gap / 2.0)
    if stratum is Stratum.SL_C4:
        return 1.0, 0.0, np.sqrt(al)
    raise StratumError(f"{stratum} has no rectifying coordinates")


def chart(rc: RectifiedCoords, psi):
    """(c, sinh theta, cosh theta) at argument psi on the stratum's chart."""
    E, al, k2, ae, s = rc.energy, rc.alpha, rc.k2, rc.ae, rc.sign
    st = rc.stratum
    psi = np.asarray(psi, dtype=float)
    if st is Stratum.SL_C4:
        w2 = al * np.exp(2.0 * psi)
        w = np.sqrt(w2)
        d = w2 - 1.0
        return s * 4.0 * ae * w / d, s * 4.0 * w * (w2 + 1.0) / d ** 2, (w2 * (w2 + 6.0) + 1.0) / d ** 2
    jb = rc.jacobi(psi)
    sn, cn, dn = jb.sn, jb.cn, jb.dn
    if st in (Stratum.TL_CPLUS, Stratum.TL_CMINUS):
        kp2 = rc.kc2
        cn2 = cn * cn
        c = -2.0 * s * ae * sn * dn / cn
        sh = 2.0 * ae ** 2 * (kp2 - k2 * cn2 * cn2) / (al * cn2)
        ch = 2.0 * ae ** 2 * (kp2 + k2 * cn2 * cn2) / (abs(al) * cn2)
        return c, sh, ch
    if st is Stratum.SL_C1:
        g = k2 * (E - al)  # E + alpha
        c = np.sqrt(2.0 * g) * sn
        sh = -np.sqrt(E - al) * np.sqrt(g) * cn * dn / al
        ch = 1.0 - g * cn * cn / al
        return c, sh, ch
    if st is Stratum.SL_C2:
        b = rc.kc2 * (al - E)  # -(E + alpha)
        c = -s * np.sqrt(2.0 * b) * sn / cn
        sh = s * np.sqrt(b) * np.sqrt(al - E) * dn / (al * cn * cn)
        ch = 1.0 + b / (al * cn * cn)
        return c, sh, ch
    if st is Stratum.SL_C3:
        c = s * 2.0 * ae * dn / cn
        sh = -s * 2.0 * sn / (cn * cn)
        ch = (1.0 + sn * sn) / (cn * cn)
        return c, sh, ch
    raise StratumError(f"{st} has no chart")


def rectify(lam: Covector) -> RectifiedCoords:
    """Rectifying coordinates of a branch +1 covector in C+-, C1..C4."""
    red, _ = lam.reduced()
    if red is not lam:
        raise StratumError("rectify expects a branch +1 covector; reduce with eps^0 first")
    st = classify(lam)
    th, c, al = lam.theta, lam.c, lam.alpha
    E = energy(lam)
    if st is Stratum.SL_C4:
        s = 1 if th > 0 else -1
        t4 = np.tanh(abs(th) / 4.0)
        w = 1.0 / t4 if s * c > 0 else t4
        ae = np.sqrt(al)
        psi0 = np.log(w / ae)
        return RectifiedCoords(psi0 / ae, E, al, 1.0, ae, psi0, st, s)
    gap = _gap(lam) if not st.timelike else None
    k2, kp2, ae = _modulus(st, E, al, gap)
    sh = np.sinh(th)
    if st in (Stratum.TL_CPLUS, Stratum.TL_CMINUS):
        s = 1 if al > 0 else -1
        A, B, C = 2.0 * ae ** 2 * k2, al * sh, -2.0 * ae ** 2 * kp2
        disc = np.sqrt(B * B - 4.0 * A * C)
        u = (-B + disc) / (2.0 * A) if B < 0 else 2.0 * C / (-B - disc)
        u = min(max(u, 0.0), 1.0)
        cn = np.sqrt(u)
        sn = -s * np.sign(c) * np.sqrt(1.0 - u)
    elif st is Stratum.SL_C1:
        s = 1
        sn = np.clip(c / np.sqrt(2.0 * gap), -1.0, 1.0)
        # cosh(theta) - 1 = 2 sinh^2(theta/2)
        cn = np.sign(th) * np.sqrt(max(2.0 * np.sinh(th / 2) ** 2 * (-al) / gap, 0.0))
    elif st is Stratum.SL_C2:
        s = 1 if th > 0 else -1
        b = -gap
        cn = np.sqrt(min(b / (al * 2.0 * np.sinh(th / 2) ** 2), 1.0))
        sn = -s * c * cn / np.sqrt(2.0 * b)
    elif st is Stratum.SL_C3:
        s = 1 if c > 0 else -1
        w = -s * sh / 2.0
        sn = 2.0 * w / (1.0 + np.sqrt(1.0 + 4.0 * w * w))
        cn = np.sqrt((1.0 - sn) * (1.0 + sn))
    else:
        raise StratumError(f"{st} has no rectifying coordinates")
    psi0 = float(ell.legendre_F(np.arctan2(sn, cn), k2, kp2 if k2 >= 0 else None))
    rc = RectifiedCoords(psi0 / ae, E, al, float(k2), float(ae), psi0, st, s, float(kp2))
    return _polish(rc, c, th)


def _polish(rc: RectifiedCoords, c_target: float, th_target: float) -> RectifiedCoords:
    """Newton refinement of psi0 against the (c, theta) residual."""
    if rc.stratum is Stratum.SL_C1 or rc.stratum is Stratum.SL_C4:
        return rc
    K = rc.K
    lo, hi = -K + EDGE, K - EDGE
    psi = min(max(rc.psi0, lo), hi)

    def resid(p):
        cc, sh, _ = chart(replace(rc, psi0=p), p)
        return float(cc - c_target), float(np.arcsinh(sh) - th_target)

    r = resid(psi)
    for _ in range(4):
        if max(abs(r[0]), abs(r[1])) < 1e-15 * max(1.0, abs(c_target)):
            break
        h = 1e-7 * max(1.0, abs(psi))
        rp = resid(psi + h)
        # use whichever residual component is better conditioned
        comp = 0 if abs(rp[0] - r[0]) >= abs(rp[1] - r[1]) else 1
        slope = (rp[comp] - r[comp]) / h
        if slope == 0.0:
            break
        cand = min(max(psi - r[comp] / slope, lo), hi)
        rc_ = resid(cand)
        if max(abs(rc_[0]), abs(rc_[1])) >= max(abs(r[0]), abs(r[1])):
            break
        psi, r = cand, rc_
    if max(abs(r[0]), abs(r[1])) > 1e-6 * max(1.0, abs(c_target), abs(th_target)):
        raise InversionError(f"could not invert rectifying chart: residual {r}")
    return replace(rc, psi0=psi, phi0=psi / rc.ae)


def unrectify(rc: RectifiedCoords, t=0.0):
    """(theta, c) on the vertical flow at time t, i.e. at psi = psi0 + ae*t."""
    c, sh, _ = chart(rc, rc.psi0 + rc.ae * np.asarray(t, dtype=float))
    return np.arcsinh(sh), c


def vertical_flow(lam: Covector, t):
    """Closed-form solution (theta(t), c(t)) of the vertical subsystem."""
    red, flip = lam.reduced()
    st = classify(red)
    t = np.asarray(t, dtype=float)
    th0, c0 = red.theta, red.c
    if st in RECTIFIABLE:
        th, c = unrectify(rectify(red), t)
    elif st in (Stratum.TL_C0, Stratum.SL_C6):
        th, c = th0 - c0 * t, np.full_like(t, c0)
    else:
        th, c = np.full_like(t, th0), np.full_like(t, c0)
    return th, (c if flip == 1 else -c)
