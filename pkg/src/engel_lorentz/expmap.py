"""Closed-form exponential map for every stratum.

Two families of formulas live here:

``PRINTED``
    transcriptions of the published per-stratum expressions, kept for
    auditing (``exp(..., verbatim=True)``).
``exp`` (default)
    the shipped forms.  For alpha != 0 the vertical flow (theta(t), c(t))
    and x2(t) come from the Jacobi parametrisation; y and z follow from the
    moments int c^n dt, n <= 4, which reduce to elementary expressions in
    (theta, c, x2, t) because c'' = c (c^2/2 - E) along every extremal.
    Strata where a printed coordinate disagrees with the RK4 oracle use the
    corrected form; CHANGELOG.md records each adjudication.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from . import elliptic as ell
from .engel import Causal, GroupPoint
from .vertical import (
    RECTIFIABLE,
    Covector,
    RectifiedCoords,
    Stratum,
    StratumError,
    classify,
    energy,
    eps0_points,
    initial_state,
    rectify,
    rk4,
    full_rhs,
    unrectify,
)

SUPR_GUARD = 1e-6
COORDS = ("x1", "x2", "y", "z")


class ExpDomainError(ValueError):
    """Requested time is at or beyond the explosion time."""


# ------------------------------------------------------------ t_supr

def c4_pole_time(rc: RectifiedCoords) -> float:
    """t0 = -ln(alpha)/(2 sqrt(alpha)) - phi0: where alpha e^{2 psi_t} = 1."""
    return -np.log(rc.alpha) / (2.0 * np.sqrt(rc.alpha)) - rc.phi0


def t_supr(lam: Covector) -> float:
    red, _ = lam.reduced()
    st = classify(red)
    if st in (Stratum.TL_CPLUS, Stratum.TL_CMINUS, Stratum.SL_C2, Stratum.SL_C3):
        rc = rectify(red)
        return float((rc.K - rc.psi0) / rc.ae)
    if st is Stratum.SL_C4:
        t0 = c4_pole_time(rectify(red))
        return float(t0) if t0 > 0 else np.inf
    return np.inf


# ------------------------------------------------------------ helpers

def _jac(rc: RectifiedCoords, t):
    j0 = rc.jacobi(rc.psi0)
    jt = rc.jacobi(rc.psi0 + rc.ae * t)
    return j0, jt


def _x2_corrected(rc: RectifiedCoords, t, x1):
    """x2(t) = int h2 dt on the elliptic/exponential strata."""
    E, al, k2, ae = rc.energy, rc.alpha, rc.k2, rc.ae
    st = rc.stratum
    if st is Stratum.SL_C4:
        w0 = al * np.exp(2.0 * rc.psi0)
        wt = al * np.exp(2.0 * (rc.psi0 + ae * t))
        return t + 4.0 / ae * (1.0 / (w0 - 1.0) - 1.0 / (wt - 1.0))
    j0, jt = _jac(rc, t)
    dE = jt.eps - j0.eps
    if st in (Stratum.TL_CPLUS, Stratum.TL_CMINUS):
        return (4.0 * ae * (ae * rc.kc2 * t - dE) - abs(al) * x1) / al
    if st is Stratum.SL_C1:
        return -2.0 * ae / al * dE - t
    if st is Stratum.SL_C2:
        return -(2.0 * ae * (dE + j0.dn * j0.sc - jt.dn * jt.sc) + E * t) / al
    if st is Stratum.SL_C3:
        return 2.0 / (ae * rc.kc2) * (jt.dn * jt.sc - j0.dn * j0.sc - dE) + t
    raise StratumError(st)


def moment_yz(causal, t, alpha, E, th0, c0, th, c, x1, x2):
    """y and z from the moments of c along an extremal with alpha != 0.

    With x1 = (c - c0)/alpha, alpha*h2 = c^2/2 - E and c'' = c (c^2/2 - E):
      I1 = int c   = th0 - th
      I2 = int c^2 = 2 alpha x2 + 2 E t
      I3 = int c^3 = 2 [c']_0^t + 2 E I1
      I4 = int c^4 = 4/3 ([c c']_0^t + 2 E I2 - (E^2 + sigma alpha^2) t)
    where c' = -alpha h1 and sigma = +1 (timelike), -1 (spacelike).
    """
    if Causal(causal) is Causal.TIMELIKE:
        h1, h10, sigma = np.cosh(th), np.cosh(th0), 1.0
    else:
        h1, h10, sigma = np.sinh(th), np.sinh(th0), -1.0
    dc, dc0 = -alpha * h1, -alpha * h10
    I1 = th0 - th
    I2 = 2.0 * alpha * x2 + 2.0 * E * t
    I3 = 2.0 * (dc - dc0) + 2.0 * E * I1
    I4 = 4.0 / 3.0 * (c * dc - c0 * dc0 + 2.0 * E * I2 - (E * E + sigma * alpha * alpha) * t)
    # int x1 x2' dt and int x1^2 x2' dt / 2
    a1 = (0.5 * I3 - E * I1 - 0.5 * c0 * I2 + c0 * E * t) / alpha ** 2
    a2 = (0.5 * I4 - E * I2 - c0 * I3 + 2.0 * c0 * E * I1 + 0.5 * c0 ** 2 * I2 - c0 ** 2 * E * t) / (2.0 * alpha ** 3)
    y = a1 - 0.5 * x1 * x2
    z = x2 ** 3 / 6.0 + a2
    return y, z


# ------------------------------------------------------------ shipped forms

SERIES_CUT = 0.02


def _series_z(kind_tl: bool, th0, u):
    """Taylor polynomial of z / t^3 in u = c t through u^8."""
    s0, ch0 = np.sinh(th0), np.cosh(th0)
    if kind_tl:
        a3, b3 = np.sinh(3 * th0), np.cosh(3 * th0)
        z = (s0 * np.cosh(2 * th0) / 6 - b3 / 8 * u + (-s0 / 240 + 5 * a3 / 48) * u ** 2
             - b3 / 16 * u ** 3 + (-s0 / 10080 + 43 * a3 / 1440) * u ** 4 - 23 * b3 / 1920 * u ** 5
             + (-s0 / 725760 + 605 * a3 / 145152) * u ** 6 - 311 * b3 / 241920 * u ** 7
             + (-s0 / 79833600 + 2591 * a3 / 7257600) * u ** 8)
    else:
        a3, b3 = np.cosh(3 * th0), np.sinh(3 * th0)
        z = (ch0 * np.cosh(2 * th0) / 6 - b3 / 8 * u + (ch0 / 240 + 5 * a3 / 48) * u ** 2
             - b3 / 16 * u ** 3 + (ch0 / 10080 + 43 * a3 / 1440) * u ** 4 - 23 * b3 / 1920 * u ** 5
             + (ch0 / 725760 + 605 * a3 / 145152) * u ** 6 - 311 * b3 / 241920 * u ** 7
             + (ch0 / 79833600 + 2591 * a3 / 7257600) * u ** 8)
    return z


def _shc(u):
    """sinh(u)/u, exact at 0."""
    u = np.asarray(u, dtype=float)
    safe = np.where(u == 0.0, 1.0, u)
    return np.where(np.abs(u) < 1e-4, 1.0 + u * u / 6.0, np.sinh(safe) / safe)


def _exp_constant_c(lam: Covector, t):
    """alpha = 0, c != 0: theta = th0 - c t, no cancellation for small c t."""
    th0, c = lam.theta, lam.c
    tl = Causal(lam.causal) is Causal.TIMELIKE
    u = c * t
    half = t * _shc(u / 2)  # 2 sinh(u/2) / c
    if tl:
        x1 = -np.cosh(th0 - u / 2) * half
        x2 = np.sinh(th0 - u / 2) * half
    else:
        x1 = np.sinh(u / 2 - th0) * half
        x2 = np.cosh(u / 2 - th0) * half
    small = np.abs(u) < SERIES_CUT
    us = np.where(small, u, 1.0)
    ub = np.where(small, 1.0, u)
    sgn = 1.0 if tl else -1.0
    y_ser = sgn * t ** 2 * (us / 12 + us ** 3 / 240 + us ** 5 / 10080 + us ** 7 / 725760)
    y_cl = sgn * (np.sinh(ub) - ub) / (2 * c ** 2)
    z_ser = t ** 3 * _series_z(tl, th0, us)
    if tl:
        z_cl = (4 * np.sinh(ub / 2) ** 3 * np.sinh(3 * th0 - 1.5 * ub)
                - 3 * (np.sinh(ub) - ub) * np.sinh(th0)) / (6 * c ** 3)
    else:
        z_cl = (4 * np.cosh(1.5 * ub - 3 * th0) * np.sinh(ub / 2) ** 3
                - 3 * np.cosh(th0) * (ub - np.sinh(ub))) / (6 * c ** 3)
    y = np.where(small, y_ser, y_cl)
    z = np.where(small, z_ser, z_cl)
    return np.stack([x1, x2, y, z], axis=-1)


ALPHA_QUAD = 1e-2
_QUAD_DEGREES = (64, 128, 256, 512, 1024, 2048)


def _exp_quadrature(lam: Covector, st: Stratum, t: np.ndarray) -> np.ndarray:
    """Cumulative Chebyshev quadrature of the horizontal equations.

    Used for 0 < |alpha| < ALPHA_QUAD, where the closed forms divide by
    alpha^3 and lose every digit.  theta(s) still comes from the rectifying
    chart; x1, x2, y, z are antiderivatives of Chebyshev interpolants.
    """
    cheb = np.polynomial.chebyshev
    T = float(np.max(t)) if np.size(t) else 0.0
    if T <= 0.0:
        return np.zeros(np.shape(t) + (4,))
    rc = rectify(lam)
    tl = Causal(lam.causal) is Causal.TIMELIKE

    def hs(x):
        th, _ = unrectify(rc, T * (1.0 + x) / 2.0)
        return (np.cosh(th), np.sinh(th)) if tl else (np.sinh(th), np.cosh(th))

    for deg in _QUAD_DEGREES:
        h1c = cheb.chebinterpolate(lambda x: hs(x)[0], deg)
        h2c = cheb.chebinterpolate(lambda x: hs(x)[1], deg)
        x1c = cheb.chebint(-h1c, lbnd=-1, scl=T / 2.0)
        x2c = cheb.chebint(h2c, lbnd=-1, scl=T / 2.0)

        def yd(x):
            a1, a2 = cheb.chebval(x, x1c), cheb.chebval(x, x2c)
            g1, g2 = hs(x)
            return np.stack([(a1 * g2 + a2 * g1) / 2.0, (a1 * a1 + a2 * a2) * g2 / 2.0])

        ydc = cheb.chebinterpolate(lambda x: yd(x)[0], deg)
        zdc = cheb.chebinterpolate(lambda x: yd(x)[1], deg)
        tail = max(np.abs(zdc[-8:]).max() / np.abs(zdc).max(), np.abs(h1c[-8:]).max() / np.abs(h1c).max())
        if tail < 1e-13:
            break
    yc = cheb.chebint(ydc, lbnd=-1, scl=T / 2.0)
    zc = cheb.chebint(zdc, lbnd=-1, scl=T / 2.0)
    x = 2.0 * np.asarray(t, dtype=float) / T - 1.0
    return np.stack([cheb.chebval(x, cc) for cc in (x1c, x2c, yc, zc)], axis=-1)


def _exp_reduced(lam: Covector, st: Stratum, t: np.ndarray) -> np.ndarray:
    th0, c0, al = lam.theta, lam.c, lam.alpha
    if st in RECTIFIABLE and abs(al) < ALPHA_QUAD:
        return _exp_quadrature(lam, st, t)
    if st in RECTIFIABLE:
        rc = rectify(lam)
        th, c = unrectify(rc, t)
        x1 = (c - c0) / al
        x2 = _x2_corrected(rc, t, x1)
        y, z = moment_yz(lam.causal, t, al, rc.energy, th0, c0, th, c, x1, x2)
        return np.stack([x1, x2, y, z], axis=-1)
    if st is Stratum.TL_C00:
        s0, ch0 = np.sinh(th0), np.cosh(th0)
        return np.stack([-ch0 * t, s0 * t, 0.0 * t, (2 * s0 ** 2 + 1) * s0 / 6.0 * t ** 3], axis=-1)
    if st in (Stratum.TL_C0, Stratum.SL_C6):
        return _exp_constant_c(lam, t)
    if st is Stratum.SL_C5:
        return np.stack([0.0 * t, t, 0.0 * t, t ** 3 / 6.0], axis=-1)
    if st is Stratum.SL_C7:
        s0, ch0 = np.sinh(th0), np.cosh(th0)
        return np.stack([-s0 * t, ch0 * t, 0.0 * t, ch0 * (1 + 2 * s0 ** 2) / 6.0 * t ** 3], axis=-1)
    raise StratumError(f"no closed form for {st}")


def exp(lam: Covector, t, verbatim: bool = False, check_domain: bool = True) -> np.ndarray:
    """Exp(lambda, t) as an array (..., 4) over the shape of t.

    ``verbatim`` switches to the printed formulas (audit mode).
    """
    t = np.asarray(t, dtype=float)
    red, flip = lam.reduced()
    st = classify(red)
    if st in (Stratum.LIGHT_PLUS, Stratum.LIGHT_MINUS):
        raise StratumError("use exp_lightlike for lightlike extremals")
    if check_domain:
        ts = t_supr(red)
        if np.isfinite(ts):
            guard = SUPR_GUARD / rectify(red).ae
            if np.any(t >= ts - guard):
                raise ExpDomainError(f"t must stay below t_supr={ts} (guard {guard})")
    pts = PRINTED[st](red, t) if verbatim else _exp_reduced(red, st, t)
    return pts if flip == 1 else eps0_points(lam.causal, pts)


def exp_point(lam: Covector, t: float, verbatim: bool = False) -> GroupPoint:
    return GroupPoint.from_array(exp(lam, float(t), verbatim=verbatim))


def exp_lightlike(t, branch: int) -> np.ndarray:
    """Lightlike extremal x1 = t, x2 = +-t, y = 0, z = +-t^3/3."""
    if branch not in (1, -1):
        raise ValueError("branch must be +1 or -1")
    t = np.asarray(t, dtype=float)
    return np.stack([t, branch * t, 0.0 * t, branch * t ** 3 / 3.0], axis=-1)


def lightlike_rhs(state, branch: int) -> np.ndarray:
    """Flow of X1 + branch * X2 (the lightlike ODE block)."""
    x1, x2 = state[..., 0], state[..., 1]
    one = np.ones_like(x1)
    return np.stack([one, branch * one, (branch * x1 - x2) / 2.0, branch * (x1 ** 2 + x2 ** 2) / 2.0], axis=-1)


# ------------------------------------------------------------ printed forms

def _printed_tl_pm(lam: Covector, t):
    rc = rectify(lam)
    al, k2, ae = lam.alpha, rc.k2, rc.ae
    aa = abs(al)
    j0, jt = _jac(rc, t)
    dE = jt.eps - j0.eps
    x1 = 2 * ae / aa * (j0.sc * j0.dn - jt.sc * jt.dn)
    x2 = (4 * ae * (ae * (1 - k2) * t - dE) - aa * x1) / al
    y = (-2 * ae ** 2 / (al * aa) * (k2 * (jt.cn ** 2 - j0.cn ** 2) + (1 - k2) * (jt.nc ** 2 - j0.nc ** 2))
         + ae / aa * (j0.dn * j0.sc + jt.dn * jt.sc) * x2)
    z = (x2 ** 3 / 6
         + 4 * ae ** 3 / (3 * al ** 3) * (2 * ae * (k2 - 1) * t
                                          + (1 - k2) * (jt.dn * jt.sn / jt.cn ** 3 - j0.dn * j0.sn / j0.cn ** 3)
                                          + k2 * (jt.cn * jt.dn * jt.sn - j0.cn * j0.dn * j0.sn)
                                          - 2 * dE * (2 * k2 - 1))
         - 2 * ae * j0.dn * j0.sn * (ae * j0.dn * j0.sc / aa * x2 - 0.5 * x1 * x2 - y) / (j0.cn * aa)
         - 2 * ae ** 2 * (2 * k2 - 1) * x1 / (3 * al * aa))
    return np.stack([x1, x2, y, z], axis=-1)


def _printed_tl_c0(lam: Covector, t):
    th0, c = lam.theta, lam.c
    ct = c * t
    x1 = (np.sinh(th0 - ct) - np.sinh(th0)) / c
    x2 = (np.cosh(th0) - np.cosh(th0 - ct)) / c
    y = (np.sinh(ct) - ct) / (2 * c ** 2)
    z = (4 * np.sinh(ct / 2) ** 3 * np.sinh(3 * th0 - 1.5 * ct) - 3 * (np.sinh(ct) - ct) * np.sinh(th0)) / (6 * c ** 3)
    return np.stack([x1, x2, y, z], axis=-1)


def _printed_tl_c00(lam: Covector, t):
    s0, c0 = np.sinh(lam.theta), np.cosh(lam.theta)
    return np.stack([-c0 * t, s0 * t, 0.0 * t, (2 * s0 ** 2 + 1) * s0 / 6 * t ** 3], axis=-1)


def _printed_sl_c1(lam: Covector, t):
    rc = rectify(lam)
    E, al, ae = rc.energy, lam.alpha, rc.ae
    j0, jt = _jac(rc, t)
    dE = jt.eps - j0.eps
    sn0, snt = j0.sn, jt.sn
    cd0, cdt = j0.cn * j0.dn, jt.cn * jt.dn
    x1 = np.sqrt(2) * np.sqrt(al + E) / al * (snt - sn0)
    x2 = -2 * ae / al * dE - t
    y = np.sqrt(al + E) / (np.sqrt(2) * al ** 2) * (2 * ae * (cdt - cd0 + dE * (snt + sn0)) + al * (snt + sn0) * t)
    z = (x2 ** 3 / 6
         + 1 / (3 * al ** 3) * (2 * ae * ((al + E) * (cdt * (snt - sn0) - 2 * (cdt - cd0) * sn0)
                                          - (E + 3 * (al + E) * sn0 ** 2) * dE)
                                + al * (al - E - 3 * (al + E) * sn0 ** 2) * t))
    return np.stack([x1, x2, y, z], axis=-1)


def _printed_sl_c2(lam: Covector, t):
    rc = rectify(lam)
    E, al, ae, s = rc.energy, lam.alpha, rc.ae, rc.sign
    j0, jt = _jac(rc, t)
    dE = jt.eps - j0.eps
    sc0, sct = j0.sc, jt.sc
    cn0, cnt, dn0, dnt, sn0, snt = j0.cn, jt.cn, j0.dn, jt.dn, j0.sn, jt.sn
    x1 = -np.sqrt(2) * np.sqrt(-al - E) * s / al * (sct - sc0)
    x2 = -(2 * ae * (dE + dn0 * sc0 - dnt * sct) + E * t) / al
    y = -np.sqrt(-al - E) * s / (np.sqrt(2) * al ** 2) * (
        E * (sc0 + sct) * t + 2 * ae * ((sc0 + sct) * dE + (dnt - dn0) * (1 - sc0 * sct)))
    big = 2 * ae * (cnt * (al * (cnt ** 2 * dn0 * (1 - 3 * cn0 ** 2) + 3 * cn0 ** 2 * dnt)
                           + (cnt ** 2 * dn0 * (1 - 4 * cn0 ** 2) + 3 * cn0 ** 2 * dnt) * E) * sn0
                    - cn0 * dnt * (al * cn0 ** 2 + 3 * al * sn0 ** 2 * cnt ** 2
                                   + (3 * cnt ** 2 + cn0 ** 2 * (1 - 4 * cnt ** 2)) * E) * snt)
    z = (x2 ** 3 / 6
         + 2 * ae * (3 * (al + E) * sn0 ** 2 - E * cn0 ** 2) / (3 * al ** 3 * cn0 ** 2) * dE
         + big / (3 * al ** 3 * ae * cnt ** 3 * cn0 ** 3)
         + (al + E) * (cn0 ** 2 * (al - 4 * E) + 3 * E) / (3 * al ** 3 * cn0 ** 2) * t)
    return np.stack([x1, x2, y, z], axis=-1)


def _printed_sl_c3(lam: Covector, t):
    rc = rectify(lam)
    k2, ae, s = rc.k2, rc.ae, rc.sign
    j0, jt = _jac(rc, t)
    dE = jt.eps - j0.eps
    cn0, cnt, dn0, dnt, sn0, snt = j0.cn, jt.cn, j0.dn, jt.dn, j0.sn, jt.sn
    dc0, dct = j0.dc, jt.dc
    x1 = 2 * s * (cn0 * dnt - cnt * dn0) / (ae * cnt * cn0 * (1 - k2))
    x2 = 2 / (ae * (1 - k2)) * (dnt * jt.sc - dn0 * j0.sc - jt.eps + j0.eps) + t
    y = s / (ae * (1 - k2)) * (2 / (ae * (1 - k2)) * ((dct + dc0) * dE + (dc0 * dct + k2) * (sn0 - snt))
                              - (dc0 + dct) * t)
    z = (2 * dE * (6 - 6 * k2 + cn0 ** 2 * (1 + 7 * k2)) / (3 * ae ** 3 * cn0 ** 2 * (-1 + k2) ** 3)
         + 2 * (3 * dn0 ** 2 + cn0 ** 2) / (3 * ae ** 2 * cn0 ** 2 * (-1 + k2) ** 2) * t
         + 2 / (3 * ae ** 3 * cnt ** 3 * cn0 ** 3 * (-1 + k2) ** 3)
         * (cnt ** 3 * dn0 * (2 + cn0 ** 2 - 2 * k2 + 7 * cn0 ** 2 * k2) * sn0
            - 6 * cn0 ** 2 * cnt * dn0 * (k2 - 1) * snt
            + 2 * cn0 ** 3 * dnt * (k2 - 1) * snt
            - cn0 * cnt ** 2 * dnt * (6 - 6 * k2 + cn0 ** 2 * (1 + 7 * k2)) * snt)
         + x2 ** 3 / 6)
    return np.stack([x1, x2, y, z], axis=-1)


def _printed_sl_c4(lam: Covector, t):
    rc = rectify(lam)
    al, ae, s = lam.alpha, rc.ae, rc.sign
    p0 = rc.psi0
    pt = p0 + ae * t
    e0, et = np.exp(p0), np.exp(pt)
    w0, wt = -1 + al * np.exp(2 * p0), -1 + al * np.exp(2 * pt)
    x1 = 4 * s * (et / wt - e0 / w0)
    x2 = 4 / ae * (1 / wt - 1 / wt) + t  # printed with identical arguments
    y = -s * 2 * e0 * (-1 + al * np.exp(pt + p0)) * (2 + ae * t + np.exp(pt - p0) * (ae * t - 2)) / (ae * w0 * wt)
    r = np.exp(pt - p0)
    a0 = al * np.exp(2 * p0)
    z = x2 ** 3 / 6 + 4 / 3 * (
        6 * np.exp(2 * p0) * t / w0 ** 2
        + (-1 - 9 * a0 * (-2 + a0)) / (al * ae * w0 ** 3)
        + 12 * (1 + a0 * (-1 + 2 * r)) / (al * ae * w0 * wt ** 2)
        - 8 / (al * ae * wt ** 3)
        - 3 * (1 + a0 * (6 + 4 * r - a0 * (-1 + 4 * r))) / (al * ae * w0 ** 2 * wt))
    return np.stack([x1, x2, y, z], axis=-1)


def _printed_sl_c5(lam: Covector, t):
    return np.stack([0.0 * t, t, 0.0 * t, t ** 3 / 6], axis=-1)


def _printed_sl_c6(lam: Covector, t):
    th0, c = lam.theta, lam.c
    ct = c * t
    x1 = (np.cosh(ct - th0) - np.cosh(th0)) / c
    x2 = (np.sinh(ct - th0) + np.sinh(th0)) / c
    y = (ct - np.sinh(ct)) / (2 * c ** 2)
    z = (4 * np.cosh(1.5 * ct - 3 * th0) * np.sinh(ct / 2) ** 3 - 3 * np.cosh(th0) * (ct - np.sinh(ct))) / (6 * c ** 3)
    return np.stack([x1, x2, y, z], axis=-1)


def _printed_sl_c7(lam: Covector, t):
    s0, c0 = np.sinh(lam.theta), np.cosh(lam.theta)
    return np.stack([-s0 * t, c0 * t, 0.0 * t, c0 * (1 + 2 * s0 ** 2) / 6 * t], axis=-1)


PRINTED = {
    Stratum.TL_CPLUS: _printed_tl_pm,
    Stratum.TL_CMINUS: _printed_tl_pm,
    Stratum.TL_C0: _printed_tl_c0,
    Stratum.TL_C00: _printed_tl_c00,
    Stratum.SL_C1: _printed_sl_c1,
    Stratum.SL_C2: _printed_sl_c2,
    Stratum.SL_C3: _printed_sl_c3,
    Stratum.SL_C4: _printed_sl_c4,
    Stratum.SL_C5: _printed_sl_c5,
    Stratum.SL_C6: _printed_sl_c6,
    Stratum.SL_C7: _printed_sl_c7,
}


# ------------------------------------------------------------ validation

CLOSED_FORM_STRATA = (
    Stratum.TL_C00, Stratum.TL_C0, Stratum.TL_CPLUS, Stratum.TL_CMINUS,
    Stratum.SL_C1, Stratum.SL_C2, Stratum.SL_C3, Stratum.SL_C4,
    Stratum.SL_C5, Stratum.SL_C6, Stratum.SL_C7,
)


@dataclass
class SampleSpec:
    """What validate_closed_forms should sample and how hard to look.

    Errors are scaled per coordinate by max(1, max_t |q_j(t)|) along the
    oracle arc: double precision cannot hold an absolute 1e-6 on
    coordinates of size 1e12, which the alpha = 0 strata reach by t = 5.
    """

    strata: tuple = CLOSED_FORM_STRATA
    per_stratum: int = 50
    t_fraction: float = 0.9
    t_cap: float = 5.0
    n_times: int = 64
    steps_per_time: int = 157
    tol: float = 1e-6
    seed: int = 0
    verbatim: bool = False
    branch_mix: bool = False


@dataclass
class SampleReport:
    stratum: str
    sample: dict
    t_grid: list
    max_err: dict
    verdict: str
    abs_err: dict | None = None
    h_drift: float = 0.0
    e_drift: float = 0.0

    def to_json(self) -> dict:
        return asdict(self)


def horizon(lam: Covector, spec: SampleSpec) -> float:
    return float(min(spec.t_cap, spec.t_fraction * t_supr(lam)))


def _sample_batch(st: Stratum, spec: SampleSpec, rng: np.random.Generator) -> list[Covector]:
    from .vertical import sample_covector

    out = []
    for _ in range(spec.per_stratum):
        lam = sample_covector(st, rng)
        if spec.branch_mix and rng.random() < 0.5:
            # eps^0 image of lam, classified back into st after reduction
            a = lam.alpha if lam.causal is Causal.TIMELIKE else -lam.alpha
            lam = Covector(lam.causal, lam.theta, -lam.c, a, branch_sign=-1)
        out.append(lam)
    return out


def validate_closed_forms(spec: SampleSpec | None = None) -> list[SampleReport]:
    """Compare exp against the RK4 oracle on random covectors, per stratum.

    Each covector gets a 64-point grid on (0, min(t_cap, t_fraction t_supr)]
    taken from the RK4 step grid itself, so no interpolation enters.
    """
    from .vertical import energy_of_state, hamiltonian_of_state, integrate_batch

    spec = spec or SampleSpec()
    rng = np.random.default_rng(spec.seed)
    reports: list[SampleReport] = []
    for st in spec.strata:
        st = Stratum(st)
        lams = _sample_batch(st, spec, rng)
        T = np.array([horizon(lam, spec) for lam in lams])
        n = spec.n_times * spec.steps_per_time
        full = integrate_batch(lams, T, n, spec.steps_per_time)
        b = np.array([lam.branch_sign for lam in lams], dtype=float)
        H = hamiltonian_of_state(full, lams[0].causal, b)
        E = energy_of_state(full, lams[0].causal, b)
        h_drift = np.abs(H - H[0]).max(axis=0)
        e_drift = np.abs(E - E[0]).max(axis=0)
        states = full[1:]
        for i, lam in enumerate(lams):
            t = T[i] * np.arange(1, spec.n_times + 1) / spec.n_times
            oracle = states[:, i, :4]
            try:
                closed = exp(lam, t, verbatim=spec.verbatim, check_domain=False)
                diff = np.abs(closed - oracle)
            except (ArithmeticError, ValueError) as err:  # a verbatim form can blow up outright
                diff = np.full_like(oracle, np.inf)
                _ = err
            diff = np.where(np.isfinite(diff), diff, np.inf)
            scale = np.maximum(1.0, np.abs(oracle).max(axis=0))
            scaled = diff.max(axis=0) / scale
            bad = [COORDS[j] for j in range(4) if not scaled[j] < spec.tol]
            reports.append(SampleReport(
                stratum=st.value,
                sample={"theta": lam.theta, "c": lam.c, "alpha": lam.alpha, "branch": lam.branch_sign},
                t_grid=t.tolist(),
                max_err=dict(zip(COORDS, map(float, scaled))),
                verdict="PASS" if not bad else "SUSPECT:" + ",".join(bad),
                abs_err=dict(zip(COORDS, map(float, diff.max(axis=0)))),
                h_drift=float(h_drift[i]),
                e_drift=float(e_drift[i]),
            ))
    return reports


def summarize(reports: list[SampleReport]) -> dict:
    """Worst scaled error per stratum and coordinate, with SUSPECT coordinates."""
    out: dict = {}
    for r in reports:
        row = out.setdefault(r.stratum, {"n": 0, "max_err": dict.fromkeys(COORDS, 0.0), "suspect": []})
        row["n"] += 1
        for k, v in r.max_err.items():
            row["max_err"][k] = max(row["max_err"][k], v)
        if r.verdict != "PASS":
            for k in r.verdict.split(":", 1)[1].split(","):
                if k not in row["suspect"]:
                    row["suspect"].append(k)
    for row in out.values():
        row["verdict"] = "PASS" if not row["suspect"] else "SUSPECT"
    return out


def report_json(reports: list[SampleReport]) -> str:
    return json.dumps({"samples": [r.to_json() for r in reports], "summary": summarize(reports)}, indent=2)
