"""Jacobi elliptic functions and Legendre/Carlson elliptic integrals.

Everything takes the parameter ``k2`` (the squared modulus) rather than the
modulus itself, so that negative values are first-class: the spacelike C3
stratum produces ``k2 < 0``.  All functions broadcast over numpy arrays.

sn, cn, dn and the amplitude come from the descending Landen / AGM scheme
(DLMF 22.20(ii)); incomplete integrals use Carlson's symmetric forms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LANDEN_CUTOFF = 1e-14
_MAX_LANDEN = 64
_CARLSON_TOL = 1e-16


class EllipticDomainError(ValueError):
    """Raised when the squared modulus leaves (-inf, 1)."""


@dataclass(frozen=True)
class JacobiBundle:
    psi: float | np.ndarray
    k2: float | np.ndarray
    sn: float | np.ndarray
    cn: float | np.ndarray
    dn: float | np.ndarray
    am: float | np.ndarray
    eps: float | np.ndarray

    @property
    def sc(self):
        return self.sn / self.cn

    @property
    def nc(self):
        return 1.0 / self.cn

    @property
    def dc(self):
        return self.dn / self.cn


def _check_k2(k2) -> np.ndarray:
    k2 = np.asarray(k2, dtype=float)
    if np.any(~np.isfinite(k2)) or np.any(k2 >= 1.0):
        raise EllipticDomainError(f"squared modulus must lie in (-inf, 1), got {k2}")
    return k2


def _moduli(k2, kp2):
    """(k2, 1 - k2) as arrays.

    Callers that know the complementary parameter kp2 more accurately than
    1 - k2 (k2 within rounding of 1) pass it; k2 itself may then round to 1.
    """
    if kp2 is None:
        k2 = _check_k2(k2)
        return k2, 1.0 - k2
    k2 = np.asarray(k2, dtype=float)
    kp2 = np.asarray(kp2, dtype=float)
    if np.any(~np.isfinite(kp2)) or np.any(kp2 <= 0.0) or np.any(~np.isfinite(k2)) or np.any(k2 > 1.0):
        raise EllipticDomainError(f"need 1 - k2 > 0, got k2={k2}, kp2={kp2}")
    return k2, kp2


def _scalarize(*arrays):
    out = tuple(a.item() if isinstance(a, np.ndarray) and a.ndim == 0 else a for a in arrays)
    return out if len(out) > 1 else out[0]


def agm(a, b):
    """Arithmetic-geometric mean, elementwise."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    for _ in range(_MAX_LANDEN):
        a, b = 0.5 * (a + b), np.sqrt(a * b)
        if np.all(np.abs(a - b) <= 1e-16 * np.abs(a)):
            break
    return 0.5 * (a + b)


def complete_K(k2, kp2=None):
    """Complete elliptic integral of the first kind K(k)."""
    k2, kp2 = _moduli(k2, kp2)
    return _scalarize(np.pi / (2.0 * agm(1.0, np.sqrt(kp2))))


# ---------------------------------------------------------------- Carlson

def carlson_rf(x, y, z):
    """Carlson's R_F(x, y, z) by duplication (Carlson 1995)."""
    x, y, z = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, y, z)))
    x, y, z = x.copy(), y.copy(), z.copy()
    for _ in range(100):
        a = (x + y + z) / 3.0
        dev = np.max(np.abs(np.stack([a - x, a - y, a - z])), axis=0)
        if np.all(dev <= _CARLSON_TOL ** (1 / 6) * 0.1 * np.abs(a) + 1e-300):
            break
        sx, sy, sz = np.sqrt(x), np.sqrt(y), np.sqrt(z)
        lam = sx * sy + sy * sz + sz * sx
        x, y, z = 0.25 * (x + lam), 0.25 * (y + lam), 0.25 * (z + lam)
    a = (x + y + z) / 3.0
    dx, dy = 1.0 - x / a, 1.0 - y / a
    dz = -(dx + dy)
    e2 = dx * dy - dz * dz
    e3 = dx * dy * dz
    series = (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0
              - 5.0 * e2 ** 3 / 208.0 + 3.0 * e3 ** 2 / 104.0 + e2 ** 2 * e3 / 16.0)
    return _scalarize(series / np.sqrt(a))


def carlson_rd(x, y, z):
    """Carlson's R_D(x, y, z) by duplication."""
    x, y, z = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, y, z)))
    x, y, z = x.copy(), y.copy(), z.copy()
    total = np.zeros_like(x)
    fac = np.ones_like(x)
    for _ in range(100):
        a = (x + y + 3.0 * z) / 5.0
        dev = np.max(np.abs(np.stack([a - x, a - y, a - z])), axis=0)
        if np.all(dev <= _CARLSON_TOL ** (1 / 6) * 0.1 * np.abs(a) + 1e-300):
            break
        sx, sy, sz = np.sqrt(x), np.sqrt(y), np.sqrt(z)
        lam = sx * sy + sy * sz + sz * sx
        total += fac / (sz * (z + lam))
        fac *= 0.25
        x, y, z = 0.25 * (x + lam), 0.25 * (y + lam), 0.25 * (z + lam)
    a = (x + y + 3.0 * z) / 5.0
    dx, dy, dz = (a - x) / a, (a - y) / a, (a - z) / a
    ea = dx * dy
    eb = dz * dz
    ec = ea - eb
    ed = ea - 6.0 * eb
    ee = ed + ec + ec
    series = (1.0 + ed * (-3.0 / 14.0 + 9.0 / 88.0 * ed - 9.0 / 52.0 * dz * ee)
              + dz * (ee / 6.0 + dz * (-9.0 / 22.0 * ec + dz * 3.0 / 26.0 * ea)))
    return _scalarize(3.0 * total + fac * series / (a * np.sqrt(a)))


def complete_E(k2, kp2=None):
    """Complete elliptic integral of the second kind E(k)."""
    k2, kp2 = _moduli(k2, kp2)
    return _scalarize(np.asarray(carlson_rf(0.0, kp2, 1.0)) - k2 / 3.0 * np.asarray(carlson_rd(0.0, kp2, 1.0)))


def _reduce_amplitude(phi):
    n = np.round(phi / np.pi)
    return n, phi - n * np.pi


def legendre_F(phi, k2, kp2=None):
    """Incomplete integral of the first kind F(phi | k2), any real phi."""
    k2, kp2 = _moduli(k2, kp2)
    phi = np.asarray(phi, dtype=float)
    n, r = _reduce_amplitude(phi)
    s, c = np.sin(r), np.cos(r)
    part = s * np.asarray(carlson_rf(c * c, _delta2(s, c, k2, kp2), 1.0))
    return _scalarize(2.0 * n * np.asarray(complete_K(k2, kp2)) + part)


def _delta2(s, c, k2, kp2):
    # 1 - k2 s^2, written as c^2 + kp2 s^2 when k2 > 0 (no cancellation near k2 = 1)
    return np.where(k2 > 0, c * c + kp2 * s * s, 1.0 - k2 * s * s)


def legendre_E(phi, k2, kp2=None):
    """Incomplete integral of the second kind E(phi | k2), any real phi."""
    k2, kp2 = _moduli(k2, kp2)
    phi = np.asarray(phi, dtype=float)
    n, r = _reduce_amplitude(phi)
    s, c = np.sin(r), np.cos(r)
    x, y = c * c, _delta2(s, c, k2, kp2)
    part = s * np.asarray(carlson_rf(x, y, 1.0)) - k2 / 3.0 * s ** 3 * np.asarray(carlson_rd(x, y, 1.0))
    return _scalarize(2.0 * n * np.asarray(complete_E(k2, kp2)) + part)


# ---------------------------------------------------------------- Jacobi

def _landen(u, k2, kp2=None):
    """sn, cn, dn, am for 0 <= k2 < 1.

    The amplitude comes from descending Landen; sn, cn, dn come from the
    Bulirsch cotangent recursion, which keeps relative accuracy in cn and dn
    near the quarter period even when k' is tiny.
    """
    if kp2 is None:
        kp2 = 1.0 - np.asarray(k2, dtype=float)
    u, k2, kp2 = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(k2, dtype=float),
                                     np.asarray(kp2, dtype=float))
    a = [np.ones_like(k2)]
    c = [np.sqrt(k2)]
    b = np.sqrt(kp2)
    n = 0
    while np.any(np.abs(c[-1]) > LANDEN_CUTOFF) and n < _MAX_LANDEN:
        an = a[-1]
        a.append(0.5 * (an + b))
        c.append(0.5 * (an - b))
        b = np.sqrt(an * b)
        n += 1
    phi = (2.0 ** n) * a[n] * u
    for j in range(n, 0, -1):
        phi = 0.5 * (phi + np.arcsin(c[j] / a[j] * np.sin(phi)))
    sn, cn, dn = _bulirsch(u, kp2)
    d = np.arctan2(sn, cn) - phi
    am = phi + (d - 2.0 * np.pi * np.round(d / (2.0 * np.pi)))
    return sn, cn, dn, am


def _bulirsch(u, kp2):
    # AGM on (1, k'), then unwind cot ratios; extra levels after convergence are no-ops
    a, emc = np.ones_like(u), kp2.copy()
    em, en = [], []
    for _ in range(_MAX_LANDEN):
        em.append(a)
        emc = np.sqrt(emc)
        en.append(emc)
        mean = 0.5 * (a + emc)
        if np.all(np.abs(a - emc) <= 1e-9 * a):
            break
        emc = emc * a
        a = mean
    v = u * mean
    s, co = np.sin(v), np.cos(v)
    # cotangent form where |cot v| <= 1, reciprocal (tangent) form elsewhere
    cot = np.abs(co) <= np.abs(s)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        r = np.where(cot, co / s, s / co)
        cc = np.where(cot, mean * r, r / mean)
        dn = np.ones_like(u)
        for b, e in zip(em[::-1], en[::-1]):
            r = r * cc
            cc = np.where(cot, cc * dn, cc / dn)
            dn = np.where(cot, (e + r) / (b + r), (e * r + 1.0) / (b * r + 1.0))
            r = np.where(cot, cc / b, b * cc)
        inv = 1.0 / np.sqrt(cc * cc + 1.0)
        sn = np.where(cot, np.copysign(inv, s), np.abs(cc) * inv * np.sign(s))
        cn = np.where(cot, cc * sn, np.copysign(inv, co))
    return sn, cn, dn


def negative_modulus_transform(psi, k2):
    """sn, cn, dn, am at parameter k2 < 0 through the imaginary-modulus identities.

    With kt2 = -k2 / (1 - k2) in (0, 1) and v = psi * sqrt(1 - k2):
    sn = sqrt(1 - kt2) sn(v)/dn(v), cn = cn(v)/dn(v), dn = 1/dn(v).
    """
    k2 = np.asarray(k2, dtype=float)
    if np.any(k2 >= 0.0):
        raise EllipticDomainError(f"negative_modulus_transform needs k2 < 0, got {k2}")
    kt2 = -k2 / (1.0 - k2)
    v = np.asarray(psi, dtype=float) * np.sqrt(1.0 - k2)
    s, c, d, am_v = _landen(v, kt2)
    sn = np.sqrt(1.0 - kt2) * s / d
    cn = c / d
    dn = 1.0 / d
    # same quadrant as am_v, so only the principal offset needs unwrapping
    raw = np.arctan2(sn, cn)
    d = raw - am_v
    am = am_v + (d - 2.0 * np.pi * np.round(d / (2.0 * np.pi)))
    return sn, cn, dn, am


def _jacobi_raw(psi, k2, kp2=None):
    psi = np.asarray(psi, dtype=float)
    if kp2 is not None:
        # only used with k2 in [0, 1]
        return _landen(psi, k2, kp2)
    psi, k2 = np.broadcast_arrays(psi, k2)
    if np.all(k2 >= 0.0):
        return _landen(psi, k2)
    if np.all(k2 < 0.0):
        return negative_modulus_transform(psi, k2)
    pos = k2 >= 0.0
    out_p = _landen(psi, np.where(pos, k2, 0.0))
    out_n = negative_modulus_transform(psi, np.where(pos, -1.0, k2))
    return tuple(np.where(pos, p, q) for p, q in zip(out_p, out_n))


def eps_incomplete(psi, k2, kp2=None):
    """Incomplete second-kind integral in Jacobi form, int_0^psi dn^2(t) dt."""
    k2, kp2 = _pair(k2, kp2)
    *_, am = _jacobi_raw(psi, k2, kp2)
    return legendre_E(am, k2, kp2)


def _pair(k2, kp2):
    """Validate; keep kp2 only where it adds accuracy (k2 >= 0)."""
    k2, kp = _moduli(k2, kp2)
    if kp2 is None or np.any(k2 < 0.0):
        return (_check_k2(k2) if kp2 is not None else k2), None
    return k2, kp


def jacobi(psi, k2, kp2=None) -> JacobiBundle:
    """Evaluate sn, cn, dn, am and the second-kind integral at (psi, k2).

    ``kp2`` optionally supplies 1 - k2 when it is known more accurately
    than the subtraction would give (k2 close to 1).
    """
    k2, kp2 = _pair(k2, kp2)
    sn, cn, dn, am = _jacobi_raw(psi, k2, kp2)
    eps = legendre_E(am, np.broadcast_to(k2, np.shape(am)),
                     None if kp2 is None else np.broadcast_to(kp2, np.shape(am)))
    psi_out = np.asarray(psi, dtype=float)
    return JacobiBundle(*_scalarize(psi_out, k2 + 0.0 * psi_out, sn, cn, dn, am, np.asarray(eps)))
