"""Maxwell times from the fixed points of the reflections, and cut-time bounds.

Along an elliptic extremal, with tau = (psi_t + psi_0)/2 and p = ae t / 2,
the coordinates x1 and y factor into a tau-part times a function of p
alone.  The p-functions are f_y (timelike), f1, f2, f3 (spacelike C1, C2,
C3) and f4 (C3 rewritten with a positive modulus).  Their roots on (0, K)
are Maxwell times; where a function keeps one sign the Maxwell stratum is
empty.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from . import elliptic as ell
from .vertical import Covector, Stratum, StratumError, classify, rectify

GRID_DIVISIONS = 2048
ROOT_TOL = 1e-12


class MaxwellDomainError(ValueError):
    """p outside the interval where the factorisation holds."""


@dataclass(frozen=True)
class MidpointCoords:
    tau: float
    p: float

    def __post_init__(self):
        if not self.p > 0:
            raise MaxwellDomainError(f"p must be positive, got {self.p}")


def midpoint_coords(lam: Covector, t: float) -> MidpointCoords:
    rc = rectify(lam.reduced()[0])
    return MidpointCoords(rc.psi0 + rc.ae * t / 2.0, rc.ae * t / 2.0)


# ------------------------------------------------------------ parameters

@dataclass(frozen=True)
class StratumParams:
    """(k2, ae, alpha, E) of an elliptic stratum; any two fix the rest."""

    stratum: Stratum
    k2: float
    ae: float
    alpha: float
    energy: float

    @property
    def K(self) -> float:
        return float(ell.complete_K(self.k2))


def params_from_modulus(stratum: Stratum, k2: float, ae: float = 1.0, alpha_sign: int = 1) -> StratumParams:
    """Invert the modulus relations of each stratum at a given ae."""
    a2 = ae * ae
    if stratum in (Stratum.TL_CPLUS, Stratum.TL_CMINUS):
        # 2 ae^2 = sqrt(E^2 + alpha^2), k2 = 1/2 + E / (4 ae^2)
        E = a2 * (4.0 * k2 - 2.0)
        al = alpha_sign * 4.0 * a2 * np.sqrt(k2 * (1.0 - k2))
        return StratumParams(stratum, k2, ae, al, E)
    if stratum is Stratum.SL_C1:
        return StratumParams(stratum, k2, ae, a2 * (k2 - 1.0), a2 * (k2 + 1.0))
    if stratum is Stratum.SL_C2:
        return StratumParams(stratum, k2, ae, a2 * k2, a2 * (k2 - 2.0))
    if stratum is Stratum.SL_C3:
        return StratumParams(stratum, k2, ae, a2 * (1.0 - k2), a2 * (1.0 + k2))
    raise StratumError(f"{stratum} has no Maxwell functions")


def params_from_covector(lam: Covector) -> StratumParams:
    rc = rectify(lam.reduced()[0])
    return StratumParams(rc.stratum, rc.k2, rc.ae, rc.alpha, rc.energy)


def c3_positive_modulus(par: StratumParams) -> StratumParams:
    """C3 with k2 < 0 re-expressed at modulus (alpha - E)/(2 alpha), ae = sqrt(alpha)."""
    return StratumParams(Stratum.SL_C3, (par.alpha - par.energy) / (2.0 * par.alpha),
                         float(np.sqrt(par.alpha)), par.alpha, par.energy)


# ------------------------------------------------------------ the p-functions

def _check_p(p, k2, upper: float | None = None):
    p = np.asarray(p, dtype=float)
    K = ell.complete_K(k2) if upper is None else upper
    if np.any(p <= 0.0) or np.any(p >= K):
        raise MaxwellDomainError(f"p must lie in (0, {K}), got {p}")
    return p


def f_y(p, k2: float, ae: float, alpha: float):
    """Timelike y-factor."""
    p = _check_p(p, k2)
    j = ell.jacobi(p, k2)
    return (-16.0 * ae ** 4 * k2 ** 2 * j.cn ** 3 * j.dn * j.sn
            + (16.0 * ae ** 4 * k2 * j.eps - alpha ** 2 * p) * (j.dn ** 2 - k2 * j.cn ** 2 * j.sn ** 2))


def f1(p, k2: float, ae: float, alpha: float):
    """C1 y-factor; defined for every p > 0 (C1 has no explosion time)."""
    p = np.asarray(p, dtype=float)
    if np.any(p <= 0.0):
        raise MaxwellDomainError(f"p must be positive, got {p}")
    j = ell.jacobi(p, k2)
    return alpha * p * j.cn * j.dn + ae ** 2 * (2.0 * j.cn * j.dn * j.eps - (1.0 + k2) * j.sn + 2.0 * k2 * j.sn ** 3)


def f2(p, k2: float, ae: float, energy: float, reading: str = "energy"):
    """C2 y-factor.

    The leading term multiplies dn p by E times p (``reading="energy"``);
    ``reading="elliptic"`` substitutes the second-kind integral instead,
    which fails the factorisation against y and is kept only for audit.
    """
    p = _check_p(p, k2)
    j = ell.jacobi(p, k2)
    if reading == "energy":
        lead = energy * p
    elif reading == "elliptic":
        lead = j.eps
    else:
        raise ValueError(f"unknown reading {reading!r}")
    return -lead * j.dn - ae ** 2 * (2.0 * j.dn * j.eps - k2 * j.cn * j.sn)


def f3(p, k2: float):
    """C3 y-factor, valid for negative k2 as well."""
    p = _check_p(p, k2)
    j = ell.jacobi(p, k2)
    return j.cn * j.dn * ((1.0 - k2) * p - 2.0 * j.eps) + (1.0 + k2) * j.sn - 2.0 * k2 * j.sn ** 3


def f4(p, k2: float):
    """C3 y-factor at the positive modulus of c3_positive_modulus.

    Negative on (0, K): f4 = -p^3/3 + O(p^5).
    """
    p = _check_p(p, k2)
    j = ell.jacobi(p, k2)
    return 2.0 * j.cn * j.eps - p * j.cn - j.dn * j.sn


# comparison functions and, where available, closed-form (f/g)'

def g_y(p, k2):
    cn = ell.jacobi(p, k2).cn
    return k2 * (1.0 - k2 * (1.0 - cn ** 4))


def g2(p, k2):
    return ell.jacobi(p, k2).dn


def g3(p, k2):
    j = ell.jacobi(p, k2)
    return j.cn * j.dn


def g4(p, k2):
    return ell.jacobi(p, k2).cn


def ratio_derivative_f2(p, k2, ae, alpha):
    j = ell.jacobi(p, k2)
    return alpha ** 2 * j.sn ** 2 * j.cn ** 2 / (ae ** 2 * j.dn ** 2)


def ratio_derivative_f3(p, k2):
    j = ell.jacobi(p, k2)
    return (1.0 - k2) ** 2 * j.sn ** 2 / (j.cn ** 2 * j.dn ** 2)


def ratio_derivative_fy(p, k2, alpha):
    """(f_y/g_y)' = 4 alpha^2 sn^2 cn^2 dn^2 / (1 - k2 (1 - cn^4))^2 (alpha tied to k2, ae)."""
    j = ell.jacobi(p, k2)
    return 4.0 * alpha ** 2 * (j.sn * j.cn * j.dn) ** 2 / (1.0 - k2 * (1.0 - j.cn ** 4)) ** 2


def ratio_derivative_fy_printed(p, k2, alpha):
    """Published form of (f_y/g_y)'; disagrees with the true derivative (audit only)."""
    j = ell.jacobi(p, k2)
    return 4.0 * alpha ** 2 * j.sn ** 2 * j.cn ** 2 * j.dn / (1.0 - k2 * (1.0 - j.cn ** 4))


def small_p_coefficients(par: StratumParams) -> dict:
    """Leading cubic coefficients of each p-function for the given stratum parameters."""
    out = {}
    if par.stratum in (Stratum.TL_CPLUS, Stratum.TL_CMINUS):
        out["f_y"] = 4.0 / 3.0 * par.alpha ** 2 * par.k2
    if par.stratum is Stratum.SL_C2:
        out["f2"] = par.alpha * par.k2 / 3.0
    if par.stratum is Stratum.SL_C3:
        out["f3"] = par.alpha ** 2 / (3.0 * par.ae ** 4)
        out["f4"] = -1.0 / 3.0
    return out


# ------------------------------------------------------------ comparison check

@dataclass
class ComparisonResult:
    ok: bool
    failed: str | None
    g_min: float
    ratio_slope_min: float
    ratio_at_left: float

    def __bool__(self):
        return self.ok


def comparison_check(f: Callable, g: Callable, p_range: tuple[float, float], n: int = 10_000,
                     ratio_derivative: Callable | None = None, fd_step: float = 1e-5,
                     left_tol: float = 1e-8) -> ComparisonResult:
    """Grid check that g is a comparison function for f on (a, b).

    Hypotheses: g > 0, (f/g)' >= 0 and f/g -> 0 at the left end.  When they
    hold, f > 0 on the open range.  ``ratio_derivative`` is used when a closed
    form is known, otherwise central differences (one-sided at the ends).
    """
    a, b = p_range
    p = np.linspace(a, b, n + 2)[1:-1]
    gv = np.asarray(g(p))
    ratio = np.asarray(f(p)) / gv
    if ratio_derivative is not None:
        slope = np.asarray(ratio_derivative(p))
    else:
        h = fd_step
        inner = (p - h > a) & (p + h < b)
        pl = np.where(inner, p - h, p)
        pr = np.where(inner, p + h, np.where(p + h < b, p + h, p))
        pl = np.where(~inner & (p + h >= b), p - h, pl)
        slope = (np.asarray(f(pr)) / np.asarray(g(pr)) - np.asarray(f(pl)) / np.asarray(g(pl))) / (pr - pl)
    p0 = a + (b - a) * 1e-6
    left = float(np.asarray(f(p0)) / np.asarray(g(p0)))
    g_min, s_min = float(gv.min()), float(slope.min())
    # slopes are compared against rounding noise of the ratio
    noise = 1e-9 * max(1.0, float(np.abs(ratio).max()))
    failed = None
    if not g_min > 0:
        failed = "g > 0"
    elif not s_min >= -noise:
        failed = "(f/g)' >= 0"
    elif not abs(left) < left_tol:
        failed = "f/g -> 0 at left end"
    return ComparisonResult(failed is None, failed, g_min, s_min, left)


# ------------------------------------------------------------ roots

def find_roots(f: Callable, a: float, b: float, divisions: int | None = None, K: float | None = None,
               tol: float = ROOT_TOL, max_roots: int | None = None) -> list[tuple[float, float]]:
    """Brackets [lo, hi] of sign changes of f on (a, b), refined by bisection to width tol.

    The scan step is K/GRID_DIVISIONS when K is given.
    """
    if divisions is None:
        step = (K if K is not None else (b - a)) / GRID_DIVISIONS
        divisions = max(int(np.ceil((b - a) / step)), 2)
    grid = np.linspace(a, b, divisions + 1)[1:]
    grid = np.concatenate([[a + (grid[0] - a) * 1e-3], grid]) if a == 0 else np.concatenate([[a], grid])
    vals = np.asarray(f(grid))
    roots = []
    for i in np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]:
        lo, hi, flo = grid[i], grid[i + 1], vals[i]
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            fm = float(f(mid))
            if fm == 0.0:
                lo = hi = mid
                break
            if np.sign(fm) == np.sign(flo):
                lo, flo = mid, fm
            else:
                hi = mid
        roots.append((float(lo), float(hi)))
        if max_roots and len(roots) >= max_roots:
            break
    return roots


# ------------------------------------------------------------ reports

@dataclass
class MaxwellReport:
    stratum: str
    f_name: str
    grid_min: float | None
    first_root: float | None = None
    t_max1: float | None = None
    t_max2: float | None = None
    cut_bound: float = float("inf")
    no_bound: bool = False
    empty: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def to_json(self) -> str:
        d = asdict(self)
        d["cut_bound"] = None if not np.isfinite(self.cut_bound) else self.cut_bound
        return json.dumps(d, indent=2)


def _grid_min(fun: Callable, K: float, n: int = 10_000) -> float:
    p = np.linspace(0.0, K, n + 2)[1:-1]
    return float(np.min(fun(p)))


def cut_time_bound(lam: Covector) -> tuple[float, bool]:
    """(bound, no_bound): upper bound on the cut time in time units.

    C1: the first zero of sn p after 0 is p = 2K, i.e. t = 4K/ae.
    C2, C3: t_supr.  Other strata carry no bound (+inf, True).
    """
    from .expmap import t_supr

    red, _ = lam.reduced()
    st = classify(red)
    if st is Stratum.SL_C1:
        rc = rectify(red)
        return float(4.0 * ell.complete_K(rc.k2) / rc.ae), False
    if st in (Stratum.SL_C2, Stratum.SL_C3):
        return float(t_supr(red)), False
    return float("inf"), True


def c1_maxwell_times(par: StratumParams, p_max_periods: float = 8.0) -> tuple[float | None, float, tuple | None]:
    """(t_MAX1, t_MAX2, bracket of the first f1 root in p) for C1 parameters.

    The f1 scan covers p in (0, p_max_periods * K]; t = 2p/ae.
    """
    K = par.K
    # f1 = -alpha^2 p^3 / (3 ae^2) + O(p^5) sits under rounding noise of size
    # ~1e-12 ae^2 p until p ~ sqrt(3e-12) ae^2/|alpha|; start the scan there
    floor = min(np.sqrt(3e-12) * par.ae ** 2 / abs(par.alpha), K / 8.0)
    roots = find_roots(lambda p: f1(p, par.k2, par.ae, par.alpha), floor, p_max_periods * K, K=K, max_roots=1)
    t2 = 4.0 * K / par.ae
    if not roots:
        return None, t2, None
    lo, hi = roots[0]
    return float(2.0 * 0.5 * (lo + hi) / par.ae), t2, roots[0]


def maxwell_times(lam: Covector) -> MaxwellReport:
    red, _ = lam.reduced()
    st = classify(red)
    bound, nob = cut_time_bound(red)
    if st in (Stratum.TL_CPLUS, Stratum.TL_CMINUS):
        par = params_from_covector(red)
        gm = _grid_min(lambda p: f_y(p, par.k2, par.ae, par.alpha), par.K)
        rep = MaxwellReport(st.value, "f_y", gm, cut_bound=bound, no_bound=nob)
        if gm > 0:
            rep.empty.append("MAX2")
        rep.notes.append("no Maxwell time from eps^1, eps^2, eps^3 below t_supr")
        return rep
    if st is Stratum.SL_C1:
        par = params_from_covector(red)
        t1, t2, br = c1_maxwell_times(par)
        rep = MaxwellReport(st.value, "f1", None, first_root=None if br is None else 0.5 * (br[0] + br[1]),
                            t_max1=t1, t_max2=t2, cut_bound=bound, no_bound=nob)
        if t1 is not None and not t2 < t1:
            rep.notes.append("counterexample: t_MAX1 <= t_MAX2")
        return rep
    if st is Stratum.SL_C2:
        par = params_from_covector(red)
        gm = _grid_min(lambda p: f2(p, par.k2, par.ae, par.energy), par.K)
        rep = MaxwellReport(st.value, "f2", gm, cut_bound=bound, no_bound=nob)
        rep.empty.append("MAX2")
        if gm > 0:
            rep.empty.append("MAX1")
        return rep
    if st is Stratum.SL_C3:
        par = params_from_covector(red)
        gm = _grid_min(lambda p: f3(p, par.k2), par.K)
        rep = MaxwellReport(st.value, "f3", gm, cut_bound=bound, no_bound=nob)
        rep.empty.append("MAX2")
        if gm > 0:
            rep.empty.append("MAX1")
        return rep
    rep = MaxwellReport(st.value, "none", None, cut_bound=bound, no_bound=nob)
    rep.notes.append("no reflection p-function for this stratum")
    return rep
