"""Invariant suites behind ``engel-lorentz validate``.

Each suite returns a SuiteResult made of named checks (value against
tolerance).  ``ValidateConfig.tol`` overrides every tolerance at once,
which is how the negative control (tol = 1e-16) is produced.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import elliptic as ell
from .engel import Causal, frame_at, GroupPoint
from .expmap import (
    CLOSED_FORM_STRATA,
    SampleSpec,
    exp,
    exp_lightlike,
    horizon,
    lightlike_rhs,
    t_supr,
    validate_closed_forms,
)
from .maxwell import (
    c1_maxwell_times,
    comparison_check,
    f2,
    f3,
    f4,
    f_y,
    g2,
    g3,
    g4,
    g_y,
    maxwell_times,
    params_from_covector,
    params_from_modulus,
    ratio_derivative_f2,
    ratio_derivative_f3,
    ratio_derivative_fy,
    small_p_coefficients,
)
from .symmetry import apply_image, apply_preimage, check_commutation, valid_time
from .vertical import (
    SPACELIKE_STRATA,
    TIMELIKE_STRATA,
    Stratum,
    integrate_batch,
    rk4,
    sample_covector,
    vertical_flow,
)

SUITES = ("elliptic", "lightlike", "oracle", "conservation", "symmetry",
          "endpoint", "positivity", "maxwell", "maximality")
K_GRID = tuple(round(0.1 * i, 1) for i in range(1, 10))


@dataclass
class ValidateConfig:
    seed: int = 0
    only: str | None = None
    tol: float | None = None
    per_stratum: int = 50
    elliptic_samples: int = 100_000
    c1_samples: int = 100
    maximal_arcs: int = 10
    maximal_perturbations: int = 100


@dataclass
class Check:
    name: str
    value: float
    tol: float
    passed: bool
    detail: str = ""


@dataclass
class SuiteResult:
    name: str
    checks: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[str]:
        return [f"{self.name}.{c.name}" for c in self.checks if not c.passed]


class _Recorder:
    def __init__(self, name: str, cfg: ValidateConfig):
        self.res = SuiteResult(name)
        self.cfg = cfg

    def below(self, name: str, value: float, tol: float, detail: str = ""):
        tol = self.cfg.tol if self.cfg.tol is not None else tol
        value = float(value)
        self.res.checks.append(Check(name, value, tol, bool(value < tol), detail))

    # sign and yes/no checks carry no tolerance, so the override leaves them alone
    def positive(self, name: str, value: float, detail: str = ""):
        value = float(value)
        self.res.checks.append(Check(name, value, 0.0, bool(value > 0.0), detail))

    def flag(self, name: str, ok: bool, detail: str = ""):
        self.res.checks.append(Check(name, float(not ok), 0.5, bool(ok), detail))


def _rng(cfg: ValidateConfig, salt: int) -> np.random.Generator:
    return np.random.default_rng([cfg.seed, salt])


# ------------------------------------------------------------ suites

def suite_elliptic(cfg: ValidateConfig) -> SuiteResult:
    r = _Recorder("elliptic", cfg)
    rng = _rng(cfg, 1)
    n = cfg.elliptic_samples
    psi = rng.uniform(-10.0, 10.0, n)
    k2 = np.where(rng.random(n) < 0.3, rng.uniform(-4.0, 0.0, n), rng.uniform(0.0, 0.999, n))
    j = ell.jacobi(psi, k2)
    r.below("sn2+cn2", np.max(np.abs(j.sn ** 2 + j.cn ** 2 - 1.0)), 1e-12)
    r.below("dn2+k2sn2", np.max(np.abs(j.dn ** 2 + k2 * j.sn ** 2 - 1.0)), 1e-12)
    m = min(n, 20_000)
    h = 1e-4
    d = (ell.eps_incomplete(psi[:m] + h, k2[:m]) - ell.eps_incomplete(psi[:m] - h, k2[:m])) / (2 * h)
    r.below("eps'=dn2", np.max(np.abs(d - j.dn[:m] ** 2)), 1e-6)
    kk = np.linspace(-3.0, 0.99, 400)
    K = ell.complete_K(kk)
    q = ell.jacobi(K, kk)
    r.below("sn(K)=1", np.max(np.abs(q.sn - 1.0)), 1e-10)
    r.below("cn(K)=0", np.max(np.abs(q.cn)), 1e-10)
    r.below("dn(K)=k'", np.max(np.abs(q.dn - np.sqrt(1.0 - kk))), 1e-10)
    return r.res


def suite_lightlike(cfg: ValidateConfig) -> SuiteResult:
    r = _Recorder("lightlike", cfg)
    ts = np.array([0.1, 1.0, 2.0, 5.0])
    for b in (1, -1):
        exact = np.stack([ts, b * ts, 0 * ts, b * ts ** 3 / 3.0], axis=-1)
        r.below(f"closed[{b:+d}]", np.max(np.abs(exp_lightlike(ts, b) - exact) / np.maximum(1, np.abs(exact))), 1e-15)
        ode = rk4(lambda s: lightlike_rhs(s, b), np.zeros(4), 5.0, 1000, 200)[1:]
        ref = exp_lightlike(np.linspace(1.0, 5.0, 5), b)
        r.below(f"rk4[{b:+d}]", np.max(np.abs(ode - ref)), 1e-10)
        # the ODE block is the flow of X1 + b X2
        q = GroupPoint(0.3, -1.2, 0.4, 2.0)
        field_ = frame_at(q) @ np.array([1.0, b, 0.0, 0.0])
        r.below(f"frame[{b:+d}]", np.max(np.abs(lightlike_rhs(q.as_array(), b) - field_)), 1e-15)
    return r.res


def _oracle_reports(cfg: ValidateConfig, cache: dict):
    if "oracle" not in cache:
        cache["oracle"] = validate_closed_forms(SampleSpec(per_stratum=cfg.per_stratum, seed=cfg.seed))
    return cache["oracle"]


def suite_oracle(cfg: ValidateConfig, cache: dict) -> SuiteResult:
    r = _Recorder("oracle", cfg)
    reps = _oracle_reports(cfg, cache)
    for st in CLOSED_FORM_STRATA:
        rows = [x for x in reps if x.stratum == st.value]
        r.below(st.value, max(max(x.max_err.values()) for x in rows), 1e-6, f"n={len(rows)}")
    return r.res


def suite_conservation(cfg: ValidateConfig, cache: dict) -> SuiteResult:
    r = _Recorder("conservation", cfg)
    reps = _oracle_reports(cfg, cache)
    for st in CLOSED_FORM_STRATA:
        rows = [x for x in reps if x.stratum == st.value]
        r.below(f"H:{st.value}", max(x.h_drift for x in rows), 1e-8)
        r.below(f"E:{st.value}", max(x.e_drift for x in rows), 1e-8)
    return r.res


def _timed_samples(st: Stratum, n: int, rng: np.random.Generator):
    out = []
    while len(out) < n:
        lam = sample_covector(st, rng)
        t = float(rng.uniform(0.05, 1.0)) * min(5.0, 0.9 * t_supr(lam))
        if valid_time(lam, t):
            out.append((lam, t))
    return out


def suite_symmetry(cfg: ValidateConfig) -> SuiteResult:
    """Exp(eps^i(lambda, t)) against eps^i(Exp(lambda, t)), scaled by max(1, |Exp|)."""
    r = _Recorder("symmetry", cfg)
    rng = _rng(cfg, 2)
    for st in TIMELIKE_STRATA + SPACELIKE_STRATA:
        worst = np.zeros(3)
        for lam, t in _timed_samples(st, cfg.per_stratum, rng):
            scale = max(1.0, float(np.max(np.abs(exp(lam, t)))))
            for i in (1, 2, 3):
                worst[i - 1] = max(worst[i - 1], check_commutation(i, lam, t) / scale)
        for i in (1, 2, 3):
            r.below(f"eps{i}:{st.value}", worst[i - 1], 1e-8)
    return r.res


def suite_endpoint(cfg: ValidateConfig) -> SuiteResult:
    """Images of RK4 endpoints against RK4 from the transformed covectors."""
    r = _Recorder("endpoint", cfg)
    rng = _rng(cfg, 3)
    n_arcs = max(4, cfg.per_stratum // 5)
    for label, group in (("timelike", TIMELIKE_STRATA), ("spacelike", SPACELIKE_STRATA)):
        worst = np.zeros(3)
        for st in group:
            pairs = _timed_samples(st, n_arcs, rng)
            lams = [lam for lam, _ in pairs]
            T = np.array([t for _, t in pairs])
            imgs = [apply_preimage(i, lam, t)[0] for i in (1, 2, 3) for lam, t in pairs]
            ends = integrate_batch(lams + imgs, np.tile(T, 4), 10_000, 10_000)[-1, :, :4]
            q = ends[:n_arcs]
            scale = np.maximum(1.0, np.abs(q).max(axis=1))
            for i in (1, 2, 3):
                qi = ends[i * n_arcs:(i + 1) * n_arcs]
                mapped = apply_image(i, q, lams[0].causal)
                worst[i - 1] = max(worst[i - 1], float(np.max(np.abs(qi - mapped).max(axis=1) / scale)))
        for i in (1, 2, 3):
            r.below(f"eps{i}:{label}", worst[i - 1], 1e-8)
    return r.res


def suite_positivity(cfg: ValidateConfig) -> SuiteResult:
    """Sign of the Maxwell functions on (0, K) and the comparison-function certificates.

    f4 is negative with the sign convention of its factorisation against y,
    so the suite checks -f4 > 0; both signs leave the function root-free.
    """
    r = _Recorder("positivity", cfg)
    for k in K_GRID:
        k2 = k * k
        tl = params_from_modulus(Stratum.TL_CPLUS, k2)
        c2 = params_from_modulus(Stratum.SL_C2, k2)
        K = tl.K
        p = np.linspace(0.0, K, 10_002)[1:-1]
        funcs = {
            "f_y": (lambda x: f_y(x, k2, tl.ae, tl.alpha), lambda x: g_y(x, k2),
                    lambda x: ratio_derivative_fy(x, k2, tl.alpha)),
            "f2": (lambda x: f2(x, k2, c2.ae, c2.energy), lambda x: g2(x, k2),
                   lambda x: ratio_derivative_f2(x, k2, c2.ae, c2.alpha)),
            "f3": (lambda x: f3(x, k2), lambda x: g3(x, k2), lambda x: ratio_derivative_f3(x, k2)),
            "-f4": (lambda x: -f4(x, k2), lambda x: g4(x, k2), None),
        }
        for name, (f, g, rd) in funcs.items():
            r.positive(f"min {name} k={k}", np.min(f(p)))
            res = comparison_check(f, g, (0.0, K), ratio_derivative=rd)
            r.flag(f"compare {name} k={k}", res.ok, res.failed or "")
        # cubic coefficients at p = 1e-3
        p0 = 1e-3
        for par, name, fun in (
            (tl, "f_y", lambda x: f_y(x, k2, tl.ae, tl.alpha)),
            (c2, "f2", lambda x: f2(x, k2, c2.ae, c2.energy)),
            (params_from_modulus(Stratum.SL_C3, k2), "f3", lambda x: f3(x, k2)),
            (params_from_modulus(Stratum.SL_C3, k2), "f4", lambda x: f4(x, k2)),
        ):
            want = small_p_coefficients(par)[name]
            r.below(f"cubic {name} k={k}", abs(float(fun(p0)) / p0 ** 3 / want - 1.0), 1e-2)
    return r.res


def suite_maxwell(cfg: ValidateConfig) -> SuiteResult:
    r = _Recorder("maxwell", cfg)
    rng = _rng(cfg, 4)
    for st, key in ((Stratum.TL_CPLUS, "MAX2"), (Stratum.TL_CMINUS, "MAX2"),
                    (Stratum.SL_C2, "MAX1"), (Stratum.SL_C3, "MAX1")):
        bad = 0
        for _ in range(cfg.per_stratum):
            rep = maxwell_times(sample_covector(st, rng))
            bad += key not in rep.empty
        r.flag(f"empty {key}:{st.value}", bad == 0, f"{bad} non-empty of {cfg.per_stratum}")
    worst_gap, missing = np.inf, 0
    for _ in range(cfg.c1_samples):
        par = params_from_covector(sample_covector(Stratum.SL_C1, rng))
        t1, t2, _ = c1_maxwell_times(par)
        if t1 is None:
            missing += 1
            continue
        worst_gap = min(worst_gap, (t1 - t2) / t2)
    r.positive("C1 t_MAX1 - t_MAX2 (relative, min)", worst_gap, f"{missing} without an f1 root")
    r.flag("C1 f1 root found", missing == 0, f"{missing} of {cfg.c1_samples}")
    return r.res


# ------------------------------------------------------------ local maximality

def _horizontal_rhs(x, u1, u2):
    x1, x2 = x[..., 0], x[..., 1]
    return np.stack([u1, u2, (x1 * u2 - x2 * u1) / 2.0, u2 * (x1 ** 2 + x2 ** 2) / 2.0], axis=-1)


def control_endpoint(u1: np.ndarray, u2: np.ndarray, T: float) -> np.ndarray:
    """RK4 endpoint of x' = u1 X1 + u2 X2 from the identity.

    Controls are sampled at the 2n+1 nodes of n RK4 steps (half-steps
    included), shape (..., 2n+1).
    """
    n = (u1.shape[-1] - 1) // 2
    h = T / n
    x = np.zeros(u1.shape[:-1] + (4,))
    for i in range(n):
        a, m, b = 2 * i, 2 * i + 1, 2 * i + 2
        k1 = _horizontal_rhs(x, u1[..., a], u2[..., a])
        k2 = _horizontal_rhs(x + 0.5 * h * k1, u1[..., m], u2[..., m])
        k3 = _horizontal_rhs(x + 0.5 * h * k2, u1[..., m], u2[..., m])
        k4 = _horizontal_rhs(x + h * k3, u1[..., b], u2[..., b])
        x = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return x


def lorentz_length(u1: np.ndarray, u2: np.ndarray, T: float) -> np.ndarray:
    """Composite Simpson of sqrt(u1^2 - u2^2) over nodes spaced T/(2n)."""
    f = np.sqrt(u1 ** 2 - u2 ** 2)
    h = T / (f.shape[-1] - 1)
    return h / 3.0 * (f[..., 0] + f[..., -1] + 4.0 * f[..., 1:-1:2].sum(-1) + 2.0 * f[..., 2:-1:2].sum(-1))


@dataclass
class MaximalityResult:
    stratum: str
    extremal_length: float
    max_gain: float
    max_endpoint_miss: float
    min_causal_margin: float


def maximality_check(lam, T: float, rng: np.random.Generator, n_pert: int = 100, n_steps: int = 200,
                     modes: int = 6, amplitude: float = 0.05) -> MaximalityResult:
    """Perturb the extremal control, restore the endpoint, compare lengths.

    The perturbation is a random sine series in both controls; four
    correction directions (constant u1, constant u2, cos(pi s) u2,
    cos(2 pi s) u2) are fixed by Newton's method so that every perturbed
    curve ends where the extremal does.
    """
    s = np.linspace(0.0, 1.0, 2 * n_steps + 1)
    th, _ = vertical_flow(lam, s * T)
    u1, u2 = -lam.branch_sign * np.cosh(th), np.sinh(th)
    target = control_endpoint(u1, u2, T)
    base_len = float(lorentz_length(u1, u2, T))
    z = np.zeros_like(s)
    corr = np.array([[np.ones_like(s), z], [z, np.ones_like(s)], [z, np.cos(np.pi * s)], [z, np.cos(2 * np.pi * s)]])
    coef = rng.normal(size=(n_pert, 2, modes)) * amplitude / np.arange(1, modes + 1)
    sines = np.sin(np.pi * np.outer(np.arange(1, modes + 1), s))
    pert = coef @ sines  # (n_pert, 2, nodes)
    beta = np.zeros((n_pert, 4))

    def controls(b):
        reps = b.shape[0] // n_pert
        d = np.tile(pert, (reps, 1, 1)) + np.einsum("pm,mcs->pcs", b, corr)
        return u1 + d[:, 0], u2 + d[:, 1]

    eps = 1e-6
    for _ in range(30):
        F = control_endpoint(*controls(beta), T) - target
        if np.max(np.abs(F)) < 1e-14:
            break
        stacked = np.concatenate([beta + eps * e for e in np.eye(4)])
        Fp = (control_endpoint(*controls(stacked), T) - target).reshape(4, n_pert, 4)
        jac = np.transpose((Fp - F) / eps, (1, 2, 0))
        beta = beta - np.linalg.solve(jac, F[..., None])[..., 0]
    v1, v2 = controls(beta)
    miss = float(np.max(np.abs(control_endpoint(v1, v2, T) - target)))
    margin = float(np.min(v1 ** 2 - v2 ** 2))
    gain = float(np.max(lorentz_length(v1, v2, T))) - base_len if margin > 0 else np.inf
    return MaximalityResult(lam.causal.value, base_len, gain, miss, margin)


def suite_maximality(cfg: ValidateConfig) -> SuiteResult:
    r = _Recorder("maximality", cfg)
    rng = _rng(cfg, 5)
    T = 0.1
    worst_gain, worst_miss, worst_margin = -np.inf, 0.0, np.inf
    for a in range(cfg.maximal_arcs):
        st = TIMELIKE_STRATA[a % len(TIMELIKE_STRATA)]
        lam = sample_covector(st, rng)
        res = maximality_check(lam, T, rng, cfg.maximal_perturbations)
        worst_gain = max(worst_gain, res.max_gain)
        worst_miss = max(worst_miss, res.max_endpoint_miss)
        worst_margin = min(worst_margin, res.min_causal_margin)
    r.below("length gain", worst_gain, 1e-6)
    r.below("endpoint miss", worst_miss, 1e-12)
    r.positive("timelike margin", worst_margin)
    return r.res


# ------------------------------------------------------------ driver

def run(cfg: ValidateConfig | None = None) -> list[SuiteResult]:
    cfg = cfg or ValidateConfig()
    if cfg.only is not None and cfg.only not in SUITES:
        raise ValueError(f"unknown suite {cfg.only!r}; choose from {', '.join(SUITES)}")
    cache: dict = {}
    table = {
        "elliptic": lambda: suite_elliptic(cfg),
        "lightlike": lambda: suite_lightlike(cfg),
        "oracle": lambda: suite_oracle(cfg, cache),
        "conservation": lambda: suite_conservation(cfg, cache),
        "symmetry": lambda: suite_symmetry(cfg),
        "endpoint": lambda: suite_endpoint(cfg),
        "positivity": lambda: suite_positivity(cfg),
        "maxwell": lambda: suite_maxwell(cfg),
        "maximality": lambda: suite_maximality(cfg),
    }
    out = []
    for name in SUITES:
        if cfg.only is None or cfg.only == name:
            t0 = time.perf_counter()
            res = table[name]()
            res.seconds = time.perf_counter() - t0
            out.append(res)
    return out


def summary(results: list[SuiteResult], cfg: ValidateConfig, timings: bool = False) -> dict:
    """JSON-ready summary; timings are left out by default to keep output byte-stable."""
    suites = {}
    for res in results:
        row = {"passed": res.passed, "checks": [asdict(c) for c in res.checks]}
        if timings:
            row["seconds"] = res.seconds
        suites[res.name] = row
    failed = [f for res in results for f in res.failures()]
    return {"seed": cfg.seed, "tol_override": cfg.tol, "passed": not failed, "failed": failed, "suites": suites}
