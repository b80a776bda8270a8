import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import solve_ivp

from engel_lorentz.engel import Causal, GroupPoint, frame_at
from engel_lorentz.vertical import (
    ELLIPTIC_STRATA,
    RECTIFIABLE,
    SPACELIKE_STRATA,
    TIMELIKE_STRATA,
    Covector,
    Stratum,
    StratumError,
    classify,
    energy,
    energy_of_state,
    hamiltonian_of_state,
    integrate,
    rectify,
    sample_covector,
    unrectify,
    vertical_flow,
)

ALL = TIMELIKE_STRATA + SPACELIKE_STRATA


def canonical_oracle(lam: Covector, T: float) -> np.ndarray:
    """Endpoint from the canonical equations in (q, p) in R^8.

    H(q, p) = (-<p, X1(q)>^2 + <p, X2(q)>^2)/2 with dH/dq by central
    differences of the frame; nothing from the chart or the reduced
    vertical system is used.
    """
    def ham(q, p):
        F = frame_at(GroupPoint.from_array(q))
        h = p @ F
        return 0.5 * (-h[0] ** 2 + h[1] ** 2), h

    def rhs(_, s):
        q, p = s[:4], s[4:]
        F = frame_at(GroupPoint.from_array(q))
        _, h = ham(q, p)
        dq = F @ np.array([-h[0], h[1], 0.0, 0.0])
        dp = np.empty(4)
        for i in range(4):
            e = np.zeros(4)
            e[i] = 1e-6
            dp[i] = -(ham(q + e, p)[0] - ham(q - e, p)[0]) / 2e-6
        return np.concatenate([dq, dp])

    sol = solve_ivp(rhs, (0, T), np.concatenate([np.zeros(4), lam.h()]), rtol=1e-11, atol=1e-12, method="DOP853")
    return sol.y[:4, -1]


@pytest.mark.parametrize("stratum", ALL, ids=lambda s: s.value)
def test_sampler_hits_stratum(stratum):
    rng = np.random.default_rng(7)
    for _ in range(20):
        assert classify(sample_covector(stratum, rng)) is stratum


@pytest.mark.parametrize("stratum", ALL, ids=lambda s: s.value)
def test_rk4_matches_canonical_equations(stratum):
    rng = np.random.default_rng(11)
    lam = sample_covector(stratum, rng)
    T = 0.8
    arc = integrate(lam, T, 4000)
    assert np.allclose(arc.points[-1], canonical_oracle(lam, T), atol=1e-7)


@pytest.mark.parametrize("branch", [1, -1])
@pytest.mark.parametrize("causal", ["timelike", "spacelike"])
def test_conservation_along_rk4(causal, branch):
    from engel_lorentz.expmap import t_supr

    lam = Covector(causal, 0.4, -0.9, 1.3, branch)
    arc = integrate(lam, min(2.0, 0.5 * t_supr(lam)), 4000)
    assert arc.h_drift < 1e-12
    assert arc.e_drift < 1e-9
    H0 = hamiltonian_of_state(np.array([0, 0, 0, 0, lam.theta, lam.c, lam.alpha]), causal)
    assert H0 == pytest.approx(-0.5 if causal == "timelike" else 0.5)


def test_hamiltonian_free_of_cancellation_at_large_theta():
    s = np.array([0, 0, 0, 0, 30.0, 1.0, 0.0])
    assert hamiltonian_of_state(s, "timelike") == pytest.approx(-0.5, abs=1e-15)
    assert hamiltonian_of_state(s, "spacelike") == pytest.approx(0.5, abs=1e-15)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(ALL), st.integers(0, 2 ** 31))
def test_vertical_flow_matches_rk4(stratum, seed):
    lam = sample_covector(stratum, np.random.default_rng(seed))
    from engel_lorentz.expmap import t_supr

    T = min(2.0, 0.5 * t_supr(lam))
    arc = integrate(lam, T, 2000)
    th, c = vertical_flow(lam, arc.times)
    scale = max(1.0, np.abs(arc.c).max(), np.abs(arc.theta).max())
    assert np.max(np.abs(th - arc.theta)) < 1e-8 * scale
    assert np.max(np.abs(c - arc.c)) < 1e-8 * scale


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(RECTIFIABLE), st.integers(0, 2 ** 31))
def test_rectify_roundtrip(stratum, seed):
    lam = sample_covector(stratum, np.random.default_rng(seed))
    rc = rectify(lam)
    th, c = unrectify(rc, 0.0)
    assert float(th) == pytest.approx(lam.theta, abs=1e-9 * max(1, abs(lam.theta)))
    assert float(c) == pytest.approx(lam.c, abs=1e-9 * max(1, abs(lam.c)))
    assert rc.energy == pytest.approx(energy(lam))
    if stratum is Stratum.SL_C1:
        # periodic stratum: psi0 is an amplitude on the whole circle
        assert abs(rc.psi0) <= 2 * rc.K + 1e-12
    elif stratum in ELLIPTIC_STRATA:
        assert abs(rc.psi0) < rc.K


def test_rectify_requires_branch_plus():
    with pytest.raises(StratumError):
        rectify(Covector("timelike", 0.1, 0.2, 0.3, -1))


def test_energy_integral_definition():
    lam = Covector("spacelike", 0.7, 1.1, -0.4)
    assert energy(lam) == pytest.approx(0.5 * 1.1 ** 2 + 0.4 * np.cosh(0.7))
    lam = Covector("timelike", 0.7, 1.1, -0.4)
    assert energy(lam) == pytest.approx(0.5 * 1.1 ** 2 + 0.4 * np.sinh(0.7))
    states = np.array([[0, 0, 0, 0, 0.7, 1.1, -0.4]])
    assert energy_of_state(states, "timelike")[0] == pytest.approx(energy(lam))


@pytest.mark.parametrize("lam,want", [
    (Covector("timelike", 0.3, 0.0, 0.0), Stratum.TL_C00),
    (Covector("timelike", 0.3, 1.0, 0.0), Stratum.TL_C0),
    (Covector("timelike", 0.3, 1.0, 0.5), Stratum.TL_CPLUS),
    (Covector("timelike", 0.3, 1.0, -0.5), Stratum.TL_CMINUS),
    (Covector("timelike", 0.3, 1.0, 0.5, -1), Stratum.TL_CPLUS),
    (Covector("spacelike", 0.3, 1.0, -0.5), Stratum.SL_C1),
    (Covector("spacelike", 0.0, 0.0, 2.0), Stratum.SL_C5),
    (Covector("spacelike", 0.3, 1.0, 0.0), Stratum.SL_C6),
    (Covector("spacelike", 0.3, 0.0, 0.0), Stratum.SL_C7),
    (Covector("spacelike", 2.0, 0.1, 1.0), Stratum.SL_C2),
    (Covector("spacelike", 0.1, 2.0, 1.0), Stratum.SL_C3),
    (Covector("spacelike", 1.0, 2 * np.sinh(0.5), 1.0), Stratum.SL_C4),
])
def test_classify_examples(lam, want):
    assert classify(lam) is want


def test_spacelike_branch_reduction_flips_alpha():
    # branch -1 with alpha > 0 behaves as branch +1 with alpha < 0
    assert classify(Covector("spacelike", 0.3, 1.0, 0.5, -1)) is Stratum.SL_C1


def test_covector_validation():
    with pytest.raises(ValueError):
        Covector("lightlike", 0, 0, 0)
    with pytest.raises(ValueError):
        Covector("timelike", 0, 0, 0, 2)
    with pytest.raises(StratumError):
        sample_covector(Stratum.LIGHT_PLUS, np.random.default_rng(0))
