import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from engel_lorentz.engel import (
    Causal,
    GroupPoint,
    HorizontalVector,
    causal_class,
    frame_at,
    group_inv,
    group_mul,
    horizontal_coeffs,
    is_spacelike,
    lie_bracket,
    lmul_array,
    metric,
)

coord = st.floats(-5, 5, allow_nan=False)
points = st.builds(GroupPoint, coord, coord, coord, coord)


def close(p, q, tol=1e-9):
    return np.allclose(p.as_array(), q.as_array(), atol=tol * max(1.0, np.abs(p.as_array()).max()))


@settings(max_examples=200)
@given(points, points, points)
def test_associative(p, q, r):
    assert close(group_mul(group_mul(p, q), r), group_mul(p, group_mul(q, r)))


@settings(max_examples=100)
@given(points)
def test_identity_and_inverse(p):
    e = GroupPoint.identity()
    assert group_mul(e, p) == p and group_mul(p, e) == p
    assert close(group_mul(p, group_inv(p)), e)
    assert close(group_mul(group_inv(p), p), e)


@settings(max_examples=50)
@given(points, points)
def test_vectorised_law(p, q):
    assert np.allclose(lmul_array(p.as_array(), q.as_array()), group_mul(p, q).as_array())


def _symbolic():
    x1, x2, y, z, a1, a2, b, w = sp.symbols("x1 x2 y z a1 a2 b w")
    prod = sp.Matrix([
        x1 + a1,
        x2 + a2,
        y + b + (x1 * a2 - a1 * x2) / 2,
        z + w + x2 * a2 * (x2 + a2) / 2 + x1 * b + x1 * a2 * (x1 + a1) / 2,
    ])
    q = sp.Matrix([x1, x2, y, z])
    # left-invariant fields: derivative of q * g at g = e along each axis
    fields = [prod.diff(v).subs({a1: 0, a2: 0, b: 0, w: 0}) for v in (a1, a2, b, w)]
    return q, fields


def test_frame_is_left_translation_derivative():
    q, fields = _symbolic()
    pt = GroupPoint(0.7, -1.3, 2.0, 0.4)
    subs = dict(zip(q, pt.as_array()))
    want = np.array([[float(f[i].subs(subs)) for f in fields] for i in range(4)])
    assert np.allclose(frame_at(pt), want)


def test_brackets_against_symbolic():
    q, fields = _symbolic()

    def br(X, Y):
        return Y.jacobian(q) * X - X.jacobian(q) * Y

    pt = GroupPoint(0.3, 1.1, -0.5, 2.2)
    subs = dict(zip(q, pt.as_array()))
    for i in range(1, 5):
        for j in range(1, 5):
            want = np.array([float(v) for v in br(fields[i - 1], fields[j - 1]).subs(subs)])
            assert np.allclose(lie_bracket(i, j, pt), want)


def test_growth_vector():
    pt = GroupPoint(0.2, -0.4, 1.0, 3.0)
    f = frame_at(pt)
    assert np.allclose(lie_bracket(1, 2, pt), f[:, 2])  # X3
    assert np.allclose(lie_bracket(1, 3, pt), f[:, 3])  # X4
    assert np.allclose(lie_bracket(2, 3, pt), 0)


@pytest.mark.parametrize("u,want", [
    ((1.0, 0.0), Causal.TIMELIKE),
    ((0.0, 1.0), Causal.SPACELIKE),
    ((1.0, 1.0), Causal.LIGHTLIKE),
    ((-2.0, 2.0), Causal.LIGHTLIKE),
    ((0.0, 0.0), Causal.ZERO),
])
def test_causal_class(u, want):
    assert causal_class(HorizontalVector(*u)) is want


def test_zero_counts_as_spacelike():
    assert is_spacelike(HorizontalVector(0.0, 0.0))
    assert not is_spacelike(HorizontalVector(1.0, 0.5))


def test_metric_signature():
    e1, e2 = HorizontalVector(1, 0), HorizontalVector(0, 1)
    assert metric(e1, e1) == -1 and metric(e2, e2) == 1 and metric(e1, e2) == 0


def test_horizontal_coeffs_roundtrip_and_rejects_vertical():
    pt = GroupPoint(0.5, 0.2, 0.0, 1.0)
    v = frame_at(pt) @ np.array([0.3, -0.7, 0, 0])
    h = horizontal_coeffs(pt, v)
    assert (h.u1, h.u2) == pytest.approx((0.3, -0.7))
    with pytest.raises(ValueError):
        horizontal_coeffs(pt, frame_at(pt)[:, 2])


def test_nonfinite_point_rejected():
    with pytest.raises(ValueError):
        GroupPoint(np.nan, 0, 0, 0)
