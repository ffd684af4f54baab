import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from igpswitch.model import REFERENCE_PARAMS, DomainError, ModelParams, jacobian, vector_field

from conftest import random_params


def literal_rhs(s, p):
    """The field written with the switching denominators 1 + c*y/x and 1 + c*x/y."""
    x, y, z = s
    return np.array([
        (p.b1 - p.a11 * x) * x - p.a12 * x * y - p.a13 * x * z / (1 + p.c * y / x),
        -p.b2 * y + p.a21 * x * y - p.a23 * y * z / (1 + p.c * x / y),
        -p.b3 * z + p.a31 * x * z / (1 + p.c * y / x) + p.a32 * y * z / (1 + p.c * x / y),
    ])


def plain_lv(s, p):
    x, y, z = s
    return np.array([
        x * (p.b1 - p.a11 * x - p.a12 * y - p.a13 * z),
        y * (-p.b2 + p.a21 * x - p.a23 * z),
        z * (-p.b3 + p.a31 * x + p.a32 * y),
    ])


def fd_jacobian(s, p, h=1e-6):
    s = np.asarray(s, dtype=float)
    J = np.empty((3, 3))
    for j in range(3):
        step = h * max(1.0, abs(s[j]))
        e = np.zeros(3)
        e[j] = step
        J[:, j] = (np.array(vector_field(s + e, p)) - np.array(vector_field(s - e, p))) / (2 * step)
    return J


def test_origin_is_patched_to_rest():
    for p in (REFERENCE_PARAMS, REFERENCE_PARAMS.replace(c=0.0), REFERENCE_PARAMS.replace(c=3.0)):
        assert vector_field((0, 0, 0), p) == (0.0, 0.0, 0.0)


def test_singular_line_keeps_top_predator_mortality():
    assert vector_field((0, 0, 2.0), REFERENCE_PARAMS) == (0.0, 0.0, -2.5)


def test_carrying_capacity_is_rest_point(ref):
    assert vector_field((12.5, 0, 0), ref) == (0.0, 0.0, 0.0)


def test_matches_literal_switching_form(ref):
    got = np.array(vector_field((1, 1, 1), ref))
    np.testing.assert_allclose(got, literal_rhs((1, 1, 1), ref), rtol=1e-14)
    # both denominators are 2 at (1,1,1): 5-0.4-1-0.75, -1+1-0.5, -1.25+0.05+0.5
    np.testing.assert_allclose(got, [2.85, -0.5, -0.7], rtol=1e-14)


def test_form_equivalence_random_states(rng):
    p = REFERENCE_PARAMS
    for _ in range(1000):
        s = rng.uniform(1e-3, 20.0, 3)
        np.testing.assert_allclose(vector_field(s, p), literal_rhs(s, p), rtol=1e-12, atol=1e-12)


def test_reduces_to_plain_lotka_volterra_at_c0(rng):
    p = REFERENCE_PARAMS.replace(c=0.0)
    for _ in range(1000):
        s = rng.uniform(0.0, 20.0, 3)
        s[rng.random(3) < 0.1] = 0.0
        np.testing.assert_allclose(vector_field(s, p), plain_lv(s, p), rtol=1e-12, atol=1e-12)


@settings(max_examples=200, deadline=None)
@given(
    st.tuples(*[st.floats(0.0, 50.0)] * 3),
    st.floats(0.0, 3.0),
    st.integers(0, 2),
)
def test_coordinate_planes_are_invariant(s, c, face):
    s = list(s)
    s[face] = 0.0
    d = vector_field(s, REFERENCE_PARAMS.replace(c=c))
    assert d[face] == 0.0


@pytest.mark.parametrize("bad", [(-1, 1, 1), (1, np.nan, 1), (1, 1, np.inf), (1, 1)])
def test_invalid_state_rejected(bad, ref):
    with pytest.raises(DomainError):
        vector_field(bad, ref)


@pytest.mark.parametrize("field,value", [("b1", -1.0), ("c", float("nan")), ("a11", 0.0)])
def test_invalid_params_rejected(field, value):
    with pytest.raises(DomainError):
        REFERENCE_PARAMS.replace(**{field: value})


def test_jacobian_matches_finite_differences(ref):
    s = (2.0, 1.0, 1.0)
    J = jacobian(s, ref)
    F = fd_jacobian(s, ref)
    assert np.all(np.abs(J - F) <= 1e-5 * np.maximum(np.abs(F), 1.0))


def test_jacobian_fd_random_states(rng):
    for _ in range(100):
        p = random_params(rng)
        s = rng.uniform(0.05, 10.0, 3)
        J = jacobian(s, p)
        F = fd_jacobian(s, p)
        rel = np.abs(J - F) / np.maximum(np.abs(F), 1.0)
        assert rel.max() < 1e-5


def test_jacobian_on_prey_only_state(ref):
    J = jacobian((12.5, 0, 0), ref)
    assert J[0, 0] == pytest.approx(-5.0)


def test_jacobian_on_faces_matches_one_sided_differences(ref):
    # x = 0 face: the rational form is smooth there, so a forward difference in x works
    s = np.array([0.0, 2.0, 1.5])
    J = jacobian(s, ref)
    h = 1e-7
    for j in range(3):
        e = np.zeros(3)
        e[j] = h
        col = (np.array(vector_field(s + e, ref)) - np.array(vector_field(s, ref))) / h
        np.testing.assert_allclose(J[:, j], col, atol=1e-5)


def test_jacobian_rejects_singular_line(ref):
    with pytest.raises(DomainError):
        jacobian((0, 0, 1), ref)


def test_stable_focus_spectrum_at_c1(ref):
    from igpswitch.equilibria import solve_coexistence

    e4 = solve_coexistence(ref)
    ev = sorted(np.linalg.eigvals(jacobian(e4.point, ref)), key=lambda z: (z.real, z.imag))
    assert ev[0].real == pytest.approx(-2.1969, abs=1e-3)
    assert ev[1].real == pytest.approx(-0.1201, abs=1e-3)
    assert abs(ev[1].imag) == pytest.approx(2.3913, abs=1e-3)


def test_params_roundtrip():
    p = ModelParams(c=0.3)
    assert p.replace(c=1.0) == REFERENCE_PARAMS
    assert ModelParams(**p.as_dict()) == p
