import numpy as np
import pytest
from conftest import qubit, random_ball
from hypothesis import given
from hypothesis import strategies as st

from hyperfid import fidelity, hyperbolic, linalg
from hyperfid.errors import DimMismatch, DomainError, PureStateSingularity
from hyperfid.hyperbolic import HyperbolicTriangle, Rapidity
from hyperfid.states import BlochVector

U, V = np.array([0.6, 0, 0]), np.array([0, 0.6, 0])

ball = st.lists(st.floats(-0.57, 0.57), min_size=3, max_size=3).map(np.array)


def test_rapidity_examples():
    assert hyperbolic.rapidity_of([0, 0, 0]) == 0.0
    assert hyperbolic.rapidity_of(U) == pytest.approx(np.arctanh(0.6))
    with pytest.raises(PureStateSingularity):
        hyperbolic.rapidity_of([0, 0, 1])
    with pytest.raises(ValueError):
        Rapidity(-0.1)


def test_worked_pair_every_route():
    assert hyperbolic.geometric_bures(U, V) == pytest.approx(0.82, abs=1e-12)
    assert hyperbolic.closed_form_bures(0.6, 0.6, 0.0) == pytest.approx(0.82, abs=1e-12)
    assert hyperbolic.geometric_a_fidelity(U, V) == pytest.approx(0.81, abs=1e-12)
    assert hyperbolic.trace_sqrt_product(U, V) ** 2 == pytest.approx(0.81, abs=1e-12)
    cos2 = hyperbolic.closed_form_cos2_half_defect(0.82, 0.6, 0.6)
    assert 0.82 * cos2 == pytest.approx(0.81, abs=1e-12)
    assert hyperbolic.triangle_of(U, V).cos2_half_defect == pytest.approx(cos2, abs=1e-12)


def test_einstein_addition_examples():
    w = hyperbolic.einstein_add([0.5, 0, 0], [0.5, 0, 0])
    assert w.coords == pytest.approx([0.8, 0, 0])
    assert hyperbolic.einstein_add([0, 0, 0], V).coords == pytest.approx(V)
    assert hyperbolic.einstein_add(U, [0, 0, 0]).coords == pytest.approx(U)
    assert hyperbolic.einstein_add(U, -U).norm == pytest.approx(0, abs=1e-15)


def test_einstein_addition_is_not_commutative():
    a, b = hyperbolic.einstein_add(U, V), hyperbolic.einstein_add(V, U)
    assert a.norm == pytest.approx(b.norm)
    assert not np.allclose(a.coords, b.coords)


@given(ball, ball)
def test_einstein_sum_matches_cosine_law(u, v):
    w = hyperbolic.einstein_add(u, v)
    assert w.norm < 1
    pu, pv = hyperbolic.rapidity_of(u), hyperbolic.rapidity_of(v)
    nu, nv, dot = hyperbolic.invariants(u, v)
    cos_angle = dot / (nu * nv) if nu * nv > 0 else 1.0
    cw = hyperbolic.cosine_law_cosh_w(pu, pv, cos_angle)
    assert np.arccosh(cw) == pytest.approx(hyperbolic.rapidity_of(w.coords), abs=1e-9)


def test_einstein_add_higher_dimension():
    w = hyperbolic.einstein_add(BlochVector([0.1] * 8, 3), BlochVector([0.2] * 8, 3))
    assert w.dim == 3 and w.norm < 1
    with pytest.raises(DimMismatch):
        hyperbolic.einstein_add(BlochVector([0.1] * 8, 3), BlochVector([0.1] * 3, 2))


def test_cosine_law_rejects_bad_angle():
    with pytest.raises(DomainError):
        hyperbolic.cosine_law_cosh_w(0.3, 0.4, 1.5)


def test_collinear_vectors_have_no_defect():
    tri = hyperbolic.triangle_of([0.3, 0, 0], [0.7, 0, 0])
    assert tri.cos_half_defect == 1.0
    assert tri.defect == 0.0
    assert hyperbolic.triangle_of([0, 0, 0], V).cos_half_defect == pytest.approx(1.0, abs=1e-15)


def test_triangle_validation():
    with pytest.raises(ValueError):
        HyperbolicTriangle(0.1, 0.1, 1.0, 0.9)
    with pytest.raises(ValueError):
        HyperbolicTriangle(0.5, 0.5, 0.5, 1.5)
    with pytest.raises(ValueError):
        HyperbolicTriangle(0.5, 0.5, 0.5, 0.5)


def test_pure_states_are_singular_for_the_triangle():
    with pytest.raises(PureStateSingularity):
        hyperbolic.triangle_of([1, 0, 0], V)
    with pytest.raises(PureStateSingularity):
        hyperbolic.geometric_bures([0, 0.6, 0.8], V)


def test_closed_forms_accept_pure_states():
    assert hyperbolic.closed_form_bures(1.0, 1.0, 1.0) == pytest.approx(1.0)
    assert hyperbolic.closed_form_bures(1.0, 1.0, 0.0) == pytest.approx(0.5)
    assert hyperbolic.closed_form_cos2_half_defect(1.0, 1.0, 1.0) == pytest.approx(1.0)


def test_closed_form_domain_errors():
    with pytest.raises(DomainError):
        hyperbolic.closed_form_bures(1.2, 0.5, 0.0)
    with pytest.raises(DomainError):
        hyperbolic.closed_form_bures(0.5, 0.5, 0.3)
    with pytest.raises(DomainError):
        hyperbolic.closed_form_cos2_half_defect(0.0, 0.5, 0.5)
    with pytest.raises(DomainError):
        hyperbolic.closed_form_cos2_half_defect(1.1, 0.5, 0.5)


def test_quadratic_endpoints(rng):
    for nu, nv in rng.uniform(0, 1, size=(50, 2)):
        a, b = np.sqrt(1 - nu**2), np.sqrt(1 - nv**2)
        assert hyperbolic.defect_quadratic_f(0.0, nu, nv) == pytest.approx(-((a + b) ** 2))
        assert hyperbolic.defect_quadratic_f(1.0, nu, nv) == pytest.approx(4 * a * b - (a + b) ** 2)


def test_bures_range_contains_samples(rng):
    u, v = random_ball(rng, 2000), random_ball(rng, 2000)
    nu, nv, dot = hyperbolic.invariants(u, v)
    fb = hyperbolic.closed_form_bures(nu, nv, dot)
    lo, hi = hyperbolic.bures_range(nu, nv)
    assert np.all(fb >= lo - 1e-15) and np.all(fb <= hi + 1e-15)


def test_bures_never_exceeds_cos2_half_defect(rng):
    u, v = random_ball(rng, 5000), random_ball(rng, 5000)
    nu, nv, dot = hyperbolic.invariants(u, v)
    fb = hyperbolic.closed_form_bures(nu, nv, dot)
    assert np.all(fb <= hyperbolic.closed_form_cos2_half_defect(fb, nu, nv) + 1e-12)


def test_matrix_cross_checks(rng):
    u, v = random_ball(rng, 1000, 0.999), random_ball(rng, 1000, 0.999)
    a, b = qubit(u), qubit(v)
    nu, nv, dot = hyperbolic.invariants(u, v)
    fb = fidelity.bures_fidelity(a, b)
    np.testing.assert_allclose(hyperbolic.geometric_bures_from_invariants(nu, nv, dot), fb, atol=1e-9)
    np.testing.assert_allclose(hyperbolic.closed_form_bures(nu, nv, dot), fb, atol=1e-10)
    np.testing.assert_allclose(hyperbolic.geometric_a_fidelity_from_invariants(nu, nv, dot), fidelity.a_fidelity(a, b), atol=1e-9)


def test_defect_routes_agree(rng):
    u, v = random_ball(rng, 1000, 0.999), random_ball(rng, 1000, 0.999)
    nu, nv, dot = hyperbolic.invariants(u, v)
    triangle = hyperbolic.cos_half_defect_from_invariants(nu, nv, dot) ** 2
    closed = hyperbolic.closed_form_cos2_half_defect(hyperbolic.closed_form_bures(nu, nv, dot), nu, nv)
    np.testing.assert_allclose(triangle, closed, atol=1e-10)


def test_theorem_one_over_many_pairs(rng):
    u, v = random_ball(rng, 10_000, 1 - 1e-6), random_ball(rng, 10_000, 1 - 1e-6)
    a, b = qubit(u), qubit(v)
    nu, nv, dot = hyperbolic.invariants(u, v)
    predicted = fidelity.bures_fidelity(a, b) * hyperbolic.cos_half_defect_from_invariants(nu, nv, dot) ** 2
    assert np.max(np.abs(fidelity.a_fidelity(a, b) - predicted)) < 1e-9


@pytest.mark.parametrize("t", [0.0, 0.3, 0.9])
def test_qubit_sqrt_matches_matrix_root(t):
    n = t * np.array([0.48, -0.6, 0.64])
    np.testing.assert_allclose(hyperbolic.qubit_sqrt(n), linalg.psd_sqrt(qubit(n)), atol=1e-12)
