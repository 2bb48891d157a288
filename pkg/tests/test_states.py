import json

import numpy as np
import pytest
from conftest import random_density, random_ket
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from hyperfid import linalg, states
from hyperfid.errors import InvalidDensityMatrix, InvalidDim, NormExceeded, NotPSD, StateFileError
from hyperfid.states import BlochVector, DensityMatrix


def test_qubit_examples():
    np.testing.assert_allclose(states.qubit_from_bloch([0, 0, 0]).matrix, np.eye(2) / 2)
    np.testing.assert_allclose(states.qubit_from_bloch([0, 0, 1]).matrix, np.diag([1, 0]))
    np.testing.assert_allclose(states.qubit_from_bloch([0.6, 0, 0]).matrix, [[0.5, 0.3], [0.3, 0.5]])


def test_qubit_norm_exceeded():
    with pytest.raises(NormExceeded):
        states.qubit_from_bloch([0.8, 0.8, 0])


def test_density_matrix_is_read_only():
    rho = states.maximally_mixed(3)
    with pytest.raises(ValueError):
        rho.matrix[0, 0] = 1


@pytest.mark.parametrize(
    "matrix, check",
    [
        ([[0.5, 0.1], [0.2, 0.5]], "hermitian"),
        ([[0.6, 0], [0, 0.6]], "trace"),
        ([[1.5, 0], [0, -0.5]], "positive"),
        ([[1.0, 0, 0]], "shape"),
    ],
)
def test_density_validation_names_failed_check(matrix, check):
    with pytest.raises(InvalidDensityMatrix) as info:
        DensityMatrix(np.array(matrix))
    assert info.value.check == check


def test_bloch_of_maximally_mixed():
    assert np.array_equal(states.bloch_from_density(states.maximally_mixed(2)).coords, np.zeros(3))
    np.testing.assert_allclose(states.bloch_from_density(states.maximally_mixed(3)).coords, np.zeros(8), atol=1e-16)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_round_trip(rng, n):
    for rho in random_density(rng, n, size=50):
        m = states.bloch_from_density(DensityMatrix(rho))
        back = states.qunit_from_bloch(m)
        np.testing.assert_allclose(back.matrix, rho, atol=1e-10)
        again = states.bloch_from_density(back)
        np.testing.assert_allclose(again.coords, m.coords, atol=1e-10)
        assert m.norm <= 1 + 1e-10


@pytest.mark.parametrize("n", [2, 3, 4])
def test_pure_states_sit_on_the_unit_sphere(rng, n):
    m = states.bloch_from_density(states.pure_state(random_ket(rng, n)))
    assert m.norm == pytest.approx(1.0, abs=1e-12)


def test_purity_bloch_relation(rng):
    for n in (2, 3, 4):
        rho = random_density(rng, n)
        m = states.bloch_coords(rho)
        assert states.purity(rho) == pytest.approx(1 / n + (n - 1) / n * m @ m, abs=1e-12)


def test_qunit_maximally_mixed():
    rho = states.qunit_from_bloch(BlochVector(np.zeros(8), 3))
    np.testing.assert_allclose(rho.matrix, np.eye(3) / 3, atol=1e-16)


def test_qunit_outside_state_space():
    m = np.zeros(8)
    m[0] = 1.0
    # oracle: spectrum of (1 + sqrt(3) lambda_1) / 3 from LAPACK
    lam1 = states.generator_basis(3).generators[0]
    expected = np.linalg.eigvalsh((np.eye(3) + np.sqrt(3) * lam1) / 3).min()
    assert expected == pytest.approx((1 - np.sqrt(3)) / 3)
    with pytest.raises(NotPSD) as info:
        states.qunit_from_bloch(BlochVector(m, 3))
    assert info.value.min_eigenvalue == pytest.approx(expected, abs=1e-12)


@given(arrays(float, 3, elements=st.floats(-1, 1)))
def test_qunit_reduces_to_qubit(n):
    norm = np.linalg.norm(n)
    if norm > 1:
        n = n / norm
    a = states.qubit_from_bloch(n).matrix
    b = states.qunit_from_bloch(BlochVector(n, 2)).matrix
    np.testing.assert_allclose(a, b, atol=1e-14, rtol=0)


def test_su2_basis_is_pauli():
    np.testing.assert_array_equal(states.generator_basis(2).generators, linalg.PAULI)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_generator_invariants(n):
    gens = states.generator_basis(n).generators
    assert len(gens) == n * n - 1
    gram = np.einsum("ajk,bkj->ab", gens, gens)
    np.testing.assert_allclose(gram, 2 * np.eye(n * n - 1), atol=1e-12)
    np.testing.assert_allclose(np.trace(gens, axis1=1, axis2=2), 0, atol=1e-12)
    assert np.max(linalg.max_asymmetry(gens)) < 1e-12


def test_generator_ordering_n3():
    gens = states.generator_basis(3).generators
    # symmetric (0,1), (0,2), (1,2), then antisymmetric, then diagonal
    assert gens[1][0, 2] == 1 and gens[1][2, 0] == 1
    assert gens[4][0, 2] == -1j
    np.testing.assert_allclose(np.diag(gens[7]).real, np.array([1, 1, -2]) / np.sqrt(3))


def test_generator_basis_rejects_small_n():
    with pytest.raises(InvalidDim):
        states.generator_basis(1)


def test_purity_examples(rng):
    assert states.purity(states.maximally_mixed(4)) == pytest.approx(0.25)
    assert states.purity(states.pure_state(random_ket(rng, 3))) == pytest.approx(1.0)
    assert states.purity(states.qubit_from_bloch([0, 0.6, 0])) == pytest.approx(0.68)


def test_purity_range(rng):
    for n in (2, 3, 4):
        for rho in random_density(rng, n, size=20):
            assert 1 / n - 1e-10 <= states.purity(rho) <= 1 + 1e-10


# --- state files ---


def test_parse_bloch_document():
    rho = states.parse_state({"dim": 2, "bloch": [0.6, 0, 0]})
    np.testing.assert_allclose(rho.matrix, [[0.5, 0.3], [0.3, 0.5]])


def test_parse_matrix_document_round_trip(rng, tmp_path):
    rho = DensityMatrix(random_density(rng, 3))
    path = tmp_path / "s.json"
    path.write_text(json.dumps(states.state_document(rho)))
    assert np.array_equal(states.load_state(path).matrix, rho.matrix)
    back = states.parse_state(json.loads(json.dumps(states.state_document(rho, "bloch"))))
    np.testing.assert_allclose(back.matrix, rho.matrix, atol=1e-14)


@pytest.mark.parametrize(
    "doc, fragment",
    [
        ({"dim": 2}, "exactly one"),
        ({"dim": 2, "bloch": [0, 0, 0], "matrix": []}, "exactly one"),
        ({"dim": 1, "bloch": []}, '"dim"'),
        ({"dim": 2, "bloch": [0, 0]}, "needs 3 numbers"),
        ({"dim": 2, "bloch": [1, 1, 0]}, "norm"),
        ({"dim": 3, "bloch": [1, 0, 0, 0, 0, 0, 0, 0]}, "positive semidefinite"),
        ({"dim": 2, "matrix": [[[1.5, 0], [0, 0]], [[0, 0], [-0.5, 0]]]}, "positive"),
        ({"dim": 2, "matrix": [[[0.5, 0], [0.1, 0]], [[0.2, 0], [0.5, 0]]]}, "hermitian"),
        ({"dim": 2, "matrix": [[[0.5, 0], [0, 0]], [[0, 0], [0.6, 0]]]}, "trace"),
        ({"dim": 2, "matrix": [[1, 0], [0, 1]]}, "shape"),
        ([1, 2], "JSON object"),
    ],
)
def test_parse_errors(doc, fragment):
    with pytest.raises(StateFileError, match=fragment):
        states.parse_state(doc)


def test_load_state_bad_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(StateFileError, match="invalid JSON"):
        states.load_state(path)
