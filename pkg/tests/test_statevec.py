import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qpcsim.statevec import (
    BadPermutation,
    BellOutcome,
    DuplicateLabel,
    NotUnitary,
    OrthonormalBasis,
    StateVector,
    apply_unitary,
    basis_state,
    bell_basis,
    bell_state,
    inner,
    measure,
    outcome_probabilities,
    reorder,
    single_qubit_state,
    states_equal_up_to_phase,
    tensor,
    x_basis,
    z_basis,
)


def test_basis_state_index_arithmetic():
    # |10101> over 5 qubits, first label most significant:
    # index = 1*16 + 0*8 + 1*4 + 0*2 + 1*1 = 21
    s = basis_state([1, 0, 1, 0, 1])
    assert s.amps[21] == 1.0
    assert np.count_nonzero(s.amps) == 1
    # and the one from the docstring-style worked example: 0*32+1*16+0*8+1*4 = 20
    s6 = basis_state([0, 1, 0, 1, 0, 0])
    assert s6.amps[20] == 1.0


def test_duplicate_labels_rejected():
    with pytest.raises(DuplicateLabel):
        StateVector((1, 1), np.array([1, 0, 0, 0], dtype=complex))


def test_tensor_is_kronecker():
    a = single_qubit_state("+", label="a")
    b = single_qubit_state("1", label="b")
    ab = tensor(a, b)
    assert ab.labels == ("a", "b")
    np.testing.assert_allclose(ab.amps, np.kron(a.amps, b.amps))


def test_reorder_permutes_amplitudes():
    s = basis_state([0, 1, 1], labels=("a", "b", "c"))  # index 3
    r = reorder(s, ("c", "a", "b"))
    # |011>_abc = |1 0 1>_cab -> index 5
    assert r.amps[5] == 1.0
    with pytest.raises(BadPermutation):
        reorder(s, ("a", "b"))
    with pytest.raises(BadPermutation):
        reorder(s, ("a", "b", "x"))


def test_bell_states_orthonormal():
    kets = [bell_state(k).amps for k in BellOutcome]
    gram = np.array([[np.vdot(u, v) for v in kets] for u in kets])
    np.testing.assert_allclose(gram, np.eye(4), atol=1e-12)


def test_bell_basis_names_in_fixed_order():
    assert bell_basis().names == ("Phi+", "Phi-", "Psi+", "Psi-")


def test_x_basis_amplitudes():
    b = x_basis(1)
    np.testing.assert_allclose(b.matrix[0], [1, 1] / np.sqrt(2))
    np.testing.assert_allclose(b.matrix[1], [1, -1] / np.sqrt(2))


def test_orthonormal_basis_rejects_non_orthonormal():
    with pytest.raises(Exception):
        OrthonormalBasis("bad", np.array([[1.0, 0.0], [1.0, 0.0]],
                                         dtype=complex), ("a", "b"))


def test_measure_collapses_and_normalizes():
    rng = np.random.default_rng(0)
    s = bell_state(BellOutcome.PHI_PLUS, labels=(1, 2))
    rec, post = measure(s, (1,), z_basis(1), rng)
    assert rec.outcome_index in (0, 1)
    assert abs(post.norm() - 1.0) < 1e-12
    # the partner qubit is now perfectly correlated
    rec2, _ = measure(post, (2,), z_basis(1), rng)
    assert rec2.outcome_index == rec.outcome_index


def test_bell_measurement_probabilities():
    s = bell_state(BellOutcome.PSI_MINUS, labels=(1, 2))
    probs = outcome_probabilities(s, (1, 2), bell_basis())
    np.testing.assert_allclose(probs, [0, 0, 0, 1], atol=1e-12)


def test_apply_unitary_checks_unitarity():
    s = basis_state([0])
    with pytest.raises(NotUnitary):
        apply_unitary(s, np.array([[1, 1], [0, 1]], dtype=complex), (1,))


def test_apply_unitary_hadamard():
    h = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    s = apply_unitary(basis_state([0]), h, (1,))
    assert states_equal_up_to_phase(s, single_qubit_state("+"))


def test_global_phase_insensitive_equality():
    s = bell_state(BellOutcome.PHI_PLUS)
    t = StateVector(s.labels, np.exp(1j * 0.7) * s.amps)
    assert states_equal_up_to_phase(s, t)
    assert not states_equal_up_to_phase(s, bell_state(BellOutcome.PHI_MINUS))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 31 - 1), st.integers(1, 4))
def test_measurement_preserves_norm_and_support(seed, n):
    rng = np.random.default_rng(seed)
    amps = rng.normal(size=2 ** n) + 1j * rng.normal(size=2 ** n)
    amps /= np.linalg.norm(amps)
    s = StateVector(tuple(range(n)), amps)
    targets = tuple(range(rng.integers(1, n + 1)))
    rec, post = measure(s, targets, z_basis(len(targets)), rng)
    assert abs(post.norm() - 1.0) < 1e-10
    probs = outcome_probabilities(s, targets, z_basis(len(targets)))
    assert probs[rec.outcome_index] > 0


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 31 - 1))
def test_inner_product_is_hermitian(seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=4) + 1j * rng.normal(size=4)
    b = rng.normal(size=4) + 1j * rng.normal(size=4)
    sa = StateVector((1, 2), a / np.linalg.norm(a))
    sb = StateVector((1, 2), b / np.linalg.norm(b))
    assert inner(sa, sb) == pytest.approx(np.conj(inner(sb, sa)))


def test_dump_json_roundtrip_precision():
    import json

    s = bell_state(BellOutcome.PHI_PLUS, labels=(1, 2))
    data = json.loads(s.dump_json())
    vals = {entry["index"]: entry["re"] for entry in data}
    assert set(vals) == {0, 3}
    assert vals[0] == pytest.approx(1 / np.sqrt(2), abs=1e-16)
