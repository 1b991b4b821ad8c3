import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import NumpyRng, ScriptedRng, assert_within_sigma
from pingpong import qsim
from pingpong.qsim import (MINUS, PLUS, X_BASIS, Z_BASIS, BellLabel, MeasBasis, SingleQubitOp,
                           StateVector, apply_op, basis_state, bell_measure, bell_probabilities,
                           fidelity, measure, prepare_bell)

THETA = math.asin(math.sqrt(0.1))
H = math.sqrt(0.5)


def test_basis_state_examples():
    assert np.allclose(basis_state(Z_BASIS, PLUS).amps, [1, 0])
    assert np.allclose(basis_state(X_BASIS, PLUS).amps, [H, H], atol=1e-15)
    amps = basis_state(MeasBasis(THETA), PLUS).amps
    assert amps[0] == pytest.approx(math.sqrt(0.9), abs=1e-15)
    assert amps[1] == pytest.approx(math.sqrt(0.1), abs=1e-15)
    minus = basis_state(MeasBasis(THETA), MINUS).amps
    assert np.allclose(minus, [-math.sqrt(0.1), math.sqrt(0.9)])


@given(st.floats(0, math.pi / 2 - 1e-9))
def test_basis_pair_is_orthonormal(theta):
    b = MeasBasis(theta)
    gram = np.array([[np.vdot(b.vector(a), b.vector(c)) for c in (PLUS, MINUS)] for a in (PLUS, MINUS)])
    assert np.allclose(gram, np.eye(2), atol=1e-12)


def test_basis_rejects_bad_angles():
    with pytest.raises(ValueError):
        MeasBasis(-0.1)
    with pytest.raises(ValueError):
        MeasBasis(2.0)


def test_state_vector_validation():
    with pytest.raises(ValueError):
        StateVector(np.array([1, 1]))
    with pytest.raises(ValueError):
        StateVector(np.array([1, 0, 0]))
    with pytest.raises(ValueError):
        StateVector(np.array([np.nan, 0]))


def test_prepare_bell_amplitudes():
    assert np.allclose(prepare_bell(BellLabel.PSI_PLUS).amps, [0, H, H, 0])
    assert np.allclose(prepare_bell(BellLabel.PHI_MINUS).amps, [H, 0, 0, -H])
    assert fidelity(prepare_bell(BellLabel.PSI_PLUS), prepare_bell(BellLabel.PSI_MINUS)) == pytest.approx(0, abs=1e-15)


def test_bell_states_orthonormal():
    for a in BellLabel:
        for b in BellLabel:
            assert fidelity(prepare_bell(a), prepare_bell(b)) == pytest.approx(float(a is b), abs=1e-15)


def test_z_on_home_maps_psi_plus_to_psi_minus():
    out = apply_op(prepare_bell(BellLabel.PSI_PLUS), SingleQubitOp.Z, 0)
    assert abs(fidelity(out, prepare_bell(BellLabel.PSI_MINUS)) - 1) <= 1e-12


def test_x_on_travel_matches_hand_matrix():
    # I (x) X written out by hand in the |00>,|01>,|10>,|11> ordering
    i_x = np.array([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
    psi = prepare_bell(BellLabel.PSI_PLUS)
    out = apply_op(psi, SingleQubitOp.X, 1)
    assert np.allclose(out.amps, i_x @ psi.amps)
    assert abs(fidelity(out, prepare_bell(BellLabel.PHI_PLUS)) - 1) <= 1e-12


def test_identity_is_noop_and_target_checked():
    psi = prepare_bell(BellLabel.PHI_PLUS)
    assert np.array_equal(apply_op(psi, SingleQubitOp.I, 1).amps, psi.amps)
    with pytest.raises(IndexError):
        apply_op(psi, SingleQubitOp.Z, 2)
    with pytest.raises(IndexError):
        apply_op(basis_state(Z_BASIS, PLUS), SingleQubitOp.Z, 1)


def test_measure_probabilities_examples():
    plus_theta = basis_state(MeasBasis(THETA), PLUS)
    assert qsim.outcome_probability(plus_theta, 0, Z_BASIS, MINUS) == pytest.approx(0.1, abs=1e-15)
    assert qsim.outcome_probability(basis_state(Z_BASIS, PLUS), 0, Z_BASIS, PLUS) == 1
    coded = apply_op(plus_theta, SingleQubitOp.Z, 0)
    assert qsim.outcome_probability(coded, 0, MeasBasis(THETA), PLUS) == pytest.approx(0.64, abs=1e-12)


def test_measure_uses_single_draw_against_plus_branch():
    state = basis_state(MeasBasis(THETA), PLUS)   # P(+) in sigma_z = 0.9
    assert measure(state, 0, Z_BASIS, ScriptedRng([0.899]))[0] == PLUS
    assert measure(state, 0, Z_BASIS, ScriptedRng([0.901]))[0] == MINUS


def test_zero_probability_branch_never_returned():
    zero = basis_state(Z_BASIS, PLUS)
    for u in (0.0, 0.5, 1 - 2 ** -53):
        assert measure(zero, 0, Z_BASIS, ScriptedRng([u]))[0] == PLUS
    one = basis_state(Z_BASIS, MINUS)
    assert measure(one, 0, Z_BASIS, ScriptedRng([0.0]))[0] == MINUS


def test_two_qubit_collapse_then_repeat_is_stable(rng):
    psi = prepare_bell(BellLabel.PSI_PLUS)
    for _ in range(200):
        sign, collapsed = measure(psi, 1, X_BASIS, rng)
        for _ in range(3):
            again, collapsed = measure(collapsed, 1, X_BASIS, rng)
            assert again == sign


def test_measure_and_discard_returns_partner(rng):
    psi = prepare_bell(BellLabel.PSI_PLUS)
    for _ in range(50):
        sign, home = qsim.measure_and_discard(psi, 1, Z_BASIS, rng)
        expected = basis_state(Z_BASIS, MINUS if sign == PLUS else PLUS)
        assert fidelity(home, expected) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("theta_state,theta_basis", [(THETA, 0.0), (0.3, 0.7), (1.2, math.pi / 4)])
def test_measurement_frequencies_match_born_rule(theta_state, theta_basis):
    state = basis_state(MeasBasis(theta_state), PLUS)
    basis = MeasBasis(theta_basis)
    rng = NumpyRng(7)
    n = 100_000
    plus = sum(measure(state, 0, basis, rng)[0] == PLUS for _ in range(n))
    p = math.cos(theta_state - theta_basis) ** 2
    assert_within_sigma(plus / n, p, n)


def _brute_bell_probs(amps):
    # expand against the four Bell vectors written out independently
    bell = {
        BellLabel.PSI_PLUS: [0, 1, 1, 0], BellLabel.PSI_MINUS: [0, 1, -1, 0],
        BellLabel.PHI_PLUS: [1, 0, 0, 1], BellLabel.PHI_MINUS: [1, 0, 0, -1],
    }
    return {k: abs(sum(c * a for c, a in zip(v, amps)) / math.sqrt(2)) ** 2 for k, v in bell.items()}


def test_bell_probabilities_for_product_state():
    c, s = math.cos(THETA), math.sin(THETA)
    state = qsim.tensor(basis_state(Z_BASIS, MINUS), basis_state(MeasBasis(THETA), PLUS))
    probs = bell_probabilities(state)
    oracle = _brute_bell_probs(state.amps)
    for label in BellLabel:
        assert probs[label] == pytest.approx(oracle[label], abs=1e-15)
    assert probs[BellLabel.PSI_PLUS] == pytest.approx(c * c / 2)
    assert probs[BellLabel.PHI_MINUS] == pytest.approx(s * s / 2)
    assert sum(probs.values()) == pytest.approx(1.0, abs=1e-9)


def test_bell_measure_eigenstates(rng):
    for label in BellLabel:
        for _ in range(20):
            got, post = bell_measure(prepare_bell(label), rng)
            assert got is label
            assert fidelity(post, prepare_bell(label)) == pytest.approx(1.0)


def test_bell_measure_skips_zero_branches():
    state = prepare_bell(BellLabel.PHI_PLUS)
    assert bell_measure(state, ScriptedRng([0.0]))[0] is BellLabel.PHI_PLUS
    assert bell_measure(state, ScriptedRng([1 - 2 ** -53]))[0] is BellLabel.PHI_PLUS


def test_fidelity_examples():
    plus_theta = basis_state(MeasBasis(THETA), PLUS)
    coded = apply_op(plus_theta, SingleQubitOp.Z, 0)
    assert fidelity(plus_theta, coded) == pytest.approx(0.64, abs=1e-12)
    assert fidelity(plus_theta, plus_theta) == pytest.approx(1.0, abs=1e-15)
    assert fidelity(plus_theta, basis_state(MeasBasis(THETA), MINUS)) == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(ValueError):
        fidelity(plus_theta, prepare_bell(BellLabel.PSI_PLUS))


def test_tensor_and_split_roundtrip():
    a = basis_state(MeasBasis(0.2), PLUS)
    b = basis_state(MeasBasis(1.1), MINUS)
    left, right = qsim.split_product(qsim.tensor(a, b))
    assert fidelity(left, a) == pytest.approx(1.0)
    assert fidelity(right, b) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        qsim.split_product(prepare_bell(BellLabel.PSI_PLUS))


# --- properties -------------------------------------------------------------

unit = st.floats(-1, 1, allow_nan=False)


@st.composite
def states(draw, n_qubits=None):
    n = n_qubits or draw(st.sampled_from([1, 2]))
    raw = np.array([complex(draw(unit), draw(unit)) for _ in range(2 ** n)])
    norm = np.linalg.norm(raw)
    if norm < 1e-3:
        raw = np.eye(2 ** n)[0].astype(complex)
        norm = 1.0
    return StateVector(raw / norm)


@settings(max_examples=200, deadline=None)
@given(states(), st.lists(st.tuples(st.sampled_from(list(SingleQubitOp)), st.integers(0, 1)), max_size=6),
       st.floats(0, math.pi / 2), st.integers(0, 2 ** 32))
def test_operations_preserve_norm(state, ops, theta, seed):
    for op, target in ops:
        state = apply_op(state, op, target % state.num_qubits)
        assert abs(np.vdot(state.amps, state.amps).real - 1) <= 1e-9
    _, post = measure(state, 0, MeasBasis(theta), NumpyRng(seed))
    assert abs(np.vdot(post.amps, post.amps).real - 1) <= 1e-9
    if state.num_qubits == 2:
        _, post = bell_measure(state, NumpyRng(seed))
        assert abs(np.vdot(post.amps, post.amps).real - 1) <= 1e-9


@given(states(1), st.floats(0, math.pi / 2))
def test_basis_change_is_involutive(state, theta):
    b = MeasBasis(theta)
    rows = np.array([b.vector(PLUS).conj(), b.vector(MINUS).conj()])
    coords = rows @ state.amps                      # into basis theta
    back = coords[0] * b.vector(PLUS) + coords[1] * b.vector(MINUS)
    assert np.allclose(back, state.amps, atol=1e-12)


def test_psi_plus_sigma_z_anticorrelation(rng):
    psi = prepare_bell(BellLabel.PSI_PLUS)
    for _ in range(2000):
        a, post = measure(psi, 1, Z_BASIS, rng)
        b, _ = measure(post, 0, Z_BASIS, rng)
        assert a != b


def test_psi_plus_sigma_x_correlation(rng):
    # algebraically |psi+> = (|+x,+x> - |-x,-x>)/sqrt(2)
    xp, xm = X_BASIS.vector(PLUS), X_BASIS.vector(MINUS)
    expansion = (np.kron(xp, xp) - np.kron(xm, xm)) / math.sqrt(2)
    assert np.allclose(expansion, prepare_bell(BellLabel.PSI_PLUS).amps, atol=1e-15)
    psi = prepare_bell(BellLabel.PSI_PLUS)
    for _ in range(2000):
        a, post = measure(psi, 1, X_BASIS, rng)
        b, _ = measure(post, 0, X_BASIS, rng)
        assert a == b
