"""Pure-state engine for one- and two-qubit registers.

Qubit 0 is the most significant index, so a two-qubit amplitude vector is
ordered |00>, |01>, |10>, |11> with qubit 0 written first. In the ping-pong
setting qubit 0 is Bob's home photon H and qubit 1 the travel photon T.

Measurement outcomes are the strings ``"+"`` and ``"-"``, naming the two
eigenvectors of a :class:`MeasBasis`.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

PLUS = "+"
MINUS = "-"

NORM_TOL = 1e-9
_SQRT_HALF = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class StateVector:
    """Normalized amplitude vector over one or two qubits."""

    amps: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=complex)
        if amps.ndim != 1 or amps.shape[0] not in (2, 4):
            raise ValueError(f"expected 2 or 4 amplitudes, got shape {amps.shape}")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state not normalized (|psi|^2 = {norm!r})")
        amps.flags.writeable = False
        object.__setattr__(self, "amps", amps)

    @property
    def num_qubits(self) -> int:
        return 1 if self.amps.shape[0] == 2 else 2

    @classmethod
    def _trusted(cls, amps: np.ndarray) -> "StateVector":
        # Skips validation for amplitudes produced by unitary or renormalized steps.
        obj = object.__new__(cls)
        amps.flags.writeable = False
        object.__setattr__(obj, "amps", amps)
        return obj

    def __repr__(self):
        return f"StateVector({np.array2string(self.amps, precision=6)})"


@dataclass(frozen=True)
class MeasBasis:
    """Rotated basis ``|+theta> = cos|0> + sin|1>``, ``|-theta> = -sin|0> + cos|1>``.

    ``theta = 0`` is sigma_z and ``theta = pi/4`` is sigma_x. The closed endpoint
    ``pi/2`` is accepted so that the X-conjugate of ``B(0)`` can be expressed.
    """

    theta: float

    def __post_init__(self):
        if not (0.0 <= self.theta <= math.pi / 2) or not math.isfinite(self.theta):
            raise ValueError(f"basis angle {self.theta!r} outside [0, pi/2]")
        c, s = math.cos(self.theta), math.sin(self.theta)
        plus = np.array([c, s], dtype=complex)
        minus = np.array([-s, c], dtype=complex)
        object.__setattr__(self, "_vectors", (plus, minus))
        object.__setattr__(self, "_states", {PLUS: StateVector._trusted(plus.copy()),
                                             MINUS: StateVector._trusted(minus.copy())})

    def vector(self, sign: str) -> np.ndarray:
        if sign == PLUS:
            return self._vectors[0]
        if sign == MINUS:
            return self._vectors[1]
        raise ValueError(f"sign must be '+' or '-', got {sign!r}")


Z_BASIS = MeasBasis(0.0)
X_BASIS = MeasBasis(math.pi / 4)


class BellLabel(enum.Enum):
    PSI_PLUS = "PsiPlus"
    PSI_MINUS = "PsiMinus"
    PHI_PLUS = "PhiPlus"
    PHI_MINUS = "PhiMinus"


_BELL_AMPS = {
    BellLabel.PSI_PLUS: np.array([0, _SQRT_HALF, _SQRT_HALF, 0], dtype=complex),
    BellLabel.PSI_MINUS: np.array([0, _SQRT_HALF, -_SQRT_HALF, 0], dtype=complex),
    BellLabel.PHI_PLUS: np.array([_SQRT_HALF, 0, 0, _SQRT_HALF], dtype=complex),
    BellLabel.PHI_MINUS: np.array([_SQRT_HALF, 0, 0, -_SQRT_HALF], dtype=complex),
}
_BELL_ORDER = tuple(BellLabel)
_BELL_STATES = {label: StateVector._trusted(amps.copy()) for label, amps in _BELL_AMPS.items()}
_BELL_MATRIX = np.array([_BELL_AMPS[label] for label in _BELL_ORDER]).conj()


class SingleQubitOp(enum.Enum):
    I = "I"
    Z = "Z"
    X = "X"

    @property
    def matrix(self) -> np.ndarray:
        return _OP_MATRICES[self]


_OP_MATRICES = {
    SingleQubitOp.I: np.eye(2, dtype=complex),
    SingleQubitOp.Z: np.array([[1, 0], [0, -1]], dtype=complex),
    SingleQubitOp.X: np.array([[0, 1], [1, 0]], dtype=complex),
}


def basis_state(basis: MeasBasis, sign: str) -> StateVector:
    if sign not in (PLUS, MINUS):
        raise ValueError(f"sign must be '+' or '-', got {sign!r}")
    return basis._states[sign]


def computational(bit: int) -> StateVector:
    return basis_state(Z_BASIS, PLUS if bit == 0 else MINUS)


def prepare_bell(label: BellLabel) -> StateVector:
    return _BELL_STATES[label]


def tensor(a: StateVector, b: StateVector) -> StateVector:
    if a.num_qubits != 1 or b.num_qubits != 1:
        raise ValueError("tensor only joins two single-qubit states")
    return StateVector._trusted(np.outer(a.amps, b.amps).ravel())


def split_product(state: StateVector, tol: float = 1e-9) -> Tuple[StateVector, StateVector]:
    """Factor a two-qubit product state into (qubit 0, qubit 1), up to global phase."""
    if state.num_qubits != 2:
        raise ValueError("split_product needs a two-qubit state")
    m = state.amps.reshape(2, 2)
    if abs(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]) > tol:
        raise ValueError("state is entangled")
    i, j = np.unravel_index(np.argmax(np.abs(m)), m.shape)
    col, row = m[:, j], m[i, :]
    return (StateVector._trusted(col / np.linalg.norm(col)),
            StateVector._trusted(row / np.linalg.norm(row)))


def _check_target(state: StateVector, target: int) -> None:
    if not 0 <= target < state.num_qubits:
        raise IndexError(f"qubit {target} out of range for {state.num_qubits}-qubit state")


def apply_op(state: StateVector, op: SingleQubitOp, target: int) -> StateVector:
    _check_target(state, target)
    if op is SingleQubitOp.I:
        return state
    u = op.matrix
    if state.num_qubits == 1:
        return StateVector._trusted(u @ state.amps)
    m = state.amps.reshape(2, 2)
    out = u @ m if target == 0 else m @ u.T
    return StateVector._trusted(out.reshape(4))


def outcome_probability(state: StateVector, target: int, basis: MeasBasis, sign: str = PLUS) -> float:
    """Born probability of ``sign`` when ``target`` is measured in ``basis``."""
    _check_target(state, target)
    vec = basis.vector(sign)
    if state.num_qubits == 1:
        return abs(np.vdot(vec, state.amps)) ** 2
    m = state.amps.reshape(2, 2)
    rest = vec.conj() @ m if target == 0 else m @ vec.conj()
    return float(np.vdot(rest, rest).real)


def _project(state: StateVector, target: int, basis: MeasBasis, rng):
    # One uniform draw picks the branch; returns (sign, unnormalized remainder, p).
    u = rng.random()
    m = state.amps.reshape(2, 2)
    plus = basis.vector(PLUS)
    rest = plus.conj() @ m if target == 0 else m @ plus.conj()
    p = float(np.vdot(rest, rest).real)
    if u < p:
        return PLUS, rest, p
    minus = basis.vector(MINUS)
    rest = minus.conj() @ m if target == 0 else m @ minus.conj()
    return MINUS, rest, float(np.vdot(rest, rest).real)


def measure(state: StateVector, target: int, basis: MeasBasis, rng) -> Tuple[str, StateVector]:
    """Projective measurement of one qubit; ``rng.random()`` supplies one uniform draw.

    The collapsed state is ``|sign> (x) remainder`` (order by qubit index), renormalized.
    """
    _check_target(state, target)
    if state.num_qubits == 1:
        u = rng.random()
        p_plus = abs(np.vdot(basis.vector(PLUS), state.amps)) ** 2
        sign = PLUS if u < p_plus else MINUS
        return sign, basis._states[sign]
    sign, rest, p = _project(state, target, basis, rng)
    rest = rest / math.sqrt(p)
    vec = basis.vector(sign)
    collapsed = np.outer(vec, rest) if target == 0 else np.outer(rest, vec)
    return sign, StateVector._trusted(collapsed.ravel())


def measure_and_discard(state: StateVector, target: int, basis: MeasBasis, rng) -> Tuple[str, StateVector]:
    """Measure ``target`` of a two-qubit state and return the other qubit's post-measurement state."""
    if state.num_qubits != 2:
        raise ValueError("measure_and_discard needs a two-qubit state")
    _check_target(state, target)
    sign, rest, p = _project(state, target, basis, rng)
    return sign, StateVector._trusted(rest / math.sqrt(p))


def bell_probabilities(state: StateVector) -> dict:
    if state.num_qubits != 2:
        raise ValueError("Bell measurement needs a two-qubit state")
    probs = np.abs(_BELL_MATRIX @ state.amps) ** 2
    return dict(zip(_BELL_ORDER, probs.tolist()))


def bell_measure(state: StateVector, rng) -> Tuple[BellLabel, StateVector]:
    probs = bell_probabilities(state)
    u = rng.random()
    cum = 0.0
    chosen = None
    for label in _BELL_ORDER:
        p = probs[label]
        if p <= 0.0:
            continue
        chosen = label
        cum += p
        if u < cum:
            break
    return chosen, prepare_bell(chosen)


def fidelity(a: StateVector, b: StateVector) -> float:
    if a.num_qubits != b.num_qubits:
        raise ValueError("fidelity between states of different size")
    return min(1.0, float(abs(np.vdot(a.amps, b.amps)) ** 2))
