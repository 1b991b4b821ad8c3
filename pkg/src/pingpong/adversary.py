"""Eavesdropping strategies against the ping-pong protocol.

The central one is :class:`PnsAttack`. Eve measures the travel photon in
sigma_z, sends Alice an ``n_photons`` pulse of identical photons prepared
slightly off the measured eigenstate (angle ``theta``), and on the way back
keeps all photons but one. Alice's I/Z coding leaves the ``+`` eigenstate of
Eve's rotated basis untouched under I, and turns it into a state with overlap
``cos^2(2 theta)`` under Z, so a single ``-`` outcome among the retained
photons reveals a Z.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

from . import qsim
from .channel import IDEAL, ChannelModel, NoiseKind
from .qsim import MINUS, PLUS, MeasBasis, StateVector

TRAVEL = 1


@dataclass(frozen=True)
class NoAttack:
    name = "none"


@dataclass(frozen=True)
class InterceptResendZ:
    """Measure the travel photon in sigma_z and forward the eigenstate found."""

    name = "intercept"


@dataclass(frozen=True)
class PnsAttack:
    n_photons: int = 4
    theta: float = math.asin(math.sqrt(0.1))
    # Re-create the honest channel's loss (and return-leg noise) on Eve's ideal line.
    emulate_baseline: bool = True

    name = "pns"

    def __post_init__(self):
        if int(self.n_photons) != self.n_photons or self.n_photons < 2:
            raise ValueError("PnsAttack needs n_photons >= 2")
        if not (0.0 <= self.theta < math.pi / 2):
            raise ValueError(f"theta {self.theta!r} outside [0, pi/2)")
        object.__setattr__(self, "_bases", {PLUS: MeasBasis(self.theta),
                                            MINUS: MeasBasis(math.pi / 2 - self.theta)})

    def fake_basis(self, forward_outcome: str) -> MeasBasis:
        """Basis whose ``+`` vector is the fake photon sent after ``forward_outcome``.

        After a ``-`` (|1>) the construction is conjugated by X, which maps
        ``B(theta)`` onto ``B(pi/2 - theta)`` with the roles of the vectors kept.
        """
        return self._bases[forward_outcome]


AttackStrategy = Union[NoAttack, InterceptResendZ, PnsAttack]


class ThetaConstraintError(ValueError):
    pass


def check_theta_constraint(strategy: AttackStrategy, eps_c: float, mode: str = "warn") -> bool:
    """Check that the fake signal's error ``sin^2 theta`` stays within ``eps_c``.

    ``mode`` is ``"warn"``, ``"error"`` or ``"off"``. Returns whether the
    constraint holds (always True for strategies without a fake signal).
    """
    if mode not in ("warn", "error", "off"):
        raise ValueError(f"unknown constraint mode {mode!r}")
    if not isinstance(strategy, PnsAttack):
        return True
    ok = math.sin(strategy.theta) ** 2 <= eps_c * (1 + 1e-12)
    if not ok and mode != "off":
        msg = (f"fake-signal error sin^2(theta) = {math.sin(strategy.theta) ** 2:.6g} "
               f"exceeds channel error rate {eps_c:.6g}")
        if mode == "error":
            raise ThetaConstraintError(msg)
        warnings.warn(msg, stacklevel=2)
    return ok


@dataclass
class EveRecord:
    forward_outcome: str
    return_outcomes: List[str] = field(default_factory=list)
    guess: Optional[int] = None
    saw_minus: bool = False


def segment_channels(strategy: AttackStrategy, baseline: ChannelModel) -> Tuple[ChannelModel, ChannelModel]:
    """Channels seen by (Eve -> Alice, Eve -> Bob) once Eve has taken over the line.

    Intercept-resend leaves the honest channel in place. The fake-signal attack
    replaces it with an ideal one; with ``emulate_baseline`` Eve re-injects the
    honest loss on both legs and the honest noise on the photon she forwards to
    Bob. The forward pulse gets no extra noise: its rotation already produces
    the check error.
    """
    if not isinstance(strategy, PnsAttack):
        return baseline, baseline
    if not strategy.emulate_baseline:
        return IDEAL, IDEAL
    forward = ChannelModel(NoiseKind.NONE, None, baseline.loss_prob)
    return forward, baseline


def on_forward(pair: StateVector, strategy: AttackStrategy, rng,
               target: int = TRAVEL) -> Tuple[StateVector, List[StateVector], EveRecord]:
    """Intercept the travel photon of ``pair``.

    Returns Bob's home photon (now disentangled), the photons Eve sends on to
    Alice, and Eve's record.
    """
    if isinstance(strategy, NoAttack):
        raise ValueError("on_forward called without an attack")
    outcome, home = qsim.measure_and_discard(pair, target, qsim.Z_BASIS, rng)
    record = EveRecord(forward_outcome=outcome)
    if isinstance(strategy, InterceptResendZ):
        return home, [qsim.basis_state(qsim.Z_BASIS, outcome)], record
    fake = qsim.basis_state(strategy.fake_basis(outcome), PLUS)
    # Photons are immutable, so the pulse can share one object.
    return home, [fake] * strategy.n_photons, record


def on_return(coded: Sequence[StateVector], record: EveRecord, strategy: AttackStrategy,
              rng) -> Tuple[StateVector, EveRecord]:
    """Split the returning pulse: first photon to Bob, the rest measured by Eve.

    Any ``-`` outcome means Alice applied Z (guess 1); all ``+`` means I (guess 0).
    """
    if isinstance(strategy, NoAttack):
        raise ValueError("on_return called without an attack")
    if not isinstance(strategy, PnsAttack):
        return coded[0], record
    if len(coded) < 2:
        raise ValueError("the fake-signal attack needs at least two returning photons")
    basis = strategy.fake_basis(record.forward_outcome)
    outcomes = [qsim.measure(photon, 0, basis, rng)[0] for photon in coded[1:]]
    record.return_outcomes = outcomes
    record.saw_minus = MINUS in outcomes
    record.guess = 1 if record.saw_minus else 0
    return coded[0], record


def guess_accuracy(records: Sequence[EveRecord], bits: Sequence[int]) -> float:
    if len(records) != len(bits):
        raise ValueError("records and bits differ in length")
    pairs = [(r.guess, b) for r, b in zip(records, bits) if r.guess is not None]
    if not pairs:
        raise ValueError("no guesses to score")
    return sum(g == b for g, b in pairs) / len(pairs)

