"""One round of the ping-pong protocol between honest Bob (sender of the pair) and Alice.

Bob prepares |psi+> on (home, travel) and sends the travel photon. Alice picks
control mode with probability ``c``: she measures the photon in a check basis
and Bob measures his home photon in the same basis. Otherwise she codes a
message bit with I or Z and sends the photon back for Bob's Bell measurement.

The ``Original`` variant checks in sigma_z only; ``Improved`` picks sigma_z or
sigma_x uniformly per control round.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

from . import adversary, qsim
from .adversary import AttackStrategy, NoAttack
from .channel import ChannelModel, DetectorModel, detect_burst, transmit, transmit_burst
from .qsim import BellLabel, MeasBasis, SingleQubitOp

HOME, TRAVEL = 0, 1


class Mode(enum.Enum):
    CONTROL = "control"
    MESSAGE = "message"


class ProtocolVariant(enum.Enum):
    ORIGINAL = "original"
    IMPROVED = "improved"


class Correlation(enum.Enum):
    SAME = "same"
    OPPOSITE = "opposite"


@dataclass
class RoundRecord:
    mode: Optional[Mode] = None
    check_basis: Optional[MeasBasis] = None
    alice_outcome: Optional[str] = None
    bob_outcome: Optional[str] = None
    mismatch: Optional[bool] = None
    alice_op: Optional[SingleQubitOp] = None
    message_bit: Optional[int] = None
    decoded_bit: Optional[int] = None
    decode_anomaly: bool = False
    lost: bool = False
    eve_guess: Optional[int] = None
    multi_click: bool = False


@dataclass(frozen=True)
class MessageSource:
    """Either a fixed bit pattern (bit ``i mod len`` in round ``i``) or uniform random bits."""

    bits: Optional[Sequence[int]] = None

    def __post_init__(self):
        if self.bits is not None:
            bits = tuple(int(b) for b in self.bits)
            if not bits or any(b not in (0, 1) for b in bits):
                raise ValueError("fixed message must be a non-empty sequence of 0/1")
            object.__setattr__(self, "bits", bits)

    @property
    def is_random(self) -> bool:
        return self.bits is None

    @property
    def fraction_ones(self) -> float:
        if self.bits is None:
            return 0.5
        return sum(self.bits) / len(self.bits)

    def bit(self, round_index: int, rng) -> int:
        if self.bits is None:
            return 1 if rng.random() < 0.5 else 0
        return self.bits[round_index % len(self.bits)]


UNIFORM_BITS = MessageSource()


def encode(bit: int) -> SingleQubitOp:
    if bit not in (0, 1):
        raise ValueError(f"message bit must be 0 or 1, got {bit!r}")
    return SingleQubitOp.Z if bit else SingleQubitOp.I


def decode(label: BellLabel) -> Optional[int]:
    """Message bit for a Bell outcome; ``None`` flags a phi outcome (corrupted pair)."""
    if label is BellLabel.PSI_PLUS:
        return 0
    if label is BellLabel.PSI_MINUS:
        return 1
    return None


def expected_correlation(basis: MeasBasis) -> Correlation:
    """How |psi+> correlates the two photons' outcomes in a check basis."""
    if math.isclose(basis.theta, 0.0, abs_tol=1e-12):
        return Correlation.OPPOSITE
    if math.isclose(basis.theta, math.pi / 4, abs_tol=1e-12):
        return Correlation.SAME
    raise ValueError(f"no check defined for basis angle {basis.theta!r}")


def _check_basis(variant: ProtocolVariant, rng) -> MeasBasis:
    if variant is ProtocolVariant.ORIGINAL:
        return qsim.Z_BASIS
    return qsim.Z_BASIS if rng.random() < 0.5 else qsim.X_BASIS


def _is_mismatch(basis: MeasBasis, alice: str, bob: str) -> bool:
    same = alice == bob
    return same != (expected_correlation(basis) is Correlation.SAME)


def run_round(variant: ProtocolVariant, c: float, channel: ChannelModel, detector: DetectorModel,
              attack: AttackStrategy, source: MessageSource, rng, round_index: int = 0) -> RoundRecord:
    """Execute one round and return its log.

    Random draws happen in protocol order from the single stream ``rng``, so a
    round is reproducible from its stream alone.
    """
    if not 0.0 <= c <= 1.0:
        raise ValueError(f"control probability {c!r} outside [0, 1]")
    rec = RoundRecord()
    pair = qsim.prepare_bell(BellLabel.PSI_PLUS)
    attacked = not isinstance(attack, NoAttack)

    # Forward leg. Under attack the pair is split into Bob's home photon and Eve's pulse.
    if attacked:
        to_alice_ch, to_bob_ch = adversary.segment_channels(attack, channel)
        home, pulse, eve = adversary.on_forward(pair, attack, rng, target=TRAVEL)
        pulse = transmit_burst(pulse, to_alice_ch, rng)
        if pulse is None:
            rec.lost = True
            return rec
    else:
        pair = transmit(pair, TRAVEL, channel, rng)
        if pair is None:
            rec.lost = True
            return rec

    rec.mode = Mode.CONTROL if rng.random() < c else Mode.MESSAGE

    if rec.mode is Mode.CONTROL:
        basis = _check_basis(variant, rng)
        if attacked:
            hit = detect_burst(pulse, basis, detector, rng)
            alice, rec.multi_click = hit.outcome, hit.multi_click
            bob, _ = qsim.measure(home, 0, basis, rng)
        else:
            alice, home = qsim.measure_and_discard(pair, TRAVEL, basis, rng)
            bob, _ = qsim.measure(home, 0, basis, rng)
        rec.check_basis = basis
        rec.alice_outcome, rec.bob_outcome = alice, bob
        rec.mismatch = _is_mismatch(basis, alice, bob)
        return rec

    bit = source.bit(round_index, rng)
    op = encode(bit)
    rec.message_bit, rec.alice_op = bit, op
    if attacked:
        coded_cache = {}
        coded = []
        for photon in pulse:
            key = id(photon)
            if key not in coded_cache:
                coded_cache[key] = qsim.apply_op(photon, op, 0)
            coded.append(coded_cache[key])
        to_bob, eve = adversary.on_return(coded, eve, attack, rng)
        rec.eve_guess = eve.guess
        to_bob = transmit(to_bob, 0, to_bob_ch, rng)
        if to_bob is None:
            rec.lost = True
            return rec
        returned = qsim.tensor(home, to_bob)
    else:
        returned = transmit(qsim.apply_op(pair, op, TRAVEL), TRAVEL, channel, rng)
        if returned is None:
            rec.lost = True
            return rec

    label, _ = qsim.bell_measure(returned, rng)
    rec.decoded_bit = decode(label)
    rec.decode_anomaly = rec.decoded_bit is None
    return rec
