"""Noisy, lossy quantum channel and the dead-time detector model."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Sequence

from .qsim import MINUS, PLUS, MeasBasis, SingleQubitOp, StateVector, apply_op, measure


class NoiseKind(enum.Enum):
    NONE = "none"
    BITFLIP = "bitflip"
    DEPOLARIZING = "depolarizing"


@dataclass(frozen=True)
class ChannelModel:
    noise_kind: NoiseKind = NoiseKind.NONE
    p: Optional[float] = None
    loss_prob: float = 0.0

    def __post_init__(self):
        if self.noise_kind is NoiseKind.NONE:
            if self.p not in (None, 0, 0.0):
                raise ValueError("noise strength given for a noiseless channel")
            object.__setattr__(self, "p", None)
        elif self.p is None or not 0.0 <= self.p <= 1.0:
            raise ValueError(f"noise strength {self.p!r} outside [0, 1]")
        if not 0.0 <= self.loss_prob <= 1.0:
            raise ValueError(f"loss probability {self.loss_prob!r} outside [0, 1]")

    @property
    def is_ideal(self) -> bool:
        return self.loss_prob == 0.0 and (self.p is None or self.p == 0.0)


IDEAL = ChannelModel()


@dataclass(frozen=True)
class DetectorModel:
    # While dead, every photon after the first in a burst leaves no record.
    dead_time_collapse: bool = True


class Detection(NamedTuple):
    outcome: str
    multi_click: bool


def calibrate_from_error_rate(eps_c: float, kind: NoiseKind = NoiseKind.DEPOLARIZING,
                              loss_prob: float = 0.0) -> ChannelModel:
    """Channel whose sigma_z check error rate equals ``eps_c``.

    Bit flip flips every sigma_z outcome it touches, so ``p = eps_c``. The Pauli
    twirl flips sigma_z only on its X and XZ branches (``p/2`` in total), so
    ``p = 2 eps_c``.
    """
    if not 0.0 <= eps_c <= 0.5:
        raise ValueError(f"eps_c {eps_c!r} outside [0, 0.5]")
    if kind is NoiseKind.NONE:
        if eps_c != 0.0:
            raise ValueError("a noiseless channel cannot produce a nonzero error rate")
        return ChannelModel(NoiseKind.NONE, None, loss_prob)
    if kind is NoiseKind.BITFLIP:
        return ChannelModel(kind, eps_c, loss_prob)
    return ChannelModel(kind, 2.0 * eps_c, loss_prob)


def _apply_noise(state: StateVector, target: int, model: ChannelModel, rng) -> StateVector:
    if model.noise_kind is NoiseKind.NONE:
        return state
    u = rng.random()
    p = model.p
    if model.noise_kind is NoiseKind.BITFLIP:
        return apply_op(state, SingleQubitOp.X, target) if u < p else state
    if u < p / 4:
        return apply_op(state, SingleQubitOp.X, target)
    if u < p / 2:
        return apply_op(state, SingleQubitOp.Z, target)
    if u < 3 * p / 4:
        return apply_op(apply_op(state, SingleQubitOp.Z, target), SingleQubitOp.X, target)
    return state


def transmit(state: StateVector, target: int, model: ChannelModel, rng) -> Optional[StateVector]:
    """Send qubit ``target`` through the channel; ``None`` means the photon was lost.

    Draw order: one uniform for loss, then (if the channel is noisy and the
    photon survived) one uniform for the noise branch.
    """
    if not 0 <= target < state.num_qubits:
        raise IndexError(f"qubit {target} out of range")
    if model.loss_prob > 0.0 and rng.random() < model.loss_prob:
        return None
    return _apply_noise(state, target, model, rng)


def transmit_burst(photons: Sequence[StateVector], model: ChannelModel, rng) -> Optional[List[StateVector]]:
    """A multi-photon pulse is lost as a whole; noise acts on each photon independently."""
    if model.loss_prob > 0.0 and rng.random() < model.loss_prob:
        return None
    return [_apply_noise(p, 0, model, rng) for p in photons]


def detect_burst(photons: Sequence[StateVector], basis: MeasBasis, detector: DetectorModel, rng) -> Detection:
    """Measure a pulse of single-qubit photons arriving inside one detector window.

    With dead-time collapse only the first photon produces a record. Without it
    every photon is measured; the first outcome is reported and ``multi_click``
    is set when both outcome detectors fired.
    """
    if not photons:
        raise ValueError("empty photon burst")
    first, _ = measure(photons[0], 0, basis, rng)
    if detector.dead_time_collapse:
        return Detection(first, False)
    seen = {first}
    for photon in photons[1:]:
        sign, _ = measure(photon, 0, basis, rng)
        seen.add(sign)
    return Detection(first, seen == {PLUS, MINUS})
