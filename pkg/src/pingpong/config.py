"""Experiment configuration and its flat ``key = value`` file format.

Example file::

    # fake-signal attack at the worked-example operating point
    variant = original
    rounds = 100000
    c = 0.5
    eps_c = 0.1
    noise_kind = depolarizing
    attack = pns
    n_photons = 4
    emulate_baseline = true
    seed = 42

Keys are exactly the :class:`ExperimentConfig` field names; unknown keys and
repeated keys are errors. ``theta`` left unset means "derive from eps_c",
i.e. ``sin^2 theta = eps_c``.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Optional

from . import analytics
from .adversary import AttackStrategy, InterceptResendZ, NoAttack, PnsAttack
from .channel import ChannelModel, DetectorModel, NoiseKind, calibrate_from_error_rate
from .protocol import UNIFORM_BITS, MessageSource, ProtocolVariant
from .rng import MASK64

ATTACKS = ("none", "intercept", "pns")
THETA_CHECKS = ("warn", "error", "off")
DEFAULT_ROUNDS = 100_000


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    variant: ProtocolVariant = ProtocolVariant.ORIGINAL
    rounds: int = DEFAULT_ROUNDS
    c: float = 0.5
    eps_c: float = 0.0
    noise_kind: NoiseKind = NoiseKind.DEPOLARIZING
    loss_prob: float = 0.0
    attack: str = "none"
    n_photons: int = 4
    theta: Optional[float] = None
    emulate_baseline: bool = True
    seed: int = 0
    message: MessageSource = field(default=UNIFORM_BITS)
    per_round_log: bool = False
    dead_time: bool = True
    theta_check: str = "warn"
    scenario: str = ""

    def validate(self) -> "ExperimentConfig":
        if not isinstance(self.rounds, int) or self.rounds < 1:
            raise ConfigError("rounds must be an integer >= 1")
        for name in ("c", "loss_prob"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"{name} = {value!r} outside [0, 1]")
        if not 0.0 <= self.eps_c <= 0.5:
            raise ConfigError(f"eps_c = {self.eps_c!r} outside [0, 0.5]")
        if self.noise_kind is NoiseKind.NONE and self.eps_c != 0.0:
            raise ConfigError("noise_kind = none requires eps_c = 0")
        if self.attack not in ATTACKS:
            raise ConfigError(f"attack must be one of {', '.join(ATTACKS)}")
        if self.theta_check not in THETA_CHECKS:
            raise ConfigError(f"theta_check must be one of {', '.join(THETA_CHECKS)}")
        if not 0 <= self.seed <= MASK64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.attack == "pns":
            try:
                self.strategy()
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
        return self

    @property
    def resolved_theta(self) -> Optional[float]:
        if self.attack != "pns":
            return None
        if self.theta is None:
            return analytics.theta_for_noise(self.eps_c)
        return self.theta

    def strategy(self) -> AttackStrategy:
        if self.attack == "none":
            return NoAttack()
        if self.attack == "intercept":
            return InterceptResendZ()
        return PnsAttack(self.n_photons, self.resolved_theta, self.emulate_baseline)

    def channel(self) -> ChannelModel:
        return calibrate_from_error_rate(self.eps_c, self.noise_kind, self.loss_prob)

    def detector(self) -> DetectorModel:
        return DetectorModel(self.dead_time)

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "yes", "on", "1"):
        return True
    if lowered in ("false", "no", "off", "0"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def _parse_float(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise ConfigError(f"not a finite number: {text!r}")
    return value


def parse_message(text: str) -> MessageSource:
    text = text.strip()
    if text.lower() in ("random", "uniform"):
        return UNIFORM_BITS
    if not text or set(text) - {"0", "1"}:
        raise ConfigError(f"message must be 'random' or a string of 0/1, got {text!r}")
    return MessageSource(tuple(int(ch) for ch in text))


def format_message(source: MessageSource) -> str:
    return "random" if source.is_random else "".join(str(b) for b in source.bits)


def _parse_theta(text: str) -> Optional[float]:
    if text.strip().lower() in ("", "auto", "none"):
        return None
    return _parse_float(text)


PARSERS = {
    "variant": lambda t: ProtocolVariant(t.strip().lower()),
    "rounds": int,
    "c": _parse_float,
    "eps_c": _parse_float,
    "noise_kind": lambda t: NoiseKind(t.strip().lower()),
    "loss_prob": _parse_float,
    "attack": lambda t: t.strip().lower(),
    "n_photons": int,
    "theta": _parse_theta,
    "emulate_baseline": _parse_bool,
    "seed": int,
    "message": parse_message,
    "per_round_log": _parse_bool,
    "dead_time": _parse_bool,
    "theta_check": lambda t: t.strip().lower(),
    "scenario": str.strip,
}
assert set(PARSERS) == {f.name for f in dataclasses.fields(ExperimentConfig)}


def parse_value(key: str, text: str):
    if key not in PARSERS:
        raise ConfigError(f"unknown config key {key!r}")
    try:
        return PARSERS[key](text)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {text!r} ({exc})") from None


def parse_config_text(text: str, base: Optional[ExperimentConfig] = None) -> ExperimentConfig:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = parse_value(key, value)
    return (base or ExperimentConfig()).replace(**values)


def load_config(path: str, base: Optional[ExperimentConfig] = None) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config_text(fh.read(), base)
