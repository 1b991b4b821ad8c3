"""Simulation and analysis of the multi-photon fake-signal attack on the ping-pong protocol."""
from .adversary import InterceptResendZ, NoAttack, PnsAttack
from .channel import ChannelModel, DetectorModel, NoiseKind, calibrate_from_error_rate
from .config import ConfigError, ExperimentConfig
from .harness import SummaryStats, run_experiment, sweep
from .protocol import MessageSource, ProtocolVariant, run_round

__version__ = "0.1.0"
