"""Seeded Monte Carlo runs of the protocol, estimators, sweeps and CSV output."""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from statistics import NormalDist
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from . import analytics
from .adversary import check_theta_constraint
from .channel import NoiseKind
from .config import ConfigError, ExperimentConfig, format_message
from .protocol import Mode, ProtocolVariant, RoundRecord, run_round
from .rng import RoundStream

Z95 = NormalDist().inv_cdf(0.975)
NAN = float("nan")


def wilson_interval(successes: int, trials: int, z: float = Z95) -> Tuple[float, float, float]:
    """Point estimate and Wilson score interval; all NaN when there are no trials."""
    if trials == 0:
        return NAN, NAN, NAN
    p = successes / trials
    denom = 1.0 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    # rounding can push a bound past the estimate at k = 0 or k = n
    return p, min(p, max(0.0, centre - half)), max(p, min(1.0, centre + half))


def plugin_mutual_information(joint: Sequence[Sequence[int]]) -> float:
    """Plug-in mutual information (bits) of a 2x2 table ``joint[bit][guess]``."""
    total = sum(sum(row) for row in joint)
    if total == 0:
        return NAN
    rows = [sum(row) / total for row in joint]
    cols = [sum(joint[i][j] for i in range(2)) / total for j in range(2)]
    info = 0.0
    for i in range(2):
        for j in range(2):
            pij = joint[i][j] / total
            if pij > 0:
                info += pij * math.log2(pij / (rows[i] * cols[j]))
    return max(0.0, info)


@dataclass
class Tally:
    """Additive counts over rounds; merging tallies is order independent."""

    total: int = 0
    lost: int = 0
    control: int = 0
    message: int = 0
    mismatch: int = 0
    control_z: int = 0
    mismatch_z: int = 0
    control_x: int = 0
    mismatch_x: int = 0
    message_errors: int = 0
    anomalies: int = 0
    multi_clicks: int = 0
    # eve_joint[bit][guess]
    eve_joint: List[List[int]] = field(default_factory=lambda: [[0, 0], [0, 0]])

    def add(self, rec: RoundRecord) -> None:
        self.total += 1
        if rec.eve_guess is not None:
            self.eve_joint[rec.message_bit][rec.eve_guess] += 1
        if rec.lost:
            self.lost += 1
            return
        if rec.mode is Mode.CONTROL:
            self.control += 1
            self.mismatch += rec.mismatch
            self.multi_clicks += rec.multi_click
            if rec.check_basis.theta == 0.0:
                self.control_z += 1
                self.mismatch_z += rec.mismatch
            else:
                self.control_x += 1
                self.mismatch_x += rec.mismatch
        else:
            self.message += 1
            self.anomalies += rec.decode_anomaly
            self.message_errors += rec.decoded_bit != rec.message_bit

    def merge(self, other: "Tally") -> "Tally":
        out = Tally()
        for f in fields(Tally):
            if f.name == "eve_joint":
                continue
            setattr(out, f.name, getattr(self, f.name) + getattr(other, f.name))
        out.eve_joint = [[self.eve_joint[i][j] + other.eve_joint[i][j] for j in range(2)]
                         for i in range(2)]
        return out


@dataclass(frozen=True)
class Estimate:
    value: float
    lo: float
    hi: float

    @classmethod
    def of(cls, successes: int, trials: int) -> "Estimate":
        return cls(*wilson_interval(successes, trials))


@dataclass(frozen=True)
class SummaryStats:
    total: int
    control: int
    message: int
    lost: int
    control_z: int
    control_x: int
    eve_guesses: int
    eve_z_rounds: int
    control_mismatch_rate: Estimate
    mismatch_rate_z: Estimate
    mismatch_rate_x: Estimate
    eve_guess_accuracy: Estimate
    eve_fail_rate: Estimate
    eve_info_empirical: float
    bob_message_error_rate: Estimate
    bob_anomaly_rate: Estimate
    loss_rate: Estimate
    multi_click_rate: Estimate

    @classmethod
    def from_tally(cls, t: Tally) -> "SummaryStats":
        j = t.eve_joint
        guesses = j[0][0] + j[0][1] + j[1][0] + j[1][1]
        z_rounds = j[1][0] + j[1][1]
        return cls(
            total=t.total, control=t.control, message=t.message, lost=t.lost,
            control_z=t.control_z, control_x=t.control_x,
            eve_guesses=guesses, eve_z_rounds=z_rounds,
            control_mismatch_rate=Estimate.of(t.mismatch, t.control),
            mismatch_rate_z=Estimate.of(t.mismatch_z, t.control_z),
            mismatch_rate_x=Estimate.of(t.mismatch_x, t.control_x),
            eve_guess_accuracy=Estimate.of(j[0][0] + j[1][1], guesses),
            eve_fail_rate=Estimate.of(j[1][0], z_rounds),
            eve_info_empirical=plugin_mutual_information(j),
            bob_message_error_rate=Estimate.of(t.message_errors, t.message),
            bob_anomaly_rate=Estimate.of(t.anomalies, t.message),
            loss_rate=Estimate.of(t.lost, t.total),
            multi_click_rate=Estimate.of(t.multi_clicks, t.control),
        )

    def as_row(self) -> Dict[str, object]:
        row: Dict[str, object] = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, Estimate):
                row[f.name] = value.value
                row[f.name + "_lo"] = value.lo
                row[f.name + "_hi"] = value.hi
            else:
                row[f.name] = value
        return row


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    stats: SummaryStats
    records: Optional[List[RoundRecord]] = None


def _run_chunk(config: ExperimentConfig, start: int, stop: int) -> Tuple[Tally, Optional[List[RoundRecord]]]:
    channel = config.channel()
    detector = config.detector()
    attack = config.strategy()
    tally = Tally()
    records = [] if config.per_round_log else None
    for i in range(start, stop):
        rec = run_round(config.variant, config.c, channel, detector, attack, config.message,
                        RoundStream(config.seed, i), i)
        tally.add(rec)
        if records is not None:
            records.append(rec)
    return tally, records


def run_experiment(config: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    """Run ``config.rounds`` independent rounds; round ``i`` draws from stream ``(seed, i)``.

    ``workers > 1`` fans contiguous chunks out to processes. The result is the
    same as the sequential run because each round's randomness depends only on
    its index.
    """
    try:
        config.validate()
        check_theta_constraint(config.strategy(), config.eps_c, config.theta_check)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    if workers <= 1 or config.rounds < 2 * workers:
        tally, records = _run_chunk(config, 0, config.rounds)
    else:
        bounds = [config.rounds * k // workers for k in range(workers + 1)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, [config] * workers, bounds[:-1], bounds[1:]))
        tally = Tally()
        records = [] if config.per_round_log else None
        for part_tally, part_records in parts:
            tally = tally.merge(part_tally)
            if records is not None:
                records.extend(part_records)
    return ExperimentResult(config, SummaryStats.from_tally(tally), records)


def predictions(config: ExperimentConfig) -> Dict[str, float]:
    """Closed-form expectations for the estimators of a configuration."""
    eps = config.eps_c
    # sigma_x checks: bit flips commute with X and leave them alone; the twirl hits them like sigma_z.
    eps_x = eps if config.noise_kind is NoiseKind.DEPOLARIZING else 0.0
    loss = config.loss_prob
    baseline_loss = loss + (1 - loss) * (1 - config.c) * loss
    pred = {
        "pred_control_mismatch_rate": NAN,
        "pred_mismatch_rate_z": NAN,
        "pred_mismatch_rate_x": NAN,
        "pred_eve_fail_rate": NAN,
        "pred_eve_guess_accuracy": NAN,
        "pred_eve_info_bits": NAN,
        "pred_loss_rate": baseline_loss,
    }
    if config.attack == "none":
        z, x = eps, eps_x
    elif config.attack == "intercept":
        z, x = eps, 0.5
    else:
        theta = config.resolved_theta
        z, x = analytics.epsilon_e(theta), 0.5
        pf = analytics.p_fail(theta, config.n_photons)
        q = config.message.fraction_ones
        pred["pred_eve_fail_rate"] = pf
        pred["pred_eve_guess_accuracy"] = analytics.eve_accuracy(pf, q)
        pred["pred_eve_info_bits"] = analytics.z_channel_information(pf, q)
        if not config.emulate_baseline:
            pred["pred_loss_rate"] = 0.0
    pred["pred_mismatch_rate_z"] = z
    if config.variant is ProtocolVariant.ORIGINAL:
        pred["pred_control_mismatch_rate"] = z
    else:
        pred["pred_mismatch_rate_x"] = x
        pred["pred_control_mismatch_rate"] = (z + x) / 2
    return pred


SWEEP_PARAMS = ("theta", "n_photons", "eps_c", "c")


def sweep(base: ExperimentConfig, parameter: str, values: Sequence, workers: int = 1) -> List[Dict[str, object]]:
    """One experiment per value of ``parameter``; rows carry empirical and ``pred_`` columns."""
    if parameter not in SWEEP_PARAMS:
        raise ConfigError(f"cannot sweep {parameter!r}; choose from {', '.join(SWEEP_PARAMS)}")
    if parameter in ("theta", "n_photons") and base.attack != "pns":
        raise ConfigError(f"sweeping {parameter} needs attack = pns")
    if not values:
        raise ConfigError("sweep needs at least one value")
    rows = []
    for value in values:
        value = int(value) if parameter == "n_photons" else float(value)
        cfg = base.replace(**{parameter: value},
                           scenario=f"{base.scenario + ':' if base.scenario else ''}{parameter}={value}")
        rows.append(result_row(run_experiment(cfg, workers)))
    return rows


CONFIG_COLUMNS = ("scenario", "variant", "rounds", "c", "eps_c", "noise_kind", "loss_prob",
                  "attack", "n_photons", "theta", "seed")


def config_columns(config: ExperimentConfig) -> Dict[str, object]:
    pns = config.attack == "pns"
    return {
        "scenario": config.scenario,
        "variant": config.variant.value,
        "rounds": config.rounds,
        "c": config.c,
        "eps_c": config.eps_c,
        "noise_kind": config.noise_kind.value,
        "loss_prob": config.loss_prob,
        "attack": config.attack,
        "n_photons": config.n_photons if pns else "",
        "theta": config.resolved_theta if pns else "",
        "seed": config.seed,
    }


def result_row(result: ExperimentResult) -> Dict[str, object]:
    row = config_columns(result.config)
    row.update(result.stats.as_row())
    row.update(predictions(result.config))
    return row


def format_cell(value) -> str:
    """Shortest round-trip decimal for floats, so ``float(cell)`` restores the value exactly."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return repr(value)
    if value is None:
        return ""
    return str(value)


def write_csv(rows: Iterable[Dict[str, object]], stream) -> None:
    rows = list(rows)
    if not rows:
        return
    writer = csv.writer(stream, lineterminator="\n")
    header = list(rows[0])
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_cell(row[col]) for col in header])


def to_csv(rows: Iterable[Dict[str, object]]) -> str:
    buf = io.StringIO()
    write_csv(rows, buf)
    return buf.getvalue()


ROUND_COLUMNS = ("round", "mode", "check_basis", "alice_outcome", "bob_outcome", "mismatch",
                 "alice_op", "message_bit", "decoded_bit", "decode_anomaly", "lost", "eve_guess",
                 "multi_click")


def round_rows(records: Sequence[RoundRecord]) -> List[Dict[str, object]]:
    rows = []
    for i, rec in enumerate(records):
        rows.append({
            "round": i,
            "mode": rec.mode.value if rec.mode else "",
            "check_basis": rec.check_basis.theta if rec.check_basis else "",
            "alice_outcome": rec.alice_outcome,
            "bob_outcome": rec.bob_outcome,
            "mismatch": rec.mismatch,
            "alice_op": rec.alice_op.value if rec.alice_op else "",
            "message_bit": rec.message_bit,
            "decoded_bit": rec.decoded_bit,
            "decode_anomaly": rec.decode_anomaly,
            "lost": rec.lost,
            "eve_guess": rec.eve_guess,
            "multi_click": rec.multi_click,
        })
    return rows


def summary_text(result: ExperimentResult) -> str:
    cfg, s = result.config, result.stats

    def rate(est: Estimate) -> str:
        if math.isnan(est.value):
            return "n/a"
        return f"{est.value:.6f}  [{est.lo:.6f}, {est.hi:.6f}]"

    attack = cfg.attack
    if attack == "pns":
        attack += f" (N={cfg.n_photons}, sin^2 theta={math.sin(cfg.resolved_theta) ** 2:.6g})"
    lines = [
        f"variant={cfg.variant.value} attack={attack} eps_c={cfg.eps_c} "
        f"noise={cfg.noise_kind.value} loss={cfg.loss_prob} c={cfg.c} seed={cfg.seed} "
        f"message={format_message(cfg.message)}",
        f"rounds {s.total}: control {s.control}, message {s.message}, lost {s.lost}",
        f"  control mismatch    {rate(s.control_mismatch_rate)}",
        f"    sigma_z checks    {rate(s.mismatch_rate_z)}",
        f"    sigma_x checks    {rate(s.mismatch_rate_x)}",
        f"  loss rate           {rate(s.loss_rate)}",
        f"  Bob message errors  {rate(s.bob_message_error_rate)}",
        f"  Bob anomalies       {rate(s.bob_anomaly_rate)}",
    ]
    if s.eve_guesses:
        lines += [
            f"  Eve accuracy        {rate(s.eve_guess_accuracy)}",
            f"  Eve P(fail | Z)     {rate(s.eve_fail_rate)}",
            f"  Eve information     {s.eve_info_empirical:.6f} bits",
        ]
    return "\n".join(lines)
