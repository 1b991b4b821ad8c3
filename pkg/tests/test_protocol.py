import math

import pytest

from conftest import ScriptedRng, assert_within_sigma
from pingpong.adversary import InterceptResendZ, NoAttack, PnsAttack
from pingpong.channel import IDEAL, ChannelModel, DetectorModel, NoiseKind, calibrate_from_error_rate
from pingpong.protocol import (UNIFORM_BITS, Correlation, MessageSource, Mode, ProtocolVariant,
                               decode, encode, expected_correlation, run_round)
from pingpong.qsim import X_BASIS, Z_BASIS, BellLabel, MeasBasis, SingleQubitOp
from pingpong.rng import RoundStream

THETA = math.asin(math.sqrt(0.1))
ORIGINAL, IMPROVED = ProtocolVariant.ORIGINAL, ProtocolVariant.IMPROVED
DET = DetectorModel()


def rounds(n, variant=ORIGINAL, c=0.5, channel=IDEAL, attack=NoAttack(), source=UNIFORM_BITS, seed=0,
           detector=DET):
    return [run_round(variant, c, channel, detector, attack, source, RoundStream(seed, i), i)
            for i in range(n)]


def test_encode_decode():
    assert encode(0) is SingleQubitOp.I
    assert encode(1) is SingleQubitOp.Z
    assert decode(BellLabel.PSI_MINUS) == 1
    assert decode(BellLabel.PSI_PLUS) == 0
    assert decode(BellLabel.PHI_PLUS) is None
    assert decode(BellLabel.PHI_MINUS) is None
    with pytest.raises(ValueError):
        encode(2)


def test_expected_correlation():
    assert expected_correlation(Z_BASIS) is Correlation.OPPOSITE
    assert expected_correlation(X_BASIS) is Correlation.SAME
    with pytest.raises(ValueError):
        expected_correlation(MeasBasis(0.3))


def test_noiseless_message_round_roundtrip():
    for bit in (0, 1):
        recs = rounds(50, c=0.0, source=MessageSource([bit]))
        for rec in recs:
            assert rec.mode is Mode.MESSAGE
            assert rec.decoded_bit == bit and not rec.decode_anomaly
            assert rec.alice_op is encode(bit)


def test_bit_flip_on_return_gives_anomaly():
    # forward ok; return leg bit flip turns psi+ into phi+
    flip = ChannelModel(NoiseKind.BITFLIP, 1.0)
    rec = run_round(ORIGINAL, 0.0, flip, DET, NoAttack(), MessageSource([0]),
                    ScriptedRng([0.5, 0.5, 0.5, 0.0]))
    # both legs flip, the double X cancels
    assert rec.decoded_bit == 0
    half = ChannelModel(NoiseKind.BITFLIP, 0.5)
    rec = run_round(ORIGINAL, 0.0, half, DET, NoAttack(), MessageSource([0]),
                    ScriptedRng([0.9, 0.5, 0.1, 0.0]))
    assert rec.decode_anomaly and rec.decoded_bit is None


@pytest.mark.parametrize("variant", [ORIGINAL, IMPROVED])
def test_honest_noiseless_execution_is_perfect(variant):
    recs = rounds(5000, variant=variant, seed=1)
    control = [r for r in recs if r.mode is Mode.CONTROL]
    message = [r for r in recs if r.mode is Mode.MESSAGE]
    assert control and message
    assert not any(r.mismatch for r in control)
    assert all(r.decoded_bit == r.message_bit for r in message)
    if variant is IMPROVED:
        assert {r.check_basis.theta for r in control} == {0.0, math.pi / 4}


def test_record_field_partition():
    recs = rounds(2000, channel=ChannelModel(loss_prob=0.3), attack=PnsAttack(4, THETA), seed=2)
    for r in recs:
        if r.mode is Mode.CONTROL:
            assert r.check_basis is not None and r.mismatch is not None
            assert r.message_bit is None and r.decoded_bit is None and r.eve_guess is None
        elif r.mode is Mode.MESSAGE and not r.lost:
            assert r.check_basis is None and r.mismatch is None
            assert r.message_bit is not None and r.eve_guess is not None
        else:
            assert r.lost and r.check_basis is None and r.decoded_bit is None


def test_mode_frequency():
    n = 40_000
    recs = rounds(n, c=0.3, seed=3)
    assert_within_sigma(sum(r.mode is Mode.CONTROL for r in recs) / n, 0.3, n)


def _mismatch_rate(recs, theta=None):
    ctrl = [r for r in recs if r.mode is Mode.CONTROL and (theta is None or r.check_basis.theta == theta)]
    return sum(r.mismatch for r in ctrl) / len(ctrl), len(ctrl)


def test_calibrated_noise_gives_eps_c():
    recs = rounds(100_000, c=1.0, channel=calibrate_from_error_rate(0.1), seed=4)
    rate, n = _mismatch_rate(recs)
    assert_within_sigma(rate, 0.1, n)


def test_pns_control_mismatch_is_sin2_theta():
    recs = rounds(40_000, c=1.0, attack=PnsAttack(4, THETA, emulate_baseline=False), seed=5)
    rate, n = _mismatch_rate(recs)
    assert_within_sigma(rate, 0.1, n)


def test_intercept_undetectable_with_sigma_z_only():
    recs = rounds(20_000, c=1.0, attack=InterceptResendZ(), seed=6)
    assert sum(r.mismatch for r in recs) == 0


def test_intercept_caught_half_the_time_by_sigma_x():
    recs = rounds(40_000, variant=IMPROVED, c=1.0, attack=InterceptResendZ(), seed=7)
    rate, n = _mismatch_rate(recs, theta=math.pi / 4)
    assert_within_sigma(rate, 0.5, n)
    zrate, _ = _mismatch_rate(recs, theta=0.0)
    assert zrate == 0


def test_improved_pns_sigma_x_mismatch_half():
    recs = rounds(40_000, variant=IMPROVED, c=1.0, attack=PnsAttack(4, THETA), seed=8)
    rate, n = _mismatch_rate(recs, theta=math.pi / 4)
    assert_within_sigma(rate, 0.5, n)


def test_dead_time_rule_choice_is_statistically_irrelevant():
    # with dead time off the first photon is still the recorded one; identical copies, same law
    attack = PnsAttack(4, THETA, emulate_baseline=False)
    on = rounds(30_000, c=1.0, attack=attack, seed=9)
    off = rounds(30_000, c=1.0, attack=attack, seed=9, detector=DetectorModel(False))
    r_on, n_on = _mismatch_rate(on)
    r_off, n_off = _mismatch_rate(off)
    assert_within_sigma(r_on, 0.1, n_on)
    assert_within_sigma(r_off, 0.1, n_off)
    assert any(r.multi_click for r in off) and not any(r.multi_click for r in on)


def test_c_validated():
    with pytest.raises(ValueError):
        run_round(ORIGINAL, 1.5, IDEAL, DET, NoAttack(), UNIFORM_BITS, RoundStream(0, 0))


def test_message_source():
    src = MessageSource([1, 0, 1])
    assert [src.bit(i, None) for i in range(5)] == [1, 0, 1, 1, 0]
    assert src.fraction_ones == pytest.approx(2 / 3)
    assert [UNIFORM_BITS.bit(i, RoundStream(3, i)) for i in range(20)] == \
        [UNIFORM_BITS.bit(i, RoundStream(3, i)) for i in range(20)]
    with pytest.raises(ValueError):
        MessageSource([0, 2])
    with pytest.raises(ValueError):
        MessageSource([])
