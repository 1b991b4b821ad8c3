"""Closed-form quantities for the multi-photon fake-signal attack.

Notation used below: ``theta`` is the rotation of Eve's fake-signal state
``cos(theta)|0> + sin(theta)|1>``, ``n_photons`` the number of photons per fake
pulse (one goes to Bob, the rest are measured by Eve).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

# Relative slack when comparing a computed failure probability to a target,
# so that e.g. 0.64**3 evaluated in floating point still meets 0.262144.
_PF_RTOL = 1e-12


def _check_theta(theta: float) -> None:
    if not (0.0 <= theta < math.pi / 2):
        raise ValueError(f"theta {theta!r} outside [0, pi/2)")


def epsilon_e(theta: float) -> float:
    """Error rate the fake signal causes in sigma_z control checks."""
    _check_theta(theta)
    return math.sin(theta) ** 2


def coded_overlap(theta: float) -> float:
    """Overlap ``|<+theta| Z |+theta>|^2 = cos^2(2 theta)`` of the I- and Z-coded photon."""
    _check_theta(theta)
    return math.cos(2.0 * theta) ** 2


def p_fail(theta: float, n_photons: int) -> float:
    """Probability that all ``n_photons - 1`` retained photons read ``+`` after a Z coding."""
    if n_photons < 1:
        raise ValueError("n_photons must be at least 1")
    return coded_overlap(theta) ** (n_photons - 1)


def min_photons(theta: float, target_pf: float) -> int:
    """Smallest pulse size whose failure probability is at most ``target_pf``."""
    if not 0.0 < target_pf < 1.0:
        raise ValueError("target_pf must lie in (0, 1)")
    overlap = coded_overlap(theta)
    if overlap >= 1.0:
        raise ValueError("theta gives overlap 1; no pulse size reaches the target")
    if overlap == 0.0:
        return 2
    n = 1 + max(1, math.ceil(math.log(target_pf) / math.log(overlap)))
    # log rounding can be off by one either way
    while n > 2 and p_fail(theta, n - 1) <= target_pf * (1 + _PF_RTOL):
        n -= 1
    while p_fail(theta, n) > target_pf * (1 + _PF_RTOL):
        n += 1
    return n


def binary_entropy(p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability {p!r} outside [0, 1]")
    if p == 0.0 or p == 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def eve_info_bits(p_fail_value: float) -> float:
    """Mutual information between a uniform message bit and Eve's guess.

    Eve's guess is a Z-channel: a 0 is always read as 0, a 1 is read as 0 with
    probability ``p_fail_value``. ``I = h((1 + P)/2) - h(P)/2``.
    """
    if not 0.0 <= p_fail_value <= 1.0:
        raise ValueError("p_fail_value outside [0, 1]")
    return binary_entropy((1.0 + p_fail_value) / 2.0) - binary_entropy(p_fail_value) / 2.0


def z_channel_information(p_fail_value: float, p_one: float) -> float:
    """Same Z-channel with a biased input, ``I = h(q (1 - P)) - q h(P)`` for ``q = P(bit = 1)``."""
    if not 0.0 <= p_one <= 1.0:
        raise ValueError("p_one outside [0, 1]")
    if not 0.0 <= p_fail_value <= 1.0:
        raise ValueError("p_fail_value outside [0, 1]")
    return binary_entropy(p_one * (1.0 - p_fail_value)) - p_one * binary_entropy(p_fail_value)


def eve_accuracy(p_fail_value: float, p_one: float = 0.5) -> float:
    """Expected fraction of correct guesses when a fraction ``p_one`` of bits are 1."""
    return 1.0 - p_one * p_fail_value


def theta_for_noise(eps_c: float) -> float:
    """Largest fake-signal angle whose check error stays within ``eps_c``."""
    if not 0.0 <= eps_c <= 0.5:
        raise ValueError(f"eps_c {eps_c!r} outside [0, 0.5]")
    return math.asin(math.sqrt(eps_c))


def improved_detection_rate(theta: float) -> float:
    """Per-check mismatch rate under the fake-signal attack with random sigma_z/sigma_x checks.

    sigma_z checks fail with ``sin^2 theta``; sigma_x checks with 1/2 because the
    home photon was collapsed onto a sigma_z eigenstate.
    """
    return (epsilon_e(theta) + 0.5) / 2.0


@dataclass(frozen=True)
class AttackDesign:
    theta: float
    n_photons: int
    eps_c: float

    def __post_init__(self):
        _check_theta(self.theta)
        if self.n_photons < 2:
            raise ValueError("a fake pulse needs at least two photons")
        if not 0.0 <= self.eps_c <= 0.5:
            raise ValueError("eps_c outside [0, 0.5]")

    @classmethod
    def for_noise(cls, eps_c: float, n_photons: int) -> "AttackDesign":
        return cls(theta_for_noise(eps_c), n_photons, eps_c)

    @property
    def hidden(self) -> bool:
        """Whether the fake signal's check error fits under the channel's own."""
        return epsilon_e(self.theta) <= self.eps_c * (1 + _PF_RTOL)

    @property
    def p_fail(self) -> float:
        return p_fail(self.theta, self.n_photons)
