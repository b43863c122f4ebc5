"""Interference steering and neutralization at the victim transmitter.

Interference vectors carry their ``sqrt(P_T)`` amplitude already, so a
steering solution's power is simply the squared norm of the transmit
vector that produces the required received signal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from .errors import DimensionError, InvalidQuadratureError, NormalizationError
from .mimo import (
    UNIT_TOL,
    BeamformPair,
    NoiseModel,
    TransmitIntent,
    as_channel,
    decompose_against,
    min_norm_solve,
    svd_beamform,
)

STEER = "steer"
NEUTRALIZE = "neutralize"


def project_onto(direction, v) -> np.ndarray:
    direction = np.asarray(direction, dtype=complex)
    if abs(np.linalg.norm(direction) - 1.0) > UNIT_TOL:
        raise NormalizationError("projection direction must be unit norm")
    v = np.asarray(v, dtype=complex)
    if direction.shape != v.shape:
        raise DimensionError(f"shape mismatch {direction.shape} vs {v.shape}")
    return direction * np.vdot(direction, v)


@dataclass(frozen=True)
class SteeringSolution:
    precoder: np.ndarray
    power: float
    mode: str
    feasible: bool

    def transmit_vector(self) -> np.ndarray:
        """Amplitude-scaled transmit vector ``sqrt(power) * precoder``."""
        return np.sqrt(self.power) * self.precoder


@dataclass(frozen=True)
class CombinedInterference:
    vector: np.ndarray
    contributors: Tuple = ()
    parts: Optional[Tuple[np.ndarray, ...]] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.parts is not None:
            if len(self.parts) != len(self.contributors):
                raise ValueError("one part per contributor required")
            total = np.zeros_like(self.vector)
            for p in self.parts:
                total = total + p
            scale = max(1.0, float(np.linalg.norm(self.vector)))
            if np.linalg.norm(total - self.vector) > 1e-12 * scale:
                raise ValueError("aggregate does not equal the sum of its parts")

    @classmethod
    def from_parts(cls, parts: Sequence[np.ndarray], contributors: Sequence, n_r: int = 0):
        parts = tuple(np.asarray(p, dtype=complex) for p in parts)
        if not parts:
            return cls(np.zeros(n_r, dtype=complex), tuple(contributors), ())
        total = parts[0]
        for p in parts[1:]:
            if p.shape != total.shape:
                raise DimensionError("all interference vectors must share n_r")
            total = total + p
        return cls(total, tuple(contributors), parts)


def combine(
    interferers: Iterable[Tuple[np.ndarray, TransmitIntent]],
    contributors: Optional[Sequence] = None,
    n_r: int = 0,
) -> CombinedInterference:
    """Amplitude-level aggregate ``sum sqrt(P) H p`` of several interferers.

    Symbols are folded out (symbol-level synchrony is assumed), so the
    result is the single vector a steering signal must act on.
    """
    interferers = list(interferers)
    if contributors is None:
        contributors = tuple(range(len(interferers)))
    if len(contributors) != len(interferers):
        raise ValueError("one contributor id per interferer")
    parts = []
    for H, intent in interferers:
        H = as_channel(H)
        parts.append(np.sqrt(intent.power) * (H @ np.asarray(intent.precoder, dtype=complex)))
    return CombinedInterference.from_parts(parts, contributors, n_r=n_r)


def _desired_direction(victim_bf: BeamformPair, victim_direct) -> np.ndarray:
    h = as_channel(victim_direct) @ victim_bf.precoder
    return h / np.linalg.norm(h)


def _solution(steer_channel, target, mode: str, budget: float) -> SteeringSolution:
    w = min_norm_solve(steer_channel, target)
    power = float(np.vdot(w, w).real)
    if power > 0.0:
        precoder = w / np.sqrt(power)
    else:
        precoder = np.zeros(w.shape, dtype=complex)
        precoder[0] = 1.0
    return SteeringSolution(precoder, power, mode, power <= budget)


def steer(
    victim_bf: BeamformPair,
    victim_direct,
    steer_channel,
    interference: CombinedInterference,
    quadrature_choice=None,
    budget: float = 1.0,
) -> SteeringSolution:
    """Steering signal that cancels the interference component along the
    victim's desired direction.

    ``quadrature_choice`` is the steering signal's received component
    orthogonal to the desired direction; zero (the default) gives the
    minimum-power solution, ``-i^Q`` reproduces neutralization.
    """
    d_s = _desired_direction(victim_bf, victim_direct)
    i = np.asarray(interference.vector, dtype=complex)
    i_in, _ = decompose_against(d_s, i)
    target = -i_in
    if quadrature_choice is not None:
        q = np.asarray(quadrature_choice, dtype=complex)
        if q.shape != d_s.shape:
            raise DimensionError("quadrature choice must live in the receive space")
        if abs(np.vdot(d_s, q)) > 1e-9 * max(float(np.linalg.norm(q)), 1e-300):
            raise InvalidQuadratureError("quadrature choice has a component along d_s")
        target = target + q
    return _solution(steer_channel, target, STEER, budget)


def neutralize(steer_channel, interference: CombinedInterference, budget: float = 1.0) -> SteeringSolution:
    i = np.asarray(interference.vector, dtype=complex)
    return _solution(steer_channel, -i, NEUTRALIZE, budget)


def victim_snr(p_t: float, steering_power: float, principal_gain: float, noise: NoiseModel) -> float:
    """Post-filter SNR of a victim whose AP spends ``steering_power`` of its
    budget on steering; 0 when the budget is exceeded."""
    if steering_power < 0 or principal_gain < 0:
        raise ValueError("steering power and gain must be non-negative")
    if steering_power > p_t:
        return 0.0
    return (p_t - steering_power) * principal_gain**2 / noise.variance


def noncoop_overhead(victim_bf: BeamformPair, victim_direct, interference: CombinedInterference) -> float:
    """Steering power when the victim AP steers through its own channel."""
    return steer(victim_bf, victim_direct, victim_direct, interference).power


def coop_overhead(
    victim_bf: BeamformPair, victim_direct, helper_channel, interference: CombinedInterference
) -> float:
    """Steering power when a third AP steers through its cross channel."""
    return steer(victim_bf, victim_direct, helper_channel, interference).power


def interferer_side_is_snr(
    own_channel, own_intent: TransmitIntent, solution: SteeringSolution, noise: NoiseModel
) -> float:
    """SNR at the interferer's own station when that interferer also emits
    the steering signal for someone else's victim.

    The steering signal repeats the interferer's own symbol, so it adds
    coherently to the data after the principal receive filter.
    """
    if solution.power > own_intent.power:
        return 0.0
    bf = svd_beamform(own_channel)
    H = as_channel(own_channel)
    data = np.sqrt(own_intent.power - solution.power) * np.vdot(bf.filter, H @ own_intent.precoder)
    extra = np.sqrt(solution.power) * np.vdot(bf.filter, H @ solution.precoder)
    return float(abs(data + extra) ** 2 / noise.variance)
