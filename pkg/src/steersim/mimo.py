"""Narrowband MIMO substrate: Rayleigh channels, SVD beamforming, the
received-signal model and the Shannon mapping.

Channels are plain complex ``numpy`` arrays of shape ``(n_r, n_t)``; spatial
signals are complex 1-D arrays of length ``n_r``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import (
    DegenerateChannelError,
    DimensionError,
    InfeasiblePowerError,
    NormalizationError,
    SingularChannelError,
)

UNIT_TOL = 1e-9
MAX_CONDITION = 1e12


def as_channel(H, allow_single_rx: bool = True) -> np.ndarray:
    """Validate and return ``H`` as a complex 2-D array with ``n_t >= n_r``."""
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2:
        raise DimensionError(f"channel must be 2-D, got shape {H.shape}")
    n_r, n_t = H.shape
    if n_r < 1 or n_t < n_r:
        raise DimensionError(f"need n_t >= n_r >= 1, got n_r={n_r}, n_t={n_t}")
    if n_r == 1 and not allow_single_rx:
        raise DimensionError("single-antenna receivers are only valid for ZFBF")
    if not np.isfinite(H).all():
        raise DimensionError("channel has non-finite entries")
    return H


def sample_rayleigh(rng: np.random.Generator, n_r: int, n_t: int) -> np.ndarray:
    """Draw an i.i.d. CN(0, 1) channel of shape ``(n_r, n_t)``."""
    if not (isinstance(n_r, (int, np.integer)) and isinstance(n_t, (int, np.integer))):
        raise DimensionError("antenna counts must be integers")
    if n_r < 1 or n_t < n_r:
        raise DimensionError(f"need n_t >= n_r >= 1, got n_r={n_r}, n_t={n_t}")
    z = rng.standard_normal((2, n_r, n_t))
    return (z[0] + 1j * z[1]) * np.sqrt(0.5)


def _phase_normalize(v: np.ndarray) -> np.ndarray:
    # argmax returns the lowest index among equal magnitudes
    k = int(np.argmax(np.abs(v)))
    return v * (np.abs(v[k]) / v[k])


@dataclass(frozen=True)
class BeamformPair:
    """Principal precoder, receive filter and singular value of a channel.

    ``filter.conj() @ H @ precoder == gain`` (real, non-negative).
    """

    precoder: np.ndarray
    filter: np.ndarray
    gain: float


def svd_beamform(H) -> BeamformPair:
    H = as_channel(H)
    _, s, vh = np.linalg.svd(H)
    if s[0] == 0.0:
        raise DegenerateChannelError("zero channel has no principal mode")
    v = _phase_normalize(vh[0].conj())
    u = H @ v / s[0]
    return BeamformPair(precoder=v, filter=u, gain=float(s[0]))


def left_singular_basis(H) -> np.ndarray:
    """Left singular vectors of ``H`` as columns, column 0 phase-matched to
    :func:`svd_beamform`'s filter."""
    H = as_channel(H)
    u, s, _ = np.linalg.svd(H)
    if s[0] == 0.0:
        raise DegenerateChannelError("zero channel has no principal mode")
    u = u.copy()
    u[:, 0] = svd_beamform(H).filter
    return u


def _check_unit(reference: np.ndarray) -> None:
    if abs(np.linalg.norm(reference) - 1.0) > UNIT_TOL:
        raise NormalizationError(
            f"reference must have unit norm, got {np.linalg.norm(reference):.3g}"
        )


def decompose_against(reference, v) -> Tuple[np.ndarray, np.ndarray]:
    """Split ``v`` into its in-phase part along ``reference`` and the
    orthogonal (quadrature) remainder."""
    reference = np.asarray(reference, dtype=complex)
    v = np.asarray(v, dtype=complex)
    _check_unit(reference)
    if reference.shape != v.shape:
        raise DimensionError(f"shape mismatch {reference.shape} vs {v.shape}")
    in_phase = reference * np.vdot(reference, v)
    return in_phase, v - in_phase


def min_norm_solve(H, target) -> np.ndarray:
    """Minimum-norm ``w`` with ``H @ w == target``.

    Uses a direct solve for square channels and the Moore-Penrose
    pseudo-inverse for wide ones.  Raises :class:`SingularChannelError` when
    the row space is rank deficient or the condition number exceeds
    ``MAX_CONDITION``.
    """
    H = as_channel(H)
    target = np.asarray(target, dtype=complex)
    if target.shape != (H.shape[0],):
        raise DimensionError(f"target shape {target.shape} does not match {H.shape}")
    s = np.linalg.svd(H, compute_uv=False)
    if s[-1] == 0.0 or s[0] / s[-1] > MAX_CONDITION:
        raise SingularChannelError("channel is rank deficient or ill-conditioned")
    if H.shape[0] == H.shape[1]:
        return np.linalg.solve(H, target)
    return np.linalg.pinv(H) @ target


@dataclass(frozen=True)
class NoiseModel:
    variance: float

    def __post_init__(self):
        if not self.variance > 0:
            raise ValueError("noise variance must be positive")

    @classmethod
    def from_snr_db(cls, snr_db: float, p_t: float = 1.0) -> "NoiseModel":
        return cls(p_t / 10.0 ** (snr_db / 10.0))

    def sample(self, rng: np.random.Generator, n_r: int) -> np.ndarray:
        z = rng.standard_normal((2, n_r))
        return (z[0] + 1j * z[1]) * np.sqrt(self.variance / 2.0)


@dataclass(frozen=True)
class TransmitIntent:
    power: float
    precoder: np.ndarray
    symbol: complex = 1.0

    def __post_init__(self):
        if self.power < 0:
            raise ValueError("transmit power must be non-negative")
        _check_unit(np.asarray(self.precoder))


def _term(intent: TransmitIntent, H, power: float) -> np.ndarray:
    H = as_channel(H)
    return np.sqrt(power) * (H @ np.asarray(intent.precoder, dtype=complex)) * intent.symbol


def assemble_rx(
    desired: Tuple[TransmitIntent, np.ndarray],
    interferers: Sequence[Tuple[TransmitIntent, np.ndarray]] = (),
    steering: Optional[Tuple[TransmitIntent, np.ndarray]] = None,
    noise_sample: Optional[np.ndarray] = None,
    overhead: Optional[float] = None,
) -> np.ndarray:
    """Received vector at a victim station.

    ``desired`` carries the full budget ``P_T``; its data is sent with
    ``P_T - overhead``, where ``overhead`` defaults to the steering power
    (the victim AP pays for steering).  Interferers transmit at their
    stated power.
    """
    intent, H = desired
    if overhead is None:
        overhead = steering[0].power if steering is not None else 0.0
    if overhead > intent.power:
        raise InfeasiblePowerError(
            f"overhead {overhead:.4g} exceeds budget {intent.power:.4g}"
        )
    y = _term(intent, H, intent.power - overhead)
    n_r = y.shape[0]
    for other, H_m in interferers:
        term = _term(other, H_m, other.power)
        if term.shape[0] != n_r:
            raise DimensionError("all channels must share n_r")
        y = y + term
    if steering is not None:
        term = _term(steering[0], steering[1], steering[0].power)
        if term.shape[0] != n_r:
            raise DimensionError("all channels must share n_r")
        y = y + term
    if noise_sample is not None:
        y = y + np.asarray(noise_sample, dtype=complex)
    return y


def shannon_se(snr):
    """Spectral efficiency ``log2(1 + snr)`` in bit/s/Hz."""
    snr_arr = np.asarray(snr, dtype=float)
    if np.any(snr_arr < 0) or np.any(np.isnan(snr_arr)):
        raise ValueError("SNR must be non-negative")
    out = np.log2(1.0 + snr_arr)
    return float(out) if out.ndim == 0 else out
