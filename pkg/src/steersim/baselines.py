"""Reference interference-management methods and system SE accounting for a
star scenario: one victim link plus ``M`` interfering links that do not
interfere with each other."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import cached_property
from enum import Enum
from typing import Sequence, Tuple

import numpy as np

from .errors import DimensionError
from .mimo import (
    NoiseModel,
    as_channel,
    left_singular_basis,
    min_norm_solve,
    sample_rayleigh,
    shannon_se,
    svd_beamform,
    _phase_normalize,
)
from .steering import CombinedInterference, neutralize, steer


class Method(str, Enum):
    IS = "IS"
    IN = "IN"
    IA = "IA"
    ZFBF = "ZFBF"
    P2P = "P2P"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class SeBreakdown:
    victim_se: float
    interferer_se: Tuple[float, ...]
    system_se: float

    def __post_init__(self):
        if abs(self.system_se - self.victim_se - sum(self.interferer_se)) > 1e-12 * max(1.0, self.system_se):
            raise ValueError("system SE must equal victim plus interferer SE")

    @classmethod
    def build(cls, victim_se: float, interferer_se: Sequence[float]) -> "SeBreakdown":
        interferer_se = tuple(float(x) for x in interferer_se)
        return cls(float(victim_se), interferer_se, float(victim_se) + sum(interferer_se))


def p2p_bf_se(H, p_t: float, noise: NoiseModel) -> float:
    bf = svd_beamform(H)
    return shannon_se(p_t * bf.gain**2 / noise.variance)


def zfbf_precoder(own_channel, cross_channel) -> np.ndarray:
    """Unit precoder in the null space of ``cross_channel`` that maximizes
    the gain towards ``own_channel``."""
    own = np.atleast_2d(np.asarray(own_channel, dtype=complex))
    cross = np.atleast_2d(np.asarray(cross_channel, dtype=complex))
    n_t = cross.shape[1]
    if own.shape[1] != n_t:
        raise DimensionError("own and cross channels must share n_t")
    _, s, vh = np.linalg.svd(cross)
    rank = int(np.sum(s > s[0] * 1e-12)) if s.size and s[0] > 0 else 0
    if rank == 0:
        raise DimensionError("cross channel must be nonzero")
    null = vh[rank:].conj().T
    if null.shape[1] == 0:
        raise DimensionError("no transmit dimensions left after zero-forcing")
    eff = own @ null
    _, s_eff, vh_eff = np.linalg.svd(eff)
    if s_eff[0] <= 1e-14 * max(1.0, float(np.linalg.norm(own))):
        warnings.warn("own channel has no component in the zero-forcing null space", RuntimeWarning)
        return _phase_normalize(null[:, 0])
    p = null @ vh_eff[0].conj()
    return _phase_normalize(p / np.linalg.norm(p))


def ia_precoder(cross_channel, victim_direct) -> np.ndarray:
    """Precoder that places the interference in the victim's second receive
    direction, leaving its principal filter output interference free."""
    victim_direct = as_channel(victim_direct)
    if victim_direct.shape[0] < 2:
        raise DimensionError("alignment needs at least two receive antennas")
    target = left_singular_basis(victim_direct)[:, 1]
    w = min_norm_solve(cross_channel, target)
    return _phase_normalize(w / np.linalg.norm(w))


@dataclass(frozen=True)
class StarScenario:
    victim: np.ndarray
    cross: Tuple[np.ndarray, ...]
    own: Tuple[np.ndarray, ...]

    @property
    def M(self) -> int:
        return len(self.cross)

    @cached_property
    def victim_bf(self):
        return svd_beamform(self.victim)

    @cached_property
    def own_bfs(self):
        return tuple(svd_beamform(H) for H in self.own)

    def head(self, M: int) -> "StarScenario":
        """The same realization restricted to its first ``M`` interferers."""
        out = StarScenario(self.victim, self.cross[:M], self.own[:M])
        out.__dict__["victim_bf"] = self.victim_bf
        out.__dict__["own_bfs"] = self.own_bfs[:M]
        return out

    @classmethod
    def sample(cls, rng: np.random.Generator, M: int, n_t: int = 2, n_r: int = 2) -> "StarScenario":
        victim = sample_rayleigh(rng, n_r, n_t)
        cross, own = [], []
        for _ in range(M):
            cross.append(sample_rayleigh(rng, n_r, n_t))
            own.append(sample_rayleigh(rng, n_r, n_t))
        return cls(victim, tuple(cross), tuple(own))

    def interference(self, p_t: float) -> CombinedInterference:
        parts = [np.sqrt(p_t) * (H_c @ bf.precoder) for H_c, bf in zip(self.cross, self.own_bfs)]
        return CombinedInterference.from_parts(parts, tuple(range(1, self.M + 1)), n_r=self.victim.shape[0])


@dataclass(frozen=True)
class LinkGains:
    """Noise-free post-filter powers of one star realization.

    SNR of a link is ``signal / (noise + leak)``.
    """

    victim_signal: float
    victim_leak: float
    interferer_signal: Tuple[float, ...]
    infeasible: bool = False

    def breakdown(self, noise: NoiseModel) -> SeBreakdown:
        victim = shannon_se(self.victim_signal / (noise.variance + self.victim_leak))
        others = [shannon_se(g / noise.variance) for g in self.interferer_signal]
        return SeBreakdown.build(victim, others)


def method_gains(method: Method, scn: StarScenario, p_t: float = 1.0) -> LinkGains:
    method = Method(method)
    bf0 = scn.victim_bf
    bf_gain = p_t * bf0.gain**2
    own_bf = [p_t * bf.gain**2 for bf in scn.own_bfs]
    if method is Method.P2P or scn.M == 0:
        return LinkGains(bf_gain, 0.0, tuple(own_bf))
    if method in (Method.IS, Method.IN):
        i = scn.interference(p_t)
        if method is Method.IS:
            sol = steer(bf0, scn.victim, scn.victim, i, budget=p_t)
        else:
            sol = neutralize(scn.victim, i, budget=p_t)
        if not sol.feasible:
            return LinkGains(0.0, 0.0, tuple(own_bf), infeasible=True)
        return LinkGains((p_t - sol.power) * bf0.gain**2, 0.0, tuple(own_bf))
    if method is Method.IA:
        precoders = [ia_precoder(H_c, scn.victim) for H_c in scn.cross]
    else:
        precoders = [zfbf_precoder(H_o, H_c) for H_o, H_c in zip(scn.own, scn.cross)]
    leak = sum(np.sqrt(p_t) * np.vdot(bf0.filter, H_c @ p) for H_c, p in zip(scn.cross, precoders))
    others = [p_t * float(np.linalg.norm(H_o @ p) ** 2) for H_o, p in zip(scn.own, precoders)]
    return LinkGains(bf_gain, float(abs(leak) ** 2), tuple(others))


def system_se(method: Method, scn: StarScenario, noise: NoiseModel, p_t: float = 1.0) -> SeBreakdown:
    """Victim, per-interferer and system SE of ``method`` on one realization.

    IS/IN: the victim pays the steering overhead and interferers keep their
    interference-free BF rate.  IA/ZFBF: interferers adapt their precoders
    and the victim keeps its BF rate.  P2P: every link at its BF rate.
    """
    try:
        method = Method(method)
    except ValueError:
        raise ValueError(f"unknown method {method!r}") from None
    return method_gains(method, scn, p_t).breakdown(noise)

