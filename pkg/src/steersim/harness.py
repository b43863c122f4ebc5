"""Scenario generation and seeded Monte-Carlo sweeps.

Every trial draws from its own stream ``default_rng([seed, trial_index])``,
so results do not depend on worker count and every axis point of a sweep
sees the same channel draws (common random numbers).  Per-trial values are
reduced in trial order, which keeps CSV output bitwise reproducible.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .baselines import Method, StarScenario, method_gains
from .controller import plan as plan_network
from .controller import schedule
from .errors import ConfigError
from .mimo import sample_rayleigh, svd_beamform
from .netgraph import NetworkState
from .steering import coop_overhead, neutralize, noncoop_overhead, steer

SWEEPABLE = ("snr_db", "p_b", "K", "eta", "M")
TOPOLOGIES = ("random", "star", "linear")
CSV_COLUMNS = ("axis", "method", "mean_se", "ci95", "infeasible_rate", "trials", "seed")
DEFAULT_SNR_AXIS = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)


@dataclass
class ScenarioConfig:
    """One experiment.  Exactly one of ``snr_db, p_b, K, eta, M`` may be a
    list when the config drives :func:`run_sweep`."""

    K: Union[int, List[int]] = 3
    p_b: Union[float, List[float]] = 0.5
    eta: Union[int, List[int]] = 1
    snr_db: Union[float, List[float]] = 15.0
    trials: int = 10_000
    seed: int = 0
    method: Union[str, List[str]] = "IS"
    n_t: int = 2
    n_r: int = 2
    M: Union[int, List[int]] = 1
    topology: str = "random"

    def __post_init__(self):
        for name in SWEEPABLE:
            v = getattr(self, name)
            if isinstance(v, (list, tuple)):
                if not v:
                    raise ConfigError(f"sweep axis {name} is empty")
                setattr(self, name, list(v))
        for k in _as_list(self.K):
            if int(k) != k or k < 1:
                raise ConfigError("K must be an integer >= 1")
        for p in _as_list(self.p_b):
            if not 0.0 <= p <= 1.0:
                raise ConfigError("p_b must lie in [0, 1]")
        for e in _as_list(self.eta):
            if int(e) != e or e < 1:
                raise ConfigError("eta must be an integer >= 1")
        for m in _as_list(self.M):
            if int(m) != m or m < 0:
                raise ConfigError("M must be a non-negative integer")
        if int(self.trials) != self.trials or self.trials < 1:
            raise ConfigError("trials must be an integer >= 1")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.n_t < self.n_r or self.n_r < 1:
            raise ConfigError("need n_t >= n_r >= 1")
        if self.topology not in TOPOLOGIES:
            raise ConfigError(f"topology must be one of {TOPOLOGIES}")
        try:
            for m in self.methods:
                Method(m)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    @property
    def methods(self) -> List[str]:
        return [str(Method(m)) for m in _as_list(self.method)]

    def swept_axis(self) -> Tuple[str, list]:
        swept = [n for n in SWEEPABLE if isinstance(getattr(self, n), list)]
        if len(swept) != 1:
            raise ConfigError(f"exactly one of {SWEEPABLE} must be a list, got {swept or 'none'}")
        return swept[0], getattr(self, swept[0])

    def at(self, **values) -> "ScenarioConfig":
        return dataclasses.replace(self, **values)

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path) -> "ScenarioConfig":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        return cls.from_dict(data)


def _as_list(v) -> list:
    return list(v) if isinstance(v, (list, tuple)) else [v]


def trial_rng(seed: int, trial_index: int, *stream: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), int(trial_index), *stream])


def draw_interference(rng: np.random.Generator, K: int, p_b: float, eta: int) -> Tuple[np.ndarray, np.ndarray]:
    """Bernoulli(p_b) off-diagonal draws and the same matrix with each
    victim row capped at ``eta`` ones (later draws in the row discarded).

    Row ``n`` lists the APs heard by STA_n.
    """
    raw = rng.random((K, K)) < p_b
    np.fill_diagonal(raw, False)
    capped = np.zeros_like(raw)
    for n in range(K):
        hits = np.flatnonzero(raw[n])[:eta]
        capped[n, hits] = True
    return raw.astype(int), capped.astype(int)


def _network_from_matrix(A: np.ndarray, rng: np.random.Generator, n_t: int, n_r: int) -> NetworkState:
    K = A.shape[0]
    C = A + np.eye(K, dtype=int)
    channels = {}
    # every pair is drawn so channel streams line up across p_b and eta
    for m in range(K):
        for n in range(K):
            H = sample_rayleigh(rng, n_r, n_t)
            if C[n, m]:
                channels[(m, n)] = H
    return NetworkState(C, np.ones(K, dtype=int), channels)


def linear_matrix(K: int) -> np.ndarray:
    """Chain 0 -> 1 -> ... -> K-1: AP_m interferes with STA_{m+1}."""
    A = np.zeros((K, K), dtype=int)
    for n in range(1, K):
        A[n, n - 1] = 1
    return A


def generate_scenario(cfg: ScenarioConfig, trial_index: int) -> NetworkState:
    """Random (or linear) network for one trial; all APs transmit."""
    for name in ("K", "p_b", "eta"):
        if isinstance(getattr(cfg, name), list):
            raise ConfigError(f"{name} must be a scalar to generate a scenario")
    rng = trial_rng(cfg.seed, trial_index)
    if cfg.topology == "linear":
        A = linear_matrix(int(cfg.K))
    else:
        _, A = draw_interference(rng, int(cfg.K), float(cfg.p_b), int(cfg.eta))
    return _network_from_matrix(A, rng, cfg.n_t, cfg.n_r)


def generate_star(cfg: ScenarioConfig, trial_index: int, M: int, n_r: Optional[int] = None) -> StarScenario:
    """Victim plus ``M`` interferers.  The ``n_r = 1`` (ZFBF) realization
    uses its own stream."""
    n_r = cfg.n_r if n_r is None else n_r
    stream = () if n_r == cfg.n_r else (1,)
    return StarScenario.sample(trial_rng(cfg.seed, trial_index, *stream), M, cfg.n_t, n_r)


# ---------------------------------------------------------------------------
# results

@dataclass(frozen=True)
class SweepRow:
    axis: float
    method: str
    mean_se: float
    ci95: float
    infeasible_rate: float
    trials: int
    seed: int


@dataclass
class SweepResult:
    name: str
    axis_name: str
    rows: List[SweepRow] = field(default_factory=list)

    def row(self, axis, method: str) -> SweepRow:
        for r in self.rows:
            if r.axis == axis and r.method == method:
                return r
        raise KeyError((axis, method))

    def series(self, method: str) -> List[SweepRow]:
        return [r for r in self.rows if r.method == method]

    @property
    def methods(self) -> List[str]:
        return list(dict.fromkeys(r.method for r in self.rows))

    @property
    def axis_values(self) -> list:
        return list(dict.fromkeys(r.axis for r in self.rows))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            w.writerow([_fmt(r.axis), r.method, _fmt(r.mean_se), _fmt(r.ci95),
                        _fmt(r.infeasible_rate), r.trials, r.seed])
        return buf.getvalue()

    def gnuplot_script(self, csv_name: str) -> str:
        lines = [
            "set datafile separator ','",
            f"set title '{self.name}'",
            f"set xlabel '{self.axis_name}'",
            "set ylabel 'mean SE (bit/s/Hz)'" if self.name != "fig8" else "set ylabel 'probability'",
            "set key outside right",
            "set grid",
        ]
        plots = [
            f"'{csv_name}' every ::1 using 1:(strcol(2) eq '{m}' ? $3 : NaN) with linespoints title '{m}'"
            for m in self.methods
        ]
        lines.append("plot " + ", \\\n     ".join(plots))
        return "\n".join(lines) + "\n"

    def write(self, out_dir, stem: Optional[str] = None) -> Tuple[Path, Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        stem = stem or self.name
        csv_path, gp_path = out / f"{stem}.csv", out / f"{stem}.gp"
        with open(csv_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(self.to_csv())
        gp_path.write_text(self.gnuplot_script(csv_path.name), encoding="utf-8")
        return csv_path, gp_path


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return repr(float(x))


# ---------------------------------------------------------------------------
# Monte-Carlo engine

# a trial returns {(axis_value, label): (value, infeasible_fraction)}
TrialFn = Callable[[int], Dict[Tuple[float, str], Tuple[float, float]]]


def _run_trials(fn: TrialFn, trials: int, workers: int) -> list:
    if workers <= 1:
        return [fn(t) for t in range(trials)]
    chunk = max(1, trials // (workers * 8))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(trials), chunksize=chunk))


def _aggregate(name: str, axis_name: str, per_trial: list, seed: int) -> SweepResult:
    keys = list(per_trial[0])
    n = len(per_trial)
    rows = []
    for key in keys:
        vals = np.fromiter((t[key][0] for t in per_trial), float, n)
        bad = np.fromiter((t[key][1] for t in per_trial), float, n)
        mean = float(np.mean(vals))
        ci = float(1.96 * np.std(vals, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
        rows.append(SweepRow(key[0], key[1], mean, ci, float(np.mean(bad)), n, seed))
    return SweepResult(name, axis_name, rows)


def _snr_factors(snr_db: Sequence[float], p_t: float = 1.0) -> np.ndarray:
    # noise variance is P_T / snr, so SNR = gain * snr / P_T
    return 10.0 ** (np.asarray(snr_db, dtype=float) / 10.0) / p_t


def _se(gain, factors):
    return np.log2(1.0 + np.asarray(gain) * factors)


def _star_metrics(cfg: ScenarioConfig, scn: StarScenario, zf: Optional[StarScenario], factors,
                  single: bool, p2p_ref: bool):
    """Per-method SE arrays (over SNR points) for a star realization.

    ``single`` reports the link that performs interference management
    instead of the system sum; ``p2p_ref`` turns P2P into the one-link
    interference-free reference curve.
    """
    out = {}
    for m in cfg.methods:
        method = Method(m)
        gains = method_gains(method, zf if method is Method.ZFBF else scn)
        if method is Method.P2P and p2p_ref:
            se = _se(gains.victim_signal, factors)
        else:
            victim = np.log2(1.0 + gains.victim_signal * factors / (1.0 + gains.victim_leak * factors))
            others = [_se(g, factors) for g in gains.interferer_signal]
            if single:
                if method in (Method.IS, Method.IN):
                    se = victim
                else:
                    se = np.mean(others, axis=0) if others else _se(0.0, factors)
            else:
                se = victim + np.sum(others, axis=0) if others else victim
        out[m] = (se, float(gains.infeasible))
    return out


def _star_trial(cfg: ScenarioConfig, axis_name: str, axis_values: list, single: bool, p2p_ref: bool, trial: int):
    res = {}
    Ms = [int(a) for a in axis_values] if axis_name == "M" else [int(cfg.M)]
    # one draw with the largest M; smaller M use its leading interferers
    full = generate_star(cfg, trial, max(Ms))
    full_zf = generate_star(cfg, trial, max(Ms), n_r=1) if "ZFBF" in cfg.methods else None
    if axis_name == "snr_db":
        factors = _snr_factors(axis_values)
        for m, (se, bad) in _star_metrics(cfg, full, full_zf, factors, single, p2p_ref).items():
            for a, v in zip(axis_values, se):
                res[(a, m)] = (float(v), bad)
        return res
    factors = _snr_factors([cfg.snr_db])
    for a, M in zip(axis_values, Ms):
        zf = full_zf.head(M) if full_zf is not None else None
        for m, (se, bad) in _star_metrics(cfg, full.head(M), zf, factors, single, p2p_ref).items():
            res[(a, m)] = (float(se[0]), bad)
    return res


def _network_gains(state: NetworkState, method: str, sched=None) -> Tuple[Dict[int, float], int]:
    """Per-vertex noise-free post-filter signal power and infeasible count."""
    p_t = state.p_t
    active = [v for v in range(state.K) if state.transmitting[v]]
    if Method(method) is Method.P2P:
        return {v: p_t * svd_beamform(state.channel(v, v)).gain ** 2 for v in active}, 0
    pl = plan_network(state, Method(method), sched)
    gains = {}
    for v in active:
        d = pl.disposition(v)
        if d == "blocked" or (not isinstance(d, str) and not d.feasible):
            gains[v] = 0.0
            continue
        power = 0.0 if isinstance(d, str) else d.power
        gains[v] = (p_t - power) * pl.beamformers[v].gain ** 2
    return gains, len(pl.infeasible)


def _network_trial(cfg: ScenarioConfig, axis_name: str, axis_values: list, trial: int):
    res = {}
    if axis_name == "snr_db":
        jobs = [(None, cfg)]
        factors = _snr_factors(axis_values)
    else:
        jobs = [(a, cfg.at(**{axis_name: a})) for a in axis_values]
        factors = _snr_factors([cfg.snr_db])
    for a, point in jobs:
        state = generate_scenario(point, trial)
        sched = schedule(state)
        keys = axis_values if a is None else [a]
        for m in cfg.methods:
            gains, bad = _network_gains(state, m, sched)
            total = np.zeros(len(keys))
            for v in sorted(gains):
                total = total + _se(gains[v], factors)
            for k, val in zip(keys, total):
                res[(k, m)] = (float(val), bad / state.K)
    return res


def run_sweep(cfg: ScenarioConfig, name: str = "sweep", workers: int = 1) -> SweepResult:
    """Mean system SE (with 95% CI) of each method at every axis point."""
    axis_name, axis_values = cfg.swept_axis()
    if cfg.topology == "star":
        if axis_name in ("K", "p_b", "eta"):
            raise ConfigError("star scenarios sweep snr_db or M")
        fn = partial(_star_trial, cfg, axis_name, axis_values, False, False)
    else:
        if axis_name == "M":
            raise ConfigError("M only applies to star scenarios")
        bad = [m for m in cfg.methods if Method(m) in (Method.IA, Method.ZFBF)]
        if bad:
            raise ConfigError(f"{bad} are only defined for star scenarios")
        fn = partial(_network_trial, cfg, axis_name, axis_values)
    return _aggregate(name, axis_name, _run_trials(fn, cfg.trials, workers), cfg.seed)


# ---------------------------------------------------------------------------
# figure presets

def _overhead_trial(cfg: ScenarioConfig, axis_values: list, trial: int):
    """Indicators of non-cooperative steering being cheaper than cooperative."""
    res = {}
    helper = sample_rayleigh(trial_rng(cfg.seed, trial, 2), cfg.n_r, cfg.n_t)
    full = generate_star(cfg, trial, max(int(M) for M in axis_values))
    for M in axis_values:
        scn = full.head(int(M))
        bf = scn.victim_bf
        i = scn.interference(1.0)
        is_nc, is_c = noncoop_overhead(bf, scn.victim, i), coop_overhead(bf, scn.victim, helper, i)
        in_nc, in_c = neutralize(scn.victim, i).power, neutralize(helper, i).power
        res[(M, "IS")] = (float(is_nc < is_c), 0.0)
        res[(M, "IN")] = (float(in_nc < in_c), 0.0)
    return res


def _coop_trial(cfg: ScenarioConfig, axis_values: list, trial: int):
    """Victim SE with non-cooperative and cooperative IS/IN, one interferer."""
    res = {}
    scn = generate_star(cfg, trial, 1)
    helper = sample_rayleigh(trial_rng(cfg.seed, trial, 2), cfg.n_r, cfg.n_t)
    bf = svd_beamform(scn.victim)
    i = scn.interference(1.0)
    sols = {
        "IS-noncoop": steer(bf, scn.victim, scn.victim, i),
        "IS-coop": steer(bf, scn.victim, helper, i),
        "IN-noncoop": neutralize(scn.victim, i),
        "IN-coop": neutralize(helper, i),
    }
    factors = _snr_factors(axis_values)
    for label, sol in sols.items():
        gain = (1.0 - sol.power) * bf.gain**2 if sol.feasible else 0.0
        for a, v in zip(axis_values, _se(gain, factors)):
            res[(a, label)] = (float(v), float(not sol.feasible))
    return res


def _stage_trial(cfg: ScenarioConfig, axis_values: list, trial: int):
    """Victim SE of the 2nd and 3rd vertices of the chain 0 -> 1 -> 2."""
    res = {}
    state = generate_scenario(cfg.at(K=3, topology="linear"), trial)
    sched = schedule(state)
    factors = _snr_factors(axis_values)
    for method in ("IS", "IN"):
        pl = plan_network(state, Method(method), sched)
        for stage, v in ((2, 1), (3, 2)):
            sol = pl.steering[v]
            gain = (1.0 - sol.power) * pl.beamformers[v].gain ** 2 if sol.feasible else 0.0
            for a, val in zip(axis_values, _se(gain, factors)):
                res[(a, f"{method}-stage{stage}")] = (float(val), float(not sol.feasible))
    return res


@dataclass(frozen=True)
class FigurePreset:
    cfg: ScenarioConfig
    axis_name: str
    axis_values: tuple
    kind: str  # system | single | overhead | coop | stage | network
    description: str


FIGURES: Dict[str, FigurePreset] = {
    "fig5": FigurePreset(
        ScenarioConfig(M=1, method=["IS", "IN", "IA", "ZFBF", "P2P"], topology="star"),
        "snr_db", DEFAULT_SNR_AXIS, "system", "system SE of K=2 links vs SNR"),
    "fig6": FigurePreset(
        ScenarioConfig(snr_db=15.0, method=["IS", "IN", "IA", "ZFBF", "P2P"], topology="star"),
        "M", (1, 2, 3, 4), "system", "system SE vs number of interferers at 15 dB"),
    "fig7": FigurePreset(
        ScenarioConfig(snr_db=15.0, method=["IS", "IN", "IA", "ZFBF", "P2P"], topology="star"),
        "M", (1, 2, 3, 4), "single", "SE of the link that performs interference management"),
    "fig8": FigurePreset(
        ScenarioConfig(topology="star"),
        "M", (1, 2, 3, 4), "overhead", "Pr(non-cooperative overhead < cooperative overhead)"),
    "fig11": FigurePreset(
        ScenarioConfig(M=1, topology="star"),
        "snr_db", DEFAULT_SNR_AXIS, "coop", "victim SE, non-cooperative vs cooperative IS/IN"),
    "fig12": FigurePreset(
        ScenarioConfig(K=3, topology="linear"),
        "snr_db", DEFAULT_SNR_AXIS, "stage", "victim SE at processing stages 2 and 3"),
    "fig13": FigurePreset(
        ScenarioConfig(K=3, eta=2, snr_db=15.0, method=["IS", "IN"]),
        "p_b", (0.3, 0.6, 0.9), "network", "system SE vs p_b, K=3, eta=2"),
    "fig14": FigurePreset(
        ScenarioConfig(p_b=0.9, eta=1, snr_db=15.0, method=["IS", "IN"]),
        "K", (2, 3, 4, 5), "network", "system SE vs K, p_b=0.9, eta=1"),
    "fig15": FigurePreset(
        ScenarioConfig(K=5, p_b=0.9, snr_db=15.0, method=["IS", "IN"]),
        "eta", (1, 2, 3), "network", "system SE vs eta, K=5, p_b=0.9"),
}


def run_figure(
    name: str,
    seed: int = 0,
    trials: Optional[int] = None,
    out: Optional[Union[str, Path]] = None,
    workers: int = 1,
) -> SweepResult:
    if name not in FIGURES:
        raise ConfigError(f"unknown figure {name!r}; choose from {sorted(FIGURES)}")
    preset = FIGURES[name]
    cfg = preset.cfg.at(seed=seed, trials=trials or preset.cfg.trials)
    axis, values = preset.axis_name, list(preset.axis_values)
    if preset.kind in ("system", "single"):
        fn = partial(_star_trial, cfg, axis, values, preset.kind == "single", True)
    elif preset.kind == "overhead":
        fn = partial(_overhead_trial, cfg, values)
    elif preset.kind == "coop":
        fn = partial(_coop_trial, cfg, values)
    elif preset.kind == "stage":
        fn = partial(_stage_trial, cfg, values)
    else:
        fn = partial(_network_trial, cfg, axis, values)
    result = _aggregate(name, axis, _run_trials(fn, cfg.trials, workers), cfg.seed)
    if out is not None:
        result.write(out)
    return result
