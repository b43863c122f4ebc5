"""WLAN-controller planning: block cycle-breaking vertices, then compute
steering solutions in topological order so every victim sees the final
signals of its predecessors, steering side effects included."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Mapping, Optional, Tuple, Union

import numpy as np

from .baselines import Method
from .mimo import BeamformPair, NoiseModel, TransmitIntent, assemble_rx, shannon_se, svd_beamform
from .netgraph import (
    InterferenceGraph,
    NetworkState,
    break_cycles,
    build_graph,
    connected_components,
    topological_order,
)
from .steering import CombinedInterference, SteeringSolution, neutralize, steer, victim_snr

UNTOUCHED = "untouched"
BLOCKED = "blocked"


@dataclass(frozen=True)
class ControllerPlan:
    method: Method
    graph: InterferenceGraph
    residual: InterferenceGraph
    blocked: frozenset
    order: Tuple[int, ...]
    steering: Mapping[int, SteeringSolution]
    accumulated: Mapping[int, CombinedInterference]
    # total transmit amplitude vector (data + steering) of every non-blocked AP
    transmit: Mapping[int, np.ndarray]
    beamformers: Mapping[int, BeamformPair]

    def disposition(self, v: int) -> Union[str, SteeringSolution]:
        if v in self.blocked:
            return BLOCKED
        return self.steering.get(v, UNTOUCHED)

    @property
    def dispositions(self) -> Dict[int, Union[str, SteeringSolution]]:
        return {v: self.disposition(v) for v in self.graph.vertices}

    @property
    def infeasible(self) -> frozenset:
        return frozenset(v for v, s in self.steering.items() if not s.feasible)

    def to_dict(self) -> dict:
        out = {}
        for v in self.graph.vertices:
            d = self.disposition(v)
            if isinstance(d, str):
                out[str(v)] = {"action": d}
            else:
                out[str(v)] = {
                    "action": d.mode,
                    "power": d.power,
                    "feasible": d.feasible,
                    "precoder": [[z.real, z.imag] for z in d.precoder.tolist()],
                    "against": list(self.accumulated[v].contributors),
                }
        return {
            "method": str(self.method),
            "order": list(self.order),
            "blocked": sorted(self.blocked),
            "edges": [[a, b, w] for a, b, w in self.graph.edges],
            "dispositions": out,
        }


@dataclass(frozen=True)
class Schedule:
    """Method-independent part of a plan: graph, blocked set and order."""

    graph: InterferenceGraph
    residual: InterferenceGraph
    blocked: frozenset
    order: Tuple[int, ...]
    beamformers: Mapping[int, BeamformPair]


def schedule(state: NetworkState) -> Schedule:
    bfs = {v: svd_beamform(state.channel(v, v)) for v in range(state.K) if state.transmitting[v]}
    g = build_graph(state, bfs)
    blocked = set()
    order = []
    for comp in connected_components(g):
        res = break_cycles(comp)
        blocked |= res.deleted
        order.extend(topological_order(res.residual))
    return Schedule(g, g.without(blocked), frozenset(blocked), tuple(order), bfs)


def plan(state: NetworkState, method: Method = Method.IS, sched: Optional[Schedule] = None) -> ControllerPlan:
    """Steering plan for ``state``; ``sched`` may carry a precomputed
    :func:`schedule` of the same state."""
    method = Method(method)
    if method not in (Method.IS, Method.IN):
        raise ValueError("the controller plans IS or IN only")
    p_t = state.p_t
    sched = sched or schedule(state)
    g, residual, order, bfs = sched.graph, sched.residual, sched.order, sched.beamformers

    transmit: Dict[int, np.ndarray] = {}
    steering: Dict[int, SteeringSolution] = {}
    accumulated: Dict[int, CombinedInterference] = {}
    for v in order:
        H_v = state.channel(v, v)
        bf = bfs[v]
        preds = residual.predecessors(v)
        if not preds:
            transmit[v] = np.sqrt(p_t) * bf.precoder
            continue
        parts = [state.channel(u, v) @ transmit[u] for u in preds]
        ci = CombinedInterference.from_parts(parts, tuple(preds))
        if method is Method.IS:
            sol = steer(bf, H_v, H_v, ci, budget=p_t)
        else:
            sol = neutralize(H_v, ci, budget=p_t)
        accumulated[v] = ci
        steering[v] = sol
        if sol.feasible:
            transmit[v] = np.sqrt(p_t - sol.power) * bf.precoder + sol.transmit_vector()
        else:
            # an AP that cannot afford steering still sends its data; its own SE counts as 0
            transmit[v] = np.sqrt(p_t) * bf.precoder

    return ControllerPlan(
        method=method,
        graph=g,
        residual=residual,
        blocked=sched.blocked,
        order=order,
        steering=steering,
        accumulated=accumulated,
        transmit=transmit,
        beamformers=bfs,
    )


@dataclass(frozen=True)
class SEReport:
    per_vertex_se: Mapping[int, float]
    system_se: float
    infeasible_count: int


def evaluate(plan: ControllerPlan, state: NetworkState, noise: NoiseModel) -> SEReport:
    p_t = state.p_t
    per = {}
    for v in plan.graph.vertices:
        d = plan.disposition(v)
        if d == BLOCKED:
            per[v] = 0.0
            continue
        gain = plan.beamformers[v].gain
        power = 0.0 if d == UNTOUCHED else d.power
        per[v] = shannon_se(victim_snr(p_t, power, gain, noise))
    return SEReport(per, float(sum(per[v] for v in sorted(per))), len(plan.infeasible))


@dataclass(frozen=True)
class ChainResult:
    """Post-filter quantities of one station from the explicit signal sum."""

    desired: complex
    residual: complex

    def snr(self, noise: NoiseModel) -> float:
        return abs(self.desired) ** 2 / (noise.variance + abs(self.residual) ** 2)


def _intent(vec: np.ndarray) -> TransmitIntent:
    power = float(np.vdot(vec, vec).real)
    return TransmitIntent(power, vec / np.sqrt(power))


def simulate(plan: ControllerPlan, state: NetworkState) -> Dict[int, ChainResult]:
    """Rebuild every non-blocked station's received vector from all active
    transmitters that it hears and apply its principal filter."""
    p_t = state.p_t
    C = state.connection
    out = {}
    for v in plan.residual.vertices:
        H_v = state.channel(v, v)
        bf: BeamformPair = svd_beamform(H_v)
        sol = plan.steering.get(v)
        steering = None
        if sol is not None and sol.feasible and sol.power > 0:
            steering = (TransmitIntent(sol.power, sol.precoder), H_v)
        interferers = [
            (_intent(plan.transmit[u]), state.channel(u, v))
            for u in plan.residual.vertices
            if u != v and C[v, u]
        ]
        y = assemble_rx((TransmitIntent(p_t, bf.precoder), H_v), interferers, steering)
        overhead = steering[0].power if steering is not None else 0.0
        desired = np.sqrt(p_t - overhead) * bf.gain
        out[v] = ChainResult(complex(desired), complex(np.vdot(bf.filter, y) - desired))
    return out


def derived_graph(plan: ControllerPlan, state: NetworkState) -> InterferenceGraph:
    """Interference graph re-derived from what the planned transmitters
    actually radiate."""
    C = state.connection
    vs = plan.residual.vertices
    edges = {}
    for u in vs:
        for v in vs:
            if u != v and C[v, u]:
                h = state.channel(u, v) @ plan.transmit[u]
                power = float(np.vdot(h, h).real)
                if power > 0:
                    edges[(u, v)] = power
    return InterferenceGraph(vs, edges)
