import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from steersim.baselines import Method, StarScenario, system_se
from steersim.controller import BLOCKED, UNTOUCHED, derived_graph, evaluate, plan, simulate
from steersim.errors import IncompleteStateError
from steersim.harness import ScenarioConfig, generate_scenario, linear_matrix
from steersim.mimo import NoiseModel, sample_rayleigh, shannon_se, svd_beamform
from steersim.netgraph import NetworkState, break_cycles, build_graph
from steersim.steering import CombinedInterference, steer


def state_from(A, seed=0):
    K = A.shape[0]
    C = A + np.eye(K, dtype=int)
    rng = np.random.default_rng(seed)
    channels = {(m, n): sample_rayleigh(rng, 2, 2) for m in range(K) for n in range(K) if C[n, m]}
    return NetworkState(C, np.ones(K, dtype=int), channels)


def test_linear_chain_accumulates_side_effects():
    state = state_from(linear_matrix(3), seed=1)
    pl = plan(state)
    assert all(s.feasible for s in pl.steering.values())
    assert pl.order == (0, 1, 2)
    assert pl.disposition(0) == UNTOUCHED
    # v1 steers against AP0's data only
    assert np.allclose(pl.accumulated[1].vector, state.channel(0, 1) @ svd_beamform(state.channel(0, 0)).precoder)
    # v2 sees AP1's data and its steering side effect
    s1 = pl.steering[1]
    p1 = svd_beamform(state.channel(1, 1)).precoder
    expected = state.channel(1, 2) @ (math.sqrt(1 - s1.power) * p1 + s1.transmit_vector())
    assert np.allclose(pl.accumulated[2].vector, expected)
    assert pl.accumulated[2].contributors == (1,)


def test_edgeless_all_untouched():
    state = state_from(np.zeros((3, 3), dtype=int), seed=1)
    pl = plan(state)
    assert all(d == UNTOUCHED for d in pl.dispositions.values())
    noise = NoiseModel(0.1)
    rep = evaluate(pl, state, noise)
    bf = sum(shannon_se(svd_beamform(state.channel(v, v)).gain ** 2 / 0.1) for v in range(3))
    assert rep.system_se == pytest.approx(bf)


def test_two_cycle_blocks_one():
    state = state_from(np.array([[0, 1], [1, 0]]), seed=2)
    pl = plan(state)
    ds = pl.dispositions
    assert sorted(map(str, ds.values())) == [BLOCKED, UNTOUCHED]
    assert pl.blocked == break_cycles(build_graph(state)).deleted
    rep = evaluate(pl, state, NoiseModel(1.0))
    assert rep.per_vertex_se[next(iter(pl.blocked))] == 0.0


def test_single_pair_matches_two_bss_analysis():
    state = state_from(np.array([[0, 0], [1, 0]]), seed=3)
    H1, H0 = state.channel(0, 0), state.channel(1, 1)
    i = CombinedInterference(state.channel(0, 1) @ svd_beamform(H1).precoder, (0,))
    ref = steer(svd_beamform(H0), H0, H0, i)
    rep = evaluate(plan(state), state, NoiseModel(0.05))
    scn = StarScenario(H0, (state.channel(0, 1),), (H1,))
    assert rep.system_se == pytest.approx(system_se(Method.IS, scn, NoiseModel(0.05)).system_se, rel=1e-12)
    assert plan(state).steering[1].power == pytest.approx(ref.power, rel=1e-12)


def test_missing_channel():
    A = np.array([[0, 0], [1, 0]])
    with pytest.raises(IncompleteStateError):
        plan(NetworkState(A + np.eye(2, dtype=int), [1, 1], {(0, 0): np.eye(2), (1, 1): np.eye(2)}))


def test_method_switch():
    state = state_from(linear_matrix(3), seed=4)
    pl = plan(state, Method.IN)
    assert all(s.mode == "neutralize" for s in pl.steering.values())
    with pytest.raises(ValueError):
        plan(state, Method.IA)


def test_to_dict_is_json_ready():
    import json

    pl = plan(state_from(linear_matrix(3), seed=4))
    d = json.loads(json.dumps(pl.to_dict()))
    assert d["order"] == [0, 1, 2] and d["dispositions"]["0"] == {"action": "untouched"}
    assert d["dispositions"]["2"]["against"] == [1]


cfgs = st.builds(
    lambda K, p_b, eta: ScenarioConfig(K=K, p_b=p_b, eta=eta),
    st.integers(2, 6), st.sampled_from([0.3, 0.6, 0.9]), st.integers(1, 3),
)


@settings(max_examples=150, deadline=None)
@given(cfgs, st.integers(0, 10_000))
def test_plan_invariants(cfg, trial):
    state = generate_scenario(cfg, trial)
    pl = plan(state)
    residual = pl.residual
    pos = {v: k for k, v in enumerate(pl.order)}
    assert sorted(pl.order) == list(residual.vertices)
    for v in pl.order:
        # steering only for vertices with predecessors, all planned earlier
        assert (v in pl.steering) == bool(residual.predecessors(v))
        assert all(pos[u] < pos[v] for u in residual.predecessors(v))
    # idempotence
    again = plan(state)
    assert again.order == pl.order and again.blocked == pl.blocked
    for v in pl.steering:
        assert again.steering[v].power == pl.steering[v].power


@settings(max_examples=150, deadline=None)
@given(cfgs, st.integers(0, 10_000))
def test_residual_interference_annihilated(cfg, trial):
    state = generate_scenario(cfg, trial)
    pl = plan(state)
    for v, res in simulate(pl, state).items():
        sol = pl.steering.get(v)
        if sol is None or sol.feasible:
            assert abs(res.residual) < 1e-8 * math.sqrt(state.p_t)


@settings(max_examples=150, deadline=None)
@given(cfgs, st.integers(0, 10_000), st.sampled_from(["IS", "IN"]))
def test_analytic_matches_signal_chain(cfg, trial, method):
    state = generate_scenario(cfg, trial)
    pl = plan(state, method)
    noise = NoiseModel(0.1)
    rep = evaluate(pl, state, noise)
    for v, res in simulate(pl, state).items():
        sol = pl.steering.get(v)
        if sol is not None and not sol.feasible:
            assert rep.per_vertex_se[v] == 0.0
            continue
        assert shannon_se(res.snr(noise)) == pytest.approx(rep.per_vertex_se[v], rel=1e-6)
    assert rep.system_se == pytest.approx(sum(rep.per_vertex_se.values()))


@settings(max_examples=150, deadline=None)
@given(cfgs, st.integers(0, 10_000))
def test_graph_unchanged_by_steering(cfg, trial):
    state = generate_scenario(cfg, trial)
    pl = plan(state)
    assert derived_graph(pl, state).edge_set() == pl.residual.edge_set()
