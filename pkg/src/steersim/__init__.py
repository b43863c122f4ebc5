"""MIMO interference steering and neutralization for dense WLANs, with the
graph-based controller that orders steering across a network."""

from .baselines import Method, StarScenario, system_se
from .controller import ControllerPlan, SEReport, evaluate, plan, simulate
from .harness import FIGURES, ScenarioConfig, SweepResult, generate_scenario, run_figure, run_sweep
from .mimo import BeamformPair, NoiseModel, TransmitIntent, sample_rayleigh, shannon_se, svd_beamform
from .netgraph import InterferenceGraph, NetworkState, break_cycles, build_graph, topological_order
from .steering import CombinedInterference, SteeringSolution, neutralize, steer

__version__ = "0.1.0"
