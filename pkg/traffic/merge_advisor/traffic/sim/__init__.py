"""
Merging-area microsimulation: scenario configuration, arrivals, the
fixed-step engine, recorded-traffic replay and the platoon runner.
"""
from .arrivals import (
    equilibrium_speed_for_flow,
    insertion_speed,
    lane_capacity,
    spawn_arrivals,
    steady_flow,
)
from .config import ScenarioConfig, load_scenario
from .engine import (
    RandomStreams,
    SimEvent,
    SimResult,
    SimState,
    Simulation,
    car_following_accel,
    cooperative_adjust,
    initial_state,
    ramp_end_accel,
    run_scenario,
    step,
)
from .platoon import PlatoonTrace, random_platoon_truth, simulate_platoon
from .replay import MainlineReplay, ReplayTrack
