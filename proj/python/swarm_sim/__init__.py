"""Python access to the swarm simulator core."""

import json

from ._swarm import (
    ConfigError,
    InvalidArgument,
    laplacian,
    min_real_eigenvalue,
    reading_to_global,
    sensor_reading,
    solve_qp,
)
from . import _swarm

__all__ = [
    "ConfigError",
    "InvalidArgument",
    "check_stability",
    "compare",
    "laplacian",
    "min_real_eigenvalue",
    "reading_to_global",
    "run",
    "sensor_reading",
    "solve_qp",
]


def run(config, *, seed=None, out_dir=None, trace_level="standard", wall_clock=True, threads=None):
    """Run a scenario file. Returns a dict with summary, hash, exit_code and flags."""
    return json.loads(_swarm.run_json(str(config), seed, None if out_dir is None else str(out_dir),
                                      trace_level, wall_clock, threads))


def compare(config, agents=(4, 8, 12, 16, 20), reps=20, *, seed=None, out_dir=None,
            trace_level="standard", wall_clock=True, threads=None):
    """Baseline versus distributed planner sweep over agent counts."""
    return json.loads(_swarm.compare_json(str(config), list(agents), reps, seed,
                                          None if out_dir is None else str(out_dir),
                                          trace_level, wall_clock, threads))


def check_stability(config):
    return json.loads(_swarm.check_stability_json(str(config)))
