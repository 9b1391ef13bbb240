import math
import pathlib

import numpy as np
import pytest

import swarm_sim

SCENARIOS = pathlib.Path(__file__).resolve().parents[2] / "scenarios"


def test_laplacian_rows_sum_to_zero():
    L = swarm_sim.laplacian(4, [(0, 1, 1.0), (1, 2, 2.0), (2, 3, 0.5), (3, 0, 1.0)])
    assert L.shape == (4, 4)
    assert np.allclose(L @ np.ones(4), 0.0, atol=1e-12)
    assert abs(np.linalg.eigvalsh(L)[0]) < 1e-12


def test_sensor_roundtrip():
    rng = np.random.default_rng(0)
    for _ in range(200):
        pi, pj = rng.uniform(-3, 3, 3), rng.uniform(-3, 3, 3)
        w = rng.normal(size=3)
        r, theta, phi = swarm_sim.sensor_reading(pi, pj, w)
        back = swarm_sim.reading_to_global(r, theta, phi, w)
        assert np.allclose(back, pj - pi, atol=1e-12)


def test_sensor_example():
    r, theta, phi = swarm_sim.sensor_reading([0, 0, 0], [1, 0, 0], [0, 0, 0])
    assert r == pytest.approx(1.0)
    assert theta == pytest.approx(math.pi / 2)
    assert phi == pytest.approx(0.0, abs=1e-15)


def test_qp_halfspace_projection():
    status, x, value = swarm_sim.solve_qp(np.eye(2), np.array([-2.0, -2.0]),
                                          A_in=np.array([[1.0, 1.0]]), b_in=np.array([1.0]))
    assert status == "optimal"
    assert np.allclose(x, [0.5, 0.5], atol=1e-8)


def test_check_stability_formation():
    rep = swarm_sim.check_stability(SCENARIOS / "formation_square.yaml")
    assert rep["stable"] is True
    assert rep["observer"]["min_eigenvalue_T"] > 0


def test_run_head_on_writes_outputs(tmp_path):
    rep = swarm_sim.run(SCENARIOS / "head_on_alg2.yaml", out_dir=tmp_path, wall_clock=False)
    assert rep["exit_code"] == 0
    assert rep["summary"]["min_pairwise_distance"] >= 0.3 - 1e-6
    assert (tmp_path / "trajectory.jsonl").exists()
    again = swarm_sim.run(SCENARIOS / "head_on_alg2.yaml", wall_clock=False)
    assert again["hash"] == rep["hash"]


def test_bad_config_raises(tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text("mode: nonsense\n")
    with pytest.raises(ValueError):
        swarm_sim.run(bad)


def test_small_compare():
    rep = swarm_sim.compare(SCENARIOS / "compare_layered.yaml", agents=[4], reps=1, wall_clock=False)
    assert rep["summary"]["rows"][0]["baseline_avg_partners"] == pytest.approx(3.0)
