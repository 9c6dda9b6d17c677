import numpy as np
import pytest

import rangewalk as rw


def test_trajectory_points_are_nearest_neighbour():
    t = rw.generate_trajectory(4, 500, 3)
    p = t.points()
    assert p.shape == (501, 4)
    assert (p[0] == 0).all()
    assert (np.abs(np.diff(p, axis=0)).sum(axis=1) == 1).all()
    assert t == rw.generate_trajectory(4, 500, 3)


def test_straight_path_controls():
    t = rw.load_fixed_path([[k, 0, 0, 0] for k in range(11)])
    g = rw.build_range_graph(t)
    assert g.num_vertices == 11 and g.num_edges == 10
    cuts = rw.find_cut_times(g)
    assert list(cuts.times) == list(rw.brute_force_cut_times(t).times)
    prof = rw.metric_profile(g, cuts)
    assert prof["resistance"] == pytest.approx(list(range(11)))
    assert rw.oracle_resistance(g, 0, 10) == pytest.approx(10.0)
    assert rw.mu_measure_prefix(g, 10) == 20


def test_cut_oracle_and_profile_on_random_walk():
    t = rw.generate_trajectory(4, 1500, 8)
    g = rw.build_range_graph(t)
    cuts = rw.find_cut_times(g)
    assert list(cuts.times) == list(rw.brute_force_cut_times(t).times)
    prof = rw.metric_profile(g, cuts, [100, 500, 1000])
    for r, d in zip(prof["resistance"], prof["distance"]):
        assert r <= d + 1e-9
    k = 1000
    assert prof["resistance"][2] == pytest.approx(rw.oracle_resistance(g, 0, g.vertex_at(k)), rel=1e-8)


def test_walk_and_kernels():
    g = rw.build_range_graph(rw.generate_trajectory(4, 300, 2))
    path = rw.simulate_walk(g, 0, 200, 5)
    assert len(path) == 201
    for a, b in zip(path, path[1:]):
        assert b in g.neighbors(a)
    exact = rw.exact_smoothed_kernel(g, 20)
    values, se = rw.heat_kernel_estimate(g, 20, [0], 20000, 1)
    assert abs(values[0] - exact[0]) < 5 * max(se[0], 1e-3)
    taus = rw.exit_times(g, [2, 4], 3)
    assert taus[0][1] <= taus[1][1]


def test_two_sided_y_bound_and_lambda():
    for s in range(50):
        a = rw.generate_trajectory(4, 64, 100 + s)
        b = rw.generate_trajectory(4, 64, 200 + s)
        assert 0 <= rw.two_sided_y(a, b, 64) <= 8
    est = rw.estimate_lambda(4, [1024], 30)
    assert 1.0 < est["value"] < 2.0
    assert est["lower"] <= est["value"] <= est["upper"]


def test_pipeline_and_verify(tmp_path):
    config = "n_grid = 2^10\nseeds = 3\nbootstrap_resamples = 50\n"
    m1 = rw.run_pipeline(config, str(tmp_path / "out"), str(tmp_path / "cache"))
    assert m1["ok"] and len(m1["files"]) >= 4
    first = (tmp_path / "out" / "report.json").read_bytes()
    m2 = rw.run_pipeline(config, str(tmp_path / "out"), str(tmp_path / "cache"))
    assert m2["cache_hits"] > 0
    assert (tmp_path / "out" / "report.json").read_bytes() == first
    v = rw.verify("verify_seeds = 1\nverify_horizon = 300\n")
    assert v["pass"]
    with pytest.raises(ValueError):
        rw.verify("nonsense = 1\n")
