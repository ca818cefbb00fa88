"""End-to-end smoke tests for the python bindings.

These stay deliberately light: the heavy property testing lives in the C++
suites, and here we only confirm the bindings expose working, deterministic
entry points.
"""

import json
import math

import numpy as np
import pytest

import _gcvx


def test_manifold_roundtrip():
    m = _gcvx.manifold("hyperbolic", 5)
    x = m.base_point()
    rng = np.random.default_rng(0)
    for _ in range(20):
        v = rng.normal(size=6)
        v[0] = 0.0  # tangent at the basepoint has zero time component
        y = m.exp(x, v)
        assert m.dist(x, y) == pytest.approx(np.linalg.norm(v), abs=1e-10)
        back = m.log(x, y)
        assert np.allclose(back, v, atol=1e-9)


def test_spd_distance_identity_to_scaled_identity():
    m = _gcvx.manifold("spd", 3)
    eye = np.eye(3).ravel()
    scaled = (math.e * np.eye(3)).ravel()
    assert m.dist(eye, scaled) == pytest.approx(math.sqrt(3.0), abs=1e-10)


def test_zeta_delta_values():
    assert _gcvx.zeta(1.0, -1.0) == pytest.approx(1.0 / math.tanh(1.0), abs=1e-14)
    assert _gcvx.zeta(0.7, 0.0) == 1.0
    a = math.pi / 4
    assert _gcvx.delta(a, 1.0) == pytest.approx(a / math.tan(a), abs=1e-14)


def test_delta_pole_rejection():
    with pytest.raises(RuntimeError):
        _gcvx.delta(math.pi, 1.0)


def test_geodesic_average_euclidean_is_mean():
    m = _gcvx.manifold("euclidean", 3)
    pts = [np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0]), np.array([0.0, 0.0, 1.0])]
    avg = _gcvx.geodesic_average(m, pts)
    assert np.allclose(avg, np.full(3, 1.0 / 3.0), atol=1e-14)


def test_run_karcher_converges_and_is_deterministic():
    kwargs = dict(manifold="hyperbolic", dim=8, centers=15, radius=0.8, seed=11,
                  algo="rgd-l", max_iters=200)
    a = _gcvx.run_karcher(**kwargs)
    b = _gcvx.run_karcher(**kwargs)
    assert a["reached_tol"]
    assert a["f_gap"][-1] <= 1e-8
    assert np.array_equal(a["f_gap"], b["f_gap"])
    assert np.array_equal(a["oracle_calls"], b["oracle_calls"])
    meta = json.loads(a["metadata_json"])
    assert meta["config"]["algo"] == "rgd-l"
    assert meta["eta"] > 0
    assert not meta["diverged"]


def test_run_karcher_rejects_bad_algo():
    with pytest.raises(RuntimeError, match="ConfigInvalid"):
        _gcvx.run_karcher(algo="newton", dim=3, centers=4, max_iters=5)


def test_run_minmax_gap_decreases():
    res = _gcvx.run_minmax(manifold="hyperbolic", dim=2, radius=0.6, seed=3, max_iters=40,
                           tol=1e-7)
    gaps = res["f_gap"]
    assert gaps[-1] < gaps[0]
    assert res["reached_tol"]


def test_verify_suite_passes():
    reports = _gcvx.run_suite("geometry", seed=0, samples=50)
    assert len(reports) >= 5
    for r in reports:
        assert r["passed"], f"{r['name']} violated: {r['max_violation']} > {r['tolerance']}"


def test_csv_matches_cli_format():
    text = _gcvx.format_rows_csv("euclidean", 4, 1.5, 6, 1.0, 0, "rgd-l", 50, 1e-8)
    lines = text.strip().split("\n")
    assert lines[0] == "iter,f_gap,dist_sq,grad_norm,oracle_calls,wall_ns"
    assert lines[1].startswith("0,")
