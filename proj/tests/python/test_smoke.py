import math
import os
import subprocess
import sys

import numpy as np
import pytest

import hsevo

FIXTURES = os.path.join(os.path.dirname(__file__), "..", "fixtures")
STUB = os.path.join(os.path.dirname(__file__), "..", "support", "stub_sandbox.py")


def test_entropy_and_swdi():
    assert hsevo.entropy([2, 1, 1]) == pytest.approx(1.0397207708, abs=1e-9)
    pts = np.array([[1.0, 0.0], [0.99, 0.1], [0.0, 1.0]])
    assert hsevo.cluster(pts, 0.95) == [[0, 1], [2]]
    assert hsevo.swdi(pts, 0.95) == pytest.approx(hsevo.entropy([2, 1]))


def test_mst_and_cdi():
    pts = np.array([[0.0], [1.0], [2.0], [4.0]])
    edges, total = hsevo.mst(pts)
    assert sorted(e[2] for e in edges) == [1.0, 1.0, 2.0]
    assert total == 4.0
    assert hsevo.cdi(pts) == pytest.approx(1.5 * math.log(2))
    with pytest.raises(hsevo.InsufficientArchiveError):
        hsevo.mst(pts[:1])


def test_cosine_zero_vector_raises():
    with pytest.raises(hsevo.UndefinedSimilarityError):
        hsevo.cosine_similarity([0.0, 0.0], [1.0, 0.0])


def test_embedding_ignores_comments_and_layout():
    a = hsevo.embed("def f(x):\n    return x + 1  # one\n")
    b = hsevo.embed("def f(x):\n\n    return x+1\n")
    assert a.shape == (256,)
    assert np.allclose(a, b)
    assert np.linalg.norm(a) == pytest.approx(1.0)


def test_extraction():
    assert hsevo.extract_code("```python\ndef f():\n  return 1\n```") == "def f():\n  return 1"
    text = "```python\ndef g(a=0.5):\n    return a\n```\n```python\nparameter_ranges = {'a': (0, 1)}\n```"
    program, ranges = hsevo.extract_code_and_ranges(text)
    assert "def g" in program
    assert ranges == [("a", 0.0, 1.0)]
    with pytest.raises(hsevo.ExtractionError):
        hsevo.extract_code("no code here")


def test_harmony_search_quadratic():
    res = hsevo.harmony_search([("x", 0.0, 1.0)], lambda v: (v[0] - 0.3) ** 2, max_iterations=100, seed=1)
    assert abs(res["values"][0] - 0.3) <= 0.05
    assert res["history"] == sorted(res["history"], reverse=True)
    none = hsevo.harmony_search([("x", 0.0, 1.0)], lambda v: None)
    assert none["values"] is None and none["invalid"] == none["evaluations"]


def test_bpo_packing_with_python_priority():
    items = hsevo.gen_bpo(0, 200)
    assert len(items) == 200
    res = hsevo.pack_online(items, 100.0, lambda item, caps: -np.log(item / np.asarray(caps)))
    assert max(res["loads"]) <= 100.0 + 1e-9
    assert -1.0 <= res["score"] < 0.0
    assert len(res["loads"]) >= hsevo.mt_lower_bound(items, 100.0)
    assert hsevo.bpo_seed_priority(50.0, [100.0, 60.0]) == pytest.approx([0.6931, 0.1823], abs=1e-4)


def test_tsp_gls_matches_exact_on_small_instance():
    coords = hsevo.gen_tsp(3, 8)
    tour, length = hsevo.exact_tsp(coords)
    calls = []

    def guide(d, t, used):
        calls.append(1)
        return hsevo.tsp_seed_update(d, t, used)

    gtour, glength, n = hsevo.gls_solve(coords, guide, iterations=50)
    assert sorted(gtour) == list(range(8))
    assert glength >= length - 1e-9
    assert n == len(calls) > 0


def test_op_aco_feasible():
    coords, prizes = hsevo.gen_op(0, 6)
    d = np.linalg.norm(coords[:, None, :] - coords[None, :, :], axis=-1)
    eta = hsevo.op_seed_heuristic(prizes, d, 3.0)
    res = hsevo.aco_solve(coords, prizes, 3.0, eta, seed=0)
    opt = hsevo.exact_op(coords, prizes, 3.0)
    assert res["all_feasible"] and res["length"] <= 3.0 + 1e-9
    assert 0.8 * opt["prize"] <= res["prize"] <= opt["prize"] + 1e-12


def test_cli_mock_run_and_analyze(tmp_path):
    out = tmp_path / "run"
    code, _, err = hsevo.cli([
        "run", "--config", os.path.join(FIXTURES, "e2e_bpo.json"),
        "--mock-dir", os.path.join(FIXTURES, "mock_bpo"),
        "--sandbox-cmd", f"{sys.executable} {STUB}",
        "--output", str(out),
    ])
    assert code == 0, err
    assert (out / "summary.json").exists()
    code, _, err = hsevo.cli(["analyze", str(out)])
    assert code == 0, err


def test_cli_config_error():
    code, _, err = hsevo.cli(["run", "--problem", "bpo", "--mock-dir", "/nonexistent/dir"])
    assert code == 2
    assert err
