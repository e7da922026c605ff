"""Acceptance criteria, one test each, with a PASS/FAIL line per criterion."""

import json
import time

import numpy as np

from bigconj import cli
from bigconj import counterexamples as ce
from bigconj.functions import (Indicator, Norm, Quadratic, biconjugate_check, legendre_1d,
                               legendre_1d_brute)
from bigconj.sets import Box
from bigconj.shift import build

NS = (2, 4, 8, 16, 32, 64, 128)


def _verify(tmp_path, *args):
    out = tmp_path / "report.json"
    t0 = time.perf_counter()
    code = cli.main(["verify", *args, "--out", str(out)])
    elapsed = time.perf_counter() - t0
    return code, json.loads(out.read_text())[0], elapsed


def test_criterion_01_shift_gap(tmp_path, acceptance):
    code, rep, dt = _verify(tmp_path, "ex52-gap", "--n", "8")
    v = rep["computed_values"]
    ok = (code == 0 and v["lhs_at_0"] == 0.5 and abs(v["rhs_t_scan"] - 0.125) <= 1e-6
          and abs(v["rhs_bruteforce"] - 0.125) <= 1e-6
          and abs(rep["strict_inequality_margin"] - 0.375) <= 1e-6 and dt < 5.0)
    acceptance(1, ok, f"LHS={v['lhs_at_0']} RHS={v['rhs_t_scan']} "
                      f"margin={rep['strict_inequality_margin']} t={dt:.2f}s")
    assert ok


def test_criterion_02_rotation_refutation(tmp_path, acceptance):
    code, rep, dt = _verify(tmp_path, "ex44")
    v = rep["computed_values"]
    ok = (code == 0 and v["zstar"] == [1.0, 0.0]
          and abs(rep["strict_inequality_margin"] - 1.0) <= 1e-9
          and v["sampled_xstar"] == 1000 and v["sampled_lhs_infinite"] == 1000 and dt < 2.0)
    acceptance(2, ok, f"margin={rep['strict_inequality_margin']} "
                      f"inf LHS={v['sampled_lhs_infinite']}/1000 t={dt:.2f}s")
    assert ok


def test_criterion_03_pairing_identity(acceptance):
    rng = np.random.default_rng(3)
    t0 = time.perf_counter()
    worst = 0.0
    for n in NS:
        rel, _, _ = ce._pairing_identity_errors(build(n), rng.normal(size=(1000, n)))
        worst = max(worst, rel)
    dt = time.perf_counter() - t0
    ok = worst <= 1e-12 and dt < 2.0
    acceptance(3, ok, f"max relative error {worst:.2e} t={dt:.2f}s")
    assert ok


def test_criterion_04_skew_on_hyperplane(acceptance):
    rng = np.random.default_rng(4)
    worst = -np.inf
    for n in NS:
        ts = build(n)
        X = rng.normal(size=(1000, n))
        X -= X.mean(axis=1, keepdims=True)
        worst = max(worst, float(np.max(np.einsum("ij,ij->i", X @ ts.T.T, X))))
    ok = worst <= 1e-12
    acceptance(4, ok, f"max <Tx,x> = {worst:.2e}")
    assert ok


def test_criterion_05_adjoint_agreement(acceptance):
    dists = [build(n).adjoint_agreement()["subspace_distance"] for n in (2, 4, 8, 16)]
    ok = max(dists) <= 1e-10
    acceptance(5, ok, f"max subspace distance {max(dists):.2e}")
    assert ok


def test_criterion_06_sampled_normal_cone(acceptance):
    v = ce.fact41_suite(m=10_000, queries=1000)
    vals = v.computed_values
    ok = vals["error_m"] <= 1e-2 and 1.8 <= vals["halving_ratio"] <= 2.2 and v.passed
    acceptance(6, ok, f"error {vals['error_m']:.2e}, ratio {vals['halving_ratio']:.3f}")
    assert ok


def test_criterion_07_graph_conjugate(acceptance):
    v = ce.fact42_suite(grid_n=33, box_radius=2.0, queries=100)
    vals = v.computed_values
    ok = (vals["on_graph_max_error"] <= 2 * vals["h"] and vals["off_graph_min_raw_sup"] > 1e6
          and v.passed)
    acceptance(7, ok, f"on-graph error {vals['on_graph_max_error']:.3g} <= 2h={2 * vals['h']:.3g}, "
                      f"off-graph min sup {vals['off_graph_min_raw_sup']:.3g}")
    assert ok


def test_criterion_08_partial_inf_conv_formula(acceptance):
    v = ce.fact33_suite(grid_n=17, box_radius=2.0)
    vals = v.computed_values
    ok = len(vals["queries"]) == 9 and vals["max_gap"] <= 2 * vals["h"] and v.passed
    acceptance(8, ok, f"max gap {vals['max_gap']:.3g} <= 2h={2 * vals['h']:.3g}")
    assert ok


def _random_convex(rng, x):
    slopes = np.sort(rng.normal(scale=rng.uniform(0.1, 10), size=len(x) - 1))
    f = np.concatenate([[0.0], np.cumsum(slopes * np.diff(x))]) + rng.normal()
    k = rng.integers(0, 3)
    if k == 1:
        f[: rng.integers(1, len(x) // 3)] = np.inf
    elif k == 2:
        f[len(x) - rng.integers(1, len(x) // 3):] = np.inf
    return f


def test_criterion_09_conjugation_engine(acceptance):
    rng = np.random.default_rng(9)
    N = 1025
    x = np.linspace(-2.0, 2.0, N)
    mismatches = 0
    for _ in range(100):
        f = _random_convex(rng, x)
        y = np.linspace(-rng.uniform(1, 20), rng.uniform(1, 20), N)
        if not np.array_equal(legendre_1d(x, f, y), legendre_1d_brute(x, f, y)):
            mismatches += 1
    fixtures = {"abs": Norm(1), "half_sq": Quadratic(np.eye(1)),
                "unit_interval": Indicator(Box([0.0], [1.0]))}
    gaps = {k: biconjugate_check(f, 2.0, N) for k, f in fixtures.items()}
    bic_ok = all(r.gap <= 2 * r.h for r in gaps.values())
    ok = mismatches == 0 and bic_ok
    acceptance(9, ok, f"{mismatches}/100 mismatches; biconjugate gaps "
                      + ", ".join(f"{k}={r.gap:.2e}" for k, r in gaps.items())
                      + f" (2h={2 * next(iter(gaps.values())).h:.2e})")
    assert ok


def test_criterion_10_implications(acceptance):
    t0 = time.perf_counter()
    v43 = ce.implication43_check(samples=100_000, seeded=200)
    v52 = ce.implication52_check(n=8, samples=100_000, seeded=200)
    dt = time.perf_counter() - t0
    a, b = v43.computed_values, v52.computed_values
    ok = all(c["sampled_pairs"] >= 100_000 and c["violations"] == 0 and c["seeded_premise_hits"] >= 100
             for c in (a, b)) and dt < 30.0
    acceptance(10, ok, f"violations {a['violations']}/{b['violations']}, seeded hits "
                       f"{a['seeded_premise_hits']}/{b['seeded_premise_hits']}, t={dt:.2f}s")
    assert ok


def test_criterion_11_maximality(acceptance):
    v = ce.example52_maximality(n=8, samples=1000)
    vals = v.computed_values
    ok = vals["samples"] == 1000 and vals["max_residual"] <= 1e-8 and v.passed
    acceptance(11, ok, f"max residual {vals['max_residual']:.2e} over 1000 z")
    assert ok
