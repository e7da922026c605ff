import numpy as np
import pytest

from bigconj import counterexamples as ce
from bigconj.errors import HypothesisFailed
from bigconj.fitzpatrick import FitzLinearClosed, FitzNormalCone, JFunction
from bigconj.grids import GridSpec
from bigconj.relations import LinearRelation
from bigconj.sets import Ball, Polytope, Segment, Singleton


def test_verdict_rule():
    v = ce.CounterexampleVerdict("x", [("h", True)], {}, 0.5, 0.1)
    assert v.verdict == "pass" and v.passed
    assert ce.CounterexampleVerdict("x", [("h", False)], {}, 0.5, 0.1).verdict == "fail"
    assert ce.CounterexampleVerdict("x", [("h", True)], {}, 0.1, 0.1).verdict == "fail"
    rec = ce.CounterexampleVerdict("x", [], {"v": np.inf}, np.inf, 0.0).to_dict()
    assert rec["computed_values"]["v"] == "inf" and rec["strict_inequality_margin"] == "inf"


def test_strict_inequality_suite_rotation_ball():
    v = ce.theorem43_suite(ce.rotation(2), Ball.unit(2), z=np.zeros(2), zstar=np.array([1.0, 0.0]))
    assert v.passed, v.to_dict()
    vals = v.computed_values
    assert vals["lhs_at_Az"] == 1.0 and vals["rhs_at_Az"] == 0.0
    assert abs(v.strict_inequality_margin - 1.0) <= 1e-9
    assert v.strict_inequality_margin > v.slack


@pytest.mark.parametrize("C", [Segment([-1.0, 0.0], [1.0, 0.0]),
                               Polytope([[1.0, 0.0], [-1.0, 1.0], [-1.0, -1.0]])])
def test_strict_inequality_suite_other_sets(C):
    v = ce.theorem43_suite(ce.rotation(2), C)
    assert v.passed, v.to_dict()


def test_strict_inequality_suite_non_skew_operator():
    A = LinearRelation.from_matrix(np.array([[1.0, -1.0], [1.0, 1.0]]))
    v = ce.theorem43_suite(A, Ball.unit(2), grid_n=9)
    assert v.passed, v.to_dict()
    assert v.computed_values["partial_inf_conv_backend"] == "grid"


def test_strict_inequality_suite_higher_dimension():
    v = ce.theorem43_suite(ce.rotation(4), Ball.unit(4))
    assert v.passed and any("skipped" in s for s in v.notes)


def test_strict_inequality_suite_gates():
    with pytest.raises(HypothesisFailed) as exc:
        ce.theorem43_suite(ce.rotation(2), Singleton([0.0, 0.0]))
    assert "C != {0}" in str(exc.value.predicate)
    with pytest.raises(HypothesisFailed):
        ce.theorem43_suite(ce.rotation(2), Ball.unit(2), j=JFunction(0.5))
    with pytest.raises(HypothesisFailed):
        ce.theorem43_suite(LinearRelation.from_matrix(-np.eye(2)), Ball.unit(2))


def test_rotation_refutation():
    v = ce.example44(zstar=[1.0, 0.0])
    vals = v.computed_values
    assert v.passed
    assert vals["lhs_at_0"] == 1.0 and vals["rhs_at_0"] == 0.0
    assert abs(v.strict_inequality_margin - 1.0) <= 1e-9
    assert vals["sampled_lhs_infinite"] == vals["sampled_xstar"] == 1000
    # independent grid reproduction of both sides
    h = GridSpec(vals["grid"]["R"], vals["grid"]["N"]).h
    assert abs(vals["grid_lhs_at_0"] - 1.0) <= 2 * h * 2
    assert abs(vals["grid_rhs_at_0"]) <= 2 * h * 2


@pytest.mark.parametrize("zstar", [[0.0, 2.0], [0.6, -0.8]])
def test_rotation_refutation_margin_is_norm(zstar):
    v = ce.example44(zstar=zstar)
    assert abs(v.strict_inequality_margin - np.linalg.norm(zstar)) <= 1e-9


@pytest.mark.parametrize("n", [2, 4, 8, 16])
def test_shift_gap_all_n(n):
    v = ce.example52_gap(n=n)
    vals = v.computed_values
    assert v.passed
    assert vals["lhs_at_0"] == 0.5 and vals["lhs_at_e2"] == np.inf
    assert abs(vals["rhs_t_scan"] - 0.125) <= 1e-8
    assert abs(vals["rhs_bruteforce"] - 0.125) <= 1e-8
    assert abs(vals["rhs_t_argmax"] - 0.5) <= 1e-12
    assert abs(v.strict_inequality_margin - 0.375) <= 1e-6


def test_shift_gap_rhs_oracle():
    t = np.linspace(0, 1, 10_001)
    assert abs(np.max(t / 2 - t * t / 2) - 0.125) <= 1e-8


def test_shift_gap_finite_section_diagnostics():
    fs = ce.example52_gap(n=8).computed_values["finite_section"]
    assert fs["graph_indicator_plus_pairing_at_(0,1)"] == np.inf
    assert np.isfinite(fs["fitzpatrick_S_at_(0,1)"])
    assert fs["gap_with_fitzpatrick_of_S"] == pytest.approx(0.0, abs=1e-12)


def test_shift_segment_resolvent():
    v = ce.example52_maximality(n=8, samples=200)
    named = v.computed_values["named"]
    assert v.passed
    assert abs(named["e1"]["t"] - 2 / 3) <= 1e-12 and named["-e1"]["t"] == 0 and named["0"]["t"] == 0


def test_rotation_implication():
    v = ce.implication43_check(samples=20_000)
    vals = v.computed_values
    assert v.passed and vals["violations"] == 0
    assert vals["seeded_premise_hits"] >= 100 and vals["x0_slice_hits"] == 0


def test_shift_implication():
    v = ce.implication52_check(n=4, samples=20_000, offaxis_points=21)
    vals = v.computed_values
    assert v.passed and vals["violations"] == 0 and vals["seeded_premise_hits"] >= 100
    assert vals["offaxis_scan"]["offaxis_hits"] == 0
    assert vals["boundary_y_2e1_gap"] == 0.0


def test_shift_implication_offaxis_scan_counts():
    scan = ce.implication52_offaxis_scan(n=3, points=11, t_points=5)
    assert scan["pairs"] == 11 ** 3 * 5 and scan["offaxis_hits"] == 0


def test_implication_detects_a_broken_bound():
    # j below the required slope must be flagged as a hypothesis failure, not hidden
    v = ce.implication52_check(n=3, j=JFunction(0.1), samples=5000, offaxis_points=11)
    assert not v.passed


def test_supporting_suites():
    for v in (ce.fact41_suite(m=2000, queries=300), ce.fact42_suite(queries=30), ce.fact33_suite(),
              ce.fact51_suite(ns=(2, 8, 32), samples=200)):
        assert v.passed, v.to_dict()


def test_identity_sweep_table_columns():
    v = ce.fact51_suite(ns=(2, 4), samples=50)
    header, rows = v.tables["fact51"]
    assert header[:2] == ["n", "max_abs_error"] and [r[0] for r in rows] == [2, 4]


def test_probe_probcon_reports_without_judging():
    A = ce.rotation(2)
    g = GridSpec(2.0, 9)
    v = ce.probe_probcon(FitzLinearClosed(A), FitzNormalCone(Ball.unit(2)), np.zeros(2),
                         np.array([1.0, 0.0]), g)
    assert v.verdict == "report" and v.passed
    assert v.computed_values["min_left"] == pytest.approx(1.0, abs=2 * g.h)
    assert v.computed_values["right"] == pytest.approx(0.0, abs=2 * g.h)
