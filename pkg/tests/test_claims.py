import json
import math
import zlib
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from meanaudit import claims as CL
from meanaudit.claims import PreconditionError, ProbeFunction, catalog, evaluate_arrays, evaluate_claim, get_claim, oracle_eval

ANCHORS = json.loads((Path(__file__).parent / "golden" / "anchors.json").read_text())
THEOREMS = [c for c in catalog() if c.id.startswith("T") and not c.id.startswith("TT")]


def test_catalog_has_twenty_sorted_claims():
    ids = [c.id for c in catalog()]
    assert len(ids) == 20 and ids == sorted(ids) and len(set(ids)) == 20
    assert {"T1.1", "T2.2", "T3.1", "TT-L", "TT-J", "C2.3", "L2.5"} <= set(ids)


def test_dependencies_exist():
    ids = {c.id for c in catalog()}
    for c in catalog():
        assert set(c.depends_on) <= ids


def test_statements_are_readable():
    assert get_claim("T2.2").statement() == "L(L_{p}(a,b), L_{q}(a,b)) ≥ L_{A(p,q)}(a,b)"
    assert "≤" in get_claim("T1.1").statement()
    with pytest.raises(KeyError):
        get_claim("T9.9")


@pytest.mark.parametrize("cid", sorted(ANCHORS["claim_anchors"]))
def test_anchor_margins_match_oracle_golden(cid):
    g = ANCHORS["claim_anchors"][cid]
    c = get_claim(cid)
    w = evaluate_claim(c, g["point"])
    assert abs(w.margin - float(g["margin"])) <= w.error_bound
    assert w.lhs_value == pytest.approx(float(g["lhs"]), rel=1e-13)
    assert w.rhs_value == pytest.approx(float(g["rhs"]), rel=1e-13)
    ext = oracle_eval(c, g["point"])
    assert ext.precision == "extended"
    assert ext.margin == pytest.approx(float(g["margin"]), rel=1e-15)
    assert ext.error_bound < 1e-25 * (abs(ext.lhs_value) + abs(ext.rhs_value))


def test_t22_sides_at_anchor():
    w = evaluate_claim(get_claim("T2.2"), {"a": 1, "b": math.e, "p": 1, "q": 3})
    assert w.lhs_value == pytest.approx(2.16983, rel=1e-3)
    assert w.rhs_value == pytest.approx(2.25616, rel=1e-3)
    assert w.margin < -w.error_bound


def test_t31_sides_at_anchor():
    w = evaluate_claim(get_claim("T3.1"), {"a": 4, "b": 2, "p": 1, "omega": 1, "nu": 3})
    assert w.lhs_value == pytest.approx(2.74244, rel=1e-3)
    assert w.rhs_value == pytest.approx(2.70910, rel=1e-3)


def test_sign_stable_between_working_and_extended():
    pt = {"a": 1, "b": math.e, "p": 1, "q": 3}
    w, ext = evaluate_claim(get_claim("T1.1"), pt), oracle_eval(get_claim("T1.1"), pt)
    assert w.is_decisive() and ext.is_decisive() and np.sign(w.margin) == np.sign(ext.margin) == -1


def test_preconditions():
    with pytest.raises(PreconditionError):
        evaluate_claim(get_claim("T1.1"), {"a": 1, "b": 2, "p": 1, "q": -1})  # mixed signs
    with pytest.raises(PreconditionError):
        evaluate_claim(get_claim("T2.1"), {"a": 2, "b": 1, "p": 1, "q": 2})  # needs b >= a
    with pytest.raises(PreconditionError):
        evaluate_claim(get_claim("T1.1"), {"a": 1, "b": 2, "p": 1})
    with pytest.raises(PreconditionError):
        evaluate_claim(get_claim("T1.1"), {"a": -1, "b": 2, "p": 1, "q": 2})


def _random_points(claim, n, rng):
    pts = []
    while len(pts) < n:
        pt = {"a": float(np.exp(rng.uniform(0, 2))), "b": 0.0}
        pt["b"] = pt["a"] * float(np.exp(rng.uniform(-2.5, 2.5)))
        for v in ("p", "q"):
            pt[v] = float(rng.uniform(-4, 4))
        for v in ("omega", "nu"):
            pt[v] = float(np.exp(rng.uniform(-2, 2)))
        pt = {k: pt[k] for k in claim.variables}
        arr = {k: np.array([v]) for k, v in pt.items()}
        if claim.hypothesis(arr)[0]:
            pts.append(pt)
    return pts


@pytest.mark.parametrize("cid", [c.id for c in catalog()])
def test_error_bound_soundness(cid):
    c = get_claim(cid)
    rng = np.random.default_rng(zlib.crc32(cid.encode()))
    for pt in _random_points(c, 15, rng):
        w = evaluate_claim(c, pt)
        ext = oracle_eval(c, pt)
        assert abs(w.margin - ext.margin) <= w.error_bound + ext.error_bound, (cid, pt)


@pytest.mark.parametrize("claim", THEOREMS, ids=lambda c: c.id)
def test_diagonal_in_orders_gives_zero_margin(claim):
    rng = np.random.default_rng(1)
    for pt in _random_points(claim, 40, rng):
        if "q" in pt:
            pt["q"] = pt["p"]
        else:
            pt["nu"] = pt["omega"]
        w = evaluate_claim(claim, pt)
        assert abs(w.margin) <= w.error_bound


@pytest.mark.parametrize("claim", THEOREMS, ids=lambda c: c.id)
def test_margin_scales_with_pair(claim):
    rng = np.random.default_rng(2)
    for pt in _random_points(claim, 20, rng):
        arr = {k: np.array([v]) for k, v in pt.items()}
        m, e, l, r = evaluate_arrays(claim, arr)
        for t in (0.5, 2.0, 10.0):
            s = dict(arr, a=arr["a"] * t, b=arr["b"] * t)
            ms, _, _, _ = evaluate_arrays(claim, s)
            assert abs(ms[0] - t * m[0]) <= 1e-12 * t * (abs(l[0]) + abs(r[0]))


def test_scalar_and_vector_evaluation_agree():
    c = get_claim("T2.3")
    pts = _random_points(c, 10, np.random.default_rng(4))
    arr = {k: np.array([p[k] for p in pts]) for k in c.variables}
    m, e, _, _ = evaluate_arrays(c, arr)
    for i, pt in enumerate(pts):
        assert evaluate_claim(c, pt).margin == m[i]


def test_decision_threshold_floor():
    thr = CL.decision_threshold(np.array([0.0]), np.array([2.0]), np.array([3.0]))
    assert thr[0] == pytest.approx(6e-12)


@given(st.floats(0.1, 5), st.floats(0.1, 5))
@settings(max_examples=100, deadline=None)
def test_probe_functions_working_vs_extended(x, c):
    for f in [ProbeFunction("identity"), ProbeFunction("exp"), ProbeFunction("log"), ProbeFunction("power", c=c), ProbeFunction("lehmer_curve"), ProbeFunction("weighted_curve", p=1.5)]:
        v, err = f.working(np.array([x]))
        ref = float(f.extended(CL.O.mp(x)))
        assert abs(v[0] - ref) <= err[0] + 1e-300


def test_lemma_claims_at_simple_points():
    # power mean: increasing and log-concave for p > 0
    assert evaluate_claim(get_claim("L2.4a"), {"a": 1, "b": math.e, "p": 1}).margin > 0
    # Lehmer lemma asks for log-convexity; the curve is log-concave at p = 2
    assert evaluate_claim(get_claim("L2.5"), {"a": 1, "b": math.e, "p": 2}).margin < 0
    assert evaluate_claim(get_claim("L2.6a"), {"a": 2, "b": 4, "p": 1, "omega": 1}).margin < 0
    assert evaluate_claim(get_claim("L2.3a"), {"a": 1, "b": math.e, "p": 2}).margin > 0
    assert evaluate_claim(get_claim("L2.3b"), {"a": 1, "b": math.e, "p": -2}).margin > 0
