"""Acceptance criteria, one function each.

Every ``criterion_N`` returns ``(ok, detail)``. The pytest wrappers record
a PASS/FAIL line per criterion (printed in the terminal summary by
conftest.py) and then assert. Running this file directly prints the same
lines without pytest:

    python3 tests/test_acceptance.py
"""

from __future__ import annotations

import functools
import io
import json
import math
import os
import subprocess
import sys
import time
import zlib
from pathlib import Path

import numpy as np
import pytest

from meanaudit import Alzer, Classical, Lehmer, PositivePair, Power, WeightedPower, evaluate, evaluate_many
from meanaudit import curves as C
from meanaudit import oracle as O
from meanaudit.audit import default_sampling
from meanaudit.claims import catalog, evaluate_arrays
from meanaudit.cli import run

GOLDEN = Path(__file__).parent / "golden"
ANCHORS = json.loads((GOLDEN / "anchors.json").read_text())
AUDIT_ARGS = ["claims-audit", "--seed", "42", "--format", "json"]
THEOREMS = [c for c in catalog() if c.id.startswith("T") and not c.id.startswith("TT")]


def rng_for(name):
    return np.random.default_rng(zlib.crc32(name.encode()))


def random_pairs(rng, n, lo=1e-3, hi=1e3):
    a = np.exp(rng.uniform(math.log(lo), math.log(hi), n))
    b = np.exp(rng.uniform(math.log(lo), math.log(hi), n))
    return a, b


@functools.lru_cache(maxsize=None)
def default_audit_run():
    out = io.StringIO()
    start = time.perf_counter()
    code = run(AUDIT_ARGS, stdout=out)
    return code, out.getvalue(), time.perf_counter() - start


# ---------------------------------------------------------------- 1


def criterion_1():
    """Identity suite over 10^4 pairs, 1e-13 relative, under 1 s."""
    a, b = random_pairs(rng_for("identities"), 10_000)
    start = time.perf_counter()
    arith, _, _ = evaluate_many(Classical("arithmetic"), a, b)
    geo, _, _ = evaluate_many(Classical("geometric"), a, b)
    harm, _, _ = evaluate_many(Classical("harmonic"), a, b)
    pairs = [
        (evaluate_many(Power(1.0), a, b)[0], arith, "M_1 = A"),
        (evaluate_many(Power(0.0), a, b)[0], geo, "M_0 = G"),
        (evaluate_many(Power(-1.0), a, b)[0], harm, "M_-1 = H"),
        (evaluate_many(Lehmer(1.0), a, b)[0], arith, "Lehmer_1 = A"),
        (evaluate_many(Lehmer(0.5), a, b)[0], geo, "Lehmer_1/2 = G"),
    ]
    for p in (0.25, 0.5, 1.0, 2.0, 7.0):  # the weighted family is defined for p > 0
        pairs.append((evaluate_many(WeightedPower(p, 1.0), a, b)[0], evaluate_many(Power(p), a, b)[0], f"W({p},1) = M_{p}"))
    elapsed = time.perf_counter() - start
    # reference values straight from the textbook formulas
    refs = {"A": (a + b) / 2, "G": np.sqrt(a * b), "H": 2 * a * b / (a + b)}
    ref_err = max(np.max(np.abs(arith / refs["A"] - 1)), np.max(np.abs(geo / refs["G"] - 1)), np.max(np.abs(harm / refs["H"] - 1)))
    worst = max(float(np.max(np.abs(x / y - 1))) for x, y, _ in pairs)
    ok = worst <= 1e-13 and ref_err <= 1e-13 and elapsed < 1.0
    return ok, f"max rel dev {worst:.2e} (classical vs formula {ref_err:.2e}), {elapsed:.3f} s"


# ---------------------------------------------------------------- 2


def _oracle_value(spec, a, b):
    ma, mb = O.mp(a), O.mp(b)
    if isinstance(spec, Classical):
        return O.L(ma, mb) if spec.kind == "logarithmic" else O.I(ma, mb)
    if isinstance(spec, Power):
        return O.power(O.mp(spec.p), ma, mb)
    return O.alzer(O.mp(spec.p), ma, mb, spec.variant)


def criterion_2():
    """Stable paths against the oracle over |log(b/a)| in [1e-12, 10]."""
    gaps = np.logspace(-12, 1, 1000)
    rng = rng_for("stability")
    specs = [Classical("logarithmic"), Classical("identric")]
    specs += [Power(p) for p in (-4.0, -1.0, -0.25, 0.25, 1.0, 2.0, 5.0)]
    specs += [Alzer(p, v) for p in (-3.0, -0.5, 0.5, 1.0, 3.0) for v in ("paper", "normalized")]
    worst, where, n = 0.0, None, 0
    for i, g in enumerate(gaps):
        a = float(np.exp(rng.uniform(-3, 3)))
        sign = 1.0 if i % 2 == 0 else -1.0
        b = a * math.exp(sign * g)
        if b == a:
            continue
        for spec in specs:
            got = evaluate(spec, (a, b)).value
            truth = _oracle_value(spec, a, b)
            r = abs(float((O.mp(got) - truth) / truth))
            n += 1
            if r > worst:
                worst, where = r, (type(spec).__name__, getattr(spec, "p", getattr(spec, "kind", None)), float(g))
    return worst <= 1e-12, f"{n} evaluations, max rel err {worst:.2e} at {where}"


# ---------------------------------------------------------------- 3


def criterion_3():
    """H < G < L < I < A with every gap above the error bounds."""
    a, b = random_pairs(rng_for("chain"), 10_000)
    keep = a != b
    a, b = a[keep], b[keep]
    logs = []
    for kind in ("harmonic", "geometric", "logarithmic", "identric", "arithmetic"):
        _, lv, err = evaluate_many(Classical(kind), a, b)
        logs.append((lv, err))
    ratios = []
    ok = True
    for (lo, elo), (hi, ehi) in zip(logs, logs[1:]):
        gap = hi - lo
        ok &= bool(np.all(gap > elo + ehi))
        ratios.append(float(np.min(gap / (elo + ehi))))
    return ok, f"{a.size} pairs, smallest gap / error bound per link {[f'{r:.1e}' for r in ratios]}"


# ---------------------------------------------------------------- 4


def _fd_samples(family, rng, n):
    out = []
    while len(out) < n:
        a = float(np.exp(rng.uniform(-3, 3)))
        b = a * float(np.exp(rng.uniform(-4, 4)))
        p = None
        if family == "weighted":
            p = float(rng.uniform(0.1, 5))
            t = float(np.exp(rng.uniform(-2.5, 2.5)))
        else:
            t = float(rng.uniform(-5, 5))
            if abs(t) < 0.05 or (family == "alzer" and abs(t + 1) < 0.05):
                continue
        out.append((C.ParamCurve(family, PositivePair(a, b), p), t))
    return out


def criterion_4():
    """Closed forms against central differences, 500 samples per family."""
    lines, ok = [], True
    for family in ("power", "lehmer", "alzer", "weighted"):
        worst, fails, count = 0.0, 0, 0
        for curve, t in _fd_samples(family, rng_for("fd-" + family), 500):
            for order in (1, 2):
                r = C.fd_check(curve, t, order)
                count += 1
                if not r.agrees():
                    fails += 1
                if r.rel_err <= 1e-6:
                    worst = max(worst, r.rel_err)
        ok &= fails == 0
        lines.append(f"{family}: {count} checks, {fails} fail, max rel {worst:.1e}")
    return ok, "; ".join(lines)


# ---------------------------------------------------------------- 5


def criterion_5():
    """Known-true monotonicity on the default grid plus 10^4 random points."""
    s = default_sampling()
    av, ratios, pv = s["a"].values(), s["ratio"].values(), s["p"].values()
    wv = s["omega"].values()
    A, R, P = np.meshgrid(av, ratios, pv, indexing="ij")
    a_grid, b_grid, p_grid = A.ravel(), (A * R).ravel(), P.ravel()
    rng = rng_for("monotone")
    a_r, b_r = random_pairs(rng, 10_000)
    p_r = rng.uniform(-6, 6, 10_000)
    a_all, b_all, t_all = np.concatenate([a_grid, a_r]), np.concatenate([b_grid, b_r]), np.concatenate([p_grid, p_r])
    bad = {}
    for family in ("power", "lehmer"):
        d1, err = C.dlog_arrays(family, a_all, b_all, t_all, 1)
        bad[family] = int(np.sum(~(d1 > 0) & (a_all != b_all)) + np.sum((d1 != 0) & (a_all == b_all)))
    # weighted: grid over (a, ratio, p > 0, omega) plus random points
    pos = pv[pv > 0]
    A, R, P, W = np.meshgrid(av, ratios, pos, wv, indexing="ij")
    a_w = np.concatenate([A.ravel(), a_r])
    b_w = np.concatenate([(A * R).ravel(), b_r])
    p_w = np.concatenate([P.ravel(), rng.uniform(0.05, 6, 10_000)])
    w_w = np.concatenate([W.ravel(), np.exp(rng.uniform(-3, 3, 10_000))])
    d1, _ = C.dlog_arrays("weighted", a_w, b_w, w_w, 1, p=p_w)
    bad["weighted"] = int(np.sum(np.sign(d1) != np.sign(b_w - a_w)))
    n = a_all.size
    return sum(bad.values()) == 0, f"violations {bad} over {n} (power, lehmer) and {a_w.size} (weighted) points"


# ---------------------------------------------------------------- 6


def criterion_6():
    """Golden verdict table for claims-audit --seed 42."""
    code, out, _ = default_audit_run()
    report = json.loads(out)
    golden = json.loads((GOLDEN / "audit_seed42.json").read_text())
    got = {v["id"]: v for v in report["verdicts"]}
    want = {v["id"]: v for v in golden["verdicts"]}
    problems = []
    if code != 2:
        problems.append(f"exit code {code}")
    if sorted(got) != sorted(want) or len(got) != 20:
        problems.append("claim ids differ from the golden table")
    for cid, g in want.items():
        v = got.get(cid)
        if v is None:
            continue
        if v["status"] != g["status"]:
            problems.append(f"{cid} status {v['status']} != {g['status']}")
        if g["margin"] is not None and abs(v["margin"] - g["margin"]) > 1e-3 * abs(g["margin"]):
            problems.append(f"{cid} margin {v['margin']} vs golden {g['margin']}")

    def near(x, y):
        return abs(x - y) <= 1e-3 * abs(y)

    e = math.e
    t11 = got["T1.1"]
    if t11["status"] != "violated" or t11["witness"] != {"a": 1.0, "b": e, "p": 1.0, "q": 3.0, "omega": None, "nu": None}:
        problems.append("T1.1 witness not at (1, e, 1, 3)")
    if not near(t11["margin"], float(ANCHORS["claim_anchors"]["T1.1"]["margin"])):
        problems.append("T1.1 margin off the oracle anchor")
    t22 = got["T2.2"]
    if t22["status"] != "violated" or not (near(t22["lhs"], 2.16983) and near(t22["rhs"], 2.25616)):
        problems.append(f"T2.2 sides {t22['lhs']}, {t22['rhs']}")
    t31 = got["T3.1"]
    if t31["status"] != "violated" or not (near(t31["lhs"], 2.74244) and near(t31["rhs"], 2.70910)):
        problems.append(f"T3.1 sides {t31['lhs']}, {t31['rhs']}")
    if t31["witness"] != {"a": 4.0, "b": 2.0, "p": 1.0, "q": None, "omega": 1.0, "nu": 3.0}:
        problems.append("T3.1 witness not at (4, 2, 1, 1, 3)")
    lehmer3 = C.three_term("lehmer", (1, e), 2.0)
    alzer3 = C.three_term("alzer", (1, 2), 2.0)
    if not near(lehmer3, 0.41739):
        problems.append(f"Lehmer three-term {lehmer3}")
    if not near(alzer3, -4.8929):
        problems.append(f"Alzer three-term {alzer3}")
    desk = abs(t11["margin"] / -4.7e-3 - 1)
    detail = (
        f"20 statuses match golden; T1.1 margin {t11['margin']:.6e} (oracle golden; desk -4.7e-3 is {desk:.0%} off, see ledger); "
        f"T2.2 {t22['lhs']:.5f} < {t22['rhs']:.5f}; T3.1 {t31['lhs']:.5f} > {t31['rhs']:.5f}; "
        f"three-term Lehmer {lehmer3:+.5f}, Alzer {alzer3:+.4f}"
    )
    if problems:
        detail = "; ".join(problems)
    return not problems, detail


# ---------------------------------------------------------------- 7


def _theorem_points(claim, rng, n):
    pts = {k: [] for k in claim.variables}
    count = 0
    while count < n:
        pt = {"a": float(np.exp(rng.uniform(-2, 3))), "p": float(rng.uniform(-5, 5)), "q": float(rng.uniform(-5, 5))}
        pt["b"] = pt["a"] * float(np.exp(rng.uniform(-3, 3)))
        pt["omega"], pt["nu"] = (float(np.exp(rng.uniform(-2.3, 2.3))) for _ in range(2))
        arr = {k: np.array([pt[k]]) for k in claim.variables}
        if claim.hypothesis(arr)[0]:
            for k in claim.variables:
                pts[k].append(pt[k])
            count += 1
    return {k: np.array(v) for k, v in pts.items()}


def criterion_7():
    """Margins scale linearly with the pair, 100 points per theorem."""
    worst, fails = 0.0, 0
    for claim in THEOREMS:
        arr = _theorem_points(claim, rng_for("scale-" + claim.id), 100)
        m, _, lhs, rhs = evaluate_arrays(claim, arr)
        for t in (0.5, 2.0, 10.0):
            scaled = dict(arr, a=arr["a"] * t, b=arr["b"] * t)
            mt, _, _, _ = evaluate_arrays(claim, scaled)
            rel = np.abs(mt - t * m) / (t * (np.abs(lhs) + np.abs(rhs)))
            worst = max(worst, float(np.max(rel)))
            fails += int(np.sum(rel > 1e-12))
    return fails == 0, f"{len(THEOREMS)} theorems x 100 points x 3 factors, max rel dev {worst:.2e}"


# ---------------------------------------------------------------- 8


def _subprocess_audit(threads):
    env = dict(os.environ, OMP_NUM_THREADS=str(threads), OPENBLAS_NUM_THREADS=str(threads), MKL_NUM_THREADS=str(threads))
    r = subprocess.run([sys.executable, "-m", "meanaudit", *AUDIT_ARGS], capture_output=True, env=env, check=False)
    return r.returncode, r.stdout


def criterion_8():
    """Byte-identical audit reports across runs and thread settings."""
    _, first, _ = default_audit_run()
    second = io.StringIO()
    run(AUDIT_ARGS, stdout=second)
    outputs = [first.encode(), second.getvalue().encode()]
    for threads in (1, 4):
        code, raw = _subprocess_audit(threads)
        outputs.append(raw)
    same = all(o == outputs[0] for o in outputs)
    return same, f"{len(outputs)} runs (2 in-process, 2 subprocesses with 1 and 4 BLAS threads), {len(outputs[0])} bytes each, identical={same}"


# ---------------------------------------------------------------- 9


def criterion_9():
    """Full default audit under 60 s."""
    default_audit_run.cache_clear()
    code, out, elapsed = default_audit_run()
    n = sum(v["samples_evaluated"] for v in json.loads(out)["verdicts"])
    return elapsed < 60.0, f"{elapsed:.2f} s for 20 claims, {n} samples evaluated"


CRITERIA = [
    (1, "identity suite", criterion_1),
    (2, "stability suite", criterion_2),
    (3, "classical chain", criterion_3),
    (4, "derivative validation", criterion_4),
    (5, "known-true monotonicity", criterion_5),
    (6, "golden verdict table", criterion_6),
    (7, "scaling invariance", criterion_7),
    (8, "determinism", criterion_8),
    (9, "runtime budget", criterion_9),
]


def format_line(number, name, ok, detail):
    return f"[{'PASS' if ok else 'FAIL'}] criterion {number} ({name}): {detail}"


@pytest.mark.parametrize("number,name,fn", CRITERIA, ids=[f"criterion_{n}" for n, _, _ in CRITERIA])
def test_criterion(number, name, fn, acceptance_log):
    ok, detail = fn()
    line = format_line(number, name, ok, detail)
    acceptance_log.append(line)
    print(line)
    assert ok, line


if __name__ == "__main__":
    failed = 0
    for number, name, fn in CRITERIA:
        ok, detail = fn()
        failed += not ok
        print(format_line(number, name, ok, detail), flush=True)
    sys.exit(1 if failed else 0)
