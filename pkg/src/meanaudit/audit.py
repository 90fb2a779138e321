"""Deterministic counterexample search over the claim catalog.

Sampling happens in the coordinates ``a``, ``ratio = b/a`` and the claim's
parameters. A search is: full Cartesian grid, then seeded random points,
then a few rounds of nested local grids around the current worst point.
Working-precision candidate violations are confirmed with the oracle
before a claim is reported as violated.
"""

from __future__ import annotations

import hashlib
import json
import math
import zlib
from dataclasses import dataclass, field, replace

import numpy as np

from . import __version__
from .claims import (
    Apply,
    Atom,
    Classical2,
    ClaimSpec,
    Hypothesis,
    ProbeFunction,
    Var,
    Witness,
    catalog,
    decision_threshold,
    evaluate_arrays,
    oracle_eval,
)

GENERATOR = "numpy.random.PCG64"
STATUSES = ("holds_on_sample", "violated", "vacuous", "indeterminate")

_CHUNK = 1 << 17
_MAX_ESCALATIONS = 64
_LOCAL_POINTS = 5


@dataclass(frozen=True)
class GridSpec:
    lo: float
    hi: float
    count: int
    scale: str = "linear"

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi) and self.lo < self.hi):
            raise ValueError(f"grid needs finite lo < hi, got [{self.lo}, {self.hi}]")
        if self.count < 2:
            raise ValueError("grid count must be at least 2")
        if self.scale not in ("linear", "log"):
            raise ValueError(f"unknown grid scale {self.scale!r}")
        if self.scale == "log" and self.lo <= 0:
            raise ValueError("log-scale grid needs lo > 0")

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.lo, self.hi, self.count)
        return np.linspace(self.lo, self.hi, self.count)

    def step(self) -> float:
        """Grid spacing; multiplicative (in log units) for log grids."""
        if self.scale == "log":
            return (math.log(self.hi) - math.log(self.lo)) / (self.count - 1)
        return (self.hi - self.lo) / (self.count - 1)

    def to_json(self):
        return {"lo": self.lo, "hi": self.hi, "count": self.count, "scale": self.scale}


@dataclass(frozen=True)
class VarSampling:
    """Union of grids plus isolated extra values for one coordinate."""

    grids: tuple = ()
    extra: tuple = ()

    def values(self) -> np.ndarray:
        parts = [g.values() for g in self.grids] + [np.asarray(self.extra, dtype=np.float64)]
        return np.unique(np.concatenate(parts)) if parts else np.zeros(0)

    def bounds(self):
        vals = [g.lo for g in self.grids] + [g.hi for g in self.grids] + list(self.extra)
        return (min(vals), max(vals)) if vals else None

    def covers(self, v: float) -> bool:
        b = self.bounds()
        return b is not None and b[0] <= v <= b[1]

    def to_json(self):
        return {"grids": [g.to_json() for g in self.grids], "extra": list(self.extra)}


def _spec_grid(lo, hi, count, scale="linear"):
    return VarSampling((GridSpec(lo, hi, count, scale),))


def default_sampling() -> dict:
    orders = VarSampling((GridSpec(0.05, 5.0, 20), GridSpec(-5.0, -0.05, 20)))
    return {
        # a enters only through the non-homogeneous hypotheses (b >= 1, a > 1)
        "a": _spec_grid(1.0, 8.0, 4, "log"),
        "ratio": VarSampling(
            (GridSpec(1.01, 20.0, 24, "log"), GridSpec(1 / 20.0, 1 / 1.01, 24, "log")),
            (1 + 1e-6, 1 / (1 + 1e-6)),
        ),
        "p": orders,
        "q": orders,
        "omega": _spec_grid(0.1, 10.0, 16, "log"),
        "nu": _spec_grid(0.1, 10.0, 16, "log"),
    }


@dataclass(frozen=True)
class SearchConfig:
    sampling: dict = field(default_factory=default_sampling)
    random_count: int = 2000
    seed: int = 42
    refinement_rounds: int = 6
    shrink_factor: float = 0.5

    def __post_init__(self):
        if self.random_count < 0 or self.refinement_rounds < 0:
            raise ValueError("counts must be non-negative")
        if not 0 < self.shrink_factor < 1:
            raise ValueError("shrink_factor must lie in (0, 1)")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    def to_json(self):
        return {
            "sampling": {k: self.sampling[k].to_json() for k in sorted(self.sampling)},
            "random_count": self.random_count,
            "seed": self.seed,
            "refinement_rounds": self.refinement_rounds,
            "shrink_factor": self.shrink_factor,
        }

    def fingerprint(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def empty_config(**kw) -> SearchConfig:
    """A config whose every coordinate has no sample values (all claims vacuous)."""
    keys = default_sampling().keys()
    return SearchConfig(sampling={k: VarSampling() for k in keys}, random_count=0, refinement_rounds=0, **kw)


@dataclass(frozen=True)
class ClaimVerdict:
    """Outcome of one search.

    ``witness`` is the claim's reference point when that point is itself a
    confirmed violation, otherwise the worst sampled point. ``worst`` is
    always the worst sampled point (oracle-confirmed when violated).
    """

    id: str
    status: str
    witness: Witness | None
    worst: Witness | None
    samples_evaluated: int
    skipped: int
    fingerprint: str
    depends_on: tuple = ()
    depends_on_status: dict = field(default_factory=dict)


# ---------------------------------------------------------------- sampling


def _sample_coords(claim: ClaimSpec):
    """Sampled coordinates: ``ratio`` replaces ``b`` when the claim uses (a, b)."""
    out = []
    for v in claim.variables:
        out.append("ratio" if v == "b" else v)
    return tuple(out)


def _to_point(coords, cols):
    pt = dict(zip(coords, cols))
    if "ratio" in pt:
        pt["b"] = pt["a"] * pt.pop("ratio")
    return pt


def _grid_chunks(value_lists):
    sizes = [len(v) for v in value_lists]
    total = int(np.prod(sizes)) if sizes else 0
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(total, start + _CHUNK))
        multi = np.unravel_index(idx, sizes)
        yield [vals[i] for vals, i in zip(value_lists, multi)]


def _draw_random(rng, sampling: VarSampling, n):
    grids = sampling.grids
    extra = np.asarray(sampling.extra, dtype=np.float64)
    weights = np.array([g.count for g in grids] + [1] * len(extra), dtype=np.float64)
    if weights.size == 0:
        return np.zeros(0)
    comp = rng.choice(weights.size, size=n, p=weights / weights.sum())
    u = rng.random(n)
    out = np.empty(n)
    for i, g in enumerate(grids):
        m = comp == i
        if g.scale == "log":
            out[m] = np.exp(math.log(g.lo) + u[m] * (math.log(g.hi) - math.log(g.lo)))
        else:
            out[m] = g.lo + u[m] * (g.hi - g.lo)
    for j, v in enumerate(extra):
        out[comp == len(grids) + j] = v
    return out


def _claim_rng(seed: int, claim_id: str):
    key = zlib.crc32(claim_id.encode())
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed & 0xFFFFFFFF, seed >> 32, key])))


def _local_values(sampling: VarSampling, center: float, k: int, shrink: float):
    """Nested local grid of ``_LOCAL_POINTS`` values around ``center`` for round ``k``."""
    if not sampling.grids:
        return np.array([center])
    # use the grid containing the center (else the nearest one)
    g = min(sampling.grids, key=lambda g: 0.0 if g.lo <= center <= g.hi else min(abs(center - g.lo), abs(center - g.hi)))
    lo, hi = sampling.bounds()
    h = g.step() * shrink ** (k + 1)
    offs = np.linspace(-1.0, 1.0, _LOCAL_POINTS)
    if g.scale == "log" and center > 0:
        vals = center * np.exp(offs * h)
    else:
        vals = center + offs * h
    if lo <= center <= hi:
        vals = np.clip(vals, lo, hi)
    return np.unique(vals)


# ---------------------------------------------------------------- reduction


class _Tracker:
    """Running reductions over evaluated points, deterministic under chunking."""

    def __init__(self, coords):
        self.coords = coords
        self.evaluated = 0
        self.skipped = 0
        self.worst = None  # (margin, point-tuple, lhs, rhs, thr)
        self.best_decisive = None
        self.candidates = []  # list of (margin, point-tuple, lhs, rhs, thr)

    @staticmethod
    def _better(a, b):
        return b is None or (a[0], a[1]) < (b[0], b[1])

    def _pick(self, mask, m, cols, l, r, thr):
        idx = np.flatnonzero(mask)
        if idx.size == 0:
            return None
        mm = m[idx]
        best = idx[mm == mm.min()]
        if best.size > 1:
            keys = [c[best] for c in reversed(cols)]
            best = best[np.lexsort(keys)]
        i = int(best[0])
        return (float(m[i]), tuple(float(c[i]) for c in cols), float(l[i]), float(r[i]), float(thr[i]))

    def update(self, cols, m, e, l, r):
        finite = np.isfinite(m) & np.isfinite(e)
        self.skipped += int((~finite).sum())
        self.evaluated += int(finite.sum())
        if not finite.any():
            return
        thr = np.where(finite, decision_threshold(e, l, r), np.inf)
        w = self._pick(finite, m, cols, l, r, thr)
        if self._better(w, self.worst):
            self.worst = w
        dec = self._pick(finite & (m > thr), m, cols, l, r, thr)
        if dec is not None and self._better(dec, self.best_decisive):
            self.best_decisive = dec
        cand = np.flatnonzero(finite & (m < -thr))
        if cand.size:
            if cand.size > _MAX_ESCALATIONS:
                keys = [c[cand] for c in reversed(cols)] + [m[cand]]
                cand = cand[np.lexsort(keys)][:_MAX_ESCALATIONS]
            for i in cand:
                self.candidates.append((float(m[i]), tuple(float(c[i]) for c in cols), float(l[i]), float(r[i]), float(thr[i])))
            self.candidates.sort(key=lambda t: (t[0], t[1]))
            del self.candidates[_MAX_ESCALATIONS:]


def _evaluate_cols(claim: ClaimSpec, coords, cols, tracker: _Tracker):
    pt = _to_point(coords, cols)
    mask = claim.hypothesis(pt)
    if not mask.any():
        return
    sub_cols = [np.asarray(c, dtype=np.float64)[mask] for c in cols]
    sub = _to_point(coords, sub_cols)
    m, e, l, r = evaluate_arrays(claim, sub)
    out_cols = [sub[v] for v in claim.variables]
    tracker.update(out_cols, m, e, l, r)


def _check_anchor(claim: ClaimSpec, coords, samplings, tracker: _Tracker):
    """Evaluate the claim's reference point as the first sample; returns its entry.

    The point only counts when it lies inside the configured sampling box.
    """
    if not claim.anchor:
        return None
    pt = {k: np.array([v]) for k, v in claim.anchor}
    box = dict(pt)
    if "b" in box:
        box["ratio"] = box.pop("b") / box["a"]
    if not all(s.covers(float(box[c][0])) for c, s in zip(coords, samplings)):
        return None
    if not claim.hypothesis(pt).all():
        return None
    m, e, l, r = evaluate_arrays(claim, pt)
    cols = [pt[v] for v in claim.variables]
    tracker.update(cols, m, e, l, r)
    if not np.isfinite(m[0]):
        return None
    thr = float(decision_threshold(e, l, r)[0])
    return (float(m[0]), tuple(float(c[0]) for c in cols), float(l[0]), float(r[0]), thr)


def _witness(entry, variables, precision="working"):
    m, pt, l, r, thr = entry
    return Witness(point=dict(zip(variables, pt)), lhs_value=l, rhs_value=r, margin=m, error_bound=thr, precision=precision)


def search(claim: ClaimSpec, config: SearchConfig | None = None) -> ClaimVerdict:
    """Grid, random and refinement search for a counterexample to ``claim``."""
    config = config or SearchConfig()
    coords = _sample_coords(claim)
    missing = [c for c in coords if c not in config.sampling]
    if missing:
        raise ValueError(f"config has no sampling for {missing}")
    samplings = [config.sampling[c] for c in coords]
    tracker = _Tracker(claim.variables)
    anchor = _check_anchor(claim, coords, samplings, tracker)

    value_lists = [s.values() for s in samplings]
    for cols in _grid_chunks(value_lists):
        _evaluate_cols(claim, coords, cols, tracker)

    if config.random_count:
        rng = _claim_rng(config.seed, claim.id)
        cols = [_draw_random(rng, s, config.random_count) for s in samplings]
        if all(c.size == config.random_count for c in cols):
            _evaluate_cols(claim, coords, cols, tracker)

    for k in range(config.refinement_rounds):
        if tracker.worst is None:
            break
        center = dict(zip(claim.variables, tracker.worst[1]))
        if "b" in center:
            center["ratio"] = center["b"] / center["a"]
        local = [_local_values(s, center[c], k, config.shrink_factor) for c, s in zip(coords, samplings)]
        for cols in _grid_chunks(local):
            _evaluate_cols(claim, coords, cols, tracker)

    fp = config.fingerprint()
    if tracker.evaluated == 0:
        return ClaimVerdict(claim.id, "vacuous", None, None, 0, tracker.skipped, fp, claim.depends_on)

    worst = None
    for cand in tracker.candidates:
        ext = oracle_eval(claim, dict(zip(claim.variables, cand[1])))
        if ext.margin < -ext.error_bound:
            worst = ext
            break
    if worst is not None:
        witness = worst
        if anchor is not None and anchor[0] < -anchor[4]:
            ext = oracle_eval(claim, dict(zip(claim.variables, anchor[1])))
            if ext.margin < -ext.error_bound:
                witness = ext
        return ClaimVerdict(claim.id, "violated", witness, worst, tracker.evaluated, tracker.skipped, fp, claim.depends_on)

    worst = _witness(tracker.worst, claim.variables)
    if tracker.best_decisive is not None:
        status, w = "holds_on_sample", _witness(tracker.best_decisive, claim.variables)
    else:
        status, w = "indeterminate", worst
    return ClaimVerdict(claim.id, status, w, worst, tracker.evaluated, tracker.skipped, fp, claim.depends_on)


def audit_all(config: SearchConfig | None = None, claims=None) -> list[ClaimVerdict]:
    """Search every catalog claim; verdicts sorted by id and annotated with lemma statuses."""
    config = config or SearchConfig()
    claims = catalog() if claims is None else list(claims)
    verdicts = {c.id: search(c, config) for c in sorted(claims, key=lambda c: c.id)}
    out = []
    for cid in sorted(verdicts):
        v = verdicts[cid]
        deps = {d: verdicts[d].status for d in v.depends_on if d in verdicts}
        out.append(replace(v, depends_on_status=deps))
    return out


def report_header(config: SearchConfig) -> dict:
    return {
        "version": __version__,
        "generator": GENERATOR,
        "seed": config.seed,
        "config": config.to_json(),
        "fingerprint": config.fingerprint(),
    }


# ---------------------------------------------------------------- MN-convexity probe


@dataclass(frozen=True)
class ProbeVerdict:
    classification: str
    convex: ClaimVerdict
    concave: ClaimVerdict


def probe_claims(f: ProbeFunction, M: str, N: str, interval=None) -> tuple[ClaimSpec, ClaimSpec]:
    """``f(M(x,y)) <= N(f(x), f(y))`` (MN-convex) and its reverse (MN-concave).

    With an interval, its endpoint pair is the claims' reference point.
    """
    X, Y = Var("x"), Var("y")
    inner = Apply(f, Classical2(M, X, Y))
    outer = Classical2(N, Apply(f, X), Apply(f, Y))
    hyp = Hypothesis("x>0 and y>0", lambda pt: (pt["x"] > 0) & (pt["y"] > 0))
    tag = f"{f}:{M}{N}"
    anchor = () if interval is None else (("x", float(interval[0])), ("y", float(interval[1])))
    convex = ClaimSpec(f"{M}{N}-convex[{tag}]", (Atom(inner, "<=", outer),), hyp, ("x", "y"), anchor=anchor)
    concave = ClaimSpec(f"{M}{N}-concave[{tag}]", (Atom(inner, ">=", outer),), hyp, ("x", "y"), anchor=anchor)
    return convex, concave


def probe_config(lo: float, hi: float, samples: int = 24, random_count: int = 500, seed: int = 42, refinement_rounds: int = 4):
    s = _spec_grid(lo, hi, samples)
    return SearchConfig(sampling={"x": s, "y": s}, random_count=random_count, seed=seed, refinement_rounds=refinement_rounds)


def mn_convexity_probe(f: ProbeFunction, M: str, N: str, interval, config: SearchConfig | None = None) -> ProbeVerdict:
    """Classify ``f`` as MN-convex, MN-concave, both (equality on the sample) or neither."""
    for k in (M, N):
        if k not in ("A", "G", "H", "L", "I"):
            raise ValueError(f"unknown classical mean {k!r}")
    config = config or probe_config(*interval)
    cvx, ccv = probe_claims(f, M, N, interval)
    v1, v2 = search(cvx, config), search(ccv, config)
    bad1, bad2 = v1.status == "violated", v2.status == "violated"
    if v1.status == "vacuous":
        cls = "vacuous"
    elif bad1 and bad2:
        cls = "neither"
    elif bad2:
        cls = "MN-convex"
    elif bad1:
        cls = "MN-concave"
    else:
        cls = "both"
    return ProbeVerdict(cls, v1, v2)
