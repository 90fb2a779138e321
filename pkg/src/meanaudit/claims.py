"""Catalog of audited inequalities and their pointwise evaluation.

A claim is a conjunction of atoms ``lhs REL rhs`` over small expression
trees. Each atom yields a signed margin (``rhs - lhs`` for ``<=``,
``lhs - rhs`` for ``>=``), so a negative margin is a violation; a claim's
margin is the minimum over its atoms.

Two evaluators walk the same trees: a vectorized binary64 one built on
:mod:`meanaudit.kernels` and an mpmath one built on :mod:`meanaudit.oracle`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from . import curves as C
from . import kernels as K
from . import oracle as O

_U = K.UNIT_ROUNDOFF

COORDS = ("a", "b", "p", "q", "omega", "nu")
_MEAN_NAMES = {"A": "arithmetic", "G": "geometric", "H": "harmonic", "L": "logarithmic", "I": "identric"}


class PreconditionError(ValueError):
    """The point does not satisfy the claim's hypothesis."""


# ---------------------------------------------------------------- expressions


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return {"omega": "ω", "nu": "ν"}.get(self.name, self.name)


@dataclass(frozen=True)
class Shift:
    var: str
    offset: float

    def __str__(self):
        s = str(Var(self.var))
        return f"{s}{self.offset:+g}"


@dataclass(frozen=True)
class ParamMean:
    """Classical mean of two parameter coordinates, e.g. L(p, q)."""

    kind: str
    left: str
    right: str

    def __str__(self):
        return f"{self.kind}({Var(self.left)},{Var(self.right)})"


Param = Union[Var, Shift, ParamMean]


@dataclass(frozen=True)
class FamilyMean:
    """A parametric mean of the point's (a, b).

    ``param`` is the order (power, lehmer, alzer) or the weight (weighted);
    the weighted family reads its order from the coordinate ``order``.
    """

    family: str
    param: Param
    order: str = "p"
    variant: str = "paper"

    def __str__(self):
        sym = {"power": "M", "lehmer": "L", "alzer": "J"}.get(self.family)
        if self.family == "weighted":
            return f"M_{self.order}({self.param},a,b)"
        return f"{sym}_{{{self.param}}}(a,b)"


@dataclass(frozen=True)
class OuterMean:
    kind: str
    left: FamilyMean
    right: FamilyMean

    def __str__(self):
        return f"{self.kind}({self.left}, {self.right})"


@dataclass(frozen=True)
class Product:
    left: FamilyMean
    right: FamilyMean

    def __str__(self):
        if self.left == self.right:
            return f"{self.left}^2"
        return f"{self.left}·{self.right}"


@dataclass(frozen=True)
class Slope:
    """d^order/dt^order of log mean along a curve (of the mean itself when ``plain``)."""

    family: str
    param: str
    order_: int
    plain: bool = False
    fixed: str | None = None
    variant: str = "paper"

    def __str__(self):
        f = {"power": "M", "lehmer": "L", "alzer": "J", "weighted": "M_p"}[self.family]
        t = str(Var(self.param))
        inner = f"{f}({t})" if self.plain else f"log {f}({t})"
        ticks = "'" * self.order_
        return f"[{inner}]{ticks}"


@dataclass(frozen=True)
class Const:
    value: float

    def __str__(self):
        return f"{self.value:g}"


@dataclass(frozen=True)
class Apply:
    """Probe function applied to an argument node (probe claims only)."""

    fn: "ProbeFunction"
    arg: object

    def __str__(self):
        return f"{self.fn}({self.arg})"


@dataclass(frozen=True)
class Classical2:
    """Classical mean of two arbitrary positive real-valued nodes (probe claims)."""

    kind: str
    left: object
    right: object

    def __str__(self):
        return f"{self.kind}({self.left}, {self.right})"


# ---------------------------------------------------------------- claims


@dataclass(frozen=True)
class Atom:
    lhs: object
    relation: str
    rhs: object

    def __str__(self):
        rel = {"<=": "≤", ">=": "≥"}[self.relation]
        return f"{self.lhs} {rel} {self.rhs}"


@dataclass(frozen=True)
class Hypothesis:
    text: str
    predicate: Callable = field(compare=False, repr=False)

    def __call__(self, pt):
        return np.asarray(self.predicate(pt), dtype=bool)


@dataclass(frozen=True)
class ClaimSpec:
    id: str
    atoms: tuple
    hypothesis: Hypothesis
    variables: tuple
    depends_on: tuple = ()
    note: str = ""
    #: reference point checked before any sampling, as ((name, value), ...)
    anchor: tuple = ()

    @property
    def lhs(self):
        return self.atoms[0].lhs

    @property
    def rhs(self):
        return self.atoms[0].rhs

    @property
    def relation(self):
        return self.atoms[0].relation

    def statement(self) -> str:
        return " and ".join(str(a) for a in self.atoms)


def _hyp_t1(pt):
    p, q, a, b = pt["p"], pt["q"], pt["a"], pt["b"]
    return ((p > 0) & (q > 0)) | ((p <= 0) & (q <= 0) & (b >= a))


def _hyp_t2(pt):
    return (pt["p"] > 0) & (pt["q"] > 0) & (pt["b"] >= pt["a"])


def _hyp_t3(pt):
    return (pt["a"] >= pt["b"]) & (pt["b"] >= 1) & (pt["p"] > 0) & (pt["omega"] > 0) & (pt["nu"] > 0)


def _theorems():
    P, Q = Var("p"), Var("q")
    Mp, Mq = FamilyMean("power", P), FamilyMean("power", Q)
    Lp, Lq = FamilyMean("lehmer", P), FamilyMean("lehmer", Q)
    Ww, Wn = FamilyMean("weighted", Var("omega")), FamilyMean("weighted", Var("nu"))
    h1 = Hypothesis("(p>0 and q>0) or (p<=0 and q<=0 and b>=a)", _hyp_t1)
    h2 = Hypothesis("p>0 and q>0 and b>=a", _hyp_t2)
    h3 = Hypothesis("a>=b>=1 and p>0 and omega>0 and nu>0", _hyp_t3)
    v12 = ("a", "b", "p", "q")
    v3 = ("a", "b", "p", "omega", "nu")
    x12 = (("a", 1.0), ("b", float(np.e)), ("p", 1.0), ("q", 3.0))
    x3 = (("a", 4.0), ("b", 2.0), ("p", 1.0), ("omega", 1.0), ("nu", 3.0))
    d1 = ("L2.3a", "L2.4a", "L2.4b")
    d2 = ("L2.5", "TT-L")
    d3 = ("L2.6a", "L2.6b", "TT-W")
    return [
        ClaimSpec("T1.1", (Atom(OuterMean("L", Mp, Mq), "<=", FamilyMean("power", ParamMean("L", "p", "q"))),), h1, v12, d1, anchor=x12),
        ClaimSpec("T1.2", (Atom(OuterMean("L", Mp, Mq), "<=", FamilyMean("power", ParamMean("A", "p", "q"))),), h1, v12, d1, anchor=x12),
        ClaimSpec("T1.3", (Atom(OuterMean("I", Mp, Mq), "<=", FamilyMean("power", ParamMean("A", "p", "q"))),), h1, v12, d1, anchor=x12),
        ClaimSpec("T2.1", (Atom(OuterMean("L", Lp, Lq), ">=", FamilyMean("lehmer", ParamMean("L", "p", "q"))),), h2, v12, d2, anchor=x12),
        ClaimSpec("T2.2", (Atom(OuterMean("L", Lp, Lq), ">=", FamilyMean("lehmer", ParamMean("A", "p", "q"))),), h2, v12, d2, anchor=x12),
        ClaimSpec("T2.3", (Atom(OuterMean("I", Lp, Lq), ">=", FamilyMean("lehmer", ParamMean("I", "p", "q"))),), h2, v12, d2, anchor=x12),
        ClaimSpec("T3.1", (Atom(OuterMean("L", Ww, Wn), "<=", FamilyMean("weighted", ParamMean("L", "omega", "nu"))),), h3, v3, d3, anchor=x3),
        ClaimSpec("T3.2", (Atom(OuterMean("L", Ww, Wn), "<=", FamilyMean("weighted", ParamMean("A", "omega", "nu"))),), h3, v3, d3, anchor=x3),
        ClaimSpec("T3.3", (Atom(OuterMean("I", Ww, Wn), "<=", FamilyMean("weighted", ParamMean("A", "omega", "nu"))),), h3, v3, d3, anchor=x3),
    ]


def _shape(family, param, mono, shape, fixed=None, variant="paper"):
    """Atoms for 'mono and shape' with mono in {inc, dec}, shape in {convex, concave}."""
    zero = Const(0.0)
    return (
        Atom(Slope(family, param, 1, fixed=fixed, variant=variant), ">=" if mono == "inc" else "<=", zero),
        Atom(Slope(family, param, 2, fixed=fixed, variant=variant), ">=" if shape == "convex" else "<=", zero),
    )


def _lemmas():
    zero = Const(0.0)
    vp = ("a", "b", "p")
    vw = ("a", "b", "p", "omega")
    return [
        ClaimSpec(
            "L2.3a",
            (Atom(Slope("power", "p", 2, plain=True), "<=", zero),),
            Hypothesis("p>=1", lambda pt: pt["p"] >= 1),
            vp,
            note="M_p(a,b) concave in p for p>=1",
        ),
        ClaimSpec(
            "L2.3b",
            (Atom(Slope("power", "p", 2, plain=True), ">=", zero),),
            Hypothesis("p<=-1", lambda pt: pt["p"] <= -1),
            vp,
            note="M_p(a,b) convex in p for p<=-1",
        ),
        ClaimSpec(
            "L2.4a",
            _shape("power", "p", "inc", "concave"),
            Hypothesis("p>0", lambda pt: pt["p"] > 0),
            vp,
            ("L2.3a",),
            note="p -> M_p increasing and log-concave on p>0",
        ),
        ClaimSpec(
            "L2.4b",
            _shape("power", "p", "inc", "concave"),
            Hypothesis("p<0 and b>=a", lambda pt: (pt["p"] < 0) & (pt["b"] >= pt["a"])),
            vp,
            note="p -> M_p increasing and log-concave on p<0 when b>=a",
        ),
        ClaimSpec(
            "L2.5",
            _shape("lehmer", "p", "inc", "convex"),
            Hypothesis("p>0 and b>=a", lambda pt: (pt["p"] > 0) & (pt["b"] >= pt["a"])),
            vp,
            note="p -> L_p increasing and log-convex on p>0 when b>=a",
        ),
        ClaimSpec(
            "L2.6a",
            _shape("weighted", "omega", "dec", "convex", fixed="p"),
            Hypothesis("p>0 and omega>0 and b>=a>1", lambda pt: (pt["p"] > 0) & (pt["omega"] > 0) & (pt["b"] >= pt["a"]) & (pt["a"] > 1)),
            vw,
            note="omega -> M_p(omega,a,b) decreasing and log-convex when b>=a>1",
        ),
        ClaimSpec(
            "L2.6b",
            _shape("weighted", "omega", "inc", "concave", fixed="p"),
            Hypothesis("p>0 and omega>0 and a>=b>1", lambda pt: (pt["p"] > 0) & (pt["omega"] > 0) & (pt["a"] >= pt["b"]) & (pt["b"] > 1)),
            vw,
            note="omega -> M_p(omega,a,b) increasing and log-concave when a>=b>1",
        ),
        ClaimSpec(
            "C2.3",
            _shape("alzer", "p", "dec", "convex"),
            Hypothesis("p>0 and b>a", lambda pt: (pt["p"] > 0) & (pt["b"] > pt["a"])),
            vp,
            note="p -> J_p (printed prefactor) strictly decreasing and log-convex on p>0 when b>a",
        ),
    ]


def _three_term_atom(family, param, order="p"):
    mid = FamilyMean(family, Var(param), order=order)
    lo = FamilyMean(family, Shift(param, -1.0), order=order)
    hi = FamilyMean(family, Shift(param, 1.0), order=order)
    return (Atom(Product(mid, mid), "<=", Product(lo, hi)),)


def _three_terms():
    return [
        ClaimSpec(
            "TT-J",
            _three_term_atom("alzer", "p"),
            Hypothesis("p>1 and b>a", lambda pt: (pt["p"] > 1) & (pt["b"] > pt["a"])),
            ("a", "b", "p"),
            ("C2.3",),
            anchor=(("a", 1.0), ("b", 2.0), ("p", 2.0)),
        ),
        ClaimSpec(
            "TT-L",
            _three_term_atom("lehmer", "p"),
            Hypothesis("p>1 and b>=a", lambda pt: (pt["p"] > 1) & (pt["b"] >= pt["a"])),
            ("a", "b", "p"),
            ("L2.5",),
            anchor=(("a", 1.0), ("b", float(np.e)), ("p", 2.0)),
        ),
        ClaimSpec(
            "TT-W",
            _three_term_atom("weighted", "omega"),
            Hypothesis("p>0 and omega>1 and b>=a>1", lambda pt: (pt["p"] > 0) & (pt["omega"] > 1) & (pt["b"] >= pt["a"]) & (pt["a"] > 1)),
            ("a", "b", "p", "omega"),
            ("L2.6a",),
        ),
    ]


_CATALOG = tuple(sorted(_theorems() + _lemmas() + _three_terms(), key=lambda c: c.id))


def catalog() -> list[ClaimSpec]:
    """All built-in claims, sorted by id."""
    return list(_CATALOG)


def get_claim(claim_id: str) -> ClaimSpec:
    for c in _CATALOG:
        if c.id == claim_id:
            return c
    raise KeyError(f"unknown claim id {claim_id!r}")


# ---------------------------------------------------------------- probe functions


@dataclass(frozen=True)
class ProbeFunction:
    """Positive function for MN-convexity probes.

    ``kind`` is one of identity, exp, log, power (x^c) or a curve family
    (power_curve, lehmer_curve, alzer_curve, weighted_curve) evaluated at
    the fixed pair ``(a, b)`` as a function of its parameter.
    """

    kind: str
    c: float = 1.0
    a: float = 1.0
    b: float = float(np.e)
    p: float | None = None
    variant: str = "paper"

    def __str__(self):
        if self.kind == "power":
            return f"x^{self.c:g}"
        if self.kind.endswith("_curve"):
            return f"{self.kind}[{self.a:g},{self.b:g}]"
        return self.kind

    def working(self, x):
        x = np.asarray(x, dtype=np.float64)
        with np.errstate(all="ignore"):
            if self.kind == "identity":
                return x, np.zeros_like(x)
            if self.kind == "exp":
                v = np.exp(x)
                return v, 2 * _U * v * (1 + np.abs(x))
            if self.kind == "log":
                v = np.log(x)
                return v, 2 * _U * (np.abs(v) + 1)
            if self.kind == "power":
                v = x**self.c
                return v, 4 * _U * v * (1 + np.abs(self.c * np.log(x)))
            fam = self.kind[: -len("_curve")]
            a = np.full_like(x, self.a)
            b = np.full_like(x, self.b)
            lv, rest, err = C.log_curve_arrays(fam, a, b, x, self.p, self.variant)
            v = min(self.a, self.b) * np.exp(rest)
            return v, v * (err + 2 * _U)

    def extended(self, x):
        ctx = O.ctx()
        if self.kind == "identity":
            return x
        if self.kind == "exp":
            return ctx.exp(x)
        if self.kind == "log":
            return ctx.log(x)
        if self.kind == "power":
            return x ** O.mp(self.c)
        fam = self.kind[: -len("_curve")]
        p = None if self.p is None else O.mp(self.p)
        return O.family(fam, x, O.mp(self.a), O.mp(self.b), p, self.variant)


# ---------------------------------------------------------------- working evaluation


def _param_working(node, pt):
    """Order/weight value and its relative error bound."""
    if isinstance(node, Var):
        v = np.asarray(pt[node.name], dtype=np.float64)
        return v, np.zeros_like(v)
    if isinstance(node, Shift):
        v = np.asarray(pt[node.var], dtype=np.float64) + node.offset
        return v, np.full_like(v, _U)
    if isinstance(node, ParamMean):
        p = np.asarray(pt[node.left], dtype=np.float64)
        q = np.asarray(pt[node.right], dtype=np.float64)
        if node.kind == "A":
            v = (p + q) / 2.0
            return v, np.full_like(v, _U)
        sign = np.where((p > 0) & (q > 0), 1.0, np.where((p <= 0) & (q <= 0), -1.0, np.nan))
        ap, aq = np.abs(p), np.abs(q)
        with np.errstate(all="ignore"):
            safe_p = np.where(ap > 0, ap, 1.0)
            safe_q = np.where(aq > 0, aq, 1.0)
            x, d = K.log_gap(safe_p, safe_q)
            c, err = K.excess_classical(_MEAN_NAMES[node.kind], d)
            value, _, abs_err, _ = K.finish(x, d, c, err)
        zero = (ap == 0) | (aq == 0)
        v = np.where(zero, 0.0, sign * value)
        return v, np.where(zero, 0.0, abs_err + _U)
    raise TypeError(node)


def _family_working(node: FamilyMean, pt, x, d, a_le_b):
    """``(rest, err)`` with ``rest = log(mean / min(a, b))``."""
    t, rel_t = _param_working(node.param, pt)
    dt = np.abs(t) * rel_t
    if node.family == "power":
        c, err = K.excess_power(t, d)
        err = err + dt * d * d / 8.0
    elif node.family == "lehmer":
        c, err = K.excess_lehmer(t, d)
        err = err + dt * d * np.minimum(1.0, d / 4.0)
    elif node.family == "weighted":
        p = np.asarray(pt[node.order], dtype=np.float64)
        c, err = K.excess_weighted(p, t, d, a_le_b)
        err = err + rel_t / p
    elif node.family == "alzer":
        c, err = K.excess_alzer(t, d, node.variant)
    else:
        raise TypeError(node)
    rest = d / 2.0 + c
    if not (node.family == "alzer" and node.variant == "paper"):
        rest = np.clip(rest, 0.0, d)
    return rest, err + 2 * _U * np.abs(rest)


def _logmean_working(node, pt, x, d, a_le_b):
    """``(rest, err, k)``: node value is ``min(a,b)^k exp(rest)``."""
    if isinstance(node, FamilyMean):
        r, e = _family_working(node, pt, x, d, a_le_b)
        return r, e, 1
    if isinstance(node, OuterMean):
        r1, e1, _ = _logmean_working(node.left, pt, x, d, a_le_b)
        r2, e2, _ = _logmean_working(node.right, pt, x, d, a_le_b)
        gap = np.abs(r1 - r2)
        lower = np.minimum(r1, r2)
        c, ec = K.excess_classical(_MEAN_NAMES[node.kind], gap)
        rest = lower + np.clip(gap / 2.0 + c, 0.0, gap)
        return rest, e1 + e2 + ec + 2 * _U * np.abs(rest), 1
    if isinstance(node, Product):
        r1, e1, k1 = _logmean_working(node.left, pt, x, d, a_le_b)
        r2, e2, k2 = _logmean_working(node.right, pt, x, d, a_le_b)
        rest = r1 + r2
        return rest, e1 + e2 + _U * np.abs(rest), k1 + k2
    raise TypeError(node)


def _real_working(node, pt):
    """``(value, abs_err)`` for real-valued nodes."""
    if isinstance(node, Const):
        shape = np.shape(next(iter(pt.values())))
        return np.full(shape, float(node.value)), np.zeros(shape)
    if isinstance(node, Slope):
        a, b = pt["a"], pt["b"]
        t = np.asarray(pt[node.param], dtype=np.float64)
        if node.plain:
            return C.plain_d2_power_closed(a, b, t)
        fixed = None if node.fixed is None else np.asarray(pt[node.fixed], dtype=np.float64)
        return C.dlog_arrays(node.family, a, b, t, node.order_, fixed, node.variant)
    if isinstance(node, Var):
        v = np.asarray(pt[node.name], dtype=np.float64)
        return v, np.zeros_like(v)
    if isinstance(node, Apply):
        v, e = _real_working(node.arg, pt)
        fv, fe = node.fn.working(v)
        # first-order propagation of the argument error through f
        h = np.maximum(np.abs(v) * 1e-7, 1e-300)
        f_hi, _ = node.fn.working(v + h)
        f_lo, _ = node.fn.working(v - h)
        slope = np.abs(f_hi - f_lo) / (2 * h)
        return fv, fe + 2 * slope * e
    if isinstance(node, Classical2):
        v1, e1 = _real_working(node.left, pt)
        v2, e2 = _real_working(node.right, pt)
        if node.kind == "A":
            return (v1 + v2) / 2, (e1 + e2) / 2 + _U * np.abs(v1 + v2)
        with np.errstate(all="ignore"):
            ok = (v1 > 0) & (v2 > 0)
            s1 = np.where(ok, v1, 1.0)
            s2 = np.where(ok, v2, 1.0)
            x, d = K.log_gap(s1, s2)
            c, ec = K.excess_classical(_MEAN_NAMES[node.kind], d)
            value, _, lerr, _ = K.finish(x, d, c, ec)
            rel_in = np.maximum(e1 / s1, e2 / s2)
            err = value * (lerr + rel_in) * 1.01
        return np.where(ok, value, np.nan), err
    raise TypeError(node)


def _is_logmean(node) -> bool:
    return isinstance(node, (FamilyMean, OuterMean, Product))


def _atom_working(atom: Atom, pt, x, d, a_le_b):
    if _is_logmean(atom.lhs):
        rl, el, kl = _logmean_working(atom.lhs, pt, x, d, a_le_b)
        rr, er, kr = _logmean_working(atom.rhs, pt, x, d, a_le_b)
        assert kl == kr
        with np.errstate(over="ignore", invalid="ignore"):
            scale = x**kl
            lhs = scale * np.exp(rl)
            rhs = scale * np.exp(rr)
            diff = lhs * np.expm1(rr - rl)  # rhs - lhs
            err = (lhs * el + rhs * er) * 1.01 + 4 * _U * (lhs + rhs)
    else:
        lhs, el = _real_working(atom.lhs, pt)
        rhs, er = _real_working(atom.rhs, pt)
        diff = rhs - lhs
        err = el + er + _U * np.abs(diff)
    margin = diff if atom.relation == "<=" else -diff
    return margin, err, lhs, rhs


def evaluate_arrays(claim: ClaimSpec, pt: dict):
    """Vectorized ``(margin, error_bound, lhs, rhs)`` over point arrays.

    The hypothesis is not checked here; callers filter first.
    """
    if "a" in pt:
        a = np.asarray(pt["a"], dtype=np.float64)
        b = np.asarray(pt["b"], dtype=np.float64)
        x, d = K.log_gap(a, b)
        a_le_b = a <= b
    else:
        x = d = a_le_b = None
    best = None
    for atom in claim.atoms:
        m, e, l, r = _atom_working(atom, pt, x, d, a_le_b)
        m, e, l, r = (np.asarray(v, dtype=np.float64) for v in (m, e, l, r))
        if best is None:
            best = [m.copy(), e.copy(), l.copy(), r.copy()]
        else:
            take = m < best[0]
            for i, v in enumerate((m, e, l, r)):
                best[i] = np.where(take, v, best[i])
    return tuple(best)


@dataclass(frozen=True)
class Witness:
    point: dict
    lhs_value: float
    rhs_value: float
    margin: float
    error_bound: float
    precision: str = "working"

    def is_decisive(self) -> bool:
        return abs(self.margin) > self.error_bound


def decision_threshold(err, lhs, rhs):
    return np.maximum(err, 1e-12 * (1.0 + np.abs(lhs) + np.abs(rhs)))


def _point_arrays(point: dict, variables) -> dict:
    missing = [v for v in variables if v not in point or point[v] is None]
    if missing:
        raise PreconditionError(f"point is missing coordinates {missing}")
    return {k: np.asarray([float(point[k])]) for k in variables}


def check_hypothesis(claim: ClaimSpec, point: dict):
    pt = _point_arrays(point, claim.variables)
    for v in pt.values():
        if not np.all(np.isfinite(v)):
            raise PreconditionError("point coordinates must be finite")
    if ("a" in pt and not pt["a"][0] > 0) or ("b" in pt and not pt["b"][0] > 0):
        raise PreconditionError("a and b must be positive")
    if not bool(claim.hypothesis(pt)[0]):
        raise PreconditionError(f"{claim.id}: hypothesis '{claim.hypothesis.text}' fails at {point}")
    return pt


def evaluate_claim(claim: ClaimSpec, point: dict) -> Witness:
    """Signed margin of ``claim`` at ``point`` in binary64."""
    pt = check_hypothesis(claim, point)
    m, e, l, r = evaluate_arrays(claim, pt)
    if not np.isfinite(m[0]):
        from .means import DomainError

        raise DomainError(f"{claim.id}: evaluation left the parameter domain at {point}")
    thr = decision_threshold(e, l, r)
    return Witness(
        point={k: float(pt[k][0]) for k in claim.variables},
        lhs_value=float(l[0]),
        rhs_value=float(r[0]),
        margin=float(m[0]),
        error_bound=float(thr[0]),
    )


# ---------------------------------------------------------------- extended evaluation


def _param_ext(node, pt):
    if isinstance(node, Var):
        return pt[node.name]
    if isinstance(node, Shift):
        return pt[node.var] + O.mp(node.offset)
    if isinstance(node, ParamMean):
        return O.param_mean(node.kind, pt[node.left], pt[node.right])
    raise TypeError(node)


def _value_ext(node, pt):
    if isinstance(node, Const):
        return O.mp(node.value)
    if isinstance(node, Var):
        return pt[node.name]
    if isinstance(node, FamilyMean):
        t = _param_ext(node.param, pt)
        p = pt.get(node.order) if node.family == "weighted" else None
        return O.family(node.family, t, pt["a"], pt["b"], p, node.variant)
    if isinstance(node, OuterMean):
        return O.CLASSICAL[node.kind](_value_ext(node.left, pt), _value_ext(node.right, pt))
    if isinstance(node, Product):
        return _value_ext(node.left, pt) * _value_ext(node.right, pt)
    if isinstance(node, Slope):
        fixed = None if node.fixed is None else pt[node.fixed]
        return O.diff_family(node.family, pt[node.param], pt["a"], pt["b"], node.order_, fixed, node.variant, log=not node.plain)
    if isinstance(node, Apply):
        return node.fn.extended(_value_ext(node.arg, pt))
    if isinstance(node, Classical2):
        return O.CLASSICAL[node.kind](_value_ext(node.left, pt), _value_ext(node.right, pt))
    raise TypeError(node)


def _atom_ext(atom: Atom, pt):
    lhs = _value_ext(atom.lhs, pt)
    rhs = _value_ext(atom.rhs, pt)
    margin = rhs - lhs if atom.relation == "<=" else lhs - rhs
    return margin, lhs, rhs


def oracle_eval(claim: ClaimSpec, point: dict) -> Witness:
    """Re-evaluate ``claim`` at ``point`` from the definitions at extended precision.

    The error bound is the larger of the nominal relative error and the
    change observed when the working precision is raised by 64 bits.
    """
    check_hypothesis(claim, point)
    ctx = O.ctx()
    results = []
    for extra in (0, 64):
        with ctx.workprec(O.PREC + extra):
            pt = {k: O.mp(float(v)) for k, v in point.items() if v is not None}
            atoms = [_atom_ext(atom, pt) for atom in claim.atoms]
            results.append(min(atoms, key=lambda t: t[0]))
    (m0, l0, r0), (m1, _, _) = results
    err = abs(m1 - m0) * 4 + O.REL_ERROR * (abs(l0) + abs(r0))
    return Witness(
        point={k: float(point[k]) for k in claim.variables},
        lhs_value=float(l0),
        rhs_value=float(r0),
        margin=float(m0),
        error_bound=float(err),
        precision="extended",
    )
