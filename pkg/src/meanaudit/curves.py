"""Parameter curves t -> log mean(t): derivatives, finite-difference checks, shape.

Closed forms are written in terms of the log gap ``d = |log(b/a)|``:

* power, ``u = d/2``::

    l'(p)  = u tanh(pu)/p - logcosh(pu)/p^2
    l''(p) = u^2 sech^2(pu)/p - 2u tanh(pu)/p^2 + 2 logcosh(pu)/p^3

* Lehmer (no cancellation, sign visible)::

    l'(p)  =  d sinh(d/2) / (2 cosh(pd/2) cosh((p-1)d/2))
    l''(p) = -d^2 sinh(d/2) sinh((2p-1)d/2) / (4 cosh^2(pd/2) cosh^2((p-1)d/2))

* Alzer, with ``Lang(x) = coth x - 1/x``::

    l'(p)  = pre'(p)  + (d/2)   [Lang((p+1)d/2)  - Lang(pd/2)]
    l''(p) = pre''(p) + (d^2/4) [Lang'((p+1)d/2) - Lang'(pd/2)]

  where ``pre = 2 log|(p+1)/p|`` for the printed variant and 0 otherwise.

* weighted, in the weight, with ``r = (b/a)^p``, ``A = r/(1+wr)``, ``B = 1/(1+w)``::

    k'(w)  = (A - B)/p = (r - 1) / (p (1 + wr)(1 + w))
    k''(w) = -k'(w) (A + B)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels as K
from . import oracle as O
from .means import DomainError, PositivePair, _pair

FAMILIES = ("power", "lehmer", "alzer", "weighted")

_U = K.UNIT_ROUNDOFF
_LANG_SERIES = 0.05
_POWER_SERIES = 0.02


@dataclass(frozen=True)
class ParamCurve:
    """``family`` in the order p (power, lehmer, alzer) or in the weight (weighted).

    ``p`` is the fixed order of the weighted curve; ``variant`` applies to alzer.
    """

    family: str
    pair: PositivePair
    p: float | None = None
    variant: str = "paper"

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"unknown curve family {self.family!r}")
        object.__setattr__(self, "pair", _pair(self.pair))
        if self.family == "weighted":
            if self.p is None or not self.p > 0:
                raise DomainError("weighted curve needs a fixed order p > 0")
        if self.variant not in ("paper", "normalized"):
            raise DomainError(f"unknown Alzer variant {self.variant!r}")

    @property
    def lam(self) -> float:
        return self.pair.b / self.pair.a

    def check_domain(self, t: float):
        if not math.isfinite(t):
            raise DomainError(f"parameter must be finite, got {t!r}")
        if self.family == "power" and t == 0:
            raise DomainError("power curve excludes t = 0")
        if self.family == "alzer":
            if t == 0:
                raise DomainError("Alzer curve excludes t = 0")
            if t == -1 and self.variant == "paper":
                raise DomainError("printed Alzer curve excludes t = -1")
        if self.family == "weighted" and t <= 0:
            raise DomainError("weighted curve needs a positive weight")

    def crosses_singularity(self, lo: float, hi: float) -> bool:
        if self.family in ("power", "alzer") and lo <= 0 <= hi:
            return True
        if self.family == "alzer" and self.variant == "paper" and lo <= -1 <= hi:
            return True
        if self.family == "weighted" and lo <= 0:
            return True
        return False


def log_sinh(w):
    """log(sinh(w)) for w >= 0 (``-inf`` at 0)."""
    w = np.asarray(w, dtype=np.float64)
    with np.errstate(divide="ignore"):
        return np.log(w) + K.log_sinhc(2.0 * w)


def lang(x):
    """Langevin function coth(x) - 1/x and the magnitude of its cancelling terms."""
    x = np.asarray(x, dtype=np.float64)
    ax = np.abs(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        x2 = x * x
        series = x * (1 / 3 - x2 * (1 / 45 - x2 * (2 / 945 - x2 / 4725)))
        direct = 1.0 / np.tanh(x) - 1.0 / x
        big = np.where(ax < _LANG_SERIES, 0.0, 1.0 / ax)
    return np.where(ax < _LANG_SERIES, series, direct), big


def lang_prime(x):
    """Derivative 1/x^2 - 1/sinh^2(x) of the Langevin function, plus cancelling magnitude."""
    x = np.asarray(x, dtype=np.float64)
    ax = np.abs(x)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        x2 = x * x
        series = 1 / 3 - x2 * (1 / 15 - x2 * (2 / 189 - x2 / 675))
        s = np.sinh(ax)
        direct = 1.0 / x2 - 1.0 / (s * s)
        big = np.where(ax < _LANG_SERIES, 0.0, 1.0 / x2)
    return np.where(ax < _LANG_SERIES, series, direct), big


def _power_d(p, d, order):
    u = d / 2.0
    z = p * u
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        lc = K.logcosh(z)
        th = np.tanh(z)
        ch = np.cosh(z)
        sech2 = 1.0 / (ch * ch)
        z2 = z * z
        if order == 1:
            terms = (u * th / p, -lc / (p * p))
            series = u * u * (0.5 - z2 * (0.25 - z2 * (1 / 9 - z2 * (17 / 360 - z2 * 31 / 1575))))
        else:
            terms = (u * u * sech2 / p, -2 * u * th / (p * p), 2 * lc / (p * p * p))
            series = u**3 * z * (-0.5 + z2 * (4 / 9 - z2 * (17 / 60 - z2 * 248 / 1575)))
        direct = sum(terms)
        mag = sum(np.abs(t) for t in terms)
    small = np.abs(z) < _POWER_SERIES
    val = np.where(small, series, direct)
    err = np.where(small, 8 * _U * np.abs(series), 16 * _U * mag)
    return val, err


def _lehmer_d(p, d, order):
    with np.errstate(divide="ignore", invalid="ignore"):
        c1 = K.logcosh(p * d / 2.0)
        c0 = K.logcosh((p - 1.0) * d / 2.0)
        if order == 1:
            logs = (np.log(d), log_sinh(d / 2.0), -K.LOG2, -c1, -c0)
            sign = 1.0
        else:
            logs = (2 * np.log(d), -2 * K.LOG2, log_sinh(d / 2.0), log_sinh(np.abs(2 * p - 1) * d / 2.0), -2 * c1, -2 * c0)
            sign = -np.sign(2 * p - 1)
        total = sum(logs)
        val = sign * np.exp(total)
        mag = sum(np.where(np.isfinite(t), np.abs(t), 0.0) for t in logs)
    val = np.where(d == 0.0, 0.0, val)
    return val, 8 * _U * np.abs(val) * (1.0 + mag)


def _alzer_d(p, d, order, variant):
    with np.errstate(divide="ignore", invalid="ignore"):
        if order == 1:
            l1, m1 = lang((p + 1.0) * d / 2.0)
            l0, m0 = lang(p * d / 2.0)
            core = d / 2.0 * (l1 - l0)
            mag = d / 2.0 * (np.abs(l1) + np.abs(l0) + m1 + m0)
            pre = -2.0 / (p * (p + 1.0)) if variant == "paper" else 0.0
        else:
            l1, m1 = lang_prime((p + 1.0) * d / 2.0)
            l0, m0 = lang_prime(p * d / 2.0)
            core = d * d / 4.0 * (l1 - l0)
            mag = d * d / 4.0 * (np.abs(l1) + np.abs(l0) + m1 + m0)
            pre = 2.0 * (1.0 / (p * p) - 1.0 / ((p + 1.0) ** 2)) if variant == "paper" else 0.0
    val = pre + core
    return val, 16 * _U * (np.abs(pre) + mag)


def _weighted_d(p, omega, delta, order):
    """``delta = log(b/a)`` signed."""
    e = p * delta
    with np.errstate(over="ignore", invalid="ignore"):
        en = np.exp(-np.abs(e))  # in (0, 1]
        pos = e > 0
        num = np.where(pos, -np.expm1(-e), np.expm1(e))
        den = np.where(pos, (en + omega) * (1.0 + omega), (1.0 + omega * en) * (1.0 + omega))
        k1 = num / (p * den)
        if order == 1:
            return k1, 8 * _U * np.abs(k1)
        A = np.where(pos, 1.0 / (en + omega), en / (1.0 + omega * en))
        B = 1.0 / (1.0 + omega)
        k2 = -k1 * (A + B)
    return k2, 12 * _U * np.abs(k2)


def dlog_arrays(family, a, b, t, order, p=None, variant="paper"):
    """Vectorized ``(derivative, abs_err)`` of log mean along a curve; no validation."""
    x, d = K.log_gap(a, b)
    t = np.asarray(t, dtype=np.float64)
    if family == "power":
        return _power_d(t, d, order)
    if family == "lehmer":
        return _lehmer_d(t, d, order)
    if family == "alzer":
        return _alzer_d(t, d, order, variant)
    if family == "weighted":
        delta = np.where(np.asarray(a) <= np.asarray(b), d, -d)
        return _weighted_d(p, t, delta, order)
    raise ValueError(family)


def log_curve_arrays(family, a, b, t, p=None, variant="paper"):
    """Vectorized ``(log mean, rest, abs_err)`` along a curve, ``rest = log(mean/min(a, b))``."""
    x, d = K.log_gap(a, b)
    t = np.asarray(t, dtype=np.float64)
    clamp = True
    if family == "power":
        c, err = K.excess_power(t, d)
    elif family == "lehmer":
        c, err = K.excess_lehmer(t, d)
    elif family == "alzer":
        c, err = K.excess_alzer(t, d, variant)
        clamp = variant != "paper"
    elif family == "weighted":
        c, err = K.excess_weighted(p, t, d, np.asarray(a) <= np.asarray(b))
    else:
        raise ValueError(family)
    _, log_value, abs_err, rest = K.finish(x, d, c, err, clamp=clamp)
    return log_value, rest, abs_err


def dlog(curve: ParamCurve, t: float, order: int) -> float:
    """First or second derivative of log mean along ``curve`` at ``t``."""
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    curve.check_domain(t)
    val, _ = dlog_arrays(curve.family, curve.pair.a, curve.pair.b, t, order, curve.p, curve.variant)
    return float(val)


def dlog_with_error(curve: ParamCurve, t: float, order: int) -> tuple[float, float]:
    curve.check_domain(t)
    val, err = dlog_arrays(curve.family, curve.pair.a, curve.pair.b, t, order, curve.p, curve.variant)
    return float(val), float(err)


def default_step(t: float, order: int) -> float:
    return (1e-5 if order == 1 else 1e-4) * max(1.0, abs(t))


def _stencil(fvals, h, order):
    # fvals at t-2h, t-h, t, t+h, t+2h
    fm2, fm1, f0, fp1, fp2 = fvals
    if order == 1:
        return (fp1 - fm1) / (2 * h)
    return (-fp2 + 16 * fp1 - 30 * f0 + 16 * fm1 - fm2) / (12 * h * h)


@dataclass(frozen=True)
class FDCheck:
    closed_form: float
    finite_difference: float
    rel_err: float

    @property
    def abs_err(self) -> float:
        return abs(self.closed_form - self.finite_difference)

    def agrees(self, rel_tol: float = 1e-6, abs_tol: float = 1e-4, small: float = 1e-8) -> bool:
        if self.rel_err <= rel_tol:
            return True
        return abs(self.finite_difference) < small and self.abs_err <= abs_tol


def fd_check(curve: ParamCurve, t: float, order: int, h: float | None = None, precision: str = "extended") -> FDCheck:
    """Compare the closed form against a central difference of log mean.

    ``precision="extended"`` evaluates the stencil values with the mpmath
    oracle, so the only error left in the difference is truncation;
    ``"working"`` uses binary64 values (offset by log min(a, b) to limit
    cancellation).
    """
    if h is None:
        h = default_step(t, order)
    if not h > 0 or t + h == t:
        raise DomainError(f"finite-difference step {h!r} underflows at t={t!r}")
    curve.check_domain(t)
    if curve.crosses_singularity(t - 2 * h, t + 2 * h):
        raise DomainError(f"stencil around t={t!r} with h={h!r} leaves the parameter domain")
    closed = dlog(curve, t, order)
    a, b = curve.pair.a, curve.pair.b
    if a == b and not (curve.family == "alzer" and curve.variant == "paper"):
        # every true mean is constant in its parameter on the diagonal
        return FDCheck(closed, 0.0, 0.0 if closed == 0.0 else math.inf)
    if precision == "extended":
        ctx = O.ctx()
        ma, mb, mt, mh = O.mp(a), O.mp(b), O.mp(t), O.mp(h)
        mp_p = None if curve.p is None else O.mp(curve.p)
        vals = [O.log_family(curve.family, mt + k * mh, ma, mb, mp_p, curve.variant) for k in (-2, -1, 0, 1, 2)]
        fd = float(_stencil(vals, mh, order))
        del ctx
    elif precision == "working":
        ts = np.array([t + k * h for k in (-2, -1, 0, 1, 2)])
        _, rest, _ = log_curve_arrays(curve.family, a, b, ts, curve.p, curve.variant)
        fd = float(_stencil(list(rest), h, order))
    else:
        raise ValueError(f"unknown precision {precision!r}")
    diff = abs(closed - fd)
    if diff == 0.0:
        rel = 0.0
    else:
        rel = diff / max(abs(fd), abs(closed))
    return FDCheck(closed, fd, rel)


def plain_d2_power(pair, p: float, h: float | None = None) -> float:
    """Five-point second difference of the value M_p(a, b) in p (not its log)."""
    pair = _pair(pair)
    if h is None:
        h = 1e-3 * max(1.0, abs(p))
    if not math.isfinite(p) or p == 0:
        raise DomainError("plain second derivative needs p != 0")
    if (p - 2 * h) <= 0 <= (p + 2 * h):
        raise DomainError(f"stencil around p={p!r} crosses p = 0")
    ts = np.array([p + k * h for k in (-2, -1, 0, 1, 2)])
    log_value, rest, _ = log_curve_arrays("power", pair.a, pair.b, ts)
    x = min(pair.a, pair.b)
    vals = x * np.exp(rest)
    return float(_stencil(list(vals), h, 2))


def plain_d2_power_closed(a, b, p):
    """Vectorized ``(d^2 M_p / dp^2, abs_err)`` via M (l'' + l'^2)."""
    log_value, rest, lerr = log_curve_arrays("power", a, b, p)
    d1, e1 = dlog_arrays("power", a, b, p, 1)
    d2, e2 = dlog_arrays("power", a, b, p, 2)
    m = np.exp(log_value)
    val = m * (d2 + d1 * d1)
    err = m * (e2 + 2 * np.abs(d1) * e1) + np.abs(val) * (lerr + 8 * _U) + 8 * _U * m * (np.abs(d2) + d1 * d1)
    return val, err


def classification_tol(log_mean):
    return 1e-10 * (1.0 + np.abs(log_mean))


@dataclass(frozen=True)
class CurveReport:
    curve: ParamCurve
    interval: tuple[float, float]
    samples: int
    monotonicity: str
    log_shape: str
    min_d2: float
    argmin_d2: float
    max_d2: float
    argmax_d2: float
    t: tuple = field(repr=False)
    value: tuple = field(repr=False)
    log_value: tuple = field(repr=False)
    d1: tuple = field(repr=False)
    d2: tuple = field(repr=False)


def curve_table(curve: ParamCurve, lo: float, hi: float, n: int):
    """Inclusive uniform grid with value, log value, d1 and d2 columns."""
    if n < 1:
        raise DomainError("need at least one sample")
    if not lo <= hi:
        raise DomainError("interval must satisfy lo <= hi")
    ts = np.linspace(lo, hi, n)
    for t in (lo, hi):
        curve.check_domain(t)
    if curve.crosses_singularity(lo, hi):
        raise DomainError(f"interval [{lo}, {hi}] contains a singular parameter")
    a, b = curve.pair.a, curve.pair.b
    log_value, rest, _ = log_curve_arrays(curve.family, a, b, ts, curve.p, curve.variant)
    d1, _ = dlog_arrays(curve.family, a, b, ts, 1, curve.p, curve.variant)
    d2, _ = dlog_arrays(curve.family, a, b, ts, 2, curve.p, curve.variant)
    value = min(a, b) * np.exp(rest)
    return ts, value, log_value, d1, d2


def classify_curve(curve: ParamCurve, interval, n_samples: int = 256) -> CurveReport:
    lo, hi = float(interval[0]), float(interval[1])
    if n_samples < 16:
        raise DomainError("classification needs at least 16 samples")
    if not lo < hi:
        raise DomainError("interval must satisfy lo < hi")
    ts, value, log_value, d1, d2 = curve_table(curve, lo, hi, n_samples)
    tol = classification_tol(log_value)

    if np.all(np.abs(d1) <= tol):
        mono = "flat"
    elif np.all(d1 >= -tol):
        mono = "increasing"
    elif np.all(d1 <= tol):
        mono = "decreasing"
    else:
        mono = "non-monotone"

    if np.all(np.abs(d2) <= tol):
        shape = "degenerate"
    elif np.all(d2 >= -tol):
        shape = "log-convex"
    elif np.all(d2 <= tol):
        shape = "log-concave"
    else:
        shape = "mixed"

    i_min = int(np.argmin(d2))  # first occurrence: ties go to the smaller t
    i_max = int(np.argmax(d2))
    return CurveReport(
        curve=curve,
        interval=(lo, hi),
        samples=n_samples,
        monotonicity=mono,
        log_shape=shape,
        min_d2=float(d2[i_min]),
        argmin_d2=float(ts[i_min]),
        max_d2=float(d2[i_max]),
        argmax_d2=float(ts[i_max]),
        t=tuple(map(float, ts)),
        value=tuple(map(float, value)),
        log_value=tuple(map(float, log_value)),
        d1=tuple(map(float, d1)),
        d2=tuple(map(float, d2)),
    )


def three_term_arrays(family, a, b, center, p=None, variant="paper"):
    """Vectorized ``(mean(c)^2 - mean(c-1) mean(c+1), abs_err, square, product)``."""
    center = np.asarray(center, dtype=np.float64)
    x, _ = K.log_gap(a, b)
    lm, rm, em = log_curve_arrays(family, a, b, center - 1.0, p, variant)
    l0, r0, e0 = log_curve_arrays(family, a, b, center, p, variant)
    lp, rp, ep = log_curve_arrays(family, a, b, center + 1.0, p, variant)
    delta = 2 * r0 - rm - rp
    with np.errstate(over="ignore"):
        product = x * x * np.exp(rm + rp)
        square = x * x * np.exp(2 * r0)
        margin = product * np.expm1(delta)
    derr = 2 * (em + e0 + ep)
    err = product * np.exp(delta) * derr * 1.01 + 8 * _U * (square + product)
    return margin, err, square, product


def three_term(family: str, pair, center: float, p: float | None = None, variant: str = "paper") -> float:
    """``mean(center)^2 - mean(center-1) mean(center+1)``; negative means the log-convex direction holds."""
    pair = _pair(pair)
    curve = ParamCurve(family, pair, p, variant)
    for t in (center - 1.0, center, center + 1.0):
        curve.check_domain(t)
    if curve.crosses_singularity(center - 1.0, center + 1.0):
        raise DomainError(f"three-term stencil around {center!r} crosses a singular parameter")
    margin, _, _, _ = three_term_arrays(family, pair.a, pair.b, center, p, variant)
    return float(margin)
