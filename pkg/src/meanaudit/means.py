"""Evaluation of the two-argument means in value space and log space."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import kernels as K

CLASSICAL_KINDS = ("arithmetic", "geometric", "harmonic", "logarithmic", "identric")
ALZER_VARIANTS = ("paper", "normalized")


class DomainError(ValueError):
    """An argument or parameter lies outside the domain of a mean."""


@dataclass(frozen=True)
class PositivePair:
    a: float
    b: float

    def __post_init__(self):
        for name in ("a", "b"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float, np.floating, np.integer)) and math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be a finite positive real, got {v!r}")
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))

    def scaled(self, t: float) -> "PositivePair":
        return PositivePair(t * self.a, t * self.b)


@dataclass(frozen=True)
class Classical:
    kind: str

    def __post_init__(self):
        if self.kind not in CLASSICAL_KINDS:
            raise DomainError(f"unknown classical mean {self.kind!r}")


@dataclass(frozen=True)
class Power:
    p: float

    def __post_init__(self):
        _finite("p", self.p)


@dataclass(frozen=True)
class WeightedPower:
    """Weight ``omega`` sits on the second argument."""

    p: float
    omega: float

    def __post_init__(self):
        _finite("p", self.p)
        _finite("omega", self.omega)
        if self.p <= 0:
            raise DomainError(f"weighted power mean needs p > 0, got {self.p!r}")
        if self.omega <= 0:
            raise DomainError(f"weighted power mean needs omega > 0, got {self.omega!r}")


@dataclass(frozen=True)
class Lehmer:
    p: float

    def __post_init__(self):
        _finite("p", self.p)

    @property
    def outside_paper_domain(self) -> bool:
        return self.p <= 0


@dataclass(frozen=True)
class Alzer:
    p: float
    variant: str = "paper"

    def __post_init__(self):
        _finite("p", self.p)
        if self.variant not in ALZER_VARIANTS:
            raise DomainError(f"unknown Alzer variant {self.variant!r}")
        if self.p == 0:
            raise DomainError("Alzer mean is undefined at p = 0")
        if self.p == -1 and self.variant == "paper":
            raise DomainError("printed Alzer prefactor (p+1)/p vanishes at p = -1")


MeanSpec = Union[Classical, Power, WeightedPower, Lehmer, Alzer]


@dataclass(frozen=True)
class EvalResult:
    value: float
    log_value: float
    abs_error_bound: float
    path: str
    outside_paper_domain: bool = False


def _finite(name, v):
    if not (isinstance(v, (int, float, np.floating, np.integer)) and math.isfinite(v)):
        raise DomainError(f"{name} must be a finite real, got {v!r}")


def _pair(pair) -> PositivePair:
    if isinstance(pair, PositivePair):
        return pair
    return PositivePair(*pair)


def excess(spec: MeanSpec, a, b):
    """Vectorized ``(x, d, excess, err)`` for ``spec`` at arrays ``a``, ``b``.

    No argument validation; callers pass positive finite arrays.
    """
    x, d = K.log_gap(a, b)
    if isinstance(spec, Classical):
        c, err = K.excess_classical(spec.kind, d)
    elif isinstance(spec, Power):
        c, err = K.excess_power(spec.p, d)
    elif isinstance(spec, Lehmer):
        c, err = K.excess_lehmer(spec.p, d)
    elif isinstance(spec, Alzer):
        c, err = K.excess_alzer(spec.p, d, spec.variant)
    elif isinstance(spec, WeightedPower):
        c, err = K.excess_weighted(spec.p, spec.omega, d, np.asarray(a) <= np.asarray(b))
    else:
        raise TypeError(f"not a mean spec: {spec!r}")
    return x, d, c, err


def _path(spec: MeanSpec, d: float) -> str:
    if d == 0.0:
        return "limit"
    if isinstance(spec, Classical):
        if spec.kind in ("logarithmic", "identric") and d < K.SERIES_CUTOFF:
            return "series"
        return "direct"
    if isinstance(spec, Power):
        if spec.p == 0:
            return "direct"
        return "series" if abs(spec.p * d / 2) < K.SERIES_CUTOFF else "logspace"
    if isinstance(spec, Alzer) and d < K.SERIES_CUTOFF:
        return "series"
    return "logspace"


def _direct_power(p, a, b):
    try:
        ap, bp = a**p, b**p
        if min(ap, bp) < 1e-290:
            return None
        v = ((ap + bp) / 2) ** (1 / p)
    except (OverflowError, ZeroDivisionError):
        return None
    return v if math.isfinite(v) and v > 0 else None


def evaluate(spec: MeanSpec, pair) -> EvalResult:
    """Evaluate any mean; the single entry point behind the family helpers."""
    pair = _pair(pair)
    x, d, c, err = excess(spec, pair.a, pair.b)
    clamp = not (isinstance(spec, Alzer) and spec.variant == "paper")
    value, log_value, abs_err, _ = K.finish(x, d, c, err, clamp=clamp)
    path = _path(spec, float(d))
    if isinstance(spec, Power) and path == "logspace" and abs(spec.p) >= 1:
        # |p| >= 1 means the outer root does not amplify rounding, so the
        # textbook formula is at least as accurate and lands on exact values
        direct = _direct_power(spec.p, pair.a, pair.b)
        if direct is not None and abs(direct - value) <= abs_err * value:
            value, path = direct, "direct"
    if clamp:
        # x * exp(d) may round past max(a, b)
        value = min(max(float(value), min(pair.a, pair.b)), max(pair.a, pair.b))
    return EvalResult(
        value=float(value),
        log_value=float(log_value),
        abs_error_bound=float(abs_err),
        path=path,
        outside_paper_domain=isinstance(spec, Lehmer) and spec.outside_paper_domain,
    )


def evaluate_many(spec: MeanSpec, a, b):
    """Vectorized ``(value, log_value, abs_err)`` over arrays of positive pairs.

    Uses the log-space kernels throughout, so values can differ from
    :func:`evaluate` by rounding for power means with |p| >= 1.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise DomainError("a and b must have the same shape")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b)) and np.all(a > 0) and np.all(b > 0)):
        raise DomainError("every argument must be positive and finite")
    x, d, c, err = excess(spec, a, b)
    clamp = is_true_mean(spec)
    value, log_value, abs_err, _ = K.finish(x, d, c, err, clamp=clamp)
    if clamp:
        value = np.clip(value, np.minimum(a, b), np.maximum(a, b))
    return value, log_value, abs_err


def classical_mean(kind: str, pair) -> EvalResult:
    return evaluate(Classical(kind), pair)


def power_mean(p: float, pair) -> EvalResult:
    """M_p(a, b) = ((a^p + b^p)/2)^(1/p), with M_0 the geometric mean."""
    return evaluate(Power(p), pair)


def weighted_power_mean(p: float, omega: float, pair) -> EvalResult:
    """((a^p + omega b^p) / (1 + omega))^(1/p) for p, omega > 0."""
    return evaluate(WeightedPower(p, omega), pair)


def lehmer_mean(p: float, pair) -> EvalResult:
    """(a^p + b^p) / (a^(p-1) + b^(p-1)); flags p <= 0 as outside the studied range."""
    return evaluate(Lehmer(p), pair)


def alzer_mean(p: float, pair, variant: str = "paper") -> EvalResult:
    """Modified Alzer mean.

    ``paper`` uses the prefactor (p+1)/p, so that J_p(a, a) = a (p+1)^2 / p^2
    and the result is not a mean in the strict sense. ``normalized`` uses
    p/(p+1) and always lies between a and b.
    """
    return evaluate(Alzer(p, variant), pair)


def log_eval(spec: MeanSpec, pair) -> tuple[float, float]:
    """``(log mean, abs error bound)``."""
    r = evaluate(spec, pair)
    return r.log_value, r.abs_error_bound


def is_symmetric(spec: MeanSpec) -> bool:
    return not isinstance(spec, WeightedPower)


def is_true_mean(spec: MeanSpec) -> bool:
    return not (isinstance(spec, Alzer) and spec.variant == "paper")
