"""Extended-precision reference evaluation straight from the definitions.

Nothing here shares code with :mod:`meanaudit.kernels`; the formulas are the
textbook ones, evaluated with mpmath at ``PREC`` bits so that the
cancellation near ``a = b`` costs bits we can afford to lose.
"""

from __future__ import annotations

import mpmath
from mpmath import mpf

PREC = 256
#: relative error claimed for oracle values at desk-scale inputs
REL_ERROR = mpf(2) ** -180

_ctx = mpmath.MPContext()
_ctx.prec = PREC


def ctx():
    return _ctx


def mp(x):
    """Exact conversion of a float (or int/str) into the oracle context."""
    return _ctx.mpf(x)


def A(a, b):
    return (a + b) / 2


def G(a, b):
    return _ctx.sqrt(a * b)


def H(a, b):
    return 2 * a * b / (a + b)


def L(a, b):
    if a == b:
        return a
    return (a - b) / (_ctx.log(a) - _ctx.log(b))


def I(a, b):  # noqa: E743
    if a == b:
        return a
    return _ctx.exp((a * _ctx.log(a) - b * _ctx.log(b)) / (a - b) - 1)


CLASSICAL = {
    "arithmetic": A,
    "geometric": G,
    "harmonic": H,
    "logarithmic": L,
    "identric": I,
    "A": A,
    "G": G,
    "H": H,
    "L": L,
    "I": I,
}


def power(p, a, b):
    if p == 0:
        return G(a, b)
    return ((a**p + b**p) / 2) ** (1 / p)


def weighted(p, w, a, b):
    return ((a**p + w * b**p) / (1 + w)) ** (1 / p)


def lehmer(p, a, b):
    return (a**p + b**p) / (a ** (p - 1) + b ** (p - 1))


def alzer(p, a, b, variant="paper"):
    pre = (p + 1) / p if variant == "paper" else p / (p + 1)
    if a == b:
        # limit of the difference quotient is a (p+1)/p
        return pre * a * (p + 1) / p
    return pre * (a ** (p + 1) - b ** (p + 1)) / (a**p - b**p)


def param_mean(kind, p, q):
    """Mean of two order parameters, odd-extended to non-positive pairs."""
    if kind == "A":
        return (p + q) / 2
    if p > 0 and q > 0:
        return CLASSICAL[kind](p, q)
    if p <= 0 and q <= 0:
        if p == 0 or q == 0:
            return mp(0)
        return -CLASSICAL[kind](-p, -q)
    raise ValueError("parameter mean of mixed-sign orders")


def family(kind, t, a, b, p=None, variant="paper"):
    """Value of a one-parameter curve at parameter ``t``."""
    if kind == "power":
        return power(t, a, b)
    if kind == "lehmer":
        return lehmer(t, a, b)
    if kind == "alzer":
        return alzer(t, a, b, variant)
    if kind == "weighted":
        return weighted(p, t, a, b)
    raise ValueError(kind)


def log_family(kind, t, a, b, p=None, variant="paper"):
    return _ctx.log(family(kind, t, a, b, p, variant))


def diff_family(kind, t, a, b, order, p=None, variant="paper", log=True):
    """d^order/dt^order of the (log) curve, via mpmath's high-precision differencing."""
    if log:
        f = lambda s: log_family(kind, s, a, b, p, variant)  # noqa: E731
    else:
        f = lambda s: family(kind, s, a, b, p, variant)  # noqa: E731
    return _ctx.diff(f, mp(t), order)


def error_bound(value):
    return abs(value) * REL_ERROR
