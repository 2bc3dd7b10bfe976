"""Named function families with exact derivative evaluation.

Every entry constructs a FunctionModel whose derivatives are hand-written
closed forms (no symbolic or automatic differentiation).  The registry covers
the suite functions used by the verification harness plus the building blocks
(truncated powers, smooth steps, copositive products) the constructions need.
"""

from __future__ import annotations

import math

import numpy as np

from .core import I, FunctionModel

_FACT = [math.factorial(i) for i in range(40)]


def _exp(params):
    a = float(params.get("scale", 1.0))
    return FunctionModel("exp", lambda i, x: a**i * np.exp(a * x), 30, params=params)


def _sin(params):
    w = float(params.get("freq", 1.0))
    phase = float(params.get("phase", 0.0))
    off = float(params.get("offset", 0.0))

    def deriv(i, x):
        val = w**i * np.sin(w * x + phase + i * np.pi / 2)
        return val + off if i == 0 else val

    return FunctionModel("sin", deriv, 30, params=params)


def _cos(params):
    w = float(params.get("freq", 1.0))
    off = float(params.get("offset", 0.0))

    def deriv(i, x):
        val = w**i * np.cos(w * x + i * np.pi / 2)
        return val + off if i == 0 else val

    return FunctionModel("cos", deriv, 30, params=params)


def _cosh(params):
    def deriv(i, x):
        return np.cosh(x) if i % 2 == 0 else np.sinh(x)

    return FunctionModel("cosh", deriv, 30, params=params)


def _poly(params):
    coef = np.asarray(params["coef"], dtype=float)
    basis = params.get("basis", "cheb")
    if basis == "cheb":
        p = np.polynomial.Chebyshev(coef, domain=params.get("domain", list(I)))
    else:
        p = np.polynomial.Polynomial(coef)

    def deriv(i, x):
        return (p.deriv(i) if i else p)(x)

    return FunctionModel("poly", deriv, 30, params=params)


def _sqrtshift(params):
    c = float(params.get("c", 1.5))
    if c <= 1.0:
        raise ValueError("sqrtshift needs c > 1 so that x + c > 0 on [-1, 1]")

    def deriv(i, x):
        fac = np.prod([0.5 - j for j in range(i)]) if i else 1.0
        return fac * (x + c) ** (0.5 - i)

    return FunctionModel("sqrtshift", deriv, 30, params=params)


def _logshift(params):
    c = float(params.get("c", 1.7))
    if c <= 1.0:
        raise ValueError("logshift needs c > 1")

    def deriv(i, x):
        if i == 0:
            return np.log(x + c)
        return (-1.0) ** (i - 1) * _FACT[i - 1] * (x + c) ** (-i)

    return FunctionModel("logshift", deriv, 30, params=params)


def _invshift(params):
    c = float(params.get("c", 2.0))
    if c <= 1.0:
        raise ValueError("invshift needs c > 1")

    def deriv(i, x):
        return (-1.0) ** i * _FACT[i] * (x + c) ** (-(i + 1))

    return FunctionModel("invshift", deriv, 30, params=params)


def _runge(params):
    # 1/(1 + a^2 x^2) via its complex pole pair: derivatives stay exact.
    a = float(params.get("a", 5.0))

    def deriv(i, x):
        z = np.asarray(x, dtype=complex)
        pole = 1j / a
        val = (1.0 / (2j * a)) * (-1.0) ** i * _FACT[i] * (
            (z - pole) ** (-(i + 1)) - (z + pole) ** (-(i + 1))
        )
        return np.real(val)

    return FunctionModel("runge", deriv, 30, params=params)


def _gauss(params):
    # exp(-a x^2); derivatives through the Hermite-style recurrence
    # f^(i)(x) = h_i(x) exp(-a x^2) with h_0 = 1, h_{i+1} = h_i' - 2 a x h_i.
    a = float(params.get("a", 1.0))

    def deriv(i, x):
        x = np.asarray(x, dtype=float)
        h = np.polynomial.Polynomial([1.0])
        for _ in range(i):
            h = h.deriv() + np.polynomial.Polynomial([0.0, -2.0 * a]) * h
        return h(x) * np.exp(-a * x * x)

    return FunctionModel("gauss", deriv, 30, params=params)


def _truncpow(params):
    """Truncated power (x - lam)_+^m: C^(m-1), vanishes left of lam."""
    m = int(params["m"])
    lam = float(params.get("lambda", 0.0))
    if m < 0:
        raise ValueError("truncpow needs m >= 0")

    def deriv(i, x):
        x = np.asarray(x, dtype=float)
        if m == 0:
            return (x >= lam).astype(float)
        fac = _FACT[m] / _FACT[m - i]
        return fac * np.clip(x - lam, 0.0, None) ** (m - i)

    r = max(m - 1, 0)
    return FunctionModel("truncpow", deriv, r, params=params, kinks=(lam,))


def _abshift(params):
    lam = float(params.get("lambda", 0.0))

    def deriv(i, x):
        if i != 0:
            raise ValueError("abshift is C^0 only")
        return np.abs(np.asarray(x, dtype=float) - lam)

    return FunctionModel("abshift", deriv, 0, params=params, kinks=(lam,))


def _glue_step(params):
    from .localpieces import SmoothStep  # deferred: localpieces builds on core only

    a = float(params.get("a", -0.5))
    b = float(params.get("b", -0.25))
    st = SmoothStep(a, b)
    return FunctionModel("glue_step", st.deriv, 2, params=params)


def _copositive_prod(params):
    """Product prod(x - y_i) * base(x) with base > 0; copositive with {y_i}.

    The roots must be given in decreasing order; the leading sign is fixed so
    the rightmost interval is nonnegative.
    """
    roots = tuple(float(y) for y in params["roots"])
    if any(roots[i] <= roots[i + 1] for i in range(len(roots) - 1)):
        raise ValueError("roots must be strictly decreasing")
    base = make(params.get("base", {"name": "exp"}))
    poly = np.polynomial.Polynomial.fromroots(roots) if roots else np.polynomial.Polynomial([1.0])

    def deriv(i, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for j in range(i + 1):
            pj = poly.deriv(j) if j else poly
            out += math.comb(i, j) * pj(x) * base.eval(i - j, x)
        return out

    return FunctionModel("copositive_prod", deriv, base.smoothness, params=params)


_REGISTRY = {
    "exp": _exp,
    "sin": _sin,
    "cos": _cos,
    "cosh": _cosh,
    "poly": _poly,
    "sqrtshift": _sqrtshift,
    "logshift": _logshift,
    "invshift": _invshift,
    "runge": _runge,
    "gauss": _gauss,
    "truncpow": _truncpow,
    "abshift": _abshift,
    "glue_step": _glue_step,
    "copositive_prod": _copositive_prod,
}


def names():
    return sorted(_REGISTRY)


def make(spec) -> FunctionModel:
    """Build a FunctionModel from {"name": ..., **params}."""
    if isinstance(spec, FunctionModel):
        return spec
    params = dict(spec)
    try:
        name = params.pop("name")
    except KeyError:
        raise ValueError("function spec needs a 'name' field") from None
    try:
        ctor = _REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown registry function {name!r}; known: {', '.join(names())}") from None
    return ctor(params)


def smooth_suite():
    """Ten smooth suite functions used by the verification harness."""
    specs = [
        {"name": "exp"},
        {"name": "exp", "scale": -1.5},
        {"name": "sin", "freq": 3.0},
        {"name": "cos", "freq": 2.0},
        {"name": "cosh"},
        {"name": "sqrtshift", "c": 1.5},
        {"name": "logshift", "c": 1.7},
        {"name": "invshift", "c": 2.0},
        {"name": "runge", "a": 3.0},
        {"name": "gauss", "a": 2.0},
    ]
    return [make(s) for s in specs]


def positive_suite():
    """Suite functions that are nonnegative on [-1, 1]."""
    specs = [
        {"name": "exp"},
        {"name": "cosh"},
        {"name": "sin", "freq": 3.0, "offset": 1.5},
        {"name": "cos", "freq": 2.0, "offset": 1.25},
        {"name": "gauss", "a": 2.0},
        {"name": "runge", "a": 3.0},
        {"name": "sqrtshift", "c": 1.1},
        {"name": "invshift", "c": 1.5},
        {"name": "poly", "coef": [0.6, 0.0, 0.5], "basis": "power"},
        {"name": "poly", "coef": [0.05, -0.2, 0.3, 0.0, 0.4], "basis": "power"},
    ]
    return [make(s) for s in specs]


def copositive_suite(roots):
    """Suite functions copositive with the given decreasing root set."""
    bases = [
        {"name": "exp"},
        {"name": "cosh"},
        {"name": "sin", "freq": 3.0, "offset": 1.5},
        {"name": "cos", "freq": 2.0, "offset": 1.25},
        {"name": "invshift", "c": 1.5},
        {"name": "sqrtshift", "c": 1.2},
        {"name": "runge", "a": 2.0},
        {"name": "gauss", "a": 1.0},
        {"name": "poly", "coef": [1.0, 0.0, 0.4], "basis": "power"},
        {"name": "exp", "scale": -1.0},
    ]
    return [make({"name": "copositive_prod", "roots": list(roots), "base": b}) for b in bases]
