"""Best uniform polynomial approximation and onesided majorants/minorants.

The Remez exchange runs in the Chebyshev basis of the working interval with a
single-point exchange rule.  For kinked targets the search grid includes the
kink locations explicitly, since equioscillation points cluster there.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Chebyshev
from numpy.polynomial import chebyshev as C

from .core import FunctionModel, as_eval

_SPREAD_TOL = 1e-10
_MAX_ITER = 100
# absolute inflation of the onesided shift: guarantees grid nonnegativity under rounding
_SHIFT_EPS = 1e-12


class RemezError(RuntimeError):
    def __init__(self, msg, last=None):
        super().__init__(msg)
        self.last = last


@dataclass
class MinimaxResult:
    poly: Chebyshev
    error: float
    reference: np.ndarray  # equioscillation points
    iterations: int


def _cheb_points(deg, a, b):
    k = np.arange(deg + 2)
    return 0.5 * (a + b) + 0.5 * (b - a) * np.cos(np.pi * k / (deg + 1))[::-1]


def _solve_reference(fe, ref, deg, a, b):
    """Solve P(x_i) + (-1)^i E = f(x_i) for Chebyshev coefficients and E."""
    t = (2.0 * ref - (a + b)) / (b - a)
    V = C.chebvander(t, deg)
    signs = (-1.0) ** np.arange(ref.size)
    M = np.hstack([V, signs[:, None]])
    rhs = np.asarray(fe(ref), dtype=float)
    sol = np.linalg.solve(M, rhs)
    poly = Chebyshev(sol[:-1], domain=[a, b])
    return poly, float(sol[-1])


def best_uniform(f, degree, interval=(-1.0, 1.0), kinks=(), grid=4097,
                 max_iter=_MAX_ITER) -> MinimaxResult:
    """Near-minimax approximation by degree <= `degree` on the interval.

    Stops when the reference error spread is below 1e-10 relative (or after
    max_iter exchanges, which raises with the last iterate attached).
    """
    a, b = float(interval[0]), float(interval[1])
    if not b > a:
        raise ValueError("interval must be nondegenerate")
    if isinstance(f, FunctionModel):
        kinks = tuple(kinks) + tuple(k for k in f.kinks if a < k < b)
    fe = as_eval(f)

    ref = _cheb_points(degree, a, b)
    xs = 0.5 * (a + b) + 0.5 * (b - a) * np.cos(np.pi * np.arange(grid) / (grid - 1))[::-1]
    if kinks:
        xs = np.unique(np.concatenate([xs, np.asarray(kinks, dtype=float)]))
    fx = np.asarray(fe(xs), dtype=float)
    scale = 1.0 + float(np.max(np.abs(fx)))

    poly, E = _solve_reference(fe, ref, degree, a, b)
    for it in range(1, max_iter + 1):
        err = fx - poly(xs)
        i_star = int(np.argmax(np.abs(err)))
        emax = abs(err[i_star])
        if emax <= abs(E) * (1.0 + _SPREAD_TOL) + 1e-14 * scale:
            return MinimaxResult(poly, max(abs(E), emax), ref, it)
        ref = _exchange(ref, xs[i_star], float(err[i_star]), fe, poly)
        poly, E = _solve_reference(fe, ref, degree, a, b)
    # converged well enough?  final acceptance check before giving up
    err = fx - poly(xs)
    if np.max(np.abs(err)) <= abs(E) * 1.01 + 1e-13:
        return MinimaxResult(poly, abs(E), ref, max_iter)
    raise RemezError(
        f"Remez did not converge after {max_iter} iterations "
        f"(|E|={abs(E):.3g}, grid max={np.max(np.abs(err)):.3g})",
        last=MinimaxResult(poly, abs(E), ref, max_iter),
    )


def _exchange(ref, x_new, err_new, fe, poly):
    """Single-point exchange preserving sign alternation over the reference."""
    ref = np.asarray(ref, dtype=float)
    res = np.asarray(fe(ref), dtype=float) - poly(ref)
    sign_new = 1.0 if err_new >= 0 else -1.0
    if x_new < ref[0]:
        idx = 0 if np.sign(res[0]) == sign_new else None
        if idx is None:
            ref = np.concatenate([[x_new], ref[:-1]])
            return ref
    elif x_new > ref[-1]:
        idx = ref.size - 1 if np.sign(res[-1]) == sign_new else None
        if idx is None:
            ref = np.concatenate([ref[1:], [x_new]])
            return ref
    else:
        idx = int(np.searchsorted(ref, x_new))
        # replace the neighbor whose residual has the same sign
        if idx >= ref.size or (idx > 0 and np.sign(res[idx - 1]) == sign_new):
            idx = idx - 1
    out = ref.copy()
    out[idx] = x_new
    out.sort()
    return out


def onesided_majorant(f, degree, interval=(-1.0, 1.0), side="upper", kinks=()):
    """Polynomial q with q >= f (side='upper') or q <= f ('lower') on the grid,
    at distance at most 2E from f, where E is the minimax error."""
    res = best_uniform(f, degree, interval, kinks=kinks)
    shift = res.error + _SHIFT_EPS
    a, b = float(interval[0]), float(interval[1])
    fe = as_eval(f)
    # absorb any between-grid excess seen on a finer check grid
    xs = np.linspace(a, b, 8193)
    if kinks or isinstance(f, FunctionModel):
        kk = tuple(kinks) + (tuple(f.kinks) if isinstance(f, FunctionModel) else ())
        kk = [k for k in kk if a < k < b]
        if kk:
            xs = np.unique(np.concatenate([xs, np.asarray(kk)]))
    gap = np.asarray(fe(xs), dtype=float) - res.poly(xs)
    if side == "upper":
        shift = max(shift, float(np.max(gap)) + _SHIFT_EPS)
        q = res.poly + shift
    elif side == "lower":
        shift = max(shift, float(np.max(-gap)) + _SHIFT_EPS)
        q = res.poly - shift
    else:
        raise ValueError("side must be 'upper' or 'lower'")
    return Chebyshev(q.coef, domain=[a, b])


def onesided_pair(f, interval, m, kinks=()):
    """Whitney pair P >= f >= Q of degree < m with ||P - Q|| = 2E + O(eps)."""
    res = best_uniform(f, m - 1, interval, kinks=kinks)
    a, b = float(interval[0]), float(interval[1])
    fe = as_eval(f)
    xs = np.linspace(a, b, 8193)
    gap = np.asarray(fe(xs), dtype=float) - res.poly(xs)
    up = max(res.error, float(np.max(gap))) + _SHIFT_EPS
    dn = max(res.error, float(np.max(-gap))) + _SHIFT_EPS
    P = Chebyshev((res.poly + up).coef, domain=[a, b])
    Q = Chebyshev((res.poly - dn).coef, domain=[a, b])
    return P, Q, res
