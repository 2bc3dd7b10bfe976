"""Local polynomial pieces used near constraint and sign-change points.

Five constructions, each transcribing a concrete case analysis:

* onesided_piece       -- Taylor part plus the r-fold integral of a onesided
                          majorant of f^(r); Hermite contact of order r-1 at
                          the anchor, onesided off it (orientation flips with
                          the parity of r left of an interior anchor).
* positive_linear      -- nonnegative linear interpolant at the anchor
                          (secant dispatch, constant fallback).
* positive_cubic       -- nonnegative cubic with value contact at an interior
                          anchor; two-case dispatch on |f'(anchor)| against
                          the third-order modulus of f'.
* copositive_quadratic -- quadratic with first-order Hermite contact whose
                          sign agrees with (x - anchor).
* copositive_quartic   -- quartic analogue driven by f'', with a three-case
                          assembly and a cubic correction.

All constructions run in the affine pullback of [a, b] onto [-1, 1]
(Chebyshev coefficients transport back verbatim), verify their postconditions
on a grid, and -- for the two whose published nonnegativity analysis is
anchored at a centered interpolation point -- fall back to a small verified
LP rather than ever returning a silently violated piece.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Chebyshev
from scipy.integrate import quad

from .core import I, FunctionModel
from .interp import NodeMultiset, cheb_interpolate, lagrange_hermite
from .lporacle import ConstrainedApproxProblem, default_grid, min_error_constrained
from .minimax import best_uniform, onesided_majorant
from .smoothness import modulus_value

_GRID = 4096
_SIGN_SLACK = 1e-10


class PieceError(ValueError):
    pass


class SmoothStep:
    """C-infinity monotone 0 -> 1 transition on [a, b].

    Built from the bump exp(d^2 / ((x - x0)^2 - d^2)) centered at
    x0 = (a+b)/2 with half-width d = (b-a)/2; the normalization constant is
    computed once by adaptive quadrature.
    """

    def __init__(self, a, b, quad_tol=1e-13):
        if not -1.0 <= a < b <= 1.0:
            raise ValueError("smooth step needs -1 <= a < b <= 1")
        self.a, self.b = float(a), float(b)
        self.center = 0.5 * (a + b)
        self.halfwidth = 0.5 * (b - a)
        self.total, err = quad(self._bump_scalar, self.a, self.b,
                               epsabs=quad_tol, epsrel=quad_tol, limit=200)
        if not (self.total > 0 and err < 1e-10 * self.total + 1e-15):
            raise ArithmeticError("smooth-step normalization quadrature failed")

    def _bump_scalar(self, t):
        u = (t - self.center) ** 2 - self.halfwidth**2
        if u >= 0.0:
            return 0.0
        return math.exp(self.halfwidth**2 / u)

    def bump(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        u = (x - self.center) ** 2 - self.halfwidth**2
        out = np.zeros_like(u)
        inside = u < 0
        out[inside] = np.exp(self.halfwidth**2 / u[inside])
        return out

    def bump_deriv(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        u = (x - self.center) ** 2 - self.halfwidth**2
        out = np.zeros_like(u)
        inside = u < 0
        xi = x[inside]
        out[inside] = (np.exp(self.halfwidth**2 / u[inside])
                       * (-2.0 * self.halfwidth**2 * (xi - self.center)) / u[inside] ** 2)
        return out

    def value(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.empty_like(x)
        for idx, xi in enumerate(x):
            if xi <= self.a:
                out[idx] = 0.0
            elif xi >= self.b:
                out[idx] = 1.0
            else:
                v, _ = quad(self._bump_scalar, self.a, xi, epsabs=1e-13, epsrel=1e-13, limit=200)
                out[idx] = v / self.total
        return out if out.size > 1 else float(out[0])

    def deriv(self, i, x):
        if i == 0:
            return self.value(x)
        if i == 1:
            return self.bump(x) / self.total
        if i == 2:
            return self.bump_deriv(x) / self.total
        raise ValueError("smooth step derivatives implemented up to order 2")

    def __call__(self, x):
        return self.value(x)


GlueSpec = SmoothStep


def glue(x, spec: SmoothStep):
    """0 left of spec.a, 1 right of spec.b, smooth monotone in between."""
    return spec.value(x)


@dataclass
class PieceReport:
    poly: Chebyshev            # on the original interval
    interval: tuple[float, float]
    anchor: float
    case: str
    sup_error: float
    omega: float               # the modulus entering the error functional
    constant: float            # sup_error / ((b-a)^power * omega); 0 if omega = 0


class _HermiteTable:
    """Hermite data table standing in for a FunctionModel inside interpolation."""

    def __init__(self, table):
        self.table = dict(table)
        self.smoothness = max(o for _, o in self.table)
        self.name = "table"
        self.domain = I
        self.kinks = ()

    def eval(self, i, x):
        if np.ndim(x):
            return np.array([self.table[(float(xx), i)] for xx in np.atleast_1d(x)])
        return self.table[(float(x), i)]


def hermite_nodes(spec):
    """[(point, max_order), ...] -> NodeMultiset with matching repetitions."""
    nodes = []
    for pt, order in spec:
        nodes.extend([float(pt)] * (int(order) + 1))
    return NodeMultiset(tuple(sorted(nodes)))


def _pullback(f: FunctionModel, interval, lam):
    a, b = float(interval[0]), float(interval[1])
    if not a <= lam <= b:
        raise PieceError("anchor must lie in the interval")
    g = f.affine_pullback(a, b)
    lam_hat = (2.0 * lam - (a + b)) / (b - a)
    return g, a, b, 0.5 * (b - a), lam_hat


def _report(case, p_hat, g, a, b, anchor, power, omega_orig, grid=_GRID):
    """Assemble the report; sup error is basis-invariant under the pullback."""
    xs = np.linspace(-1.0, 1.0, grid)
    sup = float(np.max(np.abs(g.eval(0, xs) - p_hat(xs))))
    denom = (b - a) ** power * omega_orig
    const = sup / denom if denom > 0 else 0.0
    return PieceReport(Chebyshev(p_hat.coef, domain=[a, b]), (a, b), anchor, case,
                       sup, omega_orig, const)


def _require_nonneg(values, scale, what):
    if float(np.min(values)) < -_SIGN_SLACK * scale:
        raise PieceError(f"{what} fails on the verification grid")


def _lp_fallback(g, degree, hermite, sign_regions):
    prob = ConstrainedApproxProblem(
        g, degree, default_grid(size=1025, extra=[pt for pt, _ in hermite]),
        hermite=tuple(hermite), sign_regions=tuple(sign_regions))
    estar, poly, cert = min_error_constrained(prob)
    if not cert.optimal:
        raise PieceError(f"fallback LP failed with status {cert.status}")
    return poly


def onesided_piece(f: FunctionModel, k, r, lam, interval, resolution=(256, 256),
                   grid=_GRID) -> PieceReport:
    """Degree <= k+r-1 piece with p^(i)(lam) = f^(i)(lam) for i < r, p - f >= 0
    right of lam and (-1)^r (p - f) >= 0 left of it.

    Integrating a onesided majorant q >= f^(r) r times from lam makes the sign
    of p - f that of (x - lam)^r.
    """
    if r < 1:
        raise PieceError("onesided piece needs r >= 1")
    if f.smoothness < r:
        raise PieceError(f"f is C^{f.smoothness}, need C^{r}")
    g, a, b, half, lam_hat = _pullback(f, interval, lam)

    q = onesided_majorant(g.deriv_fn(r), k - 1, I, kinks=g.kinks)
    taylor = cheb_interpolate(
        lambda u: sum(float(g.eval(i, lam_hat)) * (np.asarray(u, dtype=float) - lam_hat) ** i
                      / math.factorial(i) for i in range(r)),
        max(r - 1, 0), I)
    p_hat = taylor + q.integ(r, lbnd=lam_hat)

    om_g = modulus_value(g.deriv_fn(r), k, 2.0, I, resolution)
    omega_orig = om_g / half**r  # omega_k(f^(r), b-a; [a,b])
    return _report("onesided", p_hat, g, a, b, lam, r, omega_orig, grid)


def positive_linear(f: FunctionModel, lam, interval, gamma=None, grid=_GRID,
                    resolution=(256, 256)) -> PieceReport:
    """Nonnegative linear l with l(lam) = f(lam).

    Dispatch: secant through (a, lam) if nonnegative, else secant through
    (lam, b) if nonnegative, else the constant f(lam).
    """
    a, b = float(interval[0]), float(interval[1])
    if gamma is not None and lam not in (a, b):
        if min(lam - a, b - lam) < gamma * (b - a) - 1e-14:
            raise PieceError(f"anchor separation below gamma={gamma}")
    g, a, b, half, lam_hat = _pullback(f, interval, lam)

    xs = np.linspace(-1.0, 1.0, grid)
    gx = g.eval(0, xs)
    _require_nonneg(gx, 1.0 + float(np.max(np.abs(gx))), "nonnegativity of f")

    def secant(u0, u1):
        v0, v1 = float(g.eval(0, u0)), float(g.eval(0, u1))
        return cheb_interpolate(
            lambda u: v0 + (v1 - v0) * (np.asarray(u, dtype=float) - u0) / (u1 - u0), 1, I)

    choice = None
    if lam_hat > -1.0:
        l1 = secant(-1.0, lam_hat)
        if float(l1(1.0)) >= 0.0 and float(l1(-1.0)) >= 0.0:
            choice, case = l1, "secant-left"
    if choice is None and lam_hat < 1.0:
        l2 = secant(lam_hat, 1.0)
        if float(l2(1.0)) >= 0.0 and float(l2(-1.0)) >= 0.0:
            choice, case = l2, "secant-right"
    if choice is None:
        choice, case = Chebyshev([float(g.eval(0, lam_hat))], domain=list(I)), "constant"

    omega_orig = modulus_value(g.deriv_fn(0), 2, 2.0, I, resolution)
    return _report(case, choice, g, a, b, lam, 0, omega_orig, grid)


def positive_cubic(f: FunctionModel, lam, interval, gamma=0.1, grid=_GRID,
                   resolution=(256, 256)) -> PieceReport:
    """Nonnegative cubic p with p(lam) = f(lam), for f >= 0 in C^1.

    Case 1 (|f'(lam)| at most twice the measured derivative-approximation
    constant times the third-order modulus of f'; ties land here): the
    Hermite cubic with the derivative at the anchor dropped.  Case 2: the full
    Hermite cubic plus a quadratic tilt vanishing at the anchor and at the
    endpoint the derivative points away from.  Both candidates are
    grid-verified; off-center anchors may fall through to a verified LP.
    """
    a, b = float(interval[0]), float(interval[1])
    if f.smoothness < 1:
        raise PieceError("positive cubic needs f in C^1")
    if min(lam - a, b - lam) < gamma * (b - a) - 1e-14:
        raise PieceError(f"anchor separation below gamma={gamma}")
    g, a, b, half, lam_hat = _pullback(f, interval, lam)

    xs = np.linspace(-1.0, 1.0, grid)
    gx = g.eval(0, xs)
    gscale = 1.0 + float(np.max(np.abs(gx)))
    _require_nonneg(gx, gscale, "nonnegativity of f")

    L0 = lagrange_hermite(hermite_nodes([(lam_hat, 1), (-1.0, 0), (1.0, 0)]), g, interval=I)
    om_g = modulus_value(g.deriv_fn(1), 3, 2.0, I, resolution)
    if om_g <= 1e-13 * (1.0 + float(np.max(np.abs(g.eval(1, xs))))):
        om_g = 0.0  # f' within quadratic reach: degenerate modulus, exact branch
    d1 = float(np.max(np.abs(g.eval(1, xs) - L0.deriv(1)(xs))))
    A = max(1.0, d1 / om_g) if om_g > 0 else 1.0
    gp = float(g.eval(1, lam_hat))
    gval = float(g.eval(0, lam_hat))
    tol = _SIGN_SLACK * gscale

    candidates = []
    if om_g == 0.0:
        # f' is within cubic reach exactly: the Hermite cubic reproduces f
        candidates.append(("exact", L0))
    else:
        if abs(gp) <= 2.0 * A * om_g:  # ties land in the drop-derivative case
            drop = lagrange_hermite(
                hermite_nodes([(lam_hat, 1), (-1.0, 0), (1.0, 0)]),
                _HermiteTable({(lam_hat, 0): gval, (lam_hat, 1): 0.0,
                               (-1.0, 0): float(g.eval(0, -1.0)),
                               (1.0, 0): float(g.eval(0, 1.0))}),
                interval=I)
            candidates.append(("case1-drop-derivative", drop))
        if gp <= 0:
            corr = cheb_interpolate(
                lambda u: A * om_g * (np.asarray(u, dtype=float) - lam_hat)
                * (1.0 + np.asarray(u, dtype=float)) / (1.0 + lam_hat), 2, I)
        else:
            corr = cheb_interpolate(
                lambda u: -A * om_g * (np.asarray(u, dtype=float) - lam_hat)
                * (1.0 - np.asarray(u, dtype=float)) / (1.0 - lam_hat), 2, I)
        candidates.append(("case2-tilt", L0 + corr))

    omega_orig = om_g / half  # omega_3(f', b-a; [a,b])
    for case, p_hat in candidates:
        value_ok = abs(float(p_hat(lam_hat)) - gval) <= tol
        if value_ok and float(np.min(p_hat(xs))) >= -tol:
            return _report(case, p_hat, g, a, b, lam, 1, omega_orig, grid)

    p_hat = _lp_fallback(g, 3, [(lam_hat, 0)], (( -1.0, 1.0, 1.0, "P"),))
    return _report("lp-fallback", p_hat, g, a, b, lam, 1, omega_orig, grid)


def copositive_quadratic(f: FunctionModel, lam, interval, gamma=0.1, grid=_GRID,
                         resolution=(256, 256)) -> PieceReport:
    """Quadratic p with (x-lam) p >= 0 matching f and f' at lam.

    Dispatch: Hermite quadratic through the left endpoint if its value at the
    right endpoint is admissible, else the right-endpoint one, else the
    tangent line f'(lam)(x - lam).
    """
    a, b = float(interval[0]), float(interval[1])
    if f.smoothness < 1:
        raise PieceError("copositive quadratic needs f in C^1")
    if min(lam - a, b - lam) < gamma * (b - a) - 1e-14:
        raise PieceError(f"anchor separation below gamma={gamma}")
    g, a, b, half, lam_hat = _pullback(f, interval, lam)

    xs = np.linspace(-1.0, 1.0, grid)
    gx = g.eval(0, xs)
    gscale = 1.0 + float(np.max(np.abs(gx)))
    _require_nonneg((xs - lam_hat) * gx, gscale, "copositivity of f with the anchor")

    gval, gp = float(g.eval(0, lam_hat)), float(g.eval(1, lam_hat))
    L1 = lagrange_hermite(hermite_nodes([(lam_hat, 1), (-1.0, 0)]), g, interval=I)
    L2 = lagrange_hermite(hermite_nodes([(lam_hat, 1), (1.0, 0)]), g, interval=I)

    if float(L1(1.0)) >= 0.0:
        case, p_hat = "left-endpoint", L1
    elif float(L2(-1.0)) <= 0.0:
        case, p_hat = "right-endpoint", L2
    else:
        case = "tangent"
        p_hat = cheb_interpolate(
            lambda u: gval + gp * (np.asarray(u, dtype=float) - lam_hat), 1, I)

    omega_orig = modulus_value(g.deriv_fn(1), 2, 2.0, I, resolution) / half
    return _report(case, p_hat, g, a, b, lam, 1, omega_orig, grid)


def copositive_quartic(f: FunctionModel, lam, interval, gamma=0.1, grid=_GRID,
                       resolution=(256, 256)) -> PieceReport:
    """Quartic P with (x-lam) P >= 0 and first-order Hermite contact at lam.

    Built from the best quadratic approximation of f'' shifted into a
    minorant/majorant pair, a three-case assembly on the signs of their values
    at the anchor, and a cubic correction.  Grid-verified with an LP backstop
    for off-center anchors.
    """
    a, b = float(interval[0]), float(interval[1])
    if f.smoothness < 2:
        raise PieceError("copositive quartic needs f in C^2")
    if min(lam - a, b - lam) < gamma * (b - a) - 1e-14:
        raise PieceError(f"anchor separation below gamma={gamma}")
    g, a, b, half, lam_hat = _pullback(f, interval, lam)

    xs = np.linspace(-1.0, 1.0, grid)
    gx = g.eval(0, xs)
    gscale = 1.0 + float(np.max(np.abs(gx)))
    _require_nonneg((xs - lam_hat) * gx, gscale, "copositivity of f with the anchor")

    gp = float(g.eval(1, lam_hat))
    res = best_uniform(g.deriv_fn(2), 2, I)
    p, e = res.poly, res.error
    om_g = modulus_value(g.deriv_fn(2), 3, 2.0, I, resolution)
    tol = _SIGN_SLACK * gscale

    lin = cheb_interpolate(lambda u: gp * (np.asarray(u, dtype=float) - lam_hat), 1, I)
    cube = cheb_interpolate(lambda u: (np.asarray(u, dtype=float) - lam_hat) ** 3, 3, I)

    candidates = []
    if e <= 1e-13 * (1.0 + float(np.max(np.abs(p(xs))))):
        candidates.append(("reproduction", lin + p.integ(2, lbnd=lam_hat)))
    else:
        p1, p2 = p - e, p + e
        c1, c2 = float(p1(lam_hat)), float(p2(lam_hat))
        eps = 0.5 * (c2 - c1)
        if c1 >= 0.0:
            candidates.append(("case-i", lin + p1.integ(2, lbnd=lam_hat) + eps * cube))
        elif c2 <= 0.0:
            candidates.append(("case-ii", lin + p2.integ(2, lbnd=lam_hat) + eps * cube))
        else:
            # p in powers of (u - lam_hat): A t^2 + B t + C
            Acoef = float(p.deriv(2)(lam_hat)) / 2.0
            Bcoef = float(p.deriv(1)(lam_hat))
            quart = cheb_interpolate(lambda u: (np.asarray(u, dtype=float) - lam_hat) ** 4, 4, I)
            candidates.append(("case-iii", lin + (Acoef / 12.0) * quart + (Bcoef / 6.0 + eps) * cube))

    omega_orig = om_g / half**2  # omega_3(f'', b-a; [a,b])
    for case, P_hat in candidates:
        sign_ok = float(np.min((xs - lam_hat) * P_hat(xs))) >= -tol
        herm_ok = (abs(float(P_hat(lam_hat)) - float(g.eval(0, lam_hat))) <= tol
                   and abs(float(P_hat.deriv(1)(lam_hat)) - gp) <= 10 * tol)
        if sign_ok and herm_ok:
            return _report(case, P_hat, g, a, b, lam, 2, omega_orig, grid)

    P_hat = _lp_fallback(g, 4, [(lam_hat, 1)],
                         ((lam_hat, 1.0, 1.0, "P"), (-1.0, lam_hat, -1.0, "P")))
    return _report("lp-fallback", P_hat, g, a, b, lam, 2, omega_orig, grid)
