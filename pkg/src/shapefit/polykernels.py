"""Localized Chebyshev kernels and intertwining pairs for truncated powers.

The kernel t_j is an algebraic polynomial of degree <= 4n-2 concentrated on
the j-th Chebyshev interval; it is evaluated through the exact trigonometric
identity (the cosine/sine factors vanish to second order at the shifted
nodes, so the apparent singularities are removable and handled by a guarded
limit).  The correction polynomial multiplies a high power of the kernel by
sign-carrying factors at the constraint points; adding a scaled copy repairs
the sign defect introduced when a truncated-power intertwining pair of even
exponent is lifted to the next (odd) exponent.

The even-exponent base pairs are produced by the weighted-minimax LP oracle
at configurable degree; reports record the degree and the weighted error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import Chebyshev
from numpy.polynomial import chebyshev as C

from .core import ChebyshevPartition, ConstraintSet, SignPattern, grid_union
from .lporacle import LPProblem, cheb_derivative_operator, simplex_solve

_FACT = [math.factorial(i) for i in range(34)]


def _sin_ratio(n, theta, theta0, x, x0):
    """sin(2n(theta - theta0)) / (x - x0) via the exact factored identity
    2n * sinc(2n(theta-theta0)) * (theta-theta0)/(x-x0); the difference
    quotient switches to its analytic limit -1/sin(theta0) at x0."""
    u = 2.0 * n * (theta - theta0)
    dx = x - x0
    at = np.abs(dx) < 1e-15
    dq = np.where(at, -1.0 / np.sin(theta0),
                  np.divide(theta - theta0, dx, out=np.zeros_like(u), where=~at))
    small = np.abs(u) < 1e-8
    sinc = np.where(small, 1.0 - u * u / 6.0,
                    np.divide(np.sin(u), u, out=np.ones_like(u), where=~small))
    return 2.0 * n * sinc * dq


def kernel_nodes(n: int, j: int):
    """Shifted nodes of the localized kernel: the half-step node and the
    quarter-step node (side depending on j relative to n/2)."""
    if not 1 <= j <= n - 1:
        raise IndexError(f"kernel index {j} out of range 1..{n - 1}")
    theta_bar = j * np.pi / n - np.pi / (2 * n)
    if j < n / 2:
        theta0 = j * np.pi / n - np.pi / (4 * n)
    else:
        theta0 = j * np.pi / n - 3 * np.pi / (4 * n)
    return theta0, theta_bar


def localized_kernel(n: int, j: int, x):
    """t_j(x) = (x-x_j^0)^-2 cos^2(2n arccos x) + (x-xbar_j)^-2 sin^2(2n arccos x).

    Polynomial of degree <= 4n-2; the two-sided comparison with the square of
    the localization weight holds with the explicit constants 1 and 4000.
    """
    theta0, theta_bar = kernel_nodes(n, j)
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    xv = np.atleast_1d(x)
    if np.any(np.abs(xv) > 1.0 + 1e-14):
        raise ValueError("kernel argument must lie in [-1, 1]")
    theta = np.arccos(np.clip(xv, -1.0, 1.0))
    r1 = _sin_ratio(n, theta, theta0, xv, np.cos(theta0))
    r2 = _sin_ratio(n, theta, theta_bar, xv, np.cos(theta_bar))
    out = r1 * r1 + r2 * r2
    return float(out[0]) if scalar else out


def kernel_ratio_range(n: int, j: int, grid: int = 2000):
    """(min, max) over the grid of t_j(x) * |I_j|^2 / psi_j(x)^2."""
    part = ChebyshevPartition(n)
    xs = np.linspace(-1.0, 1.0, grid)
    t = localized_kernel(n, j, xs)
    psi = part.localization_weight(j, xs)
    ratio = t * part.length(j) ** 2 / psi**2
    return float(np.min(ratio)), float(np.max(ratio))


@dataclass
class TruncatedPower:
    """(x - lam)_+^m with derivative evaluation away from the kink.

    Derivatives of order above m are zero off the kink; at the kink itself
    only orders < m are defined (the model is C^(m-1) there).
    """

    m: int
    lam: float

    def __post_init__(self):
        if self.m < 0:
            raise ValueError("exponent must be nonnegative")
        self.name = f"truncpow{self.m}"
        self.smoothness = 32
        self.domain = (-1.0, 1.0)
        self.params = {"m": self.m, "lambda": self.lam}
        self.kinks = (self.lam,)

    def eval(self, i, x):
        x = np.asarray(x, dtype=float)
        if i > self.m:
            return np.zeros_like(x)
        if self.m == 0:
            if i == 0:
                return (x >= self.lam).astype(float)
            return np.zeros_like(x)
        fac = _FACT[self.m] / _FACT[self.m - i]
        return fac * np.clip(x - self.lam, 0.0, None) ** (self.m - i)

    def deriv_fn(self, i):
        return lambda x: self.eval(i, x)

    def __call__(self, x):
        return self.eval(0, x)


class WindowContaminationError(ValueError):
    pass


@dataclass
class InterpolatoryCorrection:
    """Kernel power times sign-carrying factors at the constraint points.

    Vanishes to order 2r+1 at sign-change points (odd: flips sign there) and
    to order 2r+2 at constraint points (even: keeps sign); carries the sign
    pattern of the sign-change set and is bounded by a constant times the
    localization weight to the power mu.
    """

    n: int
    j: int
    mu_prime: int
    r: int
    Y: SignPattern
    A: ConstraintSet

    def __post_init__(self):
        part = ChebyshevPartition(self.n)
        lo = part.node(self.j + 1)
        hi = part.node(self.j - 2)
        for b in list(self.Y.points) + [a for a in self.A.points if abs(a) < 1.0]:
            if lo < b < hi:
                raise WindowContaminationError(
                    f"point {b:.6g} contaminates the protected window ({lo:.6g}, {hi:.6g})")
        self.part = part
        self.xj = part.node(self.j)
        self.length = part.length(self.j)

    def value(self, x):
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        xv = np.atleast_1d(x)
        base = localized_kernel(self.n, self.j, xv) * self.length**2
        out = base ** self.mu_prime
        for y in self.Y.points:
            out = out * ((xv - y) / abs(self.xj - y)) ** (2 * self.r + 1)
        for a in self.A.points:
            out = out * ((xv - a) / abs(self.xj - a)) ** (2 * self.r + 2)
        return float(out[0]) if scalar else out

    def __call__(self, x):
        return self.value(x)

    def floor_on(self, lo, hi, grid=512):
        """min |H| over [lo, hi]; the analytic floor is 4^(-2mu'-(2r+1)s-(2r+2)p)."""
        xs = np.linspace(lo, hi, grid)
        return float(np.min(np.abs(self.value(xs))))

    def analytic_floor(self):
        s, p = self.Y.s, self.A.p
        return 4.0 ** -(2 * self.mu_prime + (2 * self.r + 1) * s + (2 * self.r + 2) * p)


class LiftedPolynomial:
    """(x - lam) * R(x) + sigma * scale * H(x) with exact Hermite shortcuts.

    H vanishes to order >= r+1 at every constraint point by its factor
    structure, so derivatives up to r there come from the polynomial part
    alone; this is used exactly rather than through numerical differentiation.
    """

    def __init__(self, R: Chebyshev, lam: float, corr: InterpolatoryCorrection,
                 sigma: float, scale: float, hermite_points, r: int):
        self.R = R
        self.lam = lam
        self.corr = corr
        self.sigma = sigma
        self.scale = scale
        self.hermite_points = np.asarray(sorted(hermite_points), dtype=float)
        self.r = r
        xpoly = Chebyshev(C.chebline(-lam, 1.0), domain=[-1, 1])
        self.poly = xpoly * R

    def _is_hermite_point(self, x):
        return bool(np.any(np.abs(self.hermite_points - x) < 1e-13))

    def eval(self, i, x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 0 and i > 0:
            if not self._is_hermite_point(float(x)):
                raise ValueError("derivatives of the lifted pair are evaluated "
                                 "at constraint points only")
            if i > self.r:
                raise ValueError(f"derivative order {i} above the contact order {self.r}")
            return float(self.poly.deriv(i)(x))
        val = self.poly(x) if i == 0 else self.poly.deriv(i)(x)
        if i == 0:
            val = val + self.sigma * self.scale * self.corr.value(x)
        return val

    def __call__(self, x):
        return self.eval(0, x)


@dataclass
class PairReport:
    R1: object
    R2: object
    degree: int
    weighted_error: float   # max |R_i - g| / (psi^(mu-m) |I_j|^m) over the grid
    mu: int
    info: dict = field(default_factory=dict)


def _weighted_pair_lp(g, n, j, degree, exponent, length_pow, Y: SignPattern,
                      hermite, upper: bool, grid_density: int):
    """Weighted-minimax LP for one side of an intertwining pair of g.

    Constraints: (R - g) carries the sign pattern of Y on the grid when
    upper=True (g - R when False); Hermite equality rows at the given
    (point, order) pairs; objective max w |R - g| with w the reciprocal
    localization weight to the given exponent.  The grid follows the
    membership-check convention (uniform at the given density per unit length
    plus all special points), so downstream sign checks land on LP rows.
    """
    part = ChebyshevPartition(n)
    extra = [p for p, _ in hermite] + [g.lam] + list(Y.points)
    xs = grid_union((-1.0, 1.0), grid_density, extra)
    psi = part.localization_weight(j, xs)
    w = psi ** (-exponent) / part.length(j) ** length_pow
    gx = g.eval(0, xs)

    V = C.chebvander(xs, degree)
    nv = degree + 2
    rows = [np.hstack([w[:, None] * V, -np.ones((xs.size, 1))]),
            np.hstack([-(w[:, None] * V), -np.ones((xs.size, 1))])]
    rhs = [w * gx, -(w * gx)]
    sgn_flip = 1.0 if upper else -1.0
    for lo, hi, sign in Y.intervals():
        mask = (xs >= lo) & (xs <= hi)
        if not mask.any():
            continue
        B = -sgn_flip * sign * V[mask]
        rows.append(np.hstack([B, np.zeros((B.shape[0], 1))]))
        rhs.append(-sgn_flip * sign * gx[mask])
    eq_rows, eq_rhs = [], []
    D = [np.eye(degree + 1)]
    for nu in range(1, max(o for _, o in hermite) + 1 if hermite else 1):
        D.append(cheb_derivative_operator(degree, nu))
    for pt, order in hermite:
        for nu in range(order + 1):
            row = np.zeros(nv)
            row[: degree + 1] = C.chebvander(np.array([pt]), degree)[0] @ D[nu]
            eq_rows.append(row)
            eq_rhs.append(float(g.eval(nu, pt)))
    cvec = np.zeros(nv)
    cvec[-1] = 1.0
    lp = LPProblem(cvec, np.vstack(rows), np.concatenate(rhs),
                   np.vstack(eq_rows) if eq_rows else None,
                   np.asarray(eq_rhs) if eq_rows else None)
    cert = simplex_solve(lp)
    if not cert.optimal:
        raise RuntimeError(f"base-pair LP not solvable: {cert.status}")
    return Chebyshev(cert.x[: degree + 1], domain=[-1, 1]), float(cert.value)


def build_even_pair(n, j, lam, m, Y: SignPattern, A: ConstraintSet, r,
                    mu, degree_factor=4, grid_density=2048) -> PairReport:
    """Intertwining pair for the even truncated power (x-lam)_+^m w.r.t. Y,
    with Hermite contact of order r at the points of Y, A and +-1, produced
    by the weighted-minimax LP at degree degree_factor * n."""
    if m % 2:
        raise ValueError("the base construction takes even exponents")
    g = TruncatedPower(m, lam)
    degree = degree_factor * n
    pts = sorted(set(Y.points) | {a for a in A.points} | {-1.0, 1.0})
    hermite = [(p, r) for p in pts]
    exponent = mu - m
    R1, e1 = _weighted_pair_lp(g, n, j, degree, exponent, m, Y, hermite, True, grid_density)
    R2, e2 = _weighted_pair_lp(g, n, j, degree, exponent, m, Y, hermite, False, grid_density)
    return PairReport(R1, R2, degree, max(e1, e2), mu, {"m": m, "lam": lam})


def lift_pair(base: PairReport, n, j, lam, m, Y: SignPattern, A: ConstraintSet,
              r, mu, grid_size=4096) -> PairReport:
    """Lift an even-exponent pair for (x-lam)_+^(m-1) w.r.t. Y + {y'} to an
    odd-exponent pair for (x-lam)_+^m w.r.t. Y.

    Multiplication by (x - lam) produces the right interpolation but leaves a
    sign defect on [y', lam]; adding the scaled correction removes it.  All
    postconditions are re-verified on the grid.
    """
    part = ChebyshevPartition(n)
    yprime = float(np.cos((2 * j + 1) * np.pi / (2 * n)))
    g_prev = TruncatedPower(m - 1, lam)
    g = TruncatedPower(m, lam)
    mu_prime = mu + (2 * r + 2) * (Y.s + A.p)
    corr = InterpolatoryCorrection(n, j, mu_prime, r, Y, A)

    xs = np.linspace(-1.0, 1.0, grid_size)
    xs = np.unique(np.concatenate([xs, np.asarray(list(Y.points) + [yprime, lam])]))
    h_norm = 0.0
    for R in (base.R1, base.R2):
        h = (xs - lam) * (R(xs) - g_prev.eval(0, xs))
        h_norm = max(h_norm, float(np.max(np.abs(h))))
    c1 = h_norm / part.length(j) ** m
    c2 = corr.floor_on(min(yprime, lam), max(yprime, lam))
    if c2 <= 0:
        raise ArithmeticError("correction floor vanished on the defect interval")
    scale = (c1 / c2) * part.length(j) ** m

    pts = sorted(set(Y.points) | set(A.points) | {-1.0, 1.0})
    L1 = LiftedPolynomial(base.R1, lam, corr, +1.0, scale, pts, r)
    L2 = LiftedPolynomial(base.R2, lam, corr, -1.0, scale, pts, r)

    psi = part.localization_weight(j, xs)
    werr = 0.0
    for L in (L1, L2):
        err = np.abs(L.eval(0, xs) - g.eval(0, xs))
        werr = max(werr, float(np.max(err / (psi ** (mu - m) * part.length(j) ** m))))
    return PairReport(L1, L2, base.degree + 1, werr, mu,
                      {"m": m, "lam": lam, "yprime": yprime, "c1": c1, "c2": c2,
                       "scale": scale, "base_weighted_error": base.weighted_error})


def build_truncated_power_pair(n, j, lam, m, Y: SignPattern, A: ConstraintSet,
                               r=0, mu=None, degree_factor=4) -> PairReport:
    """Intertwining pair for (x-lam)_+^m with Hermite contact of order r at
    Y, A and +-1.  Even exponents come straight from the LP oracle; odd ones
    go through the even base at doubled resolution plus the correction."""
    part = ChebyshevPartition(n)
    lo, hi = part.interval(j)
    if not lo <= lam <= hi:
        raise ValueError(f"lam must lie in the declared kernel interval [{lo:.6g}, {hi:.6g}]")
    if mu is None:
        mu = m + 32
    if m % 2 == 0:
        return build_even_pair(n, j, lam, m, Y, A, r, mu, degree_factor)
    yprime = float(np.cos((2 * j + 1) * np.pi / (2 * n)))
    Yp = SignPattern(tuple(sorted(set(Y.points) | {yprime}, reverse=True)))
    base = build_even_pair(2 * n, 2 * j, lam, m - 1, Yp, A, r, mu, degree_factor)

    return lift_pair(base, n, j, lam, m, Y, A, r, mu)
