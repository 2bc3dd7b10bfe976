"""Catalog of counterexample families for LP certification.

Each family packages a parametrized function (built exactly: piecewise
polynomials via repeated antidifferentiation, truncated powers, smooth-step
compositions, or closed-form log kernels), the constraint template its claim
quantifies over, and the normalizer its blowup is measured against.  The
grid LP relaxes the constraints soundly: the LP optimum lower-bounds the
continuum error, so growing ratios certify instances of the claims.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import numpy.polynomial.polynomial as P

from .core import FunctionModel, rate_weight
from .lporacle import (ConstrainedApproxProblem, LPProblem, _basis_rows,
                       default_grid, simplex_solve)
from .smoothness import modulus_value


# ---------------------------------------------------------------------------
# Exact piecewise-polynomial models


class PiecewisePoly:
    """Piecewise polynomial on ascending breaks; local power coefficients in
    (x - left_break).  Derivatives of any order are exact off the breaks."""

    def __init__(self, breaks, coeffs):
        self.breaks = np.asarray(breaks, dtype=float)
        self.coeffs = [np.asarray(c, dtype=float) for c in coeffs]
        if len(self.coeffs) != self.breaks.size - 1:
            raise ValueError("one coefficient row per piece")

    def eval(self, i, x):
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        xv = np.atleast_1d(x)
        out = np.zeros_like(xv)
        idx = np.clip(np.searchsorted(self.breaks, xv, side="right") - 1,
                      0, len(self.coeffs) - 1)
        for p in np.unique(idx):
            sel = idx == p
            c = P.polyder(self.coeffs[p], i) if i else self.coeffs[p]
            out[sel] = P.polyval(xv[sel] - self.breaks[p], c)
        return float(out[0]) if scalar else out

    def antiderivative(self, anchor_x, anchor_value=0.0):
        """Piecewise antiderivative equal to anchor_value at anchor_x."""
        new = []
        running = 0.0
        for p, c in enumerate(self.coeffs):
            ci = P.polyint(c)
            ci[0] = running
            new.append(ci)
            running = P.polyval(self.breaks[p + 1] - self.breaks[p], ci)
        out = PiecewisePoly(self.breaks, new)
        shift = out.eval(0, anchor_x) - anchor_value
        for c in out.coeffs:
            c[0] -= shift
        return out

    def shifted(self, const):
        out = PiecewisePoly(self.breaks, [c.copy() for c in self.coeffs])
        for c in out.coeffs:
            c[0] += const
        return out

    def model(self, name, smoothness, params=None):
        kinks = tuple(b for b in self.breaks[1:-1])
        return FunctionModel(name, self.eval, smoothness, params=params, kinks=kinks)


def _poly_in(center, coef_at_center, left):
    """Local power coefficients in (x - left) of sum c_j (x - center)^j."""
    shift = np.polynomial.Polynomial([left - center, 1.0])
    return np.polynomial.Polynomial(coef_at_center)(shift).coef


def taylor_kink_model(name, top_breaks, top_coeffs, integrate_times, anchors,
                      smoothness, params=None):
    """Antidifferentiate a piecewise-polynomial top derivative several times.

    anchors: list of (x, value) per integration step, outermost last; when
    shorter than integrate_times the first break with value 0 is used.
    """
    pp = PiecewisePoly(top_breaks, top_coeffs)
    for step in range(integrate_times):
        ax, av = anchors[step] if step < len(anchors) else (top_breaks[0], 0.0)
        pp = pp.antiderivative(ax, av)
    return pp, pp.model(name, smoothness, params)


# ---------------------------------------------------------------------------
# Closed-form model for the log-kernel impossibility families

class LogKernelModel:
    """f with f^(r)(x) = -x ln x on (0, 1], 0 on [-1, 0]; the Taylor integral
    from 0 has the closed form x^(m) (alpha ln x + beta) on x > 0."""

    def __init__(self, r):
        self.r = int(r)
        m, alpha, beta = 1, -1.0, 0.0
        self.terms = [(m, alpha, beta)]  # f^(r-i) parameters, i = index
        for _ in range(r):
            alpha = alpha / (m + 1)
            beta = (beta - alpha) / (m + 1)
            m += 1
            self.terms.append((m, alpha, beta))
        self.name = f"logkernel(r={r})"
        self.smoothness = r
        self.domain = (-1.0, 1.0)
        self.params = {"r": r}
        self.kinks = (0.0,)

    def eval(self, i, x):
        if i > self.r:
            raise ValueError(f"order {i} above smoothness {self.r}")
        m, alpha, beta = self.terms[self.r - i]
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        xv = np.atleast_1d(x)
        out = np.zeros_like(xv)
        pos = xv > 0
        out[pos] = xv[pos] ** m * (alpha * np.log(xv[pos]) + beta)
        return float(out[0]) if scalar else out

    def deriv_fn(self, i):
        return lambda x: self.eval(i, x)

    def __call__(self, x):
        return self.eval(0, x)


class GlueComposite:
    """f = base on [cut_hi, 1], base * step on the glue zone, 0 左 of it."""

    def __init__(self, base_model, a=-0.5, b=-0.25, smoothness=1, name="glued"):
        from .localpieces import SmoothStep

        self.base = base_model
        self.step = SmoothStep(a, b)
        self.a, self.b = a, b
        self.name = name
        self.smoothness = smoothness
        self.domain = (-1.0, 1.0)
        self.params = {"a": a, "b": b}
        self.kinks = tuple(getattr(base_model, "kinks", ())) + (a, b)

    def eval(self, i, x):
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        xv = np.atleast_1d(x)
        out = np.zeros_like(xv)
        mid = (xv > self.a) & (xv < self.b)
        right = xv >= self.b
        if right.any():
            out[right] = self.base.eval(i, xv[right])
        if mid.any():
            xm = xv[mid]
            acc = np.zeros_like(xm)
            for l in range(i + 1):
                acc += (math.comb(i, l) * self.base.eval(i - l, xm)
                        * np.asarray(self.step.deriv(l, xm)))
            out[mid] = acc
        return float(out[0]) if scalar else out

    def deriv_fn(self, i):
        return lambda x: self.eval(i, x)

    def __call__(self, x):
        return self.eval(0, x)


# ---------------------------------------------------------------------------
# Family plumbing


@dataclass
class NegativeInstance:
    """One instantiated counterexample: function, constraints, normalizer."""

    family_id: str
    param: float
    f: object
    hermite: tuple = ()          # (point, max_order) rows, values taken from f
    extra_eq: tuple = ()         # (point, nu, value) explicit equality rows
    sign_regions_fn: object = None   # n -> ((lo, hi, sign, target), ...)
    deriv_signs_fn: object = None    # n -> ((lo, hi, sign, q), ...)
    normalizer_fn: object = None     # resolution -> (value, label)
    weight_fn: object = None         # n -> callable w(x), for weighted minimax
    degree_override: int | None = None
    precondition_fn: object = None

    def approx_problem(self, n, grid_size=1024):
        degree = self.degree_override or n
        extra = [p for p, _ in self.hermite] + [p for p, _, _ in self.extra_eq]
        extra += list(getattr(self.f, "kinks", ()))
        grid = default_grid(size=grid_size, extra=extra)
        return ConstrainedApproxProblem(
            self.f, degree, grid,
            hermite=tuple(self.hermite),
            sign_regions=tuple(self.sign_regions_fn(n) if self.sign_regions_fn else ()),
            deriv_signs=tuple(self.deriv_signs_fn(n) if self.deriv_signs_fn else ()),
            extra_eq=tuple(self.extra_eq),
            weight=self.weight_fn(n) if self.weight_fn else None,
        )

    def normalizer(self, resolution=(256, 256)):
        return self.normalizer_fn(resolution)[0]

    def normalizer_label(self):
        return self.normalizer_fn((32, 32))[1]

    def precondition_ok(self, grid=2048):
        if self.precondition_fn is None:
            return True
        return bool(self.precondition_fn(grid))


@dataclass
class CounterexampleFamily:
    id: str
    description: str
    param_name: str
    default_sweep: tuple
    claim: str
    normalizer_desc: str
    make_instance: object = field(repr=False)
    supports_probe: bool = False
    param_is_degree: bool = False

    def instantiate(self, param) -> NegativeInstance:
        return self.make_instance(param)


def _nonneg_shape(f, lo=-1.0, hi=1.0):
    def check(grid):
        xs = np.linspace(lo, hi, grid)
        v = f.eval(0, xs)
        return float(np.min(v)) >= -1e-10 * (1.0 + float(np.max(np.abs(v))))
    return check


def _copositive_shape(f, y=0.0):
    def check(grid):
        xs = np.linspace(-1.0, 1.0, grid)
        v = f.eval(0, xs)
        worst = float(np.min(np.where(xs >= y, v, -v)))
        return worst >= -1e-10 * (1.0 + float(np.max(np.abs(v))))
    return check


# ---------------------------------------------------------------------------
# Family constructors


def _lemma23(eps, lam=0.5):
    kinks = (lam - eps, lam)

    def deriv(i, x):
        if i != 0:
            raise ValueError("continuous family: values only")
        x = np.asarray(x, dtype=float)
        return np.maximum((x - lam) * (x - lam + eps) / eps**2, 0.0)

    f = FunctionModel("lemma23", deriv, 0, params={"eps": eps, "lambda": lam}, kinks=kinks)
    return NegativeInstance(
        "lemma23", eps, f,
        hermite=((lam, 0),),
        sign_regions_fn=lambda n: ((-1.0, 1.0, 1.0, "P"),),
        normalizer_fn=lambda res: (modulus_value(f.deriv_fn(0), 3, 1.0, (-1, 1), res),
                                   "omega_3(f, 1)"),
        precondition_fn=_nonneg_shape(f),
    )


def _tmplem(lam):
    def deriv(i, x):
        if i != 0:
            raise ValueError("continuous family: values only")
        x = np.asarray(x, dtype=float)
        return np.maximum((x - lam) / (lam + 1.0), 0.0)

    f = FunctionModel("tmplem", deriv, 0, params={"lambda": lam}, kinks=(lam,))
    return NegativeInstance(
        "tmplem", lam, f,
        hermite=((lam, 0),),
        sign_regions_fn=lambda n: ((-1.0, 1.0, 1.0, "P"),),
        normalizer_fn=lambda res: (modulus_value(f.deriv_fn(0), 2, 1.0, (-1, 1), res),
                                   "omega_2(f, 1)"),
        precondition_fn=_nonneg_shape(f),
    )


def _tmplemder(lam):
    def deriv(i, x):
        x = np.asarray(x, dtype=float)
        if i == 0:
            return np.maximum((x - lam) ** 3 / (lam + 1.0) ** 2, 0.0)
        if i == 1:
            return 3.0 * np.clip(x - lam, 0.0, None) ** 2 / (lam + 1.0) ** 2
        raise ValueError("C^1 family")

    f = FunctionModel("tmplemder", deriv, 1, params={"lambda": lam}, kinks=(lam,))
    return NegativeInstance(
        "tmplemder", lam, f,
        hermite=((lam, 0),),
        sign_regions_fn=lambda n: ((-1.0, 1.0, 1.0, "P"),),
        normalizer_fn=lambda res: (modulus_value(f.deriv_fn(1), 3, 1.0, (-1, 1), res),
                                   "omega_3(f', 1)"),
        precondition_fn=_nonneg_shape(f),
    )


def _lemma30(eps, r=2, lam=0.5, ys_variant=False):
    """Even-r family (odd r for the sign-change variant): f^(r) is a bump
    -(x-lam)(x-lam+eps)/eps^2 supported on [lam-eps, lam]."""
    breaks = [-1.0, lam - eps, lam, 1.0]
    # -(x-lam)(x-lam+eps)/eps^2 = -(t/eps + t^2/eps^2) with t = x - lam
    bump = _poly_in(lam, np.array([0.0, -1.0 / eps, -1.0 / eps**2]), lam - eps)
    coeffs = [np.zeros(1), bump, np.zeros(1)]
    pp, model = taylor_kink_model(
        f"lemma30(r={r})", breaks, coeffs, r, [(lam - eps, 0.0)] * r, r,
        params={"eps": eps, "r": r, "lambda": lam})
    if ys_variant:
        q0 = float(model.eval(0, lam))
        pp2 = pp.shifted(-q0)
        model = pp2.model(f"lemma30ys(r={r})", r, params={"eps": eps, "r": r})
    return model


def _lemma30_instance(eps, r=2, lam=0.5):
    f = _lemma30(eps, r, lam)
    return NegativeInstance(
        "lemma30", eps, f,
        hermite=((lam, r),),
        sign_regions_fn=lambda n: ((lam - 1.0 / n, lam, 1.0, "P"),),
        normalizer_fn=lambda res: (_grid_sup(f, r), "sup |f^(r)|"),
        precondition_fn=_nonneg_shape(f),
    )


def _lemma30ys_instance(eps, r=3):
    f = _lemma30(eps, r, 0.0, ys_variant=True)
    return NegativeInstance(
        "lemma30ys", eps, f,
        hermite=((0.0, r),),
        sign_regions_fn=lambda n: ((-1.0 / n, 0.0, -1.0, "P"),),
        normalizer_fn=lambda res: (_grid_sup(f, r), "sup |f^(r)|"),
        precondition_fn=_copositive_shape(f),
    )


def _lemma28_instance(eps, r=1, lam=0.5):
    breaks = [-1.0, lam - eps, lam, 1.0]
    ramp = np.array([0.0, 1.0 / eps])
    coeffs = [np.zeros(1), ramp, np.ones(1)]
    _, f = taylor_kink_model(
        f"lemma28(r={r})", breaks, coeffs, r, [(lam - eps, 0.0)] * r, r,
        params={"eps": eps, "r": r, "lambda": lam})
    return NegativeInstance(
        "lemma28", eps, f,
        hermite=((lam, r),),
        sign_regions_fn=lambda n: ((lam - 1.0 / n, lam, 1.0, "P"),),
        normalizer_fn=lambda res: (_grid_sup(f, r), "sup |f^(r)|"),
        precondition_fn=_nonneg_shape(f),
    )


def _lemma50(eps, r):
    """f^(r-1) = x^2 (x+eps)^2 / eps^3 on [-eps, 0], zero elsewhere."""
    breaks = [-1.0, -eps, 0.0, 1.0]
    # x^2(x+eps)^2/eps^3 in powers of (x + eps):  t^2 (t - eps)^2 / eps^3
    quart = np.array([0.0, 0.0, 1.0 / eps, -2.0 / eps**2, 1.0 / eps**3])
    coeffs = [np.zeros(1), quart, np.zeros(1)]
    pp, model = taylor_kink_model(
        f"lemma50(r={r})", breaks, coeffs, r - 1, [(-eps, 0.0)] * (r - 1), r,
        params={"eps": eps, "r": r})
    return pp, model


def _lemma50_instance(eps, r=3):
    _, f = _lemma50(eps, r)
    return NegativeInstance(
        "lemma50", eps, f,
        hermite=((0.0, r - 1),),
        sign_regions_fn=lambda n: ((-0.5, 0.5, 1.0, "P"),),
        normalizer_fn=lambda res: (_grid_sup(f, r), "sup |f^(r)|"),
        precondition_fn=_nonneg_shape(f),
    )


def _lemma50ys_instance(eps, r=4):
    pp, model = _lemma50(eps, r)
    q0 = float(model.eval(0, 0.0))
    f = pp.shifted(-q0).model(f"lemma50ys(r={r})", r, params={"eps": eps, "r": r})
    return NegativeInstance(
        "lemma50ys", eps, f,
        hermite=((0.0, r - 1),),
        sign_regions_fn=lambda n: ((-1.0, 0.0, -1.0, "P"), (0.0, 1.0, 1.0, "P")),
        normalizer_fn=lambda res: (_grid_sup(f, r), "sup |f^(r)|"),
        precondition_fn=_copositive_shape(f),
    )


def _lemma40_instance(eps):
    breaks = [-1.0, 0.0, eps, 1.0]
    quad0 = _poly_in(0.0, np.array([0.0, -1.0 / eps, 1.0 / eps**2]), -1.0)
    quad2 = _poly_in(0.0, np.array([0.0, -1.0 / eps, 1.0 / eps**2]), eps)
    coeffs = [quad0, np.zeros(1), quad2]
    _, f = taylor_kink_model("lemma40", breaks, coeffs, 1, [(0.0, 0.0)], 1,
                             params={"eps": eps})
    return NegativeInstance(
        "lemma40", eps, f,
        hermite=((0.0, 1),),
        sign_regions_fn=lambda n: ((0.0, 1.0 / n, 1.0, "P"),),
        normalizer_fn=lambda res: (modulus_value(f.deriv_fn(1), 3, 1.0, (-1, 1), res),
                                   "omega_3(f', 1)"),
        precondition_fn=_copositive_shape(f),
    )


def _lemmam22_instance(eps):
    breaks = [-1.0, -eps, eps, 1.0]
    cub = np.array([0.0, -1.0 / eps, 0.0, 1.0 / eps**3])  # x(x^2-eps^2)/eps^3 at 0
    coeffs = [_poly_in(0.0, cub, -1.0), np.zeros(1), _poly_in(0.0, cub, eps)]
    _, f = taylor_kink_model("lemmam22", breaks, coeffs, 2,
                             [(0.0, 0.0), (0.0, 0.0)], 2, params={"eps": eps})
    return NegativeInstance(
        "lemmam22", eps, f,
        hermite=((0.0, 1),),
        sign_regions_fn=lambda n: ((-1.0, 0.0, -1.0, "P"), (0.0, 1.0, 1.0, "P")),
        normalizer_fn=lambda res: (modulus_value(f.deriv_fn(2), 4, 1.0, (-1, 1), res),
                                   "omega_4(f'', 1)"),
        precondition_fn=_copositive_shape(f),
    )


def _march21_instance(eps):
    breaks = [-1.0, 0.0, eps, 1.0]
    coeffs = [np.full(1, -1.0), np.array([-1.0, 1.0 / eps]), np.zeros(1)]
    pp = PiecewisePoly(breaks, coeffs)
    fprime = pp.antiderivative(eps, 0.0)
    fpp = fprime.antiderivative(0.0, 0.0)
    f = fpp.model("march21", 2, params={"eps": eps})
    return NegativeInstance(
        "march21", eps, f,
        hermite=((0.0, 2),),
        sign_regions_fn=lambda n: ((-1.0, 0.0, -1.0, "P"), (0.0, 1.0, 1.0, "P")),
        normalizer_fn=lambda res: (_grid_sup(f, 2), "sup |f''|"),
        precondition_fn=_copositive_shape(f),
    )


def _lemma2003new_instance(n_param, lam=0.5):
    n_param = int(n_param)
    eps = rate_weight(n_param, lam) ** 1.5

    class _Q:
        smoothness = 1
        kinks = ()

        @staticmethod
        def eval(i, x):
            x = np.asarray(x, dtype=float)
            if i == 0:
                return (x - lam) * (x - lam + eps)
            if i == 1:
                return 2.0 * (x - lam) + eps
            return np.full_like(x, 2.0 if i == 2 else 0.0)

    # f = Q off [lam-eps, lam]; 0 between; glued to 0 left of -1/4
    def core_eval(i, x):
        x = np.asarray(x, dtype=float)
        out = np.asarray(_Q.eval(i, x), dtype=float).copy()
        dead = (x >= lam - eps) & (x <= lam)
        out[dead] = 0.0
        return out

    core = FunctionModel("lemma2003core", core_eval, 1, kinks=(lam - eps, lam))
    f = GlueComposite(core, -0.5, -0.25, smoothness=0, name=f"lemma2003new(n={n_param})")
    f.kinks = (lam - eps, lam, -0.5, -0.25)

    def weight(n):
        floor = rate_weight(n_param, lam) ** 3
        return lambda x: 1.0 / np.maximum(rate_weight(n_param, x) ** 3, floor)

    # P(lam) = 0 and P'(lam) = 0 are valid consequences of nonnegativity near
    # an interior lam with P(lam) = 0, so the relaxation stays sound.
    return NegativeInstance(
        "lemma2003new", n_param, f,
        hermite=((lam, 0),),
        extra_eq=((lam, 1, 0.0),),
        normalizer_fn=lambda res: (math.sqrt(n_param), "sqrt(n)"),
        weight_fn=weight,
        degree_override=n_param,
        precondition_fn=_nonneg_shape(f),
    )


def _lemma205_instance(n_param, lam=0.0):
    n_param = int(n_param)
    eps = float(n_param) ** (-4.0 / 3.0)
    breaks = [-1.0, lam, lam + eps, 1.0]
    # g' = 12 (x-lam)^2 (x-lam-eps) off [lam, lam+eps], 0 on it; g anchored g(lam)=0
    gp_left = _poly_in(lam, np.array([0.0, 0.0, -12.0 * eps, 12.0]), -1.0)
    gp_right = _poly_in(lam, np.array([0.0, 0.0, -12.0 * eps, 12.0]), lam + eps)
    gp = PiecewisePoly(breaks, [gp_left, np.zeros(1), gp_right])
    g = gp.antiderivative(lam, 0.0)
    core = g.model("lemma205core", 1, params={"eps": eps})
    f = GlueComposite(core, -0.5, -0.25, smoothness=1, name=f"lemma205(n={n_param})")

    # pointwise-weighted form: max |f - P| / (rho_n(x) omega_4(f', rho_n(x)))
    # exceeds any multiple of n^(1/3) along a subsequence; the modulus values
    # are precomputed on a logarithmic ladder of scales and interpolated.
    def weight(n):
        ts = np.geomspace(1.0 / n_param**2, rate_weight(n_param, 0.0), 14)
        oms = np.array([modulus_value(f.deriv_fn(1), 4, float(t), (-1, 1), (128, 128))
                        for t in ts])
        oms = np.maximum.accumulate(np.maximum(oms, 1e-300))

        def w(x):
            rho = rate_weight(n_param, x)
            om = np.interp(rho, ts, oms)
            return 1.0 / (rho * om)

        return w

    return NegativeInstance(
        "lemma205", n_param, f,
        hermite=((lam, 0),),
        extra_eq=((lam, 1, 0.0),),
        sign_regions_fn=lambda n: ((lam - 1.0 / n_param, lam + 1.0 / n_param, 1.0, "P"),),
        normalizer_fn=lambda res: (float(n_param) ** (1.0 / 3.0), "n^(1/3)"),
        weight_fn=weight,
        degree_override=n_param,
        precondition_fn=_nonneg_shape(f),
    )


def _lem1_instance(q=1, y1=-0.5):
    xi = (1.0 + y1) / 2.0
    alphas = {1: (0.8, 0.1, -0.2)}[int(q)]

    class _TP:
        smoothness = 8
        kinks = (xi,)

        @staticmethod
        def eval(i, x):
            x = np.asarray(x, dtype=float)
            if i == 0:
                return np.clip(x - xi, 0.0, None) ** q
            if i <= q:
                fac = math.factorial(q) / math.factorial(q - i)
                return fac * np.clip(x - xi, 0.0, None) ** (q - i)
            return np.zeros_like(x)

    f = FunctionModel("lem1", _TP.eval, 8, params={"q": q, "y1": y1}, kinks=(xi,))
    return NegativeInstance(
        "lem1", q, f,
        hermite=tuple((a, 0) for a in alphas),
        deriv_signs_fn=lambda n: ((y1, 1.0, 1.0, q),),
        normalizer_fn=lambda res: (1.0, "1"),
    )


def _osneg_instance(r):
    f = LogKernelModel(r)
    return NegativeInstance("osneg", r, f)


def _interneg_instance(r):
    f = LogKernelModel(r)
    return NegativeInstance("interneg", r, f)


def _grid_sup(f, order, grid=8192):
    xs = np.linspace(-1.0, 1.0, grid)
    return float(np.max(np.abs(f.eval(order, xs))))


_EPS_SWEEP = tuple(2.0 ** -i for i in range(2, 11))
_LAM_SWEEP = tuple(-1.0 + 2.0 ** -i for i in range(1, 9))
_N_SWEEP = (4, 8, 16, 32)

_FAMILIES = [
    CounterexampleFamily(
        "lem1", "q-monotone interpolation is impossible: the grid LP with "
        "monotonicity rows and the interpolation conditions is infeasible",
        "q", (1,), "feasible set empty for every n", "1", _lem1_instance),
    CounterexampleFamily(
        "lemma23", "positive approximation with one interpolation point: "
        "error/omega_3(f,1) diverges as the bump narrows",
        "eps", _EPS_SWEEP, "ratio -> infinity as eps -> 0", "omega_3(f, 1)",
        _lemma23),
    CounterexampleFamily(
        "lemma2003new", "copositive interpolation at lam: weighted error "
        "exceeds any multiple of sqrt(n) along a subsequence",
        "n", (4, 8, 16), "weighted ratio / sqrt(n) grows", "sqrt(n)",
        _lemma2003new_instance, param_is_degree=True),
    CounterexampleFamily(
        "lemma205", "C^1 copositive interpolation at interior lam: the "
        "pointwise-weighted error exceeds any multiple of n^(1/3) along a "
        "subsequence (the feature scale eps^4 = n^(-16/3) leaves double "
        "precision almost immediately, so rows are reported per n, not "
        "asserted as a growing sweep)",
        "n", (2, 3, 4), "weighted ratio vs n^(1/3) reported per n", "n^(1/3)",
        _lemma205_instance, param_is_degree=True),
    CounterexampleFamily(
        "lemma30", "even r: full Hermite order r at lam kills the rate; "
        "error/||f^(r)|| diverges as eps -> 0",
        "eps", _EPS_SWEEP, "ratio -> infinity", "sup |f^(r)|", _lemma30_instance),
    CounterexampleFamily(
        "lemma28", "odd r: full Hermite order r at lam kills the rate",
        "eps", _EPS_SWEEP, "ratio -> infinity", "sup |f^(r)|", _lemma28_instance),
    CounterexampleFamily(
        "lemma50", "odd r >= 3: Hermite order r-1 at an interior point "
        "already kills the rate",
        "eps", _EPS_SWEEP, "ratio -> infinity", "sup |f^(r)|", _lemma50_instance),
    CounterexampleFamily(
        "lemma40", "first-order Hermite contact at a sign change: error vs "
        "omega_3(f', 1) diverges",
        "eps", _EPS_SWEEP, "ratio -> infinity", "omega_3(f', 1)", _lemma40_instance),
    CounterexampleFamily(
        "lemmam22", "C^2 copositive with first-order contact at the sign "
        "change: omega_4(f'', 1) cannot replace omega_3",
        "eps", tuple(2.0 ** -i for i in range(2, 10)), "ratio -> infinity",
        "omega_4(f'', 1)", _lemmam22_instance),
    CounterexampleFamily(
        "march21", "C^2 copositive with second-order contact at the sign "
        "change: error/||f''|| diverges",
        "eps", _EPS_SWEEP, "ratio -> infinity", "sup |f''|", _march21_instance),
    CounterexampleFamily(
        "lemma30ys", "odd r >= 3: full Hermite order r at the sign change",
        "eps", _EPS_SWEEP, "ratio -> infinity", "sup |f^(r)|", _lemma30ys_instance),
    CounterexampleFamily(
        "lemma50ys", "even r >= 4: Hermite order r-1 at the sign change "
        "plus copositivity",
        "eps", tuple(2.0 ** -i for i in range(2, 8)), "ratio -> infinity",
        "sup |f^(r)|", _lemma50ys_instance),
    CounterexampleFamily(
        "tmplem", "interpolation point drifting to the endpoint: the "
        "constant must depend on the separation",
        "lambda", _LAM_SWEEP, "ratio grows like 1/(lambda+1)", "omega_2(f, 1)",
        _tmplem),
    CounterexampleFamily(
        "tmplemder", "C^1 variant of the endpoint-drift family",
        "lambda", tuple(-1.0 + 2.0 ** -i for i in range(1, 7)),
        "ratio grows like 1/(lambda+1)", "omega_3(f', 1)", _tmplemder),
    CounterexampleFamily(
        "osneg", "onesided contact of order 2*floor(r/2) at a point where "
        "f^(r) has a log kink forces unbounded P^(r+1)",
        "r", (0, 1, 2), "min |P^(r+1)(lam)| grows as the window shrinks",
        "1", _osneg_instance, supports_probe=True),
    CounterexampleFamily(
        "interneg", "intertwining contact of order 2*ceil(r/2)-1 at a log "
        "kink forces unbounded P^(r+1)",
        "r", (1, 2), "min |P^(r+1)(lam)| grows as the window shrinks",
        "1", _interneg_instance, supports_probe=True),
]

_BY_ID = {fam.id: fam for fam in _FAMILIES}


def catalog():
    """All counterexample families, each constructible."""
    return list(_FAMILIES)


def family(family_id) -> CounterexampleFamily:
    try:
        return _BY_ID[family_id]
    except KeyError:
        raise KeyError(f"unknown family {family_id!r}; known: {', '.join(sorted(_BY_ID))}") from None


def instantiate(family_id, param) -> NegativeInstance:
    return family(family_id).instantiate(param)


def induced_markov_probe(family_id, r, n, radii=None, grid_per_radius=128,
                         depth=12):
    """Growth table of the smallest achievable sup of P^(r+1) over shrinking
    windows, under the onesided (or intertwining) and Hermite constraints.

    The underlying impossibility forces the (r+1)-st derivative of any
    admissible function above -ln(u) - 1 somewhere arbitrarily close to the
    contact point, so the minimized window maximum must grow as the window
    (and its geometric grid, clustered at the contact point) shrinks.  A
    finite LP cannot certify the continuum claim itself -- it quantifies over
    all C^(r+1) functions -- so the table is reported, not asserted.
    """
    fam = family(family_id)
    if not fam.supports_probe:
        raise ValueError(f"{family_id!r} does not support the probe")
    inst = fam.instantiate(r)
    f = inst.f
    if radii is None:
        radii = tuple(0.25 ** i for i in range(1, 5))
    if family_id == "osneg":
        rbar = 2 * (r // 2)
        two_sided = False
    else:
        rbar = 2 * ((r + 1) // 2) - 1
        two_sided = True

    rows = []
    for radius in radii:
        # window-local basis: the global basis restricted to a tiny window has
        # nearly collinear columns and breaks the solver
        win = (-radius, radius)
        pos = radius * 2.0 ** (-np.arange(depth, dtype=float))
        xs = np.unique(np.concatenate([np.linspace(-radius, radius, grid_per_radius),
                                       pos, -pos]))
        V = _basis_rows(xs, n, win)
        nv = n + 2
        rows_ub, rhs_ub = [], []
        fx = f.eval(0, xs)
        if two_sided:
            right = xs >= 0
            left = xs <= 0
            A1 = V[right]
            rows_ub.append(np.hstack([-A1, np.zeros((A1.shape[0], 1))]))
            rhs_ub.append(-fx[right])
            A2 = V[left]
            rows_ub.append(np.hstack([A2, np.zeros((A2.shape[0], 1))]))
            rhs_ub.append(fx[left])
        else:
            rows_ub.append(np.hstack([-V, np.zeros((V.shape[0], 1))]))
            rhs_ub.append(-fx)
        # minimize the window maximum of P^(r+1)
        Vd = _basis_rows(pos, n, win, r + 1)
        rows_ub.append(np.hstack([Vd, -np.ones((Vd.shape[0], 1))]))
        rhs_ub.append(np.zeros(Vd.shape[0]))

        eq_rows, eq_rhs = [], []
        for nu in range(rbar + 1):
            row = np.zeros(nv)
            row[: n + 1] = _basis_rows(np.array([0.0]), n, win, nu)[0]
            eq_rows.append(row)
            eq_rhs.append(0.0)
        cvec = np.zeros(nv)
        cvec[-1] = 1.0
        cert = simplex_solve(LPProblem(cvec, np.vstack(rows_ub), np.concatenate(rhs_ub),
                                       np.vstack(eq_rows), np.asarray(eq_rhs)))
        rows.append({
            "radius": radius,
            "min_max_deriv": cert.value if cert.optimal else math.inf,
            "status": cert.status,
        })
    return rows
