"""Domain types and the generic membership checker.

Everything downstream is built on the objects defined here: functions with
exact derivatives (FunctionModel), sign-change sets and Hermite constraint
sets, admissible family tuples, the Chebyshev partition of [-1, 1], and the
pointwise rate weight n^-1*sqrt(1-x^2) + n^-2 that governs pointwise
polynomial approximation rates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

I = (-1.0, 1.0)

# Relative slack treating tiny sign violations at exact-zero boundaries as zero.
SIGN_SLACK = 1e-10
# Relative tolerance for Hermite interpolation residuals.
HERMITE_SLACK = 1e-9


def rate_weight(n, x):
    """Pointwise approximation rate weight n^-1*sqrt(1-x^2) + n^-2 on [-1, 1]."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1.0 + 1e-14):
        raise ValueError("rate_weight requires |x| <= 1")
    arg = np.clip(1.0 - x * x, 0.0, None)
    out = np.sqrt(arg) / n + 1.0 / (n * n)
    return float(out) if out.ndim == 0 else out


class ChebyshevPartition:
    """Partition of [-1, 1] by the nodes cos(j*pi/n), j = 0..n.

    Indexing follows the decreasing-node convention: node(0) = 1,
    node(n) = -1, interval(j) = [node(j), node(j-1)] for 1 <= j <= n.
    Out-of-range indices clamp to +-1.
    """

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("partition needs n >= 1")
        self.n = n
        self.nodes = np.cos(np.arange(n + 1) * np.pi / n)
        self.nodes[0] = 1.0
        self.nodes[n] = -1.0

    def node(self, j: int) -> float:
        if j < 0:
            return 1.0
        if j > self.n:
            return -1.0
        return float(self.nodes[j])

    def interval(self, j: int) -> tuple[float, float]:
        if not 1 <= j <= self.n:
            raise IndexError(f"interval index {j} out of range 1..{self.n}")
        return float(self.nodes[j]), float(self.nodes[j - 1])

    def length(self, j: int) -> float:
        a, b = self.interval(j)
        return b - a

    def localization_weight(self, j: int, x):
        """|I_j| / (|x - x_j| + |I_j|); equals 1 at the node x_j."""
        if not 1 <= j <= self.n:
            raise IndexError(f"interval index {j} out of range 1..{self.n}")
        h = self.length(j)
        x = np.asarray(x, dtype=float)
        out = h / (np.abs(x - self.nodes[j]) + h)
        return float(out) if out.ndim == 0 else out


def localization_weight(n: int, j: int, x):
    return ChebyshevPartition(n).localization_weight(j, x)


@dataclass(frozen=True)
class SignPattern:
    """Sign-change points y_1 > ... > y_s in (-1, 1).

    The parity convention: on [y_{i+1}, y_i] (with y_0 = 1, y_{s+1} = -1) a
    compatible function carries the sign (-1)^i, so it is nonnegative on the
    rightmost interval.
    """

    points: tuple[float, ...] = ()

    def __post_init__(self):
        pts = tuple(float(p) for p in self.points)
        if any(not -1.0 < p < 1.0 for p in pts):
            raise ValueError("sign-change points must lie in the open interval (-1, 1)")
        if any(pts[i] <= pts[i + 1] for i in range(len(pts) - 1)):
            raise ValueError("sign-change points must be strictly decreasing")
        object.__setattr__(self, "points", pts)

    @property
    def s(self) -> int:
        return len(self.points)

    def interval_index(self, x):
        """Index i with x in [y_{i+1}, y_i]; vectorized."""
        x = np.asarray(x, dtype=float)
        pts = np.asarray(self.points)
        idx = (pts[None, ...] > x[..., None]).sum(axis=-1) if pts.size else np.zeros(x.shape, dtype=int)
        return int(idx) if np.ndim(idx) == 0 or idx.shape == () else idx

    def sign(self, x):
        """(-1)^i at x; undefined exactly at the points (returns the right limit)."""
        idx = np.asarray(self.interval_index(x))
        out = np.where(idx % 2 == 0, 1.0, -1.0)
        return float(out) if out.ndim == 0 else out

    def intervals(self):
        """All (lo, hi, parity_sign) triples, rightmost first."""
        ys = (1.0,) + self.points + (-1.0,)
        return [(ys[i + 1], ys[i], 1.0 if i % 2 == 0 else -1.0) for i in range(len(ys) - 1)]


@dataclass(frozen=True)
class ConstraintSet:
    """Hermite constraint points with orders, stored right-to-left.

    pairs = ((alpha_1, order_1), ...) with 1 >= alpha_1 > ... > alpha_p >= -1.
    """

    pairs: tuple[tuple[float, int], ...] = ()

    def __post_init__(self):
        pr = tuple((float(a), int(m)) for a, m in self.pairs)
        pts = [a for a, _ in pr]
        if any(not -1.0 <= a <= 1.0 for a in pts):
            raise ValueError("constraint points must lie in [-1, 1]")
        if any(pts[i] <= pts[i + 1] for i in range(len(pts) - 1)):
            raise ValueError("constraint points must be strictly decreasing")
        if any(m < 0 for _, m in pr):
            raise ValueError("Hermite orders must be nonnegative")
        object.__setattr__(self, "pairs", pr)

    @property
    def points(self) -> tuple[float, ...]:
        return tuple(a for a, _ in self.pairs)

    @property
    def p(self) -> int:
        return len(self.pairs)

    def order_at(self, a: float) -> int:
        for pt, m in self.pairs:
            if pt == a:
                return m
        raise KeyError(a)


def separation(Y: SignPattern, A: ConstraintSet) -> float:
    """Smallest positive gap among the points of Y, A and +-1.

    Y and A must be disjoint; a shared point is a validation error.
    """
    ay = set(Y.points)
    aa = set(A.points)
    clash = ay & aa
    if clash:
        raise ValueError(f"sign-change and constraint sets share points: {sorted(clash)}")
    pts = sorted(ay | aa | {-1.0, 1.0})
    gaps = [b - a for a, b in zip(pts, pts[1:]) if b > a]
    return min(gaps)


FAMILIES = ("intertwining", "onesided", "copositive", "positive")


@dataclass(frozen=True)
class SpecTuple:
    """Admissible index tuple (r, k, m1, m2, m3) of one approximation family.

    m2 is None for the onesided/positive families (no sign-change set).
    m1 = -1 means interpolation at interior constraint points is waived.
    """

    family: str
    r: int
    k: int
    m1: int
    m2: int | None
    m3: int

    def orders(self):
        return self.m1, self.m2, self.m3


def _intertwining_orders(r: int):
    if r % 2 == 0:
        return r - 1, r - 2, r - 1
    return r - 2, r - 1, r - 1


def validate_spec(t: SpecTuple):
    """Accept exactly the admissible tuples of each family.

    Returns (True, "") or (False, reason) naming the offending coordinate.
    """
    if t.family not in FAMILIES:
        return False, f"unknown family {t.family!r}"
    if t.k < 1:
        return False, f"k={t.k} must be >= 1"

    if t.family in ("intertwining", "onesided"):
        if t.r < 1:
            return False, f"r={t.r} is not admissible for {t.family} approximation (r >= 1 required)"
        m1, m2, m3 = _intertwining_orders(t.r)
        if t.m1 != m1:
            return False, f"m1={t.m1} must be {m1} for r={t.r}"
        if t.family == "intertwining" and t.m2 != m2:
            return False, f"m2={t.m2} must be {m2} for r={t.r}"
        if t.family == "onesided" and t.m2 is not None:
            return False, "onesided tuples carry no m2"
        if t.m3 != m3:
            return False, f"m3={t.m3} must be {m3} for r={t.r}"
        return True, ""

    # copositive / positive
    key = (t.r, t.k, t.m1, t.m2, t.m3)
    sporadic = {
        (0, 2, 0, 0, 0),
        (1, 3, 0, 0, 0),
        (1, 2, 0, 1, 0),
        (2, 3, 1, 1, 1),
    }
    if t.family == "positive":
        if t.m2 is not None:
            return False, "positive tuples carry no m2"
        # lift to the copositive tuple with the admissible m2
        if (t.r, t.k, t.m1, t.m3) in {(0, 2, 0, 0), (1, 2, 0, 0), (1, 3, 0, 0), (2, 3, 1, 1)}:
            return True, ""
        key = None
    if key in sporadic:
        return True, ""
    # generic rows: m1 = -1 escape for r = 1, else the parity table
    if t.r == 1 and t.m1 == -1 and (t.m2 in (0, None)) and t.m3 == 0:
        return True, ""
    if t.r >= 2:
        m1, m2, m3 = _intertwining_orders(t.r)
        if t.r == 2 and t.family == "copositive":
            m2 = 0  # generic r=2 copositive row
        if t.m1 != m1:
            return False, f"m1={t.m1} must be {m1} for r={t.r}"
        if t.family == "copositive" and t.m2 != m2:
            return False, f"m2={t.m2} must be {m2} for r={t.r} (k={t.k})"
        if t.m3 != m3:
            return False, f"m3={t.m3} must be {m3} for r={t.r}"
        return True, ""
    return False, f"(r,k,m1,m2,m3)={(t.r, t.k, t.m1, t.m2, t.m3)} is not an admissible {t.family} tuple"


def require_valid_spec(t: SpecTuple):
    ok, reason = validate_spec(t)
    if not ok:
        raise ValueError(f"spec tuple rejected: {reason}")


class FunctionModel:
    """A function on an interval with exact derivatives up to a declared order.

    deriv(i, x) must be defined and finite for all x in the domain and all
    0 <= i <= smoothness.  Derivatives are supplied analytically by the
    registry; no symbolic machinery is involved.
    """

    def __init__(self, name, deriv, smoothness, domain=I, params=None, kinks=()):
        self.name = name
        self._deriv = deriv
        self.smoothness = int(smoothness)
        self.domain = (float(domain[0]), float(domain[1]))
        self.params = dict(params or {})
        self.kinks = tuple(float(k) for k in kinks)

    def eval(self, i, x):
        if i < 0 or i > self.smoothness:
            raise ValueError(
                f"derivative order {i} outside declared smoothness 0..{self.smoothness} of {self.name!r}"
            )
        x = np.asarray(x, dtype=float)
        lo, hi = self.domain
        if np.any(x < lo - 1e-12) or np.any(x > hi + 1e-12):
            raise ValueError(f"argument outside domain [{lo}, {hi}] of {self.name!r}")
        out = np.asarray(self._deriv(i, x), dtype=float)
        return float(out) if out.ndim == 0 else out

    def __call__(self, x):
        return self.eval(0, x)

    def deriv_fn(self, i):
        return lambda x: self.eval(i, x)

    def restricted(self, a, b):
        """Same function, narrower domain."""
        return FunctionModel(self.name, self._deriv, self.smoothness, (a, b), self.params, self.kinks)

    def __neg__(self):
        return FunctionModel(f"-{self.name}", lambda i, x: -self._deriv(i, x),
                             self.smoothness, self.domain, self.params, self.kinks)

    def affine_pullback(self, a, b):
        """g(u) = f(mid + u*h/2) on [-1, 1], with derivatives scaled by (h/2)^i."""
        a, b = float(a), float(b)
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        if half <= 0:
            raise ValueError("degenerate interval")

        def deriv(i, u):
            return half**i * self._deriv(i, mid + half * np.asarray(u, dtype=float))

        kinks = tuple((k - mid) / half for k in self.kinks if a <= k <= b)
        return FunctionModel(f"{self.name}|[{a:.3g},{b:.3g}]", deriv, self.smoothness,
                             I, self.params, kinks)

    def __repr__(self):
        return f"FunctionModel({self.name!r}, r={self.smoothness}, domain={self.domain})"


def as_eval(f):
    """Normalize FunctionModel / callable to a plain value-callable."""
    if isinstance(f, FunctionModel):
        return f.deriv_fn(0)
    return f


def grid_union(interval, density=2048, extra=()):
    """Uniform grid at `density` points per unit length plus the given extras."""
    a, b = float(interval[0]), float(interval[1])
    npts = max(int(math.ceil((b - a) * density)) + 1, 16)
    g = np.linspace(a, b, npts)
    if len(extra):
        g = np.unique(np.concatenate([g, np.asarray(extra, dtype=float)]))
    return g


def _eval_derivative(g, i, x):
    """Evaluate the i-th derivative of g, accepting several polynomial-ish types."""
    x = np.asarray(x, dtype=float)
    if isinstance(g, FunctionModel):
        return g.eval(i, x)
    if hasattr(g, "piece_coeffs"):  # spline: eval(x, nu)
        return np.asarray(g.eval(x, i), dtype=float)
    if hasattr(g, "deriv"):  # numpy polynomial classes
        return np.asarray((g.deriv(i) if i else g)(x), dtype=float)
    if hasattr(g, "eval"):  # FunctionModel-alike tables
        return np.asarray(g.eval(i, x), dtype=float)
    if i == 0:
        return np.asarray(g(x), dtype=float)
    # centered finite differences as a last resort for plain callables
    h = 1e-5
    coeff = {1: ([-0.5, 0.0, 0.5], 1), 2: ([1.0, -2.0, 1.0], 2)}
    if i > 2:
        raise ValueError("plain callables support numeric derivatives up to order 2 only")
    c, p = coeff[i]
    pts = [np.asarray(g(x + (j - 1) * h), dtype=float) for j in range(3)]
    return sum(cj * pj for cj, pj in zip(c, pts)) / h**p


@dataclass
class MembershipReport:
    """Result of checking one approximant against a theorem's conclusion set."""

    family: str
    sign_residual: float
    sign_scale: float
    hermite: list = field(default_factory=list)  # (point, order, residual, scale)
    profile_ratio: float | None = None
    grid_size: int = 0

    @property
    def sign_ok(self):
        return self.sign_residual <= SIGN_SLACK * (1.0 + self.sign_scale)

    @property
    def hermite_ok(self):
        return all(res <= HERMITE_SLACK * (1.0 + scale) for _, _, res, scale in self.hermite)

    @property
    def ok(self):
        return self.sign_ok and self.hermite_ok

    def max_hermite_rel(self):
        if not self.hermite:
            return 0.0
        return max(res / (1.0 + scale) for _, _, res, scale in self.hermite)


def check_membership(g, f: FunctionModel, Y: SignPattern, A: ConstraintSet,
                     spec: SpecTuple, grid_density=2048, n=None, omega_fn=None,
                     profile=False):
    """Verify the conclusion set of a family theorem for the approximant g.

    Reports (a) the worst violation of the sign pattern -- of g - f for the
    intertwining/onesided families, of g itself for copositive/positive;
    (b) Hermite residuals |g^(nu)(b) - f^(nu)(b)| at every constrained point;
    (c) optionally the pointwise error profile against the rate functional.
    Report-only: nothing raises on a violation.
    """
    lo, hi = f.domain
    extra = list(Y.points) + list(A.points) + list(f.kinks) + [lo, hi]
    xs = grid_union((lo, hi), grid_density, extra)
    fx = f.eval(0, xs)
    gx = _eval_derivative(g, 0, xs)
    scale = float(np.max(np.abs(fx)))

    h = gx - fx if spec.family in ("intertwining", "onesided") else gx
    sgn = Y.sign(xs) if Y.s else np.ones_like(xs)
    viol = np.clip(-sgn * h, 0.0, None)
    # exempt the sign-change points themselves (sign undefined there)
    for y in Y.points:
        viol[np.abs(xs - y) < 1e-15] = 0.0
    sign_residual = float(np.max(viol)) if viol.size else 0.0

    hermite = []
    m1, m2, m3 = spec.orders()
    targets = []
    if m1 >= 0:
        targets += [(a, m1) for a in A.points if abs(a) < 1.0]
    if spec.family in ("intertwining", "copositive") and m2 is not None and m2 >= 0:
        targets += [(y, m2) for y in Y.points]
    targets += [(e, m3) for e in (-1.0, 1.0)]
    for beta, mmax in targets:
        for nu in range(mmax + 1):
            fv = float(f.eval(nu, beta))
            gv = float(_eval_derivative(g, nu, beta))
            hermite.append((beta, nu, abs(gv - fv), abs(fv)))

    ratio = None
    if profile:
        if n is None or omega_fn is None:
            raise ValueError("profile requires n and omega_fn")
        rho = rate_weight(n, xs)
        om = omega_fn(rho)
        denom = rho**spec.r * om
        good = denom > 1e-300
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = float(np.max(np.abs(gx - fx)[good] / denom[good])) if good.any() else 0.0

    return MembershipReport(spec.family, sign_residual, scale, hermite, ratio, xs.size)
