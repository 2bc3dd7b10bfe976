"""Global spline construction with interpolatory constraints.

The spline lives on a validated knot sequence.  A coarser partition (every
d-th knot, d = 2*(order-1)^2) is classified into clean intervals and
intervals contaminated by a sign-change point, a constraint point, or an
endpoint.  Overlapping polynomial pieces are built per coarse interval --
Whitney onesided pairs on clean overlaps, local-lemma constructions near
contaminated ones -- and joined by blending splines that stay inside the
pointwise envelope of their two parents, which preserves both the sign
structure and the Hermite contact.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import Chebyshev
from scipy.interpolate import BSpline

from .core import (ConstraintSet, FunctionModel, SignPattern, SpecTuple,
                   require_valid_spec)
from .interp import cheb_interpolate
from .localpieces import (copositive_quadratic, copositive_quartic,
                          onesided_piece, positive_cubic, positive_linear)
from .lporacle import LPProblem, simplex_solve
from .minimax import onesided_pair
from .smoothness import modulus_value

BLEND_TOL = 1e-9     # envelope containment slack, relative to the pieces' scale
JUMP_TOL = 1e-8      # smoothness jump tolerance, relative to local derivative scale


class KnotDensityError(ValueError):
    def __init__(self, msg, required_n=None):
        super().__init__(msg)
        self.required_n = required_n


class BlendError(RuntimeError):
    pass


class KnotSequence:
    """Strictly decreasing breakpoints z_0 > ... > z_n.

    Global sequences span [-1, 1]; indices clamp outside the range, so
    enlarged intervals near the ends are well defined.
    """

    def __init__(self, breakpoints_desc):
        z = np.asarray(breakpoints_desc, dtype=float)
        if z.ndim != 1 or z.size < 2:
            raise ValueError("need at least two breakpoints")
        if not np.all(np.diff(z) < 0):
            raise ValueError("breakpoints must be strictly decreasing")
        self.z = z

    @classmethod
    def chebyshev(cls, n: int):
        nodes = np.cos(np.arange(n + 1) * np.pi / n)
        nodes[0], nodes[-1] = 1.0, -1.0
        return cls(nodes)

    @property
    def n(self) -> int:
        return self.z.size - 1

    def knot(self, i: int) -> float:
        if i < 0:
            return float(self.z[0])
        if i > self.n:
            return float(self.z[-1])
        return float(self.z[i])

    def interval(self, i: int) -> tuple[float, float]:
        return self.knot(i), self.knot(i - 1)

    def length(self, i: int) -> float:
        a, b = self.interval(i)
        return b - a

    def mesh_ratio(self) -> float:
        lengths = -np.diff(self.z)
        return float(max(np.max(lengths[1:] / lengths[:-1]),
                         np.max(lengths[:-1] / lengths[1:])))

    def interior_count(self, lo, hi) -> int:
        return int(np.sum((self.z > lo) & (self.z < hi)))

    def validate_density(self, Y: SignPattern, A: ConstraintSet, order: int):
        """At least 4*(order-1)^2 knots strictly inside every nonempty gap
        between consecutive points of Y, A and the endpoints."""
        if not (self.z[0] == 1.0 and self.z[-1] == -1.0):
            raise ValueError("a global knot sequence must span [-1, 1]")
        need = 4 * (order - 1) ** 2
        pts = sorted(set(Y.points) | set(A.points) | {-1.0, 1.0})
        for lo, hi in zip(pts, pts[1:]):
            if hi <= lo:
                continue
            have = self.interior_count(lo, hi)
            if have < need:
                raise KnotDensityError(
                    f"gap ({lo:.6g}, {hi:.6g}) holds {have} knots, needs {need} "
                    f"for order {order}",
                    required_n=minimal_chebyshev_n(Y, A, order),
                )


def minimal_chebyshev_n(Y: SignPattern, A: ConstraintSet, order: int, n_max=65536) -> int:
    """Smallest n whose Chebyshev knots satisfy the density precondition."""
    need = 4 * (order - 1) ** 2
    pts = sorted(set(Y.points) | set(A.points) | {-1.0, 1.0})
    gaps = [(lo, hi) for lo, hi in zip(pts, pts[1:]) if hi > lo]
    n = max(need + 1, 4)
    while n <= n_max:
        z = np.cos(np.arange(n + 1) * np.pi / n)
        if all(int(np.sum((z > lo) & (z < hi))) >= need for lo, hi in gaps):
            return n
        n += 1
    raise KnotDensityError(f"no admissible n below {n_max}")


def _local_power_coeffs(poly: Chebyshev, left: float, order: int) -> np.ndarray:
    return np.array([float(poly.deriv(j)(left)) / math.factorial(j) if j
                     else float(poly(left)) for j in range(order)])


def _shifted_taylor(derivs_at_mid, xm: float, left: float, order: int) -> np.ndarray:
    """Local power coefficients in (x - left) from derivatives at the midpoint.

    Expanding at the midpoint of the source's own (well-conditioned) domain and
    shifting exactly avoids the cancellation of re-interpolating on a tiny
    subinterval.
    """
    T = np.array([derivs_at_mid(j) / math.factorial(j) for j in range(order)])
    shift = np.polynomial.Polynomial([left - xm, 1.0])
    out = np.polynomial.Polynomial(T)(shift).coef
    if out.size < order:
        out = np.concatenate([out, np.zeros(order - out.size)])
    return out


class Spline:
    """Piecewise polynomial over a knot sequence with declared smoothness.

    Pieces are held as local power coefficients in (x - left_knot); piece i
    (1-based, right to left) lives on J_i = [z_i, z_{i-1}].
    """

    def __init__(self, knots: KnotSequence, order: int, smoothness: int,
                 piece_coeffs, provenance=None):
        self.knots = knots
        self.order = int(order)
        self.smoothness = int(smoothness)
        self.piece_coeffs = [np.asarray(c, dtype=float) for c in piece_coeffs]
        if len(self.piece_coeffs) != knots.n:
            raise ValueError("one coefficient row per knot interval required")
        self.provenance = dict(provenance or {})

    @classmethod
    def from_cheb_pieces(cls, knots: KnotSequence, pieces, order, smoothness,
                         provenance=None):
        coeffs = [_local_power_coeffs(pieces[i - 1], knots.knot(i), order)
                  for i in range(1, knots.n + 1)]
        return cls(knots, order, smoothness, coeffs, provenance)

    def _piece_index(self, xv):
        za = self.knots.z[::-1]
        idx = np.clip(np.searchsorted(za, xv, side="right") - 1, 0, self.knots.n - 1)
        return self.knots.n - idx  # descending interval index

    def eval(self, x, nu: int = 0):
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        xv = np.atleast_1d(x)
        out = np.empty_like(xv)
        idx = np.atleast_1d(self._piece_index(xv))
        for i in np.unique(idx):
            sel = idx == i
            c = self.piece_coeffs[i - 1]
            d = np.polynomial.polynomial.polyder(c, nu) if nu else c
            out[sel] = np.polynomial.polynomial.polyval(
                xv[sel] - self.knots.knot(int(i)), d)
        return float(out[0]) if scalar else out

    def __call__(self, x):
        return self.eval(x)

    def piece_on(self, i: int) -> Chebyshev:
        a, b = self.knots.interval(i)
        c = self.piece_coeffs[i - 1]
        return cheb_interpolate(
            lambda x: np.polynomial.polynomial.polyval(np.asarray(x, dtype=float) - a, c),
            self.order - 1, (a, b))

    def smoothness_jumps(self):
        """Max relative derivative jump at interior knots, orders 0..smoothness.

        Jumps are measured against the local derivative scale: the larger of
        the two one-sided values and the Markov bound ||S||_loc (deg^2/h)^nu,
        which is the precision a degree-(order-1) piece on an interval of
        length h can carry in its nu-th derivative at all.  A genuine defect
        is O(1) on this scale.
        """
        deg = self.order - 1
        worst = np.zeros(self.smoothness + 1)
        for i in range(1, self.knots.n):
            zi = self.knots.knot(i)
            cl = self.piece_coeffs[i]       # piece i+1, to the left of z_i
            cr = self.piece_coeffs[i - 1]   # piece i, to the right of z_i
            hl = zi - self.knots.knot(i + 1)
            hr = self.knots.knot(i - 1) - zi
            hmin = min(hl, hr)
            m0 = max(abs(np.polynomial.polynomial.polyval(hl, cl)),
                     abs(np.polynomial.polynomial.polyval(0.0, cr)))
            for nu in range(self.smoothness + 1):
                dl = np.polynomial.polynomial.polyder(cl, nu) if nu else cl
                dr = np.polynomial.polynomial.polyder(cr, nu) if nu else cr
                vl = np.polynomial.polynomial.polyval(hl, dl)
                vr = np.polynomial.polynomial.polyval(0.0, dr)
                markov = m0 * (2.0 * deg * deg / hmin) ** nu if nu else m0
                scale = 1.0 + max(abs(vl), abs(vr), markov)
                worst[nu] = max(worst[nu], abs(vl - vr) / scale)
        return worst

    def to_json(self) -> str:
        payload = {
            "order": self.order,
            "smoothness": self.smoothness,
            "knots": [float(z) for z in self.knots.z],
            "pieces": [[float(c) for c in row] for row in self.piece_coeffs],
            "provenance": self.provenance,
        }
        return json.dumps(payload, indent=1)

    @classmethod
    def from_json(cls, text: str):
        payload = json.loads(text)
        return cls(KnotSequence(payload["knots"]), payload["order"],
                   payload["smoothness"], payload["pieces"], payload.get("provenance"))


# ---------------------------------------------------------------------------
# Beatson blending


def beatson_blend(p1: Chebyshev, p2: Chebyshev, knots, m: int, grid: int = 1024) -> Spline:
    """Order-m spline on the given (ascending) knots, equal to p1 at the left
    end and to p2 at the right end with C^(m-2) contact, staying between the
    two parent polynomials pointwise.

    p1 and p2 are written in the local B-spline basis by collocation at the
    Greville points and the two coefficient sequences are ramped into each
    other.  If the ramp leaves the envelope on the check grid, a feasibility
    LP on the interior coefficients restores containment; if that also fails
    the blend raises rather than returning a silently violated spline.
    """
    t = np.asarray(knots, dtype=float)
    if t.ndim != 1 or t.size < 2 or not np.all(np.diff(t) > 0):
        raise ValueError("blend knots must be strictly increasing")
    if m < 2:
        raise ValueError("blend order must be >= 2")
    d = t.size - 1
    if d < 2 * (m - 1) ** 2:
        raise BlendError(f"{d} knot intervals < 2*(m-1)^2 = {2 * (m - 1) ** 2}")

    # clamped ends: the first/last m-1 coefficients then pin the C^(m-2)
    # contact with p1/p2 (end derivatives depend triangularly on them)
    t_ext = np.concatenate([np.full(m - 1, t[0]), t, np.full(m - 1, t[-1])])
    K = t_ext.size - m
    # clip: the mean of identical floats can land one ulp outside the span
    greville = np.clip(np.array([np.mean(t_ext[i + 1:i + m]) for i in range(K)]),
                       t[0], t[-1])
    M = BSpline.design_matrix(greville, t_ext, m - 1).toarray()
    c1 = np.linalg.solve(M, np.asarray(p1(greville), dtype=float))
    c2 = np.linalg.solve(M, np.asarray(p2(greville), dtype=float))

    # monotone coefficient ramp; the first/last m-1 coefficients pin the exits
    w = np.zeros(K)
    lo_fix, hi_fix = m - 1, K - (m - 1)
    inner = hi_fix - lo_fix
    if inner > 0:
        w[lo_fix:hi_fix] = (np.arange(inner) + 1.0) / (inner + 1.0)
    w[hi_fix:] = 1.0
    c = (1.0 - w) * c1 + w * c2

    xs = np.linspace(t[0], t[-1], grid)
    B = BSpline.design_matrix(xs, t_ext, m - 1).toarray()
    v1, v2 = np.asarray(p1(xs), dtype=float), np.asarray(p2(xs), dtype=float)
    lo, hi = np.minimum(v1, v2), np.maximum(v1, v2)
    scale = 1.0 + float(np.max(np.abs(np.concatenate([v1, v2]))))
    tol = BLEND_TOL * scale

    def contained(cv):
        s = B @ cv
        return float(np.max(np.maximum(s - hi, lo - s))) <= tol

    if not contained(c):
        c = _blend_lp(B, lo, hi, c1, c2, c.copy(), lo_fix, hi_fix, tol)
        if c is None or not contained(c):
            raise BlendError("no envelope-contained blend found (ramp and LP both failed)")

    spl = BSpline(t_ext, c, m - 1)
    derivs = [spl] + [spl.derivative(j) for j in range(1, m)]
    coeff_rows = []
    for j in range(d - 1, -1, -1):  # descending interval order
        xm = 0.5 * (t[j] + t[j + 1])
        coeff_rows.append(_shifted_taylor(lambda nu: float(derivs[nu](xm)),
                                          xm, t[j], m))
    return Spline(KnotSequence(t[::-1]), m, m - 2, coeff_rows)


def _blend_lp(B, lo, hi, c1, c2, ramp, lo_fix, hi_fix, tol):
    """Envelope-contained interior coefficients closest (sup norm) to the
    monotone ramp; staying near the ramp keeps the coefficients tame."""
    free = list(range(lo_fix, hi_fix))
    if not free:
        return None
    fixed = B[:, :lo_fix] @ c1[:lo_fix] + B[:, hi_fix:] @ c2[hi_fix:]
    Bf = B[:, free]
    nfree = len(free)
    rows_env = np.vstack([
        np.hstack([Bf, np.zeros((Bf.shape[0], 1))]),
        np.hstack([-Bf, np.zeros((Bf.shape[0], 1))]),
    ])
    # the envelope pinches to equality where the parents cross; allow the
    # (re-verified) containment tolerance there
    margin = 0.5 * tol
    rhs_env = np.concatenate([hi - fixed + margin, fixed - lo + margin])
    eye = np.eye(nfree)
    rows_dev = np.vstack([
        np.hstack([eye, -np.ones((nfree, 1))]),
        np.hstack([-eye, -np.ones((nfree, 1))]),
    ])
    rhs_dev = np.concatenate([ramp[free], -ramp[free]])
    cvec = np.zeros(nfree + 1)
    cvec[-1] = 1.0
    cert = simplex_solve(LPProblem(cvec, np.vstack([rows_env, rows_dev]),
                                   np.concatenate([rhs_env, rhs_dev])),
                         feas_tol=1e-10)
    if not cert.optimal:
        return None
    return np.concatenate([c1[:lo_fix], cert.x[:nfree], c2[hi_fix:]])


# ---------------------------------------------------------------------------
# Interval classification


@dataclass
class IntervalTag:
    index: int                     # coarse interval index (1-based, right to left)
    kind: str                      # clean | Y | A | endpoint
    point: float | None = None
    y_position: int | None = None  # 1-based position within Y, for kind == "Y"


def classify_intervals(coarse_desc, Y: SignPattern, A: ConstraintSet):
    """Tag the coarse intervals; exactly one constraining point per
    contaminated interval and at least one clean interval between
    contaminated ones, else a density error naming the required n."""
    zb = np.asarray(coarse_desc, dtype=float)
    N = zb.size - 1
    tags = {}
    betas = ([(1.0, "endpoint", None), (-1.0, "endpoint", None)]
             + [(y, "Y", j + 1) for j, y in enumerate(Y.points)]
             + [(a, "A", None) for a in A.points if abs(a) < 1.0])
    for beta, kind, ypos in betas:
        i = 1 + int(np.sum(zb[1:] > beta))  # z_i <= beta < z_{i-1}; i = 1 takes both ends
        i = min(i, N)
        if i in tags:
            raise KnotDensityError(
                f"points {tags[i].point:.6g} and {beta:.6g} share coarse interval {i}; "
                "refine the knot sequence")
        tags[i] = IntervalTag(i, kind, beta, ypos)
    mus = sorted(tags)
    for a, b in zip(mus, mus[1:]):
        if b < a + 2:
            raise KnotDensityError(
                f"contaminated coarse intervals {a} and {b} are adjacent; refine the knots")
    return [tags.get(i, IntervalTag(i, "clean")) for i in range(1, N + 1)], mus


# ---------------------------------------------------------------------------
# Builders


@dataclass
class BuildReport:
    spline: Spline
    spec: SpecTuple
    n: int
    coarse: np.ndarray
    tags: list
    cases: dict = field(default_factory=dict)   # coarse index -> construction label
    blends: list = field(default_factory=list)  # blended coarse indices


@dataclass
class _CleanPiece:
    poly: Chebyshev
    case: str = "whitney-pair"


def _mirrored(rep):
    rep.poly = Chebyshev(-rep.poly.coef, domain=rep.poly.domain)
    rep.case = f"mirrored-{rep.case}"
    return rep


def _effective_constraints(A: ConstraintSet, spec: SpecTuple) -> ConstraintSet:
    """Force +-1 into the constraint set; drop interior points when m1 = -1."""
    interior = [] if spec.m1 == -1 else [(a, spec.m1) for a, _ in A.pairs if abs(a) < 1.0]
    pairs = [(1.0, spec.m3)] + interior + [(-1.0, spec.m3)]
    return ConstraintSet(tuple(sorted(pairs, key=lambda t: -t[0])))


def _prepare(f, Y, A_eff, knots, n, order):
    if knots is None:
        if n is None:
            n = minimal_chebyshev_n(Y, A_eff, order)
        knots = KnotSequence.chebyshev(n)
    knots.validate_density(Y, A_eff, order)
    n = knots.n
    d = 2 * (order - 1) ** 2
    N = int(math.ceil(n / d))
    coarse = np.array([knots.knot(min(d * i, n)) for i in range(N + 1)])
    return knots, n, d, N, coarse


def _endpoint_direct(beta, r, Y):
    """Direct (un-mirrored) onesided piece at an endpoint?"""
    if beta == 1.0:
        return r % 2 == 0      # rightmost region is always positive
    return Y.s % 2 == 0        # leftmost region parity


def _tilde_interval(knots, d, t):
    lo = knots.knot(min(d * (t + 1), knots.n))
    hi = knots.knot(d * (t - 2))
    return lo, hi


def _gamma_of(beta, lo, hi):
    return max(min(beta - lo, hi - beta) / (hi - lo) - 1e-12, 0.0)


def _build_clean_pieces(f, Y, knots, d, mus, piece_map, order):
    for mu_a, mu_b in zip(mus, mus[1:]):
        for i in range(mu_a + 2, mu_b):
            lo = knots.knot(min(d * i, knots.n))
            hi = knots.knot(d * (i - 2))
            P, Q, _ = onesided_pair(f, (lo, hi), order)
            sgn = Y.sign(0.5 * (lo + hi))
            piece_map[("clean", i)] = _CleanPiece(P if sgn > 0 else Q)


def _assemble(f, Y, A, spec, knots, d, N, coarse, tags, piece_map, order, n):
    contaminated = {t.index for t in tags if t.kind != "clean"}
    coeff_rows = [None] * knots.n
    blends = []
    for t in range(1, N + 1):
        if t in contaminated:
            poly = piece_map[t].poly
            for i in range(d * (t - 1) + 1, min(d * t, knots.n) + 1):
                a, b = knots.interval(i)
                xm = 0.5 * (a + b)
                coeff_rows[i - 1] = _shifted_taylor(
                    lambda nu: float(poly.deriv(nu)(xm)) if nu else float(poly(xm)),
                    xm, a, order)
        else:
            left = (piece_map[t + 1] if (t + 1) in contaminated
                    else piece_map[("clean", t + 1)]).poly
            right = (piece_map[t - 1] if (t - 1) in contaminated
                     else piece_map[("clean", t)]).poly
            t_knots = np.array([knots.knot(j) for j in range(d * t, d * (t - 1) - 1, -1)])
            blend = beatson_blend(left, right, t_knots, order)
            blends.append(t)
            for i in range(d * (t - 1) + 1, d * t + 1):
                coeff_rows[i - 1] = blend.piece_coeffs[i - d * (t - 1) - 1]

    prov = {
        "spec": {"family": spec.family, "r": spec.r, "k": spec.k,
                 "m1": spec.m1, "m2": spec.m2, "m3": spec.m3},
        "f": {"name": f.name, **{k: v for k, v in f.params.items()
                                 if isinstance(v, (int, float, str, list, dict))}},
        "Y": list(Y.points),
        "A": [[a, o] for a, o in A.pairs],
        "n": n,
    }
    return Spline(knots, order, order - 2, coeff_rows, prov), blends


def build_intertwining_spline(f: FunctionModel, Y: SignPattern, A: ConstraintSet,
                              spec: SpecTuple, knots: KnotSequence | None = None,
                              n: int | None = None, resolution=(192, 192)) -> BuildReport:
    """Spline of order k+r, smoothness C^(k+r-2), with S - f copositive with Y
    (onesided when Y is empty) and Hermite contact of order m1 at interior
    constraint points, m2 at sign-change points, m3 at the endpoints."""
    require_valid_spec(spec)
    if spec.family not in ("intertwining", "onesided"):
        raise ValueError("use build_copositive_spline for the copositive/positive families")
    if spec.family == "onesided" and Y.s:
        raise ValueError("onesided tuples take an empty sign-change set")
    if f.smoothness < spec.r:
        raise ValueError(f"f is C^{f.smoothness}, the tuple needs C^{spec.r}")
    r, k = spec.r, spec.k
    order = k + r
    A_eff = _effective_constraints(A, spec)
    knots, n, d, N, coarse = _prepare(f, Y, A_eff, knots, n, order)
    tags, mus = classify_intervals(coarse, Y, A_eff)

    piece_map, cases = {}, {}
    for tag in tags:
        if tag.kind == "clean":
            continue
        t, beta = tag.index, tag.point
        lo, hi = _tilde_interval(knots, d, t)
        if tag.kind == "endpoint":
            direct = _endpoint_direct(beta, r, Y)
            rep = (onesided_piece(f, k, r, beta, (lo, hi), resolution) if direct
                   else _mirrored(onesided_piece(-f, k, r, beta, (lo, hi), resolution)))
        elif tag.kind == "A":
            direct = Y.sign(beta) > 0
            kk, rr = (k, r) if r % 2 == 0 else (k + 1, r - 1)
            rep = (onesided_piece(f, kk, rr, beta, (lo, hi), resolution) if direct
                   else _mirrored(onesided_piece(-f, kk, rr, beta, (lo, hi), resolution)))
        else:  # Y-contaminated: the sign of S - f flips at beta
            direct = tag.y_position % 2 == 1
            kk, rr = (k, r) if r % 2 == 1 else (k + 1, r - 1)
            rep = (onesided_piece(f, kk, rr, beta, (lo, hi), resolution) if direct
                   else _mirrored(onesided_piece(-f, kk, rr, beta, (lo, hi), resolution)))
        piece_map[t] = rep
        cases[t] = f"{tag.kind}:{rep.case}"

    _build_clean_pieces(f, Y, knots, d, mus, piece_map, order)
    spline, blends = _assemble(f, Y, A, spec, knots, d, N, coarse, tags,
                               piece_map, order, n)
    return BuildReport(spline, spec, n, coarse, tags, cases, blends)


_DELEGATE_DIRECT = {"(1,k,-1,0,0)", "(2,k,1,0,1)", "r>=3"}


def _copositive_delegation(spec: SpecTuple) -> SpecTuple | None:
    """Copositive/positive tuples whose construction is the intertwining one."""
    r, k = spec.r, spec.k
    if spec.family == "copositive":
        if r == 1 and spec.m1 == -1:
            return SpecTuple("intertwining", 1, k, -1, 0, 0)
        if r == 2 and (spec.m1, spec.m2, spec.m3) == (1, 0, 1):
            return SpecTuple("intertwining", 2, k, 1, 0, 1)
        if r >= 3:
            return SpecTuple("intertwining", r, k, spec.m1, spec.m2, spec.m3)
        return None
    # positive family: delegate to the onesided builder (no sign-change set)
    if r == 1 and spec.m1 == -1:
        return SpecTuple("onesided", 1, k, -1, None, 0)
    if (r, k, spec.m1, spec.m3) == (2, 3, 1, 1) or r >= 2:
        m1, _, m3 = spec.m1, None, spec.m3
        return SpecTuple("onesided", r, k, m1, None, m3)
    return None


def _copositive_secant(f, y, interval, direct):
    """Linear piece through (y, 0) and the endpoint on the nonnegative side."""
    lo, hi = interval
    e = hi if direct else lo
    fe = float(f.eval(0, e))
    return cheb_interpolate(
        lambda x: fe * (np.asarray(x, dtype=float) - y) / (e - y), 1, interval)


def build_copositive_spline(f: FunctionModel, Y: SignPattern, A: ConstraintSet,
                            spec: SpecTuple, knots: KnotSequence | None = None,
                            n: int | None = None, resolution=(192, 192)) -> BuildReport:
    """Spline sharing the sign pattern of f (nonnegative when Y is empty) with
    the Hermite contact orders of the tuple.

    Tuples whose index data matches an intertwining tuple delegate to that
    builder (the difference S - f then carries the sign pattern, and f does,
    so S does).  The four sporadic low-smoothness tuples construct their
    contaminated pieces from the dedicated positive/copositive local lemmas.
    """
    require_valid_spec(spec)
    if spec.family not in ("copositive", "positive"):
        raise ValueError("use build_intertwining_spline for intertwining/onesided")
    if spec.family == "positive" and Y.s:
        raise ValueError("positive tuples take an empty sign-change set")
    if f.smoothness < spec.r:
        raise ValueError(f"f is C^{f.smoothness}, the tuple needs C^{spec.r}")
    _validate_shape(f, Y)

    delegate = _copositive_delegation(spec)
    if delegate is not None:
        report = build_intertwining_spline(f, Y, A, delegate, knots, n, resolution)
        report.spec = spec
        report.spline.provenance["spec"] = {
            "family": spec.family, "r": spec.r, "k": spec.k,
            "m1": spec.m1, "m2": spec.m2, "m3": spec.m3}
        return report

    r, k = spec.r, spec.k
    order = k + r
    has_interior_A = spec.m1 >= 0 and any(abs(a) < 1.0 for a in A.points)
    if (r, k) == (1, 2) and has_interior_A:
        order = 4  # the interior-constraint piece is a cubic
    A_eff = _effective_constraints(A, spec)
    knots, n, d, N, coarse = _prepare(f, Y, A_eff, knots, n, order)
    tags, mus = classify_intervals(coarse, Y, A_eff)

    piece_map, cases = {}, {}
    for tag in tags:
        if tag.kind == "clean":
            continue
        t, beta = tag.index, tag.point
        lo, hi = _tilde_interval(knots, d, t)
        if tag.kind == "endpoint":
            rep = _copositive_endpoint_piece(f, Y, spec, beta, (lo, hi), resolution)
        elif tag.kind == "A":
            rep = _copositive_A_piece(f, Y, spec, beta, (lo, hi), resolution)
        else:
            rep = _copositive_Y_piece(f, spec, beta, tag.y_position, (lo, hi), resolution)
        piece_map[t] = rep
        cases[t] = f"{tag.kind}:{rep.case}"

    _build_clean_pieces(f, Y, knots, d, mus, piece_map, order)
    spline, blends = _assemble(f, Y, A, spec, knots, d, N, coarse, tags,
                               piece_map, order, n)
    return BuildReport(spline, spec, n, coarse, tags, cases, blends)


def _validate_shape(f, Y, grid=2048):
    xs = np.linspace(-1.0, 1.0, grid)
    fx = f.eval(0, xs)
    sgn = Y.sign(xs) if Y.s else np.ones_like(xs)
    worst = float(np.min(sgn * fx))
    if worst < -1e-10 * (1.0 + float(np.max(np.abs(fx)))):
        raise ValueError("f does not carry the required sign pattern on the grid")


def _copositive_endpoint_piece(f, Y, spec, beta, interval, resolution):
    r, k = spec.r, spec.k
    positive = (Y.s % 2 == 0) if beta == -1.0 else True
    if r == 0:
        rep = (positive_linear(f, beta, interval, resolution=resolution) if positive
               else _mirrored(positive_linear(-f, beta, interval, resolution=resolution)))
        return rep
    direct = _endpoint_direct(beta, r, Y)
    return (onesided_piece(f, k, r, beta, interval, resolution) if direct
            else _mirrored(onesided_piece(-f, k, r, beta, interval, resolution)))


def _copositive_A_piece(f, Y, spec, beta, interval, resolution):
    r = spec.r
    positive = Y.sign(beta) > 0
    gamma = _gamma_of(beta, *interval)
    if r == 0:
        return (positive_linear(f, beta, interval, gamma, resolution=resolution) if positive
                else _mirrored(positive_linear(-f, beta, interval, gamma, resolution=resolution)))
    if r == 1:
        return (positive_cubic(f, beta, interval, gamma, resolution=resolution) if positive
                else _mirrored(positive_cubic(-f, beta, interval, gamma, resolution=resolution)))
    # r == 2 sporadic tuple: onesided contact of order r-1 = 1 keeps the sign
    return (onesided_piece(f, spec.k, r, beta, interval, resolution) if positive
            else _mirrored(onesided_piece(-f, spec.k, r, beta, interval, resolution)))


def _copositive_Y_piece(f, spec, y, position, interval, resolution):
    r, k = spec.r, spec.k
    direct = position % 2 == 1
    gamma = _gamma_of(y, *interval)
    if (r, k) == (0, 2):
        poly = _copositive_secant(f, y, interval, direct)
        return _CleanPiece(poly, "copositive-secant")
    if (r, k) == (1, 3):
        return (onesided_piece(f, k, r, y, interval, resolution) if direct
                else _mirrored(onesided_piece(-f, k, r, y, interval, resolution)))
    if (r, k) == (1, 2):
        return (copositive_quadratic(f, y, interval, gamma, resolution=resolution) if direct
                else _mirrored(copositive_quadratic(-f, y, interval, gamma, resolution=resolution)))
    if (r, k) == (2, 3):
        return (copositive_quartic(f, y, interval, gamma, resolution=resolution) if direct
                else _mirrored(copositive_quartic(-f, y, interval, gamma, resolution=resolution)))
    raise ValueError(f"no sporadic construction for tuple {(r, k)}")


# ---------------------------------------------------------------------------
# Error functional


def error_table(report: BuildReport, f: FunctionModel, resolution=(64, 64),
                per_interval=48):
    """Per-interval rows (i, z_i, z_{i-1}, err, bound, ratio) against the
    functional |J_i|^r * omega_k(f^(r), |J~_i|; J~_i) on the enlarged interval
    J~_i spanning 6*(order-1)^2 knots each way."""
    S, spec = report.spline, report.spec
    knots = S.knots
    r, k = spec.r, spec.k
    ext = 6 * (S.order - 1) ** 2
    rows = []
    for i in range(1, knots.n + 1):
        a, b = knots.interval(i)
        xs = np.linspace(a, b, per_interval)
        err = float(np.max(np.abs(f.eval(0, xs) - S.eval(xs))))
        lo, hi = knots.knot(i + ext), knots.knot(i - ext)
        om = modulus_value(f.deriv_fn(r), k, hi - lo, (lo, hi), resolution)
        bound = (b - a) ** r * om
        rows.append({
            "i": i, "z_i": a, "z_im1": b, "err": err, "bound": bound,
            "ratio": err / bound if bound > 0 else 0.0,
        })
    return rows
