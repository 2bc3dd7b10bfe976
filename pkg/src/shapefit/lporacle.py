"""Grid-LP formulation of constrained polynomial approximation.

Interval-wide constraints are relaxed to finitely many grid points, which
makes the LP optimum a valid lower bound for the continuum problem and makes
grid infeasibility a sound certificate of continuum infeasibility.  The
solver backend is scipy's HiGHS; infeasibility is certified by an explicitly
constructed Farkas witness that is re-verified by direct substitution,
independently of the solver.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import Chebyshev
from numpy.polynomial import chebyshev as C
from scipy.optimize import linprog

from .core import FunctionModel

WITNESS_TOL = 1e-7


class LPNumericalError(RuntimeError):
    pass


@dataclass
class LPProblem:
    """min c.x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq; variables free."""

    c: np.ndarray
    A_ub: np.ndarray | None = None
    b_ub: np.ndarray | None = None
    A_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float)
        for name in ("A_ub", "b_ub", "A_eq", "b_eq"):
            v = getattr(self, name)
            if v is not None:
                setattr(self, name, np.asarray(v, dtype=float))
        nv = self.c.size
        for A, b in ((self.A_ub, self.b_ub), (self.A_eq, self.b_eq)):
            if (A is None) != (b is None):
                raise ValueError("constraint matrix and rhs must come together")
            if A is not None:
                if A.shape != (b.size, nv):
                    raise ValueError(f"constraint shape {A.shape} does not match ({b.size}, {nv})")
                if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
                    raise ValueError("constraints must be finite")
        if not np.all(np.isfinite(self.c)):
            raise ValueError("objective must be finite")


@dataclass
class LPCertificate:
    status: str  # optimal | infeasible | unbounded
    value: float | None
    x: np.ndarray | None
    farkas: dict | None = None
    witness_residual: float | None = None
    warnings: list = field(default_factory=list)

    @property
    def optimal(self):
        return self.status == "optimal"

    @property
    def infeasible(self):
        return self.status == "infeasible"


def _farkas_witness(p: LPProblem):
    """Find y_ub >= 0, y_eq with A_ub'y_ub + A_eq'y_eq = 0 and b.y < 0.

    Solved as an auxiliary LP with an l1 normalization; existence is
    equivalent to infeasibility of p by Farkas' lemma.
    """
    n_ub = p.b_ub.size if p.b_ub is not None else 0
    n_eq = p.b_eq.size if p.b_eq is not None else 0
    nv = p.c.size
    blocks = []
    cost = []
    if n_ub:
        blocks.append(p.A_ub.T)
        cost.append(p.b_ub)
    if n_eq:
        blocks.append(p.A_eq.T)
        blocks.append(-p.A_eq.T)
        cost.append(p.b_eq)
        cost.append(-p.b_eq)
    if not blocks:
        return None, None
    A_eq = np.hstack(blocks)
    b_eq = np.zeros(nv)
    cvec = np.concatenate(cost)
    m = cvec.size
    A_norm = np.ones((1, m))
    res = linprog(cvec, A_ub=A_norm, b_ub=[1.0], A_eq=A_eq, b_eq=b_eq,
                  bounds=(0, None), method="highs")
    if res.status != 0 or res.fun is None or res.fun > -1e-12:
        return None, None
    y = res.x
    y_ub = y[:n_ub]
    y_eq = y[n_ub:n_ub + n_eq] - y[n_ub + n_eq:] if n_eq else np.zeros(0)
    # independent re-verification by direct substitution (row-relative)
    resid = np.zeros(nv)
    denom = np.ones(nv)
    bdot = 0.0
    if n_ub:
        resid += p.A_ub.T @ y_ub
        denom += np.abs(p.A_ub.T) @ np.abs(y_ub)
        bdot += float(p.b_ub @ y_ub)
    if n_eq:
        resid += p.A_eq.T @ y_eq
        denom += np.abs(p.A_eq.T) @ np.abs(y_eq)
        bdot += float(p.b_eq @ y_eq)
    residual = float(np.max(np.abs(resid) / denom))
    if residual > WITNESS_TOL or bdot >= 0 or (n_ub and y_ub.min() < -WITNESS_TOL):
        return None, None
    return {"y_ub": y_ub, "y_eq": y_eq, "b_dot": bdot}, residual


def _primal_residual(p: LPProblem, x) -> float:
    """Worst row-relative constraint violation.

    Normalized by the row's value scale |b| + |Ax| (plus a sliver of the
    cancellation scale |A||x| for fp noise in evaluating the row itself),
    so wildly scaled rows are judged fairly while genuine violations at
    order-one rows are still caught.
    """
    worst = 0.0
    ax = np.abs(x)
    if p.A_ub is not None:
        val = p.A_ub @ x
        denom = 1.0 + np.abs(p.b_ub) + np.abs(val) + 1e-8 * (np.abs(p.A_ub) @ ax)
        worst = max(worst, float(np.max((val - p.b_ub) / denom, initial=0.0)))
    if p.A_eq is not None:
        val = p.A_eq @ x
        denom = 1.0 + np.abs(p.b_eq) + np.abs(val) + 1e-8 * (np.abs(p.A_eq) @ ax)
        worst = max(worst, float(np.max(np.abs(val - p.b_eq) / denom, initial=0.0)))
    return worst


def simplex_solve(p: LPProblem, feas_tol=None) -> LPCertificate:
    """Solve the LP; every outcome is re-verified by direct substitution.

    An "optimal" flag is accepted only when the returned point actually
    satisfies the constraints, and an infeasibility flag triggers Farkas
    witness recovery.  Inconclusive solves walk an escalation ladder (tighter
    tolerance first, interior point, loose simplex last); feas_tol tightens
    the first attempt for callers whose slack must beat the HiGHS default.
    """
    attempts = [("highs", feas_tol), ("highs", 1e-9), ("highs-ipm", None),
                ("highs", 1e-6)]
    seen = set()
    last_msg = ""
    for method, tol in attempts:
        key = (method, tol)
        if key in seen:
            continue
        seen.add(key)
        opts = {} if tol is None else {"primal_feasibility_tolerance": tol,
                                       "dual_feasibility_tolerance": tol}
        res = linprog(p.c, A_ub=p.A_ub, b_ub=p.b_ub, A_eq=p.A_eq, b_eq=p.b_eq,
                      bounds=(None, None), method=method, options=opts)
        last_msg = f"scipy status {res.status}: {res.message}"
        if res.status == 0:
            x = np.asarray(res.x)
            worst = _primal_residual(p, x)
            if worst <= WITNESS_TOL:
                return LPCertificate("optimal", float(res.fun), x,
                                     witness_residual=worst)
            last_msg = f"claimed optimum violates constraints by {worst:.2e}"
            continue
        if res.status == 2:
            witness, residual = _farkas_witness(p)
            cert = LPCertificate("infeasible", None, None, farkas=witness,
                                 witness_residual=residual)
            if witness is None:
                cert.warnings.append(
                    "infeasible per solver; Farkas witness recovery failed")
            return cert
        if res.status == 3:
            return LPCertificate("unbounded", None, None)
    raise LPNumericalError(f"LP solver stalled ({last_msg})")


def cheb_derivative_operator(n: int, q: int, interval=(-1.0, 1.0)) -> np.ndarray:
    """Matrix D with (D @ c) the Chebyshev coefficients of the q-th derivative."""
    a, b = interval
    D = np.zeros((n + 1, n + 1))
    for j in range(n + 1):
        e = np.zeros(j + 1)
        e[j] = 1.0
        d = C.chebder(e, q) if q else e
        D[: d.size, j] = d
    return D * (2.0 / (b - a)) ** q


@dataclass
class ConstrainedApproxProblem:
    """Feasible set of one constrained-approximation instance on a grid.

    hermite: ((point, max_order), ...) equality constraints P^(nu)(pt) = f^(nu)(pt)
    sign_regions: ((lo, hi, sign, target), ...) with target 'P' or 'P-f':
        sign * target(x) >= 0 at grid points of [lo, hi]
    deriv_signs: ((lo, hi, sign, q), ...): sign * P^(q)(x) >= 0 on [lo, hi]
    weight: optional pointwise minimax weight w(x) > 0
    """

    f: FunctionModel
    degree: int
    grid: np.ndarray
    hermite: tuple = ()
    sign_regions: tuple = ()
    deriv_signs: tuple = ()
    extra_eq: tuple = ()   # (point, order, value) rows with explicit values
    weight: object = None
    interval: tuple = (-1.0, 1.0)

    def __post_init__(self):
        self.grid = np.unique(np.asarray(self.grid, dtype=float))
        pts = [pt for pt, _ in self.hermite]
        if pts and not np.all(np.isin(np.asarray(pts), self.grid)):
            self.grid = np.unique(np.concatenate([self.grid, np.asarray(pts)]))


def default_grid(interval=(-1.0, 1.0), size=1024, extra=()):
    a, b = interval
    g = np.linspace(a, b, size)
    if len(extra):
        g = np.unique(np.concatenate([g, np.asarray(extra, dtype=float)]))
    return g


def _basis_rows(x, degree, interval, q=0):
    a, b = interval
    t = (2.0 * np.asarray(x, dtype=float) - (a + b)) / (b - a)
    V = C.chebvander(t, degree)
    if q:
        V = V @ cheb_derivative_operator(degree, q, interval)
    return V


def min_error_constrained(prob: ConstrainedApproxProblem):
    """Minimize max_grid w|f - P| over the feasible coefficient set.

    Returns (E_star, P_star, certificate).  The optimum is a lower bound for
    the continuum constrained error; an infeasible grid LP certifies that the
    continuum problem is infeasible.  E_star is None when infeasible.
    """
    n = prob.degree
    xs = prob.grid
    fx = prob.f.eval(0, xs)
    w = np.ones_like(xs) if prob.weight is None else np.asarray(prob.weight(xs), dtype=float)
    if np.any(w <= 0):
        raise ValueError("minimax weight must be positive")
    # normalize the target scale so HiGHS sees O(1) rows; E* rescales after
    scale = float(np.max(np.abs(w * fx)))
    if not np.isfinite(scale) or scale == 0.0:
        scale = 1.0
    fx = fx / scale

    V = _basis_rows(xs, n, prob.interval)
    nv = n + 2  # coefficients + t
    rows, rhs = [], []

    # +-w (P - f) <= t
    A = np.hstack([w[:, None] * V, -np.ones((xs.size, 1))])
    rows.append(A)
    rhs.append(w * fx)
    rows.append(np.hstack([-(w[:, None] * V), -np.ones((xs.size, 1))]))
    rhs.append(-(w * fx))

    for lo, hi, sign, target in prob.sign_regions:
        mask = (xs >= lo - 1e-15) & (xs <= hi + 1e-15)
        if not mask.any():
            continue
        B = -sign * V[mask]
        rows.append(np.hstack([B, np.zeros((B.shape[0], 1))]))
        rhs.append(-sign * fx[mask] if target == "P-f" else np.zeros(B.shape[0]))

    for lo, hi, sign, q in prob.deriv_signs:
        mask = (xs >= lo - 1e-15) & (xs <= hi + 1e-15)
        if not mask.any():
            continue
        Vq = _basis_rows(xs[mask], n, prob.interval, q)
        rows.append(np.hstack([-sign * Vq, np.zeros((Vq.shape[0], 1))]))
        rhs.append(np.zeros(Vq.shape[0]))

    eq_rows, eq_rhs = [], []
    for pt, order in prob.hermite:
        for nu in range(order + 1):
            row = np.zeros(nv)
            row[: n + 1] = _basis_rows([pt], n, prob.interval, nu)[0]
            eq_rows.append(row)
            eq_rhs.append(float(prob.f.eval(nu, pt)) / scale)
    for pt, nu, val in prob.extra_eq:
        row = np.zeros(nv)
        row[: n + 1] = _basis_rows([pt], n, prob.interval, nu)[0]
        eq_rows.append(row)
        eq_rhs.append(float(val) / scale)

    cvec = np.zeros(nv)
    cvec[-1] = 1.0
    lp = LPProblem(
        cvec,
        np.vstack(rows), np.concatenate(rhs),
        np.vstack(eq_rows) if eq_rows else None,
        np.asarray(eq_rhs) if eq_rows else None,
    )
    cert = simplex_solve(lp)
    if xs.size < 4 * max(n, 1):
        cert.warnings.append(f"grid of {xs.size} points may under-resolve degree {n}")
    if cert.optimal:
        P = Chebyshev(scale * cert.x[: n + 1], domain=list(prob.interval))
        return float(cert.value) * scale, P, cert
    return None, None, cert


def certify_blowup(family_id, n, sweep=None, grid_size=1024, resolution=(256, 256)):
    """Sweep a counterexample family at fixed degree n.

    Each row reports the constrained grid-LP error E*, the family's
    normalizer, and their ratio.  Divergence acceptance is monotonicity plus a
    threshold chosen by the caller, never a specific constant.
    """
    from . import negatives  # deferred: negatives builds on this module

    fam = negatives.family(family_id)
    rows = []
    for param in (sweep if sweep is not None else fam.default_sweep):
        inst = fam.instantiate(param)
        prob = inst.approx_problem(n, grid_size=grid_size)
        try:
            estar, _, cert = min_error_constrained(prob)
            status = cert.status
        except LPNumericalError:
            estar, status = None, "numerical"
        norm = inst.normalizer(resolution=resolution)
        ratio = None if estar is None or norm == 0 else estar / norm
        rows.append({
            "family": family_id, "n": n, "param": param,
            "Estar": estar, "normalizer": norm, "ratio": ratio,
            "status": status,
        })
    return rows
