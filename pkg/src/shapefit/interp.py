"""Divided differences with repeated nodes and Lagrange-Hermite interpolation.

Polynomials are carried in the Chebyshev basis of their working interval
(numpy.polynomial.Chebyshev with an explicit domain); the Newton confluent
form is used transiently inside divided-difference assembly.  Hermite systems
are never solved through Vandermonde matrices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Chebyshev

from .core import FunctionModel
from .smoothness import modulus_value


def cheb_interpolate(fn, deg, interval):
    """Chebyshev interpolant of a callable; exact for polynomials of degree <= deg."""
    a, b = float(interval[0]), float(interval[1])
    return Chebyshev.interpolate(fn, deg, domain=[a, b])


def poly_degree(p: Chebyshev, tol=0.0) -> int:
    c = p.coef
    nz = np.nonzero(np.abs(c) > tol)[0]
    return int(nz[-1]) if nz.size else 0


@dataclass(frozen=True)
class NodeMultiset:
    """Interpolation nodes sorted ascending, with repetitions allowed.

    The confluent order of a node is its rank within its repetition block;
    a node repeated m times consumes derivatives of order 0..m-1.
    """

    nodes: tuple[float, ...]

    def __post_init__(self):
        ns = tuple(float(v) for v in self.nodes)
        if any(ns[i] > ns[i + 1] for i in range(len(ns) - 1)):
            raise ValueError("nodes must be sorted ascending")
        if not ns:
            raise ValueError("need at least one node")
        object.__setattr__(self, "nodes", ns)

    @property
    def size(self) -> int:
        return len(self.nodes)

    def confluent_orders(self):
        """l_j - 1: the derivative order consumed at position j."""
        orders = []
        for j, y in enumerate(self.nodes):
            l = 0
            while j - 1 - l >= 0 and self.nodes[j - 1 - l] == y:
                l += 1
            orders.append(l)
        return orders

    def max_multiplicity(self) -> int:
        return max(self.confluent_orders()) + 1

    def spread(self, r: int) -> float:
        """Lambda_r = min_j (y_{j+r+1} - y_j); needs at least r+2 nodes."""
        if self.size < r + 2:
            raise ValueError(f"spread of order {r} needs at least {r + 2} nodes")
        ys = np.asarray(self.nodes)
        return float(np.min(ys[r + 1:] - ys[: self.size - r - 1]))


def _as_multiset(V):
    if isinstance(V, NodeMultiset):
        return V
    return NodeMultiset(tuple(sorted(float(v) for v in V)))


def _eval_orders(f, nodes, orders):
    if hasattr(f, "eval"):
        return [float(f.eval(o, y)) for y, o in zip(nodes, orders)]
    if callable(f):
        if max(orders) > 0:
            raise ValueError("repeated nodes need derivative evaluation (FunctionModel)")
        return [float(f(y)) for y in nodes]
    raise TypeError(f"cannot evaluate {type(f)}")


def newton_coefficients(V, f):
    """Confluent Newton divided-difference coefficients [y_0..y_j; f], j = 0..sigma-1.

    Repeated blocks use f^(m)(y) / m!.
    """
    V = _as_multiset(V)
    ys = np.asarray(V.nodes)
    sigma = V.size
    smooth = getattr(f, "smoothness", None)
    if smooth is not None and V.max_multiplicity() - 1 > smooth:
        raise ValueError(
            f"node multiplicity {V.max_multiplicity()} exceeds declared smoothness {smooth}"
        )
    vals = _eval_orders(f, ys, [0] * sigma)

    fact = 1.0
    col = np.asarray(vals, dtype=float)
    out = [col[0]]
    for k in range(1, sigma):
        fact *= k
        new = np.empty(sigma - k)
        for i in range(sigma - k):
            if ys[i + k] == ys[i]:
                new[i] = _eval_orders(f, [ys[i]], [k])[0] / fact
            else:
                new[i] = (col[i + 1] - col[i]) / (ys[i + k] - ys[i])
        col = new
        out.append(col[0])
    return np.asarray(out)


def divided_difference(V, f) -> float:
    """Top divided difference [y_0, ..., y_{sigma-1}; f]."""
    return float(newton_coefficients(V, f)[-1])


def newton_eval(coeffs, nodes, x):
    """Evaluate the Newton form sum c_j prod_{i<j} (x - y_i)."""
    x = np.asarray(x, dtype=float)
    out = np.full(x.shape, coeffs[-1], dtype=float)
    for j in range(len(coeffs) - 2, -1, -1):
        out = out * (x - nodes[j]) + coeffs[j]
    return out


def lagrange_hermite(V, f, interval=None) -> Chebyshev:
    """Unique polynomial of degree <= sigma-1 matching f (and derivatives at
    repeated nodes) on the node multiset, in the Chebyshev basis."""
    V = _as_multiset(V)
    coeffs = newton_coefficients(V, f)
    if interval is None:
        a, b = V.nodes[0], V.nodes[-1]
        if a == b:  # Taylor case: any nondegenerate window represents it exactly
            a, b = a - 1.0, b + 1.0
        if isinstance(f, FunctionModel):
            a = min(a, f.domain[0])
            b = max(b, f.domain[1])
        interval = (a, b)
    return cheb_interpolate(lambda x: newton_eval(coeffs, V.nodes, x), V.size - 1, interval)


def steffensen_product_dd(V, f, g) -> float:
    """Leibniz (Steffensen) formula [y_0..y_q; f*g] = sum_i [y_0..y_i; f][y_i..y_q; g]."""
    V = _as_multiset(V)
    total = 0.0
    for i in range(V.size):
        left = divided_difference(NodeMultiset(V.nodes[: i + 1]), f)
        right = divided_difference(NodeMultiset(V.nodes[i:]), g)
        total += left * right
    return total


@dataclass
class WhitneyReport:
    ratio: float
    sup_error: float
    omega: float
    interval: tuple[float, float]
    spread_ratio: float | None


def whitney_check(f: FunctionModel, V, r: int, min_spread_ratio=0.0, grid=1024,
                  resolution=(256, 256)) -> WhitneyReport:
    """Ratio sup |f - L| / ((b-a)^r * omega_{sigma-r}(f^(r), b-a; [a,b])).

    The interval is f's domain.  When sigma >= r+2 the node spread condition
    Lambda_r >= min_spread_ratio * (b-a) is enforced; the Taylor-like case
    sigma = r+1 carries no such condition.  Only stability of the ratio is
    asserted by callers -- the constant itself is unspecified.
    """
    V = _as_multiset(V)
    a, b = f.domain
    sigma = V.size
    if sigma < r + 1:
        raise ValueError(f"need at least r+1 = {r + 1} nodes, got {sigma}")
    spread_ratio = None
    if sigma >= r + 2:
        spread_ratio = V.spread(r) / (b - a)
        if spread_ratio < min_spread_ratio:
            raise ValueError(
                f"node spread Lambda_{r} = {V.spread(r):.3g} below "
                f"{min_spread_ratio} * (b-a) = {min_spread_ratio * (b - a):.3g}"
            )
    L = lagrange_hermite(V, f, interval=(a, b))
    xs = np.linspace(a, b, grid)
    sup_err = float(np.max(np.abs(f.eval(0, xs) - L(xs))))
    om = modulus_value(f.deriv_fn(r), sigma - r, b - a, (a, b), resolution)
    ratio = sup_err / ((b - a) ** r * om) if om > 0 else 0.0
    return WhitneyReport(ratio, sup_err, om, (a, b), spread_ratio)
