import itertools

import numpy as np
import pytest

from shapefit import registry
from shapefit.interp import (NodeMultiset, divided_difference, lagrange_hermite,
                             newton_coefficients, steffensen_product_dd,
                             whitney_check)


def test_divided_difference_examples():
    assert divided_difference([0.0, 1.0], lambda x: x * x) == pytest.approx(1.0)
    f = registry.make({"name": "exp"})
    assert divided_difference(NodeMultiset((0.0, 0.0)), f) == pytest.approx(1.0)
    cubic = registry.make({"name": "poly", "coef": [0, 0, 0, 1], "basis": "power"})
    # Newton tableau by hand: ([0,1] - [0,0]) / (1 - 0) = (1 - 0) / 1
    assert divided_difference(NodeMultiset((0.0, 0.0, 1.0)), cubic) == pytest.approx(1.0)


def test_permutation_invariance_distinct_nodes():
    f = registry.make({"name": "runge", "a": 2.0})
    nodes = (-0.7, -0.1, 0.4, 0.9)
    vals = {divided_difference(sorted(p), f) for p in itertools.permutations(nodes)}
    base = divided_difference(nodes, f)
    for p in itertools.permutations(nodes):
        # divided differences over distinct nodes do not depend on order
        tbl = dict(zip(sorted(p), [f.eval(0, v) for v in sorted(p)]))
        assert divided_difference(sorted(p), f) == pytest.approx(base, rel=1e-9)


def test_lagrange_hermite_examples():
    L = lagrange_hermite([0.0, 1.0], lambda x: x * x, interval=(0, 1))
    xs = np.linspace(0, 1, 50)
    assert np.allclose(L(xs), xs, atol=1e-13)

    cubic = registry.make({"name": "poly", "coef": [0.2, -1.0, 0.5, 2.0], "basis": "power"})
    L = lagrange_hermite(NodeMultiset((0.0, 0.0, 1.0, 1.0)), cubic, interval=(-1, 1))
    xs = np.linspace(-1, 1, 64)
    assert np.allclose(L(xs), cubic.eval(0, xs), atol=1e-11)

    quart = registry.make({"name": "poly", "coef": [0, 0, 0, 0, 1.0], "basis": "power"})
    L = lagrange_hermite(NodeMultiset((-1.0, 0.0, 0.0, 1.0)), quart, interval=(-1, 1))
    assert np.allclose(L(xs), xs * xs, atol=1e-12)  # the 4 Hermite conditions force x^2


def test_polynomial_reproduction_property():
    rng = np.random.default_rng(3)
    for trial in range(10):
        sigma = rng.integers(2, 7)
        f = registry.make({"name": "poly", "coef": rng.normal(size=sigma), "basis": "cheb"})
        pts = np.sort(rng.uniform(-0.9, 0.9, size=rng.integers(1, sigma + 1)))
        nodes = []
        for p in pts:
            nodes.extend([p] * rng.integers(1, 3))
        nodes = tuple(sorted(nodes[:sigma] + [float(x) for x in
                      rng.uniform(-1, 1, max(0, sigma - len(nodes)))]))
        V = NodeMultiset(tuple(sorted(nodes)))
        L = lagrange_hermite(V, f, interval=(-1, 1))
        xs = np.linspace(-1, 1, 200)
        scale = 1 + np.max(np.abs(f.eval(0, xs)))
        assert np.max(np.abs(L(xs) - f.eval(0, xs))) / scale < 1e-10


def test_steffensen_cross_check():
    f = registry.make({"name": "exp"})
    g = registry.make({"name": "sin", "freq": 2.0})

    class Product:
        smoothness = 10

        @staticmethod
        def eval(i, x):
            import math
            out = 0.0
            for l in range(i + 1):
                out += math.comb(i, l) * f.eval(l, x) * g.eval(i - l, x)
            return out

    V = NodeMultiset((-0.5, -0.5, 0.2, 0.7))
    direct = divided_difference(V, Product)
    leib = steffensen_product_dd(V, f, g)
    assert direct == pytest.approx(leib, rel=1e-9)


def test_multiplicity_needs_smoothness():
    f = registry.make({"name": "abshift"})  # C^0 only
    with pytest.raises(ValueError):
        newton_coefficients(NodeMultiset((0.2, 0.2)), f)


def test_whitney_reproduction_is_zero():
    f = registry.make({"name": "poly", "coef": [0.3, 1.0, -0.2, 0.5], "basis": "power"})
    rep = whitney_check(f.restricted(-0.5, 0.5), NodeMultiset((-0.4, -0.1, 0.2, 0.4)), r=1)
    assert rep.sup_error < 1e-13


def test_whitney_ratio_stable_for_exp():
    f = registry.make({"name": "exp"})
    ratios = []
    for h in (0.4, 0.2, 0.1):
        V = NodeMultiset(tuple(np.linspace(0.0, h, 4)))
        rep = whitney_check(f.restricted(0.0, h), V, r=1)
        ratios.append(rep.ratio)
    assert max(ratios) <= 2.0 * min(ratios)


def test_whitney_taylor_case_runs_without_spread():
    f = registry.make({"name": "exp"})
    V = NodeMultiset((0.1, 0.1, 0.1))  # sigma = r + 1: no spread condition
    rep = whitney_check(f.restricted(-0.5, 0.5), V, r=2, min_spread_ratio=0.9)
    assert rep.spread_ratio is None
    assert np.isfinite(rep.ratio)


def test_whitney_spread_violation_reports_deficit():
    f = registry.make({"name": "exp"})
    V = NodeMultiset((0.0, 1e-4, 2e-4, 0.9))
    with pytest.raises(ValueError, match="spread"):
        whitney_check(f, V, r=1, min_spread_ratio=0.5)


def test_polynomial_basis_roundtrip():
    """Chebyshev <-> power conversions round-trip to 1e-12 relative."""
    rng = np.random.default_rng(42)
    from numpy.polynomial import Chebyshev, Polynomial
    for deg in (3, 8, 15):
        p = Chebyshev(rng.normal(size=deg + 1), domain=[-0.3, 0.9])
        q = p.convert(kind=Polynomial).convert(kind=Chebyshev, domain=[-0.3, 0.9])
        xs = np.linspace(-0.3, 0.9, 200)
        scale = 1 + np.max(np.abs(p(xs)))
        assert np.max(np.abs(p(xs) - q(xs))) / scale < 1e-12
        assert p.deriv(1).degree() <= max(deg - 1, 0)
