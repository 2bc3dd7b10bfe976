import numpy as np
import pytest

from shapefit import registry
from shapefit.core import (ChebyshevPartition, ConstraintSet, SignPattern,
                           SpecTuple, check_membership, rate_weight,
                           separation, validate_spec)


def test_rate_weight_values():
    assert rate_weight(2, 0.0) == pytest.approx(0.75)
    assert rate_weight(5, 1.0) == pytest.approx(0.04)
    assert rate_weight(4, 0.6) == pytest.approx(0.2625)


def test_rate_weight_domain_error():
    with pytest.raises(ValueError):
        rate_weight(4, 1.5)
    with pytest.raises(ValueError):
        rate_weight(0, 0.5)


def test_rate_weight_halving():
    xs = np.linspace(-1, 1, 501)
    for n in (1, 2, 5, 16, 64):
        r1 = rate_weight(n, xs)
        r2 = rate_weight(2 * n, xs)
        assert np.all(r2 <= r1)
        assert np.all(r1 <= 4 * r2)


@pytest.mark.parametrize("n", [4, 7, 16, 64, 256])
def test_partition_comparisons(n):
    part = ChebyshevPartition(n)
    for j in range(1, n + 1):
        lj = part.length(j)
        for jj in (j - 1, j + 1):
            if 1 <= jj <= n:
                assert part.length(jj) < 3 * lj
        lo, hi = part.interval(j)
        xs = np.linspace(lo, hi, 65)
        rho = rate_weight(n, xs)
        assert np.all(rho < lj)
        assert np.all(lj < 5 * rho)


def test_localization_weight():
    part = ChebyshevPartition(8)
    xj = part.node(4)
    assert part.localization_weight(4, xj) == pytest.approx(1.0)
    h = part.length(4)
    assert part.localization_weight(4, xj + h) == pytest.approx(0.5)
    # direct arithmetic from the cos(j*pi/8) nodes
    expected = h / (abs(1.0 - xj) + h)
    assert part.localization_weight(4, 1.0) == pytest.approx(expected, rel=1e-14)
    with pytest.raises(IndexError):
        part.localization_weight(0, 0.0)


def test_sign_pattern_basics():
    Y = SignPattern((0.3, -0.4))
    assert Y.sign(0.5) == 1.0
    assert Y.sign(0.0) == -1.0
    assert Y.sign(-0.9) == 1.0
    with pytest.raises(ValueError):
        SignPattern((0.3, 0.5))  # not decreasing
    with pytest.raises(ValueError):
        SignPattern((1.0,))  # not interior


def test_separation_examples():
    assert separation(SignPattern((0.0,)), ConstraintSet(((0.5, 1),))) == pytest.approx(0.5)
    assert separation(SignPattern(()), ConstraintSet(((1.0, 0), (-1.0, 0)))) == pytest.approx(2.0)
    assert separation(SignPattern((0.2, -0.2)), ConstraintSet(((0.9, 0),))) == pytest.approx(0.1)
    with pytest.raises(ValueError):
        separation(SignPattern((0.5,)), ConstraintSet(((0.5, 0),)))


ACCEPTED = [
    SpecTuple("intertwining", 2, 1, 1, 0, 1),
    SpecTuple("intertwining", 1, 3, -1, 0, 0),
    SpecTuple("intertwining", 3, 2, 1, 2, 2),
    SpecTuple("intertwining", 4, 1, 3, 2, 3),
    SpecTuple("onesided", 2, 2, 1, None, 1),
    SpecTuple("onesided", 3, 1, 1, None, 2),
    SpecTuple("copositive", 0, 2, 0, 0, 0),
    SpecTuple("copositive", 1, 3, 0, 0, 0),
    SpecTuple("copositive", 1, 2, 0, 1, 0),
    SpecTuple("copositive", 2, 3, 1, 1, 1),
    SpecTuple("copositive", 2, 5, 1, 0, 1),
    SpecTuple("copositive", 1, 7, -1, 0, 0),
    SpecTuple("copositive", 3, 2, 1, 2, 2),
    SpecTuple("positive", 0, 2, 0, None, 0),
    SpecTuple("positive", 1, 2, 0, None, 0),
    SpecTuple("positive", 1, 3, 0, None, 0),
    SpecTuple("positive", 2, 3, 1, None, 1),
    SpecTuple("positive", 1, 5, -1, None, 0),
    SpecTuple("positive", 4, 2, 3, None, 3),
]

REJECTED = [
    SpecTuple("intertwining", 0, 2, 0, 0, 0),   # no r = 0 row
    SpecTuple("intertwining", 2, 1, 2, 0, 1),   # m1 = r impossible
    SpecTuple("intertwining", 2, 1, 1, 1, 1),   # m2 = r-1 impossible
    SpecTuple("intertwining", 3, 1, 2, 2, 2),   # m1 = r-1 impossible for odd r
    SpecTuple("copositive", 1, 4, 0, 0, 0),     # k = 4 impossible at r = 1
    SpecTuple("copositive", 0, 3, 0, 0, 0),     # k = 3 impossible at r = 0
    SpecTuple("copositive", 1, 2, 1, 1, 0),     # m1 = 1 impossible at r = 1
    SpecTuple("copositive", 2, 3, 2, 1, 1),     # m1 = r impossible
    SpecTuple("copositive", 2, 2, 1, 1, 1),     # m2 = 1 needs k = 3
    SpecTuple("positive", 0, 3, 0, None, 0),
    SpecTuple("positive", 1, 1, 0, None, 0),
    SpecTuple("positive", 2, 2, 2, None, 1),
    SpecTuple("onesided", 2, 2, 1, 0, 1),       # onesided carries no m2
]


@pytest.mark.parametrize("t", ACCEPTED, ids=lambda t: f"{t.family}{(t.r, t.k, t.m1, t.m2, t.m3)}")
def test_validate_accepts(t):
    ok, reason = validate_spec(t)
    assert ok, reason


@pytest.mark.parametrize("t", REJECTED, ids=lambda t: f"{t.family}{(t.r, t.k, t.m1, t.m2, t.m3)}")
def test_validate_rejects(t):
    ok, reason = validate_spec(t)
    assert not ok
    assert reason


def test_rejection_names_offending_coordinate():
    ok, reason = validate_spec(SpecTuple("intertwining", 2, 1, 2, 0, 1))
    assert "m1" in reason


def test_membership_identity():
    f = registry.make({"name": "exp"})
    spec = SpecTuple("copositive", 0, 2, 0, 0, 0)
    rep = check_membership(f, f, SignPattern(()), ConstraintSet(((0.5, 0),)), spec)
    assert rep.sign_residual == 0.0
    assert rep.max_hermite_rel() <= 1e-15


def test_membership_copositive_sign():
    # f == 0, g(x) = x carries the sign pattern of a single change at 0
    f = registry.make({"name": "poly", "coef": [0.0], "basis": "power"})
    g = registry.make({"name": "poly", "coef": [0.0, 1.0], "basis": "power"})
    spec = SpecTuple("copositive", 0, 2, 0, 0, 0)
    rep = check_membership(g, f, SignPattern((0.0,)), ConstraintSet(()), spec)
    assert rep.sign_residual == 0.0


def test_membership_hermite_constructed():
    f = registry.make({"name": "poly", "coef": [0, 0, 1.0], "basis": "power"})
    g = registry.make(
        {"name": "poly", "coef": [1e-3 * 0.25, -1e-3, 1 + 1e-3], "basis": "power"})
    # g = x^2 + 1e-3 (x - 0.5)^2 matches f and f' at 0.5 by construction
    spec = SpecTuple("onesided", 2, 1, 1, None, 1)
    rep = check_membership(g, f, SignPattern(()), ConstraintSet(((0.5, 1),)), spec)
    res = {(pt, nu): r for pt, nu, r, _ in rep.hermite}
    assert res[(0.5, 0)] <= 1e-12
    assert res[(0.5, 1)] <= 1e-12


@pytest.mark.parametrize("fs", [
    {"name": "exp"}, {"name": "sin", "freq": 3.0}, {"name": "runge", "a": 3.0},
    {"name": "gauss", "a": 2.0}, {"name": "sqrtshift", "c": 1.5},
    {"name": "logshift", "c": 1.7}, {"name": "invshift", "c": 2.0},
    {"name": "cosh"}, {"name": "truncpow", "m": 4, "lambda": 0.25},
    {"name": "copositive_prod", "roots": [0.2], "base": {"name": "exp"}},
], ids=lambda s: s["name"])
def test_registry_derivative_consistency(fs):
    """Supplied derivatives agree with centered differences of the next-lower
    order at random interior points (relative tolerance 1e-6)."""
    f = registry.make(fs)
    rng = np.random.default_rng(7)
    xs = rng.uniform(-0.8, 0.8, 25)
    if f.kinks:
        keep = np.ones_like(xs, dtype=bool)
        for kk in f.kinks:
            keep &= np.abs(xs - kk) > 0.05
        xs = xs[keep]
    h = 1e-6
    for i in range(1, min(f.smoothness, 3) + 1):
        fd = (f.eval(i - 1, xs + h) - f.eval(i - 1, xs - h)) / (2 * h)
        exact = f.eval(i, xs)
        scale = 1.0 + np.abs(exact)
        assert np.max(np.abs(fd - exact) / scale) < 1e-5


def test_function_model_domain_and_order_errors():
    f = registry.make({"name": "abshift"})
    with pytest.raises(ValueError):
        f.eval(1, 0.3)  # beyond declared smoothness
    g = f.restricted(-0.5, 0.5)
    with pytest.raises(ValueError):
        g.eval(0, 0.9)
