import numpy as np
import pytest

from shapefit import registry
from shapefit.smoothness import forward_difference, modulus, modulus_value


def test_forward_difference_values():
    assert forward_difference(lambda x: x, 0.0, 0.5, 1) == pytest.approx(0.5)
    assert forward_difference(lambda x: 2 * x + 3, 0.1, 0.37, 2) == pytest.approx(0.0, abs=1e-14)
    assert forward_difference(lambda x: x * x, 0.0, 0.3, 2) == pytest.approx(0.18)


def test_modulus_examples():
    assert modulus_value(lambda x: x, 1, 0.5) == pytest.approx(0.5, rel=1e-12)
    assert modulus_value(lambda x: 2 * x - 1, 2, 0.7) == pytest.approx(0.0, abs=1e-13)
    # brute-force oracle: Delta^2_h x^2 = 2 h^2, max admissible h = 1
    assert modulus_value(lambda x: x * x, 2, 1.0) == pytest.approx(2.0, rel=1e-12)


def test_modulus_monotone_in_t():
    f = registry.make({"name": "sin", "freq": 3.0})
    ts = np.geomspace(1e-3, 2.0, 17)
    vals = [modulus_value(f, 2, t, resolution=(128, 128)) for t in ts]
    assert all(a <= b + 1e-15 for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("k", [2, 3])
def test_order_reduction(k):
    f = registry.make({"name": "runge", "a": 3.0})
    for t in (0.1, 0.5, 1.5):
        wk = modulus_value(f, k, t, resolution=(128, 128))
        wk1 = modulus_value(f, k - 1, t, resolution=(128, 128))
        assert wk <= 2 * wk1 + 1e-8


def test_derivative_bound():
    f = registry.make({"name": "exp"})
    xs = np.linspace(-1, 1, 2001)
    for k in (1, 2, 3):
        supk = np.max(np.abs(f.eval(k, xs)))
        for t in (0.05, 0.2):
            assert modulus_value(f, k, t, resolution=(128, 128)) <= t**k * supk + 1e-8


def test_reflection_invariance():
    f = registry.make({"name": "sin", "freq": 3.0})
    g = lambda x: f.eval(0, -np.asarray(x))
    for k in (1, 2):
        a = modulus_value(f, k, 0.5, (-1, 1), (128, 128))
        b = modulus_value(g, k, 0.5, (-1, 1), (128, 128))
        assert a == pytest.approx(b, rel=1e-10)


def test_degenerate_window_flag():
    est = modulus(lambda x: x, 3, 1e-12, (-1, 1), (64, 64))
    assert est.degenerate
    assert est.value == 0.0


def test_estimates_from_below_converge():
    f = registry.make({"name": "gauss", "a": 2.0})
    lo = modulus_value(f, 2, 0.3, resolution=(64, 64))
    hi = modulus_value(f, 2, 0.3, resolution=(256, 256))
    assert lo <= hi + 1e-15
    assert hi <= lo * 1.05  # resolution guard: refining moves the estimate < 5%
