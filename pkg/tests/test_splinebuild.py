import numpy as np
import pytest
from numpy.polynomial import Chebyshev

from shapefit import registry
from shapefit.core import ConstraintSet, SignPattern, SpecTuple, check_membership
from shapefit.interp import cheb_interpolate
from shapefit.splinebuild import (BlendError, KnotDensityError, KnotSequence,
                                  Spline, beatson_blend, build_copositive_spline,
                                  build_intertwining_spline, classify_intervals,
                                  error_table, minimal_chebyshev_n)


def test_knot_sequence_validation():
    with pytest.raises(ValueError):
        KnotSequence([1.0, 0.5, 0.7, -1.0])
    ks = KnotSequence.chebyshev(16)
    assert ks.n == 16
    assert ks.knot(-3) == 1.0 and ks.knot(99) == -1.0
    assert ks.mesh_ratio() < 3.0


def test_density_validation_and_required_n():
    Y = SignPattern((0.0,))
    A = ConstraintSet(())
    ks = KnotSequence.chebyshev(16)
    with pytest.raises(KnotDensityError) as ei:
        ks.validate_density(Y, A, 4)
    assert ei.value.required_n == minimal_chebyshev_n(Y, A, 4)
    KnotSequence.chebyshev(ei.value.required_n).validate_density(Y, A, 4)


def test_classify_intervals():
    ends = ConstraintSet(((1.0, 0), (-1.0, 0)))
    coarse = np.array([1.0, 0.5, 0.0, -0.5, -1.0])
    tags, mus = classify_intervals(coarse, SignPattern(()), ends)
    kinds = [t.kind for t in tags]
    assert kinds == ["endpoint", "clean", "clean", "endpoint"]
    assert mus == [1, 4]

    coarse6 = np.linspace(1.0, -1.0, 7)
    tags, mus = classify_intervals(coarse6, SignPattern((0.1,)), ends)
    assert [t.kind for t in tags] == ["endpoint", "clean", "Y", "clean", "clean", "endpoint"]
    assert tags[2].y_position == 1

    # two points in one coarse interval: density error with guidance
    with pytest.raises(KnotDensityError):
        classify_intervals(coarse6, SignPattern((0.30, 0.05)), ends)
    # adjacent contaminated intervals are rejected too
    with pytest.raises(KnotDensityError):
        classify_intervals(coarse6, SignPattern((0.5, 0.2)), ends)


def test_beatson_examples():
    p = Chebyshev([0.4, 0.3, -0.1], domain=[0, 1])
    S = beatson_blend(p, p, np.linspace(0, 1, 9), 3)
    xs = np.linspace(0, 1, 200)
    assert np.max(np.abs(S.eval(xs) - p(xs))) < 1e-12

    S = beatson_blend(Chebyshev([0.0]), Chebyshev([1.0]), [0.0, 0.5, 1.0], 2)
    v = S.eval(xs)
    assert v.min() >= -1e-12 and v.max() <= 1 + 1e-12
    assert S.eval(0.0) == pytest.approx(0.0, abs=1e-12)
    assert S.eval(1.0) == pytest.approx(1.0, abs=1e-12)

    p2 = cheb_interpolate(lambda x: np.asarray(x), 2, (0, 1))
    S = beatson_blend(Chebyshev([0.0], domain=[0, 1]), p2, np.linspace(0, 1, 9), 3)
    assert abs(S.eval(0.0, 1)) < 1e-10  # C^1 exit onto the zero piece
    assert S.eval(1.0, 1) == pytest.approx(1.0, abs=1e-10)
    assert np.min(S.eval(xs)) >= -1e-9
    assert np.max(S.eval(xs) - xs) <= 1e-9


def test_beatson_needs_enough_intervals():
    with pytest.raises(BlendError):
        beatson_blend(Chebyshev([0.0]), Chebyshev([1.0]), [0.0, 1.0], 3)


@pytest.mark.parametrize("m", [2, 3, 4, 5])
def test_beatson_randomized_envelope_and_smoothness(m):
    rng = np.random.default_rng(100 + m)
    d = 2 * (m - 1) ** 2
    for _ in range(6):
        knots = np.sort(rng.uniform(-1, 1, d + 1))
        while np.min(np.diff(knots)) < 1e-3:
            knots = np.sort(rng.uniform(-1, 1, d + 1))
        p1 = Chebyshev(rng.normal(size=m), domain=[knots[0], knots[-1]])
        p2 = Chebyshev(rng.normal(size=m), domain=[knots[0], knots[-1]])
        S = beatson_blend(p1, p2, knots, m)
        xs = np.linspace(knots[0], knots[-1], 1024)
        v1, v2, vs = p1(xs), p2(xs), S.eval(xs)
        scale = 1 + max(np.max(np.abs(v1)), np.max(np.abs(v2)))
        assert np.max(np.maximum(vs - np.maximum(v1, v2), np.minimum(v1, v2) - vs)) <= 1e-9 * scale
        assert np.max(S.smoothness_jumps()) <= 1e-8


def test_intertwining_build_and_membership():
    f = registry.make({"name": "sin", "freq": 3.0})
    Y = SignPattern((0.3, -0.4))
    A = ConstraintSet(())
    spec = SpecTuple("intertwining", 2, 2, 1, 0, 1)
    n = minimal_chebyshev_n(Y, A, 4)
    rep = build_intertwining_spline(f, Y, A, spec, n=n)
    mem = check_membership(rep.spline, f, Y, A, spec)
    assert mem.ok
    # the sign of S - f flips exactly at the points of Y
    for y in Y.points:
        left = rep.spline.eval(y - 1e-4) - f.eval(0, y - 1e-4)
        right = rep.spline.eval(y + 1e-4) - f.eval(0, y + 1e-4)
        assert left * right <= 0
    assert np.max(rep.spline.smoothness_jumps()) <= 1e-8


def test_onesided_exp_with_endpoint_orders():
    f = registry.make({"name": "exp"})
    spec = SpecTuple("onesided", 2, 1, 1, None, 1)
    rep = build_intertwining_spline(f, SignPattern(()), ConstraintSet(()), spec, n=17)
    xs = np.linspace(-1, 1, 4001)
    diff = rep.spline.eval(xs) - f.eval(0, xs)
    assert np.min(diff) >= -1e-10 * (1 + np.e)
    for e in (-1.0, 1.0):
        assert abs(rep.spline.eval(e) - f.eval(0, e)) < 1e-9 * 3
        assert abs(rep.spline.eval(e, 1) - f.eval(1, e)) < 1e-8 * 3


def test_polynomial_reproduction_through_builders():
    xs = np.linspace(-1, 1, 2001)
    f = registry.make({"name": "poly", "coef": [0.3, -0.2, 0.5, 0.1], "basis": "power"})
    rep = build_intertwining_spline(f, SignPattern((0.3, -0.4)), ConstraintSet(()),
                                    SpecTuple("intertwining", 2, 2, 1, 0, 1), n=156)
    scale = 1 + np.max(np.abs(f.eval(0, xs)))
    assert np.max(np.abs(rep.spline.eval(xs) - f.eval(0, xs))) / scale < 1e-9

    fr = registry.make({"name": "poly", "coef": [0, 2.0, 1.0], "basis": "power"})
    rep = build_copositive_spline(fr, SignPattern((0.0,)), ConstraintSet(()),
                                  SpecTuple("copositive", 1, 2, 0, 1, 0))
    scale = 1 + np.max(np.abs(fr.eval(0, xs)))
    assert np.max(np.abs(rep.spline.eval(xs) - fr.eval(0, xs))) / scale < 1e-9


def test_copositive_positive_example():
    g = registry.make({"name": "poly", "coef": [0, 0, 1.0], "basis": "power"})
    spec = SpecTuple("positive", 0, 2, 0, None, 0)
    rep = build_copositive_spline(g, SignPattern(()), ConstraintSet(((0.5, 0),)), spec)
    xs = np.linspace(-1, 1, 4001)
    assert np.min(rep.spline.eval(xs)) >= -1e-10 * 2
    assert rep.spline.eval(0.5) == pytest.approx(0.25, abs=1e-10)


def test_copositive_y_contact():
    f = registry.make({"name": "copositive_prod", "roots": [0.0], "base": {"name": "exp"}})
    spec = SpecTuple("copositive", 1, 2, 0, 1, 0)
    rep = build_copositive_spline(f, SignPattern((0.0,)), ConstraintSet(()), spec)
    mem = check_membership(rep.spline, f, SignPattern((0.0,)), ConstraintSet(()), spec)
    assert mem.ok
    assert abs(rep.spline.eval(0.0) - f.eval(0, 0.0)) < 1e-10
    assert abs(rep.spline.eval(0.0, 1) - f.eval(1, 0.0)) < 1e-9 * (1 + abs(f.eval(1, 0.0)))


def test_copositive_delegation_matches_membership():
    f = registry.make({"name": "copositive_prod", "roots": [0.0], "base": {"name": "cosh"}})
    spec = SpecTuple("copositive", 2, 2, 1, 0, 1)
    rep = build_copositive_spline(f, SignPattern((0.0,)), ConstraintSet(((0.5, 1),)), spec)
    mem = check_membership(rep.spline, f, SignPattern((0.0,)), ConstraintSet(((0.5, 1),)), spec)
    assert mem.ok


def test_shape_precondition_enforced():
    f = registry.make({"name": "sin", "freq": 4.0})  # extra sign changes at +-pi/4
    with pytest.raises(ValueError, match="sign pattern"):
        build_copositive_spline(f, SignPattern((0.0,)), ConstraintSet(()),
                                SpecTuple("copositive", 1, 2, 0, 1, 0))


def test_spec_family_mismatch():
    f = registry.make({"name": "exp"})
    with pytest.raises(ValueError):
        build_intertwining_spline(f, SignPattern(()), ConstraintSet(()),
                                  SpecTuple("positive", 0, 2, 0, None, 0))


def test_smoothness_requirement():
    f = registry.make({"name": "abshift"})
    with pytest.raises(ValueError, match="C"):
        build_intertwining_spline(f, SignPattern(()), ConstraintSet(()),
                                  SpecTuple("onesided", 1, 2, -1, None, 0))


def test_serialization_roundtrip_bit_exact():
    f = registry.make({"name": "runge", "a": 3.0})
    rep = build_intertwining_spline(f, SignPattern(()), ConstraintSet(()),
                                    SpecTuple("onesided", 1, 2, -1, None, 0), n=17)
    text = rep.spline.to_json()
    S2 = Spline.from_json(text)
    assert S2.to_json() == text
    xs = np.linspace(-1, 1, 777)
    assert np.array_equal(S2.eval(xs), rep.spline.eval(xs))
    assert S2.provenance["spec"]["family"] == "onesided"


def test_error_table_shape_and_ratios():
    f = registry.make({"name": "exp"})
    rep = build_intertwining_spline(f, SignPattern(()), ConstraintSet(()),
                                    SpecTuple("onesided", 1, 2, -1, None, 0), n=33)
    rows = error_table(rep, f)
    assert len(rows) == 33
    assert all(r["bound"] >= 0 for r in rows)
    assert all(np.isfinite(r["ratio"]) for r in rows)
    assert max(r["ratio"] for r in rows) < 50.0
