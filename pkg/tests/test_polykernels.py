import numpy as np
import pytest

from shapefit.core import ChebyshevPartition, ConstraintSet, SignPattern, grid_union
from shapefit.interp import NodeMultiset, cheb_interpolate, divided_difference
from shapefit.polykernels import (InterpolatoryCorrection, TruncatedPower,
                                  WindowContaminationError, build_even_pair,
                                  build_truncated_power_pair, kernel_nodes,
                                  kernel_ratio_range, localized_kernel)


def test_kernel_two_sided_bounds_n16():
    for j in range(1, 16):
        lo, hi = kernel_ratio_range(16, j, 2000)
        assert lo >= 1.0 - 1e-9
        assert hi <= 4000.0 * (1 + 1e-9)


def test_kernel_value_at_half_node():
    n, j = 16, 5
    theta0, theta_bar = kernel_nodes(n, j)
    xbar, x0 = np.cos(theta_bar), np.cos(theta0)
    expected = ((xbar - x0) ** -2 * np.cos(2 * n * np.arccos(xbar)) ** 2
                + 4 * n * n / (1 - xbar**2))
    assert localized_kernel(n, j, xbar) == pytest.approx(expected, rel=1e-12)
    # the removable singularity is smooth: nearby evaluations agree
    near = localized_kernel(n, j, xbar + 1e-9)
    assert near == pytest.approx(expected, rel=1e-6)


def test_kernel_degree():
    n, j = 16, 5
    p = cheb_interpolate(lambda x: localized_kernel(n, j, x), 4 * n - 2, (-1, 1))
    xs = np.linspace(-0.999, 0.999, 555)
    t = localized_kernel(n, j, xs)
    assert np.max(np.abs(p(xs) - t)) / np.max(np.abs(t)) < 1e-11


def test_kernel_index_and_domain_errors():
    with pytest.raises(IndexError):
        localized_kernel(8, 8, 0.0)
    with pytest.raises(ValueError):
        localized_kernel(8, 3, 1.5)


def test_truncated_power():
    g = TruncatedPower(3, 0.25)
    xs = np.linspace(-1, 1, 101)
    assert np.all(g.eval(0, xs[xs < 0.25]) == 0.0)
    assert g.eval(0, 0.5) == pytest.approx(0.25**3)
    assert g.eval(2, 0.5) == pytest.approx(6 * 0.25)
    assert np.all(g.eval(5, xs) == 0.0)


def _correction(n=16, j=8, r=1, mu_prime=8):
    Y = SignPattern((-0.5,))
    A = ConstraintSet(((0.7, 0),))
    return InterpolatoryCorrection(n, j, mu_prime, r, Y, A), Y, A


def test_correction_window_validation():
    part = ChebyshevPartition(16)
    inside = 0.5 * (part.node(8) + part.node(7))
    with pytest.raises(WindowContaminationError):
        InterpolatoryCorrection(16, 8, 8, 1, SignPattern((inside,)), ConstraintSet(()))


def test_correction_zero_orders_and_signs():
    corr, Y, A = _correction()
    # vanishes with all derivatives to order r at constraint points: divided
    # differences over repeated nodes stay at the kink scale
    class _H:
        smoothness = 4

        @staticmethod
        def eval(i, x):
            if i == 0:
                return corr.value(x)
            h = 1e-5
            if i == 1:
                return (corr.value(x + h) - corr.value(x - h)) / (2 * h)
            return (corr.value(x + h) - 2 * corr.value(x) + corr.value(x - h)) / h**2

    scale = float(np.max(np.abs(corr.value(np.linspace(-1, 1, 801)))))
    for beta in list(A.points):
        assert abs(corr.value(beta)) <= 1e-12 * scale
        dd = divided_difference(NodeMultiset((beta, beta)), _H)
        assert abs(dd) <= 1e-8 * (1 + scale) / 1e-5  # first-order contact at the kink
    # odd exponent at sign-change points: the sign flips across them
    assert corr.value(-0.51) * corr.value(-0.49) < 0
    # carries the sign pattern of Y: nonnegative right of y_1
    xs = np.linspace(-0.45, 1.0, 500)
    assert np.min(corr.value(xs)) >= 0.0


def test_correction_floor_on_defect_interval():
    corr, _, _ = _correction()
    part = ChebyshevPartition(16)
    lam = 0.5 * (part.node(8) + part.node(7))
    yprime = float(np.cos(17 * np.pi / 32))
    floor = corr.floor_on(min(yprime, lam), max(yprime, lam))
    assert floor > 0.0
    assert floor >= corr.analytic_floor()


def test_correction_localization_shape():
    corr, _, _ = _correction(mu_prime=6)
    part = ChebyshevPartition(16)
    near = abs(corr.value(part.node(8)))
    far = abs(corr.value(0.98))
    assert near > 0
    assert far < 1e-6 * near  # decays hard away from the kernel interval


def test_even_pair_m0():
    n, j = 16, 8
    part = ChebyshevPartition(n)
    lam = 0.5 * (part.node(8) + part.node(7))
    Y = SignPattern((-0.5,))
    A = ConstraintSet(((0.7, 0),))
    rep = build_even_pair(n, j, lam, 0, Y, A, r=0, mu=6, degree_factor=4,
                          grid_density=1024)
    g = TruncatedPower(0, lam)
    xs = grid_union((-1, 1), 1024, list(Y.points) + list(A.points) + [lam])
    sgn = Y.sign(xs)
    assert np.min(sgn * (rep.R1(xs) - g.eval(0, xs))) >= -1e-8
    assert np.min(sgn * (g.eval(0, xs) - rep.R2(xs))) >= -1e-8
    for beta in (-1.0, -0.5, 0.7, 1.0):
        assert abs(rep.R1(beta) - g.eval(0, beta)) < 1e-8
    assert rep.degree == 4 * n


@pytest.mark.slow
def test_lifted_pair_m1_passes_membership():
    # full pipeline: even base at doubled resolution, multiply by (x - lam),
    # repair the sign defect with the scaled correction
    n, j = 24, 12
    part = ChebyshevPartition(n)
    lam = 0.5 * (part.node(12) + part.node(11))
    Y = SignPattern((-0.5,))
    A = ConstraintSet(((0.7, 0),))
    rep = build_truncated_power_pair(n, j, lam, 1, Y, A, r=0, mu=6,
                                     degree_factor=4)
    g = TruncatedPower(1, lam)
    xs = grid_union((-1, 1), 2048,
                    list(Y.points) + list(A.points) + [lam, rep.info["yprime"]])
    sgn = Y.sign(xs)
    scale = 1 + float(np.max(np.abs(g.eval(0, xs))))
    assert np.min(sgn * (rep.R1.eval(0, xs) - g.eval(0, xs))) >= -1e-10 * scale
    assert np.min(sgn * (g.eval(0, xs) - rep.R2.eval(0, xs))) >= -1e-10 * scale
    for beta in (-1.0, -0.5, 0.7, 1.0):
        assert abs(rep.R1.eval(0, beta) - g.eval(0, beta)) <= 1e-9 * scale
        assert abs(rep.R2.eval(0, beta) - g.eval(0, beta)) <= 1e-9 * scale
    assert np.isfinite(rep.weighted_error)


def test_lift_reduces_to_multiplication_when_no_defect():
    # lam at the node itself, no interior constraints: the correction only
    # needs to patch [y', lam], and the lifted pair still verifies
    n, j = 16, 8
    part = ChebyshevPartition(n)
    lam = part.node(8)
    rep = build_truncated_power_pair(n, j, lam, 1, SignPattern(()),
                                     ConstraintSet(()), r=0, mu=6,
                                     degree_factor=4)
    g = TruncatedPower(1, lam)
    xs = grid_union((-1, 1), 2048, [lam, rep.info["yprime"]])
    assert np.min(rep.R1.eval(0, xs) - g.eval(0, xs)) >= -1e-10 * 2
    assert np.min(g.eval(0, xs) - rep.R2.eval(0, xs)) >= -1e-10 * 2


@pytest.mark.slow
def test_lift_weighted_error_stability():
    # ratio of recorded psi-weighted errors stays within a factor 2 as n
    # doubles (desk scale: reduced mu, recorded degree)
    errs = []
    for n in (16, 32):
        j = n // 2
        part = ChebyshevPartition(n)
        lam = 0.5 * (part.node(j) + part.node(j - 1))
        rep = build_truncated_power_pair(n, j, lam, 1, SignPattern((-0.5,)),
                                         ConstraintSet(()), r=0, mu=6,
                                         degree_factor=4)
        errs.append(rep.weighted_error)
    assert max(errs) <= 2.0 * min(errs) * (1 + 1e-9)
