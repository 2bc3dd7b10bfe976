import numpy as np
import pytest

from shapefit import registry
from shapefit.lporacle import (ConstrainedApproxProblem, LPProblem,
                               default_grid, min_error_constrained,
                               simplex_solve)


def test_min_x_subject_to_x_ge_1():
    cert = simplex_solve(LPProblem(np.array([1.0]), np.array([[-1.0]]), np.array([-1.0])))
    assert cert.optimal
    assert cert.value == pytest.approx(1.0)


def test_infeasible_with_verified_witness():
    cert = simplex_solve(LPProblem(np.array([0.0]),
                                   np.array([[1.0], [-1.0]]), np.array([0.0, -1.0])))
    assert cert.infeasible
    assert cert.farkas is not None
    assert cert.witness_residual <= 1e-7
    assert cert.farkas["b_dot"] < 0
    assert np.all(cert.farkas["y_ub"] >= -1e-9)


def test_degenerate_equalities():
    # min 0 subject to x + y = 1 listed twice
    A = np.array([[1.0, 1.0], [1.0, 1.0]])
    cert = simplex_solve(LPProblem(np.zeros(2), A_eq=A, b_eq=np.array([1.0, 1.0])))
    assert cert.optimal
    assert cert.value == pytest.approx(0.0)


def test_unbounded():
    cert = simplex_solve(LPProblem(np.array([-1.0])))
    assert cert.status == "unbounded"


def test_minimax_matches_oracle():
    f = registry.make({"name": "poly", "coef": [0, 0, 1.0], "basis": "power"})
    prob = ConstrainedApproxProblem(f, 1, default_grid(size=2049))
    estar, P, cert = min_error_constrained(prob)
    assert estar == pytest.approx(0.5, rel=1e-6)


def test_feasibility_zero_error():
    # f = x^2 with P >= 0 on the grid and P(0) = 0: P = x^2 itself is feasible
    f = registry.make({"name": "poly", "coef": [0, 0, 1.0], "basis": "power"})
    prob = ConstrainedApproxProblem(
        f, 2, default_grid(size=1025, extra=[0.0]),
        hermite=((0.0, 0),), sign_regions=((-1.0, 1.0, 1.0, "P"),))
    estar, P, cert = min_error_constrained(prob)
    assert cert.optimal
    assert estar <= 1e-9


def test_grid_refinement_monotone():
    f = registry.make({"name": "abshift", "lambda": 0.2})
    vals = []
    for size in (129, 513, 2049):
        prob = ConstrainedApproxProblem(
            f, 4, default_grid(size=size, extra=[0.2, 0.0]),
            hermite=((0.0, 0),), sign_regions=((-1.0, 1.0, 1.0, "P-f"),))
        estar, _, _ = min_error_constrained(prob)
        vals.append(estar)
    assert vals[0] <= vals[1] + 1e-11
    assert vals[1] <= vals[2] + 1e-11


def test_lower_bound_vs_feasible_witness():
    """The LP optimum never exceeds the error of an explicit feasible witness."""
    from shapefit.minimax import onesided_majorant

    f = registry.make({"name": "runge", "a": 3.0})
    q = onesided_majorant(f.deriv_fn(0), 6)  # feasible for the onesided constraint
    grid = default_grid(size=2049)
    prob = ConstrainedApproxProblem(f, 6, grid, sign_regions=((-1.0, 1.0, 1.0, "P-f"),))
    estar, _, _ = min_error_constrained(prob)
    witness_err = float(np.max(np.abs(q(grid) - f.eval(0, grid))))
    assert estar <= witness_err + 1e-10


def test_under_resolved_grid_warns():
    f = registry.make({"name": "exp"})
    prob = ConstrainedApproxProblem(f, 40, default_grid(size=65))
    _, _, cert = min_error_constrained(prob)
    assert any("under-resolve" in w for w in cert.warnings)


def test_weighted_minimax():
    f = registry.make({"name": "poly", "coef": [0, 0, 1.0], "basis": "power"})
    prob = ConstrainedApproxProblem(f, 1, default_grid(size=1025),
                                    weight=lambda x: 1.0 + 0 * np.asarray(x))
    estar, _, _ = min_error_constrained(prob)
    assert estar == pytest.approx(0.5, rel=1e-6)


def test_extra_eq_rows():
    f = registry.make({"name": "poly", "coef": [0, 0, 1.0], "basis": "power"})
    prob = ConstrainedApproxProblem(f, 3, default_grid(size=1025),
                                    extra_eq=((0.0, 1, 0.0), (0.0, 0, 0.0)))
    estar, P, _ = min_error_constrained(prob)
    assert abs(P.deriv(1)(0.0)) < 1e-8
    assert abs(P(0.0)) < 1e-8
