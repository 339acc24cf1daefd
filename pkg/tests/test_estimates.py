import numpy as np
import pytest

from stratakit.errors import PreconditionError
from stratakit.estimates import (
    campaign_angle,
    campaign_cone_distance,
    campaign_cone_control,
    campaign_corollary_cone_control,
    campaign_one_sided,
    campaign_projection_lipschitz,
    campaign_quadratic_contact,
    check_angle,
    check_cone_distance,
    check_one_sided,
    check_projection_lipschitz,
    check_quadratic_contact,
    one_sided_curvature,
)
from stratakit.linalg import AffineFlat, Subspace
from stratakit.reportio import canonical_json
from stratakit.sets import Flat, Sphere


def x_axis():
    return Flat(AffineFlat(np.zeros(2), np.array([[1.0, 0.0]])))


# -- angle bound ---------------------------------------------------------------


def test_angle_orthogonal_case():
    q = 0.7
    rep = check_angle(x_axis(), [0, 0], [1, 0], [0, q], q)
    assert rep.worst_residual == pytest.approx(-0.5)
    assert rep.passed


def test_angle_zero_direction():
    rep = check_angle(x_axis(), [0, 0], [1, 0], [0, 0], q=1.0)
    assert rep.worst_residual == 0.0
    assert rep.passed


def test_angle_circle_sweep_closed_form(circle):
    # derived: residual(theta) = 0.5 (cos t - 1) - 0.25 |b-a|^2 with q = 0.5,
    # v = (0.5, 0); |b-a|^2 = 2 - 2 cos t, so residual = 1.5 (cos t - 1) <= 0
    q, v = 0.5, np.array([0.5, 0.0])
    worst = -np.inf
    for t in np.linspace(0.0, 2 * np.pi, 73):
        b = np.array([np.cos(t), np.sin(t)])
        rep = check_angle(circle, [1, 0], b, v, q)
        expected = 1.5 * (np.cos(t) - 1.0)
        assert rep.worst_residual == pytest.approx(expected, abs=1e-12)
        worst = max(worst, rep.worst_residual)
    assert worst == pytest.approx(0.0, abs=1e-12)  # equality approached at t = 0


def test_angle_precondition_touching():
    with pytest.raises(PreconditionError):
        check_angle(x_axis(), [0, 0], [1, 0], [1, 1], q=1.0)


# -- projection Lipschitz --------------------------------------------------------


def test_projection_lipschitz_flat_example():
    rep = check_projection_lipschitz(x_axis(), [0, 1], [3, 1], q=2.0, r=1.0)
    # |xi(x) - xi(y)| = 3 and the allowance is 2 * 3 = 6
    assert rep.worst_residual == pytest.approx(3.0 - 6.0)
    assert rep.passed


def test_projection_lipschitz_identical_points(unit_square):
    rep = check_projection_lipschitz(unit_square, [0.5, 1.2], [0.5, 1.2], q=0.5, r=0.25)
    assert rep.worst_residual == pytest.approx(0.0, abs=1e-15)
    assert rep.passed


def test_projection_lipschitz_campaign_square(unit_square):
    rep = campaign_projection_lipschitz(unit_square, q=0.5, r=0.25, pairs=3000, seed=7)
    assert rep.passed
    assert rep.samples == 3000
    assert rep.worst_residual <= 1e-8 * unit_square.nominal_diameter()


def test_projection_lipschitz_symmetry(unit_square):
    x, y = [0.4, 1.1], [0.9, 1.2]
    r1 = check_projection_lipschitz(unit_square, x, y, q=0.5, r=0.25)
    r2 = check_projection_lipschitz(unit_square, y, x, q=0.5, r=0.25)
    assert abs(r1.worst_residual - r2.worst_residual) <= 1e-12


# -- cone distance ----------------------------------------------------------------


def test_cone_distance_trivial_same_point(unit_square):
    rep = check_cone_distance(unit_square, [0, 0], [0, 0],
                              [[-1.0, 0.0], [0.0, -1.0]], q=0.3)
    assert rep.worst_residual <= 0
    assert rep.passed


def test_cone_distance_square_sweep(unit_square):
    # derived: the polar of the corner cone is the first quadrant, so every
    # other vertex and edge midpoint has zero gap and the bound is slack
    targets = [[1, 0], [1, 1], [0, 1], [0.5, 0], [1, 0.5], [0.5, 1], [0, 0.5]]
    for b in targets:
        rep = check_cone_distance(unit_square, [0, 0], b,
                                  [[-1.0, 0.0], [0.0, -1.0]], q=0.3)
        gap = rep.worst_residual + (0.5 / 0.3) * np.dot(b, b)
        assert gap == pytest.approx(0.0, abs=1e-9)
        assert rep.passed


def test_cone_distance_circle_sweep(circle):
    # derived closed form: D = {d1 <= 0}; dist(b - a, D) = max(cos t - 1, 0) = 0
    for t in np.linspace(0, 2 * np.pi, 37):
        b = [np.cos(t), np.sin(t)]
        rep = check_cone_distance(circle, [1, 0], b, [[1.0, 0.0]], q=0.5)
        assert rep.passed
    assert campaign_cone_distance(circle, q=0.5, samples=400, seed=2).passed


# -- one-sided bound ---------------------------------------------------------------


def test_kappa_formula_values():
    # direct evaluation of the constant
    assert one_sided_curvature(4.0, 2.0, 1.0) == pytest.approx(12.5)
    assert one_sided_curvature(0.4, 0.2, 0.1) == pytest.approx(125.0)


def test_one_sided_equal_points(unit_square):
    x = [0.5, 1.15]
    rep = check_one_sided(unit_square, x, x, q=0.4, r=0.2, s=0.1)
    assert rep.worst_residual <= 1e-12
    assert rep.passed


def test_one_sided_exact_shell_subcheck(unit_square):
    # both points exactly at distance s: the proof's intermediate first-order
    # inequality is asserted as well
    s = 0.1
    rep = check_one_sided(unit_square, [0.3, -s], [0.7, -s], q=0.4, r=0.2, s=s)
    assert "sub_residual" in rep.params
    assert rep.params["sub_residual"] <= rep.params["tol_report"]
    assert rep.passed


def test_one_sided_campaign_cube(unit_cube):
    rep = campaign_one_sided(unit_cube, q=0.4, r=0.2, s=0.1, pairs=3000, seed=9)
    assert rep.passed
    assert rep.params["kappa"] == pytest.approx(125.0)


# -- quadratic contact ----------------------------------------------------------


def test_quadratic_contact_flat_cases(unit_square):
    fl = x_axis()
    U = Subspace(np.array([[1.0, 0.0]]))
    rep = check_quadratic_contact(fl, [0.0, 1.0], U, [1e-2, 1e-3, 1e-4, 1e-5], q=2.0)
    assert rep.params["lambda_empirical"] == pytest.approx(0.0, abs=1e-12)
    assert rep.passed

    rep = check_quadratic_contact(unit_square, [0.5, -0.5], U,
                                  [1e-2, 1e-3, 1e-4, 1e-5], q=1.0)
    assert rep.params["lambda_empirical"] == pytest.approx(0.0, abs=1e-12)
    assert rep.passed


def test_quadratic_contact_circle_closed_form(circle):
    # closed form xi(y) = y/|y|: R(y) = (1 - cos angle(y)) / |y - x|^2 stays
    # near w_y^2/8 <= 1/8 for x = (2, 0); the empirical lambda must sit in
    # that envelope and the two-scale heuristic must pass
    U = Subspace(np.array([[0.0, 1.0]]))
    rep = check_quadratic_contact(circle, [2.0, 0.0], U,
                                  [1e-2, 1e-3, 1e-4, 1e-5], q=3.0, seed=4)
    lam = rep.params["lambda_empirical"]
    assert 0.02 <= lam <= 0.15
    assert rep.passed
    # independent dense sweep at the smallest radius
    rho = 1e-4
    t = np.linspace(0, 2 * np.pi, 20001)
    Y = np.array([2.0, 0.0]) + rho * np.column_stack([np.cos(t), np.sin(t)])
    xi = Y / np.linalg.norm(Y, axis=1)[:, None]
    R = np.abs(xi[:, 0] - 1.0) / rho**2
    assert lam <= R.max() * 1.05


def test_quadratic_contact_campaign(circle):
    rep = campaign_quadratic_contact(circle, q=0.5, radius_grid=[1e-2, 1e-3, 1e-4, 1e-5],
                                     seed=3)
    assert rep.passed


# -- report plumbing ---------------------------------------------------------------


def test_pass_monotone_in_tolerance(unit_square):
    base = check_projection_lipschitz(unit_square, [0.5, 1.2], [0.6, 1.1],
                                      q=0.5, r=0.25)
    for mult in (2.0, 10.0, 1e3):
        wider = check_projection_lipschitz(unit_square, [0.5, 1.2], [0.6, 1.1],
                                           q=0.5, r=0.25,
                                           tol_report=base.params["tol_report"] * mult)
        assert wider.passed or not base.passed


def test_reports_deterministic(unit_square):
    a = campaign_projection_lipschitz(unit_square, q=0.5, r=0.25, pairs=500, seed=21)
    b = campaign_projection_lipschitz(unit_square, q=0.5, r=0.25, pairs=500, seed=21)
    assert canonical_json(a.to_json_dict()) == canonical_json(b.to_json_dict())


def test_report_json_schema_keys(unit_square):
    rep = campaign_angle(unit_square, q=0.25, samples=500, seed=2)
    doc = rep.to_json_dict()
    assert set(doc) == {"estimate_id", "params", "samples", "worst_residual",
                        "worst_witness", "pass", "seed", "scene_id"}


def test_cone_control_campaigns(unit_cube):
    rep = campaign_cone_control(unit_cube, samples=2000, seed=5, q=0.25)
    assert rep.passed
    assert rep.params["gamma"] >= 0.0
    rep = campaign_corollary_cone_control(unit_cube, samples=2000, seed=5, q=0.25)
    assert rep.passed
