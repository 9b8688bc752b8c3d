import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from swarmcov.roi import UeTeam, advance_ues, build_grid, ellipsoid_from_ues

EPS = 1.0


def test_four_corners():
    mean, cov = ellipsoid_from_ues([(1, 1), (1, -1), (-1, 1), (-1, -1)])
    assert np.allclose(mean, 0)
    assert np.allclose(cov, np.diag([1 + EPS, 1 + EPS]))


def test_single_ue_regularizer_only():
    mean, cov = ellipsoid_from_ues([(5, 5)])
    assert np.allclose(mean, (5, 5)) and np.allclose(cov, EPS * np.eye(2))


def test_two_ues_on_axis():
    mean, cov = ellipsoid_from_ues([(0, 0), (2, 0)])
    assert np.allclose(mean, (1, 0)) and np.allclose(cov, np.diag([1 + EPS, EPS]))


def test_single_cell_has_all_mass():
    g = build_grid((5, 5), EPS * np.eye(2), 10.0, 3.0)
    assert len(g) == 1 and g.probs[0] == 1.0
    assert np.allclose(g.centers[0], (5, 5))


def test_mirrored_cells_equal_mass():
    g = build_grid((0, 0), np.diag([200.0, 50.0]), 10.0, 3.0)
    lookup = {tuple(np.round(c, 6)): p for c, p in g.cells}
    for (x, y), p in lookup.items():
        assert lookup[(-x + 0.0, -y + 0.0)] == pytest.approx(p, rel=1e-12)


def test_probability_decreases_with_radius():
    g = build_grid((0, 0), 100 * np.eye(2), 10.0, 3.0)
    r = np.round(np.linalg.norm(g.centers, axis=1), 9)
    # oracle: isotropic Gaussian density is a decreasing function of radius
    order = np.argsort(r)
    for a, b in zip(order[:-1], order[1:]):
        if r[b] > r[a]:
            assert g.probs[b] < g.probs[a]
    assert np.all(np.einsum("ci,ci->c", g.centers, g.centers) / 100 <= 9 + 1e-12)


def test_grid_row_major_order():
    g = build_grid((0, 0), np.diag([400.0, 300.0]), 10.0, 3.0)
    keys = [(c[1], c[0]) for c in g.centers]
    assert keys == sorted(keys)


def test_grid_rejects_non_spd():
    with pytest.raises(ValueError):
        build_grid((0, 0), np.array([[1.0, 2.0], [2.0, 1.0]]), 10.0)


def test_advance_cases():
    t = UeTeam([(0, 0), (9.5, 0)], [(10, 0), (10, 0)], 1.0)
    nxt = advance_ues(t, 1.0)
    assert np.allclose(nxt.positions, [(1, 0), (10, 0)])
    still = advance_ues(UeTeam([(3, 4)], [(10, 10)], 0.0), 1.0)
    assert np.allclose(still.positions, [(3, 4)])


def test_team_validation():
    with pytest.raises(ValueError):
        UeTeam([(0, 0)], [(1, 1), (2, 2)], 1.0)
    with pytest.raises(ValueError):
        UeTeam([(0, 0)], [(1, 1)], -1.0)


ues = st.lists(st.tuples(st.floats(-300, 300), st.floats(-300, 300)), min_size=1, max_size=8)


@settings(max_examples=60, deadline=None)
@given(ues, st.floats(5, 20))
def test_grid_normalized(points, cell):
    mean, cov = ellipsoid_from_ues(points)
    g = build_grid(mean, cov, cell, 3.0)
    assert abs(g.probs.sum() - 1.0) <= 1e-9
    assert np.all(g.probs > 0)


@given(ues, st.integers(-500, 500), st.integers(-500, 500))
def test_translation_equivariance(points, tx, ty):
    m0, c0 = ellipsoid_from_ues(points)
    m1, c1 = ellipsoid_from_ues([(x + tx, y + ty) for x, y in points])
    assert np.allclose(m1, m0 + (tx, ty), atol=1e-9)
    assert np.allclose(c1, c0, atol=1e-7)


@given(ues, st.floats(0, 5), st.floats(0.1, 3))
def test_advance_never_moves_away(points, speed, dt):
    goals = [(y, x) for x, y in points]
    t = UeTeam(points, goals, speed)
    before = np.linalg.norm(t.goals - t.positions, axis=1)
    after = np.linalg.norm(advance_ues(t, dt).goals - advance_ues(t, dt).positions, axis=1)
    assert np.all(after <= before + 1e-9)
