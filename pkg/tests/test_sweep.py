import pytest

from qhd_system.core.errors import DomainError
from qhd_system.core.sweep import SweepSettings, evaluate_cell, grid_points, run_sweep


def test_grid_stays_in_simplex():
    points = grid_points(SweepSettings(resolution=11))
    # Pairs (i, j) with i + j <= 10
    assert len(points) == 66
    for _, moduli in points:
        assert all(m >= 0 for m in moduli)
        assert sum(moduli) == pytest.approx(1.0, abs=1e-12)


def test_grid_order_and_split():
    points = grid_points(SweepSettings(axes=("c2", "a2"), resolution=3, split=0.25))
    assert [index for index, _ in points] == [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (2, 0)]
    # c2 = 0, a2 = 0.5: b2 gets a quarter of the remaining 0.5, d2 the rest
    assert points[1][1] == (0.5, 0.125, 0.0, 0.375)


def test_symmetric_cell(example_game):
    cell = evaluate_cell(example_game, ((0, 0), (0.5, 1 / 6, 1 / 6, 1 / 6)))
    assert cell.symmetric
    assert cell.ess_found
    assert "interior:NE" in cell.ne_kinds.split(";")
    assert float(cell.p_star) == pytest.approx(7 / 12)


def test_asymmetric_cell(example_game):
    cell = evaluate_cell(example_game, ((0, 0), (1 / 16, 1 / 8, 9 / 16, 1 / 4)))
    assert not cell.symmetric
    kinds = cell.ne_kinds.split(";")
    assert kinds.count("corner:strict-NE") == 2
    assert "interior:NE" in kinds
    assert cell.p_star.split(";") == ["0", "1"]


def test_basis_state_cell(example_game):
    cell = evaluate_cell(example_game, ((0, 0), (1.0, 0.0, 0.0, 0.0)))
    assert cell.surface_a.coefficients() == pytest.approx((-60, 35, -15, 15))


def test_workers_do_not_change_results(example_game):
    serial = run_sweep(example_game, SweepSettings(resolution=4))
    parallel = run_sweep(example_game, SweepSettings(resolution=4, workers=2))
    assert serial == parallel


@pytest.mark.parametrize("kwargs", [
    {"axes": ("a2", "a2")},
    {"axes": ("a2", "x2")},
    {"resolution": 1},
    {"split": 1.5},
    {"workers": 0},
])
def test_invalid_settings(kwargs):
    with pytest.raises(DomainError):
        SweepSettings(**kwargs)
