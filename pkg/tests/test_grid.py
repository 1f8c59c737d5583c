import numpy as np
import pytest

from vexnorm import (ArgumentError, BudgetError, GridFunction, build_grid,
                     characteristic_ball, characteristic_shell, from_callable,
                     restrict_to_shell)


def test_spacing_and_extent():
    grid = build_grid(1, -4, 2, 6)
    assert grid.h == 2.0 ** (2 - 6)
    assert np.all(np.abs(grid.centers) <= 2.0 ** 2)
    # centers sit on the half-integer lattice
    lat = (grid.centers[:, 0] + 2.0 ** 2) / grid.h - 0.5
    assert np.allclose(lat, np.round(lat))


def test_active_cells_exclude_origin_hole():
    grid = build_grid(1, -4, 2, 8)
    assert np.all(grid.radii > 2.0 ** -4)
    assert np.all(grid.radii <= 2.0 ** 2)


def test_shell_assignment_matches_radii():
    for n in (1, 2):
        grid = build_grid(n, -3, 2, 6)
        lo = 2.0 ** (grid.shell - 1)
        hi = 2.0 ** grid.shell
        assert np.all(grid.radii > lo)
        assert np.all(grid.radii <= hi)
        assert grid.shell.min() >= grid.k_min + 1
        assert grid.shell.max() <= grid.k_max


def test_shell_masks_partition_active_cells():
    grid = build_grid(2, -2, 1, 5)
    total = np.zeros(grid.num_cells, dtype=int)
    for k in grid.shells():
        total += grid.shell_mask(k).astype(int)
    assert np.all(total == 1)


def test_ball_measure_1d_closed_form():
    # |B_k| on the truncated line is 2 (2^k - 2^k_min); exact because cell
    # edges land on the dyadic radii when h divides 2^k_min
    grid = build_grid(1, -4, 2, 8)
    for k in grid.shells():
        want = 2.0 * (2.0 ** k - 2.0 ** grid.k_min)
        assert grid.measure_of(grid.ball_mask(k)) == pytest.approx(want, rel=1e-12)


def test_disk_measure_2d_converges():
    # |B_0| -> pi - pi 4^k_min as the mesh refines
    want = np.pi * (1.0 - 4.0 ** -3)
    errs = []
    for level in (6, 8):
        grid = build_grid(2, -3, 1, level)
        errs.append(abs(grid.measure_of(grid.ball_mask(0)) - want))
    assert errs[1] < errs[0]
    assert errs[1] < 1e-2


def test_embed_take_roundtrip():
    grid = build_grid(2, -2, 1, 4)
    rng = np.random.default_rng(3)
    vals = rng.normal(size=grid.num_cells)
    assert np.array_equal(grid.take_active(grid.embed_full(vals)), vals)


def test_invalid_arguments():
    with pytest.raises(ArgumentError):
        build_grid(3, -2, 1, 4)
    with pytest.raises(ArgumentError):
        build_grid(1, 2, 2, 4)
    with pytest.raises(ArgumentError):
        build_grid(1, -2, 1, 0)
    with pytest.raises(BudgetError):
        build_grid(2, -2, 1, 12, budget=1000)


def test_shell_index_bounds_checked():
    grid = build_grid(1, -2, 1, 4)
    with pytest.raises(ArgumentError):
        grid.shell_mask(grid.k_min)
    with pytest.raises(ArgumentError):
        grid.ball_mask(grid.k_max + 1)


def test_grid_function_validation():
    grid = build_grid(1, -2, 1, 4)
    with pytest.raises(ArgumentError):
        GridFunction(grid, np.zeros(grid.num_cells + 1))
    bad = np.zeros(grid.num_cells)
    bad[0] = np.nan
    with pytest.raises(ArgumentError):
        GridFunction(grid, bad)


def test_grid_function_algebra_and_integral():
    grid = build_grid(1, -4, 0, 6)
    f = from_callable(grid, lambda x: x[:, 0])
    g = from_callable(grid, lambda x: np.ones(len(x)))
    s = f + 2.0 * g - f
    assert np.allclose(s.values, 2.0)
    # integral of 1 over the truncated segment
    assert g.integral() == pytest.approx(2.0 * (1.0 - 2.0 ** -4), rel=1e-12)
    assert (f * g).max_abs() == f.max_abs()
    assert (f - f).is_zero()


def test_mixing_grids_rejected():
    a = build_grid(1, -2, 1, 4)
    b = build_grid(1, -2, 1, 5)
    fa = characteristic_ball(a, 0)
    fb = characteristic_ball(b, 0)
    with pytest.raises(ArgumentError):
        fa + fb


def test_restriction_and_characteristics():
    grid = build_grid(1, -3, 1, 6)
    f = from_callable(grid, lambda x: 1.0 + x[:, 0] ** 2)
    k = 0
    r = restrict_to_shell(f, k)
    mask = grid.shell_mask(k)
    assert np.array_equal(r.values[mask], f.values[mask])
    assert np.all(r.values[~mask] == 0.0)
    chi_shell = characteristic_shell(grid, k)
    chi_ball = characteristic_ball(grid, k)
    assert np.array_equal(chi_shell.values, mask.astype(float))
    assert np.array_equal(chi_ball.values, grid.ball_mask(k).astype(float))
