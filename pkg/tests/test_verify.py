import json
import math

import numpy as np
import pytest

from vexnorm import (ArgumentError, ConfigError, Constant, ConstructionError,
                     DataError, GaussBump, LogDecay, build_grid,
                     build_test_family, characteristic_shell, check_theorem,
                     conjugate, decompose_E123, estimate_delta, from_callable,
                     kernel_lower_bound, log_symbol, run_ratio_experiment,
                     theorem_experiment, theorem_params, validate_bmo_symbol)
from vexnorm.grid import GridFunction
from vexnorm.norms import herz_morrey_norm, luxemburg_norm


def test_estimate_delta_constant_exponent_exact():
    grid = build_grid(1, -5, 2, 8)
    for q0 in (1.5, 2.0, 4.0):
        est = estimate_delta(Constant(q0), grid)
        assert est.delta == pytest.approx(1.0 / q0, abs=1e-10)
        assert est.C == pytest.approx(1.0, rel=1e-6)
        assert est.n_pairs >= 3


def test_estimate_delta_variable_exponent_in_unit_interval():
    grid = build_grid(1, -5, 2, 8)
    for q in (LogDecay(2.0, 1.0), GaussBump(1.6, 0.8, 1.0)):
        est = estimate_delta(q, grid)
        assert 0.0 < est.delta < 1.0
        assert est.C > 0.9


def test_estimate_delta_needs_enough_pairs():
    grid = build_grid(1, -1, 0, 4)   # a single shell: no strict subsets
    with pytest.raises(ConfigError):
        estimate_delta(Constant(2.0), grid)


def test_build_test_family_deterministic_and_supported():
    grid = build_grid(1, -5, 2, 7)
    fam1 = build_test_family("mixed", grid, seed=3, size=15)
    fam2 = build_test_family("mixed", grid, seed=3, size=15)
    assert [lab for lab, _ in fam1] == [lab for lab, _ in fam2]
    for (_, a), (_, b) in zip(fam1, fam2):
        assert np.array_equal(a.values, b.values)
    radius = 2.0 ** (grid.k_max - 1)
    for _, f in fam1:
        assert np.all(np.abs(f.values[grid.radii > radius]) == 0.0)


def test_build_test_family_errors():
    grid = build_grid(1, -5, 2, 7)
    with pytest.raises(ArgumentError):
        build_test_family("splines", grid, seed=0)
    with pytest.raises(ArgumentError):
        build_test_family("mixed", grid, seed=0, support_k=grid.k_max + 1)
    with pytest.raises(ConstructionError):
        build_test_family("powerlaw", grid, seed=0, size=1, q=Constant(2.0),
                          powerlaw_gamma=0.6)


def test_run_ratio_experiment_identity_operator():
    grid = build_grid(1, -4, 1, 6)
    fam = build_test_family("gaussians", grid, seed=1, size=5)
    q = Constant(2.0)
    rep = run_ratio_experiment(lambda f: f,
                               lambda f: luxemburg_norm(f, q),
                               lambda f: luxemburg_norm(f, q), fam)
    assert rep.sup_ratio == pytest.approx(1.0, rel=1e-12)
    assert len(rep.per_function) == 5


def test_run_ratio_experiment_rejects_zero_source():
    grid = build_grid(1, -4, 1, 6)
    zero = GridFunction(grid, np.zeros(grid.num_cells))
    with pytest.raises(DataError):
        run_ratio_experiment(lambda f: f, lambda f: 0.0, lambda f: 0.0,
                             [("z", zero)])


def test_ratio_report_serialization(tmp_path):
    grid = build_grid(1, -4, 1, 6)
    fam = build_test_family("gaussians", grid, seed=1, size=3)
    q = Constant(2.0)
    rep = run_ratio_experiment(lambda f: f,
                               lambda f: luxemburg_norm(f, q),
                               lambda f: luxemburg_norm(f, q), fam)
    rep.meta = {"n": 1}
    blob = json.dumps(rep.to_json())
    assert "sup_ratio" in blob
    out = tmp_path / "rep.csv"
    rep.write_csv(out)
    lines = out.read_text().strip().splitlines()
    assert lines[0].startswith("id,source_norm,target_norm,ratio")
    assert len(lines) == 4


def test_validate_bmo_symbol_accepts_log_rejects_linear():
    grid = build_grid(1, -5, 3, 9)
    assert validate_bmo_symbol(log_symbol(grid)) > 0.0
    linear = from_callable(grid, lambda x: np.abs(x[:, 0]))
    with pytest.raises(ArgumentError):
        validate_bmo_symbol(linear)


def test_theorem_params_window_and_midpoint():
    grid = build_grid(1, -5, 2, 8)
    params = theorem_params(grid, Constant(2.0), 0.25, 1, 1.0, 1.0, 0.1)
    lo, hi = params.window
    # q1' = 2 and q2 = 4 give regression slopes 1/2 and 1/4, shrunk by the
    # 10% margin
    assert hi == pytest.approx(0.1 + 0.9 * 0.5, abs=1e-6)
    assert lo == pytest.approx(0.1 - 0.9 * 0.25, abs=1e-6)
    assert params.alpha == pytest.approx(0.5 * (lo + hi), abs=1e-12)
    assert params.admissible
    assert set(params.windows) == {"inequality_route", "statement_route"}
    assert params.q2.q_plus == pytest.approx(4.0)


def test_theorem_params_validates_p_ordering():
    grid = build_grid(1, -5, 2, 7)
    with pytest.raises(ArgumentError):
        theorem_params(grid, Constant(2.0), 0.25, 1, 2.0, 1.0, 0.1)


def test_check_theorem_rejects_inadmissible_alpha():
    grid = build_grid(1, -5, 2, 7)
    params = theorem_params(grid, Constant(2.0), 0.25, 1, 1.0, 1.0, 0.1,
                            alpha=2.0)
    assert not params.admissible
    fam = build_test_family("shell_atoms", grid, seed=0)
    with pytest.raises(ArgumentError, match="window"):
        check_theorem(params, fam)


def test_check_theorem_report_contents():
    grid = build_grid(1, -5, 2, 7)
    params = theorem_params(grid, Constant(2.0), 0.25, 1, 1.0, 1.0, 0.1)
    fam = build_test_family("shell_atoms", grid, seed=0)
    rep = check_theorem(params, fam)
    assert math.isfinite(rep.sup_ratio) and rep.sup_ratio > 0
    assert rep.witness in [lab for lab, _ in fam]
    assert rep.extras["bmo_norm_b"] == pytest.approx(params.bmo_b)
    assert rep.meta["level"] == 7


def test_decompose_bands_sum_against_triangle_bound():
    grid = build_grid(1, -5, 2, 7)
    params = theorem_params(grid, Constant(2.0), 0.25, 1, 1.0, 1.0, 0.1)
    fam = build_test_family("gaussians", grid, seed=2, size=2)
    for _, f in fam:
        rep = decompose_E123(f, params)
        assert rep.triangle_ok
        assert rep.total <= rep.triangle_factor * (rep.E1 + rep.E2 + rep.E3) * (1 + 1e-9)
        assert rep.shell_table.shape == (7, 7)


def test_decompose_single_shell_band_structure():
    grid = build_grid(1, -5, 2, 7)
    params = theorem_params(grid, Constant(2.0), 0.25, 1, 1.0, 1.0, 0.1)
    top = characteristic_shell(grid, grid.k_max)
    rep_top = decompose_E123(top, params)
    assert rep_top.E1 == 0.0          # no target shell two above the source
    assert rep_top.E2 > 0.0
    bottom = characteristic_shell(grid, grid.k_min + 1)
    rep_bot = decompose_E123(bottom, params)
    assert rep_bot.E3 == 0.0          # no target shell two below the source
    assert rep_bot.E2 > 0.0


def test_theorem_experiment_smoke():
    params, rep = theorem_experiment(Constant(2.0), 0.25, 1, 1.0, 1.0, 0.1,
                                     k_min=-5, k_max=2, level=7,
                                     family_size=8, stability=False)
    assert rep.refinement_delta is None
    assert math.isfinite(rep.sup_ratio)
    src = params.source_params
    assert src.alpha == params.alpha and src.p == 1.0


def test_theorem_experiment_ratios_scale_with_symbol():
    # replacing b by c*b scales every order-m ratio by exactly c^m
    kwargs = dict(k_min=-5, k_max=2, level=7, family_size=6, stability=False)
    for m in (1, 2):
        _, base = theorem_experiment(Constant(2.0), 0.25, m, 1.0, 1.0, 0.1,
                                     **kwargs)
        _, scaled = theorem_experiment(Constant(2.0), 0.25, m, 1.0, 1.0, 0.1,
                                       b_fn=lambda x: 3.0 * np.log(
                                           np.linalg.norm(x, axis=1)),
                                       **kwargs)
        for r0, r1 in zip(base.per_function, scaled.per_function):
            assert r1.ratio == pytest.approx(3.0 ** m * r0.ratio, rel=1e-10)


def test_kernel_lower_bound_positive_and_uniform():
    grid = build_grid(1, -6, 2, 9)
    consts = kernel_lower_bound(grid, 0.5, range(-2, 3))
    vals = np.array(list(consts.values()))
    assert np.all(vals > 0.0)
    assert vals.max() / vals.min() < 1.2
