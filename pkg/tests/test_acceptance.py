"""Acceptance battery: one test per pinned criterion.

Every test appends a single PASS/FAIL line to ``RESULTS``; the conftest hook
prints the collected lines in the terminal summary.  Tolerances are pinned
here and must not be loosened.
"""

import functools
import math
import time

import numpy as np
import pytest

import vexnorm as vx
from vexnorm.checks import (RunConfig, check_e123, check_holder, check_lemma4)
from vexnorm.grid import GridFunction

RESULTS = []


def criterion(num, name):
    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                RESULTS.append(f"criterion {num:02d} {name}: FAIL")
                raise
            RESULTS.append(f"criterion {num:02d} {name}: PASS")
        return wrapper
    return deco


def _random_f(grid, rng):
    vals = rng.normal(size=grid.num_cells) * (rng.random(grid.num_cells) < 0.8)
    if not vals.any():
        vals[0] = 1.0
    return GridFunction(grid, vals)


def _random_q(rng):
    kind = rng.integers(0, 3)
    if kind == 0:
        return vx.Constant(float(rng.uniform(1.2, 5.0)))
    if kind == 1:
        return vx.LogDecay(float(rng.uniform(1.3, 3.0)),
                           float(rng.uniform(0.0, 1.5)))
    return vx.GaussBump(float(rng.uniform(1.3, 3.0)),
                        float(rng.uniform(0.0, 1.5)),
                        float(rng.uniform(0.5, 2.0)))


@criterion(1, "constant-exponent agreement")
def test_criterion_01_constant_exponent_agreement():
    grid = vx.build_grid(1, -5, 1, 7)
    rng = np.random.default_rng(101)
    for _ in range(50):
        p0 = float(rng.uniform(1.1, 6.0))
        f = _random_f(grid, rng)
        classical = (np.sum(np.abs(f.values) ** p0)
                     * grid.cell_measure) ** (1.0 / p0)
        got = vx.luxemburg_norm(f, vx.Constant(p0))
        assert abs(got - classical) <= 1e-6 * classical


@criterion(2, "unit-modular identity")
def test_criterion_02_unit_modular():
    grid = vx.build_grid(1, -5, 1, 7)
    rng = np.random.default_rng(202)
    for _ in range(200):
        q = _random_q(rng)
        f = _random_f(grid, rng)
        nrm = vx.luxemburg_norm(f, q)
        val = vx.modular(f, q, nrm)
        assert 1.0 - 1e-6 <= val <= 1.0


@criterion(3, "generalized Hoelder")
def test_criterion_03_holder():
    cfg = RunConfig(k_min=-5, k_max=1, level=7,
                    options={"holder_trials": 1000})
    res = check_holder(cfg)
    assert res.summary["trials"] == 1000
    assert res.summary["slack"] == 1e-12
    assert res.summary["violations"] == 0
    assert res.passed


@criterion(4, "duality product on dyadic balls")
def test_criterion_04_duality_product():
    qs = (vx.Constant(2.0), vx.LogDecay(2.0, 1.0), vx.GaussBump(1.5, 1.0, 1.0))
    prods = {}
    for level in (11, 12):
        grid = vx.build_grid(1, -6, 5, level)
        for qi, q in enumerate(qs):
            qc = vx.conjugate(q)
            for k in range(-5, 6):
                chi = vx.characteristic_ball(grid, k)
                measure = grid.measure_of(grid.ball_mask(k))
                prods[(level, qi, k)] = (vx.luxemburg_norm(chi, q)
                                         * vx.luxemburg_norm(chi, qc) / measure)
    for qi in range(len(qs)):
        for k in range(-5, 6):
            base, fine = prods[(11, qi, k)], prods[(12, qi, k)]
            assert 0.2 <= base <= 5.0
            assert abs(fine - base) / base < 0.10


@criterion(5, "norm-ratio exponent regression")
def test_criterion_05_delta_regression():
    for q0 in (1.5, 2.0, 3.0):
        est = vx.estimate_delta(vx.Constant(q0), vx.build_grid(1, -5, 2, 8))
        assert abs(est.delta - 1.0 / q0) <= 1e-3
    for q in (vx.LogDecay(2.0, 1.0), vx.GaussBump(1.5, 1.0, 1.0)):
        base = vx.estimate_delta(q, vx.build_grid(1, -5, 2, 8))
        fine = vx.estimate_delta(q, vx.build_grid(1, -5, 2, 9))
        assert 0.0 < base.delta < 1.0
        assert abs(fine.delta - base.delta) <= 0.05 * abs(base.delta)


@criterion(6, "oscillation-symbol norm equivalence and growth")
def test_criterion_06_symbol_growth_bounds():
    res = check_lemma4(RunConfig(), ms=(1, 2))
    assert res.summary["C_cap"] == 10.0
    for row in res.rows:
        assert row["C_equiv"] <= 10.0
        assert row["C_growth"] <= 10.0
    assert res.passed


@criterion(7, "fractional-integral norm boundedness")
def test_criterion_07_hls():
    report = vx.hls_experiment(vx.Constant(2.0), 0.25, n=1, family_size=100)
    assert len(report.per_function) == 100
    assert math.isfinite(report.sup_ratio)
    assert report.refinement_delta < 0.05


@criterion(8, "commutator reduction identities")
def test_criterion_08_commutator_identities():
    grid = vx.build_grid(1, -5, 1, 8)
    b = vx.log_symbol(grid)
    rng = np.random.default_rng(808)
    for _ in range(20):
        beta = float(rng.uniform(0.1, 0.9))
        f = _random_f(grid, rng)
        plain = vx.fractional_integral(f, beta, "direct")
        got0 = vx.commutator(f, vx.FracIntegralSpec(beta=beta, m=0, b=b,
                                                    engine="direct"))
        assert np.array_equal(got0.values, plain.values)   # bitwise
        got1 = vx.commutator(f, vx.FracIntegralSpec(beta=beta, m=1, b=b,
                                                    engine="direct"))
        want1 = b * plain - vx.fractional_integral(b * f, beta, "direct")
        scale = np.max(np.abs(want1.values))
        assert np.max(np.abs(got1.values - want1.values)) <= 1e-8 * scale


@criterion(9, "commutator boundedness harness")
def test_criterion_09_theorem_harness():
    kwargs = dict(k_min=-4, k_max=7, level=11, family_size=12, seed=0)
    for m in (0, 1, 2):
        params, rep = vx.theorem_experiment(vx.Constant(2.0), 0.25, m,
                                            1.0, 1.0, 0.1, stability=True,
                                            **kwargs)
        assert params.admissible
        assert math.isfinite(rep.sup_ratio)
        assert rep.refinement_delta < 0.10
        assert rep.shell_delta < 0.10
    # rescaling the symbol by 3 scales every order-m ratio by exactly 3^m
    for m in (1, 2):
        _, base = vx.theorem_experiment(vx.Constant(2.0), 0.25, m,
                                        1.0, 1.0, 0.1, stability=False,
                                        **kwargs)
        _, scaled = vx.theorem_experiment(
            vx.Constant(2.0), 0.25, m, 1.0, 1.0, 0.1, stability=False,
            b_fn=lambda x: 3.0 * np.log(np.linalg.norm(x, axis=1)), **kwargs)
        for r0, r1 in zip(base.per_function, scaled.per_function):
            assert abs(r1.ratio - 3.0 ** m * r0.ratio) <= 1e-10 * 3.0 ** m * r0.ratio


@criterion(10, "shell-band decomposition")
def test_criterion_10_e123():
    grid = vx.build_grid(1, -5, 2, 7)
    params = vx.theorem_params(grid, vx.Constant(2.0), 0.25, 1, 1.0, 1.0, 0.1)
    top = vx.characteristic_shell(grid, grid.k_max)
    assert vx.decompose_E123(top, params).E1 == 0.0
    bottom = vx.characteristic_shell(grid, grid.k_min + 1)
    assert vx.decompose_E123(bottom, params).E3 == 0.0
    res = check_e123(RunConfig(options={"e123_family_size": 4}))
    assert res.summary["stability"] == 0.15
    for band, change in res.summary["changes"].items():
        assert change <= 0.15, band
    assert res.passed


@criterion(11, "engine equivalence and speed")
def test_criterion_11_engines():
    grid = vx.build_grid(1, -5, 6, 11)          # 2^12 lattice cells
    rng = np.random.default_rng(1111)
    for _ in range(20):
        f = _random_f(grid, rng)
        a = vx.fractional_integral(f, 0.25, "direct")
        b = vx.fractional_integral(f, 0.25, "fft")
        scale = np.max(np.abs(a.values))
        assert np.max(np.abs(a.values - b.values)) <= 1e-8 * scale
    big = vx.build_grid(1, -5, 8, 13)           # 2^14 lattice cells
    f = _random_f(big, rng)
    t0 = time.perf_counter()
    vx.fractional_integral(f, 0.25, "direct")
    t_direct = time.perf_counter() - t0
    t_fft = min(_timed(lambda: vx.fractional_integral(f, 0.25, "fft"))
                for _ in range(3))
    assert t_direct >= 10.0 * t_fft


def _timed(fn):
    t0 = time.perf_counter()
    fn()
    return time.perf_counter() - t0


@criterion(12, "pointwise kernel lower bound")
def test_criterion_12_kernel_inequality():
    grid = vx.build_grid(1, -6, 3, 12)
    ks = range(-3, 4)
    consts = {}
    for beta in (0.25, 0.5):
        consts[beta] = vx.kernel_lower_bound(grid, beta, ks)
    big_c = max(max(c.values()) for c in consts.values())
    assert math.isfinite(big_c)
    # the single constant works pointwise for every (k, beta)
    for beta in (0.25, 0.5):
        for k in ks:
            chi = vx.characteristic_ball(grid, k)
            out = vx.fractional_integral(chi, beta, "fft")
            mask = chi.values > 0
            lhs = chi.values[mask]
            rhs = big_c * 2.0 ** (-k * beta) * out.values[mask]
            assert np.all(lhs <= rhs * (1.0 + 1e-12))
        # and the per-ball constants are uniform in k
        vals = np.array(list(consts[beta].values()))
        assert vals.max() / vals.min() <= 1.15
        oracle = beta * 2.0 ** (-beta)   # edge value of the continuum ball
        assert np.all(vals >= 0.6 * oracle) and np.all(vals <= 1.1 * oracle)
