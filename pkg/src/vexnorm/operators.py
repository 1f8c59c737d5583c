"""Maximal operator, fractional integral and its m-order BMO commutator.

The fractional integral is the convolution with |x|^(beta - n) evaluated by
cell quadrature on the grid's box lattice.  In one dimension the kernel
weight of every cell is the exact integral of |t|^(beta-1) over the cell, so
the only discretization error comes from representing f as piecewise
constant; in two dimensions off-center cells use the midpoint rule and the
singular center cell uses the exact integral over the inscribed disk plus a
midpoint correction on the remainder.  The same weights feed both the direct
O(N^2) engine and the FFT fast path, which therefore agree to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.signal import fftconvolve

from .errors import ArgumentError
from .grid import DyadicGrid, GridFunction

__all__ = ["FracIntegralSpec", "maximal", "fractional_integral",
           "fractional_integral_many", "commutator", "commutator_many"]

_BLOCK_ELEMS = 1 << 23   # cap on scratch matrix size in the direct engines


@dataclass(frozen=True)
class FracIntegralSpec:
    """Order beta in (0, n), commutator order m >= 0, symbol b (required for
    m >= 1) and the quadrature engine ("direct" or "fft")."""

    beta: float
    m: int = 0
    b: Optional[GridFunction] = None
    engine: str = "direct"

    def validate(self, grid: DyadicGrid) -> None:
        if not 0.0 < self.beta < grid.n:
            raise ArgumentError(
                f"beta={self.beta} outside (0, n) = (0, {grid.n})")
        if self.m < 0:
            raise ArgumentError(f"m must be >= 0, got {self.m}")
        if self.m >= 1 and self.b is None:
            raise ArgumentError("commutator of order m >= 1 requires a symbol b")
        if self.engine not in ("direct", "fft"):
            raise ArgumentError(f"unknown engine {self.engine!r}")
        if self.b is not None and self.b.grid is not grid:
            raise ArgumentError("symbol b lives on a different grid")


def _kernel_offsets_1d(grid: DyadicGrid, beta: float) -> np.ndarray:
    """Exact cell integrals of |t|^(beta-1) at every lattice offset."""
    m_axis = grid.lattice_shape[0]
    h = grid.h
    edges = (np.arange(-(m_axis - 1), m_axis + 1) - 0.5) * h

    def anti(t):
        return np.sign(t) * np.abs(t) ** beta / beta

    prim = anti(edges)
    return prim[1:] - prim[:-1]


def _kernel_offsets_2d(grid: DyadicGrid, beta: float) -> np.ndarray:
    """Midpoint weights h^2 |d|^(beta-2); the singular center cell combines the
    exact integral over the inscribed disk with a midpoint remainder term."""
    m_axis = grid.lattice_shape[0]
    h = grid.h
    d = np.arange(-(m_axis - 1), m_axis) * h
    rho = np.hypot(d[:, None], d[None, :])
    with np.errstate(divide="ignore"):
        w = np.where(rho > 0, rho ** (beta - 2.0), 0.0) * h * h
    disk = 2.0 * np.pi * (h / 2.0) ** beta / beta
    remainder = (h * h - np.pi * (h / 2.0) ** 2) * (h / 2.0) ** (beta - 2.0)
    w[m_axis - 1, m_axis - 1] = disk + remainder
    return w


def _kernel_offsets(grid: DyadicGrid, beta: float) -> np.ndarray:
    if grid.n == 1:
        return _kernel_offsets_1d(grid, beta)
    return _kernel_offsets_2d(grid, beta)


def _lattice_coords(grid: DyadicGrid) -> tuple:
    """Per-axis integer coordinates of every full-lattice point."""
    m_axis = grid.lattice_shape[0]
    if grid.n == 1:
        return (np.arange(m_axis),)
    ii, jj = np.divmod(np.arange(m_axis * m_axis), m_axis)
    return (ii, jj)


def _direct_apply(grid: DyadicGrid, weights: np.ndarray,
                  sources: np.ndarray, out_rows: np.ndarray,
                  row_factor: Optional[np.ndarray] = None,
                  col_values: Optional[np.ndarray] = None,
                  power: int = 0) -> np.ndarray:
    """Blockwise evaluation of out[i] = sum_j W[i-j] (r_i - c_j)^power s_j.

    ``sources`` is (num_lattice, K); rows are restricted to ``out_rows``
    (flat lattice indices).  ``row_factor``/``col_values`` carry the symbol
    values for commutators (power = m); power 0 ignores them.
    """
    m_axis = grid.lattice_shape[0]
    coords = _lattice_coords(grid)
    n_lat = sources.shape[0]
    n_fun = sources.shape[1]
    out = np.empty((len(out_rows), n_fun))
    block = max(1, _BLOCK_ELEMS // max(1, n_lat))
    for start in range(0, len(out_rows), block):
        rows = out_rows[start:start + block]
        if grid.n == 1:
            off = rows[:, None] - np.arange(n_lat)[None, :] + (m_axis - 1)
            w_blk = weights[off]
        else:
            di = coords[0][rows][:, None] - coords[0][None, :] + (m_axis - 1)
            dj = coords[1][rows][:, None] - coords[1][None, :] + (m_axis - 1)
            w_blk = weights[di, dj]
        if power > 0:
            diff = row_factor[start:start + block][:, None] - col_values[None, :]
            w_blk = w_blk * diff ** power
        out[start:start + block] = w_blk @ sources
    return out


def _fft_apply(grid: DyadicGrid, weights: np.ndarray,
               full: np.ndarray) -> np.ndarray:
    return fftconvolve(full, weights, mode="same")


def fractional_integral_many(grid: DyadicGrid, functions: Sequence[GridFunction],
                             beta: float, engine: str = "direct") -> list:
    """Apply the order-beta fractional integral to several functions at once."""
    spec = FracIntegralSpec(beta=beta, engine=engine)
    spec.validate(grid)
    weights = _kernel_offsets(grid, beta)
    if engine == "fft":
        outs = []
        for f in functions:
            full = grid.embed_full(f.values)
            conv = _fft_apply(grid, weights, full)
            outs.append(GridFunction(grid, grid.take_active(conv)))
        return outs
    sources = np.column_stack([grid.embed_full(f.values).ravel()
                               for f in functions])
    res = _direct_apply(grid, weights, sources, grid.lattice_index)
    return [GridFunction(grid, res[:, i]) for i in range(len(functions))]


def fractional_integral(f: GridFunction, beta: float,
                        engine: str = "direct") -> GridFunction:
    """I_beta f: quadrature of the convolution of f with |x|^(beta - n)."""
    return fractional_integral_many(f.grid, [f], beta, engine)[0]


def commutator_many(grid: DyadicGrid, functions: Sequence[GridFunction],
                    spec: FracIntegralSpec) -> list:
    """Apply the m-order commutator to several functions, reusing the kernel."""
    spec.validate(grid)
    if spec.m == 0:
        return fractional_integral_many(grid, functions, spec.beta, spec.engine)
    if spec.m == 1 and spec.engine == "fft":
        # identity route: [b, I_beta] f = b * I_beta(f) - I_beta(b f)
        outs = []
        for f in functions:
            ibf = fractional_integral(f, spec.beta, "fft")
            ibbf = fractional_integral(spec.b * f, spec.beta, "fft")
            outs.append(spec.b * ibf - ibbf)
        return outs
    if spec.engine == "fft":
        raise ArgumentError("commutators of order m >= 2 support the direct engine only")
    weights = _kernel_offsets(grid, spec.beta)
    b_full = grid.embed_full(spec.b.values).ravel()
    sources = np.column_stack([grid.embed_full(f.values).ravel()
                               for f in functions])
    res = _direct_apply(grid, weights, sources, grid.lattice_index,
                        row_factor=b_full[grid.lattice_index],
                        col_values=b_full, power=spec.m)
    return [GridFunction(grid, res[:, i]) for i in range(len(functions))]


def commutator(f: GridFunction, spec: FracIntegralSpec) -> GridFunction:
    """I^m_{beta,b} f, the m-order commutator of the fractional integral."""
    return commutator_many(f.grid, [f], spec)[0]


def maximal(f: GridFunction) -> GridFunction:
    """Centered maximal function with the r^(-n) normalization, maximized over
    the dyadic radii r = 2^j h, j = 0 .. (k_max - k_min + level)."""
    grid = f.grid
    n_radii = grid.k_max - grid.k_min + grid.level + 1
    absf = np.abs(f.values)
    meas = grid.cell_measure
    if grid.n == 1:
        full = grid.embed_full(absf)
        csum = np.concatenate([[0.0], np.cumsum(full)])
        m_axis = grid.lattice_shape[0]
        idx = np.arange(m_axis)
        best = np.zeros(m_axis)
        for j in range(n_radii):
            r = (1 << j) * grid.h
            halfw = (1 << j) - 1          # strict ball: |offset| < 2^j cells
            lo = np.clip(idx - halfw, 0, m_axis)
            hi = np.clip(idx + halfw + 1, 0, m_axis)
            window = (csum[hi] - csum[lo]) * meas
            np.maximum(best, window / r, out=best)
        return GridFunction(grid, grid.take_active(best))

    full = grid.embed_full(absf)
    m_axis = grid.lattice_shape[0]
    best = np.zeros_like(full)
    for j in range(n_radii):
        r = (1 << j) * grid.h
        halfw = (1 << j) - 1
        halfw = min(halfw, m_axis - 1)
        d = np.arange(-halfw, halfw + 1) * grid.h
        mask = (np.hypot(d[:, None], d[None, :]) < r).astype(float)
        window = fftconvolve(full, mask, mode="same") * meas
        np.maximum(best, window / r ** 2, out=best)
    return GridFunction(grid, np.maximum(grid.take_active(best), 0.0))
