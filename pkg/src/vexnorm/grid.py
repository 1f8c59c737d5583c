"""Truncated dyadic discretization of R^n (n = 1, 2).

The domain is the box [-2^k_max, 2^k_max]^n meshed uniformly with cell
spacing h = 2^(k_max - level).  Only cells whose center lies in the shell
range 2^k_min < |x| <= 2^k_max are kept: the neighbourhood of the origin is
excluded (the spaces of interest live on R^n without the origin) and, for
n = 2, so are the box corners outside the outermost ball.  Every active
cell belongs to exactly one dyadic annulus A_k = B_k \\ B_{k-1}.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ArgumentError, BudgetError

DEFAULT_CELL_BUDGET = 1 << 22


@dataclass(frozen=True, eq=False)
class DyadicGrid:
    """Immutable uniform grid with dyadic-annulus bookkeeping.

    Attributes
    ----------
    n : spatial dimension, 1 or 2.
    k_min, k_max : shell range; cells with |center| <= 2^k_min are excluded.
    level : refinement level, h = 2^(k_max - level).
    centers : (N, n) active cell centers in lexicographic lattice order.
    radii : (N,) Euclidean norms of the centers.
    shell : (N,) annulus index k with 2^(k-1) < |center| <= 2^k.
    lattice_shape : shape of the full box lattice (before exclusion).
    lattice_index : (N,) flat index of each active cell in the box lattice.
    """

    n: int
    k_min: int
    k_max: int
    level: int
    h: float
    centers: np.ndarray
    radii: np.ndarray
    shell: np.ndarray
    lattice_shape: tuple
    lattice_index: np.ndarray

    @property
    def cell_measure(self) -> float:
        return self.h ** self.n

    @property
    def num_cells(self) -> int:
        return self.centers.shape[0]

    def shells(self) -> range:
        """Indices k of the (possibly empty) annuli covered by the grid."""
        return range(self.k_min + 1, self.k_max + 1)

    def shell_mask(self, k: int) -> np.ndarray:
        self._check_shell(k)
        return self.shell == k

    def ball_mask(self, k: int) -> np.ndarray:
        """Cells of the truncated ball B_k (origin hole excluded)."""
        self._check_shell(k)
        return self.shell <= k

    def measure_of(self, mask: np.ndarray) -> float:
        return float(np.count_nonzero(mask)) * self.cell_measure

    def embed_full(self, values: np.ndarray) -> np.ndarray:
        """Scatter active-cell values into the full box lattice (zeros elsewhere)."""
        full = np.zeros(int(np.prod(self.lattice_shape)))
        full[self.lattice_index] = values
        return full.reshape(self.lattice_shape)

    def take_active(self, full: np.ndarray) -> np.ndarray:
        return full.reshape(-1)[self.lattice_index]

    def _check_shell(self, k: int) -> None:
        if not (self.k_min < k <= self.k_max):
            raise ArgumentError(
                f"shell index {k} outside ({self.k_min}, {self.k_max}]")


def build_grid(n: int, k_min: int, k_max: int, level: int,
               budget: int = DEFAULT_CELL_BUDGET) -> DyadicGrid:
    """Build a :class:`DyadicGrid`.

    Raises :class:`ArgumentError` for an invalid shell range or dimension and
    :class:`BudgetError` when the full box lattice would exceed ``budget``
    cells.
    """
    if n not in (1, 2):
        raise ArgumentError(f"dimension n={n} not supported (n must be 1 or 2)")
    if k_min >= k_max:
        raise ArgumentError(f"empty shell range: k_min={k_min} >= k_max={k_max}")
    if level < 1:
        raise ArgumentError(f"refinement level must be >= 1, got {level}")

    m_axis = 1 << (level + 1)          # lattice points per axis
    if m_axis ** n > budget:
        raise BudgetError(
            f"grid would need {m_axis ** n} cells, budget is {budget}")

    h = 2.0 ** (k_max - level)
    half = 2.0 ** k_max
    axis = -half + (np.arange(m_axis) + 0.5) * h
    if n == 1:
        centers = axis[:, None]
    else:
        xx, yy = np.meshgrid(axis, axis, indexing="ij")
        centers = np.column_stack([xx.ravel(), yy.ravel()])
    radii = np.linalg.norm(centers, axis=1)

    active = (radii > 2.0 ** k_min) & (radii <= 2.0 ** k_max)
    lattice_index = np.nonzero(active)[0]
    centers = centers[active]
    radii = radii[active]

    # Cell centers never sit exactly on a shell boundary (half-integer lattice
    # coordinates cannot square-sum to a power of four), but guard the float
    # log against off-by-one anyway.
    shell = np.ceil(np.log2(radii)).astype(int)
    shell[radii > 2.0 ** shell] += 1
    shell[radii <= 2.0 ** (shell - 1)] -= 1

    for arr in (centers, radii, shell, lattice_index):
        arr.setflags(write=False)

    return DyadicGrid(n=n, k_min=k_min, k_max=k_max, level=level, h=h,
                      centers=centers, radii=radii, shell=shell,
                      lattice_shape=(m_axis,) * n, lattice_index=lattice_index)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Real-valued samples on the active cells of a :class:`DyadicGrid`."""

    grid: DyadicGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.num_cells,):
            raise ArgumentError(
                f"values shape {values.shape} does not match grid "
                f"({self.grid.num_cells} cells)")
        if not np.all(np.isfinite(values)):
            raise ArgumentError("grid function values must be finite")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    # -- basic algebra (same grid required) --------------------------------

    def _coerce(self, other) -> np.ndarray:
        if isinstance(other, GridFunction):
            if other.grid is not self.grid:
                raise ArgumentError("grid functions live on different grids")
            return other.values
        return np.asarray(other, dtype=float)

    def __add__(self, other):
        return GridFunction(self.grid, self.values + self._coerce(other))

    def __sub__(self, other):
        return GridFunction(self.grid, self.values - self._coerce(other))

    def __mul__(self, other):
        return GridFunction(self.grid, self.values * self._coerce(other))

    __rmul__ = __mul__

    def __neg__(self):
        return GridFunction(self.grid, -self.values)

    def abs(self) -> "GridFunction":
        return GridFunction(self.grid, np.abs(self.values))

    def integral(self) -> float:
        return float(np.sum(self.values)) * self.grid.cell_measure

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0

    def is_zero(self) -> bool:
        return not np.any(self.values)


def from_callable(grid: DyadicGrid, fn: Callable[[np.ndarray], np.ndarray]) -> GridFunction:
    """Sample ``fn`` (mapping an (N, n) array of points to N values)."""
    return GridFunction(grid, np.asarray(fn(grid.centers), dtype=float))


def restrict_to_shell(f: GridFunction, k: int) -> GridFunction:
    """f * chi_{A_k}: equal to f on annulus k, zero elsewhere."""
    mask = f.grid.shell_mask(k)
    return GridFunction(f.grid, np.where(mask, f.values, 0.0))


def characteristic_shell(grid: DyadicGrid, k: int) -> GridFunction:
    """chi_{A_k} as a grid function."""
    return GridFunction(grid, grid.shell_mask(k).astype(float))


def characteristic_ball(grid: DyadicGrid, k: int) -> GridFunction:
    """chi_{B_k} as a grid function (the origin hole is excluded)."""
    return GridFunction(grid, grid.ball_mask(k).astype(float))
