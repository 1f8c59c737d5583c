"""Modular, Luxemburg, mean-oscillation and Herz-Morrey norms on grid functions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import ArgumentError
from .exponents import ExponentFunction, conjugate
from .grid import DyadicGrid, GridFunction

__all__ = [
    "HerzMorreyParams", "BallFamily", "dyadic_ball_family",
    "modular", "luxemburg_norm", "bmo_norm", "mean_on_set",
    "herz_morrey_norm", "holder_pair",
]


@dataclass(frozen=True)
class HerzMorreyParams:
    """Parameter tuple (alpha, lam, p, q) of a Herz-Morrey norm."""

    alpha: float
    lam: float
    p: float
    q: ExponentFunction

    def __post_init__(self):
        if self.p <= 0:
            raise ArgumentError(f"p must be positive, got {self.p}")
        if self.lam < 0:
            raise ArgumentError(f"lambda must be >= 0, got {self.lam}")


@dataclass(frozen=True)
class BallFamily:
    """A finite family of balls used to approximate suprema over all balls."""

    centers: np.ndarray   # (B, n)
    radii: np.ndarray     # (B,)

    def __post_init__(self):
        if len(self.radii) == 0:
            raise ArgumentError("ball family must be nonempty")

    def __len__(self):
        return len(self.radii)

    def __iter__(self):
        return zip(self.centers, self.radii)


def dyadic_ball_family(grid: DyadicGrid, n_centers: int = 16,
                       seed: int = 0) -> BallFamily:
    """Balls of all dyadic radii 2^j, j in [k_min, k_max], centered at the
    origin and at a random subsample of grid cell centers."""
    rng = np.random.default_rng(seed)
    take = min(n_centers, grid.num_cells)
    idx = rng.choice(grid.num_cells, size=take, replace=False)
    centers = np.vstack([np.zeros((1, grid.n)), grid.centers[idx]])
    radii = 2.0 ** np.arange(grid.k_min, grid.k_max + 1)
    cc = np.repeat(centers, len(radii), axis=0)
    rr = np.tile(radii, len(centers))
    return BallFamily(centers=cc, radii=rr)


def modular(f: GridFunction, q: ExponentFunction, eta: float) -> float:
    """The modular sum of (|f|/eta)^q(x) over the grid, weighted by cell measure."""
    if eta <= 0:
        raise ArgumentError(f"eta must be positive, got {eta}")
    qx = q.evaluate(f.grid.centers)
    return float(np.sum((np.abs(f.values) / eta) ** qx)) * f.grid.cell_measure


def luxemburg_norm(f: GridFunction, q: ExponentFunction,
                   rtol: float = 1e-12) -> float:
    """inf{eta > 0 : modular(f, q, eta) <= 1}, by bracketing and bisection.

    The bracket is grown/shrunk by factors of two from max|f| and then
    bisected until the bracket width is below ``rtol`` relative; the returned
    endpoint satisfies modular <= 1.  Returns 0 for the zero function.
    """
    support = np.abs(f.values)
    mask = support > 0
    if not mask.any():
        return 0.0
    v = support[mask]
    qx = q.evaluate(f.grid.centers[mask])
    meas = f.grid.cell_measure

    def mod(eta: float) -> float:
        return float(np.sum((v / eta) ** qx)) * meas

    hi = float(np.max(v))
    for _ in range(200):
        if mod(hi) <= 1.0:
            break
        hi *= 2.0
    lo = hi
    for _ in range(2000):
        cand = lo * 0.5
        if mod(cand) > 1.0:
            lo = cand
            break
        lo = cand
    else:  # pragma: no cover - modular blows up as eta -> 0 for f != 0
        raise ArgumentError("failed to bracket the Luxemburg norm")

    for _ in range(200):
        if hi - lo <= rtol * hi:
            break
        mid = 0.5 * (lo + hi)
        if mod(mid) <= 1.0:
            hi = mid
        else:
            lo = mid
    return hi


def mean_on_set(f: GridFunction, mask: np.ndarray) -> float:
    """Mean value of f over the cells selected by ``mask``."""
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        raise ArgumentError("mean over an empty set")
    return float(np.mean(f.values[mask]))


def bmo_norm(b: GridFunction, balls: BallFamily) -> float:
    """Max over the ball family of the mean oscillation (1/|B|) int_B |b - b_B|."""
    grid = b.grid
    best = 0.0
    for center, radius in balls:
        dist = np.linalg.norm(grid.centers - center, axis=1)
        mask = dist <= radius
        if not mask.any():
            continue
        vals = b.values[mask]
        best = max(best, float(np.mean(np.abs(vals - vals.mean()))))
    return best


def _shell_norms(f: GridFunction, q: ExponentFunction) -> np.ndarray:
    """Luxemburg norms of f restricted to each annulus, in shell order."""
    grid = f.grid
    out = np.zeros(grid.k_max - grid.k_min)
    for i, k in enumerate(grid.shells()):
        mask = grid.shell_mask(k)
        if not mask.any():
            continue
        restricted = GridFunction(grid, np.where(mask, f.values, 0.0))
        out[i] = luxemburg_norm(restricted, q)
    return out


def herz_morrey_norm(f: GridFunction, params: HerzMorreyParams) -> float:
    """Truncated Herz-Morrey norm: max over truncation shells k0 of
    2^(-k0*lam) * (sum_{k <= k0} 2^(k*alpha*p) ||f chi_k||^p)^(1/p)."""
    grid = f.grid
    s = _shell_norms(f, params.q)
    ks = np.arange(grid.k_min + 1, grid.k_max + 1)
    terms = np.cumsum((2.0 ** (ks * params.alpha) * s) ** params.p)
    vals = 2.0 ** (-ks * params.lam) * terms ** (1.0 / params.p)
    return float(np.max(vals)) if vals.size else 0.0


@dataclass(frozen=True)
class HolderPair:
    lhs: float
    rhs: float


def holder_pair(f: GridFunction, g: GridFunction,
                q: ExponentFunction) -> HolderPair:
    """Both sides of the generalized Hoelder inequality
    int |f g| <= r_q ||f||_q ||g||_q' with r_q = 1 + 1/q_- - 1/q_+.

    The exponent bounds are taken over the grid's truncated domain.
    """
    if g.grid is not f.grid:
        raise ArgumentError("f and g live on different grids")
    lhs = float(np.sum(np.abs(f.values * g.values))) * f.grid.cell_measure
    q_minus, q_plus = q.bounds_on(f.grid)
    r_q = 1.0 + 1.0 / q_minus - 1.0 / q_plus
    rhs = r_q * luxemburg_norm(f, q) * luxemburg_norm(g, conjugate(q))
    return HolderPair(lhs=lhs, rhs=rhs)
