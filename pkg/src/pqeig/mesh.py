"""Uniform Cartesian grids on intervals and squares with zero Dirichlet data.

Only interior nodes are stored. Boundary values are implicitly zero and are
re-inserted as ghost values by the operators that need them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import FieldError, ParameterError, ShapeError


@dataclass(frozen=True)
class Grid:
    dim: int
    n: int
    length: float

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ParameterError(f"dim must be 1 or 2, got {self.dim}")
        if int(self.n) != self.n or self.n < 2:
            raise ParameterError(f"n must be an integer >= 2, got {self.n}")
        if not np.isfinite(self.length) or self.length <= 0:
            raise ParameterError(f"length must be positive, got {self.length}")

    @property
    def n_per_axis(self) -> tuple[int, ...]:
        return (self.n,) * self.dim

    @property
    def length_per_axis(self) -> tuple[float, ...]:
        return (float(self.length),) * self.dim

    @property
    def h(self) -> float:
        return self.length / (self.n + 1)

    @property
    def h_per_axis(self) -> tuple[float, ...]:
        return (self.h,) * self.dim

    @property
    def shape(self) -> tuple[int, ...]:
        return self.n_per_axis

    @property
    def size(self) -> int:
        return self.n**self.dim

    @property
    def cell_volume(self) -> float:
        return self.h**self.dim

    def coordinates(self) -> list[np.ndarray]:
        """Interior node coordinates, one flat array per axis (row-major)."""
        x = (np.arange(self.n) + 1) * self.h
        if self.dim == 1:
            return [x]
        X, Y = np.meshgrid(x, x, indexing="ij")
        return [X.ravel(), Y.ravel()]


@dataclass(frozen=True, eq=False)
class ScalarField:
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float).ravel()
        if vals.size != self.grid.size:
            raise ShapeError(
                f"field has {vals.size} values, grid has {self.grid.size} interior nodes"
            )
        if not np.all(np.isfinite(vals)):
            raise FieldError("field contains non-finite values")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return self.values.size

    def reshaped(self) -> np.ndarray:
        return self.values.reshape(self.grid.shape)

    def scaled(self, s: float) -> "ScalarField":
        return ScalarField(self.grid, s * self.values)


def make_grid(dim: int, n: int, length: float) -> Grid:
    return Grid(int(dim), int(n), float(length))


def field_from_fn(grid: Grid, f: Callable[..., float]) -> ScalarField:
    """Sample ``f`` at the interior nodes, x_i = (index + 1) * h on each axis."""
    coords = grid.coordinates()
    vals = np.array([f(*pt) for pt in zip(*coords)], dtype=float)
    if not np.all(np.isfinite(vals)):
        raise FieldError("f returned a non-finite value at an interior node")
    return ScalarField(grid, vals)


_MASK64 = (1 << 64) - 1
_TWO53 = float(1 << 53)


def random_field(grid: Grid, seed: int, positive: bool = False) -> ScalarField:
    """Reproducible pseudo-random nodal values.

    The stream is Philox-4x64 keyed by ``seed mod 2**64`` with counter
    starting at zero; node ``i`` (row-major) consumes the ``i``-th raw 64-bit
    word ``w``. With ``m = w >> 11`` the value is ``(m + 1) / 2**53`` in
    (0, 1] when ``positive`` and ``2 m / (2**53 - 1) - 1`` in [-1, 1]
    otherwise.
    """
    bitgen = np.random.Philox(key=int(seed) & _MASK64)
    raw = bitgen.random_raw(grid.size)
    m = (raw >> np.uint64(11)).astype(np.float64)
    if positive:
        vals = (m + 1.0) / _TWO53
    else:
        vals = 2.0 * m / (_TWO53 - 1.0) - 1.0
    return ScalarField(grid, vals)
