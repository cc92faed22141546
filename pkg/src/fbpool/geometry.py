"""Rectangles, uniform node grids, and discrete scalar fields.

Field values live on grid nodes; every quadrature in this package runs cell
by cell using the forward-difference gradient anchored at the cell's lower
left corner.  That convention makes all energies exactly additive over
node-aligned sub-rectangles, which the slicing arguments downstream rely on.

Fields are immutable after construction and all operations here are pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TextIO

import numpy as np

#: relative slack used when matching coordinates to grid nodes
_ALIGN_RTOL = 1e-9


class AlignmentError(ValueError):
    """A sub-rectangle does not sit on grid nodes or leaves the domain."""


class DomainError(ValueError):
    """An argument violates a geometric precondition."""


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle [x_lo, x_hi] x [y_lo, y_hi]."""

    x_lo: float
    x_hi: float
    y_lo: float
    y_hi: float

    def __post_init__(self) -> None:
        if not (self.x_lo < self.x_hi and self.y_lo < self.y_hi):
            raise DomainError(f"degenerate rectangle {self}")

    @property
    def width(self) -> float:
        return self.x_hi - self.x_lo

    @property
    def height(self) -> float:
        return self.y_hi - self.y_lo

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def perimeter(self) -> float:
        return 2.0 * (self.width + self.height)

    def contains(self, other: "Rect", tol: float = 0.0) -> bool:
        return (
            other.x_lo >= self.x_lo - tol
            and other.x_hi <= self.x_hi + tol
            and other.y_lo >= self.y_lo - tol
            and other.y_hi <= self.y_hi + tol
        )


@dataclass(frozen=True)
class Grid:
    """Uniform node grid on a rectangle with nx x ny cells.

    Nodes are indexed (i, j) with i in [0, nx], j in [0, ny]; spacing may be
    anisotropic (the solve domains are extremely elongated).
    """

    rect: Rect
    nx: int
    ny: int

    def __post_init__(self) -> None:
        if self.nx < 2 or self.ny < 2:
            raise DomainError("grids need at least 2 cells per direction")

    @property
    def hx(self) -> float:
        return self.rect.width / self.nx

    @property
    def hy(self) -> float:
        return self.rect.height / self.ny

    @property
    def shape(self) -> tuple[int, int]:
        """Nodal array shape (rows, cols) = (ny+1, nx+1)."""
        return (self.ny + 1, self.nx + 1)

    def xs(self) -> np.ndarray:
        return self.rect.x_lo + self.hx * np.arange(self.nx + 1)

    def ys(self) -> np.ndarray:
        return self.rect.y_lo + self.hy * np.arange(self.ny + 1)

    def cell_centers(self) -> tuple[np.ndarray, np.ndarray]:
        xc = self.rect.x_lo + self.hx * (np.arange(self.nx) + 0.5)
        yc = self.rect.y_lo + self.hy * (np.arange(self.ny) + 0.5)
        return xc, yc

    def _locate(self, coord: float, lo: float, h: float, n: int) -> int:
        k = (coord - lo) / h
        ki = int(round(k))
        scale = max(1.0, abs(k))
        if abs(k - ki) > _ALIGN_RTOL * scale or ki < 0 or ki > n:
            raise AlignmentError(f"coordinate {coord} is not on a grid node")
        return ki

    def sub_indices(self, sub: Rect) -> tuple[int, int, int, int]:
        """Node index window (i0, i1, j0, j1) of a node-aligned sub-rectangle."""
        i0 = self._locate(sub.x_lo, self.rect.x_lo, self.hx, self.nx)
        i1 = self._locate(sub.x_hi, self.rect.x_lo, self.hx, self.nx)
        j0 = self._locate(sub.y_lo, self.rect.y_lo, self.hy, self.ny)
        j1 = self._locate(sub.y_hi, self.rect.y_lo, self.hy, self.ny)
        if i0 >= i1 or j0 >= j1:
            raise AlignmentError(f"empty sub-rectangle {sub}")
        return i0, i1, j0, j1


@dataclass(frozen=True)
class ScalarField2D:
    """Real nodal values on a Grid; values[j, i] sits at (x_i, y_j)."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=float, copy=True)
        if arr.shape != self.grid.shape:
            raise DomainError(
                f"values shape {arr.shape} does not match grid {self.grid.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise DomainError("field values must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @classmethod
    def from_function(cls, grid: Grid, fn) -> "ScalarField2D":
        xx, yy = np.meshgrid(grid.xs(), grid.ys())
        return cls(grid, fn(xx, yy))


def gradient(field: ScalarField2D, cell: tuple[int, int]) -> tuple[float, float]:
    """Forward-difference gradient of one cell, anchored at its lower-left node.

    This is the gradient every energy quadrature uses; it is exact for affine
    fields on every cell.
    """
    i, j = cell
    g = field.grid
    if not (0 <= i < g.nx and 0 <= j < g.ny):
        raise IndexError(f"cell {cell} outside [0,{g.nx})x[0,{g.ny})")
    v = field.values
    gx = (v[j, i + 1] - v[j, i]) / g.hx
    gy = (v[j + 1, i] - v[j, i]) / g.hy
    return gx, gy


def restrict(field: ScalarField2D, sub: Rect) -> ScalarField2D:
    """Sub-field on a node-aligned sub-rectangle, identical nodal values."""
    g = field.grid
    if not g.rect.contains(sub, tol=_ALIGN_RTOL * max(g.rect.width, g.rect.height)):
        raise AlignmentError(f"{sub} not contained in {g.rect}")
    i0, i1, j0, j1 = g.sub_indices(sub)
    subgrid = Grid(sub, i1 - i0, j1 - j0)
    return ScalarField2D(subgrid, field.values[j0 : j1 + 1, i0 : i1 + 1])


def write_field(field: ScalarField2D, stream: TextIO) -> None:
    """Text dump: 'nx ny', then the rect, then nodal values row-major (j outer)."""
    g = field.grid
    stream.write(f"{g.nx} {g.ny}\n")
    r = g.rect
    stream.write(f"{r.x_lo!r} {r.x_hi!r} {r.y_lo!r} {r.y_hi!r}\n")
    for v in field.values.ravel():
        stream.write(f"{v!r}\n")


def read_field(stream: TextIO) -> ScalarField2D:
    nx, ny = (int(t) for t in stream.readline().split())
    x_lo, x_hi, y_lo, y_hi = (float(t) for t in stream.readline().split())
    grid = Grid(Rect(x_lo, x_hi, y_lo, y_hi), nx, ny)
    vals = np.loadtxt(stream, dtype=float, max_rows=(nx + 1) * (ny + 1))
    return ScalarField2D(grid, vals.reshape(ny + 1, nx + 1))


def save_field(field: ScalarField2D, path) -> None:
    with open(path, "w") as fh:
        write_field(field, fh)


def load_field(path) -> ScalarField2D:
    with open(path) as fh:
        return read_field(fh)
