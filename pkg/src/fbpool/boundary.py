"""Boundary profiles for the elongated rectangle and weight functions.

The flat profile equals 1 - alpha on the middle third of [-3N, 3N], ramps
linearly up to 2 on the second third, and stays at 2 on the outer third.
The radial variant replaces the linear ramp with a logarithmic one, which
is what makes the slice-built field's radial energy decay like 1/log(2N).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .geometry import DomainError, Grid

_REL_TOL = 1e-9


@dataclass(frozen=True)
class ProfileParams:
    """Half-width scale N and dip parameter alpha of the boundary profile."""

    N: float
    alpha: float = 0.1

    def __post_init__(self) -> None:
        if self.N < 1:
            raise DomainError(f"N must be >= 1, got {self.N}")
        if not 0.0 < self.alpha < 1.0:
            raise DomainError(f"alpha must lie in (0,1), got {self.alpha}")

    @property
    def x_flat_one(self) -> float:
        """Abscissa where the ramp reaches 1: (1+2*alpha)*N/(1+alpha)."""
        return (1.0 + 2.0 * self.alpha) * self.N / (1.0 + self.alpha)


def f_flat(x, p: ProfileParams):
    """Flat-strip profile: 1-alpha for |x|<=N, linear ramp, then 2 up to 3N."""
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    if np.any(ax > 3.0 * p.N * (1.0 + _REL_TOL)):
        raise DomainError("profile argument outside [-3N, 3N]")
    ramp = ax * (1.0 + p.alpha) / p.N - 2.0 * p.alpha
    out = np.where(ax <= p.N, 1.0 - p.alpha, np.where(ax <= 2.0 * p.N, ramp, 2.0))
    return out if out.ndim else float(out)


def f_radial(r, p: ProfileParams):
    """Radial profile: 1-alpha for r<=1, logarithmic ramp to 2 at r=2N."""
    r = np.asarray(r, dtype=float)
    if np.any(r < -_REL_TOL) or np.any(r > 3.0 * p.N * (1.0 + _REL_TOL)):
        raise DomainError("radius outside [0, 3N]")
    logramp = (np.log(np.maximum(r, 1e-300)) / np.log(2.0 * p.N) + 1.0) * (
        1.0 + p.alpha
    ) - 2.0 * p.alpha
    out = np.where(r <= 1.0, 1.0 - p.alpha, np.where(r <= 2.0 * p.N, logramp, 2.0))
    return out if out.ndim else float(out)


ProfileLike = Union[ProfileParams, Callable[[np.ndarray], np.ndarray]]


def profile_function(profile: ProfileLike) -> Callable[[np.ndarray], np.ndarray]:
    if isinstance(profile, ProfileParams):
        return lambda x: f_flat(x, profile)
    return profile


@dataclass(frozen=True)
class DirichletData:
    """Fixed-node mask and values for a fully Dirichlet rectangle problem."""

    mask: np.ndarray
    values: np.ndarray

    def apply(self, arr: np.ndarray) -> np.ndarray:
        out = arr.copy()
        out[self.mask] = self.values[self.mask]
        return out


def dirichlet_data(grid: Grid, profile: ProfileLike) -> DirichletData:
    """Boundary assignment: +f on top, -f on bottom, y*f(x_side) on the sides.

    With the flat profile the side data is the linear interpolation 2y between
    the corner values -2 and 2.  The data is odd under y -> -y.
    """
    if isinstance(profile, ProfileParams):
        r = grid.rect
        want = 3.0 * profile.N
        ok = (
            abs(r.x_lo + want) <= _REL_TOL * want
            and abs(r.x_hi - want) <= _REL_TOL * want
            and abs(r.y_lo + 1.0) <= _REL_TOL
            and abs(r.y_hi - 1.0) <= _REL_TOL
        )
        if not ok:
            raise DomainError(f"grid rect {r} is not [-3N,3N]x[-1,1] for N={profile.N}")
    f = profile_function(profile)
    xs, ys = grid.xs(), grid.ys()
    fx = np.asarray(f(xs), dtype=float)

    mask = np.zeros(grid.shape, dtype=bool)
    vals = np.zeros(grid.shape, dtype=float)
    mask[0, :] = mask[-1, :] = True
    mask[:, 0] = mask[:, -1] = True
    vals[-1, :] = fx
    vals[0, :] = -fx
    vals[:, 0] = ys * float(f(xs[0]))
    vals[:, -1] = ys * float(f(xs[-1]))
    # corners: the side interpolation and +-f agree there by construction
    return DirichletData(mask=mask, values=vals)


@dataclass(frozen=True)
class Weights:
    """Positive phase weights q+ and q- of the two-phase energy.

    Callables take point arrays (x, y) and return positive values bounded
    between c0 and 1/c0; holder_alpha records their Hoelder class.
    """

    q_plus: Callable[[np.ndarray, np.ndarray], np.ndarray]
    q_minus: Callable[[np.ndarray, np.ndarray], np.ndarray]
    holder_alpha: float = 1.0
    c0: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 < self.holder_alpha <= 1.0:
            raise DomainError("holder_alpha must lie in (0,1]")
        if self.c0 <= 0.0:
            raise DomainError("c0 must be positive")

    @classmethod
    def constant(cls, q_plus: float = 1.0, q_minus: float = 1.0, holder_alpha: float = 1.0) -> "Weights":
        if q_plus <= 0 or q_minus <= 0:
            raise DomainError("constant weights must be positive")
        qp = float(q_plus)
        qm = float(q_minus)
        return cls(
            q_plus=lambda x, y: np.full_like(np.asarray(x, dtype=float), qp),
            q_minus=lambda x, y: np.full_like(np.asarray(x, dtype=float), qm),
            holder_alpha=holder_alpha,
            c0=min(qp, qm, 1.0 / qp, 1.0 / qm),
        )

    @classmethod
    def unit(cls) -> "Weights":
        return cls.constant(1.0, 1.0)
