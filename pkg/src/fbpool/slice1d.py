"""Exact solution of the 1D slice problem and its brute-force oracle.

For boundary data w(+-1) = +-f with f >= 0, minimize

    H(w) = int_{-1}^{1} (w')^2 dy + |{w != 0} cap [-1,1]|.

The minimizer is piecewise affine with an interval zero set [a, b]:
for f >= 1 it is w = f*y (a = b = 0, energy 2 f^2 + 2), for f < 1 it keeps
a zero interval of half-width 1-f and has energy 4 f.  The oracle minimizes
the interval-competitor energy G(a, b) over a grid of (a, b) pairs and is
kept fully independent of the closed form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import DomainError


@dataclass(frozen=True)
class SliceSolution:
    """Piecewise-affine slice profile: zero on [a, b], linear to +-f outside."""

    f: float
    a: float
    b: float
    energy: float

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        out = np.zeros_like(y)
        if self.b < 1.0:
            hi = y > self.b
            out = np.where(hi, self.f * (y - self.b) / (1.0 - self.b), out)
        if self.a > -1.0:
            lo = y < self.a
            out = np.where(lo, self.f * (y - self.a) / (1.0 + self.a), out)
        return out if out.ndim else float(out)


def interval_energy(f: float, a, b):
    """Energy G(a,b) of the competitor that vanishes on [a,b], linear outside."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return f * f / (1.0 - b) + f * f / (a + 1.0) + 2.0 - (b - a)


def slice_minimize(f: float) -> SliceSolution:
    """Closed-form minimizer of the slice energy for boundary data +-f."""
    if f < 0:
        raise DomainError(f"boundary value must be nonnegative, got {f}")
    f = float(f)
    if f >= 1.0:
        return SliceSolution(f=f, a=0.0, b=0.0, energy=2.0 * f * f + 2.0)
    return SliceSolution(f=f, a=f - 1.0, b=1.0 - f, energy=4.0 * f)


def slice_oracle(f: float, grid_n: int = 2000) -> SliceSolution:
    """Brute-force minimization of G(a,b) over {-1 < a <= b < 1}.

    The (a, b) grid is offset half a step from the singular corners a = -1,
    b = 1.  Independent check of slice_minimize.
    """
    if f < 0:
        raise DomainError(f"boundary value must be nonnegative, got {f}")
    if grid_n < 100:
        raise DomainError("oracle grid must have at least 100 points per axis")
    step = 2.0 / grid_n
    pts = -1.0 + step * (np.arange(grid_n) + 0.5)
    phi = f * f / (pts + 1.0) + pts          # a-dependent part
    psi = f * f / (1.0 - pts) - pts          # b-dependent part
    G = phi[:, None] + psi[None, :] + 2.0
    G[np.greater.outer(pts, pts)] = np.inf   # enforce a <= b
    k = int(np.argmin(G))
    ia, ib = divmod(k, grid_n)
    return SliceSolution(f=float(f), a=float(pts[ia]), b=float(pts[ib]), energy=float(G[ia, ib]))


@dataclass(frozen=True)
class SliceProfile:
    """Samples of a 1D profile on the uniform grid over [-1, 1]."""

    samples: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.samples, dtype=float, copy=True)
        if arr.ndim != 1 or arr.size < 2:
            raise DomainError("profile needs at least 2 samples")
        if not np.all(np.isfinite(arr)):
            raise DomainError("profile samples must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    @property
    def m(self) -> int:
        return self.samples.size

    def ys(self) -> np.ndarray:
        return np.linspace(-1.0, 1.0, self.m)

    @classmethod
    def from_function(cls, fn, m: int) -> "SliceProfile":
        return cls(fn(np.linspace(-1.0, 1.0, m)))


def slice_energy(profile: SliceProfile, zero_tol: float = 0.0) -> float:
    """Discrete slice energy: forward-difference Dirichlet part plus the
    measure of cells where either endpoint exceeds zero_tol."""
    s = profile.samples
    dy = 2.0 / (profile.m - 1)
    dirich = float(np.sum((s[1:] - s[:-1]) ** 2)) / dy
    nonzero = (np.abs(s[:-1]) > zero_tol) | (np.abs(s[1:]) > zero_tol)
    return dirich + dy * float(np.count_nonzero(nonzero))


def zero_measure(profile: SliceProfile, zero_tol: float = 0.0) -> float:
    """Measure of the discrete zero set, complementary to slice_energy's count."""
    s = profile.samples
    dy = 2.0 / (profile.m - 1)
    zero = (np.abs(s[:-1]) <= zero_tol) & (np.abs(s[1:]) <= zero_tol)
    return dy * float(np.count_nonzero(zero))


def energy_lower_bound_small_u(f: float, delta: float, eps: float) -> float:
    """Lower bound (f-delta)^2/eps for the slice energy of any admissible
    profile that dips to |w| <= delta at some y with 1-|y| < eps."""
    if delta >= f:
        raise DomainError(f"need delta < f, got delta={delta}, f={f}")
    if delta < 0 or eps <= 0:
        raise DomainError("need delta >= 0 and eps > 0")
    return (f - delta) ** 2 / eps


def eta_lower_bound(alpha: float, beta: float) -> float:
    """Uniform energy-gap eta = min(4*beta, alpha^2/2, alpha^2/1e4) for slices
    exceeding beta somewhere below alpha/2 when the data is 1-alpha."""
    if not 0.0 < alpha < 1.0:
        raise DomainError("alpha must lie in (0,1)")
    if beta < 0:
        raise DomainError("beta must be nonnegative")
    return min(4.0 * beta, alpha * alpha / 2.0, alpha * alpha / 1.0e4)


class EnergyExcessError(ValueError):
    """Profile energy exceeds the closed-form minimum by more than allowed."""

    def __init__(self, excess: float, allowed: float):
        self.excess = excess
        self.allowed = allowed
        super().__init__(f"energy excess {excess:.3e} exceeds allowed {allowed:.3e}")


def linf_stability_check(
    profile: SliceProfile, f: float, eps: float, C: float
) -> tuple[bool, float]:
    """Check sup |profile - f*y| <= C*sqrt(eps) for near-minimizing profiles.

    Requires f >= 1, matching endpoints, and a slice energy within eps of the
    minimum 2 f^2 + 2; violating the energy budget raises EnergyExcessError
    carrying the measured excess.
    """
    if f < 1.0:
        raise DomainError("stability bound requires f >= 1")
    s = profile.samples
    tol = 1e-9 * max(1.0, f)
    if abs(s[0] + f) > tol or abs(s[-1] - f) > tol:
        raise DomainError("profile endpoints must equal -f and +f")
    excess = slice_energy(profile) - (2.0 * f * f + 2.0)
    if excess > eps * (1.0 + 1e-9) + 1e-12:
        raise EnergyExcessError(excess=excess, allowed=eps)
    dist = float(np.max(np.abs(s - f * profile.ys())))
    return dist <= C * np.sqrt(eps), dist
