"""Minimization of the discrete two-phase energy on the elongated rectangle.

The sharp functional is discontinuous in the nodal values through its measure
term, so the solver minimizes a smoothed energy

    J_eps(u) = sum |grad u|^2 + q+^2 sigma_eps(u) + q-^2 sigma_eps(-u),
    sigma_eps(t) = clamp(t/eps, 0, 1),

by preconditioned gradient descent with Armijo backtracking, continuing eps
down to grid scale.  Descent starts from the slice-built field, which is
energy-near-optimal and already carries the central pool of zeroes; starting
from the linear field instead lands in the spurious no-pool local minimum.
After the last stage a hard truncation pass snaps near-zero nodes to exact 0
wherever that does not increase the sharp energy, and one harmonic
replacement per sign updates each phase to the discrete Dirichlet minimizer
with its zero set held fixed.

The y-line block preconditioner (tridiagonal per column) is what makes the
strongly anisotropic grids converge: hx may exceed hy by an order of
magnitude and pointwise Jacobi stalls on the slow y-modes.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np
import scipy.sparse as sp
from scipy.linalg import solve_banded
from scipy.sparse.linalg import splu

from .boundary import (
    DirichletData,
    ProfileLike,
    ProfileParams,
    Weights,
    dirichlet_data,
    profile_function,
)
from .energy import EnergyReport, energy_J
from .geometry import DomainError, Grid, Rect, ScalarField2D
from .slice1d import slice_minimize


class SolverStallError(RuntimeError):
    """A smoothing stage failed to decrease the energy; carries diagnostics."""

    def __init__(self, stage: int, eps: float, history: list[float]):
        self.stage = stage
        self.eps = eps
        self.history = history
        super().__init__(f"stage {stage} (eps={eps:g}) made no progress")


class NumericsError(RuntimeError):
    """Non-finite values appeared during descent."""


@dataclass(frozen=True)
class SolveConfig:
    profile: ProfileLike
    grid: Grid
    eps_schedule: tuple[float, ...]
    max_iter: int = 2000
    rel_tol: float = 1e-6
    seed: int = 0
    weights: Weights = dc_field(default_factory=Weights.unit)

    def __post_init__(self) -> None:
        eps = tuple(float(e) for e in self.eps_schedule)
        if not eps or any(e <= 0 for e in eps):
            raise DomainError("eps_schedule must be nonempty and positive")
        if any(b >= a for a, b in zip(eps, eps[1:])):
            raise DomainError("eps_schedule must be strictly decreasing")
        if eps[-1] < self.grid.hy / 4.0:
            raise DomainError("last smoothing width must stay >= hy/4")
        if self.rel_tol <= 0:
            raise DomainError("rel_tol must be positive")
        object.__setattr__(self, "eps_schedule", eps)


@dataclass
class SolveResult:
    u: ScalarField2D
    energy_history: list[float]
    stage_bounds: list[tuple[int, int]]
    converged: bool
    final_energy: EnergyReport


def default_grid(N: float, hy: float = 1.0 / 64.0, hx_max: float = 1.0 / 8.0) -> Grid:
    """Grid on [-3N,3N]x[-1,1]: ny from hy, nx a multiple of 6 with hx<=hx_max.

    The multiple of 6 puts the profile kinks at |x| = N and 2N on grid nodes,
    so the piecewise-affine slice field is sampled exactly per piece.
    """
    ny = int(round(2.0 / hy))
    if abs(ny * hy - 2.0) > 1e-12:
        raise DomainError("hy must divide the height 2 evenly")
    nx = 6 * int(np.ceil(N / hx_max))
    return Grid(Rect(-3.0 * N, 3.0 * N, -1.0, 1.0), nx, ny)


def default_eps_schedule(hy: float) -> tuple[float, ...]:
    return tuple(hy * s for s in (32.0, 16.0, 8.0, 4.0, 2.0, 1.0, 0.5))


def slice_field(profile: ProfileLike, grid: Grid) -> ScalarField2D:
    """Field whose every column is the exact 1D slice minimizer for f(x)."""
    f = profile_function(profile)
    fx = np.asarray(f(grid.xs()), dtype=float)
    ys = grid.ys()
    vals = np.empty(grid.shape)
    linear = fx >= 1.0
    vals[:, linear] = ys[:, None] * fx[None, linear]
    kink = np.maximum(np.abs(ys)[:, None] - 1.0 + fx[None, ~linear], 0.0)
    vals[:, ~linear] = np.sign(ys)[:, None] * kink
    return ScalarField2D(grid, vals)


# ---------------------------------------------------------------------------
# smoothed energy, gradient, preconditioner
# ---------------------------------------------------------------------------


class _Discretization:
    """Cached per-grid quantities for the descent loop."""

    def __init__(self, grid: Grid, weights: Weights):
        self.grid = grid
        self.a = grid.hy / grid.hx  # weight of squared x-differences
        self.b = grid.hx / grid.hy  # weight of squared y-differences
        self.cell = grid.hx * grid.hy
        xc, yc = grid.cell_centers()
        xx, yy = np.meshgrid(xc, yc)
        self.qp2 = np.asarray(weights.q_plus(xx, yy), dtype=float) ** 2
        self.qm2 = np.asarray(weights.q_minus(xx, yy), dtype=float) ** 2

    def dirichlet(self, u: np.ndarray) -> float:
        dx = u[:-1, 1:] - u[:-1, :-1]
        dy = u[1:, :-1] - u[:-1, :-1]
        return self.a * float(np.sum(dx * dx)) + self.b * float(np.sum(dy * dy))

    def cell_means(self, u: np.ndarray) -> np.ndarray:
        return 0.25 * (u[:-1, :-1] + u[:-1, 1:] + u[1:, :-1] + u[1:, 1:])

    def smoothed_energy(self, u: np.ndarray, eps: float) -> float:
        m = self.cell_means(u)
        sp_ = np.clip(m / eps, 0.0, 1.0)
        sm_ = np.clip(-m / eps, 0.0, 1.0)
        meas = float(np.sum(self.qp2 * sp_ + self.qm2 * sm_)) * self.cell
        return self.dirichlet(u) + meas

    def sharp_energy(self, u: np.ndarray) -> float:
        m = self.cell_means(u)
        meas = float(np.sum(self.qp2[m > 0.0]) + np.sum(self.qm2[m < 0.0])) * self.cell
        return self.dirichlet(u) + meas

    def smoothed_grad(self, u: np.ndarray, eps: float, free: np.ndarray) -> np.ndarray:
        g = np.zeros_like(u)
        tx = 2.0 * self.a * (u[:-1, 1:] - u[:-1, :-1])
        g[:-1, :-1] -= tx
        g[:-1, 1:] += tx
        ty = 2.0 * self.b * (u[1:, :-1] - u[:-1, :-1])
        g[:-1, :-1] -= ty
        g[1:, :-1] += ty
        m = self.cell_means(u)
        dsp = ((m > 0.0) & (m < eps)) / eps
        dsm = ((-m > 0.0) & (-m < eps)) / eps
        cellg = 0.25 * self.cell * (self.qp2 * dsp - self.qm2 * dsm)
        g[:-1, :-1] += cellg
        g[:-1, 1:] += cellg
        g[1:, :-1] += cellg
        g[1:, 1:] += cellg
        g[~free] = 0.0
        return g

    def precond_banded(self) -> np.ndarray:
        ny_i = self.grid.ny - 1
        ab = np.zeros((3, ny_i))
        ab[1, :] = 4.0 * self.a + 4.0 * self.b
        ab[0, 1:] = -2.0 * self.b
        ab[2, :-1] = -2.0 * self.b
        return ab


def _descend_stage(
    disc: _Discretization,
    u: np.ndarray,
    free: np.ndarray,
    eps: float,
    max_iter: int,
    rel_tol: float,
    ab: np.ndarray,
) -> tuple[np.ndarray, list[float], bool]:
    history = [disc.smoothed_energy(u, eps)]
    converged = False
    for _ in range(max_iter):
        g = disc.smoothed_grad(u, eps, free)
        if not np.all(np.isfinite(g)):
            raise NumericsError("non-finite gradient")
        d = np.zeros_like(u)
        d[1:-1, 1:-1] = -solve_banded((1, 1), ab, g[1:-1, 1:-1])
        slope = float(np.sum(g * d))
        if slope >= 0.0:
            converged = True
            break
        e0 = history[-1]
        t = 1.0
        accepted = False
        while t > 1e-12:
            e1 = disc.smoothed_energy(u + t * d, eps)
            if e1 <= e0 + 1e-4 * t * slope:
                u = u + t * d
                history.append(e1)
                accepted = True
                break
            t *= 0.5
        if not accepted:
            converged = True  # no float-representable decrease left
            break
        if len(history) > 50 and history[-51] - history[-1] <= rel_tol * abs(history[-1]):
            converged = True
            break
    if not np.all(np.isfinite(u)):
        raise NumericsError("non-finite iterate")
    return u, history, converged


# ---------------------------------------------------------------------------
# truncation and harmonic replacement
# ---------------------------------------------------------------------------


def _truncate(disc: _Discretization, u: np.ndarray, free: np.ndarray, band: float) -> np.ndarray:
    """Snap |u| < band nodes to exact 0 where the sharp energy does not go up.

    Runs 4-colored vectorized sweeps; nodes of one color never share a cell,
    so their energy deltas are independent within a sweep.
    """
    a, b, cell = disc.a, disc.b, disc.cell
    scale = 1e-14 * max(1.0, abs(disc.sharp_energy(u)))
    u = u.copy()
    ny, nx = disc.grid.ny, disc.grid.nx
    for _ in range(8):
        changed = False
        for pj in (0, 1):
            for pi in (0, 1):
                jj, ii = np.meshgrid(
                    np.arange(1 + pj, ny, 2), np.arange(1 + pi, nx, 2), indexing="ij"
                )
                val = u[jj, ii]
                cand = (np.abs(val) < band) & (val != 0.0) & free[jj, ii]
                if not np.any(cand):
                    continue
                jj, ii, val = jj[cand], ii[cand], val[cand]
                uL, uR = u[jj, ii - 1], u[jj, ii + 1]
                uD, uU = u[jj - 1, ii], u[jj + 1, ii]
                d_dir = a * ((uL**2 + uR**2) - ((val - uL) ** 2 + (uR - val) ** 2))
                d_dir += b * ((uD**2 + uU**2) - ((val - uD) ** 2 + (uU - val) ** 2))
                d_meas = np.zeros_like(val)
                m = disc.cell_means(u)
                for (oj, oi) in ((-1, -1), (-1, 0), (0, -1), (0, 0)):
                    cj, ci = jj + oj, ii + oi
                    m_old = m[cj, ci]
                    m_new = m_old - 0.25 * val
                    w_old = disc.qp2[cj, ci] * (m_old > 0) + disc.qm2[cj, ci] * (m_old < 0)
                    w_new = disc.qp2[cj, ci] * (m_new > 0) + disc.qm2[cj, ci] * (m_new < 0)
                    d_meas += cell * (w_new - w_old)
                accept = d_dir + d_meas < scale
                if np.any(accept):
                    u[jj[accept], ii[accept]] = 0.0
                    changed = True
        if not changed:
            break
    return u


def dirichlet_form_matrix(grid: Grid) -> sp.csr_matrix:
    """Graph Laplacian of the forward-difference Dirichlet form (all nodes)."""
    ny, nx = grid.ny, grid.nx
    n = (ny + 1) * (nx + 1)
    a = grid.hy / grid.hx
    b = grid.hx / grid.hy

    def node(j, i):
        return j * (nx + 1) + i

    rows, cols, vals = [], [], []
    # y-differences only enter for columns left of the right edge (cell anchoring)
    jj, ii = np.meshgrid(np.arange(ny), np.arange(nx), indexing="ij")
    p, q = node(jj, ii).ravel(), node(jj + 1, ii).ravel()
    rows += [p, q, p, q]
    cols += [p, q, q, p]
    vals += [np.full(p.size, b), np.full(p.size, b), np.full(p.size, -b), np.full(p.size, -b)]
    jj, ii = np.meshgrid(np.arange(ny + 1), np.arange(nx), indexing="ij")
    # x-differences only enter for rows below the top (cell anchoring)
    keep = (jj < ny).ravel()
    p, q = node(jj, ii).ravel()[keep], node(jj, ii + 1).ravel()[keep]
    rows += [p, q, p, q]
    cols += [p, q, q, p]
    vals += [np.full(p.size, a), np.full(p.size, a), np.full(p.size, -a), np.full(p.size, -a)]
    A = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
    )
    return A.tocsr()


def _solve_spd(A: sp.csr_matrix, rhs: np.ndarray) -> np.ndarray:
    if A.shape[0] <= 150_000:
        return splu(A.tocsc()).solve(rhs)
    import pyamg

    ml = pyamg.ruge_stuben_solver(A.tocsr())
    return ml.solve(rhs, tol=1e-12, accel="cg")


def harmonic_replace(grid: Grid, values: np.ndarray, free: np.ndarray,
                     L: sp.csr_matrix | None = None) -> np.ndarray:
    """Discrete Dirichlet-form minimizer over the free nodes, others fixed."""
    if L is None:
        L = dirichlet_form_matrix(grid)
    idx = np.flatnonzero(free.ravel())
    if idx.size == 0:
        return values.copy()
    x = values.ravel().copy()
    A = L[idx][:, idx]
    rhs = -(L[idx] @ x) + A @ x[idx]
    x[idx] = _solve_spd(A.tocsr(), rhs)
    return x.reshape(values.shape)


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------


def solve(config: SolveConfig) -> SolveResult:
    grid = config.grid
    data = dirichlet_data(grid, config.profile)
    disc = _Discretization(grid, config.weights)
    free = ~data.mask

    u = slice_field(config.profile, grid).values.copy()
    u = data.apply(u)

    ab = disc.precond_banded()
    history: list[float] = []
    stage_bounds: list[tuple[int, int]] = []
    converged = False
    for k, eps in enumerate(config.eps_schedule):
        start = len(history)
        u, stage_hist, stage_conv = _descend_stage(
            disc, u, free, eps, config.max_iter, config.rel_tol, ab
        )
        if stage_hist[-1] > stage_hist[0] + 1e-12 * max(1.0, abs(stage_hist[0])):
            raise SolverStallError(k, eps, stage_hist)
        history.extend(stage_hist)
        stage_bounds.append((start, len(history)))
        converged = stage_conv

    band = 2.0 * config.eps_schedule[-1]
    u = _truncate(disc, u, free, band)

    L = dirichlet_form_matrix(grid)
    for mask in (u > 0.0, u < 0.0):
        cand = harmonic_replace(grid, u, mask & free, L)
        cand[np.abs(cand) < 1e-14] = 0.0
        # replacement must not raise the sharp energy (it can, marginally, if
        # it perturbs the sign structure near the interface)
        if disc.sharp_energy(cand) <= disc.sharp_energy(u) + 1e-12 * max(
            1.0, abs(disc.sharp_energy(u))
        ):
            u = cand

    field = ScalarField2D(grid, u)
    report = energy_J(field, config.weights, None, 0.0)
    return SolveResult(
        u=field,
        energy_history=history,
        stage_bounds=stage_bounds,
        converged=converged,
        final_energy=report,
    )


# ---------------------------------------------------------------------------
# competitor audit
# ---------------------------------------------------------------------------


@dataclass
class AuditEntry:
    center: tuple[float, float]
    radius: float
    kind: str
    margin: float  # J(competitor) + tol - J(u); negative means violation


@dataclass
class AuditReport:
    entries: list[AuditEntry]
    worst_margin: float
    violations: list[AuditEntry]

    @property
    def passed(self) -> bool:
        return not self.violations


def _ball_free_mask(grid: Grid, center: tuple[float, float], r: float) -> np.ndarray:
    xx, yy = np.meshgrid(grid.xs(), grid.ys())
    return (xx - center[0]) ** 2 + (yy - center[1]) ** 2 < r * r


def _bounding_rect(grid: Grid, center: tuple[float, float], r: float) -> Rect:
    cx, cy = center
    i0 = max(int(np.floor((cx - r - grid.rect.x_lo) / grid.hx)) - 1, 0)
    i1 = min(int(np.ceil((cx + r - grid.rect.x_lo) / grid.hx)) + 1, grid.nx)
    j0 = max(int(np.floor((cy - r - grid.rect.y_lo) / grid.hy)) - 1, 0)
    j1 = min(int(np.ceil((cy + r - grid.rect.y_lo) / grid.hy)) + 1, grid.ny)
    return Rect(
        grid.rect.x_lo + i0 * grid.hx,
        grid.rect.x_lo + i1 * grid.hx,
        grid.rect.y_lo + j0 * grid.hy,
        grid.rect.y_lo + j1 * grid.hy,
    )


def local_energy(grid: Grid, values: np.ndarray, weights: Weights, sub: Rect) -> float:
    fld = ScalarField2D(grid, values)
    return energy_J(fld, weights, sub, 0.0).total


def ball_competitors(
    grid: Grid,
    values: np.ndarray,
    center: tuple[float, float],
    r: float,
    rng: np.random.Generator,
    splice: np.ndarray | None = None,
    planes: list[tuple[float, float, float]] | None = None,
) -> list[tuple[str, np.ndarray]]:
    """Competitor fields equal to `values` outside the open ball.

    Returns (kind, nodal array) pairs: harmonic replacement with sign freedom,
    zero fill, an optional splice field, two-plane profiles, and smooth bump
    perturbations.
    """
    inside = _ball_free_mask(grid, center, r)
    out: list[tuple[str, np.ndarray]] = []

    harm = harmonic_replace(grid, values, inside)
    out.append(("harmonic", harm))

    zero = values.copy()
    zero[inside] = 0.0
    out.append(("zero_fill", zero))

    if splice is not None:
        w = values.copy()
        w[inside] = splice[inside]
        out.append(("splice", w))

    xx, yy = np.meshgrid(grid.xs(), grid.ys())
    if planes:
        for qp, qm, t in planes:
            w = values.copy()
            plane = qp * np.maximum(yy - t, 0.0) - qm * np.maximum(t - yy, 0.0)
            w[inside] = plane[inside]
            out.append(("plane", w))

    rho = np.hypot(xx - center[0], yy - center[1])
    bump = np.where(rho < r, np.cos(0.5 * np.pi * np.clip(rho / r, 0.0, 1.0)) ** 2, 0.0)
    for sign in (+1.0, -1.0):
        amp = 0.1 * r * rng.uniform(0.2, 1.0)
        w = values.copy()
        w[inside] = (values + sign * amp * bump)[inside]
        out.append(("bump", w))
    return out


def competitor_audit(
    result: SolveResult,
    weights: Weights | None = None,
    n_balls: int = 20,
    seed: int = 0,
    c_audit: float = 8.0,
    profile: ProfileLike | None = None,
) -> AuditReport:
    """Numerical local-minimality certificate: for random interior balls no
    competitor equal to u outside the ball may undercut J by more than
    c_audit * h * r."""
    if weights is None:
        weights = Weights.unit()
    grid = result.u.grid
    values = result.u.values
    h = max(grid.hx, grid.hy)
    r_lo = min(max(4.0 * grid.hy, 2.0 * grid.hx), 0.4)
    rng = np.random.default_rng(seed)
    splice = slice_field(profile, grid).values if profile is not None else None

    entries: list[AuditEntry] = []
    for _ in range(n_balls):
        r = rng.uniform(r_lo, 0.5)
        cx = rng.uniform(grid.rect.x_lo + r + 2 * grid.hx, grid.rect.x_hi - r - 2 * grid.hx)
        cy = rng.uniform(grid.rect.y_lo + r + 2 * grid.hy, grid.rect.y_hi - r - 2 * grid.hy)
        sub = _bounding_rect(grid, (cx, cy), r)
        base = local_energy(grid, values, weights, sub)
        tol = c_audit * h * r
        xc = np.array([cx])
        yc = np.array([cy])
        qp = float(np.asarray(weights.q_plus(xc, yc))[0])
        qm = float(np.asarray(weights.q_minus(xc, yc))[0])
        comps = ball_competitors(
            grid, values, (cx, cy), r, rng, splice=splice, planes=[(qp, qm, 0.0)]
        )
        for kind, w in comps:
            margin = local_energy(grid, w, weights, sub) + tol - base
            entries.append(AuditEntry(center=(cx, cy), radius=r, kind=kind, margin=margin))

    worst = min(e.margin for e in entries) if entries else 0.0
    violations = [e for e in entries if e.margin < 0.0]
    return AuditReport(entries=entries, worst_margin=worst, violations=violations)
