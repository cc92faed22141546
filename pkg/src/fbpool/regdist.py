"""Regularized distance to weighted graph measures and the almost-minimizers
built from it.

For a measure mu = q^{-1} H^1 restricted to the graph of f, the regularized
distance is

    D(x) = ( integral |x - y|^{-(d+beta)} dmu(y) )^{-1/beta},

here with d = 1, n = 2, and beta = 1 for all field builds.  D is comparable
to the true distance, has bounded gradient, Hessian decaying like 1/dist,
and its gradient trace on the graph equals CAL_C * Theta^{-1/beta} where
Theta = 2/q is the density of mu.  Setting u = D_plus above the upper graph,
-D_minus below the lower one, and 0 in between produces a field whose free
boundaries are exactly the two graphs and which minimizes the two-phase
energy up to a controlled per-ball excess; the branch set is the boundary
of the coincidence set {f_minus = f_plus}.

Quadrature: the curved core |s| <= R/10 is integrated numerically and the
flat tails are added in closed form (arctangent for beta = 1); truncating
the tails instead would wreck the distance-comparability constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable

import numpy as np
from scipy import integrate
from scipy.spatial import cKDTree

from .boundary import Weights
from .energy import energy_J
from .geometry import DomainError, Grid, Rect, ScalarField2D
from .minimize2d import _bounding_rect, ball_competitors, local_energy

#: gradient-trace calibration |grad D| = CAL_C * Theta^{-1/beta} for d=1, beta=1,
#: derived once from the flat line (D = h/pi, Theta = 2); re-derived in tests.
CAL_C = 2.0 / math.pi


class SingularityError(ValueError):
    """Evaluation point lies on the support of the measure."""


@dataclass(frozen=True)
class GraphMeasureSpec:
    """Graph function f, weight q, and the exponents defining the measure.

    f must vanish outside |s| <= R/10 (flat tails; a constant offset is also
    accepted for translated flat lines) and q is sampled on the curve.  The
    tail weight is frozen at q(+-R/10, f) per side.
    """

    f: Callable[[np.ndarray], np.ndarray]
    q: Callable[[np.ndarray, np.ndarray], np.ndarray]
    beta: float = 1.0
    d: int = 1
    R: float = 10.0
    fprime: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self) -> None:
        if self.beta <= 0 or self.R <= 0:
            raise DomainError("beta and R must be positive")
        if self.d != 1:
            raise DomainError("only the planar case d = 1 is implemented")

    @property
    def core(self) -> float:
        return self.R / 10.0

    def fp(self, s: np.ndarray) -> np.ndarray:
        if self.fprime is not None:
            return np.asarray(self.fprime(s), dtype=float)
        e = 1e-6 * max(1.0, self.core)
        return (np.asarray(self.f(s + e)) - np.asarray(self.f(s - e))) / (2 * e)

    def curve_samples(self, n: int = 8192, span: float = 4.0) -> np.ndarray:
        s = np.linspace(-span * self.core, span * self.core, n)
        return np.stack([s, np.asarray(self.f(s), dtype=float)], axis=1)


def graph_distance(spec: GraphMeasureSpec, pts: np.ndarray) -> np.ndarray:
    """Distance to a dense polyline sampling of the full graph."""
    tree = cKDTree(spec.curve_samples())
    d, _ = tree.query(np.atleast_2d(pts))
    return d


def _tail_sum_beta1(spec: GraphMeasureSpec, x0, y0):
    """Closed-form arctangent tails beyond |s| = R/10 for beta = 1."""
    S = spec.core
    x0 = np.asarray(x0, dtype=float)
    y0 = np.asarray(y0, dtype=float)
    f_edge = float(np.asarray(spec.f(np.array([S])))[0])
    q_r = float(np.asarray(spec.q(np.array([S]), np.array([f_edge])))[0])
    f_edge_l = float(np.asarray(spec.f(np.array([-S])))[0])
    q_l = float(np.asarray(spec.q(np.array([-S]), np.array([f_edge_l])))[0])

    def one_side(L, h, qv):
        # integral_0^inf dt / ((t+L)^2 + h^2), L > 0
        ah = np.abs(h)
        with np.errstate(divide="ignore", invalid="ignore"):
            val = np.where(ah > 1e-300, np.arctan2(ah, L) / np.where(ah > 1e-300, ah, 1.0), 1.0 / L)
        return val / qv

    hr = y0 - f_edge
    hl = y0 - f_edge_l
    Lr = S - x0
    Ll = S + x0
    if np.any(Lr <= 0) or np.any(Ll <= 0):
        raise DomainError("evaluation points must lie inside |x| < R/10")
    return one_side(Lr, hr, q_r) + one_side(Ll, hl, q_l)


def regdist_eval(spec: GraphMeasureSpec, x: tuple[float, float], epsrel: float = 1e-10) -> float:
    """Pointwise regularized distance by adaptive quadrature on the core plus
    exact tails.  The reference evaluator; the batch path is checked against it."""
    x0, y0 = float(x[0]), float(x[1])
    dist = float(graph_distance(spec, np.array([[x0, y0]]))[0])
    if dist <= 1e-12 * max(1.0, spec.core):
        raise SingularityError(f"point {x} lies on the graph")
    S = spec.core
    p = spec.d + spec.beta

    def integrand(s):
        sa = np.atleast_1d(np.asarray(s, dtype=float))
        fs = np.asarray(spec.f(sa), dtype=float)
        fp = spec.fp(sa)
        rho = np.sqrt(1.0 + fp * fp) / np.asarray(spec.q(sa, fs), dtype=float)
        rr = (x0 - sa) ** 2 + (y0 - fs) ** 2
        out = rho * rr ** (-p / 2.0)
        return out if np.ndim(s) else float(out[0])

    s_near = float(np.clip(x0, -S, S))
    total, _ = integrate.quad(
        integrand, -S, S, points=[s_near], limit=400, epsabs=0.0, epsrel=epsrel
    )
    if spec.beta == 1.0 and spec.d == 1:
        total += float(_tail_sum_beta1(spec, x0, y0))
    else:
        for lo, hi in ((S, np.inf), (-np.inf, -S)):
            t, _ = integrate.quad(integrand, lo, hi, limit=400, epsabs=0.0, epsrel=epsrel)
            total += t
    if not np.isfinite(total) or total <= 0:
        raise DomainError("regularized-distance integral did not converge")
    return float(total ** (-1.0 / spec.beta))


def regdist_eval_batch(
    spec: GraphMeasureSpec, pts: np.ndarray, ds: float, chunk: int = 2048
) -> np.ndarray:
    """Vectorized evaluation at many points: uniform trapezoid on the core
    plus analytic tails.  Spectrally accurate once ds is a few times smaller
    than the distance of the points to the curve (beta = 1 only)."""
    if spec.beta != 1.0:
        raise DomainError("batch evaluation is specialized to beta = 1")
    S = spec.core
    n = max(int(np.ceil(2 * S / ds)) + 1, 33)
    s = np.linspace(-S, S, n)
    w = np.full(n, s[1] - s[0])
    w[0] *= 0.5
    w[-1] *= 0.5
    fs = np.asarray(spec.f(s), dtype=float)
    fp = spec.fp(s)
    rho = np.sqrt(1.0 + fp * fp) / np.asarray(spec.q(s, fs), dtype=float) * w

    pts = np.atleast_2d(pts)
    out = np.empty(pts.shape[0])
    for lo in range(0, pts.shape[0], chunk):
        P = pts[lo : lo + chunk]
        rr = (P[:, 0:1] - s[None, :]) ** 2 + (P[:, 1:2] - fs[None, :]) ** 2
        out[lo : lo + chunk] = (rho[None, :] / rr).sum(axis=1)
    out += _tail_sum_beta1(spec, pts[:, 0], pts[:, 1])
    return out ** (-1.0)


def build_almost_minimizer(
    spec_plus: GraphMeasureSpec, spec_minus: GraphMeasureSpec, grid: Grid
) -> ScalarField2D:
    """Field equal to D_plus above the upper graph, -D_minus below the lower
    one, and 0 on the closed lens in between (strict inequalities decide
    membership; nodes on a graph get 0)."""
    xs, ys = grid.xs(), grid.ys()
    fp_up = np.asarray(spec_plus.f(xs), dtype=float)
    fm_lo = np.asarray(spec_minus.f(xs), dtype=float)
    if np.any(fm_lo > fp_up + 1e-12):
        raise DomainError("lower graph exceeds upper graph")
    corners = max(
        np.hypot(abs(grid.rect.x_lo), abs(grid.rect.y_lo)),
        np.hypot(abs(grid.rect.x_hi), abs(grid.rect.y_hi)),
    )
    if corners > min(spec_plus.R, spec_minus.R):
        raise DomainError("grid must sit inside B(0, R)")

    xx, yy = np.meshgrid(xs, ys)
    vals = np.zeros(grid.shape)
    for spec, graph_y, sign in ((spec_plus, fp_up, +1.0), (spec_minus, fm_lo, -1.0)):
        vert = sign * (yy - graph_y[None, :])
        member = vert > 0.0
        if not member.any():
            continue
        slope = float(np.max(np.abs(spec.fp(xs)))) if xs.size else 0.0
        near_tol = 0.75 * grid.hy * (1.0 + slope)
        near = member & (vert <= near_tol)
        far = member & ~near
        pts = np.stack([xx[far], yy[far]], axis=1)
        if pts.size:
            vals[far] = sign * regdist_eval_batch(spec, pts, ds=grid.hy / 8.0)
        pj, pi = np.nonzero(near)
        for j, i in zip(pj, pi):
            vals[j, i] = sign * regdist_eval(spec, (xx[j, i], yy[j, i]), epsrel=1e-9)
    return ScalarField2D(grid, vals)


def trace_weights(
    spec_plus: GraphMeasureSpec, spec_minus: GraphMeasureSpec, holder_alpha: float = 1.0
) -> Weights:
    """Weights matching the gradient trace of the built field on its free
    boundaries: q_eff(x) = CAL_C * Theta^{-1/beta} = q(x, f(x)) / pi for
    beta = 1, extended off the graphs by horizontal projection."""

    def eff(spec: GraphMeasureSpec):
        def q_eff(x, y):
            x = np.asarray(x, dtype=float)
            fx = np.asarray(spec.f(x), dtype=float)
            return CAL_C * (2.0 / np.asarray(spec.q(x, fx), dtype=float)) ** (
                -1.0 / spec.beta
            )

        return q_eff

    return Weights(q_plus=eff(spec_plus), q_minus=eff(spec_minus), holder_alpha=holder_alpha)


# ---------------------------------------------------------------------------
# growth estimates
# ---------------------------------------------------------------------------


@dataclass
class GrowthReport:
    C1: float
    sup_grad: float
    sup_hess_times_dist: float
    near_grad_rel_err: float
    samples: int

    def to_dict(self) -> dict:
        return {
            "C1": self.C1,
            "sup_grad": self.sup_grad,
            "sup_hess_times_dist": self.sup_hess_times_dist,
            "near_grad_rel_err": self.near_grad_rel_err,
            "samples": self.samples,
        }


def _grad_fd(spec: GraphMeasureSpec, p: np.ndarray, step: float) -> np.ndarray:
    gx = (
        regdist_eval(spec, (p[0] + step, p[1])) - regdist_eval(spec, (p[0] - step, p[1]))
    ) / (2 * step)
    gy = (
        regdist_eval(spec, (p[0], p[1] + step)) - regdist_eval(spec, (p[0], p[1] - step))
    ) / (2 * step)
    return np.array([gx, gy])


def _hess_norm_fd(spec: GraphMeasureSpec, p: np.ndarray, step: float) -> float:
    def D(dx, dy):
        return regdist_eval(spec, (p[0] + dx, p[1] + dy))

    d0 = D(0, 0)
    hxx = (D(step, 0) - 2 * d0 + D(-step, 0)) / step**2
    hyy = (D(0, step) - 2 * d0 + D(0, -step)) / step**2
    hxy = (D(step, step) - D(step, -step) - D(-step, step) + D(-step, -step)) / (
        4 * step**2
    )
    H = np.array([[hxx, hxy], [hxy, hyy]])
    return float(np.max(np.abs(np.linalg.eigvalsh(H))))


def growth_checks(
    spec: GraphMeasureSpec,
    sample_n: int = 100,
    seed: int = 0,
    s_window: float | None = None,
    delta0: float | None = None,
    n_dyadic: int = 8,
    near_delta: float | None = None,
) -> GrowthReport:
    """Measured distance-comparability, gradient, and Hessian constants.

    Samples points at dyadic normal offsets from the graph on both sides and
    reports the envelope C1 = max(D/dist, dist/D), sup |grad D|, the supremum
    of ||D^2 D|| * dist, and the worst relative error of the near-graph
    gradient magnitude against CAL_C * Theta^{-1/beta}.
    """
    if sample_n < 3:
        raise DomainError("need at least 3 graph samples")
    rng = np.random.default_rng(seed)
    S = spec.core
    if s_window is None:
        s_window = 0.5 * S
    if delta0 is None:
        delta0 = 0.2 * S
    if near_delta is None:
        near_delta = 2e-3 * S

    base = rng.uniform(-s_window, s_window, sample_n)
    fb = np.asarray(spec.f(base), dtype=float)
    fpb = spec.fp(base)
    nrm = np.stack([-fpb, np.ones_like(fpb)], axis=1)
    nrm /= np.linalg.norm(nrm, axis=1, keepdims=True)

    C1 = 0.0
    sup_grad = 0.0
    sup_hess = 0.0
    for k in range(n_dyadic):
        delta = delta0 * 2.0 ** (-k)
        for side in (+1.0, -1.0):
            pts = np.stack([base, fb], axis=1) + side * delta * nrm
            dist = graph_distance(spec, pts)
            for p, dd in zip(pts, dist):
                if dd <= 1e-9:
                    continue
                Dv = regdist_eval(spec, (p[0], p[1]))
                C1 = max(C1, Dv / dd, dd / Dv)
                step = max(1e-7 * S, 0.05 * dd)
                sup_grad = max(sup_grad, float(np.linalg.norm(_grad_fd(spec, p, step))))
                hstep = max(1e-5 * S, 0.1 * dd)
                sup_hess = max(sup_hess, _hess_norm_fd(spec, p, hstep) * dd)

    worst_rel = 0.0
    for s0, f0, nv in zip(base, fb, nrm):
        p = np.array([s0, f0]) + near_delta * nv
        g = np.linalg.norm(_grad_fd(spec, p, 0.2 * near_delta))
        qv = float(np.asarray(spec.q(np.array([s0]), np.array([f0])))[0])
        predicted = CAL_C * (2.0 / qv) ** (-1.0 / spec.beta)
        worst_rel = max(worst_rel, abs(g / predicted - 1.0))

    return GrowthReport(
        C1=C1,
        sup_grad=sup_grad,
        sup_hess_times_dist=sup_hess,
        near_grad_rel_err=worst_rel,
        samples=sample_n,
    )


# ---------------------------------------------------------------------------
# sliding barriers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BarrierParams:
    """Offset t and the weight extrema over the ball defining the two-plane
    barriers  M+ (y-t)^+ - m- (y-t)^-  and  m+ (y+t)^+ - M- (y+t)^-."""

    t: float
    M_plus: float
    m_minus: float
    m_plus: float
    M_minus: float

    def __post_init__(self) -> None:
        if self.m_plus > self.M_plus or self.m_minus > self.M_minus:
            raise DomainError("need m_pm <= M_pm")


def _barrier_values(yy: np.ndarray, params: BarrierParams, direction: str) -> np.ndarray:
    if direction == "sub":
        z = yy - params.t
        return params.M_plus * np.maximum(z, 0.0) - params.m_minus * np.maximum(-z, 0.0)
    if direction == "super":
        z = yy + params.t
        return params.m_plus * np.maximum(z, 0.0) - params.M_minus * np.maximum(-z, 0.0)
    raise DomainError("direction must be 'sub' or 'super'")


def barrier_compare(
    field: ScalarField2D,
    center: tuple[float, float],
    radius: float,
    params: BarrierParams,
    direction: str = "sub",
) -> tuple[bool, float]:
    """Check the barrier ordering at all nodes in the ball.

    sub: barrier <= field, super: barrier >= field.  Returns (ok, worst
    margin) where the margin is the minimum of the correctly-signed gap.
    """
    g = field.grid
    cx, cy = center
    r = g.rect
    if (
        cx - radius < r.x_lo - 1e-12
        or cx + radius > r.x_hi + 1e-12
        or cy - radius < r.y_lo - 1e-12
        or cy + radius > r.y_hi + 1e-12
    ):
        raise DomainError("ball not inside the field domain")
    xx, yy = np.meshgrid(g.xs(), g.ys())
    inside = (xx - cx) ** 2 + (yy - cy) ** 2 <= radius * radius
    w = _barrier_values(yy, params, direction)
    if direction == "sub":
        gap = field.values - w
    else:
        gap = w - field.values
    worst = float(np.min(gap[inside]))
    return worst >= 0.0, worst


def barrier_slide(
    field: ScalarField2D,
    center: tuple[float, float],
    radius: float,
    params: BarrierParams,
    direction: str = "sub",
    t_hi: float = 1.0,
    t_lo: float = 0.0,
    n_t: int = 200,
) -> float | None:
    """Sweep the barrier offset downward from t_hi; return the first t at
    which the ordering fails (None if it never does).  Discrete analogue of
    the sliding argument that traps the free boundary between two planes."""
    from dataclasses import replace

    for t in np.linspace(t_hi, t_lo, n_t):
        ok, _ = barrier_compare(field, center, radius, replace(params, t=float(t)), direction)
        if not ok:
            return float(t)
    return None


# ---------------------------------------------------------------------------
# almost-minimization certificate
# ---------------------------------------------------------------------------


@dataclass
class CertificateReport:
    radii: list[float]
    excesses: list[float]
    slope: float
    fitted_C: float
    threshold: float
    noise_floor: float
    slope_ok: bool

    def to_dict(self) -> dict:
        return {
            "radii": self.radii,
            "excesses": self.excesses,
            "slope": self.slope,
            "fitted_C": self.fitted_C,
            "threshold": self.threshold,
            "noise_floor": self.noise_floor,
            "slope_ok": self.slope_ok,
        }


def almost_min_certificate(
    field: ScalarField2D,
    weights: Weights,
    holder_alpha: float = 0.5,
    n_balls: int = 48,
    seed: int = 0,
    r0: float = 0.25,
    noise_floor: float = 1e-9,
    graphs: tuple[Callable, Callable] | None = None,
) -> CertificateReport:
    """Per-ball excess of the field against the competitor family (harmonic
    replacement with sign freedom, zero fill, two-plane profiles), fitted as
    log excess vs log radius across dyadic radii in [8h, r0].

    The competitor minimum is approximate, so the excess overestimates the
    true one and the certificate is an upper-bound test.  The fitted slope is
    compared against n + alpha/(4n + 2 alpha) - 0.3 with n = 2.
    """
    grid = field.grid
    h = max(grid.hx, grid.hy)
    radii_levels = []
    r = r0
    while r >= 8.0 * h - 1e-12:
        radii_levels.append(r)
        r *= 0.5
    if not radii_levels:
        raise DomainError("r0 below the 8h resolution floor")
    rng = np.random.default_rng(seed)
    per_level = max(1, int(np.ceil(n_balls / len(radii_levels))))

    rads: list[float] = []
    excs: list[float] = []
    values = field.values
    for r in radii_levels:
        for k in range(per_level):
            margin_x = r + 2 * grid.hx
            margin_y = r + 2 * grid.hy
            cx = rng.uniform(grid.rect.x_lo + margin_x, grid.rect.x_hi - margin_x)
            if graphs is not None and k % 2 == 0:
                fpl, fmi = graphs
                gy = 0.5 * (float(fpl(np.array([cx]))[0]) + float(fmi(np.array([cx]))[0]))
                cy = gy + rng.uniform(-0.5 * r, 0.5 * r)
                cy = float(np.clip(cy, grid.rect.y_lo + margin_y, grid.rect.y_hi - margin_y))
            else:
                cy = rng.uniform(grid.rect.y_lo + margin_y, grid.rect.y_hi - margin_y)
            sub = _bounding_rect(grid, (cx, cy), r)
            base = local_energy(grid, values, weights, sub)
            qp = float(np.asarray(weights.q_plus(np.array([cx]), np.array([cy])))[0])
            qm = float(np.asarray(weights.q_minus(np.array([cx]), np.array([cy])))[0])
            plane_ts = [0.0]
            if graphs is not None:
                plane_ts += [
                    float(graphs[0](np.array([cx]))[0]),
                    float(graphs[1](np.array([cx]))[0]),
                ]
            comps = ball_competitors(
                grid,
                values,
                (cx, cy),
                r,
                rng,
                planes=[(qp, qm, t) for t in plane_ts],
            )
            best = min(local_energy(grid, w, weights, sub) for _, w in comps)
            rads.append(r)
            excs.append(max(base - best, 0.0))

    rr = np.array(rads)
    ee = np.array(excs)
    keep = ee > noise_floor
    if np.count_nonzero(keep) >= 4 and len(set(rr[keep])) >= 2:
        A = np.stack([np.log(rr[keep]), np.ones(keep.sum())], axis=1)
        coef, *_ = np.linalg.lstsq(A, np.log(ee[keep]), rcond=None)
        slope, logC = float(coef[0]), float(coef[1])
    else:
        slope, logC = np.inf, -np.inf  # everything at noise level
    threshold = 2.0 + holder_alpha / (8.0 + 2.0 * holder_alpha) - 0.3
    return CertificateReport(
        radii=rads,
        excesses=excs,
        slope=slope,
        fitted_C=float(np.exp(logC)) if np.isfinite(logC) else 0.0,
        threshold=threshold,
        noise_floor=noise_floor,
        slope_ok=bool(slope >= threshold),
    )


# ---------------------------------------------------------------------------
# named graph builders (CLI and test instances)
# ---------------------------------------------------------------------------


def _bump(t):
    """C-infinity bump, 1 at 0, support |t| < 1."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inner = np.abs(t) < 1.0
    ti = t[inner]
    out[inner] = np.exp(1.0 - 1.0 / (1.0 - ti * ti))
    return out


def graph_flat(offset: float = 0.0) -> Callable:
    def f(s):
        return np.full_like(np.asarray(s, dtype=float), offset)

    return f


def graph_bump(amplitude: float, width: float, center: float = 0.0) -> Callable:
    def f(s):
        return amplitude * _bump((np.asarray(s, dtype=float) - center) / width)

    return f


def graph_cubic_cusp(amplitude: float, cap: float = 1.0) -> Callable:
    """Zero for x <= 0, grows like amplitude * x^3, saturates near amplitude*cap^3."""

    def f(s):
        t = np.maximum(np.asarray(s, dtype=float), 0.0) / cap
        return amplitude * cap**3 * np.tanh(t**3)

    return f


def graph_point_pinch(points, amplitude: float, width: float) -> Callable:
    """Positive profile vanishing exactly at the given points (quadratic
    contact via tanh^2 factors)."""
    pts = [float(p) for p in points]

    def f(s):
        s = np.asarray(s, dtype=float)
        out = np.full_like(s, amplitude)
        for p in pts:
            out = out * np.tanh((s - p) / width) ** 2
        return out

    return f


def graph_interval_pinch(intervals, amplitude: float, width: float) -> Callable:
    """Positive profile vanishing exactly on a union of closed intervals.

    Cubic contact (tanh of the cubed one-interval distance) keeps the profile
    C^2 across the contact points; quadratic contact there is impossible for
    a C^2 function vanishing on a whole interval.
    """
    iv = [(float(a), float(b)) for a, b in intervals]

    def f(s):
        s = np.asarray(s, dtype=float)
        out = np.full_like(s, amplitude)
        for a, b in iv:
            dist = np.maximum(np.maximum(a - s, s - b), 0.0) / width
            out = out * np.tanh(dist**3)
        return out

    return f


def cantor_intervals(level: int, lo: float = -0.5, hi: float = 0.5) -> list[tuple[float, float]]:
    """Level-k middle-thirds construction starting from [lo, hi]."""
    iv = [(lo, hi)]
    for _ in range(level):
        nxt = []
        for a, b in iv:
            third = (b - a) / 3.0
            nxt.append((a, a + third))
            nxt.append((b - third, b))
        iv = nxt
    return iv


def graph_from_spec(spec: dict) -> Callable:
    """Named graph builders for the CLI: flat, bump, cubic-cusp, points-list,
    cantor-k.  An optional 'scale' multiplies the profile (use -1 for the
    mirror graph)."""
    kind = spec.get("kind", "flat")
    scale = float(spec.get("scale", 1.0))
    if kind == "flat":
        base = graph_flat(float(spec.get("offset", 0.0)))
    elif kind == "bump":
        base = graph_bump(float(spec["amplitude"]), float(spec["width"]), float(spec.get("center", 0.0)))
    elif kind == "cubic-cusp":
        base = graph_cubic_cusp(float(spec["amplitude"]), float(spec.get("cap", 1.0)))
    elif kind == "points-list":
        base = graph_point_pinch(
            spec["points"], float(spec.get("amplitude", 0.3)), float(spec.get("width", 0.3))
        )
    elif kind == "cantor-k":
        iv = cantor_intervals(int(spec.get("level", 2)))
        base = graph_interval_pinch(
            iv, float(spec.get("amplitude", 1.0)), float(spec.get("width", 0.2))
        )
    else:
        raise DomainError(f"unknown graph kind {kind!r}")
    if scale == 1.0:
        return base
    return lambda s: scale * base(s)
