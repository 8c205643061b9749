"""The N-point Coulomb-type quotient and a multi-start BFGS minimizer.

For points ``x_1, ..., x_N`` in R^3 away from the origin,

    F(x) = sum_{j != k} (|x_j|^s + |x_k|^s) / |x_j - x_k|
           / (2 (N-1) sum_k |x_k|^(s-1)),

and ``alpha(N, s)`` is its infimum. ``F`` is invariant under scaling and
rotation, so the minimizer pins the gauge ``max_k |x_k| = radius_gauge``
after every accepted step.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numba import njit

EPS_GEOM = 1e-12
DISAGREEMENT_TOL = 1e-3


class DegenerateConfigurationError(ValueError):
    """Two points coincide or a point sits at the origin."""


class NoConvergenceError(RuntimeError):
    """No start reached the gradient tolerance; ``result`` holds the best one found."""

    def __init__(self, message: str, result: "AlphaResult"):
        super().__init__(message)
        self.result = result


@dataclass(frozen=True)
class ParticleConfiguration:
    """N >= 2 distinct, finite points in R^3, none at the origin."""

    points: np.ndarray
    eps_geom: float = EPS_GEOM

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 3 or pts.shape[0] < 2:
            raise ValueError(f"expected an (N, 3) array with N >= 2, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("coordinates must be finite")
        norms = np.linalg.norm(pts, axis=1)
        if norms.min() <= self.eps_geom:
            raise DegenerateConfigurationError(f"point at distance {norms.min():.3e} from the origin")
        dmin = _min_pair_distance(pts)
        if dmin <= self.eps_geom:
            raise DegenerateConfigurationError(f"pair distance {dmin:.3e} below floor")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n_particles(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class AlphaResult:
    """Best-found value of the quotient with its minimizer and diagnostics.

    ``value`` is an upper estimate of ``alpha(N, s)``, not a certified
    minimum. ``n_near_best`` counts converged starts within
    ``DISAGREEMENT_TOL`` of ``value``; ``restarts_disagree`` is set when the
    best value was reached by a single start only.
    """

    n_particles: int
    s: float
    value: float
    minimizer: ParticleConfiguration
    n_starts: int
    n_converged: int
    best_gradient_norm: float
    seed: int
    converged: bool = True
    n_near_best: int = 0
    restarts_disagree: bool = False
    start_values: np.ndarray = field(default=None, repr=False)


def _as_points(config) -> np.ndarray:
    if isinstance(config, ParticleConfiguration):
        return config.points
    return ParticleConfiguration(np.asarray(config, dtype=float)).points


def _min_pair_distance(pts: np.ndarray) -> float:
    diff = pts[:, None, :] - pts[None, :, :]
    d = np.linalg.norm(diff, axis=2)
    np.fill_diagonal(d, np.inf)
    return float(d.min())


def _objective_parts(pts: np.ndarray, s: float):
    norms = np.linalg.norm(pts, axis=1)
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.linalg.norm(diff, axis=2)
    np.fill_diagonal(dist, 1.0)
    ns = norms**s
    weight = (ns[:, None] + ns[None, :]) / dist
    np.fill_diagonal(weight, 0.0)
    return norms, diff, dist, weight


def alpha_objective(config, s: float) -> float:
    """Evaluate the quotient ``F`` at a configuration."""
    if s < 1:
        raise ValueError(f"s must be >= 1, got {s}")
    pts = _as_points(config)
    n = pts.shape[0]
    norms, _, _, weight = _objective_parts(pts, s)
    return float(weight.sum() / (2 * (n - 1) * np.sum(norms ** (s - 1))))


def alpha_gradient(config, s: float) -> np.ndarray:
    """Gradient of ``F`` with respect to every point, shape ``(N, 3)``."""
    if s < 1:
        raise ValueError(f"s must be >= 1, got {s}")
    pts = _as_points(config)
    n = pts.shape[0]
    norms, diff, dist, weight = _objective_parts(pts, s)
    inv = 1.0 / dist
    np.fill_diagonal(inv, 0.0)
    num = weight.sum()
    den = np.sum(norms ** (s - 1))
    grad_num = 2 * (s * norms ** (s - 2) * inv.sum(axis=1))[:, None] * pts
    grad_num -= 2 * np.einsum("jk,jkd->jd", weight * inv**2, diff)
    grad_den = ((s - 1) * norms ** (s - 3))[:, None] * pts
    return (grad_num * den - num * grad_den) / (2 * (n - 1) * den * den)


@njit(cache=True, nogil=True)
def _fg(x, s, g):
    """Objective and gradient (written into ``g``) for the compiled optimizer."""
    n = x.shape[0]
    norms = np.empty(n)
    for j in range(n):
        norms[j] = math.sqrt(x[j, 0] ** 2 + x[j, 1] ** 2 + x[j, 2] ** 2)
    ns = norms**s
    num = 0.0
    den = 0.0
    for j in range(n):
        den += norms[j] ** (s - 1)
        for d in range(3):
            g[j, d] = 0.0
    inv_sum = np.zeros(n)
    for j in range(n):
        for k in range(j + 1, n):
            d0 = x[j, 0] - x[k, 0]
            d1 = x[j, 1] - x[k, 1]
            d2 = x[j, 2] - x[k, 2]
            dist = math.sqrt(d0 * d0 + d1 * d1 + d2 * d2)
            w = (ns[j] + ns[k]) / dist
            num += 2.0 * w
            inv_sum[j] += 1.0 / dist
            inv_sum[k] += 1.0 / dist
            c = 2.0 * w / (dist * dist)
            g[j, 0] -= c * d0
            g[j, 1] -= c * d1
            g[j, 2] -= c * d2
            g[k, 0] += c * d0
            g[k, 1] += c * d1
            g[k, 2] += c * d2
    scale = 2.0 * (n - 1)
    f = num / (scale * den)
    for j in range(n):
        a = 2.0 * s * norms[j] ** (s - 2) * inv_sum[j]
        b = (s - 1) * norms[j] ** (s - 3)
        for d in range(3):
            gu = g[j, d] + a * x[j, d]
            g[j, d] = (gu * den - num * b * x[j, d]) / (scale * den * den)
    return f


@njit(cache=True, nogil=True)
def _feasible(x, eps):
    n = x.shape[0]
    for j in range(n):
        if math.sqrt(x[j, 0] ** 2 + x[j, 1] ** 2 + x[j, 2] ** 2) <= eps:
            return False
        for k in range(j + 1, n):
            d = math.sqrt((x[j, 0] - x[k, 0]) ** 2 + (x[j, 1] - x[k, 1]) ** 2 + (x[j, 2] - x[k, 2]) ** 2)
            if d <= eps:
                return False
    return True


@njit(cache=True, nogil=True)
def _max_norm(x):
    m = 0.0
    for j in range(x.shape[0]):
        r = math.sqrt(x[j, 0] ** 2 + x[j, 1] ** 2 + x[j, 2] ** 2)
        if r > m:
            m = r
    return m


@njit(cache=True, nogil=True)
def _bfgs(x0, s, tol_grad, max_iter, gauge, eps):
    """Gauge-fixed BFGS with Armijo backtracking.

    Returns ``(f, x, grad_norm, converged, iterations)``.
    """
    n = x0.shape[0]
    dim = 3 * n
    x = x0 * (gauge / _max_norm(x0))
    g = np.empty_like(x)
    f = _fg(x, s, g)
    h = np.eye(dim) * 0.01
    fresh = True
    xn = np.empty_like(x)
    gn = np.empty_like(x)
    for it in range(max_iter):
        gflat = g.ravel()
        gnorm = math.sqrt(np.dot(gflat, gflat))
        if gnorm <= tol_grad:
            return f, x, gnorm, True, it
        p = -(h @ gflat)
        slope = np.dot(p, gflat)
        if slope >= 0.0:
            h = np.eye(dim) * 0.01
            fresh = True
            p = -0.01 * gflat
            slope = np.dot(p, gflat)
        pm = p.reshape((n, 3))
        t = 1.0
        accepted = False
        fnew = f
        while t > 1e-20:
            for j in range(n):
                for d in range(3):
                    xn[j, d] = x[j, d] + t * pm[j, d]
            # feasibility is judged in the rescaled gauge the step will land in
            if _feasible(xn, eps * max(_max_norm(xn) / gauge, 1.0)):
                fnew = _fg(xn, s, gn)
                if fnew <= f + 1e-4 * t * slope:
                    accepted = True
                    break
            t *= 0.5
        if not accepted:
            if fresh:
                return f, x, gnorm, False, it
            h = np.eye(dim) * 0.01
            fresh = True
            continue
        sv = (xn - x).ravel()
        yv = (gn - g).ravel()
        sy = np.dot(sv, yv)
        if sy > 1e-300:
            if fresh:
                h = np.eye(dim) * (sy / np.dot(yv, yv))
                fresh = False
            rho = 1.0 / sy
            hy = h @ yv
            coef = (sy + np.dot(yv, hy)) * rho * rho
            h += coef * np.outer(sv, sv) - rho * (np.outer(hy, sv) + np.outer(sv, hy))
        c = _max_norm(xn) / gauge
        x = xn / c
        g = gn * c
        h /= c * c
        f = fnew
    gflat = g.ravel()
    gnorm = math.sqrt(np.dot(gflat, gflat))
    return f, x, gnorm, gnorm <= tol_grad, max_iter


def default_n_starts(n_particles: int) -> int:
    return 64 if n_particles <= 10 else 256


def sample_annulus(rng: np.random.Generator, n_particles: int, r_min: float = 0.3, r_max: float = 1.0) -> np.ndarray:
    """Points uniformly distributed in the shell ``r_min <= |x| <= r_max``."""
    v = rng.normal(size=(n_particles, 3))
    v /= np.linalg.norm(v, axis=1)[:, None]
    r = rng.uniform(r_min**3, r_max**3, size=n_particles) ** (1.0 / 3.0)
    return v * r[:, None]


def _start_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def minimize_alpha(
    n_particles: int,
    s: float,
    n_starts: int | None = None,
    seed: int = 0,
    tol_grad: float = 1e-8,
    max_iter: int = 2000,
    radius_gauge: float = 1.0,
    eps_geom: float = EPS_GEOM,
    workers: int = 1,
) -> AlphaResult:
    """Multi-start BFGS estimate of ``alpha(N, s)``.

    Start ``i`` draws its initial configuration from a generator keyed on
    ``(seed, i)``, so the result does not depend on ``workers`` or on the
    order in which starts finish.

    Raises
    ------
    NoConvergenceError
        If no start reaches ``tol_grad``; the best start is attached.
    """
    if n_particles < 2:
        raise ValueError("need at least two particles")
    if s < 1:
        raise ValueError(f"s must be >= 1, got {s}")
    if n_starts is None:
        n_starts = default_n_starts(n_particles)
    if n_starts < 1 or max_iter < 1 or tol_grad <= 0:
        raise ValueError("n_starts, max_iter and tol_grad must be positive")

    def run(i):
        x0 = sample_annulus(_start_rng(seed, i), n_particles)
        return _bfgs(x0, float(s), float(tol_grad), int(max_iter), float(radius_gauge), float(eps_geom))

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            runs = list(pool.map(run, range(n_starts)))
    else:
        runs = [run(i) for i in range(n_starts)]

    values = np.array([r[0] for r in runs])
    gnorms = np.array([r[2] for r in runs])
    converged = np.array([r[3] for r in runs])
    pool_idx = np.flatnonzero(converged) if converged.any() else np.arange(n_starts)
    best = min(pool_idx, key=lambda i: (values[i], gnorms[i], i))
    near = int(np.sum(np.abs(values[pool_idx] - values[best]) <= DISAGREEMENT_TOL))
    result = AlphaResult(
        n_particles=n_particles,
        s=float(s),
        value=float(values[best]),
        minimizer=ParticleConfiguration(runs[best][1], eps_geom=eps_geom),
        n_starts=n_starts,
        n_converged=int(converged.sum()),
        best_gradient_norm=float(gnorms[best]),
        seed=seed,
        converged=bool(converged[best]),
        n_near_best=near,
        restarts_disagree=near < 2 and n_starts > 1,
        start_values=values,
    )
    if not converged.any():
        raise NoConvergenceError(
            f"none of {n_starts} starts reached tol_grad={tol_grad} for N={n_particles}, s={s}", result
        )
    return result
