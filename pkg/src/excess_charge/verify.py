"""Grid certification of the scalar inequalities the bounds rely on.

Each check evaluates ``slack = rhs - lhs`` (nonnegative when the inequality
holds) on a deterministic lattice plus seeded random interior points and
reports the worst point. Violations no larger than ``ROUNDING_SLACK`` are
attributed to floating-point rounding and reported as passing with slack.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .multipole import f_remainder, g_convexity, positivity_pair_sum

ROUNDING_SLACK = 1e-12
DEFAULT_RES = 200
DEFAULT_RANDOM = 10_000


@dataclass(frozen=True)
class InequalityReport:
    name: str
    grid: str
    n_points: int
    max_slack_violation: float
    witness: dict | None

    @property
    def passed(self) -> bool:
        return self.max_slack_violation <= ROUNDING_SLACK

    @property
    def status(self) -> str:
        if not self.passed:
            return "fail"
        return "pass with slack" if self.max_slack_violation > 0 else "pass"

    def to_dict(self) -> dict:
        out = asdict(self)
        out["passed"] = self.passed
        out["status"] = self.status
        return out


def _lattice(axes: dict, res: int, n_random: int, seed: int) -> dict:
    """Tensor lattice over ``axes`` (name -> (lo, hi, open_lo)) plus uniform random points."""
    grids = []
    for lo, hi, open_lo in axes.values():
        g = np.linspace(lo, hi, res + 1 if open_lo else res)
        grids.append(g[1:] if open_lo else g)
    mesh = [m.ravel() for m in np.meshgrid(*grids, indexing="ij")]
    rng = np.random.default_rng(seed)
    out = {}
    for (name, (lo, hi, _)), m in zip(axes.items(), mesh):
        extra = rng.uniform(lo, hi, n_random)
        if lo == 0.0:
            extra = np.where(extra == 0.0, hi * 1e-9, extra)
        out[name] = np.concatenate([m, extra])
    return out


def _report(name: str, grid: str, pts: dict, *slacks: np.ndarray) -> InequalityReport:
    worst = -np.inf
    witness = None
    for slack in slacks:
        i = int(np.argmin(slack))
        if -slack[i] > worst:
            worst = float(-slack[i])
            witness = {k: float(v[i]) for k, v in pts.items()}
    n = len(next(iter(pts.values())))
    return InequalityReport(name, grid, n, worst, witness if worst > ROUNDING_SLACK else None)


def _odd_power_difference(r, m):
    """``((1+r)^m - (1-r)^m) / m``."""
    return ((1.0 + r) ** m - (1.0 - r) ** m) / m


def check_power_chain(
    res: int = DEFAULT_RES, n_random: int = DEFAULT_RANDOM, seed: int = 0, p_range: tuple = (1.0, 4.0)
) -> InequalityReport:
    """``h_{p+1}(r) >= h_p(r) >= (1 - (p-1) r^2 / 3) h_{p+1}(r)`` with ``h_m = ((1+r)^m - (1-r)^m) / m``.

    Checked on ``r`` in (0, 1] and ``p`` in ``p_range``. The right-hand
    inequality fails for ``1 < p < 3/2``: at ``r = 1`` it reduces to
    ``(2p - 3)(p - 1) >= 0``.
    """
    plo, phi = p_range
    pts = _lattice({"r": (0.0, 1.0, True), "p": (plo, phi, False)}, res, n_random, seed)
    r, p = pts["r"], pts["p"]
    upper = _odd_power_difference(r, p + 1.0)
    mid = _odd_power_difference(r, p)
    lower = (1.0 - (p - 1.0) * r**2 / 3.0) * upper
    return _report("power-chain", f"r in (0,1] x p in [{plo:g},{phi:g}], {res}x{res} + {n_random} random", pts, upper - mid, mid - lower)


def prefactor_ratio(r, s):
    """``(s+2)/(s+1) ((1+r)^(s+1) - (1-r)^(s+1)) / ((1+r)^(s+2) - (1-r)^(s+2))``."""
    return _odd_power_difference(r, s + 1.0) / _odd_power_difference(r, s + 2.0)


def check_prefactor_bound(
    res: int = DEFAULT_RES, n_random: int = DEFAULT_RANDOM, seed: int = 1, s_range: tuple = (0.0, 4.0)
) -> InequalityReport:
    """``prefactor_ratio(r, s) >= 1 - (s/3) r^2`` on ``r`` in (0, 1), ``s`` in ``s_range``.

    This is the power chain's right-hand inequality at ``p = s + 1``, so it
    fails near ``r = 1`` for ``0 < s < 1/2``.
    """
    slo, shi = s_range
    pts = _lattice({"r": (0.0, 1.0, True), "s": (slo, shi, False)}, res, n_random, seed)
    keep = pts["r"] < 1.0
    pts = {k: v[keep] for k, v in pts.items()}
    r, s = pts["r"], pts["s"]
    slack = prefactor_ratio(r, s) - (1.0 - s / 3.0 * r**2)
    return _report("prefactor", f"r in (0,1) x s in [{slo:g},{shi:g}], {res}x{res} + {n_random} random", pts, slack)


# coefficients of the degree-8 remainder, lowest degree first
TAYLOR_REMAINDER = np.array([0, 0, 0, 0, -82 / 625, -2 / 35, 139 / 625, 19 / 175, 3192 / 3125])


def taylor_remainder_polynomial() -> np.ndarray:
    """Re-derive the remainder of ``(1 - 2r^2 + 19/5 r^4) r^2 f(r, 3)`` beyond ``r^2/5 + r^3/35``."""
    P = np.polynomial.polynomial
    f3 = np.array([1 / 5, 1 / 35, 168 / 625])
    product = P.polymul(P.polymul([1.0, 0.0, -2.0, 0.0, 19 / 5], [0.0, 0.0, 1.0]), f3)
    return P.polysub(product, [0.0, 0.0, 1 / 5, 1 / 35])


def check_taylor_s3(n_grid: int = 40_000, n_random: int = DEFAULT_RANDOM, seed: int = 2, r_max: float = 0.53) -> InequalityReport:
    """Three checks on ``r`` in (0, r_max]:

    ``5 / (r^2 (r^2 + 10) + 5) <= 1 - 2r^2 + 19/5 r^4``; the remainder
    polynomial is nonpositive; and ``1 + 5 r^2 f(r, 3) / (r^2 (r^2+10) + 5)``
    stays below ``1 + r^2/5 + r^3/35``. The remainder must also match its
    re-derivation coefficient by coefficient.
    """
    rng = np.random.default_rng(seed)
    r = np.concatenate([np.linspace(0.0, r_max, n_grid + 1)[1:], rng.uniform(0.0, r_max, n_random)])
    pts = {"r": r}
    rational = 5.0 / (r**2 * (r**2 + 10.0) + 5.0)
    quartic = 1.0 - 2.0 * r**2 + 3.8 * r**4
    remainder = np.polynomial.polynomial.polyval(r, TAYLOR_REMAINDER)
    full = 1.0 + rational * r**2 * f_remainder(r, 3.0)
    cubic = 1.0 + r**2 / 5.0 + r**3 / 35.0
    derived = taylor_remainder_polynomial()
    coeff_gap = float(np.max(np.abs(derived - TAYLOR_REMAINDER)))
    report = _report("taylor", f"r in (0,{r_max}], {n_grid} + {n_random} random", pts, quartic - rational, -remainder, cubic - full)
    if coeff_gap > ROUNDING_SLACK:
        return InequalityReport(report.name, report.grid, report.n_points, max(report.max_slack_violation, coeff_gap), {"coefficient_gap": coeff_gap})
    return report


def check_g_f_positivity(res: int = DEFAULT_RES, n_random: int = DEFAULT_RANDOM, seed: int = 3) -> InequalityReport:
    """``g(r) >= 0`` and ``f(r, s) <= f(r, 3) < 1/2`` on ``r`` in (0, 1], ``s`` in [2, 3]."""
    pts = _lattice({"r": (0.0, 1.0, True), "s": (2.0, 3.0, False)}, res, n_random, seed)
    r, s = pts["r"], pts["s"]
    f3 = f_remainder(r, 3.0)
    return _report(
        "g-f",
        f"r in (0,1] x s in [2,3], {res}x{res} + {n_random} random",
        pts,
        g_convexity(r, s),
        f3 - f_remainder(r, s),
        0.5 - f3,
    )


def _ball_points(rng, n: int, radius: float) -> np.ndarray:
    v = rng.normal(size=(n, 3))
    v /= np.linalg.norm(v, axis=1)[:, None]
    return v * radius * rng.uniform(1e-3, 1.0, (n, 1)) ** (1.0 / 3.0)


def check_positivity_lemma(samples: int = 40_000, seed: int = 4) -> InequalityReport:
    """Two-point symmetrized sums for ``gamma`` and its 3x variant are nonnegative.

    Each sum must also dominate the difference-product lower bound, which
    must itself be nonnegative. Points are drawn in the ball of radius 2,
    ``r`` in (0, 1] and ``s`` in [2, 3].
    """
    if samples < 10_000:
        raise ValueError("need at least 10^4 samples")
    rng = np.random.default_rng(seed)
    x1 = _ball_points(rng, samples, 2.0)
    x2 = _ball_points(rng, samples, 2.0)
    r = rng.uniform(0.0, 1.0, samples)
    r = np.where(r == 0.0, 1e-9, r)
    s = rng.uniform(2.0, 3.0, samples)
    pts = {"r": r, "s": s, **{f"x1_{i}": x1[:, i] for i in range(3)}, **{f"x2_{i}": x2[:, i] for i in range(3)}}
    slacks = []
    for tilde in (False, True):
        total, lower = positivity_pair_sum(x1, x2, r, s, tilde=tilde)
        scale = np.maximum(1.0, np.abs(total))
        slacks += [total / scale, (total - lower) / scale, lower / scale]
    return _report("positivity", f"{samples} random pairs in the ball of radius 2", pts, *slacks)


SUITES = {
    "power-chain": check_power_chain,
    "prefactor": check_prefactor_bound,
    "taylor": check_taylor_s3,
    "gf": check_g_f_positivity,
    "positivity": check_positivity_lemma,
}


def run_suite(name: str = "all") -> list[InequalityReport]:
    if name == "all":
        return [check() for check in SUITES.values()]
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from all, {', '.join(SUITES)}")
    return [SUITES[name]()]
