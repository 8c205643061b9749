"""Command-line entry point: one subcommand per module operation.

Exit codes: 0 success, 1 computation error, 2 usage error, 3 failed
inequality check. JSON is the default output; the figure commands default
to CSV.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import constants, excess, multipole, radial, variational, verify
from .reference import load_reference

EXIT_OK = 0
EXIT_COMPUTE = 1
EXIT_USAGE = 2
EXIT_VERIFY = 3

FIGURE1_S = (1.0, 1.25, 1.5, 2.0, 2.5, 3.0)


class UsageError(ValueError):
    """Malformed invocation or configuration."""


@dataclass(frozen=True)
class RunConfig:
    """Optimizer budgets and output settings shared by all subcommands.

    ``n_starts = None`` selects the per-N default of ``minimize_alpha``.
    """

    seed: int = 0
    n_starts: int | None = None
    max_iter: int = 2000
    tol_grad: float = 1e-8
    workers: int = 1
    beta_grid: int = 64
    verify_res: int = verify.DEFAULT_RES
    verify_random: int = verify.DEFAULT_RANDOM
    format: str | None = None
    out: str | None = None

    def __post_init__(self):
        if (self.n_starts is not None and self.n_starts < 1) or self.max_iter < 1 or self.tol_grad <= 0 or self.workers < 1:
            raise UsageError("optimizer budgets must be positive")
        if self.beta_grid < 1 or self.verify_res < 1 or self.verify_random < 0:
            raise UsageError("grid resolutions must be positive")
        if self.format not in (None, "json", "csv"):
            raise UsageError(f"format must be json or csv, got {self.format!r}")

    @classmethod
    def from_file(cls, path: str) -> "RunConfig":
        """Parse a flat ``key = value`` file; ``#`` starts a comment."""
        casts = {"seed": int, "n_starts": int, "max_iter": int, "workers": int, "beta_grid": int,
                 "verify_res": int, "verify_random": int, "tol_grad": float, "format": str, "out": str}
        values = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                key, sep, val = line.partition("=")
                key, val = key.strip(), val.strip()
                if not sep or key not in casts:
                    raise UsageError(f"{path}:{lineno}: expected one of {', '.join(casts)} as key=value")
                try:
                    values[key] = casts[key](val)
                except ValueError as exc:
                    raise UsageError(f"{path}:{lineno}: bad value for {key}: {val!r}") from exc
        return cls(**values)

    def with_overrides(self, **kw) -> "RunConfig":
        return dataclasses.replace(self, **{k: v for k, v in kw.items() if v is not None})


def _jsonable(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: _jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj


def _csv_cell(v):
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return f"{v:.6f}"
    return str(v)


def render(rows: list[dict], fmt: str) -> str:
    """Serialize a list of flat records; a single record is emitted as a JSON object."""
    if fmt == "json":
        payload = rows[0] if len(rows) == 1 else rows
        return json.dumps(_jsonable(payload), indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = list(rows[0])
    writer.writerow(header)
    for row in rows:
        if isinstance(row, dict) and any(isinstance(v, (dict, list, tuple, np.ndarray)) for v in row.values()):
            raise UsageError("this result is nested; use --format json")
        writer.writerow([_csv_cell(row[k]) for k in header])
    return buf.getvalue()


# subcommand handlers return (records, exit_code, default_format)


def cmd_alpha(args, cfg):
    try:
        res = variational.minimize_alpha(
            args.n, args.s, n_starts=args.starts or cfg.n_starts, seed=cfg.seed,
            tol_grad=cfg.tol_grad, max_iter=cfg.max_iter, workers=cfg.workers,
        )
    except variational.NoConvergenceError as exc:
        res = exc.result
    rec = {
        "n": res.n_particles, "s": res.s, "value": res.value, "grad_norm": res.best_gradient_norm,
        "starts_converged": res.n_converged, "n_starts": res.n_starts, "converged": res.converged,
        "restarts_disagree": res.restarts_disagree, "seed": res.seed,
    }
    if args.points:
        rec["minimizer"] = res.minimizer.points
    return [rec], EXIT_OK, "json"


def cmd_bvalue(args, cfg):
    return [dataclasses.asdict(radial.b_of_s(args.s))], EXIT_OK, "json"


def cmd_beta_num(args, cfg):
    res = radial.beta_upper_bound(args.s, radial.BetaSearch(grid=cfg.beta_grid))
    return [dataclasses.asdict(res)], EXIT_OK, "json"


def cmd_moments(args, cfg):
    ms = multipole.moment_series(args.s, args.r, args.lmax)
    if (cfg.format or "json") == "csv":
        return [{"l": l, "lambda": float(v)} for l, v in enumerate(ms.moments)], EXIT_OK, "json"
    rec = {"s": ms.s, "r": ms.r, "moments": ms.moments, "tail_bound": ms.tail_bound, "c_s_direct": ms.c_s_direct()}
    if args.s <= 3.0:
        rec["c_s_bound"] = ms.r**2 * multipole.f_remainder(ms.r, ms.s)
    return [rec], EXIT_OK, "json"


def cmd_tails(args, cfg):
    t = multipole.tail_sum(args.s, args.k)
    rec = dataclasses.asdict(t)
    rec.update(partial=t.partial, certified_total=t.certified_total, bound=t.bound)
    return [rec], EXIT_OK, "json"


def cmd_constants(args, cfg):
    return [dataclasses.asdict(constants.constants_report(args.p, args.u))], EXIT_OK, "json"


def cmd_bound(args, cfg):
    if args.prop == "s2":
        b = excess.bound_s2(args.z)
    elif args.prop == "s3":
        b = excess.bound_s3(args.z)
    else:
        b = excess.bound_general(args.z, args.s)
    rec = dataclasses.asdict(b)
    rec["terms"] = [list(t) for t in b.terms]
    rec["max_particles"] = b.max_particles
    if (cfg.format or "json") == "csv":
        rec = {"Z": b.Z, "s": b.s, "leading_coeff": b.leading_coeff, "total": b.total, "max_particles": b.max_particles}
    return [rec], EXIT_OK, "json"


def cmd_compare(args, cfg):
    return [{"Z": float(args.z), **excess.compare_bounds(args.z)}], EXIT_OK, "json"


def cmd_crossovers(args, cfg):
    return [excess.crossovers()], EXIT_OK, "json"


def cmd_verify(args, cfg):
    reports = verify.run_suite(args.suite) if args.suite != "all" else [
        verify.check_power_chain(cfg.verify_res, cfg.verify_random),
        verify.check_prefactor_bound(cfg.verify_res, cfg.verify_random),
        verify.check_taylor_s3(),
        verify.check_g_f_positivity(cfg.verify_res, cfg.verify_random),
        verify.check_positivity_lemma(),
    ]
    rows = [r.to_dict() for r in reports]
    if (cfg.format or "json") == "csv":
        rows = [{k: r[k] for k in ("name", "n_points", "max_slack_violation", "status")} for r in rows]
    code = EXIT_OK if all(r.passed for r in reports) else EXIT_VERIFY
    return rows, code, "json"


def cmd_figure1(args, cfg):
    ns = [int(n) for n in load_reference()["figure1_alpha"]["2.00"]]
    rows = []
    for s in FIGURE1_S:
        for n in ns:
            try:
                res = variational.minimize_alpha(
                    n, s, n_starts=cfg.n_starts, seed=cfg.seed,
                    tol_grad=cfg.tol_grad, max_iter=cfg.max_iter, workers=cfg.workers,
                )
            except variational.NoConvergenceError as exc:
                res = exc.result
            rows.append({"N": n, "s": s, "alpha": res.value})
    return rows, EXIT_OK, "csv"


def cmd_figure2(args, cfg):
    search = radial.BetaSearch(grid=cfg.beta_grid)
    rows = []
    for s in radial.FIGURE2_S_GRID:
        rows.append({"s": s, "b": radial.b_of_s(s).b, "b_num": radial.beta_upper_bound(s, search).b_num})
    return rows, EXIT_OK, "csv"


def build_parser() -> argparse.ArgumentParser:
    # global flags are accepted before or after the subcommand
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, help="random seed for multi-start searches")
    common.add_argument("--format", choices=("json", "csv"), help="output format")
    common.add_argument("--out", help="write output to this file instead of stdout")
    common.add_argument("--config", help="flat key=value file with RunConfig fields")
    p = argparse.ArgumentParser(
        prog="excess-charge", description="Numerics for excess-charge bounds of Coulomb-type systems.", parents=[common]
    )
    sub = p.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    def command(name, help):
        return sub.add_parser(name, help=help, parents=[common])

    a = command("alpha", "multi-start estimate of alpha(N, s)")
    a.add_argument("--n", type=int, required=True)
    a.add_argument("--s", type=float, required=True)
    a.add_argument("--starts", type=int, help="number of random starts")
    a.add_argument("--points", action="store_true", help="include the minimizing configuration")
    a.set_defaults(func=cmd_alpha)

    a = command("bvalue", "t0 and b(s) from the root equation")
    a.add_argument("--s", type=float, required=True)
    a.set_defaults(func=cmd_bvalue)

    a = command("beta-num", "numeric upper bound on beta_s over shell power-law measures")
    a.add_argument("--s", type=float, required=True)
    a.set_defaults(func=cmd_beta_num)

    a = command("moments", "Legendre moments lambda_l(s, r) with certified tail")
    a.add_argument("--s", type=float, required=True)
    a.add_argument("--r", type=float, required=True)
    a.add_argument("--lmax", type=int, default=40)
    a.set_defaults(func=cmd_moments)

    a = command("tails", "partial sums of the multipole tail coefficients")
    a.add_argument("--s", type=float, default=3.0)
    a.add_argument("--k", type=int, default=2001)
    a.set_defaults(func=cmd_tails)

    a = command("constants", "Lieb constant C_p and the kinetic constants")
    a.add_argument("--p", type=float, default=1.0)
    a.add_argument("--u", type=int, default=constants.SPIN_STATES)
    a.set_defaults(func=cmd_constants)

    a = command("bound", "upper bound on N_c(Z)")
    a.add_argument("--z", type=float, required=True)
    g = a.add_mutually_exclusive_group(required=True)
    g.add_argument("--s", type=float, help="general-s bound, 2 <= s <= 3")
    g.add_argument("--prop", choices=("s2", "s3"), help="explicit s = 2 or s = 3 bound")
    a.set_defaults(func=cmd_bound)

    a = command("compare", "all applicable bounds at Z")
    a.add_argument("--z", type=float, required=True)
    a.set_defaults(func=cmd_compare)

    a = command("crossovers", "charges where the bounds overtake each other")
    a.set_defaults(func=cmd_crossovers)

    a = command("verify", "grid checks of the scalar inequalities (exit 3 on failure)")
    a.add_argument("--suite", default="all", choices=("all", *verify.SUITES))
    a.set_defaults(func=cmd_verify)

    a = command("figure1", "alpha(N, s) over the published grid as CSV")
    a.set_defaults(func=cmd_figure1)

    a = command("figure2", "b(s) and b_num(s) on the 30-point s grid as CSV")
    a.set_defaults(func=cmd_figure2)
    return p


def dispatch(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        config = getattr(args, "config", None)
        cfg = RunConfig.from_file(config) if config else RunConfig()
        cfg = cfg.with_overrides(**{k: getattr(args, k, None) for k in ("seed", "format", "out")})
    except (UsageError, OSError) as exc:
        parser.print_usage(sys.stderr)
        print(f"excess-charge: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        rows, code, default_fmt = args.func(args, cfg)
        text = render(rows, cfg.format or default_fmt)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"excess-charge: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, ArithmeticError, RuntimeError) as exc:
        print(f"excess-charge: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def main() -> None:
    sys.exit(dispatch())
