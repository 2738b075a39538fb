"""Command-line interface: ``rieszfield <task> [options]``.

Tasks are ``radius``, ``density``, ``classify``, ``frostman``, ``oracle`` and
``figure``.  A JSON config (``--config``) supplies defaults; flags override.
Exit status is 0 on success, 1 on invalid input, 2 on numeric failure; in the
failure cases a JSON object is written to standard error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from .errors import DomainError, NumericError, RieszFieldError
from .kernel_core import ChargeConfig, RieszKernel

TASKS = ("radius", "density", "classify", "frostman", "oracle", "figure")
SIG = 12

_KERNEL_KEYS = {"d", "s", "weak"}
_CHARGE_KEYS = {"gamma", "height"}
_TOP_KEYS = {"kernel", "charges", "task", "task_options"}
_OPTION_KEYS = {
    "points", "rmax", "tol", "seed", "n", "max_iters", "bins", "quantile", "id", "out",
}


def fmt(x) -> str:
    """A number with 12 significant digits."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), f".{SIG}g")


def _round(obj):
    """Apply the 12-digit convention inside JSON payloads."""
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return float(fmt(v)) if math.isfinite(v) else str(v)
    return obj


# ----------------------------------------------------------------------------
# run configuration


@dataclass
class RunConfig:
    kernel: Dict[str, Any]
    charges: List[Dict[str, float]]
    task: str
    task_options: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.task not in TASKS:
            raise DomainError(f"unknown task {self.task!r}; expected one of {', '.join(TASKS)}")
        _reject_unknown("kernel", self.kernel, _KERNEL_KEYS)
        if not {"d", "s"} <= set(self.kernel):
            raise DomainError("kernel needs both 'd' and 's'")
        if not isinstance(self.charges, list):
            raise DomainError("charges must be a list of {gamma, height} objects")
        for c in self.charges:
            if not isinstance(c, dict):
                raise DomainError("each charge must be an object with 'gamma' and 'height'")
            _reject_unknown("charge", c, _CHARGE_KEYS)
            if set(c) != _CHARGE_KEYS:
                raise DomainError("each charge needs 'gamma' and 'height'")
        _reject_unknown("task_options", self.task_options, _OPTION_KEYS)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        if not isinstance(data, dict):
            raise DomainError("config must be a JSON object")
        _reject_unknown("config", data, _TOP_KEYS)
        return cls(dict(data.get("kernel", {})), list(data.get("charges", [])),
                   data.get("task", ""), dict(data.get("task_options", {})))

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DomainError(f"config is not valid JSON: {exc}") from None
        return cls.from_dict(data)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    def riesz_kernel(self) -> RieszKernel:
        k = self.kernel
        d = k["d"]
        if isinstance(d, float) and d.is_integer():
            d = int(d)
        return RieszKernel(d, float(k["s"]), weak=bool(k.get("weak", False)))

    def charge_config(self) -> ChargeConfig:
        return ChargeConfig(self.riesz_kernel(), tuple((c["gamma"], c["height"]) for c in self.charges))


def _reject_unknown(where: str, data: dict, allowed: set) -> None:
    extra = set(data) - allowed
    if extra:
        raise DomainError(f"unknown {where} key(s): {', '.join(sorted(extra))}")


# ----------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration; flags override its fields")
    common.add_argument("--d", type=int, help="conductor dimension")
    common.add_argument("--s", type=float, help="Riesz exponent")
    common.add_argument("--weak", action="store_true", default=None,
                        help="allow 0 < s < d-2 (weak mode)")
    common.add_argument("--gamma", type=float, help="charge of a single attractor")
    common.add_argument("--height", type=float, help="height of a single attractor")
    common.add_argument("--charges", help='JSON list like [{"gamma": -2, "height": 1}, ...]')
    common.add_argument("--out", help="output path (CSV for grids, JSON for reports)")
    common.add_argument("--tol", type=float, help="tolerance override")
    common.add_argument("--seed", type=int, help="random seed for the oracle")
    common.add_argument("--n", type=int, help="number of particles for the oracle")
    common.add_argument("--max-iters", dest="max_iters", type=int, help="oracle iteration cap")
    common.add_argument("--bins", type=int, help="histogram bins for the oracle")
    common.add_argument("--quantile", type=float, help="support quantile for the oracle")
    common.add_argument("--points", type=int, help="grid points for density output")
    common.add_argument("--rmax", type=float, help="largest radius for density output")
    common.add_argument("--id", type=int, help="figure id (1-6)")

    parser = argparse.ArgumentParser(
        prog="rieszfield",
        description="Weighted Riesz equilibrium measures on a hyperplane conductor.",
    )
    sub = parser.add_subparsers(dest="task", required=True)
    helps = {
        "radius": "support radius of a single attractor",
        "density": "equilibrium density on a radial grid (CSV)",
        "classify": "existence and compactness verdict (JSON)",
        "frostman": "numerical Frostman check of a single-attractor solution (JSON)",
        "oracle": "discrete particle minimization (JSON summary, histogram CSV)",
        "figure": "figure data sets 1-6 (CSV)",
    }
    for task in TASKS:
        sub.add_parser(task, parents=[common], help=helps[task])
    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    data: Dict[str, Any] = {"kernel": {}, "charges": [], "task": args.task, "task_options": {}}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                base = RunConfig.from_json(fh.read())
        except OSError as exc:
            raise DomainError(f"cannot read config: {exc}") from None
        data = asdict(base)
        data["task"] = args.task
    if args.d is not None:
        data["kernel"]["d"] = args.d
    if args.s is not None:
        data["kernel"]["s"] = args.s
    if args.weak:
        data["kernel"]["weak"] = True
    if args.charges is not None:
        try:
            data["charges"] = json.loads(args.charges)
        except json.JSONDecodeError as exc:
            raise DomainError(f"--charges is not valid JSON: {exc}") from None
    if args.gamma is not None or args.height is not None:
        if args.charges is not None:
            raise DomainError("give either --charges or --gamma/--height, not both")
        if args.gamma is None or args.height is None:
            raise DomainError("--gamma and --height go together")
        data["charges"] = [{"gamma": args.gamma, "height": args.height}]
    for key in ("tol", "seed", "n", "max_iters", "bins", "quantile", "points", "rmax", "id", "out"):
        value = getattr(args, key)
        if value is not None:
            data["task_options"][key] = value
    if args.task == "figure":
        data["kernel"].setdefault("d", 3)
        data["kernel"].setdefault("s", 2.0)
    return RunConfig.from_dict(data)


# ----------------------------------------------------------------------------
# tasks


def _single(cfg: RunConfig):
    config = cfg.charge_config()
    if len(config.charges) != 1:
        raise DomainError(f"task '{cfg.task}' needs exactly one charge")
    g, h = config.charges[0]
    return config.kernel, g, h


def task_radius(cfg: RunConfig):
    from .equilibrium_single import solve_radius

    kernel, g, h = _single(cfg)
    R0 = solve_radius(kernel, g, h)
    return {"d": kernel.d, "s": kernel.s, "gamma": g, "height": h, "R0": R0}, None


def task_density(cfg: RunConfig):
    from .equilibrium_single import solve_single_attractor

    kernel, g, h = _single(cfg)
    sol = solve_single_attractor(kernel, g, h)
    opts = cfg.task_options
    n = int(opts.get("points", 101))
    if n < 2:
        raise DomainError("need at least 2 grid points")
    rmax = float(opts.get("rmax", sol.R0 if sol.bounded else 10.0 * h))
    r = np.linspace(0.0, rmax, n)
    dens = np.zeros_like(r)
    inside = r < sol.R0
    dens[inside] = sol.density.density(r[inside])
    rows = [[ri, di] for ri, di in zip(r, dens)]
    summary = {"R0": sol.R0, "mass": sol.mass_check, "robin_constant": sol.robin_constant}
    return summary, (["r", "density"], rows, None)


def task_classify(cfg: RunConfig):
    from .weak_admissible import classify_config

    return classify_config(cfg.charge_config()).as_dict(), None


def task_frostman(cfg: RunConfig):
    from .equilibrium_single import solve_single_attractor, verify_frostman

    kernel, g, h = _single(cfg)
    sol = solve_single_attractor(kernel, g, h)
    tol = cfg.task_options.get("tol")
    report = verify_frostman(sol, tol_eq=tol * abs(sol.robin_constant) if tol else None)
    out = {"R0": sol.R0, "mass": sol.mass_check, **report.as_dict()}
    if not report.passed:
        raise NumericError("Frostman check failed", report=_round(out))
    return out, None


def task_oracle(cfg: RunConfig):
    from .equilibrium_single import solve_radius
    from .oracle import minimize_particles, radial_histogram, support_radius_estimate

    config = cfg.charge_config()
    opts = cfg.task_options
    system = minimize_particles(config, int(opts.get("n", 400)), int(opts.get("seed", 0)),
                                int(opts.get("max_iters", 5000)))
    q = float(opts.get("quantile", 0.99))
    est = support_radius_estimate(system, q)
    hist = radial_histogram(system, int(opts.get("bins", 15)))
    summary = {
        "n": system.n, "seed": system.seed, "iterations": system.iteration_count,
        "converged": system.converged, "energy": system.energy,
        "gradient_norm": system.gradient_norm, "quantile": q, "support_radius": est,
    }
    if len(config.charges) == 1 and config.total_charge < -1.0:
        g, h = config.charges[0]
        summary["analytic_R0"] = solve_radius(config.kernel, g, h)
    edges = hist.bin_edges
    rows = [[lo, hi, f] for lo, hi, f in zip(edges[:-1], edges[1:], hist.f)]
    return summary, (["r_lo", "r_hi", "density"], rows, None)


def task_figure(cfg: RunConfig):
    from .figures import FIGURES

    fig_id = cfg.task_options.get("id")
    if fig_id not in FIGURES:
        raise DomainError(f"--id must be one of {sorted(FIGURES)}")
    header, rows, comment = FIGURES[fig_id]()
    return {"figure": fig_id, "rows": len(rows)}, (header, rows, comment)


TASK_FUNCS = {
    "radius": task_radius,
    "density": task_density,
    "classify": task_classify,
    "frostman": task_frostman,
    "oracle": task_oracle,
    "figure": task_figure,
}


# ----------------------------------------------------------------------------
# output


def write_csv(stream, header, rows, comment=None) -> None:
    if comment:
        stream.write(f"# {comment}\n")
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if isinstance(v, (int, float, np.number)) else v for v in row])


def _emit(cfg: RunConfig, summary: dict, table, stdout) -> None:
    out = cfg.task_options.get("out")
    if table is not None:
        header, rows, comment = table
        if out:
            with open(out, "w", encoding="utf-8", newline="") as fh:
                write_csv(fh, header, rows, comment)
            print(json.dumps(_round(summary)), file=stdout)
        else:
            write_csv(stdout, header, rows, comment)
        return
    if cfg.task == "radius":
        print(f"R0 = {fmt(summary['R0'])}", file=stdout)
    else:
        print(json.dumps(_round(summary), indent=2), file=stdout)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            json.dump(_round(summary), fh, indent=2)


def _fail(code: int, exc: BaseException, stderr) -> int:
    payload = {"error": type(exc).__name__, "message": str(exc)}
    diag = getattr(exc, "diagnostics", None)
    if diag:
        payload["diagnostics"] = _round(diag)
    print(json.dumps(payload), file=stderr)
    return code


def run(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        cfg = _config_from_args(args)
        summary, table = TASK_FUNCS[cfg.task](cfg)
        _emit(cfg, summary, table, stdout)
    except (DomainError, ValueError, TypeError, KeyError) as exc:
        return _fail(1, exc, stderr)
    except (NumericError, RieszFieldError, ArithmeticError) as exc:
        return _fail(2, exc, stderr)
    except OSError as exc:
        return _fail(1, exc, stderr)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
