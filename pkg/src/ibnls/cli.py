"""Command-line driver.

    ibnls [--config cfg.json] [--out DIR] [--seed S] <subcommand>

Subcommands: ground-state, evolve, verify, classify, ode-demo, sweep.
Exit codes: 0 success, 1 validation error, 2 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .errors import ConfigError, NumericalError, ValidationError

log = logging.getLogger("ibnls")

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _load_config(path) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return cfg


def _dump(path: Path, obj) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, default=_jsonable)


def _jsonable(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (np.bool_,)):
        return bool(x)
    raise TypeError(f"not JSON serializable: {type(x).__name__}")


def _pick(cfg: dict, keys: dict) -> dict:
    out = dict(keys)
    out.update({k: cfg[k] for k in keys if k in cfg})
    return out


def _grid_and_gs(cfg: dict, defaults=(6, 1.0, 30.0, 512)):
    from .grid import make_grid
    from .ground_state import solve_ground_state
    from .model import make_params
    g = _pick(cfg, dict(zip(("N", "b", "r_max", "n"), defaults)))
    params = make_params(g["N"], g["b"])
    grid = make_grid(params, g["r_max"], g["n"])
    return grid, solve_ground_state(grid, cfg.get("ground_state", {}))


# --------------------------------------------------------------------------
# subcommands

def cmd_ground_state(cfg: dict, out: Path, seed) -> int:
    grid, gs = _grid_and_gs(cfg)
    gs.on_grid(grid).to_csv(out / "W.csv")
    summary = gs.summary()
    summary["pohozaev_residuals"] = gs.pohozaev_residuals()
    _dump(out / "ground_state.json", summary)
    log.info("K_W = %.10g  E_W = %.10g  K_opt = %.10g  residual = %.2e",
             gs.kinetic_W, gs.energy_W, gs.k_opt, gs.residual)
    return EXIT_OK


def cmd_evolve(cfg: dict, out: Path, seed) -> int:
    from .evolution import SimConfig, evolve
    from .model import make_params
    sim = SimConfig.from_dict({k: v for k, v in cfg.items() if k != "outputs"})
    series = evolve(sim)
    names = {"csv": "run.csv", "summary": "summary.json", **cfg.get("outputs", {})}
    series.to_csv(out / names["csv"])
    extra = {"config": sim.as_dict(), "params": make_params(sim.N, sim.b).as_dict()}
    series.write_summary(out / names["summary"], sim.growth_factor, extra)
    log.info("termination %s after %d steps, t = %.6g", series.termination, series.steps,
             series.records[-1]["t"])
    return EXIT_OK


def cmd_classify(cfg: dict, out: Path, seed) -> int:
    from .evolution import initial_field
    from .experiments import classify
    grid, gs = _grid_and_gs(cfg)
    u0 = initial_field(grid, cfg.get("data", {"family": "gaussian"}), gs)
    res = classify(u0, gs, radial=bool(cfg.get("radial", True)), require=cfg.get("require"))
    _dump(out / "classification.json", res.as_dict())
    log.info("regime %s %s", res.regime, list(res.reasons) or "")
    return EXIT_OK


def cmd_ode_demo(cfg: dict, out: Path, seed) -> int:
    from .experiments import ode_blowup
    c = _pick(cfg, {"A1": 1.0, "C": 1.0, "t1": 0.0, "threshold": 1e6})
    res = ode_blowup(c["A1"], c["C"], c["t1"], c["threshold"])
    tr = res["trajectory"]
    with open(out / "ode.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("t", "A"))
        w.writerows(zip(tr["t"].tolist(), tr["A"].tolist()))
    _dump(out / "ode.json", {k: v for k, v in res.items() if k != "trajectory"})
    log.info("t* = %.12g, crossing at %.12g", res["t_star"], res["t_cross"])
    return EXIT_OK


def _expand_sweep(cfg: dict) -> list:
    """Either an explicit "runs" list or a "base" config with a "grid" of values."""
    if "runs" in cfg:
        return list(cfg["runs"])
    base, grid = cfg.get("base", {}), cfg.get("grid", {})
    rows = [dict(base)]
    for key, values in grid.items():
        nxt = []
        for row in rows:
            for v in values:
                new = json.loads(json.dumps(row))
                target = new
                *path, leaf = key.split(".")
                for p in path:
                    target = target.setdefault(p, {})
                target[leaf] = v
                nxt.append(new)
        rows = nxt
    return rows


def cmd_sweep(cfg: dict, out: Path, seed) -> int:
    from .experiments import sweep
    rows = sweep(_expand_sweep(cfg), int(cfg.get("parallelism", 1)))
    _dump(out / "sweep.json", rows)
    cols = ("index", "N", "b", "regime", "termination", "t_star_estimate", "verdict",
            "consistency", "csv_sha256", "error")
    with open(out / "sweep.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for i, row in enumerate(rows):
            conf = row.get("config", {})
            w.writerow([i, conf.get("N"), conf.get("b")] + [row.get(c) for c in cols[3:]])
    failed = sum(1 for r in rows if r.get("error"))
    log.info("%d rows, %d failed", len(rows), failed)
    return EXIT_OK


def cmd_verify(cfg: dict, out: Path, seed) -> int:
    from .verify import run_checks
    grid, gs = _grid_and_gs(cfg)
    rng = np.random.default_rng(seed)
    report, cutoff = run_checks(grid, gs, rng, R=float(cfg.get("R", grid.r_max / 4)),
                                samples=int(cfg.get("samples", 100)))
    cutoff.to_csv(out / "cutoff.csv")
    _dump(out / "verify.json", report)
    for name, item in report["checks"].items():
        print(f"{'PASS' if item['passed'] else 'FAIL'}  {name}  {item['detail']}")
    return EXIT_OK if report["passed"] else EXIT_NUMERICAL


COMMANDS = {
    "ground-state": (cmd_ground_state, "solve for W, write W.csv and certified constants"),
    "evolve": (cmd_evolve, "run the time stepper, write run CSV and JSON summary"),
    "verify": (cmd_verify, "identity and inequality checks with a pass/fail report"),
    "classify": (cmd_classify, "which blow-up theorem covers the configured data"),
    "ode-demo": (cmd_ode_demo, "integrate A' = C^4 A^4 and compare with its closed form"),
    "sweep": (cmd_sweep, "batch of evolve runs, one summary row each"),
}


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="ibnls", description=__doc__.splitlines()[0])
    ap.add_argument("--config", help="JSON config file")
    ap.add_argument("--out", default=".", help="output directory (default: cwd)")
    ap.add_argument("--seed", type=int, default=0, help="seed for random-field ensembles")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (_, help_) in COMMANDS.items():
        sub.add_parser(name, help=help_)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(message)s")
    try:
        cfg = _load_config(args.config)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command][0](cfg, out, args.seed)
    except (ValidationError, ValueError, TypeError, KeyError) as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return EXIT_VALIDATION
    except (NumericalError, ArithmeticError, np.linalg.LinAlgError) as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
