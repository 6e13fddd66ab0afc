"""``ppcpcov`` command line: coverage sweeps to CSV."""

from __future__ import annotations

import argparse
import io
import logging
import sys

import numpy as np

from .config import ConfigError, ExperimentConfig, apply_overrides, builtin_presets, \
    dump_config, parse_config
from .contact import unconditional_cd_cdf
from .coverage import coverage_probability
from .quadrature import QuadratureError
from .simulate import estimates, simulate

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_QUADRATURE = 3
EXIT_IO = 4

COLUMNS = {
    "analytic": ("theta_db", "coverage"),
    "simulate": ("theta_db", "coverage", "std_error"),
    "compare": ("theta_db", "analytic", "mc_mean", "mc_stderr", "abs_diff", "sigma_diff"),
    "contact": ("r", "analytic_cdf", "empirical_cdf"),
}

log = logging.getLogger("ppcpcov")


def fmt(x) -> str:
    return f"{float(x):.10g}"


def _analytic(cfg, thetas):
    model, pl, quad = cfg.model(), cfg.pathloss(), cfg.quadrature()
    return [coverage_probability(model, pl, t, quad) for t in thetas]


def rows_for(cfg: ExperimentConfig):
    """Yield CSV rows (tuples of floats) for ``cfg.mode``."""
    dbs = cfg.theta_grid_db()
    thetas = 10.0 ** (dbs / 10.0)
    if cfg.mode == "analytic":
        for db, p in zip(dbs, _analytic(cfg, thetas)):
            yield db, p
    elif cfg.mode == "simulate":
        res = simulate(cfg.model(), cfg.pathloss(), cfg.sim())
        for db, e in zip(dbs, estimates(res, thetas)):
            yield db, e.mean, e.std_error
    elif cfg.mode == "compare":
        analytic = _analytic(cfg, thetas)
        res = simulate(cfg.model(), cfg.pathloss(), cfg.sim())
        for db, a, e in zip(dbs, analytic, estimates(res, thetas)):
            diff = a - e.mean
            if e.std_error > 0:
                z = diff / e.std_error
            else:
                z = 0.0 if diff == 0 else np.copysign(np.inf, diff)
            yield db, a, e.mean, e.std_error, abs(diff), z
    elif cfg.mode == "contact":
        n = int(np.floor(cfg.contact_r_max / cfg.contact_r_step + 1e-9)) + 1
        r = np.round(cfg.contact_r_step * np.arange(n), 12)
        analytic = unconditional_cd_cdf(cfg.model(), r, cfg.quadrature())
        d = simulate(cfg.model(), cfg.pathloss(), cfg.sim()).contact
        d = np.sort(d[~np.isnan(d)])
        # empty windows count as "no BS within r"
        empirical = np.searchsorted(d, r, side="right") / cfg.replications
        yield from zip(r, analytic, empirical)


def render_csv(cfg: ExperimentConfig) -> str:
    buf = io.StringIO()
    buf.write(",".join(COLUMNS[cfg.mode]) + "\n")
    for row in rows_for(cfg):
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="ppcpcov",
        description="Coverage probability of cluster-process cellular networks.")
    sub = p.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run an analytic/simulation sweep and write CSV")
    run.add_argument("--config", help="flat key = value configuration file")
    run.add_argument("--preset", choices=sorted(builtin_presets()), help="start from a preset")
    run.add_argument("--mode", choices=COLUMNS, help="override the configured mode")
    run.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                     help="override one configuration key (repeatable)")
    run.add_argument("--out", help="write CSV here instead of standard output")
    run.add_argument("--dump-config", action="store_true",
                     help="print the effective configuration and exit")
    run.add_argument("-v", "--verbose", action="store_true")
    return p


def resolve(args) -> ExperimentConfig:
    if args.config is None and args.preset is None:
        raise ConfigError("one of --config or --preset is required")
    cfg = builtin_presets()[args.preset] if args.preset else ExperimentConfig()
    if args.config is not None:
        with open(args.config, encoding="utf-8") as fh:
            cfg = parse_config(fh.read(), cfg)
    pairs = []
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        pairs.append(tuple(item.split("=", 1)))
    cfg = apply_overrides(cfg, pairs)
    if args.mode:
        cfg = apply_overrides(cfg, [("mode", args.mode)])
    return cfg.validate()


def _emit(text: str, path) -> None:
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve(args)
    except FileNotFoundError as exc:
        print(f"ppcpcov: config file not found: {exc.filename}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as exc:
        print(f"ppcpcov: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        text = dump_config(cfg) if args.dump_config else render_csv(cfg)
    except QuadratureError as exc:
        print(f"ppcpcov: quadrature failure at level {exc.level or '?'}: {exc}", file=sys.stderr)
        return EXIT_QUADRATURE
    try:
        _emit(text, args.out)
    except OSError as exc:
        print(f"ppcpcov: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
