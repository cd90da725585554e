"""Command line: ``fermiszego <subcommand> --config <path> [--out dir] [--seed u64]``.

Exit codes: 0 all acceptance checks pass, 1 invalid input, 2 numerical
failure, 3 at least one acceptance check fails.
"""
import argparse
import datetime
import platform
import sys
import time
from pathlib import Path

import numpy as np
import scipy

from fermiszego import __version__, experiments, kernels
from fermiszego.config import load_config
from fermiszego.errors import NumericalError, ValidationError

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_ACCEPTANCE = 0, 1, 2, 3


def _parser():
    p = argparse.ArgumentParser(prog="fermiszego", description=__doc__.splitlines()[0])
    p.add_argument("subcommand", choices=experiments.SUBCOMMANDS + ("all",))
    p.add_argument("--config", required=True, help="TOML experiment file")
    p.add_argument("--out", default="results", help="output directory (default: results)")
    p.add_argument("--seed", type=int, default=None, help="override the config seed (u64)")
    return p


def _metadata(cfg, sub, started, elapsed):
    return {
        "subcommand": sub,
        "config": str(cfg.path),
        "config_name": cfg.name,
        "seed": cfg.seed,
        "started_utc": started,
        "elapsed_s": elapsed,
        "version": __version__,
        "kernel_backend": kernels.BACKEND,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
    }


def _print_summary(res, stream):
    for c in res.criteria:
        tag = "PASS" if c["pass"] else "FAIL"
        print(f"[{tag}] {res.config}/{res.subcommand} {c['criterion_id']}: "
              f"measured={experiments._jsonable(c['measured'])} "
              f"threshold={experiments._jsonable(c['threshold'])}", file=stream)


def run(subcommand, config, out="results", seed=None, stream=sys.stdout):
    """Run one subcommand (or ``all``) and return the exit code."""
    try:
        cfg = load_config(config)
        if seed is not None:
            if not 0 <= seed < 2**64:
                raise ValidationError("seed must be an unsigned 64-bit integer")
            cfg.raw["seed"] = int(seed)
        if subcommand == "all":
            subs = experiments.applicable(cfg)
        else:
            if subcommand != "spectrum" and cfg.section(subcommand) is None:
                raise ValidationError(f"config has no [{subcommand}] section")
            subs = [subcommand]
        out = Path(out)
        results = []
        for sub in subs:
            started = datetime.datetime.now(datetime.timezone.utc).isoformat()
            t0 = time.perf_counter()
            res = experiments.RUNNERS[sub](cfg, out)
            res.runtime = time.perf_counter() - t0
            experiments.write_json(out / sub / "summary.json", res.summary())
            experiments.write_json(out / sub / "metadata.json",
                                   _metadata(cfg, sub, started, res.runtime))
            _print_summary(res, stream)
            results.append(res)
        if subcommand == "all":
            experiments.write_json(out / "summary.json", [r.summary() for r in results])
    except ValidationError as exc:
        print(f"error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"numerical failure ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK if all(r.passed for r in results) else EXIT_ACCEPTANCE


def main(argv=None):
    args = _parser().parse_args(argv)
    return run(args.subcommand, args.config, args.out, args.seed)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
