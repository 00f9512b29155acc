"""Command line entry point: ``sweepsim <mode> --config <path>``.

Exit codes: 0 success, 2 configuration error, 3 parameters outside the
sweep regime, 4 event or attempt cap exceeded (partial output written).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from sweepsim.config import MODES, ConfigError, check_config, load_config
from sweepsim.engine import RegimeError
from sweepsim.experiment import json_safe, run_experiment

EXIT_OK, EXIT_CONFIG, EXIT_REGIME, EXIT_CAP = 0, 2, 3, 4

log = logging.getLogger("sweepsim")


def _threads(arg) -> int:
    if arg is not None:
        return arg
    env = os.environ.get("SWEEPSIM_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            log.warning("ignoring SWEEPSIM_THREADS=%r", env)
    return 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sweepsim", description=__doc__.splitlines()[0])
    p.add_argument("mode", choices=MODES)
    p.add_argument("--config", required=True, help="key = value parameter file")
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: $SWEEPSIM_THREADS or 1)")
    p.add_argument("--seed", type=int, default=None, help="override master_seed")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"sweepsim: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    cfg.mode = args.mode
    if args.seed is not None:
        cfg.master_seed = args.seed
    try:
        check_config(cfg)
        result = run_experiment(cfg, threads=_threads(args.threads))
    except ConfigError as exc:
        print(f"sweepsim: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except RegimeError as exc:
        print(f"sweepsim: parameters outside the sweep regime: {exc}", file=sys.stderr)
        return EXIT_REGIME

    json.dump(json_safe(result.summary), sys.stdout, indent=2)
    sys.stdout.write("\n")
    if result.truncated:
        print(f"sweepsim: truncated: {result.error}", file=sys.stderr)
        return EXIT_CAP
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
