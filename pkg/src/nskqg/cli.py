"""Command line entry point.

Subcommands:

  run CONFIG      run a single nsk / qg / limit experiment from a YAML config
  sweep CONFIG    run the eps sweep and fit convergence rates
  check           run the built-in identity and inequality checks
  info            print the fully defaulted configuration for a config file
                  (or the bare defaults with no argument)

Exit codes: 0 success, 1 failed checks, 2 bad config or usage,
3 run stopped by vacuum or blow-up, 4 sweep with too few survivors.
"""

from __future__ import annotations

import argparse
import sys

import yaml

from .checks import run_all
from .config import DEFAULTS, ConfigError, config_to_dict, load_config
from .errors import BlowUpError, SweepError, VacuumError
from .experiments import run_experiment, run_sweep


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nskqg",
        description="Pseudospectral rotating compressible flow on the torus "
        "and its quasi-geostrophic limit.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment from a YAML config")
    p_run.add_argument("config", help="path to the YAML configuration")
    p_run.add_argument("--output-dir", help="override the config's output_dir")
    p_run.add_argument(
        "--no-figures", action="store_true", help="skip rendering PNG figures"
    )

    p_sweep = sub.add_parser("sweep", help="run the eps sweep and fit rates")
    p_sweep.add_argument("config", help="path to the YAML configuration")
    p_sweep.add_argument("--output-dir", help="override the config's output_dir")
    p_sweep.add_argument(
        "--workers", type=int, default=1, help="parallel member runs (default 1)"
    )
    p_sweep.add_argument(
        "--no-figures", action="store_true", help="skip rendering PNG figures"
    )

    p_check = sub.add_parser("check", help="run identity and inequality checks")
    p_check.add_argument("--n", type=int, default=64, help="grid size (default 64)")
    p_check.add_argument("--seed", type=int, default=0, help="base RNG seed")

    p_info = sub.add_parser("info", help="print the resolved configuration")
    p_info.add_argument("config", nargs="?", help="optional YAML configuration")

    return parser


def _cmd_run(args) -> int:
    config = load_config(args.config)
    if args.output_dir is not None:
        from dataclasses import replace

        config = replace(config, output_dir=args.output_dir)
    result = run_experiment(config, figures=not args.no_figures)
    print(f"status: {result.status}")
    print(f"steps: {result.steps}")
    print(f"last good t: {result.last_good_t:.6g}")
    print(f"wrote {result.csv_path}")
    if result.status != "ok":
        print(f"stopped early: {result.error}", file=sys.stderr)
        return 3
    return 0


def _cmd_sweep(args) -> int:
    config = load_config(args.config)
    if args.output_dir is not None:
        from dataclasses import replace

        config = replace(config, output_dir=args.output_dir)
    result = run_sweep(config, workers=args.workers, figures=not args.no_figures)
    for eps, status in zip(result.eps_list, result.statuses):
        print(f"eps={eps:g}: {status}")
    for label, fit in (
        ("density gap rate", result.slope_rho),
        ("momentum gap rate", result.slope_mom),
        ("modulated energy rate", result.slope_supH),
    ):
        if fit is None:
            print(f"{label}: not fit (degenerate data)")
        else:
            print(f"{label}: {fit[0]:.3f}")
    print(f"wrote {result.out_dir}")
    return 0


def _cmd_check(args) -> int:
    results = run_all(N=args.n, seed=args.seed)
    width = max(len(name) for name, _, _ in results)
    failures = 0
    for name, ok, detail in results:
        tag = "PASS" if ok else "FAIL"
        print(f"{tag}  {name:<{width}}  {detail}")
        failures += 0 if ok else 1
    if failures:
        print(f"{failures} check(s) failed", file=sys.stderr)
        return 1
    return 0


def _cmd_info(args) -> int:
    if args.config is None:
        resolved = dict(DEFAULTS)
        resolved["experiment"] = "<required: nsk | qg | limit | sweep>"
        resolved["eps_list"] = list(DEFAULTS["eps_list"])
        resolved["phi0_modes"] = [list(m) for m in DEFAULTS["phi0_modes"]]
    else:
        resolved = config_to_dict(load_config(args.config))
        resolved["eps_list"] = list(resolved["eps_list"])
        resolved["phi0_modes"] = [list(m) for m in resolved["phi0_modes"]]
    print(yaml.safe_dump(resolved, sort_keys=False), end="")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "check":
            return _cmd_check(args)
        return _cmd_info(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (VacuumError, BlowUpError) as exc:
        print(f"run stopped: {exc}", file=sys.stderr)
        return 3
    except SweepError as exc:
        print(f"sweep failed: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
