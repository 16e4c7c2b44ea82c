from __future__ import annotations

import argparse
import os
import sys
from typing import Sequence

from kkspectra.scenarios import SCENARIOS
from kkspectra.utils.config import ScenarioConfig, builtin_config, load_config
from kkspectra.utils.errors import ConfigError
from kkspectra.utils.logger import Logger
from kkspectra.utils.runner import RunResult, run_all

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONFIG = 2
EXIT_CHECKS = 3


def list_scenarios(tag: str | None = None) -> list[tuple[str, str]]:
    """(name, one-line doc) of the built-in catalog, optionally filtered by tag."""
    return [
        (name, module.DOC)
        for name, module in SCENARIOS.items()
        if tag is None or tag in module.TAGS
    ]


def setup_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kk-spectra", description="Kaluza-Klein spectral workbench"
    )
    parser.add_argument(
        "-c",
        "--config",
        action="append",
        default=[],
        help="scenario config file (TOML or JSON), repeatable",
    )
    parser.add_argument(
        "-s",
        "--scenario",
        action="append",
        default=[],
        help="built-in scenario name, repeatable",
    )
    parser.add_argument("-o", "--out", type=str, default="kk-out", help="output directory")
    parser.add_argument("-j", "--jobs", type=int, default=1, help="parallel scenarios")
    parser.add_argument("--seed", type=int, help="override every scenario seed")
    parser.add_argument("--list", action="store_true", help="list built-in scenarios")
    parser.add_argument("--tag", type=str, help="restrict the catalog to a tag")
    parser.add_argument("--plots", action="store_true", help="write SVG plots")
    parser.add_argument(
        "-v",
        "--verbose",
        action="store_true",
        help="enable verbose output",
    )
    return parser


def collect_configs(args: argparse.Namespace) -> list[ScenarioConfig]:
    configs = [load_config(path, args.seed) for path in args.config]
    for name in args.scenario:
        configs.append(builtin_config(name, args.seed, args.plots))
    if not configs:
        # no explicit selection: the whole catalog, or the tagged part of it
        for name, _ in list_scenarios(args.tag):
            configs.append(builtin_config(name, args.seed, args.plots))
    elif args.tag:
        configs = [c for c in configs if args.tag in SCENARIOS[c.scenario].TAGS]
    if args.plots:
        for c in configs:
            c.plots = True
    labels = [c.label for c in configs]
    duplicates = sorted({x for x in labels if labels.count(x) > 1})
    if duplicates:
        raise ConfigError(f"duplicate output labels: {', '.join(duplicates)}")
    return configs


def summarize(results: Sequence[RunResult]) -> int:
    code = EXIT_OK
    for r in results:
        failed = [c["name"] for c in r.checks if not c["ok"]]
        if r.error is not None:
            Logger.error(f"{r.scenario}: ERROR {r.error}")
            code = EXIT_ERROR
        elif failed:
            Logger.warn(f"{r.scenario}: FAILED {', '.join(failed)}")
            if code == EXIT_OK:
                code = EXIT_CHECKS
        else:
            Logger.info(f"{r.scenario}: ok ({len(r.checks)} checks) -> {r.out_dir}")
    return code


def main(argv: Sequence[str] | None = None) -> int:
    args = setup_parser().parse_args(argv)
    Logger.enable_debug = args.verbose

    if args.list:
        for name, doc in list_scenarios(args.tag):
            Logger.info(f"{name:22s} {doc}", file=sys.stdout)
        return EXIT_OK

    if args.jobs < 1:
        Logger.error("--jobs must be at least 1")
        return EXIT_CONFIG
    out = os.environ.get("KK_SPECTRA_OUT") or args.out

    try:
        configs = collect_configs(args)
    except ConfigError as e:
        Logger.error(str(e))
        return EXIT_CONFIG
    if not configs:
        Logger.warn("nothing to run")
        return EXIT_OK

    Logger.debug("Writing results to", out)
    try:
        results = run_all(configs, out, args.jobs, args.verbose)
    except Exception as e:
        Logger.error(f"unexpected failure: {type(e).__name__}: {e}")
        return EXIT_ERROR
    return summarize(results)
