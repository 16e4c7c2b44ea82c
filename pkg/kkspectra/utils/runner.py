from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

from joblib import Parallel, delayed  # type: ignore

from kkspectra.scenarios import SCENARIOS
from kkspectra.scenarios.result import ScenarioResult
from kkspectra.utils.config import ScenarioConfig
from kkspectra.utils.errors import KKSpectraError
from kkspectra.utils.logger import Logger
from kkspectra.utils.run_log import dot_log, json_log, operator_log, plot_log, table_log


@dataclass
class RunResult:
    scenario: str
    ok: bool
    checks: list[dict[str, Any]] = field(default_factory=list)
    error: str | None = None
    out_dir: str = ""


def write_outputs(config: ScenarioConfig, result: ScenarioResult, out_dir: str) -> None:
    for name, (header, rows) in sorted(result.tables.items()):
        table_log(os.path.join(out_dir, f"{name}.csv"), header, rows)
    for name, doc in sorted(result.documents.items()):
        json_log(os.path.join(out_dir, f"{name}.json"), doc)
    json_log(
        os.path.join(out_dir, "checks.json"),
        {
            "scenario": config.scenario,
            "seed": config.seed,
            "ok": result.ok,
            "checks": [c.to_json() for c in result.checks],
        },
    )
    if config.plots:
        for name, plot in sorted(result.plots.items()):
            plot_log(
                os.path.join(out_dir, f"{name}.svg"),
                plot.series,
                plot.title,
                plot.xlabel,
                plot.ylabel,
                plot.logy,
            )
    if config.operators:
        for name, (rows_n, cols_n, entries) in sorted(result.operators.items()):
            operator_log(os.path.join(out_dir, f"{name}.coo"), rows_n, cols_n, entries)
    if config.dot:
        for name, cover in sorted(result.covers.items()):
            dot_log(os.path.join(out_dir, f"{name}.dot"), cover)


def gen_run_impl(out_root: str, verbose: bool) -> Callable[[ScenarioConfig], RunResult]:
    """Closure running one scenario config and writing its artifacts under
    out_root/<scenario>. Safe to ship to joblib workers."""

    def run_impl(config: ScenarioConfig) -> RunResult:
        Logger.enable_debug = verbose
        module = SCENARIOS[config.scenario]
        out_dir = os.path.join(out_root, config.label)
        Logger.debug(f"Running {config.scenario} (seed {config.seed})")
        try:
            result = module.run(config.params, config.seed)
        except KKSpectraError as e:
            Logger.error(f"{config.scenario}: {e}")
            return RunResult(config.scenario, False, error=str(e), out_dir=out_dir)
        except Exception as e:
            # a bug stays in its own RunResult
            error = f"{type(e).__name__}: {e}"
            Logger.error(f"{config.scenario}: unexpected failure {error}")
            return RunResult(config.scenario, False, error=error, out_dir=out_dir)
        write_outputs(config, result, out_dir)
        for c in result.checks:
            if not c.ok:
                Logger.warn(
                    f"{config.scenario}: check {c.name} failed "
                    f"({c.value:.3e} vs {c.bound:.3e})"
                )
        return RunResult(
            config.scenario,
            result.ok,
            [c.to_json() for c in result.checks],
            out_dir=out_dir,
        )

    return run_impl


def run_all(
    configs: Sequence[ScenarioConfig], out_root: str, jobs: int = 1, verbose: bool = False
) -> list[RunResult]:
    """Results come back in submission order."""
    run_impl = gen_run_impl(out_root, verbose)
    if jobs == 1 or len(configs) <= 1:
        return [run_impl(c) for c in configs]
    return list(Parallel(n_jobs=jobs)(delayed(run_impl)(c) for c in configs))
