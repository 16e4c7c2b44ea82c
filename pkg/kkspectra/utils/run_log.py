from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from typing import Any, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from kkspectra.utils.cover_graph import CoverGraph  # noqa: E402
from kkspectra.utils.logger import Logger  # noqa: E402

plt.rcParams["svg.hashsalt"] = "kkspectra"


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _cell(x: Any) -> Any:
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, float):
        return "%.17g" % x
    return x


def table_log(table_file: str, header: Sequence[str], rows: Sequence[Sequence[Any]]) -> None:
    Logger.debug("Writing table to", table_file)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(x) for x in row])
    _atomic_write(table_file, buf.getvalue())


def json_log(json_file: str, doc: Any) -> None:
    Logger.debug("Writing json to", json_file)
    _atomic_write(json_file, json.dumps(doc, indent=2, sort_keys=True) + "\n")


def operator_log(
    operator_file: str, rows: int, cols: int, entries: Sequence[tuple[int, int, float]]
) -> None:
    Logger.debug("Writing operator to", operator_file)
    lines = [f"% {rows} {cols} {len(entries)}"]
    lines += [f"{i} {j} {v:.17g}" for i, j, v in entries]
    _atomic_write(operator_file, "\n".join(lines) + "\n")


def dot_log(dot_file: str, cover: CoverGraph) -> None:
    Logger.debug("Writing cover graph to", dot_file)
    _atomic_write(dot_file, cover.to_dot_str())


def plot_log(
    plot_file: str,
    series: dict[str, tuple[Sequence[float], Sequence[float]]],
    title: str,
    xlabel: str = "j",
    ylabel: str = "lambda",
    logy: bool = False,
) -> None:
    Logger.debug("Writing plot to", plot_file)
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, (xs, ys) in sorted(series.items()):
        ax.plot(xs, ys, marker="o", markersize=3, label=label)
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if logy:
        ax.set_yscale("log")
    if series:
        ax.legend(fontsize="small")
    buf = io.StringIO()
    fig.savefig(buf, format="svg", metadata={"Date": None})
    plt.close(fig)
    _atomic_write(plot_file, buf.getvalue())
