"""Table rendering and figure output for the command-line front end.

Every command renders rows through one of three formats: ``csv`` (a header
comment line, then standard CSV), ``markdown`` (a heading plus a pipe
table), or ``records`` (one JSON object per line, preceded by a meta
record).  Output is deterministic: no timestamps, stable float formatting,
canonical row order supplied by the caller.  Files are written atomically
via a temp file and rename.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import ConfigurationError

FORMATS = ("csv", "markdown", "records")


def format_value(value: object) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, Fraction):
        value = float(value)
    if isinstance(value, float):
        return format(value, ".10g")
    return str(value)


def render_table(
    columns: Sequence[str],
    rows: Iterable[Mapping[str, object]],
    fmt: str,
    *,
    title: str,
) -> str:
    if fmt == "csv":
        return _render_csv(columns, rows, title)
    if fmt == "markdown":
        return _render_markdown(columns, rows, title)
    if fmt == "records":
        return _render_records(columns, rows, title)
    raise ConfigurationError(f"unknown output format {fmt!r} (use one of {FORMATS})")


def _render_csv(columns, rows, title) -> str:
    buffer = io.StringIO()
    buffer.write(f"# {title}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row.get(c)) for c in columns])
    return buffer.getvalue()


def _render_markdown(columns, rows, title) -> str:
    lines = [f"# {title}", "", "| " + " | ".join(columns) + " |"]
    lines.append("|" + "|".join(" --- " for _ in columns) + "|")
    for row in rows:
        lines.append("| " + " | ".join(format_value(row.get(c)) for c in columns) + " |")
    return "\n".join(lines) + "\n"


def _render_records(columns, rows, title) -> str:
    lines = [json.dumps({"_meta": title}, ensure_ascii=False, sort_keys=True)]
    for row in rows:
        record = {c: _json_value(row.get(c)) for c in columns}
        lines.append(json.dumps(record, ensure_ascii=False, sort_keys=True))
    return "\n".join(lines) + "\n"


def _json_value(value: object):
    if isinstance(value, Fraction):
        return float(value)
    if isinstance(value, float) or value is None or isinstance(value, (int, str, bool)):
        return value
    return str(value)


def atomic_write(path: str | Path, text: str) -> None:
    """Write the full text or nothing: temp file in place, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def render_sweep_figure(sweep, path: str | Path) -> None:
    """Line plot of mean DICE against the TYPE-insertion probability."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(sweep.probabilities, sweep.mean_dice, marker="o", label=sweep.algorithm)
    ax.set_xlabel("probability of inserting TYPE")
    ax.set_ylabel("mean DICE")
    ax.set_xlim(-0.02, 1.02)
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_evaluation_figure(summaries, path: str | Path) -> None:
    """Bar chart of mean DICE per evaluation cell."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    labels = [
        "/".join(part for part in (s.algorithm, s.domain, s.position) if part != "all")
        for s in summaries
    ]
    values = [s.mean_dice for s in summaries]
    fig, ax = plt.subplots(figsize=(max(6, 0.9 * len(labels)), 4))
    ax.bar(range(len(labels)), values)
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("mean DICE")
    ax.set_ylim(0, 1.05)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
