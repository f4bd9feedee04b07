"""
Trace IO Module
JSONL interchange for runs: a header line, then one line per step
"""

import json
import logging
from pathlib import Path
from typing import Dict, List, Sequence, Union

from backend.errors import PrccslError, TraceFormatError
from backend.trace.run import Run, build_run

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
TRACE_PATTERN = "run_*.jsonl"


def _dump(obj: dict) -> str:
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)


def dumps_trace(run: Run) -> str:
    """
    Serialize a run to JSONL text

    Args:
        run: Run to serialize

    Returns:
        Header line plus one line per step, newline terminated
    """
    signals = list(run.signals)
    header = {"n": run.n, "clocks": list(run.clocks), "signals": signals, "meta": dict(run.meta)}
    lines = [_dump(header)]

    ticking: List[List[str]] = [[] for _ in range(run.num_steps)]
    for c in run.clocks:
        for step in run.ticks(c):
            ticking[int(step)].append(c)

    for i in range(run.num_steps):
        record = {"step": i, "ticks": ticking[i]}
        if signals:
            record["values"] = {name: int(run.signals[name][i]) for name in signals}
        lines.append(_dump(record))
    return "\n".join(lines) + "\n"


def loads_trace(text: str) -> Run:
    """
    Parse JSONL trace text into a run

    Args:
        text: Trace text as written by dumps_trace

    Returns:
        Run
    """
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise TraceFormatError("trace is empty")

    try:
        header = json.loads(lines[0])
        n = int(header["n"])
        clocks = [str(c) for c in header["clocks"]]
        signal_names = [str(s) for s in header.get("signals", [])]
        meta = header.get("meta", {})
    except (ValueError, KeyError, TypeError) as e:
        raise TraceFormatError(f"bad trace header: {e}") from e

    if len(lines) - 1 != n + 1:
        raise TraceFormatError(f"expected {n + 1} step lines, found {len(lines) - 1}")

    ticks: Dict[str, List[int]] = {c: [] for c in clocks}
    signals: Dict[str, List[int]] = {s: [] for s in signal_names}
    for expected, line in enumerate(lines[1:]):
        try:
            record = json.loads(line)
            step = int(record["step"])
            names = record["ticks"]
            values = record.get("values", {})
        except (ValueError, KeyError, TypeError) as e:
            raise TraceFormatError(f"bad step line {expected}: {e}") from e
        if step != expected:
            raise TraceFormatError(f"step {step} out of order, expected {expected}")
        for c in names:
            if c not in ticks:
                raise TraceFormatError(f"step {step} ticks undeclared clock '{c}'")
            ticks[c].append(step)
        for s in signal_names:
            if s not in values:
                raise TraceFormatError(f"step {step} lacks a value for '{s}'")
            signals[s].append(int(values[s]))

    try:
        return build_run(ticks, n, clocks=clocks, signals=signals or None, meta=meta)
    except PrccslError as e:
        raise TraceFormatError(str(e)) from e


def write_trace(run: Run, path: PathLike) -> Path:
    """Write one run to a JSONL file"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(dumps_trace(run))
    return path


def read_trace(path: PathLike) -> Run:
    """Read one run from a JSONL file"""
    with open(path, "r", encoding="utf-8") as f:
        return loads_trace(f.read())


def trace_filename(j: int) -> str:
    return f"run_{j:05d}.jsonl"


def write_traces(runs: Sequence[Run], out_dir: PathLike) -> List[Path]:
    """
    Write an ensemble as run_00000.jsonl, run_00001.jsonl, ...

    Args:
        runs: Runs in stream order
        out_dir: Target directory (created if missing)

    Returns:
        Written paths
    """
    out_dir = Path(out_dir)
    paths = [write_trace(run, out_dir / trace_filename(j)) for j, run in enumerate(runs)]
    logger.info("Wrote %d traces to %s", len(paths), out_dir)
    return paths


def read_trace_dir(trace_dir: PathLike) -> List[Run]:
    """Read every run_*.jsonl file of a directory, ordered by file name"""
    trace_dir = Path(trace_dir)
    if not trace_dir.is_dir():
        raise FileNotFoundError(f"trace directory not found: {trace_dir}")
    paths = sorted(trace_dir.glob(TRACE_PATTERN))
    logger.info("Reading %d traces from %s", len(paths), trace_dir)
    return [read_trace(p) for p in paths]
