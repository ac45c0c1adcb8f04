"""CSV / JSON writers and readers for run artifacts.

Floats are written with ``repr`` (shortest round-trip form) so identical
runs produce byte-identical files.  Timestamps live only in ``metadata.json``.
"""

from __future__ import annotations

import csv
import json
import platform
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__

SNAPSHOT_COLUMNS = ("x", "v", "u", "theta", "omega", "V", "U", "Theta")
PROFILE_COLUMNS = ("t", "x", "V", "U", "Theta", "V_x", "U_x", "Theta_x")


def _fmt(value) -> str:
    return repr(float(value))


def write_csv(path, columns, data: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    arrays = [np.atleast_1d(np.asarray(data[c], dtype=float)) for c in columns]
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in zip(*arrays):
            writer.writerow([_fmt(v) for v in row])
    return path


def read_csv(path) -> dict[str, np.ndarray]:
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(v) for v in row] for row in reader]
    table = np.array(rows, dtype=float).reshape(len(rows), len(header))
    return {name: table[:, i] for i, name in enumerate(header)}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        val = float(obj)
        return val if np.isfinite(val) else str(val)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")
    return path


def write_metadata(out_dir, command: str) -> Path:
    return write_json(Path(out_dir) / "metadata.json", {
        "command": command,
        "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "version": __version__,
        "python": sys.version.split()[0],
        "numpy": np.__version__,
        "platform": platform.platform(),
    })


def snapshot_name(t: float) -> str:
    return f"snapshot_t{t:010.4f}.csv"


def snapshot_table(state, composite) -> dict:
    V, U, Theta, _ = composite.state_at(state.t, state.x)
    return {"x": state.x, "v": state.v, "u": state.u, "theta": state.theta, "omega": state.omega,
            "V": V, "U": U, "Theta": Theta}


def snapshot_writer(out_dir):
    """Sink for ``solver.run`` that writes one CSV per snapshot."""
    out_dir = Path(out_dir)

    def sink(state, composite):
        write_csv(out_dir / snapshot_name(state.t), SNAPSHOT_COLUMNS, snapshot_table(state, composite))

    return sink


def profile_table(field, times, x) -> dict:
    """Rows (t, x, V, U, Theta, V_x, U_x, Theta_x) over the product of ``times`` and ``x``."""
    x = np.asarray(x, dtype=float)
    cols = {c: [] for c in PROFILE_COLUMNS}
    for t in times:
        vals = field.evaluate(float(t), x)
        cols["t"].append(np.full(x.shape, float(t)))
        cols["x"].append(x)
        for name in PROFILE_COLUMNS[2:]:
            cols[name].append(getattr(vals, name))
    return {k: np.concatenate(v) for k, v in cols.items()}


def write_norms(path, reports) -> Path:
    rows = [r.row() for r in reports]
    columns = tuple(rows[0]) if rows else ("t",)
    return write_csv(path, columns, {c: [r[c] for r in rows] for c in columns})
