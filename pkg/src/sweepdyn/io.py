"""Flat-file output: trajectory CSV, JSON documents, atomic writes."""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

import numpy as np

from sweepdyn.integrator import Trajectory


def atomic_write(path, text: str) -> Path:
    """Write ``text`` to ``path`` through a temporary file and a rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def _g(v: float) -> str:
    return format(float(v), ".17g")


def trajectory_csv(traj: Trajectory) -> str:
    lines = [",".join(("t",) + traj.model.components)]
    for t, row in zip(traj.times, traj.states):
        lines.append(",".join([_g(t)] + [_g(v) for v in row]))
    return "\n".join(lines) + "\n"


def write_trajectory_csv(traj: Trajectory, path) -> Path:
    return atomic_write(path, trajectory_csv(traj))


def read_trajectory_csv(path) -> tuple[list[str], np.ndarray, np.ndarray]:
    """Return ``(columns, times, states)`` from a trajectory CSV."""
    with open(path, newline="") as fh:
        header = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return header[1:], data[:, 0], data[:, 1:]


def write_json(doc, path) -> Path:
    return atomic_write(path, json.dumps(doc, indent=2) + "\n")
