import xml.etree.ElementTree as ET

import numpy as np

from sweepdyn.integrator import Trajectory
from sweepdyn.io import atomic_write, read_trajectory_csv, trajectory_csv, write_trajectory_csv
from sweepdyn.model import LV
from sweepdyn.svg import Series, line_plot, nice_ticks


def test_csv_round_trip(tmp_path, baseline):
    path = write_trajectory_csv(baseline, tmp_path / "b.csv")
    cols, t, y = read_trajectory_csv(path)
    assert cols == ["N", "S", "W"]
    assert np.array_equal(t, baseline.times)
    assert np.array_equal(y, baseline.states)
    raw = path.read_bytes()
    assert raw.startswith(b"t,N,S,W\n") and b"\r" not in raw
    assert len(raw.splitlines()) == 4001


def test_csv_lv_header_and_precision():
    traj = Trajectory(np.array([1.0, 2.0]), np.array([[0.1, 1 / 3], [2.0, 1e-300]]), LV)
    text = trajectory_csv(traj)
    assert text.splitlines()[0] == "t,R,C"
    assert text.splitlines()[1] == "1,0.10000000000000001,0.33333333333333331"


def test_atomic_write_is_idempotent(tmp_path):
    p = atomic_write(tmp_path / "sub" / "x.txt", "one\n")
    atomic_write(p, "one\n")
    assert p.read_text() == "one\n"
    assert [f.name for f in p.parent.iterdir()] == ["x.txt"]


def test_nice_ticks():
    assert nice_ticks(0, 10) == [0, 2, 4, 6, 8, 10]
    assert nice_ticks(0.13, 0.91) == [0.2, 0.4, 0.6, 0.8]
    assert nice_ticks(3, 3) == [3]


def test_line_plot_is_valid_svg():
    x = np.linspace(0, 10, 20001)
    svg = line_plot(
        [Series("N <pop>", x, np.sin(x)), Series("S", x, 100 * np.cos(x), secondary=True)],
        title="t & s", xlabel="t", ylabel="N", ylabel_right="S", vlines=[5.0],
    )
    root = ET.fromstring(svg)
    ns = "{http://www.w3.org/2000/svg}"
    lines = root.findall(f".//{ns}polyline")
    assert len(lines) == 2
    # Long series are thinned but keep their last point.
    pts = lines[0].get("points").split()
    assert len(pts) <= 6001
    texts = "".join(el.text or "" for el in root.iter(f"{ns}text"))
    assert "N <pop>" in texts and "t & s" in texts
