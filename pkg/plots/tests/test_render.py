"""Render tests against real simulation outputs.

Outputs are produced through the simulator's public CLI (its external
interface); the figures must come out of the CSV + meta files alone.
The acceptance check: all three figure kinds render from the
endpoint-coupled preset and the spacetime figure carries the cone and
t-infinity overlays taken from meta.json.
"""

import json
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from waveplots import PlotRequest, SchemaError, render

PRESET = "endpoint_coupled_leak.json"


@pytest.fixture(scope="session")
def run_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("leak_run")
    preset = subprocess.run(
        [
            sys.executable,
            "-c",
            "from importlib import resources; "
            "print(resources.files('staticwave.cli_io') / 'presets' / '%s')" % PRESET,
        ],
        capture_output=True,
        text=True,
        check=True,
    ).stdout.strip()
    subprocess.run(
        ["staticwave", "simulate", "--config", preset, "--out", str(out)],
        check=True,
        capture_output=True,
    )
    return out


def test_acceptance_all_three_kinds_render(run_dir, tmp_path):
    results = {}
    for kind in ("snapshots", "conserved", "spacetime"):
        res = render(PlotRequest(str(run_dir), kind, str(tmp_path / f"{kind}.png")))
        assert res.path.exists() and res.path.stat().st_size > 0, kind
        results[kind] = res
    overlays = results["spacetime"].overlays
    ok = "cone" in overlays and "t_infinity" in overlays
    print(f"[{'PASS' if ok else 'FAIL'}] plot suite renders all kinds; spacetime overlays: {overlays}")
    assert ok


def test_overlay_values_come_from_meta(run_dir):
    meta = json.loads((run_dir / "meta.json").read_text())
    assert meta["geometry"]["support"] == [[0, 0.5, 0.75]]
    assert meta["geometry"]["t_infinity"] == pytest.approx(0.25)


def test_conserved_flat_line_renders(tmp_path):
    # minimal hand-built run: constant energy gives a flat line plot
    (tmp_path / "meta.json").write_text(json.dumps({"geometry": {}}))
    rows = ["t,energy,symplectic,leakage,phi_norm"]
    rows += [f"{t},1.5,0.25,0.0,1.0" for t in (0.0, 0.5, 1.0)]
    (tmp_path / "conserved.csv").write_text("\n".join(rows) + "\n")
    res = render(PlotRequest(str(tmp_path), "conserved", str(tmp_path / "c.png")))
    assert res.path.exists()


def test_schema_mismatch_names_columns(tmp_path):
    (tmp_path / "meta.json").write_text(json.dumps({"geometry": {}}))
    (tmp_path / "conserved.csv").write_text("t,energy\n0.0,1.0\n")
    with pytest.raises(SchemaError) as err:
        render(PlotRequest(str(tmp_path), "conserved", str(tmp_path / "c.png")))
    assert "symplectic" in err.value.missing
    assert not (tmp_path / "c.png").exists()


def test_empty_snapshots_error_no_file(tmp_path):
    (tmp_path / "meta.json").write_text(json.dumps({"geometry": {}}))
    (tmp_path / "snapshots.csv").write_text("t,x,phi_re,phi_im,phidot_re,phidot_im\n")
    with pytest.raises(ValueError):
        render(PlotRequest(str(tmp_path), "spacetime", str(tmp_path / "s.png")))
    assert not (tmp_path / "s.png").exists()


def test_cli_roundtrip(run_dir, tmp_path):
    assert shutil.which("plots"), "console script not installed"
    r = subprocess.run(
        ["plots", "spacetime", "--in", str(run_dir), "--out", str(tmp_path / "st.png")],
        capture_output=True,
        text=True,
    )
    assert r.returncode == 0, r.stderr
    assert "overlays" in r.stdout
    assert (tmp_path / "st.png").stat().st_size > 0

    r_bad = subprocess.run(
        ["plots", "conserved", "--in", str(tmp_path), "--out", str(tmp_path / "x.png")],
        capture_output=True,
        text=True,
    )
    assert r_bad.returncode == 1
