"""CLI behavior: formats, determinism, exit codes."""

import json

import numpy as np
import pytest

from steerkit import cli, states


def run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_bounds_csv_format(capsys):
    code, out, err = run(capsys, "bounds", "--state", "werner",
                         "--p-range", "0:1:5")
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "p,s_min,s_max,s_max_r,t_rncsr,t_csr"
    assert len(lines) == 6
    grid = [float(line.split(",")[0]) for line in lines[1:]]
    assert grid == [0.0, 0.25, 0.5, 0.75, 1.0]


def test_bounds_single_point(capsys):
    code, out, _ = run(capsys, "bounds", "--state", "horodecki", "--p", "0.5")
    assert code == 0
    row = out.strip().split("\n")[1].split(",")
    assert all(abs(float(v)) < 1e-6 for v in row[1:])


def test_bounds_bell2_singlet(capsys):
    code, out, _ = run(capsys, "bounds", "--state", "bell2", "--p", "1.0")
    assert code == 0
    s_min = float(out.strip().split("\n")[1].split(",")[1])
    assert s_min == pytest.approx((1 - 1 / np.sqrt(3)) / 4, abs=1e-6)


def test_bounds_deterministic_and_jobs_invariant(capsys):
    args = ("bounds", "--state", "werner", "--p-range", "0.5:0.9:3")
    _, out1, _ = run(capsys, *args)
    _, out2, _ = run(capsys, *args)
    _, out3, _ = run(capsys, *args, "--jobs", "4")
    assert out1 == out2 == out3


def test_bounds_config_errors(capsys):
    code, _, err = run(capsys, "bounds", "--state", "nope", "--p", "0.5")
    assert code == 2 and "unknown state" in err
    code, _, _ = run(capsys, "bounds", "--state", "werner",
                     "--p-range", "0.9:0.1:5")
    assert code == 2
    code, _, _ = run(capsys, "bounds", "--state", "werner")
    assert code == 2
    code, _, _ = run(capsys, "bounds", "--state", "werner", "--p", "0.5",
                     "--p-range", "0:1:3")
    assert code == 2


def test_qse_output(capsys):
    code, out, _ = run(capsys, "qse", "--state", "werner", "--p", "0.6")
    assert code == 0
    data = json.loads(out)
    assert np.allclose(data["semiaxes"], [0.6, 0.6, 0.6], atol=1e-9)
    code, out, _ = run(capsys, "qse", "--state", "bell2", "--p", "0.5")
    data = json.loads(out)
    assert np.allclose(data["semiaxes"], [1.0, 0.0, 0.0], atol=1e-9)
    assert data["volume"] == pytest.approx(0.0)


def test_qse_singular_exit_code(capsys):
    code, _, err = run(capsys, "qse", "--state", "horodecki", "--p", "0")
    assert code == 4
    assert "1 - 1e-9" in err  # names the singularity condition


def test_lhs_surface_outputs(tmp_path, capsys):
    out_path = tmp_path / "cloud.txt"
    code, out, _ = run(capsys, "lhs-surface", "--state", "werner", "--p", "0.4",
                       "--samples", "8", "--seed", "3", "--out", str(out_path))
    assert code == 0
    summary = json.loads(out)
    assert summary["seed"] == 3 and summary["n_samples"] == 8
    rows = out_path.read_text().strip().split("\n")
    assert len(rows) == 48
    radii = [np.linalg.norm([float(v) for v in r.split()[1:]]) for r in rows]
    assert all(abs(r - 0.4) < 1e-4 for r in radii)


def test_lhs_surface_seed_env_fallback(capsys, monkeypatch):
    monkeypatch.setenv("STEERKIT_SEED", "17")
    code, out, _ = run(capsys, "lhs-surface", "--state", "werner", "--p", "0.3",
                       "--samples", "4")
    assert code == 0
    summary = json.loads(out.strip().split("\n")[-1])
    assert summary["seed"] == 17
    monkeypatch.setenv("STEERKIT_SEED", "not-a-number")
    code, _, _ = run(capsys, "lhs-surface", "--state", "werner", "--p", "0.3",
                     "--samples", "2")
    assert code == 2


def test_assemblage_round_trip(tmp_path, capsys):
    from steerkit import steering
    code, out, _ = run(capsys, "assemblage", "--state", "werner", "--p", "1",
                       "--triad", "default")
    assert code == 0
    asm = steering.Assemblage.from_json(out)
    ref = steering.assemblage_from_state(states.werner(1.0),
                                         states.pauli_triad())
    assert np.allclose(asm.members, ref.members, atol=1e-12)
    # maximally mixed input: every member is I/4
    state_path = tmp_path / "mixed.json"
    state_path.write_text(states.state_to_json(np.eye(4, dtype=complex) / 4))
    code, out, _ = run(capsys, "assemblage", "--state",
                       f"file:{state_path}")
    asm = steering.Assemblage.from_json(out)
    assert np.allclose(asm.members, np.eye(2) / 4, atol=1e-12)


def test_assemblage_triad_specs(capsys):
    code, out1, _ = run(capsys, "assemblage", "--state", "werner", "--p", "0.7",
                        "--triad", "zrot:0.5")
    assert code == 0
    c, s = np.cos(0.5), np.sin(0.5)
    mat = f"matrix:{c},{-s},0,{s},{c},0,0,0,1"
    code, out2, _ = run(capsys, "assemblage", "--state", "werner", "--p", "0.7",
                        "--triad", mat)
    assert code == 0
    assert out1 == out2
    code, _, _ = run(capsys, "assemblage", "--state", "werner", "--p", "0.7",
                     "--triad", "matrix:1,2,3")
    assert code == 2
    code, _, _ = run(capsys, "assemblage", "--state", "werner", "--p", "0.7",
                     "--triad", "matrix:1,1,0,0,1,0,0,0,1")
    assert code == 2  # not orthogonal
    code, _, _ = run(capsys, "assemblage", "--state", "werner", "--p", "0.7",
                     "--triad", "spiral")
    assert code == 2


def test_state_file_errors(tmp_path, capsys):
    code, _, _ = run(capsys, "qse", "--state", "file:/does/not/exist")
    assert code == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"dim": 4, "re": [[1]], "im": [[0]]}')
    code, _, _ = run(capsys, "qse", "--state", f"file:{bad}")
    assert code == 4
