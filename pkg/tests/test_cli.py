import io
import math

import numpy as np
import pytest

from logdmo import cli
from logdmo.fk import Section
from logdmo.gridio import read_csv, read_section, write_section
from logdmo.pipeline import paint_impulse
from logdmo.wavelets import ricker

SMALL = ["--nt", "128", "--nx", "32", "--t", "0.3", "--h", "100"]


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def table(text):
    return read_csv(io.StringIO(text))


def test_phase_exact_rows(capsys):
    code, out, _ = run(capsys, "phase", "--operator", "exact", "--omega", "1", "--xi-max", "1", "--samples", "3")
    assert code == 0
    t = table(out)
    assert t["xi"] == [0.0, 0.5, 1.0]
    assert t["phase"][0] == 0.0
    assert t["phase"][1] == pytest.approx(0.5 * (math.sqrt(2) - 1 - math.log((math.sqrt(2) + 1) / 2)), abs=1e-15)
    assert t["phase"][2] == pytest.approx(0.37742807622009312, abs=1e-15)
    assert set(t["validity"]) == {"valid"}


def test_phase_bale_turns_singular(capsys):
    code, out, _ = run(capsys, "phase", "--operator", "bale", "--xi-max", "2", "--samples", "5")
    t = table(out)
    assert code == 0
    assert t["validity"] == ["valid", "valid", "singular", "singular", "singular"]
    assert all(math.isnan(v) for v in t["phase"][2:])


def test_phase_liner_reports_amplitude(capsys):
    _, out, _ = run(capsys, "phase", "--operator", "liner", "--xi-max", "1", "--samples", "2")
    assert table(out)["amplitude"][1] == pytest.approx(0.85065080835203993, abs=1e-15)


def test_phase_rejects_one_sample(capsys):
    code, out, err = run(capsys, "phase", "--operator", "exact", "--samples", "1")
    assert code == 2 and out == "" and "samples" in err


def test_unknown_flag_and_operator_are_usage_errors(capsys):
    with pytest.raises(SystemExit) as e:
        cli.main(["phase", "--operator", "exact", "--bogus"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        cli.main(["phase", "--operator", "stolt"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        cli.main(["impulse", "--out", "x", "--dt", "-1"])
    assert e.value.code == 2


def test_phase_to_file(tmp_path, capsys):
    path = tmp_path / "p.csv"
    code, out, _ = run(capsys, "phase", "--operator", "notfors", "--samples", "2", "--out", str(path))
    assert code == 0 and out == ""
    assert read_csv(path)["phase"][1] == pytest.approx(math.sqrt(2) - 1)


def test_impulse_zero_offset_is_painted_input(tmp_path, capsys):
    path = tmp_path / "r.fkg"
    argv = ["impulse", "--nt", "128", "--nx", "32", "--t", "0.3", "--h", "0", "--out", str(path)]
    assert run(capsys, *argv)[0] == 0
    resp = read_section(path)
    geo = Section(np.zeros((128, 32)), 0.004, 12.5, 0.004, -16 * 12.5, 0.0)
    painted = paint_impulse(geo, 0.3, 0.0, ricker(30.0, 0.004))
    expected = painted.grid.astype(np.float32)
    assert np.linalg.norm(resp.grid - expected) <= 1e-9 * np.linalg.norm(expected)
    assert resp.same_geometry(geo)


def test_impulse_outside_grid(tmp_path, capsys):
    code, _, err = run(capsys, "impulse", *SMALL[:4], "--t", "9.0", "--out", str(tmp_path / "r.fkg"))
    assert code == 2 and err
    assert not (tmp_path / "r.fkg").exists()


def test_apply_matches_impulse_path(tmp_path, capsys):
    resp = tmp_path / "r.fkg"
    assert run(capsys, "impulse", *SMALL, "--threads", "1", "--out", str(resp))[0] == 0
    painted = paint_impulse(
        Section(np.zeros((128, 32)), 0.004, 12.5, 0.004, -16 * 12.5, 100.0), 0.3, 0.0, ricker(30.0, 0.004)
    )
    src = tmp_path / "in.fkg"
    write_section(painted, src)
    out = tmp_path / "out.fkg"
    assert run(capsys, "apply", "--in", str(src), "--out", str(out), "--threads", "2")[0] == 0
    # the impulse path runs on the float64 painting, apply on its float32 copy
    a, b = read_section(resp).grid, read_section(out).grid
    assert np.max(np.abs(a - b)) <= 1e-6 * np.max(np.abs(a))


def test_apply_is_deterministic(tmp_path, capsys, rng):
    src = tmp_path / "in.fkg"
    write_section(Section(rng.standard_normal((64, 16)), 0.004, 10.0, 0.004, 0.0, 80.0), src)
    outs = []
    for threads in ("1", "3"):
        out = tmp_path / f"o{threads}.fkg"
        assert run(capsys, "apply", "--in", str(src), "--out", str(out), "--threads", threads)[0] == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_apply_zero_section(tmp_path, capsys):
    src = tmp_path / "z.fkg"
    write_section(Section(np.zeros((32, 8)), 0.004, 10.0, 0.004, 0.0, 80.0), src)
    out = tmp_path / "o.fkg"
    assert run(capsys, "apply", "--in", str(src), "--out", str(out))[0] == 0
    assert not read_section(out).grid.any()


def test_apply_missing_input(tmp_path, capsys):
    code, _, err = run(capsys, "apply", "--in", str(tmp_path / "nope.fkg"), "--out", str(tmp_path / "o.fkg"))
    assert code == 1 and "nope.fkg" in err


def test_apply_corrupt_input(tmp_path, capsys):
    src = tmp_path / "bad.fkg"
    src.write_bytes(b"XXXX" + bytes(60))
    assert run(capsys, "apply", "--in", str(src), "--out", str(tmp_path / "o.fkg"))[0] == 1


def test_decompose_rows(capsys):
    code, out, _ = run(capsys, "decompose", "--operator", "notfors", "--xi-list", "0,0.5,1", "--h", "500")
    t = table(out)
    assert code == 0
    assert t["time_phase"] == [0.0, 0.0, 0.0]
    assert t["space_shift"][2] == pytest.approx(-207.10678, abs=1e-5)
    _, out, _ = run(capsys, "decompose", "--operator", "exact", "--xi-list", "0,0.3,2,40")
    t = table(out)
    assert t["total"][0] == 0.0
    for total, ref in zip(t["total"], t["kernel_phase"]):
        assert abs(total - ref) <= 1e-12 * max(1.0, abs(ref))


def test_decompose_rejects_zero_omega(capsys):
    assert run(capsys, "decompose", "--operator", "exact", "--xi-list", "1", "--omega", "0")[0] == 2


def test_asymptote_columns(capsys):
    code, out, _ = run(capsys, "asymptote", "--xi-min", "1e-3", "--xi-max", "100", "--samples", "3")
    t = table(out)
    assert code == 0
    assert t["xi"][0] == pytest.approx(1e-3) and t["xi"][-1] == pytest.approx(100.0)
    assert t["large_ratio_notfors"][-1] == pytest.approx(0.9900499987500625, abs=1e-14)
    assert run(capsys, "asymptote", "--xi-min", "2", "--xi-max", "1")[0] == 2


def test_oracle_ellipse_endpoints(capsys):
    code, out, _ = run(capsys, "oracle", "--method", "ellipse", "--tn", "1", "--h", "500", "--points", "5")
    t = table(out)
    assert code == 0
    assert (t["x0"][0], t["t0"][0]) == (-500.0, 0.0)
    assert (t["x0"][-1], t["t0"][-1]) == (500.0, 0.0)
    assert t["t0"][2] == 1.0


def test_oracle_hale_black_compare(capsys):
    code, out, err = run(capsys, "oracle", "--method", "hale", "--nomega", "16", "--nk", "16", "--compare")
    assert code == 0
    worst = float(err.split("=")[1].split()[0])
    assert worst <= 1e-10
    t = table(out)
    assert len(t["phase_diff"]) == 256


def test_oracle_refuses_oversized_grid(capsys):
    assert run(capsys, "oracle", "--method", "black", "--nomega", "129")[0] == 2
    assert run(capsys, "oracle", "--method", "black", "--nt", "200")[0] == 2


def test_oracle_is_seeded(capsys):
    argv = ("oracle", "--method", "black", "--nomega", "8", "--nk", "8", "--seed", "7")
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


def test_compare_reports_ridge(tmp_path, capsys):
    resp = tmp_path / "r.fkg"
    assert run(capsys, "impulse", *SMALL, "--out", str(resp))[0] == 0
    code, out, err = run(capsys, "compare", "--response", str(resp), "--tn", "0.3")
    assert code == 0 and "max |residual|" in err
    t = table(out)
    assert max(abs(v) for v in t["x"]) <= 80.0
    assert run(capsys, "compare", "--response", str(resp), "--tn", "0.3", "--h", "50")[0] == 2
