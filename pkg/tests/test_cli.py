import csv
import json

import pytest

from a2rabi.cli import CSV_COLUMNS, main


def run(argv, capsys):
    code = main(argv)
    return code, capsys.readouterr().out


def test_spectrum_decoupled(capsys):
    code, out = run(["spectrum", "--omega-a", "1", "--omega-c", "1", "--g", "0", "--C", "0", "-k", "4"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert [lv["energy"] for lv in doc["levels"]] == pytest.approx([0, 1, 1, 2], abs=1e-12)
    assert doc["susy"]["classification"] == "unbroken"
    assert doc["params"] == {"omega_a": 1.0, "omega_c": 1.0, "g": 0.0, "C": 0.0}
    assert doc["converged"] is True


def test_spectrum_strong_coupling_broken(capsys):
    code, out = run(
        ["spectrum", "--omega-a", "6.2832", "--omega-c", "6.2832", "--g", "25.1328",
         "--C", "0", "--shift", "paper", "-k", "4"],
        capsys,
    )
    doc = json.loads(out)
    assert code == 0
    assert doc["susy"]["classification"] == "spontaneously_broken"
    e = [lv["energy"] for lv in doc["levels"]]
    assert e[0] == pytest.approx(e[1], abs=1e-9)
    assert {doc["levels"][0]["parity"], doc["levels"][1]["parity"]} == {1, -1}
    # within the algebraic tail w/(16 (g/w)^2) of w/2
    assert e[0] == pytest.approx(3.1416, abs=0.03)


def test_malformed_flag_exits_2_without_output(tmp_path, capsys):
    out = tmp_path / "s.json"
    with pytest.raises(SystemExit) as exc:
        main(["spectrum", "--g", "abc", "--out", str(out)])
    assert exc.value.code == 2
    assert not out.exists()
    with pytest.raises(SystemExit) as exc:
        main(["spectrum", "--g", "-1", "--out", str(out)])
    assert exc.value.code == 2
    assert not out.exists()


def test_spectrum_unconverged_exit_3(tmp_path):
    out = tmp_path / "s.json"
    code = main(["spectrum", "--omega", "1", "--g", "3", "--n-max", "4",
                 "--max-doublings", "1", "--rel-tol", "1e-14", "--out", str(out)])
    assert code == 3
    assert json.loads(out.read_text())["converged"] is False


def test_sweep_explicit_grid_csv(tmp_path):
    out = tmp_path / "g.csv"
    code = main(["sweep", "--axis", "g", "--grid", "0:0.5:2", "--omega", "1", "--C", "0",
                 "-k", "4", "--out", str(out)])
    assert code == 0
    rows = list(csv.reader(out.open()))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert len(rows) == 1 + 5 * 4
    assert sorted({float(r[1]) for r in rows[1:]}) == [0, 0.5, 1, 1.5, 2]
    body = [(float(r[1]), float(r[3])) for r in rows[1:]]
    assert body == sorted(body)
    meta = json.loads(out.with_suffix(".json").read_text())
    assert meta["schema"] == "a2rabi.sweep/1"
    assert meta["spec"]["base"]["C"] == 0.0


def test_sweep_preset_fig2b_spacing(tmp_path):
    out = tmp_path / "fig2b.csv"
    assert main(["sweep", "--preset", "fig2b", "--out", str(out)]) == 0
    rows = [r for r in csv.DictReader(out.open()) if float(r["axis_value"]) == 1.0]
    e = sorted(float(r["energy"]) for r in rows)
    assert e[2] - e[0] == pytest.approx(20.335, rel=1e-4)


def test_sweep_output_is_byte_stable_and_jobs_independent(tmp_path):
    args = ["sweep", "--axis", "g", "--grid", "0:3:12", "--omega", "6.2832", "--C", "0.377"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(args + ["--out", str(a)])
    main(args + ["--out", str(b), "--jobs", "3"])
    assert a.read_bytes() == b.read_bytes()
    assert a.with_suffix(".json").read_bytes() == b.with_suffix(".json").read_bytes()


def test_sweep_json_format(tmp_path):
    out = tmp_path / "s.json"
    main(["sweep", "--axis", "r", "--grid", "0,0.5,1", "--C", "0", "--format", "json", "--out", str(out)])
    doc = json.loads(out.read_text())
    assert len(doc["rows"]) == 3 * 8 and doc["spec"]["axis"] == "r"


def test_verify_eq2_zero_c(tmp_path):
    out = tmp_path / "v.json"
    assert main(["verify", "--suite", "eq2", "--C", "0", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["passed"] and doc["reports"][0]["discrepancy"] == 0.0


def test_verify_eq3(capsys):
    code, out = run(["verify", "--suite", "eq3", "--g", "1"], capsys)
    assert code == 0
    rep = json.loads(out)["reports"][0]
    assert rep["residual"] < 1e-8 and rep["decreases_on_doubling"]


def test_verify_limits_eq6(capsys):
    code, out = run(["verify", "--suite", "limits", "--kind", "eq6", "--C", "0.3770"], capsys)
    assert code == 0
    assert json.loads(out)["reports"][0]["eventually_decreasing"]


def test_verify_breach_exit_4(capsys):
    # a deliberately loose cutoff makes the eq3 oracle fail
    code, out = run(["verify", "--suite", "eq3", "--g", "2", "--n-max", "12", "--k-subspace", "10"], capsys)
    assert code == 4
    assert json.loads(out)["passed"] is False


def test_presets_listing(capsys):
    code, out = run(["presets"], capsys)
    doc = json.loads(out)
    assert code == 0 and set(doc) == {"fig1a", "fig1b", "fig2a", "fig2b"}
    assert doc["fig1b"]["base"]["C"] == 0.377


def test_config_file_with_flag_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# decoupled point\nomega = 2\ng = 0\nk = 3\n")
    code, out = run(["--config", str(cfg), "spectrum"], capsys)
    assert [lv["energy"] for lv in json.loads(out)["levels"]] == pytest.approx([0, 2, 2])
    code, out = run(["--config", str(cfg), "spectrum", "--omega", "1"], capsys)
    assert [lv["energy"] for lv in json.loads(out)["levels"]] == pytest.approx([0, 1, 1])


def test_config_unknown_key_is_usage_error(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("frequency = 2\n")
    with pytest.raises(SystemExit) as exc:
        main(["--config", str(cfg), "spectrum"])
    assert exc.value.code == 2
