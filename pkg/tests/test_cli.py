import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from softgrip.cli import main

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def by_variant(text):
    return {r["variant"]: r for r in rows(text)}


def test_deflect_unit_case(capsys):
    code, out, _ = run(capsys, "deflect")
    assert code == 0
    assert float(by_variant(out)["parallel"]["tip_deflection"]) == pytest.approx(0.208333, abs=1e-6)
    assert out == (GOLDEN / "deflect_unit.csv").read_text()


def test_deflect_zero_tendon_is_pure(capsys):
    _, out, _ = run(capsys, "deflect", "--k-t", "0")
    assert float(by_variant(out)["parallel"]["tip_deflection"]) == pytest.approx(1 / 3, abs=1e-6)


def test_deflect_rigid_optimum_is_zero(capsys):
    _, out, _ = run(capsys, "deflect", "--a", "-1", "--b", "1", "--rigid")
    assert float(by_variant(out)["convergent"]["tip_deflection"]) == 0.0


def test_deflect_profile(capsys, tmp_path):
    prof = tmp_path / "profile.csv"
    code, _, _ = run(capsys, "deflect", "--a", "-0.5", "--stations", "11", "--profile", str(prof))
    table = rows(prof.read_text())
    assert code == 0 and len(table) == 11 and list(table[0]) == ["s", "theta", "deflection"]


@pytest.mark.parametrize("argv", [["deflect", "--L", "-1"], ["deflect", "--p", "2"],
                                  ["deflect", "--b", "0"], ["deflect", "--k-t", "soft"]])
def test_deflect_bad_parameters(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 1 and "error" in err


def test_sweep_golden(capsys, tmp_path):
    svg = tmp_path / "fig5.svg"
    code, out, _ = run(capsys, "sweep-fig5", "--svg", str(svg))
    assert code == 0
    assert out == (GOLDEN / "fig5.csv").read_text()
    assert svg.read_text().startswith("<svg")


def test_sweep_golden_properties():
    table = rows((GOLDEN / "fig5.csv").read_text())
    assert len(table) == 101
    for r in table:
        assert float(r["pure"]) >= float(r["parallel"]) >= float(r["convergent"])
    last = table[-1]
    assert (float(last["pure"]), float(last["parallel"]), float(last["convergent"])) == \
        pytest.approx((1 / 3, 1 / 12, 0.0), abs=1e-12)
    assert all(float(v) == 0.0 for v in table[0].values())


def test_sweep_empty_grid(capsys):
    code, _, err = run(capsys, "sweep-fig5", "--points", "0")
    assert code == 1 and "empty" in err


def test_sweep_finite_tendon(capsys):
    _, out, _ = run(capsys, "sweep-fig5", "--points", "11", "--k-t", "5")
    for r in rows(out):
        assert float(r["pure"]) >= float(r["parallel"]) >= float(r["convergent"])


def test_oracle_commands(capsys):
    _, out, _ = run(capsys, "oracle", "--stations", "257")
    got = {r["quantity"]: r for r in rows(out)}
    assert float(got["tip_deflection"]["discretized"]) == pytest.approx(5 / 24, rel=1e-4)
    _, out, _ = run(capsys, "oracle", "--study", "--stations", "65")
    assert out == (GOLDEN / "oracle_study.csv").read_text()


def test_stability_explicit(capsys, tmp_path):
    trace = tmp_path / "t.csv"
    code, out, _ = run(capsys, "stability", "--duration", "0.01", "--dt", "1e-3", "--trace", str(trace))
    assert code == 0 and "not settled" in out
    assert trace.read_text() == (GOLDEN / "stability_trace.csv").read_text()


def test_stability_zero_strike(capsys):
    _, out, _ = run(capsys, "stability", "--omega0", "0", "--duration", "0.5")
    assert "settling 0.0000 s" in out


def test_stability_calibrate(capsys, tmp_path):
    report = tmp_path / "r.json"
    code, out, _ = run(capsys, "stability", "--calibrate", "--report", str(report))
    data = json.loads(report.read_text())
    assert code == 0
    base, pre = data["cases"]["baseline"], data["cases"]["pretensioned"]
    assert base["peak_deg"] == pytest.approx(25.0, rel=0.1) and base["settling_s"] == pytest.approx(2.5, rel=0.1)
    assert pre["peak_deg"] == pytest.approx(19.0, rel=0.1) and pre["settling_s"] == pytest.approx(1.8, rel=0.1)
    assert "residual peak_base" in out


def test_stability_doubled_k_smaller_peak(capsys, tmp_path):
    r1, r2 = tmp_path / "a.json", tmp_path / "b.json"
    run(capsys, "stability", "--duration", "2", "--report", str(r1))
    run(capsys, "stability", "--duration", "2", "--stiffness", "0.044", "--report", str(r2))
    peak = lambda p: json.loads(p.read_text())["cases"]["spec"]["peak_deg"]
    assert peak(r2) < peak(r1)


def test_stability_infeasible_calibration(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"calibration": {"strike_gain": 1.0}}))
    code, _, err = run(capsys, "--config", str(cfg), "stability", "--calibrate")
    assert code == 2 and "infeasible" in err


def test_bend(capsys, tmp_path):
    svg = tmp_path / "bend.svg"
    code, out, _ = run(capsys, "bend", "--svg", str(svg), "--reference", "40,90")
    assert code == 0 and out == (GOLDEN / "bend_default.csv").read_text()
    first = rows(out)[0]
    assert (float(first["tip_x"]), float(first["tip_y"])) == (0.0, 110.0)
    angles = [float(r["bend_deg"]) for r in rows(out)]
    assert angles == sorted(angles)
    assert "<circle" in svg.read_text()


def test_bend_preload(capsys):
    _, out, _ = run(capsys, "bend", "--preload", "1", "--steps", "3")
    first = rows(out)[0]
    assert float(first["tip_x"]) > 0 and float(first["tip_y"]) < 110


def test_bend_bad_reference(capsys):
    with pytest.raises(SystemExit):
        main(["bend", "--reference", "oops"])


def test_policy_commands(capsys):
    assert run(capsys, "policy", "classify", "jelly")[1].startswith("jelly: level 0")
    assert "level 4" in run(capsys, "policy", "classify", "dumbbells")[1]
    code, _, err = run(capsys, "policy", "classify", "zxqv")
    assert code == 1 and "zxqv" in err
    assert "level 1" in run(capsys, "policy", "classify", "durian", "--hint", "deformable")[1]
    _, out, _ = run(capsys, "policy", "adapt", "durian", "--level", "1", "--failure", "slip", "--cue", "hard")
    assert out.strip().endswith("level 3")
    _, out, _ = run(capsys, "policy", "table", "--spring", "3", "--tendon", "3", "--material", "3")
    assert out == (GOLDEN / "policy_table.csv").read_text()


def test_agent_run_durian(capsys, tmp_path):
    ledger = tmp_path / "episodes.jsonl"
    dump = tmp_path / "ep.json"
    code, out, _ = run(capsys, "agent-run", "durian_lowlight", "--ledger", str(ledger), "--json", str(dump))
    assert code == 0
    assert "attempt 1: level 1" in out and "adapt to level 3" in out
    assert "attempt 2: level 3" in out and "status: correct" in out
    assert dump.read_text() == (GOLDEN / "durian_episode.json").read_text()
    assert len(ledger.read_text().splitlines()) == 2


@pytest.mark.parametrize("name", ["empty_table", "gripper_only"])
def test_agent_run_no_target(capsys, name):
    code, out, _ = run(capsys, "agent-run", name)
    assert code == 0 and "no target" in out


def test_agent_run_abnormal(capsys):
    code, out, _ = run(capsys, "agent-run", "durian_lowlight", "--max-retries", "0")
    assert code == 3 and "status: abnormal" in out


def test_agent_run_live_endpoint_down(capsys):
    code, out, _ = run(capsys, "agent-run", "pear", "--live", "http://127.0.0.1:9/", "--timeout", "1")
    assert code == 4 and "aborted" in out


def test_agent_run_missing_fixtures(capsys, tmp_path):
    from importlib import resources
    img = Path(str(resources.files("softgrip.data") / "fixtures" / "pear.ppm"))
    code, _, err = run(capsys, "agent-run", str(img), "--fixtures", str(tmp_path))
    assert code == 1 and "index.json" in err
    code, _, _ = run(capsys, "agent-run", "nothing_here")
    assert code == 1


def test_agent_run_stochastic(capsys):
    code, out, _ = run(capsys, "agent-run", "pear", "--executor", "stochastic", "--true-level", "1", "--seed", "3")
    assert code in (0, 3) and "attempt 1: level 1" in out
    assert run(capsys, "agent-run", "pear", "--executor", "stochastic")[0] == 1


def test_enhance_command(capsys, tmp_path):
    from importlib import resources
    src = Path(str(resources.files("softgrip.data") / "fixtures" / "durian_lowlight.ppm"))
    out_path = tmp_path / "out.ppm"
    code, out, _ = run(capsys, "enhance", str(src), str(out_path))
    assert code == 0 and out.startswith("mode brighten")
    before, after = (float(v) for v in out.split("mean luma ")[1].split(" -> "))
    assert after > before
    code, out, _ = run(capsys, "enhance", str(src), str(out_path), "--mode", "none")
    assert out_path.read_bytes() == src.read_bytes()


def test_config_flag_and_env(capsys, tmp_path, monkeypatch):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"routing": {"k_t": "rigid"}}))
    _, out, _ = run(capsys, "--config", str(cfg), "deflect")
    assert by_variant(out)["parallel"]["k_t"] == "rigid"
    monkeypatch.setenv("SOFTGRIP_CONFIG", str(cfg))
    _, out, _ = run(capsys, "deflect", "--k-t", "1")
    assert by_variant(out)["parallel"]["k_t"] == "1"  # flag wins
    cfg.write_text('{"nope": 1}')
    assert run(capsys, "deflect")[0] == 1


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "softgrip.cli", "policy", "classify", "jelly"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "level 0" in proc.stdout
