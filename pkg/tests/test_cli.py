import json
import os

import pytest

from qpcsim.cli import EXIT_CHECK_FAILED, EXIT_CONFIG_ERROR, EXIT_OK, main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_verify_passes_and_is_deterministic(capsys):
    code1, out1 = run_cli(capsys, "verify")
    code2, out2 = run_cli(capsys, "verify")
    assert code1 == code2 == EXIT_OK
    assert out1 == out2  # byte identical
    lines = out1.strip().splitlines()
    assert lines[0] == "check,value,status"
    assert len(lines) == 1 + 9 + 1 + 1  # header, identities, table, constraints
    assert all(line.endswith("pass") or ",pass" in line for line in lines[1:])


def test_verify_threshold_failure(capsys):
    code, out = run_cli(capsys, "verify", "--threshold", "1e-20")
    assert code == EXIT_CHECK_FAILED
    assert "fail" in out


def test_run_report_and_transcript(tmp_path, capsys):
    out_path = tmp_path / "report.json"
    code = main(["run", "--l", "4", "--delta", "1", "--d", "2", "--seed", "5",
                 "--m1", "a", "--m2", "a", "--m3", "5",
                 "--output", str(out_path)])
    assert code == EXIT_OK
    report = json.loads(out_path.read_text())
    assert report["outcome"] == "NotAllEqual"
    transcript = tmp_path / "report.json.transcript.jsonl"
    assert transcript.exists()
    for line in transcript.read_text().splitlines():
        msg = json.loads(line)
        assert {"step", "from", "to", "kind", "payload", "channel"} == set(msg)


def test_run_same_seed_same_bytes(tmp_path):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert main(["run", "--l", "2", "--seed", "9", "--m1", "1",
                     "--m2", "1", "--m3", "1", "--output", str(p)]) == EXIT_OK
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_run_config_errors(capsys):
    code, _ = run_cli(capsys, "run", "--l", "2", "--m1", "zz",
                      "--m2", "0", "--m3", "0")
    assert code == EXIT_CONFIG_ERROR
    code, _ = run_cli(capsys, "run", "--l", "2", "--m1", "7",
                      "--m2", "0", "--m3", "0")  # 7 needs 3 bits
    assert code == EXIT_CONFIG_ERROR
    code, _ = run_cli(capsys, "run", "--l", "2", "--m1", "0", "--m2", "0",
                      "--m3", "0", "--adversary", "quantum-bogeyman")
    assert code == EXIT_CONFIG_ERROR
    code, _ = run_cli(capsys, "run", "--l", "2", "--m1", "0", "--m2", "0",
                      "--m3", "0", "--channel", "wormhole")
    assert code == EXIT_CONFIG_ERROR


def test_attack_trials_csv(capsys):
    code, out = run_cli(capsys, "attack", "--kind", "intercept-resend",
                        "--trials", "25", "--d", "3", "--seed", "2")
    assert code == EXIT_OK
    lines = out.strip().splitlines()
    assert lines[0] == "trial,detected,step_of_detection,error_rate"
    assert len(lines) == 26
    detected = [line.split(",")[1] for line in lines[1:]]
    assert set(detected) <= {"0", "1"}
    assert "1" in detected  # d=3 detects most intercept-resend sessions


def test_attack_constraints(capsys):
    code, out = run_cli(capsys, "attack", "constraints")
    assert code == EXIT_OK
    assert "merged,1 2 3 4 5 6 7 8 9 10 11 12 13 14 15 16" in out
    assert "misprint:Z" in out


def test_attack_trial_order_independent_seeding(capsys):
    _, out_a = run_cli(capsys, "attack", "--trials", "6", "--d", "2",
                       "--seed", "4")
    _, out_b = run_cli(capsys, "attack", "--trials", "3", "--d", "2",
                       "--seed", "4")
    assert out_a.splitlines()[:4] == out_b.splitlines()[:4]


def test_sweep_csv(capsys):
    code, out = run_cli(capsys, "sweep", "--var", "d", "--values", "1,2",
                        "--trials", "40", "--seed", "8")
    assert code == EXIT_OK
    lines = out.strip().splitlines()
    assert lines[0] == "variable,value,mean,stderr,trials"
    assert len(lines) == 3
    means = [float(line.split(",")[2]) for line in lines[1:]]
    assert means[0] < means[1]  # more decoys, more detection


def test_sweep_p_noise(capsys):
    code, out = run_cli(capsys, "sweep", "--var", "p_noise",
                        "--values", "0.0,0.3", "--trials", "20",
                        "--d", "30", "--seed", "8")
    assert code == EXIT_OK
    means = [float(line.split(",")[2])
             for line in out.strip().splitlines()[1:]]
    assert means[0] == pytest.approx(0.0, abs=1e-12)
    assert means[1] == pytest.approx(0.2, abs=0.05)


def test_qpc_seed_env_override(tmp_path, monkeypatch):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    monkeypatch.setenv("QPC_SEED", "321")
    main(["run", "--l", "2", "--seed", "1", "--m1", "1", "--m2", "1",
          "--m3", "1", "--output", str(a)])
    monkeypatch.delenv("QPC_SEED")
    main(["run", "--l", "2", "--seed", "321", "--m1", "1", "--m2", "1",
          "--m3", "1", "--output", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_config_file_mirrors_flags(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"l": 2, "m1": "1", "m2": "1", "m3": "1",
                               "seed": 6}))
    out = tmp_path / "out.json"
    code = main(["--config", str(cfg), "run", "--output", str(out)])
    assert code == EXIT_OK
    assert json.loads(out.read_text())["outcome"] == "AllEqual"
    code = main(["--config", str(tmp_path / "missing.json"), "verify"])
    assert code == EXIT_CONFIG_ERROR
