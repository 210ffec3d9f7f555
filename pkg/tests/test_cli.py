import json
import math

import pytest

from conftest import field_file
from classgroup import cli
from classgroup.errors import Stalled


def run_cli(capsys, argv):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_compute_qi(tmp_path, capsys):
    path = field_file(tmp_path, [1, 0, 1])
    code, out, _ = run_cli(capsys, ["compute", path, "--seed", "1"])
    assert code == cli.EXIT_ACCEPT
    data = json.loads(out)
    assert data["group"]["class_number"] == "1"
    assert data["verdict"] == "ACCEPT"


def test_compute_writes_out_file(tmp_path, capsys):
    path = field_file(tmp_path, [1, 0, 1])
    out_path = tmp_path / "result.json"
    code, _, _ = run_cli(capsys, ["compute", path, "--seed", "1",
                                  "--out", str(out_path)])
    assert code == 0
    data = json.loads(out_path.read_text())
    assert data["group"]["class_number"] == "1"


def test_compute_corrupt_field_file(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    code, _, err = run_cli(capsys, ["compute", str(p)])
    assert code == cli.EXIT_INPUT
    p2 = tmp_path / "reducible.json"
    p2.write_text(json.dumps({"poly": [-1, 0, 1]}))
    code, _, _ = run_cli(capsys, ["compute", str(p2)])
    assert code == cli.EXIT_INPUT


def test_stalled_exit_code(tmp_path, capsys, monkeypatch):
    path = field_file(tmp_path, [1, 0, 1])

    def boom(cfg):
        raise Stalled("starved", {"trials": 0})

    monkeypatch.setattr(cli, "run_compute", boom)
    code, _, err = run_cli(capsys, ["compute", path])
    assert code == cli.EXIT_STALLED


def test_verify_subcommand(tmp_path, capsys):
    path = field_file(tmp_path, [1, 0, 1])
    code, out, _ = run_cli(capsys, ["verify", path, "--h", "1", "--reg", "1.0"])
    assert code == cli.EXIT_ACCEPT
    data = json.loads(out)
    assert data["verdict"] == "ACCEPT"
    assert set(data) == {"ratio", "verdict", "residue", "prime_bound", "w",
                         "regulator"}
    code, out, _ = run_cli(capsys, ["verify", path, "--h", "2", "--reg", "1.0"])
    assert code == cli.EXIT_REJECT


def test_rho_and_lnot(capsys):
    code, out, _ = run_cli(capsys, ["rho", "2"])
    assert code == 0
    assert abs(float(out) - (1 - math.log(2))) < 1e-10
    code, out, _ = run_cli(capsys, ["lnot", "1", "0.5", "1000000"])
    assert code == 0
    assert abs(float(out) - 1000.0) < 1e-6


def test_reduce_subcommand(tmp_path, capsys):
    m = tmp_path / "mat.txt"
    m.write_text("2 2\n1 4\n0 1\n")
    code, out, _ = run_cli(capsys, ["reduce", str(m)])
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "2 2"
    m2 = tmp_path / "id.txt"
    m2.write_text("2 2\n1 0\n0 1\n")
    code, out, _ = run_cli(capsys, ["reduce", str(m2)])
    rows = [l.split() for l in out.strip().splitlines()[1:]]
    assert rows == [["1", "0"], ["0", "1"]]


def test_params_and_classify_subcommands(tmp_path, capsys):
    path = field_file(tmp_path, [5, 0, 1])
    code, out, _ = run_cli(capsys, ["params", path, "--omega",
                                    str(math.log2(7))])
    assert code == 0
    data = json.loads(out)
    assert abs(data["predicted"]["c"] - 1.136) < 1e-3
    code, out, _ = run_cli(capsys, ["classify", path])
    assert code == 0
    assert 0 <= json.loads(out)["alpha"] <= 1


def test_factorbase_and_collect_subcommands(tmp_path, capsys, caplog):
    path = field_file(tmp_path, [1, 0, 1])
    code, out, _ = run_cli(capsys, ["factorbase", path, "--B", "10"])
    assert code == 0
    norms = [json.loads(l)["norm"] for l in out.strip().splitlines()]
    assert norms == [2, 5, 5, 9]
    import logging
    with caplog.at_level(logging.INFO, logger="classgroup.relations"):
        code, out, err = run_cli(capsys, ["collect", path, "--B", "10",
                                          "--seed", "3"])
    assert code == 0
    rows = [json.loads(l) for l in out.strip().splitlines()]
    assert len(rows) >= 8
    progress = [r for r in caplog.records if "bach_rank" in r.getMessage()]
    assert progress  # trials/hits/rank streamed while collecting


def test_compute_determinism_and_threads(tmp_path, capsys):
    path = field_file(tmp_path, [5, 0, 1])

    def result(threads):
        code, out, _ = run_cli(capsys, ["compute", path, "--seed", "5",
                                        "--threads", str(threads)])
        assert code == 0
        data = json.loads(out)
        data["statistics"].pop("wall_time_s")
        data["config"].pop("threads")
        return json.dumps(data, sort_keys=True)

    assert result(1) == result(1)
    assert result(1) == result(4)


def test_resume_reaches_same_group(tmp_path, capsys, monkeypatch):
    # force a REJECT in round 0: the pipeline must retain relations, double K
    # and land on the same group as an undisturbed run
    from classgroup import analytic as analytic_mod
    path = field_file(tmp_path, [5, 0, 1])
    cfg = cli.RunConfig(field_path=path, seed=9)
    clean = cli.run_compute(cfg)
    calls = {"n": 0}
    real_verify = analytic_mod.verify

    def flaky(h, reg, an, field):
        calls["n"] += 1
        if calls["n"] == 1:
            return 9.0, "REJECT"
        return real_verify(h, reg, an, field)

    monkeypatch.setattr(cli.analytic, "verify", flaky)
    resumed = cli.run_compute(cli.RunConfig(field_path=path, seed=9))
    assert resumed.verdict == "ACCEPT"
    assert len(resumed.statistics["rounds"]) == 2
    assert resumed.group.elementary_divisors == clean.group.elementary_divisors
    assert resumed.group.class_number == clean.group.class_number
