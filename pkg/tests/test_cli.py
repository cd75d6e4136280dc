"""Command-line behavior: exit codes, input loading, report files."""

import json

import pytest

from mutopt.cli import InputSetError, load_inputs, main
from mutopt.report import report_from_dict, report_to_dict

from conftest import FIXTURES


def test_mutants_census_is_13(capsys):
    code = main(["mutants", "--source", str(FIXTURES / "census.mini"),
                 "--operators", "ror,asr,aor"])
    out = capsys.readouterr().out
    assert code == 0
    assert "13 mutants" in out
    assert "ROR: 5" in out and "ASR: 4" in out and "AOR: 4" in out


def test_missing_source_flag_is_usage_error(capsys):
    assert main(["optimize", "--inputs", "x", "--operators", "ror"]) == 1
    assert main(["mutants", "--operators", "ror"]) == 1


def test_unknown_operator_is_usage_error():
    assert main(["mutants", "--source", str(FIXTURES / "census.mini"),
                 "--operators", "ror,xyz"]) == 1
    assert main(["mutants", "--source", str(FIXTURES / "census.mini"),
                 "--operators", ","]) == 1


def test_no_subcommand_is_usage_error():
    assert main([]) == 1


def test_nonexistent_source_is_operational_error(capsys):
    code = main(["mutants", "--source", "no/such/file.mini",
                 "--operators", "ror"])
    assert code == 2
    assert "not found" in capsys.readouterr().err


def test_optimize_powsum_improves(tmp_path, capsys):
    report_path = tmp_path / "out.json"
    code = main(["optimize",
                 "--source", str(FIXTURES / "powsum.mini"),
                 "--backend", "mini",
                 "--inputs", str(FIXTURES / "m_powsum"),
                 "--operators", "ror,asr,aor",
                 "--report", str(report_path)])
    out = capsys.readouterr().out
    assert code == 0
    assert "selected:" in out
    data = json.loads(report_path.read_text())
    assert data["selected"]["replacement"] == "*="
    assert data["selected"]["operator"] == "ASR"
    assert data["final_tau"] < data["original_tau"]
    assert data["patch"].startswith("---")
    # verdict counts partition the verdicts array
    counted = {}
    for v in data["verdicts"]:
        counted[v["status"]] = counted.get(v["status"], 0) + 1
    assert counted == data["verdict_counts"]
    assert sum(counted.values()) == len(data["verdicts"])


def test_optimize_without_improvement_exits_3(tmp_path):
    # single relational site and a max that appears once: all survivors tie
    src = tmp_path / "gate.mini"
    src.write_text("x = in[0];\nif (x >= 10) {\n    x = 10;\n}\nprint(x);\n")
    inputs = tmp_path / "m"
    inputs.mkdir()
    (inputs / "lo.in").write_text("3\n")
    code = main(["optimize", "--source", str(src), "--inputs", str(inputs),
                 "--operators", "ror"])
    assert code == 3


def test_optimize_source_without_mutable_operators_exits_3(tmp_path, capsys):
    src = tmp_path / "plain.mini"
    src.write_text("x = 5;\nprint(x);\n")
    inputs = tmp_path / "m"
    inputs.mkdir()
    (inputs / "a.in").write_text("1\n")
    report_path = tmp_path / "r.json"
    code = main(["optimize", "--source", str(src), "--inputs", str(inputs),
                 "--operators", "ror,asr,aor", "--report", str(report_path)])
    assert code == 3
    assert json.loads(report_path.read_text())["verdicts"] == []


def test_empty_input_set_warns_and_exits_3(tmp_path, capsys):
    inputs = tmp_path / "m"
    inputs.mkdir()
    code = main(["optimize", "--source", str(FIXTURES / "powsum.mini"),
                 "--inputs", str(inputs), "--operators", "asr"])
    assert code == 3
    assert "empty input set" in capsys.readouterr().err


def test_invalid_baseline_exits_2(tmp_path, capsys):
    src = tmp_path / "crash.mini"
    src.write_text("print(1 / in[0]);\n")
    inputs = tmp_path / "m"
    inputs.mkdir()
    (inputs / "zero.in").write_text("0\n")
    code = main(["optimize", "--source", str(src), "--inputs", str(inputs),
                 "--operators", "aor"])
    assert code == 2
    err = capsys.readouterr().err
    assert "invalid baseline" in err and "zero" in err


def test_lines_flag_validation(tmp_path, capsys):
    code = main(["optimize", "--source", str(FIXTURES / "powsum.mini"),
                 "--inputs", str(FIXTURES / "m_powsum"),
                 "--operators", "ror", "--lines", "500:600"])
    assert code == 1
    code = main(["mutants", "--source", str(FIXTURES / "census.mini"),
                 "--operators", "ror", "--lines", "bogus"])
    assert code == 1


def test_lines_flag_restricts_sites(capsys):
    code = main(["mutants", "--source", str(FIXTURES / "census.mini"),
                 "--operators", "ror,asr,aor", "--lines", "5:5"])
    out = capsys.readouterr().out
    assert code == 0
    assert "4 mutants" in out  # only the one shortcut-assign line


def test_scratch_keeps_mutant_files(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("MUTOPT_SCRATCH", str(tmp_path))
    code = main(["optimize", "--source", str(FIXTURES / "powsum.mini"),
                 "--inputs", str(FIXTURES / "m_powsum"),
                 "--operators", "asr", "--keep-scratch"])
    assert code == 0
    kept = list(tmp_path.glob("mutopt-*/mutants/powsum.ASR_*.mini"))
    assert len(kept) == 12  # 3 sites x 4 replacements
    err = capsys.readouterr().err
    assert "scratch" in err


def test_scratch_removed_on_success(tmp_path, monkeypatch):
    monkeypatch.setenv("MUTOPT_SCRATCH", str(tmp_path))
    code = main(["optimize", "--source", str(FIXTURES / "powsum.mini"),
                 "--inputs", str(FIXTURES / "m_powsum"),
                 "--operators", "asr"])
    assert code == 0
    assert list(tmp_path.glob("mutopt-*")) == []


# ---- input-set loading ----

def test_load_inputs_directory_is_lexicographic(tmp_path):
    d = tmp_path / "m"
    d.mkdir()
    (d / "b.in").write_text("2\n")
    (d / "a.in").write_text("1 -3\n")
    (d / "c.in").write_text("3\n")
    (d / "ignored.txt").write_text("9\n")
    s = load_inputs(d)
    assert [e.id for e in s.entries] == ["a", "b", "c"]
    assert s.entries[0].values == (1, -3)


def test_load_inputs_paper_fixture_ids():
    s = load_inputs(FIXTURES / "m_paper")
    assert {e.id for e in s.entries} == {"i30", "i0", "i1"}
    assert [e.id for e in s.entries] == ["i0", "i1", "i30"]


def test_load_inputs_manifest(tmp_path):
    manifest = tmp_path / "suite.txt"
    manifest.write_text(
        "# regression inputs\n"
        f"{FIXTURES / 'm_max' / 'a.in'}\n"
        "\n"
        f"{FIXTURES / 'm_max' / 'b.in'}\n"
    )
    s = load_inputs(manifest)
    assert [e.id for e in s.entries] == ["a", "b"]


def test_load_inputs_manifest_missing_file(tmp_path):
    manifest = tmp_path / "suite.txt"
    manifest.write_text("missing/thing.in\n")
    with pytest.raises(InputSetError) as err:
        load_inputs(manifest)
    assert "missing/thing.in" in str(err.value)


def test_load_inputs_rejects_bad_integers(tmp_path):
    d = tmp_path / "m"
    d.mkdir()
    (d / "a.in").write_text("1 two 3\n")
    with pytest.raises(InputSetError):
        load_inputs(d)


# ---- report round-trip ----

def test_report_json_round_trips():
    from mutopt import OptimizeConfig, ROR, ASR, AOR, optimize, tokenize, Language
    from mutopt.optimizer import InputEntry, InputSet

    unit = tokenize((FIXTURES / "powsum.mini").read_bytes(), Language.MINI)
    inputs = InputSet(entries=(InputEntry("n", (64,)),), origin="<memory>")
    report = optimize([ROR, ASR, AOR], unit, inputs, OptimizeConfig())
    data = json.loads(json.dumps(report_to_dict(report)))
    rebuilt = report_from_dict(data)
    assert report_to_dict(rebuilt) == report_to_dict(report)
    assert rebuilt == report


def test_optimize_b2tob10_names_the_increment_rewrite(tmp_path):
    # small-width variant of the binary-conversion run: exit 0 and the
    # report names an ASR mutant at the loop-tail increment line
    inputs = tmp_path / "m"
    inputs.mkdir()
    (inputs / "i8.in").write_text("8 1 0 1 1 0 1 1 0\n")
    (inputs / "i0.in").write_text("1 0\n")
    (inputs / "i1.in").write_text("1 1\n")
    report_path = tmp_path / "r.json"
    code = main(["optimize", "--source", str(FIXTURES / "b2tob10.mini"),
                 "--backend", "mini",
                 "--inputs", str(inputs),
                 "--operators", "ror,asr,aor",
                 "--report", str(report_path)])
    assert code == 0
    data = json.loads(report_path.read_text())
    assert data["selected"]["operator"] == "ASR"
    assert data["selected"]["original"] == "+="
    assert data["selected"]["replacement"] == "*="
    assert data["selected"]["line"] == 26
    assert data["speedup"] == data["original_tau"] / data["final_tau"]


def test_no_improvement_report_keeps_original_tau(tmp_path):
    src = tmp_path / "gate.mini"
    src.write_text("x = in[0];\nif (x >= 10) {\n    x = 10;\n}\nprint(x);\n")
    inputs = tmp_path / "m"
    inputs.mkdir()
    (inputs / "lo.in").write_text("3\n")
    report_path = tmp_path / "r.json"
    code = main(["optimize", "--source", str(src), "--inputs", str(inputs),
                 "--operators", "ror", "--report", str(report_path)])
    assert code == 3
    data = json.loads(report_path.read_text())
    assert data["selected"] is None
    assert data["original_tau"] == data["final_tau"]
    assert data["patch"] == ""
    assert data["final_source"] == data["original_source"]
