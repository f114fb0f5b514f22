import json

import pytest

from nilorbit import cli
from nilorbit.cli import EXIT_CONFIG, EXIT_FAIL, EXIT_INCOMPLETE, EXIT_OK, RunConfig, execute, main
from nilorbit.report import normalized, read_reports


def test_exit_code_values():
    assert (EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_INCOMPLETE) == (0, 1, 2, 3)


def test_bad_arguments(cache_dir, capsys):
    assert main(["verify", "nonsense"]) == EXIT_CONFIG
    assert main(["verify", "table1", "--degrees", "6"]) == EXIT_CONFIG
    assert main(["verify", "table1", "--degrees", "x"]) == EXIT_CONFIG
    assert main(["verify", "table1", "--jobs", "0"]) == EXIT_CONFIG
    assert main(["catalog", "build", "--degrees", "12"]) == EXIT_CONFIG
    assert "not a prime power" in capsys.readouterr().err


def test_tier2_degree_at_tier1(cache_dir):
    assert main(["verify", "table1", "--degrees", "64"]) == EXIT_INCOMPLETE
    assert main(["catalog", "build", "--degrees", "81"]) == EXIT_INCOMPLETE


def test_table1_small(cache_dir, tmp_path, capsys):
    out = tmp_path / "t1.json"
    csv_path = tmp_path / "t1.csv"
    code = main(["verify", "table1", "--degrees", "4,9", "--out", str(out), "--csv", str(csv_path)])
    assert code == EXIT_OK
    text = capsys.readouterr().out
    assert "largest |H|" in text
    (rep,) = read_reports(out)
    assert rep.numbers["degree 4"]["value"] == 8 and rep.numbers["degree 9"]["value"] == 27
    assert csv_path.read_text().splitlines()[1].startswith("4,table1,PASS")


def test_catalog_build_is_idempotent(cache_dir, capsys):
    assert main(["catalog", "build", "--degrees", "4,5"]) == EXIT_OK
    assert "group constructions: 2" in capsys.readouterr().out
    assert main(["catalog", "build", "--degrees", "4,5"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "group constructions: 0" in out
    assert main(["catalog", "list"]) == EXIT_OK
    assert "complete" in capsys.readouterr().out


def test_timeout_is_incomplete(cache_dir):
    assert main(["verify", "thmperm2", "--degrees", "9", "--max-seconds", "0.000001"]) == EXIT_INCOMPLETE


def test_gamma_mismatch_exits_one(cache_dir, tmp_path):
    out = tmp_path / "g.json"
    assert main(["verify", "gamma-cases", "--degrees", "64", "--out", str(out)]) == EXIT_FAIL
    (rep,) = read_reports(out)
    assert rep.verdict == "mismatch" and rep.witnesses


def test_report_render(cache_dir, tmp_path, capsys):
    out = tmp_path / "r.json"
    main(["verify", "lemma24", "--degrees", "4,8", "--out", str(out)])
    first = capsys.readouterr().out
    assert main(["report", "render", str(out)]) == EXIT_OK
    assert capsys.readouterr().out == first
    main(["report", "render", str(out)])
    assert capsys.readouterr().out == first


def test_render_empty_prints_header(tmp_path, capsys):
    path = tmp_path / "empty.json"
    path.write_text("[]")
    assert main(["report", "render", str(path)]) == EXIT_OK
    assert capsys.readouterr().out.split() == ["degree", "claim", "verdict", "tier", "completeness", "value"]


def test_parallel_matches_serial(cache_dir):
    a, code_a = execute(RunConfig(["lemma24"], degrees=[4, 8, 9], cache_dir=cache_dir, jobs=1))
    b, code_b = execute(RunConfig(["lemma24"], degrees=[4, 8, 9], cache_dir=cache_dir, jobs=2))
    assert code_a == code_b == EXIT_OK
    assert [normalized(r) for r in a] == [normalized(r) for r in b]
