import pytest

from Kurepa_py.main import EXIT_ERROR, EXIT_FINDING, EXIT_OK, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_seq(capsys):
    assert run(capsys, "seq", "subfact", "6")[:2] == (EXIT_OK, "265\n")
    assert run(capsys, "seq", "leftfact", "0")[:2] == (EXIT_OK, "0\n")
    code, out, _ = run(capsys, "seq", "subfact", "11562", "--mod", "11563")
    assert code == EXIT_OK
    assert out.startswith("2 (mod 11563)")


def test_det(capsys):
    assert run(capsys, "det", "7")[:2] == (EXIT_OK, "15 [exact]\n")
    assert run(capsys, "det", "11563", "--mod", "11563", "--via", "derangement")[:2] == \
        (EXIT_OK, "0 [derangement]\n")
    assert run(capsys, "det", "11", "--mod", "11")[:2] == (EXIT_OK, f"{6439 % 11} [elim]\n")
    assert run(capsys, "det", "9", "--mod", "9")[:2] == (EXIT_OK, "8 [elim]\n")
    assert run(capsys, "det", "9", "--binary")[:2] == (EXIT_OK, "-1 [exact]\n")
    assert run(capsys, "det", "3", "--lemma-d")[:2] == (EXIT_OK, "-1 [exact]\n")


def test_det_errors(capsys):
    code, _, err = run(capsys, "det", "5")
    assert code == EXIT_ERROR
    assert "n >= 7" in err
    code, _, err = run(capsys, "det", "7", "--via", "elim")
    assert code == EXIT_ERROR
    assert "--mod" in err


def test_long_elimination_needs_opt_in(capsys, caplog):
    code, _, _ = run(capsys, "det", "5003", "--mod", "5003")
    assert code == EXIT_ERROR
    assert "--opt-in-long" in caplog.text


def test_scan_strong_reports_finding(capsys):
    code, out, _ = run(capsys, "scan", "strong", "--lo", "9", "--hi", "20000")
    assert code == EXIT_FINDING
    lines = out.splitlines()
    assert lines[0] == "n,factorization,r_signed,s_signed,near_miss,ratio"
    assert lines[1].startswith("11563,31*373,2,0,2,")
    assert len(lines) == 2


def test_scan_kurepa_without_counterexample(capsys):
    code, out, _ = run(capsys, "scan", "kurepa", "--lo", "3", "--hi", "2000", "--bound", "0")
    assert code == EXIT_OK
    assert out == "n,factorization,r_signed,s_signed,near_miss,ratio\n"


def test_scan_near_misses_are_not_findings(capsys):
    code, out, _ = run(capsys, "scan", "kurepa", "--lo", "3", "--hi", "400")
    assert code == EXIT_OK
    assert [line.split(",")[0] for line in out.splitlines()[1:]] == \
        ["3", "5", "7", "11", "23", "31", "67", "227", "373"]


def test_scan_json_format(capsys):
    code, out, _ = run(capsys, "--format", "json", "scan", "table1", "--lo", "2", "--hi", "9")
    assert code == EXIT_OK
    assert len(out.splitlines()) == 7
    assert out.splitlines()[0].startswith('{"n":2,')


def test_scan_reads_environment(capsys, monkeypatch):
    monkeypatch.setenv("KUREPA_HI", "9")
    code, out, _ = run(capsys, "scan", "table1")
    assert code == EXIT_OK
    assert len(out.splitlines()) == 8


def test_scan_checkpoint_resume(capsys, tmp_path):
    path = str(tmp_path / "scan.jsonl")
    first = run(capsys, "scan", "table1", "--hi", "3000", "--checkpoint", path, "--checkpoint-interval", "500")
    second = run(capsys, "scan", "table1", "--hi", "3000", "--checkpoint", path, "--checkpoint-interval", "500",
                 "--resume")
    assert first[0] == second[0] == EXIT_OK
    assert first[1] == second[1]


def test_scan_corrupt_checkpoint(capsys, tmp_path):
    path = tmp_path / "scan.jsonl"
    path.write_text("garbage\n")
    code, _, err = run(capsys, "scan", "table1", "--hi", "100", "--checkpoint", str(path), "--resume")
    assert code == EXIT_ERROR
    assert "Delete the file" in err


def test_bell_scan_needs_opt_in(capsys, caplog):
    code, _, _ = run(capsys, "scan", "bell-one", "--hi", "6000")
    assert code == EXIT_ERROR
    assert "--opt-in-long" in caplog.text


def test_heuristic(capsys):
    assert run(capsys, "heuristic", "expected-count", "--x", "23", "--y", "8388608", "--d", "9")[:2] == \
        (EXIT_OK, "30.8977\n")
    assert run(capsys, "heuristic", "expected-count", "--x", "3", "--y", "8388608")[:2] == \
        (EXIT_OK, "2.67493\n")
    code, out, _ = run(capsys, "heuristic", "event-prob", "--x", "4", "--y", "8388608")
    assert code == EXIT_OK
    assert float(out) == pytest.approx(0.105652, abs=5e-5)


def test_heuristic_needs_interval(capsys):
    code, _, err = run(capsys, "heuristic", "event-prob", "--x", "4")
    assert code == EXIT_ERROR
    assert "--y" in err


def test_heuristic_constants_table(capsys):
    code, out, _ = run(capsys, "heuristic", "constants")
    assert code == EXIT_OK
    assert out.splitlines()[0].startswith("label,kind,x,y,d,mode,published,computed")


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "prop2", "--max", "20")
    assert code == EXIT_OK
    assert out.splitlines()[-1] == "suite prop2: 14/14 passed"


def test_usage_errors_exit_with_one(capsys):
    with pytest.raises(SystemExit) as info:
        main(["seq", "catalan", "3"])
    assert info.value.code == EXIT_ERROR
    with pytest.raises(SystemExit) as info:
        main(["scan", "kurepa", "--lo", "3"])
    assert info.value.code == EXIT_ERROR


def test_verify_table2_passes(capsys):
    code, out, _ = run(capsys, "verify", "table2")
    assert code == EXIT_OK
    assert out.splitlines()[-1].startswith("suite table2: ")
    passed, cases = out.splitlines()[-1].split(": ")[1].split()[0].split("/")
    assert passed == cases


def test_scan_class_filter(capsys):
    code, out, _ = run(capsys, "scan", "bell-one", "--hi", "500", "--class", "primes")
    assert code == EXIT_OK
    assert [line.split(",")[0] for line in out.splitlines()[1:]] == ["2"]
    code, _, err = run(capsys, "scan", "kurepa", "--lo", "3", "--hi", "100", "--class", "even")
    assert code == EXIT_ERROR
    assert "class filter" in err


def test_scan_output_file(capsys, tmp_path):
    path = tmp_path / "table1.csv"
    code, out, _ = run(capsys, "scan", "table1", "--hi", "3000", "--checkpoint-interval", "500",
                       "--output", str(path))
    assert code == EXIT_OK
    assert out == ""
    _, streamed, _ = run(capsys, "scan", "table1", "--hi", "3000", "--checkpoint-interval", "500")
    assert path.read_text() == streamed
