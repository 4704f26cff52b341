import json

from recurint.cli import main

INTRO = "(1 - x + 3*x^2) * (1 + x + x^2)^(-2) * (1 - x + x^2)^(-1/2)"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_reduce_q2(capsys):
    code, out, _ = run(capsys, "reduce", "(1 + x^2)^(-2)", "--trace")
    assert code == 0
    assert "1/2 * (x) * (1 + x^2)^(-1)" in out
    assert "1/2 * INT((1 + x^2)^(-1), x)" in out
    assert out.count("solveFor=") == 1 and "1.1" in out


def test_reduce_json_and_verify(capsys, tmp_path):
    code, out, _ = run(capsys, "reduce", INTRO, "--json")
    assert code == 0
    path = tmp_path / "r.json"
    path.write_text(out)
    assert json.loads(out)["trace"][0]["rule"] == "8A.1"
    code, out, _ = run(capsys, "verify", INTRO, "--against", str(path))
    assert (code, out.strip()) == (0, "ok")
    code, out, _ = run(capsys, "verify", "(1 + x^2)^(-2)", "--against", str(path))
    assert code == 1 and out.startswith("not ok")


def test_strict_exit(capsys):
    assert run(capsys, "reduce", INTRO)[0] == 0
    assert run(capsys, "reduce", INTRO, "--strict")[0] == 3
    assert run(capsys, "reduce", "(1 + x)^(7/2) * (2 + x)^(1/2)", "--strict")[0] == 0


def test_window_option(capsys):
    code, out, _ = run(capsys, "reduce", "(1 + x)^(5/2) * (2 + x)^(-1/2)", "--window", "0,1")
    assert code == 0 and "status: Terminal" in out
    code, _, err = run(capsys, "reduce", "(1 + x)^2", "--window", "0,1/2")
    assert code == 2


def test_classify(capsys):
    code, out, _ = run(capsys, "classify", "(2 - 3*x + x^3)^(1/2)")
    assert (code, out.strip()) == (0, "C3, case 2B, ra=-18 rb=18 rc=-18 disc=0")


def test_engine_error_line(capsys):
    code, _, err = run(capsys, "reduce", "(1 + x)^n")
    assert code == 1
    assert err.startswith("error:SymbolicExponent:")
    code, _, err = run(capsys, "reduce", "(1 + x)^(1/2) * (2 + x)^2 * (3 + x)^2 * (4 + x)^2 * (5 + x)^2")
    assert err.startswith("error:UnsupportedForm:")


def test_usage_errors(capsys):
    assert run(capsys, "reduce")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "selftest", "--rules", "99Z.1")[0] == 2


def test_rules_listing(capsys, tmp_path):
    code, out, _ = run(capsys, "rules")
    assert code == 0 and out.strip().splitlines()[-1] == "136 rules"
    code, out, _ = run(capsys, "rules", "--form", "QQ", "--case", "8D-2", "--export", str(tmp_path / "x.json"))
    lines = out.strip().splitlines()
    assert lines[-1] == f"{len(lines) - 1} rules" and all("8D-2" in l for l in lines[:-1])
    assert len(json.loads((tmp_path / "x.json").read_text())) == len(lines) - 1


def test_selftest_subset(capsys):
    code, out, _ = run(capsys, "selftest", "--rules", "1.1,5.2", "--samples", "3", "--seed", "4")
    assert code == 0 and out.strip().splitlines()[-1] == "2/2 ok"
