import json
import subprocess
import sys

import pytest

from superdiff.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


PHI = "x1 -> x1 + th[1]*t[1]\nx2 -> x2\nth1 -> th1\nth2 -> th2 + x1*th[1]*t[1,2]\n"
PSI = "x1 -> x1 + 1\nx2 -> x1 + x2\nth1 -> th2\nth2 -> th1\n"


def test_factorize_expand_pipeline_fixpoint(tmp_path, capsys):
    phi = write(tmp_path, "phi.txt", PHI)
    code, factored, _ = run_cli(capsys, "factorize", phi)
    assert code == 0
    code, morph_text, _ = run_cli(capsys, "expand", write(tmp_path, "f.txt", factored))
    assert code == 0
    code, factored2, _ = run_cli(
        capsys, "factorize", write(tmp_path, "m.txt", morph_text)
    )
    assert code == 0
    assert factored == factored2


def test_compose_and_invert(tmp_path, capsys):
    phi = write(tmp_path, "phi.txt", PHI)
    psi = write(tmp_path, "psi.txt", PSI)
    code, composed, _ = run_cli(capsys, "compose", phi, psi, "--check-factored")
    assert code == 0
    code, inv, _ = run_cli(capsys, "invert", write(tmp_path, "c.txt", composed))
    assert code == 0
    # composing with the inverse gives the identity family
    code, out, _ = run_cli(
        capsys,
        "compose",
        write(tmp_path, "ci.txt", composed),
        write(tmp_path, "ci2.txt", inv),
    )
    assert code == 0
    lines = [l for l in out.strip().splitlines() if "->" in l]
    assert lines[0].startswith("x1 -> x1")


def test_apply_verb(tmp_path, capsys):
    phi = write(tmp_path, "phi.txt", "x1 -> x1 + th[1]*t[1]\nth1 -> th1\n")
    f = write(tmp_path, "f.txt", "x1^2\n")
    code, out, _ = run_cli(capsys, "apply", phi, f)
    assert code == 0
    assert out.strip() == "x1^2 + 2*x1*th[1]*t[1]"


def test_bracket_verb(tmp_path, capsys):
    left = write(tmp_path, "a.txt", "d/dth1")
    right = write(tmp_path, "b.txt", "th[1]*d/dx1")
    code, out, _ = run_cli(capsys, "bracket", left, right)
    assert code == 0
    assert out.strip() == "d/dx1"


def test_exp_log_verbs(tmp_path, capsys):
    field = write(tmp_path, "x.txt", "th[1,2]*d/dx1")
    code, out, _ = run_cli(capsys, "exp", field)
    assert code == 0
    assert "x1 -> x1 + th[1,2]" in out
    code, log_out, _ = run_cli(capsys, "log", write(tmp_path, "u.txt", out))
    assert code == 0
    assert log_out.strip() == "th[1,2]*d/dx1"


def test_split_verb(tmp_path, capsys):
    psi = write(tmp_path, "psi.txt", PSI)
    code, out, _ = run_cli(capsys, "split", psi)
    assert code == 0
    assert "kernel: {" in out and "body: {" in out


def test_push_verb(tmp_path, capsys):
    phi = write(tmp_path, "phi.txt", PHI)
    gm = write(tmp_path, "gm.txt", "t[1] -> t[2]\nt[2] -> t[1]\n")
    code, out, _ = run_cli(capsys, "push", gm, phi)
    assert code == 0
    assert "th[1]*t[2]" in out


def test_sections_verb(tmp_path, capsys):
    code, out, _ = run_cli(
        capsys, "sections", "--m", "1", "--n", "1", "--p", "1", "--degree", "1"
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "count: 8"
    assert len(lines) == 9


def test_doc_format_is_json(tmp_path, capsys):
    phi = write(tmp_path, "phi.txt", PHI)
    code, out, _ = run_cli(capsys, "factorize", phi, "--format", "doc")
    assert code == 0
    doc = json.loads(out)
    assert doc["kind"] == "factored"
    assert doc["p"] == 2
    assert "[1]" in doc["fields"]


def test_exit_code_parse_error(tmp_path, capsys):
    bad = write(tmp_path, "bad.txt", "x1 -> @@@\n")
    code, _, err = run_cli(capsys, "factorize", bad)
    assert code == 2
    assert "parse error" in err


def test_exit_code_unknown_invertibility(tmp_path, capsys):
    sq = write(tmp_path, "sq.txt", "x1 -> x1^2\n")
    code, _, err = run_cli(capsys, "invert", sq)
    assert code == 3
    assert "not certifiable" in err


def test_exit_code_domain_mismatch(tmp_path, capsys):
    a = write(tmp_path, "a.txt", "x1 -> x1\nth1 -> th1\n")
    b = write(tmp_path, "b.txt", "x1 -> x1\nx2 -> x2\nth1 -> th1\n")
    code, _, err = run_cli(capsys, "compose", a, b)
    assert code == 4
    assert "invalid input" in err


def test_exit_code_parity_violation(tmp_path, capsys):
    # even image for an odd coordinate
    bad = write(tmp_path, "bad.txt", "x1 -> x1\nth1 -> x1\n")
    code, _, err = run_cli(capsys, "factorize", bad)
    assert code == 4


def test_selftest_deterministic(capsys):
    code1, out1, _ = run_cli(capsys, "selftest", "--seed", "5", "--count", "2")
    code2, out2, _ = run_cli(capsys, "selftest", "--seed", "5", "--count", "2")
    assert code1 == code2 == 0
    assert out1 == out2
    assert "all checks passed" in out1


def test_console_script_entry():
    result = subprocess.run(
        [sys.executable, "-m", "superdiff.cli", "sections", "--m", "0", "--n", "1", "--p", "1", "--degree", "0"],
        capture_output=True,
        text=True,
    )
    assert result.returncode == 0
    assert result.stdout.splitlines()[0] == "count: 2"


def test_stdin_input(tmp_path):
    result = subprocess.run(
        [sys.executable, "-m", "superdiff.cli", "factorize", "-"],
        input=PHI,
        capture_output=True,
        text=True,
    )
    assert result.returncode == 0
    assert result.stdout.startswith("p: 2")
