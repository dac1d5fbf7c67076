"""Command line: outputs, exit codes and JSON fields."""

import json
import subprocess
import sys

import pytest

from cedille_kernel.cli import FUEL, OK, REJECTED, USAGE, main


@pytest.fixture
def run(capsys):
    def go(*argv):
        code = main([str(a) for a in argv])
        out, err = capsys.readouterr()
        return code, out.strip(), err.strip()

    return go


def test_check_accepts(run, root):
    code, out, _ = run("check", root / "nu/nu.ced")
    assert code == OK and out.endswith("ok")


def test_check_rejects_with_span(run, root):
    code, _, err = run("check", root / "bad/erased-use.ced")
    assert code == REJECTED
    assert "[erased-var-occurs]" in err
    assert "erased-use.ced:4:" in err


def test_check_missing_file(run):
    code, _, err = run("check", "missing.ced")
    assert code == USAGE and "missing.ced" in err


def test_check_json(run, root):
    code, out, _ = run("check", "--json", root / "utils/cast.ced", root / "bad/nu-ch-misuse.ced")
    data = json.loads(out)
    assert code == REJECTED and data["ok"] is False
    first, second = data["files"]
    assert first["outcome"] == "accept" and first["errors"] == []
    assert second["outcome"] == "reject"
    assert {"kind", "message", "file", "line", "col", "definition"} <= set(second["errors"][0])
    assert second["errors"][0]["definition"] == "inM"


def test_strict_delta_flag(run, root):
    assert run("check", root / "nu/lambek.ced")[0] == OK
    code, _, err = run("check", "--delta", "strict", root / "nu/lambek.ced")
    assert code == REJECTED and "delta-inapplicable" in err


def test_erase(run, root):
    assert run("erase", root / "nu/nu.ced", "lambek1")[1] == "λ xs. λ x. x"
    assert run("erase", root / "utils.ced", "elimCast")[1] == "λ x. x"
    assert run("erase", root / "utils.ced", "intrCast -f -p")[1] == "intrCast"


def test_norm(run, root):
    code, out, _ = run("norm", root / "nu/lambek.ced", "t")
    assert code == OK and out == "λ f. f (λ x. x) (λ v. λ ch. λ x. ch x)"


def test_steps(run, root):
    assert run("steps", root / "nu/nu.ced", "outM (inM xs)") == (OK, "13", "")
    data = json.loads(run("steps", "--json", root / "nu/nu.ced", "outM (inM xs)")[1])
    assert data == {"term": "outM (inM xs)", "normal_form": "xs", "steps": 13, "fuel_exhausted": False}


def test_steps_constant_in_prefix_length(run, root):
    f = root / "examples/efficiency.ced"
    assert run("steps", f, "peek1")[1] == run("steps", f, "peek10")[1]


def test_steps_fuel_exhausted(run, root):
    code, out, err = run("steps", "--fuel", "100", root / "utils.ced", "(λ x. x x) (λ x. x x)")
    assert code == FUEL and out == "100" and "fuel exhausted" in err


def test_unbound_name(run, root):
    code, _, err = run("steps", root / "nu/nu.ced", "nothingHere")
    assert code == REJECTED and "unbound" in err


def test_term_parse_error(run, root):
    assert run("norm", root / "nu/nu.ced", "λ x")[0] == USAGE


@pytest.mark.parametrize(
    "lhs, rhs, verdict, code",
    [
        ("roll", "λ x. x", "equal", OK),
        ("unit", "unit", "equal", OK),
        ("t", "inM (outM t)", "distinct", REJECTED),
    ],
)
def test_eq(run, root, lhs, rhs, verdict, code):
    assert run("eq", root / "nu/lambek.ced", lhs, rhs)[:2] == (code, verdict)


def test_eq_undecided(run, root):
    omega = "(λ x. x x) (λ x. x x)"
    assert run("eq", "--fuel", "50", root / "utils.ced", omega, omega)[:2] == (FUEL, "undecided")


def test_bohm(run, root):
    code, out, _ = run("bohm", "--json", root / "nu/lambek.ced", "inM (outM t)", "t")
    data = json.loads(out)
    assert code == OK
    assert [c["result"] for c in data["certificate"]] == ["λ x. λ y. x", "λ x. λ y. y"]
    assert data["context"].startswith("λ h.")


def test_bohm_on_equal_terms(run, root):
    assert run("bohm", root / "utils.ced", "unit", "unit")[0] == REJECTED


def test_invalid_fuel_and_unknown_flag():
    for argv in (["check", "--fuel=0", "x.ced"], ["check", "--nope", "x.ced"], ["frobnicate"]):
        with pytest.raises(SystemExit) as info:
            main(argv)
        assert info.value.code == USAGE


def test_corpus_command(run):
    code, out, _ = run("corpus")
    assert code == OK
    assert out.splitlines()[-1].startswith("19/19 files as expected")


def test_corpus_json(run):
    data = json.loads(run("corpus", "--json")[1])
    assert data["ok"] is True
    assert data["overhead"] == {"1": 14, "5": 14, "10": 14}


def test_corpus_root_from_environment(tmp_path, root):
    env_root = tmp_path / "c"
    env_root.mkdir()
    (env_root / "manifest.json").write_text(json.dumps({"files": [{"path": "a.ced", "expect": "accept"}]}))
    (env_root / "a.ced").write_text("A : ★ = ∀ X: ★. X.\n")
    proc = subprocess.run(
        [sys.executable, "-m", "cedille_kernel", "corpus"],
        capture_output=True,
        text=True,
        env={**__import__("os").environ, "CEDK_CORPUS": str(env_root)},
    )
    assert proc.returncode == OK
    assert "1/1 files as expected" in proc.stdout
