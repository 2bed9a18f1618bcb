import json
import subprocess
import sys

import pytest

from strata.cli import EXIT_FAIL, EXIT_INPUT, EXIT_OK, main
from strata.exact_lin import QQ, FGAbGroup, GroupHom, IntMatrix
from strata.slice_io import save_slice
from strata.slice_models import IHSliceData


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def skew_slice(tmp_path):
    # kernel and image of Var are paired nontrivially
    Q2 = FGAbGroup.free(2, QQ)
    s = IHSliceData(n=3, k=1, d=0, rel_groups={0: Q2}, abs_groups={0: Q2},
                    var=GroupHom(Q2, Q2, IntMatrix([[1, 0], [0, 0]])), jmap=GroupHom.zero(Q2, Q2),
                    pairing={0: IntMatrix([[0, 1], [1, 0]])}, label="skew")
    p = tmp_path / "skew.json"
    save_slice(s, p)
    return p


def test_prop4_example_passes(capsys):
    code, out, _ = run(capsys, "tower", "--example", "curve-germ", "--mults", "2", "--ambient", "3",
                       "--check", "prop4")
    assert code == EXIT_OK
    assert "Γ₁+Γ₂ = 0: PASS" in out and "summary:" in out


def test_morse_even_example(capsys):
    code, out, _ = run(capsys, "tower", "--example", "morse", "--m", "4", "--check", "example2")
    assert code == EXIT_OK and "[example2] Var trivial: PASS" in out


def test_all_checks_on_builtins(capsys):
    for argv in (["--example", "curve-germ", "--mults", "3", "--ambient", "5", "--ih"],
                 ["--example", "smooth-base", "--ambient", "5", "--ih"],
                 ["--example", "morse", "--m", "3", "--ambient", "5", "--ih"]):
        code, out, _ = run(capsys, "tower", *argv)
        assert code == EXIT_OK, out
        assert "0 failed" in out


def test_failing_check_exits_one(capsys, skew_slice):
    code, out, _ = run(capsys, "tower", "--slice", str(skew_slice), "--check", "thm6")
    assert code == EXIT_FAIL
    assert "[thm6] Ker Var_m ⊥ Im Var_m: FAIL" in out


@pytest.mark.parametrize("argv", [
    ["tower", "--example", "nope"],
    ["tower", "--example", "curve-germ", "--mults", "2,x"],
    ["tower", "--example", "curve-germ", "--mults", "2", "--check", "bogus"],
    ["tower", "--example", "morse"],
    ["tower", "--example", "smooth-base", "--ambient", "3", "--ih", "--steps", "9"],
    ["emit-example", "nope"],
    ["emit-example", "curve-germ"],
    ["emit-example", "smooth-base", "--ih", "--coeff", "Z"],
])
def test_input_errors_exit_two(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == EXIT_INPUT and err.startswith("strata: error:")


def test_bad_file_exits_two(capsys, tmp_path):
    p = tmp_path / "broken.json"
    p.write_text("{\n  \"schema\": ")
    code, _, err = run(capsys, "tower", "--slice", str(p))
    assert code == EXIT_INPUT and "line 2" in err
    code, _, err = run(capsys, "tower", "--slice", str(tmp_path / "missing.json"))
    assert code == EXIT_INPUT


def test_argparse_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["tower"])
    assert exc.value.code == 2


def test_emit_and_reload(capsys, tmp_path):
    p = tmp_path / "germ.json"
    code, _, _ = run(capsys, "emit-example", "curve-germ", "--mults", "2,1", "--ambient", "4",
                     "--out", str(p))
    assert code == EXIT_OK
    code, out, _ = run(capsys, "tower", "--slice", str(p), "--check", "prop2,lemma5,cor4")
    assert code == EXIT_OK and "germ.json" in out
    # emitting again gives the same bytes
    q = tmp_path / "again.json"
    run(capsys, "emit-example", "curve-germ", "--mults", "2,1", "--ambient", "4", "--out", str(q))
    assert p.read_bytes() == q.read_bytes()


def test_emit_ih_example(capsys):
    code, out, _ = run(capsys, "emit-example", "smooth-base", "--ambient", "3", "--ih")
    assert code == EXIT_OK and json.loads(out)["kind"] == "ih"


def test_reports_are_deterministic(capsys, tmp_path):
    argv = ["tower", "--example", "curve-germ", "--mults", "2,1", "--ambient", "4", "--ih"]
    outs = []
    for i in range(2):
        j = tmp_path / f"r{i}.json"
        code, out, _ = run(capsys, *argv, "--json", str(j))
        assert code == EXIT_OK
        outs.append((out, j.read_bytes()))
    assert outs[0] == outs[1]
    assert json.loads(outs[0][1])["passed"] is True


def test_color_only_on_request(capsys, monkeypatch):
    argv = ["tower", "--example", "morse", "--m", "4", "--check", "example2"]
    _, plain, _ = run(capsys, *argv)
    assert "\x1b[" not in plain
    monkeypatch.setenv("STRATA_COLOR", "1")
    _, coloured, _ = run(capsys, *argv)
    assert "\x1b[32mPASS" in coloured


def _write_batch(tmp_path, scenarios):
    p = tmp_path / "batch.json"
    p.write_text(json.dumps({"scenarios": scenarios}))
    return p


def test_verify_germ_trichotomy(capsys, tmp_path):
    batch = _write_batch(tmp_path, [
        {"name": "nu2-n4", "example": "curve-germ", "mults": [2], "ambient": 4, "checks": "prop4"},
        {"name": "nu3-n5", "example": "curve-germ", "mults": "3", "ambient": 5, "checks": ["prop4"]},
        {"name": "nu2-n3", "example": "curve-germ", "mults": 2, "ambient": 3, "checks": "prop4"},
    ])
    code, out, _ = run(capsys, "verify", str(batch))
    assert code == EXIT_OK
    assert out.splitlines()[-1] == "3 scenarios: 3 passed, 0 failed, 0 errors"
    assert out.startswith("PASS  nu2-n4:")


def test_verify_reports_failures_and_errors(capsys, tmp_path, skew_slice):
    batch = _write_batch(tmp_path, [
        {"name": "skew", "slice": skew_slice.name, "checks": "thm6"},
        {"name": "broken", "example": "morse"},
        {"name": "ok", "example": "morse", "m": 3, "checks": "example2"},
    ])
    out_json = tmp_path / "res.json"
    code, out, _ = run(capsys, "verify", str(batch), "--json", str(out_json))
    assert code == EXIT_FAIL
    lines = out.splitlines()
    assert lines[0].startswith("FAIL  skew:")
    assert any(line.startswith("ERROR broken:") for line in lines)
    assert lines[-1] == "3 scenarios: 1 passed, 1 failed, 1 errors"
    assert json.loads(out_json.read_text())["errors"] == 1


def test_verify_inline_slice(capsys, tmp_path):
    from strata.slice_io import slice_to_dict
    from strata.slice_models import curve_germ_slice
    batch = _write_batch(tmp_path, [{"slice": slice_to_dict(curve_germ_slice((3,), 3)), "checks": "lemma5"}])
    code, out, _ = run(capsys, "verify", str(batch))
    assert code == EXIT_OK and out.startswith("PASS  scenario 1:")


def test_verify_empty_and_malformed(capsys, tmp_path):
    code, out, _ = run(capsys, "verify", str(_write_batch(tmp_path, [])))
    assert code == EXIT_OK and out == "0 scenarios: 0 passed, 0 failed, 0 errors\n"
    bad = tmp_path / "bad.json"
    bad.write_text("[]")
    assert run(capsys, "verify", str(bad))[0] == EXIT_INPUT
    bad.write_text("{")
    assert run(capsys, "verify", str(bad))[0] == EXIT_INPUT
    assert run(capsys, "verify", str(tmp_path / "none.json"))[0] == EXIT_INPUT
    code, out, _ = run(capsys, "verify", str(_write_batch(tmp_path, [{"example": "morse", "m": 3, "bogus": 1}])))
    assert code == EXIT_FAIL and "unknown field" in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "strata", "tower", "--example", "morse", "--m", "4",
                           "--check", "example2"], capture_output=True, text=True)
    assert proc.returncode == 0 and "Var trivial: PASS" in proc.stdout
