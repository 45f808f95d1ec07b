import copy
import json
import os

import pytest

from voasheaf.cli import EXIT_CONFIG, EXIT_FAIL, EXIT_OK, evaluate, main
from voasheaf.liedata import builtin
from voasheaf.suites import default_config
from voasheaf.vacore import Engine

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
CONFIGS = os.path.join(ROOT, "configs")


def small_config(**over):
    doc = default_config()
    doc["counts"].update(composites=3, borcherds=4, commutator_pairs=3, commutator_states=2,
                         operator_states=3, exact_states=2, psi_states=3, dual_cases=3, grading_degree=1)
    doc["charts"] = [c for c in doc["charts"] if c["name"] in ("identity1", "inversion", "triangular")]
    doc["suites"] = ["gluing", "cocycle", "omega", "equivariance", "verma"]
    doc.update(over)
    return doc


def write(tmp_path, doc, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def test_small_run_passes_and_writes_reports(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["run", write(tmp_path, small_config()), "--out", str(out)]) == EXIT_OK
    entries = json.loads((out / "report.json").read_text())
    assert entries and all(e["pass"] for e in entries)
    assert set(entries[0]) == {"suite", "check_id", "paper_ref", "pass", "lhs", "rhs"}
    assert [e["check_id"] for e in entries] == sorted(e["check_id"] for e in entries)
    text = (out / "report.txt").read_text()
    assert text.startswith("PASS [")
    assert "ALL PASS" in capsys.readouterr().out


def test_reports_are_byte_identical_across_runs_and_jobs(tmp_path):
    cfg = write(tmp_path, small_config(seed=11))
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["run", cfg, "--out", str(a)]) == EXIT_OK
    assert main(["run", cfg, "--out", str(b), "--jobs", "3"]) == EXIT_OK
    for name in ("report.json", "report.txt"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_seed_changes_the_sampled_checks(tmp_path):
    cfg = write(tmp_path, small_config(suites=["verma"]))
    a, b = tmp_path / "a", tmp_path / "b"
    main(["run", cfg, "--out", str(a), "--seed", "1"])
    main(["run", cfg, "--out", str(b), "--seed", "2"])
    assert (a / "report.json").read_bytes() != (b / "report.json").read_bytes()


def test_suite_filter(tmp_path):
    out = tmp_path / "out"
    assert main(["run", write(tmp_path, small_config()), "--suite", "omega", "--out", str(out)]) == EXIT_OK
    entries = json.loads((out / "report.json").read_text())
    assert {e["suite"] for e in entries} == {"omega"}


def test_critical_level_config(capsys):
    assert main(["run", os.path.join(CONFIGS, "critical.json"), "--out", "/nonexistent"]) == EXIT_CONFIG
    err = capsys.readouterr().err
    assert "engine.c" in err and "critical" in err


def test_wrong_chart_inverse_config(capsys):
    assert main(["run", os.path.join(CONFIGS, "bad_chart.json"), "--out", "/nonexistent"]) == EXIT_CONFIG
    err = capsys.readouterr().err
    assert "charts" in err and "entry 2" in err


@pytest.mark.parametrize(
    "patch,field",
    [
        ({"seed": "abc"}, "seed"),
        ({"suites": ["axioms", "nope"]}, "suites"),
        ({"samples": ["x1 +"]}, "samples"),
        ({"engine": {"N": 0, "algebra": "sl2", "c": "1"}}, "engine"),
    ],
)
def test_invalid_fields_are_named(tmp_path, capsys, patch, field):
    doc = small_config(**copy.deepcopy(patch))
    assert main(["run", write(tmp_path, doc), "--out", str(tmp_path)]) == EXIT_CONFIG
    assert field in capsys.readouterr().err


def test_unreadable_config(tmp_path, capsys):
    p = tmp_path / "broken.json"
    p.write_text("{not json")
    assert main(["run", str(p)]) == EXIT_CONFIG
    assert main(["run", str(tmp_path / "missing.json")]) == EXIT_CONFIG


def test_inconsistent_algebra_data_fails_checks(tmp_path):
    # doubling the form without adjusting the dual Coxeter number breaks the Sugawara element
    alg = builtin("sl2")
    rows = [[i, j, k, str(c)] for i in range(3) for j in range(3) for k, c in alg.bracket(i, j).items()]
    algebra = {"name": "sl2-doubled", "basis": list(alg.labels), "structure_constants": rows,
               "form": [[str(2 * x) for x in r] for r in alg.form], "dual_coxeter": 2}
    doc = small_config(suites=["axioms"], samples=["1", "x1"], charts=[])
    doc["engine"] = {"N": 1, "algebra": algebra, "c": "1"}
    out = tmp_path / "out"
    assert main(["run", write(tmp_path, doc), "--out", str(out)]) == EXIT_FAIL
    text = (out / "report.txt").read_text()
    assert "FAIL [axioms]" in text and "lhs:" in text


def test_eval(capsys):
    assert main(["eval", "E(1,2)(-1) | x1 _(1) E(2,1)(-1) | x2"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "1 | x1*x2"
    eng = Engine.create(2, "sl2", 1)
    assert evaluate("G(e)(-1) | 1 _(0) G(f)(-1) | 1", eng) == "G(h)(-1) | 1"
    assert evaluate("u1(-1) | 1 _(-1) 1 | x2", eng) == "u1(-1) | x2"


@pytest.mark.parametrize("expr", ["u1(-1) | 1", "u1(-1) | 1 _(0) x", "u9(-1) | 1 _(0) 1 | 1"])
def test_eval_errors(expr):
    assert main(["eval", expr]) == EXIT_CONFIG


def test_eval_rejects_critical_level():
    assert main(["eval", "1 | 1 _(-1) 1 | 1", "--c", "-2"]) == EXIT_CONFIG


def test_char(capsys):
    assert main(["char", os.path.join(CONFIGS, "verma.json")]) == EXIT_OK
    fast = json.loads(capsys.readouterr().out)
    assert main(["char", os.path.join(CONFIGS, "verma.json"), "--brute"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out) == fast == [4, 48, 360, 2080]
