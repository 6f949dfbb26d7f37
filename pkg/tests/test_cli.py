import json
import subprocess
import sys

import pytest

from conftest import fixture_path
from reprlogic.cli import main, run


def call(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def f(name):
    return str(fixture_path(name))


CASES = [
    (("validate", f("london8")), 0, "valid"),
    (("check", "validity", f("arguments"), "--query", "modus-ponens"), 0, "valid"),
    (("check", "validity", f("fallacies")), 1, "invalid"),
    (("check", "validity", "--argument", "A -> B, A |- B"), 0, "valid"),
    (("check", "coherence", f("notebook")), 1, "incoherent"),
    (("check", "coherence", f("liar")), 1, "incoherent"),
    (("check", "coherence", f("london8")), 0, "coherent"),
    (("check", "faithfulness", f("london8")), 0, "faithful"),
    (("check", "faithfulness", f("tower_pyramid")), 1, "unfaithful"),
    (("check", "completeness", f("london8")), 0, "complete"),
    (("check", "s-completeness", f("circle16")), 0, "s-complete"),
    (("navigate", f("london8"), "Tower", "Piccadilly"), 0, "path"),
    (("explicitate", f("notebook"), "desk"), 1, "extrinsic"),
    (("explicitate", f("london8"), "London"), 0, "coherent"),
    (("project", f("circle16"), "Circle", "--region", "0,0,16,16"), 0, "projected"),
]


@pytest.mark.parametrize("argv,status,verdict", CASES, ids=lambda v: " ".join(v) if isinstance(v, tuple) else None)
def test_exit_codes_and_verdicts(capsys, argv, status, verdict):
    code, out, _ = call(capsys, *argv, "--report", "json")
    report = json.loads(out)
    assert code == status == report["status"]
    assert report["verdict"] == verdict
    if status == 1:
        assert report["witnesses"]


def test_notebook_witness_is_extrinsic(capsys):
    code, out, _ = call(capsys, "check", "coherence", f("notebook"))
    assert code == 1
    assert "witness: desk: extrinsic conflict at real:0,0 color=red|blue sources=code:0,code:1" in out
    assert out.rstrip().endswith("status: 1")


def test_fallacy_counterexamples(capsys):
    _, out, _ = call(capsys, "check", "validity", f("fallacies"), "--report", "json")
    witnesses = json.loads(out)["witnesses"]
    assert witnesses == [
        "affirming-the-consequent: counterexample A=0,B=1",
        "denying-the-antecedent: counterexample A=0,B=1",
    ]


def test_usage_errors_exit_2(capsys, tmp_path):
    bad = tmp_path / "bad.scn"
    bad.write_text("SCHEMA\nattr color red\nBANANA\n")
    code, out, err = call(capsys, "validate", str(bad))
    assert code == 2 and "line 3" in err
    assert call(capsys, "navigate", f("london8"), "Tower", "Atlantis")[0] == 2
    with pytest.raises(SystemExit) as info:
        main(["dance"])
    assert info.value.code == 2


def test_repeat_runs_are_byte_identical(capsys):
    argv = ["check", "faithfulness", f("tower_pyramid"), "--timing"]
    first = call(capsys, *argv)[1].splitlines()
    second = call(capsys, *argv)[1].splitlines()
    # wall-clock is the only field allowed to move
    strip = lambda lines: [l for l in lines if not l.startswith("timing.elapsed_ms")]  # noqa: E731
    assert strip(first) == strip(second)
    argv = ["navigate", f("london8"), "Tower", "Piccadilly", "--report", "json"]
    assert call(capsys, *argv)[1] == call(capsys, *argv)[1]


def test_options_before_or_after_subcommand():
    a, fmt_a = run(["--report", "json", "navigate", f("london8"), "Tower", "Piccadilly"])
    b, fmt_b = run(["navigate", f("london8"), "Tower", "Piccadilly", "--report", "json"])
    assert fmt_a == fmt_b == "json"
    assert a.details == b.details


def test_figures_are_written(capsys, tmp_path):
    code, _, _ = call(capsys, "navigate", f("london8"), "Tower", "Piccadilly", "--figures", str(tmp_path))
    assert code == 0
    code, _, _ = call(capsys, "explicitate", f("notebook"), "desk", "--figures", str(tmp_path))
    code, _, _ = call(capsys, "project", f("notebook"), "C", "--figures", str(tmp_path))
    names = sorted(p.name for p in tmp_path.iterdir())
    assert "path.png" in names
    assert any(n.startswith("C-") for n in names)
    assert all((tmp_path / n).read_bytes()[:4] == b"\x89PNG" for n in names)


def test_module_entry_point():
    done = subprocess.run(
        [sys.executable, "-m", "reprlogic.cli", "check", "validity", "--argument", "A |- A | B"],
        capture_output=True, text=True,
    )
    assert done.returncode == 0
    assert "verdict: valid" in done.stdout
