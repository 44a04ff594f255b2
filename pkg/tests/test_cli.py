import json
import subprocess
import sys
from pathlib import Path

import pytest

from freelip import demos
from freelip.cli import dispatch

CORPUS = Path(__file__).parent / "corpus"


def c(name):
    return str(CORPUS / name)


def run(capsys, *argv):
    code = dispatch(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_validate_ok(capsys):
    code, out, _ = run(capsys, "validate", "--space", c("line.json"))
    assert code == 0 and json.loads(out)["ok"] is True


def test_validate_violation(capsys):
    code, out, _ = run(capsys, "validate", "--space", c("invalid_triangle.json"))
    assert code == 3
    assert json.loads(out)["violations"][0]["kind"] == "triangle"


def test_norm_certify_exact(capsys):
    code, out, _ = run(capsys, "norm", "--space", c("line.json"), "--molecule", c("line_mol.json"), "--exact")
    doc = json.loads(out)
    assert code == 0 and doc["primal"] == "3" and doc["gap"] == "0" and doc["certified"]


@pytest.mark.parametrize("mode,key", [("primal", "plan"), ("dual", "witness")])
def test_norm_modes(capsys, mode, key):
    code, out, _ = run(capsys, "norm", "--space", c("line.json"), "--molecule", c("line_mol.json"),
                       "--mode", mode)
    assert code == 0 and key in json.loads(out)


def test_embed_check(capsys):
    code, out, _ = run(capsys, "embed-check", "--space", c("z2.json"))
    assert code == 0 and json.loads(out)["pairs_checked"] == 6


def test_linearize(capsys):
    code, out, _ = run(capsys, "linearize", "--source", c("line.json"), "--target", c("line.json"),
                       "--map", c("fold.json"), "--exact")
    assert code == 0 and json.loads(out)["commuting_square"]["ok"]


def test_action_check(capsys):
    code, out, _ = run(capsys, "action-check", "--space", c("z2.json"), "--action", c("z2_action.json"))
    assert code == 0 and json.loads(out)["group_order"] == 2
    code, out, _ = run(capsys, "action-check", "--space", c("z2.json"), "--action", c("action_moves_base.json"))
    assert code == 3


def test_compactify(capsys):
    code, out, _ = run(capsys, "compactify", "--space", c("z2.json"), "--action", c("z2_action.json"), "--exact")
    doc = json.loads(out)
    assert code == 0 and doc["equivariance"]["ok"]


def test_horolimit(capsys):
    code, out, _ = run(capsys, "horolimit", "--oracle", "builtin:half-line", "--seq", c("seq50.json"),
                       "--window", c("window.json"))
    doc = json.loads(out)
    assert code == 0 and doc["classification"] == "boundary"
    assert doc["limit"]["7"] == -7


def test_orbit_and_wap(capsys):
    code, out, _ = run(capsys, "orbit", "--space", c("z2.json"), "--action", c("z2_action.json"),
                       "--f", c("rho_a.json"))
    assert code == 0 and json.loads(out)["size"] == 2
    code, out, _ = run(capsys, "wap", "--space", c("z2.json"), "--action", c("z2_action.json"),
                       "--f", c("rho_a.json"), "--v", "a", "--rows", c("words.json"),
                       "--cols", c("words.json"))
    assert code == 0 and json.loads(out)["kind"] == "consistent"


def test_stability(capsys):
    code, out, _ = run(capsys, "stability", "--oracle", "half-line", "--seqA", c("seq50.json"),
                       "--seqB", c("seq50.json"))
    assert code == 4 and json.loads(out)["kind"] == "inconclusive"


def test_table_format(capsys):
    code, out, _ = run(capsys, "--format", "table", "validate", "--space", c("line.json"))
    assert code == 0 and "ok" in out and not out.lstrip().startswith("{")


def test_demo_list_and_unknown(capsys):
    code, out, _ = run(capsys, "demo", "--list")
    assert code == 0 and json.loads(out)["demos"] == sorted(demos.REGISTRY)
    code, _, _ = run(capsys, "demo", "--name", "nope")
    assert code == 1


@pytest.mark.parametrize("name", sorted(demos.REGISTRY))
def test_demo_passes(capsys, name):
    code, out, _ = run(capsys, "--seed", "3", "demo", "--name", name)
    assert code == 0 and json.loads(out)["ok"]


MALFORMED = [
    (["validate", "--space", "bad_truncated.json"], 1),
    (["validate", "--space", "bad_ragged.json"], 1),
    (["validate", "--space", "bad_nonnumeric.json"], 1),
    (["validate", "--space", "bad_missing_dist.json"], 1),
    (["validate", "--space", "bad_base.json"], 1),
    (["validate", "--space", "bad_not_object.json"], 1),
    (["validate", "--space", "bad_columns.csv"], 1),
    (["validate", "--space", "does_not_exist.json"], 1),
    (["norm", "--space", "invalid_triangle.json", "--molecule", "line_mol.json"], 1),
    (["norm", "--space", "line.json", "--molecule", "bad_mol_unbalanced.json"], 1),
    (["norm", "--space", "line.json", "--molecule", "bad_mol_label.json"], 1),
    (["norm", "--space", "line.json", "--molecule", "bad_truncated.json"], 1),
    (["action-check", "--space", "z2.json", "--action", "bad_action_perm.json"], 1),
    (["linearize", "--source", "line.json", "--target", "line.json", "--map", "bad_map_base.json"], 1),
    (["horolimit", "--oracle", "builtin:nope", "--seq", "seq50.json", "--window", "window.json"], 1),
    (["horolimit", "--oracle", "half-line", "--seq", "bad_not_object.json", "--window", "seq50.json"], 1),
    (["validate"], 1),
    (["frobnicate"], 1),
    ([], 1),
    (["validate", "--space", "invalid_triangle.json"], 3),
    (["action-check", "--space", "z2.json", "--action", "action_moves_base.json"], 3),
    (["stability", "--oracle", "half-line", "--seqA", "seq50.json", "--seqB", "seq50.json"], 4),
]


def _resolve(argv):
    return [c(a) if a.endswith((".json", ".csv")) else a for a in argv]


def exit_code(argv):
    try:
        return dispatch(_resolve(argv))
    except SystemExit as exc:
        return exc.code


@pytest.mark.parametrize("argv,expected", MALFORMED, ids=[" ".join(a[:1] + [a[-1]]) if a else "empty"
                                                          for a, _ in MALFORMED])
def test_exit_codes(capsys, argv, expected):
    assert exit_code(argv) == expected
    err = capsys.readouterr().err
    if expected == 1:
        assert err.strip()


def test_error_message_names_location(capsys):
    run(capsys, "validate", "--space", c("bad_truncated.json"))
    code, _, err = run(capsys, "validate", "--space", c("bad_truncated.json"))
    assert "bad_truncated.json:1:" in err


def _cli(*argv):
    return subprocess.run([sys.executable, "-m", "freelip.cli", *argv], capture_output=True)


def test_subprocess_determinism():
    a = _cli("--seed", "5", "demo", "--name", "norm-line")
    b = _cli("--seed", "5", "demo", "--name", "norm-line")
    assert a.returncode == b.returncode == 0
    assert a.stdout == b.stdout and a.stdout
