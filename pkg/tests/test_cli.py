import json
import subprocess
import sys

import jsonschema
import pytest

from ringlab.cli import load_complex, main
from ringlab.report import load_schema

Z4_FILE = {"ring": "zmod(4)", "degrees": [0, 1], "terms": [["free", 1], ["free", 1]], "diffs": {"1": [[2]]}}


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--json")
    data = json.loads(out)
    jsonschema.validate(data, load_schema())
    return code, data, err


def test_check(capsys):
    code, d, _ = run_json(capsys, "check", "zmod(4)")
    assert code == 0 and d["command"] == "check"
    assert d["verdicts"]["vnr"] is False and d["verdicts"]["radical"] == [0, 2]
    assert d["witnesses"]["non_regular_element"] == 2


@pytest.mark.parametrize("spec", ["zmod(0)", "gf(6)", "foo(2)", "zmod(4"])
def test_bad_specs_exit_2(capsys, spec):
    code, out, err = run(capsys, "check", spec)
    assert code == 2 and err.startswith("error:") and not out


def test_size_cap_exit_2(capsys):
    code, _, err = run(capsys, "check", "mat(2,zmod(4))")
    assert code == 2 and "error" in err
    code, _, _ = run(capsys, "check", "zmod(4)", "--max-elements", "2")
    assert code == 2


def test_gh_z4_witness(capsys):
    code, d, _ = run_json(capsys, "gh", "zmod(4)", "--max-rank", "1", "--span", "2", "--exhaustive")
    assert code == 0 and d["verdicts"]["holds"] is False
    w = d["witnesses"]["gh"]
    assert w["phi_tuple"] == [2, 0]
    assert w["P"]["diffs"] == {"1": [[2]]}
    assert w["transcript"]["verified"] is True


def test_gh_expect_sets_exit_code(capsys):
    assert run(capsys, "gh", "zmod(4)", "--expect", "fails")[0] == 0
    assert run(capsys, "gh", "zmod(4)", "--expect", "holds")[0] == 1
    assert run(capsys, "gh", "zmod(6)", "--strong", "--expect", "holds")[0] == 0


def test_human_and_json_agree(capsys):
    _, d, _ = run_json(capsys, "gh", "gf(2)", "--strong", "--nfold", "2")
    _, out, _ = run(capsys, "gh", "gf(2)", "--strong", "--nfold", "2")
    for k in ("holds", "strong_holds", "nfold_holds"):
        assert f"  {k}: {d['verdicts'][k]}" in out


def test_gh_sampled_records_seed(capsys):
    _, d, _ = run_json(capsys, "gh", "gf(3)", "--samples", "40", "--seed", "9")
    assert d["seed"] == 9 and d["bounds"]["mode"] == "sampled" and d["verdicts"]["qualified"]


def test_classify(capsys):
    code, d, _ = run_json(capsys, "classify", "zmod(6)")
    assert code == 0 and d["verdicts"]["gh"] and not d["verdicts"]["red_alert"]
    code, d, _ = run_json(capsys, "classify", "zmod(4)")
    assert code == 0 and not d["verdicts"]["gh"] and "fp_injective" in d["witnesses"]


def test_homology(capsys, tmp_path):
    f = tmp_path / "z4.json"
    f.write_text(json.dumps(Z4_FILE))
    code, d, _ = run_json(capsys, "homology", str(f))
    assert code == 0
    assert d["verdicts"]["homology"] == {"0": {"order": 2, "structure": "Z/2"}, "1": {"order": 2, "structure": "Z/2"}}


def test_homology_rejects_bad_differential(capsys, tmp_path):
    bad = {"ring": "zmod(4)", "degrees": [0, 2], "terms": [["free", 1]] * 3, "diffs": {"1": [[1]], "2": [[1]]}}
    f = tmp_path / "bad.json"
    f.write_text(json.dumps(bad))
    code, _, err = run(capsys, "homology", str(f))
    assert code == 2 and "witness: degree 2, element 1" in err


def test_homology_input_errors(capsys, tmp_path):
    assert run(capsys, "homology", str(tmp_path / "missing.json"))[0] == 2
    f = tmp_path / "junk.json"
    f.write_text("{")
    assert run(capsys, "homology", str(f))[0] == 2


def test_load_complex_term_forms():
    P = load_complex({"ring": "zmod(6)", "degrees": [0, 1], "terms": {"0": {"free": 1}, "1": ["free", 1]},
                      "diffs": {"1": [[3]]}})
    assert (P.homology.order(0), P.homology.order(1)) == (3, 3)


def test_witness(capsys):
    code, d, _ = run_json(capsys, "witness", "zmod(4)", "--presentation", "[[2]]", "--target", "[[2]]",
                          "--degree", "1")
    assert code == 0 and d["verdicts"]["ext_order"] == 2 and d["verdicts"]["verified"]
    assert d["witnesses"]["chain_map"]["phi"] == {"0": [0], "1": [1]}
    code, d, _ = run_json(capsys, "witness", "gf(2)", "--presentation", "[[0]]")
    assert code == 0 and not d["verdicts"]["witness_found"]
    assert run(capsys, "witness", "zmod(4)", "--presentation", "[2]")[0] == 2


def test_cache_hit_keeps_output_and_exit_code(capsys, tmp_path):
    args = ["gh", "zmod(4)", "--expect", "holds", "--cache-dir", str(tmp_path), "--json"]
    code1, out1, err1 = run(capsys, *args)
    code2, out2, err2 = run(capsys, *args)
    assert code1 == code2 == 1
    assert "(cached)" not in err1 and "(cached)" in err2
    assert json.loads(out1)["verdicts"] == json.loads(out2)["verdicts"]
    code3, _, err3 = run(capsys, *args, "--no-cache")
    assert code3 == 1 and "(cached)" not in err3


def test_cache_is_opt_in(capsys, tmp_path, monkeypatch):
    monkeypatch.delenv("RINGLAB_CACHE_DIR", raising=False)
    monkeypatch.setenv("HOME", str(tmp_path))
    run(capsys, "check", "gf(2)")
    assert not any(tmp_path.rglob("*.json"))


def test_entry_point_runs():
    out = subprocess.run([sys.executable, "-m", "ringlab.cli", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.startswith("ringlab ")
