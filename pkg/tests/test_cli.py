import json
import subprocess
import sys

import pytest

from asctool import catalog
from asctool.cli import run


@pytest.fixture
def corpus(tmp_path):
    catalog.write_corpus(tmp_path)
    return tmp_path


def _run(capsys, *argv):
    code = run([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_asc_check_holds(capsys, corpus):
    code, out, _ = _run(capsys, "asc", "check", "--spec", corpus / "monadic-s2.json")
    assert code == 0 and out.startswith("asc check: HOLDS")


def test_sc_check_fails(capsys, corpus):
    code, out, _ = _run(capsys, "asc", "sc-check", "--spec", corpus / "monadic-s2.json")
    assert code == 1 and "no-hom-to-F0" in out


def test_alg_hom_none(capsys, corpus):
    code, out, _ = _run(capsys, "alg", "hom", corpus / "s2.json", corpus / "two.json")
    assert code == 1 and "none found" in out


def test_alg_hom_all_json(capsys, corpus):
    code, out, _ = _run(capsys, "alg", "hom", corpus / "four.json", corpus / "two.json",
                        "--mode", "all", "--json")
    assert code == 0 and json.loads(out)["maps"] == [[0, 1, 0, 1]]


def test_human_and_json_agree(capsys, corpus):
    for cmd in ("check", "sc-check"):
        c1, human, _ = _run(capsys, "asc", cmd, "--spec", corpus / "monadic-s2.json")
        c2, js, _ = _run(capsys, "asc", cmd, "--spec", corpus / "monadic-s2.json", "--json")
        assert c1 == c2
        assert human.splitlines()[0].endswith(json.loads(js)["status"])


def test_json_is_byte_stable(capsys, corpus):
    _, a, _ = _run(capsys, "asc", "check", "--spec", corpus / "lattice-m3b.json", "--json")
    _, b, _ = _run(capsys, "asc", "check", "--spec", corpus / "lattice-m3b.json", "--json")
    assert a == b


def test_verify_round_trip(capsys, corpus, tmp_path):
    _, js, _ = _run(capsys, "asc", "sc-check", "--spec", corpus / "monadic-s2.json", "--json")
    saved = tmp_path / "verdict.json"
    saved.write_text(js)
    code, out, _ = _run(capsys, "asc", "sc-check", "--spec", corpus / "monadic-s2.json",
                        "--verify", saved, "--json")
    rep = json.loads(out)
    assert code == 0 and rep["verified_status"] == "FAILS"
    assert all(c["ok"] for c in rep["checks"])


def test_verify_detects_tampering(capsys, corpus, tmp_path):
    _, js, _ = _run(capsys, "asc", "check", "--spec", corpus / "monadic-s2.json", "--json")
    data = json.loads(js)
    for c in data["certificates"]:
        if "map" in c:
            c["map"] = [0] * len(c["map"])
    saved = tmp_path / "bad.json"
    saved.write_text(json.dumps(data))
    code, _, _ = _run(capsys, "asc", "check", "--spec", corpus / "monadic-s2.json", "--verify", saved)
    assert code == 1


def test_cite_flag(capsys, corpus):
    _, out, _ = _run(capsys, "asc", "check", "--spec", corpus / "lattice-m3b.json", "--cite")
    assert "cite:" in out and "join-irreducible" in out


def test_classify(capsys, corpus):
    qi = "(qi (vars 1) (prem (= (meet (dia x) (dia (neg x))) one)) (concl (= zero one)))"
    code, out, _ = _run(capsys, "asc", "classify", "--spec", corpus / "monadic-s2.json", qi, "--json")
    assert code == 0 and json.loads(out)["classification"] == "PASSIVE"


def test_ascc_splitting_decomp_nonembed(capsys, corpus):
    assert _run(capsys, "asc", "ascc", "--spec", corpus / "lattice-m3b.json", corpus / "m3b.json")[0] == 1
    code, out, _ = _run(capsys, "asc", "splitting", "--spec", corpus / "monadic-s2.json", "--json")
    rep = json.loads(out)["certificates"][0]
    assert code == 0 and rep["s2_present"] and not rep["mckinsey_holds"]
    assert _run(capsys, "asc", "free-decomp", "--spec-u", corpus / "closure-four.json",
                "--spec-w", corpus / "monadic-s2.json", "--rank", 1)[0] == 0
    assert _run(capsys, "asc", "non-embed", "heyting-2sq", "--rank", 1)[0] == 0


def test_cap_gives_inconclusive(capsys):
    code, out, _ = _run(capsys, "asc", "non-embed", "closure-4sq", "--rank", 1, "--size-max", 50)
    assert code == 2 and "INCONCLUSIVE" in out


def test_alg_commands(capsys, corpus, tmp_path):
    assert _run(capsys, "alg", "validate", corpus / "four.json")[0] == 0
    assert _run(capsys, "alg", "check-id", corpus / "s2.json", "(= (mu x) one)")[0] == 1
    assert _run(capsys, "alg", "check-qi", corpus / "two.json",
                "(qi (vars 1) (prem (= (dia x) one)) (concl (= x one)))")[0] == 0
    assert _run(capsys, "alg", "iso", corpus / "two-sq.json", corpus / "s2.json")[0] == 1
    assert _run(capsys, "alg", "embed", corpus / "two.json", corpus / "s2.json")[0] == 0
    out = tmp_path / "p.json"
    assert _run(capsys, "alg", "product", corpus / "four.json", corpus / "four.json", "-o", out)[0] == 0
    assert _run(capsys, "alg", "iso", out, corpus / "four-sq.json")[0] == 0
    code, js, _ = _run(capsys, "alg", "quotient", corpus / "four.json", "--pair", "0,2", "--json")
    assert code == 0 and json.loads(js)["algebra"]["size"] == 2


def test_cong_commands(capsys, corpus):
    code, out, _ = _run(capsys, "cong", "list", corpus / "four-sq.json", "--json")
    assert code == 0 and json.loads(out)["count"] == 9
    assert _run(capsys, "cong", "si", corpus / "two-sq.json")[0] == 1
    assert _run(capsys, "cong", "simple", corpus / "m3b.json")[0] == 0


def test_var_commands(capsys, corpus):
    code, out, _ = _run(capsys, "var", "free", "--spec", corpus / "monadic-s2.json", "--rank", 1, "--json")
    assert code == 0 and json.loads(out)["algebra"]["size"] == 16
    code, out, _ = _run(capsys, "var", "si-list", "--spec", corpus / "lattice-m3b.json", "--json")
    assert [m["size"] for m in json.loads(out)["members"]] == [2, 5]
    assert _run(capsys, "var", "member", "--spec", corpus / "closure-four.json", corpus / "s2.json")[0] == 1
    assert _run(capsys, "var", "unify", "--spec", corpus / "monadic-s2.json", corpus / "s2.json")[0] == 1
    assert _run(capsys, "var", "in-qf", "--spec", corpus / "closure-m8.json", corpus / "m8.json")[0] == 0
    code, out, _ = _run(capsys, "var", "present", "--spec", corpus / "heyting-lev2.json", "--rank", 1,
                        "--rel", "(= (join x (neg x)) one)", "--json")
    assert code == 0 and json.loads(out)["algebra"]["size"] == 4


def test_catalog_commands(capsys, corpus):
    code, out, _ = _run(capsys, "catalog", "s2", "--json")
    assert code == 0 and json.loads(out)["algebra"]["size"] == 4
    assert _run(capsys, "catalog", "poset-lev", 2)[0] == 0
    code, out, _ = _run(capsys, "catalog", "complex", corpus / "lev2-poset.json", "--json")
    assert json.loads(out)["algebra"]["size"] == 8
    code, out, _ = _run(capsys, "catalog", "upset", corpus / "lev2-poset.json", "--json")
    assert json.loads(out)["algebra"]["size"] == 5
    code, out, _ = _run(capsys, "catalog", "open", corpus / "b-lev2.json", "--json")
    assert json.loads(out)["algebra"]["size"] == 5
    assert _run(capsys, "catalog", "list")[0] == 0


def test_usage_and_data_errors(capsys, corpus, tmp_path):
    with pytest.raises(SystemExit) as e:
        run(["frobnicate"])
    assert e.value.code == 64
    assert _run(capsys, "catalog", "no-such-algebra")[0] == 64
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert _run(capsys, "alg", "validate", bad)[0] == 65
    bad.write_text(json.dumps({"size": 2, "signature": [{"op": "f", "arity": 1}], "tables": {"f": [5, 0]}}))
    assert _run(capsys, "alg", "validate", bad)[0] == 65
    assert _run(capsys, "alg", "check-id", corpus / "two.json", "(= x")[0] == 65
    assert _run(capsys, "asc", "ascc", "--spec", corpus / "closure-two.json", corpus / "s2.json")[0] == 65


def test_entry_point_subprocess(corpus):
    p = subprocess.run([sys.executable, "-m", "asctool.cli", "asc", "check", "--spec",
                        str(corpus / "monadic-s2.json")], capture_output=True, text=True)
    assert p.returncode == 0 and "HOLDS" in p.stdout


def test_free_decomp_verify(capsys, corpus, tmp_path):
    args = ["asc", "free-decomp", "--spec-u", corpus / "closure-four.json",
            "--spec-w", corpus / "monadic-s2.json", "--rank", 1]
    _, js, _ = _run(capsys, *args, "--json")
    saved = tmp_path / "v.json"
    saved.write_text(js)
    assert _run(capsys, *args, "--verify", saved)[0] == 0


def test_output_file_round_trips_through_verify(capsys, corpus, tmp_path):
    out = tmp_path / "v.json"
    code, _, _ = _run(capsys, "asc", "check", "--spec", corpus / "monadic-s2.json", "-o", out)
    assert code == 0 and json.loads(out.read_text())["status"] == "HOLDS"
    code, text, _ = _run(capsys, "asc", "check", "--spec", corpus / "monadic-s2.json", "--verify", out)
    assert code == 0 and "False" not in text
