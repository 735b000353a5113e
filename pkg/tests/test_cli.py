import csv
import io
import json
from contextlib import redirect_stdout

import pytest

from amalgam.cli import BATCH_COLUMNS, main

C22 = '{"family":"C","g":2,"h":2,"m":2,"n":2,"curve_a":{"kind":"nonseparating"},"curve_b":{"kind":"nonseparating"}}'
C23 = '{"family":"C","g":2,"h":2,"m":2,"n":3}'
C57 = '{"family":"C","g":2,"h":2,"m":5,"n":7}'
W6 = '{"family":"W","arms":[1,1,2,2,2,3]}'


def run(*argv):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main(list(argv))
    return code, buf.getvalue()


def test_classify_C():
    code, out = run("classify", C22)
    assert code == 0
    cls = json.loads(out)["classification"]
    assert cls["three_manifold"]["is_3manifold"] is True and cls["qi_class"] == "Mixed22"
    assert cls["oracle_agrees"] is True


def test_classify_W():
    code, out = run("classify", W6)
    rep = json.loads(out)
    assert code == 0
    assert rep["commensurability"]["euler_vector"] == ["0/4", "0/4", "-1/4", "-1/4", "-1/4", "-2/4"]
    assert rep["classification"]["qi_class"] == "Mixed2"
    assert rep["provenance"]["seed"] == 0


def test_classify_from_file(tmp_path):
    p = tmp_path / "spec.json"
    p.write_text(C22)
    assert run("classify", str(p)) == run("classify", C22)


@pytest.mark.parametrize("argv", [("classify", "{not json"), ("classify", '{"family":"C","g":1,"h":2,"m":1,"n":1}'),
                                  ("bogus",), ("geometry", "--m", "2", "--n", "3"), ("commensurate", W6, C22)])
def test_input_errors_exit_2(argv):
    assert run(*argv)[0] == 2


def test_qi():
    code, out = run("qi", C23, C57)
    assert code == 0 and json.loads(out)["quasi_isometric"] is True
    assert json.loads(run("qi", C22, '{"family":"W","arms":[1,1,1]}')[1])["quasi_isometric"] is False


def test_commensurate():
    code, out = run("commensurate", C23, '{"family":"W","arms":[1,1,1,1,5,5,5,5,5,5,7,7,7,7]}')
    assert code == 0 and json.loads(out)["verdict"]["status"] == "Commensurable"


def test_output_is_deterministic():
    assert run("classify", C23) == run("classify", C23)
    assert run("tower", C23, "--full") == run("tower", C23, "--full")


def test_human_rendering():
    code, out = run("classify", C22, "--human")
    assert code == 0 and "Mixed22" in out and not out.lstrip().startswith("{")


def test_tower_verify_and_covers(tmp_path):
    code, out = run("tower", C23, "--verify", "--emit-covers", str(tmp_path))
    assert code == 0
    tower = json.loads(out)["tower"]
    assert tower["all_links_pass"] and tower["X5_iso_Z2"]
    files = sorted(tmp_path.glob("*.json"))
    assert files
    code, out = run("verify-cover", str(files[0]))
    assert code == 0 and json.loads(out)["result"] == "PASS"

    # an euler off by two in the first surface is caught at condition (v)
    obj = json.loads(files[0].read_text())
    first = next(p for p in obj["total"]["pieces"] if p["kind"] == "surface")
    first["euler"] -= 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(obj))
    code, out = run("verify-cover", str(bad))
    rep = json.loads(out)
    assert code == 1 and rep["result"] == "FAIL" and rep["first_violation"]["condition"] == "v"
    assert run("verify-cover", str(tmp_path / "missing.json"))[0] == 2


def test_geometry():
    code, out = run("geometry", "--m", "2", "--n", "2", "--collapse-s", "3")
    rep = json.loads(out)
    assert code == 0 and rep["pass"]
    assert (rep["map"], rep["radius"], rep["measured_L"], rep["measured_C"]) == ("line", 18, "31/12", "69/31")
    code, out = run("geometry", "--m", "3", "--n", "3", "--collapse-s", "2", "--radius", "8", "--ordering", "last")
    rep = json.loads(out)
    assert code == 0 and rep["quotient_valence_ok"]


def test_batch(tmp_path):
    for name, text in [("b.json", C23), ("a.json", W6), ("c.json", C22)]:
        (tmp_path / name).write_text(text)
    code, out = run("batch", str(tmp_path))
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    assert [r["file"] for r in rows] == ["a.json", "b.json", "c.json"]
    assert list(rows[0]) == BATCH_COLUMNS
    (tmp_path / "d.json").write_text("{")
    code, out = run("batch", str(tmp_path), "--format", "json")
    rows = json.loads(out)["rows"]
    assert code == 2 and len(rows) == 4 and rows[-1]["status"] == "error"
