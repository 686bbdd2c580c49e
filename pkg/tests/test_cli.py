import json
import subprocess
import sys
from pathlib import Path

import pytest

from stablegraphs.cli import main

GOLDEN = Path(__file__).parent / "golden"

CASES = {
    "invariants_tripod": ("invariants", 0),
    "validate_bad_involution": ("validate", 3),
    "stabilize_case2": ("stabilize", 0),
    "pushforward_absolute": ("pushforward", 0),
    "contract_bridge": ("contract", 0),
    "cut_bridge": ("cut", 0),
    "glue_loop": ("glue", 0),
    "forget_type2": ("forget", 0),
    "compose_isogenies": ("compose", 0),
    "compose_marked": ("compose", 0),
    "pullback_case2": ("pullback", 0),
    "cartesian_case2": ("cartesian", 0),
    "boundary_tree4": ("boundary", 0),
    "dim_p2_d2": ("dim", 0),
    "deg_p2_d2": ("deg", 0),
    "export_dot": ("export-dot", 0),
}


@pytest.mark.parametrize("stem", sorted(CASES))
def test_golden_output_and_exit_code(stem, tmp_path):
    verb, expected_exit = CASES[stem]
    golden = (GOLDEN / "out" / f"{stem}.out").read_bytes()
    first = tmp_path / "first.out"
    second = tmp_path / "second.out"
    assert main([verb, "--in", str(GOLDEN / "in" / f"{stem}.json"), "--out", str(first)]) == expected_exit
    assert main([verb, "--in", str(GOLDEN / "in" / f"{stem}.json"), "--out", str(second)]) == expected_exit
    assert first.read_bytes() == second.read_bytes() == golden


def test_invariants_match_contract():
    out = json.loads((GOLDEN / "out" / "invariants_tripod.out").read_text())
    assert out == {"tails": 3, "edges": 0, "chi": 1, "genus": 0, "stable": True}


def test_cartesian_degrees_match():
    out = json.loads((GOLDEN / "out" / "cartesian_case2.out").read_text())
    assert out["size"] == 3
    assert all(member["deg"] == out["deg"] for member in out["family"])


def test_validate_accepts_all_kinds(tmp_path):
    import stablegraphs as sg
    from stablegraphs.isogeny import ForgetStep, extended_isogeny
    from stablegraphs.serialize import isogeny_to_json, marked_to_json

    g = sg.marked_graph(1, {0: (1, 1)}, tails={0: 0, 1: 0})
    docs = [
        marked_to_json(sg.identity_marked(g)),
        isogeny_to_json(extended_isogeny(g, (), (ForgetStep(1),))),
    ]
    for i, doc in enumerate(docs):
        path = tmp_path / f"doc{i}.json"
        path.write_text(json.dumps(doc))
        assert main(["validate", "--in", str(path), "--out", str(tmp_path / "o")]) == 0


def test_validate_rejects_type_iv_isogeny(tmp_path, capsys):
    import stablegraphs as sg
    from stablegraphs.isogeny import ForgetStep, extended_isogeny
    from stablegraphs.serialize import isogeny_to_json

    tripod = sg.modular_graph({0: 0}, tails={0: 0, 1: 0, 2: 0})
    doc = isogeny_to_json(extended_isogeny(tripod, (), (ForgetStep(0),)))
    path = tmp_path / "iv.json"
    path.write_text(json.dumps(doc))
    assert main(["validate", "--in", str(path)]) == 3
    payload = json.loads(capsys.readouterr().out)
    assert "isogeny-pi0" in payload["error"]["conditions"]


def test_malformed_json_is_schema_error(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["invariants", "--in", str(bad)]) == 2
    payload = json.loads(capsys.readouterr().out)
    assert payload["error"]["type"] == "schema"


def test_missing_key_is_schema_error(tmp_path, capsys):
    doc = tmp_path / "doc.json"
    doc.write_text(json.dumps({"flags": [0]}))
    assert main(["invariants", "--in", str(doc)]) == 2


def test_size_cap_exit(tmp_path, capsys):
    g = {
        "rank": 0,
        "flags": list(range(20)),
        "vertices": [{"id": 0, "genus": 0, "class": []}],
        "boundary": {str(i): 0 for i in range(20)},
        "involution": {str(i): i for i in range(20)},
    }
    doc = tmp_path / "big.json"
    doc.write_text(json.dumps(g))
    assert main(["invariants", "--in", str(doc)]) == 4
    payload = json.loads(capsys.readouterr().out)
    assert payload["error"]["type"] == "size-cap"
    # a raised cap admits the same document
    assert main(["invariants", "--in", str(doc), "--max-flags", "32"]) == 0


def test_subprocess_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "stablegraphs", "invariants", "--in", str(GOLDEN / "in" / "invariants_tripod.json")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["tails"] == 3


def test_stdin_stdout(tmp_path):
    doc = (GOLDEN / "in" / "invariants_tripod.json").read_text()
    proc = subprocess.run(
        [sys.executable, "-m", "stablegraphs", "invariants"],
        input=doc,
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["chi"] == 1
