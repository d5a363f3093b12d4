from __future__ import annotations

import json
import os
from pathlib import Path

import pytest

from multisch.cli import main

GOLDEN = Path(__file__).parent / "golden"
INPUTS = GOLDEN / "inputs"
REGEN = os.environ.get("MULTISCH_REGEN_GOLDEN") == "1"


def inp(name: str) -> str:
    return str(INPUTS / name)


CASES = {
    "hom_21_111": ["hom", "[2,1]", "[1,1,1]"],
    "hom_2_3": ["hom", "[2]", "[3]"],
    "hom_11_11": ["hom", "[1,1]", "[1,1]"],
    "compose_hecke": ["compose", inp("hecke.json")],
    "compose_unit": ["compose", inp("unit.json")],
    "compose_mackey": ["compose", inp("mackey.json")],
    "realize_id2": ["realize", inp("id2.json"), "--width", "2"],
    "realize_hecke": ["realize", inp("hecke_composite.json"), "--width", "2"],
    "realize_swap": ["realize", inp("swap.json"), "--width", "2"],
    "verify_hecke": ["verify", "--suite", "hecke", "--max-card", "5"],
    "verify_functor": ["verify", "--suite", "functor", "--max-card", "4"],
    "reduce_5_p2": ["reduce", "[5]", "--p", "2"],
    "reduce_4_p2": ["reduce", "[4]", "--p", "2"],
    "reduce_6_p3": ["reduce", "[6]", "--p", "3"],
    "gamma_shape2_w2": ["gamma", "--shape", "[2]", "--width", "2"],
    "gamma_deg2_Z2": ["gamma", "--degree", "2", "--presentation", inp("Z2.json")],
    "gamma_empty_w5": ["gamma", "--shape", "[]", "--width", "5"],
}


def run(argv, capsys) -> tuple[int, str, str]:
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden(name, capsys):
    code, out, _ = run(CASES[name] + ["--format", "json", "--sorted"], capsys)
    assert code == 0
    path = GOLDEN / f"{name}.json"
    if REGEN or not path.exists():
        path.write_text(out, encoding="utf-8")
    assert out == path.read_text(encoding="utf-8")
    # byte-stable across repeated runs in one process
    assert run(CASES[name] + ["--format", "json", "--sorted"], capsys)[1] == out


def test_golden_contents():
    load = lambda n: json.loads((GOLDEN / f"{n}.json").read_text())
    assert load("hom_21_111")["count"] == 3
    assert load("hom_2_3")["count"] == 0
    assert load("hom_11_11")["count"] == 2
    assert load("compose_hecke")["text"] == "2·id"
    unit = json.loads((INPUTS / "unit.json").read_text())["inner"]
    assert len(load("compose_unit")["result"]["terms"]) == len(unit["terms"])
    assert load("compose_mackey")["text"] == "1·id + 1·[0 1; 1 0]"
    assert load("realize_id2")["matrix"] == [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]]
    assert load("realize_hecke")["matrix"] == [["2", "0", "0"], ["0", "2", "0"], ["0", "0", "2"]]
    assert all(r["status"] == "pass" for r in load("verify_hecke")["results"])
    assert all(r["status"] == "pass" for r in load("verify_functor")["results"])
    assert load("reduce_5_p2")["d"] == "5" and load("reduce_6_p3")["d"] == "20"
    assert load("reduce_4_p2")["d"] == "1"
    assert len(load("gamma_shape2_w2")["basis"]) == 3
    assert load("gamma_deg2_Z2")["module"] == "Z/4"
    assert load("gamma_empty_w5")["rank"] == 1


def test_text_output(capsys):
    code, out, _ = run(["compose", inp("hecke.json")], capsys)
    assert code == 0 and "2·id" in out
    code, out, _ = run(["gamma", "--degree", "2", "--presentation", inp("Z2.json")], capsys)
    assert "Z/4" in out


def test_input_errors_exit_2(capsys, tmp_path):
    assert run(["verify", "--suite", "nope"], capsys)[0] == 2
    code, _, err = run(["hom", "[2,", "[1]"], capsys)
    assert code == 2 and "position" in err
    assert run(["compose", str(tmp_path / "missing.json")], capsys)[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"inner": {"source": "[2]", "target": "[1,1]", "entries": [[2, 0]]}, "outer": 1}')
    assert run(["compose", str(bad)], capsys)[0] == 2
    assert run(["reduce", "[3]", "--p", "4"], capsys)[0] == 2
    assert run(["hom", "[1]", "[1]", "--ring", "R"], capsys)[0] == 2


def test_ring_flag(capsys):
    code, out, _ = run(["compose", inp("hecke.json"), "--ring", "Zmod:2", "--format", "json"], capsys)
    assert code == 0 and json.loads(out)["result"]["terms"] == []


@pytest.mark.parametrize("name", ["hom_21_111", "compose_unit", "reduce_5_p2", "gamma_shape2_w2"])
def test_golden_stable_across_processes(name):
    import subprocess
    import sys
    outs = set()
    for seed in ("0", "1", "12345"):
        env = {**os.environ, "PYTHONHASHSEED": seed}
        res = subprocess.run([sys.executable, "-m", "multisch.cli", *CASES[name], "--format", "json", "--sorted"],
                             capture_output=True, text=True, env=env, check=True)
        outs.add(res.stdout)
    assert outs == {(GOLDEN / f"{name}.json").read_text(encoding="utf-8")}
