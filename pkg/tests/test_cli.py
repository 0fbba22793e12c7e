import json
import subprocess
import sys
from pathlib import Path

import pytest

from cpc import corpus
from cpc.cli import main

GOLDEN = Path(__file__).parent / "golden"


def cpc(*args, stdin=None):
    return subprocess.run([sys.executable, "-m", "cpc.cli", *args], capture_output=True, text=True,
                          input=stdin, timeout=120)


@pytest.mark.parametrize("args, code", [
    (["parse", "-e", r"\x -> x"], 0),
    (["parse", "-e", "a -> ("], 2),
    (["bisim", "-e", "!(n -> 0)", "-e", "#n -> 0 | !(n -> 0)"], 0),
    (["bisim", "-e", r"\x . \y -> 0", "-e", r"\z -> 0"], 1),
    (["unify", r"\x . a", r"b . \y"], 0),
    (["unify", r"\x", r"\y"], 1),
])
def test_exit_codes(args, code, capsys):
    assert main(args) == code


def test_unknown_command_is_usage_error():
    assert cpc("frobnicate").returncode == 2


def test_parse_error_position(capsys):
    main(["parse", "-e", "a -> ("])
    assert "1:7" in capsys.readouterr().err


def test_random_mode_is_reproducible():
    args = ["run", "-e", r"s . a -> ok | s . b -> ok | s . \x -> x", "--mode", "random", "--seed", "7"]
    first, second = cpc(*args), cpc(*args)
    assert first.returncode == 0
    assert first.stdout == second.stdout


def test_solution1_exhaustive():
    out = cpc("run", "-e", corpus.TRADE["solution1"], "--json")
    data = json.loads(out.stdout)
    assert data["complete"]
    ends = [s for s in data["states"] if s["deadlock"]]
    assert [(s["depth"], s["process"]) for s in ends] == [(2, corpus.TRADE_FINAL)]


@pytest.mark.parametrize("golden, args", [
    ("corpus.json", ["corpus", "--json"]),
    ("lts.json", ["lts", "-e", r"(new n) (n . \x -> x) | !(a -> ok)", "--depth", "2", "--json"]),
])
def test_json_golden(golden, args):
    out = cpc(*args)
    assert out.returncode == 0
    assert json.loads(out.stdout) == json.loads((GOLDEN / golden).read_text())


def test_encode_and_check(tmp_path):
    src = tmp_path / "p.linda"
    src.write_text(r"out(b) | in(\x).ok")
    dst = tmp_path / "p.cpc"
    assert cpc("encode", "--from", "linda", str(src), "-o", str(dst)).returncode == 0
    assert "_hash" in dst.read_text()
    out = cpc("check-encoding", "--from", "linda", str(src), "--steps", "3", "--report", "json")
    assert out.returncode == 0
    assert json.loads(out.stdout)["valid"] is True
