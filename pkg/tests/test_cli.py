import json
import xml.etree.ElementTree as ET

import jsonschema
import pytest
from click.testing import CliRunner

from gcso import __version__
from gcso.cli import main

FIBER = {"type": "array", "items": {"type": "string", "pattern": r"^(pt|S\d+(xS\d+)*)$"}}
NUMBER = {"anyOf": [{"type": "integer"}, {"type": "string", "pattern": r"^-?\d+/\d+$"}, {"type": "number"}]}

FACES_SCHEMA = {
    "type": "object",
    "required": ["n", "lambda", "area", "f_vector", "lagrangian_only", "count", "faces"],
    "properties": {
        "n": {"type": "integer"},
        "lambda": {"type": "array", "items": NUMBER},
        "f_vector": {"type": "array", "items": {"type": "integer"}},
        "count": {"type": "integer"},
        "faces": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "dim", "isogram", "coastline", "support", "fiber", "lagrangian"],
                "properties": {
                    "id": {"type": "string", "pattern": "^[0-9a-f]{12}$"},
                    "dim": {"type": "integer", "minimum": 0},
                    "isogram": {"type": "array"},
                    "coastline": {"type": "array"},
                    "support": {"type": "array", "items": {"type": "string"}},
                    "fiber": {
                        "type": "object",
                        "required": ["stages", "total_dim"],
                        "properties": {"stages": FIBER, "total_dim": {"type": "integer"}},
                    },
                    "lagrangian": {"type": "boolean"},
                },
            },
        },
    },
}

FIBER_SCHEMA = {
    "type": "object",
    "required": ["n", "lambda", "point", "face", "stages", "total_dim", "area", "lagrangian"],
    "properties": {
        "point": {"type": "array", "items": NUMBER},
        "face": {"type": "object", "required": ["id", "dim"]},
        "stages": FIBER,
        "lagrangian": {"type": "boolean"},
    },
}


@pytest.fixture
def run():
    runner = CliRunner()

    def invoke(*args):
        return runner.invoke(main, [str(a) for a in args], catch_exceptions=False)

    return invoke


def test_version(run):
    result = run("--version")
    assert result.exit_code == 0 and __version__ in result.output


def test_faces_og15(run):
    result = run("faces", "-n", 5, "-l", "3,0")
    assert result.exit_code == 0
    data = json.loads(result.stdout)
    jsonschema.validate(data, FACES_SCHEMA)
    assert data["f_vector"] == [4, 6, 4, 1]
    assert data["count"] == 15
    assert sum(f["lagrangian"] for f in data["faces"]) == 3


def test_faces_lagrangian_only(run):
    data = json.loads(run("faces", "-n", 5, "-l", "3,0", "--lagrangian-only").stdout)
    assert data["count"] == 3
    assert sorted(f["dim"] for f in data["faces"]) == [0, 1, 3]
    assert all(f["fiber"]["total_dim"] == 3 for f in data["faces"])


def test_faces_output_is_byte_identical(run):
    first = run("faces", "-n", 6, "-l", "3,2,-1").stdout
    assert first == run("faces", "-n", 6, "-l", "3,2,-1").stdout


@pytest.mark.parametrize(
    "point, stages",
    [("0,0,0", ["pt", "pt", "S3"]), ("1/2,0,0", ["pt", "S2", "S1"]), ("1,1,1", ["pt", "pt", "S1"])],
)
def test_fiber_command(run, point, stages):
    result = run("fiber", "-n", 5, "-l", "3,0", "--point", point)
    assert result.exit_code == 0
    data = json.loads(result.stdout)
    jsonschema.validate(data, FIBER_SCHEMA)
    assert data["stages"] == stages
    assert data["lagrangian"] == (sum(int(s[1:]) for s in stages if s != "pt") == 3)


def test_fiber_point_rationals_round_trip(run):
    data = json.loads(run("fiber", "-n", 5, "-l", "3,0", "--point", "5/2,0,0").stdout)
    assert data["point"] == ["5/2", 0, 0]
    assert data["face"]["dim"] == 1


@pytest.mark.parametrize(
    "args, code, fragment",
    [
        (("fiber", "-n", 5, "-l", "3,0", "--point", "4,0,0"), 3, "u_{1,4} >= u_{1,3}"),
        (("fiber", "-n", 5, "-l", "3,0", "--point", "1,1"), 2, ""),
        (("faces", "-n", 5, "-l", "0,3"), 2, "lambda_1 >= lambda_2"),
        (("faces", "-n", 5, "-l", "x,1"), 2, "cannot parse"),
        (("render", "-n", 5, "-l", "3,0", "--face", "ffffffffffff"), 2, "unknown face id"),
        (("verify", "numeric"), 2, "--corpus"),
    ],
)
def test_error_exit_codes(run, args, code, fragment):
    result = run(*args)
    assert result.exit_code == code
    assert fragment in result.stderr


def test_capacity_exit_code(run, monkeypatch):
    monkeypatch.setenv("GCSO_ORACLE_CAP", "3")
    from gcso.polytope import correspondence

    correspondence.cache_clear()
    try:
        result = run("verify", "correspondence", "-n", 6, "-l", "3,2,1")
    finally:
        correspondence.cache_clear()
    assert result.exit_code == 4
    assert "GCSO_ORACLE_CAP" in result.stderr


def test_verify_correspondence(run):
    result = run("verify", "correspondence", "-n", 5, "-l", "3,0")
    assert result.exit_code == 0
    data = json.loads(result.stdout)
    assert data["ok"] and data["results"][0]["matched"] == 15
    assert result.stderr.startswith("PASS")


def test_verify_fibers(run):
    result = run("verify", "fibers", "--exhaustive-strings", 3, 2, "-n", 5, "-l", "3,0")
    assert result.exit_code == 0
    data = json.loads(result.stdout)
    assert data["strings"]["mismatches"] == [] and data["faces"]["mismatches"] == []


def test_verify_numeric(run):
    result = run("verify", "numeric", "-n", 5, "-l", "3,0", "--samples", 5, "--seed", 1)
    assert result.exit_code == 0
    data = json.loads(result.stdout)
    assert data["results"][0]["max_round_trip_error"] < 1e-8


def test_render_ascii_default(run):
    result = run("render", "-n", 5, "-l", "3,0")
    assert result.exit_code == 0
    assert result.stdout.splitlines()[-1].startswith("o")


def test_render_face_and_out(run, tmp_path):
    out = tmp_path / "w0.svg"
    result = run("render", "-n", 5, "-l", "3,0", "--face", "346e6abd8954", "--out", out)
    assert result.exit_code == 0
    root = ET.fromstring(out.read_text())
    assert root.tag.endswith("svg")
    assert "1 face drawing" in result.stderr


def test_render_all_lagrangian(run):
    faces = json.loads(run("faces", "-n", 6, "-l", "3,3,3", "--lagrangian-only").stdout)["faces"]
    text = run("render", "-n", 6, "-l", "3,3,3", "--all-lagrangian", "--format", "svg").stdout
    root = ET.fromstring(text)
    assert len(root.findall("{http://www.w3.org/2000/svg}g")) == len(faces)
