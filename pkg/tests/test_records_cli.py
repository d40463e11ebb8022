import enum
import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hopfricci.cli import main
from hopfricci.records import emit_records, format_float, parse_csv, render


class Color(enum.Enum):
    RED = "Red"


FIELDS = ["name", "x", "ok", "missing", "kind"]
RECS = [
    {"name": "a", "x": 0.1, "ok": True, "missing": None, "kind": Color.RED},
    {"name": "b", "x": 1e-300, "ok": False, "missing": None, "kind": Color.RED},
]


def test_empty_csv_is_header_only():
    assert render([], FIELDS, "csv") == "name,x,ok,missing,kind\n"
    assert render([], FIELDS, "jsonl") == ""


def test_single_record():
    out = render(RECS[:1], FIELDS, "csv").splitlines()
    assert out == ["name,x,ok,missing,kind", "a,0.10000000000000001,true,,Red"]


def test_csv_round_trip():
    back = parse_csv(render(RECS, FIELDS, "csv"))
    assert back[0] == {"name": "a", "x": 0.1, "ok": True, "missing": None, "kind": "Red"}
    assert back[1]["x"] == 1e-300


def test_jsonl_round_trip():
    lines = render(RECS, FIELDS, "jsonl").splitlines()
    objs = [json.loads(line) for line in lines]
    assert objs[0] == {"name": "a", "x": 0.1, "ok": True, "missing": None, "kind": "Red"}
    assert objs[1]["x"] == 1e-300


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_text_round_trips(v):
    assert float(format_float(v)) == v


def test_unknown_format():
    with pytest.raises(ValueError):
        render(RECS, FIELDS, "xml")


def test_emit_to_file_is_deterministic(tmp_path):
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    emit_records(RECS, FIELDS, "csv", str(p1))
    emit_records(RECS, FIELDS, "csv", str(p2))
    assert p1.read_bytes() == p2.read_bytes()


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_cli_ricci_su2(capsys):
    code, out = run(capsys, "ricci", "su2", "--x", "1,2,2")
    assert code == 0
    (row,) = parse_csv(out)
    assert (row["r1"], row["r2"], row["r3"]) == (0.5, 3, 3)


def test_cli_solve_four_param(capsys):
    code, out = run(capsys, "solve", "four-param", "--T", "1,1,1", "--b", "1")
    assert code == 0
    (row,) = parse_csv(out)
    assert row["status"] == "Solved"
    assert row["kappa"] == pytest.approx(6.0, rel=1e-12)
    assert row["x1"] == pytest.approx(1.0, rel=1e-12)


def test_cli_ancient_123(capsys):
    code, out = run(capsys, "ancient", "su2", "--x", "1,2,3")
    assert code == 0
    (row,) = parse_csv(out)
    assert row["status"] == "LostPositivity"
    assert row["steps_survived"] == 0 and row["lost_at_step"] == 1


def test_cli_family_flag_equals_positional(capsys):
    _, a = run(capsys, "ricci", "su2", "--x", "1,2,2")
    _, b = run(capsys, "ricci", "--family", "su2", "--x", "1,2,2")
    assert a == b


def test_cli_scan_jsonl_line_count(capsys):
    code, out = run(capsys, "scan", "solvability", "sp1", "--grid", "0.1:2:100", "--format", "jsonl")
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 100
    assert all(isinstance(json.loads(x)["solvable"], bool) for x in lines)


def test_cli_scan_is_byte_deterministic(capsys):
    argv = ("scan", "ancient", "su2", "--grid", "0.25:2.5:10")
    assert run(capsys, *argv) == run(capsys, *argv)


def test_cli_unsolvable_exits_one(capsys):
    code, out = run(capsys, "solve", "sp1", "--T", "0.05", "--b", "1")
    assert code == 1
    (row,) = parse_csv(out)
    assert row["status"] == "Unsolvable"


@pytest.mark.parametrize(
    "argv",
    [
        ["ricci", "su2", "--x", "1,-2,2"],
        ["ricci", "su2"],
        ["ricci", "nosuch", "--x", "1,2,2"],
        ["scan", "solvability", "sp1", "--grid", "0.1:2"],
        ["iterate", "sp1", "--t", "0.5", "--n", "0"],
    ],
)
def test_cli_usage_errors_exit_two(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_cli_writes_out_file(tmp_path, capsys):
    path = tmp_path / "r.csv"
    assert main(["einstein", "sp1", "--out", str(path)]) == 0
    rows = parse_csv(path.read_text())
    assert [r["ratio"] for r in rows] == pytest.approx([0.2, 1.0])
