import json

import pytest

from surfhomotopy.cli import klein_fixtures, parse_lengths, run
from surfhomotopy.surface_model import classify_surface, load_embedding


def records(capsys):
    return [json.loads(line) for line in capsys.readouterr().out.splitlines() if line.strip()]


def test_info(capsys):
    assert run(["info", "--genus", "2"]) == 0
    assert "orientable genus 2, χ=-2" in capsys.readouterr().out
    assert run(["info", "--genus", "0"]) == 0
    assert "genus 0, χ=2" in capsys.readouterr().out


def test_info_on_file(tmp_path, capsys):
    path = tmp_path / "g3.txt"
    assert run(["gen-canonical", "--genus", "3", "-o", str(path)]) == 0
    assert classify_surface(load_embedding(path.read_text())).genus == 3
    assert run(["info", str(path), "--json"]) == 0
    rec = records(capsys)[-1]
    assert (rec["V"], rec["E"], rec["F"], rec["euler_char"]) == (1, 6, 1, -4)


def test_malformed_file_is_an_error(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("vertices 1\nedges 1\nrot 0: 0 0\n")
    assert run(["info", str(path)]) == 2
    assert run(["info", str(tmp_path / "missing.txt")]) == 2


@pytest.mark.parametrize(
    "argv, code",
    [
        (["contractible", "--genus", "2", "abABcdCD"], 0),
        (["contractible", "--genus", "2", "abAB"], 1),
        (["contractible", "--relator", "abcdABCD", "dcbdcbaDCBDCBA"], 0),
        (["contractible", "--genus", "2", "ab", "--check"], 1),
        (["contractible", "--genus", "2", "xyz"], 2),
        (["contractible", "--genus", "2", "+0 +1"], 1),
        (["homotopic", "--genus", "2", "abc", "cdabcDC", "--check"], 0),
        (["homotopic", "--genus", "2", "ab", "ab", "--fixed-basepoint"], 0),
        (["homotopic", "--genus", "2", "ab", "ba", "--fixed-basepoint", "--check"], 1),
        (["homotopic", "--genus", "2", "ab", "ba", "--check"], 0),
        (["homotopic", "--genus", "2", "ab", "cd", "--check"], 1),
        (["homotopic", "--genus", "3", "--non-orientable", "a", "b"], 2),
        (["conjugate", "--relator", "abaB", "a", "A"], 0),
        (["conjugate", "--relator", "abaB", "ab", "b"], 1),
        (["conjugate", "a", "A"], 2),
    ],
)
def test_exit_codes(argv, code, capsys):
    assert run(argv) == code


def test_json_records(capsys):
    assert run(["homotopic", "--genus", "2", "ab", "ba", "--json"]) == 0
    rec = records(capsys)[0]
    assert rec["command"] == "homotopic" and rec["answer"] == "yes" and rec["mode"] == "free"


def test_word_command(capsys):
    assert run(["word", "--relator", "abcdABCD", "abcdA", "--json"]) == 0
    rec = records(capsys)[0]
    assert rec["dehn"] == "dcb"
    assert rec["canonical"]


def test_parallel_queries(capsys):
    assert run(["contractible", "--genus", "2", "abABcdCD", "aA", "--jobs", "2", "--json"]) == 0
    assert [r["answer"] for r in records(capsys)] == ["yes", "yes"]


def test_bench_records(capsys):
    assert run(["bench", "--genus", "2", "--lengths", "2^6,2^7", "--json"]) == 0
    recs = records(capsys)
    assert {r["query"] for r in recs} == {"contractible", "free"}
    for r in recs:
        assert {"command", "answer", "k", "ns_per_edge", "preprocess_seconds"} <= set(r)
    assert [r["answer"] for r in recs if r["query"] == "free"] == ["yes", "yes"]


def test_parse_lengths():
    assert parse_lengths("2^3, 10") == [8, 10]


def test_fixtures(tmp_path, capsys):
    for suite in ("appendix", "random", "klein"):
        assert run(["fixtures", "--suite", suite, "-o", str(tmp_path)]) == 0
    app = json.loads((tmp_path / "appendix.json").read_text())
    assert app["w1"] == "dcbdcb" and app["w2"] == "abcdbcdA"
    for word in app["contractible"]:
        assert run(["contractible", "--relator", app["relator"], word]) == 0
    pairs = [json.loads(x) for x in (tmp_path / "random_pairs.jsonl").read_text().splitlines()]
    for p in pairs[:10]:
        code = run(["homotopic", "--genus", str(p["genus"]), p["c"], p["d"]])
        assert code == (0 if p["homotopic"] == "yes" else 1)
    rows = (tmp_path / "klein_table.jsonl").read_text().splitlines()
    assert len(rows) == 11 ** 4


def test_klein_table_records_both_rules():
    rows = klein_fixtures(1)
    flip = next(r for r in rows if (r["u"], r["v"], r["u2"], r["v2"]) == (1, 0, -1, 0))
    assert flip["conjugate"] and not flip["stated_rule"]
