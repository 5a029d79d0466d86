import subprocess
import sys

import pytest

from stratifold.canon import canonical_code
from stratifold.census import census_read
from stratifold.cli import main
from stratifold.generator import parse_sequence, replay
from stratifold.graph import b12_tree, parse, path_graph, serialize, serialize_many
from strategies import MINIMAL_HORNED


@pytest.fixture
def files(tmp_path):
    paths = {
        "b12": tmp_path / "b12.txt",
        "horned": tmp_path / "horned.txt",
        "bad": tmp_path / "bad.txt",
        "path": tmp_path / "path.txt",
    }
    paths["b12"].write_text(serialize(b12_tree()))
    paths["horned"].write_text(MINIMAL_HORNED)
    paths["bad"].write_text("w a 0\nb b\ne a b 0\n")
    paths["path"].write_text(serialize(path_graph("w1", 2, "b1", 1, "w2", 1, "b2", 2, "w3")))
    return {k: str(v) for k, v in paths.items()}


def run(capsys, *argv):
    status = main(list(argv))
    out = capsys.readouterr()
    return status, out.out, out.err


def test_check_b12(capsys, files):
    status, out, _ = run(capsys, "check", files["b12"])
    assert (status, out) == (0, "simply-connected\n")


def test_check_horned(capsys, files):
    status, out, _ = run(capsys, "check", files["horned"])
    assert status == 1
    first, second = out.splitlines()
    assert first == "obstruction: horned-tree" and second.startswith("witness: ")


def test_check_witness_dump(capsys, files):
    status, out, _ = run(capsys, "check", "--witness", files["horned"])
    assert status == 1
    dump = [l for l in out.splitlines() if l[:2] in ("w ", "b ", "e ")]
    assert len(parse("\n".join(dump) + "\n").blacks) == 4
    assert sum(l.startswith("map ") for l in out.splitlines()) == 10


def test_check_non_collapsible_witness(capsys, files):
    status, out, _ = run(capsys, "check", "--witness", files["path"])
    assert status == 1
    assert "obstruction: non-collapsible-component" in out and "white-label-1 w2" in out


def test_check_certificate(capsys, files):
    status, out, _ = run(capsys, "check", "--certificate", files["b12"])
    assert status == 0
    seq = parse_sequence(out.split("\n", 1)[1])
    assert replay(seq) == b12_tree()


def test_check_oracle_and_dot(capsys, files, tmp_path):
    dot = tmp_path / "g.dot"
    status, out, _ = run(capsys, "check", "--oracle", "--dot", str(dot), files["horned"])
    assert status == 1 and "oracle: h1z2-nonzero dim=1" in out
    assert dot.read_text().startswith("graph")


def test_check_multi_record(capsys, tmp_path):
    p = tmp_path / "many.txt"
    p.write_text(serialize_many([b12_tree(), parse(MINIMAL_HORNED)]))
    status, out, _ = run(capsys, "check", str(p))
    assert status == 1
    assert out.splitlines()[:2] == ["# graph 0", "simply-connected"]


def test_check_census_shard_never_disagrees(capsys, tmp_path):
    p = tmp_path / "c.txt"
    assert run(capsys, "census", "--max-blacks", "4", "--out", str(p))[0] == 0
    status, out, _ = run(capsys, "check", "--oracle", str(p))
    assert status in (0, 1)
    blocks = out.split("# graph ")[1:]
    assert len(blocks) == len(census_read(p.read_text()))


def test_exit_code_matches_verdict(capsys, tmp_path):
    p = tmp_path / "c.txt"
    run(capsys, "census", "--max-blacks", "3", "--out", str(p))
    for rec in census_read(p.read_text()):
        from stratifold.canon import graph_from_code

        g = tmp_path / "g.txt"
        g.write_text(serialize(graph_from_code(rec.code)))
        status, out, _ = run(capsys, "check", str(g))
        assert status == (0 if rec.verdict == "simply-connected" else 1)
        assert out.startswith("simply-connected" if status == 0 else "obstruction: ")


@pytest.mark.parametrize("argv", [["check", "bad"], ["check", "missing"], ["export", "bad"]])
def test_input_errors(capsys, files, argv):
    argv = [files.get(a, a) if a != "missing" else "/nonexistent/x" for a in argv]
    status, out, err = run(capsys, *argv)
    assert status == 2 and out == "" and err.startswith("error:")


def test_deconstruct_rejects_obstruction(capsys, files):
    assert run(capsys, "deconstruct", files["horned"])[0] == 2


def test_gen_point(capsys, tmp_path):
    out = tmp_path / "g.txt"
    assert run(capsys, "gen", "--seed", "7", "--steps", "0", "--out", str(out))[0] == 0
    g = parse(out.read_text())
    assert len(g) == 1 and not g.blacks


def test_gen_deconstruct_replay(capsys, tmp_path):
    g, s, r = tmp_path / "g.txt", tmp_path / "s.txt", tmp_path / "r.txt"
    run(capsys, "gen", "--seed", "3", "--steps", "20", "--out", str(g))
    assert run(capsys, "deconstruct", str(g), "--out", str(s))[0] == 0
    assert run(capsys, "replay", str(s), "--out", str(r))[0] == 0
    assert canonical_code(parse(r.read_text())) == canonical_code(parse(g.read_text()))


def test_bad_sequence(capsys, tmp_path):
    s = tmp_path / "s.txt"
    s.write_text("buildseq v1\nstart a\nO2 q -> b t\n")
    assert run(capsys, "replay", str(s))[0] == 2


def test_census_one_black(capsys):
    status, out, err = run(capsys, "census", "--max-blacks", "1")
    assert status == 0 and len(census_read(out)) == 2
    assert "disagreements=0" in err


def test_export(capsys, files):
    status, out, _ = run(capsys, "export", files["b12"])
    assert out == serialize(b12_tree())
    status, out, _ = run(capsys, "export", files["b12"], "--dot")
    assert status == 0 and out.count("--") == 2


def test_console_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "stratifold.cli", "check", files["horned"]],
                          capture_output=True, text=True)
    assert proc.returncode == 1 and proc.stdout.startswith("obstruction: horned-tree")
