import json
import os
import shutil
import subprocess
import sys

import pytest

from flowcat.cli import main
from flowcat.verify import fixture_path

TRIANGLE = str(fixture_path("triangle.txt"))


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_check_triangle_matching(capsys):
    code, out, _ = run(capsys, "check", "--input", TRIANGLE,
                       "--matching", str(fixture_path("triangle.matching")))
    assert code == 0
    assert "acyclic: true; critical: [v0], [v1,v2]" in out


def test_check_triangle_morse(capsys):
    code, out, _ = run(capsys, "check", "--input", TRIANGLE,
                       "--morse", str(fixture_path("triangle.morse")), "--json")
    assert code == 0
    data = json.loads(out)
    assert data["discrete_morse"]["ok"] and data["faithful"]
    assert data["critical"] == ["v0", "v1,v2"]


def test_check_cyclic_matching(capsys):
    code, out, _ = run(capsys, "check", "--input", TRIANGLE,
                       "--matching", str(fixture_path("triangle_cyclic.matching")))
    assert code == 1
    assert "acyclic: false" in out and "[v0]" in out


def test_malformed_facet_line(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("v0 v1\nv1 v1 v2\n")
    code, _, err = run(capsys, "check", "--input", str(bad), "--greedy-seed", "0")
    assert code == 2
    assert "line 2" in err


def test_missing_file(capsys):
    code, _, _ = run(capsys, "check", "--input", "/nonexistent/x.txt", "--greedy-seed", "0")
    assert code == 2


def test_exactly_one_matching_source():
    with pytest.raises(SystemExit) as info:
        main(["check", "--input", TRIANGLE])
    assert info.value.code == 2
    with pytest.raises(SystemExit):
        main(["check", "--input", TRIANGLE, "--greedy-seed", "1", "--morse", "x"])


def test_flowpaths_triangle(tmp_path, capsys):
    code, out, _ = run(capsys, "flowpaths", "--fixture", "triangle", "--out", str(tmp_path))
    assert code == 0
    assert "|FP| = 6" in out and "|FPbar| = 6" in out
    dot = (tmp_path / "fp.dot").read_text()
    assert dot.count("label=") == 6 and dot.count("->") == 6


def test_flowpaths_simplex2_has_gamma_below_delta(tmp_path, capsys):
    code, _, _ = run(capsys, "flowpaths", "--fixture", "simplex2", "--out", str(tmp_path))
    assert code == 0
    data = json.loads((tmp_path / "flowpaths.json").read_text())
    labels = []
    for p in data["paths"]:
        cells = [c for s in p["steps"] for c in (s["e"], s["u"])]
        labels.append(tuple(cells) + (p["target"],))
    gamma = labels.index(("b,c", "a,b,c", "a", "a,c", "c"))
    delta = labels.index(("b,c", "a,b,c", "a,b", "a,b", "a", "a,c", "c"))
    assert [gamma, delta] in data["covers"]


def test_capacity_exit_code(capsys):
    code, _, err = run(capsys, "flowpaths", "--fixture", "torus", "--cap-paths", "20")
    assert code == 3 and "capacity" in err


def test_verify_triangle(capsys):
    code, out, _ = run(capsys, "verify", "--fixture", "triangle")
    assert code == 0
    assert "FAIL" not in out and out.count("PASS") == 11


def test_verify_cyclic_input_fails(capsys):
    code, out, _ = run(capsys, "verify", "--input", TRIANGLE,
                       "--matching", str(fixture_path("triangle_cyclic.matching")))
    assert code == 1 and "FAIL" in out


def test_homology_json(capsys):
    code, out, _ = run(capsys, "homology", "--fixture", "tetra_boundary", "--json")
    assert code == 0
    data = json.loads(out)
    assert set(data) == {"F(X)", "FPbar", "FP", "B2 Cbar", "B2 C"}
    for report in data.values():
        assert set(report) == {"degrees", "euler"}
        for deg in report["degrees"]:
            assert set(deg) == {"dim", "betti", "torsion"}
        assert [d["betti"] for d in report["degrees"]][:3] == [1, 0, 1]


def test_fibers_and_category(capsys):
    code, out, _ = run(capsys, "fibers", "--fixture", "triangle")
    assert code == 0
    assert "full, over [v0]: fiber 5, right fiber 7, left fiber 5, contractible true" in out
    code, out, _ = run(capsys, "category", "--fixture", "triangle")
    assert code == 0 and "hom(v0 -> v1,v2) has 2 morphisms" in out


def test_export_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(capsys, "export", "--fixture", "triangle", "--out", str(a))[0] == 0
    assert run(capsys, "export", "--fixture", "triangle", "--out", str(b))[0] == 0
    names = sorted(os.listdir(a))
    assert names == sorted(os.listdir(b))
    for name in names:
        assert (a / name).read_bytes() == (b / name).read_bytes()
    dot = (a / "right_fiber_full_v0.dot").read_text()
    assert dot.count("label=") == 7 and dot.count("->") == 6
    hasse = (a / "fp.dot").read_text()
    assert hasse.count("label=") == 6 and hasse.count("->") == 6


def test_export_greedy_is_deterministic(tmp_path, capsys):
    for sub in ("a", "b"):
        assert run(capsys, "export", "--input", str(fixture_path("tetra_boundary.txt")),
                   "--greedy-seed", "5", "--out", str(tmp_path / sub))[0] == 0
    for name in os.listdir(tmp_path / "a"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_export_unwritable(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("")
    code, _, _ = run(capsys, "export", "--fixture", "triangle", "--out", str(blocker / "sub"))
    assert code == 2


@pytest.mark.skipif(shutil.which("flowcat") is None, reason="console script not installed")
def test_console_script():
    res = subprocess.run(["flowcat", "check", "--fixture", "triangle"], capture_output=True,
                         text=True)
    assert res.returncode == 0 and "acyclic: true" in res.stdout


def test_module_entry():
    res = subprocess.run([sys.executable, "-m", "flowcat.cli", "check", "--fixture", "simplex2"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "critical: [c]" in res.stdout
