import json
import subprocess
import sys

import numpy as np
import pytest

from geotri import io
from geotri.cli import main
from geotri.geometry import BoundaryFixing, GeodesicEmbedding
from geotri.mesh import random_disk_triangulation
from geotri.svg import UnverifiedInput, render_svg, write_frames
from geotri.homotopy import contract

from conftest import random_embedding, random_instance


def test_embedding_roundtrip(tmp_path, rng):
    emb = random_embedding(rng, max_interior=40)
    io.write_json(tmp_path / "e.json", io.embedding_to_doc(emb))
    back = io.doc_to_embedding(io.read_json(tmp_path / "e.json"))
    assert np.array_equal(back.positions, emb.positions)
    assert np.array_equal(back.tri.faces, emb.tri.faces)


def test_weights_roundtrip(rng):
    tri, fix, w = random_instance(rng, max_interior=30, min_interior=1)
    back = io.doc_to_weights(tri, json.loads(io.dumps(io.weights_to_doc(w))))
    # rows are renormalized on load
    assert abs(back.matrix - w.matrix).max() <= 1e-15
    fdoc = io.boundary_to_doc(fix)
    assert np.array_equal(io.doc_to_boundary(fdoc).positions, fix.positions)


def test_bad_document(tmp_path):
    (tmp_path / "x.json").write_text("{not json")
    with pytest.raises(io.DocumentError):
        io.read_json(tmp_path / "x.json")
    with pytest.raises(io.DocumentError):
        io.doc_to_mesh({"vertices": 3})


def test_dumps_deterministic(rng):
    emb = random_embedding(rng, max_interior=10)
    assert io.dumps(io.embedding_to_doc(emb)) == io.dumps(io.embedding_to_doc(emb))


def test_svg(tmp_path, rng):
    emb = random_embedding(rng, max_interior=20)
    svg = render_svg(emb)
    assert svg.startswith("<svg") and svg.count("<line") == len(emb.tri.interior_edges)
    bad = emb.with_positions(emb.positions * np.where(emb.tri.is_boundary, 1, -5)[:, None])
    with pytest.raises(UnverifiedInput):
        render_svg(bad)
    files = write_frames(contract(emb, samples=3), tmp_path)
    assert len(files) == 3 and all((tmp_path / f).exists() for f in files)


def _write_inputs(tmp_path, rng):
    tri = random_disk_triangulation(6, 25, rng=rng)
    emb = random_embedding(rng, max_interior=0)
    from geotri.geometry import random_convex_polygon
    fix = BoundaryFixing(tri.boundary, random_convex_polygon(6, rng))
    io.write_json(tmp_path / "m.json", io.mesh_to_doc(tri))
    io.write_json(tmp_path / "b.json", io.boundary_to_doc(fix))
    return tri, fix


def test_cli_embed_and_validate(tmp_path, rng, capsys):
    _write_inputs(tmp_path, rng)
    out = tmp_path / "o" / "e.json"
    assert main(["embed", "--mesh", str(tmp_path / "m.json"), "--boundary",
                 str(tmp_path / "b.json"), "--out", str(out)]) == 0
    assert (tmp_path / "o" / "run.json").exists()
    man = json.loads((tmp_path / "o" / "run.json").read_text())
    assert man["command"] == "embed" and man["inputs"]
    assert main(["--json", "validate", "--mesh", str(out), "--paranoid"]) == 0
    rep = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert rep["ok"]


def test_cli_determinism(tmp_path, rng):
    _write_inputs(tmp_path, rng)
    docs = []
    for d in ("a", "b"):
        out = tmp_path / d / "e.json"
        main(["embed", "--mesh", str(tmp_path / "m.json"), "--boundary", str(tmp_path / "b.json"),
              "--random-weights", "--seed", "5", "--out", str(out)])
        docs.append(out.read_bytes())
    assert docs[0] == docs[1]


def test_cli_exit_codes(tmp_path):
    bad = {"vertices": 5, "boundary": [0, 1, 2], "faces": [[0, 1, 3], [1, 0, 4], [0, 1, 2]]}
    (tmp_path / "bad.json").write_text(json.dumps(bad))
    assert main(["validate", "--mesh", str(tmp_path / "bad.json")]) == 1
    assert main(["validate", "--mesh", str(tmp_path / "missing.json")]) == 2
    assert main(["validate", "--mesh", str(tmp_path / "bad.json"), "--nope"]) == 2
    assert main(["omega", "--n", "1", "nothing"]) == 2


def test_cli_omega(tmp_path):
    assert main(["omega", "--n", "1", "loop", "--samples", "12", "--out", str(tmp_path / "l")]) == 0
    assert (tmp_path / "l" / "run.json").exists()
    assert main(["omega", "--n", "2", "certify", "--out", str(tmp_path / "c")]) == 0
    cert = json.loads(next((tmp_path / "c").glob("cert*.json")).read_text())
    assert cert["contradiction_at"] == 3 and cert["chain"]


def test_cli_block(tmp_path):
    assert main(["block", "--eps", "-0.02", "gamma", "--samples", "11",
                 "--svg", str(tmp_path / "g")]) == 0
    assert len(list((tmp_path / "g").glob("*.svg"))) == 11
    assert main(["block", "scan", "--samples", "101", "--out", str(tmp_path / "s")]) == 0


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "geotri", "--help"], capture_output=True, text=True)
    assert r.returncode == 0 and "omega" in r.stdout
