"""JSON documents and run manifests.

All documents are UTF-8 JSON written with sorted keys. Floats use Python's
shortest round-trip representation, so parse -> dump -> parse is exact.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .geometry import BoundaryFixing, GeodesicEmbedding
from .mesh import DiskTriangulation
from .tutte import WeightMatrix, normalize

__version__ = "0.1.0"


class DocumentError(ValueError):
    pass


def dumps(doc) -> str:
    return json.dumps(_plain(doc), sort_keys=True, indent=1, allow_nan=False) + "\n"


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, np.generic):
        return x.item()
    return x


def write_json(path, doc):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(doc), encoding="utf-8")
    return path


def read_json(path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as err:
        raise DocumentError(f"{path}: not valid JSON ({err})") from err


# mesh documents: {"vertices", "boundary", "faces", optional "positions"}

def mesh_to_doc(tri: DiskTriangulation, positions=None) -> dict:
    doc = tri.to_dict()
    if positions is not None:
        doc["positions"] = np.asarray(positions, dtype=float).tolist()
    return doc


def embedding_to_doc(emb: GeodesicEmbedding) -> dict:
    return mesh_to_doc(emb.tri, emb.positions)


def doc_to_mesh(doc) -> tuple:
    """``(tri, positions or None)`` from a mesh document."""
    try:
        tri = DiskTriangulation.from_dict(doc)
    except (KeyError, TypeError, ValueError) as err:
        raise DocumentError(f"bad mesh document: {err}") from err
    pos = doc.get("positions")
    if pos is not None:
        pos = np.asarray(pos, dtype=float)
        if pos.shape != (tri.vertex_count, 2):
            raise DocumentError("positions must be one [x, y] per vertex")
    return tri, pos


def doc_to_embedding(doc, boundary: BoundaryFixing | None = None) -> GeodesicEmbedding:
    tri, pos = doc_to_mesh(doc)
    if pos is None:
        raise DocumentError("mesh document has no positions")
    if boundary is None:
        return GeodesicEmbedding.from_positions(tri, pos)
    return GeodesicEmbedding(tri, pos, boundary)


def boundary_to_doc(fix: BoundaryFixing) -> dict:
    return fix.to_dict()


def doc_to_boundary(doc) -> BoundaryFixing:
    try:
        return BoundaryFixing.from_dict(doc)
    except (KeyError, TypeError, ValueError) as err:
        raise DocumentError(f"bad boundary document: {err}") from err


def weights_to_doc(w: WeightMatrix) -> dict:
    return {"weights": w.to_triples()}


def doc_to_weights(tri, doc) -> WeightMatrix:
    return normalize(tri, doc["weights"])


# manifests

def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunManifest:
    """What produced an output directory; equal manifests give identical files."""

    command: str
    seed: int | None
    parameters: dict = field(default_factory=dict)
    inputs: dict = field(default_factory=dict)
    outputs: list = field(default_factory=list)
    version: str = __version__

    def add_input(self, path):
        self.inputs[os.path.basename(str(path))] = sha256_file(path)

    def to_dict(self) -> dict:
        return {"command": self.command, "seed": self.seed, "parameters": self.parameters,
                "inputs": self.inputs, "outputs": sorted(self.outputs),
                "version": self.version}

    def write(self, directory) -> Path:
        return write_json(Path(directory) / "run.json", self.to_dict())
