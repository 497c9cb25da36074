"""Deterministic SVG drawings of embeddings and paths."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .geometry import GeodesicEmbedding, verify_embedding
from .homotopy import EmbeddingPath


class UnverifiedInput(ValueError):
    pass


@dataclass(frozen=True)
class Style:
    width: int = 480
    boundary_stroke: float = 2.5
    edge_stroke: float = 0.8
    vertex_radius: float = 2.0
    labels: tuple | None = None  # one label per vertex, or None
    font_size: float = 9.0
    face_fill: str = "#f3f1ea"
    edge_color: str = "#39424e"
    boundary_color: str = "#111111"
    vertex_color: str = "#b1362f"


def _fmt(x):
    return f"{x:.6f}".rstrip("0").rstrip(".")


def render_svg(obj, style: Style | None = None, check: bool = True, box=None):
    """SVG text for an embedding, or one SVG per frame for a path.

    The view box is the bounding box of the boundary polygon plus a 5%
    margin; the y axis points up.

    Raises
    ------
    UnverifiedInput
        If ``check`` is set and the embedding (or some frame) does not verify.
    """
    style = style or Style()
    if isinstance(obj, EmbeddingPath):
        frames = list(obj.frames)
        if box is None:
            box = _box(frames[0])
        return [render_svg(f, style, check, box) for f in frames]
    emb: GeodesicEmbedding = obj
    if check and not verify_embedding(emb).passed:
        raise UnverifiedInput("refusing to draw an embedding that does not verify")
    lo, hi = box if box is not None else _box(emb)
    span = hi - lo
    scale = style.width / span[0]
    height = span[1] * scale
    p = emb.positions

    def xy(v):
        return _fmt((p[v, 0] - lo[0]) * scale), _fmt((hi[1] - p[v, 1]) * scale)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(style.width)}" '
           f'height="{_fmt(height)}" viewBox="0 0 {_fmt(style.width)} {_fmt(height)}">']
    bnd = list(emb.tri.boundary)
    poly = " ".join(",".join(xy(v)) for v in bnd)
    out.append(f'<polygon points="{poly}" fill="{style.face_fill}" stroke="none"/>')
    bset = {tuple(sorted(e)) for e in zip(bnd, bnd[1:] + bnd[:1])}
    for a, b in emb.tri.edges:
        if (a, b) in bset:
            continue
        (x1, y1), (x2, y2) = xy(a), xy(b)
        out.append(f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" '
                   f'stroke="{style.edge_color}" stroke-width="{_fmt(style.edge_stroke)}"/>')
    out.append(f'<polygon points="{poly}" fill="none" stroke="{style.boundary_color}" '
               f'stroke-width="{_fmt(style.boundary_stroke)}" stroke-linejoin="round"/>')
    for v in range(emb.tri.vertex_count):
        x, y = xy(v)
        out.append(f'<circle cx="{x}" cy="{y}" r="{_fmt(style.vertex_radius)}" '
                   f'fill="{style.vertex_color}"/>')
        if style.labels is not None:
            out.append(f'<text x="{x}" y="{y}" dx="3" dy="-3" font-size="{_fmt(style.font_size)}" '
                       f'font-family="sans-serif">{escape(str(style.labels[v]))}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _box(emb):
    b = emb.boundary.positions
    lo, hi = b.min(axis=0), b.max(axis=0)
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def write_frames(path: EmbeddingPath, directory, style=None, stem="frame") -> list:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    docs = render_svg(path, style)
    width = max(4, len(str(len(docs))))
    names = []
    for i, doc in enumerate(docs):
        name = f"{stem}_{i:0{width}d}.svg"
        (directory / name).write_text(doc, encoding="utf-8")
        names.append(name)
    return names
