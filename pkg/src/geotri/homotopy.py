"""Paths of geodesic triangulations obtained by interpolating weights."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import GeodesicEmbedding, verify_embedding
from .mvc import mean_value_weights
from .tutte import TutteMap, WeightMatrix, uniform_weights


class BoundaryMismatch(ValueError):
    pass


class UnverifiedSample(RuntimeError):
    pass


@dataclass
class EmbeddingPath:
    """Sampled path ``t -> embedding``.

    ``kind`` records how the path was produced (``"morph"``,
    ``"contraction"``, ``"gamma"`` or ``"loop"``).
    """

    params: np.ndarray
    frames: list = field(repr=False)
    kind: str = "morph"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.params = np.asarray(self.params, dtype=float)
        if len(self.params) != len(self.frames):
            raise ValueError("one frame per parameter value")
        if np.any(np.diff(self.params) <= 0):
            raise ValueError("parameters must increase strictly")

    def __len__(self):
        return len(self.frames)

    def __iter__(self):
        return iter(self.frames)

    def __getitem__(self, i):
        return self.frames[i]

    @property
    def positions(self) -> np.ndarray:
        """Stacked vertex positions, shape ``(samples, V, 2)``."""
        return np.stack([f.positions for f in self.frames])

    def max_step(self) -> float:
        """Largest vertex displacement between consecutive samples."""
        if len(self.frames) < 2:
            return 0.0
        return float(np.abs(np.diff(self.positions, axis=0)).max())

    def verify(self, paranoid=False) -> list:
        """Indices of samples that fail :func:`verify_embedding`."""
        return [i for i, f in enumerate(self.frames)
                if not verify_embedding(f, paranoid=paranoid).passed]

    def reversed(self) -> "EmbeddingPath":
        return EmbeddingPath(1.0 - self.params[::-1], self.frames[::-1], self.kind, dict(self.meta))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "params": self.params.tolist(),
                "positions": [f.positions.tolist() for f in self.frames],
                "meta": self.meta}


def _check_same(a: GeodesicEmbedding, b: GeodesicEmbedding):
    if a.tri is not b.tri and a.tri.to_dict() != b.tri.to_dict():
        raise BoundaryMismatch("embeddings use different triangulations")
    if (tuple(a.boundary.ids) != tuple(b.boundary.ids)
            or not np.array_equal(a.boundary.positions, b.boundary.positions)):
        raise BoundaryMismatch("embeddings have different boundary fixings")


def weight_path(w0: WeightMatrix, w1: WeightMatrix, boundary, samples=101, kind="morph",
                check=True) -> EmbeddingPath:
    """Tutte images of ``(1 - t) w0 + t w1`` at ``samples`` equally spaced ``t``."""
    if samples < 2:
        raise ValueError("need at least two samples")
    ts = np.linspace(0.0, 1.0, samples)
    psi = TutteMap(w0.tri, boundary)
    frames = []
    for t in ts:
        w = w0.lerp(w1, float(t))
        if check and not w.is_permissible():
            raise RuntimeError(f"interpolated weights lost permissibility at t={t}")
        frames.append(psi(w))
    return EmbeddingPath(ts, frames, kind)


def morph(tau0: GeodesicEmbedding, tau1: GeodesicEmbedding, samples: int = 101) -> EmbeddingPath:
    """Linear-in-weights morph between two triangulations of a convex polygon.

    Both endpoints are first replaced by their mean value weights, so the
    returned path starts and ends at ``tau0``/``tau1`` up to solver accuracy.
    """
    _check_same(tau0, tau1)
    return weight_path(mean_value_weights(tau0), mean_value_weights(tau1), tau0.boundary,
                       samples, "morph")


def contract(tau: GeodesicEmbedding, w_star: WeightMatrix | None = None,
             samples: int = 101) -> EmbeddingPath:
    """Path from ``tau`` to the Tutte embedding of ``w_star`` (default uniform)."""
    if w_star is None:
        w_star = uniform_weights(tau.tri)
    return weight_path(mean_value_weights(tau), w_star, tau.boundary, samples, "contraction")
