"""Mean value coordinates as a section of the Tutte map."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import GeodesicEmbedding
from .tutte import WeightMatrix, normalize, tutte_solve


class DegenerateFace(ValueError):
    pass


class PreconditionViolated(ValueError):
    pass


@dataclass(frozen=True)
class AngleFan:
    """Angles at an interior vertex around each incident edge.

    ``before[k]`` and ``after[k]`` are the angles at ``center`` in the two
    faces sharing the edge to ``ring[k]`` (clockwise and counterclockwise
    side respectively); ``lengths[k]`` is the edge length.
    """

    center: int
    ring: tuple
    before: np.ndarray
    after: np.ndarray
    lengths: np.ndarray

    @property
    def total(self) -> float:
        return float(self.after.sum())


def angle_fan(emb: GeodesicEmbedding, v: int) -> AngleFan:
    ring = emb.tri.rings[v]
    d = emb.positions[list(ring)] - emb.positions[v]
    nxt = np.roll(d, -1, axis=0)
    cross = d[:, 0] * nxt[:, 1] - d[:, 1] * nxt[:, 0]
    dot = np.einsum("ij,ij->i", d, nxt)
    after = np.arctan2(cross, dot)  # angle between ring[k] and ring[k+1]
    return AngleFan(v, tuple(ring), np.roll(after, 1), after, np.hypot(d[:, 0], d[:, 1]))


def _tan_half(a):
    return (1.0 - np.cos(a)) / np.sin(a)


def mean_value_weights(emb: GeodesicEmbedding) -> WeightMatrix:
    """Mean value coordinates of every interior vertex with respect to its ring.

    Raises
    ------
    DegenerateFace
        If some angle at an interior vertex is not in ``(0, pi)``.
    """
    trip = []
    for v in emb.tri.interior_vertices.tolist():
        fan = angle_fan(emb, v)
        bad = (fan.after <= 0) | (fan.after >= np.pi) | (fan.lengths == 0)
        if np.any(bad):
            raise DegenerateFace(f"vertex {v}: degenerate angle or edge in its star")
        c = (_tan_half(fan.before) + _tan_half(fan.after)) / fan.lengths
        trip.extend((v, j, float(x)) for j, x in zip(fan.ring, c))
    return normalize(emb.tri, trip)


def roundtrip_error(emb: GeodesicEmbedding) -> float:
    """Max interior displacement between ``emb`` and Tutte of its mean value weights."""
    if not emb.boundary.strictly_convex:
        raise PreconditionViolated("roundtrip needs a strictly convex boundary")
    back = tutte_solve(emb.tri, emb.boundary, mean_value_weights(emb))
    inner = emb.tri.interior_vertices
    if not len(inner):
        return 0.0
    return float(np.abs(back.positions[inner] - emb.positions[inner]).max())
