"""Convex hyperbolic and spherical polygons: the Klein and gnomonic
charts turn geodesic triangulations into straight-line ones.

    python demos/curved_charts.py
"""
import numpy as np

from geotri import random_disk_triangulation
from geotri.curved import (gnomonic, gnomonic_inverse, hyperbolic_distance_klein,
                           lift_space_equivalence, random_hyperbolic_polygon,
                           random_spherical_polygon, spherical_distance)

rng = np.random.default_rng(3)

hyp = random_hyperbolic_polygon(6, rng)
print("hyperbolic side lengths:",
      np.round([hyperbolic_distance_klein(hyp[i], hyp[(i + 1) % 6]) for i in range(6)], 3))
tri = random_disk_triangulation(6, 40, rng=rng)
rep = lift_space_equivalence(tri, hyp, "klein", samples=10, rng=rng)
print("klein:", rep.to_dict() | {"failures": len(rep.failures)})

sph = random_spherical_polygon(5, rng)
print("spherical side lengths:",
      np.round([spherical_distance(sph[i], sph[(i + 1) % 5]) for i in range(5)], 3))
print("chart round trip:", np.abs(gnomonic_inverse(gnomonic(sph)) - sph).max())
tri = random_disk_triangulation(5, 40, rng=rng)
rep = lift_space_equivalence(tri, sph, "gnomonic", samples=10, rng=rng)
print("gnomonic:", rep.to_dict() | {"failures": len(rep.failures)})
