"""Tutte embeddings of a random triangulated disk, their mean value
weights, and a straight-line morph between two of them in weight space.

    python demos/tutte_and_mvc.py [outdir]
"""
import sys
from pathlib import Path

import numpy as np

from geotri import (BoundaryFixing, contract, count_weight_dofs, mean_value_weights, morph,
                    random_convex_polygon, random_disk_triangulation, random_weights,
                    roundtrip_error, tutte_residual, tutte_solve, verify_embedding)
from geotri.svg import render_svg, write_frames

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out/tutte")
out.mkdir(parents=True, exist_ok=True)
rng = np.random.default_rng(7)

# a disk with 9 boundary and 60 interior vertices
tri = random_disk_triangulation(9, 60, rng=rng)
dofs = count_weight_dofs(tri)
print(f"|V_I|={tri.n_interior} |V_B|={tri.n_boundary} |F|={tri.n_faces}")
print(f"weight dofs: direct count {dofs.direct}, 2|E_I|-|V_I| = {dofs.edge_formula}")

fix = BoundaryFixing(tri.boundary, random_convex_polygon(9, rng))

# any positive weights give an embedding when the boundary is convex
w = random_weights(tri, rng)
tau0 = tutte_solve(tri, fix, w)
print("residual / diameter:", tutte_residual(tau0, w) / fix.diameter)
print("verified:", verify_embedding(tau0, paranoid=True).passed)
print("smallest face det:", tau0.face_dets.min())

# mean value weights recover the embedding they were computed from
print("mean value roundtrip error:", roundtrip_error(tau0))
mv = mean_value_weights(tau0)
print("a row of mean value weights:", {k: round(v, 4) for k, v in mv.row(int(tri.interior_vertices[0])).items()})

# linear interpolation of weights is a path of embeddings
tau1 = tutte_solve(tri, fix, random_weights(tri, rng))
path = morph(tau0, tau1, samples=41)
print(f"morph: {len(path)} samples, unverified {len(path.verify())}, max step {path.max_step():.3g}")
names = write_frames(path, out / "morph")
print(f"wrote {len(names)} frames to {out / 'morph'}")

# and every embedding contracts to the uniform-weight one
c = contract(tau0, samples=21)
print("contraction unverified samples:", len(c.verify()))
(out / "tau0.svg").write_text(render_svg(tau0))
