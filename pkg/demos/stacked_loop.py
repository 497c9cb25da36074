"""Stacks of shrinking blocks: a loop that cannot be contracted (n = 1),
the sphere map for n = 2, and the chain certificate behind both.

    python demos/stacked_loop.py [outdir]
"""
import sys
from pathlib import Path

import numpy as np

from geotri.block import T0
from geotri.stack import (Phi, build_loop_n1, build_sphere_map, build_stack,
                          certify_obstruction, facet_agreement, winding_number)
from geotri.svg import write_frames

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out/stack")
out.mkdir(parents=True, exist_ok=True)

st = build_stack(1)
print(f"n=1: {st.tri.n_interior} interior vertices, clearance {st.clearance:.2e}")
print("reference slides:", Phi(st.reference))

loop = build_loop_n1(st, samples=60)
phi = np.array(loop.meta["phi"])
print(f"loop: {len(loop)} samples, unverified {len(loop.verify())}")
print("winding number of the slide vector around (t0, t0):", winding_number(phi, (T0, T0)))
write_frames(loop, out / "loop")

# no configuration reaches (t0, t0): every junction would have to rise
cert = certify_obstruction(st.spec)
for step in cert["chain"]:
    print(f"  copy {step['copy']}: {step['requirement']}, slope {step['slope']:.3f}")
print("contradiction at junction", cert["contradiction_at"])

st2 = build_stack(2)
samples = build_sphere_map(st2, resolution=5, collar_steps=2)
print(f"n=2 sphere map: {len(samples)} samples, "
      f"unverified {sum(not s.config.verify().passed for s in samples)}, "
      f"facet agreement {facet_agreement(st2, resolution=5):.1e}")
