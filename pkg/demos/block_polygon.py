"""The 13-vertex block: where the sliding vertex P can and cannot go.

    python demos/block_polygon.py [outdir]
"""
import sys
from pathlib import Path

import numpy as np
import sympy

from geotri import block as blk
from geotri.block import C_DERIVED, T0, BlockParams
from geotri.svg import Style, render_svg, write_frames

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out/block")
out.mkdir(parents=True, exist_ok=True)

# the notch abscissa c is fixed by asking that max h(., 1/2) be exactly 1/2
d = blk.c_discrepancy()
print(f"printed c  = {d['c_printed']:.9f} -> max h = {d['h_max_printed']:.6f}")
print(f"derived c  = {d['c_derived']:.9f} -> max h = {d['h_max_derived']:.6f}")
t, v = blk.golden_section_max(lambda s: blk.h(s, 0.5), 0, C_DERIVED)
print(f"golden section: argmax {t:.12f} (3 - 2 sqrt 2 = {T0:.12f}), max {v:.12f}")

# feasibility of the slide value t: the intercept h(t) must stay below G
p = BlockParams()
ts = np.linspace(-0.99, 0.99, 9)
print("feasible_t:", {round(float(x), 3): blk.feasible_t(p, float(x)) for x in ts})
ex = blk.exact_params()
print("exactly at t0:", blk.feasible_t(ex, 3 - 2 * sympy.sqrt(2)))

# brute force agrees: a witness just off t0, nothing at t0
for x in (T0 + 0.05, T0):
    res = blk.feasibility_oracle(p, x, resolution=120)
    print(f"oracle at t={x:.4f}: witness found = {res.found}")

# perturbations of K and G
for e, dl in [(-0.02, 0.0), (0.0, -0.01), (0.01, 0.05), (0.01, 0.02)]:
    q = BlockParams(eps=e, delta=dl)
    print(f"eps={e:+.2f} delta={dl:+.2f}: {blk.classify_perturbation(e, dl).value:12s} "
          f"feasible at t0: {blk.feasible_t(q, T0)}")

# an admissible perturbation opens the way: P slides from -c to c
q = BlockParams(eps=-0.02)
path = blk.gamma_path(q, np.linspace(-C_DERIVED, C_DERIVED, 25))
print("gamma path unverified samples:", len(path.verify(paranoid=True)))
write_frames(path, out / "gamma", Style(labels=blk.NAMES))
(out / "block.svg").write_text(render_svg(blk.build_block().reference, Style(labels=blk.NAMES)))
print("frames in", out / "gamma")
