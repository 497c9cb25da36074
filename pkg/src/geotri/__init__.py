"""Geodesic triangulations of planar polygons.

Tutte embeddings with permissible weights, mean value coordinates, weight
space morphs and contractions, curved charts, and the block and stacked
polygons whose spaces of geodesic triangulations are not contractible.
"""

from .block import (BlockParams, C_DERIVED, C_PRINTED, T0, build_block, classify_perturbation,
                    feasibility_oracle, feasible_t, gamma, gamma_path, h, h_max, solve_c)
from .curved import gnomonic, gnomonic_inverse, klein_chart, klein_inverse, lift_space_equivalence
from .geometry import (BoundaryFixing, GeodesicEmbedding, orient2d, random_convex_polygon,
                       verify_embedding)
from .homotopy import EmbeddingPath, contract, morph
from .io import __version__
from .mesh import (DiskTriangulation, count_weight_dofs, dimension_of_x, random_disk_triangulation,
                   validate_combinatorics)
from .mvc import mean_value_weights, roundtrip_error
from .stack import (Gamma, Phi, build_loop_n1, build_sphere_map, build_stack, certify_obstruction,
                    fiber_search, freeing_perturbation, winding_number)
from .tutte import (WeightMatrix, normalize, random_weights, tutte_residual, tutte_solve,
                    uniform_weights)
