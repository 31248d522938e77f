"""Tour of the computational-geometry kernel.

Everything is implemented in-package on top of numpy: low-discrepancy
sequences, n-dimensional Quickhull, Delaunay by paraboloid lifting, and
the Voronoi vertices used to find large empty regions.
"""

import numpy as np

from dynsample import geometry

rng = np.random.default_rng(1)

# low-discrepancy points vs uniform random
ham = geometry.hammersley(64, 2)
print(f"hammersley(64, 2): first rows\n{ham[:4]}")

# convex hull of random 3-D points
pts3 = rng.random((40, 3))
hull = geometry.convex_hull(pts3)
print(f"\n3-D hull: {len(hull.vertices)} vertices, "
      f"{len(hull.facets)} facets, volume {hull.volume:.4f}")
inside = sum(geometry.point_in_hull(p, hull) for p in rng.random((100, 3)) * 0.8 + 0.1)
print(f"random interior probes contained: {inside}/100")

# Delaunay and Voronoi vertices in 2-D
pts2 = rng.random((15, 2))
tris = geometry.delaunay(pts2)
print(f"\n2-D Delaunay: {len(tris)} triangles from {len(pts2)} points")
vv = geometry.voronoi_vertices(pts2)
hull2 = geometry.convex_hull(pts2)
inside_vv = [t for t in vv if geometry.point_in_hull(t[0], hull2)]
best = max(inside_vv, key=lambda t: t[2])
print(f"largest empty circle inside the hull: center {np.round(best[0], 3)}, "
      f"radius {best[2]:.3f}, defined by points {best[1]}")

# the mean-distance constant used for the default restart spacing
for d in (1, 2, 3):
    est = geometry.mean_pairwise_distance_unit_cube(d, 100_000)
    print(f"mean pairwise distance, unit cube d={d}: {est:.4f}")
