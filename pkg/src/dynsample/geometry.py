"""d-dimensional computational-geometry kernel.

Pure functions over numpy arrays: low-discrepancy point sets, convex hulls
(Quickhull, up to dimension 7), Delaunay simplices via the paraboloid
lifting construction, Voronoi vertices as circumcenters, and distance
utilities.  All randomness is seeded explicitly, so every operation is a
deterministic function of its arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, DimensionError

MAX_HULL_DIM = 7
MAX_DELAUNAY_DIM = MAX_HULL_DIM - 1

_PRIMES = (2, 3, 5, 7, 11, 13)


# ---------------------------------------------------------------------------
# point sets


def radical_inverse(i: int, base: int) -> float:
    """Van der Corput radical inverse of integer i in the given base."""
    inv = 0.0
    digit = 1.0 / base
    while i > 0:
        inv += (i % base) * digit
        i //= base
        digit /= base
    return inv


def hammersley(n: int, d: int) -> np.ndarray:
    """Hammersley point set of n points in [0, 1]^d, shape (n, d).

    Coordinate 0 of point i is i/n; coordinate j >= 1 is the radical
    inverse of i in the j-th prime base (2, 3, 5, ...).
    """
    if not 1 <= d <= MAX_HULL_DIM:
        raise DimensionError(f"hammersley supports 1 <= d <= {MAX_HULL_DIM}, got {d}")
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    pts = np.empty((n, d))
    pts[:, 0] = np.arange(n) / n
    for j in range(1, d):
        base = _PRIMES[j - 1]
        pts[:, j] = [radical_inverse(i, base) for i in range(n)]
    return pts


def corner_and_face_points(d: int) -> np.ndarray:
    """Corners then face centers of [0, 1]^d, shape (2^d + 2d, d).

    For d=1 the face centers coincide with the corners; callers that need
    distinct points must deduplicate.
    """
    if not 1 <= d <= MAX_HULL_DIM:
        raise DimensionError(f"supported range is 1 <= d <= {MAX_HULL_DIM}, got {d}")
    corners = np.array(
        [[(i >> j) & 1 for j in range(d)] for i in range(2**d)], dtype=float
    )
    faces = np.full((2 * d, d), 0.5)
    for j in range(d):
        faces[2 * j, j] = 0.0
        faces[2 * j + 1, j] = 1.0
    return np.vstack([corners, faces])


def dedup_points(points: np.ndarray) -> np.ndarray:
    """Drop rows that exactly duplicate an earlier row, preserving order."""
    seen: set[bytes] = set()
    keep = []
    for i, row in enumerate(points):
        key = row.tobytes()
        if key not in seen:
            seen.add(key)
            keep.append(i)
    return points[keep]


# ---------------------------------------------------------------------------
# circumcenters


def circumcenter(points: np.ndarray) -> tuple[np.ndarray, float]:
    """Circumcenter and circumradius of a d-simplex given as (d+1, d) array.

    Solves 2 (p_i - p_0) . c = |p_i|^2 - |p_0|^2 for the point c
    equidistant from all vertices.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] != pts.shape[1] + 1:
        raise DimensionError(f"need d+1 points of dimension d, got shape {pts.shape}")
    a = 2.0 * (pts[1:] - pts[0])
    b = np.sum(pts[1:] ** 2, axis=1) - np.sum(pts[0] ** 2)
    try:
        center = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise DegenerateInputError("affinely dependent points have no circumcenter") from exc
    if not np.all(np.isfinite(center)):
        raise DegenerateInputError("circumcenter is not finite")
    radius = float(np.linalg.norm(center - pts[0]))
    return center, radius


# ---------------------------------------------------------------------------
# quickhull


@dataclass(frozen=True)
class HullFacet:
    """One facet of a convex hull: d vertex indices, outward unit normal,
    and the plane offset (normal . x == offset for points on the plane)."""

    vertices: tuple[int, ...]
    normal: np.ndarray
    offset: float


@dataclass(frozen=True)
class Hull:
    vertices: tuple[int, ...]
    facets: tuple[HullFacet, ...]
    volume: float
    dim: int


def _facet_normal(pts: np.ndarray, interior: np.ndarray) -> tuple[np.ndarray, float]:
    """Outward unit normal and offset of the hyperplane through pts (d, d)."""
    edges = pts[1:] - pts[0]
    # the normal spans the (1-dim) null space of the edge matrix
    _, _, vt = np.linalg.svd(edges, full_matrices=True)
    normal = vt[-1]
    offset = float(normal @ pts[0])
    if normal @ interior > offset:
        normal = -normal
        offset = -offset
    return normal, float(offset)


def _initial_simplex(pts: np.ndarray, eps: float) -> list[int]:
    """Greedy affinely independent d+1 point subset (deterministic)."""
    n, d = pts.shape
    first = int(np.lexsort(pts.T[::-1])[0])
    chosen = [first]
    basis: list[np.ndarray] = []  # orthonormal basis of the current affine span
    for _ in range(d):
        rel = pts - pts[chosen[0]]
        for b in basis:
            rel = rel - np.outer(rel @ b, b)
        dist = np.linalg.norm(rel, axis=1)
        far = int(np.argmax(dist))
        if dist[far] <= eps:
            raise DegenerateInputError(
                "points are affinely dependent; convex hull is degenerate"
            )
        chosen.append(far)
        new_dir = rel[far] / dist[far]
        basis.append(new_dir)
    return chosen


def convex_hull(points: np.ndarray) -> Hull:
    """Convex hull of an (n, d) point array via the Quickhull algorithm.

    Returns hull vertex indices, oriented facets, and the hull volume by
    fan decomposition from the hull-vertex centroid.  Raises
    DegenerateInputError when the points do not span d dimensions.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2:
        raise DimensionError("points must be a 2-D array")
    n, d = pts.shape
    if d < 1 or d > MAX_HULL_DIM:
        raise DimensionError(f"convex_hull supports 1 <= d <= {MAX_HULL_DIM}, got {d}")
    if not np.all(np.isfinite(pts)):
        raise ValueError("points contain non-finite coordinates")
    if n < d + 1:
        raise DegenerateInputError(f"need at least {d + 1} points in dimension {d}")

    span = pts.max(axis=0) - pts.min(axis=0)
    scale = float(np.linalg.norm(span))
    eps = 1e-10 * max(scale, 1.0)

    if d == 1:
        return _hull_1d(pts)

    simplex = _initial_simplex(pts, eps)
    interior = pts[simplex].mean(axis=0)

    facets: list[HullFacet] = []
    for skip in range(d + 1):
        verts = tuple(simplex[i] for i in range(d + 1) if i != skip)
        normal, offset = _facet_normal(pts[list(verts)], interior)
        facets.append(HullFacet(verts, normal, offset))

    # outside sets: point index -> facet it is assigned to (max signed distance)
    outside: dict[int, list[int]] = {i: [] for i in range(len(facets))}
    in_simplex = set(simplex)
    candidates = [i for i in range(n) if i not in in_simplex]
    _assign_points(pts, candidates, facets, range(len(facets)), outside, eps)

    facet_alive = [True] * len(facets)
    # queue of facets that may have outside points
    while True:
        pick = -1
        for fi, alive in enumerate(facet_alive):
            if alive and outside[fi]:
                pick = fi
                break
        if pick < 0:
            break
        cand = outside[pick]
        dists = pts[cand] @ facets[pick].normal - facets[pick].offset
        apex = cand[int(np.argmax(dists))]

        visible = [
            fi
            for fi, alive in enumerate(facet_alive)
            if alive and pts[apex] @ facets[fi].normal - facets[fi].offset > eps
        ]
        if not visible:  # numerically marginal point; drop it
            outside[pick] = [i for i in outside[pick] if i != apex]
            continue

        # horizon ridges: ridges belonging to exactly one visible facet
        ridge_count: dict[frozenset[int], int] = {}
        for fi in visible:
            vs = facets[fi].vertices
            for skip in range(len(vs)):
                ridge = frozenset(vs[:skip] + vs[skip + 1 :])
                ridge_count[ridge] = ridge_count.get(ridge, 0) + 1
        horizon = [r for r, c in ridge_count.items() if c == 1]

        unclaimed: set[int] = set()
        for fi in visible:
            unclaimed.update(outside[fi])
            outside[fi] = []
            facet_alive[fi] = False
        unclaimed.discard(apex)

        new_ids = []
        for ridge in horizon:
            verts = tuple(sorted(ridge | {apex}))
            normal, offset = _facet_normal(pts[list(verts)], interior)
            facets.append(HullFacet(verts, normal, offset))
            outside[len(facets) - 1] = []
            facet_alive.append(True)
            new_ids.append(len(facets) - 1)

        alive_ids = [fi for fi, alive in enumerate(facet_alive) if alive]
        _assign_points(pts, sorted(unclaimed), facets, new_ids, outside, eps,
                       fallback=alive_ids)

    final = [facets[fi] for fi, alive in enumerate(facet_alive) if alive]
    vert_ids = sorted({v for f in final for v in f.vertices})
    centroid = pts[vert_ids].mean(axis=0)
    volume = 0.0
    for f in final:
        volume += abs(np.linalg.det(pts[list(f.vertices)] - centroid))
    volume /= float(math.factorial(d))
    return Hull(tuple(vert_ids), tuple(final), float(volume), d)


def _assign_points(pts, candidates, facets, facet_ids, outside, eps, fallback=None):
    """Assign each candidate point to the facet it is furthest outside of."""
    for i in candidates:
        best_f, best_d = -1, eps
        for fi in facet_ids:
            dist = pts[i] @ facets[fi].normal - facets[fi].offset
            if dist > best_d:
                best_f, best_d = fi, dist
        if best_f < 0 and fallback is not None:
            for fi in fallback:
                dist = pts[i] @ facets[fi].normal - facets[fi].offset
                if dist > best_d:
                    best_f, best_d = fi, dist
        if best_f >= 0:
            outside[best_f].append(i)


def _hull_1d(pts: np.ndarray) -> Hull:
    lo = int(np.argmin(pts[:, 0]))
    hi = int(np.argmax(pts[:, 0]))
    if pts[hi, 0] - pts[lo, 0] <= 0.0:
        raise DegenerateInputError("all points coincide")
    facets = (
        HullFacet((lo,), np.array([-1.0]), float(-pts[lo, 0])),
        HullFacet((hi,), np.array([1.0]), float(pts[hi, 0])),
    )
    return Hull(tuple(sorted({lo, hi})), facets, float(pts[hi, 0] - pts[lo, 0]), 1)


def point_in_hull(q: np.ndarray, hull: Hull, tol: float = 1e-9) -> bool:
    """True when q lies inside or on the hull (within tol of every facet plane)."""
    return all(float(q @ f.normal - f.offset) <= tol for f in hull.facets)


# ---------------------------------------------------------------------------
# delaunay / voronoi


@dataclass(frozen=True)
class Simplex:
    """A Delaunay d-simplex: d+1 point indices plus its circumball."""

    vertex_indices: tuple[int, ...]
    circumcenter: np.ndarray
    circumradius: float


def delaunay(points: np.ndarray, rng_seed: int = 0) -> list[Simplex]:
    """Delaunay simplices of an (n, d) point set, d <= 6.

    Lifts each point p to (p, |p|^2), computes the convex hull one
    dimension up, and keeps the downward-facing facets.  Degenerate
    (co-spherical / co-planar) configurations are resolved by a seeded
    joggle of magnitude 1e-10 of the bounding-box diagonal, retried up to
    3 times with 10x growing magnitude.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2:
        raise DimensionError("points must be a 2-D array")
    n, d = pts.shape
    if d < 1 or d > MAX_DELAUNAY_DIM:
        raise DimensionError(f"delaunay supports 1 <= d <= {MAX_DELAUNAY_DIM}, got {d}")
    if n < d + 1:
        raise DegenerateInputError(f"need at least {d + 1} points in dimension {d}")

    if n == d + 1:
        center, radius = circumcenter(pts)
        return [Simplex(tuple(range(n)), center, radius)]

    span = pts.max(axis=0) - pts.min(axis=0)
    diag = float(np.linalg.norm(span))
    rng = np.random.default_rng(rng_seed)

    last_err: Exception | None = None
    work = pts
    for attempt in range(4):
        try:
            simplices = _delaunay_attempt(pts, work)
            return simplices
        except DegenerateInputError as exc:
            last_err = exc
            magnitude = 1e-10 * max(diag, 1.0) * 10.0**attempt
            work = pts + rng.normal(scale=magnitude, size=pts.shape)
    raise DegenerateInputError(f"persistent degeneracy in delaunay: {last_err}")


def _delaunay_attempt(original: np.ndarray, work: np.ndarray) -> list[Simplex]:
    n, d = work.shape
    lifted = np.hstack([work, np.sum(work**2, axis=1, keepdims=True)])
    hull = convex_hull(lifted)
    simplices = []
    covered: set[int] = set()
    for f in hull.facets:
        if f.normal[-1] >= -1e-12:
            continue
        verts = tuple(sorted(f.vertices))
        try:
            center, radius = circumcenter(original[list(verts)])
        except DegenerateInputError:
            center, radius = circumcenter(work[list(verts)])
        simplices.append(Simplex(verts, center, radius))
        covered.update(verts)
    if len(covered) < n:
        # a point fell on/inside the lifted hull: co-spherical degeneracy
        raise DegenerateInputError("input point absent from the triangulation")
    return simplices


def voronoi_vertices(
    points: np.ndarray, rng_seed: int = 0
) -> list[tuple[np.ndarray, tuple[int, ...], float]]:
    """Voronoi vertices of a point set as (vertex, defining indices, radius).

    One entry per Delaunay simplex: the circumcenter, the d+1 indices of
    its defining points, and the circumradius.  Vertices outside the
    convex hull of the points are included.
    """
    return [
        (s.circumcenter, s.vertex_indices, s.circumradius)
        for s in delaunay(points, rng_seed=rng_seed)
    ]


# ---------------------------------------------------------------------------
# distances


def nearest_distance(q: np.ndarray, points: np.ndarray) -> tuple[float, int]:
    """Euclidean distance from q to the closest row of points, with its index.

    Ties break to the lowest index.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise ValueError("points must be a nonempty (n, d) array")
    dists = np.linalg.norm(pts - np.asarray(q, dtype=float), axis=1)
    idx = int(np.argmin(dists))
    return float(dists[idx]), idx


def mean_pairwise_distance_unit_cube(d: int, n_mc: int = 100_000, rng_seed: int = 0) -> float:
    """Monte-Carlo estimate of the mean distance between two uniform random
    points in [0, 1]^d.  Deterministic for a fixed seed."""
    if d < 1:
        raise DimensionError("d must be >= 1")
    if n_mc < 10_000:
        raise ValueError("need n_mc >= 10^4 for a stable estimate")
    rng = np.random.default_rng(rng_seed)
    total = 0.0
    left = n_mc
    while left > 0:
        batch = min(left, 1_000_000)
        x = rng.random((batch, d))
        y = rng.random((batch, d))
        total += float(np.sum(np.linalg.norm(x - y, axis=1)))
        left -= batch
    return total / n_mc
