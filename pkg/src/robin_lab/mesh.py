"""Structured simplicial meshes of the unit interval, square, and cube.

All three families are uniform with n subdivisions per axis, so the
characteristic size is h = 1/n and every measure is exact:

* interval: n segments of length 1/n; the boundary carries the counting
  measure on {0, 1}, so the two endpoint facets have measure 1 each;
* square: each grid square is split into two triangles by the same
  diagonal (low-left to up-right), giving 2n^2 cells and 4n boundary
  edges of length 1/n;
* cube: each grid cube is split into six tetrahedra sharing the main
  diagonal (Kuhn subdivision), giving 6n^3 cells of volume 1/(6n^3) and
  12n^2 boundary triangles.

A mesh is immutable after construction (arrays are marked read-only) and
safe to share across threads.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError


@dataclass(frozen=True)
class BoundaryFacet:
    """One (dim-1)-simplex of the boundary.

    ``vertex_indices`` has dim entries (a single vertex in 1D), ``measure``
    is the surface measure (1.0 for interval endpoints), ``outward_normal``
    is a unit vector pointing away from the owning cell, ``parent_cell`` is
    the unique cell the facet belongs to, and ``index`` is the facet's
    position inside ``mesh.boundary_facets`` (used by per-facet fields).
    """

    vertex_indices: tuple
    measure: float
    outward_normal: tuple
    parent_cell: int
    index: int


@dataclass(frozen=True, eq=False)
class Mesh:
    """Simplicial mesh of one of the unit boxes, with boundary data."""

    dim: int
    vertices: np.ndarray  # (num_vertices, dim)
    cells: np.ndarray  # (num_cells, dim + 1), vertex indices
    cell_measures: np.ndarray  # (num_cells,)
    boundary_facets: list
    h: float

    @property
    def num_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def num_cells(self) -> int:
        return self.cells.shape[0]


def build_interval_mesh(n: int) -> Mesh:
    """Uniform mesh of (0, 1) with n segments."""
    _check_n(n)
    vertices = (np.arange(n + 1, dtype=float) / n).reshape(-1, 1)
    cells = np.column_stack([np.arange(n), np.arange(1, n + 1)])
    return _finish_mesh(1, vertices, cells, n)


def build_unit_square_mesh(n: int) -> Mesh:
    """Uniform triangulation of (0, 1)^2, two triangles per grid square."""
    _check_n(n)
    side = n + 1
    xs = np.arange(side, dtype=float) / n
    gx, gy = np.meshgrid(xs, xs, indexing="xy")
    vertices = np.column_stack([gx.ravel(), gy.ravel()])

    def vid(ix, iy):
        return iy * side + ix

    cells = []
    for iy in range(n):
        for ix in range(n):
            v00 = vid(ix, iy)
            v10 = vid(ix + 1, iy)
            v01 = vid(ix, iy + 1)
            v11 = vid(ix + 1, iy + 1)
            # both triangles share the v00-v11 diagonal
            cells.append((v00, v10, v11))
            cells.append((v00, v11, v01))
    return _finish_mesh(2, vertices, np.array(cells), n)


# axis orders of the six Kuhn tetrahedra inside one grid cube
_KUHN_PERMUTATIONS = tuple(itertools.permutations((0, 1, 2)))


def build_unit_cube_mesh(n: int) -> Mesh:
    """Kuhn subdivision of (0, 1)^3: six tetrahedra per grid cube."""
    _check_n(n)
    side = n + 1
    coords = np.arange(side, dtype=float) / n
    gx, gy, gz = np.meshgrid(coords, coords, coords, indexing="ij")
    # index = (ix * side + iy) * side + iz
    vertices = np.column_stack([gx.ravel(), gy.ravel(), gz.ravel()])

    def vid(ix, iy, iz):
        return (ix * side + iy) * side + iz

    cells = []
    for ix in range(n):
        for iy in range(n):
            for iz in range(n):
                corner = np.array((ix, iy, iz))
                for perm in _KUHN_PERMUTATIONS:
                    tet = [corner.copy()]
                    cur = corner.copy()
                    for axis in perm:
                        cur = cur.copy()
                        cur[axis] += 1
                        tet.append(cur)
                    cells.append(tuple(vid(*v) for v in tet))
    return _finish_mesh(3, vertices, np.array(cells), n)


def build_mesh(domain: str, n: int) -> Mesh:
    """Dispatch on the domain name: interval, square, or cube."""
    builders = {
        "interval": build_interval_mesh,
        "square": build_unit_square_mesh,
        "cube": build_unit_cube_mesh,
    }
    if domain not in builders:
        raise InvalidArgumentError(
            f"unknown domain {domain!r}; expected interval, square, or cube"
        )
    return builders[domain](n)


def boundary_vertex_indices(mesh: Mesh) -> list:
    """Sorted indices of the vertices that lie on some boundary facet."""
    seen = set()
    for facet in mesh.boundary_facets:
        seen.update(facet.vertex_indices)
    return sorted(seen)


def export_text(mesh: Mesh) -> str:
    """Plain-text dump: vertex, cell, and facet lines (debugging aid)."""
    lines = []
    for v in mesh.vertices:
        lines.append("v " + " ".join(f"{x:.17g}" for x in v))
    for cell in mesh.cells:
        lines.append("c " + " ".join(str(int(i)) for i in cell))
    for facet in mesh.boundary_facets:
        ids = " ".join(str(int(i)) for i in facet.vertex_indices)
        normal = " ".join(f"{x:.17g}" for x in facet.outward_normal)
        lines.append(f"f {ids} | {facet.measure:.17g} | {normal}")
    return "\n".join(lines) + "\n"


def _check_n(n: int) -> None:
    if n < 1:
        raise InvalidArgumentError(f"mesh parameter n must be >= 1, got {n}")


def _finish_mesh(dim, vertices, cells, n) -> Mesh:
    cells = np.asarray(cells, dtype=np.int64)
    measures = _simplex_measures(vertices, cells, dim)
    facets = _extract_boundary_facets(vertices, cells, dim)
    for arr in (vertices, cells, measures):
        arr.setflags(write=False)
    return Mesh(
        dim=dim,
        vertices=vertices,
        cells=cells,
        cell_measures=measures,
        boundary_facets=facets,
        h=1.0 / n,
    )


def _simplex_measures(vertices, cells, dim) -> np.ndarray:
    pts = vertices[cells]  # (nc, dim + 1, dim)
    edges = pts[:, 1:, :] - pts[:, :1, :]
    if dim == 1:
        return np.abs(edges[:, 0, 0])
    return np.abs(np.linalg.det(edges)) / math.factorial(dim)


def _extract_boundary_facets(vertices, cells, dim) -> list:
    # a face is on the boundary iff it belongs to exactly one cell
    counts: dict = {}
    for ci, cell in enumerate(cells):
        for face in itertools.combinations(cell, dim):
            key = tuple(sorted(int(i) for i in face))
            entry = counts.get(key)
            if entry is None:
                counts[key] = [1, ci]
            else:
                entry[0] += 1
    facets = []
    for ci, cell in enumerate(cells):
        for face in itertools.combinations(cell, dim):
            key = tuple(sorted(int(i) for i in face))
            count, owner = counts[key]
            if count == 1 and owner == ci:
                measure, normal = _facet_geometry(vertices, key, cells[ci], dim)
                facets.append(
                    BoundaryFacet(
                        vertex_indices=key,
                        measure=measure,
                        outward_normal=tuple(normal),
                        parent_cell=ci,
                        index=len(facets),
                    )
                )
    return facets


def _facet_geometry(vertices, face, parent_cell, dim):
    pts = vertices[list(face)]
    facet_centroid = pts.mean(axis=0)
    cell_centroid = vertices[parent_cell].mean(axis=0)
    if dim == 1:
        measure = 1.0  # counting measure on the two endpoints
        normal = np.array([1.0])
    elif dim == 2:
        tangent = pts[1] - pts[0]
        measure = float(np.linalg.norm(tangent))
        normal = np.array([tangent[1], -tangent[0]]) / measure
    else:
        cross = np.cross(pts[1] - pts[0], pts[2] - pts[0])
        doubled = float(np.linalg.norm(cross))
        measure = doubled / 2.0
        normal = cross / doubled
    if float(np.dot(normal, facet_centroid - cell_centroid)) < 0.0:
        normal = -normal
    return measure, normal
