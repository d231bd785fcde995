"""Boundary coefficients and volume sources.

A :class:`BoundaryField` is a nonnegative bounded scalar field on the
domain boundary.  Three representations are supported:

* ``constant`` - one value everywhere;
* ``per_facet`` - one value per boundary facet, the canonical form for
  stability experiments because sup-norm differences of two such fields
  are exact (no quadrature error);
* ``closure`` - an arbitrary callable of the coordinates.

Negative values are rejected at evaluation time, where the evidence is;
closures cannot be validated eagerly.

Sup and inf norms are approximated by maxima/minima over a per-facet
sample set consisting of the facet vertices plus the quadrature nodes of
the requested order, so piecewise-linear and per-facet data are resolved
exactly and closures are sampled up to the corners.
"""

from __future__ import annotations

import ast
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, InvalidCoefficientError
from .mesh import BoundaryFacet, Mesh
from .quadrature import facet_rule


@dataclass(frozen=True, eq=False)
class BoundaryField:
    """Nonnegative scalar coefficient on the boundary."""

    kind: str
    constant_value: float = None
    facet_values: np.ndarray = None
    closure: object = None

    @classmethod
    def constant(cls, value: float) -> "BoundaryField":
        return cls(kind="constant", constant_value=float(value))

    @classmethod
    def per_facet(cls, values) -> "BoundaryField":
        arr = np.asarray(values, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise InvalidArgumentError("per_facet values must be a nonempty 1-d sequence")
        arr.setflags(write=False)
        return cls(kind="per_facet", facet_values=arr)

    @classmethod
    def from_function(cls, fn) -> "BoundaryField":
        return cls(kind="closure", closure=fn)

    @classmethod
    def from_expression(cls, expr: str) -> "BoundaryField":
        return cls.from_function(compile_expression(expr))


@dataclass(frozen=True, eq=False)
class SourceField:
    """Scalar source term on the domain."""

    kind: str
    constant_value: float = None
    closure: object = None

    @classmethod
    def constant(cls, value: float) -> "SourceField":
        value = float(value)
        if not np.isfinite(value):
            raise InvalidArgumentError(f"source constant must be finite, got {value}")
        return cls(kind="constant", constant_value=value)

    @classmethod
    def from_function(cls, fn) -> "SourceField":
        return cls(kind="closure", closure=fn)

    @classmethod
    def from_expression(cls, expr: str) -> "SourceField":
        return cls.from_function(compile_expression(expr))


def eval_boundary(field: BoundaryField, facet: BoundaryFacet, point) -> float:
    """Value of the field at a point of the given facet."""
    if field.kind == "constant":
        value = field.constant_value
    elif field.kind == "per_facet":
        if facet.index >= field.facet_values.size:
            raise InvalidArgumentError(
                f"per_facet field has {field.facet_values.size} values but facet "
                f"index is {facet.index}"
            )
        value = float(field.facet_values[facet.index])
    else:
        value = float(field.closure(np.asarray(point, dtype=float)))
    if value < 0.0:
        raise InvalidCoefficientError(
            f"boundary coefficient is negative ({value}) on facet {facet.index}"
        )
    return value


def eval_boundary_batch(field: BoundaryField, facet: BoundaryFacet, points) -> np.ndarray:
    """Values at several points of one facet, shape (len(points),)."""
    points = np.asarray(points, dtype=float)
    if field.kind == "constant":
        values = np.full(points.shape[0], field.constant_value)
    elif field.kind == "per_facet":
        if facet.index >= field.facet_values.size:
            raise InvalidArgumentError(
                f"per_facet field has {field.facet_values.size} values but facet "
                f"index is {facet.index}"
            )
        values = np.full(points.shape[0], field.facet_values[facet.index])
    else:
        values = np.array([float(field.closure(p)) for p in points])
    if np.any(values < 0.0):
        worst = float(values.min())
        raise InvalidCoefficientError(
            f"boundary coefficient is negative ({worst}) on facet {facet.index}"
        )
    return values


def eval_source(field: SourceField, points) -> np.ndarray:
    """Source values at points of shape (k, dim)."""
    points = np.asarray(points, dtype=float)
    if field.kind == "constant":
        values = np.full(points.shape[0], field.constant_value)
    else:
        values = np.array([float(field.closure(p)) for p in points])
    if not np.all(np.isfinite(values)):
        raise InvalidArgumentError("source field evaluated to a non-finite value")
    return values


def facet_sample_points(mesh: Mesh, quad_order: int):
    """Yield (facet, sample points) with vertices prepended to quad nodes."""
    rule_points, _ = facet_rule(mesh.dim, quad_order)
    for facet in mesh.boundary_facets:
        corners = mesh.vertices[list(facet.vertex_indices)]
        physical = rule_points @ corners
        yield facet, np.vstack([corners, physical])


def boundary_sup(field: BoundaryField, mesh: Mesh, quad_order: int = 2) -> float:
    """Max of the field over the boundary sample set (exact for constants)."""
    return _boundary_extremum(field, mesh, quad_order, np.max, max)


def boundary_inf(field: BoundaryField, mesh: Mesh, quad_order: int = 2) -> float:
    """Min of the field over the boundary sample set."""
    return _boundary_extremum(field, mesh, quad_order, np.min, min)


def _boundary_extremum(field, mesh, quad_order, reducer, combiner):
    result = None
    for facet, pts in facet_sample_points(mesh, quad_order):
        value = float(reducer(eval_boundary_batch(field, facet, pts)))
        result = value if result is None else combiner(result, value)
    return result


def boundary_sup_diff(
    a: BoundaryField, b: BoundaryField, mesh: Mesh, quad_order: int = 2
) -> float:
    """Sup over the boundary sample set of |a - b| (exact for per-facet data)."""
    worst = 0.0
    for facet, pts in facet_sample_points(mesh, quad_order):
        va = eval_boundary_batch(a, facet, pts)
        vb = eval_boundary_batch(b, facet, pts)
        worst = max(worst, float(np.max(np.abs(va - vb))))
    return worst


_ALLOWED_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div)
_ALLOWED_UNARY = (ast.UAdd, ast.USub)
_COORD_NAMES = ("x", "y", "z")


def compile_expression(expr: str):
    """Compile a coordinate expression (x, y, z, + - * /, constants).

    Returns a callable taking one coordinate array.  Using a variable the
    domain does not have (e.g. ``z`` on the square) fails at evaluation.
    """
    try:
        tree = ast.parse(expr, mode="eval")
    except SyntaxError as exc:
        raise InvalidArgumentError(f"cannot parse field expression {expr!r}: {exc}") from exc
    for node in ast.walk(tree):
        if isinstance(node, (ast.Expression, ast.Load)):
            continue
        if isinstance(node, ast.BinOp) and isinstance(node.op, _ALLOWED_BINOPS):
            continue
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, _ALLOWED_UNARY):
            continue
        if isinstance(node, (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.UAdd, ast.USub)):
            continue
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            continue
        if isinstance(node, ast.Name) and node.id in _COORD_NAMES:
            continue
        raise InvalidArgumentError(
            f"field expression {expr!r} uses unsupported syntax "
            f"({type(node).__name__}); allowed: x, y, z, + - * /, constants"
        )
    code = compile(tree, "<field-expression>", "eval")

    def evaluate(point):
        scope = {name: point[i] for i, name in enumerate(_COORD_NAMES) if i < len(point)}
        try:
            return float(eval(code, {"__builtins__": {}}, scope))
        except NameError as exc:
            raise InvalidArgumentError(
                f"field expression {expr!r} references a coordinate the "
                f"{len(point)}-dimensional domain does not have"
            ) from exc

    return evaluate
