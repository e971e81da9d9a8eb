"""Newton polygon geometry: exact integer hulls, lattice points, dual cones
at lattice points, and the classification of component ends.

Everything here is integer arithmetic; dual cones and lattice points index
complement components, so no floating point is allowed to leak in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import NotLatticePointError
from .poly import LaurentPoly2

IVec = tuple[int, int]


def _cross(o: IVec, a: IVec, b: IVec) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _primitive(v: IVec) -> IVec:
    g = math.gcd(abs(v[0]), abs(v[1]))
    return (v[0] // g, v[1] // g)


def _on_segment(p: IVec, a: IVec, b: IVec) -> bool:
    if _cross(a, b, p) != 0:
        return False
    return (
        min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
        and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])
    )


@dataclass(frozen=True)
class NewtonPolygon:
    """Convex hull of a support set: CCW extreme vertices (collinear points
    dropped), all lattice points, and twice the area (exact shoelace)."""

    vertices: tuple[IVec, ...]
    lattice_points: tuple[IVec, ...]
    area2: int

    @property
    def degenerate(self) -> bool:
        return self.area2 == 0

    def contains(self, pt: IVec) -> bool:
        """Point inside or on the hull (exact)."""
        v = self.vertices
        if len(v) == 1:
            return pt == v[0]
        if len(v) == 2:
            return _on_segment(pt, v[0], v[1])
        for i in range(len(v)):
            if _cross(v[i], v[(i + 1) % len(v)], pt) < 0:
                return False
        return True

    def boundary_contains(self, pt: IVec) -> bool:
        v = self.vertices
        if len(v) <= 2:
            return self.contains(pt)
        return any(
            _on_segment(pt, v[i], v[(i + 1) % len(v)]) for i in range(len(v))
        )


def _hull(points: list[IVec]) -> list[IVec]:
    pts = sorted(set(points))
    if len(pts) == 1:
        return pts
    lower: list[IVec] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[IVec] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) == 0:  # all collinear: keep the two extreme points
        return [pts[0], pts[-1]]
    if len(hull) == 2 and hull[0] == hull[1]:
        return [hull[0]]
    return hull


def newton_polygon(p: LaurentPoly2) -> NewtonPolygon:
    """Exact hull of the exponent support.  Degenerate hulls (point or
    segment) are returned with area2 = 0."""
    support = [tuple(k) for k in p.support()]
    verts = _hull(support)
    area2 = 0
    if len(verts) >= 3:
        area2 = sum(
            verts[i][0] * verts[(i + 1) % len(verts)][1]
            - verts[(i + 1) % len(verts)][0] * verts[i][1]
            for i in range(len(verts))
        )
    poly = NewtonPolygon(tuple(verts), (), area2)
    lat = _enumerate_lattice(poly)
    return NewtonPolygon(tuple(verts), tuple(lat), area2)


def _enumerate_lattice(poly: NewtonPolygon) -> list[IVec]:
    xs = [v[0] for v in poly.vertices]
    ys = [v[1] for v in poly.vertices]
    out = []
    for x in range(min(xs), max(xs) + 1):
        for y in range(min(ys), max(ys) + 1):
            if poly.contains((x, y)):
                out.append((x, y))
    return out


def lattice_points(poly: NewtonPolygon) -> list[IVec]:
    """All integer points inside or on the hull, lexicographic order."""
    return list(poly.lattice_points)


# ---------------------------------------------------------------------------
# dual cones
# ---------------------------------------------------------------------------

# Cone kinds: "zero" ({0}: interior lattice point, bounded component),
# "ray" (edge-interior point), "sector" (vertex), plus the degenerate-hull
# kinds "plane" (single-point support), "halfplane" (segment endpoint) and
# "line" (segment-interior point).
ConeKind = str


@dataclass(frozen=True)
class Cone2:
    kind: ConeKind
    generators: tuple[IVec, ...] = ()

    def __post_init__(self):
        if self.kind == "sector":
            g1, g2 = self.generators
            if g1[0] * g2[1] - g1[1] * g2[0] <= 0:
                raise ValueError("sector generators must be independent and CCW")


def _edge_normal(a: IVec, b: IVec) -> IVec:
    """Outward normal of the CCW-oriented edge a -> b."""
    e = (b[0] - a[0], b[1] - a[1])
    return _primitive((e[1], -e[0]))


def dual_cone(poly: NewtonPolygon, nu: IVec) -> Cone2:
    """Directions s where <s, .> over the polygon is maximized exactly at nu.

    {0} for interior points, the outward edge normal ray for edge-interior
    points, the sector between the two adjacent outward edge normals for
    vertices.  Degenerate hulls give "plane", "halfplane" or "line" cones.
    """
    nu = (int(nu[0]), int(nu[1]))
    if nu not in poly.lattice_points:
        raise NotLatticePointError(f"{nu} is not a lattice point of the polygon")
    v = poly.vertices
    if len(v) == 1:
        return Cone2("plane", ())
    if len(v) == 2:
        a, b = v
        g = _primitive((b[0] - a[0], b[1] - a[1]))
        perp = (-g[1], g[0])
        if nu == a or nu == b:
            # functional increases toward nu along +/-g
            u = (a[0] - b[0], a[1] - b[1]) if nu == a else (b[0] - a[0], b[1] - a[1])
            u = _primitive(u)
            p1 = (-u[1], u[0])
            p2 = (u[1], -u[0])
            return Cone2("halfplane", (p2, p1))
        return Cone2("line", (perp, (-perp[0], -perp[1])))
    n = len(v)
    if nu in v:
        i = v.index(nu)
        n_in = _edge_normal(v[(i - 1) % n], v[i])
        n_out = _edge_normal(v[i], v[(i + 1) % n])
        return Cone2("sector", (n_in, n_out))
    for i in range(n):
        if _on_segment(nu, v[i], v[(i + 1) % n]):
            return Cone2("ray", (_edge_normal(v[i], v[(i + 1) % n]),))
    return Cone2("zero", ())


# ---------------------------------------------------------------------------
# end classification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EndpointClass:
    """Where a lifted boundary end lands in compactified coordinates.

    kinds: "origin", "p_point" (a point (z0, 0) on the w=0 line), "q_point"
    (a point (0, w0)), "infinity" (flavors record which coordinate escapes:
    subset of {"z", "w"}).
    """

    kind: str
    z0: complex | None = None
    w0: complex | None = None
    flavors: frozenset[str] = field(default_factory=frozenset)

    def anchored(self, value: complex) -> "EndpointClass":
        if self.kind == "p_point":
            return EndpointClass("p_point", z0=value)
        if self.kind == "q_point":
            return EndpointClass("q_point", w0=value)
        return self


def classify_end_direction(d: IVec) -> EndpointClass:
    """One recession-cone edge ray -> one endpoint class.

    Moving out along d, log|z| ~ t*d1 and log|w| ~ t*d2: straight down lands
    on the w=0 line at finite z (p point), straight left on the z=0 line
    (q point), strictly negative quadrants at the origin, anything with a
    growing coordinate at the single point at infinity.
    """
    if d == (0, -1):
        return EndpointClass("p_point")
    if d == (-1, 0):
        return EndpointClass("q_point")
    if d[0] < 0 and d[1] < 0:
        return EndpointClass("origin")
    flavors = set()
    if d[0] > 0:
        flavors.add("z")
    if d[1] > 0:
        flavors.add("w")
    return EndpointClass("infinity", flavors=frozenset(flavors))


def classify_ends(cone: Cone2) -> list[EndpointClass]:
    """Endpoint classes of a component's lifted boundary, one per cone edge
    ray.  A ray cone bounds a strip whose two boundary branches share the
    direction, so its single generator is emitted twice; bounded components
    ({0} cones) have no ends."""
    if cone.kind in ("zero", "plane"):
        return []
    if cone.kind == "ray":
        d = cone.generators[0]
        return [classify_end_direction(d), classify_end_direction(d)]
    return [classify_end_direction(g) for g in cone.generators]
