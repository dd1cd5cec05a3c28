"""Exact rational geometry kernel: points, boxes, box unions, hulls, volumes.

Everything here runs on ``fractions.Fraction`` (or plain ``int``) coordinates;
there is no floating point on any verification path.  Tiling validity is a
measure-zero boundary property, so all predicates are exact.

All values are immutable after construction and all operations are pure
functions, so they can be shared freely between threads.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

Rat = Fraction
Point = tuple[Fraction, ...]
Vector = tuple[Fraction, ...]
Matrix = tuple[tuple[Fraction, ...], ...]


class GeometryError(ValueError):
    """Raised on malformed geometric input (dimension mismatch, singular map...)."""


# ---------------------------------------------------------------------------
# points and matrices


def point(*coords) -> Point:
    """Build a point with Fraction coordinates from ints/Fractions/strings."""
    return tuple(Fraction(c) for c in coords)


def as_point(coords: Iterable) -> Point:
    return tuple(Fraction(c) for c in coords)


def vec_add(a: Sequence, b: Sequence) -> Point:
    return tuple(Fraction(x) + Fraction(y) for x, y in zip(a, b, strict=True))


def vec_sub(a: Sequence, b: Sequence) -> Point:
    return tuple(Fraction(x) - Fraction(y) for x, y in zip(a, b, strict=True))


def vec_scale(c, a: Sequence) -> Point:
    c = Fraction(c)
    return tuple(c * Fraction(x) for x in a)


def vec_dot(a: Sequence, b: Sequence) -> Fraction:
    return sum((Fraction(x) * Fraction(y) for x, y in zip(a, b, strict=True)), Fraction(0))


def matrix(rows: Iterable[Iterable]) -> Matrix:
    m = tuple(tuple(Fraction(x) for x in row) for row in rows)
    if m and any(len(row) != len(m[0]) for row in m):
        raise GeometryError("ragged matrix")
    return m


def identity_matrix(d: int) -> Matrix:
    return tuple(tuple(Fraction(1 if i == j else 0) for j in range(d)) for i in range(d))


def mat_vec(m: Matrix, v: Sequence) -> Point:
    return tuple(vec_dot(row, v) for row in m)


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    bt = tuple(zip(*b))
    return tuple(tuple(vec_dot(row, col) for col in bt) for row in a)


def mat_det(m: Matrix) -> Fraction:
    """Determinant by fraction-free-ish Gaussian elimination (exact)."""
    n = len(m)
    a = [list(row) for row in m]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        inv = 1 / a[col][col]
        for r in range(col + 1, n):
            if a[r][col] != 0:
                f = a[r][col] * inv
                for c in range(col, n):
                    a[r][c] -= f * a[col][c]
    return det


def mat_inv(m: Matrix) -> Matrix:
    n = len(m)
    a = [list(row) + [Fraction(1 if i == j else 0) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise GeometryError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return tuple(tuple(row[n:]) for row in a)


def mat_rank(rows: Sequence[Sequence]) -> int:
    a = [[Fraction(x) for x in row] for row in rows]
    rank = 0
    ncols = len(a[0]) if a else 0
    row = 0
    for col in range(ncols):
        piv = next((r for r in range(row, len(a)) if a[r][col] != 0), None)
        if piv is None:
            continue
        a[row], a[piv] = a[piv], a[row]
        inv = 1 / a[row][col]
        a[row] = [x * inv for x in a[row]]
        for r in range(len(a)):
            if r != row and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[row])]
        row += 1
        rank += 1
    return rank


def is_diagonal(m: Matrix) -> bool:
    return all(m[i][j] == 0 for i in range(len(m)) for j in range(len(m)) if i != j)


def primitive_direction(v: Sequence) -> tuple[int, ...]:
    """Scale a nonzero rational vector to the primitive integer vector on its ray."""
    fr = [Fraction(x) for x in v]
    if all(x == 0 for x in fr):
        raise GeometryError("zero vector has no direction")
    den = 1
    for x in fr:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    return tuple(x // g for x in ints)


# ---------------------------------------------------------------------------
# affine maps


@dataclass(frozen=True)
class AffineMap:
    """x |-> linear @ x + translate over exact rationals."""

    linear: Matrix
    translate: Point

    def __post_init__(self):
        object.__setattr__(self, "linear", matrix(self.linear))
        object.__setattr__(self, "translate", as_point(self.translate))
        if len(self.linear) != len(self.translate):
            raise GeometryError("linear/translate dimension mismatch")

    @property
    def dim(self) -> int:
        return len(self.translate)

    def __call__(self, p: Sequence) -> Point:
        return vec_add(mat_vec(self.linear, p), self.translate)

    def det(self) -> Fraction:
        return mat_det(self.linear)

    def is_diagonal(self) -> bool:
        return is_diagonal(self.linear)

    def inverse(self) -> "AffineMap":
        inv = mat_inv(self.linear)
        return AffineMap(inv, vec_scale(-1, mat_vec(inv, self.translate)))

    @staticmethod
    def identity(d: int) -> "AffineMap":
        return AffineMap(identity_matrix(d), tuple(Fraction(0) for _ in range(d)))


# ---------------------------------------------------------------------------
# boxes and box unions


@dataclass(frozen=True)
class Box:
    """Axis-aligned box with nonempty interior: lo[i] < hi[i] for all i."""

    lo: Point
    hi: Point

    def __post_init__(self):
        object.__setattr__(self, "lo", as_point(self.lo))
        object.__setattr__(self, "hi", as_point(self.hi))
        if len(self.lo) != len(self.hi):
            raise GeometryError("box lo/hi dimension mismatch")
        if any(l >= h for l, h in zip(self.lo, self.hi)):
            raise GeometryError(f"empty box: lo={self.lo} hi={self.hi}")

    @property
    def dim(self) -> int:
        return len(self.lo)

    def volume(self) -> Fraction:
        v = Fraction(1)
        for l, h in zip(self.lo, self.hi):
            v *= h - l
        return v

    def contains_point(self, p: Sequence) -> bool:
        return all(l <= Fraction(x) <= h for l, x, h in zip(self.lo, p, self.hi))

    def corners(self) -> list[Point]:
        return [tuple(pick) for pick in itertools.product(*zip(self.lo, self.hi))]

    def intersect(self, other: "Box") -> "Box | None":
        lo = tuple(max(a, b) for a, b in zip(self.lo, other.lo))
        hi = tuple(min(a, b) for a, b in zip(self.hi, other.hi))
        if any(l >= h for l, h in zip(lo, hi)):
            return None
        return Box(lo, hi)

    @staticmethod
    def unit_cell(cell: Sequence) -> "Box":
        lo = as_point(cell)
        return Box(lo, tuple(x + 1 for x in lo))


@dataclass(frozen=True)
class BoxUnion:
    """Finite union of axis-aligned boxes (not necessarily disjoint as stored)."""

    boxes: tuple[Box, ...]

    def __post_init__(self):
        object.__setattr__(self, "boxes", tuple(self.boxes))
        dims = {b.dim for b in self.boxes}
        if len(dims) > 1:
            raise GeometryError("mixed dimensions in box union")

    @property
    def dim(self) -> int:
        if not self.boxes:
            raise GeometryError("empty box union has no dimension")
        return self.boxes[0].dim

    def contains_point(self, p: Sequence) -> bool:
        return any(b.contains_point(p) for b in self.boxes)

    def bounding_box(self) -> Box:
        lo = tuple(min(b.lo[i] for b in self.boxes) for i in range(self.dim))
        hi = tuple(max(b.hi[i] for b in self.boxes) for i in range(self.dim))
        return Box(lo, hi)


def normalize_box_union(u: BoxUnion) -> BoxUnion:
    """Split along every coordinate value appearing in any box, then dedupe.

    The result covers the same point set with pairwise interior-disjoint
    boxes, so its measure is the plain sum of box volumes.  Idempotent.
    """
    if not u.boxes:
        return u
    d = u.dim
    cuts = [sorted({b.lo[i] for b in u.boxes} | {b.hi[i] for b in u.boxes}) for i in range(d)]
    out: set[tuple[Point, Point]] = set()
    for b in u.boxes:
        axis_cells = []
        for i in range(d):
            vals = [v for v in cuts[i] if b.lo[i] <= v <= b.hi[i]]
            axis_cells.append(list(zip(vals, vals[1:])))
        for combo in itertools.product(*axis_cells):
            lo = tuple(c[0] for c in combo)
            hi = tuple(c[1] for c in combo)
            out.add((lo, hi))
    boxes = tuple(Box(lo, hi) for lo, hi in sorted(out))
    return BoxUnion(boxes)


def measure(u: BoxUnion) -> Fraction:
    """Exact Lebesgue measure of a box union (overlaps counted once)."""
    if not u.boxes:
        return Fraction(0)
    return _measure_boxes(list(u.boxes), 0)


def _measure_boxes(boxes: list[Box], axis: int) -> Fraction:
    # slab sweep on `axis`, recursing into the remaining axes
    d = boxes[0].dim
    if axis == d - 1:
        events = sorted({b.lo[axis] for b in boxes} | {b.hi[axis] for b in boxes})
        total = Fraction(0)
        for a, b in zip(events, events[1:]):
            if any(box.lo[axis] <= a and b <= box.hi[axis] for box in boxes):
                total += b - a
        return total
    events = sorted({b.lo[axis] for b in boxes} | {b.hi[axis] for b in boxes})
    total = Fraction(0)
    for a, b in zip(events, events[1:]):
        active = [box for box in boxes if box.lo[axis] <= a and b <= box.hi[axis]]
        if active:
            total += (b - a) * _measure_boxes(active, axis + 1)
    return total


def measure_intersection(u: BoxUnion, v: BoxUnion) -> Fraction:
    """Measure of the intersection of two box unions (exact)."""
    pieces = []
    for a in u.boxes:
        for b in v.boxes:
            c = a.intersect(b)
            if c is not None:
                pieces.append(c)
    if not pieces:
        return Fraction(0)
    return measure(BoxUnion(tuple(pieces)))


# ---------------------------------------------------------------------------
# convex hulls (exact, d <= 3)


@dataclass(frozen=True)
class VPolytope:
    """Convex polytope stored by its extreme points, lexicographically sorted.

    Equality of polytopes is plain equality of the canonical vertex lists.
    ``affine_dim`` < ambient dimension flags a degenerate (flat) hull.
    """

    vertices: tuple[Point, ...]
    affine_dim: int

    @property
    def dim(self) -> int:
        return len(self.vertices[0])

    @property
    def is_full_dimensional(self) -> bool:
        return self.affine_dim == self.dim


def _affine_dim(pts: Sequence[Point]) -> int:
    if len(pts) <= 1:
        return 0
    diffs = [vec_sub(p, pts[0]) for p in pts[1:]]
    return mat_rank(diffs)


def _scale_to_int(pts: Sequence[Point]) -> tuple[list[tuple[int, ...]], list[int]]:
    """Per-axis positive scaling to integer coordinates (hull-invariant).

    Returns the scaled points and the per-axis factors used.
    """
    d = len(pts[0])
    dens = [1] * d
    for p in pts:
        for i, x in enumerate(p):
            f = Fraction(x)
            dens[i] = dens[i] * f.denominator // gcd(dens[i], f.denominator)
    ints = [tuple(int(Fraction(x) * dens[i]) for i, x in enumerate(p)) for p in pts]
    return ints, dens


def _orient2d(a, b, c) -> int:
    v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    return (v > 0) - (v < 0)


def _cross3(u, v):
    return (
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    )


def _sub3(a, b):
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def _orient3d(a, b, c, p) -> int:
    n = _cross3(_sub3(b, a), _sub3(c, a))
    w = _sub3(p, a)
    v = n[0] * w[0] + n[1] * w[1] + n[2] * w[2]
    return (v > 0) - (v < 0)


def _chain_2d(pts: list) -> list:
    """Andrew monotone chain; returns the hull cycle in CCW order, strict turns."""
    pts = sorted(set(pts))
    if len(pts) <= 2:
        return pts
    lower: list = []
    for p in pts:
        while len(lower) >= 2 and _orient2d(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(pts):
        while len(upper) >= 2 and _orient2d(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _hull_3d_facets(ipts: list[tuple[int, ...]]) -> list[tuple[tuple[int, ...], ...]]:
    """Facets of a full-dimensional 3-D hull, as outward-oriented polygons.

    Incremental insertion with exact orientation tests, followed by a
    coplanar-merge pass so collinear/coplanar input points never surface as
    spurious vertices.
    """
    pts = sorted(set(ipts))
    # initial non-degenerate simplex
    p0 = pts[0]
    p1 = next(p for p in pts if p != p0)
    p2 = next(p for p in pts if _cross3(_sub3(p1, p0), _sub3(p, p0)) != (0, 0, 0))
    p3 = next(p for p in pts if _orient3d(p0, p1, p2, p) != 0)
    if _orient3d(p0, p1, p2, p3) > 0:
        p1, p2 = p2, p1
    faces = [(p0, p1, p2), (p0, p3, p1), (p0, p2, p3), (p1, p3, p2)]
    for p in pts:
        if p in (p0, p1, p2, p3):
            continue
        visible = [f for f in faces if _orient3d(f[0], f[1], f[2], p) > 0]
        if not visible:
            continue
        visible_set = set(visible)
        horizon = []
        for f in visible:
            for e in ((f[0], f[1]), (f[1], f[2]), (f[2], f[0])):
                # horizon edge: shared with a non-visible face
                twin_owner = None
                for g in faces:
                    if g in visible_set:
                        continue
                    if (e[1], e[0]) in ((g[0], g[1]), (g[1], g[2]), (g[2], g[0])):
                        twin_owner = g
                        break
                if twin_owner is not None:
                    horizon.append(e)
        faces = [f for f in faces if f not in visible_set] + [(e[0], e[1], p) for e in horizon]
    # merge coplanar triangles into facet polygons
    planes: dict[tuple, None] = {}
    for f in faces:
        n = _cross3(_sub3(f[1], f[0]), _sub3(f[2], f[0]))
        g = gcd(gcd(abs(n[0]), abs(n[1])), abs(n[2]))
        n = (n[0] // g, n[1] // g, n[2] // g)
        off = n[0] * f[0][0] + n[1] * f[0][1] + n[2] * f[0][2]
        planes[(n, off)] = None
    facets = []
    for n, off in planes:
        onplane = [p for p in pts if n[0] * p[0] + n[1] * p[1] + n[2] * p[2] == off]
        axis = max(range(3), key=lambda i: abs(n[i]))
        proj = [(p[(axis + 1) % 3], p[(axis + 2) % 3]) for p in onplane]
        cycle = _chain_2d(proj)
        back = {q: p for q, p in zip(proj, onplane)}
        poly = [back[q] for q in cycle]
        # orient the polygon so its normal points outward (along n)
        if len(poly) >= 3:
            m = _cross3(_sub3(poly[1], poly[0]), _sub3(poly[2], poly[0]))
            if m[0] * n[0] + m[1] * n[1] + m[2] * n[2] < 0:
                poly.reverse()
        facets.append(tuple(poly))
    return facets


def convex_hull(points: Sequence[Sequence]) -> VPolytope:
    """Extreme points of the convex hull of a finite point set (d <= 3).

    Degenerate inputs are allowed: the hull of coplanar/collinear points is
    returned with the matching ``affine_dim``.
    """
    pts = sorted({as_point(p) for p in points})
    if not pts:
        raise GeometryError("convex hull of empty point set")
    d = len(pts[0])
    if len({len(p) for p in pts}) > 1:
        raise GeometryError("mixed point dimensions")
    if d > 3:
        raise GeometryError("convex hull implemented for d <= 3")
    adim = _affine_dim(pts)
    if adim == 0:
        return VPolytope((pts[0],), 0)
    if adim == 1:
        return VPolytope((pts[0], pts[-1]), 1)

    ints, _ = _scale_to_int(pts)
    back = {q: p for q, p in zip(ints, pts)}
    if adim == 2:
        if d == 2:
            verts = {back[q] for q in _chain_2d(ints)}
        else:
            # project the flat set onto a coordinate plane along a non-parallel axis
            base = ints[0]
            diffs = [_sub3(p, base) for p in ints[1:]]
            n = next(
                c for c in (_cross3(u, v) for u in diffs for v in diffs) if c != (0, 0, 0)
            )
            axis = max(range(3), key=lambda i: abs(n[i]))
            proj = {}
            for q in ints:
                proj.setdefault((q[(axis + 1) % 3], q[(axis + 2) % 3]), q)
            verts = {back[proj[c]] for c in _chain_2d(list(proj))}
        return VPolytope(tuple(sorted(verts)), 2)

    facets = _hull_3d_facets(ints)
    verts = {back[q] for f in facets for q in f}
    return VPolytope(tuple(sorted(verts)), 3)


def polytope_volume(p: VPolytope) -> Fraction:
    """Exact volume via signed simplices against a base point.

    Returns 0 for lower-dimensional polytopes (check ``is_full_dimensional``).
    """
    if not p.is_full_dimensional:
        return Fraction(0)
    d = p.dim
    if d == 1:
        return p.vertices[-1][0] - p.vertices[0][0]
    if d == 2:
        cycle = polygon_cycle(p)
        return abs(_shoelace(cycle))
    if d == 3:
        ints, dens = _scale_to_int(list(p.vertices))
        facets = _hull_3d_facets(ints)
        six_vol = 0
        for f in facets:
            for a, b in zip(f[1:], f[2:]):
                v0, v1, v2 = f[0], a, b
                six_vol += (
                    v0[0] * (v1[1] * v2[2] - v1[2] * v2[1])
                    - v0[1] * (v1[0] * v2[2] - v1[2] * v2[0])
                    + v0[2] * (v1[0] * v2[1] - v1[1] * v2[0])
                )
        return Fraction(abs(six_vol), 6 * dens[0] * dens[1] * dens[2])
    raise GeometryError("volume implemented for d <= 3")


def polygon_cycle(p: VPolytope) -> list[Point]:
    """Vertices of a 2-D polytope in CCW cyclic order."""
    if p.dim != 2:
        raise GeometryError("polygon_cycle needs a planar polytope")
    return _chain_2d(list(p.vertices))


def _shoelace(cycle: Sequence[Point]) -> Fraction:
    s = Fraction(0)
    n = len(cycle)
    for i in range(n):
        x0, y0 = cycle[i]
        x1, y1 = cycle[(i + 1) % n]
        s += x0 * y1 - x1 * y0
    return s / 2


def affine_image(m: AffineMap, u: BoxUnion):
    """Image of a box union under an invertible affine map.

    Diagonal linear parts keep the result axis-aligned, so a ``BoxUnion`` is
    returned; otherwise each box maps to its parallelepiped ``VPolytope``.
    """
    if m.det() == 0:
        raise GeometryError("affine image under a singular map")
    if m.is_diagonal():
        boxes = []
        for b in u.boxes:
            p = m(b.lo)
            q = m(b.hi)
            lo = tuple(min(x, y) for x, y in zip(p, q))
            hi = tuple(max(x, y) for x, y in zip(p, q))
            boxes.append(Box(lo, hi))
        return BoxUnion(tuple(boxes))
    return [convex_hull([m(c) for c in b.corners()]) for b in u.boxes]


# ---------------------------------------------------------------------------
# exact convex polygon clipping (d = 2)


def clip_convex_polygon(subject: Sequence[Point], clip: Sequence[Point]) -> list[Point]:
    """Sutherland-Hodgman intersection of two convex CCW polygons, exact."""
    out = list(subject)
    n = len(clip)
    for i in range(n):
        a, b = clip[i], clip[(i + 1) % n]
        if not out:
            return []
        nxt: list[Point] = []
        prev = out[-1]
        prev_in = _orient2d(a, b, prev) >= 0
        for cur in out:
            cur_in = _orient2d(a, b, cur) >= 0
            if cur_in:
                if not prev_in:
                    nxt.append(_line_intersect(a, b, prev, cur))
                nxt.append(cur)
            elif prev_in:
                nxt.append(_line_intersect(a, b, prev, cur))
            prev, prev_in = cur, cur_in
        out = []
        for q in nxt:  # drop consecutive duplicates
            if not out or out[-1] != q:
                out.append(q)
        if len(out) > 1 and out[0] == out[-1]:
            out.pop()
    return out


def _line_intersect(a: Point, b: Point, p: Point, q: Point) -> Point:
    # intersection of line ab with segment pq (caller guarantees crossing)
    d1 = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
    d2 = (b[0] - a[0]) * (q[1] - a[1]) - (b[1] - a[1]) * (q[0] - a[0])
    t = d1 / (d1 - d2)
    return (p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1]))


def polygon_area(cycle: Sequence[Point]) -> Fraction:
    """Absolute area of a (convex) polygon given in cyclic order."""
    if len(cycle) < 3:
        return Fraction(0)
    return abs(_shoelace(list(cycle)))
