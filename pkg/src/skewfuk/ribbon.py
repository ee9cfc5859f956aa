"""Graded ribbon complexes: half-edge combinatorial maps with orbifold cells.

A complex models a graded orbifold surface with stops together with a
weakly admissible dissection.  Vertices are the polygons of the
dissection, half-edges are the polygon sides (one per arc side), and each
orbifold point contributes a 2-cell whose boundary is the cycle of arcs
at that point.  Corners (consecutive half-edge pairs at a vertex) are
dual to elementary boundary or orbifold paths and carry integer
winding-number degrees.

Conventions.  Half-edges at a vertex are listed in the counterclockwise
walk order of the polygon boundary (polygon interior on the left).  The
corner (v, i) sits between halfedges[i] and halfedges[i+1] and, when not
missing, is the elementary path from the first arc to the second.  Face
traversal proceeds from corner (v, i) to the corner starting at the
opposite half-edge of halfedges[i+1].  Any globally consistent choice
gives the same category up to reflection; this one reproduces the
bundled corpus.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field


class ComplexError(ValueError):
    """Structural error in a ribbon complex or an illegal operation."""


Corner = tuple  # (vertex id, index)


@dataclass(frozen=True)
class Vertex:
    id: str
    halfedges: tuple
    full_stop: bool = False
    missing_after: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "halfedges", tuple(self.halfedges))

    @property
    def valency(self) -> int:
        return len(self.halfedges)


@dataclass(frozen=True)
class OrbifoldCell:
    id: str
    anchor: Corner


@dataclass
class GradedRibbonComplex:
    name: str
    vertices: list
    edges: dict  # edge id -> (halfedge, halfedge)
    cells: list
    corner_degrees: dict  # Corner -> int
    extra_products: list = field(default_factory=list)

    def __post_init__(self):
        self._reindex()

    def _reindex(self):
        self._vert = {}
        for v in self.vertices:
            if v.id in self._vert:
                raise ComplexError("duplicate vertex id %r" % v.id)
            self._vert[v.id] = v
        self._h2v = {}
        for v in self.vertices:
            for i, h in enumerate(v.halfedges):
                if h in self._h2v:
                    raise ComplexError("half-edge %r in two vertices" % h)
                self._h2v[h] = (v.id, i)
        self._h2e = {}
        self._opp = {}
        for e, (h1, h2) in self.edges.items():
            if h1 == h2:
                raise ComplexError("edge %r pairs a half-edge with itself" % e)
            for h in (h1, h2):
                if h in self._h2e:
                    raise ComplexError("half-edge %r in two edges" % h)
                self._h2e[h] = e
            self._opp[h1] = h2
            self._opp[h2] = h1
        for h in self._h2v:
            if h not in self._h2e:
                raise ComplexError("dangling half-edge %r (no edge)" % h)
        for h in self._h2e:
            if h not in self._h2v:
                raise ComplexError("dangling half-edge %r (no vertex)" % h)

    # -- basic accessors -------------------------------------------------

    def vertex(self, vid: str) -> Vertex:
        return self._vert[vid]

    def opposite(self, h: str) -> str:
        return self._opp[h]

    def arc_of(self, h: str) -> str:
        return self._h2e[h]

    def halfedge_position(self, h: str) -> tuple:
        return self._h2v[h]

    def arc_ids(self) -> list:
        return sorted(self.edges)

    # -- corners and faces -------------------------------------------------

    def corners(self):
        for v in self.vertices:
            for i in range(v.valency):
                yield (v.id, i)

    def corner_halfedges(self, corner: Corner) -> tuple:
        v = self._vert[corner[0]]
        i = corner[1]
        return v.halfedges[i], v.halfedges[(i + 1) % v.valency]

    def corner_arcs(self, corner: Corner) -> tuple:
        a, b = self.corner_halfedges(corner)
        return self.arc_of(a), self.arc_of(b)

    def is_missing(self, corner: Corner) -> bool:
        return self._vert[corner[0]].missing_after == corner[1]

    def next_corner(self, corner: Corner) -> Corner:
        _, h = self.corner_halfedges(corner)
        vid, i = self._h2v[self._opp[h]]
        return (vid, i)

    def face_orbits(self) -> list:
        """All faces as cyclic corner lists, each starting at its smallest
        corner; reconstructed from vertices and edges alone."""
        seen = set()
        faces = []
        for corner in sorted(self.corners()):
            if corner in seen:
                continue
            orbit = [corner]
            seen.add(corner)
            nxt = self.next_corner(corner)
            while nxt != corner:
                orbit.append(nxt)
                seen.add(nxt)
                nxt = self.next_corner(nxt)
            faces.append(orbit)
        return faces

    def cell_face_map(self) -> dict:
        faces = self.face_orbits()
        by_corner = {}
        for f in faces:
            for x in f:
                by_corner[x] = f
        out = {}
        for cell in self.cells:
            anchor = (cell.anchor[0], cell.anchor[1])
            if anchor not in by_corner:
                raise ComplexError("cell %r anchors an unknown corner" % cell.id)
            out[cell.id] = by_corner[anchor]
        return out

    def orbifold_face_corners(self) -> set:
        out = set()
        for face in self.cell_face_map().values():
            out.update(face)
        return out

    # -- vertex types ------------------------------------------------------

    def vertex_type(self, vid: str) -> str:
        """Derived polygon kind: 'punct', 'plain', 'stop' or 'orb'.

        punct = annulus with a full boundary stop, plain = stopless disk,
        stop = disk with a boundary stop, orb = disk carrying an orbifold
        stop.
        """
        v = self._vert[vid]
        if v.full_stop:
            return "punct"
        if v.missing_after is None:
            return "plain"
        if (vid, v.missing_after) in self.orbifold_face_corners():
            return "orb"
        return "stop"

    def cell_vertex(self, cell_id: str) -> str:
        """The vertex carrying the orbifold stop of the given cell."""
        face = self.cell_face_map()[cell_id]
        missing = [x for x in face if self.is_missing(x)]
        if len(missing) != 1:
            raise ComplexError("cell %r has %d missing corners on its face"
                               % (cell_id, len(missing)))
        return missing[0][0]

    def euler_data(self) -> dict:
        """Topological invariants of the underlying orbifold surface."""
        faces = self.face_orbits()
        cell_faces = {tuple(f) for f in self.cell_face_map().values()}
        boundary_faces = [f for f in faces if tuple(f) not in cell_faces]
        n_punct = sum(1 for v in self.vertices if v.full_stop)
        chi = len(self.vertices) - len(self.edges) + len(self.cells)
        b = len(boundary_faces) + n_punct
        genus = (2 - b - chi) // 2
        return {
            "orbifold_points": len(self.cells),
            "boundary_components": b,
            "full_stops": n_punct,
            "boundary_stops": sum(
                1 for v in self.vertices
                if v.missing_after is not None
                and (v.id, v.missing_after) not in self.orbifold_face_corners()),
            "genus": genus,
        }

    # -- serialization -------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "vertices": [
                {
                    "id": v.id,
                    "halfedges": list(v.halfedges),
                    **({"full_stop": True} if v.full_stop else {}),
                    **({"missing_after": v.missing_after}
                       if v.missing_after is not None else {}),
                }
                for v in sorted(self.vertices, key=lambda v: v.id)
            ],
            "edges": [{"id": e, "ends": list(self.edges[e])}
                      for e in sorted(self.edges)],
            "orbifold_cells": [
                {"id": c.id,
                 "anchor": {"vertex": c.anchor[0], "after": c.anchor[1]}}
                for c in sorted(self.cells, key=lambda c: c.id)
            ],
            "degrees": [
                {"vertex": vid, "after": i, "deg": d}
                for (vid, i), d in sorted(self.corner_degrees.items())
            ],
            **({"extra_products": self.extra_products}
               if self.extra_products else {}),
        }


def parse(text) -> GradedRibbonComplex:
    """Parse a .grc JSON document (bytes or str).

    Only structural well-formedness is enforced here; degree and stop
    invariants are the job of validate().
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ComplexError("malformed JSON: %s" % exc) from exc
    if not data.get("vertices"):
        raise ComplexError("no vertices")
    vertices = []
    for v in data["vertices"]:
        vertices.append(Vertex(
            id=str(v["id"]),
            halfedges=tuple(str(h) for h in v["halfedges"]),
            full_stop=bool(v.get("full_stop", False)),
            missing_after=v.get("missing_after"),
        ))
    edges = {}
    for e in data.get("edges", []):
        eid = str(e["id"])
        if eid in edges:
            raise ComplexError("duplicate edge id %r" % eid)
        ends = e["ends"]
        if len(ends) != 2:
            raise ComplexError("edge %r must have two ends" % eid)
        edges[eid] = (str(ends[0]), str(ends[1]))
    cells = []
    seen = set()
    for cdat in data.get("orbifold_cells", []):
        cid = str(cdat["id"])
        if cid in seen:
            raise ComplexError("duplicate cell id %r" % cid)
        seen.add(cid)
        cells.append(OrbifoldCell(
            cid, (str(cdat["anchor"]["vertex"]), int(cdat["anchor"]["after"]))))
    degrees = {}
    for d in data.get("degrees", []):
        key = (str(d["vertex"]), int(d["after"]))
        if key in degrees:
            raise ComplexError("duplicate degree for corner %s" % (key,))
        degrees[key] = int(d["deg"])
    return GradedRibbonComplex(
        name=str(data.get("name", "")),
        vertices=vertices,
        edges=edges,
        cells=cells,
        corner_degrees=degrees,
        extra_products=data.get("extra_products", []),
    )


def load(path) -> GradedRibbonComplex:
    with open(path, "rb") as fh:
        return parse(fh.read())


@dataclass
class ValidationReport:
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations


def validate(c: GradedRibbonComplex) -> ValidationReport:
    """Check every invariant; violations are report entries, nothing raises."""
    bad = []
    for v in c.vertices:
        if v.valency == 0:
            bad.append("vertex %s has no half-edges" % v.id)
        if v.full_stop and v.missing_after is not None:
            bad.append("vertex %s is a full stop but has a missing corner" % v.id)
        if v.missing_after is not None and not (0 <= v.missing_after < max(v.valency, 1)):
            bad.append("vertex %s missing_after %d out of range"
                       % (v.id, v.missing_after))
    if bad:
        return ValidationReport(bad)

    try:
        cell_faces = c.cell_face_map()
    except ComplexError as exc:
        return ValidationReport([str(exc)])

    face_ids = {}
    for cid, face in sorted(cell_faces.items()):
        key = tuple(face)
        if key in face_ids:
            bad.append("cells %s and %s share a face" % (face_ids[key], cid))
        face_ids[key] = cid

    for cid, face in sorted(cell_faces.items()):
        missing = [x for x in face if c.is_missing(x)]
        if len(missing) != 1:
            bad.append("orbifold face of cell %s has %d missing corners (want 1)"
                       % (cid, len(missing)))
            continue
        vid = missing[0][0]
        if c.vertex(vid).full_stop:
            bad.append("orbifold stop of cell %s sits at full-stop vertex %s"
                       % (cid, vid))
        if c.vertex(vid).valency < 2:
            bad.append("orbifold-stop vertex %s of cell %s has valency < 2"
                       % (vid, cid))

    cell_face_keys = set(face_ids)
    for face in c.face_orbits():
        if tuple(face) in cell_face_keys:
            continue
        if face and not any(c.is_missing(x) for x in face):
            bad.append("boundary face through corner %s has no stop" % (face[0],))

    for corner in c.corners():
        if c.is_missing(corner):
            if corner in c.corner_degrees:
                bad.append("missing corner %s carries a degree" % (corner,))
        elif corner not in c.corner_degrees:
            bad.append("corner %s has no degree" % (corner,))
    if bad:
        return ValidationReport(bad)

    for v in c.vertices:
        if v.full_stop or v.missing_after is not None:
            continue
        total = sum(c.corner_degrees[(v.id, i)] for i in range(v.valency))
        if total != v.valency - 2:
            bad.append("vertex %s corner-degree sum %d != %d"
                       % (v.id, total, v.valency - 2))
    for cid, face in sorted(cell_faces.items()):
        vid = c.cell_vertex(cid)
        v = c.vertex(vid)
        at_vertex = sum(c.corner_degrees[(vid, i)] for i in range(v.valency)
                        if i != v.missing_after)
        on_face = sum(c.corner_degrees[x] for x in face if not c.is_missing(x))
        if at_vertex != on_face + v.valency - 3:
            bad.append("cell %s degree constraint: vertex sum %d != face sum %d + %d"
                       % (cid, at_vertex, on_face, v.valency - 3))
    return ValidationReport(bad)


@dataclass(frozen=True)
class ClassificationFlags:
    weakly_admissible: bool
    admissible: bool
    dg: bool
    formal: bool

    def to_json(self):
        return {"weakly_admissible": self.weakly_admissible,
                "admissible": self.admissible,
                "dg": self.dg,
                "formal": self.formal}


def classify(c: GradedRibbonComplex) -> ClassificationFlags:
    """Flags from vertex types and cell boundaries only.

    Admissibility asks every cell boundary for at least two vertices and
    a stop vertex, a full-stop vertex or three orbifold-stop vertices.
    DG means no stopless polygons and orbifold-stop valency at most 3;
    formal additionally makes every 2-gon side with a composite parallel
    path maximal for concatenation.
    """
    cell_faces = c.cell_face_map()
    types = {v.id: c.vertex_type(v.id) for v in c.vertices}

    admissible = True
    for cid, face in cell_faces.items():
        verts = sorted({x[0] for x in face})
        if len(face) < 2 or len(verts) < 2:
            admissible = False
            continue
        kinds = [types[w] for w in verts]
        if not ("stop" in kinds or "punct" in kinds
                or sum(1 for k in kinds if k == "orb") >= 3):
            admissible = False

    dg = all(t != "plain" for t in types.values())
    if dg:
        for cid in cell_faces:
            if c.vertex(c.cell_vertex(cid)).valency > 3:
                dg = False
                break

    formal = dg
    if formal:
        face_of = {}
        for face in c.face_orbits():
            for i, x in enumerate(face):
                face_of[x] = (face, i)
        for cid, face in cell_faces.items():
            vid = c.cell_vertex(cid)
            v = c.vertex(vid)
            if v.valency != 2:
                continue
            if sum(1 for x in face if not c.is_missing(x)) <= 1:
                continue
            side = (vid, 1 - v.missing_after)
            sface, i = face_of[side]
            n = len(sface)
            if not (c.is_missing(sface[(i - 1) % n])
                    and c.is_missing(sface[(i + 1) % n])):
                formal = False
    return ClassificationFlags(True, admissible, dg, formal)


# -- surgery ----------------------------------------------------------------


def _cyc(seq, start, length):
    n = len(seq)
    return tuple(seq[(start + k) % n] for k in range(length))


def _fresh_id(prefix, taken):
    k = 0
    while "%s%d" % (prefix, k) in taken:
        k += 1
    return "%s%d" % (prefix, k)


def contract_edge(c: GradedRibbonComplex, eid: str) -> GradedRibbonComplex:
    """Contract edge eid, merging its two distinct endpoints.

    At least one endpoint must be a stopless polygon; that one is merged
    into the other and the two corner pairs flanking the edge fuse with
    summed degrees.
    """
    if eid not in c.edges:
        raise ComplexError("unknown edge %r" % eid)
    h1, h2 = c.edges[eid]
    u_id = c.halfedge_position(h1)[0]
    w_id = c.halfedge_position(h2)[0]
    if u_id == w_id:
        raise ComplexError("edge %s is a loop" % eid)
    if c.vertex_type(u_id) != "plain":
        h1, h2 = h2, h1
        u_id, w_id = w_id, u_id
    if c.vertex_type(u_id) != "plain":
        raise ComplexError("neither endpoint of %s is a stopless polygon" % eid)

    u, w = c.vertex(u_id), c.vertex(w_id)
    iu = u.halfedges.index(h1)
    iw = w.halfedges.index(h2)
    nu, nw = u.valency, w.valency
    merged = _cyc(w.halfedges, iw + 1, nw - 1) + _cyc(u.halfedges, iu + 1, nu - 1)

    # merged corner k (after merged[k]) in terms of old corners:
    #   k in [0, nw-3]          -> w corner (iw+1+k)
    #   k = nw-2                -> fuse w corner (iw-1) with u corner (iu)
    #   k in [nw-1, nw+nu-4]    -> u corner (iu+1 + (k-(nw-1)))
    #   k = nw+nu-3             -> fuse u corner (iu-1) with w corner (iw)
    def wdeg(i):
        i %= nw
        return None if w.missing_after == i else c.corner_degrees[(w_id, i)]

    def udeg(i):
        return c.corner_degrees[(u_id, i % nu)]

    degs = {}
    missing_new = None
    total = nw + nu - 2
    for k in range(total):
        if k <= nw - 3:
            d = wdeg(iw + 1 + k)
        elif k == nw - 2:
            dw = wdeg(iw - 1)
            d = None if dw is None else dw + udeg(iu)
        elif k <= total - 2:
            d = udeg(iu + 1 + (k - (nw - 1)))
        else:
            dw = wdeg(iw)
            d = None if dw is None else dw + udeg(iu - 1)
        if d is None:
            missing_new = k
        else:
            degs[(w_id, k)] = d

    new_w = Vertex(w_id, merged, w.full_stop, missing_new)
    vertices = [new_w if v.id == w_id else v
                for v in c.vertices if v.id != u_id]
    edges = {e: hs for e, hs in c.edges.items() if e != eid}
    degrees = {k: v for k, v in c.corner_degrees.items()
               if k[0] not in (u_id, w_id)}
    degrees.update(degs)

    # re-anchor cells whose anchor corner was at u or w
    cell_faces = c.cell_face_map()
    cells = []
    for cell in c.cells:
        if cell.anchor[0] not in (u_id, w_id):
            cells.append(cell)
            continue
        face = cell_faces[cell.id]
        anchor = None
        for (fv, fi) in face:
            if fv not in (u_id, w_id):
                anchor = (fv, fi)
                break
        if anchor is None:
            # anchor via a surviving halfedge on the face
            for x in face:
                hh = c.corner_halfedges(x)[0]
                if hh in merged:
                    anchor = (w_id, merged.index(hh))
                    break
        if anchor is None:
            raise ComplexError("cannot re-anchor cell %s" % cell.id)
        cells.append(OrbifoldCell(cell.id, anchor))
    return GradedRibbonComplex(c.name, vertices, edges, cells, degrees)


def expand_vertex(c: GradedRibbonComplex, vid: str, split, new_degrees,
                  edge_id=None, vertex_id=None) -> GradedRibbonComplex:
    """Split vertex vid into (vid, fresh stopless vertex) joined by a new edge.

    split = (start, length): the cyclic interval halfedges[start : start+length]
    moves to the fresh vertex; it must be a proper nonempty part and the
    missing corner may not lie strictly inside it.

    new_degrees = (d_in, d_out): degrees of the two fresh corners at the
    new vertex, (new halfedge -> interval start) and (interval end -> new
    halfedge).  The two matching fresh corners at vid are forced by the
    cut corner degrees, making this inverse to contract_edge.
    """
    v = c.vertex(vid)
    start, length = split
    n = v.valency
    if not (0 < length < n):
        raise ComplexError("split interval must be a proper nonempty part")
    start %= n
    interval = _cyc(v.halfedges, start, length)
    inner = {(start + k) % n for k in range(length - 1)}
    if v.missing_after in inner:
        raise ComplexError(
            "split would move the stop of %s to a stopless vertex" % vid)
    d_in, d_out = new_degrees
    before = (start - 1) % n            # cut corner (h[start-1] -> h[start])
    after = (start + length - 1) % n    # cut corner (h[end] -> h[end+1])

    ne = edge_id or _fresh_id("e", set(c.edges))
    nv = vertex_id or _fresh_id("v", set(x.id for x in c.vertices))
    hA, hB = ne + ".a", ne + ".b"

    keep = _cyc(v.halfedges, start + length, n - length)
    new_v_h = (hA,) + keep
    new_w_h = (hB,) + interval

    def oldd(i):
        return None if v.missing_after == i else c.corner_degrees[(vid, i)]

    degrees = {k: val for k, val in c.corner_degrees.items() if k[0] != vid}
    missing_new = None
    nV = len(new_v_h)
    d_after = oldd(after)
    if d_after is None:
        missing_new = 0
    else:
        degrees[(vid, 0)] = d_after - d_out
    for k in range(1, nV - 1):
        d = oldd((start + length + k - 1) % n)
        if d is None:
            missing_new = k
        else:
            degrees[(vid, k)] = d
    d_before = oldd(before)
    if before == after and length == n - 1:
        pass  # single kept halfedge: the two cuts hit the same corner
    if d_before is None:
        missing_new = nV - 1
    else:
        degrees[(vid, nV - 1)] = d_before - d_in
    degrees[(nv, 0)] = d_in
    for k in range(1, length):
        degrees[(nv, k)] = oldd((start + k - 1) % n)
    degrees[(nv, length)] = d_out

    new_v = Vertex(vid, new_v_h, v.full_stop, missing_new)
    new_w = Vertex(nv, new_w_h)
    vertices = [new_v if x.id == vid else x for x in c.vertices] + [new_w]
    edges = dict(c.edges)
    edges[ne] = (hA, hB)

    cells = []
    for cell in c.cells:
        av, ai = cell.anchor
        if av != vid:
            cells.append(cell)
        elif ai in inner:
            k = ((ai - start) % n) + 1
            cells.append(OrbifoldCell(cell.id, (nv, k)))
        else:
            face = c.cell_face_map()[cell.id]
            anchor = None
            for (fv, fi) in face:
                if fv != vid or (fi in inner):
                    anchor = ((nv, ((fi - start) % n) + 1) if fv == vid
                              else (fv, fi))
                    break
            if anchor is None:
                # anchor at the surviving missing corner of vid
                anchor = (vid, missing_new)
            cells.append(OrbifoldCell(cell.id, anchor))
    out = GradedRibbonComplex(c.name, vertices, edges, cells, degrees)
    rep = validate(out)
    if not rep.ok:
        raise ComplexError("expansion violates constraints: %s"
                           % "; ".join(rep.violations))
    return out


def subdivide_edge(c: GradedRibbonComplex, eid: str) -> GradedRibbonComplex:
    """Replace edge eid by a two-edge path through a fresh 2-gon vertex.

    Both new corner degrees are 0, the unique constraint-satisfying
    choice.  Subdividing a loop removes the loop.
    """
    if eid not in c.edges:
        raise ComplexError("unknown edge %r" % eid)
    h1, h2 = c.edges[eid]
    nv = _fresh_id("v", set(x.id for x in c.vertices))
    e1 = _fresh_id("e", set(c.edges))
    e2 = _fresh_id("e", set(c.edges) | {e1})
    a, b = e1 + ".n", e2 + ".n"
    vertices = list(c.vertices) + [Vertex(nv, (a, b))]
    edges = dict(c.edges)
    del edges[eid]
    edges[e1] = (h1, a)
    edges[e2] = (b, h2)
    degrees = dict(c.corner_degrees)
    degrees[(nv, 0)] = 0
    degrees[(nv, 1)] = 0
    return GradedRibbonComplex(c.name, vertices, edges, list(c.cells), degrees)


# -- ribbon graph export -------------------------------------------------


@dataclass
class RibbonGraph:
    """Coloured ribbon graph with one crossed vertex per orbifold cell."""

    vertices: list  # (id, halfedges tuple, kind, sector)
    edges: dict

    def to_json(self):
        return {
            "vertices": [
                {"id": vid, "halfedges": list(hs), "kind": kind,
                 "sector": sector}
                for vid, hs, kind, sector in self.vertices
            ],
            "edges": [{"id": e, "ends": list(hs)}
                      for e, hs in sorted(self.edges.items())],
        }

    def vertex_by_id(self, vid):
        for row in self.vertices:
            if row[0] == vid:
                return row
        raise KeyError(vid)


def to_ribbon_graph(c: GradedRibbonComplex) -> RibbonGraph:
    """Contract each orbifold 2-cell to a single crossed vertex.

    The crossed vertex absorbs all polygons on the cell boundary; its
    cyclic order lists their remaining half-edges in the order of the
    cell's edge cycle.  Vertex sector labels: A_{n-1} for disks, A~_{n-1}
    for full-stop annuli, D_{m+1} for crossed vertices where m is the
    cell boundary length.
    """
    cell_faces = c.cell_face_map()
    absorbed = {}
    flank = {}  # cell id -> set of half-edges flanking its face corners
    for cid, face in cell_faces.items():
        hs = set()
        for corner in face:
            a, b = c.corner_halfedges(corner)
            hs.add(a)
            hs.add(b)
            absorbed[corner[0]] = cid
        flank[cid] = hs
    cell_edges = {c.arc_of(h) for hs in flank.values() for h in hs}

    out_vertices = []
    for v in sorted(c.vertices, key=lambda x: x.id):
        if v.id in absorbed:
            continue
        kind = c.vertex_type(v.id)
        n = v.valency
        sector = ("A~%d" % (n - 1)) if kind == "punct" else ("A%d" % (n - 1))
        out_vertices.append((v.id, v.halfedges, kind, sector))
    for cid, face in sorted(cell_faces.items()):
        merged = []
        for corner in face:
            vid, i = corner
            v = c.vertex(vid)
            n = v.valency
            j = i + 2
            while j - (i + 2) < n - 2:
                h = v.halfedges[j % n]
                if h in flank[cid]:
                    break
                merged.append(h)
                j += 1
        out_vertices.append(("x:" + cid, tuple(merged), "cross",
                             "D%d" % (len(face) + 1)))
    edges = {e: hs for e, hs in c.edges.items() if e not in cell_edges}
    return RibbonGraph(out_vertices, edges)
