"""Faces, path morphisms and disk sequences of a graded ribbon complex.

Morphisms between arcs are composable chains of non-missing corners
along a single face (boundary paths on boundary faces, orbifold paths on
cell faces), plus the identity of each arc.  Disk sequences are read off
from contracted subtrees of the ribbon graph and feed the higher
products of the attached category.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ribbon import ComplexError, GradedRibbonComplex

MAX_PATH_LEN = 64
MAX_SEQ = 4096


@dataclass(frozen=True)
class Face:
    id: str
    kind: str  # "boundary" | "orbifold"
    corners: tuple
    cell: str | None = None

    def missing_positions(self, c):
        return [i for i, x in enumerate(self.corners) if c.is_missing(x)]


def faces(c: GradedRibbonComplex) -> list:
    """All faces with kinds assigned from the orbifold anchors."""
    cell_faces = {tuple(f): cid for cid, f in c.cell_face_map().items()}
    out = []
    for k, orbit in enumerate(c.face_orbits()):
        cid = cell_faces.get(tuple(orbit))
        if cid is None:
            out.append(Face("f%d" % k, "boundary", tuple(orbit)))
        else:
            out.append(Face("x:" + cid, "orbifold", tuple(orbit), cid))
    return out


@dataclass(frozen=True)
class PathMorphism:
    """A basis morphism: a corner chain on one face, or an identity."""

    source: str
    target: str
    corners: tuple  # of Corner; empty for the identity
    degree: int
    kind: str  # "boundary" | "orbifold" | "identity"

    @property
    def is_identity(self) -> bool:
        return not self.corners

    @property
    def key(self) -> str:
        if self.is_identity:
            return "id:%s" % self.source
        return "|".join("%s.%d" % x for x in self.corners)

    def __str__(self):
        return self.key

    def to_json(self):
        if self.is_identity:
            return {"identity": self.source}
        return {"corners": [{"vertex": v, "after": i} for v, i in self.corners]}


def identity_path(arc: str) -> PathMorphism:
    return PathMorphism(arc, arc, (), 0, "identity")


def _chain_kind(c, chain):
    return "orbifold" if chain[0] in c.orbifold_face_corners() else "boundary"


def _chain_to_path(c: GradedRibbonComplex, chain, kind=None) -> PathMorphism:
    src = c.corner_arcs(chain[0])[0]
    tgt = c.corner_arcs(chain[-1])[1]
    deg = sum(c.corner_degrees[x] for x in chain)
    return PathMorphism(src, tgt, tuple(chain),
                        deg, kind or _chain_kind(c, chain))


def all_paths(c: GradedRibbonComplex, max_len: int = MAX_PATH_LEN) -> list:
    """Every non-identity path morphism, in a deterministic order.

    Paths are the contiguous subchains of the maximal runs between
    missing corners on each face.
    """
    out = []
    for face in faces(c):
        n = len(face.corners)
        missing = face.missing_positions(c)
        if not missing:
            raise ComplexError(
                "face %s has no stop; hom spaces would be infinite" % face.id)
        for a, b in zip(missing, missing[1:] + [missing[0] + n]):
            run = [face.corners[k % n] for k in range(a + 1, b)]
            if len(run) > max_len:
                raise ComplexError(
                    "path run longer than %d corners on face %s"
                    % (max_len, face.id))
            for i in range(len(run)):
                for j in range(i + 1, len(run) + 1):
                    out.append(_chain_to_path(c, run[i:j], face.kind))
    out.sort(key=lambda p: (p.source, p.target, len(p.corners), p.key))
    return out


def hom_basis(c: GradedRibbonComplex, src: str, tgt: str,
              max_len: int = MAX_PATH_LEN) -> list:
    """Basis of the hom space from arc src to arc tgt."""
    for a in (src, tgt):
        if a not in c.edges:
            raise ComplexError("unknown arc %r" % a)
    out = [p for p in all_paths(c, max_len)
           if p.source == src and p.target == tgt]
    if src == tgt:
        out.insert(0, identity_path(src))
    return out


def path_from_json(c: GradedRibbonComplex, data) -> PathMorphism:
    if "identity" in data:
        return identity_path(str(data["identity"]))
    chain = [(str(x["vertex"]), int(x["after"])) for x in data["corners"]]
    for x in chain:
        if c.is_missing(x):
            raise ComplexError("corner %s is missing" % (x,))
    for a, b in zip(chain, chain[1:]):
        if c.next_corner(a) != b:
            raise ComplexError("corners %s and %s are not consecutive" % (a, b))
    return _chain_to_path(c, chain)


def compose_paths(c: GradedRibbonComplex, second: PathMorphism,
                  first: PathMorphism):
    """Concatenation second*first, or None when not consecutive on a face."""
    if first.is_identity:
        return second
    if second.is_identity:
        return first
    if first.target != second.source:
        return None
    if c.next_corner(first.corners[-1]) != second.corners[0]:
        return None
    return _chain_to_path(c, first.corners + second.corners, first.kind)


def maximal_orbifold_path(c: GradedRibbonComplex, cell_id: str) -> PathMorphism:
    """The unique maximal orbifold path at the given orbifold point."""
    if cell_id not in {cell.id for cell in c.cells}:
        raise ComplexError("unknown orbifold cell %r" % cell_id)
    face = c.cell_face_map()[cell_id]
    n = len(face)
    miss = [i for i, x in enumerate(face) if c.is_missing(x)]
    if len(miss) != 1:
        raise ComplexError("cell %s face is malformed" % cell_id)
    run = [face[(miss[0] + 1 + k) % n] for k in range(n - 1)]
    if not run:
        raise ComplexError("cell %s has no orbifold paths" % cell_id)
    return _chain_to_path(c, run, "orbifold")


@dataclass(frozen=True)
class DiskSequence:
    """A smooth or orbifold polygon obtained by contracting a subtree.

    Smooth sequences are cyclic with sides p_1..p_n; orbifold sequences
    are linear with n arcs and n-1 sides and carry the bypass q from the
    first arc to the last, together with the complements q', q'' of the
    maximal orbifold path r = q'' q q' at their point.
    """

    kind: str  # "smooth" | "orbifold"
    arcs: tuple
    sides: tuple  # of PathMorphism
    cell: str | None = None
    bypass: PathMorphism | None = None
    q_pre: tuple = ()   # corner chain of q'
    q_post: tuple = ()  # corner chain of q''

    @property
    def length(self) -> int:
        return len(self.arcs)


def _merged_polygon(c, verts, tree_edges):
    """Boundary walk of the contracted subtree.

    Returns (remaining half-edges in walk order, corner chains between
    them); chains[k] is the run from half-edge k to half-edge k+1.  Tree
    half-edges are crossed by the usual face step, so each chain is a
    composable run on a single face.
    """
    tree_halfedges = set()
    for e in tree_edges:
        tree_halfedges.update(c.edges[e])
    start = None
    for vid in sorted(verts):
        for h in c.vertex(vid).halfedges:
            if h not in tree_halfedges:
                start = h
                break
        if start:
            break
    if start is None:
        return [], []
    hs, chains = [], []
    h = start
    guard = 0
    while True:
        guard += 1
        if guard > 100000:
            raise ComplexError("subtree walk does not close")
        hs.append(h)
        vid, i = c.halfedge_position(h)
        chain = []
        while True:
            v = c.vertex(vid)
            chain.append((vid, i))
            nxt = v.halfedges[(i + 1) % v.valency]
            if nxt in tree_halfedges:
                vid, i = c.halfedge_position(c.opposite(nxt))
            else:
                h = nxt
                break
        chains.append(chain)
        if h == start:
            break
    expected = sum(c.vertex(v).valency for v in verts) - 2 * len(tree_edges)
    if len(hs) != expected:
        raise ComplexError("contracted subtree is not a disk")
    return hs, chains


def _enumerate_subtrees(c, allowed, max_seq):
    """Connected subtrees on allowed vertices, as (vertex set, edge set).

    Single vertices count.  Subtrees spanned by a non-tree non-loop edge
    are discarded (contracting them would not give a disk); loops at
    subtree vertices are fine.
    """
    adj = {}
    for e in sorted(c.edges):
        h1, h2 = c.edges[e]
        a, b = c.halfedge_position(h1)[0], c.halfedge_position(h2)[0]
        if a == b:
            continue
        adj.setdefault(a, []).append((e, b))
        adj.setdefault(b, []).append((e, a))

    results = []
    seen = set()

    def grow(verts, edges):
        key = (frozenset(verts), frozenset(edges))
        if key in seen:
            return
        seen.add(key)
        results.append((set(verts), set(edges)))
        if len(results) > max_seq * 8:
            raise ComplexError("subtree enumeration exceeded the cap")
        for vid in sorted(verts):
            for e, other in adj.get(vid, []):
                if e in edges or other in verts or other not in allowed:
                    continue
                grow(verts | {other}, edges | {e})

    for vid in sorted(allowed):
        grow({vid}, set())

    out = []
    for verts, edges in results:
        ok = True
        for e in sorted(c.edges):
            if e in edges:
                continue
            h1, h2 = c.edges[e]
            a, b = c.halfedge_position(h1)[0], c.halfedge_position(h2)[0]
            if a in verts and b in verts and a != b:
                ok = False
                break
        if ok:
            out.append((verts, edges))
    return out


def disk_sequences(c: GradedRibbonComplex, max_seq: int = MAX_SEQ) -> list:
    """All smooth and orbifold disk sequences of the complex.

    Smooth sequences come from subtrees of stopless polygons, orbifold
    ones from subtrees with exactly one orbifold-stop polygon.  Sides are
    the concatenated corner chains around the contracted subtree.
    """
    types = {v.id: c.vertex_type(v.id) for v in c.vertices}
    plain = {vid for vid, t in types.items() if t == "plain"}
    orb = {vid for vid, t in types.items() if t == "orb"}
    cell_of_vertex = {c.cell_vertex(cell.id): cell.id for cell in c.cells}

    out = []
    for verts, edges in _enumerate_subtrees(c, plain, max_seq):
        hs, chains = _merged_polygon(c, verts, edges)
        if not hs:
            continue
        if any(c.is_missing(x) for chain in chains for x in chain):
            continue
        sides = [_chain_to_path(c, chain) for chain in chains]
        arcs = tuple(c.arc_of(h) for h in hs)
        k = min(range(len(hs)), key=lambda i: (arcs[i], hs[i]))
        out.append(DiskSequence("smooth",
                                arcs[k:] + arcs[:k],
                                tuple(sides[k:] + sides[:k])))

    for ov in sorted(orb):
        for verts, edges in _enumerate_subtrees(c, plain | {ov}, max_seq):
            if ov not in verts:
                continue
            seq = _orbifold_sequence(c, verts, edges, cell_of_vertex[ov])
            if seq is not None:
                out.append(seq)
    out.sort(key=lambda s: (s.kind, s.length, s.arcs,
                            tuple(p.key for p in s.sides)))
    return out


def _orbifold_sequence(c, verts, edges, cell_id):
    hs, chains = _merged_polygon(c, verts, edges)
    if not hs:
        return None
    miss = [(k, j) for k, chain in enumerate(chains)
            for j, x in enumerate(chain) if c.is_missing(x)]
    if len(miss) != 1:
        return None
    mk, mj = miss[0]
    stop_chain = chains[mk]
    # the stop side decomposes as q''-corners, the missing corner, then
    # q'-corners; all of them are angles on the cell face
    q_post = tuple(stop_chain[:mj])
    q_pre = tuple(stop_chain[mj + 1:])
    n = len(hs)
    sides = []
    for t in range(n - 1):
        chain = chains[(mk + 1 + t) % n]
        sides.append(_chain_to_path(c, chain))
    arcs = tuple(c.arc_of(hs[(mk + 1 + t) % n]) for t in range(n))

    cell_face = c.cell_face_map()[cell_id]
    if sum(1 for x in cell_face if not c.is_missing(x)) == 0:
        return None  # loop cell: no orbifold paths, no bypass
    r = maximal_orbifold_path(c, cell_id)
    nr = len(r.corners)
    if q_pre and r.corners[:len(q_pre)] != q_pre:
        raise ComplexError("bypass complement q' does not open the maximal path")
    if q_post and r.corners[nr - len(q_post):] != q_post:
        raise ComplexError("bypass complement q'' does not close the maximal path")
    q_chain = r.corners[len(q_pre):nr - len(q_post)]
    if not q_chain:
        return None
    bypass = _chain_to_path(c, list(q_chain), "orbifold")
    if bypass.source != arcs[0] or bypass.target != arcs[-1]:
        raise ComplexError("bypass endpoints disagree with the disk sequence")
    return DiskSequence("orbifold", arcs, tuple(sides), cell_id,
                        bypass, q_pre, q_post)
