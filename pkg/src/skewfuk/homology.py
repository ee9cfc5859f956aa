"""Cohomology of DG categories, quiver presentations, skew-gentle output
and the explicit formality certificate.

Everything is exact: kernels and images via the rational linear algebra
kernel, representatives chosen greedily against the deterministic basis
order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg
from .ainf import AInfCategory, AInfError, mu, vec_add_into
from .linalg import BasedSpace, SparseMap, vec_scale
from .paths import compose_paths
from .ribbon import classify


class HomologyError(ValueError):
    pass


@dataclass
class CohomologyCategory:
    """A graded category: objects, class bases, associative products."""

    objects: tuple
    basis: dict        # class key -> (source, target, degree, is_identity)
    hom_order: dict    # (src, tgt) -> list of class keys
    reps: dict         # class key -> combination in the DG basis
    structure: dict    # (b_key, a_key) -> combination of class keys

    def hom_keys(self, src, tgt):
        return self.hom_order.get((src, tgt), [])

    def id_key(self, obj):
        return "id:%s" % obj

    def degree(self, key):
        return self.basis[key][2]

    def dims(self):
        out = {}
        for (s, t), keys in sorted(self.hom_order.items()):
            by_deg = {}
            for k in keys:
                by_deg[self.degree(k)] = by_deg.get(self.degree(k), 0) + 1
            out[(s, t)] = by_deg
        return out

    def compose(self, b_key, a_key) -> dict:
        return dict(self.structure.get((b_key, a_key), {}))

    def compose_combo(self, b_combo, a_combo) -> dict:
        out = {}
        for bk, bc in b_combo.items():
            for ak, ac in a_combo.items():
                vec_add_into(out, vec_scale(bc * ac, self.compose(bk, ak)))
        return out

    def to_json(self):
        return {
            "objects": list(self.objects),
            "homs": [
                {"source": s, "target": t,
                 "classes": [{"key": k, "degree": self.degree(k)}
                             for k in keys]}
                for (s, t), keys in sorted(self.hom_order.items())
            ],
            "products": [
                {"left": b, "right": a,
                 "value": {k: str(v) for k, v in sorted(combo.items())}}
                for (b, a), combo in sorted(self.structure.items()) if combo
            ],
        }


def _differential(cat, keys) -> SparseMap:
    space = BasedSpace(tuple(keys), {k: cat.basis[k].degree for k in keys})
    entries = {}
    for k in keys:
        for out, coeff in mu(cat, (k,)).items():
            entries[(out, k)] = coeff
    return SparseMap(space, space, entries)


def cohomology(cat: AInfCategory) -> CohomologyCategory:
    """Cohomology category of a DG category.

    Per hom space: kernel of mu_1 modulo its image, with deterministic
    greedy representatives.  Products are induced by mu_2 through the
    unshifted composition b.a = (-1)^{|a|} s^{-1} mu_2(s b (x) s a) and
    reduced modulo coboundaries.
    """
    if not cat.is_dg():
        raise HomologyError("cohomology needs a DG category (mu_n = 0, n >= 3)")
    basis = {}
    hom_order = {}
    reps = {}
    reducers = {}  # (s,t) -> (pivots, reduced boundary rows)
    for (s, t), keys in sorted(cat.hom_order.items()):
        d = _differential(cat, keys)
        cocycles = linalg.kernel_basis(d)
        boundaries = linalg.image_basis(d)
        piv_b, red_b = linalg._eliminate(boundaries, list(keys))
        reducers[(s, t)] = (piv_b, red_b)
        chosen = []
        chosen_red = []
        for vec in cocycles:
            r = linalg.reduce_mod(vec, red_b, piv_b)
            r2 = linalg.reduce_mod(r, chosen_red, [p for p, _ in chosen])
            if not r2:
                continue
            lead = next(k for k in keys if k in r2)
            inv = Fraction(1) / r2[lead]
            r2 = vec_scale(inv, r2)
            chosen.append((lead, vec_scale(inv, r)))
            chosen_red.append(r2)
            key = lead if cat.basis[lead].is_identity else "[%s]" % lead
            deg = cat.basis[lead].degree
            basis[key] = (s, t, deg, cat.basis[lead].is_identity)
            hom_order.setdefault((s, t), []).append(key)
            reps[key] = vec_scale(inv, r)

    structure = {}
    class_by_pair = {}
    for key, (s, t, _, _) in basis.items():
        class_by_pair.setdefault((s, t), []).append(key)

    def reduce_to_classes(combo, s, t):
        piv_b, red_b = reducers[(s, t)]
        r = linalg.reduce_mod(combo, red_b, piv_b)
        keys = cat.hom_keys(s, t)
        ambient = BasedSpace(tuple(keys), {k: 0 for k in keys})
        classes = hom_order.get((s, t), [])
        basis_vecs = [linalg.reduce_mod(reps[k], red_b, piv_b)
                      for k in classes]
        coords = linalg.coordinates(r, basis_vecs, ambient)
        if coords is None:
            raise HomologyError("product of cocycles is not a cocycle class")
        return {classes[i]: coords[i] for i in range(len(classes))
                if coords[i]}

    for bk, (s1, t1, bdeg, _) in sorted(basis.items()):
        for ak, (s0, t0, adeg, _) in sorted(basis.items()):
            if t0 != s1:
                continue
            total = {}
            for xk, xc in reps[bk].items():
                for yk, yc in reps[ak].items():
                    val = mu(cat, (xk, yk))
                    sign = Fraction(-1) ** (cat.basis[yk].degree % 2)
                    vec_add_into(total, vec_scale(sign * xc * yc, val))
            combo = reduce_to_classes(total, s0, t1) if total else {}
            if combo:
                structure[(bk, ak)] = combo

    H = CohomologyCategory(cat.objects, basis, hom_order, reps, structure)
    _check_associative(H)
    return H


def _check_associative(H: CohomologyCategory):
    keys = sorted(H.basis)
    for ck in keys:
        for bk in keys:
            if H.basis[bk][1] != H.basis[ck][0]:
                continue
            for ak in keys:
                if H.basis[ak][1] != H.basis[bk][0]:
                    continue
                left = H.compose_combo(H.compose(ck, bk), {ak: Fraction(1)})
                right = H.compose_combo({ck: Fraction(1)}, H.compose(bk, ak))
                if left != right:
                    raise HomologyError(
                        "cohomology product not associative at (%s, %s, %s)"
                        % (ck, bk, ak))


@dataclass
class QuiverPresentation:
    vertices: list
    arrows: list          # (name, source, target, degree)
    relations: list       # combinations {arrow path tuple: Fraction}
    special: dict = field(default_factory=dict)  # vertex -> loop name

    def arrow_names(self):
        return [a[0] for a in self.arrows]

    def to_json(self):
        return {
            "vertices": list(self.vertices),
            "arrows": [{"name": n, "source": s, "target": t, "degree": d}
                       for n, s, t, d in self.arrows],
            "relations": [
                {" * ".join(path): str(coeff)
                 for path, coeff in sorted(rel.items())}
                for rel in self.relations
            ],
            "special": dict(sorted(self.special.items())),
        }


def quiver_presentation(H: CohomologyCategory, max_rel_len: int = 4
                        ) -> QuiverPresentation:
    """Arrows and minimal relations of the graded category H.

    Arrows are class representatives of rad/rad^2, relations the kernel
    of the path evaluation computed length by length up to max_rel_len,
    minimal over the ideal generated by shorter relations.
    """
    rad = [k for k in sorted(H.basis) if not H.basis[k][3]]
    for k in rad:
        if H.basis[k][0] == H.basis[k][1] and H.compose(k, k).get(k):
            raise HomologyError("radical candidate %s is not nilpotent" % k)
    rad_sq = {}
    for bk in rad:
        for ak in rad:
            if H.basis[ak][1] != H.basis[bk][0]:
                continue
            combo = H.compose(bk, ak)
            if combo:
                s, t = H.basis[ak][0], H.basis[bk][1]
                rad_sq.setdefault((s, t), []).append(combo)

    arrows = []
    for (s, t) in sorted({(H.basis[k][0], H.basis[k][1]) for k in rad}):
        keys = [k for k in H.hom_keys(s, t) if k in rad]
        ambient = BasedSpace(tuple(keys), {k: 0 for k in keys})
        sub = rad_sq.get((s, t), [])
        for rep in linalg.quotient_reps(sub, ambient):
            (name,) = rep
            arrows.append((name, s, t, H.degree(name)))
    arrows.sort()

    arrow_info = {n: (s, t, d) for n, s, t, d in arrows}

    def paths_of_len(ln):
        # a path tuple (a_1, ..., a_k) is applied left to right
        if ln == 1:
            return [((n,), arrow_info[n][0], arrow_info[n][1]) for n in
                    sorted(arrow_info)]
        out = []
        for sub, s, t in paths_of_len(ln - 1):
            for n in sorted(arrow_info):
                if arrow_info[n][0] == t:
                    out.append((sub + (n,), s, arrow_info[n][1]))
        return out

    def eval_path(path):
        # path = (a_1, ..., a_k) applied left to right
        combo = {path[0]: Fraction(1)}
        for n in path[1:]:
            combo = H.compose_combo({n: Fraction(1)}, combo)
            if not combo:
                return {}
        return combo

    relations = []
    lower = {}  # length -> list of relation vectors over path tuples
    for ln in range(2, max_rel_len + 1):
        paths = paths_of_len(ln)
        by_block = {}
        for path, s, t in paths:
            deg = sum(arrow_info[n][2] for n in path)
            by_block.setdefault((s, t, deg), []).append(path)
        for block_key in sorted(by_block):
            block = sorted(by_block[block_key])
            targets = sorted({k for p in block for k in eval_path(p)})
            dom = BasedSpace(tuple(block), {p: 0 for p in block})
            cod = BasedSpace(tuple(targets), {k: 0 for k in targets})
            entries = {}
            for p in block:
                for k, v in eval_path(p).items():
                    entries[(k, p)] = v
            kern = linalg.kernel_basis(SparseMap(dom, cod, entries))
            # subtract the part generated by shorter relations
            ideal = []
            for m, gens in lower.items():
                pad = ln - m
                for gen in gens:
                    gsrc, gtgt = _rel_endpoints(gen, arrow_info)
                    for pre_len in range(pad + 1):
                        post_len = pad - pre_len
                        pres = (paths_of_len(pre_len) if pre_len
                                else [((), None, gsrc)])
                        posts = (paths_of_len(post_len) if post_len
                                 else [((), gtgt, None)])
                        for pre, _, pt in pres:
                            if pre and pt != gsrc:
                                continue
                            for post, qs, _ in posts:
                                if post and qs != gtgt:
                                    continue
                                vec = {pre + path + post: coeff
                                       for path, coeff in gen.items()}
                                if all(p in dom.basis for p in vec):
                                    ideal.append(vec)
            piv_i, red_i = linalg._eliminate(ideal, list(dom.basis))
            new_red = list(red_i)
            new_piv = list(piv_i)
            for vec in kern:
                r = linalg.reduce_mod(vec, new_red, new_piv)
                if not r:
                    continue
                lead = next(p for p in dom.basis if p in r)
                r = vec_scale(Fraction(1) / r[lead], r)
                new_piv.append(lead)
                new_red.append(r)
                relations.append(r)
                lower.setdefault(ln, []).append(r)
    return QuiverPresentation(sorted(H.objects), arrows, relations)


def _rel_endpoints(rel, arrow_info):
    path = next(iter(rel))
    return arrow_info[path[0]][0], arrow_info[path[-1]][1]


# -- skew-gentle output ----------------------------------------------------


def skew_gentle(c, cat=None) -> tuple:
    """Skew-gentle presentation of a formal dissection with 2-gon cells.

    Requires every orbifold cell to have boundary length 2 with an
    orbifold-stop polygon of valency 2 whose side has degree 0.  Returns
    (skew form with special loops, idempotent-split form); the split
    form is the presentation of the cohomology category.
    """
    from .ainf import build
    flags = classify(c)
    if not flags.formal:
        raise HomologyError("complex %s is not a formal dissection" % c.name)
    cell_faces = c.cell_face_map()
    merge = {a: a for a in c.arc_ids()}

    def find(a):
        while merge[a] != a:
            a = merge[a]
        return a

    sides = {}
    angle_corners = set()
    for cid, face in sorted(cell_faces.items()):
        if len(face) != 2:
            raise HomologyError(
                "cell %s has boundary length %d, need 2" % (cid, len(face)))
        vid = c.cell_vertex(cid)
        v = c.vertex(vid)
        if v.valency != 2:
            raise HomologyError(
                "cell %s has orbifold-stop valency %d, need 2"
                % (cid, v.valency))
        side = (vid, 1 - v.missing_after)
        if c.corner_degrees[side] != 0:
            raise HomologyError(
                "cell %s side has degree %d; the special loop would not "
                "have degree 0" % (cid, c.corner_degrees[side]))
        a, b = c.corner_arcs(side)
        merge[find(a)] = find(b)
        sides[cid] = (side, a, b)
        angle_corners.update(face)

    def vname(a):
        members = sorted(x for x in c.arc_ids() if find(x) == find(a))
        return "+".join(members)

    vertices = sorted({vname(a) for a in c.arc_ids()})
    arrows = []
    special = {}
    side_corners = {s for (s, _, _) in sides.values()}
    for corner in sorted(c.corners()):
        if c.is_missing(corner) or corner in angle_corners \
                or corner in side_corners:
            continue
        a, b = c.corner_arcs(corner)
        arrows.append(("%s.%d" % corner, vname(a), vname(b),
                       c.corner_degrees[corner]))
    for cid, (side, a, b) in sorted(sides.items()):
        name = "eps:%s" % cid
        arrows.append((name, vname(a), vname(a), 0))
        special[vname(a)] = name
    arrows.sort()

    relations = []
    for name in sorted(special.values()):
        relations.append({(name, name): Fraction(1), (name,): Fraction(-1)})
    plain = [(n, s, t) for n, s, t, _ in arrows if not n.startswith("eps:")]
    corner_of = {n: tuple(n.rsplit(".", 1)) for n, _, _ in plain}
    for n1, s1, t1 in plain:
        p1 = _corner_path(c, n1)
        for n2, s2, t2 in plain:
            if t1 != s2:
                continue
            p2 = _corner_path(c, n2)
            if compose_paths(c, p2, p1) is None:
                relations.append({(n1, n2): Fraction(1)})

    skew = QuiverPresentation(vertices, arrows, relations, special)
    the_cat = cat if cat is not None else build(c)
    split = quiver_presentation(cohomology(the_cat))
    return skew, split


def _corner_path(c, name):
    vid, i = name.rsplit(".", 1)
    from .paths import _chain_to_path
    return _chain_to_path(c, [(vid, int(i))])


# -- formality certificate ---------------------------------------------------


def _proof_cohomology_basis(c, cat):
    """H-basis and the F_2 table from the explicit quasi-equivalence.

    Excludes every 2-gon side and bypass; F_2 sends each proper
    factorization of a composite bypass to minus the side.
    """
    from .paths import disk_sequences
    excluded = {}
    f2 = {}
    for seq in disk_sequences(c):
        if seq.kind != "orbifold" or seq.length != 2:
            continue
        side = seq.sides[0]
        q = seq.bypass
        excluded[side.key] = q.key
        chain = q.corners
        for i in range(1, len(chain)):
            from .paths import _chain_to_path
            b1 = _chain_to_path(c, list(chain[:i]))
            b2 = _chain_to_path(c, list(chain[i:]))
            f2[(b2.key, b1.key)] = {side.key: Fraction(-1)}
    h_keys = [k for k in sorted(cat.basis)
              if k not in excluded and k not in set(excluded.values())]
    return h_keys, set(excluded), set(excluded.values()), f2


def _h_mu2(cat, exact, b_key, a_key):
    """mu_2 of the proof cohomology: the DG value with exact classes dropped."""
    val = mu(cat, (b_key, a_key))
    return {k: v for k, v in val.items() if k not in exact}


@dataclass
class FormalityReport:
    ok: bool
    checked: int
    failures: list

    def __str__(self):
        if self.ok:
            return "formality certified on %d tuples" % self.checked
        return "functor equation fails at %s" % (self.failures[0][0],)


def formality_witness_check(cat: AInfCategory, c, max_len=None,
                            use_f2=True) -> FormalityReport:
    """Verify the explicit functor (F_1, F_2) from cohomology to the
    category on every composable tuple.

    Requires a formal classification.  With use_f2=False the check runs
    with F_2 = 0, which is the diagnostic used for non-formal DG inputs.
    """
    flags = classify(c)
    if use_f2 and not flags.formal:
        raise HomologyError(
            "complex %s is not classified formal; "
            "formality_witness_check does not apply" % c.name)
    if not cat.is_dg():
        raise HomologyError("the witness construction needs a DG category")
    h_keys, killed, exact, f2 = _proof_cohomology_basis(c, cat)
    if not use_f2:
        f2 = {}
    if max_len is None:
        max_len = max(3, 2 * cat.max_arity - 1)

    hset = set(h_keys)

    def F1(key):
        return {key: Fraction(1)}

    def F2(b_key, a_key):
        if cat.basis[b_key].is_identity or cat.basis[a_key].is_identity:
            return {}
        return dict(f2.get((b_key, a_key), {}))

    def h_mu(keys):
        # trivial differential; binary products reduced; nothing higher
        n = len(keys)
        ids = [cat.basis[k].is_identity for k in keys]
        if n == 1:
            return {}
        if n == 2:
            b, a = keys
            if ids[1]:
                return {b: Fraction(1)}
            if ids[0]:
                return {a: Fraction(-1) ** (cat.basis[a].degree % 2)}
            return _h_mu2(cat, exact, b, a)
        return {}

    failures = []
    checked = 0
    for tup in _h_tuples(cat, hset, max_len):
        n = len(tup)
        checked += 1
        lhs = {}
        for j in range(1, n + 1):
            for i in range(0, n - j + 1):
                if n - j + 1 > 2:
                    continue
                inner = h_mu(tup[n - i - j:n - i])
                if not inner:
                    continue
                sign = (-1) ** (sum(cat.shifted_degree(k)
                                    for k in tup[n - i:]) % 2)
                for okey, coeff in inner.items():
                    rest = tup[:n - i - j] + (okey,) + tup[n - i:]
                    if len(rest) == 1:
                        vec_add_into(lhs, vec_scale(sign * coeff, F1(rest[0])))
                    elif len(rest) == 2:
                        vec_add_into(lhs, vec_scale(sign * coeff,
                                                    F2(rest[0], rest[1])))
        rhs = {}
        for blocks in _compositions(n):
            # blocks split tup from the right into pieces of size 1 or 2
            pieces = []
            pos = n
            ok = True
            for size in blocks:
                piece = tup[pos - size:pos]
                pos -= size
                if size == 1:
                    pieces.append(F1(piece[0]))
                else:
                    val = F2(piece[0], piece[1])
                    if not val:
                        ok = False
                        break
                    pieces.append(val)
            if not ok:
                continue
            # pieces[0] acts first; mu takes them left to right reversed
            combos = list(reversed(pieces))
            vec_add_into(rhs, _mu_multilinear(cat, combos))
        diff = dict(lhs)
        vec_add_into(diff, vec_scale(Fraction(-1), rhs))
        if diff:
            failures.append((tup, diff))
    return FormalityReport(not failures, checked, failures)


def _h_tuples(cat, hset, max_len):
    by_source = {}
    for k in sorted(hset):
        by_source.setdefault(cat.basis[k].source, []).append(k)
    level = [(k,) for k in sorted(hset)]
    yield from level
    for _ in range(max_len - 1):
        nxt = []
        for tup in level:
            tgt = cat.basis[tup[0]].target
            for k in by_source.get(tgt, []):
                nxt.append((k,) + tup)
        yield from nxt
        level = nxt


def _compositions(n):
    """Ordered compositions of n into parts 1 and 2, rightmost part first."""
    if n == 0:
        return [()]
    out = []
    for first in (1, 2):
        if first > n:
            continue
        for rest in _compositions(n - first):
            out.append((first,) + rest)
    return out


def _mu_multilinear(cat, combos) -> dict:
    """mu_r on a tuple of combinations (left to right)."""
    out = {}

    def rec(prefix, coeff, remaining):
        if not remaining:
            tup = tuple(prefix)
            if cat.composable(tup):
                vec_add_into(out, vec_scale(coeff, mu(cat, tup)))
            return
        head, *tail = remaining
        for k, v in head.items():
            rec(prefix + [k], coeff * v, tail)

    rec([], Fraction(1), combos)
    return out
