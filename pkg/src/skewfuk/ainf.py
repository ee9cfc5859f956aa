"""The explicit A-infinity category attached to a dissection.

Everything lives in the shifted sign convention: the operations mu_n
have degree +1 on shifted hom spaces, the relations read mu*mu = 0 with
Koszul signs (-1)^{|s a_i .. s a_1|} counting the inputs consumed before
an inner operation, and strict units satisfy

    mu_2(s a (x) s 1) = s a,      mu_2(s 1 (x) s a) = (-1)^{|a|} s a,

the sign forced by mu*mu = 0 together with the composition rule
mu_2(s b (x) s a) = (-1)^{|a|} s(ba).

Product tables are sparse: a table maps an input tuple of basis keys
(written left to right, so the rightmost entry is composed first) to a
rational combination of output keys.  Unit products are never stored;
they are computed by the rule above.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import paths as pathmod
from .linalg import vec_add, vec_scale
from .paths import (PathMorphism, all_paths, compose_paths, disk_sequences,
                    identity_path)
from .ribbon import ComplexError, classify


class AInfError(ValueError):
    pass


@dataclass(frozen=True)
class BasisElement:
    key: str
    source: str
    target: str
    degree: int
    is_identity: bool = False


@dataclass
class AInfCategory:
    objects: tuple
    basis: dict  # key -> BasisElement
    hom_order: dict  # (src, tgt) -> list of keys
    products: dict  # arity -> {input key tuple -> {out key -> Fraction}}
    max_arity: int = 2
    complex: object = None
    path_by_key: dict = field(default_factory=dict)

    def hom_keys(self, src, tgt):
        return self.hom_order.get((src, tgt), [])

    def elem(self, key) -> BasisElement:
        return self.basis[key]

    def id_key(self, obj) -> str:
        return "id:%s" % obj

    def shifted_degree(self, key) -> int:
        return self.basis[key].degree - 1

    def is_dg(self) -> bool:
        return all(n <= 2 for n in self.products if self.products[n])

    def composable(self, keys) -> bool:
        """keys are in mu order (left to right); rightmost acts first."""
        seq = list(reversed(keys))
        for a, b in zip(seq, seq[1:]):
            if self.basis[a].target != self.basis[b].source:
                return False
        return True

    def table_insert(self, n, keys, combo):
        tbl = self.products.setdefault(n, {})
        cur = tbl.get(tuple(keys), {})
        new = vec_add(cur, combo)
        if new:
            tbl[tuple(keys)] = new
        else:
            tbl.pop(tuple(keys), None)
        self.max_arity = max(self.max_arity, n)

    def to_json(self):
        prods = []
        for n in sorted(self.products):
            for keys, combo in sorted(self.products[n].items()):
                for out, coeff in sorted(combo.items()):
                    prods.append({
                        "arity": n,
                        "inputs": [self._key_json(k) for k in keys],
                        "output": {"coeff": str(coeff),
                                   "path": self._key_json(out)},
                    })
        return {
            "objects": list(self.objects),
            "homs": [
                {"source": s, "target": t,
                 "basis": [{"key": k, "degree": self.basis[k].degree}
                           for k in keys]}
                for (s, t), keys in sorted(self.hom_order.items())
            ],
            "products": prods,
            "max_arity": self.max_arity,
        }

    def _key_json(self, key):
        p = self.path_by_key.get(key)
        if p is not None:
            return p.to_json()
        return {"key": key}


def category_from_paths(c, max_len=pathmod.MAX_PATH_LEN) -> AInfCategory:
    """The hom data of a complex, with no products yet."""
    objects = tuple(c.arc_ids())
    basis = {}
    hom_order = {}
    path_by_key = {}
    for obj in objects:
        p = identity_path(obj)
        basis[p.key] = BasisElement(p.key, obj, obj, 0, True)
        hom_order.setdefault((obj, obj), []).append(p.key)
        path_by_key[p.key] = p
    for p in all_paths(c, max_len):
        basis[p.key] = BasisElement(p.key, p.source, p.target, p.degree)
        hom_order.setdefault((p.source, p.target), []).append(p.key)
        path_by_key[p.key] = p
    return AInfCategory(objects, basis, hom_order, {}, 2, c, path_by_key)


def build(c, extras=None, max_seq=pathmod.MAX_SEQ,
          max_len=pathmod.MAX_PATH_LEN) -> AInfCategory:
    """Build the A-infinity category of a weakly admissible complex.

    Admissible complexes get the composition products plus the smooth and
    orbifold disk-sequence products.  Non-admissible DG complexes get the
    extra products of the three local configurations.  Other weakly
    admissible complexes are accepted only when extra products are
    supplied (in the file or the extras argument).
    """
    flags = classify(c)
    cat = category_from_paths(c, max_len)
    _add_compositions(cat, c)

    file_extras = list(c.extra_products or [])
    if extras:
        file_extras.extend(extras)

    if flags.admissible or flags.dg:
        seqs = disk_sequences(c, max_seq)
        for seq in seqs:
            if seq.kind == "smooth":
                _add_smooth_entries(cat, c, seq)
            else:
                _add_orbifold_entries(cat, seq)
        if flags.dg and not flags.admissible:
            _add_nonadmissible_dg_entries(cat, c)
    elif not file_extras:
        raise AInfError(
            "complex %s is neither admissible nor DG and no extra products "
            "were supplied" % c.name)
    else:
        for seq in disk_sequences(c, max_seq):
            if seq.kind == "smooth":
                _add_smooth_entries(cat, c, seq)
            else:
                _add_orbifold_entries(cat, seq)

    if file_extras:
        attach_extra_products(cat, _parse_extras(c, file_extras))
    return cat


def _add_compositions(cat, c):
    """All concatenation products mu_2(s q (x) s p) = (-1)^{|p|} s qp."""
    by_source = {}
    for key, el in cat.basis.items():
        if not el.is_identity:
            by_source.setdefault(el.source, []).append(key)
    for key, el in sorted(cat.basis.items()):
        if el.is_identity:
            continue
        p = cat.path_by_key[key]
        for key2 in sorted(by_source.get(el.target, [])):
            q = cat.path_by_key[key2]
            qp = compose_paths(c, q, p)
            if qp is None:
                continue
            if qp.key not in cat.basis:
                raise AInfError("composite path %s missing from basis" % qp.key)
            cat.table_insert(2, (key2, key),
                             {qp.key: Fraction(-1) ** (p.degree % 2)})


def _add_smooth_entries(cat, c, seq):
    """Rotations and one-sided extensions of a smooth disk sequence."""
    sides = list(seq.sides)
    n = len(sides)
    by_target = {}
    by_source = {}
    for key, el in cat.basis.items():
        if el.is_identity:
            continue
        by_target.setdefault(el.target, []).append(key)
        by_source.setdefault(el.source, []).append(key)
    for i in range(n):
        # tuple (p_i, ..., p_1, p_n, ..., p_{i+1}); output id at arcs[i]
        rot = [sides[(i - k) % n] for k in range(n)]
        keys = tuple(p.key for p in rot)
        obj = seq.arcs[i]
        cat.table_insert(n, keys, {cat.id_key(obj): Fraction(1)})
        first = rot[-1]   # p_{i+1}, composed first
        last = rot[0]     # p_i, composed last
        for wkey in sorted(by_target.get(first.source, [])):
            w = cat.path_by_key[wkey]
            ext = compose_paths(c, first, w)
            if ext is None:
                continue
            cat.table_insert(n, keys[:-1] + (ext.key,),
                             {wkey: Fraction(-1) ** (w.degree % 2)})
        for wkey in sorted(by_source.get(last.target, [])):
            w = cat.path_by_key[wkey]
            ext = compose_paths(c, w, last)
            if ext is None:
                continue
            cat.table_insert(n, (ext.key,) + keys[1:], {wkey: Fraction(1)})


def _add_orbifold_entries(cat, seq):
    """mu_{n-1}(s p_{n-1} (x) ... (x) s p_1) = (-1)^{|q''|} s q."""
    keys = tuple(p.key for p in reversed(seq.sides))
    sign = Fraction(-1) ** (sum(cat.complex.corner_degrees[x]
                                for x in seq.q_post) % 2)
    cat.table_insert(len(seq.sides), keys, {seq.bypass.key: sign})


def _nonadmissible_cells(c):
    out = []
    cell_faces = c.cell_face_map()
    types = {v.id: c.vertex_type(v.id) for v in c.vertices}
    for cid, face in sorted(cell_faces.items()):
        verts = sorted({x[0] for x in face})
        if len(face) >= 2 and len(verts) >= 2:
            kinds = [types[w] for w in verts]
            if ("stop" in kinds or "punct" in kinds
                    or sum(1 for k in kinds if k == "orb") >= 3):
                continue
        out.append((cid, face))
    return out


def _add_nonadmissible_dg_entries(cat, c):
    """Extra differentials and products for non-admissible DG complexes.

    Loop cells contribute 2-gon style products for the pair of corners
    flanking the loop arc.  Bigon cells flanked by two orbifold-stop
    polygons contribute the entries forced by associativity, solved from
    the defects of the partial table; anything unresolved is an error.
    """
    for cid, face in _nonadmissible_cells(c):
        if len(face) == 1:
            _add_loop_cell_entries(cat, c, cid)
    _close_by_associativity(cat, c)


def _add_loop_cell_entries(cat, c, cid):
    vid = c.cell_vertex(cid)
    v = c.vertex(vid)
    if v.valency != 3:
        raise AInfError(
            "loop cell %s has an orbifold-stop polygon of valency %d; "
            "cannot resolve its extra products" % (cid, v.valency))
    m = v.missing_after
    q1 = (vid, (m - 1) % 3)
    q2 = (vid, (m + 1) % 3)
    p1 = pathmod._chain_to_path(c, [q1])
    p2 = pathmod._chain_to_path(c, [q2])
    loop_arc = p1.target
    if p2.source != loop_arc:
        raise AInfError("loop cell %s has inconsistent flanking corners" % cid)
    cat.table_insert(2, (p2.key, p1.key), {cat.id_key(loop_arc): Fraction(1)})
    for wkey, el in sorted(cat.basis.items()):
        if el.is_identity:
            continue
        w = cat.path_by_key[wkey]
        ext = compose_paths(c, p1, w)
        if ext is not None:
            cat.table_insert(2, (p2.key, ext.key),
                             {wkey: Fraction(-1) ** (w.degree % 2)})
        ext = compose_paths(c, w, p2)
        if ext is not None:
            cat.table_insert(2, (ext.key, p1.key), {wkey: Fraction(1)})


def _close_by_associativity(cat, c, rounds=8):
    """Solve for missing low-arity entries from the A-infinity defects.

    The extra products of the non-loop configurations are exactly the
    entries forced by associativity against the composition and orbifold
    products, so each defect with a single chargeable empty slot
    determines that slot.  Chargeable slots are mu_1 or mu_2 lookups on
    non-unit tuples currently absent from the tables.  Iterates to a
    fixpoint; leftover defects are an error.
    """
    for _ in range(rounds):
        progress = False
        unresolved = []
        for tup in _composable_tuples(cat, 3, include_identities=False):
            n = len(tup)
            if n < 2:
                continue
            residual = {}
            unknown = {}
            for j in range(1, n + 1):
                for i in range(0, n - j + 1):
                    inner = tup[n - i - j:n - i]
                    sign = (-1) ** (sum(cat.shifted_degree(k)
                                        for k in tup[n - i:]) % 2)
                    inner_val = mu(cat, inner)
                    for okey, coeff in inner_val.items():
                        outer = tup[:n - i - j] + (okey,) + tup[n - i:]
                        m = len(outer)
                        val = mu(cat, outer)
                        if val:
                            vec_add_into(residual,
                                         vec_scale(sign * coeff, val))
                        elif (m <= 2 and m < n and not any(
                                cat.basis[k].is_identity for k in outer)):
                            unknown[outer] = (unknown.get(outer, 0)
                                              + sign * coeff)
            unknown = {k: v for k, v in unknown.items() if v}
            if not residual:
                continue
            if len(unknown) == 1:
                (outer, total), = unknown.items()
                cat.table_insert(len(outer), outer,
                                 vec_scale(Fraction(-1) / total, residual))
                progress = True
            else:
                unresolved.append(tup)
        if not unresolved:
            return
        if not progress:
            raise AInfError(
                "cannot resolve extra products; unresolved relation at %s"
                % (unresolved[0],))
    raise AInfError("extra product resolution did not converge")


def vec_add_into(target, other):
    for k, x in other.items():
        y = target.get(k, 0) + x
        if y:
            target[k] = y
        else:
            target.pop(k, None)


def mu(cat: AInfCategory, keys) -> dict:
    """Evaluate mu_n on a tuple of basis keys (left to right).

    Returns a combination {output key: coefficient}.  Unit cases follow
    the strict unit rules; everything else is a table lookup.
    """
    keys = tuple(keys)
    n = len(keys)
    if n == 0:
        raise AInfError("empty tuple")
    if not cat.composable(keys):
        raise AInfError("tuple %s is not composable" % (keys,))
    ids = [cat.basis[k].is_identity for k in keys]
    if n == 1:
        if ids[0]:
            return {}
        return dict(cat.products.get(1, {}).get(keys, {}))
    if n == 2:
        b, a = keys
        if ids[1]:  # mu_2(s b (x) s id) = s b; covers the double-unit case
            return {b: Fraction(1)}
        if ids[0]:  # mu_2(s id (x) s a) = (-1)^{|a|} s a
            return {a: Fraction(-1) ** (cat.basis[a].degree % 2)}
        return dict(cat.products.get(2, {}).get(keys, {}))
    if any(ids):
        return {}
    return dict(cat.products.get(n, {}).get(keys, {}))


def mu_on_combo(cat, left_keys, combo, right_keys) -> dict:
    """Linear extension of mu with a combination in one slot."""
    out = {}
    for key, coeff in combo.items():
        tup = tuple(left_keys) + (key,) + tuple(right_keys)
        if not cat.composable(tup):
            continue
        vec_add_into(out, vec_scale(coeff, mu(cat, tup)))
    return out


def _composable_tuples(cat, max_len, include_identities=True):
    """All composable basis tuples (in mu order) up to the given length."""
    by_source = {}
    for key, el in sorted(cat.basis.items()):
        if not include_identities and el.is_identity:
            continue
        by_source.setdefault(el.source, []).append(key)
    singles = [k for k in sorted(cat.basis)
               if include_identities or not cat.basis[k].is_identity]
    level = [(k,) for k in singles]
    for tup in level:
        yield tup
    for _ in range(max_len - 1):
        nxt = []
        for tup in level:
            tgt = cat.basis[tup[0]].target
            for k in by_source.get(tgt, []):
                nxt.append((k,) + tup)
        for tup in nxt:
            yield tup
        level = nxt


@dataclass
class AInfViolation:
    inputs: tuple
    residual: dict

    def __str__(self):
        return "mu*mu != 0 at (%s): %s" % (
            ", ".join("s %s" % k for k in self.inputs),
            " + ".join("%s * s %s" % (c, k)
                       for k, c in sorted(self.residual.items())))


def ainf_defect(cat, tup) -> dict:
    """The value of mu*mu on the tuple (zero combination iff satisfied)."""
    n = len(tup)
    residual = {}
    for j in range(1, n + 1):
        for i in range(0, n - j + 1):
            inner = tup[n - i - j:n - i]
            sign = (-1) ** (sum(cat.shifted_degree(k)
                                for k in tup[n - i:]) % 2)
            inner_val = mu(cat, inner)
            if not inner_val:
                continue
            val = mu_on_combo(cat, tup[:n - i - j], inner_val, tup[n - i:])
            vec_add_into(residual, vec_scale(sign, val))
    return residual


def verify_relations(cat: AInfCategory, max_len=None,
                     include_identities=True) -> list:
    """Evaluate mu*mu on every composable basis tuple up to max_len.

    The default bound 2*max_arity - 1 covers every relation that can see
    a stored product twice.  Returns the list of violations; empty means
    the relations hold.
    """
    if max_len is None:
        max_len = 2 * cat.max_arity - 1
    out = []
    for tup in _composable_tuples(cat, max_len, include_identities):
        residual = ainf_defect(cat, tup)
        if residual:
            out.append(AInfViolation(tup, residual))
    return out


def verify_units_degrees(cat: AInfCategory) -> list:
    """Check strict unitality and the degree +1 rule on the whole table."""
    bad = []
    for n, table in sorted(cat.products.items()):
        for keys, combo in sorted(table.items()):
            if not cat.composable(keys):
                bad.append("entry mu_%d%s is not composable" % (n, keys))
                continue
            ids = [cat.basis[k].is_identity for k in keys]
            if any(ids):
                expect = _unit_value(cat, keys)
                if combo != expect:
                    bad.append("unit entry mu_%d%s = %s, expected %s"
                               % (n, keys, combo, expect))
            ins = sum(cat.basis[k].degree for k in keys)
            for okey, coeff in combo.items():
                if cat.basis[okey].degree != ins - n + 2:
                    bad.append(
                        "entry mu_%d%s -> %s violates |out| = sum - n + 2"
                        % (n, keys, okey))
                src = cat.basis[keys[-1]].source
                tgt = cat.basis[keys[0]].target
                el = cat.basis[okey]
                if (el.source, el.target) != (src, tgt):
                    bad.append("entry mu_%d%s -> %s has wrong endpoints"
                               % (n, keys, okey))
    for obj in cat.objects:
        if cat.id_key(obj) not in cat.basis:
            bad.append("object %s has no identity" % obj)
        elif cat.basis[cat.id_key(obj)].degree != 0:
            bad.append("identity of %s has nonzero degree" % obj)
    for combo in cat.products.get(1, {}).keys():
        if cat.basis[combo[0]].is_identity:
            bad.append("mu_1 hits the identity of %s" % combo[0])
    return bad


def _unit_value(cat, keys):
    n = len(keys)
    ids = [cat.basis[k].is_identity for k in keys]
    if n == 2:
        b, a = keys
        if ids[1] and not ids[0]:
            return {b: Fraction(1)}
        if ids[0] and not ids[1]:
            return {a: Fraction(-1) ** (cat.basis[a].degree % 2)}
        if ids[0] and ids[1]:
            return {a: Fraction(1)}
    return {}


def _parse_extras(c, raw) -> list:
    """Extra products from their JSON form to (arity, keys, combo)."""
    from .paths import path_from_json
    out = []
    for item in raw:
        inputs = [path_from_json(c, spec) for spec in item["inputs"]]
        keys = tuple(p.key for p in inputs)
        outspec = item["output"]
        coeff = Fraction(str(outspec.get("coeff", "1")))
        combo = {}
        if coeff and outspec.get("path") is not None:
            out_path = path_from_json(c, outspec["path"])
            combo = {out_path.key: coeff}
        out.append((len(keys), keys, combo))
    return out


def attach_extra_products(cat: AInfCategory, extras) -> AInfCategory:
    """Merge user-supplied product entries into the table.

    Each extra is (arity, input keys, output combination).  Degree and
    composability are enforced; re-specifying an existing entry with a
    different value is an error.  The caller re-runs verify_relations.
    """
    for n, keys, combo in extras:
        if not cat.composable(keys):
            raise AInfError("extra product on non-composable tuple %s"
                            % (keys,))
        ins = sum(cat.basis[k].degree for k in keys)
        for okey in combo:
            if okey not in cat.basis:
                raise AInfError("extra product output %s unknown" % okey)
            if cat.basis[okey].degree != ins - n + 2:
                raise AInfError(
                    "extra product at %s violates the degree rule" % (keys,))
        existing = cat.products.get(n, {}).get(keys)
        if existing is not None and existing != combo:
            raise AInfError(
                "extra product at %s conflicts with an existing entry"
                % (keys,))
        if existing is None and combo:
            cat.table_insert(n, keys, combo)
    return cat
