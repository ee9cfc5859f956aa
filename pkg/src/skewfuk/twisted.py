"""Shifted objects, twisted complexes, Maurer-Cartan checks, hom
complexes, cones and shifts over a finite-basis A-infinity category.

The shift bookkeeping follows the extension of the products to pairs
(object, shift): a morphism between shifted objects is stored by its
underlying basis combination, and

    mu_n(s a_n (x) ... (x) s a_1)
        = (-1)^{sum_{i>j} (m_{i-1} - m_i) |s a_j|} mu_n(underlying)

with |s a_j| the shifted degree of a_j between the shifted objects.
Hom complexes are implemented for DG bases; the general products enter
only through the Maurer-Cartan sum, which strict upper-triangularity
makes finite.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .ainf import AInfCategory, AInfError, mu, vec_add_into
from .linalg import BasedSpace, SparseMap, kernel_basis, image_basis, \
    vec_scale
from . import linalg


class TwistedError(ValueError):
    pass


@dataclass(frozen=True)
class ShiftedObject:
    base: str
    shift: int

    def __str__(self):
        if self.shift == 0:
            return self.base
        return "s^%d %s" % (self.shift, self.base)


@dataclass(frozen=True)
class TwistedComplex:
    """Components with a strictly upper-triangular degree-1 matrix.

    delta[(i, j)] with i < j is a combination of base basis keys in
    A(base of component j, base of component i); its degree as a
    morphism of shifted objects must be 1.  Component order is part of
    the identity of the complex.
    """

    name: str
    components: tuple  # of ShiftedObject
    delta: tuple  # sorted ((i, j), frozen combo items)

    @staticmethod
    def make(name, components, delta):
        frozen = tuple(sorted(
            ((i, j), tuple(sorted(combo.items())))
            for (i, j), combo in delta.items() if combo))
        return TwistedComplex(name, tuple(components), frozen)

    def delta_dict(self):
        return {ij: dict(items) for ij, items in self.delta}

    @property
    def r(self):
        return len(self.components)


def tw_object(obj: str, shift: int = 0, name=None) -> TwistedComplex:
    return TwistedComplex.make(name or obj,
                               (ShiftedObject(obj, shift),), {})


def za_degree(cat: AInfCategory, key, m_src, m_tgt) -> int:
    """Degree of a basis morphism viewed between shifted objects."""
    return cat.basis[key].degree - (m_tgt - m_src)


def za_mu(cat: AInfCategory, entries) -> dict:
    """Shifted-category product on single basis morphisms.

    entries are (m_src, m_tgt, key) left to right in mu order (the
    rightmost acts first).  Returns a combination of base basis keys,
    to be read between the outer shifted objects.
    """
    n = len(entries)
    chain = list(reversed(entries))  # a_1, ..., a_n
    for (s1, t1, k1), (s2, t2, k2) in zip(chain, chain[1:]):
        if t1 != s2:
            raise TwistedError("shift mismatch in za_mu chain")
        if cat.basis[k1].target != cat.basis[k2].source:
            raise TwistedError("tuple not composable in za_mu")
    exponent = 0
    for i in range(2, n + 1):
        m_prev, m_next, _ = chain[i - 1]
        for j in range(1, i):
            sj, tj, kj = chain[j - 1]
            exponent += (m_prev - m_next) * (za_degree(cat, kj, sj, tj) - 1)
    sign = Fraction(-1) ** (exponent % 2)
    val = mu(cat, tuple(k for (_, _, k) in entries))
    return vec_scale(sign, val)


def mc_residual(cat: AInfCategory, tw: TwistedComplex) -> dict:
    """The Maurer-Cartan sum; empty iff tw is a valid twisted complex.

    Keyed by (i, j) slots with combinations of base keys.
    """
    delta = tw.delta_dict()
    comps = tw.components
    residual = {}
    # chains j_0 > j_1 > ... > j_n strictly decreasing through delta slots
    def chains_from(j0):
        frontier = [((j0,), {(): Fraction(1)})]
        # represent partial chains with accumulated tensor entries
        out = []
        stack = [(j0, [])]
        while stack:
            cur, picked = stack.pop()
            for (i, j), combo in delta.items():
                if j != cur:
                    continue
                path = picked + [((i, j), combo)]
                out.append(path)
                stack.append((i, path))
        return out

    for j0 in range(tw.r):
        for path in chains_from(j0):
            i_last = path[-1][0][0]
            slots = [ij for ij, _ in path]
            combos = [combo for _, combo in path]
            # entries in mu order: last applied first in the list
            def rec(idx, picked_keys, coeff):
                if idx == len(combos):
                    entries = []
                    for (slot, key) in zip(reversed(slots),
                                           reversed(picked_keys)):
                        (i, j) = slot
                        entries.append((comps[j].shift, comps[i].shift, key))
                    val = za_mu(cat, entries)
                    tgt = residual.setdefault((i_last, j0), {})
                    vec_add_into(tgt, vec_scale(coeff, val))
                    return
                for key, c0 in combos[idx].items():
                    rec(idx + 1, picked_keys + [key], coeff * c0)
            rec(0, [], Fraction(1))
    return {k: v for k, v in residual.items() if v}


def make_twisted(cat: AInfCategory, name, components, delta) -> TwistedComplex:
    """Validate shapes and the Maurer-Cartan equation, then build.

    delta maps (i, j) with i < j to combinations of base basis keys; a
    nonzero residual raises with the offending slots.
    """
    comps = tuple(components)
    for (i, j), combo in delta.items():
        if not (0 <= i < j < len(comps)):
            raise TwistedError("delta slot (%d, %d) is not strictly "
                               "upper triangular" % (i, j))
        for key in combo:
            el = cat.basis[key]
            if el.source != comps[j].base or el.target != comps[i].base:
                raise TwistedError("delta entry %s at (%d, %d) has wrong "
                                   "endpoints" % (key, i, j))
            if za_degree(cat, key, comps[j].shift, comps[i].shift) != 1:
                raise TwistedError("delta entry %s at (%d, %d) is not of "
                                   "degree 1" % (key, i, j))
    tw = TwistedComplex.make(name, comps, delta)
    residual = mc_residual(cat, tw)
    if residual:
        raise TwistedError("Maurer-Cartan residual nonzero at slots %s"
                           % sorted(residual))
    return tw


def hom_complex(cat: AInfCategory, X: TwistedComplex, Y: TwistedComplex):
    """Basis and differential of the twisted hom complex (DG base only).

    Basis labels are "i.j.key" for the base morphism key from component
    j of X to component i of Y; the differential is
    mu_1(a) + mu_2(s delta_Y (x) s a) + mu_2(s a (x) s delta_X).
    """
    if not cat.is_dg():
        raise TwistedError("hom complexes need a DG base category")
    labels = []
    degree = {}
    decode = {}
    for i, yc in enumerate(Y.components):
        for j, xc in enumerate(X.components):
            for key in cat.hom_keys(xc.base, yc.base):
                lab = "%d.%d.%s" % (i, j, key)
                labels.append(lab)
                degree[lab] = za_degree(cat, key, xc.shift, yc.shift)
                decode[lab] = (i, j, key)
    space = BasedSpace(tuple(labels), degree)
    dX = X.delta_dict()
    dY = Y.delta_dict()
    entries = {}

    def add(lab_out_slot, combo, col):
        i, j = lab_out_slot
        for key, coeff in combo.items():
            lab = "%d.%d.%s" % (i, j, key)
            if coeff:
                entries[(lab, col)] = entries.get((lab, col), 0) + coeff

    for lab in labels:
        i, j, key = decode[lab]
        xs, ys = X.components[j].shift, Y.components[i].shift
        val = za_mu(cat, [(xs, ys, key)])
        add((i, j), val, lab)
        for (i2, i1), combo in dY.items():
            if i1 != i:
                continue
            for dkey, dcoeff in combo.items():
                val = za_mu(cat, [
                    (Y.components[i1].shift, Y.components[i2].shift, dkey),
                    (xs, ys, key)])
                add((i2, j), vec_scale(dcoeff, val), lab)
        for (j1, j2), combo in dX.items():
            if j1 != j:
                continue
            for dkey, dcoeff in combo.items():
                val = za_mu(cat, [
                    (xs, ys, key),
                    (X.components[j2].shift, X.components[j1].shift, dkey)])
                add((i, j2), vec_scale(dcoeff, val), lab)
    entries = {k: Fraction(v) for k, v in entries.items() if v}
    d = SparseMap(space, space, entries)
    # d^2 = 0, a consequence of MC over a DG base
    for lab in labels:
        if d.apply(d.column(lab)):
            raise TwistedError("hom complex differential does not square "
                               "to zero at %s" % lab)
    return space, d


def hom_cohomology(cat: AInfCategory, X, Y):
    """Graded dimensions and representatives of H(hom(X, Y))."""
    space, d = hom_complex(cat, X, Y)
    cocycles = kernel_basis(d)
    boundaries = image_basis(d)
    piv_b, red_b = linalg._eliminate(boundaries, list(space.basis))
    reps = []
    chosen_red = []
    chosen_piv = []
    for vec in cocycles:
        r = linalg.reduce_mod(vec, red_b, piv_b)
        r2 = linalg.reduce_mod(r, chosen_red, chosen_piv)
        if not r2:
            continue
        lead = next(k for k in space.basis if k in r2)
        inv = Fraction(1) / r2[lead]
        chosen_piv.append(lead)
        chosen_red.append(vec_scale(inv, r2))
        reps.append(vec_scale(inv, r))
    dims = {}
    for rep in reps:
        degs = {space.deg(k) for k in rep}
        if len(degs) != 1:
            raise TwistedError("inhomogeneous cohomology representative")
        deg = degs.pop()
        dims[deg] = dims.get(deg, 0) + 1
    return {"total_dim": space.dim, "h_dims": dims, "reps": reps,
            "space": space}


def tw_unit(cat: AInfCategory, X: TwistedComplex) -> dict:
    """The identity of a twisted complex as a hom-complex combination."""
    combo = {}
    for i, comp in enumerate(X.components):
        unit = cat.unit_combo(comp.base) if hasattr(cat, "unit_combo") \
            else {cat.id_key(comp.base): Fraction(1)}
        for key, coeff in unit.items():
            combo["%d.%d.%s" % (i, i, key)] = coeff
    return combo


def shift(X: TwistedComplex, by: int = 1) -> TwistedComplex:
    """Shift functor: components move up, delta entries flip sign by parity."""
    comps = tuple(ShiftedObject(c.base, c.shift + by) for c in X.components)
    sign = Fraction(-1) ** (by % 2)
    delta = {ij: vec_scale(sign, dict(items)) for ij, items in X.delta}
    return TwistedComplex.make("s^%d(%s)" % (by, X.name), comps, delta)


def cone(cat: AInfCategory, f: dict, X: TwistedComplex, Y: TwistedComplex,
         name=None) -> TwistedComplex:
    """Mapping cone of a closed degree-0 morphism f: X -> Y.

    f maps hom-complex labels "i.j.key" to coefficients.  The cone lists
    the components of Y followed by those of X shifted by one, with
    connecting entries -f.
    """
    space, d = hom_complex(cat, X, Y)
    for lab, coeff in f.items():
        if space.deg(lab) != 0:
            raise TwistedError("cone of a non-degree-0 morphism")
    if d.apply(f):
        raise TwistedError("cone of a non-closed morphism")
    comps = tuple(Y.components) + tuple(
        ShiftedObject(c.base, c.shift + 1) for c in X.components)
    rY = len(Y.components)
    delta = {ij: dict(items) for ij, items in Y.delta}
    for (i, j), items in X.delta_dict().items():
        delta[(rY + i, rY + j)] = vec_scale(Fraction(-1), items)
    for lab, coeff in f.items():
        i, j, key = lab.split(".", 2)
        slot = (int(i), rY + int(j))
        delta.setdefault(slot, {})
        delta[slot][key] = delta[slot].get(key, 0) - coeff
    delta = {ij: {k: v for k, v in combo.items() if v}
             for ij, combo in delta.items()}
    return make_twisted(cat, name or ("cone(%s->%s)" % (X.name, Y.name)),
                        comps, delta)
