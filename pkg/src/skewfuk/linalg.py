"""Exact sparse linear algebra over the rationals.

Coefficients are `fractions.Fraction` throughout; there is no floating
point anywhere in the package.  Vectors are plain dicts mapping basis
labels to nonzero Fractions, and maps are stored sparsely by
(row_label, col_label).  All operations iterate bases in their declared
order, so results are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable


def vec_add(u: dict, v: dict) -> dict:
    w = dict(u)
    for k, x in v.items():
        y = w.get(k, 0) + x
        if y:
            w[k] = y
        else:
            w.pop(k, None)
    return w


def vec_scale(c, v: dict) -> dict:
    c = Fraction(c)
    if not c:
        return {}
    return {k: c * x for k, x in v.items()}


def vec_axpy(w: dict, c, v: dict) -> None:
    """In-place w += c*v."""
    c = Fraction(c)
    if not c:
        return
    for k, x in v.items():
        y = w.get(k, 0) + c * x
        if y:
            w[k] = y
        else:
            w.pop(k, None)


@dataclass(frozen=True)
class BasedSpace:
    """A finitely based graded vector space with a fixed basis order."""

    basis: tuple
    degree: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "basis", tuple(self.basis))
        if len(set(self.basis)) != len(self.basis):
            raise ValueError("duplicate basis labels")

    @property
    def dim(self) -> int:
        return len(self.basis)

    def deg(self, label) -> int:
        return self.degree[label]

    def index(self, label) -> int:
        return self.basis.index(label)


@dataclass
class SparseMap:
    """A linear map codomain <- domain with sparse rational entries."""

    domain: BasedSpace
    codomain: BasedSpace
    entries: dict  # (row_label, col_label) -> Fraction, no explicit zeros

    def __post_init__(self):
        clean = {}
        for (r, c), x in self.entries.items():
            x = Fraction(x)
            if x:
                clean[(r, c)] = x
        self.entries = clean

    def column(self, col) -> dict:
        return {r: x for (r, c), x in self.entries.items() if c == col}

    def apply(self, vec: dict) -> dict:
        out: dict = {}
        for (r, c), x in self.entries.items():
            if c in vec:
                vec_axpy(out, x * vec[c], {r: 1})
        return {k: v for k, v in out.items() if v}

    def rows(self) -> dict:
        """Entries grouped by row label, columns keyed by label."""
        out: dict = {}
        for (r, c), x in self.entries.items():
            out.setdefault(r, {})[c] = x
        return out


def _eliminate(rows: list[dict], cols: list) -> tuple[list, list[dict]]:
    """Gauss-Jordan on dict rows over the ordered column labels.

    Returns (pivot column labels, reduced rows).  Rows come out in pivot
    order with unit pivots and zeros above and below each pivot.
    """
    rows = [dict(r) for r in rows if r]
    pivots = []
    reduced: list[dict] = []
    for col in cols:
        hit = None
        for i, r in enumerate(rows):
            if r.get(col):
                hit = i
                break
        if hit is None:
            continue
        piv = rows.pop(hit)
        inv = Fraction(1) / piv[col]
        piv = {k: inv * v for k, v in piv.items()}
        for r in rows:
            if r.get(col):
                vec_axpy(r, -r[col], piv)
        for r in reduced:
            if r.get(col):
                vec_axpy(r, -r[col], piv)
        rows = [r for r in rows if r]
        pivots.append(col)
        reduced.append(piv)
    return pivots, reduced


def rref(m: SparseMap) -> tuple[list, SparseMap]:
    """Reduced row echelon form of m.

    Pivot columns identify a basis of the image.  The reduced map keeps
    the domain of m; its rows are relabelled by their pivot column.
    """
    rows = list(m.rows().values())
    pivots, reduced = _eliminate(rows, list(m.domain.basis))
    codomain = BasedSpace(tuple(pivots), {p: 0 for p in pivots})
    entries = {}
    for p, row in zip(pivots, reduced):
        for c, x in row.items():
            entries[(p, c)] = x
    return pivots, SparseMap(m.domain, codomain, entries)


def rank(m: SparseMap) -> int:
    return len(rref(m)[0])


def kernel_basis(m: SparseMap) -> list[dict]:
    """Exact basis of ker m, as vectors over the domain basis.

    Empty iff m is injective.  Free variables are processed in domain
    order, so the result is deterministic.
    """
    pivots, red = rref(m)
    pivset = set(pivots)
    rows = red.rows()
    out = []
    for free in m.domain.basis:
        if free in pivset:
            continue
        vec = {free: Fraction(1)}
        for p in pivots:
            x = rows.get(p, {}).get(free)
            if x:
                vec[p] = -x
        out.append(vec)
    return out


def image_basis(m: SparseMap) -> list[dict]:
    """Basis of im m as vectors over the codomain basis (pivot columns)."""
    pivots, _ = rref(m)
    return [m.column(p) for p in pivots]


def span_pivots(vectors: Iterable[dict], ambient: BasedSpace) -> list:
    """Pivot labels of the span of the given vectors inside ambient."""
    pivots, _ = _eliminate(list(vectors), list(ambient.basis))
    return pivots


def quotient_reps(sub: Iterable[dict], ambient: BasedSpace) -> list[dict]:
    """Representatives of a complement of span(sub) in ambient.

    Greedy against the ambient basis order: the representatives are the
    basis vectors at non-pivot labels of the row-reduced subspace.
    """
    pivots = set(span_pivots(sub, ambient))
    return [{b: Fraction(1)} for b in ambient.basis if b not in pivots]


def reduce_mod(vec: dict, reduced_rows: list[dict], pivots: list) -> dict:
    """Reduce vec modulo a row-reduced subspace (pivots as from _eliminate)."""
    v = dict(vec)
    for p, row in zip(pivots, reduced_rows):
        if v.get(p):
            vec_axpy(v, -v[p], row)
    return v


def coordinates(vec: dict, basis_vectors: list[dict], ambient: BasedSpace):
    """Coordinates of vec in span(basis_vectors), or None if outside.

    Solves the sparse linear system exactly by elimination on an
    augmented matrix.
    """
    aug_cols = list(range(len(basis_vectors)))
    rows: dict = {}
    for j, bv in enumerate(basis_vectors):
        for lab, x in bv.items():
            rows.setdefault(lab, {})[j] = x
    for lab, x in vec.items():
        rows.setdefault(lab, {})["rhs"] = x
    pivots, reduced = _eliminate(list(rows.values()), aug_cols)
    coeffs = [Fraction(0)] * len(basis_vectors)
    for p, row in zip(pivots, reduced):
        coeffs[p] = row.get("rhs", Fraction(0))
    # residual check
    residual = dict(vec)
    for j, bv in enumerate(basis_vectors):
        vec_axpy(residual, -coeffs[j], bv)
    if residual:
        return None
    return coeffs
