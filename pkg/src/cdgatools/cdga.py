"""Commutative differential graded algebras as explicit multiplication tables.

A table stores sparse structure constants for basis products, keyed on
ordered basis pairs; the Koszul sign (-1)^{pq} recovers the swapped order and
products with the unit are implicit, so degree-0 entries are never stored.
Odd-degree squares are forced to zero in characteristic zero and are never
stored either.

Validation is a reporting operation, not an exception path: a structurally
well-formed table whose entries break an axiom (Leibniz, associativity, d^2)
comes back with a list of witnessed failures.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .graded import (
    CochainComplex,
    GradedMap,
    GradedSpace,
    InputError,
    TruncationError,
    cohomology,
    cohomology_dims,
    identity_map,
    is_quasi_iso_complexes,
)
from .linalg import (
    Q,
    RatMatrix,
    Vector,
    complement_basis,
    kernel_basis,
    preimage,
    rank,
)

MultKey = tuple[int, int, int, int]  # (deg x, idx x, deg y, idx y), ordered
Coeffs = dict[int, Fraction]


def canon_key(p: int, i: int, q: int, j: int) -> tuple[MultKey, Fraction]:
    """Canonical storage key for a basis pair plus the Koszul sign to undo it."""
    if (p, i) <= (q, j):
        return (p, i, q, j), Q(1)
    return (q, j, p, i), Q(-1) ** ((p * q) % 2)


@dataclass
class CdgaTable:
    """Connected non-negatively graded CDGA given by structure constants."""

    complex: CochainComplex
    unit: str
    mult: dict[MultKey, Coeffs] = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        sp = self.space
        if sp.negative_ok or (sp.basis and sp.bottom() < 0):
            raise InputError("algebra tables must be non-negatively graded")
        if sp.dim(0) != 1 or sp.labels(0) != (self.unit,):
            raise InputError("degree 0 must be spanned by the unit alone")
        for (p, i, q, j), coeffs in self.mult.items():
            if (p, i) > (q, j):
                raise InputError("mult keys must be stored in canonical order")
            if p == 0 or q == 0:
                raise InputError("unit products are implicit; do not store them")
            if p == q and i == j and p % 2 == 1:
                raise InputError("odd squares vanish over Q; do not store them")
            for k in coeffs:
                if not (0 <= k < sp.dim(p + q)):
                    raise InputError(f"product index {k} out of range in degree {p+q}")

    @property
    def space(self) -> GradedSpace:
        return self.complex.space

    @property
    def truncation(self) -> int | None:
        return self.space.truncation

    def dim(self, p: int) -> int:
        return self.space.dim(p)

    def top(self) -> int:
        return self.space.top()

    def labels(self, p: int) -> tuple[str, ...]:
        return self.space.labels(p)

    def d(self, p: int, v: Sequence) -> Vector:
        return self.complex.d.apply(p, v)

    def mult_basis(self, p: int, i: int, q: int, j: int) -> Coeffs:
        """Structure constants of x_i * y_j as {index: coeff} in degree p+q."""
        if p == 0:
            return {j: Q(1)}
        if q == 0:
            return {i: Q(1)}
        bound = self.truncation
        if bound is not None and p + q > bound:
            return {}
        if self.dim(p + q) == 0:
            return {}
        key, sign = canon_key(p, i, q, j)
        entry = self.mult.get(key)
        if not entry:
            return {}
        if sign == 1:
            return dict(entry)
        return {k: sign * c for k, c in entry.items()}

    def mult_vec(self, p: int, v: Sequence, q: int, w: Sequence) -> Vector:
        """Product of homogeneous elements, as a vector in degree p+q."""
        out = [Q(0)] * self.dim(p + q)
        for i, a in enumerate(v):
            if a == 0:
                continue
            for j, b in enumerate(w):
                if b == 0:
                    continue
                for k, c in self.mult_basis(p, i, q, j).items():
                    out[k] += a * b * c
        return out

    def basis_vector(self, p: int, i: int) -> Vector:
        v = [Q(0)] * self.dim(p)
        v[i] = Q(1)
        return v

    def label_of_vector(self, p: int, v: Sequence) -> str:
        """Render a vector as a readable combination of labels."""
        parts = []
        for i, c in enumerate(v):
            if c == 0:
                continue
            lab = self.labels(p)[i]
            if c == 1:
                parts.append(lab)
            else:
                parts.append(f"{c}*{lab}")
        return " + ".join(parts) if parts else "0"


@dataclass(frozen=True)
class ValidationFailure:
    kind: str
    degree: int
    witness: str
    detail: str = ""


@dataclass(frozen=True)
class ValidationResult:
    ok: bool
    failures: tuple[ValidationFailure, ...]


def _pair_label(a: CdgaTable, p: int, i: int, q: int, j: int) -> str:
    return f"({a.labels(p)[i]}, {a.labels(q)[j]})"


def validate_cdga(a: CdgaTable) -> ValidationResult:
    """Check the CDGA axioms within the faithful range, reporting witnesses.

    Products are compared for total degree <= N, Leibniz for total degree
    <= N-1 (so every term of d(xy) is still faithful); complete tables are
    checked everywhere products can be nonzero.
    """
    fails: list[ValidationFailure] = []
    sp = a.space
    bound = a.truncation
    top = sp.top()
    prod_hi = top if bound is None else min(bound, top)

    # d squared
    for p in sp.degrees():
        if bound is not None and p + 1 > bound:
            continue
        sq = a.complex.d.block(p + 1) @ a.complex.d.block(p)
        if not sq.is_zero():
            for i in range(sp.dim(p)):
                if any(x != 0 for x in sq.column(i)):
                    fails.append(ValidationFailure(
                        "d-squared", p, a.labels(p)[i],
                        f"d(d({a.labels(p)[i]})) != 0"))
                    break

    pos_degrees = [p for p in sp.degrees() if p > 0]

    # Leibniz
    leib_hi = (top if bound is None else bound - 1)
    for p in pos_degrees:
        for q in pos_degrees:
            if p > q or p + q > leib_hi:
                continue
            for i in range(sp.dim(p)):
                jstart = i if p == q else 0
                for j in range(jstart, sp.dim(q)):
                    xy = a.mult_basis(p, i, q, j)
                    lhs = a.d(p + q, _coeffs_to_vec(xy, sp.dim(p + q)))
                    dx = a.d(p, a.basis_vector(p, i))
                    dy = a.d(q, a.basis_vector(q, j))
                    rhs = _vec_add(
                        a.mult_vec(p + 1, dx, q, a.basis_vector(q, j)),
                        _vec_scale(a.mult_vec(p, a.basis_vector(p, i), q + 1, dy),
                                   Q(-1) ** (p % 2)),
                    )
                    if lhs != rhs:
                        fails.append(ValidationFailure(
                            "leibniz", p + q + 1, _pair_label(a, p, i, q, j),
                            "d(x*y) != dx*y + (-1)^|x| x*dy"))

    # associativity
    for p in pos_degrees:
        for q in pos_degrees:
            for r in pos_degrees:
                if p + q + r > prod_hi:
                    continue
                for i in range(sp.dim(p)):
                    for j in range(sp.dim(q)):
                        xy = a.mult_vec(p, a.basis_vector(p, i), q, a.basis_vector(q, j))
                        for k in range(sp.dim(r)):
                            yz = a.mult_vec(q, a.basis_vector(q, j), r,
                                            a.basis_vector(r, k))
                            left = a.mult_vec(p + q, xy, r, a.basis_vector(r, k))
                            right = a.mult_vec(p, a.basis_vector(p, i), q + r, yz)
                            if left != right:
                                fails.append(ValidationFailure(
                                    "associativity", p + q + r,
                                    f"({a.labels(p)[i]}, {a.labels(q)[j]}, "
                                    f"{a.labels(r)[k]})"))

    return ValidationResult(not fails, tuple(fails))


def _coeffs_to_vec(coeffs: Coeffs, dim: int) -> Vector:
    v = [Q(0)] * dim
    for k, c in coeffs.items():
        v[k] = c
    return v


def _vec_add(a: Vector, b: Vector) -> Vector:
    return [x + y for x, y in zip(a, b)]


def _vec_scale(a: Vector, c: Fraction) -> Vector:
    return [c * x for x in a]


def _vec_sub(a: Vector, b: Vector) -> Vector:
    return [x - y for x, y in zip(a, b)]


@dataclass
class CdgaMorphism:
    """Degree-0 algebra morphism given by blocks on the underlying spaces."""

    source: CdgaTable
    target: CdgaTable
    map: GradedMap
    name: str = ""

    def __post_init__(self):
        if self.map.degree != 0:
            raise InputError("algebra morphisms have degree 0")

    def apply(self, p: int, v: Sequence) -> Vector:
        return self.map.apply(p, v)

    def compose(self, other: "CdgaMorphism") -> "CdgaMorphism":
        return CdgaMorphism(other.source, self.target, self.map.compose(other.map))


def identity_morphism(a: CdgaTable) -> CdgaMorphism:
    return CdgaMorphism(a, a, identity_map(a.space), name="id")


def validate_morphism(f: CdgaMorphism) -> ValidationResult:
    """Unit preservation, chain property and multiplicativity, with witnesses."""
    fails: list[ValidationFailure] = []
    a, b = f.source, f.target
    unit_img = f.apply(0, [Q(1)])
    if unit_img != [Q(1)]:
        fails.append(ValidationFailure("unit", 0, a.unit, "unit not sent to unit"))

    bounds = [x for x in (a.truncation, b.truncation) if x is not None]
    hi = min(bounds) if bounds else max(a.top(), b.top())

    for p in a.space.degrees():
        if p + 1 > hi and bounds:
            continue
        for i in range(a.dim(p)):
            x = a.basis_vector(p, i)
            lhs = f.apply(p + 1, a.d(p, x))
            rhs = b.d(p, f.apply(p, x))
            if lhs != rhs:
                fails.append(ValidationFailure(
                    "chain", p, a.labels(p)[i], "f(dx) != d(f(x))"))

    pos = [p for p in a.space.degrees() if p > 0]
    for p in pos:
        for q in pos:
            if p > q or p + q > hi:
                continue
            for i in range(a.dim(p)):
                jstart = i if p == q else 0
                for j in range(jstart, a.dim(q)):
                    xy = a.mult_basis(p, i, q, j)
                    lhs = f.apply(p + q, _coeffs_to_vec(xy, a.dim(p + q)))
                    rhs = b.mult_vec(p, f.apply(p, a.basis_vector(p, i)),
                                     q, f.apply(q, a.basis_vector(q, j)))
                    if lhs != rhs:
                        fails.append(ValidationFailure(
                            "multiplicative", p + q, _pair_label(a, p, i, q, j),
                            "f(x*y) != f(x)*f(y)"))
    return ValidationResult(not fails, tuple(fails))


def is_quasi_iso(f: CdgaMorphism) -> tuple[bool, dict]:
    """Whether H(f) is bijective on the common faithful degree range."""
    return is_quasi_iso_complexes(f.map, f.source.complex, f.target.complex)


# ---------------------------------------------------------------------------
# cohomology as an algebra


def cohomology_algebra(a: CdgaTable) -> tuple[CdgaTable, dict[int, list[Vector]]]:
    """H(A) as a zero-differential table, plus the chosen representatives.

    Representative labels reuse the parent label when a representative is a
    single basis vector, and fall back to h<degree>_<index> otherwise.
    """
    upto = a.complex.faithful_cohomology_upto()
    if upto is None:
        upto = a.top()
    reps: dict[int, list[Vector]] = {}
    basis: dict[int, tuple[str, ...]] = {}
    for p in range(0, upto + 1):
        dim, r = cohomology(a.complex, p)
        if dim == 0:
            continue
        reps[p] = r
        labels = []
        for i, v in enumerate(r):
            nz = [(k, c) for k, c in enumerate(v) if c != 0]
            if len(nz) == 1 and nz[0][1] == 1:
                labels.append(a.labels(p)[nz[0][0]])
            else:
                labels.append(f"h{p}_{i}")
        basis[p] = tuple(labels)

    trunc = None if a.truncation is None else upto
    sp = GradedSpace(basis, trunc)
    cx = CochainComplex(sp, GradedMap(sp, sp, 1))
    h = CdgaTable(cx, basis[0][0], {}, name=f"H({a.name})" if a.name else "")

    # express a class in representative coordinates, modulo coboundaries
    def class_coords(p: int, v: Vector) -> Vector:
        if sp.dim(p) == 0:
            if any(x != 0 for x in v):
                raise InputError(f"nonzero class in empty H^{p}")
            return []
        bdry = a.complex.d.block(p - 1)
        cols = [list(c) for c in (reps.get(p) or [])]
        cols += [bdry.column(j) for j in range(bdry.cols)]
        sol = preimage(RatMatrix.from_columns(cols, a.dim(p)), v)
        if sol is None:
            raise InputError("product of cocycles not a cocycle mod boundaries")
        return sol[: sp.dim(p)]

    mult: dict[MultKey, Coeffs] = {}
    degs = [p for p in sp.degrees() if p > 0]
    for p in degs:
        for q in degs:
            if p > q or p + q > upto:
                continue
            for i in range(sp.dim(p)):
                jstart = i if p == q else 0
                for j in range(jstart, sp.dim(q)):
                    if p == q == (p + q) / 2 and p % 2 == 1 and i == j:
                        continue
                    prod = a.mult_vec(p, reps[p][i], q, reps[q][j])
                    coords = class_coords(p + q, prod)
                    entry = {k: c for k, c in enumerate(coords) if c != 0}
                    if entry:
                        mult[(p, i, q, j)] = entry
    h.mult.update(mult)
    return h, reps


# ---------------------------------------------------------------------------
# differential ideals and quotients


def _row_reduce_vectors(vectors: list[Vector]) -> list[Vector]:
    if not vectors:
        return []
    m = RatMatrix(len(vectors), len(vectors[0]), vectors)
    r, piv = m.rref()
    return [r.data[i] for i in range(len(piv))]


@dataclass
class DiffIdeal:
    """Differential ideal, stored as canonical row-reduced bases per degree."""

    algebra: CdgaTable
    vectors: dict[int, list[Vector]]

    def dim(self, p: int) -> int:
        return len(self.vectors.get(p, []))

    def dims(self) -> dict[int, int]:
        return {p: len(v) for p, v in sorted(self.vectors.items()) if v}

    def matrix(self, p: int) -> RatMatrix:
        vs = self.vectors.get(p, [])
        return RatMatrix.from_columns([list(v) for v in vs], self.algebra.dim(p))

    def contains(self, p: int, v: Sequence) -> bool:
        return preimage(self.matrix(p), v) is not None

    def as_complex(self) -> CochainComplex:
        """The ideal as a complex in its own (canonical) bases."""
        a = self.algebra
        basis = {
            p: tuple(f"j{p}_{i}" for i in range(len(vs)))
            for p, vs in self.vectors.items() if vs
        }
        trunc = a.truncation
        sp = GradedSpace(basis, trunc)
        blocks: dict[int, RatMatrix] = {}
        for p, vs in self.vectors.items():
            if not vs or sp.dim(p + 1) == 0:
                continue
            cols = []
            tgt = self.matrix(p + 1)
            for v in vs:
                dv = a.d(p, v)
                sol = preimage(tgt, dv)
                if sol is None:
                    raise InputError(f"ideal is not d-closed in degree {p}")
                cols.append(sol)
            m = RatMatrix.from_columns(cols, sp.dim(p + 1))
            if not m.is_zero():
                blocks[p] = m
        return CochainComplex(sp, GradedMap(sp, sp, 1, blocks))


def validate_ideal(ideal: DiffIdeal) -> ValidationResult:
    """d-closure and A-module closure of the stored spans."""
    fails: list[ValidationFailure] = []
    a = ideal.algebra
    bound = a.truncation
    for p, vs in sorted(ideal.vectors.items()):
        for v in vs:
            dv = a.d(p, v)
            if any(x != 0 for x in dv) and not ideal.contains(p + 1, dv):
                fails.append(ValidationFailure(
                    "d-closure", p, a.label_of_vector(p, v)))
        for q in a.space.degrees():
            if q == 0:
                continue
            if bound is not None and p + q > bound:
                continue
            for i in range(a.dim(q)):
                for v in vs:
                    prod = a.mult_vec(q, a.basis_vector(q, i), p, v)
                    if any(x != 0 for x in prod) and not ideal.contains(p + q, prod):
                        fails.append(ValidationFailure(
                            "mult-closure", p + q,
                            f"{a.labels(q)[i]} * ({a.label_of_vector(p, v)})"))
    return ValidationResult(not fails, tuple(fails))


def ideal_generated_by(a: CdgaTable, gens: Iterable[tuple[int, Vector]]) -> DiffIdeal:
    """Smallest differential ideal containing the generators."""
    spans: dict[int, list[Vector]] = {}

    def add(p: int, v: Vector) -> bool:
        if all(x == 0 for x in v):
            return False
        cur = spans.setdefault(p, [])
        m = RatMatrix.from_columns([list(u) for u in cur], a.dim(p))
        if preimage(m, v) is not None:
            return False
        cur.append(list(v))
        return True

    work: list[tuple[int, Vector]] = []
    for p, v in gens:
        if add(p, list(v)):
            work.append((p, list(v)))
    bound = a.truncation
    top = a.top()
    while work:
        p, v = work.pop()
        dv = a.d(p, v)
        if any(x != 0 for x in dv) and add(p + 1, dv):
            work.append((p + 1, dv))
        for q in a.space.degrees():
            if q == 0 or p + q > top:
                continue
            if bound is not None and p + q > bound:
                continue
            for i in range(a.dim(q)):
                prod = a.mult_vec(q, a.basis_vector(q, i), p, v)
                if any(x != 0 for x in prod) and add(p + q, prod):
                    work.append((p + q, prod))
    return DiffIdeal(a, {p: _row_reduce_vectors(vs) for p, vs in spans.items() if vs})


def is_acyclic_ideal(ideal: DiffIdeal) -> tuple[bool, dict]:
    """Whether the ideal, as a complex, has zero cohomology in every degree."""
    c = ideal.as_complex()
    upto = c.faithful_cohomology_upto()
    if upto is None:
        upto = c.space.top()
    for p in range(0, upto + 1):
        dim, _ = cohomology(c, p)
        if dim:
            return False, {"degree": p, "dim": dim}
    return True, {}


def quotient_by_ideal(a: CdgaTable, ideal: DiffIdeal
                      ) -> tuple[CdgaTable, CdgaMorphism]:
    """A / I with the projection, bases chosen greedily from parent labels."""
    if ideal.dim(0) > 0:
        raise InputError("unit lies in the ideal: quotient would not be connected")

    rep_idx: dict[int, list[int]] = {}
    basis: dict[int, tuple[str, ...]] = {}
    for p in a.space.degrees():
        comp = complement_basis(ideal.matrix(p), a.dim(p))
        idxs = [next(i for i, x in enumerate(v) if x == 1) for v in comp]
        if idxs:
            rep_idx[p] = idxs
            basis[p] = tuple(a.labels(p)[i] for i in idxs)

    sp = GradedSpace(basis, a.truncation)

    def project(p: int, v: Vector) -> Vector:
        idxs = rep_idx.get(p, [])
        if not idxs:
            return []
        cols = [list(a.basis_vector(p, i)) for i in idxs]
        ivs = ideal.vectors.get(p, [])
        cols += [list(u) for u in ivs]
        sol = preimage(RatMatrix.from_columns(cols, a.dim(p)), v)
        assert sol is not None
        return sol[: len(idxs)]

    dblocks: dict[int, RatMatrix] = {}
    for p, idxs in rep_idx.items():
        if sp.dim(p + 1) == 0:
            continue
        cols = [project(p + 1, a.d(p, a.basis_vector(p, i))) for i in idxs]
        m = RatMatrix.from_columns(cols, sp.dim(p + 1))
        if not m.is_zero():
            dblocks[p] = m
    cx = CochainComplex(sp, GradedMap(sp, sp, 1, dblocks))

    mult: dict[MultKey, Coeffs] = {}
    degs = [p for p in sp.degrees() if p > 0]
    bound = a.truncation
    for p in degs:
        for q in degs:
            if p > q:
                continue
            if sp.dim(p + q) == 0:
                continue
            if bound is not None and p + q > bound:
                continue
            for ii, pi in enumerate(rep_idx[p]):
                jstart = ii if p == q else 0
                for jj in range(jstart, len(rep_idx[q])):
                    if p == q and ii == jj and p % 2 == 1:
                        continue
                    qj = rep_idx[q][jj]
                    prod = a.mult_vec(p, a.basis_vector(p, pi), q, a.basis_vector(q, qj))
                    coords = project(p + q, prod)
                    entry = {k: c for k, c in enumerate(coords) if c != 0}
                    if entry:
                        mult[(p, ii, q, jj)] = entry

    out = CdgaTable(cx, basis[0][0], mult,
                    name=f"{a.name}/I" if a.name else "")
    pblocks: dict[int, RatMatrix] = {}
    for p in a.space.degrees():
        if sp.dim(p) == 0:
            continue
        cols = [project(p, a.basis_vector(p, i)) for i in range(a.dim(p))]
        pblocks[p] = RatMatrix.from_columns(cols, sp.dim(p))
    proj = CdgaMorphism(a, out, GradedMap(a.space, sp, 0, pblocks), name="proj")
    return out, proj


# ---------------------------------------------------------------------------
# generator adjunctions


def _check_even_closed(a: CdgaTable, deg: int, e: Vector, what: str):
    if deg % 2 != 0 or deg <= 0:
        raise InputError(f"{what} must sit in positive even degree, got {deg}")
    if len(e) != a.dim(deg):
        raise InputError(f"{what} has wrong coordinate length for degree {deg}")
    if any(x != 0 for x in a.d(deg, e)):
        raise InputError(f"{what} must be closed")


def adjoin_odd_generator(a: CdgaTable, e_deg: int, e: Vector,
                         gen: str = "z") -> CdgaTable:
    """Free odd generator z with dz = e: the table of A (x) /\\(z).

    |z| = |e| - 1 is odd, z^2 = 0, and d(x.z) = (dx).z + (-1)^{|x|} x*e.
    """
    _check_even_closed(a, e_deg, list(e), "dz")
    zdeg = e_deg - 1
    basis: dict[int, list[str]] = {p: list(a.labels(p)) for p in a.space.degrees()}
    zpos: dict[int, list[int]] = {}  # new-element degree -> parent degrees list
    for p in a.space.degrees():
        tgt = p + zdeg
        if a.truncation is not None and tgt > a.truncation:
            continue
        labs = [gen] if p == 0 else [f"{x}.{gen}" for x in a.labels(p)]
        basis.setdefault(tgt, [])
        zpos.setdefault(tgt, [])
        for L in labs:
            basis[tgt].append(L)
        zpos[tgt].append(p)
    return _build_adjoined(a, basis, zpos, zdeg, e_deg, e, odd=True)


def adjoin_even_truncated(a: CdgaTable, e_deg: int, e: Vector,
                          gen: str = "zb") -> CdgaTable:
    """Even generator zb of degree |e| with zb^2 = e*zb and d(zb) = 0.

    This is A (x) /\\(zb) rewritten by the relation zb^2 - e*zb, so the
    result is A + A.zb as a module over A and needs no truncation bump.
    """
    _check_even_closed(a, e_deg, list(e), "the rewrite class e")
    zdeg = e_deg
    basis: dict[int, list[str]] = {p: list(a.labels(p)) for p in a.space.degrees()}
    zpos: dict[int, list[int]] = {}
    for p in a.space.degrees():
        tgt = p + zdeg
        if a.truncation is not None and tgt > a.truncation:
            continue
        labs = [gen] if p == 0 else [f"{x}.{gen}" for x in a.labels(p)]
        basis.setdefault(tgt, [])
        zpos.setdefault(tgt, [])
        for L in labs:
            basis[tgt].append(L)
        zpos[tgt].append(p)
    return _build_adjoined(a, basis, zpos, zdeg, e_deg, e, odd=False)


def _build_adjoined(a: CdgaTable, basis: dict[int, list[str]],
                    zpos: dict[int, list[int]], zdeg: int, e_deg: int,
                    e: Vector, odd: bool) -> CdgaTable:
    """Shared assembly for the two adjunctions.

    Coordinates in each new degree are (A part | q.z blocks in parent-degree
    order); zpos records which parent degrees contribute a z block.
    """
    sp = GradedSpace({p: tuple(v) for p, v in sorted(basis.items()) if v},
                     a.truncation)

    def offsets(deg: int) -> dict[int, int]:
        pos = {}
        cur = a.dim(deg)
        for par in zpos.get(deg, []):
            pos[par] = cur
            cur += a.dim(par)
        assert cur == sp.dim(deg)
        return pos

    zoff = {deg: offsets(deg) for deg in sp.degrees()}

    def embed_a(deg: int, v: Vector) -> Vector:
        out = [Q(0)] * sp.dim(deg)
        for i, c in enumerate(v):
            out[i] = c
        return out

    def embed_z(par_deg: int, v: Vector) -> Vector:
        deg = par_deg + zdeg
        out = [Q(0)] * sp.dim(deg)
        off = zoff[deg][par_deg]
        for i, c in enumerate(v):
            out[off + i] = c
        return out

    # differential
    dblocks: dict[int, RatMatrix] = {}
    for deg in sp.degrees():
        if sp.dim(deg + 1) == 0:
            continue
        cols: list[Vector] = []
        for i in range(a.dim(deg)):
            cols.append(embed_a(deg + 1, a.d(deg, a.basis_vector(deg, i))))
        for par in zpos.get(deg, []):
            for i in range(a.dim(par)):
                x = a.basis_vector(par, i)
                col = [Q(0)] * sp.dim(deg + 1)
                dx = a.d(par, x)
                if any(c != 0 for c in dx) and (par + 1) in zpos.get(deg + 1, []):
                    col = _vec_add(col, embed_z(par + 1, dx))
                if odd:
                    xe = a.mult_vec(par, x, e_deg, e)
                    if any(c != 0 for c in xe):
                        col = _vec_add(col, _vec_scale(embed_a(deg + 1, xe),
                                                       Q(-1) ** (par % 2)))
                cols.append(col)
        m = RatMatrix.from_columns(cols, sp.dim(deg + 1))
        if not m.is_zero():
            dblocks[deg] = m
    cx = CochainComplex(sp, GradedMap(sp, sp, 1, dblocks))

    # products: build per ordered pair of new basis elements
    def piece(deg: int, k: int) -> tuple[str, int, int]:
        """Decode index k in degree deg: ('a', deg, i) or ('z', par, i)."""
        if k < a.dim(deg):
            return ("a", deg, k)
        for par in zpos.get(deg, []):
            off = zoff[deg][par]
            if off <= k < off + a.dim(par):
                return ("z", par, k - off)
        raise AssertionError

    def prod(deg1: int, k1: int, deg2: int, k2: int) -> Vector:
        kind1, d1, i1 = piece(deg1, k1)
        kind2, d2, i2 = piece(deg2, k2)
        tdeg = deg1 + deg2
        out = [Q(0)] * sp.dim(tdeg)
        x = a.basis_vector(d1, i1)
        y = a.basis_vector(d2, i2)
        if kind1 == "a" and kind2 == "a":
            if sp.dim(tdeg) == 0:
                return out
            return embed_a(tdeg, a.mult_vec(d1, x, d2, y))
        if kind1 == "a" and kind2 == "z":
            if (d1 + d2) in zpos.get(tdeg, []):
                return embed_z(d1 + d2, a.mult_vec(d1, x, d2, y))
            return out
        if kind1 == "z" and kind2 == "a":
            # (x.z)*y = (-1)^{|y||z|} x*y.z ; odd z needs the Koszul sign
            sign = Q(-1) ** ((d2 * zdeg) % 2)
            if (d1 + d2) in zpos.get(tdeg, []):
                return _vec_scale(embed_z(d1 + d2, a.mult_vec(d1, x, d2, y)), sign)
            return out
        # z times z
        if odd:
            return out
        xye_deg = d1 + d2 + e_deg
        if xye_deg in zpos.get(tdeg, []):
            xy = a.mult_vec(d1, x, d2, y)
            xye = a.mult_vec(d1 + d2, xy, e_deg, e)
            return embed_z(xye_deg, xye)
        return out

    mult: dict[MultKey, Coeffs] = {}
    degs = [p for p in sp.degrees() if p > 0]
    for p in degs:
        for q in degs:
            if p > q:
                continue
            if a.truncation is not None and p + q > a.truncation:
                continue
            if sp.dim(p + q) == 0:
                continue
            for i in range(sp.dim(p)):
                jstart = i if p == q else 0
                for j in range(jstart, sp.dim(q)):
                    if p == q and i == j and p % 2 == 1:
                        continue
                    v = prod(p, i, q, j)
                    entry = {k: c for k, c in enumerate(v) if c != 0}
                    if entry:
                        mult[(p, i, q, j)] = entry

    return CdgaTable(cx, a.unit, mult,
                     name=f"{a.name}[{('z' if odd else 'zb')}]" if a.name else "")


# ---------------------------------------------------------------------------
# acyclic truncation


def acyclic_truncation(b: CdgaTable, k: int
                       ) -> tuple[CdgaTable, CdgaMorphism, DiffIdeal]:
    """Kill everything in degrees >= k through the ideal J = S + B^{>=k}.

    S is a complement of the cocycles in degree k-1, so J is acyclic and the
    projection is a quasi-iso.  Requires H^{>= k}(B) = 0 on the faithful
    range.
    """
    upto = b.complex.faithful_cohomology_upto()
    if upto is None:
        upto = b.top()
    for p in range(k, upto + 1):
        dim, _ = cohomology(b.complex, p)
        if dim:
            raise InputError(f"H^{p}(B) != 0: acyclic truncation at {k} impossible")

    vectors: dict[int, list[Vector]] = {}
    ker = kernel_basis(b.complex.d.block(k - 1))
    kmat = RatMatrix.from_columns(ker, b.dim(k - 1))
    s_vecs = complement_basis(kmat, b.dim(k - 1))
    if s_vecs:
        vectors[k - 1] = _row_reduce_vectors([list(v) for v in s_vecs])
    for p in b.space.degrees():
        if p >= k:
            vectors[p] = [list(b.basis_vector(p, i)) for i in range(b.dim(p))]
    ideal = DiffIdeal(b, vectors)
    out, proj = quotient_by_ideal(b, ideal)
    return out, proj, ideal


def truncate_table(a: CdgaTable, n: int) -> CdgaTable:
    """Discard all content above degree n and mark the bound."""
    if a.truncation is not None and a.truncation <= n:
        return a
    basis = {p: labels for p, labels in a.space.basis.items() if p <= n}
    sp = GradedSpace(basis, n)
    dblocks = {p: m for p, m in a.complex.d.blocks.items() if p + 1 <= n}
    cx = CochainComplex(sp, GradedMap(sp, sp, 1, dblocks))
    mult = {key: dict(v) for key, v in a.mult.items() if key[0] + key[2] <= n}
    return CdgaTable(cx, a.unit, mult, name=a.name)
