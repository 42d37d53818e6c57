"""Differential graded modules over a CDGA table, and their mapping cones.

Sign conventions live in one place (the graded module docstring) and are
applied here without re-derivation: a suspension s^k costs (-1)^k on the
differential and (-1)^{k|a|} on the action, the shifted dual twists the
action by (-1)^{|a||f| + (n+1)|a|}, and the cone of f : M -> N is N + sM
with d(s m) = -s(dm) and the component f(m) feeding the N part.

The cone of a module map is allowed to carry content in negative degrees
(suspending a module that starts in degree 0 does that); the semi-trivial
cone of a map into the regular module is an algebra, so there the suspended
content below degree 0 is cut away, which keeps a subcomplex and a
subalgebra.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .cdga import CdgaMorphism, CdgaTable, Coeffs, MultKey, ValidationFailure, ValidationResult
from .graded import (
    CochainComplex,
    GradedMap,
    GradedSpace,
    InputError,
    shifted_dual,
)
from .linalg import Q, RatMatrix, Vector


@dataclass
class DgModule:
    """Module over a CdgaTable, with the action stored like a mult table.

    Keys are (algebra degree, algebra index, module degree, module index);
    the unit action is implicit and never stored.
    """

    algebra: CdgaTable
    complex: CochainComplex
    action: dict[tuple[int, int, int, int], Coeffs] = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        for (q, i, p, j), coeffs in self.action.items():
            if q <= 0:
                raise InputError("unit action is implicit; store positive degrees only")
            for k in coeffs:
                if not (0 <= k < self.dim(p + q)):
                    raise InputError(f"action index {k} out of range in degree {p+q}")

    @property
    def space(self) -> GradedSpace:
        return self.complex.space

    def dim(self, p: int) -> int:
        return self.space.dim(p)

    def labels(self, p: int) -> tuple[str, ...]:
        return self.space.labels(p)

    def d(self, p: int, v: Sequence) -> Vector:
        return self.complex.d.apply(p, v)

    def act_basis(self, q: int, i: int, p: int, j: int) -> Coeffs:
        if q == 0:
            return {j: Q(1)}
        bound = self.space.truncation
        if bound is not None and p + q > bound:
            return {}
        entry = self.action.get((q, i, p, j))
        return dict(entry) if entry else {}

    def act(self, q: int, a: Sequence, p: int, m: Sequence) -> Vector:
        """a.m for a in the algebra, m in the module."""
        out = [Q(0)] * self.dim(p + q)
        for i, c in enumerate(a):
            if c == 0:
                continue
            for j, b in enumerate(m):
                if b == 0:
                    continue
                for k, s in self.act_basis(q, i, p, j).items():
                    out[k] += c * b * s
        return out

    def basis_vector(self, p: int, i: int) -> Vector:
        v = [Q(0)] * self.dim(p)
        v[i] = Q(1)
        return v


def self_module(a: CdgaTable) -> DgModule:
    """A acting on itself by multiplication."""
    action: dict[tuple[int, int, int, int], Coeffs] = {}
    degs = [p for p in a.space.degrees() if p > 0]
    for q in degs:
        for p in a.space.degrees():
            for i in range(a.dim(q)):
                for j in range(a.dim(p)):
                    c = a.mult_basis(q, i, p, j)
                    if c:
                        action[(q, i, p, j)] = c
    return DgModule(a, a.complex, action, name=a.name)


def validate_module(m: DgModule) -> ValidationResult:
    """Leibniz and associativity for the action, plus d^2, with witnesses."""
    fails: list[ValidationFailure] = []
    a = m.algebra
    bounds = [x for x in (a.truncation, m.space.truncation) if x is not None]
    bound = min(bounds) if bounds else None

    for p in m.space.degrees():
        if bound is not None and p + 1 > bound:
            continue
        sq = m.complex.d.block(p + 1) @ m.complex.d.block(p)
        if not sq.is_zero():
            fails.append(ValidationFailure("d-squared", p, m.labels(p)[0]))

    adegs = [q for q in a.space.degrees() if q > 0]
    for q in adegs:
        for p in m.space.degrees():
            if bound is not None and p + q + 1 > bound:
                continue
            for i in range(a.dim(q)):
                x = a.basis_vector(q, i)
                dx = a.d(q, x)
                for j in range(m.dim(p)):
                    v = m.basis_vector(p, j)
                    lhs = m.d(p + q, m.act(q, x, p, v))
                    rhs = m.act(q + 1, dx, p, v)
                    rhs = [r + Q(-1) ** (q % 2) * s
                           for r, s in zip(rhs, m.act(q, x, p + 1, m.d(p, v)))]
                    if lhs != rhs:
                        fails.append(ValidationFailure(
                            "leibniz", p + q + 1,
                            f"({a.labels(q)[i]}, {m.labels(p)[j]})",
                            "d(a.m) != da.m + (-1)^|a| a.dm"))

    for q1 in adegs:
        for q2 in adegs:
            for p in m.space.degrees():
                if bound is not None and p + q1 + q2 > bound:
                    continue
                if m.dim(p + q1 + q2) == 0:
                    continue
                for i1 in range(a.dim(q1)):
                    x = a.basis_vector(q1, i1)
                    for i2 in range(a.dim(q2)):
                        y = a.basis_vector(q2, i2)
                        xy = a.mult_vec(q1, x, q2, y)
                        for j in range(m.dim(p)):
                            v = m.basis_vector(p, j)
                            lhs = m.act(q1 + q2, xy, p, v)
                            rhs = m.act(q1, x, p + q2, m.act(q2, y, p, v))
                            if lhs != rhs:
                                fails.append(ValidationFailure(
                                    "associativity", p + q1 + q2,
                                    f"({a.labels(q1)[i1]}, {a.labels(q2)[i2]}, "
                                    f"{m.labels(p)[j]})"))
    return ValidationResult(not fails, tuple(fails))


def restrict_scalars(f: CdgaMorphism, m: DgModule) -> DgModule:
    """View a module over the target of f as a module over its source."""
    if m.algebra is not f.target:
        raise InputError("module is not over the target of the morphism")
    b = f.source
    action: dict[tuple[int, int, int, int], Coeffs] = {}
    for q in b.space.degrees():
        if q == 0:
            continue
        for i in range(b.dim(q)):
            img = f.apply(q, b.basis_vector(q, i))
            for p in m.space.degrees():
                if m.dim(p + q) == 0:
                    continue
                for j in range(m.dim(p)):
                    out = m.act(q, img, p, m.basis_vector(p, j))
                    entry = {k: c for k, c in enumerate(out) if c != 0}
                    if entry:
                        action[(q, i, p, j)] = entry
    return DgModule(b, m.complex, action, name=m.name)


def suspend_module(m: DgModule, k: int, prefix: str = "s.") -> DgModule:
    """s^k M: degrees drop by k, d picks up (-1)^k, the action (-1)^{k|a|}."""
    basis = {p - k: tuple(prefix + x for x in labels)
             for p, labels in m.space.basis.items()}
    trunc = m.space.truncation
    sp = GradedSpace(basis, None if trunc is None else trunc - k,
                     negative_ok=True)
    sgn = Q(-1) ** (k % 2)
    blocks = {p - k: mat.scale(sgn) for p, mat in m.complex.d.blocks.items()}
    cx = CochainComplex(sp, GradedMap(sp, sp, 1, blocks))
    action: dict[tuple[int, int, int, int], Coeffs] = {}
    for (q, i, p, j), coeffs in m.action.items():
        s = Q(-1) ** ((k * q) % 2)
        action[(q, i, p - k, j)] = {idx: s * c for idx, c in coeffs.items()}
    return DgModule(m.algebra, cx, action, name=f"s^{k}{m.name}" if m.name else "")


def shifted_dual_module(m: DgModule, n: int) -> DgModule:
    """The shifted dual s^{-n} Hom(M, Q) with the twisted action.

    (a.f)(x) = (-1)^{|a||f| + (n+1)|a|} f(a.x); blockwise this reads off the
    transpose of the action against the dual bases.  Requires a complete
    module: duality inverts the direction of the differential, so any
    truncation would poison low degrees.
    """
    cx = shifted_dual(m.complex, n)
    sp = cx.space
    a = m.algebra
    action: dict[tuple[int, int, int, int], Coeffs] = {}
    for q in a.space.degrees():
        if q == 0:
            continue
        for p in sp.degrees():
            src = n - p            # f dual to basis of M^{n-p}
            tgt = n - p - q        # a.f dual to basis of M^{n-p-q}
            if sp.dim(p + q) == 0 or m.dim(src) == 0 or m.dim(tgt) == 0:
                continue
            sign = Q(-1) ** ((q * p + (n + 1) * q) % 2)
            for i in range(a.dim(q)):
                x = a.basis_vector(q, i)
                for j in range(m.dim(src)):
                    entry: Coeffs = {}
                    for k in range(m.dim(tgt)):
                        ax = m.act(q, x, tgt, m.basis_vector(tgt, k))
                        if ax[j] != 0:
                            entry[k] = sign * ax[j]
                    if entry:
                        action[(q, i, p, j)] = entry
    return DgModule(a, cx, action, name=f"D{m.name}" if m.name else "")


@dataclass
class DgModuleMap:
    """Map of modules over one algebra, given by blocks of a fixed degree."""

    source: DgModule
    target: DgModule
    map: GradedMap
    name: str = ""

    def __post_init__(self):
        if self.source.algebra is not self.target.algebra:
            raise InputError("module maps need both sides over the same algebra")

    def apply(self, p: int, v: Sequence) -> Vector:
        return self.map.apply(p, v)

    @property
    def degree(self) -> int:
        return self.map.degree

    def compose(self, other: "DgModuleMap") -> "DgModuleMap":
        return DgModuleMap(other.source, self.target, self.map.compose(other.map))


def validate_module_map(f: DgModuleMap) -> ValidationResult:
    """Chain property and A-equivariance, with the (-1)^{k|a|} degree twist."""
    fails: list[ValidationFailure] = []
    a = f.source.algebra
    src, tgt = f.source, f.target
    k = f.degree
    bounds = [x for x in (src.space.truncation, tgt.space.truncation)
              if x is not None]
    for p in src.space.degrees():
        if bounds and p + 1 + k > min(bounds):
            continue
        for i in range(src.dim(p)):
            v = src.basis_vector(p, i)
            lhs = f.apply(p + 1, src.d(p, v))
            rhs = [Q(-1) ** (k % 2) * x for x in tgt.d(p + k, f.apply(p, v))]
            if lhs != rhs:
                fails.append(ValidationFailure(
                    "chain", p, src.labels(p)[i], "f(dm) != (-1)^k d(f(m))"))
    for q in a.space.degrees():
        if q == 0:
            continue
        for p in src.space.degrees():
            if bounds and p + q + k > min(bounds):
                continue
            if src.dim(p + q) == 0 and tgt.dim(p + q + k) == 0:
                continue
            for i in range(a.dim(q)):
                x = a.basis_vector(q, i)
                for j in range(src.dim(p)):
                    v = src.basis_vector(p, j)
                    lhs = f.apply(p + q, src.act(q, x, p, v))
                    rhs = [Q(-1) ** ((k * q) % 2) * y
                           for y in tgt.act(q, x, p + k, f.apply(p, v))]
                    if lhs != rhs:
                        fails.append(ValidationFailure(
                            "equivariance", p + q,
                            f"({a.labels(q)[i]}, {src.labels(p)[j]})",
                            "f(a.m) != (-1)^{k|a|} a.f(m)"))
    return ValidationResult(not fails, tuple(fails))


def shifted_dual_map(f: DgModuleMap, n: int, name: str = "") -> DgModuleMap:
    """s^{-n}#f between the shifted duals, plain blockwise transposes.

    Contravariant: a degree-0 map N <- M dualises to DM -> DN.  No signs
    appear for degree-0 maps under this convention.
    """
    if f.degree != 0:
        raise InputError("only degree-0 maps dualise without extra signs here")
    dsrc = shifted_dual_module(f.target, n)
    dtgt = shifted_dual_module(f.source, n)
    blocks: dict[int, RatMatrix] = {}
    for p in dsrc.space.degrees():
        t = f.map.block(n - p).transpose()
        if not t.is_zero():
            blocks[p] = t
    gm = GradedMap(dsrc.space, dtgt.space, 0, blocks)
    return DgModuleMap(dsrc, dtgt, gm, name=name or (f"D{f.name}" if f.name else ""))


# ---------------------------------------------------------------------------
# mapping cones


def mapping_cone(f: DgModuleMap
                 ) -> tuple[DgModule, DgModuleMap, GradedMap]:
    """C(f) = N + sM for f : M -> N, with the inclusion of N and the
    projection onto sM.

    Cone degrees run as low as the suspension pushes them; module cones keep
    that content, so the long exact sequence in cohomology is on the nose.
    """
    if f.degree != 0:
        raise InputError("mapping cones are for degree-0 maps")
    msrc, n = f.source, f.target
    sm = suspend_module(msrc, 1)

    degrees = sorted(set(n.space.degrees()) | set(sm.space.degrees()))
    basis = {}
    for p in degrees:
        labs = tuple(n.labels(p)) + tuple(sm.labels(p))
        if labs:
            basis[p] = labs
    bounds = [x for x in (n.space.truncation, sm.space.truncation)
              if x is not None]
    sp = GradedSpace(basis, min(bounds) if bounds else None, negative_ok=True)

    def embed_n(p: int, v: Sequence) -> Vector:
        out = [Q(0)] * sp.dim(p)
        for i, c in enumerate(v):
            out[i] = c
        return out

    def embed_s(p: int, v: Sequence) -> Vector:
        out = [Q(0)] * sp.dim(p)
        off = n.dim(p)
        for i, c in enumerate(v):
            out[off + i] = c
        return out

    dblocks: dict[int, RatMatrix] = {}
    for p in sp.degrees():
        if sp.dim(p + 1) == 0:
            continue
        cols: list[Vector] = []
        for i in range(n.dim(p)):
            cols.append(embed_n(p + 1, n.d(p, n.basis_vector(p, i))))
        for i in range(sm.dim(p)):
            # s m sits in cone degree p with m in M^{p+1}
            col = embed_s(p + 1, sm.d(p, sm.basis_vector(p, i)))
            fm = f.apply(p + 1, msrc.basis_vector(p + 1, i))
            col = [x + y for x, y in zip(col, embed_n(p + 1, fm))]
            cols.append(col)
        mmat = RatMatrix.from_columns(cols, sp.dim(p + 1))
        if not mmat.is_zero():
            dblocks[p] = mmat
    cx = CochainComplex(sp, GradedMap(sp, sp, 1, dblocks))

    a = f.source.algebra
    action: dict[tuple[int, int, int, int], Coeffs] = {}
    for q in a.space.degrees():
        if q == 0:
            continue
        for p in sp.degrees():
            if sp.dim(p + q) == 0:
                continue
            for i in range(a.dim(q)):
                x = a.basis_vector(q, i)
                for j in range(sp.dim(p)):
                    if j < n.dim(p):
                        out = embed_n(p + q, n.act(q, x, p, n.basis_vector(p, j)))
                    else:
                        jj = j - n.dim(p)
                        out = embed_s(p + q,
                                      sm.act(q, x, p, sm.basis_vector(p, jj)))
                    entry = {k: c for k, c in enumerate(out) if c != 0}
                    if entry:
                        action[(q, i, p, j)] = entry
    cone = DgModule(a, cx, action,
                    name=f"C({f.name})" if f.name else "cone")

    iblocks = {p: RatMatrix.from_columns(
        [embed_n(p, n.basis_vector(p, i)) for i in range(n.dim(p))], sp.dim(p))
        for p in n.space.degrees() if n.dim(p)}
    incl = DgModuleMap(n, cone, GradedMap(n.space, sp, 0, iblocks), name="incl")

    pblocks: dict[int, RatMatrix] = {}
    for p in sp.degrees():
        if sm.dim(p) == 0:
            continue
        cols = []
        for j in range(sp.dim(p)):
            v = [Q(0)] * sm.dim(p)
            if j >= n.dim(p):
                v[j - n.dim(p)] = Q(1)
            cols.append(v)
        pblocks[p] = RatMatrix.from_columns(cols, sm.dim(p))
    proj = GradedMap(sp, sm.space, 0, pblocks)
    return cone, incl, proj


def is_balanced(f: DgModuleMap, use_shortcut: bool = True
                ) -> tuple[bool, dict]:
    """Whether f(x).y = (-1)^{|x||y|} f(y).x for all x, y in the source.

    f must land in the regular module.  When the source is concentrated in
    [r, 2r) every product in sight lands above the top degree, so the
    condition holds for free; the returned dict says which path decided.
    """
    msrc = f.source
    _require_regular_target(f)
    degs = [p for p in msrc.space.degrees() if msrc.dim(p) > 0]
    if not degs:
        return True, {"shortcut": False}
    lo = min(degs)
    if use_shortcut and lo >= 1 and max(degs) < 2 * lo:
        return True, {"shortcut": True, "window": [lo, 2 * lo]}
    for p in degs:
        for q in degs:
            if p > q:
                continue
            for i in range(msrc.dim(p)):
                jstart = i if p == q else 0
                for j in range(jstart, msrc.dim(q)):
                    x = msrc.basis_vector(p, i)
                    y = msrc.basis_vector(q, j)
                    lhs = msrc.act(p, f.apply(p, x), q, y)
                    rhs = msrc.act(q, f.apply(q, y), p, x)
                    sgn = Q(-1) ** ((p * q) % 2)
                    if lhs != [sgn * t for t in rhs]:
                        return False, {
                            "shortcut": False,
                            "witness": [msrc.labels(p)[i], msrc.labels(q)[j]],
                            "degrees": [p, q],
                        }
    return True, {"shortcut": False}


def _require_regular_target(f: DgModuleMap):
    a = f.source.algebra
    tsp = f.target.space
    if tsp.basis != a.space.basis:
        raise InputError("balancedness needs a map into the algebra itself")


def semi_trivial_cone(f: DgModuleMap, name: str = ""
                      ) -> tuple[CdgaTable, CdgaMorphism, GradedMap]:
    """The cone R + sM of f : M -> R with the square-zero product on sM.

    Products: R acts on sM through (-1)^{|r|} s(r.m) and (sM)(sM) = 0.  The
    result is graded-commutative always; Leibniz holds exactly when f is
    balanced, and validate_cdga will say so pair by pair if it is not.
    Suspended content below degree 0 is cut away (a subalgebra and a
    subcomplex, since d raises degree).
    """
    r = f.source.algebra
    _require_regular_target(f)
    msrc = f.source
    sm = suspend_module(msrc, 1)

    degrees = sorted(set(r.space.degrees())
                     | {p for p in sm.space.degrees() if p >= 0})
    basis = {}
    for p in degrees:
        labs = tuple(r.labels(p)) + tuple(sm.labels(p))
        if labs:
            basis[p] = labs
    bounds = [x for x in (r.truncation, sm.space.truncation) if x is not None]
    sp = GradedSpace(basis, min(bounds) if bounds else None)

    def rdim(p: int) -> int:
        return r.dim(p)

    def embed_r(p: int, v: Sequence) -> Vector:
        out = [Q(0)] * sp.dim(p)
        for i, c in enumerate(v):
            out[i] = c
        return out

    def embed_s(p: int, v: Sequence) -> Vector:
        out = [Q(0)] * sp.dim(p)
        off = rdim(p)
        for i, c in enumerate(v):
            out[off + i] = c
        return out

    dblocks: dict[int, RatMatrix] = {}
    for p in sp.degrees():
        if sp.dim(p + 1) == 0:
            continue
        cols: list[Vector] = []
        for i in range(rdim(p)):
            cols.append(embed_r(p + 1, r.d(p, r.basis_vector(p, i))))
        for i in range(sm.dim(p)):
            col = embed_s(p + 1, sm.d(p, sm.basis_vector(p, i)))
            fm = f.apply(p + 1, msrc.basis_vector(p + 1, i))
            col = [x + y for x, y in zip(col, embed_r(p + 1, fm))]
            cols.append(col)
        mmat = RatMatrix.from_columns(cols, sp.dim(p + 1))
        if not mmat.is_zero():
            dblocks[p] = mmat
    cx = CochainComplex(sp, GradedMap(sp, sp, 1, dblocks))

    def prod(p: int, i: int, q: int, j: int) -> Vector:
        i_in_r, j_in_r = i < rdim(p), j < rdim(q)
        out = [Q(0)] * sp.dim(p + q)
        if i_in_r and j_in_r:
            return embed_r(p + q, a_mult(p, i, q, j))
        if i_in_r and not j_in_r:
            rm = sm.act(p, r.basis_vector(p, i), q,
                        sm.basis_vector(q, j - rdim(q)))
            return embed_s(p + q, rm)
        if not i_in_r and j_in_r:
            rm = sm.act(q, r.basis_vector(q, j), p,
                        sm.basis_vector(p, i - rdim(p)))
            sgn = Q(-1) ** ((p * q) % 2)
            return [sgn * c for c in embed_s(p + q, rm)]
        return out

    def a_mult(p: int, i: int, q: int, j: int) -> Vector:
        out = [Q(0)] * rdim(p + q)
        for k, c in r.mult_basis(p, i, q, j).items():
            out[k] = c
        return out

    mult: dict[MultKey, Coeffs] = {}
    degs = [p for p in sp.degrees() if p > 0]
    bound = sp.truncation
    for p in degs:
        for q in degs:
            if p > q:
                continue
            if bound is not None and p + q > bound:
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

    cone = CdgaTable(cx, r.unit, mult, name=name or
                     (f"{r.name}+s{msrc.name}" if r.name else ""))

    iblocks = {p: RatMatrix.from_columns(
        [embed_r(p, r.basis_vector(p, i)) for i in range(rdim(p))], sp.dim(p))
        for p in r.space.degrees() if rdim(p)}
    incl = CdgaMorphism(r, cone, GradedMap(r.space, sp, 0, iblocks), name="incl")

    pblocks: dict[int, RatMatrix] = {}
    for p in sp.degrees():
        if sm.dim(p) == 0 or p < 0:
            continue
        cols = []
        for j in range(sp.dim(p)):
            v = [Q(0)] * sm.dim(p)
            if j >= rdim(p):
                v[j - rdim(p)] = Q(1)
            cols.append(v)
        pblocks[p] = RatMatrix.from_columns(cols, sm.dim(p))
    sm_nonneg = GradedSpace(
        {p: labs for p, labs in sm.space.basis.items() if p >= 0},
        sm.space.truncation)
    proj = GradedMap(sp, sm_nonneg, 0,
                     {p: m for p, m in pblocks.items() if p in sm_nonneg.basis})
    return cone, incl, proj
