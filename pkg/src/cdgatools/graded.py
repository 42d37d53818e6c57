"""Graded vector spaces, graded maps and cochain complexes over Q.

Sign conventions (used consistently everywhere; do not re-derive locally):

  suspension      (s^k V)^p = V^{k+p};  d(s^k x) = (-1)^k s^k (d x)
                  one negation per single suspension applied.
  shifted dual    D := s^{-n}#V with D^p = dual of V^{n-p};
                  (d f)(x) = (-1)^{n+|f|} f(d x)   for f in D^{|f|}.
  dual action     (a.f)(m) = (-1)^{|a||f| + (n+1)|a|} f(a.m)   (see dgmodule).
  cone action     a.(s m) = (-1)^{|a|} s(a.m)                  (see dgmodule).

The shifted-dual and dual-action signs are pinned by one invariant: the
duality map theta(y) = eps(-.y) of an oriented algebra must be a chain map
and action-equivariant in every dimension n.  Writing the dual differential
as sigma(q) f(dx) and the action sign as (-1)^{|a|q + c|a|}, associativity of
the action forces sigma(q) = (-1)^{q+c+1}, the chain-map condition for theta
forces sigma(q) = (-1)^{n+q}, hence c = n+1.  For odd n this collapses to the
textbook convention (df)(x) = -(-1)^{|f|} f(dx).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence

from .linalg import (
    Q,
    RatMatrix,
    Vector,
    complement_within,
    kernel_basis,
    rank,
)


class TruncationError(ValueError):
    """An operation was asked to certify degrees outside the faithful range."""


class InputError(ValueError):
    """Malformed or inconsistent input data."""


@dataclass(frozen=True)
class GradedSpace:
    """Finite-type graded Q-vector space with labelled basis.

    basis maps degree -> tuple of labels; degrees with no entry are zero.
    truncation is the faithfulness bound N: content above N is discarded and
    unknown.  None means the space is complete (exact in every degree).
    Negative degrees are only legal when negative_ok is set; they arise
    inside suspended duals and mapping cones, never in algebra tables.
    """

    basis: dict[int, tuple[str, ...]]
    truncation: int | None = None
    negative_ok: bool = False

    def __post_init__(self):
        for p, labels in self.basis.items():
            if not labels:
                raise InputError(f"degree {p} present but empty; omit it")
            if len(set(labels)) != len(labels):
                raise InputError(f"duplicate label in degree {p}")
            if p < 0 and not self.negative_ok:
                raise InputError(f"negative degree {p} in an untagged space")
            if self.truncation is not None and p > self.truncation:
                raise InputError(
                    f"content in degree {p} above truncation {self.truncation}"
                )

    def dim(self, p: int) -> int:
        return len(self.basis.get(p, ()))

    def degrees(self) -> list[int]:
        return sorted(d for d in self.basis)

    def top(self) -> int:
        return max(self.basis) if self.basis else 0

    def bottom(self) -> int:
        return min(self.basis) if self.basis else 0

    def total_dim(self) -> int:
        return sum(len(v) for v in self.basis.values())

    def labels(self, p: int) -> tuple[str, ...]:
        return self.basis.get(p, ())

    def index_of(self, p: int, label: str) -> int:
        try:
            return self.basis[p].index(label)
        except (KeyError, ValueError):
            raise InputError(f"no basis label {label!r} in degree {p}") from None

    def faithful_upto(self) -> int | None:
        """Largest degree whose content is exact, None meaning all degrees."""
        return self.truncation

    def is_zero(self) -> bool:
        return not self.basis


def zero_vector(space: GradedSpace, p: int) -> Vector:
    return [Q(0)] * space.dim(p)


@dataclass(frozen=True)
class GradedMap:
    """Degree-homogeneous linear map between graded spaces.

    blocks[p] sends coordinates in source degree p to target degree
    p + degree.  Missing blocks are zero; stored blocks must have matching
    shapes.
    """

    source: GradedSpace
    target: GradedSpace
    degree: int
    blocks: dict[int, RatMatrix] = field(default_factory=dict)

    def __post_init__(self):
        for p, m in self.blocks.items():
            if m.cols != self.source.dim(p) or m.rows != self.target.dim(p + self.degree):
                raise InputError(
                    f"block at degree {p} has shape {m.rows}x{m.cols}, "
                    f"expected {self.target.dim(p + self.degree)}x{self.source.dim(p)}"
                )

    def block(self, p: int) -> RatMatrix:
        if p in self.blocks:
            return self.blocks[p]
        return RatMatrix(self.target.dim(p + self.degree), self.source.dim(p))

    def apply(self, p: int, v: Sequence) -> Vector:
        return self.block(p).apply(v)

    def compose(self, other: "GradedMap") -> "GradedMap":
        """self after other."""
        if other.target.basis != self.source.basis:
            raise InputError("composition: middle spaces disagree")
        blocks = {}
        for p in other.source.degrees():
            m = self.block(p + other.degree) @ other.block(p)
            if not m.is_zero():
                blocks[p] = m
        return GradedMap(other.source, self.target, self.degree + other.degree, blocks)

    def is_zero(self) -> bool:
        return all(m.is_zero() for m in self.blocks.values())

    def equals(self, other: "GradedMap") -> bool:
        if self.degree != other.degree:
            return False
        for p in set(self.source.degrees()) | set(other.source.degrees()):
            if self.block(p) != other.block(p):
                return False
        return True


def identity_map(space: GradedSpace) -> GradedMap:
    blocks = {p: RatMatrix.identity(space.dim(p)) for p in space.degrees()}
    return GradedMap(space, space, 0, blocks)


@dataclass(frozen=True)
class CochainComplex:
    """Graded space with a degree +1 differential.

    d^2 = 0 is not enforced here: validators report violations with a
    witness, so a parsed document with a bad differential still builds
    and gets a readable failure instead of a constructor crash.
    """

    space: GradedSpace
    d: GradedMap

    def __post_init__(self):
        if self.d.degree != 1:
            raise InputError("differential must have degree +1")
        if self.d.source is not self.space and self.d.source.basis != self.space.basis:
            raise InputError("differential source must be the underlying space")

    def d_square_witness(self) -> int | None:
        """First degree where d^2 fails within the faithful range, if any."""
        n = self.space.truncation
        for p in self.space.degrees():
            if n is not None and p + 1 > n:
                continue
            if not (self.d.block(p + 1) @ self.d.block(p)).is_zero():
                return p
        return None

    def dim(self, p: int) -> int:
        return self.space.dim(p)

    def faithful_cohomology_upto(self) -> int | None:
        """Cohomology in degree p is exact for p <= this bound (None: all)."""
        n = self.space.truncation
        return None if n is None else n - 1


def cocycle_basis(c: CochainComplex, p: int) -> list[Vector]:
    return kernel_basis(c.d.block(p))


def cohomology(c: CochainComplex, p: int) -> tuple[int, list[Vector]]:
    """Dimension and representative cocycles of H^p.

    Representatives are the first-pivot choice: kernel basis vectors of d_p,
    kept greedily while independent modulo the coboundaries.

    Raises:
        TruncationError: when p is above the faithful cohomology range.
    """
    bound = c.faithful_cohomology_upto()
    if bound is not None and p > bound:
        raise TruncationError(
            f"H^{p} not certified: truncation {c.space.truncation} "
            f"only supports degrees <= {bound}"
        )
    cycles = cocycle_basis(c, p)
    if not cycles:
        return 0, []
    dim_p = c.dim(p)
    bdry = c.d.block(p - 1)
    im = RatMatrix.from_columns([bdry.column(j) for j in range(bdry.cols)], dim_p)
    reps = complement_within(im, RatMatrix.from_columns(cycles, dim_p))
    return len(reps), reps


def cohomology_dims(c: CochainComplex, upto: int | None = None) -> dict[int, int]:
    """All cohomology dimensions through degree `upto`, as a contiguous dict.

    Defaults to the whole faithful range (top degree for complete complexes).
    """
    bound = c.faithful_cohomology_upto()
    if upto is None:
        upto = c.space.top() if bound is None else bound
    if bound is not None and upto > bound:
        raise TruncationError(f"cohomology through {upto} exceeds faithful bound {bound}")
    out: dict[int, int] = {}
    lo = min(c.space.bottom(), 0)
    for p in range(lo, upto + 1):
        out[p] = cohomology(c, p)[0]
    return out


def suspend_space(space: GradedSpace, k: int) -> GradedSpace:
    basis = {p - k: labels for p, labels in space.basis.items()}
    trunc = None if space.truncation is None else space.truncation - k
    neg = space.negative_ok or any(p < 0 for p in basis)
    return GradedSpace(basis, trunc, neg)


def suspend(c: CochainComplex, k: int) -> CochainComplex:
    """k-th suspension: (s^k V)^p = V^{k+p}, differential negated k times."""
    sp = suspend_space(c.space, k)
    sign = Q(-1) ** (k % 2)
    blocks = {p - k: m.scale(sign) for p, m in c.d.blocks.items()}
    return CochainComplex(sp, GradedMap(sp, sp, 1, blocks))


def dual_label(label: str) -> str:
    return label + "'"


def shifted_dual(c: CochainComplex, n: int) -> CochainComplex:
    """The shifted dual s^{-n}#V as one operation.

    Degree p of the result is dual to V's degree n-p, with differential
    (d f)(x) = (-1)^{n+|f|} f(d x).  Blockwise this is the transpose of the
    input differential with that sign.  The input must be complete
    (truncation None): a truncated space has unknown content, so its dual
    would be wrong in low degrees rather than merely truncated.
    """
    if c.space.truncation is not None:
        raise TruncationError("shifted_dual requires a complete complex")
    basis = {
        n - p: tuple(dual_label(x) for x in labels)
        for p, labels in c.space.basis.items()
    }
    neg = any(p < 0 for p in basis)
    sp = GradedSpace(basis, None, neg)
    blocks: dict[int, RatMatrix] = {}
    for p in sp.degrees():
        # d: D^p -> D^{p+1} is the transpose of d_V: V^{n-p-1} -> V^{n-p}
        t = c.d.block(n - p - 1).transpose()
        if t.rows == 0 or t.cols == 0 or t.is_zero():
            continue
        blocks[p] = t.scale(Q(-1) ** ((n + p) % 2))
    return CochainComplex(sp, GradedMap(sp, sp, 1, blocks))


def shifted_dual_map(f: GradedMap, source: CochainComplex, target: CochainComplex,
                     n: int) -> GradedMap:
    """s^{-n}#f for a degree-0 chain map f: source -> target.

    Returns the contravariant map dual(target) -> dual(source); for degree-0
    maps the Koszul sign is trivial, so blocks are plain transposes.
    """
    if f.degree != 0:
        raise InputError("shifted_dual_map expects a degree-0 map")
    dt = shifted_dual(target, n)
    ds = shifted_dual(source, n)
    blocks = {}
    for p in dt.space.degrees():
        t = f.block(n - p).transpose()
        if not t.is_zero():
            blocks[p] = t
    return GradedMap(dt.space, ds.space, 0, blocks)


def relabel(space: GradedSpace, prefix: str) -> GradedSpace:
    basis = {p: tuple(prefix + x for x in labels) for p, labels in space.basis.items()}
    return replace(space, basis=basis)


def map_on_cohomology(f: GradedMap, source: CochainComplex,
                      target: CochainComplex, p: int) -> RatMatrix:
    """Induced map H^p(source) -> H^p(target) in representative coordinates."""
    _, src_reps = cohomology(source, p)
    dim_t, tgt_reps = cohomology(target, p)
    bdry = target.d.block(p - 1)
    dim_tp = target.dim(p)
    sys = RatMatrix.from_columns(
        tgt_reps + [bdry.column(j) for j in range(bdry.cols)], dim_tp
    )
    cols: list[Vector] = []
    from .linalg import preimage

    for r in src_reps:
        img = f.apply(p, r)
        coeffs = preimage(sys, img)
        if coeffs is None:
            raise InputError("image of a cocycle is not a cocycle mod boundaries")
        cols.append(coeffs[: dim_t])
    return RatMatrix.from_columns(cols, dim_t)


def is_quasi_iso_complexes(f: GradedMap, source: CochainComplex,
                           target: CochainComplex) -> tuple[bool, dict]:
    """H(f) bijective in every degree of the common faithful range.

    Returns (ok, witness): on failure the witness names the first bad degree
    and the dimensions involved.
    """
    bs = source.faithful_cohomology_upto()
    bt = target.faithful_cohomology_upto()
    hi = max(source.space.top(), target.space.top())
    for b in (bs, bt):
        if b is not None:
            hi = min(hi, b)
    lo = min(source.space.bottom(), target.space.bottom(), 0)
    if hi < lo and (source.space.basis or target.space.basis):
        raise TruncationError("no common faithful degree range to compare")
    for p in range(lo, hi + 1):
        ds, _ = cohomology(source, p)
        dt, _ = cohomology(target, p)
        if ds != dt:
            return False, {"degree": p, "source_dim": ds, "target_dim": dt}
        if ds == 0:
            continue
        m = map_on_cohomology(f, source, target, p)
        if rank(m) != ds:
            return False, {"degree": p, "source_dim": ds, "target_dim": dt,
                           "rank": rank(m)}
    return True, {"compared_upto": hi}
