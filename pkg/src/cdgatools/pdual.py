"""Poincare duality for CDGA tables: orientations, pairings and orphans.

An orientation in formal dimension n is a functional on degree n that kills
the boundaries and hits cohomology; theta sends y to eps(- * y) and duality
holds when every theta block is square and invertible.  The orphan ideal
collects everything theta kills, degree by degree, together with all content
above n; it is a differential ideal for free, by Leibniz and the boundary
condition on eps.

kill_orphans_in_degree repairs the lowest orphan degree p by adjoining
transient pairs u_i -> ub_i against a basis of the orphans, then extends eps
by six explicit values.  The bookkeeping only closes up when no orphan sits
below p, no orphan in degree p is closed, and n >= 2p + 3 (so products of
two new generators fall outside the kept range); the function checks all
three and refuses otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .cdga import (
    CdgaMorphism,
    CdgaTable,
    Coeffs,
    DiffIdeal,
    MultKey,
    quotient_by_ideal,
    truncate_table,
)
from .dgmodule import DgModule, DgModuleMap, self_module, shifted_dual_module
from .graded import (
    CochainComplex,
    GradedMap,
    GradedSpace,
    InputError,
    cohomology,
)
from .linalg import (
    Q,
    RatMatrix,
    Vector,
    complement_basis,
    inverse,
    kernel_basis,
    preimage,
    rank,
    signature_of_symmetric,
)


def eval_functional(eps: Sequence, v: Sequence) -> Fraction:
    return sum((a * b for a, b in zip(eps, v)), Q(0))


def pairing_block(a: CdgaTable, n: int, eps: Sequence, p: int) -> RatMatrix:
    """Matrix of eps(x * y) over x in A^{n-p} (rows), y in A^p (columns)."""
    rows, cols = a.dim(n - p), a.dim(p)
    m = RatMatrix(rows, cols)
    for j in range(cols):
        y = a.basis_vector(p, j)
        for k in range(rows):
            prod = a.mult_vec(n - p, a.basis_vector(n - p, k), p, y)
            m.data[k][j] = eval_functional(eps, prod)
    return m


def is_orientation(a: CdgaTable, n: int, eps: Sequence) -> tuple[bool, dict]:
    """Functional on degree n, vanishing on boundaries, onto in cohomology."""
    if a.truncation is not None and a.truncation < n + 1:
        return False, {"reason": f"table must be faithful through degree {n + 1}"}
    if len(eps) != a.dim(n):
        return False, {"reason": f"functional has wrong length for degree {n}"}
    if all(c == 0 for c in eps):
        return False, {"reason": "zero functional"}
    bd = a.complex.d.block(n - 1)
    for j in range(bd.cols):
        if eval_functional(eps, bd.column(j)) != 0:
            return False, {"reason": "does not vanish on boundaries",
                           "witness": a.labels(n - 1)[j]}
    for z in kernel_basis(a.complex.d.block(n)):
        if eval_functional(eps, z) != 0:
            return True, {}
    return False, {"reason": "vanishes on every cocycle of degree n"}


def normalize_orientation(a: CdgaTable, n: int, eps: Sequence
                          ) -> tuple[Vector, Fraction]:
    """Rescale so the first degree-n cohomology representative pairs to 1."""
    _, reps = cohomology(a.complex, n)
    for r in reps:
        lam = eval_functional(eps, r)
        if lam != 0:
            return [c / lam for c in eps], lam
    raise InputError("functional vanishes on cohomology; not an orientation")


def canonical_orientation(a: CdgaTable, n: int) -> Vector:
    """The orientation determined by dim H^n = 1: kill boundaries, hit the
    representative with value 1."""
    dim, reps = cohomology(a.complex, n)
    if dim != 1:
        raise InputError(f"dim H^{n} = {dim}, no canonical orientation")
    bd = a.complex.d.block(n - 1)
    cols = [list(reps[0])] + [bd.column(j) for j in range(bd.cols)]
    m = RatMatrix.from_columns(cols, a.dim(n))
    comp = complement_basis(m, a.dim(n))
    # eps is dual to reps[0] in the basis (rep | boundaries | comp)
    full = RatMatrix.from_columns(cols + [list(v) for v in comp], a.dim(n))
    inv = inverse(full)
    assert inv is not None
    return list(inv.data[0])


def theta_map(a: CdgaTable, n: int, eps: Sequence) -> DgModuleMap:
    """theta(y) = eps(- * y) from A to its shifted dual, as a module map."""
    reg = self_module(a)
    dual = shifted_dual_module(reg, n)
    blocks: dict[int, RatMatrix] = {}
    for p in a.space.degrees():
        if p > n or dual.dim(p) == 0:
            continue
        m = pairing_block(a, n, eps, p)
        if not m.is_zero():
            blocks[p] = m
    gm = GradedMap(reg.space, dual.space, 0, blocks)
    return DgModuleMap(reg, dual, gm, name="theta")


@dataclass
class PdCertificate:
    """Witness of duality: normalized orientation, theta and its inverses."""

    algebra: CdgaTable
    n: int
    orientation: Vector
    theta: DgModuleMap
    inverses: dict[int, RatMatrix]

    def theta_inverse(self, p: int) -> RatMatrix:
        if p in self.inverses:
            return self.inverses[p]
        return RatMatrix(self.algebra.dim(p), 0)


def is_pd_cdga(a: CdgaTable, n: int | None = None,
               eps: Sequence | None = None
               ) -> tuple[bool, PdCertificate | dict]:
    """Decide Poincare duality in dimension n and certify a success.

    Needs a complete table with nothing above n.  Without eps the
    orientation is forced by dim H^n = 1; a supplied eps is normalized
    before it enters the certificate.
    """
    if a.truncation is not None:
        return False, {"reason": "duality needs a complete table"}
    if n is None:
        n = a.top()
    for p in a.space.degrees():
        if p > n and a.dim(p):
            return False, {"reason": f"content above dimension {n}",
                           "degree": p}
    if eps is None:
        try:
            eps = canonical_orientation(a, n)
        except InputError as e:
            return False, {"reason": str(e)}
    ok, why = is_orientation(a, n, eps)
    if not ok:
        return False, why
    eps, _ = normalize_orientation(a, n, eps)
    return pd_certificate(a, n, eps)


def pd_certificate(a: CdgaTable, n: int, eps: Sequence
                   ) -> tuple[bool, PdCertificate | dict]:
    """Block checks for a given functional, taken exactly as supplied."""
    inverses: dict[int, RatMatrix] = {}
    for p in range(0, n + 1):
        dp, dq = a.dim(p), a.dim(n - p)
        if dp != dq:
            return False, {"reason": "pairing block not square", "degree": p,
                           "dims": [dp, dq]}
        if dp == 0:
            continue
        blk = pairing_block(a, n, eps, p)
        inv = inverse(blk)
        if inv is None:
            return False, {"reason": "degenerate pairing", "degree": p,
                           "rank": rank(blk)}
        inverses[p] = inv
    cert = PdCertificate(a, n, list(eps), theta_map(a, n, eps), inverses)
    return True, cert


def orphan_ideal(a: CdgaTable, n: int, eps: Sequence) -> DiffIdeal:
    """Everything the pairing kills, degreewise, plus all content above n."""
    ok, why = is_orientation(a, n, eps)
    if not ok:
        raise InputError(f"not an orientation: {why.get('reason')}")
    vectors: dict[int, list[Vector]] = {}
    for p in a.space.degrees():
        if p > n:
            vectors[p] = [list(a.basis_vector(p, i)) for i in range(a.dim(p))]
            continue
        ker = kernel_basis(pairing_block(a, n, eps, p))
        if ker:
            vectors[p] = ker
    return DiffIdeal(a, vectors)


def orphan_profile(a: CdgaTable, n: int, eps: Sequence) -> dict[int, int]:
    """dim of the orphan space in each degree 0..n."""
    ideal = orphan_ideal(a, n, eps)
    return {p: ideal.dim(p) for p in range(0, n + 1)}


def pd_quotient(a: CdgaTable, n: int, eps: Sequence
                ) -> tuple[CdgaTable, CdgaMorphism, Vector]:
    """A modulo its orphans, with the projection and the descended
    orientation."""
    ideal = orphan_ideal(a, n, eps)
    out, proj = quotient_by_ideal(a, ideal)
    eps_q = [Q(0)] * out.dim(n)
    for i in range(out.dim(n)):
        # quotient basis vectors are parent basis vectors, so eps descends
        idx = a.space.index_of(n, out.labels(n)[i])
        eps_q[i] = eps[idx]
    return out, proj, eps_q


def pairing_signature(a: CdgaTable, n: int, eps: Sequence) -> tuple[int, int]:
    """Signature of the middle cohomology pairing; needs 4 | n."""
    if n % 4 != 0:
        raise InputError("signature needs dimension divisible by 4")
    m = n // 2
    _, reps = cohomology(a.complex, m)
    k = len(reps)
    mat = RatMatrix(k, k)
    for i in range(k):
        for j in range(k):
            prod = a.mult_vec(m, list(reps[i]), m, list(reps[j]))
            mat.data[i][j] = eval_functional(eps, prod)
    return signature_of_symmetric(mat)


# ---------------------------------------------------------------------------
# killing orphans


def kill_orphans_in_degree(a: CdgaTable, n: int, eps: Sequence, p: int
                           ) -> tuple[CdgaTable, CdgaMorphism, Vector]:
    """Adjoin transient pairs to cancel the orphans in degree p.

    For each basis orphan x_i, a generator u_i of degree n-p-1 with
    d(u_i) = ub_i arrives; the extended functional pairs ub_i against x_i
    and u_i against d(x_i), and vanishes on the complementary pieces.  The
    output is kept through degree n + 1 and marked truncated there.
    """
    ideal = orphan_ideal(a, n, eps)
    for q in range(0, p):
        if ideal.dim(q):
            raise InputError(f"orphans below degree {p} (found some in {q})")
    orphans = [list(v) for v in ideal.vectors.get(p, [])]
    k = len(orphans)
    if k == 0:
        raise InputError(f"no orphans in degree {p}")
    if not (1 <= p and n >= 2 * p + 3):
        raise InputError(f"degree {p} out of range for dimension {n}")

    # transience: no orphan of degree p may be closed
    omat = RatMatrix.from_columns(orphans, a.dim(p))
    dO = a.complex.d.block(p) @ omat
    if rank(dO) != k:
        raise InputError(f"closed orphan in degree {p}; cannot be repaired")

    udeg, ubdeg = n - p - 1, n - p

    # bases for the six cases; transience makes orphans + cocycles direct
    zker = kernel_basis(a.complex.d.block(p))
    xz = RatMatrix.from_columns(orphans + zker, a.dim(p))
    assert rank(xz) == k + len(zker)
    s_vecs = [list(v) for v in complement_basis(xz, a.dim(p))]
    dx = [dO.column(j) for j in range(k)]
    ds = [a.d(p, v) for v in s_vecs]
    dxds = RatMatrix.from_columns(dx + ds, a.dim(p + 1))
    t_vecs = [list(v) for v in complement_basis(dxds, a.dim(p + 1))]

    # coordinates of A^p in (x | z | s) and of A^{p+1} in (dx | ds | t)
    basis_p = RatMatrix.from_columns(
        orphans + zker + s_vecs, a.dim(p))
    inv_p = inverse(basis_p)
    assert inv_p is not None
    basis_p1 = RatMatrix.from_columns(dx + ds + t_vecs, a.dim(p + 1))
    inv_p1 = inverse(basis_p1)
    assert inv_p1 is not None

    bound = n + 1
    if a.truncation is not None and a.truncation < bound:
        raise InputError(f"input must be faithful through degree {bound}")

    # new basis: A part, then u_i blocks, then ub_i blocks
    basis: dict[int, list[str]] = {
        q: list(a.labels(q)) for q in a.space.degrees() if q <= bound}
    ublocks: dict[int, list[tuple[int, int]]] = {}   # deg -> [(i, adeg)]
    vblocks: dict[int, list[tuple[int, int]]] = {}

    def gen_label(i: int, bar: bool, xlab: str | None) -> str:
        stem = f"{'ub' if bar else 'u'}{p}_{i}"
        return stem if xlab is None else f"{stem}.{xlab}"

    adegs = sorted(a.space.degrees())
    for i in range(k):
        for q in adegs:
            tgt = udeg + q
            if tgt <= bound:
                basis.setdefault(tgt, [])
                ublocks.setdefault(tgt, [])
                for x in a.labels(q):
                    basis[tgt].append(gen_label(i, False, None if q == 0 else x))
                ublocks[tgt].append((i, q))
    for i in range(k):
        for q in adegs:
            tgt = ubdeg + q
            if tgt <= bound:
                basis.setdefault(tgt, [])
                vblocks.setdefault(tgt, [])
                for x in a.labels(q):
                    basis[tgt].append(gen_label(i, True, None if q == 0 else x))
                vblocks[tgt].append((i, q))

    sp = GradedSpace({q: tuple(v) for q, v in sorted(basis.items()) if v}, bound)

    def offset(deg: int, bar: bool, i: int, q: int) -> int:
        off = a.dim(deg)
        for (ii, qq) in ublocks.get(deg, []):
            if not bar and (ii, qq) == (i, q):
                return off
            off += a.dim(qq)
        for (ii, qq) in vblocks.get(deg, []):
            if bar and (ii, qq) == (i, q):
                return off
            off += a.dim(qq)
        raise AssertionError

    def embed_a(deg: int, v: Sequence) -> Vector:
        out = [Q(0)] * sp.dim(deg)
        for i, c in enumerate(v):
            out[i] = c
        return out

    def embed_gen(deg: int, bar: bool, i: int, q: int, v: Sequence) -> Vector:
        out = [Q(0)] * sp.dim(deg)
        off = offset(deg, bar, i, q)
        for t, c in enumerate(v):
            out[off + t] = c
        return out

    # differential
    dblocks: dict[int, RatMatrix] = {}
    for deg in sp.degrees():
        if sp.dim(deg + 1) == 0:
            continue
        cols: list[Vector] = []
        for t in range(a.dim(deg)):
            cols.append(embed_a(deg + 1, a.d(deg, a.basis_vector(deg, t))))
        for (i, q) in ublocks.get(deg, []):
            for t in range(a.dim(q)):
                x = a.basis_vector(q, t)
                col = [Q(0)] * sp.dim(deg + 1)
                if ubdeg + q <= bound:
                    col = _vadd(col, embed_gen(deg + 1, True, i, q, x))
                dxv = a.d(q, x)
                if any(c != 0 for c in dxv) and udeg + q + 1 <= bound:
                    sgn = Q(-1) ** (udeg % 2)
                    col = _vadd(col, [sgn * c for c in
                                      embed_gen(deg + 1, False, i, q + 1, dxv)])
                cols.append(col)
        for (i, q) in vblocks.get(deg, []):
            for t in range(a.dim(q)):
                x = a.basis_vector(q, t)
                col = [Q(0)] * sp.dim(deg + 1)
                dxv = a.d(q, x)
                if any(c != 0 for c in dxv) and ubdeg + q + 1 <= bound:
                    sgn = Q(-1) ** (ubdeg % 2)
                    col = _vadd(col, [sgn * c for c in
                                      embed_gen(deg + 1, True, i, q + 1, dxv)])
                cols.append(col)
        m = RatMatrix.from_columns(cols, sp.dim(deg + 1))
        if not m.is_zero():
            dblocks[deg] = m
    cx = CochainComplex(sp, GradedMap(sp, sp, 1, dblocks))

    # products
    def decode(deg: int, t: int) -> tuple[str, int, int, int]:
        if t < a.dim(deg):
            return ("a", deg, t, -1)
        off = a.dim(deg)
        for (i, q) in ublocks.get(deg, []):
            if off <= t < off + a.dim(q):
                return ("u", q, t - off, i)
            off += a.dim(q)
        for (i, q) in vblocks.get(deg, []):
            if off <= t < off + a.dim(q):
                return ("v", q, t - off, i)
            off += a.dim(q)
        raise AssertionError

    def prod(p1: int, t1: int, p2: int, t2: int) -> Vector:
        k1, q1, i1, g1 = decode(p1, t1)
        k2, q2, i2, g2 = decode(p2, t2)
        tdeg = p1 + p2
        out = [Q(0)] * sp.dim(tdeg)
        if k1 != "a" and k2 != "a":
            return out
        if k1 == "a" and k2 == "a":
            xy = a.mult_vec(q1, a.basis_vector(q1, i1), q2, a.basis_vector(q2, i2))
            if a.dim(tdeg) == 0:
                return out
            return embed_a(tdeg, xy)
        # one factor is a generator block element; multiply the A parts
        if k1 == "a":
            adeg, ai, gkind, gq, gi, gen = q1, i1, k2, q2, i2, g2
            swap = True   # y * (gen x): move y past the generator
        else:
            adeg, ai, gkind, gq, gi, gen = q2, i2, k1, q1, i1, g1
            swap = False  # (gen x) * y: y attaches on the right
        gdeg = udeg if gkind == "u" else ubdeg
        xy = a.mult_vec(gq, a.basis_vector(gq, gi), adeg, a.basis_vector(adeg, ai))
        if swap:
            # y * (gen * x) = (-1)^{|y| gdeg} gen * (y x); y x = (-1)^{|y| gq} x y
            sgn = Q(-1) ** ((adeg * (gdeg + gq)) % 2)
        else:
            sgn = Q(1)
        tgt_q = gq + adeg
        if gdeg + tgt_q > bound or (gdeg + tgt_q) not in sp.basis:
            return out
        marks = ublocks if gkind == "u" else vblocks
        if (gen, tgt_q) not in marks.get(gdeg + tgt_q, []):
            return out
        return [sgn * c for c in embed_gen(tdeg, gkind == "v", gen, tgt_q, xy)]

    mult: dict[MultKey, Coeffs] = {}
    degs = [q for q in sp.degrees() if q > 0]
    for p1 in degs:
        for p2 in degs:
            if p1 > p2 or p1 + p2 > bound:
                continue
            if sp.dim(p1 + p2) == 0:
                continue
            for t1 in range(sp.dim(p1)):
                t2start = t1 if p1 == p2 else 0
                for t2 in range(t2start, sp.dim(p2)):
                    if p1 == p2 and t1 == t2 and p1 % 2 == 1:
                        continue
                    v = prod(p1, t1, p2, t2)
                    entry = {kk: c for kk, c in enumerate(v) if c != 0}
                    if entry:
                        mult[(p1, t1, p2, t2)] = entry
    ahat = CdgaTable(cx, a.unit, mult,
                     name=f"{a.name}^[{p}]" if a.name else "")

    # extended orientation
    eps_hat = [Q(0)] * sp.dim(n)
    for i, c in enumerate(eps):
        eps_hat[i] = c
    sgn_u = Q(-1) ** ((n - p) % 2)
    for (i, q) in ublocks.get(n, []):
        # q = p + 1: value on u_i.w is sgn_u * (dx_i coordinate of w)
        off = offset(n, False, i, q)
        for t in range(a.dim(q)):
            coords = inv_p1.apply(a.basis_vector(q, t))
            eps_hat[off + t] = sgn_u * coords[i]
    for (i, q) in vblocks.get(n, []):
        # q = p: value on ub_i.x is the x_i coordinate of x
        off = offset(n, True, i, q)
        for t in range(a.dim(q)):
            coords = inv_p.apply(a.basis_vector(q, t))
            eps_hat[off + t] = coords[i]

    iblocks = {q: RatMatrix.from_columns(
        [embed_a(q, a.basis_vector(q, t)) for t in range(a.dim(q))], sp.dim(q))
        for q in a.space.degrees() if q <= bound and a.dim(q)}
    src = _restrict_to(a, bound)
    incl = CdgaMorphism(src, ahat, GradedMap(src.space, sp, 0, iblocks),
                        name="incl")
    return ahat, incl, eps_hat


def _restrict_to(a: CdgaTable, bound: int) -> CdgaTable:
    if (a.truncation is not None and a.truncation <= bound) or a.top() <= bound:
        return a
    return truncate_table(a, bound)


def _vadd(a: Vector, b: Vector) -> Vector:
    return [x + y for x, y in zip(a, b)]
