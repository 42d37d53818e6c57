"""Shared builders for the tests.

mk() assembles a table from plain dicts.  The random_* functions sample
structurally valid modules and genuine module maps: a map is drawn from
the solved space of all degree-0 chain-and-equivariant maps, so samples
cover balanced and unbalanced cases alike without ever fabricating a map
that fails the module axioms.
"""

from __future__ import annotations

import io
import random
from contextlib import redirect_stdout

from cdgatools import (CdgaTable, CochainComplex, DgModule, DgModuleMap,
                       GradedMap, GradedSpace, self_module,
                       shifted_dual_module, suspend_module)
from cdgatools.linalg import Q, RatMatrix, kernel_basis


def mk(basis, mult=None, dblocks=None, trunc=None, unit="one", name=""):
    """CdgaTable from {deg: labels}, {key: {idx: coeff}} and row lists."""
    sp = GradedSpace({p: tuple(ls) for p, ls in basis.items()}, trunc)
    blocks = {}
    for p, rows in (dblocks or {}).items():
        blocks[p] = RatMatrix(sp.dim(p + 1), sp.dim(p), rows)
    cx = CochainComplex(sp, GradedMap(sp, sp, 1, blocks))
    mt = {k: {i: Q(c) for i, c in v.items()} for k, v in (mult or {}).items()}
    return CdgaTable(cx, unit, mt, name=name)


def run_cli(argv):
    """Invoke the command line in-process; returns (stdout, exit code)."""
    from cdgatools import cli

    buf = io.StringIO()
    with redirect_stdout(buf):
        code = cli.main(list(argv))
    return buf.getvalue(), code


def h_dims(table) -> dict[int, int]:
    from cdgatools import cohomology_dims

    return cohomology_dims(table.complex)


# ---------------------------------------------------------------------------
# random modules


def free_shift(alg: CdgaTable, k: int) -> DgModule:
    """The regular module with all degrees moved up by k.

    The "m." prefix keeps labels clear of the "s." a later mapping cone
    prepends to its suspended copy.
    """
    return suspend_module(self_module(alg), -k, prefix="m.")


def chain_module(rng: random.Random, alg: CdgaTable, lo: int = 1) -> DgModule:
    """Zero action, random dims, differential pairing fresh elements off.

    Sources are never images, so d^2 = 0 holds by construction; the zero
    action satisfies every module axiom trivially.
    """
    b = rng.randint(lo, 4)
    dims: dict[int, int] = {}
    for p in range(b, min(8, b + rng.randint(1, 3)) + 1):
        d = rng.randint(0, 2)
        if d:
            dims[p] = d
    if not dims:
        dims = {b: 1}
    labels = {p: tuple(f"c{p}_{i}" for i in range(d)) for p, d in dims.items()}
    sp = GradedSpace(labels, None, negative_ok=min(dims) < 0)
    images: dict[int, set] = {p: set() for p in dims}
    blocks: dict[int, RatMatrix] = {}
    for p in sorted(dims):
        if p + 1 not in dims:
            continue
        src = [i for i in range(dims[p]) if i not in images[p]]
        tgt = [i for i in range(dims[p + 1]) if i not in images[p + 1]]
        k = rng.randint(0, min(len(src), len(tgt)))
        if k == 0:
            continue
        m = RatMatrix(dims[p + 1], dims[p])
        for s, t in zip(src[:k], tgt[:k]):
            m.data[t][s] = Q(1)
            images[p + 1].add(t)
        blocks[p] = m
    cx = CochainComplex(sp, GradedMap(sp, sp, 1, blocks))
    return DgModule(alg, cx, {}, name="chain")


def twisted_pair(alg: CdgaTable, q: int, i: int, t: int) -> DgModule:
    """w, u in degree t and v = a.w in degree t+q, all other actions zero.

    Only the (q, i) basis element acts.  That element must be neither a
    product of positives nor a coboundary (see action_candidates), or
    associativity and Leibniz would see the one-sided action.
    """
    sp = GradedSpace({t: ("w", "u"), t + q: ("v",)},
                     negative_ok=t < 0)
    cx = CochainComplex(sp, GradedMap(sp, sp, 1, {}))
    return DgModule(alg, cx, {(q, i, t, 0): {0: Q(1)}}, name="twisted")


def action_candidates(alg: CdgaTable) -> list[tuple[int, int]]:
    """Basis elements safe for twisted_pair: hit neither by products of
    positive-degree elements nor by the differential."""
    out = []
    for q in alg.space.degrees():
        if q <= 0 or q > 6:
            continue
        banned: set[int] = set()
        for q1 in alg.space.degrees():
            q2 = q - q1
            if q1 <= 0 or q2 <= 0:
                continue
            for i1 in range(alg.dim(q1)):
                for i2 in range(alg.dim(q2)):
                    banned |= set(alg.mult_basis(q1, i1, q2, i2))
        blk = alg.complex.d.block(q - 1)
        for col in range(blk.cols):
            for r, c in enumerate(blk.column(col)):
                if c != 0:
                    banned.add(r)
        out.extend((q, i) for i in range(alg.dim(q)) if i not in banned)
    return out


def random_positive_module(rng: random.Random, alg: CdgaTable) -> DgModule:
    """A valid module with content only in degrees 2..8.

    Bottom degree 2 keeps the suspension of the module in positive
    degrees, so a semi-trivial cone on any map out of it is a connected
    algebra and nothing is truncated away.
    """
    top = alg.top()
    kind = rng.randrange(4)
    if kind == 0:
        return free_shift(alg, rng.randint(2, max(2, min(3, 8 - top))))
    if kind == 1:
        n = rng.randint(top + 2, 8)
        return shifted_dual_module(self_module(alg), n)
    if kind == 2:
        return chain_module(rng, alg, lo=2)
    cands = action_candidates(alg)
    if not cands:
        return chain_module(rng, alg, lo=2)
    q, i = rng.choice(cands)
    return twisted_pair(alg, q, i, rng.randint(2, max(2, 8 - q)))


def random_module(rng: random.Random, alg: CdgaTable) -> DgModule:
    """Like random_positive_module but degree 0 and below are fair game."""
    top = alg.top()
    kind = rng.randrange(5)
    if kind == 0:
        return free_shift(alg, rng.randint(-2, min(2, 8 - top)))
    if kind == 1:
        return shifted_dual_module(self_module(alg), rng.randint(top, 8))
    if kind == 2:
        return chain_module(rng, alg, lo=0)
    if kind == 3:
        return self_module(alg)
    cands = action_candidates(alg)
    if not cands:
        return chain_module(rng, alg, lo=0)
    q, i = rng.choice(cands)
    return twisted_pair(alg, q, i, rng.randint(0, max(0, 8 - q)))


# ---------------------------------------------------------------------------
# the Hom space of two modules


def module_hom_basis(src: DgModule, tgt: DgModule) -> list[DgModuleMap]:
    """Basis of all degree-0 module maps src -> tgt.

    The chain and equivariance conditions are linear in the block entries;
    this sets them up as one system and reads a kernel basis back into
    graded maps.
    """
    var: dict[tuple[int, int, int], int] = {}
    for p in src.space.degrees():
        for i in range(tgt.dim(p)):
            for j in range(src.dim(p)):
                var[(p, i, j)] = len(var)
    if not var:
        return []

    rows: list[list] = []

    def new_row():
        rows.append([Q(0)] * len(var))
        return rows[-1]

    def bump(row, p, i, j, c):
        k = var.get((p, i, j))
        if k is not None:
            row[k] += c

    # chain: f(dm) = d(f(m)) coordinatewise
    for p in src.space.degrees():
        dt = tgt.complex.d.block(p)
        ds = src.complex.d.block(p)
        for j in range(src.dim(p)):
            for t in range(tgt.dim(p + 1)):
                row = new_row()
                for i in range(tgt.dim(p)):
                    bump(row, p, i, j, dt.data[t][i])
                for m in range(src.dim(p + 1)):
                    bump(row, p + 1, t, m, -ds.data[m][j])
                if all(c == 0 for c in row):
                    rows.pop()

    # equivariance: f(a.m) = a.f(m) for every algebra basis element
    a = src.algebra
    for q in a.space.degrees():
        if q == 0:
            continue
        for ai in range(a.dim(q)):
            for p in src.space.degrees():
                if src.dim(p + q) == 0 and tgt.dim(p + q) == 0:
                    continue
                for j in range(src.dim(p)):
                    av = src.act_basis(q, ai, p, j)
                    for t in range(tgt.dim(p + q)):
                        row = new_row()
                        for k, c in av.items():
                            bump(row, p + q, t, k, c)
                        for i in range(tgt.dim(p)):
                            c = tgt.act_basis(q, ai, p, i).get(t)
                            if c:
                                bump(row, p, i, j, -c)
                        if all(c == 0 for c in row):
                            rows.pop()

    if rows:
        sols = kernel_basis(RatMatrix(len(rows), len(var), rows))
    else:
        sols = [[Q(1) if i == k else Q(0) for i in range(len(var))]
                for k in range(len(var))]

    maps = []
    for vec in sols:
        blocks: dict[int, RatMatrix] = {}
        for (p, i, j), k in var.items():
            if vec[k] == 0:
                continue
            if p not in blocks:
                blocks[p] = RatMatrix(tgt.dim(p), src.dim(p))
            blocks[p].data[i][j] = vec[k]
        gm = GradedMap(src.space, tgt.space, 0, blocks)
        maps.append(DgModuleMap(src, tgt, gm))
    return maps


def random_hom(rng: random.Random, src: DgModule, tgt: DgModule
               ) -> DgModuleMap:
    """A random element of the module-map space (possibly zero)."""
    basis = module_hom_basis(src, tgt)
    blocks: dict[int, RatMatrix] = {}
    for f in basis:
        c = Q(rng.randint(-2, 2))
        if c == 0:
            continue
        for p, m in f.map.blocks.items():
            if p not in blocks:
                blocks[p] = RatMatrix(tgt.dim(p), src.dim(p))
            cur = blocks[p]
            for r in range(m.rows):
                for s in range(m.cols):
                    cur.data[r][s] += c * m.data[r][s]
    gm = GradedMap(src.space, tgt.space, 0, blocks)
    return DgModuleMap(src, tgt, gm)
