"""Pretty models of even-rank disk bundles and their sphere bundles.

The total space of a disk bundle of rank 2k over a Poincare base Q is
modelled by P = Q + Q.zb with zb^2 = e.zb, where e is the Euler class.  P
is Poincare in dimension m + 2k, oriented through the zb part, and the
bundle projection evaluates zb at e.  The shriek of the zero section picks
up a suspension by the even rank, so no signs move, and after a one-time
normalisation it is literally multiplication by zb.  Its pretty model
codomain untwists, by an explicit isomorphism, into the sphere bundle
model Q (x) /\\(z) with dz = e.

Odd ranks are refused up front: the zb trick needs an even generator.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cdga import (
    CdgaMorphism,
    CdgaTable,
    adjoin_even_truncated,
    adjoin_odd_generator,
    is_quasi_iso,
    validate_cdga,
    validate_morphism,
)
from .dgmodule import (
    DgModuleMap,
    is_balanced,
    restrict_scalars,
    self_module,
    semi_trivial_cone,
    suspend_module,
    validate_module_map,
)
from .graded import (
    CochainComplex,
    GradedMap,
    GradedSpace,
    InputError,
    cohomology_dims,
)
from .linalg import Q, RatMatrix, Vector, inverse
from .pdual import PdCertificate, pairing_block, pd_certificate
from .pretty import glue_model_map


@dataclass
class DiskBundleModel:
    """Everything the disk-bundle pretty model produces, in one place."""

    base: CdgaTable
    rank: int
    euler: Vector
    total: CdgaTable              # P = base + base.zb
    cert: PdCertificate           # duality of P, normalised for the shriek
    phi: CdgaMorphism             # P -> base, zb evaluated at e
    shriek_map: DgModuleMap       # s^{-2k} base -> P, equals  q -> q.zb
    domain: CdgaTable             # P + s s^{-2k} base
    codomain: CdgaTable           # base + s s^{-2k} base
    model_map: CdgaMorphism
    incl_base: CdgaMorphism       # base -> domain, a quasi-iso
    sphere: CdgaTable             # base (x) /\(z), dz = e
    chi: CdgaMorphism             # codomain -> sphere, an isomorphism


def _check_bundle_input(base: CdgaTable, rank: int, euler: Vector):
    if rank <= 0 or rank % 2 != 0:
        raise InputError(f"bundle rank must be positive and even, got {rank}")
    if base.truncation is not None:
        raise InputError("bundle bases must be complete tables")
    if len(euler) != base.dim(rank):
        raise InputError(f"euler class needs {base.dim(rank)} coordinates "
                         f"in degree {rank}")
    if any(c != 0 for c in base.d(rank, euler)):
        raise InputError("euler class must be closed")


def sphere_bundle_model(base: CdgaTable, rank: int, euler: Vector
                        ) -> CdgaTable:
    """base (x) /\\(z) with |z| = rank - 1 and dz = e."""
    _check_bundle_input(base, rank, euler)
    return adjoin_odd_generator(base, rank, list(euler), "z")


def disk_bundle_pretty_model(base: CdgaTable, cert_base: PdCertificate,
                             rank: int, euler: Vector) -> DiskBundleModel:
    """Build the pretty model of a rank-2k disk bundle and untwist its
    codomain into the sphere bundle model."""
    _check_bundle_input(base, rank, euler)
    if cert_base.algebra is not base:
        raise InputError("certificate does not belong to the base")
    m = cert_base.n
    n = m + rank
    euler = list(euler)

    total = adjoin_even_truncated(base, rank, euler, "zb")
    # orientation through the zb part: eps_P(q.zb) = eps_Q(q)
    qtop = base.dim(m)
    eps0 = [Q(0)] * total.dim(n)
    off = total.dim(n) - qtop
    for i in range(qtop):
        eps0[off + i] = cert_base.orientation[i]
    ok, cert0 = pd_certificate(total, n, eps0)
    if not ok:
        raise InputError(f"total space failed duality: {cert0}")

    # phi : P -> Q, the identity on Q and e on zb
    pblocks: dict[int, RatMatrix] = {}
    for p in total.space.degrees():
        if base.dim(p) == 0:
            continue
        mtx = RatMatrix(base.dim(p), total.dim(p))
        for j in range(base.dim(p)):
            mtx.data[j][j] = Q(1)
        zoff = base.dim(p)
        for j in range(base.dim(p - rank)):
            col = base.mult_vec(p - rank, base.basis_vector(p - rank, j),
                                rank, euler)
            for i, c in enumerate(col):
                mtx.data[i][zoff + j] = c
        if not mtx.is_zero():
            pblocks[p] = mtx
    phi = CdgaMorphism(total, base,
                       GradedMap(total.space, base.space, 0, pblocks),
                       name="project")

    sq = suspend_module(restrict_scalars(phi, self_module(base)), -rank,
                        prefix="")

    def shriek_blocks(cert: PdCertificate) -> dict[int, RatMatrix]:
        out: dict[int, RatMatrix] = {}
        for p in sq.space.degrees():
            if total.dim(p) == 0 or sq.dim(p) == 0:
                continue
            theta_q = pairing_block(base, m, cert_base.orientation, p - rank)
            blk = (cert.theta_inverse(p)
                   @ phi.map.block(n - p).transpose() @ theta_q)
            if not blk.is_zero():
                out[p] = blk
        return out

    # normalise: the generator of s^{-2k} Q^0 must land on zb exactly
    first = shriek_blocks(cert0).get(rank)
    if first is None:
        raise InputError("shriek vanishes on the suspended unit")
    col = first.column(0)
    alpha, lam = col[: base.dim(rank)], col[base.dim(rank)]
    if any(c != 0 for c in alpha) or lam == 0:
        raise InputError(f"shriek normalisation failed: unit goes to "
                         f"{total.label_of_vector(rank, col)}")
    eps = [lam * c for c in eps0]
    ok, cert = pd_certificate(total, n, eps)
    assert ok
    blocks = shriek_blocks(cert)
    sh = DgModuleMap(sq, self_module(total),
                     GradedMap(sq.space, total.space, 0, blocks),
                     name="shriek")

    # the normalised shriek is multiplication by zb, on the nose
    for p in sq.space.degrees():
        want = RatMatrix(total.dim(p), sq.dim(p))
        for j in range(sq.dim(p)):
            want.data[total.dim(p) - base.dim(p - rank) + j][j] = Q(1)
        if sh.map.block(p) != want:
            raise InputError(f"shriek is not zb-multiplication in degree {p}")

    domain, incl_total, _ = semi_trivial_cone(sh, name="bundle domain")

    sq_base = suspend_module(self_module(base), -rank, prefix="")
    cblocks: dict[int, RatMatrix] = {}
    for p in sq_base.space.degrees():
        blk = phi.map.block(p) @ sh.map.block(p)
        if not blk.is_zero():
            cblocks[p] = blk
    phish = DgModuleMap(sq_base, self_module(base),
                        GradedMap(sq_base.space, base.space, 0, cblocks),
                        name="phi.shriek")
    # which must be multiplication by the euler class
    for p in sq_base.space.degrees():
        want = RatMatrix(base.dim(p), sq_base.dim(p))
        for j in range(sq_base.dim(p)):
            col = base.mult_vec(rank, euler, p - rank,
                                base.basis_vector(p - rank, j))
            for i, c in enumerate(col):
                want.data[i][j] = c
        if phish.map.block(p) != want:
            raise InputError(f"phi o shriek is not e-multiplication "
                             f"in degree {p}")
    codomain, incl_base_cod, _ = semi_trivial_cone(phish, name="bundle codomain")

    model = glue_model_map(phi, domain, codomain)

    sphere = sphere_bundle_model(base, rank, euler)
    chi = _untwist(codomain, sphere, base, rank)

    # base -> P -> domain
    ib: dict[int, RatMatrix] = {}
    for p in base.space.degrees():
        mtx = RatMatrix(domain.dim(p), base.dim(p))
        for j in range(base.dim(p)):
            mtx.data[j][j] = Q(1)
        ib[p] = mtx
    incl_base = CdgaMorphism(base, domain,
                             GradedMap(base.space, domain.space, 0, ib),
                             name="zero section")

    return DiskBundleModel(base, rank, euler, total, cert, phi, sh, domain,
                           codomain, model, incl_base, sphere, chi)


def _untwist(codomain: CdgaTable, sphere: CdgaTable, base: CdgaTable,
             rank: int) -> CdgaMorphism:
    """s s^{-2k} q -> (-1)^{|q|} q.z, the identity on the base part.

    Both sides list the base labels first in each degree, so the blocks are
    signed permutations.
    """
    blocks: dict[int, RatMatrix] = {}
    for p in codomain.space.degrees():
        rows, cols = sphere.dim(p), codomain.dim(p)
        mtx = RatMatrix(rows, cols)
        for j in range(base.dim(p)):
            mtx.data[j][j] = Q(1)
        sgn = Q(-1) ** ((p + 1 - rank) % 2)
        for j in range(cols - base.dim(p)):
            mtx.data[base.dim(p) + j][base.dim(p) + j] = sgn
        if not mtx.is_zero():
            blocks[p] = mtx
    return CdgaMorphism(codomain, sphere,
                        GradedMap(codomain.space, sphere.space, 0, blocks),
                        name="untwist")


def verify_bundle_equivalence(mdl: DiskBundleModel) -> dict:
    """Re-check the whole disk-bundle story on the built model."""
    bal, _ = is_balanced(mdl.shriek_map)
    chi_square = all(
        mdl.sphere.dim(p) == mdl.codomain.dim(p)
        for p in set(mdl.sphere.space.degrees())
        | set(mdl.codomain.space.degrees()))
    chi_invertible = chi_square and all(
        inverse(mdl.chi.map.block(p)) is not None
        for p in mdl.codomain.space.degrees() if mdl.codomain.dim(p))
    qi, _ = is_quasi_iso(mdl.incl_base)
    checks = {
        "total_cdga": validate_cdga(mdl.total).ok,
        "phi_morphism": validate_morphism(mdl.phi).ok,
        "shriek_module_map": validate_module_map(mdl.shriek_map).ok,
        "shriek_balanced": bal,
        "domain_cdga": validate_cdga(mdl.domain).ok,
        "codomain_cdga": validate_cdga(mdl.codomain).ok,
        "model_map_morphism": validate_morphism(mdl.model_map).ok,
        "sphere_cdga": validate_cdga(mdl.sphere).ok,
        "chi_morphism": validate_morphism(mdl.chi).ok,
        "chi_isomorphism": chi_invertible,
        "zero_section_quasi_iso": qi,
    }
    return {
        "ok": all(checks.values()),
        "checks": checks,
        "domain_cohomology": cohomology_dims(mdl.domain.complex),
        "codomain_cohomology": cohomology_dims(mdl.codomain.complex),
        "sphere_cohomology": cohomology_dims(mdl.sphere.complex),
    }
