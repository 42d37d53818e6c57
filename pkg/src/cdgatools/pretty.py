"""Pretty models: shriek maps and the two-sided semi-trivial cone picture.

Given phi : P -> Q with P Poincare of dimension n, the shriek runs the
other way at the module level: dualise phi against the orientations and
pull back through theta.  Blockwise that is theta_P^{-1} composed with a
plain transpose, so everything stays exact.

The pretty model of phi is the square-zero extension on each side,

    P + s s^{-n}#Q  --(phi + id)-->  Q + s s^{-n}#Q,

with differentials twisted by phi^! on the left and phi phi^! on the
right.  The left side is a CDGA exactly when phi^! is balanced; the right
side additionally needs phi phi^! to be Q-linear, which surjectivity of
phi guarantees.  When phi is surjective the image of phi^! is a
differential ideal and collapsing the suspended part projects the left
side onto P/I by a quasi-iso.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cdga import (
    CdgaMorphism,
    CdgaTable,
    DiffIdeal,
    is_quasi_iso,
    quotient_by_ideal,
    validate_cdga,
    validate_morphism,
)
from .dgmodule import (
    DgModule,
    DgModuleMap,
    is_balanced,
    restrict_scalars,
    self_module,
    semi_trivial_cone,
    shifted_dual_module,
    validate_module_map,
)
from .graded import (
    CochainComplex,
    GradedMap,
    GradedSpace,
    InputError,
    cohomology_dims,
)
from .linalg import Q, RatMatrix, Vector, column_space_basis, rank
from .pdual import PdCertificate


def shriek(phi: CdgaMorphism, cert: PdCertificate) -> DgModuleMap:
    """phi^! : s^{-n}#Q -> P over P, from the duality certificate of P.

    Blocks are theta_P^{-1} at p times the transpose of phi at n - p; the
    source carries the Q-action restricted along phi.
    """
    p_alg, q_alg = phi.source, phi.target
    if cert.algebra is not p_alg:
        raise InputError("certificate does not belong to the source of phi")
    if q_alg.truncation is not None:
        raise InputError("shifted duals need a complete target algebra")
    n = cert.n
    mq = restrict_scalars(phi, self_module(q_alg))
    dq = shifted_dual_module(mq, n)
    reg = self_module(p_alg)
    blocks: dict[int, RatMatrix] = {}
    for p in dq.space.degrees():
        if reg.dim(p) == 0 or dq.dim(p) == 0:
            continue
        blk = cert.theta_inverse(p) @ phi.map.block(n - p).transpose()
        if not blk.is_zero():
            blocks[p] = blk
    gm = GradedMap(dq.space, reg.space, 0, blocks)
    return DgModuleMap(dq, reg, gm, name="shriek")


@dataclass
class PrettyModel:
    """Both semi-trivial cones and the comparison morphism between them."""

    phi: CdgaMorphism
    cert: PdCertificate
    shriek_map: DgModuleMap           # s^{-n}#Q -> P over P
    phi_shriek: DgModuleMap           # s^{-n}#Q -> Q over Q
    domain: CdgaTable                 # P + s s^{-n}#Q
    codomain: CdgaTable               # Q + s s^{-n}#Q
    model_map: CdgaMorphism           # phi + id
    incl_domain: CdgaMorphism         # P -> domain
    incl_codomain: CdgaMorphism       # Q -> codomain

    @property
    def n(self) -> int:
        return self.cert.n


def build_pretty_model(phi: CdgaMorphism, cert: PdCertificate) -> PrettyModel:
    """Assemble the pretty model of phi; errors out when the data cannot
    support it (unbalanced shriek, or phi phi^! not Q-linear)."""
    sh = shriek(phi, cert)
    ok, info = is_balanced(sh)
    if not ok:
        raise InputError(f"shriek map is not balanced at {info.get('witness')}")
    n = cert.n
    q_alg = phi.target
    dq_q = shifted_dual_module(self_module(q_alg), n)
    comp_blocks: dict[int, RatMatrix] = {}
    for p in dq_q.space.degrees():
        blk = phi.map.block(p) @ sh.map.block(p)
        if not blk.is_zero():
            comp_blocks[p] = blk
    phiphi = DgModuleMap(dq_q, self_module(q_alg),
                         GradedMap(dq_q.space, q_alg.space, 0, comp_blocks),
                         name="phi.shriek")
    v = validate_module_map(phiphi)
    if not v.ok:
        f = v.failures[0]
        raise InputError(
            f"phi o shriek is not Q-linear ({f.kind} at {f.witness})")

    domain, incl_p, _ = semi_trivial_cone(sh, name="domain")
    codomain, incl_q, _ = semi_trivial_cone(phiphi, name="codomain")
    model = glue_model_map(phi, domain, codomain)
    return PrettyModel(phi, cert, sh, phiphi, domain, codomain, model,
                       incl_p, incl_q)


def glue_model_map(phi: CdgaMorphism, domain: CdgaTable,
                   codomain: CdgaTable) -> CdgaMorphism:
    """phi on the algebra part, the identity on the suspended part.

    Both cones must extend the two sides of phi with equal suspended blocks
    (that is how the pretty model is built).
    """
    blocks: dict[int, RatMatrix] = {}
    for p in domain.space.degrees():
        rows, cols = codomain.dim(p), domain.dim(p)
        if rows == 0 or cols == 0:
            continue
        m = RatMatrix(rows, cols)
        pb = phi.map.block(p)
        for j in range(phi.source.dim(p)):
            for i, c in enumerate(pb.column(j)):
                m.data[i][j] = c
        soff_d = phi.source.dim(p)
        soff_c = phi.target.dim(p)
        for j in range(cols - soff_d):
            m.data[soff_c + j][soff_d + j] = Q(1)
        if not m.is_zero():
            blocks[p] = m
    return CdgaMorphism(domain, codomain,
                        GradedMap(domain.space, codomain.space, 0, blocks),
                        name="phi+id")


def verify_pretty_model(pm: PrettyModel) -> dict:
    """Re-check every structural promise of a pretty model, exactly."""
    bal, bal_info = is_balanced(pm.shriek_map)
    checks = {
        "shriek_module_map": validate_module_map(pm.shriek_map).ok,
        "shriek_balanced": bal,
        "balanced_shortcut": bool(bal_info.get("shortcut")),
        "phi_shriek_q_linear": validate_module_map(pm.phi_shriek).ok,
        "domain_cdga": validate_cdga(pm.domain).ok,
        "codomain_cdga": validate_cdga(pm.codomain).ok,
        "model_map_morphism": validate_morphism(pm.model_map).ok,
        "incl_domain_morphism": validate_morphism(pm.incl_domain).ok,
        "incl_codomain_morphism": validate_morphism(pm.incl_codomain).ok,
    }
    required = [k for k in checks if k != "balanced_shortcut"]
    return {
        "ok": all(checks[k] for k in required),
        "checks": checks,
        "domain_cohomology": cohomology_dims(pm.domain.complex),
        "codomain_cohomology": cohomology_dims(pm.codomain.complex),
    }


def shriek_image_ideal(pm: PrettyModel) -> DiffIdeal:
    """The degreewise image of phi^! inside P, as a differential ideal."""
    p_alg = pm.phi.source
    vectors: dict[int, list[Vector]] = {}
    for p in pm.shriek_map.source.space.degrees():
        basis = column_space_basis(pm.shriek_map.map.block(p))
        if basis:
            vectors[p] = [list(v) for v in basis]
    return DiffIdeal(p_alg, vectors)


def surjective_quotient_model(pm: PrettyModel
                              ) -> tuple[CdgaTable, CdgaMorphism, DiffIdeal]:
    """Collapse the suspended part of the domain onto P / im(phi^!).

    Needs phi surjective in every degree.  The projection is an algebra
    morphism and a quasi-iso; this function builds it, and the caller (or
    verify) confirms the quasi-iso claim.  When phi^! hits the unit the
    quotient would die, and the error says so rather than pressing on.
    """
    phi = pm.phi
    for p in phi.target.space.degrees():
        if rank(phi.map.block(p)) != phi.target.dim(p):
            raise InputError(f"phi is not surjective in degree {p}")
    ideal = shriek_image_ideal(pm)
    quot, proj = quotient_by_ideal(phi.source, ideal)

    dom = pm.domain
    blocks: dict[int, RatMatrix] = {}
    for p in dom.space.degrees():
        if quot.dim(p) == 0:
            continue
        m = RatMatrix(quot.dim(p), dom.dim(p))
        pb = proj.map.block(p)
        for j in range(phi.source.dim(p)):
            for i, c in enumerate(pb.column(j)):
                m.data[i][j] = c
        if not m.is_zero():
            blocks[p] = m
    pi = CdgaMorphism(dom, quot, GradedMap(dom.space, quot.space, 0, blocks),
                      name="collapse")
    return quot, pi, ideal


# ---------------------------------------------------------------------------
# boundary doubles


def boundary_double(q_alg: CdgaTable, n: int,
                    psi: DgModuleMap | None = None
                    ) -> tuple[CdgaTable, Vector, CdgaMorphism]:
    """Q + s s^{-n}#Q with orientation sf -> f(1), Poincare in dimension
    n - 1.

    Q must vanish in degrees >= n/2 - 1; that pushes the suspended block
    above the middle, makes any twisting map psi balanced through the
    degree window, and leaves the pairing in evaluation form.  psi defaults
    to zero.
    """
    if q_alg.truncation is not None:
        raise InputError("boundary doubles need a complete table")
    for p in q_alg.space.degrees():
        if 2 * p >= n - 2 and q_alg.dim(p):
            raise InputError(
                f"content in degree {p} >= n/2 - 1; double cannot close up")
    dq = shifted_dual_module(self_module(q_alg), n)
    if psi is None:
        psi = DgModuleMap(dq, self_module(q_alg),
                          GradedMap(dq.space, q_alg.space, 0), name="zero")
    else:
        if psi.source.space.basis != dq.space.basis:
            raise InputError("psi must start from the shifted dual of Q")
        v = validate_module_map(psi)
        if not v.ok:
            raise InputError(f"psi is not a module map ({v.failures[0].kind})")
    ok, info = is_balanced(psi)
    if not ok:
        raise InputError(f"psi is not balanced at {info.get('witness')}")

    double, incl, _ = semi_trivial_cone(psi, name="double")
    eps = [Q(0)] * double.dim(n - 1)
    off = q_alg.dim(n - 1)
    # suspended part of degree n-1 is the dual of Q^0, a single coordinate
    for i in range(double.dim(n - 1) - off):
        eps[off + i] = Q(1)
    return double, eps, incl
