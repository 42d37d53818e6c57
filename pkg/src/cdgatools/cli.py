"""Command line front end.

Every subcommand reads one .cdga document (a file path or the bare name
of a bundled example), runs its operation, and prints a report either as
a pipe-delimited table or as JSON.  Exit status follows the report: 0 for
ok, 1 when a checked invariant fails, 2 when the input itself is bad.
Output is deterministic: the same invocation prints the same bytes.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from typing import Sequence

from .bundle import disk_bundle_pretty_model, verify_bundle_equivalence
from .cdga import (CdgaTable, ValidationResult, is_acyclic_ideal,
                   is_quasi_iso, validate_cdga, validate_ideal,
                   validate_morphism)
from .corpus import resolve_document
from .dgmodule import is_balanced, mapping_cone, validate_module, \
    validate_module_map
from .document import CdgaDocument, ParseError
from .graded import GradedSpace, InputError, TruncationError, cohomology_dims
from .linalg import Q, Vector, rank
from .pdual import (canonical_orientation, is_orientation, is_pd_cdga,
                    kill_orphans_in_degree, orphan_ideal, pairing_signature,
                    pd_quotient, theta_map)
from .pretty import (PrettyModel, boundary_double, build_pretty_model,
                     surjective_quotient_model, verify_pretty_model)
from .report import Report, render_figures, to_json, to_text


def _fmt_vec(space: GradedSpace, p: int, vec: Sequence) -> str:
    terms = []
    for i, c in enumerate(vec):
        if c == 0:
            continue
        lab = space.labels(p)[i]
        if c == 1:
            terms.append(lab)
        elif c == -1:
            terms.append(f"-{lab}")
        else:
            terms.append(f"{c}*{lab}")
    return " + ".join(terms) if terms else "0"


def _fail_text(f) -> str:
    txt = f"{f.kind} at degree {f.degree} on {f.witness}"
    if f.detail:
        txt += f" ({f.detail})"
    return txt


def _add_validation(rep: Report, label: str, res: ValidationResult,
                    limit: int = 8) -> bool:
    if res.ok:
        rep.add(f"valid:{label}", True)
        return True
    for f in res.failures[:limit]:
        rep.add(f"valid:{label}", False, _fail_text(f))
    if len(res.failures) > limit:
        rep.notes.append(
            f"{label}: {len(res.failures) - limit} further failures omitted")
    return False


def _gate(rep: Report, doc: CdgaDocument) -> bool:
    """Validate every object in the document; findings land in the report."""
    ok = True
    for name, table in doc.algebras.items():
        ok &= _add_validation(rep, name, validate_cdga(table))
        eps = doc.orientations.get(name)
        if eps is not None:
            good, info = is_orientation(table, doc.dimensions[name], eps)
            witness = "" if good else str(info)
            ok &= rep.add(f"orientation:{name}", good, witness)
    for name, mod in doc.modules.items():
        ok &= _add_validation(rep, name, validate_module(mod))
    for name, mor in doc.morphisms.items():
        ok &= _add_validation(rep, name, validate_morphism(mor))
    for name, mm in doc.modmaps.items():
        ok &= _add_validation(rep, name, validate_module_map(mm))
    return ok


def _cohomology_bound(table: CdgaTable, requested: int | None) -> int:
    bound = table.complex.faithful_cohomology_upto()
    if requested is None:
        return bound if bound is not None else max(table.space.top(), 0)
    if bound is not None:
        return min(requested, bound)
    return requested


def _require_dimension(doc: CdgaDocument, args, name: str | None = None) -> int:
    n = getattr(args, "dimension", None)
    if n is None:
        n = doc.dimension_of(name)
    if n is None:
        raise InputError("dimension required: pass --dimension or add a "
                         "dimension field to the document")
    return n


def _orientation_for(doc: CdgaDocument, table: CdgaTable, n: int,
                     name: str | None = None) -> Vector:
    eps = doc.orientation_of(name)
    if eps is None:
        eps = canonical_orientation(table, n)
    return eps


def _first_morphism(doc: CdgaDocument, wanted: str | None):
    if wanted is not None:
        if wanted not in doc.morphisms:
            raise InputError(f"no morphism {wanted!r} in the document")
        return doc.morphisms[wanted]
    if not doc.morphisms:
        raise InputError("document carries no morphism")
    return next(iter(doc.morphisms.values()))


def _first_modmap(doc: CdgaDocument):
    if not doc.modmaps:
        raise InputError("document carries no module map")
    return next(iter(doc.modmaps.values()))


def _parse_combination(expr: str, space: GradedSpace, degree: int) -> Vector:
    """Sums like 'a', '2*a - 3/2*b', or '0' over the degree-d basis."""
    vec = [Q(0)] * space.dim(degree)
    text = expr.replace(" ", "")
    if text in ("", "0"):
        return vec
    if text[0] not in "+-":
        text = "+" + text
    pos = 0
    while pos < len(text):
        sign = Q(1) if text[pos] == "+" else Q(-1)
        pos += 1
        end = pos
        while end < len(text) and text[end] not in "+-":
            end += 1
        term = text[pos:end]
        pos = end
        if not term:
            raise InputError(f"empty term in combination {expr!r}")
        if "*" in term:
            coeff_s, label = term.split("*", 1)
            try:
                coeff = Fraction(coeff_s)
            except (ValueError, ZeroDivisionError):
                raise InputError(
                    f"bad coefficient {coeff_s!r} in {expr!r}") from None
        else:
            coeff, label = Q(1), term
        try:
            idx = space.index_of(degree, label)
        except InputError:
            raise InputError(
                f"no basis label {label!r} in degree {degree}") from None
        vec[idx] += sign * coeff
    return vec


# ---------------------------------------------------------------------------
# subcommands


def cmd_validate(args) -> Report:
    rep = Report("validate")
    doc = resolve_document(args.document)
    _gate(rep, doc)
    return rep


def cmd_cohomology(args) -> Report:
    rep = Report("cohomology")
    doc = resolve_document(args.document)
    if not _gate(rep, doc):
        return rep
    for name, table in doc.algebras.items():
        upto = _cohomology_bound(table, args.truncation)
        rep.table(f"cohomology {name}",
                  cohomology_dims(table.complex, upto))
    return rep


def cmd_check_pd(args) -> Report:
    rep = Report("check-pd")
    doc = resolve_document(args.document)
    if not _gate(rep, doc):
        return rep
    table = doc.primary
    n = _require_dimension(doc, args)
    ok, res = is_pd_cdga(table, n, doc.orientation_of())
    if ok:
        rep.add("poincare-duality", True, f"dimension {n}")
        if n % 4 == 0 and n > 0:
            pos, neg = pairing_signature(table, n, res.orientation)
            rep.notes.append(f"middle pairing signature: ({pos}, {neg})")
    else:
        detail = res.get("reason", "fails")
        if "degree" in res:
            detail += f" (degree {res['degree']})"
        rep.add("poincare-duality", False, detail)
    upto = _cohomology_bound(table, None)
    rep.table("cohomology", cohomology_dims(table.complex, upto))
    return rep


def cmd_orphans(args) -> Report:
    rep = Report("orphans")
    doc = resolve_document(args.document)
    if not _gate(rep, doc):
        return rep
    table = doc.primary
    n = _require_dimension(doc, args)
    eps = _orientation_for(doc, table, n)
    ideal = orphan_ideal(table, n, eps)
    degrees = range(0, max(n, table.space.top()) + 1)
    profile = {p: ideal.dim(p) for p in degrees}
    rep.table("orphans", profile)
    total = sum(profile.values())
    if total == 0:
        rep.add("orphan-free", True)
    else:
        first = next(p for p in degrees if profile[p])
        witness = _fmt_vec(table.space, first, ideal.vectors[first][0])
        rep.add("orphan-free", False,
                f"degree {first}: {witness} pairs with nothing")
        acyclic, info = is_acyclic_ideal(ideal)
        rep.add("orphans-acyclic", acyclic,
                "" if acyclic else f"degree {info['degree']}", gating=False)
    return rep


def cmd_pd_quotient(args) -> Report:
    rep = Report("pd-quotient")
    doc = resolve_document(args.document)
    if not _gate(rep, doc):
        return rep
    table = doc.primary
    n = _require_dimension(doc, args)
    eps = _orientation_for(doc, table, n)
    ideal = orphan_ideal(table, n, eps)
    acyclic, info = is_acyclic_ideal(ideal)
    rep.add("orphans-acyclic", acyclic,
            "" if acyclic else f"degree {info['degree']}", gating=False)
    out, proj, eps_q = pd_quotient(table, n, eps)
    rep.add("quotient-valid", validate_cdga(out).ok)
    ok, _ = is_pd_cdga(out, n, eps_q)
    rep.add("quotient-pd", ok, f"dimension {n}" if ok else "")
    qok, qinfo = is_quasi_iso(proj)
    rep.add("projection-quasi-iso", qok,
            "" if qok else f"degree {qinfo.get('degree')}", gating=False)
    rep.table("quotient dims", {p: out.dim(p) for p in range(0, n + 1)})
    rep.table("quotient cohomology",
              cohomology_dims(out.complex, _cohomology_bound(out, None)))
    return rep


def cmd_kill_orphans(args) -> Report:
    rep = Report("kill-orphans")
    doc = resolve_document(args.document)
    if not _gate(rep, doc):
        return rep
    table = doc.primary
    n = _require_dimension(doc, args)
    eps = _orientation_for(doc, table, n)
    ideal = orphan_ideal(table, n, eps)
    degrees = range(0, max(n, table.space.top()) + 1)
    profile = {p: ideal.dim(p) for p in degrees}
    if sum(profile.values()) == 0:
        rep.add("orphan-free", True)
        rep.notes.append("nothing to repair")
        return rep
    p = args.degree
    if p is None:
        p = next(q for q in degrees if profile[q])
    ahat, incl, eps_hat = kill_orphans_in_degree(table, n, eps, p)
    rep.notes.append(f"killed {profile[p]} orphan(s) in degree {p}; "
                     f"generators added in degrees {n - p - 1} and {n - p}")
    rep.add("extension-valid", validate_cdga(ahat).ok)
    good, _ = is_orientation(ahat, n, eps_hat)
    rep.add("orientation-extends", good)
    iok, iinfo = is_quasi_iso(incl)
    rep.add("inclusion-quasi-iso", iok, "" if iok else str(iinfo))
    new_ideal = orphan_ideal(ahat, n, eps_hat)
    rep.add("orphans-cleared-below",
            all(new_ideal.dim(q) == 0 for q in range(0, p + 1)),
            f"degrees 0..{p}")
    rep.table("extension dims",
              {q: ahat.dim(q) for q in ahat.space.degrees()})
    rep.table("extension orphans",
              {q: new_ideal.dim(q) for q in range(0, n + 1)})
    return rep


def cmd_balanced(args) -> Report:
    rep = Report("balanced")
    doc = resolve_document(args.map)
    if not _gate(rep, doc):
        return rep
    f = _first_modmap(doc)
    ok, info = is_balanced(f)
    if ok:
        witness = "degree window shortcut" if info.get("shortcut") else ""
        rep.add("balanced", True, witness)
    else:
        x, y = info["witness"]
        p, q = info["degrees"]
        rep.add("balanced", False,
                f"pair ({x}, {y}) in degrees ({p}, {q})")
    return rep


def cmd_cone(args) -> Report:
    rep = Report("cone")
    doc = resolve_document(args.map)
    if not _gate(rep, doc):
        return rep
    f = _first_modmap(doc)
    cone, _, _ = mapping_cone(f)
    rep.add("cone-valid", validate_module(cone).ok)
    dims = cohomology_dims(cone.complex, _cohomology_bound_module(cone))
    rep.table("cone cohomology", dims)
    acyclic = all(v == 0 for v in dims.values())
    rep.add("map-quasi-iso", acyclic, "" if acyclic else
            f"H nonzero in degree "
            f"{next(p for p, v in dims.items() if v)}", gating=False)
    return rep


def _cohomology_bound_module(mod) -> int:
    bound = mod.complex.faithful_cohomology_upto()
    return bound if bound is not None else max(mod.space.top(), 0)


def _pretty_model_report(rep: Report, doc: CdgaDocument, args
                         ) -> PrettyModel | None:
    phi = _first_morphism(doc, getattr(args, "morphism", None))
    src_name = next(a for a, t in doc.algebras.items() if t is phi.source)
    n = _require_dimension(doc, args, src_name)
    eps = doc.orientation_of(src_name)
    ok, cert = is_pd_cdga(phi.source, n, eps)
    if not rep.add("source-pd", ok,
                   f"dimension {n}" if ok else str(cert.get("reason"))):
        return None
    pm = build_pretty_model(phi, cert)
    res = verify_pretty_model(pm)
    for check, good in res["checks"].items():
        gating = check != "balanced_shortcut"
        rep.add(check.replace("_", "-"), bool(good), gating=gating)
    rep.table("domain cohomology", res["domain_cohomology"])
    rep.table("codomain cohomology", res["codomain_cohomology"])
    surj = all(
        rank(phi.map.block(p)) == phi.target.dim(p)
        for p in phi.target.space.degrees())
    rep.add("surjective", surj, "", gating=False)
    return pm


def cmd_pretty_model(args) -> Report:
    rep = Report("pretty-model")
    doc = resolve_document(args.document)
    if not _gate(rep, doc):
        return rep
    _pretty_model_report(rep, doc, args)
    return rep


def cmd_quotient_model(args) -> Report:
    rep = Report("quotient-model")
    doc = resolve_document(args.document)
    if not _gate(rep, doc):
        return rep
    pm = _pretty_model_report(rep, doc, args)
    if pm is None:
        return rep
    quot, pi, ideal = surjective_quotient_model(pm)
    rep.add("ideal-valid", validate_ideal(ideal).ok)
    rep.add("quotient-valid", validate_cdga(quot).ok)
    qok, qinfo = is_quasi_iso(pi)
    rep.add("projection-quasi-iso", qok, "" if qok else str(qinfo))
    rep.table("shriek ideal dims", ideal.dims())
    rep.table("quotient cohomology",
              cohomology_dims(quot.complex, _cohomology_bound(quot, None)))
    return rep


def cmd_boundary_double(args) -> Report:
    rep = Report("boundary-double")
    doc = resolve_document(args.document)
    if not _gate(rep, doc):
        return rep
    table = doc.primary
    n = args.dimension
    if n is None:
        raise InputError("boundary-double needs --dimension")
    double, eps, incl = boundary_double(table, n)
    rep.add("double-valid", validate_cdga(double).ok)
    ok, _ = is_pd_cdga(double, n - 1, eps)
    rep.add("poincare-duality", ok, f"dimension {n - 1}" if ok else "")
    bad = [p for p in range(0, n)
           if double.dim(p) != table.dim(p) + table.dim(n - 1 - p)]
    rep.add("shape-identity", not bad,
            "" if not bad else f"fails in degree {bad[0]}")
    rep.table("double dims", {p: double.dim(p) for p in range(0, n)})
    rep.table("double cohomology",
              cohomology_dims(double.complex, _cohomology_bound(double, None)))
    return rep


def cmd_disk_bundle(args) -> Report:
    rep = Report("disk-bundle")
    doc = resolve_document(args.base)
    if not _gate(rep, doc):
        return rep
    base = doc.primary
    n = _require_dimension(doc, args)
    ok, cert = is_pd_cdga(base, n, doc.orientation_of())
    if not rep.add("base-pd", ok,
                   f"dimension {n}" if ok else str(cert.get("reason"))):
        return rep
    if args.rank <= 0 or args.rank % 2:
        raise InputError(f"rank must be a positive even integer, "
                         f"got {args.rank}")
    euler = _parse_combination(args.euler, base.space, args.rank)
    mdl = disk_bundle_pretty_model(base, cert, args.rank, euler)
    rep.notes.append(
        f"rank {args.rank} bundle over {doc.primary_name}, "
        f"euler class {_fmt_vec(base.space, args.rank, euler)}")
    if args.verify:
        res = verify_bundle_equivalence(mdl)
        for check, good in res["checks"].items():
            rep.add(check.replace("_", "-"), bool(good))
        rep.table("sphere cohomology", res["sphere_cohomology"])
        rep.table("domain cohomology", res["domain_cohomology"])
        rep.table("codomain cohomology", res["codomain_cohomology"])
    else:
        rep.add("model-built", True)
        rep.table("domain cohomology", cohomology_dims(
            mdl.domain.complex, _cohomology_bound(mdl.domain, None)))
        rep.table("codomain cohomology", cohomology_dims(
            mdl.codomain.complex, _cohomology_bound(mdl.codomain, None)))
    rep.table("total dims",
              {p: mdl.total.dim(p) for p in mdl.total.space.degrees()})
    return rep


def cmd_verify(args) -> Report:
    rep = Report("verify")
    doc = resolve_document(args.document)
    if not _gate(rep, doc):
        return rep
    for name, table in doc.algebras.items():
        eps = doc.orientations.get(name)
        if eps is not None:
            n = doc.dimensions[name]
            theta = theta_map(table, n, eps)
            rep.add(f"theta-chain-equivariant:{name}",
                    validate_module_map(theta).ok)
            sym = _eps_symmetry(table, n, eps)
            rep.add(f"pairing-symmetry:{name}", sym == "", sym)
            ok, _ = is_pd_cdga(table, n, eps)
            rep.add(f"poincare-duality:{name}", ok, "", gating=False)
        upto = _cohomology_bound(table, None)
        rep.table(f"cohomology {name}", cohomology_dims(table.complex, upto))
    for name, mor in doc.morphisms.items():
        ok, info = is_quasi_iso(mor)
        rep.add(f"quasi-iso:{name}", ok, "" if ok else str(info),
                gating=False)
    for name, mm in doc.modmaps.items():
        ok, info = is_balanced(mm)
        witness = "" if ok else "pair ({}, {})".format(*info["witness"])
        rep.add(f"balanced:{name}", ok, witness, gating=False)
    return rep


def _eps_symmetry(table: CdgaTable, n: int, eps: Sequence) -> str:
    """Empty string when eps(xy) = (-1)^{pq} eps(yx) everywhere, else a
    witness pair."""
    from .pdual import eval_functional

    for p in table.space.degrees():
        q = n - p
        if q < 0 or table.dim(q) == 0:
            continue
        for i in range(table.dim(p)):
            for j in range(table.dim(q)):
                x = table.basis_vector(p, i)
                y = table.basis_vector(q, j)
                xy = eval_functional(eps, table.mult_vec(p, x, q, y))
                yx = eval_functional(eps, table.mult_vec(q, y, p, x))
                if xy != (Q(-1) ** ((p * q) % 2)) * yx:
                    return (f"({table.labels(p)[i]}, {table.labels(q)[j]})"
                            f": {xy} vs {yx}")
    return ""


# ---------------------------------------------------------------------------
# wiring


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", choices=("table", "json"),
                        default="table", help="report rendering")
    common.add_argument("--figures", metavar="DIR",
                        help="also draw each table as a bar chart into DIR")

    ap = argparse.ArgumentParser(
        prog="cdgatools",
        description="exact rational homotopy computations on finite "
                    "multiplication tables")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=func)
        return p

    p = add("validate", cmd_validate, "check every axiom in a document")
    p.add_argument("document", help=".cdga file or corpus name")

    p = add("cohomology", cmd_cohomology, "cohomology table of each algebra")
    p.add_argument("document")
    p.add_argument("--truncation", type=int, default=None,
                   help="compute through this degree only")

    p = add("check-pd", cmd_check_pd, "decide Poincare duality")
    p.add_argument("document")
    p.add_argument("--dimension", type=int, default=None)

    p = add("orphans", cmd_orphans, "profile of the orphan ideal")
    p.add_argument("document")
    p.add_argument("--dimension", type=int, default=None)

    p = add("pd-quotient", cmd_pd_quotient, "quotient by the orphan ideal")
    p.add_argument("document")
    p.add_argument("--dimension", type=int, default=None)

    p = add("kill-orphans", cmd_kill_orphans,
            "repair transient orphans in one degree")
    p.add_argument("document")
    p.add_argument("--dimension", type=int, default=None)
    p.add_argument("--degree", type=int, default=None,
                   help="orphan degree to clear (default: lowest)")

    p = add("balanced", cmd_balanced, "test the balance identity")
    p.add_argument("--map", required=True,
                   help="document carrying a module map")

    p = add("cone", cmd_cone, "mapping cone of a module map")
    p.add_argument("--map", required=True)

    p = add("pretty-model", cmd_pretty_model,
            "shriek construction over a morphism of oriented algebras")
    p.add_argument("document")
    p.add_argument("--dimension", type=int, default=None)
    p.add_argument("--morphism", default=None,
                   help="name of the morphism to use (default: first)")

    p = add("quotient-model", cmd_quotient_model,
            "small quotient model of a surjective pretty model")
    p.add_argument("document")
    p.add_argument("--dimension", type=int, default=None)
    p.add_argument("--morphism", default=None)

    p = add("boundary-double", cmd_boundary_double,
            "double of an algebra as the boundary of a thickening")
    p.add_argument("document")
    p.add_argument("--dimension", type=int, required=True,
                   help="thickening dimension n; the double closes up "
                        "in dimension n-1")

    p = add("disk-bundle", cmd_disk_bundle,
            "pretty model of an even-rank disk bundle")
    p.add_argument("--base", required=True,
                   help="oriented base document")
    p.add_argument("--euler", required=True,
                   help="euler class as a combination of degree-rank labels")
    p.add_argument("--rank", type=int, required=True,
                   help="bundle rank (even)")
    p.add_argument("--dimension", type=int, default=None)
    p.add_argument("--verify", action="store_true",
                   help="run the full equivalence verification")

    p = add("verify", cmd_verify,
            "every applicable check on a document's contents")
    p.add_argument("document")

    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        rep = args.func(args)
    except (ParseError, InputError, TruncationError) as e:
        rep = Report(args.command, parse_failure=str(e))
    text = to_json(rep) if args.output == "json" else to_text(rep)
    sys.stdout.write(text)
    if args.figures and rep.status != "input-error":
        for path in render_figures(rep, args.figures):
            sys.stderr.write(f"figure: {path}\n")
    return rep.exit_code


if __name__ == "__main__":
    sys.exit(main())
