"""Acceptance gate: one test per promised behavior, every check exact.

Each test prints a single "criterion N: PASS/FAIL" line (visible under
pytest -s, or in the captured output of a failure).  The orientation
criterion runs first: every later construction leans on functionals
being chain maps with the right symmetry, so when that one breaks,
nothing after it means much.

The randomized criteria re-derive both sides of their biconditionals on
every sample; the seeds are fixed so failures reproduce, and the floors
only guarantee that both branches actually occurred.
"""

import random

from cdgatools import (cohomology, corpus_names, is_acyclic_ideal,
                       is_balanced, is_orientation, is_pd_cdga, is_quasi_iso,
                       is_quasi_iso_complexes, kill_orphans_in_degree,
                       load_corpus, mapping_cone, orphan_ideal, parse,
                       pd_quotient, self_module, semi_trivial_cone, serialize,
                       sphere_bundle_model, theta_map, validate_cdga,
                       validate_module_map, validate_morphism)
from cdgatools.bundle import disk_bundle_pretty_model
from cdgatools.graded import map_on_cohomology
from cdgatools.linalg import Q, rank
from cdgatools.pdual import eval_functional
from cdgatools.pretty import boundary_double, build_pretty_model, \
    surjective_quotient_model

from helpers import (h_dims, mk, random_hom, random_module,
                     random_positive_module, run_cli)


def _verdict(n: int, problems: list) -> None:
    word = "PASS" if not problems else f"FAIL ({len(problems)} problem(s))"
    print(f"criterion {n}: {word}")
    assert not problems, problems[:5]


def _pool():
    return [load_corpus(name).primary
            for name in ("sphere2", "sphere3", "cp2", "acyclic-pair")]


def test_criterion_7_orientations_are_symmetric_chain_maps():
    problems = []
    for name in corpus_names():
        doc = load_corpus(name)
        for aname, eps in doc.orientations.items():
            table = doc.algebras[aname]
            n = doc.dimensions[aname]
            if not validate_module_map(theta_map(table, n, eps)).ok:
                problems.append(f"{name}/{aname}: theta is not a module map")
            for p in table.space.degrees():
                q = n - p
                if q < 0 or table.dim(q) == 0:
                    continue
                sgn = Q(-1) ** ((p * q) % 2)
                for i in range(table.dim(p)):
                    x = table.basis_vector(p, i)
                    for j in range(table.dim(q)):
                        y = table.basis_vector(q, j)
                        xy = eval_functional(eps, table.mult_vec(p, x, q, y))
                        yx = eval_functional(eps, table.mult_vec(q, y, p, x))
                        if xy != sgn * yx:
                            problems.append(
                                f"{name}/{aname}: eps asymmetric on "
                                f"({table.labels(p)[i]}, {table.labels(q)[j]})")
    _verdict(7, problems)


def test_criterion_1_cone_multiplies_iff_balanced():
    rng = random.Random(7)
    pool = _pool()
    problems = []
    counts = {True: 0, False: 0}
    for _ in range(200):
        alg = pool[rng.randrange(len(pool))]
        f = random_hom(rng, random_positive_module(rng, alg),
                       self_module(alg))
        cone, _, _ = semi_trivial_cone(f)
        built_ok = validate_cdga(cone).ok
        bal, _ = is_balanced(f)
        counts[bal] += 1
        if built_ok != bal:
            problems.append(f"cone validity {built_ok} but balanced {bal}")
    if counts[True] < 50 or counts[False] < 5:
        problems.append(f"samples too one-sided: {counts}")
    _verdict(1, problems)


def test_criterion_2_disk_bundle_over_the_even_sphere():
    problems = []
    base = load_corpus("sphere2").primary
    ok, cert = is_pd_cdga(base)
    assert ok

    mdl = disk_bundle_pretty_model(base, cert, 2, [Q(1)])
    if h_dims(mdl.domain) != {0: 1, 1: 0, 2: 1, 3: 0, 4: 0}:
        problems.append(f"domain cohomology {h_dims(mdl.domain)}")
    if h_dims(mdl.codomain) != {0: 1, 1: 0, 2: 0, 3: 1}:
        problems.append(f"codomain cohomology {h_dims(mdl.codomain)}")

    # the codomain untwists onto the sphere bundle model by a literal iso
    sph = sphere_bundle_model(base, 2, [Q(1)])
    if not validate_morphism(mdl.chi).ok:
        problems.append("untwisting map is not a morphism")
    if (mdl.sphere.space.basis != sph.space.basis
            or mdl.sphere.mult != sph.mult
            or mdl.sphere.complex.d.blocks != sph.complex.d.blocks):
        problems.append("sphere model differs from the adjoined generator")

    flat = disk_bundle_pretty_model(base, cert, 2, [Q(0)])
    if h_dims(flat.codomain) != {0: 1, 1: 1, 2: 1, 3: 1}:
        problems.append(f"zero euler codomain {h_dims(flat.codomain)}")

    pt = load_corpus("point").primary
    ok, pcert = is_pd_cdga(pt)
    assert ok
    for rk in (2, 4, 6):
        m = disk_bundle_pretty_model(pt, pcert, rk, [])
        want = {p: 0 for p in range(0, rk)}
        want[0] = want[rk - 1] = 1
        if h_dims(m.codomain) != want:
            problems.append(f"rank {rk} over the point: "
                            f"{h_dims(m.codomain)}")
    _verdict(2, problems)


def test_criterion_3_surjective_models_collapse_by_quasi_iso():
    problems = []
    seen = 0
    for name in corpus_names():
        doc = load_corpus(name)
        for mname, phi in doc.morphisms.items():
            src = next(a for a, t in doc.algebras.items()
                       if t is phi.source)
            ok, cert = is_pd_cdga(phi.source, doc.dimension_of(src),
                                  doc.orientation_of(src))
            if not ok:
                continue
            surjective = all(
                rank(phi.map.block(p)) == phi.target.dim(p)
                for p in phi.target.space.degrees())
            if not surjective:
                continue
            seen += 1
            pm = build_pretty_model(phi, cert)
            quot, pi, _ = surjective_quotient_model(pm)
            if not validate_cdga(quot).ok:
                problems.append(f"{name}/{mname}: quotient invalid")
            qok, info = is_quasi_iso(pi)
            if not qok:
                problems.append(f"{name}/{mname}: projection fails at {info}")
    if seen < 2:
        problems.append(f"only {seen} surjective oriented models in corpus")
    _verdict(3, problems)


def test_criterion_4_boundary_doubles():
    problems = []
    q = mk({0: ("one",), 2: ("y2",)})
    double, eps, incl = boundary_double(q, 8)
    dims = {p: double.dim(p) for p in range(0, 8)}
    if dims != {0: 1, 1: 0, 2: 1, 3: 0, 4: 0, 5: 1, 6: 0, 7: 1}:
        problems.append(f"double of (1, y2) has dims {dims}")
    ok, _ = is_pd_cdga(double, 7, eps)
    if not ok:
        problems.append("double of (1, y2) is not Poincare in dimension 7")
    if not validate_morphism(incl).ok:
        problems.append("inclusion into the double is not a morphism")

    rng = random.Random(4)
    for _ in range(30):
        n = rng.choice([8, 9, 10])
        pmax = (n - 3) // 2
        basis = {0: ("one",)}
        for p in range(1, pmax + 1):
            k = rng.randint(0, 2)
            if k:
                basis[p] = tuple(f"x{p}_{i}" for i in range(k))
        dblocks = {}
        for p in range(1, pmax, 2):
            src, tgt = len(basis.get(p, ())), len(basis.get(p + 1, ()))
            pairs = min(src, tgt)
            if pairs:
                rows = [[Q(1) if i == j and j < pairs else Q(0)
                         for j in range(src)] for i in range(tgt)]
                dblocks[p] = rows
        table = mk(basis, dblocks=dblocks)
        assert validate_cdga(table).ok
        double, eps, _ = boundary_double(table, n)
        if not validate_cdga(double).ok:
            problems.append(f"random double invalid (n={n})")
            continue
        for p in range(0, n):
            if double.dim(p) != table.dim(p) + table.dim(n - 1 - p):
                problems.append(f"shape identity fails at degree {p} (n={n})")
                break
    _verdict(4, problems)


def test_criterion_5_junk_ideal_is_acyclic_and_collapses():
    problems = []
    doc = load_corpus("s3-acyclic")
    a = doc.primary
    eps = doc.orientation_of()
    ideal = orphan_ideal(a, 3, eps)
    profile = {p: ideal.dim(p) for p in range(0, 7)}
    if profile != {0: 0, 1: 0, 2: 1, 3: 1, 4: 0, 5: 1, 6: 1}:
        problems.append(f"orphan profile {profile}")
    ok, info = is_acyclic_ideal(ideal)
    if not ok:
        problems.append(f"orphan ideal has cohomology: {info}")
    out, proj, eps_q = pd_quotient(a, 3, eps)
    dims = {p: out.dim(p) for p in out.space.degrees()}
    if dims != {0: 1, 3: 1} or out.mult:
        problems.append(f"quotient is not the odd sphere: {dims}")
    ok, _ = is_pd_cdga(out, 3, eps_q)
    if not ok:
        problems.append("quotient fails duality in dimension 3")
    qok, _ = is_quasi_iso(proj)
    if not qok:
        problems.append("projection onto the quotient is not a quasi-iso")
    _verdict(5, problems)


def test_criterion_6_transient_orphans_are_repaired():
    problems = []
    a = load_corpus("orphan8").primary
    eps = load_corpus("orphan8").orientation_of()
    ext, incl, eps_hat = kill_orphans_in_degree(a, 8, eps, 2)
    if ext.labels(5) != ("u2_0",) or ext.labels(6) != ("ub2_0",):
        problems.append(f"generators {ext.labels(5)} / {ext.labels(6)}")
    ok, info = is_orientation(ext, 8, eps_hat)
    if not ok:
        problems.append(f"extended functional: {info}")
    # ub pairs the orphan to 1: the ub2_0.a coordinate of eps_hat
    idx = ext.space.index_of(8, "ub2_0.a")
    if eps_hat[idx] != 1:
        problems.append(f"eps_hat(ub.a) = {eps_hat[idx]}")
    ok, info = is_quasi_iso(incl)
    if not ok:
        problems.append(f"inclusion not a quasi-iso: {info}")
    new_ideal = orphan_ideal(ext, 8, eps_hat)
    bad = [q for q in range(0, 3) if new_ideal.dim(q)]
    if bad:
        problems.append(f"orphans persist in degrees {bad}")
    if cohomology(ext.complex, 8)[0] != 1:
        problems.append("top cohomology moved")
    _verdict(6, problems)


def test_criterion_8_cone_cohomology_is_the_long_exact_count():
    rng = random.Random(11)
    pool = _pool()
    problems = []
    counts = {True: 0, False: 0}
    for _ in range(200):
        alg = pool[rng.randrange(len(pool))]
        src = random_module(rng, alg)
        tgt = random_module(rng, alg)
        f = random_hom(rng, src, tgt)
        cone, _, _ = mapping_cone(f)
        degs = src.space.degrees() + tgt.space.degrees()
        lo, hi = min(degs + [0]) - 1, max(degs) + 1
        acyclic = True
        for p in range(lo, hi + 1):
            hs = cohomology(src.complex, p + 1)[0]
            ht = cohomology(tgt.complex, p)[0]
            rp = rank(map_on_cohomology(f.map, src.complex,
                                        tgt.complex, p))
            rp1 = rank(map_on_cohomology(f.map, src.complex,
                                         tgt.complex, p + 1))
            hc = cohomology(cone.complex, p)[0]
            if hc != (ht - rp) + (hs - rp1):
                problems.append(
                    f"degree {p}: cone {hc} vs coker {ht - rp} + "
                    f"kernel {hs - rp1}")
            if hc:
                acyclic = False
        qi, _ = is_quasi_iso_complexes(f.map, src.complex, tgt.complex)
        counts[qi] += 1
        if qi != acyclic:
            problems.append(f"quasi-iso {qi} but cone acyclic {acyclic}")
    if counts[True] < 3 or counts[False] < 50:
        problems.append(f"samples too one-sided: {counts}")
    _verdict(8, problems)


def test_criterion_9_round_trips_and_determinism():
    problems = []
    for name in corpus_names():
        doc = load_corpus(name)
        text = serialize(doc)
        if serialize(parse(text, name=doc.name)) != text:
            problems.append(f"{name}: serialization is not a fixed point")
    argv = ["disk-bundle", "--base", "sphere2", "--euler", "a",
            "--rank", "2", "--verify"]
    out1, code1 = run_cli(argv)
    out2, code2 = run_cli(argv)
    if code1 != 0:
        problems.append(f"disk-bundle --verify exited {code1}")
    if out1 != out2:
        problems.append("disk-bundle --verify output changed between runs")
    _verdict(9, problems)
