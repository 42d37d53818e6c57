"""Pretty models: shrieks, the two cones, quotients, boundary doubles."""

import pytest

from cdgatools import (CdgaMorphism, InputError, cohomology_dims, is_pd_cdga,
                       is_quasi_iso, load_corpus, validate_cdga,
                       validate_ideal, validate_morphism)
from cdgatools.graded import identity_map
from cdgatools.linalg import Q
from cdgatools.pretty import (boundary_double, build_pretty_model, shriek,
                              surjective_quotient_model, verify_pretty_model)

from helpers import h_dims, mk


def model_from(doc_name):
    doc = load_corpus(doc_name)
    phi = next(iter(doc.morphisms.values()))
    src = next(a for a, t in doc.algebras.items() if t is phi.source)
    ok, cert = is_pd_cdga(phi.source, doc.dimension_of(src),
                          doc.orientation_of(src))
    assert ok
    return build_pretty_model(phi, cert)


def test_collapse_to_point():
    pm = model_from("cp2-point")
    assert set(pm.shriek_map.map.blocks) == {4}
    assert pm.shriek_map.map.block(4).data == [[1]]
    assert h_dims(pm.domain) == {0: 1, 1: 0, 2: 1, 3: 0, 4: 0}
    assert h_dims(pm.codomain) == {0: 1, 1: 0, 2: 0, 3: 1}
    res = verify_pretty_model(pm)
    assert res["ok"]

    quot, pi, ideal = surjective_quotient_model(pm)
    assert ideal.dims() == {4: 1}
    assert validate_ideal(ideal).ok
    assert {p: quot.dim(p) for p in quot.space.degrees()} == {0: 1, 2: 1}
    ok, _ = is_quasi_iso(pi)
    assert ok


def test_collapse_onto_sphere():
    pm = model_from("cp2-collapse")
    res = verify_pretty_model(pm)
    assert res["ok"]
    for check, good in res["checks"].items():
        if check != "balanced_shortcut":
            assert good, check
    quot, pi, ideal = surjective_quotient_model(pm)
    assert ideal.dims() == {2: 1, 4: 1}
    assert {p: quot.dim(p) for p in quot.space.degrees()} == {0: 1}
    ok, _ = is_quasi_iso(pi)
    assert ok


def test_identity_model_is_acyclic_above_zero():
    a = load_corpus("cp2").primary
    ok, cert = is_pd_cdga(a)
    assert ok
    ident = CdgaMorphism(a, a, identity_map(a.space))
    pm = build_pretty_model(ident, cert)
    assert verify_pretty_model(pm)["ok"]
    assert h_dims(pm.domain) == {0: 1, 1: 0, 2: 0, 3: 0, 4: 0}
    # the shriek hits the unit, so collapsing would disconnect the quotient
    with pytest.raises(InputError, match="unit"):
        surjective_quotient_model(pm)


def test_shriek_blocks_invert_the_pairing():
    doc = load_corpus("cp2-collapse")
    phi = doc.morphisms["phi"]
    ok, cert = is_pd_cdga(phi.source, 4, doc.orientation_of("cp2"))
    assert ok
    sh = shriek(phi, cert)
    assert set(sh.map.blocks) == {2, 4}
    assert sh.map.block(2).data == [[1]]


def test_boundary_double_of_y2():
    q = mk({0: ("one",), 2: ("y",)})
    double, eps, incl = boundary_double(q, 8)
    assert validate_cdga(double).ok
    assert h_dims(double) == {0: 1, 1: 0, 2: 1, 3: 0, 4: 0, 5: 1, 6: 0, 7: 1}
    ok, cert = is_pd_cdga(double, 7, eps)
    assert ok
    assert validate_morphism(incl).ok
    # sf pairs evaluation-style: the orientation sits on the suspended part
    assert eps == [Q(1)]


def test_boundary_double_refuses_wide_content():
    a = load_corpus("cp2").primary
    with pytest.raises(InputError, match="n/2"):
        boundary_double(a, 8)
