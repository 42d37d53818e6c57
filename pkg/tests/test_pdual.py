"""Orientations, duality certificates, orphans and their repair."""

import pytest

from cdgatools import (InputError, cohomology_dims, is_pd_cdga, is_quasi_iso,
                       load_corpus, validate_cdga, validate_module_map,
                       validate_morphism)
from cdgatools.linalg import Q
from cdgatools.pdual import (PdCertificate, canonical_orientation,
                             is_orientation, kill_orphans_in_degree,
                             normalize_orientation, orphan_ideal,
                             orphan_profile, pairing_block, pairing_signature,
                             pd_quotient, theta_map)

from helpers import mk


def junk4():
    # u pairs with nothing and is closed; a^2 carries the duality
    return mk({0: ("one",), 2: ("a", "u"), 4: ("om",)},
              mult={(2, 0, 2, 0): {0: 1}})


def test_sphere_certificate():
    a = load_corpus("sphere2").primary
    ok, cert = is_pd_cdga(a)
    assert ok and isinstance(cert, PdCertificate)
    assert cert.n == 2
    assert cert.orientation == [Q(1)]
    assert validate_module_map(cert.theta).ok


def test_orientation_predicate_and_normalization():
    a = load_corpus("sphere2").primary
    ok, _ = is_orientation(a, 2, [Q(3)])
    assert ok
    eps, lam = normalize_orientation(a, 2, [Q(3)])
    assert eps == [Q(1)] and lam == Q(3)
    ok, why = is_orientation(a, 2, [Q(0)])
    assert not ok and why["reason"] == "zero functional"


def test_orientation_must_kill_boundaries():
    a = load_corpus("s3-acyclic").primary
    # v = dt, so a functional hitting v in degree 3 is not an orientation
    ok, why = is_orientation(a, 3, [Q(1), Q(0)])
    assert not ok
    assert why["reason"] == "does not vanish on boundaries"
    assert why["witness"] == "t"


def test_cp2_middle_signature():
    a = load_corpus("cp2").primary
    ok, cert = is_pd_cdga(a)
    assert ok
    assert pairing_signature(a, 4, cert.orientation) == (1, 0)
    with pytest.raises(InputError, match="divisible by 4"):
        pairing_signature(load_corpus("sphere2").primary, 2, [Q(1)])


def test_degenerate_pairing_detected():
    a = junk4()
    assert validate_cdga(a).ok
    ok, why = is_pd_cdga(a)
    assert not ok
    assert why["reason"] == "degenerate pairing"
    assert why["degree"] == 2 and why["rank"] == 1
    assert canonical_orientation(a, 4) == [Q(1)]


def test_orphan_profile_and_quotient():
    a = junk4()
    eps = [Q(1)]
    assert orphan_profile(a, 4, eps) == {0: 0, 1: 0, 2: 1, 3: 0, 4: 0}
    out, proj, eps_q = pd_quotient(a, 4, eps)
    assert validate_cdga(out).ok
    assert {p: out.dim(p) for p in out.space.degrees()} == {0: 1, 2: 1, 4: 1}
    assert validate_morphism(proj).ok
    ok, cert = is_pd_cdga(out, 4, eps_q)
    assert ok and isinstance(cert, PdCertificate)


def test_kill_refusals():
    a = junk4()
    eps = [Q(1)]
    with pytest.raises(InputError, match="no orphans in degree 1"):
        kill_orphans_in_degree(a, 4, eps, 1)
    with pytest.raises(InputError, match="out of range"):
        kill_orphans_in_degree(a, 4, eps, 2)
    # closed orphan in range: nothing pairs with u and du = 0
    b = mk({0: ("one",), 2: ("u",), 8: ("om",)})
    with pytest.raises(InputError, match="closed orphan in degree 2"):
        kill_orphans_in_degree(b, 8, [Q(1)], 2)


def test_kill_orphans_transient():
    a = load_corpus("orphan8").primary
    eps = [Q(1)]
    prof = orphan_profile(a, 8, eps)
    assert {p: d for p, d in prof.items() if d} == {2: 1, 3: 1}
    ext, incl, eps_hat = kill_orphans_in_degree(a, 8, eps, 2)
    assert validate_cdga(ext).ok
    assert ext.truncation == 9
    dims = {p: ext.dim(p) for p in ext.space.degrees()}
    assert dims == {0: 1, 2: 1, 3: 1, 5: 1, 6: 1, 7: 1, 8: 3, 9: 1}
    assert ext.labels(8) == ("om", "u2_0.b", "ub2_0.a")
    assert eps_hat == [Q(1), Q(1), Q(1)]
    ok, _ = is_orientation(ext, 8, eps_hat)
    assert ok
    assert validate_morphism(incl).ok
    ok, _ = is_quasi_iso(incl)
    assert ok
    # the degree-2 orphan is gone and nothing new appeared below it
    prof = orphan_profile(ext, 8, eps_hat)
    assert all(prof[q] == 0 for q in range(0, 3))
    assert cohomology_dims(ext.complex, upto=8)[8] == 1


def test_closed_orphans_quotient_only():
    a = load_corpus("closed-orphan6").primary
    eps = [Q(1)]
    prof = orphan_profile(a, 6, eps)
    assert {p: d for p, d in prof.items() if d} == {3: 1, 5: 1}
    assert cohomology_dims(a.complex) == {0: 1, 1: 0, 2: 1, 3: 0,
                                          4: 1, 5: 0, 6: 1}
    out, proj, eps_q = pd_quotient(a, 6, eps)
    ok, cert = is_pd_cdga(out, 6, eps_q)
    assert ok and isinstance(cert, PdCertificate)
    ok, info = is_quasi_iso(proj)
    assert not ok and info["degree"] == 2
    with pytest.raises(InputError, match="out of range"):
        kill_orphans_in_degree(a, 6, eps, 3)


def test_theta_and_pairing_block():
    a = load_corpus("cp2").primary
    th = theta_map(a, 4, [Q(1)])
    assert validate_module_map(th).ok
    assert pairing_block(a, 4, [Q(1)], 2).data == [[1]]
    ideal = orphan_ideal(a, 4, [Q(1)])
    assert ideal.dims() == {}
    with pytest.raises(InputError, match="not an orientation"):
        orphan_ideal(a, 4, [Q(0)])
