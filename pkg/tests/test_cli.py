"""End-to-end command line runs, exercised in process."""

import json

import pytest

from helpers import run_cli


def lines_of(out):
    return out.splitlines()


def test_validate_ok():
    out, code = run_cli(["validate", "sphere2"])
    assert code == 0
    first = lines_of(out)
    assert first[0] == "command: validate"
    assert first[1] == "status: ok"
    assert "valid:sphere2 | pass" in out
    assert "orientation:sphere2 | pass" in out


def test_validate_unknown_corpus():
    out, code = run_cli(["validate", "nosuch"])
    assert code == 2
    assert "status: input-error" in out
    assert "error: no corpus document 'nosuch'" in out


def test_validate_parse_error_position(tmp_path):
    p = tmp_path / "broken.cdga"
    p.write_text("cdga 1\nname x\nbasis 0 one\nunit one\ndiff q 1 one\n")
    out, code = run_cli(["validate", str(p)])
    assert code == 2
    assert "error: line 5, column 1: unknown label 'q'" in out


def test_cohomology_table():
    out, code = run_cli(["cohomology", "sphere2"])
    assert code == 0
    body = lines_of(out)
    i = body.index("table: cohomology sphere2")
    assert body[i + 1] == "degree | dim"
    assert body[i + 2 : i + 5] == ["0 | 1", "1 | 0", "2 | 1"]


def test_check_pd_with_signature():
    out, code = run_cli(["check-pd", "cp2"])
    assert code == 0
    assert "poincare-duality | pass | dimension 4" in out
    assert "note: middle pairing signature: (1, 0)" in out


def test_check_pd_failure():
    out, code = run_cli(["check-pd", "s3-acyclic"])
    assert code == 1
    assert "poincare-duality | fail | content above dimension 3" in out


def test_orphans_profile():
    out, code = run_cli(["orphans", "s3-acyclic"])
    assert code == 1
    assert "orphan-free | fail | degree 2: t pairs with nothing" in out
    assert "orphans-acyclic | pass" in out
    body = lines_of(out)
    i = body.index("table: orphans")
    # profiled through the top of the table, not just the duality dimension
    assert body[i + 2 : i + 9] == ["0 | 0", "1 | 0", "2 | 1", "3 | 1",
                                   "4 | 0", "5 | 1", "6 | 1"]


def test_orphans_clean():
    out, code = run_cli(["orphans", "cp2"])
    assert code == 0
    assert "orphan-free | pass" in out


def test_pd_quotient_collapses_junk():
    out, code = run_cli(["pd-quotient", "s3-acyclic"])
    assert code == 0
    assert "orphans-acyclic | pass" in out
    assert "quotient-valid | pass" in out
    assert "quotient-pd | pass | dimension 3" in out
    assert "projection-quasi-iso | pass" in out
    body = lines_of(out)
    i = body.index("table: quotient dims")
    assert body[i + 2 : i + 6] == ["0 | 1", "1 | 0", "2 | 0", "3 | 1"]


def test_kill_orphans_run():
    out, code = run_cli(["kill-orphans", "orphan8"])
    assert code == 0
    assert ("note: killed 1 orphan(s) in degree 2; "
            "generators added in degrees 5 and 6") in out
    for name in ("extension-valid", "orientation-extends",
                 "inclusion-quasi-iso", "orphans-cleared-below"):
        assert f"{name} | pass" in out
    body = lines_of(out)
    i = body.index("table: extension dims")
    assert "8 | 3" in body[i:]


def test_kill_orphans_nothing_to_do():
    out, code = run_cli(["kill-orphans", "cp2"])
    assert code == 0
    assert "note: nothing to repair" in out


def test_balanced_witness():
    out, code = run_cli(["balanced", "--map", "badmap"])
    assert code == 1
    assert "balanced | fail | pair (w, u) in degrees (0, 2)" in out


def test_cone_of_unbalanced_map_still_works():
    out, code = run_cli(["cone", "--map", "badmap"])
    assert code == 0
    assert "cone-valid | pass" in out
    assert "map-quasi-iso | no | H nonzero in degree 1" in out


def test_quotient_model_of_point_collapse():
    out, code = run_cli(["quotient-model", "cp2-point"])
    assert code == 0
    for name in ("source-pd | pass | dimension 4", "shriek-balanced | pass",
                 "surjective | pass", "ideal-valid | pass",
                 "quotient-valid | pass", "projection-quasi-iso | pass"):
        assert name in out
    body = lines_of(out)
    i = body.index("table: shriek ideal dims")
    assert body[i + 2] == "4 | 1"


def test_pretty_model_needs_a_morphism():
    out, code = run_cli(["pretty-model", "cp2"])
    assert code == 2
    assert "error: document carries no morphism" in out


def test_boundary_double_ok():
    out, code = run_cli(["boundary-double", "sphere2", "--dimension", "8"])
    assert code == 0
    assert "double-valid | pass" in out
    assert "poincare-duality | pass | dimension 7" in out
    assert "shape-identity | pass" in out


def test_boundary_double_wide_content():
    out, code = run_cli(["boundary-double", "cp2", "--dimension", "8"])
    assert code == 2
    assert "content in degree 4 >= n/2 - 1" in out


def test_boundary_double_requires_dimension():
    with pytest.raises(SystemExit):
        run_cli(["boundary-double", "sphere2"])


def test_disk_bundle_deterministic():
    argv = ["disk-bundle", "--base", "sphere2", "--euler", "a", "--rank", "2"]
    out1, code = run_cli(argv)
    assert code == 0
    assert "note: rank 2 bundle over sphere2, euler class a" in out1
    assert "model-built | pass" in out1
    body = lines_of(out1)
    i = body.index("table: total dims")
    assert body[i + 2 : i + 5] == ["0 | 1", "2 | 2", "4 | 1"]
    out2, _ = run_cli(argv)
    assert out1 == out2


def test_disk_bundle_verify():
    out, code = run_cli(["disk-bundle", "--base", "sphere2", "--euler", "a",
                         "--rank", "2", "--verify"])
    assert code == 0
    for name in ("chi-isomorphism", "zero-section-quasi-iso",
                 "shriek-balanced", "total-cdga"):
        assert f"{name} | pass" in out
    assert "table: sphere cohomology" in out


def test_disk_bundle_bad_rank():
    out, code = run_cli(["disk-bundle", "--base", "sphere2", "--euler", "a",
                         "--rank", "3"])
    assert code == 2
    assert "error: rank must be a positive even integer, got 3" in out


def test_disk_bundle_bad_euler_label():
    out, code = run_cli(["disk-bundle", "--base", "sphere2", "--euler", "q",
                         "--rank", "2"])
    assert code == 2
    assert "error: no basis label 'q' in degree 2" in out


def test_verify_oriented_document():
    out, code = run_cli(["verify", "sphere2"])
    assert code == 0
    assert "theta-chain-equivariant:sphere2 | pass" in out
    assert "pairing-symmetry:sphere2 | pass" in out
    assert "poincare-duality:sphere2 | pass" in out


def test_verify_junk_is_not_pd_but_exits_zero():
    out, code = run_cli(["verify", "s3-acyclic"])
    assert code == 0
    assert "poincare-duality:s3-acyclic | no" in out


def test_verify_reports_unbalanced_modmap():
    out, code = run_cli(["verify", "badmap"])
    assert code == 0
    assert "balanced:f | no | pair (w, u)" in out


def test_json_output():
    out, code = run_cli(["check-pd", "cp2", "--output", "json"])
    assert code == 0
    doc = json.loads(out)
    assert doc["command"] == "check-pd"
    assert doc["status"] == "ok"
    assert doc["tables"]["cohomology"]["4"] == 1
    assert any(f["check"] == "poincare-duality" and f["ok"]
               for f in doc["findings"])


def test_figures_are_rendered(tmp_path):
    out, code = run_cli(["cohomology", "sphere2", "--figures",
                         str(tmp_path)])
    assert code == 0
    png = tmp_path / "cohomology-cohomology-sphere2.png"
    assert png.is_file()
    assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
