import json
from io import StringIO

import pytest
from django.core.management import call_command
from django.core.management.base import CommandError

from gerbes.nervecohomology import CIRCLE
from gerbes.workspace import loads


def run(*args, **options):
    out = StringIO()
    err = StringIO()
    call_command(*args, stdout=out, stderr=err, **options)
    return out.getvalue(), err.getvalue()


def run_json(*args, **options):
    out, _ = run(*args, **options)
    return json.loads(out)


def run_failing(*args, **options):
    out = StringIO()
    err = StringIO()
    with pytest.raises(CommandError) as e:
        call_command(*args, stdout=out, stderr=err, **options)
    assert out.getvalue() == ""
    return e.value, json.loads(err.getvalue())


def test_cohomology_of_a_group():
    report = run_json("cohomology", "Z2", coefficients=CIRCLE, max_degree=2)
    assert report == [
        {"degree": 0, "free_rank": 0, "torsion": [], "divisible": 1},
        {"degree": 1, "free_rank": 0, "torsion": [2], "divisible": 0},
        {"degree": 2, "free_rank": 0, "torsion": [], "divisible": 0},
    ]


def test_cohomology_of_an_action():
    report = run_json("cohomology", "sphere", max_degree=2, truncation="3,3")
    assert [r["free_rank"] for r in report] == [1, 0, 1]


def test_cohomology_with_a_short_truncation():
    error, payload = run_failing("cohomology", "sphere", max_degree=2, truncation="2,2")
    assert error.returncode == 1
    assert payload["error"] == "insufficient-truncation"


def test_cohomology_refuses_large_bar_complexes(settings):
    settings.ORBIFOLD_BAR_CELL_BOUND = 1000
    error, payload = run_failing("cohomology", "Z8", max_degree=3)
    assert error.returncode == 2
    assert payload["error"] == "bound-exceeded"
    assert payload["params"] == {"bound": 1000, "value": 7**4}


def test_malformed_truncation():
    _, payload = run_failing("cohomology", "sphere", truncation="3")
    assert payload["error"] == "truncation-format"


def test_cohomology_table_output():
    out, _ = run("cohomology", "Z2xZ2", max_degree=3, output="table")
    lines = out.splitlines()
    assert lines[0].split() == ["degree", "free_rank", "torsion", "divisible"]
    assert lines[4].split() == ["2", "0", "2,2", "0"]
    assert lines[5].split() == ["3", "0", "2", "0"]


def test_discrete_torsion_command():
    report = run_json("discrete_torsion", "Z2xZ2")
    assert (report["order"], report["classes"], report["moduli"]) == (4, 2, [2])
    assert report["representatives"][0] == {"class": 0, "coordinates": [0], "values": {}}
    assert report["representatives"][1]["coordinates"] == [1]


def test_discrete_torsion_refuses_large_groups(settings):
    settings.ORBIFOLD_ENUMERATION_BOUND = 4
    error, payload = run_failing("discrete_torsion", "Z5")
    assert error.returncode == 2
    assert payload == {
        "error": "bound-exceeded",
        "message": "Group of order 5 exceeds the enumeration bound 4",
        "params": {"bound": 4, "value": 5},
    }


def test_inertia_of_a_group():
    report = run_json("inertia", "S3")
    assert report["sectors"] == 3
    assert [s["isotropy_order"] for s in report["details"]] == [6, 2, 3]


def test_inertia_of_the_pillowcase():
    report = run_json("inertia", "pillowcase")
    assert report["sectors"] == 5


def test_transgress_command():
    report = run_json("transgress", "Z2xZ2", "1")
    assert report["verdict"] == {"valid": True}
    characters = {s["element"]: s["character"] for s in report["sectors"]}
    assert characters["(1,0)"]["(0,1)"] == "1/2"
    assert characters["(0,0)"]["(1,1)"] == "0/1"


def test_transgress_with_a_bad_class_index():
    error, payload = run_failing("transgress", "Z2", "3")
    assert error.returncode == 1
    assert payload["error"] == "class-index"
    assert payload["params"] == {"index": 3, "classes": 1}


def test_dd_class_of_discrete_torsion():
    report = run_json("dd_class", "v4-torsion")
    assert report["kind"] == "dixmier-douady"
    assert report["degree"] == 3
    assert report["class"]["coordinates"] == [1]
    assert not report["trivial"]
    assert run_json("dd_class", "v4-trivial")["trivial"]


def test_chern_class_of_a_line_bundle():
    report = run_json("dd_class", "z2-line-bundle")
    assert report["kind"] == "chern"
    assert report["degree"] == 2
    assert report["class"] == {"coordinates": [1], "moduli": [2]}


def test_dd_class_of_a_flat_gerbe():
    report = run_json("dd_class", "torus-flat-gerbe")
    assert report["trivial"]
    assert any(v != "0/1" for v in report["flat_class"]["divisible"])


def test_verify_accepts_cocycles():
    assert run_json("verify", "v4-torsion-point") == {
        "cocycle": "v4-torsion-point",
        "degree": 2,
        "valid": True,
    }
    assert run_json("verify", "v4-torsion")["valid"]


def test_verify_names_the_failing_cell():
    error, payload = run_failing("verify", "v4-perturbed")
    assert error.returncode == 1
    assert payload["error"] == "not-a-cocycle"
    assert payload["params"]["cocycle"] == "v4-perturbed"
    assert payload["params"]["cell"].startswith("0|")


def test_unknown_names_are_reported():
    _, payload = run_failing("verify", "klein-bottle-gerbe")
    assert payload["error"] == "unresolved-reference"


def test_morita_check_of_the_doubling():
    report = run_json("morita_check", "pillowcase-doubling", max_degree=1)
    assert report["verdict"] == {"equivalent": True, "certificate": None}
    assert [r["equal"] for r in report["cohomology"]] == [True, True]


def test_morita_check_table_output():
    out, _ = run("morita_check", "edge-pair-identity", output="table")
    assert out.splitlines()[-1].split() == ["weak", "equivalence", "yes"]


def test_commands_read_workspace_files(tmp_path):
    path = tmp_path / "workspace.json"
    path.write_text(
        json.dumps(
            {
                "version": "v1",
                "groups": {"Z3": {"table": [[0, 1, 2], [1, 2, 0], [2, 0, 1]]}},
            }
        )
    )
    report = run_json("discrete_torsion", "Z3", workspace=str(path))
    assert report["classes"] == 1


@pytest.mark.parametrize(
    "args",
    [
        ("cohomology", "Z2"),
        ("discrete_torsion", "Z2"),
        ("inertia", "Z2"),
        ("transgress", "Z2", "0"),
        ("dd_class", "v4-torsion"),
        ("verify", "v4-torsion"),
        ("morita_check", "edge-pair-identity"),
    ],
)
def test_commands_accept_an_explicit_workspace(args):
    out, err = run(*args, workspace="builtin")
    assert json.loads(out) == run_json(*args)
    assert err == ""


def test_export_workspace(tmp_path):
    out, _ = run("export_workspace")
    assert "pillowcase" in loads(out).actions

    path = tmp_path / "builtin.json"
    run("export_workspace", file=str(path))
    assert path.read_text() == out
