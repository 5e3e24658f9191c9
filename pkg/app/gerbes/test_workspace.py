import json

import pytest

from gerbes.exceptions import InvariantError
from gerbes.gerbe import DiscreteTorsion, FlatLineBundle, GerbeCocycle
from gerbes.groupoid import is_weak_equivalence
from gerbes.workspace import VERSION, builtin_document, load_workspace, loads


def document(**sections):
    data = {"version": VERSION}
    data.update(sections)
    return json.dumps(data)


Z2 = {"Z2": {"table": [[0, 1], [1, 0]]}}
POINT = {"point": {"vertex_count": 1, "simplices": [[[0]]]}}
POINT_Z2 = {"point-Z2": {"group": "Z2", "complex": "point", "vertex_maps": [[0], [0]]}}


def test_builtin_workspace_round_trip(workspace):
    text = workspace.dumps()
    assert loads(text).dumps() == text


def test_builtin_workspace_has_fixtures_and_examples(workspace):
    assert {"pillowcase", "pillowcase-doubled", "sphere", "point-Q8"} <= set(workspace.actions)
    assert {"v4-torsion", "torus-flat-gerbe", "z3-line-bundle"} <= set(workspace.cocycles)
    assert workspace.group("S3-perm").order == 6
    assert len(workspace.group("S3-perm").conjugacy_classes()) == 3
    assert workspace.group("Z3-named").labels == ("e", "r", "rr")
    assert workspace.action("edge-pair-swap").is_free()


def test_cocycles_resolve_to_their_kind(workspace):
    assert isinstance(workspace.cocycle("v4-torsion"), DiscreteTorsion)
    assert isinstance(workspace.cocycle("s3-trivial"), DiscreteTorsion)
    assert isinstance(workspace.cocycle("torus-flat-gerbe"), GerbeCocycle)
    assert isinstance(workspace.cocycle("z3-line-bundle"), FlatLineBundle)


def test_example_morphism(workspace):
    assert is_weak_equivalence(workspace.morphism("edge-pair-identity"))
    assert workspace.morphism_entry("edge-pair-identity").on == "simplices"


def test_kind_of_names(workspace):
    assert workspace.kind_of("Q8") == "group"
    assert workspace.kind_of("sphere") == "action"
    with pytest.raises(InvariantError) as e:
        workspace.kind_of("klein-bottle")
    assert e.value.code == "unresolved-reference"


def test_workspace_version_is_checked():
    with pytest.raises(InvariantError) as e:
        loads(json.dumps({"version": "v0"}))
    assert e.value.code == "workspace-version"
    assert e.value.params == {"version": "v0"}


@pytest.mark.parametrize("text", ["{", "[]", '"v1"'])
def test_workspace_must_be_a_json_object(text):
    with pytest.raises(InvariantError) as e:
        loads(text)
    assert e.value.code == "workspace-json"


def test_unknown_sections_are_rejected():
    with pytest.raises(InvariantError) as e:
        loads(document(orbifolds={}))
    assert e.value.code == "workspace-field"
    assert e.value.params == {"sections": ["orbifolds"]}


def test_missing_fields_are_named():
    with pytest.raises(InvariantError) as e:
        loads(document(groups=Z2, complexes=POINT, actions={"a": {"group": "Z2"}}))
    assert e.value.code == "workspace-field"
    assert e.value.params == {"object": "action a", "field": "complex"}


def loop(steps, start=0):
    return {"l": {"action": "point-Z2", "start": start, "steps": steps}}


def morphism(**fields):
    entry = {"source": "point-Z2", "target": "point-Z2", "vertex_map": [0]}
    entry["homomorphism"] = ["0", "1"]
    entry.update(fields)
    return {"m": entry}


def cocycle(**fields):
    entry = {"action": "point-Z2", "degree": 1, "truncation": [2, 2], "values": {}}
    entry.update(fields)
    return {"c": entry}


@pytest.mark.parametrize(
    "sections, context, field",
    [
        ({"groups": {"Z2": {"table": [[0, 1], [1]]}}}, "group Z2", "table"),
        ({"groups": {"Z2": {"table": "01/10"}}}, "group Z2", "table"),
        ({"groups": {"Z2": {"generators": [[1, "0"]]}}}, "group Z2", "generators"),
        (
            {"groups": {"Z2": {"table": [[0, 1], [1, 0]], "labels": [["e"], "a"]}}},
            "group Z2",
            "labels",
        ),
        (
            {"complexes": {"point": {"vertex_count": "1", "simplices": []}}},
            "complex point",
            "vertex_count",
        ),
        (
            {"complexes": {"point": {"vertex_count": 1, "simplices": [[0]]}}},
            "complex point",
            "simplices",
        ),
        (
            {"actions": {"a": {"group": "Z2", "complex": "point", "vertex_maps": [[0], []]}}},
            "action a",
            "vertex_maps",
        ),
        ({"loops": loop([["arrow"]])}, "loop l", "steps"),
        ({"loops": loop([["edge", "0"]])}, "loop l", "steps"),
        ({"loops": loop([["jump", "1"]])}, "loop l", "steps"),
        ({"loops": loop("arrow 1")}, "loop l", "steps"),
        ({"loops": loop([["arrow", "1"]], start="0")}, "loop l", "start"),
        ({"cocycles": cocycle(degree="two")}, "cocycle c", "degree"),
        ({"cocycles": cocycle(degree=True)}, "cocycle c", "degree"),
        ({"cocycles": cocycle(values=["1/2"])}, "cocycle c", "values"),
        ({"cocycles": cocycle(values={"0|1": [1, 2]})}, "cocycle c", "values"),
        ({"cocycles": cocycle(truncation="2,2")}, "cocycle c", "truncation"),
        ({"morphisms": morphism(vertex_map=["0"])}, "morphism m", "vertex_map"),
        ({"morphisms": morphism(homomorphism="01")}, "morphism m", "homomorphism"),
        ({"morphisms": morphism(on="cells")}, "morphism m", "on"),
    ],
)
def test_malformed_fields_are_named(sections, context, field):
    data = {"groups": Z2, "complexes": POINT, "actions": POINT_Z2}
    data.update(sections)
    with pytest.raises(InvariantError) as e:
        loads(document(**data))
    assert e.value.code == "workspace-field"
    assert e.value.params["object"] == context
    assert e.value.params["field"] == field


@pytest.mark.parametrize("entry", [[], "Z2", 2, None])
def test_entries_must_be_objects(entry):
    with pytest.raises(InvariantError) as e:
        loads(document(groups={"Z2": entry}))
    assert e.value.code == "workspace-field"
    assert e.value.params == {"object": "group Z2", "field": None}


def test_sections_must_be_objects():
    with pytest.raises(InvariantError) as e:
        loads(document(groups=[Z2]))
    assert e.value.code == "workspace-field"
    assert e.value.params == {"sections": ["groups"]}


def test_unreadable_values_are_rejected():
    with pytest.raises(InvariantError) as e:
        loads(
            document(
                groups=Z2,
                complexes=POINT,
                actions=POINT_Z2,
                cocycles=cocycle(values={"0|1": "half"}),
            )
        )
    assert e.value.code == "circle-value"


def test_references_must_resolve():
    actions = {"point-Z3": {"group": "Z3", "complex": "point", "vertex_maps": [[0]] * 3}}
    with pytest.raises(InvariantError) as e:
        loads(document(groups=Z2, complexes=POINT, actions=actions))
    assert e.value.code == "unresolved-reference"
    assert e.value.params == {"kind": "group", "name": "Z3"}


def test_cocycle_truncation_must_cover_the_degree():
    cocycles = {"g": {"action": "point-Z2", "degree": 2, "truncation": [2, 3], "values": {}}}
    with pytest.raises(InvariantError) as e:
        loads(document(groups=Z2, complexes=POINT, actions=POINT_Z2, cocycles=cocycles))
    assert e.value.code == "insufficient-truncation"


def test_invalid_objects_fail_at_load():
    groups = {"broken": {"table": [[0, 1], [0, 1]]}}
    with pytest.raises(InvariantError) as e:
        loads(document(groups=groups))
    assert e.value.code == "group-identity"


def test_cocycle_values_are_canonical():
    cocycles = {
        "b": {
            "action": "point-Z2",
            "degree": 1,
            "truncation": [2, 2],
            "values": {"0|1": "3/2", "0|": "0"},
        }
    }
    workspace = loads(document(groups=Z2, complexes=POINT, actions=POINT_Z2, cocycles=cocycles))
    assert workspace.to_json()["cocycles"]["b"]["values"] == {"0|1": "1/2"}


def test_load_workspace_from_file(tmp_path):
    path = tmp_path / "workspace.json"
    path.write_text(document(groups=Z2, complexes=POINT, actions=POINT_Z2))
    workspace = load_workspace(str(path))
    assert workspace.action("point-Z2").group.order == 2


def test_missing_workspace_file(tmp_path):
    with pytest.raises(InvariantError) as e:
        load_workspace(str(tmp_path / "missing.json"))
    assert e.value.code == "workspace-file"


def test_default_workspace_comes_from_settings(settings, tmp_path):
    path = tmp_path / "workspace.json"
    path.write_text(document(groups=Z2))
    settings.ORBIFOLD_DEFAULT_WORKSPACE = str(path)
    assert list(load_workspace().groups) == ["Z2"]
    settings.ORBIFOLD_DEFAULT_WORKSPACE = "builtin"
    assert "pillowcase" in load_workspace().actions


def test_examples_do_not_shadow_fixtures():
    data = builtin_document()
    assert data["version"] == VERSION
    assert "edge-pair" in data["complexes"]
    assert "torus" in data["complexes"]
