"""
Workspace documents

A workspace is one JSON file holding named groups, complexes, actions,
cocycles, loops and morphisms. Every object is validated when the document
is loaded, so commands never compute on a broken reference.

    {
        "version": "v1",
        "groups": {"Z2": {"table": [[0, 1], [1, 0]], "labels": ["0", "1"]}},
        "complexes": {"point": {"vertex_count": 1, "simplices": [[[0]]]}},
        "actions": {"point-Z2": {"group": "Z2", "complex": "point", "vertex_maps": [[0], [0]]}},
        "cocycles": {"z2-line-bundle": {"action": "point-Z2", "degree": 1,
                                        "truncation": [2, 2], "values": {"0|1": "1/2"}}},
        "loops": {"z2-generator": {"action": "point-Z2", "start": 0,
                                   "steps": [["arrow", "1"]]}},
        "morphisms": {}
    }
"""

import json
import logging
import os
from dataclasses import dataclass
from functools import cache

from django.conf import settings

from gerbes import fixtures
from gerbes.exactalg import CircleValue
from gerbes.exceptions import InvariantError
from gerbes.gerbe import (
    EDGE,
    STEP_KINDS,
    CircleCochain,
    CombinatorialLoop,
    DiscreteTorsion,
    FlatLineBundle,
    GerbeCocycle,
)
from gerbes.groupoid import (
    FiniteGroup,
    SimplicialAction,
    SimplicialComplex,
    action_morphism,
)
from gerbes.nervecohomology import double_complex

logger = logging.getLogger("gerbes")

VERSION = "v1"
BUILTIN = "builtin"
EXAMPLES_FILE = os.path.join(os.path.dirname(__file__), "data", "examples.json")
SECTIONS = ("groups", "complexes", "actions", "cocycles", "loops", "morphisms")
OBJECT_SETS = ("group", "vertices", "simplices")


@dataclass(frozen=True)
class CocycleEntry:
    """A named cochain, on a group (bar cells) or on an action (total cells)"""

    name: str
    degree: int
    values: tuple
    group: str = None
    action: str = None
    truncation: tuple = None

    def to_json(self):
        data = {"degree": self.degree, "values": dict(self.values)}
        if self.group is not None:
            data["group"] = self.group
        else:
            data["action"] = self.action
            data["truncation"] = list(self.truncation)
        return data


@dataclass(frozen=True)
class LoopEntry:
    name: str
    action: str
    start: int
    steps: tuple

    def to_json(self, workspace):
        labels = workspace.action(self.action).group.labels
        return {
            "action": self.action,
            "start": self.start,
            "steps": [
                [kind, x if kind == EDGE else labels[x]] for kind, x in self.steps
            ],
        }


@dataclass(frozen=True)
class MorphismEntry:
    name: str
    source: str
    target: str
    vertex_map: tuple
    homomorphism: tuple
    on: str = "simplices"

    def to_json(self, workspace):
        labels = workspace.action(self.target).group.labels
        return {
            "source": self.source,
            "target": self.target,
            "vertex_map": list(self.vertex_map),
            "homomorphism": [labels[g] for g in self.homomorphism],
            "on": self.on,
        }


def _require(data, key, context):
    try:
        return data[key]
    except (KeyError, TypeError):
        raise InvariantError(
            "%s is missing %r" % (context, key),
            code="workspace-field",
            params={"object": context, "field": key},
        )


def _is_integer(value):
    return isinstance(value, int) and not isinstance(value, bool)


def _is_name(value):
    return isinstance(value, str)


def _is_scalar(value):
    return isinstance(value, str) or _is_integer(value)


def _nested(depth, rectangular=False):
    """Lists nested ``depth`` times around integers"""

    def check(value, level=depth):
        if level == 0:
            return _is_integer(value)
        if not isinstance(value, list):
            return False
        if not all(check(x, level - 1) for x in value):
            return False
        return not (rectangular and level == 2 and len({len(row) for row in value}) > 1)

    return check


def _list_of(check):
    return lambda value: isinstance(value, list) and all(check(x) for x in value)


_MISSING = object()


def _field(data, key, context, expected, check, default=_MISSING):
    """``data[key]`` after checking its JSON shape

    :param  expected: what the field should hold, for the error message
    :param  check:    predicate on the decoded value
    """
    if default is not _MISSING and key not in data:
        return default
    value = _require(data, key, context)
    if not check(value):
        raise InvariantError(
            "%s has a malformed %r, expected %s" % (context, key, expected),
            code="workspace-field",
            params={"object": context, "field": key},
        )
    return value


def parse_group(name, data):
    context = "group %s" % name
    if "generators" in data:
        generators = _field(data, "generators", context, "permutation lists", _nested(2))
        return FiniteGroup.from_permutations(generators, name=name)
    table = _field(
        data, "table", context, "a square integer table", _nested(2, rectangular=True)
    )
    labels = _field(data, "labels", context, "a list of labels", _list_of(_is_scalar), None)
    return FiniteGroup.from_table(table, labels, name)


def parse_complex(name, data):
    context = "complex %s" % name
    count = _field(data, "vertex_count", context, "an integer", _is_integer)
    if "facets" in data:
        facets = _field(data, "facets", context, "vertex lists", _nested(2))
        return SimplicialComplex.from_facets(count, facets, name)
    simplices = _field(data, "simplices", context, "vertex lists by dimension", _nested(3))
    return SimplicialComplex(count, simplices, name)


def _canonical_values(values, context):
    out = {}
    for key, value in sorted(values.items()):
        if not _is_scalar(value):
            raise InvariantError(
                "%s has a malformed value at %s" % (context, key),
                code="workspace-field",
                params={"object": context, "field": "values", "cell": key},
            )
        value = CircleValue.of(value)
        if not value.is_zero():
            out[str(key)] = str(value)
    return tuple(out.items())


def _entries(data, section):
    """Sorted (name, entry) pairs of a section, every entry an object"""
    entries = data.get(section, {})
    if not isinstance(entries, dict):
        raise InvariantError(
            "Workspace section %s must be an object" % section,
            code="workspace-field",
            params={"sections": [section]},
        )
    for name, entry in sorted(entries.items()):
        if not isinstance(entry, dict):
            raise InvariantError(
                "%s %s must be an object" % (section[:-1], name),
                code="workspace-field",
                params={"object": "%s %s" % (section[:-1], name), "field": None},
            )
        yield name, entry


class Workspace(object):
    def __init__(self):
        self.groups = {}
        self.complexes = {}
        self.actions = {}
        self.action_refs = {}
        self.cocycles = {}
        self.loops = {}
        self.morphisms = {}

    @classmethod
    def from_json(cls, data):
        """Parses and validates a workspace document

        :param  data: the decoded JSON document
        :type   data: dict
        :rtype: Workspace
        """
        if not isinstance(data, dict):
            raise InvariantError("A workspace is a JSON object", code="workspace-json")
        version = data.get("version")
        if version != VERSION:
            raise InvariantError(
                "Unsupported workspace version %r, expected %r" % (version, VERSION),
                code="workspace-version",
                params={"version": version},
            )
        unknown = set(data) - set(SECTIONS) - {"version"}
        if unknown:
            raise InvariantError(
                "Unknown workspace sections %s" % ", ".join(sorted(unknown)),
                code="workspace-field",
                params={"sections": sorted(unknown)},
            )
        workspace = cls()
        for name, entry in _entries(data, "groups"):
            workspace.groups[name] = parse_group(name, entry)
        for name, entry in _entries(data, "complexes"):
            workspace.complexes[name] = parse_complex(name, entry)
        for name, entry in _entries(data, "actions"):
            context = "action %s" % name
            group = workspace.group(_field(entry, "group", context, "a name", _is_name))
            space = workspace.complex(_field(entry, "complex", context, "a name", _is_name))
            maps = _field(
                entry,
                "vertex_maps",
                context,
                "one vertex list per element",
                _nested(2, rectangular=True),
            )
            workspace.actions[name] = SimplicialAction(group, space, maps, name=name)
            workspace.action_refs[name] = (entry["group"], entry["complex"])
        for name, entry in _entries(data, "cocycles"):
            workspace.cocycles[name] = workspace._parse_cocycle(name, entry)
        for name, entry in _entries(data, "loops"):
            workspace.loops[name] = workspace._parse_loop(name, entry)
        for name, entry in _entries(data, "morphisms"):
            workspace.morphisms[name] = workspace._parse_morphism(name, entry)
        logger.debug(
            "Loaded workspace with %s",
            ", ".join("%d %s" % (len(getattr(workspace, s)), s) for s in SECTIONS),
        )
        return workspace

    def _parse_cocycle(self, name, entry):
        context = "cocycle %s" % name
        degree = _field(entry, "degree", context, "an integer", _is_integer)
        values = _field(entry, "values", context, "an object", lambda v: isinstance(v, dict))
        values = _canonical_values(values, context)
        if "group" in entry:
            self.group(_field(entry, "group", context, "a name", _is_name))
            if degree != 2:
                raise InvariantError(
                    "Group cocycle %s must have degree 2" % name, code="cochain-shape"
                )
            return CocycleEntry(name, degree, values, group=entry["group"])
        self.action(_field(entry, "action", context, "a name", _is_name))
        truncation = _field(
            entry, "truncation", context, "[p_max, q_max]", _nested(1), [degree + 1, degree + 1]
        )
        truncation = tuple(truncation)
        if len(truncation) != 2 or min(truncation) < degree + 1:
            raise InvariantError(
                "Cocycle %s needs a truncation of at least %d" % (name, degree + 1),
                code="insufficient-truncation",
                params={"cocycle": name, "truncation": list(truncation)},
            )
        return CocycleEntry(
            name, degree, values, action=entry["action"], truncation=truncation
        )

    def _parse_loop(self, name, entry):
        context = "loop %s" % name
        action = self.action(_field(entry, "action", context, "a name", _is_name))
        start = _field(entry, "start", context, "a vertex", _is_integer)

        def is_step(step):
            return (
                isinstance(step, list)
                and len(step) == 2
                and step[0] in STEP_KINDS
                and (_is_integer(step[1]) if step[0] == EDGE else _is_scalar(step[1]))
            )

        steps = _field(
            entry, "steps", context, "[kind, vertex or element] pairs", _list_of(is_step)
        )
        steps = tuple(
            (kind, x if kind == EDGE else action.group.index(x)) for kind, x in steps
        )
        return LoopEntry(name, entry["action"], start, steps)

    def _parse_morphism(self, name, entry):
        context = "morphism %s" % name
        source = self.action(_field(entry, "source", context, "a name", _is_name))
        target = self.action(_field(entry, "target", context, "a name", _is_name))
        vertex_map = _field(entry, "vertex_map", context, "a list of vertices", _nested(1))
        vertex_map = tuple(vertex_map)
        if len(vertex_map) != source.space.vertex_count:
            raise InvariantError(
                "Vertex map of %s has the wrong length" % name, code="morphism-shape"
            )
        on = _field(
            entry,
            "on",
            context,
            "group, vertices or simplices",
            lambda value: value in OBJECT_SETS,
            "simplices",
        )
        homomorphism = _field(
            entry, "homomorphism", context, "a list of elements", _list_of(_is_scalar)
        )
        homomorphism = tuple(target.group.index(g) for g in homomorphism)
        if len(homomorphism) != source.group.order:
            raise InvariantError(
                "Homomorphism of %s has the wrong length" % name, code="morphism-shape"
            )
        return MorphismEntry(
            name, entry["source"], entry["target"], vertex_map, homomorphism, on
        )

    def _lookup(self, section, name):
        try:
            return getattr(self, section)[name]
        except KeyError:
            raise InvariantError(
                "No %s named %r in the workspace" % (section[:-1], name),
                code="unresolved-reference",
                params={"kind": section[:-1], "name": name},
            )

    def group(self, name):
        return self._lookup("groups", name)

    def complex(self, name):
        return self._lookup("complexes", name)

    def action(self, name):
        return self._lookup("actions", name)

    def kind_of(self, name):
        """``action`` or ``group``, actions win on a name clash"""
        if name in self.actions:
            return "action"
        if name in self.groups:
            return "group"
        raise InvariantError(
            "No group or action named %r in the workspace" % name,
            code="unresolved-reference",
            params={"kind": "group or action", "name": name},
        )

    def cocycle(self, name):
        """The named cochain, resolved against its group or action

        :rtype: DiscreteTorsion or CircleCochain
        """
        entry = self._lookup("cocycles", name)
        values = dict(entry.values)
        if entry.group is not None:
            return DiscreteTorsion.from_mapping(self.group(entry.group), values)
        model = double_complex(self.action(entry.action), *entry.truncation)
        kind = {1: FlatLineBundle, 2: GerbeCocycle}.get(entry.degree, CircleCochain)
        cochain = CircleCochain.from_mapping(model, entry.degree, values)
        return kind(model, entry.degree, cochain.values)

    def loop(self, name):
        """:rtype: tuple of (SimplicialAction, CombinatorialLoop)"""
        entry = self._lookup("loops", name)
        return self.action(entry.action), CombinatorialLoop(entry.start, entry.steps)

    def morphism(self, name):
        """:rtype: gerbes.groupoid.GroupoidMorphism"""
        entry = self._lookup("morphisms", name)
        return action_morphism(
            self.action(entry.source),
            self.action(entry.target),
            entry.vertex_map,
            entry.homomorphism,
            entry.on,
        )

    def morphism_entry(self, name):
        return self._lookup("morphisms", name)

    def to_json(self):
        return {
            "version": VERSION,
            "groups": {name: g.to_json() for name, g in self.groups.items()},
            "complexes": {name: c.to_json() for name, c in self.complexes.items()},
            "actions": {
                name: action.to_json(*self.action_refs[name])
                for name, action in self.actions.items()
            },
            "cocycles": {name: c.to_json() for name, c in self.cocycles.items()},
            "loops": {name: loop.to_json(self) for name, loop in self.loops.items()},
            "morphisms": {name: m.to_json(self) for name, m in self.morphisms.items()},
        }

    def dumps(self):
        return json.dumps(self.to_json(), sort_keys=True, indent=2) + "\n"


def loads(text):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise InvariantError(
            "Workspace is not valid JSON: %s" % e.msg,
            code="workspace-json",
            params={"line": e.lineno, "column": e.colno},
        )
    return Workspace.from_json(data)


def builtin_document():
    """Every shipped fixture plus the hand-written examples, as one document"""
    groups = fixtures.builtin_groups()
    complexes = fixtures.builtin_complexes()
    names = {id(space): name for name, space in complexes.items()}
    group_names = {id(group): name for name, group in groups.items()}
    actions = {}
    for name, action in fixtures.builtin_actions().items():
        actions[name] = action.to_json(group_names[id(action.group)], names[id(action.space)])
    document = {
        "version": VERSION,
        "groups": {name: g.to_json() for name, g in groups.items()},
        "complexes": {name: c.to_json() for name, c in complexes.items()},
        "actions": actions,
        "cocycles": fixtures.builtin_cocycles(),
        "loops": fixtures.builtin_loops(),
        "morphisms": fixtures.builtin_morphisms(),
    }
    with open(EXAMPLES_FILE) as f:
        examples = json.load(f)
    for section in SECTIONS:
        clash = set(document[section]) & set(examples.get(section, {}))
        if clash:
            raise InvariantError(
                "Example names clash with fixtures: %s" % ", ".join(sorted(clash)),
                code="workspace-field",
            )
        document[section].update(examples.get(section, {}))
    return document


@cache
def builtin_workspace():
    return Workspace.from_json(builtin_document())


def load_workspace(source=None):
    """Loads a workspace file, or the shipped one for ``builtin``

    :param  source: path or ``builtin``, ORBIFOLD_DEFAULT_WORKSPACE when empty
    :rtype: Workspace
    """
    source = source or settings.ORBIFOLD_DEFAULT_WORKSPACE
    if source == BUILTIN:
        return builtin_workspace()
    try:
        with open(source) as f:
            text = f.read()
    except OSError as e:
        raise InvariantError(
            "Cannot read workspace %s: %s" % (source, e.strerror),
            code="workspace-file",
            params={"path": source},
        )
    return loads(text)
