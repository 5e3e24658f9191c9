"""
Flat gerbes and flat line bundles on translation groupoids

A gerbe is a circle valued 2-cocycle of the total complex of
``DoubleComplexTruncation``; discrete torsion lives on the bar complex of
the group and is pulled back along the projection to the group.
"""

import itertools
import logging
import math
from dataclasses import dataclass

from django.conf import settings

from gerbes.exactalg import (
    ZERO,
    CircleValue,
    bockstein,
    circle_class_moduli,
    circle_class_representative,
    circle_coboundary,
    reduce_cocycle,
)
from gerbes.exceptions import BoundExceeded, InvariantError, NotACocycle
from gerbes.groupoid import inertia_groupoid, point_action, translation_groupoid
from gerbes.nervecohomology import bar_complex, double_complex

logger = logging.getLogger("gerbes")

GERBE_TRUNCATION = (3, 3)
LINE_BUNDLE_TRUNCATION = (2, 2)


@dataclass(frozen=True)
class CircleCochain:
    """Circle values on the total degree ``degree`` cells of a double complex"""

    model: object
    degree: int
    values: tuple

    def __post_init__(self):
        values = tuple(CircleValue.of(v) for v in self.values)
        object.__setattr__(self, "values", values)
        if not 0 <= self.degree <= self.model.top:
            raise InvariantError(
                "Degree %d is outside the model truncation" % self.degree,
                code="cochain-shape",
                params={"degree": self.degree},
            )
        rank = self.model.total.ranks[self.degree]
        if len(values) != rank:
            raise InvariantError(
                "%d values given for %d cells" % (len(values), rank),
                code="cochain-shape",
                params={"degree": self.degree, "cells": rank},
            )

    @classmethod
    def zero(cls, model, degree):
        return cls(model, degree, (ZERO,) * model.total.ranks[degree])

    @classmethod
    def from_mapping(cls, model, degree, mapping):
        """Values keyed by cell key, absent cells are zero"""
        values = [ZERO] * model.total.ranks[degree]
        for key, value in mapping.items():
            cell = model.parse_key(key)
            if model.degree_of(cell) != degree:
                raise InvariantError(
                    "Cell %s is not of total degree %d" % (key, degree),
                    code="cochain-shape",
                    params={"cell": key},
                )
            values[model.index(cell)] = CircleValue.of(value)
        return cls(model, degree, values)

    def to_mapping(self):
        """Nonzero values keyed by cell key, in cell order"""
        labels = self.model.total.labels[self.degree]
        return {labels[i]: str(v) for i, v in enumerate(self.values) if not v.is_zero()}

    def is_zero(self):
        return all(v.is_zero() for v in self.values)

    def _check_compatible(self, other):
        if other.model is not self.model or other.degree != self.degree:
            raise InvariantError("Cochains live on different models", code="model-mismatch")

    def __add__(self, other):
        self._check_compatible(other)
        return type(self)(self.model, self.degree, [a + b for a, b in zip(self.values, other.values)])

    def __sub__(self, other):
        self._check_compatible(other)
        return type(self)(self.model, self.degree, [a - b for a, b in zip(self.values, other.values)])

    def __neg__(self):
        return type(self)(self.model, self.degree, [-v for v in self.values])

    def coboundary(self):
        image = circle_coboundary(self.model.total, self.degree, self.values)
        return CircleCochain(self.model, self.degree + 1, image)


class GerbeCocycle(CircleCochain):
    """A flat gerbe: total 2-cochain with components on (2, 0), (1, 1) and (0, 2) cells"""

    def __post_init__(self):
        super().__post_init__()
        if self.degree != 2:
            raise InvariantError("A gerbe cocycle has degree 2", code="cochain-shape")

    @classmethod
    def zero(cls, model, degree=2):
        return super().zero(model, degree)


class FlatLineBundle(CircleCochain):
    """A flat line bundle: total 1-cochain on edges and arrows"""

    def __post_init__(self):
        super().__post_init__()
        if self.degree != 1:
            raise InvariantError("A line bundle cocycle has degree 1", code="cochain-shape")

    @classmethod
    def zero(cls, model, degree=1):
        return super().zero(model, degree)


def gerbe_model(action, truncation=GERBE_TRUNCATION):
    return double_complex(action, *truncation)


@dataclass(frozen=True)
class CocycleVerdict:
    valid: bool
    cell: str = None
    value: str = None

    def __bool__(self):
        return self.valid

    def to_json(self):
        if self.valid:
            return {"valid": True}
        return {"valid": False, "certificate": {"cell": self.cell, "coboundary": self.value}}


def verify_cocycle(cochain):
    """Checks that the total coboundary vanishes, naming the first cell where it does not

    :rtype: CocycleVerdict
    """
    image = cochain.coboundary()
    for label, value in zip(cochain.model.total.labels[cochain.degree + 1], image.values):
        if not value.is_zero():
            logger.warning("Cocycle condition fails on %s with %s", label, value)
            return CocycleVerdict(False, label, str(value))
    return CocycleVerdict(True)


def verify_gerbe(gerbe):
    """:rtype: CocycleVerdict"""
    if not isinstance(gerbe, CircleCochain) or gerbe.degree != 2:
        raise InvariantError("A gerbe is a total 2-cochain", code="cochain-shape")
    return verify_cocycle(gerbe)


def dd_class(gerbe):
    """The Dixmier-Douady class in H^3(base; Z) as Bockstein coordinates

    :rtype: gerbes.exactalg.IntegralClass
    """
    return bockstein(gerbe.model.total, gerbe.values, 2)


def gerbe_class(gerbe):
    """Coordinates of the flat isomorphism class in H^2(base; circle)

    :rtype: gerbes.exactalg.CocycleReduction
    """
    return reduce_cocycle(gerbe.model.total, gerbe.values, 2)


def chern_class(bundle):
    """The first Chern class in H^2(base; Z) of a flat line bundle"""
    return bockstein(bundle.model.total, bundle.values, 1)


def line_bundle_class(bundle):
    return reduce_cocycle(bundle.model.total, bundle.values, 1)


class DiscreteTorsion(object):
    """A normalized circle valued 2-cocycle on a finite group

    :param  group:  the finite group
    :param  values: ``values[g][h]`` is theta(g, h)
    """

    def __init__(self, group, values):
        n = group.order
        self.group = group
        rows = [tuple(CircleValue.of(v) for v in row) for row in values]
        if len(rows) != n or any(len(row) != n for row in rows):
            raise InvariantError(
                "Discrete torsion of %s needs a %dx%d table" % (group.name, n, n),
                code="cochain-shape",
            )
        self.values = tuple(rows)
        e = group.identity
        for g in range(n):
            if not (self.values[e][g].is_zero() and self.values[g][e].is_zero()):
                raise InvariantError(
                    "Discrete torsion is not normalized at %s" % group.labels[g],
                    code="not-normalized",
                    params={"element": group.labels[g]},
                )
        mult = group.multiply
        for g, h, k in itertools.product(range(n), repeat=3):
            left = self.values[g][h] + self.values[mult(g, h)][k]
            right = self.values[h][k] + self.values[g][mult(h, k)]
            if left != right:
                cell = ";".join(group.labels[x] for x in (g, h, k))
                raise NotACocycle(
                    "Group cocycle identity fails on %s" % cell,
                    params={"cell": cell, "value": str(left - right)},
                )

    @classmethod
    def trivial(cls, group):
        return cls(group, [[ZERO] * group.order for _ in range(group.order)])

    @classmethod
    def from_bar_cochain(cls, group, values):
        """From values on the normalized bar cells (g, h), g, h != e, in bar order"""
        complex = bar_complex(group, 3)
        table = [[ZERO] * group.order for _ in range(group.order)]
        for label, value in zip(complex.labels[2], values):
            g, h = (group.index(x) for x in label.split(";"))
            table[g][h] = CircleValue.of(value)
        return cls(group, table)

    @classmethod
    def from_mapping(cls, group, mapping):
        table = [[ZERO] * group.order for _ in range(group.order)]
        for key, value in mapping.items():
            try:
                g, h = (group.index(x) for x in key.split(";"))
            except ValueError:
                raise InvariantError(
                    "Malformed bar cell %r" % key, code="cell-key", params={"cell": key}
                )
            table[g][h] = CircleValue.of(value)
        return cls(group, table)

    def __call__(self, g, h):
        return self.values[g][h]

    def __eq__(self, other):
        return isinstance(other, DiscreteTorsion) and (self.group, self.values) == (
            other.group,
            other.values,
        )

    def __hash__(self):
        return hash(self.values)

    def __add__(self, other):
        if other.group != self.group:
            raise InvariantError("Discrete torsion of different groups", code="group-mismatch")
        n = self.group.order
        return DiscreteTorsion(
            self.group,
            [[self.values[g][h] + other.values[g][h] for h in range(n)] for g in range(n)],
        )

    def twist(self, mu):
        """theta + d(mu) for a normalized 1-cochain mu, d(mu)(g, h) = mu(h) - mu(gh) + mu(g)"""
        n = self.group.order
        mu = [CircleValue.of(v) for v in mu]
        if len(mu) != n or not mu[self.group.identity].is_zero():
            raise InvariantError("mu must be a normalized 1-cochain", code="not-normalized")
        return DiscreteTorsion(
            self.group,
            [
                [
                    self.values[g][h] + mu[h] - mu[self.group.multiply(g, h)] + mu[g]
                    for h in range(n)
                ]
                for g in range(n)
            ],
        )

    def bar_cochain(self):
        complex = bar_complex(self.group, 3)
        return [
            self.values[a][b]
            for a, b in (
                (self.group.index(x) for x in label.split(";")) for label in complex.labels[2]
            )
        ]

    def torsion_class(self):
        """:rtype: gerbes.exactalg.CocycleReduction"""
        return reduce_cocycle(bar_complex(self.group, 3), self.bar_cochain(), 2)

    def to_mapping(self):
        labels = self.group.labels
        n = self.group.order
        return {
            "%s;%s" % (labels[g], labels[h]): str(self.values[g][h])
            for g in range(n)
            for h in range(n)
            if not self.values[g][h].is_zero()
        }


def enumerate_discrete_torsion(group):
    """One normalized representative per class of H^2(G; circle)

    Representatives are listed in the order of their class coordinates,
    class 0 is the trivial one.

    :rtype: list of DiscreteTorsion
    """
    bound = settings.ORBIFOLD_ENUMERATION_BOUND
    if group.order > bound:
        raise BoundExceeded(
            "Group of order %d exceeds the enumeration bound %d" % (group.order, bound),
            bound=bound,
            value=group.order,
        )
    complex = bar_complex(group, 3)
    moduli = circle_class_moduli(complex, 2)
    count = math.prod(moduli)
    if count > settings.ORBIFOLD_CLASS_BOUND:
        raise BoundExceeded(
            "%d classes exceed the class bound %d" % (count, settings.ORBIFOLD_CLASS_BOUND),
            bound=settings.ORBIFOLD_CLASS_BOUND,
            value=count,
        )
    classes = []
    for coordinates in itertools.product(*(range(d) for d in moduli)):
        values = circle_class_representative(complex, 2, coordinates)
        classes.append(DiscreteTorsion.from_bar_cochain(group, values))
    logger.debug("%s has %d discrete torsion classes", group.name, len(classes))
    return classes


def torsion_to_gerbe(theta, action, truncation=GERBE_TRUNCATION):
    """Pulls theta back along (vertex, (g, h)) -> (g, h)

    :rtype: GerbeCocycle
    """
    if theta.group != action.group:
        raise InvariantError(
            "Discrete torsion of %s does not match the group %s of the action"
            % (theta.group.name, action.group.name),
            code="group-mismatch",
        )
    model = gerbe_model(action, truncation)
    values = []
    for p, i, string in model.cells[2]:
        values.append(theta(*string) if p == 0 else ZERO)
    return GerbeCocycle(model, 2, values)


@dataclass(frozen=True)
class InnerLocalSystem:
    """Circle values on the arrows of an inertia groupoid"""

    inertia: object
    values: tuple

    def __post_init__(self):
        values = tuple(CircleValue.of(v) for v in self.values)
        object.__setattr__(self, "values", values)
        if len(values) != self.inertia.arrow_count:
            raise InvariantError(
                "%d values for %d inertia arrows" % (len(values), self.inertia.arrow_count),
                code="cochain-shape",
            )

    def perturbed(self, arrow, amount):
        values = list(self.values)
        values[arrow] = values[arrow] + amount
        return InnerLocalSystem(self.inertia, values)

    def sector_characters(self):
        """Per sector the values on the isotropy arrows of its representative object

        :rtype: list of (Sector, list of (base arrow, CircleValue))
        """
        out = []
        for sector in self.inertia.sectors():
            first = sector.objects[0]
            character = [
                (self.inertia.pairs[a][1], self.values[a]) for a in self.inertia.isotropy(first)
            ]
            out.append((sector, character))
        return out

    def is_isomorphic(self, other):
        """Flat line bundles are isomorphic iff their isotropy characters agree"""
        if other.inertia is not self.inertia:
            return False
        return all(
            [v for _, v in mine] == [v for _, v in theirs]
            for (_, mine), (_, theirs) in zip(self.sector_characters(), other.sector_characters())
        )


@dataclass(frozen=True)
class LocalSystemVerdict:
    valid: bool
    axiom: str = None
    arrows: tuple = ()

    def __bool__(self):
        return self.valid

    def to_json(self):
        if self.valid:
            return {"valid": True}
        return {"valid": False, "certificate": {"axiom": self.axiom, "arrows": list(self.arrows)}}


def verify_inner_local_system(system):
    """Checks functoriality, triviality on identity sectors and the inversion axiom

    :rtype: LocalSystemVerdict
    """
    inertia = system.inertia
    values = system.values
    labels = inertia.arrow_labels
    if len(values) != inertia.arrow_count:
        raise InvariantError("Local system does not fit the inertia groupoid", code="cochain-shape")

    for (a, b), c in sorted(inertia.composition.items()):
        if values[a] + values[b] != values[c]:
            return LocalSystemVerdict(False, "functoriality", (labels[a], labels[b]))

    unit = inertia.unit_embedding()
    for a in unit.arrow_map.tolist():
        if not values[a].is_zero():
            return LocalSystemVerdict(False, "identity-sector", (labels[a],))

    inversion = inertia.inversion()
    for x in range(inertia.object_count):
        for a in inertia.isotropy(x):
            if values[int(inversion.arrow_map[a])] != -values[a]:
                return LocalSystemVerdict(False, "inversion", (labels[a],))
    return LocalSystemVerdict(True)


def point_inertia(group):
    return inertia_groupoid(translation_groupoid(point_action(group), "group"))


def transgress(theta, inertia=None):
    """The inner local system of theta on the inertia groupoid of [*/G]

    On the arrow (v, a) from v to a^-1 v a the value is
    theta(v, a) - theta(a, a^-1 v a); for a in the centralizer of v this is
    theta(v, a) - theta(a, v).

    :rtype: InnerLocalSystem
    """
    group = theta.group
    inertia = inertia or point_inertia(group)
    values = []
    for v, a in inertia.pairs:
        values.append(theta(v, a) - theta(a, group.conjugate(v, a)))
    return InnerLocalSystem(inertia, values)


EDGE = "edge"
ARROW = "arrow"
ARROW_INVERSE = "arrow^-1"
STEP_KINDS = (EDGE, ARROW, ARROW_INVERSE)


@dataclass(frozen=True)
class CombinatorialLoop:
    """A closed path through edges of the space and arrows of the group

    ``("edge", w)`` walks the edge from the current vertex to w,
    ``("arrow", g)`` follows the arrow (v, g) to v.g and ``("arrow^-1", g)``
    follows (v.g^-1, g) backwards.
    """

    start: int
    steps: tuple = ()

    def __post_init__(self):
        steps = tuple((kind, int(x)) for kind, x in self.steps)
        object.__setattr__(self, "steps", steps)
        for kind, _ in steps:
            if kind not in STEP_KINDS:
                raise InvariantError("Unknown loop step %r" % kind, code="loop-step")

    def __add__(self, other):
        if other.start != self.start:
            raise InvariantError("Loops have different base points", code="loop-base-point")
        return CombinatorialLoop(self.start, self.steps + other.steps)

    def walk(self, action):
        """Yields (kind, vertex before, vertex after, label) and checks that the loop closes"""
        current = self.start
        space = action.space
        if not 0 <= current < space.vertex_count:
            raise InvariantError("Unknown start vertex %d" % current, code="loop-adjacency")
        for kind, x in self.steps:
            if kind == EDGE:
                if (min(current, x), max(current, x)) not in space:
                    raise InvariantError(
                        "No edge between %d and %d" % (current, x),
                        code="loop-adjacency",
                        params={"from": current, "to": x},
                    )
                after = x
            elif kind == ARROW:
                after = int(action.vertex_maps[x, current])
            else:
                after = int(action.vertex_maps[action.group.inverse(x), current])
            yield kind, current, after, x
            current = after
        if current != self.start:
            raise InvariantError(
                "Loop ends at %d instead of %d" % (current, self.start),
                code="loop-not-closed",
                params={"start": self.start, "end": current},
            )


def flat_holonomy(bundle, loop):
    """Sum of the line bundle along a closed combinatorial loop

    :param  bundle: a flat line bundle on the double complex of an action
    :param  loop:   the loop
    :rtype: CircleValue
    """
    verdict = verify_cocycle(bundle)
    if not verdict:
        raise NotACocycle(
            "Line bundle is not flat on %s" % verdict.cell,
            params={"cell": verdict.cell, "value": verdict.value},
        )
    model = bundle.model
    action = model.action
    space = action.space
    group = action.group
    total = ZERO
    for kind, before, after, x in loop.walk(action):
        if kind == EDGE:
            edge = (min(before, after), max(before, after))
            value = bundle.values[model.index((1, space.index(edge), ()))]
            total = total + value if before < after else total - value
        elif x == group.identity:
            continue
        elif kind == ARROW:
            total = total + bundle.values[model.index((0, before, (x,)))]
        else:
            total = total - bundle.values[model.index((0, after, (x,)))]
    return total
