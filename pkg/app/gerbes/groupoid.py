"""
Finite groups, simplicial actions and finite groupoids

Actions are right actions throughout: v.(gh) = (v.g).h, and arrows compose
diagrammatically, compose(a, b) is "a then b" and needs target(a) == source(b).
"""

import itertools
import logging
from collections import defaultdict, deque
from dataclasses import dataclass
from functools import cache, cached_property

import numpy as np

from gerbes.exactalg import ChainComplexZ, IntegerMatrix, cohomology_integer
from gerbes.exceptions import InvariantError

logger = logging.getLogger("gerbes")


def _readonly(array):
    array = np.array(array, dtype=np.int64)
    array.setflags(write=False)
    return array


def cell_key(cell):
    """Canonical text key of a simplex, e.g. ``(0, 3, 4)`` -> ``"0,3,4"``"""
    return ",".join(str(v) for v in cell)


class FiniteGroup(object):
    """A finite group given by its full multiplication table

    ``table[a, b]`` is the index of the product ab.
    """

    def __init__(self, table, labels=None, name=None):
        table = _readonly(table)
        if table.ndim != 2 or table.shape[0] != table.shape[1] or not table.size:
            raise InvariantError(
                "Multiplication table must be a nonempty square", code="group-table"
            )
        n = table.shape[0]
        if table.min() < 0 or table.max() >= n:
            raise InvariantError(
                "Multiplication table has entries outside 0..%d" % (n - 1),
                code="group-table",
            )
        self.table = table
        self.order = n
        self.name = name
        self.labels = tuple(str(x) for x in labels) if labels else tuple(
            str(i) for i in range(n)
        )
        if len(set(self.labels)) != n:
            raise InvariantError("Group labels must be distinct", code="group-labels")

        elements = np.arange(n)
        units = [
            e
            for e in range(n)
            if (table[e] == elements).all() and (table[:, e] == elements).all()
        ]
        if not units:
            raise InvariantError("Group has no identity element", code="group-identity")
        self.identity = units[0]

        inverses = np.full(n, -1, dtype=np.int64)
        for a in range(n):
            found = np.flatnonzero(table[a] == self.identity)
            if len(found) != 1 or table[found[0], a] != self.identity:
                raise InvariantError(
                    "Element %s has no two-sided inverse" % self.labels[a],
                    code="group-inverse",
                    params={"element": self.labels[a]},
                )
            inverses[a] = found[0]
        self.inverses = _readonly(inverses)

        left = table[table]
        right = table[elements[:, None, None], table[None, :, :]]
        broken = np.argwhere(left != right)
        if len(broken):
            a, b, c = (int(x) for x in broken[0])
            raise InvariantError(
                "Associativity fails on (%s, %s, %s)"
                % (self.labels[a], self.labels[b], self.labels[c]),
                code="group-associativity",
                params={"triple": [self.labels[a], self.labels[b], self.labels[c]]},
            )

    @classmethod
    def from_table(cls, table, labels=None, name=None):
        return cls(table, labels, name)

    @classmethod
    def from_permutations(cls, generators, name=None, labels=None):
        """The permutation group generated by ``generators``

        Elements are listed in breadth-first order from the identity and
        multiply as right actions, (pq)[x] = q[p[x]].

        :param  generators: permutations as lists of images
        :param  labels:     callable naming a permutation, cycle notation by default
        :rtype: FiniteGroup
        """
        generators = [tuple(int(x) for x in g) for g in generators]
        degree = len(generators[0]) if generators else 1
        for g in generators:
            if sorted(g) != list(range(degree)):
                raise InvariantError(
                    "Generator %s is not a permutation of %d points" % (list(g), degree),
                    code="group-generator",
                )
        identity = tuple(range(degree))
        elements = [identity]
        index = {identity: 0}
        queue = deque([identity])
        while queue:
            current = queue.popleft()
            for g in generators:
                product = tuple(g[x] for x in current)
                if product not in index:
                    index[product] = len(elements)
                    elements.append(product)
                    queue.append(product)
        table = [
            [index[tuple(q[x] for x in p)] for q in elements] for p in elements
        ]
        namer = labels or _cycle_notation
        return cls(table, [namer(p) for p in elements], name)

    @classmethod
    def cyclic(cls, n):
        table = (np.arange(n)[:, None] + np.arange(n)[None, :]) % n
        return cls(table, name="Z%d" % n)

    @classmethod
    def direct_product(cls, first, second, name=None):
        """G x H with (a, b) at index a |H| + b"""
        m = second.order
        table = first.table[:, None, :, None] * m + second.table[None, :, None, :]
        table = table.reshape(first.order * m, first.order * m)
        labels = [
            "(%s,%s)" % (_unwrap(a), b) for a in first.labels for b in second.labels
        ]
        return cls(table, labels, name or "%sx%s" % (first.name, second.name))

    @classmethod
    def symmetric(cls, n):
        if n < 2:
            return cls([[0]], ["e"], "S%d" % n)
        transposition = [1, 0] + list(range(2, n))
        cycle = list(range(1, n)) + [0]
        return cls.from_permutations([transposition, cycle], name="S%d" % n)

    @classmethod
    def dihedral(cls, n):
        """Symmetries of the regular n-gon, of order 2n"""
        rotation = [(i + 1) % n for i in range(n)]
        reflection = [(-i) % n for i in range(n)]
        return cls.from_permutations([rotation, reflection], name="D%d" % n)

    @classmethod
    def quaternion(cls):
        names = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]
        # right multiplication on the eight units
        i = [2, 3, 1, 0, 7, 6, 4, 5]
        j = [4, 5, 6, 7, 1, 0, 3, 2]
        return cls.from_permutations([i, j], name="Q8", labels=lambda p: names[p[0]])

    def __len__(self):
        return self.order

    def __repr__(self):
        return "FiniteGroup(%s, order=%d)" % (self.name, self.order)

    def __eq__(self, other):
        if not isinstance(other, FiniteGroup):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash((self.labels, self.table.tobytes()))

    def multiply(self, a, b):
        return int(self.table[a, b])

    def inverse(self, a):
        return int(self.inverses[a])

    def product(self, elements):
        result = self.identity
        for g in elements:
            result = int(self.table[result, g])
        return result

    def conjugate(self, g, h):
        """h^-1 g h"""
        return int(self.table[self.table[self.inverses[h], g], h])

    def index(self, label):
        try:
            return self.labels.index(str(label))
        except ValueError:
            raise InvariantError(
                "Group %s has no element %r" % (self.name, label),
                code="unknown-element",
                params={"element": str(label)},
            )

    def element_order(self, g):
        k, current = 1, g
        while current != self.identity:
            current = int(self.table[current, g])
            k += 1
        return k

    @cached_property
    def exponent(self):
        return int(np.lcm.reduce([self.element_order(g) for g in range(self.order)]))

    def is_abelian(self):
        return bool((self.table == self.table.T).all())

    def centralizer(self, g):
        return [h for h in range(self.order) if self.table[g, h] == self.table[h, g]]

    def conjugacy_classes(self):
        """Classes as sorted tuples, ordered by their smallest element"""
        seen = set()
        classes = []
        for g in range(self.order):
            if g in seen:
                continue
            orbit = tuple(sorted({self.conjugate(g, h) for h in range(self.order)}))
            seen.update(orbit)
            classes.append(orbit)
        return classes

    def is_homomorphism_to(self, other, mapping):
        mapping = np.asarray(mapping)
        return bool(
            (mapping[self.table] == other.table[mapping[:, None], mapping[None, :]]).all()
        )

    def to_json(self):
        return {"table": self.table.tolist(), "labels": list(self.labels)}


def _cycle_notation(perm):
    seen = set()
    cycles = []
    for start in range(len(perm)):
        if start in seen or perm[start] == start:
            continue
        cycle = [start]
        seen.add(start)
        x = perm[start]
        while x != start:
            cycle.append(x)
            seen.add(x)
            x = perm[x]
        cycles.append("(%s)" % " ".join(str(c) for c in cycle))
    return "".join(cycles) or "e"


def _unwrap(label):
    if label.startswith("(") and label.endswith(")") and "(" not in label[1:]:
        return label[1:-1]
    return label


@cache
def named_groups():
    """Every group of order at most 8, keyed by name"""
    z2 = FiniteGroup.cyclic(2)
    v4 = FiniteGroup.direct_product(z2, z2)
    groups = [
        FiniteGroup([[0]], ["e"], "trivial"),
        z2,
        FiniteGroup.cyclic(3),
        FiniteGroup.cyclic(4),
        v4,
        FiniteGroup.cyclic(5),
        FiniteGroup.cyclic(6),
        FiniteGroup.symmetric(3),
        FiniteGroup.cyclic(7),
        FiniteGroup.cyclic(8),
        FiniteGroup.direct_product(FiniteGroup.cyclic(4), z2),
        FiniteGroup.direct_product(v4, z2),
        FiniteGroup.dihedral(4),
        FiniteGroup.quaternion(),
    ]
    return {group.name: group for group in groups}


class SimplicialComplex(object):
    """An abstract simplicial complex with ordered vertices

    ``simplices[d]`` lists the d-simplices as increasing vertex tuples.
    Cells of all dimensions are indexed globally by (dimension, position).
    """

    def __init__(self, vertex_count, simplices, name=None, vertex_labels=None):
        self.vertex_count = int(vertex_count)
        self.name = name
        self.vertex_labels = tuple(
            vertex_labels or (str(v) for v in range(self.vertex_count))
        )
        levels = []
        for d, level in enumerate(simplices):
            cells = [tuple(int(v) for v in cell) for cell in level]
            for cell in cells:
                if len(cell) != d + 1 or list(cell) != sorted(set(cell)):
                    raise InvariantError(
                        "Simplex %s is not an increasing %d-tuple" % (list(cell), d + 1),
                        code="simplex-order",
                        params={"simplex": list(cell)},
                    )
                if cell[0] < 0 or cell[-1] >= self.vertex_count:
                    raise InvariantError(
                        "Simplex %s uses an unknown vertex" % list(cell),
                        code="simplex-vertex",
                        params={"simplex": list(cell)},
                    )
            if len(set(cells)) != len(cells):
                raise InvariantError(
                    "Duplicate %d-simplex" % d, code="duplicate-simplex", params={"dimension": d}
                )
            levels.append(tuple(cells))
        while levels and not levels[-1]:
            levels.pop()
        self.simplices = tuple(levels)
        self._index = [
            {cell: i for i, cell in enumerate(level)} for level in self.simplices
        ]
        if self.vertex_count and (
            not self.simplices or len(self.simplices[0]) != self.vertex_count
        ):
            raise InvariantError(
                "Every vertex must be listed as a 0-simplex", code="missing-face"
            )
        for d in range(1, len(self.simplices)):
            for cell in self.simplices[d]:
                for _, face in self.faces(cell):
                    if face not in self._index[d - 1]:
                        raise InvariantError(
                            "Face %s of %s is not listed" % (list(face), list(cell)),
                            code="missing-face",
                            params={"simplex": list(cell), "face": list(face)},
                        )

    @classmethod
    def from_facets(cls, vertex_count, facets, name=None):
        """The closure of a list of simplices under taking faces"""
        found = set((v,) for v in range(vertex_count))
        for facet in facets:
            facet = tuple(sorted(int(v) for v in facet))
            for size in range(1, len(facet) + 1):
                found.update(itertools.combinations(facet, size))
        top = max((len(c) for c in found), default=0)
        levels = [sorted(c for c in found if len(c) == d + 1) for d in range(top)]
        return cls(vertex_count, levels, name)

    @classmethod
    def point(cls):
        return cls(1, [[(0,)]], "point")

    @staticmethod
    def faces(cell):
        """(i, cell with its i-th vertex removed) for every i"""
        return [(i, cell[:i] + cell[i + 1:]) for i in range(len(cell))]

    @property
    def dimension(self):
        return len(self.simplices) - 1

    def cells(self, d):
        return self.simplices[d] if 0 <= d < len(self.simplices) else ()

    def count(self, d):
        return len(self.cells(d))

    def index(self, cell):
        cell = tuple(cell)
        try:
            return self._index[len(cell) - 1][cell]
        except (IndexError, KeyError):
            raise InvariantError(
                "%s is not a simplex of the complex" % list(cell),
                code="unknown-simplex",
                params={"simplex": list(cell)},
            )

    def __contains__(self, cell):
        cell = tuple(cell)
        return 0 < len(cell) <= len(self._index) and cell in self._index[len(cell) - 1]

    def all_cells(self):
        return [cell for level in self.simplices for cell in level]

    def cochain_complex(self, top=None):
        """Simplicial cochains C^0 .. C^top with d^k[tau, sigma] = sum of (-1)^i over d_i tau = sigma

        :rtype: ChainComplexZ
        """
        top = self.dimension + 1 if top is None else top
        ranks = [self.count(d) for d in range(top + 1)]
        differentials = []
        for d in range(top):
            triplets = []
            for row, cell in enumerate(self.cells(d + 1)):
                for i, face in self.faces(cell):
                    triplets.append((row, self._index[d][face], (-1) ** i))
            differentials.append(IntegerMatrix.from_triplets(ranks[d + 1], ranks[d], triplets))
        labels = [[cell_key(c) for c in self.cells(d)] for d in range(top + 1)]
        return ChainComplexZ.cohomological(ranks, differentials, labels)

    def euler_characteristic(self):
        return sum((-1) ** d * len(level) for d, level in enumerate(self.simplices))

    def face_poset(self):
        cells = self.all_cells()
        position = {cell: i for i, cell in enumerate(cells)}
        return FacePoset(
            dimensions=[len(c) - 1 for c in cells],
            faces=[[position[f] for _, f in self.faces(c)] if len(c) > 1 else [] for c in cells],
            labels=[cell_key(c) for c in cells],
        )

    def disjoint_union(self, other, name=None):
        shifted = [
            [tuple(v + self.vertex_count for v in cell) for cell in other.cells(d)]
            for d in range(other.dimension + 1)
        ]
        levels = [
            list(self.cells(d)) + (shifted[d] if d < len(shifted) else [])
            for d in range(max(self.dimension, other.dimension) + 1)
        ]
        return SimplicialComplex(self.vertex_count + other.vertex_count, levels, name)

    def to_json(self):
        return {
            "vertex_count": self.vertex_count,
            "simplices": [[list(c) for c in level] for level in self.simplices],
        }

    def __repr__(self):
        return "SimplicialComplex(%s, f=%s)" % (
            self.name,
            [len(level) for level in self.simplices],
        )


@dataclass(frozen=True)
class FacePoset:
    """Cells with their codimension-one faces, e.g. a Delta-complex"""

    dimensions: tuple
    faces: tuple
    labels: tuple = None

    def __post_init__(self):
        object.__setattr__(self, "dimensions", tuple(self.dimensions))
        object.__setattr__(self, "faces", tuple(tuple(f) for f in self.faces))
        labels = self.labels or [str(i) for i in range(len(self.dimensions))]
        object.__setattr__(self, "labels", tuple(labels))
        for c, faces in enumerate(self.faces):
            for f in faces:
                if self.dimensions[f] != self.dimensions[c] - 1:
                    raise InvariantError(
                        "Cell %s lists %s as a face" % (self.labels[c], self.labels[f]),
                        code="face-dimension",
                    )

    def __len__(self):
        return len(self.dimensions)

    @cached_property
    def closures(self):
        """Every cell together with all its iterated faces"""
        out = []
        for c in range(len(self)):
            found = {c}
            stack = [c]
            while stack:
                for f in self.faces[stack.pop()]:
                    if f not in found:
                        found.add(f)
                        stack.append(f)
            out.append(frozenset(found))
        return out

    def cell_maps_from_vertices(self, vertex_maps, vertex_cells=None):
        """Cell permutations induced by vertex permutations on a simplicial face poset

        :param  vertex_maps: one vertex permutation per group element
        :rtype: numpy.ndarray
        """
        vertex_cells = vertex_cells or [c for c, d in enumerate(self.dimensions) if d == 0]
        vertex_of = {cell: v for v, cell in enumerate(vertex_cells)}
        spans = [
            frozenset(vertex_of[x] for x in self.closures[c] if self.dimensions[x] == 0)
            for c in range(len(self))
        ]
        by_span = {span: c for c, span in enumerate(spans)}
        maps = []
        for vmap in vertex_maps:
            row = []
            for span in spans:
                image = frozenset(int(vmap[v]) for v in span)
                if image not in by_span:
                    raise InvariantError(
                        "Vertex map does not send cells to cells", code="not-simplicial"
                    )
                row.append(by_span[image])
            maps.append(row)
        return _readonly(maps)


def barycentric_subdivision(poset, group=None, cell_maps=None, name=None):
    """Barycentric subdivision of a face poset, with the induced action

    New vertices are the cells, ordered by (dimension, cell index); simplices
    are the chains c_0 < c_1 < ... of strictly increasing dimension. Cell
    permutations preserve dimension, so the induced action is order
    preserving on every simplex.

    :param  poset:     the cells to subdivide
    :type   poset:     FacePoset or SimplicialComplex
    :param  group:     optional group acting on the cells
    :param  cell_maps: per group element a permutation of the cells
    :rtype: SimplicialComplex or SimplicialAction
    """
    if isinstance(poset, SimplicialComplex):
        poset = poset.face_poset()
    order = sorted(range(len(poset)), key=lambda c: (poset.dimensions[c], c))
    vertex_of = {c: v for v, c in enumerate(order)}
    # ending[c] holds the chains of the current length whose top cell is c
    ending = {c: [(c,)] for c in range(len(poset))}
    levels = [[(vertex_of[c],) for c in order]]
    for d in range(1, max(poset.dimensions, default=-1) + 1):
        grown = defaultdict(list)
        for c in range(len(poset)):
            if poset.dimensions[c] < d:
                continue
            for f in poset.closures[c] - {c}:
                grown[c].extend(chain + (c,) for chain in ending.get(f, ()))
        ending = grown
        levels.append(
            sorted(
                tuple(vertex_of[x] for x in chain)
                for chains in grown.values()
                for chain in chains
            )
        )
    space = SimplicialComplex(
        len(poset), levels, name, vertex_labels=[poset.labels[c] for c in order]
    )
    if group is None:
        return space

    cell_maps = np.asarray(cell_maps, dtype=np.int64)
    if cell_maps.shape != (group.order, len(poset)):
        raise InvariantError(
            "Expected %d cell permutations of %d cells" % (group.order, len(poset)),
            code="action-shape",
        )
    for g, row in enumerate(cell_maps):
        for c in range(len(poset)):
            image = {int(row[f]) for f in poset.faces[c]}
            if image != set(poset.faces[row[c]]):
                raise InvariantError(
                    "Element %s does not preserve the faces of %s"
                    % (group.labels[g], poset.labels[c]),
                    code="not-cellular",
                )
    vertex_maps = [[vertex_of[int(row[c])] for c in order] for row in cell_maps]
    return SimplicialAction(group, space, vertex_maps, name=name)


class SimplicialAction(object):
    """A right action of a finite group on a simplicial complex by vertex permutations

    Every element must send each simplex to a simplex preserving the vertex
    order; order reversing actions are made admissible by
    ``barycentric_subdivision``.
    """

    def __init__(self, group, space, vertex_maps, regular=False, name=None):
        self.group = group
        self.space = space
        self.name = name
        maps = _readonly(vertex_maps)
        n = space.vertex_count
        if maps.shape != (group.order, n):
            raise InvariantError(
                "Expected %d vertex permutations of %d vertices" % (group.order, n),
                code="action-shape",
                params={"group_order": group.order, "vertices": n},
            )
        for g, row in enumerate(maps):
            if sorted(row.tolist()) != list(range(n)):
                raise InvariantError(
                    "Vertex map of %s is not a permutation" % group.labels[g],
                    code="action-permutation",
                    params={"element": group.labels[g]},
                )
        if (maps[group.identity] != np.arange(n)).any():
            raise InvariantError("The identity must act trivially", code="action-identity")
        g_index = np.arange(group.order)
        composed = maps[g_index[None, :, None], maps[:, None, :]]
        broken = np.argwhere(maps[group.table] != composed)
        if len(broken):
            g, h, v = (int(x) for x in broken[0])
            raise InvariantError(
                "v.(gh) != (v.g).h for g=%s h=%s v=%d" % (group.labels[g], group.labels[h], v),
                code="action-law",
                params={"g": group.labels[g], "h": group.labels[h], "vertex": v},
            )
        self.vertex_maps = maps

        cell_maps = []
        for d in range(space.dimension + 1):
            level = np.empty((group.order, space.count(d)), dtype=np.int64)
            for i, cell in enumerate(space.cells(d)):
                for g in range(group.order):
                    image = tuple(int(maps[g, v]) for v in cell)
                    if tuple(sorted(image)) not in space:
                        raise InvariantError(
                            "%s sends %s to a non-simplex" % (group.labels[g], list(cell)),
                            code="not-simplicial",
                            params={"element": group.labels[g], "simplex": list(cell)},
                        )
                    if list(image) != sorted(image):
                        raise InvariantError(
                            "%s reverses the vertex order of %s, subdivide first"
                            % (group.labels[g], list(cell)),
                            code="order-reversing",
                            params={"element": group.labels[g], "simplex": list(cell)},
                        )
                    level[g, i] = space.index(image)
            level.setflags(write=False)
            cell_maps.append(level)
        self.cell_maps = tuple(cell_maps)
        if regular and not self.is_regular():
            raise InvariantError(
                "A stabilizer moves the vertices of a fixed simplex", code="not-regular"
            )
        self.regular = regular

    def __repr__(self):
        return "SimplicialAction(%s, %r on %r)" % (self.name, self.group, self.space)

    def act(self, d, i, g):
        """Index of the image of the i-th d-simplex under g"""
        return int(self.cell_maps[d][g, i])

    def is_regular(self):
        for d, level in enumerate(self.cell_maps):
            for i, cell in enumerate(self.space.cells(d)):
                for g in range(self.group.order):
                    if level[g, i] == i and any(self.vertex_maps[g, v] != v for v in cell):
                        return False
        return True

    def stabilizer(self, vertex):
        return [g for g in range(self.group.order) if self.vertex_maps[g, vertex] == vertex]

    def fixed_vertices(self):
        """Vertices with a nontrivial stabilizer"""
        return [v for v in range(self.space.vertex_count) if len(self.stabilizer(v)) > 1]

    def is_free(self):
        moved = self.vertex_maps != np.arange(self.space.vertex_count)[None, :]
        return bool(np.delete(moved, self.group.identity, axis=0).all())

    def orbits(self, d=0):
        seen = set()
        out = []
        for i in range(self.space.count(d)):
            if i in seen:
                continue
            orbit = tuple(sorted({int(x) for x in self.cell_maps[d][:, i]}))
            seen.update(orbit)
            out.append(orbit)
        return out

    def quotient_complex(self, name=None):
        """The orbit complex of a free action

        :rtype: SimplicialComplex
        """
        if not self.is_free():
            raise InvariantError("Only free actions have a quotient complex", code="not-free")
        orbit_of = {}
        for k, orbit in enumerate(self.orbits(0)):
            for v in orbit:
                orbit_of[v] = k
        facets = set()
        for d in range(self.space.dimension + 1):
            for cell in self.space.cells(d):
                image = tuple(sorted({orbit_of[v] for v in cell}))
                if len(image) != len(cell):
                    raise InvariantError(
                        "Orbits of %s collide, the quotient is not simplicial" % list(cell),
                        code="quotient-not-simplicial",
                    )
                facets.add(image)
        quotient = SimplicialComplex.from_facets(len(self.orbits(0)), facets, name)
        for d in range(self.space.dimension + 1):
            if quotient.count(d) != self.space.count(d) // self.group.order:
                raise InvariantError(
                    "Distinct orbits of %d-simplices share vertices" % d,
                    code="quotient-not-simplicial",
                )
        return quotient

    def to_json(self, group_name, complex_name):
        return {
            "group": group_name,
            "complex": complex_name,
            "vertex_maps": self.vertex_maps.tolist(),
        }


def point_action(group):
    """The group acting on a single point"""
    return SimplicialAction(
        group,
        SimplicialComplex.point(),
        [[0]] * group.order,
        name="point/%s" % group.name,
    )


def trivial_action(space, name=None):
    group = named_groups()["trivial"]
    return SimplicialAction(group, space, [list(range(space.vertex_count))], name=name)


class FiniteGroupoid(object):
    """A finite groupoid with explicit structure maps

    :param  object_labels: one label per object
    :param  source:        arrow -> object
    :param  target:        arrow -> object
    :param  identities:    object -> arrow
    :param  inverses:      arrow -> arrow
    :param  composition:   {(a, b): ab} on every pair with target(a) == source(b)
    """

    def __init__(
        self,
        object_labels,
        source,
        target,
        identities,
        inverses,
        composition,
        arrow_labels=None,
        name=None,
        audit=True,
    ):
        self.name = name
        self.object_labels = tuple(str(x) for x in object_labels)
        self.source = _readonly(source)
        self.target = _readonly(target)
        self.identities = _readonly(identities)
        self.inverses = _readonly(inverses)
        self.composition = composition
        self.arrow_labels = tuple(
            arrow_labels or (str(a) for a in range(len(self.source)))
        )
        n, m = len(self.object_labels), len(self.source)
        shapes = (len(self.target), len(self.inverses), len(self.arrow_labels))
        if shapes != (m, m, m) or len(self.identities) != n:
            raise InvariantError("Structure maps have mismatched sizes", code="groupoid-shape")
        if m and (
            min(self.source.min(), self.target.min()) < 0
            or max(self.source.max(), self.target.max()) >= n
        ):
            raise InvariantError("Arrow endpoints outside the objects", code="groupoid-shape")
        outgoing = defaultdict(list)
        homs = defaultdict(list)
        for a in range(m):
            outgoing[int(self.source[a])].append(a)
            homs[int(self.source[a]), int(self.target[a])].append(a)
        self._outgoing = {x: tuple(arrows) for x, arrows in outgoing.items()}
        self._homs = {pair: tuple(arrows) for pair, arrows in homs.items()}
        if audit:
            self.audit()

    def __repr__(self):
        return "FiniteGroupoid(%s, objects=%d, arrows=%d)" % (
            self.name,
            self.object_count,
            self.arrow_count,
        )

    @property
    def object_count(self):
        return len(self.object_labels)

    @property
    def arrow_count(self):
        return len(self.source)

    def outgoing(self, x):
        return self._outgoing.get(x, ())

    def hom(self, x, y):
        return self._homs.get((x, y), ())

    def isotropy(self, x):
        return self.hom(x, x)

    def self_arrows(self):
        return [a for a in range(self.arrow_count) if self.source[a] == self.target[a]]

    def identity(self, x):
        return int(self.identities[x])

    def inverse(self, a):
        return int(self.inverses[a])

    def compose(self, a, b):
        """a then b"""
        try:
            return self.composition[a, b]
        except KeyError:
            raise InvariantError(
                "Arrows %s and %s are not composable"
                % (self.arrow_labels[a], self.arrow_labels[b]),
                code="not-composable",
                params={"arrows": [self.arrow_labels[a], self.arrow_labels[b]]},
            )

    def _fail(self, code, message, *arrows):
        raise InvariantError(
            message % tuple(self.arrow_labels[a] for a in arrows),
            code=code,
            params={"arrows": [self.arrow_labels[a] for a in arrows]},
        )

    def audit(self):
        """Checks every groupoid axiom on all arrows, pairs and triples"""
        source, target = self.source, self.target
        for x in range(self.object_count):
            e = self.identity(x)
            if source[e] != x or target[e] != x:
                raise InvariantError(
                    "Identity of %s is not a loop at it" % self.object_labels[x],
                    code="groupoid-identity",
                    params={"object": self.object_labels[x]},
                )
        expected = 0
        for a in range(self.arrow_count):
            i = self.inverse(a)
            if source[i] != target[a] or target[i] != source[a]:
                self._fail("groupoid-inverse", "Inverse of %s has wrong endpoints", a)
            expected += len(self.outgoing(int(target[a])))
        if len(self.composition) != expected:
            raise InvariantError(
                "Composition is defined on %d pairs, %d are composable"
                % (len(self.composition), expected),
                code="groupoid-composition",
            )
        for a in range(self.arrow_count):
            s, t = int(source[a]), int(target[a])
            if self.compose(self.identity(s), a) != a or self.compose(a, self.identity(t)) != a:
                self._fail("groupoid-identity", "Identity law fails for %s", a)
            if self.compose(a, self.inverse(a)) != self.identity(s):
                self._fail("groupoid-inverse", "%s composed with its inverse is not an identity", a)
            if self.compose(self.inverse(a), a) != self.identity(t):
                self._fail("groupoid-inverse", "Inverse of %s composed with it is not an identity", a)
            for b in self.outgoing(t):
                ab = self.compose(a, b)
                if source[ab] != s or target[ab] != target[b]:
                    self._fail("groupoid-composition", "%s then %s has wrong endpoints", a, b)
                for c in self.outgoing(int(target[b])):
                    if self.compose(ab, c) != self.compose(a, self.compose(b, c)):
                        self._fail("groupoid-associativity", "Associativity fails on %s, %s, %s", a, b, c)
        logger.debug("Audited %r", self)

    @cached_property
    def component_of(self):
        parent = list(range(self.object_count))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a in range(self.arrow_count):
            s, t = find(int(self.source[a])), find(int(self.target[a]))
            if s != t:
                parent[max(s, t)] = min(s, t)
        roots = {}
        out = []
        for x in range(self.object_count):
            out.append(roots.setdefault(find(x), len(roots)))
        return tuple(out)

    def components(self):
        """Connected components as sorted object tuples, ordered by their first object"""
        groups = defaultdict(list)
        for x, c in enumerate(self.component_of):
            groups[c].append(x)
        return [tuple(groups[c]) for c in sorted(groups)]


class TranslationGroupoid(FiniteGroupoid):
    """[M/G]: arrows (m, g) from m to m.g, stored at index m |G| + g"""

    def __init__(self, action, on="simplices", name=None):
        group = action.group
        if on == "group":
            cells = [(0, 0)]
            labels = ["*"]
            maps = [np.zeros((group.order, 1), dtype=np.int64)]
        elif on == "vertices":
            cells = [(0, v) for v in range(action.space.vertex_count)]
            labels = [cell_key(c) for c in action.space.cells(0)]
            maps = action.cell_maps[:1]
        elif on == "simplices":
            cells = [
                (d, i)
                for d in range(action.space.dimension + 1)
                for i in range(action.space.count(d))
            ]
            labels = [cell_key(c) for c in action.space.all_cells()]
            maps = action.cell_maps
        else:
            raise InvariantError("Unknown object set %r" % on, code="translation-objects")
        self.action = action
        self.group = group
        self.on = on
        self.cells = tuple(cells)
        position = {cell: k for k, cell in enumerate(cells)}
        n = group.order
        count = len(cells) * n
        source = np.repeat(np.arange(len(cells)), n)
        target = np.empty(count, dtype=np.int64)
        for k, (d, i) in enumerate(cells):
            for g in range(n):
                target[k * n + g] = position[d, int(maps[d][g, i])]
        inverses = [
            int(target[k * n + g]) * n + group.inverse(g)
            for k in range(len(cells))
            for g in range(n)
        ]
        if on == "group":
            arrow_labels = list(group.labels)
        else:
            arrow_labels = [
                "%s|%s" % (labels[m], group.labels[g])
                for m in range(len(cells))
                for g in range(n)
            ]
        composition = {}
        for a in range(count):
            m, g = divmod(a, n)
            mg = int(target[a])
            for h in range(n):
                composition[a, mg * n + h] = m * n + group.multiply(g, h)
        super().__init__(
            labels,
            source,
            target,
            [k * n + group.identity for k in range(len(cells))],
            inverses,
            composition,
            arrow_labels,
            name=name or "[%s/%s]" % (action.space.name, group.name),
            audit=False,
        )

    def arrow(self, cell, g):
        return cell * self.group.order + g

    def split(self, arrow):
        """(cell, group element) of an arrow"""
        return divmod(arrow, self.group.order)


def translation_groupoid(action, on="simplices", audit=True):
    """The action groupoid of a simplicial action

    :param  on: ``vertices``, ``simplices`` or ``group`` for [*/G]
    :rtype: TranslationGroupoid
    """
    groupoid = TranslationGroupoid(action, on)
    if audit:
        groupoid.audit()
    return groupoid


@dataclass(frozen=True)
class Sector:
    """A connected component of an inertia groupoid"""

    index: int
    objects: tuple
    representative: int
    isotropy_order: int
    is_identity: bool


class InertiaGroupoid(FiniteGroupoid):
    """The inertia groupoid of ``base``

    Objects are the self-arrows v of the base; an arrow (v, a) goes from v to
    a^-1 v a, for every base arrow a leaving the base point of v.
    """

    def __init__(self, base, name=None):
        self.base = base
        loops = base.self_arrows()
        self.loops = tuple(loops)
        object_of = {v: k for k, v in enumerate(loops)}
        pairs = []
        for v in loops:
            for a in base.outgoing(int(base.source[v])):
                pairs.append((v, a))
        self.pairs = tuple(pairs)
        arrow_of = {pair: k for k, pair in enumerate(pairs)}
        self._arrow_of = arrow_of

        def moved(v, a):
            return base.compose(base.compose(base.inverse(a), v), a)

        source = [object_of[v] for v, _ in pairs]
        target = [object_of[moved(v, a)] for v, a in pairs]
        identities = [
            arrow_of[v, base.identity(int(base.source[v]))] for v in loops
        ]
        inverses = [arrow_of[moved(v, a), base.inverse(a)] for v, a in pairs]
        composition = {}
        for k, (v, a) in enumerate(pairs):
            w = moved(v, a)
            for b in base.outgoing(int(base.target[a])):
                composition[k, arrow_of[w, b]] = arrow_of[v, base.compose(a, b)]
        super().__init__(
            [base.arrow_labels[v] for v in loops],
            source,
            target,
            identities,
            inverses,
            composition,
            ["%s>%s" % (base.arrow_labels[v], base.arrow_labels[a]) for v, a in pairs],
            name=name or "inertia %s" % base.name,
            audit=False,
        )

    def arrow(self, loop, base_arrow):
        return self._arrow_of[loop, base_arrow]

    def object_of_loop(self, loop):
        return self.loops.index(loop)

    @cached_property
    def unit_objects(self):
        """Inertia object of the identity loop at each base object"""
        return tuple(self.object_of_loop(self.base.identity(x)) for x in range(self.base.object_count))

    def sectors(self):
        identity_loops = set(self.base.identities.tolist())
        out = []
        for k, objects in enumerate(self.components()):
            first = objects[0]
            out.append(
                Sector(
                    index=k,
                    objects=objects,
                    representative=self.loops[first],
                    isotropy_order=len(self.isotropy(first)),
                    is_identity=self.loops[first] in identity_loops,
                )
            )
        return out

    def inversion(self):
        """The involution v -> v^-1, (v, a) -> (v^-1, a)"""
        base = self.base
        object_map = [self.object_of_loop(base.inverse(v)) for v in self.loops]
        arrow_map = [self.arrow(base.inverse(v), a) for v, a in self.pairs]
        return GroupoidMorphism(self, self, object_map, arrow_map, name="inversion")

    def unit_embedding(self):
        """x -> identity loop at x, a -> (identity at source(a), a)"""
        base = self.base
        arrow_map = [
            self.arrow(base.identity(int(base.source[a])), a) for a in range(base.arrow_count)
        ]
        return GroupoidMorphism(base, self, list(self.unit_objects), arrow_map, name="unit")


def inertia_groupoid(groupoid, audit=True):
    """The inertia groupoid with its twisted sectors

    :rtype: InertiaGroupoid
    """
    inertia = InertiaGroupoid(groupoid)
    if audit:
        inertia.audit()
    logger.debug("%r has %d sectors", inertia, len(inertia.components()))
    return inertia


@dataclass(frozen=True)
class TwistedSector:
    """A twisted sector of [M/G], a component of the inertia glued along faces"""

    index: int
    element: str
    objects: int
    arrows: int
    isotropy_order: int
    is_identity: bool

    def to_json(self):
        return {
            "sector": self.index,
            "element": self.element,
            "objects": self.objects,
            "arrows": self.arrows,
            "isotropy_order": self.isotropy_order,
            "identity_sector": self.is_identity,
        }


def twisted_sectors(action):
    """Twisted sectors of the orbifold presented by an action

    Inertia objects are pairs (cell, g) with g fixing the cell. Two of them
    lie in one sector when an inertia arrow joins them or when one cell is a
    face of the other under the same g, so a connected fixed locus gives a
    single sector whatever the triangulation.

    :rtype: list of TwistedSector
    """
    base = translation_groupoid(action, "simplices", audit=False)
    inertia = inertia_groupoid(base, audit=False)
    space = action.space
    offsets = [0]
    for d in range(space.dimension + 1):
        offsets.append(offsets[-1] + space.count(d))

    component_of = inertia.component_of
    parent = list(range(max(component_of) + 1))

    def find(c):
        while parent[c] != c:
            parent[c] = parent[parent[c]]
            c = parent[c]
        return c

    for x, loop in enumerate(inertia.loops):
        cell, g = base.split(loop)
        d, i = base.cells[cell]
        if d == 0:
            continue
        for _, face in space.faces(space.cells(d)[i]):
            y = inertia.object_of_loop(base.arrow(offsets[d - 1] + space.index(face), g))
            s, t = find(component_of[x]), find(component_of[y])
            if s != t:
                parent[max(s, t)] = min(s, t)

    members = defaultdict(list)
    for x in range(inertia.object_count):
        members[find(component_of[x])].append(x)
    sectors = []
    for k, root in enumerate(sorted(members)):
        objects = members[root]
        _, g = base.split(inertia.loops[objects[0]])
        sectors.append(
            TwistedSector(
                index=k,
                element=action.group.labels[g],
                objects=len(objects),
                arrows=sum(len(inertia.outgoing(x)) for x in objects),
                isotropy_order=len(inertia.isotropy(objects[0])),
                is_identity=g == action.group.identity,
            )
        )
    logger.debug("%r has %d twisted sectors", action, len(sectors))
    return sectors


class GroupoidMorphism(object):
    """A functor between finite groupoids, validated on construction"""

    def __init__(self, domain, codomain, object_map, arrow_map, name=None):
        self.domain = domain
        self.codomain = codomain
        self.name = name
        self.object_map = _readonly(object_map)
        self.arrow_map = _readonly(arrow_map)
        if len(self.object_map) != domain.object_count or len(self.arrow_map) != domain.arrow_count:
            raise InvariantError("Morphism maps have the wrong sizes", code="morphism-shape")
        if (domain.object_count and (
            self.object_map.min() < 0 or self.object_map.max() >= codomain.object_count
        )) or (domain.arrow_count and (
            self.arrow_map.min() < 0 or self.arrow_map.max() >= codomain.arrow_count
        )):
            raise InvariantError("Morphism maps leave the codomain", code="morphism-shape")
        F, f = self.object_map, self.arrow_map
        for end, ends, cod_ends in (
            ("source", domain.source, codomain.source),
            ("target", domain.target, codomain.target),
        ):
            broken = np.flatnonzero(cod_ends[f] != F[ends])
            if len(broken):
                a = int(broken[0])
                raise InvariantError(
                    "Morphism does not commute with %s at arrow %s" % (end, domain.arrow_labels[a]),
                    code="morphism-%s" % end,
                    params={"arrow": domain.arrow_labels[a]},
                )
        broken = np.flatnonzero(f[domain.identities] != codomain.identities[F])
        if len(broken):
            x = int(broken[0])
            raise InvariantError(
                "Morphism does not preserve the identity of %s" % domain.object_labels[x],
                code="morphism-identity",
                params={"object": domain.object_labels[x]},
            )
        for (a, b), c in domain.composition.items():
            if codomain.compose(int(f[a]), int(f[b])) != f[c]:
                raise InvariantError(
                    "Morphism does not preserve the composite of %s and %s"
                    % (domain.arrow_labels[a], domain.arrow_labels[b]),
                    code="morphism-composition",
                    params={"arrows": [domain.arrow_labels[a], domain.arrow_labels[b]]},
                )

    def __repr__(self):
        return "GroupoidMorphism(%s: %r -> %r)" % (self.name, self.domain, self.codomain)

    def then(self, other):
        """The composite functor, self followed by other"""
        return GroupoidMorphism(
            self.domain,
            other.codomain,
            other.object_map[self.object_map],
            other.arrow_map[self.arrow_map],
            name="%s;%s" % (self.name, other.name),
        )


def identity_morphism(groupoid):
    return GroupoidMorphism(
        groupoid,
        groupoid,
        np.arange(groupoid.object_count),
        np.arange(groupoid.arrow_count),
        name="identity",
    )


@dataclass(frozen=True)
class WeakEquivalenceVerdict:
    equivalent: bool
    certificate: dict = None

    def __bool__(self):
        return self.equivalent

    def to_json(self):
        return {"equivalent": self.equivalent, "certificate": self.certificate}


def is_weak_equivalence(morphism):
    """Decides whether a morphism is fully faithful and essentially surjective

    :param  morphism: a validated morphism
    :type   morphism: GroupoidMorphism
    :rtype: WeakEquivalenceVerdict
    """
    domain, codomain = morphism.domain, morphism.codomain
    F, f = morphism.object_map, morphism.arrow_map
    preimage = defaultdict(list)
    for x in range(domain.object_count):
        preimage[int(F[x])].append(x)

    for x in range(domain.object_count):
        fx = int(F[x])
        reachable = sorted({int(codomain.target[b]) for b in codomain.outgoing(fx)})
        for z in reachable:
            wanted = set(codomain.hom(fx, z))
            for y in preimage.get(z, ()):
                arrows = domain.hom(x, y)
                pair = {
                    "source": domain.object_labels[x],
                    "target": domain.object_labels[y],
                    "domain_arrows": len(arrows),
                    "codomain_arrows": len(wanted),
                }
                if len(arrows) != len(wanted):
                    return WeakEquivalenceVerdict(False, dict(kind="arrow-count-mismatch", **pair))
                if {int(f[a]) for a in arrows} != wanted:
                    return WeakEquivalenceVerdict(False, dict(kind="arrow-set-mismatch", **pair))

    hit = {codomain.component_of[int(z)] for z in F}
    for z in range(codomain.object_count):
        if codomain.component_of[z] not in hit:
            return WeakEquivalenceVerdict(
                False,
                {"kind": "not-essentially-surjective", "object": codomain.object_labels[z]},
            )
    return WeakEquivalenceVerdict(True)


def disjoint_union(first, second, name=None):
    """The coproduct, objects and arrows of ``second`` shifted past those of ``first``

    :rtype: FiniteGroupoid
    """
    n, m = first.object_count, first.arrow_count
    composition = dict(first.composition)
    composition.update({(a + m, b + m): c + m for (a, b), c in second.composition.items()})
    return FiniteGroupoid(
        first.object_labels + tuple("%s'" % x for x in second.object_labels),
        np.concatenate([first.source, second.source + n]),
        np.concatenate([first.target, second.target + n]),
        np.concatenate([first.identities, second.identities + m]),
        np.concatenate([first.inverses, second.inverses + m]),
        composition,
        first.arrow_labels + tuple("%s'" % a for a in second.arrow_labels),
        name=name or "%s + %s" % (first.name, second.name),
    )


def summand_inclusions(first, second, union=None):
    """The two coproduct inclusions into ``disjoint_union(first, second)``

    :rtype: tuple of (union, left inclusion, right inclusion)
    """
    union = union or disjoint_union(first, second)
    n, m = first.object_count, first.arrow_count
    left = GroupoidMorphism(
        first, union, np.arange(n), np.arange(m), name="left"
    )
    right = GroupoidMorphism(
        second,
        union,
        np.arange(second.object_count) + n,
        np.arange(second.arrow_count) + m,
        name="right",
    )
    return union, left, right


def action_morphism(source_action, target_action, vertex_map, homomorphism, on="simplices"):
    """The morphism of translation groupoids induced by an equivariant map

    Cells go to the simplex spanned by their vertex images, arrows (m, g)
    to (f(m), phi(g)).

    :param  vertex_map:   vertex of the source space -> vertex of the target space
    :param  homomorphism: group element -> group element
    :rtype: GroupoidMorphism
    """
    if not source_action.group.is_homomorphism_to(target_action.group, homomorphism):
        raise InvariantError("Group map is not a homomorphism", code="not-homomorphism")
    domain = translation_groupoid(source_action, on)
    codomain = translation_groupoid(target_action, on)
    if on == "group":
        object_map = [0]
    else:
        space, target_space = source_action.space, target_action.space
        object_map = []
        offsets = [0]
        for d in range(target_space.dimension + 1):
            offsets.append(offsets[-1] + target_space.count(d))
        for d, i in domain.cells:
            image = tuple(sorted({int(vertex_map[v]) for v in space.cells(d)[i]}))
            if len(image) != d + 1:
                raise InvariantError(
                    "Vertex map collapses %s" % cell_key(space.cells(d)[i]),
                    code="not-simplicial",
                )
            object_map.append(offsets[d] + target_space.index(image))
    n = source_action.group.order
    arrow_map = [
        codomain.arrow(object_map[m], int(homomorphism[g]))
        for m in range(len(domain.cells))
        for g in range(n)
    ]
    return GroupoidMorphism(domain, codomain, object_map, arrow_map, name="induced")


def closed_star(space, v):
    """Cells tau of ``space`` for which tau + {v} is a simplex"""
    return frozenset(
        cell for cell in space.all_cells() if tuple(sorted(set(cell) | {v})) in space
    )


class SubcomplexCover(object):
    """A cover of a simplicial complex by subcomplexes

    ``members[i]`` is a nonempty set of cells closed under faces and every
    cell lies in some member. The nerve has a simplex (i_0 < ... < i_p) for
    every family of members that share a cell.
    """

    def __init__(self, space, members, name=None):
        self.space = space
        self.name = name
        self.members = tuple(frozenset(tuple(c) for c in member) for member in members)
        for i, member in enumerate(self.members):
            if not member:
                raise InvariantError(
                    "Member %d of the cover is empty" % i,
                    code="cover-member",
                    params={"member": i},
                )
            for cell in member:
                if cell not in space:
                    raise InvariantError(
                        "Member %d holds %s, which is not a simplex" % (i, list(cell)),
                        code="cover-member",
                        params={"member": i, "simplex": list(cell)},
                    )
                for _, face in space.faces(cell):
                    if face and face not in member:
                        raise InvariantError(
                            "Member %d holds %s but not its face %s" % (i, list(cell), list(face)),
                            code="cover-member",
                            params={"member": i, "simplex": list(cell), "face": list(face)},
                        )
        covered = frozenset().union(*self.members)
        for cell in space.all_cells():
            if cell not in covered:
                raise InvariantError(
                    "%s lies in no member of the cover" % cell_key(cell),
                    code="not-a-cover",
                    params={"simplex": list(cell)},
                )

    def __repr__(self):
        return "SubcomplexCover(%s, members=%d)" % (self.name, len(self.members))

    def intersection(self, indices):
        return frozenset.intersection(*(self.members[i] for i in indices))

    @cached_property
    def nerve(self):
        """The nerve as a simplicial complex on the member indices"""
        levels = [[(i,) for i in range(len(self.members))]]
        while levels[-1]:
            levels.append(
                [
                    indices + (j,)
                    for indices in levels[-1]
                    for j in range(indices[-1] + 1, len(self.members))
                    if self.intersection(indices + (j,))
                ]
            )
        return SimplicialComplex(len(self.members), levels, name="nerve %s" % self.name)

    def intersection_complex(self, indices):
        """The subcomplex shared by the members at ``indices``, vertices renumbered in order"""
        cells = self.intersection(indices)
        number = {cell[0]: k for k, cell in enumerate(sorted(c for c in cells if len(c) == 1))}
        top = max((len(c) for c in cells), default=0)
        levels = [
            sorted(tuple(number[v] for v in cell) for cell in cells if len(cell) == d + 1)
            for d in range(top)
        ]
        return SimplicialComplex(len(number), levels)

    def leray_failure(self):
        """The first nerve simplex whose intersection is not acyclic, or None"""
        for level in self.nerve.simplices:
            for indices in level:
                shared = self.intersection_complex(indices)
                cochains = shared.cochain_complex()
                if cohomology_integer(cochains, 0).free_rank != 1 or not all(
                    cohomology_integer(cochains, k).is_trivial
                    for k in range(1, shared.dimension + 1)
                ):
                    return indices
        return None

    def is_leray(self):
        return self.leray_failure() is None


def vertex_star_cover(space, subdivide=True):
    """Closed stars of the vertices of ``space``

    With ``subdivide`` the stars are taken in the barycentric subdivision.
    There every nonempty intersection is the cone on the simplex spanned by
    the vertices involved, so the cover is Leray and its nerve is ``space``.

    :rtype: SubcomplexCover
    """
    if not subdivide:
        members = [closed_star(space, v) for v in range(space.vertex_count)]
        return SubcomplexCover(space, members, name="stars %s" % space.name)
    subdivided = barycentric_subdivision(space, name="sd %s" % space.name)
    # the vertex cells come first among the vertices of the subdivision
    members = [closed_star(subdivided, space.index((v,))) for v in range(space.vertex_count)]
    return SubcomplexCover(subdivided, members, name="stars %s" % subdivided.name)
