"""
Shipped test vectors: the equivariant torus, the two pillowcase
presentations, a free rotation of a circle, the 2-sphere and the named
cocycles and loops used by the command line.
"""

from functools import cache

import numpy as np

from gerbes.exactalg import CircleValue
from gerbes.groupoid import (
    FacePoset,
    SimplicialAction,
    SimplicialComplex,
    barycentric_subdivision,
    named_groups,
    trivial_action,
)

def _vertex(i, j):
    return 2 * (i % 3) + (j % 2)


def torus_cells():
    """The 3x2 grid torus as a Delta-complex

    Vertices (i, j); edges h, v, d from (i, j) to (i+1, j), (i, j+1) and
    (i+1, j+1); triangles L(i, j) on (i, j), (i+1, j), (i+1, j+1) and
    U(i, j) on (i, j), (i, j+1), (i+1, j+1). Two vertical edges share their
    endpoints, which is why the grid is only a Delta-complex.

    :rtype: tuple of (FacePoset, dict of cell name -> index)
    """
    points = [(i, j) for i in range(3) for j in range(2)]
    names = ["(%d,%d)" % p for p in points]
    for kind in ("h", "v", "d", "L", "U"):
        names.extend("%s(%d,%d)" % ((kind,) + p) for p in points)
    index = {name: k for k, name in enumerate(names)}

    def cell(kind, i, j):
        return index["%s(%d,%d)" % (kind, i % 3, j % 2)]

    dimensions = [0] * 6 + [1] * 18 + [2] * 12
    faces = [[] for _ in range(6)]
    for i, j in points:
        faces.append([_vertex(i, j), _vertex(i + 1, j)])
    for i, j in points:
        faces.append([_vertex(i, j), _vertex(i, j + 1)])
    for i, j in points:
        faces.append([_vertex(i, j), _vertex(i + 1, j + 1)])
    for i, j in points:
        faces.append([cell("h", i, j), cell("v", i + 1, j), cell("d", i, j)])
    for i, j in points:
        faces.append([cell("v", i, j), cell("h", i, j + 1), cell("d", i, j)])
    return FacePoset(dimensions, faces, names), cell


def torus_conjugation():
    """Cell permutation of x -> -x on the grid torus"""
    poset, cell = torus_cells()
    image = list(range(len(poset)))
    for i in range(3):
        for j in range(2):
            image[_vertex(i, j)] = _vertex(-i, -j)
            image[cell("h", i, j)] = cell("h", -i - 1, -j)
            image[cell("v", i, j)] = cell("v", -i, -j - 1)
            image[cell("d", i, j)] = cell("d", -i - 1, -j - 1)
            image[cell("L", i, j)] = cell("U", -i - 1, -j - 1)
            image[cell("U", i, j)] = cell("L", -i - 1, -j - 1)
    return image


@cache
def pillowcase():
    """Z2 acting on the subdivided torus by x -> -x, four fixed points"""
    poset, _ = torus_cells()
    identity = list(range(len(poset)))
    return barycentric_subdivision(
        poset, named_groups()["Z2"], [identity, torus_conjugation()], name="pillowcase"
    )


@cache
def point():
    return SimplicialComplex.point()


@cache
def torus():
    """The subdivided torus with the trivial group"""
    return trivial_action(pillowcase().space, name="torus")


@cache
def pillowcase_doubled():
    """Z2 x Z2 on two copies of the torus, (a, b) conjugates a times and swaps copies b times"""
    space = pillowcase().space
    n = space.vertex_count
    doubled = space.disjoint_union(space, name="torus-doubled")
    group = named_groups()["Z2xZ2"]
    conjugations = pillowcase().vertex_maps
    vertex_maps = []
    for a in range(2):
        for b in range(2):
            row = np.empty(2 * n, dtype=np.int64)
            for copy in range(2):
                row[copy * n : (copy + 1) * n] = conjugations[a] + ((copy + b) % 2) * n
            vertex_maps.append(row)
    return SimplicialAction(group, doubled, vertex_maps, name="pillowcase-doubled")


@cache
def pillowcase_extended():
    """Z2 x Z2 on one torus, the second factor acting trivially"""
    conjugations = pillowcase().vertex_maps
    vertex_maps = [conjugations[a] for a in range(2) for _ in range(2)]
    return SimplicialAction(
        named_groups()["Z2xZ2"],
        pillowcase().space,
        vertex_maps,
        name="pillowcase-extended",
    )


@cache
def circle_rotation():
    """Z2 rotating a hexagon by half a turn, subdivided to a free 12-gon action"""
    hexagon = SimplicialComplex.from_facets(6, [(i, (i + 1) % 6) for i in range(6)], "hexagon")
    poset = hexagon.face_poset()
    rotation = [(v + 3) % 6 for v in range(6)]
    cell_maps = poset.cell_maps_from_vertices([list(range(6)), rotation])
    return barycentric_subdivision(
        poset, named_groups()["Z2"], cell_maps, name="circle-rotation"
    )


@cache
def sphere():
    """The trivial group on the boundary of a tetrahedron"""
    space = SimplicialComplex.from_facets(
        4, [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)], "sphere"
    )
    return trivial_action(space, name="sphere")


def v4_torsion_values(group=None):
    """theta(x, y) = x_1 y_2 / 2 on Z2 x Z2, the nontrivial discrete torsion"""
    group = group or named_groups()["Z2xZ2"]
    values = {}
    for x in range(group.order):
        for y in range(group.order):
            if x // 2 and y % 2:
                values["%s;%s" % (group.labels[x], group.labels[y])] = CircleValue(1, 2)
    return values


def builtin_actions():
    actions = {
        "pillowcase": pillowcase(),
        "pillowcase-doubled": pillowcase_doubled(),
        "pillowcase-extended": pillowcase_extended(),
        "circle-rotation": circle_rotation(),
        "sphere": sphere(),
        "torus": torus(),
    }
    for name, group in named_groups().items():
        actions["point-%s" % name] = SimplicialAction(
            group, point(), [[0]] * group.order, name="point-%s" % name
        )
    return actions


def builtin_complexes():
    return {
        "point": point(),
        "sphere": sphere().space,
        "torus": pillowcase().space,
        "torus-doubled": pillowcase_doubled().space,
        "circle": circle_rotation().space,
    }


def builtin_cocycles():
    """Raw cocycle entries, keyed by name, in the workspace document layout"""
    torsion = {k: str(v) for k, v in v4_torsion_values().items()}
    inflated = {"0|%s" % k: v for k, v in torsion.items()}
    perturbed = dict(inflated)
    perturbed["0|(0,1);(1,0)"] = "1/2"
    first_triangle = "%s|" % ",".join(str(v) for v in torus().space.cells(2)[0])
    return {
        "v4-torsion": {"group": "Z2xZ2", "degree": 2, "values": torsion},
        "v4-trivial": {"group": "Z2xZ2", "degree": 2, "values": {}},
        "v4-torsion-point": {
            "action": "point-Z2xZ2",
            "degree": 2,
            "truncation": [3, 3],
            "values": inflated,
        },
        "v4-perturbed": {
            "action": "point-Z2xZ2",
            "degree": 2,
            "truncation": [3, 3],
            "values": perturbed,
        },
        "torus-flat-gerbe": {
            "action": "torus",
            "degree": 2,
            "truncation": [3, 3],
            "values": {first_triangle: "1/2"},
        },
        "z2-line-bundle": {
            "action": "point-Z2",
            "degree": 1,
            "truncation": [2, 2],
            "values": {"0|1": "1/2"},
        },
    }


def builtin_loops():
    space = torus().space
    a, b, c = space.cells(2)[0]
    return {
        "z2-generator": {"action": "point-Z2", "start": 0, "steps": [["arrow", "1"]]},
        "z2-generator-twice": {
            "action": "point-Z2",
            "start": 0,
            "steps": [["arrow", "1"], ["arrow", "1"]],
        },
        "torus-triangle": {
            "action": "torus",
            "start": a,
            "steps": [["edge", b], ["edge", c], ["edge", a]],
        },
    }


def builtin_morphisms():
    n = pillowcase().space.vertex_count
    return {
        "pillowcase-doubling": {
            "source": "pillowcase",
            "target": "pillowcase-doubled",
            "vertex_map": list(range(n)),
            "homomorphism": ["(0,0)", "(1,0)"],
            "on": "simplices",
        },
    }


def builtin_groups():
    return dict(named_groups())
