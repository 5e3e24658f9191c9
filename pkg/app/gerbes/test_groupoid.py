import numpy as np
import pytest

from gerbes import fixtures
from gerbes.exceptions import InvariantError
from gerbes.groupoid import (
    FiniteGroup,
    FiniteGroupoid,
    GroupoidMorphism,
    SimplicialAction,
    SimplicialComplex,
    SubcomplexCover,
    action_morphism,
    barycentric_subdivision,
    disjoint_union,
    identity_morphism,
    inertia_groupoid,
    is_weak_equivalence,
    named_groups,
    point_action,
    summand_inclusions,
    translation_groupoid,
    twisted_sectors,
    vertex_star_cover,
)
from gerbes.nervecohomology import cohomology


@pytest.mark.parametrize(
    "name, order, classes",
    [
        ("trivial", 1, 1),
        ("Z2", 2, 2),
        ("Z3", 3, 3),
        ("Z4", 4, 4),
        ("Z2xZ2", 4, 4),
        ("Z5", 5, 5),
        ("Z6", 6, 6),
        ("S3", 6, 3),
        ("Z7", 7, 7),
        ("Z8", 8, 8),
        ("Z4xZ2", 8, 8),
        ("Z2xZ2xZ2", 8, 8),
        ("D4", 8, 5),
        ("Q8", 8, 5),
    ],
)
def test_named_groups(name, order, classes, groups):
    group = groups[name]
    assert group.order == order
    assert len(group.conjugacy_classes()) == classes
    assert group.is_abelian() == (classes == order)


def test_every_group_of_order_at_most_eight_is_named(groups):
    assert len(groups) == 14
    assert sorted({g.order for g in groups.values()}) == list(range(1, 9))


def test_quaternion_relations(groups):
    q8 = groups["Q8"]
    i, j, k, minus_one = (q8.index(x) for x in ("i", "j", "k", "-1"))
    assert q8.multiply(i, i) == minus_one
    assert q8.multiply(i, j) == k
    assert q8.multiply(j, i) == q8.index("-k")
    assert q8.element_order(i) == 4
    assert q8.exponent == 4


def test_permutation_products_are_right_actions(groups):
    s3 = groups["S3"]
    product = s3.multiply(s3.index("(0 1)"), s3.index("(0 1 2)"))
    assert s3.labels[product] == "(0 2)"


def test_centralizers_and_classes_fit(groups):
    for group in groups.values():
        for orbit in group.conjugacy_classes():
            assert len(orbit) * len(group.centralizer(orbit[0])) == group.order


def test_direct_product_labels(groups):
    assert groups["Z2xZ2"].labels == ("(0,0)", "(0,1)", "(1,0)", "(1,1)")
    assert groups["Z2xZ2xZ2"].labels[5] == "(1,0,1)"


@pytest.mark.parametrize(
    "table, code",
    [
        ([[0, 1], [0, 1]], "group-identity"),
        ([[0, 1, 2], [1, 0, 2], [2, 2, 0]], "group-associativity"),
        ([[0, 1], [1, 2]], "group-table"),
        ([[0, 1, 2], [1, 0, 0], [2, 1, 0]], "group-inverse"),
    ],
)
def test_invalid_group_tables(table, code):
    with pytest.raises(InvariantError) as e:
        FiniteGroup.from_table(table)
    assert e.value.code == code


def test_group_json_round_trip(groups):
    q8 = groups["Q8"]
    data = q8.to_json()
    assert FiniteGroup.from_table(data["table"], data["labels"], "Q8") == q8


@pytest.mark.parametrize(
    "vertex_count, simplices, code",
    [
        (3, [[(0,), (1,), (2,)], [(0, 1)], [(0, 1, 2)]], "missing-face"),
        (2, [[(0,), (1,)], [(1, 0)]], "simplex-order"),
        (2, [[(0,), (1,)], [(0, 1), (0, 1)]], "duplicate-simplex"),
        (2, [[(0,), (1,)], [(0, 2)]], "simplex-vertex"),
        (2, [[(0,)]], "missing-face"),
    ],
)
def test_invalid_complexes(vertex_count, simplices, code):
    with pytest.raises(InvariantError) as e:
        SimplicialComplex(vertex_count, simplices)
    assert e.value.code == code


def test_sphere_cohomology(sphere):
    complex = sphere.space.cochain_complex()
    assert sphere.space.euler_characteristic() == 2
    assert cohomology(complex, "integers", 0).free_rank == 1
    assert cohomology(complex, "integers", 1).is_trivial
    assert cohomology(complex, "integers", 2).free_rank == 1


def test_equivariant_torus(pillowcase):
    space = pillowcase.space
    assert [space.count(d) for d in range(3)] == [36, 108, 72]
    assert space.euler_characteristic() == 0
    assert len(pillowcase.fixed_vertices()) == 4
    assert pillowcase.is_regular()
    assert not pillowcase.is_free()


def test_doubled_torus(pillowcase):
    doubled = fixtures.pillowcase_doubled()
    assert doubled.space.vertex_count == 2 * pillowcase.space.vertex_count
    assert len(doubled.orbits(2)) == len(pillowcase.orbits(2))


def test_free_rotation_has_circle_quotient():
    rotation = fixtures.circle_rotation()
    assert rotation.is_free()
    quotient = rotation.quotient_complex("quotient")
    assert quotient.euler_characteristic() == 0
    assert quotient.vertex_count == rotation.space.vertex_count // 2


def test_order_reversing_action_needs_subdivision(groups):
    z2 = groups["Z2"]
    edge = SimplicialComplex.from_facets(2, [(0, 1)])
    with pytest.raises(InvariantError) as e:
        SimplicialAction(z2, edge, [[0, 1], [1, 0]])
    assert e.value.code == "order-reversing"

    subdivided = barycentric_subdivision(edge, z2, [[0, 1, 2], [1, 0, 2]])
    assert [subdivided.space.count(d) for d in range(2)] == [3, 2]
    assert subdivided.fixed_vertices() == [2]
    assert subdivided.is_regular()


def test_action_law_is_checked(groups):
    points = SimplicialComplex(3, [[(0,), (1,), (2,)]])
    with pytest.raises(InvariantError) as e:
        SimplicialAction(groups["Z3"], points, [[0, 1, 2], [1, 2, 0], [1, 2, 0]])
    assert e.value.code == "action-law"


def test_translation_groupoid_of_a_point(groups):
    s3 = groups["S3"]
    groupoid = translation_groupoid(point_action(s3), "group")
    assert (groupoid.object_count, groupoid.arrow_count) == (1, 6)
    assert groupoid.arrow_labels == s3.labels
    assert len(groupoid.components()) == 1
    assert groupoid.isotropy(0) == tuple(range(6))


def test_translation_groupoid_components_are_orbits(pillowcase):
    groupoid = translation_groupoid(pillowcase, "vertices")
    assert len(groupoid.components()) == len(pillowcase.orbits(0))


def test_compose_needs_matching_ends(groups):
    first = translation_groupoid(point_action(groups["Z2"]), "group")
    union = disjoint_union(first, first)
    with pytest.raises(InvariantError) as e:
        union.compose(1, 3)
    assert e.value.code == "not-composable"


@pytest.mark.parametrize("name", sorted(named_groups()))
def test_inertia_of_a_point_matches_conjugacy(name, groups):
    group = groups[name]
    inertia = inertia_groupoid(translation_groupoid(point_action(group), "group"))
    assert inertia.object_count == group.order
    assert inertia.arrow_count == group.order**2
    sectors = inertia.sectors()
    assert len(sectors) == len(group.conjugacy_classes())
    for sector in sectors:
        assert sector.isotropy_order == len(group.centralizer(sector.representative))
        assert sector.is_identity == (sector.representative == group.identity)


def test_inertia_inversion_is_an_involution(groups):
    inertia = inertia_groupoid(translation_groupoid(point_action(groups["Q8"]), "group"))
    inversion = inertia.inversion()
    twice = inversion.then(inversion)
    assert (twice.object_map == np.arange(inertia.object_count)).all()
    assert (twice.arrow_map == np.arange(inertia.arrow_count)).all()
    assert inertia.unit_embedding().object_map.tolist() == [0]


@pytest.mark.parametrize(
    "action, isotropy",
    [
        ("point-S3", [6, 2, 3]),
        ("point-Z2", [2, 2]),
        ("point-trivial", [1]),
        ("circle-rotation", [1]),
        ("sphere", [1]),
    ],
)
def test_twisted_sectors(action, isotropy, workspace):
    sectors = twisted_sectors(workspace.action(action))
    assert [s.isotropy_order for s in sectors] == isotropy
    assert sectors[0].is_identity


def test_pillowcase_has_four_twisted_sectors(pillowcase):
    sectors = twisted_sectors(pillowcase)
    assert len(sectors) == 5
    assert [s.is_identity for s in sectors].count(False) == 4
    assert all(s.objects == 1 for s in sectors if not s.is_identity)


def test_pillowcase_doubling_is_a_weak_equivalence(workspace):
    verdict = is_weak_equivalence(workspace.morphism("pillowcase-doubling"))
    assert verdict.equivalent
    assert verdict.to_json() == {"equivalent": True, "certificate": None}


def test_weak_equivalence_survives_isomorphisms(workspace):
    pillowcase = workspace.action("pillowcase")
    conjugation = action_morphism(pillowcase, pillowcase, pillowcase.vertex_maps[1], [0, 1])
    assert is_weak_equivalence(conjugation)
    doubling = workspace.morphism("pillowcase-doubling")
    assert is_weak_equivalence(conjugation.then(doubling))


def test_failed_equivalence_survives_isomorphisms(groups):
    first = translation_groupoid(point_action(groups["Z2"]), "group")
    second = translation_groupoid(point_action(groups["Z3"]), "group")
    _, _, right = summand_inclusions(first, second)
    z3 = point_action(groups["Z3"])
    squaring = action_morphism(z3, z3, [0], [0, 2, 1], on="group")
    assert is_weak_equivalence(squaring)
    for morphism in (right, squaring.then(right)):
        verdict = is_weak_equivalence(morphism)
        assert verdict.certificate == {"kind": "not-essentially-surjective", "object": "*"}


def empty_groupoid():
    return FiniteGroupoid([], [], [], [], [], {}, name="empty")


def test_disjoint_union_with_the_empty_groupoid(groups):
    groupoid = translation_groupoid(point_action(groups["S3"]), "group")
    empty = empty_groupoid()
    assert (empty.object_count, empty.arrow_count) == (0, 0)

    union, left, right = summand_inclusions(groupoid, empty)
    assert (union.object_count, union.arrow_count) == (1, 6)
    assert union.composition == groupoid.composition
    assert is_weak_equivalence(left)
    assert not is_weak_equivalence(right)

    union, left, right = summand_inclusions(empty, groupoid)
    assert union.object_labels == ("*'",)
    assert (union.source == groupoid.source).all()
    assert is_weak_equivalence(right)
    assert is_weak_equivalence(identity_morphism(empty))


def test_vertex_stars_of_the_subdivision(sphere):
    cover = vertex_star_cover(sphere.space)
    assert cover.space.vertex_count == len(sphere.space.all_cells())
    assert [set(level) for level in cover.nerve.simplices] == [
        set(level) for level in sphere.space.simplices
    ]
    assert (0,) in cover.members[0] and (1,) not in cover.members[0]
    assert cover.is_leray()


def test_vertex_stars_of_the_torus_are_leray(pillowcase):
    space = pillowcase.space
    cover = vertex_star_cover(space)
    assert cover.nerve.simplices == tuple(tuple(sorted(level)) for level in space.simplices)
    assert cover.leray_failure() is None


def test_unsubdivided_stars_of_the_sphere_are_not_leray(sphere):
    cover = vertex_star_cover(sphere.space, subdivide=False)
    assert cover.members[0] == frozenset(sphere.space.all_cells()) - {(1, 2, 3)}
    assert cover.nerve.simplices[-1] == ((0, 1, 2, 3),)
    # two stars share two triangles and the opposite edge, a circle up to homotopy
    assert cover.leray_failure() == (0, 1)
    assert not cover.is_leray()


def test_cover_members_are_subcomplexes(sphere):
    space = sphere.space
    with pytest.raises(InvariantError) as e:
        SubcomplexCover(space, [space.all_cells(), [(0, 1)]])
    assert e.value.code == "cover-member"
    assert e.value.params["face"] == [1]
    with pytest.raises(InvariantError) as e:
        SubcomplexCover(space, [[(0,), (1,), (0, 1)], []])
    assert e.value.code == "cover-member"


def test_cover_must_cover_every_cell(sphere):
    with pytest.raises(InvariantError) as e:
        SubcomplexCover(sphere.space, [[(0,), (1,), (0, 1)]])
    assert e.value.code == "not-a-cover"
    assert e.value.params == {"simplex": [2]}


def test_identity_is_a_weak_equivalence(groups):
    groupoid = translation_groupoid(point_action(groups["D4"]), "group")
    assert is_weak_equivalence(identity_morphism(groupoid))


def test_summand_inclusion_is_not_essentially_surjective(groups):
    first = translation_groupoid(point_action(groups["Z2"]), "group")
    second = translation_groupoid(point_action(groups["Z3"]), "group")
    _, left, _ = summand_inclusions(first, second)
    verdict = is_weak_equivalence(left)
    assert not verdict
    assert verdict.certificate == {"kind": "not-essentially-surjective", "object": "*'"}


def test_collapsing_the_group_is_not_faithful(groups):
    morphism = action_morphism(
        point_action(groups["Z2"]), point_action(groups["trivial"]), [0], [0, 0], on="group"
    )
    verdict = is_weak_equivalence(morphism)
    assert verdict.certificate == {
        "kind": "arrow-count-mismatch",
        "source": "*",
        "target": "*",
        "domain_arrows": 2,
        "codomain_arrows": 1,
    }


def test_action_morphism_needs_a_homomorphism(groups):
    with pytest.raises(InvariantError) as e:
        action_morphism(
            point_action(groups["Z3"]), point_action(groups["Z3"]), [0], [0, 1, 1], on="group"
        )
    assert e.value.code == "not-homomorphism"


def test_morphism_must_preserve_identities(groups):
    groupoid = translation_groupoid(point_action(groups["Z2"]), "group")
    with pytest.raises(InvariantError) as e:
        GroupoidMorphism(groupoid, groupoid, [0], [1, 1])
    assert e.value.code == "morphism-identity"
