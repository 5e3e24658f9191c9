import itertools
from fractions import Fraction

import numpy as np
import pytest

from gerbes.exactalg import (
    AbelianGroupPresentation,
    ChainComplexZ,
    CircleValue,
    IntegerMatrix,
    bockstein,
    circle_class_representative,
    circle_coboundary,
    cohomology_circle,
    cohomology_integer,
    homology_integer,
    reduce_cocycle,
    smith_normal_form,
)
from gerbes.exceptions import DegreeOutOfRange, InvariantError, NotACocycle
from gerbes.groupoid import SimplicialComplex


def random_matrices(count, seed=20240611):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        rows, cols = (int(x) for x in rng.integers(1, 13, size=2))
        entries = rng.integers(-9, 10, size=(rows, cols))
        mask = rng.random((rows, cols)) < rng.uniform(0.2, 1.0)
        yield IntegerMatrix.from_rows((entries * mask).tolist())


def torsion_complex():
    """Z -0-> Z -2-> Z -0-> Z, the cochains of a space with H^2 = Z/2"""
    one = IntegerMatrix.from_rows
    return ChainComplexZ.cohomological(
        [1, 1, 1, 1], [one([[0]]), one([[2]]), one([[0]])]
    )


def circle_complex():
    return SimplicialComplex.from_facets(3, [(0, 1), (0, 2), (1, 2)], "circle").cochain_complex()


def test_smith_normal_form_of_random_matrices():
    for matrix in random_matrices(1000):
        snf = smith_normal_form(matrix)
        assert snf.U @ matrix @ snf.V == snf.D
        assert snf.U.determinant() in (1, -1)
        assert snf.V.determinant() in (1, -1)
        assert all(d > 0 for d in snf.diagonal)
        for a, b in zip(snf.diagonal, snf.diagonal[1:]):
            assert b % a == 0


def test_smith_normal_form_diagonal_matches_determinant():
    for matrix in random_matrices(200, seed=5):
        if matrix.rows != matrix.cols:
            continue
        snf = smith_normal_form(matrix, transforms=False)
        det = matrix.determinant()
        if det:
            assert snf.rank == matrix.rows
            assert np.prod([d for d in snf.diagonal], dtype=object) == abs(det)
        else:
            assert snf.rank < matrix.rows


def test_smith_normal_form_known_example():
    matrix = IntegerMatrix.from_rows([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
    snf = smith_normal_form(matrix)
    assert snf.diagonal == (2, 6, 12)
    assert snf.invariant_factors == (2, 6, 12)
    assert snf.U @ matrix @ snf.V == snf.D


def test_smith_normal_form_without_transforms():
    matrix = IntegerMatrix.from_rows([[4, 0], [0, 6]])
    snf = smith_normal_form(matrix, transforms=False)
    assert snf.diagonal == (2, 12)
    with pytest.raises(InvariantError) as e:
        snf.U
    assert e.value.code == "no-transforms"


def test_smith_normal_form_of_zero_matrix():
    snf = smith_normal_form(IntegerMatrix.zeros(3, 2))
    assert snf.diagonal == ()
    assert snf.U @ IntegerMatrix.zeros(3, 2) @ snf.V == snf.D


def test_integer_matrix_rejects_ragged_rows():
    with pytest.raises(InvariantError) as e:
        IntegerMatrix.from_rows([[1, 2], [3]])
    assert e.value.code == "matrix-shape"


def test_integer_matrix_json():
    matrix = IntegerMatrix.from_rows([[0, 3], [-1, 0]])
    assert matrix.to_json() == {"shape": [2, 2], "entries": [[0, 1, 3], [1, 0, -1]]}
    assert IntegerMatrix.from_json(matrix.to_json()) == matrix
    assert matrix.transpose().to_rows() == [[0, -1], [3, 0]]


@pytest.mark.parametrize(
    "text, expected",
    [
        ("1/2", "1/2"),
        ("3/2", "1/2"),
        ("-1/3", "2/3"),
        ("0", "0/1"),
        ("7", "0/1"),
        ("4/8", "1/2"),
    ],
)
def test_circle_value_is_reduced(text, expected):
    assert str(CircleValue.parse(text)) == expected


def test_circle_value_arithmetic():
    third = CircleValue(1, 3)
    assert third + CircleValue(2, 3) == CircleValue()
    assert -third == CircleValue(2, 3)
    assert third * 3 == CircleValue()
    assert CircleValue.of(Fraction(5, 4)) == CircleValue(1, 4)
    assert CircleValue(1, 6).order == 6


def test_circle_value_rejects_garbage():
    with pytest.raises(InvariantError) as e:
        CircleValue.parse("half")
    assert e.value.code == "circle-value"


@pytest.mark.parametrize(
    "torsion, code",
    [((1,), "invariant-factor"), ((2, 3), "divisibility-chain"), ((0,), "invariant-factor")],
)
def test_presentation_checks_invariant_factors(torsion, code):
    with pytest.raises(InvariantError) as e:
        AbelianGroupPresentation(torsion=torsion)
    assert e.value.code == code


def test_presentation_rendering():
    group = AbelianGroupPresentation(free_rank=2, torsion=(2, 4), divisible=1)
    assert str(group) == "Z^2 + Q/Z + Z/2 + Z/4"
    assert str(AbelianGroupPresentation()) == "0"
    assert AbelianGroupPresentation(torsion=(2, 4)).order == 8
    assert group.order is None
    assert group.to_json(3) == {"degree": 3, "free_rank": 2, "torsion": [2, 4], "divisible": 1}


def test_complex_rejects_nonzero_square():
    one = IntegerMatrix.from_rows
    with pytest.raises(InvariantError) as e:
        ChainComplexZ.cohomological([1, 1, 1], [one([[1]]), one([[1]])])
    assert e.value.code == "d-squared"


def test_complex_rejects_wrong_shapes():
    with pytest.raises(InvariantError) as e:
        ChainComplexZ.cohomological([2, 1], [IntegerMatrix.zeros(2, 2)])
    assert e.value.code == "complex-shape"


def test_cohomology_of_torsion_complex():
    complex = torsion_complex()
    assert cohomology_integer(complex, 0) == AbelianGroupPresentation(free_rank=1)
    assert cohomology_integer(complex, 1).is_trivial
    assert cohomology_integer(complex, 2) == AbelianGroupPresentation(torsion=(2,))
    assert cohomology_circle(complex, 0) == AbelianGroupPresentation(divisible=1)
    assert cohomology_circle(complex, 1) == AbelianGroupPresentation(torsion=(2,))
    assert cohomology_circle(complex, 2).is_trivial


def test_degree_outside_truncation():
    with pytest.raises(DegreeOutOfRange):
        cohomology_integer(torsion_complex(), 3)


@pytest.mark.parametrize("k", [0, 1, 2])
def test_circle_cohomology_is_dual_to_homology(k):
    for complex in (torsion_complex(), circle_complex()):
        if k > complex.top_degree:
            continue
        circle = cohomology_circle(complex, k)
        homology = homology_integer(complex, k)
        assert circle.torsion == homology.torsion
        assert circle.divisible == homology.free_rank


def test_dual_switches_direction():
    complex = circle_complex()
    assert complex.dual().dual() == complex
    assert complex.chain_complex().differentials[0] == complex.differentials[0].transpose()


def test_reduce_cocycle_ignores_coboundaries():
    complex = circle_complex()
    cocycle = [CircleValue(1, 3), CircleValue(), CircleValue()]
    shift = circle_coboundary(complex, 0, ["1/5", "0", "2/7"])
    moved = [a + b for a, b in zip(cocycle, shift)]
    first = reduce_cocycle(complex, cocycle, 1)
    second = reduce_cocycle(complex, moved, 1)
    assert first.coordinates == second.coordinates
    assert first.representative == second.representative
    assert not first.is_zero()
    assert len(first.divisible) == 1


@pytest.mark.parametrize(
    "complex, cocycle",
    [
        (circle_complex(), ["1/3", "1/4", "5/6"]),
        (circle_complex(), ["0", "0", "0"]),
        (torsion_complex(), ["1/2"]),
    ],
)
def test_reduce_cocycle_is_idempotent(complex, cocycle):
    first = reduce_cocycle(complex, cocycle, 1)
    assert reduce_cocycle(complex, first.representative, 1) == first


def test_bockstein_is_additive():
    complex = torsion_complex()
    classes = [bockstein(complex, [value], 1) for value in ("0", "1/2")]
    for (a, x), (b, y) in itertools.product(zip(("0", "1/2"), classes), repeat=2):
        total = CircleValue.of(a) + CircleValue.of(b)
        expected = tuple((s + t) % m for s, t, m in zip(x.torsion, y.torsion, x.moduli))
        assert bockstein(complex, [total], 1).torsion == expected


def test_class_representative_inverts_reduction():
    complex = circle_complex()
    representative = circle_class_representative(complex, 1, (), ("2/5",))
    assert reduce_cocycle(complex, representative, 1).divisible == (CircleValue(2, 5),)


def test_torsion_class_and_bockstein():
    complex = torsion_complex()
    half = reduce_cocycle(complex, ["1/2"], 1)
    assert half.torsion == (1,)
    assert half.moduli == (2,)
    assert bockstein(complex, ["1/2"], 1).torsion == (1,)
    assert bockstein(complex, ["0"], 1).is_zero()


def test_reduce_cocycle_names_the_failing_cell():
    complex = torsion_complex()
    with pytest.raises(NotACocycle) as e:
        reduce_cocycle(complex, ["1/3"], 1)
    assert e.value.cell == 0
    assert e.value.params["value"] == "2/3"
