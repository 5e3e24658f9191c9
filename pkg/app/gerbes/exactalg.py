"""
Exact integer linear algebra

Smith normal form, integer chain complexes and their cohomology with
integer and circle coefficients. The circle group is modelled as Q/Z
(``CircleValue``): every class on a finite model is torsion, so rational
values modulo one lose nothing.

All matrices are sparse and hold Python integers, there is no overflow at
any size.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np
import sympy
from sympy.core.intfunc import igcdex

from gerbes.exceptions import DegreeOutOfRange, InvariantError, NotACocycle

logger = logging.getLogger("gerbes")

COHOMOLOGICAL = "cohomological"
HOMOLOGICAL = "homological"


class IntegerMatrix(object):
    """Immutable sparse integer matrix stored as a mapping of rows"""

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, rows, cols, data=None):
        if rows < 0 or cols < 0:
            raise InvariantError(
                "Matrix shape must be nonnegative", code="matrix-shape"
            )
        self.rows = rows
        self.cols = cols
        self._data = {}
        for i, row in (data or {}).items():
            if not 0 <= i < rows:
                raise InvariantError(
                    "Row index %d outside a %dx%d matrix" % (i, rows, cols),
                    code="matrix-shape",
                    params={"row": i},
                )
            clean = {}
            for j, value in row.items():
                if not 0 <= j < cols:
                    raise InvariantError(
                        "Column index %d outside a %dx%d matrix" % (j, rows, cols),
                        code="matrix-shape",
                        params={"col": j},
                    )
                if value:
                    clean[j] = int(value)
            if clean:
                self._data[i] = clean

    @classmethod
    def from_rows(cls, rows, cols=None):
        """Builds a matrix from a dense list of rows

        :param  rows: list of integer lists
        :param  cols: column count, needed when there are no rows
        :rtype: IntegerMatrix
        """
        rows = [list(row) for row in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        for row in rows:
            if len(row) != cols:
                raise InvariantError(
                    "Ragged matrix rows", code="matrix-shape", params={"cols": cols}
                )
        data = {i: {j: v for j, v in enumerate(row) if v} for i, row in enumerate(rows)}
        return cls(len(rows), cols, data)

    @classmethod
    def from_triplets(cls, rows, cols, triplets):
        data = {}
        for i, j, value in triplets:
            row = data.setdefault(i, {})
            row[j] = row.get(j, 0) + value
        return cls(rows, cols, data)

    @classmethod
    def zeros(cls, rows, cols):
        return cls(rows, cols)

    @classmethod
    def identity(cls, size):
        return cls(size, size, {i: {i: 1} for i in range(size)})

    @property
    def shape(self):
        return (self.rows, self.cols)

    def entry(self, i, j):
        return self._data.get(i, {}).get(j, 0)

    def row(self, i):
        return dict(self._data.get(i, {}))

    def nonzero_rows(self):
        return iter(sorted(self._data.items()))

    def triplets(self):
        for i in sorted(self._data):
            for j in sorted(self._data[i]):
                yield i, j, self._data[i][j]

    def is_zero(self):
        return not self._data

    def to_rows(self):
        dense = [[0] * self.cols for _ in range(self.rows)]
        for i, j, value in self.triplets():
            dense[i][j] = value
        return dense

    def transpose(self):
        data = {}
        for i, j, value in self.triplets():
            data.setdefault(j, {})[i] = value
        return IntegerMatrix(self.cols, self.rows, data)

    def __matmul__(self, other):
        if self.cols != other.rows:
            raise InvariantError(
                "Cannot multiply %dx%d by %dx%d" % (self.shape + other.shape),
                code="matrix-shape",
            )
        data = {}
        for i, row in self._data.items():
            out = {}
            for k, a in row.items():
                for j, b in other._data.get(k, {}).items():
                    out[j] = out.get(j, 0) + a * b
            data[i] = out
        return IntegerMatrix(self.rows, other.cols, data)

    def apply(self, vector):
        """Multiplies the matrix with a column vector of exact numbers

        :param  vector: sequence of ints or Fractions
        :rtype: list
        """
        if len(vector) != self.cols:
            raise InvariantError(
                "Vector of length %d does not fit %d columns" % (len(vector), self.cols),
                code="matrix-shape",
            )
        out = [0] * self.rows
        for i, row in self._data.items():
            out[i] = sum(a * vector[j] for j, a in row.items())
        return out

    def determinant(self):
        if self.rows != self.cols:
            raise InvariantError("Determinant of a non-square matrix", code="matrix-shape")
        if not self.rows:
            return 1
        return int(sympy.Matrix(self.to_rows()).det(method="bareiss"))

    def __eq__(self, other):
        if not isinstance(other, IntegerMatrix):
            return NotImplemented
        return self.shape == other.shape and self._data == other._data

    def __hash__(self):
        return hash((self.shape, tuple(self.triplets())))

    def __repr__(self):
        return "IntegerMatrix(%d, %d, nnz=%d)" % (
            self.rows,
            self.cols,
            sum(len(r) for r in self._data.values()),
        )

    def to_json(self):
        return {"shape": [self.rows, self.cols], "entries": [list(t) for t in self.triplets()]}

    @classmethod
    def from_json(cls, data):
        rows, cols = data["shape"]
        return cls.from_triplets(rows, cols, [tuple(t) for t in data["entries"]])


# Elementary operations acting on the index set of a vector:
#   ("add", t, s, q)          x[t] += q * x[s]
#   ("swap", i, j)            exchange x[i] and x[j]
#   ("neg", i)                x[i] = -x[i]
#   ("mix", i, j, a, b, c, d) (x[i], x[j]) = (a x[i] + b x[j], c x[i] + d x[j]), ad - bc = +-1


def _inverse_op(op):
    kind = op[0]
    if kind == "add":
        return ("add", op[1], op[2], -op[3])
    if kind == "mix":
        _, i, j, a, b, c, d = op
        det = a * d - b * c
        return ("mix", i, j, det * d, -det * b, -det * c, det * a)
    return op


def _transpose_op(op):
    kind = op[0]
    if kind == "add":
        return ("add", op[2], op[1], op[3])
    if kind == "mix":
        _, i, j, a, b, c, d = op
        return ("mix", i, j, a, c, b, d)
    return op


def _act(op, xs):
    kind = op[0]
    if kind == "add":
        _, t, s, q = op
        xs[t] = xs[t] + q * xs[s]
    elif kind == "swap":
        _, i, j = op
        xs[i], xs[j] = xs[j] * 1, xs[i] * 1
    elif kind == "neg":
        xs[op[1]] = -xs[op[1]]
    else:
        _, i, j, a, b, c, d = op
        xi, xj = xs[i] * 1, xs[j] * 1
        xs[i] = a * xi + b * xj
        xs[j] = c * xi + d * xj


@dataclass(frozen=True)
class ElementaryProduct:
    """The unimodular matrix P = E_1 E_2 ... E_m as a list of elementary operations

    Vectors and matrices are numpy object arrays; matrices are acted on row-wise.
    """

    size: int
    ops: tuple = ()

    def _run(self, x, ops):
        xs = np.array(x, dtype=object)
        if xs.shape[:1] != (self.size,):
            raise InvariantError(
                "Operand of length %d does not fit size %d" % (len(xs), self.size),
                code="matrix-shape",
            )
        for op in ops:
            _act(op, xs)
        return xs

    def apply(self, x):
        return self._run(x, reversed(self.ops))

    def apply_inverse(self, x):
        return self._run(x, (_inverse_op(op) for op in self.ops))

    def apply_transpose(self, x):
        return self._run(x, (_transpose_op(op) for op in self.ops))

    def apply_inverse_transpose(self, x):
        return self._run(x, (_transpose_op(_inverse_op(op)) for op in reversed(self.ops)))

    def matrix(self):
        identity = np.array(IntegerMatrix.identity(self.size).to_rows(), dtype=object)
        if not self.size:
            return IntegerMatrix(0, 0)
        return IntegerMatrix.from_rows(self.apply(identity).tolist(), self.size)


@dataclass(frozen=True)
class SmithDecomposition:
    """U A V = D with U, V unimodular and d_1 | d_2 | ... on the diagonal"""

    shape: tuple
    diagonal: tuple
    left: ElementaryProduct = None
    right: ElementaryProduct = None

    @property
    def rank(self):
        return len(self.diagonal)

    @property
    def invariant_factors(self):
        return tuple(d for d in self.diagonal if d > 1)

    @cached_property
    def D(self):
        rows, cols = self.shape
        return IntegerMatrix(rows, cols, {i: {i: d} for i, d in enumerate(self.diagonal)})

    @cached_property
    def U(self):
        self._require_transforms()
        return self.left.matrix()

    @cached_property
    def V(self):
        self._require_transforms()
        return self.right.matrix()

    def _require_transforms(self):
        if self.left is None:
            raise InvariantError(
                "Decomposition was computed without transforms", code="no-transforms"
            )


class _SmithReduction(object):
    """Pivoting elimination behind smith_normal_form

    Pivot: the nonzero entry of smallest absolute value, ties broken by the
    lowest (row, col). Rows and columns of a finished pivot are removed from
    the working matrix, so the result is a scattered diagonal that is then
    permuted into place.
    """

    def __init__(self, matrix, transforms):
        self.shape = matrix.shape
        self.transforms = transforms
        self.row_log = []
        self.col_log = []
        self.rows = {i: dict(row) for i, row in matrix.nonzero_rows()}
        self.cols = {}
        for i, row in self.rows.items():
            for j in row:
                self.cols.setdefault(j, set()).add(i)
        self.pivots = []

    def _next_pivot(self):
        best = None
        for r, row in self.rows.items():
            for c, value in row.items():
                key = (abs(value), r, c)
                if best is None or key < best:
                    best = key
            if best is not None and best[0] == 1:
                break
        return best

    def _row_subtract(self, i, r, q):
        # row_i -= q * row_r
        target = self.rows[i]
        for j, value in self.rows[r].items():
            new = target.get(j, 0) - q * value
            if new:
                target[j] = new
                self.cols.setdefault(j, set()).add(i)
            else:
                target.pop(j, None)
                self.cols[j].discard(i)
        if not target:
            del self.rows[i]
        if self.transforms:
            self.row_log.append(("add", i, r, -q))

    def _eliminate(self, r, c):
        while True:
            p = self.rows[r][c]
            for i in sorted(self.cols[c] - {r}):
                q = self.rows[i][c] // p
                if q:
                    self._row_subtract(i, r, q)
            rest = [i for i in self.cols[c] if i != r]
            if rest:
                r = min(rest, key=lambda i: (abs(self.rows[i][c]), i))
                continue
            row = self.rows[r]
            for j in sorted(row):
                if j == c:
                    continue
                q = row[j] // p
                if not q:
                    continue
                # only row r meets column c, so col_j -= q col_c touches one entry
                new = row[j] - q * p
                if new:
                    row[j] = new
                else:
                    del row[j]
                    self.cols[j].discard(r)
                if self.transforms:
                    self.col_log.append(("add", c, j, -q))
            rest = [j for j in row if j != c]
            if rest:
                c = min(rest, key=lambda j: (abs(row[j]), j))
                continue
            return r, c, p

    def run(self):
        while True:
            found = self._next_pivot()
            if found is None:
                break
            r, c, p = self._eliminate(found[1], found[2])
            del self.rows[r]
            del self.cols[c]
            self.pivots.append((r, c, p))

        # units first, then in discovery order
        ordered = sorted(
            range(len(self.pivots)), key=lambda k: (abs(self.pivots[k][2]) != 1, k)
        )
        pivots = [self.pivots[k] for k in ordered]
        rows, cols = self.shape
        if self.transforms:
            self._permute([r for r, _, _ in pivots], rows, self.row_log)
            self._permute([c for _, c, _ in pivots], cols, self.col_log)

        diagonal = [p for _, _, p in pivots]
        for i, d in enumerate(diagonal):
            if d < 0:
                diagonal[i] = -d
                if self.transforms:
                    self.row_log.append(("neg", i))
        start = next((i for i, d in enumerate(diagonal) if d != 1), len(diagonal))
        for i in range(start, len(diagonal)):
            for j in range(i + 1, len(diagonal)):
                a, b = diagonal[i], diagonal[j]
                if b % a == 0:
                    continue
                s, t, g = igcdex(a, b)
                s, t, g = int(s), int(t), int(g)
                diagonal[i], diagonal[j] = g, a * b // g
                if self.transforms:
                    self.row_log.append(("mix", i, j, s, t, -b // g, a // g))
                    self.col_log.append(("mix", i, j, 1, -t * b // g, 1, s * a // g))

        left = right = None
        if self.transforms:
            left = ElementaryProduct(rows, tuple(reversed(self.row_log)))
            right = ElementaryProduct(cols, tuple(self.col_log))
        return SmithDecomposition(self.shape, tuple(diagonal), left, right)

    @staticmethod
    def _permute(front, size, log):
        taken = set(front)
        order = list(front) + [i for i in range(size) if i not in taken]
        current = list(range(size))
        where = list(range(size))
        for t, original in enumerate(order):
            p = where[original]
            if p == t:
                continue
            other = current[t]
            current[t], current[p] = original, other
            where[original], where[other] = t, p
            log.append(("swap", t, p))


def smith_normal_form(matrix, transforms=True):
    """Computes the Smith normal form of an integer matrix

    :param  matrix:     the matrix A
    :type   matrix:     IntegerMatrix
    :param  transforms: also record U and V
    :type   transforms: bool
    :rtype: SmithDecomposition
    """
    decomposition = _SmithReduction(matrix, transforms).run()
    logger.debug(
        "SNF %dx%d rank %d factors %s",
        matrix.rows,
        matrix.cols,
        decomposition.rank,
        list(decomposition.invariant_factors),
    )
    return decomposition


@dataclass(frozen=True)
class AbelianGroupPresentation:
    """Z^free_rank + (Q/Z)^divisible + Z/d_1 + ... + Z/d_n"""

    free_rank: int = 0
    torsion: tuple = ()
    divisible: int = 0

    def __post_init__(self):
        torsion = tuple(int(d) for d in self.torsion)
        object.__setattr__(self, "torsion", torsion)
        for d in torsion:
            if d < 2:
                raise InvariantError(
                    "Invariant factor %d is not at least 2" % d,
                    code="invariant-factor",
                    params={"factor": d},
                )
        for a, b in zip(torsion, torsion[1:]):
            if b % a:
                raise InvariantError(
                    "Invariant factors %d, %d break the divisibility chain" % (a, b),
                    code="divisibility-chain",
                    params={"factors": [a, b]},
                )
        if self.free_rank < 0 or self.divisible < 0:
            raise InvariantError("Ranks must be nonnegative", code="negative-rank")

    @property
    def is_trivial(self):
        return not (self.free_rank or self.torsion or self.divisible)

    @property
    def order(self):
        """Order of the group, None when it is infinite"""
        if self.free_rank or self.divisible:
            return None
        return math.prod(self.torsion)

    def __str__(self):
        parts = []
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else "Z^%d" % self.free_rank)
        if self.divisible:
            parts.append("Q/Z" if self.divisible == 1 else "(Q/Z)^%d" % self.divisible)
        parts.extend("Z/%d" % d for d in self.torsion)
        return " + ".join(parts) if parts else "0"

    def to_json(self, degree=None):
        record = {
            "free_rank": self.free_rank,
            "torsion": list(self.torsion),
            "divisible": self.divisible,
        }
        if degree is not None:
            record["degree"] = degree
        return record


@dataclass(frozen=True, order=True)
class CircleValue:
    """An element of Q/Z, reduced with 0 <= numerator < denominator"""

    numerator: int = 0
    denominator: int = 1

    def __post_init__(self):
        if self.denominator <= 0:
            raise InvariantError(
                "Circle value denominator must be positive", code="circle-value"
            )
        value = Fraction(self.numerator, self.denominator) % 1
        object.__setattr__(self, "numerator", value.numerator)
        object.__setattr__(self, "denominator", value.denominator)

    @classmethod
    def of(cls, value):
        if isinstance(value, CircleValue):
            return value
        if isinstance(value, str):
            return cls.parse(value)
        value = Fraction(value)
        return cls(value.numerator, value.denominator)

    @classmethod
    def parse(cls, text):
        try:
            value = Fraction(text.strip())
        except (ValueError, ZeroDivisionError):
            raise InvariantError(
                "Cannot read %r as a fraction" % text,
                code="circle-value",
                params={"text": text},
            )
        return cls(value.numerator, value.denominator)

    @property
    def fraction(self):
        return Fraction(self.numerator, self.denominator)

    @property
    def order(self):
        return self.denominator

    def is_zero(self):
        return self.numerator == 0

    def __add__(self, other):
        return CircleValue.of(self.fraction + CircleValue.of(other).fraction)

    __radd__ = __add__

    def __sub__(self, other):
        return CircleValue.of(self.fraction - CircleValue.of(other).fraction)

    def __rsub__(self, other):
        return CircleValue.of(other) - self

    def __neg__(self):
        return CircleValue.of(-self.fraction)

    def __mul__(self, n):
        return CircleValue.of(self.fraction * int(n))

    __rmul__ = __mul__

    def __str__(self):
        return "%d/%d" % (self.numerator, self.denominator)


ZERO = CircleValue()


def _lift(values):
    return [CircleValue.of(v).fraction for v in values]


@dataclass(frozen=True)
class ChainComplexZ:
    """A truncated complex of free abelian groups

    For a cohomological complex ``differentials[k]`` is d^k: C^k -> C^{k+1}
    of shape ranks[k+1] x ranks[k]. For a homological one it is
    d_{k+1}: C_{k+1} -> C_k of shape ranks[k] x ranks[k+1]. ``labels``
    optionally names the basis cells of every degree.
    """

    ranks: tuple
    differentials: tuple
    direction: str = COHOMOLOGICAL
    labels: tuple = None
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "ranks", tuple(self.ranks))
        object.__setattr__(self, "differentials", tuple(self.differentials))
        if self.direction not in (COHOMOLOGICAL, HOMOLOGICAL):
            raise InvariantError(
                "Unknown complex direction %r" % self.direction, code="direction"
            )
        if len(self.differentials) != max(len(self.ranks) - 1, 0):
            raise InvariantError(
                "A complex with %d degrees needs %d differentials"
                % (len(self.ranks), len(self.ranks) - 1),
                code="complex-shape",
            )
        for k, matrix in enumerate(self.differentials):
            if self.direction == COHOMOLOGICAL:
                expected = (self.ranks[k + 1], self.ranks[k])
            else:
                expected = (self.ranks[k], self.ranks[k + 1])
            if matrix.shape != expected:
                raise InvariantError(
                    "Differential %d has shape %s, expected %s" % (k, matrix.shape, expected),
                    code="complex-shape",
                    params={"degree": k},
                )
        if self.labels is not None:
            labels = tuple(tuple(level) for level in self.labels)
            object.__setattr__(self, "labels", labels)
            if tuple(len(level) for level in labels) != self.ranks:
                raise InvariantError("Labels do not match ranks", code="complex-shape")
        self.check_square_zero()

    @classmethod
    def cohomological(cls, ranks, differentials, labels=None):
        return cls(tuple(ranks), tuple(differentials), COHOMOLOGICAL, labels)

    @classmethod
    def homological(cls, ranks, differentials, labels=None):
        return cls(tuple(ranks), tuple(differentials), HOMOLOGICAL, labels)

    def check_square_zero(self):
        for k in range(len(self.differentials) - 1):
            first, second = self.differentials[k], self.differentials[k + 1]
            if self.direction == COHOMOLOGICAL:
                product = second @ first
            else:
                product = first @ second
            if not product.is_zero():
                raise InvariantError(
                    "Differentials %d and %d do not compose to zero" % (k, k + 1),
                    code="d-squared",
                    params={"degree": k},
                )

    @property
    def top_degree(self):
        """Largest degree whose (co)homology is determined by the truncation"""
        return len(self.differentials) - 1

    def dual(self):
        flipped = HOMOLOGICAL if self.direction == COHOMOLOGICAL else COHOMOLOGICAL
        return ChainComplexZ(
            self.ranks,
            tuple(m.transpose() for m in self.differentials),
            flipped,
            self.labels,
        )

    def cochain_complex(self):
        return self if self.direction == COHOMOLOGICAL else self.dual()

    def chain_complex(self):
        return self if self.direction == HOMOLOGICAL else self.dual()

    def check_degree(self, k):
        if not 0 <= k <= self.top_degree:
            raise DegreeOutOfRange(
                "Degree %d is outside the truncation 0..%d" % (k, self.top_degree),
                params={"degree": k, "top": self.top_degree},
            )

    def smith(self, k, transforms=False):
        """Smith decomposition of differential k, cached per complex"""
        key = ("smith", k, transforms)
        if key not in self._cache:
            if not transforms and ("smith", k, True) in self._cache:
                return self._cache[("smith", k, True)]
            self._cache[key] = smith_normal_form(self.differentials[k], transforms)
        return self._cache[key]

    def rank_of(self, k):
        if k < 0 or k >= len(self.differentials):
            return 0
        return self.smith(k).rank

    def index(self, k, label):
        key = ("index", k)
        if key not in self._cache:
            self._cache[key] = {cell: i for i, cell in enumerate(self.labels[k])}
        try:
            return self._cache[key][label]
        except KeyError:
            raise InvariantError(
                "Unknown cell %r in degree %d" % (label, k),
                code="unknown-cell",
                params={"degree": k, "cell": str(label)},
            )

    def label(self, k, i):
        return self.labels[k][i] if self.labels is not None else i


def cohomology_integer(complex, k):
    """Computes H^k(C; Z) from the Smith forms of the adjacent differentials

    :param  complex: the complex C
    :type   complex: ChainComplexZ
    :param  k:       the degree
    :rtype: AbelianGroupPresentation
    """
    cochains = complex.cochain_complex()
    cochains.check_degree(k)
    incoming = cochains.smith(k - 1) if k > 0 else None
    free = cochains.ranks[k] - cochains.rank_of(k) - cochains.rank_of(k - 1)
    torsion = incoming.invariant_factors if incoming else ()
    return AbelianGroupPresentation(free_rank=free, torsion=torsion)


def homology_integer(complex, k):
    """Computes H_k(C; Z) on the chain side

    :rtype: AbelianGroupPresentation
    """
    chains = complex.chain_complex()
    chains.check_degree(k)
    free = chains.ranks[k] - chains.rank_of(k) - chains.rank_of(k - 1)
    return AbelianGroupPresentation(free_rank=free, torsion=chains.smith(k).invariant_factors)


def cohomology_circle(complex, k):
    """Computes H^k(C; Q/Z) as the Pontryagin dual of H_k of the dual complex

    Free summands of H_k dualize to copies of the circle group and are
    reported in ``divisible``; torsion is self-dual.

    :rtype: AbelianGroupPresentation
    """
    cochains = complex.cochain_complex()
    cochains.check_degree(k)
    free = cochains.ranks[k] - cochains.rank_of(k) - cochains.rank_of(k - 1)
    return AbelianGroupPresentation(
        divisible=free, torsion=cochains.smith(k).invariant_factors
    )


def coboundary(complex, k, cochain):
    """d^k applied to a cochain with exact entries

    :rtype: list
    """
    cochains = complex.cochain_complex()
    if not 0 <= k < len(cochains.differentials):
        raise DegreeOutOfRange(
            "No differential leaves degree %d" % k, params={"degree": k}
        )
    return cochains.differentials[k].apply(list(cochain))


def circle_coboundary(complex, k, cochain):
    return [CircleValue.of(v) for v in coboundary(complex, k, _lift(cochain))]


def _check_circle_cocycle(cochains, k, lifted):
    if len(lifted) != cochains.ranks[k]:
        raise InvariantError(
            "Cochain of length %d does not fit degree %d of rank %d"
            % (len(lifted), k, cochains.ranks[k]),
            code="cochain-shape",
            params={"degree": k},
        )
    image = cochains.differentials[k].apply(lifted)
    for i, value in enumerate(image):
        if Fraction(value).denominator != 1:
            cell = cochains.label(k + 1, i)
            raise NotACocycle(
                "Coboundary is %s on cell %s" % (CircleValue.of(value), cell),
                params={"cell": cell, "degree": k + 1, "value": str(CircleValue.of(value))},
            )
    return image


class _CircleBasis(object):
    """Coordinates on H^k(C; Q/Z) induced by the Smith form of d^k

    With U d^k V = D and u = V^-1 z, u_i for i < rank evaluates z on the
    torsion generators of H_k; the remaining entries are read on a kernel
    basis of (V^-1 d^{k-1})[rank:]^T, which spans the free part of H_k.
    """

    def __init__(self, cochains, k):
        self.k = k
        self.outgoing = cochains.smith(k, transforms=True)
        self.rank = self.outgoing.rank
        self.size = cochains.ranks[k]
        self.torsion_positions = [
            i for i, d in enumerate(self.outgoing.diagonal) if d > 1
        ]
        self.moduli = tuple(self.outgoing.diagonal[i] for i in self.torsion_positions)
        rest = self.size - self.rank
        if k > 0 and cochains.ranks[k - 1] and rest:
            incoming = np.array(cochains.differentials[k - 1].to_rows(), dtype=object)
            moved = self.outgoing.right.apply_inverse(incoming)[self.rank:]
            constraint = IntegerMatrix.from_rows(moved.T.tolist(), rest)
        else:
            constraint = IntegerMatrix(0, rest)
        self.kernel = smith_normal_form(constraint)
        self.kernel_rank = self.kernel.rank
        self.divisible = rest - self.kernel_rank

    def coordinates(self, lifted):
        u = self.outgoing.right.apply_inverse(lifted)
        torsion = tuple(
            int(u[i] * self.outgoing.diagonal[i]) % self.outgoing.diagonal[i]
            for i in self.torsion_positions
        )
        tail = self.kernel.right.apply_transpose(u[self.rank:])
        divisible = tuple(CircleValue.of(v) for v in tail[self.kernel_rank:])
        return torsion, divisible

    def representative(self, torsion, divisible):
        if len(torsion) != len(self.moduli) or len(divisible) != self.divisible:
            raise InvariantError(
                "Class coordinates do not match the group", code="coordinate-shape"
            )
        u = [Fraction(0)] * self.size
        for i, c in zip(self.torsion_positions, torsion):
            u[i] = Fraction(int(c) % self.outgoing.diagonal[i], self.outgoing.diagonal[i])
        tail = [Fraction(0)] * (self.size - self.rank)
        for j, value in enumerate(divisible):
            tail[self.kernel_rank + j] = CircleValue.of(value).fraction
        if tail:
            u[self.rank:] = list(self.kernel.right.apply_inverse_transpose(tail))
        z = self.outgoing.right.apply(u)
        return tuple(CircleValue.of(v) for v in z)


def _circle_basis(cochains, k):
    key = ("circle-basis", k)
    if key not in cochains._cache:
        cochains._cache[key] = _CircleBasis(cochains, k)
    return cochains._cache[key]


@dataclass(frozen=True)
class CocycleReduction:
    """Canonical representative and class coordinates of a circle cocycle"""

    representative: tuple
    torsion: tuple
    moduli: tuple
    divisible: tuple = ()

    @property
    def coordinates(self):
        return self.torsion + tuple(str(v) for v in self.divisible)

    def is_zero(self):
        return not any(self.torsion) and all(v.is_zero() for v in self.divisible)

    def to_json(self):
        return {
            "torsion": list(self.torsion),
            "moduli": list(self.moduli),
            "divisible": [str(v) for v in self.divisible],
        }


def reduce_cocycle(complex, cochain, k):
    """Reduces a circle-valued k-cocycle modulo coboundaries

    Two cocycles get equal coordinates iff they differ by a coboundary.

    :param  cochain: values on the degree k cells, in basis order
    :rtype: CocycleReduction
    """
    cochains = complex.cochain_complex()
    cochains.check_degree(k)
    lifted = _lift(cochain)
    _check_circle_cocycle(cochains, k, lifted)
    basis = _circle_basis(cochains, k)
    torsion, divisible = basis.coordinates(lifted)
    return CocycleReduction(
        representative=basis.representative(torsion, divisible),
        torsion=torsion,
        moduli=basis.moduli,
        divisible=divisible,
    )


def circle_class_representative(complex, k, torsion, divisible=()):
    """The canonical cocycle whose class has the given coordinates

    :rtype: tuple of CircleValue
    """
    cochains = complex.cochain_complex()
    cochains.check_degree(k)
    return _circle_basis(cochains, k).representative(tuple(torsion), tuple(divisible))


def circle_class_moduli(complex, k):
    cochains = complex.cochain_complex()
    cochains.check_degree(k)
    return _circle_basis(cochains, k).moduli


@dataclass(frozen=True)
class IntegralClass:
    """A torsion class of H^k(C; Z) with its integral representative"""

    cocycle: tuple
    torsion: tuple
    moduli: tuple

    def is_zero(self):
        return not any(self.torsion)

    def to_json(self):
        return {"coordinates": list(self.torsion), "moduli": list(self.moduli)}


def bockstein(complex, cochain, k):
    """Connecting map H^k(C; Q/Z) -> H^{k+1}(C; Z) of 0 -> Z -> Q -> Q/Z -> 0

    The cocycle is lifted to [0, 1), its coboundary is integral and is read
    in the Smith basis of d^k: w = U d^k z, coordinates w_i mod d_i.

    :rtype: IntegralClass
    """
    cochains = complex.cochain_complex()
    cochains.check_degree(k)
    lifted = _lift(cochain)
    image = [int(v) for v in _check_circle_cocycle(cochains, k, lifted)]
    decomposition = cochains.smith(k, transforms=True)
    w = decomposition.left.apply(image)
    if any(w[decomposition.rank:]):
        raise InvariantError(
            "Bockstein image is not torsion", code="bockstein-not-torsion"
        )
    positions = [i for i, d in enumerate(decomposition.diagonal) if d > 1]
    torsion = tuple(int(w[i]) % decomposition.diagonal[i] for i in positions)
    return IntegralClass(
        cocycle=tuple(image),
        torsion=torsion,
        moduli=tuple(decomposition.diagonal[i] for i in positions),
    )
