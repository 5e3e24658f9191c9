"""
Nerves of finite groupoids and the cohomology of their classifying spaces

Cell keys: a nerve string is its arrow labels joined by ``;``, a cell of
the double complex of an action is ``"<simplex>|<string>"``, e.g.
``"0,4|(0,1);(1,1)"``, with ``"<simplex>|"`` for q = 0.
"""

import itertools
import logging
from functools import lru_cache

from django.conf import settings

from gerbes.exactalg import (
    ChainComplexZ,
    IntegerMatrix,
    cohomology_circle,
    cohomology_integer,
)
from gerbes.exceptions import BoundExceeded, DegreeOutOfRange, InvariantError, TruncationError
from gerbes.groupoid import cell_key, point_action, translation_groupoid

logger = logging.getLogger("gerbes")

INTEGERS = "integers"
CIRCLE = "circle"
COEFFICIENTS = (INTEGERS, CIRCLE)


def cohomology(complex, coefficients, k):
    """H^k of a cochain complex with the named coefficients"""
    if coefficients == INTEGERS:
        return cohomology_integer(complex, k)
    if coefficients == CIRCLE:
        return cohomology_circle(complex, k)
    raise InvariantError(
        "Unknown coefficients %r, use one of %s" % (coefficients, ", ".join(COEFFICIENTS)),
        code="coefficients",
        params={"coefficients": coefficients},
    )


class NerveTruncation(object):
    """Levels 0..q_max of the nerve of a finite groupoid

    Level 0 holds object indices, level q > 0 the composable strings
    (a_1, ..., a_q) with target(a_j) == source(a_{j+1}). With ``normalized``
    strings containing an identity arrow are left out.
    """

    def __init__(self, groupoid, q_max, normalized=False):
        if q_max < 0:
            raise DegreeOutOfRange("Nerve level must be nonnegative", params={"level": q_max})
        self.groupoid = groupoid
        self.q_max = q_max
        self.normalized = normalized
        identities = set(groupoid.identities.tolist())
        levels = [tuple(range(groupoid.object_count))]
        frontier = [(a,) for a in range(groupoid.arrow_count) if not (normalized and a in identities)]
        for q in range(1, q_max + 1):
            levels.append(tuple(frontier))
            if q == q_max:
                break
            frontier = [
                string + (b,)
                for string in frontier
                for b in groupoid.outgoing(int(groupoid.target[string[-1]]))
                if not (normalized and b in identities)
            ]
        self.levels = tuple(levels)
        self._index = [{s: i for i, s in enumerate(level)} for level in self.levels]
        self._identities = identities

    def __repr__(self):
        return "NerveTruncation(%r, sizes=%s)" % (self.groupoid, self.sizes)

    @property
    def sizes(self):
        return [len(level) for level in self.levels]

    def index(self, q, string):
        return self._index[q].get(string)

    def face(self, i, string):
        """The i-th face: drop the first arrow, compose a neighbouring pair or drop the last"""
        g = self.groupoid
        q = len(string)
        if not 0 <= i <= q:
            raise DegreeOutOfRange("No face %d of a %d-string" % (i, q), params={"face": i})
        if q == 1:
            return int(g.target[string[0]]) if i == 0 else int(g.source[string[0]])
        if i == 0:
            return string[1:]
        if i == q:
            return string[:-1]
        return string[: i - 1] + (g.compose(string[i - 1], string[i]),) + string[i + 1:]

    def is_degenerate(self, string):
        return isinstance(string, tuple) and any(a in self._identities for a in string)

    def check_simplicial_identities(self):
        """d_i d_j == d_{j-1} d_i for i < j on every string of level 2 and up"""
        for q in range(2, self.q_max + 1):
            for string in self.levels[q]:
                for j in range(q + 1):
                    for i in range(j):
                        if self.face(i, self.face(j, string)) != self.face(j - 1, self.face(i, string)):
                            raise InvariantError(
                                "Simplicial identity d%d d%d fails on %s" % (i, j, self.key(string)),
                                code="simplicial-identity",
                                params={"string": self.key(string), "faces": [i, j]},
                            )
        return True

    def key(self, string):
        if not isinstance(string, tuple):
            return self.groupoid.object_labels[string]
        return ";".join(self.groupoid.arrow_labels[a] for a in string)

    def cochain_complex(self):
        """Normalized or full cochains C^0 .. C^q_max with the alternating face sum

        :rtype: ChainComplexZ
        """
        differentials = []
        for q in range(self.q_max):
            triplets = []
            for row, string in enumerate(self.levels[q + 1]):
                for i in range(q + 2):
                    face = self.face(i, string)
                    if self.normalized and self.is_degenerate(face):
                        continue
                    triplets.append((row, self._index[q][face], (-1) ** i))
            differentials.append(
                IntegerMatrix.from_triplets(len(self.levels[q + 1]), len(self.levels[q]), triplets)
            )
        labels = [[self.key(s) for s in level] for level in self.levels]
        complex = ChainComplexZ.cohomological(self.sizes, differentials, labels)
        logger.debug("Nerve complex of %r, ranks %s", self.groupoid, self.sizes)
        return complex


def nerve(groupoid, q_max, normalized=False):
    """Levels and face maps of the nerve up to level q_max

    :rtype: NerveTruncation
    """
    return NerveTruncation(groupoid, q_max, normalized)


def nerve_complex(groupoid, q_max, normalized=True):
    return NerveTruncation(groupoid, q_max, normalized).cochain_complex()


def _check_bar_degree(group, k):
    limit = settings.ORBIFOLD_MAX_BAR_DEGREE
    if not 0 <= k <= limit:
        raise DegreeOutOfRange(
            "Degree %d is outside the configured bar truncation 0..%d" % (k, limit),
            params={"degree": k, "top": limit},
        )
    # degree k needs the normalized strings of length k + 1
    cells = (group.order - 1) ** (k + 1)
    bound = settings.ORBIFOLD_BAR_CELL_BOUND
    if cells > bound:
        raise BoundExceeded(
            "Degree %d of the bar complex of a group of order %d has %d cells, over the bound %d"
            % (k + 1, group.order, cells, bound),
            bound=bound,
            value=cells,
        )


@lru_cache(maxsize=64)
def bar_complex(group, top):
    """Normalized bar cochains of the group in degrees 0..top"""
    return nerve_complex(translation_groupoid(point_action(group), "group"), top)


def group_cohomology(group, coefficients, k):
    """H^k(G) from the normalized bar complex

    :param  group:        the finite group
    :param  coefficients: ``integers`` or ``circle``
    :param  k:            degree, at most ORBIFOLD_MAX_BAR_DEGREE
    :rtype: AbelianGroupPresentation
    """
    _check_bar_degree(group, k)
    return cohomology(bar_complex(group, k + 1), coefficients, k)


def group_cohomology_table(group, coefficients, max_degree):
    _check_bar_degree(group, max_degree)
    complex = bar_complex(group, max_degree + 1)
    return [(k, cohomology(complex, coefficients, k)) for k in range(max_degree + 1)]


class DoubleComplexTruncation(object):
    """Simplicial cochains of the space against normalized bar cochains of the group

    The (p, q) cells are pairs (p-simplex s, string (g_1..g_q) of
    non-identity elements), the nerve of the translation groupoid on
    p-simplices. The total differential is D = d_nerve + (-1)^q d_space.
    Total degrees run to ``top``; every degree below it is complete.
    """

    def __init__(self, action, p_max, q_max):
        if p_max < 0 or q_max < 0:
            raise TruncationError("Truncation bounds must be nonnegative")
        self.action = action
        self.group = group = action.group
        self.space = space = action.space
        self.p_max = p_max
        self.q_max = q_max
        self.p_top = min(p_max, space.dimension)
        self.top = min(p_max, q_max) if p_max < space.dimension else q_max

        others = [g for g in range(group.order) if g != group.identity]
        self.strings = [tuple(itertools.product(others, repeat=q)) for q in range(q_max + 1)]
        self._string_index = [{s: i for i, s in enumerate(level)} for level in self.strings]

        self.cells = []
        self._cell_index = []
        for n in range(self.top + 1):
            level = [
                (p, i, s)
                for p in range(min(self.p_top, n) + 1)
                if n - p <= q_max
                for i in range(space.count(p))
                for s in self.strings[n - p]
            ]
            self.cells.append(tuple(level))
            self._cell_index.append({cell: k for k, cell in enumerate(level)})

        differentials = [self._differential(n) for n in range(self.top)]
        labels = [[self.key(cell) for cell in level] for level in self.cells]
        self.total = ChainComplexZ.cohomological(
            [len(level) for level in self.cells], differentials, labels
        )
        logger.debug(
            "Double complex of %r truncated at (%d, %d), ranks %s",
            action,
            p_max,
            q_max,
            self.total.ranks,
        )

    def __repr__(self):
        return "DoubleComplexTruncation(%r, p_max=%d, q_max=%d)" % (
            self.action,
            self.p_max,
            self.q_max,
        )

    def key(self, cell):
        p, i, string = cell
        return "%s|%s" % (
            cell_key(self.space.cells(p)[i]),
            ";".join(self.group.labels[g] for g in string),
        )

    def parse_key(self, key):
        """Inverse of ``key``

        :rtype: tuple of (p, simplex index, string)
        """
        try:
            simplex, string = key.split("|")
            vertices = tuple(int(v) for v in simplex.split(","))
        except ValueError:
            raise InvariantError(
                "Malformed cell key %r" % key, code="cell-key", params={"cell": key}
            )
        elements = tuple(self.group.index(g) for g in string.split(";")) if string else ()
        return (len(vertices) - 1, self.space.index(vertices), elements)

    def degree_of(self, cell):
        return cell[0] + len(cell[2])

    def index(self, cell):
        n = self.degree_of(cell)
        if n > self.top or cell not in self._cell_index[n]:
            raise InvariantError(
                "Cell %s is outside the truncation" % self.key(cell),
                code="cell-outside-truncation",
                params={"cell": self.key(cell)},
            )
        return self._cell_index[n][cell]

    def _differential(self, n):
        group = self.group
        space = self.space
        sources = self._cell_index[n]
        triplets = []
        for row, (p, i, s) in enumerate(self.cells[n + 1]):
            q = len(s)
            if q:
                moved = self.action.act(p, i, s[0])
                triplets.append((row, sources[p, moved, s[1:]], 1))
                for j in range(1, q):
                    merged = group.multiply(s[j - 1], s[j])
                    if merged != group.identity:
                        face = s[: j - 1] + (merged,) + s[j + 1:]
                        triplets.append((row, sources[p, i, face], (-1) ** j))
                triplets.append((row, sources[p, i, s[:-1]], (-1) ** q))
            if p:
                for j, face in space.faces(space.cells(p)[i]):
                    triplets.append(
                        (row, sources[p - 1, space.index(face), s], (-1) ** (q + j))
                    )
        return IntegerMatrix.from_triplets(len(self.cells[n + 1]), len(self.cells[n]), triplets)


@lru_cache(maxsize=16)
def double_complex(action, p_max, q_max):
    return DoubleComplexTruncation(action, p_max, q_max)


def _check_truncation(k, p_max, q_max):
    if k < 0:
        raise DegreeOutOfRange("Degree must be nonnegative", params={"degree": k})
    if p_max < k + 1 or q_max < k + 1:
        raise TruncationError(
            "Degree %d needs p_max, q_max >= %d, got %d, %d" % (k, k + 1, p_max, q_max),
            params={"degree": k, "p_max": p_max, "q_max": q_max},
        )


def orbifold_cohomology(action, coefficients, k, p_max=None, q_max=None):
    """H^k of the classifying space of the translation groupoid on simplices

    :param  action:       the simplicial action
    :param  coefficients: ``integers`` or ``circle``
    :param  k:            the degree
    :param  p_max:        space truncation, defaults to k + 1
    :param  q_max:        nerve truncation, defaults to k + 1
    :rtype: AbelianGroupPresentation
    """
    p_max = k + 1 if p_max is None else p_max
    q_max = k + 1 if q_max is None else q_max
    _check_truncation(k, p_max, q_max)
    return cohomology(double_complex(action, p_max, q_max).total, coefficients, k)


def orbifold_cohomology_table(action, coefficients, max_degree, p_max=None, q_max=None):
    """Degrees 0..max_degree from a single truncated double complex

    :rtype: list of (degree, AbelianGroupPresentation)
    """
    p_max = max_degree + 1 if p_max is None else p_max
    q_max = max_degree + 1 if q_max is None else q_max
    _check_truncation(max_degree, p_max, q_max)
    complex = double_complex(action, p_max, q_max).total
    return [(k, cohomology(complex, coefficients, k)) for k in range(max_degree + 1)]


class CechDoubleComplex(object):
    """Cech cochains of a subcomplex cover with values in simplicial cochains

    The (p, q) cells are pairs (nerve p-simplex I, q-simplex of the
    intersection over I). The total differential is D = delta + (-1)^p d,
    delta the alternating sum of restrictions from the faces of I and d the
    simplicial coboundary inside each intersection. The augmented Cech rows
    are exact for any cover by subcomplexes, so the total cohomology is that
    of the covered space whether or not the cover is Leray.
    """

    def __init__(self, cover, top):
        if top < 0:
            raise DegreeOutOfRange("Total degree must be nonnegative", params={"degree": top})
        self.cover = cover
        self.top = top
        nerve = cover.nerve
        shared = {
            indices: sorted(cover.intersection(indices), key=lambda c: (len(c), c))
            for level in nerve.simplices
            for indices in level
        }
        self.cells = []
        self._cell_index = []
        for n in range(top + 1):
            level = [
                (indices, simplex)
                for p in range(min(n, nerve.dimension) + 1)
                for indices in nerve.cells(p)
                for simplex in shared[indices]
                if len(simplex) == n - p + 1
            ]
            self.cells.append(tuple(level))
            self._cell_index.append({cell: k for k, cell in enumerate(level)})

        differentials = [self._differential(n) for n in range(top)]
        labels = [[self.key(cell) for cell in level] for level in self.cells]
        self.total = ChainComplexZ.cohomological(
            [len(level) for level in self.cells], differentials, labels
        )
        logger.debug(
            "Cech double complex of %r to degree %d, ranks %s", cover, top, self.total.ranks
        )

    def __repr__(self):
        return "CechDoubleComplex(%r, top=%d)" % (self.cover, self.top)

    @staticmethod
    def key(cell):
        indices, simplex = cell
        return "%s|%s" % (cell_key(indices), cell_key(simplex))

    def _differential(self, n):
        faces = self.cover.space.faces
        sources = self._cell_index[n]
        triplets = []
        for row, (indices, simplex) in enumerate(self.cells[n + 1]):
            p = len(indices) - 1
            if p:
                for j, face in faces(indices):
                    triplets.append((row, sources[face, simplex], (-1) ** j))
            if len(simplex) > 1:
                for i, face in faces(simplex):
                    triplets.append((row, sources[indices, face], (-1) ** (p + i)))
        return IntegerMatrix.from_triplets(len(self.cells[n + 1]), len(self.cells[n]), triplets)


def cech_cohomology(cover, coefficients, k):
    """H^k of the space covered by ``cover``, from its Cech double complex

    :param  cover:        a cover by subcomplexes
    :type   cover:        gerbes.groupoid.SubcomplexCover
    :param  coefficients: ``integers`` or ``circle``
    :rtype: AbelianGroupPresentation
    """
    if k < 0:
        raise DegreeOutOfRange("Degree must be nonnegative", params={"degree": k})
    return cohomology(CechDoubleComplex(cover, k + 1).total, coefficients, k)
