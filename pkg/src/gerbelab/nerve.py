"""Finite nerves of open covers.

A nerve is an abstract ordered simplicial complex: vertices are the chart
indices of a cover, and a k-simplex records a nonempty (k+1)-fold overlap.
Simplices are stored as strictly increasing vertex tuples in lexicographic
order, so the position of a simplex in its degree list is a stable cochain
coordinate.  Dimension is capped at 4, which is all the degree <= 3 cochain
calculus ever touches.
"""

from itertools import combinations

from .errors import DegenerateSimplex, DimensionTooLarge

MAX_DIM = 4


class Nerve:
    """Downward-closed simplicial complex on vertices 0..vertex_count-1.

    Immutable after construction.  ``simplices[k]`` is the sorted tuple of
    k-simplices; every vertex is a 0-simplex.
    """

    __slots__ = ("vertex_count", "simplices", "_index")

    def __init__(self, vertex_count, simplices):
        self.vertex_count = vertex_count
        self.simplices = simplices
        self._index = tuple({s: i for i, s in enumerate(level)} for level in simplices)

    def __eq__(self, other):
        if not isinstance(other, Nerve):
            return NotImplemented
        return (self.vertex_count == other.vertex_count
                and self.simplices == other.simplices)

    def __hash__(self):
        return hash((self.vertex_count, self.simplices))

    def __repr__(self):
        counts = ",".join(str(len(level)) for level in self.simplices)
        return f"Nerve(vertices={self.vertex_count}, counts=[{counts}])"

    def count(self, k):
        """Number of k-simplices (0 for k outside 0..MAX_DIM)."""
        if 0 <= k <= MAX_DIM:
            return len(self.simplices[k])
        return 0

    def index_of(self, simplex):
        """Cochain coordinate of a simplex (given as an increasing tuple)."""
        return self._index[len(simplex) - 1][simplex]

    def dimension(self):
        for k in range(MAX_DIM, -1, -1):
            if self.simplices[k]:
                return k
        return -1

    def euler_characteristic(self):
        return sum((-1) ** k * len(level) for k, level in enumerate(self.simplices))


def build_nerve(maximal, vertex_count=None):
    """Close a list of maximal simplices downward and canonically sort.

    Vertex tuples may arrive in any order; they are sorted into the canonical
    increasing orientation.  Repeated vertices raise DegenerateSimplex and
    simplices of dimension > 4 raise DimensionTooLarge.  If ``vertex_count``
    is omitted it is inferred as max vertex + 1; all vertices in range are
    listed as 0-simplices regardless of whether a maximal simplex names them.
    """
    cleaned = []
    top = -1
    for entry in maximal:
        tup = tuple(int(v) for v in entry)
        if len(set(tup)) != len(tup):
            raise DegenerateSimplex(f"repeated vertex in simplex {tup}")
        if len(tup) > MAX_DIM + 1:
            raise DimensionTooLarge(
                f"simplex {tup} has dimension {len(tup) - 1} > {MAX_DIM}")
        tup = tuple(sorted(tup))
        if tup and tup[0] < 0:
            raise DegenerateSimplex(f"negative vertex in simplex {tup}")
        if tup:
            top = max(top, tup[-1])
        cleaned.append(tup)
    if vertex_count is None:
        vertex_count = top + 1
    elif top >= vertex_count:
        raise DegenerateSimplex(
            f"vertex {top} out of range for vertex_count={vertex_count}")

    levels = [set() for _ in range(MAX_DIM + 1)]
    levels[0].update((v,) for v in range(vertex_count))
    for tup in cleaned:
        for size in range(1, len(tup) + 1):
            levels[size - 1].update(combinations(tup, size))
    return Nerve(vertex_count, tuple(tuple(sorted(level)) for level in levels))


def simplices(nerve, k):
    """Canonical ordered list of k-simplices; position = cochain coordinate."""
    if not 0 <= k <= MAX_DIM:
        raise DimensionTooLarge(f"degree {k} outside 0..{MAX_DIM}")
    return nerve.simplices[k]


def faces(simplex):
    """The k+1 facets of a k-simplex, in face-index order (drop vertex r)."""
    return [simplex[:r] + simplex[r + 1:] for r in range(len(simplex))]


def random_nerve(rng, max_vertices=6, max_cells=8, max_dim=3):
    """Seeded random downward-closed complex for property suites."""
    n = int(rng.integers(2, max_vertices + 1))
    cells = []
    for _ in range(int(rng.integers(1, max_cells + 1))):
        size = int(rng.integers(1, min(max_dim + 1, n) + 1))
        cells.append(tuple(sorted(rng.choice(n, size=size, replace=False).tolist())))
    return build_nerve(cells, vertex_count=n)
