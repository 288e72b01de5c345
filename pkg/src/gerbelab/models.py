"""Standard nerves used throughout the test corpus and the CLI samples.

All builders return plain Nerve objects: the three-arc circle, boundaries
of simplices (sphere models), the minimal 6-vertex triangulation of the
real projective plane, and ordered products such as RP^2 x S^1.
"""

from itertools import combinations

import numpy as np

from . import cech, snf as _snf
from .cech import TwistedLocalSystem
from .coeffs import CoefficientGroup
from .nerve import Nerve, build_nerve

# Facets of the 6-vertex RP^2 (antipodal quotient of the icosahedron).
RP2_TRIANGLES = (
    (0, 1, 2), (0, 1, 3), (0, 2, 4), (0, 3, 5), (0, 4, 5),
    (1, 2, 5), (1, 3, 4), (1, 4, 5), (2, 3, 4), (2, 3, 5),
)


def circle_nerve():
    """Nerve of a three-arc cover of the circle: a hollow triangle."""
    return build_nerve([(0, 1), (1, 2), (0, 2)], vertex_count=3)


def boundary_simplex(n):
    """The boundary of the (n+1)-simplex, a model of the n-sphere (n <= 3)."""
    verts = range(n + 2)
    return build_nerve(list(combinations(verts, n + 1)), vertex_count=n + 2)


def rp2_nerve():
    """Minimal 6-vertex triangulation of the real projective plane."""
    return build_nerve(RP2_TRIANGLES, vertex_count=6)


def mobius_twist():
    """Edge signs on the circle nerve with product -1 around the loop."""
    return {(0, 2): -1}


def circle_mobius_system(coeff=None):
    """The circle nerve with the orientation-reversing twist."""
    coeff = coeff or CoefficientGroup.integers(involution="negation")
    return TwistedLocalSystem(circle_nerve(), coeff, mobius_twist())


def ordered_product(a: Nerve, b: Nerve) -> Nerve:
    """Ordered simplicial product of two nerves.

    Vertices are pairs (u, v) encoded as u * b.vertex_count + v.  Simplices
    are the monotone chains in the componentwise order whose projections
    are simplices of the factors; the maximal such chains (staircases over
    pairs of factor simplices) are fed to build_nerve, whose closure
    recovers every chain.
    """
    nb = b.vertex_count

    def enc(u, v):
        return u * nb + v

    maximal = []
    for p in range(len(a.simplices)):
        for q in range(len(b.simplices)):
            if p + q + 1 > 4:
                continue
            for sa in a.simplices[p]:
                for sb in b.simplices[q]:
                    maximal.extend(_staircases(sa, sb, enc))
    return build_nerve(maximal, vertex_count=a.vertex_count * nb)


def _staircases(sa, sb, enc):
    """Maximal monotone chains through the (p+1) x (q+1) grid sa x sb."""
    p, q = len(sa) - 1, len(sb) - 1
    out = []

    def walk(i, j, chain):
        if i == p and j == q:
            out.append(tuple(chain))
            return
        if i < p:
            chain.append(enc(sa[i + 1], sb[j]))
            walk(i + 1, j, chain)
            chain.pop()
        if j < q:
            chain.append(enc(sa[i], sb[j + 1]))
            walk(i, j + 1, chain)
            chain.pop()

    walk(0, 0, [enc(sa[0], sb[0])])
    return out


def rp2_cross_circle():
    """Prism triangulation of RP^2 x S^1 (18 vertices, 90 tetrahedra).

    Its integer degree-3 cohomology is pure 2-torsion, which makes it the
    standard witness for a nonzero Dixmier-Douady class.
    """
    return ordered_product(rp2_nerve(), circle_nerve())


def rp2_generator_cocycle(system=None):
    """A mod-2 edge cocycle generating H^1 of the 6-vertex RP^2.

    Derived, not hardcoded: solve for a kernel vector of the mod-2
    coboundary that is not itself a coboundary.
    """
    system = system or TwistedLocalSystem(rp2_nerve(), CoefficientGroup.integers_mod(2))
    nerve = system.nerve
    # mod-2 kernel of d_1: integer kernel of [d_1 | 2I] projected
    rows = [list(r) for r in system.delta_matrix(1)]
    nrows = len(rows)
    for i, row in enumerate(rows):
        row.extend(2 if j == i else 0 for j in range(nrows))
    ncols = nerve.count(1)
    for vec in _snf.kernel_basis(_snf.smith_normal_form(rows, ncols=ncols + nrows)):
        candidate = cech.cochain(system, 1, vec[:ncols])
        if any(candidate.values):
            result = cech.is_coboundary(candidate, system)
            if not result.trivial:
                return candidate
    raise AssertionError("RP^2 must carry a nontrivial mod-2 1-cocycle")


def half_integer_two_cocycle(system):
    """A circle-valued 2-cocycle whose Dixmier-Douady class generates the
    2-torsion of H^3 of the given integer system's nerve.

    Works by picking an integer 3-cocycle of order exactly 2 (via the
    Smith form of d_2) and solving d(real 2-cochain) = cocycle by least
    squares, which succeeds because torsion dies rationally.  Requires a
    nerve with no 4-simplices, so that every 3-cochain is closed.
    """
    if system.nerve.count(4):
        raise ValueError("construction assumes a nerve of dimension <= 3")
    s = system.delta_snf(2)
    order2 = [i for i, d in enumerate(s.diag) if d == 2]
    if not order2:
        raise ValueError("nerve has no 2-torsion in degree-3 cohomology")
    i = order2[0]
    n3 = system.nerve.count(3)
    target = [s.s_inv[r][i] for r in range(n3)]  # integer 3-cocycle of order 2
    a = np.array(system.delta_matrix(2), dtype=float)
    x, *_ = np.linalg.lstsq(a, np.array(target, dtype=float), rcond=None)
    if float(np.max(np.abs(a @ x - np.array(target)))) > 1e-8:
        raise AssertionError("order-2 cocycle is not rationally exact")
    circle_sys = system.with_coefficients(
        CoefficientGroup.circle(involution=system.coeff.involution))
    return cech.cochain(circle_sys, 2, x.tolist()), circle_sys


def standard_corpus():
    """The named small complexes every oracle comparison runs over."""
    return {
        "circle": circle_nerve(),
        "sphere2": boundary_simplex(2),
        "sphere3": boundary_simplex(3),
        "rp2": rp2_nerve(),
    }
