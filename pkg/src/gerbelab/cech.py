"""Twisted Cech cochain complexes on finite nerves.

A twisted local system is a coefficient group together with a Z2-valued
edge cocycle eps acting through the group's involution.  The twisted
coboundary on an ordered simplex (i0, ..., i_{k+1}) is

    (dc)(i0..i_{k+1}) = eps_{i0 i1} . c(i1..i_{k+1})
                        + sum_{r=1}^{k+1} (-1)^r c(i0.. ^i_r ..i_{k+1}),

i.e. only the leading face is transported, along the first edge.  This is
the unique convention for which d o d = 0 and for which the degree-2
cocycle equation written multiplicatively is a_ijk a_ikl =
sigma^{eps_ij}(a_jkl) a_ijl, the quadruple-overlap identity of lifting
obstructions.

Cohomology over the integers is computed by Smith normal form in exact
arithmetic; mod-n coefficients go through an exact lattice quotient, and
real coefficients through floating ranks.  Circle-valued (R/Z) classes are
handled by the Bockstein route: lift to [0,1), take the coboundary, read
off an integer cocycle (the twisted Dixmier-Douady construction).
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import snf as _snf
from .coeffs import CIRCLE, INTEGERS, MOD, NEGATION, REALS, CoefficientGroup
from .errors import (DegreeOverflow, LiftNotIntegral, NotACocycle,
                     NotU1Cocycle, UnsupportedCoefficient)
from .nerve import MAX_DIM, faces


class TwistedLocalSystem:
    """A nerve, a coefficient group, and an edge-sign cocycle eps.

    ``eps`` maps each 1-simplex (ascending edge) to +-1 and must satisfy
    eps_ij eps_jk = eps_ik on every triangle; violations raise NotACocycle.
    """

    __slots__ = ("nerve", "coeff", "eps", "_cache")

    def __init__(self, nerve, coeff, eps=None):
        self.nerve = nerve
        self.coeff = coeff
        edges = nerve.simplices[1]
        if eps is None:
            eps_tuple = tuple(1 for _ in edges)
        elif isinstance(eps, dict):
            eps_tuple = tuple(int(eps.get(e, 1)) for e in edges)
        else:
            eps_tuple = tuple(int(x) for x in eps)
            if len(eps_tuple) != len(edges):
                raise ValueError("eps length must match the number of edges")
        if any(x not in (1, -1) for x in eps_tuple):
            raise ValueError("eps values must be +1 or -1")
        self.eps = eps_tuple
        self._cache = {}
        for (i, j, k) in nerve.simplices[2]:
            if self.eps_of(i, j) * self.eps_of(j, k) != self.eps_of(i, k):
                raise NotACocycle(f"eps fails the cocycle law on triangle {(i, j, k)}")

    def eps_of(self, i, j):
        """Edge sign, order-insensitive (a sign is its own inverse)."""
        if i == j:
            return 1
        e = (i, j) if i < j else (j, i)
        return self.eps[self.nerve.index_of(e)]

    def with_coefficients(self, coeff):
        return TwistedLocalSystem(self.nerve, coeff, self.eps)

    def twist_is_trivial(self):
        return all(x == 1 for x in self.eps)

    def delta_matrix(self, k):
        """Integer matrix of the twisted coboundary d_k (rows = (k+1)-simplices).

        The leading-face entry is eps_{i0 i1} when the involution is
        negation and +1 otherwise; face r contributes (-1)^r.
        """
        key = ("delta", k)
        if key not in self._cache:
            if not 0 <= k <= MAX_DIM:
                raise DegreeOverflow(f"no coboundary out of degree {k}")
            sources = self.nerve.simplices[k]
            targets = self.nerve.simplices[k + 1] if k < MAX_DIM else ()
            twist_signs = self.coeff.involution == NEGATION
            rows = []
            for s in targets:
                row = [0] * len(sources)
                fs = faces(s)
                lead = self.eps_of(s[0], s[1]) if twist_signs else 1
                row[self.nerve.index_of(fs[0])] += lead
                for r in range(1, len(fs)):
                    row[self.nerve.index_of(fs[r])] += -1 if r % 2 else 1
                rows.append(row)
            self._cache[key] = rows
        return self._cache[key]

    def delta_snf(self, k):
        key = ("snf", k)
        if key not in self._cache:
            self._cache[key] = _snf.smith_normal_form(
                self.delta_matrix(k), ncols=self.nerve.count(k))
        return self._cache[key]

    def delta_snf_mod(self, k):
        """Smith form of [d_k | n I], for solving d_k x = b mod n."""
        key = ("snf_mod", k)
        if key not in self._cache:
            n = self.coeff.modulus
            rows = [list(row) for row in self.delta_matrix(k)]
            nrows = len(rows)
            for i, row in enumerate(rows):
                row.extend(n if j == i else 0 for j in range(nrows))
            self._cache[key] = _snf.smith_normal_form(
                rows, ncols=self.nerve.count(k) + nrows)
        return self._cache[key]


@dataclass(frozen=True)
class Cochain:
    """A degree-k cochain: one coefficient per canonical k-simplex."""
    degree: int
    values: tuple

    def __len__(self):
        return len(self.values)


def cochain(sys, degree, values):
    vals = tuple(sys.coeff.normalize(v) for v in values)
    if len(vals) != sys.nerve.count(degree):
        raise ValueError(
            f"degree-{degree} cochain needs {sys.nerve.count(degree)} values, "
            f"got {len(vals)}")
    return Cochain(degree, vals)


def zero_cochain(sys, degree):
    return Cochain(degree, tuple(sys.coeff.zero() for _ in range(sys.nerve.count(degree))))


def cochain_from_dict(sys, degree, mapping, default=0):
    vals = [mapping.get(s, default) for s in sys.nerve.simplices[degree]]
    return cochain(sys, degree, vals)


def cochain_add(sys, a, b):
    if a.degree != b.degree:
        raise ValueError("cochain degrees differ")
    add = sys.coeff.add
    return Cochain(a.degree, tuple(add(x, y) for x, y in zip(a.values, b.values)))


def cochain_neg(sys, a):
    neg = sys.coeff.neg
    return Cochain(a.degree, tuple(neg(x) for x in a.values))


def cochain_sub(sys, a, b):
    return cochain_add(sys, a, cochain_neg(sys, b))


def random_cochain(sys, degree, rng):
    return Cochain(degree, tuple(sys.coeff.random(rng)
                                 for _ in range(sys.nerve.count(degree))))


def coboundary(c, sys):
    """The twisted coboundary; raises DegreeOverflow past degree 3."""
    k = c.degree
    if k > MAX_DIM - 1:
        raise DegreeOverflow(f"coboundary of degree {k} exceeds the dimension cap")
    coeff = sys.coeff
    out = []
    for s in sys.nerve.simplices[k + 1]:
        fs = faces(s)
        v = coeff.act(sys.eps_of(s[0], s[1]), c.values[sys.nerve.index_of(fs[0])])
        for r in range(1, len(fs)):
            w = c.values[sys.nerve.index_of(fs[r])]
            v = coeff.sub(v, w) if r % 2 else coeff.add(v, w)
        out.append(v)
    return Cochain(k + 1, tuple(out))


def is_cocycle(c, sys):
    if c.degree >= MAX_DIM:
        return True  # no simplices above the cap to obstruct
    return all(sys.coeff.is_zero(v) for v in coboundary(c, sys).values)


@dataclass(frozen=True)
class CohomologyGroup:
    """Free rank and torsion invariants (integer coefficients), or the
    invariant-factor list of a finite module (mod-n), or a real dimension."""
    free_rank: int
    torsion: tuple
    ring: str

    def describe(self):
        if self.ring == INTEGERS:
            return f"free {self.free_rank}, torsion {list(self.torsion)}"
        if self.ring == REALS:
            return f"dim {self.free_rank}"
        return f"dim {len(self.torsion)} (factors {list(self.torsion)})"

    @property
    def dimension(self):
        """Vector-space dimension; meaningful for reals and prime moduli."""
        if self.ring == REALS:
            return self.free_rank
        return len(self.torsion)

    def is_trivial(self):
        return self.free_rank == 0 and not self.torsion


def cohomology(sys, k):
    """H^k of the twisted system, by exact Smith normal form.

    Integers: (free rank, torsion invariants).  Mod n: invariant factors
    of the finite module (for prime n just count them for the dimension).
    Reals: dimension.  Circle coefficients are unsupported here; use the
    Bockstein route instead.
    """
    kind = sys.coeff.kind
    if kind == CIRCLE:
        raise UnsupportedCoefficient(
            "circle-valued cohomology: use bockstein_dd / u1_is_coboundary")
    n_k = sys.nerve.count(k)
    if n_k == 0:
        return CohomologyGroup(0, (), kind)
    if kind == INTEGERS:
        rank_out = sys.delta_snf(k).rank
        if k == 0:
            rank_in, torsion = 0, ()
        else:
            s = sys.delta_snf(k - 1)
            rank_in = s.rank
            torsion = tuple(d for d in s.diag if d > 1)
        return CohomologyGroup(n_k - rank_out - rank_in, torsion, kind)
    if kind == REALS:
        rank_out = _real_rank(sys.delta_matrix(k))
        rank_in = _real_rank(sys.delta_matrix(k - 1)) if k else 0
        return CohomologyGroup(n_k - rank_out - rank_in, (), kind)
    return _cohomology_mod(sys, k)


def _real_rank(rows):
    if not rows or not rows[0]:
        return 0
    return int(np.linalg.matrix_rank(np.array(rows, dtype=float)))


def _cohomology_mod(sys, k):
    """ker(d_k mod n) / im(d_{k-1} mod n) as a finite abelian group.

    The kernel lattice K = {x : d_k x = 0 mod n} contains n Z^c, so it has
    full rank; relations are the columns of d_{k-1} together with n e_i.
    Expressing relations in a basis of K reduces the quotient to one more
    Smith form.
    """
    n = sys.coeff.modulus
    c = sys.nerve.count(k)
    delta_k = sys.delta_matrix(k)
    # generators of K: project the integer kernel of [d_k | n I] onto x
    if delta_k:
        rows = [list(row) for row in delta_k]
        nrows = len(rows)
        for i, row in enumerate(rows):
            row.extend(n if j == i else 0 for j in range(nrows))
        gens = [vec[:c] for vec in _snf.kernel_basis(_snf.smith_normal_form(rows))]
    else:
        gens = [[1 if j == i else 0 for j in range(c)] for i in range(c)]
    basis = _snf.lattice_basis(gens, c)
    if len(basis) != c:
        raise AssertionError("mod-n kernel lattice must have full rank")
    basis_snf = _snf.smith_normal_form([[b[r] for b in basis] for r in range(c)])
    relations = [[n if j == i else 0 for j in range(c)] for i in range(c)]
    if k > 0:
        dm1 = sys.delta_matrix(k - 1)
        for j in range(len(dm1[0]) if dm1 else 0):
            relations.append([row[j] for row in dm1])
    rel_coords = []
    for r in relations:
        z = _snf.solve(basis_snf, r)
        if z is None:
            raise AssertionError("relation escaped the kernel lattice")
        rel_coords.append(z[:c])
    quot = _snf.smith_normal_form([[rc[i] for rc in rel_coords] for i in range(c)])
    if quot.rank != c:
        raise AssertionError("mod-n cohomology module must be finite")
    torsion = tuple(d for d in quot.diag if d > 1)
    return CohomologyGroup(0, torsion, MOD)


@dataclass(frozen=True)
class Certificate:
    """Verifiable evidence that a cocycle is not a coboundary.

    ``functional`` pairs to ``pairing`` != 0 (mod ``modulus``; modulus 0
    means over Z or R) with the cocycle while killing every coboundary.
    """
    functional: tuple
    modulus: int
    pairing: object
    stage: str = "linear"


@dataclass(frozen=True)
class CoboundaryResult:
    trivial: bool
    primitive: Optional[Cochain] = None
    certificate: Optional[Certificate] = None


def is_coboundary(z, sys, check=True):
    """Solve d b = z, or certify that no primitive exists.

    Exact rings go through Smith normal form; reals use least squares with
    a residual test; circle coefficients use the two-stage Bockstein and
    lattice test.  Raises NotACocycle when z is not closed.
    """
    if check and not is_cocycle(z, sys):
        raise NotACocycle(f"degree-{z.degree} cochain is not closed")
    k = z.degree
    if k == 0:
        if all(sys.coeff.is_zero(v) for v in z.values):
            return CoboundaryResult(True, None, None)
        return CoboundaryResult(False, None, Certificate((), 0, tuple(z.values)))
    kind = sys.coeff.kind
    if kind == INTEGERS:
        s = sys.delta_snf(k - 1)
        x = _snf.solve(s, list(z.values))
        if x is not None:
            return CoboundaryResult(True, cochain(sys, k - 1, x), None)
        fun, mod, val = _snf.obstruction_certificate(s, list(z.values))
        return CoboundaryResult(False, None, Certificate(tuple(fun), mod, val))
    if kind == MOD:
        s = sys.delta_snf_mod(k - 1)
        nc = sys.nerve.count(k - 1)
        x = _snf.solve(s, list(z.values))
        if x is not None:
            return CoboundaryResult(True, cochain(sys, k - 1, x[:nc]), None)
        fun, mod, val = _snf.obstruction_certificate(s, list(z.values))
        return CoboundaryResult(False, None, Certificate(tuple(fun), mod, val))
    if kind == REALS:
        return _real_is_coboundary(z, sys)
    if kind == CIRCLE:
        return u1_is_coboundary(z, sys)
    raise UnsupportedCoefficient(kind)


def _real_is_coboundary(z, sys):
    k = z.degree
    a = np.array(sys.delta_matrix(k - 1), dtype=float)
    b = np.array(z.values, dtype=float)
    tol = max(sys.coeff.tolerance, 1e-12)
    scale = max(1.0, float(np.max(np.abs(b))) if b.size else 0.0)
    if a.size == 0:
        if not b.size or float(np.max(np.abs(b))) <= tol * scale:
            return CoboundaryResult(True, zero_cochain(sys, k - 1), None)
    else:
        x, *_ = np.linalg.lstsq(a, b, rcond=None)
        if float(np.max(np.abs(a @ x - b))) <= tol * scale:
            return CoboundaryResult(True, cochain(sys, k - 1, x.tolist()), None)
    # certificate: a left-kernel vector of d_{k-1} pairing nontrivially with z
    u, sing, _ = np.linalg.svd(a) if a.size else (np.eye(len(b)), np.zeros(0), None)
    rank = int(np.sum(sing > 1e-10 * max(1.0, sing[0] if sing.size else 0.0)))
    for i in range(rank, u.shape[1]):
        w = u[:, i]
        if abs(float(w @ b)) > tol * scale:
            return CoboundaryResult(
                False, None, Certificate(tuple(w.tolist()), 0, float(w @ b)))
    raise AssertionError("real solve failed without a certificate")


def u1_is_coboundary(z, sys):
    """Two-stage triviality test for circle-valued cocycles.

    Stage 1: the integer cocycle n = d(lift) must be an integral
    coboundary, n = d w.  Stage 2: the corrected real cocycle lift - w
    must lie in (real coboundaries) + (integer cocycle lattice), a lattice
    membership decided exactly through Smith forms.  On success a mod-1
    primitive is returned and verified.
    """
    if sys.coeff.kind != CIRCLE:
        raise UnsupportedCoefficient("u1_is_coboundary needs circle coefficients")
    k = z.degree
    if not z.values:
        return CoboundaryResult(True, zero_cochain(sys, k - 1), None)
    lift = [float(v) for v in z.values]
    n_cochain, int_sys = _integral_coboundary_of_lift(z, sys)
    stage1 = is_coboundary(n_cochain, int_sys)
    if not stage1.trivial:
        cert = stage1.certificate
        return CoboundaryResult(False, None, Certificate(
            cert.functional, cert.modulus, cert.pairing, stage="dixmier-douady"))
    w = stage1.primitive.values
    v = [lift[i] - w[i] for i in range(len(lift))]  # real cocycle
    # coordinates in the integer cocycle lattice ker(d_k)
    kernel = _snf.kernel_basis(sys.delta_snf(k))
    if not kernel:
        # only the zero cocycle: v must itself be a real coboundary
        coords = []
        u_cols = []
    else:
        bmat = np.array(kernel, dtype=float).T
        coords, *_ = np.linalg.lstsq(bmat, np.array(v), rcond=None)
        if float(np.max(np.abs(bmat @ coords - np.array(v)))) > 1e-8:
            raise AssertionError("real cocycle escaped the kernel span")
        kb_snf = _snf.smith_normal_form([[b[r] for b in kernel]
                                         for r in range(len(v))])
        u_cols = []
        dm1 = sys.delta_matrix(k - 1)
        for j in range(len(dm1[0]) if dm1 else 0):
            col = [row[j] for row in dm1]
            u = _snf.solve(kb_snf, col)
            if u is None:
                raise AssertionError("coboundary column escaped the cocycle lattice")
            u_cols.append(u[:len(kernel)])
    d = len(kernel)
    if d == 0:
        x_int = []
    else:
        # annihilator of span(U): functionals phi with phi . u = 0 for all u
        if u_cols:
            ut = [[u[i] for u in u_cols] for i in range(d)]  # d x m, columns = u
            phi_rows = _snf.kernel_basis(_snf.smith_normal_form(
                [[ut[i][j] for i in range(d)] for j in range(len(u_cols))]))
        else:
            phi_rows = [[1 if j == i else 0 for j in range(d)] for i in range(d)]
        if not phi_rows:
            x_int = [0] * d  # U spans everything; any integer offset works
        else:
            y = [sum(phi[i] * coords[i] for i in range(d)) for phi in phi_rows]
            gens = [[phi[j] for phi in phi_rows] for j in range(d)]
            lat = _snf.lattice_basis(gens, len(phi_rows))
            member = _snf.real_in_lattice(lat, y, tol=max(sys.coeff.tolerance, 1e-9))
            if member is None:
                return CoboundaryResult(False, None, Certificate(
                    tuple(tuple(p) for p in phi_rows), 0, tuple(y),
                    stage="real-vs-integral"))
            y_int = [sum(member[i] * lat[i][r] for i in range(len(lat)))
                     for r in range(len(phi_rows))]
            phi_mat_snf = _snf.smith_normal_form(phi_rows)
            x_int = _snf.solve(phi_mat_snf, y_int)
            if x_int is None:
                raise AssertionError("lattice membership without integer witness")
            x_int = x_int[:d]
    w2 = [sum(x_int[i] * kernel[i][r] for i in range(d)) for r in range(len(v))] \
        if d else [0] * len(v)
    target = np.array([v[r] - w2[r] for r in range(len(v))])
    a = np.array(sys.delta_matrix(k - 1), dtype=float)
    if a.size == 0:
        if target.size and float(np.max(np.abs(target))) > 1e-8:
            raise AssertionError("membership held but no primitive found")
        b_real = np.zeros(sys.nerve.count(k - 1))
    else:
        b_real, *_ = np.linalg.lstsq(a, target, rcond=None)
        if float(np.max(np.abs(a @ b_real - target))) > 1e-8:
            raise AssertionError("membership held but residual is large")
    primitive = cochain(sys, k - 1, b_real.tolist())
    check = cochain_sub(sys, coboundary(primitive, sys), z)
    if not all(sys.coeff.is_zero(x) for x in check.values):
        raise AssertionError("u1 primitive failed verification")
    return CoboundaryResult(True, primitive, None)


def _integral_coboundary_of_lift(z, sys):
    """Round d(lift) to the integer cocycle it must be; also return the
    integer-coefficient system carrying the same twist.

    The mod-1 closure of z is the precondition (NotU1Cocycle); a rounding
    drift past tolerance afterwards signals a broken lift (LiftNotIntegral).
    """
    k = z.degree
    if not is_cocycle(z, sys):
        raise NotU1Cocycle(f"degree-{k} cochain is not closed modulo 1")
    lift = [float(v) for v in z.values]
    rows = sys.delta_matrix(k)
    tol = max(sys.coeff.tolerance, 1e-9)
    n_int = []
    for row in rows:
        val = sum(row[i] * lift[i] for i in range(len(lift)))
        r = round(val)
        if abs(val - r) > tol:
            raise LiftNotIntegral(
                f"coboundary of the lift is {val}, not an integer within {tol}")
        n_int.append(int(r))
    int_sys = sys.with_coefficients(
        CoefficientGroup.integers(involution=sys.coeff.involution))
    n_cochain = Cochain(k + 1, tuple(n_int))
    if k + 1 <= MAX_DIM - 1 and not is_cocycle(n_cochain, int_sys):
        raise LiftNotIntegral("rounded coboundary is not closed")
    return n_cochain, int_sys


@dataclass(frozen=True)
class BocksteinResult:
    """Integer 3-cocycle of a circle-valued 2-cocycle, with its class data."""
    cocycle: Cochain
    system: TwistedLocalSystem  # integer-coefficient system with the same twist
    trivial: bool
    primitive: Optional[Cochain]
    certificate: Optional[Certificate]
    group: CohomologyGroup = field(repr=False)


def bockstein_dd(a, sys):
    """Twisted Dixmier-Douady map: lift to [0,1), apply d, read integers.

    ``a`` must be a circle-valued 2-cocycle (mod 1, within tolerance).
    Returns the integer 3-cocycle together with its class in H^3 of the
    twisted integer system: a primitive when trivial, a certificate when
    not.
    """
    if sys.coeff.kind != CIRCLE:
        raise UnsupportedCoefficient("bockstein_dd needs circle coefficients")
    if a.degree != 2:
        raise DegreeOverflow("the Dixmier-Douady map takes degree-2 cocycles")
    n_cochain, int_sys = _integral_coboundary_of_lift(a, sys)
    result = is_coboundary(n_cochain, int_sys)
    group = cohomology(int_sys, 3)
    return BocksteinResult(n_cochain, int_sys, result.trivial,
                           result.primitive, result.certificate, group)
