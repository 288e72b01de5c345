"""Exact integer linear algebra over arbitrary-precision integers.

Smith normal form with unimodular transforms, integer linear solving,
kernel and lattice bases, and image-membership certificates.  Matrices are
lists of lists of Python ints; sizes here are nerve-sized (a few hundred),
so clarity and exactness win over asymptotics.
"""

from math import gcd


class SmithForm:
    """D = S @ A @ T with S, T unimodular and D diagonal, d_i | d_{i+1}.

    ``diag`` holds the nonzero invariant factors (all positive), ``rank``
    their count.  ``s_inv`` is the inverse of ``S`` (needed for lattice
    bases of column spaces).
    """

    __slots__ = ("nrows", "ncols", "diag", "rank", "s", "s_inv", "t")

    def __init__(self, nrows, ncols, diag, s, s_inv, t):
        self.nrows = nrows
        self.ncols = ncols
        self.diag = diag
        self.rank = len(diag)
        self.s = s
        self.s_inv = s_inv
        self.t = t


def _identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def smith_normal_form(matrix, ncols=None):
    """Diagonalize an integer matrix by unimodular row/column operations.

    Returns a SmithForm.  The input is not modified.  ``ncols`` must be
    passed explicitly when the matrix has no rows (a zero map out of a
    nonzero space still has a kernel).
    """
    m = [list(map(int, row)) for row in matrix]
    nrows = len(m)
    ncols = len(m[0]) if nrows else (ncols or 0)
    s = _identity(nrows)
    s_inv = _identity(nrows)
    t = _identity(ncols)

    def row_swap(i, j):
        m[i], m[j] = m[j], m[i]
        s[i], s[j] = s[j], s[i]
        for r in range(nrows):
            s_inv[r][i], s_inv[r][j] = s_inv[r][j], s_inv[r][i]

    def col_swap(i, j):
        for r in range(nrows):
            m[r][i], m[r][j] = m[r][j], m[r][i]
        for r in range(ncols):
            t[r][i], t[r][j] = t[r][j], t[r][i]

    def row_addmul(i, j, q):
        # row i += q * row j
        mi, mj = m[i], m[j]
        for c in range(ncols):
            mi[c] += q * mj[c]
        si, sj = s[i], s[j]
        for c in range(nrows):
            si[c] += q * sj[c]
        for r in range(nrows):
            s_inv[r][j] -= q * s_inv[r][i]

    def col_addmul(j, i, q):
        # col j += q * col i
        for r in range(nrows):
            m[r][j] += q * m[r][i]
        for r in range(ncols):
            t[r][j] += q * t[r][i]

    def negate_row(i):
        m[i] = [-x for x in m[i]]
        s[i] = [-x for x in s[i]]
        for r in range(nrows):
            s_inv[r][i] = -s_inv[r][i]

    def find_pivot(k):
        best = None
        for i in range(k, nrows):
            for j in range(k, ncols):
                v = m[i][j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        return best
        return best

    k = 0
    limit = min(nrows, ncols)
    while k < limit:
        best = find_pivot(k)
        if best is None:
            break
        _, pi, pj = best
        if pi != k:
            row_swap(k, pi)
        if pj != k:
            col_swap(k, pj)
        while True:
            # reduce column k below the pivot, then row k to the right
            changed = False
            for i in range(k + 1, nrows):
                if m[i][k]:
                    q = m[i][k] // m[k][k]
                    row_addmul(i, k, -q)
                    if m[i][k]:
                        row_swap(k, i)  # strictly smaller remainder is new pivot
                        changed = True
            for j in range(k + 1, ncols):
                if m[k][j]:
                    q = m[k][j] // m[k][k]
                    col_addmul(j, k, -q)
                    if m[k][j]:
                        col_swap(k, j)
                        changed = True
            if not changed:
                break
        # pivot must divide the rest of the submatrix
        d = m[k][k]
        offender = None
        for i in range(k + 1, nrows):
            for j in range(k + 1, ncols):
                if m[i][j] % d:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            row_addmul(k, offender, 1)
            continue  # redo this k with the enlarged row
        if d < 0:
            negate_row(k)
        k += 1

    rank = k
    diag = [m[i][i] for i in range(rank)]

    # enforce the divisibility chain d_i | d_j for i < j
    for i in range(rank - 1):
        for j in range(i + 1, rank):
            a, b = diag[i], diag[j]
            if b % a == 0:
                continue
            g = gcd(a, b)
            x, y = _bezout(a, b, g)
            lcm = a // g * b
            # rows i,j <- U @ rows; cols i,j <- cols @ V; keeps transforms exact
            _apply_2x2_rows(m, s, s_inv, nrows, ncols, i, j,
                            ((x, y), (-b // g, a // g)),
                            ((a // g, -y), (b // g, x)))
            _apply_2x2_cols(m, t, nrows, ncols, i, j,
                            ((1, -y * (b // g)), (1, x * (a // g))))
            diag[i], diag[j] = g, lcm
            m[i][i], m[j][j] = g, lcm
            m[i][j] = m[j][i] = 0

    return SmithForm(nrows, ncols, diag, s, s_inv, t)


def _bezout(a, b, g):
    x0, x1, y0, y1 = 1, 0, 0, 1
    r0, r1 = a, b
    while r1:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    # r0 = +-g
    if r0 != g:
        x0, y0 = -x0, -y0
    return x0, y0


def _apply_2x2_rows(m, s, s_inv, nrows, ncols, i, j, u, u_inv):
    (a11, a12), (a21, a22) = u
    for c in range(ncols):
        vi, vj = m[i][c], m[j][c]
        m[i][c] = a11 * vi + a12 * vj
        m[j][c] = a21 * vi + a22 * vj
    for c in range(nrows):
        vi, vj = s[i][c], s[j][c]
        s[i][c] = a11 * vi + a12 * vj
        s[j][c] = a21 * vi + a22 * vj
    (b11, b12), (b21, b22) = u_inv
    for r in range(nrows):
        vi, vj = s_inv[r][i], s_inv[r][j]
        s_inv[r][i] = vi * b11 + vj * b21
        s_inv[r][j] = vi * b12 + vj * b22


def _apply_2x2_cols(m, t, nrows, ncols, i, j, v):
    (a11, a12), (a21, a22) = v
    for r in range(nrows):
        vi, vj = m[r][i], m[r][j]
        m[r][i] = vi * a11 + vj * a21
        m[r][j] = vi * a12 + vj * a22
    for r in range(len(t)):
        vi, vj = t[r][i], t[r][j]
        t[r][i] = vi * a11 + vj * a21
        t[r][j] = vi * a12 + vj * a22


def matvec(matrix, vec):
    return [sum(a * b for a, b in zip(row, vec)) for row in matrix]


def solve(snf, b):
    """Integer solution x of A x = b given snf = smith_normal_form(A).

    Returns None when no integer solution exists.
    """
    sb = matvec(snf.s, list(b))
    y = [0] * snf.ncols
    for i in range(snf.nrows):
        if i < snf.rank:
            q, r = divmod(sb[i], snf.diag[i])
            if r:
                return None
            y[i] = q
        elif sb[i]:
            return None
    return matvec(snf.t, y)


def obstruction_certificate(snf, b):
    """Why b is not in the column space of A: (functional, modulus, value).

    The functional f (a row of S) kills the image of A modulo ``modulus``
    (modulus 0 meaning over the integers) yet pairs with b to ``value``
    which is nonzero mod ``modulus``.  Returns None when b is in the image.
    """
    sb = matvec(snf.s, list(b))
    for i in range(snf.nrows):
        if i < snf.rank:
            if sb[i] % snf.diag[i]:
                return (list(snf.s[i]), snf.diag[i], sb[i] % snf.diag[i])
        elif sb[i]:
            return (list(snf.s[i]), 0, sb[i])
    return None


def kernel_basis(snf):
    """Basis of the integer kernel lattice of A (columns of T past the rank)."""
    return [[snf.t[r][j] for r in range(snf.ncols)]
            for j in range(snf.rank, snf.ncols)]


def lattice_basis(generators, dim):
    """Basis of the lattice spanned by integer generator vectors.

    ``generators`` is a list of length-``dim`` vectors; the result is a list
    of independent vectors spanning the same lattice (columns d_i * S^-1 e_i
    of the Smith form of the generator matrix).
    """
    if not generators:
        return []
    cols = [[g[r] for g in generators] for r in range(dim)]
    snf = smith_normal_form(cols)
    return [[snf.diag[i] * snf.s_inv[r][i] for r in range(dim)]
            for i in range(snf.rank)]


def real_in_lattice(basis, v, tol=1e-9):
    """Does the real vector v lie in the lattice spanned by ``basis``?

    Returns the integer coordinate vector when yes, else None.  Uses the
    Smith form of the basis matrix, so the test is exact up to the floating
    tolerance on the transformed coordinates.
    """
    if not basis:
        return [] if max((abs(x) for x in v), default=0.0) <= tol else None
    dim = len(basis[0])
    cols = [[b[r] for b in basis] for r in range(dim)]
    snf = smith_normal_form(cols)
    sv = [sum(snf.s[i][r] * v[r] for r in range(dim)) for i in range(dim)]
    coords = [0] * len(basis)
    scale = max(1.0, max(abs(x) for x in v))
    for i in range(dim):
        if i < snf.rank:
            q = sv[i] / snf.diag[i]
            qi = round(q)
            if abs(q - qi) > tol * scale:
                return None
            coords[i] = qi
        elif abs(sv[i]) > tol * scale:
            return None
    return matvec(snf.t, coords)
