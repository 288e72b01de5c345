"""Band-limited matrix loops, Fourier polarization, and the Schwinger cocycle.

A loop polynomial X(z) = sum_{|m| <= M} X_m z^m acts on the truncated mode
space span{z^r e_a : -K <= r < K} by multiplication; the polarization puts
modes r >= 0 in H_+ and r < 0 in H_-.  The Schwinger cocycle is computed
two independent ways:

    trace form    c(X, Y) = Tr((M_X)_{-+}(M_Y)_{+-} - (M_Y)_{-+}(M_X)_{+-})
    residue form  c(X, Y) = sum_m m tr(X_{-m} Y_m)

and the two agree exactly for any truncation K >= max band, because the
off-diagonal blocks only couple modes within one band of the cut.  The
central extension bracket, the Dirac defect [D, M_X] = -i M_{X'} (D the
mode-number operator, X' the theta-derivative with (X')_m = i m X_m), and
the defect curvature F(X, Y) = [DX, DY] - D[X, Y] round out the toolkit.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ShapeMismatch, TruncationTooSmall


class LoopPolynomial:
    """Fourier coefficients m -> X_m (N x N complex) for |m| <= band."""

    __slots__ = ("size", "coeffs", "band")

    def __init__(self, size, coeffs, skew=False, tol=1e-10):
        self.size = int(size)
        clean = {}
        for m, mat in coeffs.items():
            arr = np.asarray(mat, dtype=complex)
            if arr.shape != (self.size, self.size):
                raise ShapeMismatch(
                    f"coefficient at mode {m} has shape {arr.shape}, "
                    f"expected {(self.size, self.size)}")
            if np.any(arr != 0):
                clean[int(m)] = arr.copy()
        self.coeffs = clean
        self.band = max((abs(m) for m in clean), default=0)
        if skew:
            for m in range(-self.band, self.band + 1):
                dev = np.max(np.abs(self.coeff(-m) + self.coeff(m).conj().T))
                if dev > tol:
                    raise ValueError(
                        f"skew-hermitian loop fails X_-m = -X_m^* at m={m}")

    def coeff(self, m):
        mat = self.coeffs.get(int(m))
        if mat is None:
            return np.zeros((self.size, self.size), dtype=complex)
        return mat

    def __add__(self, other):
        out = {}
        for m in set(self.coeffs) | set(other.coeffs):
            out[m] = self.coeff(m) + other.coeff(m)
        return LoopPolynomial(self.size, out)

    def scale(self, factor):
        return LoopPolynomial(self.size,
                              {m: factor * mat for m, mat in self.coeffs.items()})

    def bracket(self, other):
        """Pointwise bracket: [X, Y]_m = sum_p X_p Y_{m-p} - Y_p X_{m-p}."""
        out = {}
        for p, xp in self.coeffs.items():
            for q, yq in other.coeffs.items():
                out[p + q] = out.get(p + q, 0) + xp @ yq
        for p, yp in other.coeffs.items():
            for q, xq in self.coeffs.items():
                out[p + q] = out.get(p + q, 0) - yp @ xq
        return LoopPolynomial(self.size, out)

    def derivative(self):
        """Theta-derivative: (X')_m = i m X_m."""
        return LoopPolynomial(self.size,
                              {m: 1j * m * mat for m, mat in self.coeffs.items()})

    def frobenius(self):
        return float(np.sqrt(sum(np.sum(np.abs(m) ** 2)
                                 for m in self.coeffs.values())))

    @classmethod
    def random(cls, rng, size, band, skew=False):
        coeffs = {}
        for m in range(-band, band + 1):
            coeffs[m] = rng.standard_normal((size, size)) \
                + 1j * rng.standard_normal((size, size))
        if skew:
            half = {m: coeffs[m] for m in range(1, band + 1)}
            out = {m: mat for m, mat in half.items()}
            for m, mat in half.items():
                out[-m] = -mat.conj().T
            diag = coeffs[0] - coeffs[0].conj().T
            out[0] = diag
            return cls(size, out, skew=True)
        return cls(size, coeffs)

    def __repr__(self):
        return f"LoopPolynomial(size={self.size}, band={self.band})"


def loop_scale(*loops):
    """Scale used by relative tolerances: max(1, product of Frobenius norms)."""
    prod = 1.0
    for x in loops:
        prod *= x.frobenius()
    return max(1.0, prod)


class BlockOperator:
    """Truncated multiplication operator with its polarization blocks.

    Modes run over -K..K-1 in ascending order; the entry coupling input
    mode r to output mode s is X_{s-r}.  The negative modes span H_- (the
    first K*N coordinates) and the nonnegative modes span H_+.
    """

    __slots__ = ("truncation", "size", "matrix")

    def __init__(self, truncation, size, matrix):
        self.truncation = truncation
        self.size = size
        self.matrix = matrix

    @property
    def cut(self):
        return self.truncation * self.size

    @property
    def minus_plus(self):
        """Block mapping H_+ into H_- (outputs s < 0 from inputs r >= 0)."""
        return self.matrix[:self.cut, self.cut:]

    @property
    def plus_minus(self):
        return self.matrix[self.cut:, :self.cut]

    @property
    def minus_minus(self):
        return self.matrix[:self.cut, :self.cut]

    @property
    def plus_plus(self):
        return self.matrix[self.cut:, self.cut:]

    def modes(self):
        return range(-self.truncation, self.truncation)


def block_operator(X, K):
    """Assemble the truncated multiplication operator of a loop."""
    if K < 1:
        raise TruncationTooSmall("truncation must be at least 1")
    N = X.size
    dim = 2 * K * N
    mat = np.zeros((dim, dim), dtype=complex)
    for m, coeff in X.coeffs.items():
        for r in range(-K, K):
            s = r + m
            if -K <= s < K:
                si, ri = (s + K) * N, (r + K) * N
                mat[si:si + N, ri:ri + N] = coeff
    return BlockOperator(K, N, mat)


def mode_number_operator(K, N):
    """D = diagonal mode-number operator on the truncated space."""
    return np.kron(np.diag(np.arange(-K, K, dtype=float)), np.eye(N))


def schwinger_trace(X, Y, K, allow_truncated=False):
    """Tr((M_X)_{-+}(M_Y)_{+-} - (M_Y)_{-+}(M_X)_{+-}) at truncation K.

    Exact (K-independent) once K >= max(band X, band Y); below that the
    call raises TruncationTooSmall unless allow_truncated is set, in which
    case the non-converged value is returned.
    """
    threshold = max(X.band, Y.band, 1)
    if K < threshold and not allow_truncated:
        raise TruncationTooSmall(
            f"truncation {K} below the exactness threshold {threshold}")
    bx, by = block_operator(X, K), block_operator(Y, K)
    return complex(np.trace(bx.minus_plus @ by.plus_minus
                            - by.minus_plus @ bx.plus_minus))


def schwinger_residue(X, Y):
    """sum_m m tr(X_{-m} Y_m): the residue (1/2 pi i) oint tr(X dY)."""
    total = 0.0 + 0.0j
    for m in set(Y.coeffs):
        if m and -m in X.coeffs:
            total += m * np.trace(X.coeffs[-m] @ Y.coeffs[m])
    return complex(total)


def cocycle_identity_defect(X, Y, Z):
    """|c([X,Y],Z) + c([Y,Z],X) + c([Z,X],Y)|; zero up to rounding."""
    return abs(schwinger_residue(X.bracket(Y), Z)
               + schwinger_residue(Y.bracket(Z), X)
               + schwinger_residue(Z.bracket(X), Y))


@dataclass(frozen=True)
class CentralElement:
    """A loop plus a central scalar: an element of the extended algebra."""
    loop: LoopPolynomial
    central: complex


def extension_bracket(u, v):
    """[(X, a), (Y, b)] = ([X, Y], c(X, Y)); the central coordinates of the
    inputs never appear, which is what 'central' means."""
    return CentralElement(u.loop.bracket(v.loop),
                          schwinger_residue(u.loop, v.loop))


def jacobi_defect(u, v, w):
    """Max norm of the cyclic Jacobi sum of the extension bracket."""
    s1 = extension_bracket(extension_bracket(u, v), w)
    s2 = extension_bracket(extension_bracket(v, w), u)
    s3 = extension_bracket(extension_bracket(w, u), v)
    loop_sum = s1.loop + s2.loop + s3.loop
    loop_norm = max((float(np.max(np.abs(mat)))
                     for mat in loop_sum.coeffs.values()), default=0.0)
    central_norm = abs(s1.central + s2.central + s3.central)
    return max(loop_norm, central_norm)


@dataclass(frozen=True)
class DiracDefect:
    """[D, M_X] next to its prediction -i M_{X'}, compared away from the
    truncation edges (modes |m| <= window on both sides)."""
    commutator: np.ndarray
    predicted: np.ndarray
    window: int
    interior_deviation: float


def _interior_slice(matrix, K, N, window):
    idx = [(m + K) * N + a for m in range(-K, K) if abs(m) <= window
           for a in range(N)]
    return matrix[np.ix_(idx, idx)]


def dirac_defect(X, K):
    """Commutator of the mode-number operator with M_X, with prediction.

    Requires K >= band + 1; the two matrices are compared on input and
    output modes with |mode| <= K - band.
    """
    if K < X.band + 1:
        raise TruncationTooSmall(
            f"truncation {K} too small for band {X.band} (need K >= band+1)")
    N = X.size
    d = mode_number_operator(K, N)
    m = block_operator(X, K).matrix
    commutator = d @ m - m @ d
    predicted = -1j * block_operator(X.derivative(), K).matrix
    window = K - X.band
    dev = float(np.max(np.abs(_interior_slice(commutator - predicted, K, N, window)))) \
        if commutator.size else 0.0
    return DiracDefect(commutator, predicted, window, dev)


@dataclass(frozen=True)
class DefectCurvature:
    """F(X, Y) = [[D,M_X],[D,M_Y]] - [D, M_[X,Y]] on interior modes."""
    matrix: np.ndarray
    window: int
    modes: tuple


def defect_curvature(X, Y, K):
    """Failure of X -> [D, M_X] to be a bracket morphism, truncation-safe.

    Products widen the band, so K >= 2*max(band) + 1 is required and only
    modes with |mode| <= K - 2*max(band) are kept; there the matrix equals
    its untruncated value.
    """
    mb = max(X.band, Y.band)
    if K < 2 * mb + 1:
        raise TruncationTooSmall(
            f"truncation {K} too small for bands {X.band},{Y.band} "
            f"(need K >= {2 * mb + 1})")
    N = X.size
    d = mode_number_operator(K, N)
    mx = block_operator(X, K).matrix
    my = block_operator(Y, K).matrix
    dx = d @ mx - mx @ d
    dy = d @ my - my @ d
    mxy = block_operator(X.bracket(Y), K).matrix
    full = dx @ dy - dy @ dx - (d @ mxy - mxy @ d)
    window = K - 2 * mb
    modes = tuple(m for m in range(-K, K) if abs(m) <= window)
    return DefectCurvature(_interior_slice(full, K, N, window), window, modes)
