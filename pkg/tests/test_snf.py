from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gerbelab.snf import (kernel_basis, lattice_basis, matvec,
                          obstruction_certificate, real_in_lattice,
                          smith_normal_form, solve)
from oracles import integer_invariants


def exact_det(matrix):
    n = len(matrix)
    m = [[Fraction(x) for x in row] for row in matrix]
    det = Fraction(1)
    for c in range(n):
        pivot = next((r for r in range(c, n) if m[r][c]), None)
        if pivot is None:
            return 0
        if pivot != c:
            m[c], m[pivot] = m[pivot], m[c]
            det = -det
        det *= m[c][c]
        inv = 1 / m[c][c]
        for r in range(c + 1, n):
            factor = m[r][c] * inv
            if factor:
                m[r] = [a - factor * b for a, b in zip(m[r], m[c])]
    return det


def matmul(a, b):
    return [[sum(x * y for x, y in zip(row, col)) for col in zip(*b)]
            for row in a]


def check_form(matrix, ncols=None):
    snf = smith_normal_form(matrix, ncols=ncols)
    if matrix:
        d = matmul(matmul(snf.s, [list(r) for r in matrix]), snf.t)
        for i, row in enumerate(d):
            for j, v in enumerate(row):
                expected = snf.diag[i] if i == j and i < snf.rank else 0
                assert v == expected
        assert abs(exact_det(snf.s)) == 1
        assert abs(exact_det(snf.t)) == 1
        prod = matmul(snf.s, snf.s_inv)
        assert all(prod[i][j] == (1 if i == j else 0)
                   for i in range(len(prod)) for j in range(len(prod)))
    for i in range(snf.rank - 1):
        assert snf.diag[i + 1] % snf.diag[i] == 0
        assert snf.diag[i] > 0
    return snf


CASES = [
    [[2, 4, 4], [-6, 6, 12], [10, 4, 16]],
    [[1, 0], [0, 1]],
    [[0, 0], [0, 0]],
    [[6]],
    [[2, 0], [0, 3]],
    [[4, 0], [0, 6]],
    [[1, 2, 3]],
    [[1], [2], [3]],
    [[3, 1, -4], [2, -3, 1]],
]


@pytest.mark.parametrize("matrix", CASES)
def test_fixed_cases_match_sympy(matrix):
    snf = check_form(matrix)
    rank, torsion = integer_invariants(np.array(matrix))
    assert snf.rank == rank
    assert [d for d in snf.diag if d > 1] == torsion


@given(st.lists(st.lists(st.integers(-9, 9), min_size=4, max_size=4),
                min_size=3, max_size=5))
@settings(max_examples=60, deadline=None)
def test_random_matrices_match_sympy(matrix):
    snf = check_form(matrix)
    rank, torsion = integer_invariants(np.array(matrix))
    assert snf.rank == rank
    assert [d for d in snf.diag if d > 1] == torsion


@given(st.lists(st.lists(st.integers(-6, 6), min_size=3, max_size=3),
                min_size=4, max_size=4),
       st.lists(st.integers(-4, 4), min_size=3, max_size=3))
@settings(max_examples=60, deadline=None)
def test_solve_roundtrip(matrix, x):
    b = matvec(matrix, x)
    snf = smith_normal_form(matrix)
    got = solve(snf, b)
    assert got is not None
    assert matvec(matrix, got) == b
    assert obstruction_certificate(snf, b) is None


def test_unsolvable_has_valid_certificate():
    matrix = [[2, 0], [0, 2]]
    snf = smith_normal_form(matrix)
    assert solve(snf, [1, 0]) is None
    fun, mod, val = obstruction_certificate(snf, [1, 0])
    assert mod == 2 and val % 2 == 1
    # the functional kills the image mod 2
    for col in ([2, 0], [0, 2]):
        assert sum(f * c for f, c in zip(fun, col)) % mod == 0


def test_kernel_basis_spans_kernel():
    matrix = [[1, 1, 1], [1, 1, 1]]
    snf = smith_normal_form(matrix)
    basis = kernel_basis(snf)
    assert len(basis) == 2
    for vec in basis:
        assert matvec(matrix, vec) == [0, 0]


def test_empty_matrix_kernel_is_everything():
    snf = smith_normal_form([], ncols=3)
    assert len(kernel_basis(snf)) == 3


def test_lattice_basis_and_membership():
    gens = [[2, 0], [0, 3], [2, 3]]
    basis = lattice_basis(gens, 2)
    assert len(basis) == 2
    assert real_in_lattice(basis, [2.0, 3.0]) is not None
    assert real_in_lattice(basis, [4.0, -3.0]) is not None
    assert real_in_lattice(basis, [1.0, 0.0]) is None
    assert real_in_lattice(basis, [2.0, 1.5]) is None
