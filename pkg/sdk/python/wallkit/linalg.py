"""Exact integer/rational matrix kernel shared by the lattice and discriminant code.

Everything here is arbitrary precision: integer matrices travel as tuples of
int tuples, products go through numpy object arrays, and normal forms,
determinants and inverses are delegated to sympy.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd

import numpy as np
from sympy import ZZ, Matrix
from sympy.matrices.normalforms import smith_normal_decomp

logger = logging.getLogger(__name__)

IntMatrix = tuple[tuple[int, ...], ...]


def to_int_rows(rows) -> IntMatrix:
    return tuple(tuple(int(e) for e in row) for row in rows)


def as_array(rows) -> np.ndarray:
    return np.array([list(row) for row in rows], dtype=object)


def as_vector(coords) -> np.ndarray:
    return np.array(list(coords), dtype=object)


def to_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    # sympy Integer / Rational
    return Fraction(int(value.p), int(value.q))


def content(coords) -> int:
    """gcd of the entries; 0 for the zero vector."""
    return reduce(gcd, (int(c) for c in coords), 0)


def matmul(a, b) -> IntMatrix:
    return to_int_rows((as_array(a) @ as_array(b)).tolist())


def identity_rows(n: int) -> IntMatrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def determinant(rows) -> int:
    if not rows:
        return 1
    return int(Matrix(rows).det(method="bareiss"))


def inverse(rows) -> tuple[tuple[Fraction, ...], ...]:
    inv = Matrix(rows).inv()
    return tuple(tuple(to_fraction(inv[i, j]) for j in range(inv.cols)) for i in range(inv.rows))


def is_integral(coords) -> bool:
    return all(Fraction(c).denominator == 1 for c in coords)


@dataclass(frozen=True)
class SmithForm:
    """left · A · right = diag(diagonal), with left and right unimodular."""

    diagonal: tuple[int, ...]
    left: IntMatrix
    right: IntMatrix

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)


def smith_form(rows) -> SmithForm:
    smf, s, t = smith_normal_decomp(Matrix(rows), domain=ZZ)
    left = [[int(e) for e in s.row(i)] for i in range(s.rows)]
    diagonal = []
    for i in range(min(smf.rows, smf.cols)):
        d = int(smf[i, i])
        if d < 0:
            left[i] = [-e for e in left[i]]
            d = -d
        diagonal.append(d)
    return SmithForm(tuple(diagonal), to_int_rows(left), to_int_rows(t.tolist()))


def integer_kernel(rows, ncols: int) -> list[tuple[int, ...]]:
    """Basis of {x in Z^n : A x = 0}; the result is always saturated."""
    if not rows:
        return [tuple(int(i == j) for j in range(ncols)) for i in range(ncols)]
    snf = smith_form(rows)
    right = snf.right
    return [tuple(right[i][j] for i in range(ncols)) for j in range(snf.rank, ncols)]


def row_saturation(rows) -> tuple[list[tuple[int, ...]], int]:
    """Basis of (Q-row-span ∩ Z^n) and the index of the given rows inside it.

    Dependent rows give ([], 0); callers decide how to fail.
    """
    snf = smith_form(rows)
    if snf.rank < len(rows):
        return [], 0
    index = 1
    for d in snf.diagonal:
        index *= d
    right_inv = Matrix(snf.right).inv()
    return [tuple(int(e) for e in right_inv.row(i)) for i in range(snf.rank)], index


def solve_combination(basis, target) -> tuple[Fraction, ...] | None:
    """Rational c with sum c_i basis_i = target, or None when target is outside the span."""
    a = Matrix(basis).T
    try:
        solution, params = a.gauss_jordan_solve(Matrix(list(target)))
    except ValueError:
        return None
    if params.shape[0]:
        return None
    return tuple(to_fraction(solution[i, 0]) for i in range(solution.rows))


def diagonalize(gram) -> tuple[list[tuple[Fraction, ...]], list[Fraction]]:
    """Congruence diagonalisation over Q: returns (basis, diag) with basis_i·G·basis_j = δ_ij diag_i.

    Pivots are searched on the diagonal first; a zero-diagonal block with a
    nonzero off-diagonal entry is completed by b_i += b_j before pivoting.
    Trailing zeros in diag mean the form is degenerate.
    """
    n = len(gram)
    a = [[Fraction(e) for e in row] for row in gram]
    p = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]

    def add(i: int, j: int, c: Fraction) -> None:
        # b_i <- b_i + c b_j, as a congruence on a and a column update on p
        for r in range(n):
            a[r][i] += c * a[r][j]
        for s in range(n):
            a[i][s] += c * a[j][s]
        for r in range(n):
            p[r][i] += c * p[r][j]

    def swap(i: int, j: int) -> None:
        if i == j:
            return
        a[i], a[j] = a[j], a[i]
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in p:
            row[i], row[j] = row[j], row[i]

    for k in range(n):
        pivot = next((i for i in range(k, n) if a[i][i] != 0), None)
        if pivot is None:
            pair = next(((i, j) for i in range(k, n) for j in range(i + 1, n) if a[i][j] != 0), None)
            if pair is None:
                break
            add(pair[0], pair[1], Fraction(1))
            pivot = pair[0]
        swap(k, pivot)
        for j in range(k + 1, n):
            if a[k][j] != 0:
                add(j, k, -a[k][j] / a[k][k])

    basis = [tuple(p[r][j] for r in range(n)) for j in range(n)]
    return basis, [a[j][j] for j in range(n)]


def bilinear(gram_array: np.ndarray, a, b):
    """aᵀ G b for coordinate sequences; exact for int and Fraction entries."""
    result = as_vector(a) @ gram_array @ as_vector(b)
    return result.item() if isinstance(result, (np.ndarray, np.generic)) else result
