"""Exact linear algebra on lists of Fractions

Matrices are lists of rows. Nothing here touches floats.
"""

from fractions import Fraction
from math import gcd, lcm


def _as_matrix(rows):
    return [[Fraction(value) for value in row] for row in rows]


def determinant(rows):
    """Exact determinant of a square matrix (Gaussian elimination)"""
    matrix = _as_matrix(rows)
    size = len(matrix)
    if any(len(row) != size for row in matrix):
        raise ValueError("Determinant needs a square matrix")
    sign = 1
    for col in range(size):
        pivot = next((r for r in range(col, size) if matrix[r][col]), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            matrix[col], matrix[pivot] = matrix[pivot], matrix[col]
            sign = -sign
        for row in range(col + 1, size):
            factor = matrix[row][col] / matrix[col][col]
            if factor:
                for idx in range(col, size):
                    matrix[row][idx] -= factor * matrix[col][idx]
    result = Fraction(sign)
    for idx in range(size):
        result *= matrix[idx][idx]
    return result


def rref(rows):
    """Reduced row echelon form.

    Returns:
        (matrix, pivot_columns)
    """
    matrix = _as_matrix(rows)
    if not matrix:
        return [], []
    num_cols = len(matrix[0])
    pivots = []
    row = 0
    for col in range(num_cols):
        pivot = next((r for r in range(row, len(matrix)) if matrix[r][col]), None)
        if pivot is None:
            continue
        matrix[row], matrix[pivot] = matrix[pivot], matrix[row]
        lead = matrix[row][col]
        matrix[row] = [value / lead for value in matrix[row]]
        for other in range(len(matrix)):
            if other != row and matrix[other][col]:
                factor = matrix[other][col]
                matrix[other] = [
                    value - factor * base
                    for value, base in zip(matrix[other], matrix[row])
                ]
        pivots.append(col)
        row += 1
        if row == len(matrix):
            break
    return matrix, pivots


def rank(rows):
    return len(rref(rows)[1])


def nullspace(rows, num_cols=None):
    """Basis of {x : rows @ x = 0}, one vector per free column.

    Vectors are scaled to integers with coprime entries.
    """
    if not rows:
        if num_cols is None:
            raise ValueError("Empty matrix needs num_cols")
        return [
            [Fraction(int(i == j)) for j in range(num_cols)] for i in range(num_cols)
        ]
    matrix, pivots = rref(rows)
    num_cols = len(matrix[0])
    free = [col for col in range(num_cols) if col not in pivots]
    basis = []
    for free_col in free:
        vector = [Fraction(0)] * num_cols
        vector[free_col] = Fraction(1)
        for row_idx, pivot_col in enumerate(pivots):
            vector[pivot_col] = -matrix[row_idx][free_col]
        basis.append(integer_scaled(vector))
    return basis


def integer_scaled(vector):
    """Positive multiple of a rational vector with coprime integer entries"""
    vector = [Fraction(v) for v in vector]
    denominator = lcm(*(v.denominator for v in vector)) if vector else 1
    ints = [int(v * denominator) for v in vector]
    content = 0
    for value in ints:
        content = gcd(content, abs(value))
    if content == 0:
        return [Fraction(0)] * len(ints)
    return [Fraction(value // content) for value in ints]


def dot(left, right):
    return sum((a * b for a, b in zip(left, right)), Fraction(0))


def solve_min_norm(rows, rhs):
    """A solution x of rows @ x = rhs for rows of full row rank.

    Uses x = rows^T y with (rows rows^T) y = rhs.

    Raises:
        ValueError: rows are linearly dependent
    """
    matrix = _as_matrix(rows)
    gram = [[dot(a, b) for b in matrix] for a in matrix]
    augmented = [row + [Fraction(value)] for row, value in zip(gram, rhs)]
    reduced, pivots = rref(augmented)
    if len(pivots) < len(matrix) or (pivots and pivots[-1] == len(matrix)):
        raise ValueError("Rows are linearly dependent")
    weights = [reduced[idx][-1] for idx in range(len(matrix))]
    num_cols = len(matrix[0]) if matrix else 0
    return [
        sum((weights[r] * matrix[r][c] for r in range(len(matrix))), Fraction(0))
        for c in range(num_cols)
    ]


def project_out(vector, rows):
    """Orthogonal projection of vector onto the complement of span(rows).

    Rational Gram-Schmidt; dependent rows are skipped. The result is
    orthogonal to every row.
    """
    basis = []
    for row in _as_matrix(rows):
        reduced = list(row)
        for base, norm in basis:
            factor = dot(reduced, base) / norm
            if factor:
                reduced = [a - factor * b for a, b in zip(reduced, base)]
        norm = dot(reduced, reduced)
        if norm:
            basis.append((reduced, norm))
    result = [Fraction(v) for v in vector]
    for base, norm in basis:
        factor = dot(result, base) / norm
        if factor:
            result = [a - factor * b for a, b in zip(result, base)]
    return result
