"""Exact linear algebra over the rationals.

A matrix is a list of rows of ``Fraction``; a linear map with matrix ``A``
sends the column vector v to ``A @ v``, so ``A`` has shape
(target_dim, source_dim).  Everything is done with fraction-free sizes in
mind: dimensions stay single digit, so plain Gaussian elimination is fine.
"""

from fractions import Fraction

from .errors import DimensionMismatch


def frac(x):
    return x if isinstance(x, Fraction) else Fraction(x)


def matrix(rows):
    """Deep-copy ``rows`` into a list of Fraction rows."""
    return [[frac(x) for x in row] for row in rows]


def zeros(r, c):
    return [[Fraction(0)] * c for _ in range(r)]


def identity(n):
    return [[Fraction(1) if i == j else Fraction(0) for j in range(n)]
            for i in range(n)]


def shape(m):
    return (len(m), len(m[0]) if m else 0)


def mat_eq(a, b):
    return shape(a) == shape(b) and all(
        a[i][j] == b[i][j] for i in range(len(a)) for j in range(len(a[0])))


def mat_mul(a, b):
    ra, ca = shape(a)
    rb, cb = shape(b)
    if ra == 0:
        # empty matrices drop their column count; the product stays empty
        return []
    if ca != rb:
        if ca == 0 and rb == 0:
            return zeros(ra, cb)
        raise DimensionMismatch(
            "cannot multiply %dx%d by %dx%d" % (ra, ca, rb, cb))
    out = zeros(ra, cb)
    for i in range(ra):
        row = a[i]
        for k in range(ca):
            x = row[k]
            if x:
                bk = b[k]
                oi = out[i]
                for j in range(cb):
                    oi[j] += x * bk[j]
    return out

def mat_vec(a, v):
    if not a:
        # a 0-row matrix maps everything to the empty vector
        return []
    r, c = shape(a)
    if c != len(v):
        raise DimensionMismatch("matrix is %dx%d, vector has %d" % (r, c, len(v)))
    return [sum((a[i][j] * v[j] for j in range(c)), Fraction(0)) for i in range(r)]


def mat_sub(a, b):
    if shape(a) != shape(b):
        raise DimensionMismatch("shape mismatch in subtraction")
    return [[a[i][j] - b[i][j] for j in range(len(a[0]))] for i in range(len(a))]


def is_zero_matrix(m):
    return all(x == 0 for row in m for x in row)


def hstack(a, b):
    if len(a) != len(b):
        raise DimensionMismatch("hstack needs equal row counts")
    return [ra + rb for ra, rb in zip(a, b)]


def vstack(a, b):
    if a and b and len(a[0]) != len(b[0]):
        raise DimensionMismatch("vstack needs equal column counts")
    return [row[:] for row in a] + [row[:] for row in b]


def rref(m):
    """Reduced row echelon form.  Returns (rows, pivot_columns)."""
    rows = matrix(m)
    if not rows:
        return [], []
    ncols = len(rows[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = None
        for i in range(r, len(rows)):
            if rows[i][c] != 0:
                pivot = i
                break
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = rows[r][c]
        rows[r] = [x / inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def rank(m):
    return len(rref(m)[1])


def row_space(m):
    """Canonical basis of the row space: nonzero rows of the RREF."""
    rows, pivots = rref(m)
    return [row for row in rows[:len(pivots)]]


def nullspace(m):
    """Basis (list of vectors) of {v : m @ v = 0}."""
    r, c = shape(m)
    if c == 0:
        return []
    if r == 0:
        return [row[:] for row in identity(c)]
    rows, pivots = rref(m)
    free = [j for j in range(c) if j not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * c
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -rows[i][f]
        basis.append(v)
    return basis


def solve(a, b):
    """One solution of a @ x = b, or None if the system is inconsistent."""
    r, c = shape(a)
    if len(b) != r:
        raise DimensionMismatch("rhs length %d, matrix has %d rows" % (len(b), r))
    aug = [list(row) + [bv] for row, bv in zip(matrix(a), b)]
    rows, pivots = rref(aug)
    for i in range(len(rows)):
        if all(rows[i][j] == 0 for j in range(c)) and rows[i][c] != 0:
            return None
    x = [Fraction(0)] * c
    for i, p in enumerate(pivots):
        if p == c:
            return None
        x[p] = rows[i][c]
    return x


def is_invertible(m):
    r, c = shape(m)
    return r == c and rank(m) == r


def inverse(m):
    r, c = shape(m)
    if r != c:
        raise DimensionMismatch("only square matrices invert")
    aug = hstack(matrix(m), identity(r))
    rows, pivots = rref(aug)
    if pivots != list(range(r)):
        raise DimensionMismatch("matrix is singular")
    return [row[r:] for row in rows[:r]]


def quotient(total_dim, relations):
    """Quotient of Q^total_dim by the row space of ``relations``.

    Returns (dim, projection) where projection is a (dim x total_dim) matrix
    sending a vector to its coordinates on the free columns after reduction
    by the relation rows.
    """
    if not relations:
        return total_dim, identity(total_dim)
    rows, pivots = rref(relations)
    rows = rows[:len(pivots)]
    free = [j for j in range(total_dim) if j not in pivots]
    proj = zeros(len(free), total_dim)
    for j in range(total_dim):
        v = [Fraction(0)] * total_dim
        v[j] = Fraction(1)
        for i, p in enumerate(pivots):
            if v[p] != 0:
                f = v[p]
                v = [x - f * y for x, y in zip(v, rows[i])]
        for k, fcol in enumerate(free):
            proj[k][j] = v[fcol]
    return len(free), proj


def solution_space(m):
    """Alias for nullspace with the basis returned as a matrix (rows)."""
    return nullspace(m)


def in_row_space(v, basis_rows):
    """Is v in the span of basis_rows?"""
    if not basis_rows:
        return all(x == 0 for x in v)
    return rank(basis_rows) == rank(vstack(basis_rows, [list(v)]))


def coordinates(v, basis_rows):
    """Coordinates of v in the given (independent) row basis, or None."""
    if not basis_rows:
        return [] if all(x == 0 for x in v) else None
    a = [[basis_rows[k][j] for k in range(len(basis_rows))]
         for j in range(len(v))]
    return solve(a, list(v))
