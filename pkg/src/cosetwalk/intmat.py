"""Exact integer matrix helpers.

Matrices are tuples of row tuples of Python ints, so they hash, compare and
never overflow.
"""
from fractions import Fraction
from functools import reduce
from math import gcd

Matrix = tuple  # tuple[tuple[int, ...], ...]


def identity(n):
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def elementary(n, i, j, r=1):
    """I + r E_ij (0-based indices)."""
    rows = [list(row) for row in identity(n)]
    rows[i][j] += r
    return tuple(map(tuple, rows))


def as_matrix(rows):
    return tuple(tuple(int(x) for x in row) for row in rows)


def matmul(a, b):
    bt = tuple(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def matvec(a, v):
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def transpose(a):
    return tuple(zip(*a))


def sub_identity(a):
    return tuple(tuple(x - (1 if i == j else 0) for j, x in enumerate(row))
                 for i, row in enumerate(a))


def is_identity(a):
    return all(x == (1 if i == j else 0) for i, row in enumerate(a) for j, x in enumerate(row))


def is_zero(a):
    return all(x == 0 for row in a for x in row)


def mat_power(a, k):
    n = len(a)
    if k < 0:
        a = inverse(a)
        k = -k
    result = identity(n)
    base = a
    while k:
        if k & 1:
            result = matmul(result, base)
        base = matmul(base, base)
        k >>= 1
    return result


def det(a):
    """Bareiss fraction-free determinant."""
    n = len(a)
    m = [list(row) for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def inverse(a):
    """Inverse of a unimodular integer matrix (det = +-1)."""
    n = len(a)
    d = det(a)
    if d not in (1, -1):
        raise ValueError(f"matrix is not unimodular (det={d})")
    if n == 2:
        (p, q), (r, s) = a
        return ((s * d, -q * d), (-r * d, p * d))
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(a)]
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        pv = aug[col][col]
        aug[col] = [x / pv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    out = []
    for row in aug:
        vals = row[n:]
        assert all(v.denominator == 1 for v in vals)
        out.append(tuple(int(v) for v in vals))
    return tuple(out)


def charpoly(a):
    """Coefficients [1, c1, ..., cn] of det(X I - a), via Faddeev-LeVerrier."""
    n = len(a)
    coeffs = [Fraction(1)]
    m = [[Fraction(0)] * n for _ in range(n)]
    af = [[Fraction(x) for x in row] for row in a]
    for k in range(1, n + 1):
        # M_k = A M_{k-1} + c_{k-1} I
        prod = [[sum(af[i][t] * m[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
        for i in range(n):
            prod[i][i] += coeffs[-1]
        m = prod
        am = [[sum(af[i][t] * m[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
        coeffs.append(-sum(am[i][i] for i in range(n)) / k)
    assert all(c.denominator == 1 for c in coeffs)
    return [int(c) for c in coeffs]


def poly_mul(p, q):
    out = [0] * (len(p) + len(q) - 1)
    for i, x in enumerate(p):
        for j, y in enumerate(q):
            out[i + j] += x * y
    return out


def xgcd(a, b):
    """Return (g, x, y) with a x + b y = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def vec_gcd(v):
    return reduce(gcd, (abs(x) for x in v), 0)


def primitive_part(v):
    g = vec_gcd(v)
    if g == 0:
        return tuple(v)
    return tuple(x // g for x in v)


def rational_nullspace(rows, ncols):
    """Basis of {x in Q^ncols : rows x = 0}, as Fraction vectors."""
    m = [[Fraction(x) for x in row] for row in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        pv = m[r][c]
        m[r] = [x / pv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * ncols
        vec[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            vec[pc] = -m[i][fc]
        basis.append(vec)
    return basis


def integer_vector(frac_vec):
    """Scale a rational vector to a primitive integer vector."""
    den = reduce(lambda a, b: a * b // gcd(a, b), (x.denominator for x in frac_vec), 1)
    return primitive_part([int(x * den) for x in frac_vec])


def rational_rank(vectors):
    m = [[Fraction(x) for x in v] for v in vectors]
    rank = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(rank + 1, len(m)):
            if m[i][c] != 0:
                f = m[i][c] / m[rank][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[rank])]
        rank += 1
    return rank
