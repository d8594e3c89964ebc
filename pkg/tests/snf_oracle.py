"""Reference Smith normal form by explicit elementary row and column operations.

Every operation is applied to an identity matrix alongside, so the
result comes with unimodular ``U``, ``V`` and ``U A V = D`` can be
checked directly.
"""

from fractions import Fraction


def identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a, b):
    if not a or not b:
        return [[0] * (len(b[0]) if b else 0) for _ in a]
    return [[sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))]
            for i in range(len(a))]


def det(m):
    # exact Gaussian elimination over the rationals
    n = len(m)
    a = [[Fraction(x) for x in row] for row in m]
    sign, out = 1, Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c]), None)
        if piv is None:
            return 0
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            sign = -sign
        out *= a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            for k in range(c, n):
                a[r][k] -= f * a[c][k]
    return int(sign * out)


def elementary_snf(mat):
    """Return (D, U, V) with U * mat * V = D diagonal, each entry dividing the next."""
    a = [list(map(int, row)) for row in mat]
    m = len(a)
    n = len(a[0]) if m else 0
    u, v = identity(m), identity(n)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for mat_ in (a, v):
            for row in mat_:
                row[i], row[j] = row[j], row[i]

    def add_row(src, dst, k):   # row dst += k * row src
        a[dst] = [x + k * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + k * y for x, y in zip(u[dst], u[src])]

    def add_col(src, dst, k):   # col dst += k * col src
        for mat_ in (a, v):
            for row in mat_:
                row[dst] += k * row[src]

    for t in range(min(m, n)):
        while True:
            nz = [(abs(a[i][j]), i, j) for i in range(t, m) for j in range(t, n) if a[i][j]]
            if not nz:
                return a, u, v
            _, i, j = min(nz)
            swap_rows(t, i)
            swap_cols(t, j)
            p = a[t][t]
            clean = True
            for i in range(t + 1, m):
                q = a[i][t] // p
                add_row(t, i, -q)
                clean &= a[i][t] == 0
            for j in range(t + 1, n):
                q = a[t][j] // p
                add_col(t, j, -q)
                clean &= a[t][j] == 0
            if not clean:
                continue
            bad = [(i, j) for i in range(t + 1, m) for j in range(t + 1, n) if a[i][j] % p]
            if bad:
                add_row(bad[0][0], t, 1)
                continue
            if p < 0:
                a[t] = [-x for x in a[t]]
                u[t] = [-x for x in u[t]]
            break
    return a, u, v


def diagonal(d):
    out = []
    for k in range(min(len(d), len(d[0]) if d else 0)):
        if d[k][k]:
            out.append(d[k][k])
    return out
