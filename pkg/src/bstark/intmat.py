"""Exact linear algebra over Z and Q: HNF, SNF with transforms, solving.

Matrices are lists of lists of Python ints (or Fractions for the rational
solvers).  Sizes throughout the package are tiny (dimension <= a few dozen),
so clarity beats asymptotics.
"""

from fractions import Fraction


def identity_matrix(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(a, b):
    n, k, m = len(a), len(b), len(b[0]) if b else 0
    return [[sum(a[i][t] * b[t][j] for t in range(k)) for j in range(m)] for i in range(n)]


def hnf(rows):
    """Row Hermite normal form of an integer matrix.

    Returns a new matrix in row-echelon form with positive pivots and the
    entries above each pivot reduced modulo it.  Zero rows are dropped.
    """
    h = [list(r) for r in rows]
    nrows = len(h)
    ncols = len(h[0]) if nrows else 0
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        # clear column c below row r using extended Euclid on pairs
        pivot_row = None
        for i in range(r, nrows):
            if h[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        h[r], h[pivot_row] = h[pivot_row], h[r]
        for i in range(r + 1, nrows):
            while h[i][c] != 0:
                q = h[r][c] // h[i][c]
                h[r] = [x - q * y for x, y in zip(h[r], h[i])]
                h[r], h[i] = h[i], h[r]
        if h[r][c] < 0:
            h[r] = [-x for x in h[r]]
        for i in range(r):
            q = h[i][c] // h[r][c]
            if q:
                h[i] = [x - q * y for x, y in zip(h[i], h[r])]
        r += 1
    return [row for row in h[:r] if any(row)]


def hnf_solve(h, x):
    """Express vector x over the HNF basis h; return integer coefficients or None."""
    x = list(x)
    coeffs = []
    rows = list(h)
    for row in rows:
        c = next((j for j, v in enumerate(row) if v != 0), None)
        if c is None:
            coeffs.append(0)
            continue
        if x[c] % row[c] != 0:
            return None
        q = x[c] // row[c]
        x = [a - q * b for a, b in zip(x, row)]
        coeffs.append(q)
    if any(x):
        return None
    return coeffs


def in_lattice(h, x):
    """Membership of integer vector x in the row lattice with HNF basis h."""
    return hnf_solve(h, x) is not None


def smith_normal_form(a):
    """Smith normal form with transforms: returns (d, u, v) with u*a*v = d.

    d is diagonal with d[i] | d[i+1]; u, v are unimodular.
    """
    m = [list(r) for r in a]
    nr = len(m)
    nc = len(m[0]) if nr else 0
    u = identity_matrix(nr)
    v = identity_matrix(nc)

    def row_op(i, j, q):  # row_i -= q*row_j
        m[i] = [x - q * y for x, y in zip(m[i], m[j])]
        u[i] = [x - q * y for x, y in zip(u[i], u[j])]

    def col_op(i, j, q):  # col_i -= q*col_j
        for row in m:
            row[i] -= q * row[j]
        for row in v:
            row[i] -= q * row[j]

    def swap_rows(i, j):
        m[i], m[j] = m[j], m[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in m:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    t = 0
    while t < min(nr, nc):
        # find a nonzero pivot
        piv = None
        for i in range(t, nr):
            for j in range(t, nc):
                if m[i][j] != 0:
                    piv = (i, j)
                    break
            if piv:
                break
        if piv is None:
            break
        swap_rows(t, piv[0])
        swap_cols(t, piv[1])
        done = False
        while not done:
            done = True
            for i in range(t + 1, nr):
                if m[i][t] != 0:
                    q = m[i][t] // m[t][t]
                    row_op(i, t, q)
                    if m[i][t] != 0:
                        swap_rows(t, i)
                    done = False
            for j in range(t + 1, nc):
                if m[t][j] != 0:
                    q = m[t][j] // m[t][t]
                    col_op(j, t, q)
                    if m[t][j] != 0:
                        swap_cols(t, j)
                    done = False
        if m[t][t] < 0:
            m[t] = [-x for x in m[t]]
            u[t] = [-x for x in u[t]]
        t += 1

    # enforce the divisibility chain d[i] | d[i+1]
    rank = t
    changed = True
    while changed:
        changed = False
        for i in range(rank - 1):
            a_, b_ = m[i][i], m[i + 1][i + 1]
            if a_ and b_ % a_ != 0:
                # fold entry b_ into row i and re-reduce the 2x2 block
                row_op(i, i + 1, -1)  # row_i += row_{i+1}: puts b_ at (i, i+1)
                while m[i + 1][i] != 0 or m[i][i + 1] != 0:
                    if m[i + 1][i] != 0:
                        q = m[i + 1][i] // m[i][i]
                        row_op(i + 1, i, q)
                        if m[i + 1][i] != 0:
                            swap_rows(i, i + 1)
                    if m[i][i + 1] != 0:
                        q = m[i][i + 1] // m[i][i]
                        col_op(i + 1, i, q)
                        if m[i][i + 1] != 0:
                            swap_cols(i, i + 1)
                if m[i][i] < 0:
                    m[i] = [-x for x in m[i]]
                    u[i] = [-x for x in u[i]]
                if m[i + 1][i + 1] < 0:
                    m[i + 1] = [-x for x in m[i + 1]]
                    u[i + 1] = [-x for x in u[i + 1]]
                changed = True
    return m, u, v


def integer_solve(a, t):
    """One integer solution x of a*x = t (a: m x n over Z), or None."""
    m = len(a)
    n = len(a[0]) if m else 0
    d, u, v = smith_normal_form(a)
    ut = [sum(u[i][j] * t[j] for j in range(m)) for i in range(m)]
    y = [0] * n
    for i in range(m):
        di = d[i][i] if i < n and i < len(d) else 0
        if di:
            if ut[i] % di != 0:
                return None
            y[i] = ut[i] // di
        elif ut[i] != 0:
            return None
    return [sum(v[i][j] * y[j] for j in range(n)) for i in range(n)]


def solve_rational(a, b):
    """Solve a*x = b exactly over Q; a square nonsingular. Returns Fractions."""
    n = len(a)
    aug = [[Fraction(x) for x in row] + [Fraction(b[i])] for i, row in enumerate(a)]
    for c in range(n):
        piv = next((r for r in range(c, n) if aug[r][c] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        aug[c], aug[piv] = aug[piv], aug[c]
        inv = 1 / aug[c][c]
        aug[c] = [x * inv for x in aug[c]]
        for r in range(n):
            if r != c and aug[r][c]:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    return [aug[i][n] for i in range(n)]


def det_rational(a):
    """Exact determinant of a square matrix of Fractions/ints."""
    n = len(a)
    m = [[Fraction(x) for x in row] for row in a]
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        inv = 1 / m[c][c]
        for r in range(c + 1, n):
            if m[r][c]:
                f = m[r][c] * inv
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return det
