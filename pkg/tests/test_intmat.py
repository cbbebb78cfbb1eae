import random
from fractions import Fraction

from bstark.intmat import (det_rational, hnf, hnf_solve, identity_matrix,
                           in_lattice, integer_solve, mat_mul,
                           smith_normal_form, solve_rational)


def test_hnf_membership_roundtrip():
    rng = random.Random(7)
    for _ in range(50):
        basis = [[rng.randint(-9, 9) for _ in range(3)] for _ in range(3)]
        h = hnf(basis)
        for _ in range(5):
            coeffs = [rng.randint(-4, 4) for _ in range(3)]
            vec = [sum(c * row[j] for c, row in zip(coeffs, basis)) for j in range(3)]
            assert in_lattice(h, vec)


def test_hnf_rejects_outside_vector():
    h = hnf([[2, 0], [0, 2]])
    assert not in_lattice(h, [1, 0])
    assert in_lattice(h, [4, -2])


def test_snf_transforms_and_divisibility():
    rng = random.Random(11)
    for _ in range(40):
        nr, nc = rng.randint(1, 4), rng.randint(1, 4)
        a = [[rng.randint(-8, 8) for _ in range(nc)] for _ in range(nr)]
        d, u, v = smith_normal_form(a)
        assert mat_mul(mat_mul(u, a), v) == d
        diag = [d[i][i] for i in range(min(nr, nc))]
        for x, y in zip(diag, diag[1:]):
            if x and y:
                assert y % x == 0
        # off-diagonal zero
        for i in range(nr):
            for j in range(nc):
                if i != j:
                    assert d[i][j] == 0


def test_integer_solve():
    rng = random.Random(3)
    for _ in range(60):
        m, n = rng.randint(1, 3), rng.randint(1, 4)
        a = [[rng.randint(-5, 5) for _ in range(n)] for _ in range(m)]
        x = [rng.randint(-4, 4) for _ in range(n)]
        t = [sum(a[i][j] * x[j] for j in range(n)) for i in range(m)]
        sol = integer_solve(a, t)
        assert sol is not None
        assert [sum(a[i][j] * sol[j] for j in range(n)) for i in range(m)] == t
    # unsolvable: 2x = 1
    assert integer_solve([[2]], [1]) is None


def test_solve_rational_and_det():
    a = [[2, 1], [1, 3]]
    x = solve_rational(a, [1, 0])
    assert x == [Fraction(3, 5), Fraction(-1, 5)]
    assert det_rational(a) == 5
    assert det_rational([[1, 2], [2, 4]]) == 0
    assert mat_mul(identity_matrix(2), a) == a
