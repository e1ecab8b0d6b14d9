import random
from itertools import combinations
from math import gcd

import pytest

from sqzlift.exactlin import (
    AbGroup,
    IntMatrix,
    Subquotient,
    kernel_int,
    kernel_mod,
    lattice_contains,
    smith_normal_form,
    solve_int,
    solve_mod,
    solve_with_orders,
    kernel_with_orders,
)


def minor_gcds(A: IntMatrix) -> list[int]:
    """d_1*...*d_k = gcd of all k x k minors; the independent SNF oracle."""
    m, n = A.rows, A.cols
    out = []
    for k in range(1, min(m, n) + 1):
        g = 0
        for rows in combinations(range(m), k):
            for cols in combinations(range(n), k):
                g = gcd(g, _det([[A[i, j] for j in cols] for i in rows]))
        out.append(abs(g))
    return out


def _det(mat):
    n = len(mat)
    if n == 1:
        return mat[0][0]
    total = 0
    for j in range(n):
        sub = [row[:j] + row[j + 1:] for row in mat[1:]]
        total += (-1) ** j * mat[0][j] * _det(sub)
    return total


def factors_from_minors(A: IntMatrix) -> list[int]:
    gs = minor_gcds(A)
    factors = []
    prev = 1
    for g in gs:
        if g == 0:
            break
        factors.append(g // prev)
        prev = g
    return factors


def test_snf_identity():
    sf = smith_normal_form(IntMatrix.identity(2))
    assert sf.D == IntMatrix.identity(2)
    assert sf.U == IntMatrix.identity(2)
    assert sf.V == IntMatrix.identity(2)


def test_snf_two_by_two():
    # gcd of entries is 2, |det| = 8, so the invariant factors are (2, 4)
    sf = smith_normal_form([[2, 4], [6, 8]])
    assert sf.invariant_factors == (2, 4)


def test_snf_zero_matrix():
    sf = smith_normal_form([[0]])
    assert sf.D == IntMatrix([[0]])
    assert sf.invariant_factors == ()


def test_snf_empty_shapes():
    for shape in [(0, 3), (3, 0), (0, 0)]:
        A = IntMatrix.zeros(*shape)
        sf = smith_normal_form(A)
        assert sf.D == A


def test_snf_recomposition_and_minor_oracle_fuzz():
    rng = random.Random(20240817)
    for trial in range(500):
        m = rng.randint(1, 5)
        n = rng.randint(1, 5)
        A = IntMatrix([[rng.randint(-20, 20) for _ in range(n)] for _ in range(m)])
        sf = smith_normal_form(A)
        assert sf.U * A * sf.V == sf.D
        # recomposing with the exact unimodular inverses recovers A
        assert sf.U_inv * sf.D * sf.V_inv == A
        diag = [sf.D[i, i] for i in range(min(m, n))]
        nz = [d for d in diag if d]
        assert all(d >= 0 for d in diag)
        assert all(nz[i + 1] % nz[i] == 0 for i in range(len(nz) - 1))
        # nonzero diagonal entries must be an initial segment
        seen_zero = False
        for d in diag:
            if d == 0:
                seen_zero = True
            else:
                assert not seen_zero
        assert list(sf.invariant_factors) == factors_from_minors(A)


def test_solve_mod_examples():
    assert solve_mod([[2]], [1], 4) is None          # 2x = 1 mod 4: parity
    x = solve_mod([[2]], [2], 4)
    assert x is not None and (2 * x[0]) % 4 == 2
    b = [3, 1, 2]
    assert solve_mod(IntMatrix.identity(3), b, 5) == b


def test_solve_mod_zero_modulus_is_integer_solving():
    assert solve_mod([[2]], [3], 0) is None
    assert solve_mod([[2]], [6], 0) == [3]


def test_solve_int_underdetermined():
    x = solve_int([[2, 3]], [1])
    assert x is not None and 2 * x[0] + 3 * x[1] == 1


def test_kernel_mod_examples():
    gens = kernel_mod([[2]], 4)
    # must generate {0, 2} in Z/4
    assert lattice_contains(gens + [[4]], [2])
    assert not lattice_contains(gens + [[4]], [1])
    assert kernel_mod([[1]], 0) == []

    gens = kernel_mod([[2, 2]], 4)
    sols = {(x, y) for x in range(4) for y in range(4) if (2 * x + 2 * y) % 4 == 0}
    assert len(sols) == 8
    for v in sols:
        assert lattice_contains(gens + [[4, 0], [0, 4]], list(v))
    for x in range(4):
        for y in range(4):
            if (x, y) not in sols:
                assert not lattice_contains(gens + [[4, 0], [0, 4]], [x, y])


def test_solve_roundtrip_fuzz():
    rng = random.Random(99)
    for _ in range(300):
        m = rng.randint(1, 4)
        n = rng.randint(1, 4)
        mod = rng.choice([0, 2, 3, 4, 6, 8, 12])
        A = IntMatrix([[rng.randint(-9, 9) for _ in range(n)] for _ in range(m)])
        x0 = [rng.randint(-5, 5) for _ in range(n)]
        b = A.apply(x0)
        if mod:
            b = [v % mod for v in b]
        x = solve_mod(A, b, mod)
        assert x is not None
        ax = A.apply(x)
        if mod:
            assert all((u - v) % mod == 0 for u, v in zip(ax, b))
        else:
            assert ax == b


def test_solve_mod_absence_is_certified():
    # whenever None is returned, exhaustive search agrees (tiny instances)
    rng = random.Random(7)
    for _ in range(100):
        mod = rng.choice([2, 3, 4, 6])
        m, n = rng.randint(1, 2), rng.randint(1, 2)
        A = IntMatrix([[rng.randint(0, mod - 1) for _ in range(n)] for _ in range(m)])
        b = [rng.randint(0, mod - 1) for _ in range(m)]
        got = solve_mod(A, b, mod)
        brute = None
        from itertools import product
        for cand in product(range(mod), repeat=n):
            if all((v - w) % mod == 0 for v, w in zip(A.apply(list(cand)), b)):
                brute = list(cand)
                break
        assert (got is None) == (brute is None)


def test_kernel_int_basis():
    gens = kernel_int([[1, 2, 3]])
    assert len(gens) == 2
    for g in gens:
        assert g[0] + 2 * g[1] + 3 * g[2] == 0


def test_solve_with_orders_mixed():
    # x = 1 mod 2 and 3x = 3 mod 9 simultaneously
    sol = solve_with_orders([[1], [3]], [1, 3], [2, 9])
    assert sol is not None
    assert sol[0] % 2 == 1 and (3 * sol[0] - 3) % 9 == 0


def test_kernel_with_orders_covers_all_solutions():
    gens = kernel_with_orders([[2, 2]], [4], col_orders=[4, 4])
    for x in range(4):
        for y in range(4):
            inside = lattice_contains(gens, [x, y])
            assert inside == ((2 * x + 2 * y) % 4 == 0)


def test_abgroup_validation():
    AbGroup((2, 4), 1)
    with pytest.raises(ValueError):
        AbGroup((4, 2))
    with pytest.raises(ValueError):
        AbGroup((1,))
    assert AbGroup((2, 2)).order() == 4
    assert AbGroup((), 2).order() is None
    assert str(AbGroup((2,), 1)) == "Z/2 + Z"


def test_subquotient_z_mod_two():
    # Z / 2Z
    q = Subquotient([0], [[1]], [[2]])
    assert q.group == AbGroup((2,))
    assert q.classify([1]) == (1,)
    assert q.classify([2]) == (0,)
    assert q.classify([5]) == (1,)


def test_subquotient_homology_style():
    # kernel of (x+y mod 2) inside (Z/2)^2 modulo the image of the diagonal
    q = Subquotient([2, 2], [[1, 1]], [[1, 1]])
    assert q.group.is_trivial()
    q2 = Subquotient([2, 2], [[1, 0], [0, 1]], [[1, 1]])
    assert q2.group == AbGroup((2,))
    assert q2.classify([1, 0]) == q2.classify([0, 1])
    assert q2.classify([1, 1]) == (0,)


def test_subquotient_free_part():
    # Z^2 / span{(2,0)} = Z/2 + Z
    q = Subquotient([0, 0], [[1, 0], [0, 1]], [[2, 0]])
    assert q.group == AbGroup((2,), 1)


def test_subquotient_lift_classify_roundtrip():
    q = Subquotient([4, 4], [[1, 0], [0, 2]], [[2, 0]])
    for cls in q.enumerate_classes():
        assert q.classify(list(q.lift(cls))) == cls


def test_subquotient_rejects_bad_denominator():
    with pytest.raises(ValueError):
        Subquotient([0], [[2]], [[1]])


def test_subquotient_classify_is_additive():
    rng = random.Random(3)
    q = Subquotient([8, 4, 2], [[2, 1, 0], [0, 2, 1], [4, 0, 0]], [[4, 2, 0]])
    for _ in range(50):
        a = [rng.randint(0, 7), rng.randint(0, 3), rng.randint(0, 1)]
        b = [rng.randint(0, 7), rng.randint(0, 3), rng.randint(0, 1)]
        if not (q.contains(a) and q.contains(b)):
            continue
        s = [(x + y) for x, y in zip(a, b)]
        ca, cb, cs = q.classify(a), q.classify(b), q.classify(s)
        expect = tuple((x + y) % o if o else x + y
                       for x, y, o in zip(ca, cb, q.rep_orders))
        assert cs == expect
