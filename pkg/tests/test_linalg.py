import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from padicmf.errors import NotInSpan
from padicmf.linalg import (
    charpoly,
    coprime_factorisation,
    echelon,
    hensel_root,
    identity,
    inverse,
    matmul,
    poly_at_matrix,
    poly_eval,
    poly_mul,
    rank,
    roots_mod_p,
    solve_in_echelon,
    zeros,
)
from padicmf.overconv import ordinary_projector, unit_root
from padicmf.selfcheck import synthetic_split_matrix

P, PREC = 5, 4
MOD = P**PREC


def matrices(rows, cols):
    return st.lists(st.lists(st.integers(0, MOD - 1), min_size=cols, max_size=cols),
                    min_size=rows, max_size=rows)


@given(matrices(4, 7))
def test_echelon_is_idempotent(A):
    first = echelon(A, P, PREC)
    again = echelon([list(r) for r in first.rows], P, PREC)
    assert again.rows == first.rows
    assert again.pivots == first.pivots


@given(matrices(4, 7))
def test_echelon_pivots_are_powers_of_p_with_zeros_below(A):
    ech = echelon(A, P, PREC)
    for i, (c, v) in enumerate(ech.pivots):
        assert ech.rows[i][c] == P**v
        for j in range(i + 1, ech.rank):
            assert ech.rows[j][c] == 0


@given(matrices(3, 6), st.lists(st.integers(0, MOD - 1), min_size=3, max_size=3))
def test_solve_recovers_combinations_of_its_rows(A, coords):
    ech = echelon(A, P, PREC)
    coords = coords[: ech.rank]
    target = [sum(c * r[j] for c, r in zip(coords, ech.rows)) % MOD for j in range(6)]
    got = solve_in_echelon(target, ech)
    keep = P ** (PREC - ech.precision_loss)
    assert [g % keep for g in got] == [c % keep for c in coords]


def test_solve_rejects_targets_outside_the_span():
    ech = echelon([[1, 0, 0], [0, 1, 0]], P, PREC)
    with pytest.raises(NotInSpan) as err:
        solve_in_echelon([0, 0, 25], ech)
    assert err.value.valuation == 2


def test_worked_echelon_example():
    ech = echelon([[1, 2], [1, 7]], 5, 2)
    assert ech.pivots == ((0, 0), (1, 1))
    assert ech.precision_loss == 1


def test_rank_counts_nonzero_rows():
    assert rank([[5, 0], [0, 0]], 5, 2) == 1
    assert rank(zeros(3, 3), 5, 2) == 0
    assert rank(identity(4), 5, 2) == 4


@given(st.integers(0, 10**6))
def test_inverse_of_unimodular(seed):
    rng = random.Random(seed)
    n = rng.randrange(1, 6)
    A = synthetic_split_matrix(rng, n, n, P, PREC)
    assert matmul(A, inverse(A, P, PREC), MOD) == identity(n)


def test_inverse_of_singular_matrix_raises():
    with pytest.raises(ZeroDivisionError):
        inverse([[1, 1], [1, 1]], P, PREC)


@given(matrices(4, 4))
def test_cayley_hamilton(A):
    f = charpoly(A, MOD)
    assert len(f) == 5 and f[-1] == 1
    assert poly_at_matrix(f, A, MOD) == zeros(4, 4)


def test_charpoly_of_triangular_matrix():
    assert charpoly([[2, 7], [0, 3]], MOD) == [6, MOD - 5, 1]


@given(st.integers(1, 4), st.integers(0, 10**6))
def test_hensel_root_against_brute_scan(prec, seed):
    rng = random.Random(seed)
    r1, r2 = rng.randrange(1, P), rng.randrange(1, P)
    if r1 == r2:
        r2 = r1 % (P - 1) + 1
    mod = P**prec
    # (X - r1 - 5 s)(X - r2 - 5 t) has simple roots mod 5
    s, t = rng.randrange(mod), rng.randrange(mod)
    a, b = r1 + P * s, r2 + P * t
    f = [a * b % mod, -(a + b) % mod, 1]
    brute = sorted(x for x in range(mod) if poly_eval(f, x, mod) == 0)
    lifted = sorted(hensel_root(f, r, P, prec) for r in (r1, r2))
    assert lifted == brute == sorted((a % mod, b % mod))


def test_roots_mod_p_multiplicities():
    f = poly_mul([MOD - 1, 1], poly_mul([MOD - 1, 1], [MOD - 2, 1], MOD), MOD)
    assert sorted(roots_mod_p(f, P)) == [(1, 2), (2, 1)]


def test_coprime_factorisation_multiplies_back():
    # (X + 1)(X^2 + 2)(X + 5): roots 4 and 0 mod 5, X^2 + 2 has none
    f = poly_mul(poly_mul([1, 1], [2, 0, 1], MOD), [5, 1], MOD)
    parts = coprime_factorisation(f, P, PREC)
    prod = [1]
    for _, g in parts:
        prod = poly_mul(prod, g, MOD)
    assert prod == f
    assert sorted(label for label, _ in parts if label is not None) == [0, 4]
    assert [len(g) for label, g in parts if label is None] == [3]


def test_unit_root_picks_the_unit():
    # X^2 - X + 5: roots are a unit and 5 * unit
    r = unit_root([5, MOD - 1, 1], P, PREC)
    assert r % P != 0 and poly_eval([5, MOD - 1, 1], r, MOD) == 0


def test_projector_worked_example():
    P_ = ordinary_projector([[1, 1], [0, 5]], 5, 2)
    assert P_.matrix() == [[1, 6], [0, 0]]
    assert P_.rank == 1


def test_projector_does_not_stop_at_a_repeated_power():
    # [2] mod 5: A^(2!) = A^(3!) = 4, which is not idempotent; e must be 1
    P_ = ordinary_projector([[2]], 5, 1)
    assert P_.matrix() == [[1]]


@given(st.integers(0, 10**6))
def test_projector_algebra_on_split_matrices(seed):
    rng = random.Random(seed)
    n = rng.randrange(1, 7)
    u = rng.randrange(0, n + 1)
    A = synthetic_split_matrix(rng, n, u, P, PREC)
    e = ordinary_projector(A, P, PREC).matrix()
    assert matmul(e, e, MOD) == e
    assert matmul(e, A, MOD) == matmul(A, e, MOD)
    assert rank(e, P, PREC) == u
