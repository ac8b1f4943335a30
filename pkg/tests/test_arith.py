from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st
from sympy.functions.combinatorial.numbers import kronecker_symbol

from oracles import bernoulli_plus, sigma
from padicmf.arith import (
    PrimeContext,
    bernoulli,
    is_fundamental_discriminant,
    kronecker_character,
    parse_character,
    reduce_to_ring,
    sigma_t,
    table_character,
    teichmuller,
    trivial_character,
    valuation,
)
from padicmf.errors import (
    ModulusSharesFactorWithP,
    NegativeValuation,
    NotCoprime,
    NotFundamental,
)

CTX = PrimeContext(5, 4, 50)


@pytest.mark.parametrize("p", [2, 3, 4, 9])
def test_context_rejects_small_or_composite_p(p):
    with pytest.raises(ValueError):
        PrimeContext(p, 4, 10)


def test_context_rejects_nonpositive_precision():
    with pytest.raises(ValueError):
        PrimeContext(5, 0, 10)
    with pytest.raises(ValueError):
        PrimeContext(5, 3, 0)


def test_valuation_and_cap():
    assert valuation(250, 5) == 3
    assert valuation(0, 5, 4) == 4
    assert valuation(625, 5, 4) == 4  # zero in Z/5^4
    assert CTX.valuation(240) == 1
    with pytest.raises(ValueError):
        valuation(0, 5)


@pytest.mark.parametrize("k", [0, 1, 2, 4, 6, 10, 12, 16, 22])
def test_bernoulli_against_independent_recurrence(k):
    want = bernoulli_plus(k)
    if k == 1:
        want = -want
    assert bernoulli(k) == want


def test_bernoulli_odd_vanish():
    assert all(bernoulli(k) == 0 for k in range(3, 30, 2))
    assert bernoulli(4) == Fraction(-1, 30)


def test_reduce_to_ring():
    assert reduce_to_ring(Fraction(1, 2), CTX) * 2 % 625 == 1
    with pytest.raises(NegativeValuation):
        reduce_to_ring(Fraction(1, 5), CTX)


@given(st.integers(1, 300), st.integers(0, 5))
def test_sigma_matches_definition(n, t):
    assert sigma_t(n, t) == sigma(n, t)


@given(st.integers(1, 10**6), st.sampled_from([5, 7, 11, 13]))
def test_teichmuller_is_root_of_unity_lifting_x(x, p):
    ctx = PrimeContext(p, 5, 10)
    if x % p == 0:
        with pytest.raises(NotCoprime):
            teichmuller(x, ctx)
        return
    w = teichmuller(x, ctx)
    assert (w - x) % p == 0
    assert pow(w, p - 1, ctx.modulus) == 1


def test_fundamental_discriminants():
    assert is_fundamental_discriminant(-23)
    assert is_fundamental_discriminant(-4)
    assert is_fundamental_discriminant(12)
    assert not is_fundamental_discriminant(-16)
    assert not is_fundamental_discriminant(9)


@pytest.mark.parametrize("D", [-23, -4, -3, 8, -8, 12, 13])
def test_kronecker_character_against_sympy(D):
    chi = kronecker_character(D, PrimeContext(7 if D % 7 else 11, 3, 10))
    m = chi.ctx.modulus
    for n in range(1, 200):
        assert chi(n) == kronecker_symbol(D, n) % m


def test_kronecker_errors():
    with pytest.raises(NotFundamental):
        kronecker_character(-16, CTX)
    with pytest.raises(ModulusSharesFactorWithP):
        kronecker_character(-20, CTX)


def test_character_parity_and_order():
    chi = kronecker_character(-23, PrimeContext(13, 5, 10))
    assert chi.parity == -1
    assert chi.order == 2
    assert chi(13) == 1
    assert not chi.is_trivial
    assert trivial_character(CTX).is_trivial


@given(st.integers(1, 500), st.integers(1, 500))
def test_character_is_multiplicative(a, b):
    chi = kronecker_character(-23, PrimeContext(13, 5, 10))
    m = chi.ctx.modulus
    assert chi(a * b) == chi(a) * chi(b) % m


@pytest.mark.parametrize("spec", ["trivial", "kronecker:-23", "kronecker:-4"])
def test_parse_character_round_trips(spec):
    ctx = PrimeContext(13, 5, 10)
    chi = parse_character(spec, ctx)
    again = parse_character(chi.spec, ctx)
    assert again.values == chi.values and again.modulus == chi.modulus


def test_table_character_from_quadratic_values():
    ctx = PrimeContext(5, 3, 10)
    m = ctx.modulus
    chi = table_character(3, [1, m - 1], ctx)
    assert chi(2) == m - 1 and chi(4) == 1 and chi(3) == 0
    assert parse_character(chi.spec, ctx).values == chi.values


def test_table_character_rejects_non_multiplicative():
    ctx = PrimeContext(5, 3, 10)
    with pytest.raises(ValueError):
        table_character(7, [1, 2, 3, 4, 5, 6], ctx)


def test_character_product_and_induction():
    ctx = PrimeContext(13, 5, 10)
    chi = kronecker_character(-23, ctx)
    sq = chi * chi
    for n in range(1, 100):
        assert sq(n) == (1 if n % 23 else 0)
    lifted = chi.induce(46)
    assert lifted(2) == 0 and lifted(3) == chi(3)
