from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import bernoulli_plus, r2, sigma
from padicmf.arith import PrimeContext, kronecker_character, trivial_character
from padicmf.errors import (
    BadPrime,
    ContextMismatch,
    MissingMetadata,
    NegativeValuation,
    NonUnitConstantTerm,
    NotPositiveDefinite,
    ParityViolation,
)
from padicmf.qseries import (
    FormMeta,
    QExpansion,
    constant,
    eisenstein_E,
    eisenstein_weight_char,
    invert,
    monomial,
    mul,
    power,
    t_q,
    theta_series,
    u_p,
    u_q,
    v_op,
)
from padicmf.spaces import generate_eisenstein_space

CTX = PrimeContext(5, 4, 60)


def series(ctx, trunc=None):
    n = (ctx.qprec if trunc is None else trunc) + 1
    return st.lists(st.integers(0, ctx.modulus - 1), min_size=n, max_size=n).map(
        lambda c: QExpansion(ctx, tuple(c)))


def test_eisenstein_E_first_coefficients_p5():
    E = eisenstein_E(CTX)
    assert E.coeffs[:5] == (1, 240, 285, 470, 20)
    assert E.meta.weight == 4 and E.meta.level == 1


@pytest.mark.parametrize("p", [5, 7, 11, 13])
def test_eisenstein_E_matches_bernoulli_oracle(p):
    ctx = PrimeContext(p, 4, 40)
    m = ctx.modulus
    c = Fraction(-2 * (p - 1)) / bernoulli_plus(p - 1)
    c = c.numerator * pow(c.denominator, -1, m) % m
    E = eisenstein_E(ctx)
    assert E[0] == 1
    assert all(E[n] == c * sigma(n, p - 2) % m for n in range(1, 41))
    assert all(a % p == 0 for a in E.coeffs[1:])


@given(series(CTX))
def test_u_p_inverts_v(f):
    g = u_p(v_op(f))
    assert g.coeffs == f.coeffs[: g.trunc + 1]


@given(series(CTX), series(CTX))
def test_projection_formula(f, g):
    lhs = u_p(mul(f, v_op(g)))
    rhs = mul(u_p(f), g)
    n = min(lhs.trunc, rhs.trunc)
    assert lhs.coeffs[: n + 1] == rhs.coeffs[: n + 1]


def test_truncation_bookkeeping():
    f = QExpansion(CTX, tuple(range(23)))
    assert u_p(f).trunc == 22 // 5
    assert v_op(f).trunc == min(60, 110)
    assert mul(f, constant(1, CTX)).trunc == 22
    with pytest.raises(IndexError):
        f[23]


@given(series(CTX, 20), series(CTX, 20), series(CTX, 20))
def test_multiplication_is_commutative_and_associative(f, g, h):
    assert mul(f, g) == mul(g, f)
    assert mul(mul(f, g), h).coeffs == mul(f, mul(g, h)).coeffs


@given(series(CTX, 30))
def test_invert(f):
    if f[0] % 5 == 0:
        with pytest.raises(NonUnitConstantTerm):
            invert(f)
        return
    assert mul(f, invert(f)).coeffs == constant(1, CTX, 30).coeffs


def test_power_matches_repeated_product():
    f = QExpansion(CTX, (1, 2, 3, 4, 5, 6))
    assert power(f, 3) == mul(f, mul(f, f))
    assert power(f, 0).coeffs == constant(1, CTX, 5).coeffs


def test_context_mismatch():
    other = PrimeContext(7, 4, 60)
    with pytest.raises(ContextMismatch):
        mul(constant(1, CTX), constant(1, other))


def test_monomial():
    m = monomial(3, CTX, 6, coeff=2)
    assert m.coeffs == (0, 0, 0, 2, 0, 0, 0)


@pytest.mark.parametrize("k", [4, 6, 8])
@pytest.mark.parametrize("q", [2, 3, 7])
def test_level_one_eisenstein_is_hecke_eigenform(k, q):
    ctx = PrimeContext(5, 4, 200)
    one = trivial_character(ctx)
    # -B_k/2k is not 5-integral for k = 4, 8; the eigen-relation does not see a_0
    E = eisenstein_weight_char(k, one, one, ctx, constant_term=0)
    image = t_q(E, q)
    lam = sigma(q, k - 1)
    assert image.coeffs == tuple(lam * a % ctx.modulus for a in E.coeffs[: image.trunc + 1])


def test_eisenstein_constant_term_must_be_integral():
    one = trivial_character(CTX)
    with pytest.raises(NegativeValuation):
        eisenstein_weight_char(4, one, one, CTX)
    E6 = eisenstein_weight_char(6, one, one, CTX)
    assert E6[0] * -504 % 625 == 1  # -B_6/12 = -1/504


@given(st.lists(st.integers(0, 624), min_size=2, max_size=2))
def test_hecke_operators_commute_on_eisenstein_space(coords):
    ctx = PrimeContext(5, 4, 120)
    B = generate_eisenstein_space(4, 11, trivial_character(ctx), ctx)
    f = B.combination(coords)
    a = t_q(t_q(f, 2), 3)
    b = t_q(t_q(f, 3), 2)
    assert a == b


def test_hecke_needs_metadata_and_good_prime():
    with pytest.raises(MissingMetadata):
        t_q(constant(1, CTX), 2)
    f = eisenstein_E(CTX)
    with pytest.raises(BadPrime):
        t_q(f, 5)
    with pytest.raises(BadPrime):
        t_q(f, 4)
    with pytest.raises(BadPrime):
        u_q(f, 2)  # level 1 has no prime divisors


def test_u_q_at_level_prime():
    ctx = PrimeContext(13, 3, 60)
    g = theta_series(1, 1, 6, ctx)
    assert u_q(g, 23).coeffs == g.coeffs[::23]


def test_eisenstein_with_character():
    ctx = PrimeContext(13, 5, 50)
    one = trivial_character(ctx)
    chi = kronecker_character(-23, ctx)
    E = eisenstein_weight_char(1, one, chi, ctx)
    m = ctx.modulus
    for n in range(1, 51):
        assert E[n] == sum(chi(d) for d in range(1, n + 1) if n % d == 0) % m
    # constant term -B_{1,chi}/2 = h(-23)/2 = 3/2
    assert E[0] * 2 % m == 3
    with pytest.raises(ParityViolation):
        eisenstein_weight_char(2, one, chi, ctx)


def test_theta_sum_of_two_squares_matches_divisor_formula():
    ctx = PrimeContext(5, 6, 300)
    th = theta_series(1, 0, 1, ctx)
    assert all(th[n] == r2(n) % ctx.modulus for n in range(301))


def test_theta_level_23():
    ctx = PrimeContext(13, 5, 30)
    th = theta_series(1, 1, 6, ctx)
    assert th.coeffs[:7] == (1, 2, 0, 0, 2, 0, 4)
    assert th.meta.level == 23 and th.meta.weight == 1
    t2 = theta_series(2, 1, 3, ctx)
    assert t2.coeffs[:7] == (1, 0, 2, 2, 2, 0, 2)


@pytest.mark.parametrize("form", [(-1, 1, 6), (1, 4, 2), (0, 1, 1)])
def test_theta_rejects_indefinite_forms(form):
    with pytest.raises(NotPositiveDefinite):
        theta_series(*form, CTX)


def test_form_meta_validation():
    ctx = PrimeContext(13, 5, 10)
    chi = kronecker_character(-23, ctx)
    with pytest.raises(ValueError):
        FormMeta(26, 1, chi)  # modulus 23 does not divide 26
    with pytest.raises(ValueError):
        FormMeta(13 * 23, 1, chi)  # level divisible by p
