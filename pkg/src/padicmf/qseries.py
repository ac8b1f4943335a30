"""Truncated q-expansions over Z/p^prec and the Hecke-type operators on them."""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from math import comb, gcd, isqrt

import numpy as np
from sympy import divisors, isprime

from .arith import (
    DirichletCharacter,
    PrimeContext,
    bernoulli,
    kronecker_character,
    reduce_to_ring,
    sigma_t,
    trivial_character,
)
from .errors import (
    BadPrime,
    ContextMismatch,
    MissingMetadata,
    ModulusSharesFactorWithP,
    NonUnitConstantTerm,
    NotFundamental,
    NotPositiveDefinite,
    ParityViolation,
)


@dataclass(frozen=True)
class FormMeta:
    level: int
    weight: int
    character: DirichletCharacter

    def __post_init__(self):
        if self.level < 1:
            raise ValueError("level must be positive")
        if self.level % self.character.ctx.p == 0:
            raise ValueError("level must be prime to p")
        if self.level % self.character.modulus != 0:
            raise ValueError("character modulus must divide the level")


@dataclass(frozen=True)
class QExpansion:
    """sum_{n <= trunc} a_n q^n with a_n in Z/p^prec.

    ``coeffs`` has ``trunc + 1`` entries; the expansion says nothing about
    a_n for n > trunc.
    """

    ctx: PrimeContext
    coeffs: tuple[int, ...]
    meta: FormMeta | None = None
    cuspidal: bool = False

    def __post_init__(self):
        if not self.coeffs:
            raise ValueError("need at least the constant term")
        if len(self.coeffs) > self.ctx.qprec + 1:
            raise ValueError("truncation exceeds the context's q-precision")
        if self.cuspidal and self.coeffs[0] != 0:
            raise ValueError("cusp forms have a_0 = 0")
        if self.meta is not None and self.meta.character.ctx != self.ctx:
            raise ContextMismatch("character lives over a different ring")

    @classmethod
    def from_coeffs(cls, ctx: PrimeContext, coeffs, meta: FormMeta | None = None,
                    cuspidal: bool = False, trunc: int | None = None) -> QExpansion:
        """Reduce arbitrary integers (or p-integral rationals) into the ring."""
        m = ctx.modulus
        vals = []
        for c in coeffs:
            vals.append(reduce_to_ring(c, ctx) if isinstance(c, Fraction) else int(c) % m)
        if trunc is None:
            trunc = min(len(vals) - 1, ctx.qprec)
        vals = (vals + [0] * (trunc + 1 - len(vals)))[: trunc + 1]
        return cls(ctx, tuple(vals), meta, cuspidal)

    @property
    def trunc(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, n: int) -> int:
        if n < 0 or n > self.trunc:
            raise IndexError(f"a_{n} is beyond the truncation {self.trunc}")
        return self.coeffs[n]

    def truncate(self, trunc: int) -> QExpansion:
        trunc = min(trunc, self.trunc)
        return replace(self, coeffs=self.coeffs[: trunc + 1])

    def with_meta(self, meta: FormMeta | None, cuspidal: bool | None = None) -> QExpansion:
        cusp = self.cuspidal if cuspidal is None else cuspidal
        return QExpansion(self.ctx, self.coeffs, meta, cusp)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def valuation(self) -> int:
        """Minimum p-adic valuation of the coefficients (prec if all vanish)."""
        return min(self.ctx.valuation(c) for c in self.coeffs)

    def __add__(self, other: QExpansion) -> QExpansion:
        return add(self, other)

    def __sub__(self, other: QExpansion) -> QExpansion:
        return add(self, scale(-1, other))

    def __mul__(self, other: QExpansion) -> QExpansion:
        return mul(self, other)

    def __rmul__(self, c: int) -> QExpansion:
        return scale(c, self)

    def __neg__(self) -> QExpansion:
        return scale(-1, self)

    def __repr__(self) -> str:
        shown = ", ".join(str(c) for c in self.coeffs[:8])
        more = ", ..." if self.trunc >= 8 else ""
        return f"QExpansion(p={self.ctx.p}^{self.ctx.prec}, trunc={self.trunc}, [{shown}{more}])"


def _check_ctx(f: QExpansion, g: QExpansion) -> None:
    if f.ctx.p != g.ctx.p or f.ctx.prec != g.ctx.prec:
        raise ContextMismatch(f"{f.ctx} vs {g.ctx}")


def _merge_meta(f: QExpansion, g: QExpansion) -> FormMeta | None:
    return f.meta if f.meta == g.meta else None


def constant(c: int, ctx: PrimeContext, trunc: int | None = None) -> QExpansion:
    trunc = ctx.qprec if trunc is None else trunc
    return QExpansion(ctx, (c % ctx.modulus,) + (0,) * trunc)


def monomial(n: int, ctx: PrimeContext, trunc: int | None = None, coeff: int = 1) -> QExpansion:
    trunc = ctx.qprec if trunc is None else trunc
    coeffs = [0] * (trunc + 1)
    if n <= trunc:
        coeffs[n] = coeff % ctx.modulus
    return QExpansion(ctx, tuple(coeffs))


def add(f: QExpansion, g: QExpansion) -> QExpansion:
    _check_ctx(f, g)
    n = min(f.trunc, g.trunc)
    m = f.ctx.modulus
    coeffs = tuple((a + b) % m for a, b in zip(f.coeffs[: n + 1], g.coeffs[: n + 1]))
    return QExpansion(f.ctx, coeffs, _merge_meta(f, g), f.cuspidal and g.cuspidal)


def scale(c: int, f: QExpansion) -> QExpansion:
    m = f.ctx.modulus
    c %= m
    return QExpansion(f.ctx, tuple(c * a % m for a in f.coeffs), f.meta, f.cuspidal)


def _convolve(a, b, n: int, mod: int) -> list[int]:
    """First n+1 terms of the Cauchy product of a and b, mod ``mod``."""
    a = a[: n + 1]
    b = b[: n + 1]
    # int64 is exact when every partial sum stays below 2^63
    if (mod - 1) ** 2 * (n + 1) < 2**62:
        out = np.convolve(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
        return [int(x) % mod for x in out[: n + 1]]
    out = [0] * (n + 1)
    for i, x in enumerate(a):
        if x:
            for j in range(min(len(b), n + 1 - i)):
                out[i + j] += x * b[j]
    return [x % mod for x in out]


def mul(f: QExpansion, g: QExpansion) -> QExpansion:
    """Cauchy product; weights add and characters multiply when both carry metadata."""
    _check_ctx(f, g)
    n = min(f.trunc, g.trunc)
    coeffs = _convolve(f.coeffs, g.coeffs, n, f.ctx.modulus)
    meta = None
    if f.meta is not None and g.meta is not None:
        level = f.meta.level * g.meta.level // gcd(f.meta.level, g.meta.level)
        meta = FormMeta(level, f.meta.weight + g.meta.weight,
                        f.meta.character * g.meta.character)
    return QExpansion(f.ctx, tuple(coeffs), meta, f.cuspidal or g.cuspidal)


def power(f: QExpansion, e: int) -> QExpansion:
    """f^e for e >= 0 (negative e goes through ``invert``)."""
    if e < 0:
        return power(invert(f), -e)
    result = constant(1, f.ctx, f.trunc)
    if f.meta is not None:
        result = result.with_meta(FormMeta(1, 0, trivial_character(f.ctx)))
    base = f
    while e:
        if e & 1:
            result = mul(result, base)
        e >>= 1
        if e:
            base = mul(base, base)
    return result


def invert(f: QExpansion) -> QExpansion:
    """Multiplicative inverse of a series with unit constant term."""
    ctx = f.ctx
    m = ctx.modulus
    a = f.coeffs
    if a[0] % ctx.p == 0:
        raise NonUnitConstantTerm(f"a_0 = {a[0]} is not a unit")
    inv0 = pow(a[0], -1, m)
    n = f.trunc
    b = [0] * (n + 1)
    b[0] = inv0
    for k in range(1, n + 1):
        s = 0
        for i in range(1, k + 1):
            if a[i]:
                s += a[i] * b[k - i]
        b[k] = -s * inv0 % m
    meta = None
    if f.meta is not None:
        chi = f.meta.character
        inv_chi = DirichletCharacter(
            ctx, chi.modulus, tuple(pow(v, -1, m) if v else 0 for v in chi.values)
        )
        if chi.is_trivial:
            inv_chi = chi
        meta = FormMeta(f.meta.level, -f.meta.weight, inv_chi)
    return QExpansion(ctx, tuple(b), meta)


# --- operators ---------------------------------------------------------------


def u_p(f: QExpansion) -> QExpansion:
    """a_n(f | U_p) = a_{np}(f); truncation drops to floor(trunc / p)."""
    p = f.ctx.p
    return QExpansion(f.ctx, f.coeffs[::p], f.meta, f.cuspidal)


def v_op(f: QExpansion) -> QExpansion:
    """f | V = sum a_n q^{np}."""
    p = f.ctx.p
    trunc = min(f.ctx.qprec, p * f.trunc)
    coeffs = [0] * (trunc + 1)
    for n in range(trunc // p + 1):
        coeffs[n * p] = f.coeffs[n]
    return QExpansion(f.ctx, tuple(coeffs), f.meta, f.cuspidal)


def _require_meta(f: QExpansion) -> FormMeta:
    if f.meta is None:
        raise MissingMetadata("operator needs level, weight and character")
    return f.meta


def t_q(f: QExpansion, q: int) -> QExpansion:
    """Hecke operator at a good prime q on a character eigenspace:
    b_n = a_{nq} + chi(q) q^{k-1} a_{n/q}.
    """
    meta = _require_meta(f)
    ctx = f.ctx
    if not isprime(q) or (meta.level * ctx.p) % q == 0:
        raise BadPrime(f"T_{q} needs a prime not dividing level*p = {meta.level * ctx.p}")
    m = ctx.modulus
    k = meta.weight
    # q^{k-1} for negative k - 1 is taken in Z_p^x since q is prime to p
    s = meta.character(q) * pow(q, k - 1, m) % m
    trunc = f.trunc // q
    a = f.coeffs
    coeffs = []
    for n in range(trunc + 1):
        b = a[n * q]
        if n % q == 0:
            b += s * a[n // q]
        coeffs.append(b % m)
    return QExpansion(ctx, tuple(coeffs), meta, f.cuspidal)


def u_q(f: QExpansion, q: int) -> QExpansion:
    """U_q for a prime q dividing the level: b_n = a_{nq}."""
    meta = _require_meta(f)
    if not isprime(q) or meta.level % q != 0:
        raise BadPrime(f"U_{q} needs a prime dividing the level {meta.level}")
    return QExpansion(f.ctx, f.coeffs[::q], meta, f.cuspidal)


# --- generators --------------------------------------------------------------


def eisenstein_E(ctx: PrimeContext) -> QExpansion:
    """E = 1 - (2(p-1)/B_{p-1}) sum sigma_{p-2}(n) q^n, weight p-1, level 1."""
    p = ctx.p
    c = reduce_to_ring(Fraction(-2 * (p - 1)) / bernoulli(p - 1), ctx)
    m = ctx.modulus
    coeffs = [1] + [c * sigma_t(n, p - 2) % m for n in range(1, ctx.qprec + 1)]
    return QExpansion(ctx, tuple(coeffs), FormMeta(1, p - 1, trivial_character(ctx)))


def eisenstein_weight_char(k: int, psi: DirichletCharacter, phi: DirichletCharacter,
                           ctx: PrimeContext, constant_term: Fraction | int | None = None,
                           level: int | None = None, trunc: int | None = None) -> QExpansion:
    """E_k^{psi,phi} = c_0 + sum_n (sum_{d|n} psi(n/d) phi(d) d^{k-1}) q^n.

    Without an explicit ``constant_term`` the L-value rule is used:
    c_0 = -B_{k,phi}/(2k) when psi has modulus 1, else 0.
    """
    if psi.ctx != ctx or phi.ctx != ctx:
        raise ContextMismatch("characters over a different ring")
    if psi(-1) * phi(-1) % ctx.modulus != (-1) ** k % ctx.modulus:
        raise ParityViolation(f"psi*phi(-1) must equal (-1)^{k}")
    m = ctx.modulus
    trunc = ctx.qprec if trunc is None else trunc
    if constant_term is None:
        constant_term = eisenstein_constant(k, psi, phi)
    c0 = reduce_to_ring(Fraction(constant_term), ctx)
    coeffs = [c0]
    for n in range(1, trunc + 1):
        s = 0
        for d in divisors(n):
            s += psi(n // d) * phi(d) * pow(d, k - 1, m)
        coeffs.append(s % m)
    chi = psi * phi
    lvl = level if level is not None else psi.modulus * phi.modulus
    return QExpansion(ctx, tuple(coeffs), FormMeta(lvl, k, chi))


def generalized_bernoulli(k: int, values: list[int], modulus: int) -> Fraction:
    """B_{k,chi} = f^{k-1} sum_{a=1}^{f} chi(a) B_k(a/f) for an integer-valued chi."""
    total = Fraction(0)
    f = modulus
    for a in range(1, f + 1):
        c = values[a % f]
        if c == 0:
            continue
        # Bernoulli polynomial B_k(x) = sum C(k,j) B_j x^{k-j}
        x = Fraction(a, f)
        bk = sum(comb(k, j) * bernoulli(j) * x ** (k - j) for j in range(k + 1))
        total += c * bk
    return total * Fraction(f) ** (k - 1)


def eisenstein_constant(k: int, psi: DirichletCharacter, phi: DirichletCharacter) -> Fraction:
    if psi.modulus != 1:
        return Fraction(0)
    # phi must be integer valued (quadratic or trivial) for the rational rule
    lifted = [_signed(v, phi.ctx.modulus) for v in phi.values]
    if any(v not in (-1, 0, 1) for v in lifted):
        raise ValueError("pass constant_term explicitly for non-quadratic characters")
    if k == 1 and phi.modulus == 1:
        raise ValueError("weight 1 needs a nontrivial character")
    return -generalized_bernoulli(k, lifted, phi.modulus) / (2 * k)


def _signed(v: int, m: int) -> int:
    return v - m if v > m // 2 else v


def theta_series(a: int, b: int, c: int, ctx: PrimeContext,
                 trunc: int | None = None) -> QExpansion:
    """sum_{x,y} q^{a x^2 + b x y + c y^2} by exhaustive enumeration.

    Carries weight 1, level |disc| and the Kronecker character of disc.
    """
    disc = b * b - 4 * a * c
    if a <= 0 or disc >= 0:
        raise NotPositiveDefinite(f"[{a}, {b}, {c}] is not positive definite")
    M = ctx.qprec if trunc is None else trunc
    D = -disc
    counts = [0] * (M + 1)
    # 4a Q = (2ax + by)^2 + D y^2, and symmetrically in x
    ymax = isqrt(4 * a * M // D) + 1
    xmax = isqrt(4 * c * M // D) + 1
    for y in range(-ymax, ymax + 1):
        for x in range(-xmax, xmax + 1):
            n = a * x * x + b * x * y + c * y * y
            if n <= M:
                counts[n] += 1
    try:
        meta = FormMeta(D, 1, kronecker_character(disc, ctx))
    except (NotFundamental, ModulusSharesFactorWithP):
        # the counts are still right; there is just no nebentypus to attach
        meta = None
    return QExpansion.from_coeffs(ctx, counts, meta=meta)
