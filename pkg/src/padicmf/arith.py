"""Base arithmetic: the working ring Z/p^prec, Bernoulli numbers, divisor sums,
Teichmüller lifts and Dirichlet characters with values in Z/p^prec.

Ring elements are plain Python ints kept in ``[0, p^prec)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, gcd

from sympy import divisors, factorint, isprime
from sympy.functions.combinatorial.numbers import kronecker_symbol

from .errors import (
    CharacterNotEmbeddable,
    ContextMismatch,
    ModulusSharesFactorWithP,
    NegativeValuation,
    NotCoprime,
    NotFundamental,
)


@dataclass(frozen=True)
class PrimeContext:
    """Prime ``p``, working ring ``Z/p^prec`` and q-expansion order ``qprec``."""

    p: int
    prec: int
    qprec: int

    def __post_init__(self):
        if not isprime(self.p) or self.p < 5:
            raise ValueError(f"p must be a prime >= 5, got {self.p}")
        if self.prec < 1:
            raise ValueError("prec must be >= 1")
        if self.qprec < 1:
            raise ValueError("qprec must be >= 1")

    @property
    def modulus(self) -> int:
        return self.p**self.prec

    def reduce(self, x: int) -> int:
        return x % self.modulus

    def inverse(self, x: int) -> int:
        x %= self.modulus
        if x % self.p == 0:
            raise ZeroDivisionError(f"{x} is not a unit mod {self.p}^{self.prec}")
        return pow(x, -1, self.modulus)

    def valuation(self, x: int) -> int:
        """p-adic valuation of a ring element, capped at ``prec`` (for zero)."""
        return valuation(x, self.p, self.prec)

    def is_unit(self, x: int) -> bool:
        return x % self.p != 0

    def with_prec(self, prec: int) -> PrimeContext:
        return PrimeContext(self.p, prec, self.qprec)

    def with_qprec(self, qprec: int) -> PrimeContext:
        return PrimeContext(self.p, self.prec, qprec)


def valuation(x: int, p: int, cap: int | None = None) -> int:
    """Exponent of ``p`` in ``x``; ``cap`` is returned for x == 0 (mod p^cap)."""
    if cap is not None:
        x %= p**cap
        if x == 0:
            return cap
    elif x == 0:
        raise ValueError("valuation of 0 is infinite")
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


# --- Bernoulli numbers -------------------------------------------------------

_BERNOULLI: list[Fraction] = [Fraction(1)]


def bernoulli(k: int) -> Fraction:
    """B_k with the convention x/(e^x - 1) = sum B_k x^k / k!, so B_1 = -1/2.

    Uses sum_{j=0}^{n} C(n+1, j) B_j = 0 for n >= 1; the table is extended
    on demand and memoised.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    while len(_BERNOULLI) <= k:
        n = len(_BERNOULLI)
        acc = sum(comb(n + 1, j) * _BERNOULLI[j] for j in range(n))
        _BERNOULLI.append(-acc / (n + 1))
    return _BERNOULLI[k]


def reduce_to_ring(r: Fraction | int, ctx: PrimeContext) -> int:
    """Image of a p-integral rational in Z/p^prec."""
    r = Fraction(r)
    if r == 0:
        return 0
    num, den = r.numerator, r.denominator
    if den % ctx.p == 0:
        raise NegativeValuation(f"{r} has negative {ctx.p}-adic valuation")
    return num * pow(den, -1, ctx.modulus) % ctx.modulus


def sigma_t(n: int, t: int) -> int:
    """Sum of t-th powers of the positive divisors of n."""
    if n < 1:
        raise ValueError("n must be positive")
    return sum(d**t for d in divisors(n))


def teichmuller(x: int, ctx: PrimeContext) -> int:
    """The (p-1)-st root of unity congruent to x mod p."""
    if x % ctx.p == 0:
        raise NotCoprime(f"{x} is divisible by {ctx.p}")
    y = x % ctx.modulus
    while True:
        z = pow(y, ctx.p, ctx.modulus)
        if z == y:
            return y
        y = z


# --- Dirichlet characters ----------------------------------------------------


def _root_order(v: int, ctx: PrimeContext) -> int:
    for d in divisors(ctx.p - 1):
        if pow(v, d, ctx.modulus) == 1:
            return d
    raise CharacterNotEmbeddable(
        f"value {v} is not a {ctx.p - 1}-st root of unity mod {ctx.p}^{ctx.prec}"
    )


@dataclass(frozen=True)
class DirichletCharacter:
    """A Dirichlet character with values in Z/p^prec.

    ``values[n]`` is chi(n) for 0 <= n < modulus (zero off the units).
    ``spec`` is the textual description used by the file formats.
    """

    ctx: PrimeContext
    modulus: int
    values: tuple[int, ...]
    spec: str = field(default="", compare=False)

    def __post_init__(self):
        if self.modulus < 1 or len(self.values) != self.modulus:
            raise ValueError("value table must have one entry per residue")
        if self.values[1 % self.modulus] != 1:
            raise ValueError("chi(1) must be 1")
        m = self.ctx.modulus
        for a in range(self.modulus):
            v = self.values[a]
            if gcd(a, self.modulus) != 1:
                if v != 0:
                    raise ValueError(f"chi({a}) must vanish (shares a factor with modulus)")
            elif v % self.ctx.p == 0:
                raise ValueError(f"chi({a}) must be a unit")
            elif v != v % m:
                raise ValueError("values must be reduced residues")
        if not self.spec:
            object.__setattr__(self, "spec", self._table_spec())

    def __call__(self, n: int) -> int:
        return self.values[n % self.modulus]

    @property
    def order(self) -> int:
        o = 1
        for a, v in enumerate(self.values):
            if gcd(a, self.modulus) == 1:
                d = _root_order(v, self.ctx)
                o = o * d // gcd(o, d)
        return o

    @property
    def is_trivial(self) -> bool:
        return all(v in (0, 1) for v in self.values) and all(
            v == 1 for a, v in enumerate(self.values) if gcd(a, self.modulus) == 1
        )

    @property
    def parity(self) -> int:
        """chi(-1) as +1 or -1."""
        v = self(-1)
        return 1 if v == 1 else -1

    def __mul__(self, other: DirichletCharacter) -> DirichletCharacter:
        if self.ctx != other.ctx:
            raise ContextMismatch("characters over different rings")
        n = self.modulus * other.modulus // gcd(self.modulus, other.modulus)
        m = self.ctx.modulus
        vals = tuple(self(a) * other(a) % m for a in range(n))
        if self.is_trivial:
            return other.induce(n)
        if other.is_trivial:
            return self.induce(n)
        return DirichletCharacter(self.ctx, n, vals)

    def induce(self, n: int) -> DirichletCharacter:
        """The same character induced to modulus n (a multiple of ours)."""
        if n == self.modulus:
            return self
        vals = tuple(self(a) if gcd(a, n) == 1 else 0 for a in range(n))
        return DirichletCharacter(self.ctx, n, vals)

    def conductor_divides(self, level: int) -> bool:
        return level % self.modulus == 0 or self.is_trivial

    def _table_spec(self) -> str:
        if self.is_trivial and self.modulus == 1:
            return "trivial"
        return f"table:{self.modulus}:" + ",".join(str(v) for v in self.values[1:])

    def with_ctx(self, ctx: PrimeContext) -> DirichletCharacter:
        """Re-express the character over a ring of different precision."""
        if ctx.p != self.ctx.p:
            raise ContextMismatch("cannot change p")
        if self.spec.startswith("kronecker:") or self.spec == "trivial":
            return parse_character(self.spec, ctx)
        if ctx.prec <= self.ctx.prec:
            vals = tuple(v % ctx.modulus for v in self.values)
        else:
            vals = tuple(teichmuller(v, ctx) if v else 0 for v in self.values)
        return DirichletCharacter(ctx, self.modulus, vals)


def trivial_character(ctx: PrimeContext, modulus: int = 1) -> DirichletCharacter:
    vals = tuple(1 if gcd(a, modulus) == 1 else 0 for a in range(modulus))
    spec = "trivial" if modulus == 1 else ""
    return DirichletCharacter(ctx, modulus, vals, spec)


def is_fundamental_discriminant(D: int) -> bool:
    if D in (0, 1):
        return False
    if D % 4 == 1:
        return all(e == 1 for e in factorint(abs(D)).values())
    if D % 4 == 0:
        m = D // 4
        if m % 4 not in (2, 3):
            return False
        return all(e == 1 for e in factorint(abs(m)).values())
    return False


def kronecker_character(D: int, ctx: PrimeContext) -> DirichletCharacter:
    """The quadratic character n -> (D/n) of modulus |D|."""
    if not is_fundamental_discriminant(D):
        raise NotFundamental(f"{D} is not a fundamental discriminant")
    if D % ctx.p == 0:
        raise ModulusSharesFactorWithP(f"|{D}| is divisible by p = {ctx.p}")
    n = abs(D)
    m = ctx.modulus
    vals = tuple(kronecker_symbol(D, a) % m if gcd(a, n) == 1 else 0 for a in range(n))
    return DirichletCharacter(ctx, n, vals, f"kronecker:{D}")


def table_character(modulus: int, values: list[int], ctx: PrimeContext) -> DirichletCharacter:
    """Character from explicit values chi(1), ..., chi(modulus-1).

    The values must be multiplicative and of order dividing p-1.
    """
    if modulus == 1:
        if values:
            raise ValueError("modulus 1 takes no values")
        return trivial_character(ctx)
    if len(values) != modulus - 1:
        raise ValueError(f"expected {modulus - 1} values, got {len(values)}")
    vals = (0,) + tuple(v % ctx.modulus for v in values)
    chi = DirichletCharacter(ctx, modulus, vals)
    _ = chi.order  # raises CharacterNotEmbeddable
    m = ctx.modulus
    for a in range(modulus):
        for b in range(modulus):
            if chi(a * b) != chi(a) * chi(b) % m:
                raise ValueError("table is not multiplicative")
    return chi


def parse_character(spec: str, ctx: PrimeContext) -> DirichletCharacter:
    """Parse ``trivial`` | ``kronecker:<D>`` | ``table:<m>:<v_1,...>``."""
    spec = spec.strip()
    if spec == "trivial":
        return trivial_character(ctx)
    if spec.startswith("kronecker:"):
        return kronecker_character(int(spec.split(":", 1)[1]), ctx)
    if spec.startswith("table:"):
        _, m, vals = (spec.split(":", 2) + [""])[:3]
        values = [int(v) for v in vals.split(",") if v.strip()]
        return table_character(int(m), values, ctx)
    raise ValueError(f"unrecognised character spec {spec!r}")
