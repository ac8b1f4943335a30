"""Companion pairs of p-stabilised eigensystems, the combiner
f = (alpha f_alpha - beta f_beta)/(alpha - beta) and classicality checks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from sympy import primefactors

from .arith import DirichletCharacter, PrimeContext
from .errors import (
    ContextMismatch,
    DenominatorNotUnit,
    NotInSpan,
    TwistUndefined,
)
from .overconv import EigenSystem
from .qseries import QExpansion, add, scale, v_op
from .spaces import BasisMatrix, membership


@dataclass(frozen=True)
class Check:
    name: str
    holds: bool
    precision: int
    detail: str = ""
    gating: bool = True

    @property
    def status(self) -> str:
        if self.precision <= 0:
            return "VACUOUS"
        return "pass" if self.holds else "fail"


def _agree(x: int, y: int, p: int, prec: int) -> bool:
    return (x - y) % p**prec == 0


# --- pairing -----------------------------------------------------------------


def _same_space(a: EigenSystem, b: EigenSystem) -> bool:
    return (a.ctx.p == b.ctx.p and a.ctx.prec == b.ctx.prec and a.level == b.level
            and a.weight == b.weight and a.character.spec == b.character.spec)


def pair_find(systems: list[EigenSystem]) -> list[tuple[int, int]]:
    """Index pairs (i < j) agreeing at every a_n with p not dividing n and
    with U_p eigenvalues distinct mod p."""
    out = []
    for i, a in enumerate(systems):
        for j in range(i + 1, len(systems)):
            b = systems[j]
            if not _same_space(a, b):
                continue
            p = a.ctx.p
            prec = min(a.precision, b.precision)
            if prec <= 0 or (a.up_eigenvalue - b.up_eigenvalue) % p == 0:
                continue
            M = min(a.M, b.M)
            if all(_agree(a[n], b[n], p, prec) for n in range(1, M + 1) if n % p):
                out.append((i, j))
    return out


# --- the combiner ------------------------------------------------------------


def _unit_difference(alpha: int, beta: int, ctx: PrimeContext) -> int:
    d = (alpha - beta) % ctx.modulus
    if d % ctx.p == 0:
        raise DenominatorNotUnit(f"alpha - beta = {d} is not a unit mod {ctx.p}")
    return pow(d, -1, ctx.modulus)


def _check_inputs(fa: QExpansion, fb: QExpansion) -> None:
    if fa.ctx.p != fb.ctx.p or fa.ctx.prec != fb.ctx.prec:
        raise ContextMismatch("f_alpha and f_beta live over different rings")


def combine(f_alpha: QExpansion, f_beta: QExpansion, alpha: int, beta: int) -> QExpansion:
    """(alpha f_alpha - beta f_beta) / (alpha - beta)."""
    _check_inputs(f_alpha, f_beta)
    inv = _unit_difference(alpha, beta, f_alpha.ctx)
    return scale(inv, add(scale(alpha, f_alpha), scale(-beta, f_beta)))


def v_complement(f_alpha: QExpansion, f_beta: QExpansion, alpha: int, beta: int) -> QExpansion:
    """(f_alpha - f_beta) / (alpha - beta), which equals v_op of the combined form."""
    _check_inputs(f_alpha, f_beta)
    inv = _unit_difference(alpha, beta, f_alpha.ctx)
    return scale(inv, add(f_alpha, scale(-1, f_beta)))


def stabilize(g: QExpansion, root: int) -> QExpansion:
    """g(q) - root * g(q^p): the stabilisation whose U_p eigenvalue is the
    other root of X^2 - a_p X + chi(p) p^{k-1}."""
    Vg = v_op(g)
    return add(g.truncate(Vg.trunc), scale(-root, Vg))


# --- classicality ------------------------------------------------------------


@dataclass(frozen=True)
class MembershipResult:
    coordinates: tuple[int, ...] | None
    residual_valuation: int | None
    precision: int

    @property
    def member(self) -> bool:
        return self.coordinates is not None


def classicality_test(f: QExpansion, B1: BasisMatrix) -> MembershipResult:
    """Membership of f in the classical basis B1; precision is the basis's
    effective precision."""
    try:
        coords = membership(f, B1)
    except NotInSpan as exc:
        return MembershipResult(None, exc.valuation, B1.effective_precision)
    return MembershipResult(tuple(coords), None, B1.effective_precision)


def check_root_product(alpha: int, beta: int, k: int, chi: DirichletCharacter,
                     ctx: PrimeContext) -> Check:
    """alpha * beta == p^(k-1) chi(p) in Z/p^prec."""
    p, m = ctx.p, ctx.modulus
    if chi.modulus % p == 0:
        raise ValueError("chi must be defined at p")
    want = pow(p, k - 1, m) * chi(p) % m
    got = alpha * beta % m
    v = ctx.valuation(got)
    return Check("root_product_is_chi_p_times_p_to_k_minus_1", got == want, ctx.prec,
                 f"alpha*beta={got} expected={want} valuation={v}")


@dataclass(frozen=True)
class WeightOneCertificate:
    form: QExpansion
    alpha: int
    beta: int
    companion: QExpansion
    membership: MembershipResult
    checks: tuple[Check, ...]

    @property
    def precision(self) -> int:
        return min([self.membership.precision] + [c.precision for c in self.checks])

    @property
    def vacuous(self) -> bool:
        return self.precision <= 0

    @property
    def ok(self) -> bool:
        return (self.membership.member and not self.vacuous
                and all(c.holds for c in self.checks if c.gating))


def certify(f_alpha: QExpansion, f_beta: QExpansion, alpha: int, beta: int,
            B1: BasisMatrix, chi: DirichletCharacter, k: int = 1,
            precision: int | None = None) -> WeightOneCertificate:
    """Combine a stabilised pair and record every check on the result."""
    ctx = f_alpha.ctx
    p, m = ctx.p, ctx.modulus
    prec = ctx.prec if precision is None else precision
    f = combine(f_alpha, f_beta, alpha, beta)
    f_prime = v_complement(f_alpha, f_beta, alpha, beta)
    T = min(f.trunc, f_alpha.trunc, f_beta.trunc)
    away = all(f[n] == f_alpha[n] == f_beta[n] for n in range(1, T + 1) if n % p)
    checks = [
        Check("away_from_p_agreement", away, prec),
        Check("a_p_is_root_sum", f[p] == (alpha + beta) % m if T >= p else False, prec,
              f"a_p={f[p] if T >= p else None}"),
        check_root_product(alpha, beta, k, chi, ctx),
    ]
    Vf = v_op(f)
    n_common = min(Vf.trunc, f_prime.trunc)
    checks.append(Check("companion_is_v_of_combined",
                        Vf.coeffs[: n_common + 1] == f_prime.coeffs[: n_common + 1], prec))
    return WeightOneCertificate(f, alpha % m, beta % m, f_prime,
                                classicality_test(f, B1), tuple(checks))


# --- companion relations on eigensystems -------------------------------------


@dataclass(frozen=True)
class CompanionReport:
    first: EigenSystem
    second: EigenSystem
    twist: str
    checks: tuple[Check, ...]

    @property
    def holds(self) -> bool:
        return all(c.holds for c in self.checks if c.gating)

    @property
    def vacuous(self) -> bool:
        return any(c.precision <= 0 for c in self.checks)

    def failed(self) -> list[str]:
        return [c.name for c in self.checks if c.gating and not c.holds]


def check_companion_eigensystems(F: EigenSystem, G: EigenSystem,
                                 twist: Callable[[int], int | None] | None = None,
                                 twist_name: str = "trivial",
                                 s_p: int | None = None) -> CompanionReport:
    """Relations a companion G of F must satisfy at finite precision.

    ``twist`` maps m to tau(m) (a unit); the default is tau = 1.  ``s_p`` is
    the value the product of U_p eigenvalues must take, by default
    chi(p) p^(k-1).
    """
    if F.ctx.p != G.ctx.p or F.ctx.prec != G.ctx.prec or F.level != G.level:
        raise ContextMismatch("F and G must share ring and level")
    ctx = F.ctx
    p, m = ctx.p, ctx.modulus
    prec = min(F.precision, G.precision)
    mod = p ** max(prec, 0)
    tau = twist or (lambda n: 1)

    def tau_inv(n: int) -> int:
        t = tau(n)
        if t is None or t % p == 0:
            raise TwistUndefined(f"tau({n}) is undefined or not a unit")
        return pow(t, -1, m)

    M = min(F.M, G.M)
    bad = [q for q in primefactors(F.level) if q <= M]
    mismatches = [n for n in range(1, M + 1)
                  if n % p and (G[n] - tau_inv(n) * F[n]) % mod]
    checks = [Check("hecke_away_from_p", not mismatches, prec,
                    f"first_mismatch={mismatches[0]}" if mismatches else "")]
    bad_mismatch = [q for q in bad if (G[q] - tau_inv(q) * F[q]) % mod]
    checks.append(Check("u_q_at_level_primes", not bad_mismatch, prec,
                        f"mismatch_at={bad_mismatch}" if bad_mismatch else ""))
    vanish = all(G[q] % mod == 0 and F[q] % mod == 0 for q in bad)
    checks.append(Check("u_q_vanishes_at_level_primes", vanish, prec, gating=False))
    if s_p is None:
        s_p = F.character(p) * pow(p, F.weight - 1, m) % m
    prod = F.up_eigenvalue * G.up_eigenvalue % m
    checks.append(Check("u_p_product", (prod - s_p) % mod == 0, prec,
                        f"product={prod} expected={s_p % m}"))
    return CompanionReport(F, G, twist_name, tuple(checks))
