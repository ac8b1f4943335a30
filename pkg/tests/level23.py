"""The weight-one level-23 example at p = 13, assembled for several tests."""

from dataclasses import dataclass
from functools import cache

from padicmf.arith import DirichletCharacter, PrimeContext, kronecker_character
from padicmf.companion import stabilize
from padicmf.overconv import EigenSystem, eigensystem_from_form
from padicmf.qseries import QExpansion, theta_series
from padicmf.spaces import BasisMatrix, echelonize

P, PREC, M = 13, 5, 300


def brute_roots(trace: int, det: int, mod: int) -> list[int]:
    """All x mod ``mod`` with x^2 - trace x + det = 0, by exhaustive scan."""
    return [x for x in range(mod) if (x * x - trace * x + det) % mod == 0]


@dataclass
class Level23:
    ctx: PrimeContext
    chi: DirichletCharacter
    g: QExpansion
    alpha: int
    beta: int
    g_alpha: QExpansion
    g_beta: QExpansion
    F: EigenSystem
    G: EigenSystem
    basis: BasisMatrix


def build(trunc: int = M) -> Level23:
    ctx = PrimeContext(P, PREC, trunc)
    chi = kronecker_character(-23, ctx)
    t1, t2 = theta_series(1, 1, 6, ctx), theta_series(2, 1, 3, ctx)
    half = pow(2, -1, ctx.modulus)
    g = (half * (t1 - t2)).with_meta(t1.meta)
    # the scan also rules out extra solutions; alpha is the root = 3 mod 13
    alpha, beta = sorted(brute_roots(g[P], chi(P), ctx.modulus), key=lambda x: x % P)
    g_alpha, g_beta = stabilize(g, beta), stabilize(g, alpha)
    F = eigensystem_from_form(g_alpha, alpha, 1, 23, chi)
    G = eigensystem_from_form(g_beta, beta, 1, 23, chi)
    basis = echelonize([t1, t2], ctx=ctx)
    return Level23(ctx, chi, g, alpha, beta, g_alpha, g_beta, F, G, basis)


@cache
def shared() -> Level23:
    """One build per test session; callers must not mutate it."""
    return build()
