"""Built-in invariant suite: runs on fixed parameters with a seeded RNG."""

from __future__ import annotations

import random
from concurrent.futures import ThreadPoolExecutor

from .arith import PrimeContext, kronecker_character
from .companion import Check, combine, pair_find, stabilize
from .errors import NotInSpan
from .linalg import echelon, hensel_root, inverse, matmul, roots_mod_p
from .overconv import eigensystem_from_form, ordinary_projector
from .qseries import QExpansion, eisenstein_E, mul, theta_series, u_p, v_op
from .spaces import echelonize, membership


def random_series(rng: random.Random, ctx: PrimeContext, trunc: int | None = None) -> QExpansion:
    trunc = ctx.qprec if trunc is None else trunc
    return QExpansion(ctx, tuple(rng.randrange(ctx.modulus) for _ in range(trunc + 1)))


def _broken_u_p(f: QExpansion) -> QExpansion:
    """U_p off by one index; used to prove the suite can fail."""
    p = f.ctx.p
    return QExpansion(f.ctx, f.coeffs[1::p])


def projection_identities(seed: int = 0, count: int = 200, p: int = 5, prec: int = 4,
                          M: int = 200, broken: bool = False) -> list[Check]:
    rng = random.Random(seed)
    ctx = PrimeContext(p, prec, M)
    up = _broken_u_p if broken else u_p
    inverse_ok = True
    formula_ok = True
    for _ in range(count):
        f = random_series(rng, ctx)
        g = random_series(rng, ctx)
        if up(v_op(f)).coeffs != f.coeffs[: up(v_op(f)).trunc + 1]:
            inverse_ok = False
        lhs = up(mul(f, v_op(g)))
        rhs = mul(up(f), g)
        n = min(lhs.trunc, rhs.trunc)
        if lhs.coeffs[: n + 1] != rhs.coeffs[: n + 1]:
            formula_ok = False
    return [Check("u_p_after_v_is_identity", inverse_ok, prec),
            Check("projection_formula", formula_ok, prec)]


def eisenstein_congruence(primes=(5, 7, 11, 13), M: int = 200, prec: int = 4) -> list[Check]:
    out = []
    for p in primes:
        ctx = PrimeContext(p, prec, M)
        E = eisenstein_E(ctx)
        ok = E[0] == 1 and all(a % p == 0 for a in E.coeffs[1:])
        ok = ok and ctx.valuation(E[1]) == 1
        out.append(Check(f"E_congruent_to_1_mod_{p}", ok, prec))
    return out


def synthetic_split_matrix(rng: random.Random, n: int, units: int, p: int, prec: int):
    """S^{-1} diag(U, N) S with U of unit spectrum (size ``units``), N
    topologically nilpotent, and S a random unimodular change of basis."""
    mod = p**prec
    D = [[0] * n for _ in range(n)]
    for i in range(n):
        if i < units:
            D[i][i] = rng.randrange(1, p) + p * rng.randrange(p ** (prec - 1))
        else:
            D[i][i] = p * rng.randrange(p ** (prec - 1))
        block = range(0, units) if i < units else range(units, n)
        for j in block:
            if j > i:
                D[i][j] = rng.randrange(mod)
    L = [[(1 if i == j else rng.randrange(mod) if j < i else 0) for j in range(n)] for i in range(n)]
    U = [[(1 if i == j else rng.randrange(mod) if j > i else 0) for j in range(n)] for i in range(n)]
    S = matmul(L, U, mod)
    A = matmul(matmul(inverse(S, p, prec), D, mod), S, mod)
    return A


def projector_algebra(seed: int = 0, count: int = 50, p: int = 5, prec: int = 4) -> list[Check]:
    rng = random.Random(seed)
    mod = p**prec
    idem = commute = rank_ok = True
    for _ in range(count):
        n = rng.randrange(2, 9)
        u = rng.randrange(0, n + 1)
        A = synthetic_split_matrix(rng, n, u, p, prec)
        P = ordinary_projector(A, p, prec)
        e = P.matrix()
        idem &= matmul(e, e, mod) == e
        commute &= matmul(e, A, mod) == matmul(A, e, mod)
        rank_ok &= echelon(e, p, prec).rank == u == P.rank
    worked = ordinary_projector([[1, 1], [0, 5]], 5, 2).matrix() == [[1, 6], [0, 0]]
    return [Check("projector_idempotent", idem, prec),
            Check("projector_commutes", commute, prec),
            Check("projector_rank_counts_units", rank_ok, prec),
            Check("projector_worked_example", worked, 2)]


def stabilization_round_trip(p: int = 13, prec: int = 5, M: int = 300) -> list[Check]:
    ctx = PrimeContext(p, prec, M)
    t1 = theta_series(1, 1, 6, ctx)
    t2 = theta_series(2, 1, 3, ctx)
    half = pow(2, -1, ctx.modulus)
    g = (half * (t1 - t2)).with_meta(t1.meta)
    chi = kronecker_character(-23, ctx)
    ap = g[p]
    poly = [chi(p), (-ap) % ctx.modulus, 1]
    roots = sorted(r for r, _ in roots_mod_p(poly, p))
    alpha, beta = (hensel_root(poly, r, p, prec) for r in roots)
    ga, gb = stabilize(g, beta), stabilize(g, alpha)
    eig_a = u_p(ga).coeffs == tuple(alpha * c % ctx.modulus for c in ga.coeffs[: u_p(ga).trunc + 1])
    eig_b = u_p(gb).coeffs == tuple(beta * c % ctx.modulus for c in gb.coeffs[: u_p(gb).trunc + 1])
    systems = [eigensystem_from_form(ga, alpha, 1, 23, chi),
               eigensystem_from_form(gb, beta, 1, 23, chi)]
    pairs = pair_find(systems)
    f = combine(ga, gb, alpha, beta)
    B1 = echelonize([t1, t2], ctx=ctx)
    try:
        membership(f, B1)
        member = True
    except NotInSpan:
        member = False
    return [Check("stabilized_forms_are_u_p_eigenforms", eig_a and eig_b, prec),
            Check("pair_found", pairs == [(0, 1)], prec),
            Check("combine_recovers_g", f.coeffs == g.coeffs[: f.trunc + 1], prec),
            Check("combined_form_is_classical", member, B1.effective_precision)]


def run_all(seed: int = 0, break_projection: bool = False, threads: int = 1) -> list[Check]:
    """Every group of checks, in a fixed order whatever ``threads`` is."""
    groups = [
        lambda: projection_identities(seed, broken=break_projection),
        eisenstein_congruence,
        lambda: projector_algebra(seed),
        stabilization_round_trip,
    ]
    if threads == 1:
        results = [g() for g in groups]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda g: g(), groups))
    return [c for group in results for c in group]
