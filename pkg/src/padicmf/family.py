"""Congruences between ordinary eigensystems across weights."""

from __future__ import annotations

from dataclasses import dataclass

from .arith import PrimeContext, valuation
from .companion import WeightOneCertificate
from .errors import ContextMismatch
from .overconv import EigenSystem


@dataclass(frozen=True)
class WeightPoint:
    """Weight k with its image (1+p)^(k-2) in Z/p^prec."""

    k: int
    element: int
    ctx: PrimeContext

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("weight must be positive")
        if self.element != pow(1 + self.ctx.p, self.k - 2, self.ctx.modulus):
            raise ValueError("element must be (1+p)^(k-2)")


def weight_point(k: int, ctx: PrimeContext) -> WeightPoint:
    return WeightPoint(k, pow(1 + ctx.p, k - 2, ctx.modulus), ctx)


def _diff_depth(x: int, y: int, p: int, cap: int) -> int:
    return valuation(x - y, p, cap)


def congruence_depth(E1: EigenSystem, E2: EigenSystem) -> int:
    """Largest t <= min precision with a_n and the U_p eigenvalues congruent
    mod p^t for every shared n."""
    if E1.ctx.p != E2.ctx.p or E1.level != E2.level or \
            E1.character.spec != E2.character.spec:
        raise ContextMismatch("systems must share p, level and character")
    p = E1.ctx.p
    t = min(E1.precision, E2.precision, E1.ctx.prec, E2.ctx.prec)
    t = min(t, _diff_depth(E1.up_eigenvalue, E2.up_eigenvalue, p, t))
    for n in range(1, min(E1.M, E2.M) + 1):
        if t == 0:
            break
        t = min(t, _diff_depth(E1[n], E2[n], p, t))
    return t


@dataclass(frozen=True)
class FamilyMatch:
    pairs: tuple[tuple[EigenSystem, EigenSystem, int], ...]
    left_a: tuple[EigenSystem, ...]
    left_b: tuple[EigenSystem, ...]

    @property
    def bijective(self) -> bool:
        return not self.left_a and not self.left_b


def _key(E: EigenSystem):
    return (E.a, E.up_eigenvalue)


def family_match(list_a: list[EigenSystem], list_b: list[EigenSystem]) -> FamilyMatch:
    """Greedy matching by decreasing depth; only pairs of depth >= 1 count."""
    if list_a and list_b:
        p = list_a[0].ctx.p
        ka, kb = list_a[0].weight, list_b[0].weight
        if (ka - kb) % (p - 1):
            raise ValueError(f"weights {ka} and {kb} are not congruent mod {p - 1}")
    a = sorted(list_a, key=_key)
    b = sorted(list_b, key=_key)
    candidates = []
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            d = congruence_depth(x, y)
            if d >= 1:
                candidates.append((-d, i, j))
    candidates.sort()
    used_a, used_b, pairs = set(), set(), []
    for neg_d, i, j in candidates:
        if i in used_a or j in used_b:
            continue
        used_a.add(i)
        used_b.add(j)
        pairs.append((a[i], b[j], -neg_d))
    return FamilyMatch(
        tuple(pairs),
        tuple(x for i, x in enumerate(a) if i not in used_a),
        tuple(y for j, y in enumerate(b) if j not in used_b),
    )


@dataclass(frozen=True)
class SpecializationEntry:
    weight: int
    up_eigenvalue: int
    depth: int


def weight_one_specialization_report(members: list[EigenSystem],
                                     certificate: WeightOneCertificate) -> list[SpecializationEntry]:
    """Depth of agreement, away from p, between the certified weight-one form
    and each higher-weight family member."""
    f = certificate.form
    p = f.ctx.p
    out = []
    for E in members:
        if E.ctx.p != p:
            raise ContextMismatch("family member over a different prime")
        t = min(E.precision, certificate.precision, f.ctx.prec)
        for n in range(1, min(E.M, f.trunc) + 1):
            if t == 0:
                break
            if n % p:
                t = min(t, _diff_depth(E[n], f[n], p, t))
        out.append(SpecializationEntry(E.weight, E.up_eigenvalue, t))
    return out
