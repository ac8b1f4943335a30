"""Overconvergent forms at the q-expansion level: layered bases g/E^j, the
U_p matrix, the ordinary projector lim A^{r!} and ordinary eigensystems."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from math import ceil
from pathlib import Path

from sympy import primerange

from . import formats
from .arith import DirichletCharacter, PrimeContext, parse_character
from .errors import (
    ContextMismatch,
    MissingSource,
    NoStabilization,
    NonUnitA1,
    NotInSpan,
    NotStable,
    RankDeficiency,
)
from .linalg import (
    Matrix,
    charpoly,
    coprime_factorisation,
    echelon,
    hensel_root,
    matmul,
    matpow,
    poly_at_matrix,
    poly_divmod,
    roots_mod_p,
)
from .qseries import FormMeta, QExpansion, eisenstein_E, invert, mul, t_q, u_p
from .spaces import BasisMatrix, SpaceDescriptor, echelonize, hecke_matrix, membership


def depth_heuristic(prec: int, p: int) -> int:
    """Smallest depth J expected to hold U_p images to precision p^prec."""
    return ceil(prec * (p + 1) / (p - 1)) + 1


@dataclass(frozen=True)
class KatzBasis:
    ctx: PrimeContext
    weight: int
    level: int
    character: DirichletCharacter
    layers: tuple[tuple[QExpansion, ...], ...]
    J: int
    flat: BasisMatrix

    @property
    def dim(self) -> int:
        return self.flat.rank


def _extend_mod_p(base: list[tuple[int, ...]], candidates, p: int) -> list[int]:
    """Indices of candidates whose reductions extend span(base) mod p."""
    pivots: dict[int, list[int]] = {}

    def reduce(v):
        v = [x % p for x in v]
        for col in sorted(pivots):
            c = v[col]
            if c:
                v = [(a - c * b) % p for a, b in zip(v, pivots[col])]
        return v

    def insert(v) -> bool:
        v = reduce(v)
        lead = next((i for i, x in enumerate(v) if x), None)
        if lead is None:
            return False
        inv = pow(v[lead], -1, p)
        pivots[lead] = [x * inv % p for x in v]
        return True

    for v in base:
        if not insert(v):
            raise RankDeficiency("E times the previous layer is not saturated mod p")
    return [i for i, v in enumerate(candidates) if insert(v)]


def build_katz_basis(k: int, level: int, character: DirichletCharacter,
                     sources: list[BasisMatrix], J: int, ctx: PrimeContext) -> KatzBasis:
    """Layer j holds w/E^j for w in a complement of E * source_{j-1} inside
    source_j (source_j has weight k + j(p-1)).  The flat basis is the echelon
    form of all layers together."""
    if len(sources) < J + 1:
        raise MissingSource(f"need classical sources for j = 0..{J}, got {len(sources)}")
    p = ctx.p
    trunc = min(s.trunc for s in sources[: J + 1])
    E = eisenstein_E(ctx).truncate(trunc)
    E_inv = invert(E.with_meta(None))
    meta = None
    try:
        meta = FormMeta(level, k, character)
    except ValueError:
        pass
    layers: list[tuple[QExpansion, ...]] = []
    E_inv_j = None
    for j in range(J + 1):
        src = sources[j]
        rows = [r.truncate(trunc).with_meta(None) for r in src.rows]
        if j == 0:
            chosen = rows
        else:
            prev = [mul(E.with_meta(None), r.truncate(trunc).with_meta(None))
                    for r in sources[j - 1].rows]
            # E * previous source must sit inside this source
            B = echelonize(rows, ctx=ctx, trunc=trunc)
            for g in prev:
                try:
                    membership(g, B)
                except NotInSpan as exc:
                    raise RankDeficiency(
                        f"E * (weight {k + (j - 1) * (p - 1)}) is not inside weight "
                        f"{k + j * (p - 1)} (residual valuation {exc.valuation})"
                    ) from exc
            idx = _extend_mod_p([g.coeffs for g in prev], [r.coeffs for r in B.rows], p)
            chosen = [B.rows[i] for i in idx]
            E_inv_j = E_inv if E_inv_j is None else mul(E_inv_j, E_inv)
            chosen = [mul(w, E_inv_j) for w in chosen]
        cusp = bool(src.descriptor and src.descriptor.cusp)
        layers.append(tuple(QExpansion(ctx, g.coeffs, meta, cusp and g.coeffs[0] == 0)
                            for g in chosen))
    desc = SpaceDescriptor(level, k, character, "generated",
                           cusp=all(s.descriptor and s.descriptor.cusp for s in sources[: J + 1]))
    flat = echelonize([g for layer in layers for g in layer], desc, ctx=ctx, trunc=trunc)
    if flat.rank != sum(len(layer) for layer in layers):
        raise RankDeficiency("layers are not independent")
    return KatzBasis(ctx, k, level, character, tuple(layers), J, flat)


# --- U_p and its cache -------------------------------------------------------


def cache_key(KB: KatzBasis) -> tuple:
    c = KB.ctx
    return (c.p, c.prec, KB.flat.trunc, KB.level, KB.weight, KB.character.spec, KB.J)


def cache_dir(default=None) -> Path | None:
    env = os.environ.get("MF_CACHE_DIR")
    if env:
        return Path(env)
    return Path(default) if default else None


def _cache_path(directory: Path, key: tuple) -> Path:
    name = "_".join(str(x).replace(":", "-").replace(",", "-") for x in key)
    return directory / f"up_{name}.mfx"


def up_matrix(KB: KatzBasis, cache: Path | str | None = None) -> Matrix:
    """Matrix of U_p on the flat basis rows: u_p(b_i) = sum_j A_ij b_j.

    With a cache directory (or MF_CACHE_DIR) the matrix is read from or
    written to an MFX file keyed by (p, prec, trunc, level, weight, char, J).
    """
    directory = cache_dir(cache)
    key = cache_key(KB)
    if directory is not None:
        path = _cache_path(directory, key)
        if path.exists():
            rec = formats.read_mfx(path)
            if rec.key == key and len(rec.rows) == KB.dim:
                return [list(r) for r in rec.rows]
    try:
        A = hecke_matrix(KB.flat, u_p)
    except NotStable as exc:
        raise NotStable(f"U_p leaves the depth-{KB.J} span; increase J or qprec: {exc}") from exc
    if directory is not None:
        directory.mkdir(parents=True, exist_ok=True)
        formats.write_mfx(formats.MatrixRecord(key, tuple(tuple(r) for r in A)),
                          _cache_path(directory, key))
    return A


# --- ordinary projector ------------------------------------------------------


@dataclass(frozen=True)
class OrdinaryProjector:
    e_matrix: tuple[tuple[int, ...], ...]
    stabilization_exponent: int
    image_rows: tuple[tuple[int, ...], ...]  # echelon basis of the row space of e
    p: int
    prec: int

    @property
    def rank(self) -> int:
        return len(self.image_rows)

    def matrix(self) -> Matrix:
        return [list(r) for r in self.e_matrix]


def ordinary_projector(A: Matrix, p: int, prec: int) -> OrdinaryProjector:
    """e = A^{r!} for the first r at which A^{r!} is idempotent.

    Idempotency is the stopping test: A^{r!} can repeat itself once
    (C_{r+1} = C_r) before the unit part has converged, e.g. for A = [2]
    mod 5, where A^{2!} = A^{3!} = 4 but 4 is not idempotent.
    """
    mod = p**prec
    n = len(A)
    if n == 0:
        return OrdinaryProjector((), 1, (), p, prec)
    r_max = prec * (p - 1) * p**prec
    C = [[x % mod for x in row] for row in A]
    r = 1
    while True:
        if matmul(C, C, mod) == C:
            break
        r += 1
        if r > r_max:
            raise NoStabilization(f"A^(r!) did not stabilise by r = {r_max}")
        C = matpow(C, r, mod)
    ech = echelon(C, p, prec)
    return OrdinaryProjector(tuple(tuple(row) for row in C), r, ech.rows, p, prec)


def image_basis(KB: KatzBasis, P: OrdinaryProjector) -> BasisMatrix:
    """The e-image as a basis of q-expansions."""
    forms = [KB.flat.combination(row) for row in P.image_rows]
    return echelonize(forms, KB.flat.descriptor, ctx=KB.ctx, trunc=KB.flat.trunc)


def ordinary_projection_of_form(f: QExpansion, KB: KatzBasis, P: OrdinaryProjector) -> QExpansion:
    coords = membership(f, KB.flat)
    pushed = matmul([coords], P.matrix(), KB.ctx.modulus)[0]
    return KB.flat.combination(pushed)


# --- eigensystems ------------------------------------------------------------


@dataclass(frozen=True)
class EigenSystem:
    ctx: PrimeContext
    weight: int
    level: int
    character: DirichletCharacter
    up_eigenvalue: int
    a: tuple[int, ...]  # a[n-1] = a_n for 1 <= n <= M
    precision: int

    @property
    def M(self) -> int:
        return len(self.a)

    def __getitem__(self, n: int) -> int:
        return self.a[n - 1]

    def qexpansion(self) -> QExpansion:
        """sum a_n q^n (n >= 1) with a_0 = 0."""
        ctx = self.ctx if self.ctx.qprec >= self.M else self.ctx.with_qprec(self.M)
        return QExpansion(ctx, (0,) + self.a)


@dataclass(frozen=True)
class SkippedBlock:
    reason: str  # "repeated" or "irrational"
    dim: int
    up_residue: int | None


@dataclass
class Extraction:
    systems: list[EigenSystem] = field(default_factory=list)
    skipped: list[SkippedBlock] = field(default_factory=list)


def _pieces(B: BasisMatrix, A: Matrix):
    """Split span(B) along the coprime factorisation of charpoly(A) mod p.

    Yields (root label, factor, piece basis)."""
    ctx = B.ctx
    p, prec, mod = ctx.p, ctx.prec, ctx.modulus
    f = charpoly(A, mod)
    parts = coprime_factorisation(f, p, prec)
    for i, (label, g) in enumerate(parts):
        if len(parts) == 1:
            yield label, g, B
            return
        h, rem = poly_divmod(f, g, mod)
        assert rem == [0]
        H = poly_at_matrix(h, A, mod)
        vecs = echelon(H, p, prec).rows
        forms = [B.combination(v) for v in vecs]
        yield label, g, echelonize(forms, B.descriptor, ctx=ctx, trunc=B.trunc)


def good_primes(level: int, p: int, bound: int) -> list[int]:
    return [q for q in primerange(2, bound + 1) if (level * p) % q]


def ordinary_eigensystems(image: BasisMatrix, weight: int, level: int,
                          character: DirichletCharacter, hecke_bound: int = 13) -> Extraction:
    """Eigensystems in span(image), split first by U_p, then by T_q for good
    q <= hecke_bound where U_p alone leaves a block with a repeated residual
    eigenvalue."""
    ctx = image.ctx
    ops = [("Up", u_p)] + [
        (f"T{q}", (lambda f, q=q: t_q(f, q))) for q in good_primes(level, ctx.p, hecke_bound)
        if image.max_pivot_column <= image.trunc // q
    ]
    out = Extraction()
    _split(image, ops, out, weight, level, character, image.effective_precision)
    out.systems.sort(key=lambda s: (s.up_eigenvalue, s.a))
    return out


def _split(B: BasisMatrix, ops, out: Extraction, weight, level, character,
           precision: int) -> None:
    ctx = B.ctx
    if B.rank == 0:
        return
    if B.rank == 1:
        out.systems.append(_eigensystem(B, weight, level, character,
                                        min(precision, B.effective_precision)))
        return
    up_residue = None
    for name, op in ops:
        A = hecke_matrix(B, op)
        pieces = list(_pieces(B, A))
        if name == "Up" and len(pieces) == 1:
            up_residue = pieces[0][0]
        if len(pieces) == 1:
            label, g, _ = pieces[0]
            if label is None:
                out.skipped.append(SkippedBlock("irrational", B.rank, up_residue))
                return
            continue
        for label, g, piece in pieces:
            if label is None and len(g) - 1 == piece.rank:
                # no root mod p: a Galois orbit not defined over Z_p
                out.skipped.append(SkippedBlock("irrational", piece.rank, up_residue))
                continue
            _split(piece, ops, out, weight, level, character,
                   min(precision, piece.effective_precision))
        return
    out.skipped.append(SkippedBlock("repeated", B.rank, up_residue))


def _eigensystem(B: BasisMatrix, weight, level, character, precision) -> EigenSystem:
    ctx = B.ctx
    f = B.rows[0]
    a1 = f.coeffs[1]
    if a1 % ctx.p == 0:
        raise NonUnitA1(f"eigenvector has a_1 = {a1}")
    inv = pow(a1, -1, ctx.modulus)
    a = tuple(c * inv % ctx.modulus for c in f.coeffs[1:])
    lam = hecke_matrix(B, u_p)[0][0]
    return EigenSystem(ctx, weight, level, character, lam, a, precision)


def unit_root(poly: list[int], p: int, prec: int) -> int:
    """The unique root of poly that is a p-adic unit, found by scanning mod p
    and Newton lifting."""
    units = [r for r, m in roots_mod_p(poly, p) if r % p]
    if len(units) != 1:
        raise ValueError(f"expected one unit root mod {p}, found {units}")
    return hensel_root(poly, units[0], p, prec)


# --- MFE round trip ----------------------------------------------------------


def eigensystem_to_record(E: EigenSystem) -> formats.EigenRecord:
    h = formats.Header(E.ctx.p, E.ctx.prec, E.M, E.level, E.weight, E.character.spec)
    return formats.EigenRecord(h, E.up_eigenvalue, E.a, E.precision)


def eigensystem_from_record(rec: formats.EigenRecord, ctx: PrimeContext | None = None) -> EigenSystem:
    h = rec.header
    if ctx is None:
        ctx = PrimeContext(h.p, h.prec, h.qprec)
    if h.p != ctx.p or h.prec < ctx.prec:
        raise ContextMismatch(f"eigensystem file is for {h.p}^{h.prec}")
    m = ctx.modulus
    chi = parse_character(h.char, ctx)
    precision = min(rec.precision if rec.precision is not None else h.prec, ctx.prec)
    return EigenSystem(ctx, h.weight, h.level, chi, rec.up % m,
                       tuple(x % m for x in rec.a), precision)


def write_eigensystem(E: EigenSystem, path) -> None:
    formats.write_mfe(eigensystem_to_record(E), path)


def read_eigensystem(path, ctx: PrimeContext | None = None) -> EigenSystem:
    return eigensystem_from_record(formats.read_mfe(path), ctx)


def eigensystem_from_form(f: QExpansion, up_eigenvalue: int, weight: int, level: int,
                          character: DirichletCharacter, precision: int | None = None) -> EigenSystem:
    """Read a normalised eigensystem off a q-expansion with unit a_1."""
    ctx = f.ctx
    if f.coeffs[1] % ctx.p == 0:
        raise NonUnitA1(f"a_1 = {f.coeffs[1]} is not a unit")
    inv = pow(f.coeffs[1], -1, ctx.modulus)
    a = tuple(c * inv % ctx.modulus for c in f.coeffs[1:])
    return EigenSystem(ctx, weight, level, character, up_eigenvalue % ctx.modulus, a,
                       ctx.prec if precision is None else precision)
