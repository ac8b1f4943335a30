"""Finite spaces of forms as echelonised coefficient matrices over Z/p^prec."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, partial
from typing import Callable

from sympy import divisors

from . import formats
from .arith import (
    DirichletCharacter,
    PrimeContext,
    is_fundamental_discriminant,
    kronecker_character,
    parse_character,
    trivial_character,
    valuation,
)
from .errors import (
    ContextMismatch,
    NotInSpan,
    NotStable,
    ParityViolation,
    TruncationTooShort,
)
from .linalg import Echelon, Matrix, echelon, solve_in_echelon
from .qseries import (
    FormMeta,
    QExpansion,
    eisenstein_constant,
    eisenstein_weight_char,
    t_q,
    u_p,
    u_q,
)


@dataclass(frozen=True)
class SpaceDescriptor:
    """What a basis claims to span.  ``dim`` and ``sturm`` come from whoever
    produced the fixture and are checked, not trusted."""

    level: int
    weight: int
    character: DirichletCharacter
    source: str = "generated"
    cusp: bool = False
    dim: int | None = None
    sturm: int | None = None

    def meta(self) -> FormMeta | None:
        try:
            return FormMeta(self.level, self.weight, self.character)
        except ValueError:
            return None


@dataclass(frozen=True)
class BasisMatrix:
    """Echelon basis: ``pivots[i] = (i, column, valuation)``; the pivot entry
    of row i is exactly p^valuation and everything below it is zero."""

    ctx: PrimeContext
    descriptor: SpaceDescriptor | None
    rows: tuple[QExpansion, ...]
    pivots: tuple[tuple[int, int, int], ...]
    trunc: int

    @property
    def rank(self) -> int:
        return len(self.rows)

    @property
    def precision_loss(self) -> int:
        return sum(v for _, _, v in self.pivots)

    @property
    def effective_precision(self) -> int:
        return max(self.ctx.prec - self.precision_loss, 0)

    @property
    def max_pivot_column(self) -> int:
        return max((c for _, c, _ in self.pivots), default=-1)

    @cached_property
    def echelon(self) -> Echelon:
        return Echelon(
            self.ctx.p, self.ctx.prec,
            tuple(r.coeffs for r in self.rows),
            tuple((c, v) for _, c, v in self.pivots),
        )

    def matrix(self) -> Matrix:
        return [list(r.coeffs) for r in self.rows]

    def combination(self, coords) -> QExpansion:
        """sum coords_i * row_i as a q-expansion."""
        m = self.ctx.modulus
        out = [0] * (self.trunc + 1)
        for c, row in zip(coords, self.rows):
            if c % m:
                for n, a in enumerate(row.coeffs):
                    out[n] += c * a
        meta = self.descriptor.meta() if self.descriptor else None
        return QExpansion(self.ctx, tuple(x % m for x in out), meta)


def echelonize(rows, descriptor: SpaceDescriptor | None = None, *,
               ctx: PrimeContext | None = None, trunc: int | None = None) -> BasisMatrix:
    """Echelon basis of the span of ``rows`` (minimal-valuation pivoting)."""
    rows = list(rows)
    if rows:
        ctx = ctx or rows[0].ctx
        for r in rows:
            if r.ctx.p != ctx.p or r.ctx.prec != ctx.prec:
                raise ContextMismatch("rows live over different rings")
        t = min(r.trunc for r in rows)
        trunc = t if trunc is None else min(trunc, t)
    elif ctx is None:
        raise ValueError("an empty basis needs an explicit ctx")
    trunc = ctx.qprec if trunc is None else trunc
    ech = echelon([r.coeffs[: trunc + 1] for r in rows], ctx.p, ctx.prec)
    meta = descriptor.meta() if descriptor else None
    cusp = bool(descriptor and descriptor.cusp)
    out_rows = tuple(
        QExpansion(ctx, row, meta, cusp and row[0] == 0) for row in ech.rows
    )
    pivots = tuple((i, c, v) for i, (c, v) in enumerate(ech.pivots))
    return BasisMatrix(ctx, descriptor, out_rows, pivots, trunc)


def membership(f: QExpansion, B: BasisMatrix) -> list[int]:
    """Coordinates of f in B, valid mod p^(prec - precision_loss).

    A target shorter than the basis is accepted when every pivot column is
    still visible; otherwise the answer would be underdetermined.
    """
    if f.ctx.p != B.ctx.p or f.ctx.prec != B.ctx.prec:
        raise ContextMismatch("form and basis live over different rings")
    T = min(f.trunc, B.trunc)
    if B.max_pivot_column > T:
        raise TruncationTooShort(
            f"target known to q^{f.trunc} but basis pivots reach q^{B.max_pivot_column}"
        )
    ech = B.echelon
    if T < B.trunc:
        ech = Echelon(ech.p, ech.prec, tuple(r[: T + 1] for r in ech.rows), ech.pivots)
    if not ech.rows:
        res = f.coeffs[: T + 1]
        if any(res):
            raise NotInSpan(min(B.ctx.valuation(x) for x in res if x))
        return []
    coords = solve_in_echelon(f.coeffs[: T + 1], ech)
    return coords


def check_truncation(B: BasisMatrix) -> None:
    """Require trunc >= the recorded Sturm bound, or >= 2*dim with a warning."""
    d = B.descriptor
    if d is not None and d.sturm is not None:
        if B.trunc < d.sturm:
            raise TruncationTooShort(f"trunc {B.trunc} is below the Sturm bound {d.sturm}")
        return
    if B.trunc < 2 * B.rank:
        raise TruncationTooShort(f"trunc {B.trunc} < 2 * dim = {2 * B.rank}")
    warnings.warn("no Sturm bound recorded; using trunc >= 2 * dim", stacklevel=2)


def operator(name: str) -> Callable[[QExpansion], QExpansion]:
    """``Up`` | ``T<q>`` | ``U<q>`` as a callable on q-expansions."""
    if name == "Up":
        return u_p
    if name[:1] in "TU" and name[1:].isdigit():
        q = int(name[1:])
        return partial(t_q, q=q) if name[0] == "T" else partial(u_q, q=q)
    raise ValueError(f"unknown operator {name!r}")


def hecke_matrix(B: BasisMatrix, op) -> Matrix:
    """A with op(row_i) = sum_j A_ij row_j; raises NotStable if some image
    leaves the span."""
    if isinstance(op, str):
        op = operator(op)
    out = []
    for i, row in enumerate(B.rows):
        image = op(row)
        try:
            out.append(membership(image, B))
        except NotInSpan as exc:
            raise NotStable(
                f"image of row {i} leaves the span (residual valuation {exc.valuation})"
            ) from exc
    return out


# --- file round trips --------------------------------------------------------


def _header(ctx: PrimeContext, trunc: int, meta_level: int, weight: int, char: str):
    return formats.Header(ctx.p, ctx.prec, trunc, meta_level, weight, char)


def qexpansion_to_record(f: QExpansion) -> formats.QRecord:
    if f.meta is None:
        h = _header(f.ctx, f.trunc, 0, 0, "none")
    else:
        h = _header(f.ctx, f.trunc, f.meta.level, f.meta.weight, f.meta.character.spec)
    return formats.QRecord(h, f.coeffs)


def _fit_ctx(h: formats.Header, ctx: PrimeContext) -> None:
    if h.p != ctx.p:
        raise ContextMismatch(f"file is for p = {h.p}, context has p = {ctx.p}")
    if h.prec < ctx.prec:
        raise ContextMismatch(f"file precision {h.prec} is below the working {ctx.prec}")


def qexpansion_from_record(rec: formats.QRecord, ctx: PrimeContext) -> QExpansion:
    h = rec.header
    _fit_ctx(h, ctx)
    meta = None
    if h.char != "none" and h.level > 0:
        meta = FormMeta(h.level, h.weight, parse_character(h.char, ctx))
    trunc = min(h.qprec, ctx.qprec)
    return QExpansion.from_coeffs(ctx, rec.coeffs[: trunc + 1], meta=meta)


def write_series(f: QExpansion, path) -> None:
    formats.write_mfq(qexpansion_to_record(f), path)


def read_series(path, ctx: PrimeContext) -> QExpansion:
    return qexpansion_from_record(formats.read_mfq(path), ctx)


def basis_to_record(B: BasisMatrix) -> formats.BasisRecord:
    d = B.descriptor
    if d is None:
        h = _header(B.ctx, B.trunc, 0, 0, "none")
        return formats.BasisRecord(h, tuple(r.coeffs for r in B.rows))
    h = _header(B.ctx, B.trunc, d.level, d.weight, d.character.spec)
    return formats.BasisRecord(h, tuple(r.coeffs for r in B.rows),
                               d.dim, d.sturm, d.source, d.cusp)


def basis_from_record(rec: formats.BasisRecord, ctx: PrimeContext,
                      source: str | None = None) -> BasisMatrix:
    h = rec.header
    _fit_ctx(h, ctx)
    trunc = min(h.qprec, ctx.qprec)
    desc = None
    if h.char != "none":
        desc = SpaceDescriptor(h.level, h.weight, parse_character(h.char, ctx),
                               source or rec.source, rec.cusp, rec.dim, rec.sturm)
    rows = [QExpansion.from_coeffs(ctx, r[: trunc + 1]) for r in rec.rows]
    return echelonize(rows, desc, ctx=ctx, trunc=trunc)


def write_basis(B: BasisMatrix, path) -> None:
    formats.write_mfb(basis_to_record(B), path)


def ingest_basis(path, ctx: PrimeContext) -> BasisMatrix:
    """Read an MFB file.  Files at higher precision or longer truncation than
    ``ctx`` are reduced to it."""
    return basis_from_record(formats.read_mfb(path), ctx)


# --- Eisenstein subspaces ----------------------------------------------------


def dilate(f: QExpansion, t: int) -> QExpansion:
    """f(q^t), truncated to f's own truncation."""
    coeffs = [0] * (f.trunc + 1)
    for n in range(f.trunc // t + 1):
        coeffs[n * t] = f.coeffs[n]
    return QExpansion(f.ctx, tuple(coeffs))


def _candidate_characters(level: int, ctx: PrimeContext) -> list[DirichletCharacter]:
    out = [trivial_character(ctx)]
    for m in divisors(level):
        for D in (m, -m):
            if D % ctx.p and is_fundamental_discriminant(D):
                out.append(kronecker_character(D, ctx))
    return out


def _same_on_level(a: DirichletCharacter, b: DirichletCharacter, level: int) -> bool:
    return a.induce(level).values == b.induce(level).values


def _eisenstein_row(k, psi, phi, ctx, trunc) -> QExpansion:
    """E_k^{psi,phi} scaled by a power of p so it is p-integral and nonzero
    mod p."""
    if psi.modulus == 1:
        c0 = eisenstein_constant(k, psi, phi)
    else:
        c0 = Fraction(0)
    shift = 0
    if c0 and c0.denominator % ctx.p == 0:
        shift = valuation(c0.denominator, ctx.p)
    f = eisenstein_weight_char(k, psi, phi, ctx, constant_term=0, trunc=trunc)
    m = ctx.modulus
    scale = ctx.p**shift
    c0_scaled = c0 * scale
    head = c0_scaled.numerator * pow(c0_scaled.denominator, -1, m) % m
    coeffs = (head,) + tuple(scale * a % m for a in f.coeffs[1:])
    return QExpansion(ctx, coeffs)


def generate_eisenstein_space(k: int, level: int, character: DirichletCharacter,
                              ctx: PrimeContext, trunc: int | None = None) -> BasisMatrix:
    """Span of E_k^{psi,phi}(q^t) over pairs with psi*phi = character and
    mod(psi)*mod(phi)*t | level.

    Only trivial and quadratic psi, phi are enumerated, which covers every
    trivial or quadratic nebentypus.  In weight 2 the trivial pair enters
    through E_2(q) - t E_2(q^t).
    """
    if k < 1:
        raise ValueError("weight must be positive")
    if character(-1) != (-1) ** k % ctx.modulus:
        raise ParityViolation(f"character parity does not match weight {k}")
    trunc = ctx.qprec if trunc is None else trunc
    desc = SpaceDescriptor(level, k, character, "generated")
    rows: list[QExpansion] = []
    chars = _candidate_characters(level, ctx)
    for i, psi in enumerate(chars):
        for j, phi in enumerate(chars):
            # E_1^{psi,phi} and E_1^{phi,psi} are one form; keep the first
            if k == 1 and j < i:
                continue
            mm = psi.modulus * phi.modulus
            if level % mm or not _same_on_level(psi * phi, character, level):
                continue
            if (psi(-1) * phi(-1)) % ctx.modulus != (-1) ** k % ctx.modulus:
                continue
            if k == 1 and psi.modulus == 1 and phi.modulus == 1:
                continue
            ts = divisors(level // mm)
            if k == 2 and mm == 1:
                base = eisenstein_weight_char(2, psi, phi, ctx, Fraction(-1, 24), trunc=trunc)
                m = ctx.modulus
                for t in ts[1:]:
                    d = dilate(base, t)
                    rows.append(QExpansion(ctx, tuple((a - t * b) % m for a, b in
                                                      zip(base.coeffs, d.coeffs))))
                continue
            base = _eisenstein_row(k, psi, phi, ctx, trunc)
            rows.extend(dilate(base, t) for t in ts)
    return echelonize(rows, desc, ctx=ctx, trunc=trunc)
