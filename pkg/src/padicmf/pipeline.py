"""Orchestration shared by the command line and the acceptance tests."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import gcd
from pathlib import Path

from . import formats
from .arith import DirichletCharacter, PrimeContext, parse_character
from .companion import (
    CompanionReport,
    WeightOneCertificate,
    certify,
    check_companion_eigensystems,
    pair_find,
)
from .errors import MissingSource
from .overconv import (
    EigenSystem,
    Extraction,
    KatzBasis,
    OrdinaryProjector,
    build_katz_basis,
    depth_heuristic,
    image_basis,
    ordinary_eigensystems,
    ordinary_projector,
    up_matrix,
)
from .qseries import QExpansion
from .spaces import BasisMatrix, ingest_basis


@dataclass(frozen=True)
class RunConfig:
    p: int
    prec: int
    qprec: int
    level: int
    char: str = "trivial"
    fixtures: Path = Path("fixtures")
    cache: Path | None = None
    out: Path | None = None
    threads: int = 1
    seed: int = 0

    def __post_init__(self):
        PrimeContext(self.p, self.prec, self.qprec)
        if self.level < 5:
            raise ValueError("level must be at least 5")
        if gcd(self.level, self.p) != 1:
            raise ValueError("level must be prime to p")
        if self.threads < 1:
            raise ValueError("threads must be positive")

    @property
    def ctx(self) -> PrimeContext:
        return PrimeContext(self.p, self.prec, self.qprec)

    @property
    def character(self) -> DirichletCharacter:
        return parse_character(self.char, self.ctx)


def find_fixture(root: Path, name: str) -> Path:
    root = Path(root)
    direct = root / name
    if direct.exists():
        return direct
    hits = sorted(root.rglob(name))
    if not hits:
        raise MissingSource(f"no fixture {name} under {root}")
    return hits[0]


def source_name(kind: str, k: int, level: int, p: int) -> str:
    return f"{kind}{k}_{level}_p{p}.mfb"


def load_sources(cfg: RunConfig, k: int, J: int, cusp: bool = True) -> list[BasisMatrix]:
    kind = "S" if cusp else "M"
    ctx = cfg.ctx
    return [ingest_basis(find_fixture(cfg.fixtures, source_name(kind, k + j * (cfg.p - 1),
                                                                 cfg.level, cfg.p)), ctx)
            for j in range(J + 1)]


@dataclass(frozen=True)
class OrdinaryRun:
    weight: int
    J: int
    katz: KatzBasis
    up: list[list[int]]
    projector: OrdinaryProjector
    image: BasisMatrix
    extraction: Extraction

    @property
    def rank(self) -> int:
        return self.projector.rank

    @property
    def systems(self) -> list[EigenSystem]:
        return self.extraction.systems


def run_ordinary(cfg: RunConfig, k: int, J: int | None = None, cusp: bool = True,
                 hecke_bound: int = 13) -> OrdinaryRun:
    ctx = cfg.ctx
    J = depth_heuristic(cfg.prec, cfg.p) if J is None else J
    sources = load_sources(cfg, k, J, cusp)
    KB = build_katz_basis(k, cfg.level, cfg.character, sources, J, ctx)
    A = up_matrix(KB, cfg.cache)
    P = ordinary_projector(A, cfg.p, cfg.prec)
    img = image_basis(KB, P)
    ex = ordinary_eigensystems(img, k, cfg.level, cfg.character, hecke_bound)
    return OrdinaryRun(k, J, KB, A, P, img, ex)


def run_many(cfg: RunConfig, weights: list[int], J: int | None = None,
             cusp: bool = True) -> list[OrdinaryRun]:
    """Independent weights in parallel; results come back in input order."""
    if cfg.threads == 1 or len(weights) < 2:
        return [run_ordinary(cfg, k, J, cusp) for k in weights]
    with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
        return list(pool.map(lambda k: run_ordinary(cfg, k, J, cusp), weights))


@dataclass(frozen=True)
class PairOutcome:
    first: EigenSystem
    second: EigenSystem
    certificate: WeightOneCertificate
    relations: CompanionReport


def certify_pairs(systems: list[EigenSystem], basis: BasisMatrix) -> list[PairOutcome]:
    """Combine every companion pair and test the result against ``basis``."""
    out = []
    for i, j in pair_find(systems):
        F, G = systems[i], systems[j]
        fa, fb = F.qexpansion(), G.qexpansion()
        ctx = basis.ctx
        T = min(fa.trunc, fb.trunc, ctx.qprec)
        fa = _to_ctx(fa, ctx, T)
        fb = _to_ctx(fb, ctx, T)
        prec = min(F.precision, G.precision)
        cert = certify(fa, fb, F.up_eigenvalue, G.up_eigenvalue, basis, F.character,
                       F.weight, prec)
        rel = check_companion_eigensystems(F, G)
        out.append(PairOutcome(F, G, cert, rel))
    return out


def _to_ctx(f: QExpansion, ctx: PrimeContext, T: int) -> QExpansion:
    return QExpansion(ctx, tuple(c % ctx.modulus for c in f.coeffs[: T + 1]))


def report_record(checks, data=()) -> formats.ReportRecord:
    return formats.ReportRecord(
        tuple((c.name, bool(c.holds), int(c.precision)) for c in checks),
        tuple((k, str(v)) for k, v in data),
    )
