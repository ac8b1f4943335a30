"""Line-oriented text formats: MFQ (series), MFB (basis), MFE (eigensystem),
MFX (matrix cache) and MFR (report).

All formats are ASCII with '\\n' line endings and decimal integers.  Readers
and writers work on the plain record types below; conversion to the math
objects lives next to those objects.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import FormatError


@dataclass(frozen=True)
class Header:
    p: int
    prec: int
    qprec: int
    level: int
    weight: int
    char: str

    def lines(self) -> list[str]:
        return [
            f"p={self.p} prec={self.prec} qprec={self.qprec}",
            f"level={self.level} weight={self.weight} char={self.char}",
        ]


@dataclass(frozen=True)
class QRecord:
    header: Header
    coeffs: tuple[int, ...]


@dataclass(frozen=True)
class BasisRecord:
    header: Header
    rows: tuple[tuple[int, ...], ...]
    dim: int | None = None
    sturm: int | None = None
    source: str = "generated"
    cusp: bool = False


@dataclass(frozen=True)
class EigenRecord:
    header: Header
    up: int
    a: tuple[int, ...]  # a_1 .. a_M
    precision: int | None = None


@dataclass(frozen=True)
class MatrixRecord:
    key: tuple  # (p, prec, qprec, level, weight, char, J)
    rows: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class ReportRecord:
    checks: tuple[tuple[str, bool, int], ...]
    data: tuple[tuple[str, str], ...] = field(default=())


_TOKEN = re.compile(r"^[A-Za-z0-9_.:,+\-]+$")


def _kv(line: str, keys: list[str]) -> dict[str, str]:
    out = {}
    for tok in line.split():
        if "=" not in tok:
            raise FormatError(f"expected key=value, got {tok!r}")
        k, v = tok.split("=", 1)
        out[k] = v
    missing = [k for k in keys if k not in out]
    if missing:
        raise FormatError(f"missing {missing} in {line!r}")
    return out


def _int(s: str, what: str) -> int:
    try:
        return int(s)
    except ValueError:
        raise FormatError(f"bad integer for {what}: {s!r}") from None


def _ints(line: str, count: int | None, what: str) -> tuple[int, ...]:
    vals = tuple(_int(t, what) for t in line.split())
    if count is not None and len(vals) != count:
        raise FormatError(f"{what}: expected {count} values, got {len(vals)}")
    return vals


def _check_residues(vals, p: int, prec: int, what: str) -> None:
    m = p**prec
    for v in vals:
        if not 0 <= v < m:
            raise FormatError(f"{what}: {v} is not a residue mod {p}^{prec}")


def _read_lines(path) -> list[str]:
    text = Path(path).read_text(encoding="ascii")
    return [ln.rstrip("\r") for ln in text.split("\n") if ln.strip()]


def _parse_header(lines: list[str], start: int) -> Header:
    if len(lines) < start + 2:
        raise FormatError("truncated header")
    a = _kv(lines[start], ["p", "prec", "qprec"])
    b = _kv(lines[start + 1], ["level", "weight", "char"])
    return Header(
        _int(a["p"], "p"), _int(a["prec"], "prec"), _int(a["qprec"], "qprec"),
        _int(b["level"], "level"), _int(b["weight"], "weight"), b["char"],
    )


def _expect_magic(lines: list[str], magic: str) -> None:
    if not lines or lines[0].strip() != f"{magic} 1":
        raise FormatError(f"not an {magic} version 1 file")


def _write(path, lines: list[str]) -> None:
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


# --- MFQ ---------------------------------------------------------------------


def mfq_lines(rec: QRecord) -> list[str]:
    h = rec.header
    if len(rec.coeffs) != h.qprec + 1:
        raise FormatError("coefficient count must be qprec + 1")
    return ["MFQ 1", *h.lines(), "coeffs: " + " ".join(map(str, rec.coeffs))]


def write_mfq(rec: QRecord, path) -> None:
    _write(path, mfq_lines(rec))


def read_mfq(path) -> QRecord:
    lines = _read_lines(path)
    _expect_magic(lines, "MFQ")
    h = _parse_header(lines, 1)
    if len(lines) < 4 or not lines[3].startswith("coeffs:"):
        raise FormatError("missing coeffs line")
    body = " ".join([lines[3][len("coeffs:"):]] + lines[4:])
    coeffs = _ints(body, h.qprec + 1, "coeffs")
    _check_residues(coeffs, h.p, h.prec, "coeffs")
    return QRecord(h, coeffs)


# --- MFB ---------------------------------------------------------------------


def write_mfb(rec: BasisRecord, path) -> None:
    h = rec.header
    lines = ["MFB 1", *h.lines(), f"source={rec.source}", f"cusp={int(rec.cusp)}"]
    if rec.dim is not None:
        lines.append(f"dim={rec.dim}")
    if rec.sturm is not None:
        lines.append(f"sturm={rec.sturm}")
    lines.append(f"rows={len(rec.rows)}")
    for row in rec.rows:
        if len(row) != h.qprec + 1:
            raise FormatError("row length must be qprec + 1")
        lines.append(" ".join(map(str, row)))
    _write(path, lines)


def read_mfb(path) -> BasisRecord:
    lines = _read_lines(path)
    _expect_magic(lines, "MFB")
    h = _parse_header(lines, 1)
    i = 3
    extra: dict[str, str] = {}
    while i < len(lines) and not lines[i].startswith("rows="):
        extra.update(_kv(lines[i], []))
        i += 1
    if i >= len(lines):
        raise FormatError("missing rows= line")
    d = _int(lines[i].split("=", 1)[1], "rows")
    body = lines[i + 1:]
    if len(body) != d:
        raise FormatError(f"expected {d} rows, found {len(body)}")
    rows = tuple(_ints(ln, h.qprec + 1, "row") for ln in body)
    for r in rows:
        _check_residues(r, h.p, h.prec, "row")
    unknown = set(extra) - {"dim", "sturm", "source", "cusp"}
    if unknown:
        raise FormatError(f"unknown metadata {sorted(unknown)}")
    return BasisRecord(
        h, rows,
        dim=_int(extra["dim"], "dim") if "dim" in extra else None,
        sturm=_int(extra["sturm"], "sturm") if "sturm" in extra else None,
        source=extra.get("source", "ingested"),
        cusp=extra.get("cusp", "0") == "1",
    )


# --- MFE ---------------------------------------------------------------------


def write_mfe(rec: EigenRecord, path) -> None:
    h = rec.header
    if len(rec.a) != h.qprec:
        raise FormatError("need a_1 .. a_qprec")
    lines = ["MFE 1", *h.lines()]
    if rec.precision is not None:
        lines.append(f"precision={rec.precision}")
    lines += [f"up={rec.up}", "a: " + " ".join(map(str, rec.a))]
    _write(path, lines)


def read_mfe(path) -> EigenRecord:
    lines = _read_lines(path)
    _expect_magic(lines, "MFE")
    h = _parse_header(lines, 1)
    i = 3
    precision = None
    if i < len(lines) and lines[i].startswith("precision="):
        precision = _int(lines[i].split("=", 1)[1], "precision")
        i += 1
    if i + 1 >= len(lines) + 0 and i >= len(lines):
        raise FormatError("missing up= line")
    if not lines[i].startswith("up="):
        raise FormatError("missing up= line")
    up = _int(lines[i].split("=", 1)[1], "up")
    if i + 1 >= len(lines) or not lines[i + 1].startswith("a:"):
        raise FormatError("missing a: line")
    a = _ints(" ".join([lines[i + 1][2:]] + lines[i + 2:]), h.qprec, "a")
    _check_residues(a + (up,), h.p, h.prec, "eigenvalues")
    return EigenRecord(h, up, a, precision)


# --- MFX ---------------------------------------------------------------------


def format_key(key: tuple) -> str:
    return "(" + ",".join(str(k) for k in key) + ")"


def parse_key(s: str) -> tuple:
    s = s.strip()
    if not (s.startswith("(") and s.endswith(")")):
        raise FormatError(f"bad key line {s!r}")
    parts = s[1:-1].split(",")
    if len(parts) < 7:
        raise FormatError("key must have 7 fields")
    # the character spec may itself contain commas (table characters)
    head = [_int(x, "key") for x in parts[:5]]
    return (*head, ",".join(parts[5:-1]), _int(parts[-1], "key"))


def write_mfx(rec: MatrixRecord, path) -> None:
    n = len(rec.rows)
    lines = ["MFX 1", format_key(rec.key), f"n={n}"]
    for row in rec.rows:
        if len(row) != n:
            raise FormatError("matrix must be square")
        lines.append(" ".join(map(str, row)))
    _write(path, lines)


def read_mfx(path) -> MatrixRecord:
    lines = _read_lines(path)
    _expect_magic(lines, "MFX")
    if len(lines) < 3:
        raise FormatError("truncated MFX file")
    key = parse_key(lines[1])
    if not lines[2].startswith("n="):
        raise FormatError("missing n= line")
    n = _int(lines[2][2:], "n")
    body = lines[3:]
    if len(body) != n:
        raise FormatError(f"expected {n} rows, found {len(body)}")
    rows = tuple(_ints(ln, n, "matrix row") for ln in body)
    p, prec = key[0], key[1]
    for r in rows:
        _check_residues(r, p, prec, "matrix")
    return MatrixRecord(key, rows)


# --- MFR ---------------------------------------------------------------------


def write_mfr(rec: ReportRecord, path) -> None:
    _write(path, mfr_lines(rec))


def mfr_lines(rec: ReportRecord) -> list[str]:
    lines = ["MFR 1"]
    for name, ok, prec in rec.checks:
        if not _TOKEN.match(name):
            raise FormatError(f"check name {name!r} must be a single token")
        lines.append(f"check {name} {'pass' if ok else 'fail'} prec={prec}")
    for k, v in rec.data:
        if not _TOKEN.match(k) or (v and not _TOKEN.match(v)):
            raise FormatError(f"data entry {k}={v!r} must be single tokens")
        lines.append(f"data {k}={v}")
    return lines


def read_mfr(path) -> ReportRecord:
    lines = _read_lines(path)
    _expect_magic(lines, "MFR")
    checks, data = [], []
    for ln in lines[1:]:
        parts = ln.split()
        if parts[0] == "check" and len(parts) == 4 and parts[3].startswith("prec="):
            if parts[2] not in ("pass", "fail"):
                raise FormatError(f"bad status {parts[2]!r}")
            checks.append((parts[1], parts[2] == "pass", _int(parts[3][5:], "prec")))
        elif parts[0] == "data" and len(parts) == 2 and "=" in parts[1]:
            k, v = parts[1].split("=", 1)
            data.append((k, v))
        else:
            raise FormatError(f"unrecognised report line {ln!r}")
    return ReportRecord(tuple(checks), tuple(data))
