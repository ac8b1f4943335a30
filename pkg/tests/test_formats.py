import pytest
from hypothesis import given
from hypothesis import strategies as st

from padicmf import formats
from padicmf.errors import FormatError

CHARS = st.sampled_from(["trivial", "kronecker:-23", "kronecker:-4", "table:3:1,124"])


@st.composite
def headers(draw):
    p = draw(st.sampled_from([5, 7, 11, 13]))
    return formats.Header(p, draw(st.integers(1, 6)), draw(st.integers(1, 40)),
                          draw(st.integers(5, 500)), draw(st.integers(1, 60)), draw(CHARS))


def residues(h, n):
    return st.lists(st.integers(0, h.p**h.prec - 1), min_size=n, max_size=n).map(tuple)


@st.composite
def q_records(draw):
    h = draw(headers())
    return formats.QRecord(h, draw(residues(h, h.qprec + 1)))


@st.composite
def basis_records(draw):
    h = draw(headers())
    d = draw(st.integers(0, 4))
    rows = tuple(draw(residues(h, h.qprec + 1)) for _ in range(d))
    return formats.BasisRecord(h, rows, draw(st.none() | st.integers(0, 50)),
                               draw(st.none() | st.integers(0, 500)),
                               draw(st.sampled_from(["generated", "cas", "eta-products"])),
                               draw(st.booleans()))


@st.composite
def eigen_records(draw):
    h = draw(headers())
    up = draw(st.integers(0, h.p**h.prec - 1))
    return formats.EigenRecord(h, up, draw(residues(h, h.qprec)),
                               draw(st.none() | st.integers(0, h.prec)))


@st.composite
def matrix_records(draw):
    n = draw(st.integers(0, 5))
    key = (5, 4, draw(st.integers(1, 300)), 11, draw(st.integers(1, 30)),
           draw(CHARS), draw(st.integers(0, 9)))
    rows = tuple(tuple(draw(st.integers(0, 624)) for _ in range(n)) for _ in range(n))
    return formats.MatrixRecord(key, rows)


names = st.from_regex(r"[a-z][a-z0-9_]{0,20}", fullmatch=True)


@st.composite
def report_records(draw):
    checks = tuple((draw(names), draw(st.booleans()), draw(st.integers(0, 9)))
                   for _ in range(draw(st.integers(0, 6))))
    data = tuple((draw(names), str(draw(st.integers(0, 10**6))))
                 for _ in range(draw(st.integers(0, 4))))
    return formats.ReportRecord(checks, data)


@given(q_records())
def test_mfq_round_trip(tmp_path_factory, rec):
    path = tmp_path_factory.mktemp("q") / "f.mfq"
    formats.write_mfq(rec, path)
    assert formats.read_mfq(path) == rec


@given(basis_records())
def test_mfb_round_trip(tmp_path_factory, rec):
    path = tmp_path_factory.mktemp("b") / "f.mfb"
    formats.write_mfb(rec, path)
    assert formats.read_mfb(path) == rec


@given(eigen_records())
def test_mfe_round_trip(tmp_path_factory, rec):
    path = tmp_path_factory.mktemp("e") / "f.mfe"
    formats.write_mfe(rec, path)
    assert formats.read_mfe(path) == rec


@given(matrix_records())
def test_mfx_round_trip(tmp_path_factory, rec):
    path = tmp_path_factory.mktemp("x") / "f.mfx"
    formats.write_mfx(rec, path)
    assert formats.read_mfx(path) == rec


@given(report_records())
def test_mfr_round_trip(tmp_path_factory, rec):
    path = tmp_path_factory.mktemp("r") / "f.mfr"
    formats.write_mfr(rec, path)
    assert formats.read_mfr(path) == rec


def test_mfq_layout_is_exact(tmp_path):
    rec = formats.QRecord(formats.Header(5, 2, 3, 11, 2, "trivial"), (1, 2, 3, 24))
    path = tmp_path / "f.mfq"
    formats.write_mfq(rec, path)
    assert path.read_bytes() == (b"MFQ 1\np=5 prec=2 qprec=3\nlevel=11 weight=2 char=trivial\n"
                                 b"coeffs: 1 2 3 24\n")


def test_mfr_line_format():
    rec = formats.ReportRecord((("alpha_ok", True, 3), ("beta", False, 0)))
    assert formats.mfr_lines(rec) == ["MFR 1", "check alpha_ok pass prec=3",
                                      "check beta fail prec=0"]


@pytest.mark.parametrize("text, reader", [
    ("MFQ 2\np=5 prec=2 qprec=1\nlevel=11 weight=2 char=trivial\ncoeffs: 1 2\n", formats.read_mfq),
    ("MFQ 1\np=5 prec=2 qprec=2\nlevel=11 weight=2 char=trivial\ncoeffs: 1 2\n", formats.read_mfq),
    ("MFQ 1\np=5 prec=2 qprec=1\nlevel=11 weight=2 char=trivial\ncoeffs: 1 25\n", formats.read_mfq),
    ("MFQ 1\np=5 prec=x qprec=1\nlevel=11 weight=2 char=trivial\ncoeffs: 1 2\n", formats.read_mfq),
    ("MFE 1\np=5 prec=2 qprec=1\nlevel=11 weight=2 char=trivial\na: 1 2\n", formats.read_mfe),
    ("MFR 1\ncheck x maybe prec=1\n", formats.read_mfr),
    ("MFX 1\n(5,4,10,11,2,trivial,7)\nn=2\n1 2\n", formats.read_mfx),
    ("", formats.read_mfq),
])
def test_malformed_files_raise(tmp_path, text, reader):
    path = tmp_path / "bad"
    path.write_text(text)
    with pytest.raises(FormatError):
        reader(path)


def test_rejects_names_with_spaces():
    with pytest.raises(FormatError):
        formats.mfr_lines(formats.ReportRecord((("two words", True, 1),)))


def test_key_round_trip():
    key = (5, 4, 200, 11, 2, "kronecker:-23", 7)
    assert formats.parse_key(formats.format_key(key)) == key
