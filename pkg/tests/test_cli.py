import json
import shutil
import subprocess

import pytest

from conftest import FIXTURES
from padicmf import formats
from padicmf.cli import main

L23 = ["--prime", "13", "--prec", "5", "--qprec", "300", "--level", "23",
       "--char", "kronecker:-23", "--fixtures", str(FIXTURES)]
EIGEN = [str(FIXTURES / "level23" / "g_alpha_23_p13.mfe"),
         str(FIXTURES / "level23" / "g_beta_23_p13.mfe")]
L11 = ["--fixtures", str(FIXTURES)]


def coeffs_of(text):
    line = next(ln for ln in text.splitlines() if ln.startswith("coeffs:"))
    return [int(x) for x in line.split()[1:]]


def test_gen_theta(capsys):
    assert main(["gen", "theta", "1", "1", "6", "--disc", "-23", *L23[:6]]) == 0
    out = capsys.readouterr().out
    assert out.startswith("MFQ 1\np=13 prec=5 qprec=300\nlevel=23 weight=1 char=kronecker:-23\n")
    a = coeffs_of(out)
    assert a[0] == 1 and a[1] == 2 and len(a) == 301


def test_gen_eisenstein_to_file(tmp_path):
    out = tmp_path / "sub" / "E.mfq"
    assert main(["gen", "eisenstein", "--qprec", "10", "--out", str(out)]) == 0
    rec = formats.read_mfq(out)
    assert rec.coeffs[1] == 240 and rec.header.weight == 4


def test_gen_eisenstein_with_character(capsys):
    args = ["gen", "eisenstein-char", "1", "--phi", "kronecker:-23", *L23[:6]]
    assert main(args) == 0
    a = coeffs_of(capsys.readouterr().out)
    assert a[1] == 1 and a[2] == 2  # 1 + chi(2)


@pytest.mark.parametrize("args", [
    ["gen", "theta", "1", "4", "2"],
    ["gen", "theta", "1", "1", "6", "--disc", "-20"],
    ["gen", "eisenstein-char", "2", "--phi", "kronecker:-23", "--prime", "13"],
    ["gen", "eisenstein", "--prime", "4"],
    ["selftest", "--threads", "0"],
    ["pipeline", "--char", "nonsense", *L11],
    ["pipeline", "--level", "4", *L11],
    ["pipeline", "--from-eigensystems", "/nonexistent.mfe", *L23],
    ["ordinary", "--weight", "3", *L11],
])
def test_bad_input_exits_2(args, capsys):
    assert main(args) == 2
    assert "padicmf:" in capsys.readouterr().err


def test_flagship_pipeline(tmp_path, capsys):
    code = main(["pipeline", *L23, "--from-eigensystems", *EIGEN, "--out", str(tmp_path)])
    assert code == 0
    report = formats.read_mfr(tmp_path / "report.mfr")
    assert report.checks and all(ok for _, ok, _ in report.checks)
    assert all(prec == 5 for _, _, prec in report.checks)
    assert dict(report.data)["pairs"] == "1"
    cert = formats.read_mfq(tmp_path / "certificate0.mfq")
    g = formats.read_mfq(FIXTURES / "level23" / "g_23_p13.mfq")
    assert cert.coeffs == g.coeffs
    assert cert.header.level == 23 and cert.header.weight == 1


def test_pipeline_without_pairs_exits_1(capsys):
    code = main(["pipeline", *L23, "--from-eigensystems", EIGEN[0], EIGEN[0]])
    assert code == 1
    assert "data pairs=0" in capsys.readouterr().out


def test_pipeline_at_level_eleven_has_no_pairs(capsys):
    assert main(["pipeline", "--weight", "2", *L11,
                 "--basis", str(FIXTURES / "level11" / "M2_11_p5.mfb")]) == 1


def test_pipeline_with_short_q_expansions_exits_3(capsys):
    assert main(["pipeline", "--weight", "2", "--qprec", "40", *L11]) == 3
    assert "precision exhausted" in capsys.readouterr().err


def test_selftest(capsys):
    assert main(["selftest"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("MFR 1\n") and " fail " not in out


def test_selftest_can_fail(capsys):
    assert main(["selftest", "--break-projection"]) == 1
    assert "check u_p_after_v_is_identity fail" in capsys.readouterr().out


def test_selftest_json(capsys):
    assert main(["selftest", "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["format"] == "MFR 1"
    assert all(c["status"] == "pass" for c in doc["checks"])


def test_cached_run_matches_cold_run(tmp_path, capsys, monkeypatch):
    monkeypatch.delenv("MF_CACHE_DIR", raising=False)
    cold, warm, cache = tmp_path / "cold", tmp_path / "warm", tmp_path / "cache"
    assert main(["ordinary", "--weight", "2", *L11, "--out", str(cold)]) == 0
    for _ in range(2):  # first fills the cache, second reads it
        shutil.rmtree(warm, ignore_errors=True)
        assert main(["ordinary", "--weight", "2", *L11, "--cache", str(cache),
                     "--out", str(warm)]) == 0
    assert len(list(cache.glob("*.mfx"))) == 1
    for f in cold.iterdir():
        assert f.read_bytes() == (warm / f.name).read_bytes()


def test_cache_directory_from_environment(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("MF_CACHE_DIR", str(tmp_path / "env"))
    assert main(["ordinary", "--weight", "2", *L11, "--cache", str(tmp_path / "flag")]) == 0
    assert list((tmp_path / "env").glob("*.mfx"))
    assert not (tmp_path / "flag").exists()


def test_thread_count_does_not_change_output(capsys):
    outs = []
    for threads in ("1", "4"):
        code = main(["ordinary", "--weight", "2", "6", "--qprec", "250", *L11,
                     "--threads", threads])
        outs.append((code, capsys.readouterr().out))
    assert outs[0] == outs[1]


def test_family_report(tmp_path, capsys):
    assert main(["family", "--weights", "2", "6", "--qprec", "250", *L11,
                 "--out", str(tmp_path)]) == 0
    rec = formats.read_mfr(tmp_path / "report.mfr")
    assert rec.checks == (("bijection_k2_k6", True, 1),)


def test_console_script_is_installed():
    exe = shutil.which("padicmf")
    if exe is None:
        pytest.skip("package not installed with its console script")
    done = subprocess.run([exe, "--help"], capture_output=True, text=True, check=False)
    assert done.returncode == 0 and "selftest" in done.stdout
