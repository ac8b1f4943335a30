"""Independent generators for the fixture files (levels 11 and 23).

Everything here uses plain integer series arithmetic and none of the
package's q-expansion or echelon code, so the files it writes can serve as
an oracle for the rest of the pipeline.

M_k(Gamma_0(11)) is spanned greedily by products of
E_2(q) - 11 E_2(q^11), the eta product eta(z)^2 eta(11z)^2, E_4, E_6 and
their q -> q^11 dilates.  Rank is tested modulo a large prime on the first
Sturm-bound coefficients and compared with the dimension formula; the span
is then saturated at p, so the rows form a Z_p-basis of the forms with
p-integral coefficients.  Cusp spaces come from S_k = f11 * M_{k-2}.

Run ``python -m padicmf.fixtures <outdir> [--set level23]`` to regenerate.
"""

from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np

from . import formats

LARGE_PRIME = 2**61 - 1
LEVEL = 11


def divisor_sums(n_max: int, t: int) -> list[int]:
    out = [0] * (n_max + 1)
    for d in range(1, n_max + 1):
        dt = d**t
        for m in range(d, n_max + 1, d):
            out[m] += dt
    return out


def eisenstein_level1(k: int, n_max: int) -> list[int]:
    """E_2, E_4, E_6 with constant term 1 (integral normalisations)."""
    c = {2: -24, 4: 240, 6: -504}[k]
    s = divisor_sums(n_max, k - 1)
    return [1] + [c * s[n] for n in range(1, n_max + 1)]


def eta_power_product(factors: dict[int, int], n_max: int) -> list[int]:
    """q^{sum d*e/24} prod_d prod_n (1 - q^{dn})^{e_d}; the shift must be integral."""
    shift24 = sum(d * e for d, e in factors.items())
    if shift24 % 24:
        raise ValueError("eta product has a fractional q-power")
    shift = shift24 // 24
    series = [1] + [0] * n_max
    for d, e in factors.items():
        for n in range(1, n_max // d + 1):
            step = d * n
            for _ in range(abs(e)):
                if e > 0:
                    for i in range(n_max, step - 1, -1):
                        series[i] -= series[i - step]
                else:
                    for i in range(step, n_max + 1):
                        series[i] += series[i - step]
    return [0] * shift + series[: n_max + 1 - shift]


def dilate(f: list[int], t: int) -> list[int]:
    out = [0] * len(f)
    for n in range(0, (len(f) - 1) // t + 1):
        out[n * t] = f[n]
    return out


def product(f: list[int], g: list[int], mod: int) -> list[int]:
    n = len(f)
    a = np.array([x % mod for x in f], dtype=object)
    b = np.array([x % mod for x in g], dtype=object)
    return [int(x) % mod for x in np.convolve(a, b)[:n]]


def dim_modular_forms(k: int) -> int:
    """dim M_k(Gamma_0(11)) for even k >= 0 (genus 1, two cusps, no elliptic points)."""
    if k == 0:
        return 1
    return k


def dim_cusp_forms(k: int) -> int:
    if k == 2:
        return 1
    return 0 if k == 0 else k - 2


class _FieldReducer:
    """Incremental row reduction over F_P."""

    def __init__(self, P: int):
        self.P = P
        self.rows: dict[int, list[int]] = {}

    def try_add(self, v: list[int]) -> bool:
        P = self.P
        v = [x % P for x in v]
        for col in sorted(self.rows):
            c = v[col]
            if c:
                r = self.rows[col]
                v = [(a - c * b) % P for a, b in zip(v, r)]
        lead = next((i for i, x in enumerate(v) if x), None)
        if lead is None:
            return False
        inv = pow(v[lead], -1, P)
        self.rows[lead] = [x * inv % P for x in v]
        return True


def _kernel_mod_p(rows: list[list[int]], p: int) -> list[int] | None:
    """A nonzero c with sum c_i rows_i = 0 mod p, or None."""
    d = len(rows)
    aug = [[x % p for x in r] + [int(i == j) for j in range(d)] for i, r in enumerate(rows)]
    ncols = len(rows[0])
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, d) if aug[i][col]), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = pow(aug[r][col], -1, p)
        aug[r] = [x * inv % p for x in aug[r]]
        for i in range(d):
            if i != r and aug[i][col]:
                f = aug[i][col]
                aug[i] = [(a - f * b) % p for a, b in zip(aug[i], aug[r])]
        r += 1
    if r == d:
        return None
    return aug[r][ncols:]


def saturate(rows_P: list[list[int]], rows_p: list[list[int]], p: int,
             digits: int) -> tuple[list[list[int]], list[list[int]], int]:
    """p-saturate the Z-span of integral rows.

    Each row is carried twice: mod the large prime P (exact rational
    information) and mod p^digits.  Returns both and the digits still valid.
    """
    rows_P = [list(r) for r in rows_P]
    rows_p = [list(r) for r in rows_p]
    P = LARGE_PRIME
    inv_p = pow(p, -1, P)
    while rows_p:
        c = _kernel_mod_p(rows_p, p)
        if c is None:
            break
        mod = p**digits
        i = next(j for j, x in enumerate(c) if x)
        inv = pow(c[i], -1, p)
        c = [x * inv % p for x in c]
        comb_p = [0] * len(rows_p[0])
        comb_P = [0] * len(rows_P[0])
        for cj, rp, rP in zip(c, rows_p, rows_P):
            if cj:
                comb_p = [(a + cj * b) % mod for a, b in zip(comb_p, rp)]
                comb_P = [(a + cj * b) % P for a, b in zip(comb_P, rP)]
        assert all(x % p == 0 for x in comb_p)
        digits -= 1
        rows_p[i] = [x // p for x in comb_p]
        rows_P[i] = [x * inv_p % P for x in comb_P]
        if digits < 1:
            raise ArithmeticError("saturation exhausted the working digits")
    return rows_P, rows_p, digits


def level11_spaces(kmax: int, qprec: int, p: int, digits: int = 200):
    """Saturated bases of M_k and S_k of Gamma_0(11) for even k <= kmax.

    Rows are residues mod p^d, where d is the returned per-weight digit count.
    """
    n = qprec
    P = LARGE_PRIME
    e2 = eisenstein_level1(2, n)
    gens = {
        "A": (2, [a - 11 * b for a, b in zip(e2, dilate(e2, LEVEL))]),
        "f11": (2, eta_power_product({1: 2, 11: 2}, n)),
        "E4": (4, eisenstein_level1(4, n)),
        "E4_11": (4, dilate(eisenstein_level1(4, n), LEVEL)),
        "E6": (6, eisenstein_level1(6, n)),
        "E6_11": (6, dilate(eisenstein_level1(6, n), LEVEL)),
    }
    one = [1] + [0] * n
    # weight -> (rows mod P, rows mod p^d, d)
    spaces: dict[int, tuple[list[list[int]], list[list[int]], int]] = {0: ([one], [one], digits)}
    for k in range(2, kmax + 1, 2):
        want = dim_modular_forms(k)
        sturm = k
        red = _FieldReducer(P)
        chosen_P: list[list[int]] = []
        chosen_p: list[list[int]] = []
        d = min(spaces[k - w][2] for w in (2, 4, 6) if k - w in spaces)
        for w, g in gens.values():
            if k - w not in spaces:
                continue
            src_P, src_p, _ = spaces[k - w]
            for hP, hp in zip(src_P, src_p):
                if len(chosen_P) == want:
                    break
                if red.try_add(product(g[: sturm + 1], hP[: sturm + 1], P)):
                    chosen_P.append(product(g, hP, P))
                    chosen_p.append(product(g, hp, p**d))
        if len(chosen_P) != want:
            raise ArithmeticError(f"weight {k}: rank {len(chosen_P)} but dim is {want}")
        spaces[k] = saturate(chosen_P, chosen_p, p, d)
    f11 = gens["f11"][1]
    full, cusp, digits_at = {}, {}, {}
    for k in range(0, kmax + 1, 2):
        full[k] = spaces[k][1]
        digits_at[k] = spaces[k][2]
    for k in range(2, kmax + 1, 2):
        cusp[k] = [product(f11, r, p ** digits_at[k - 2]) for r in full[k - 2]]
        assert len(cusp[k]) == dim_cusp_forms(k)
    return full, cusp, digits_at


def newform_11(n_max: int) -> list[int]:
    """The weight-2 newform of level 11 as eta(z)^2 eta(11z)^2."""
    return eta_power_product({1: 2, 11: 2}, n_max)


def write_level11(outdir, p: int = 5, prec: int = 8, qprec: int = 300,
                  weights=range(2, 51, 4)) -> list[Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    weights = list(weights)
    full, cusp, digits_at = level11_spaces(max(weights), qprec, p)
    mod = p**prec
    written = []
    for k in weights:
        if digits_at[k - 2] < prec or digits_at[k] < prec:
            raise ArithmeticError("not enough digits survived saturation")
        for kind, rows, dim in (("S", cusp[k], dim_cusp_forms(k)),
                                ("M", full[k], dim_modular_forms(k))):
            h = formats.Header(p, prec, qprec, LEVEL, k, "trivial")
            rec = formats.BasisRecord(
                h, tuple(tuple(x % mod for x in r) for r in rows),
                dim=dim, sturm=k, source="eta-products", cusp=kind == "S",
            )
            path = outdir / f"{kind}{k}_11_p{p}.mfb"
            formats.write_mfb(rec, path)
            written.append(path)
    h = formats.Header(p, prec, qprec, LEVEL, 2, "trivial")
    path = outdir / f"newform_11_2_p{p}.mfq"
    formats.write_mfq(formats.QRecord(h, tuple(x % mod for x in newform_11(qprec))), path)
    written.append(path)
    return written


def theta_counts(a: int, b: int, c: int, n_max: int) -> list[int]:
    """Representation numbers of a x^2 + b x y + c y^2 by brute force."""
    out = [0] * (n_max + 1)
    bound = 2 * int((n_max + 1) ** 0.5) + 2
    for x in range(-bound, bound + 1):
        for y in range(-bound, bound + 1):
            n = a * x * x + b * x * y + c * y * y
            if 0 <= n <= n_max:
                out[n] += 1
    return out


def weight_one_level23(n_max: int) -> list[int]:
    """(theta_[1,1,6] - theta_[2,1,3]) / 2."""
    t1 = theta_counts(1, 1, 6, n_max)
    t2 = theta_counts(2, 1, 3, n_max)
    return [(x - y) // 2 for x, y in zip(t1, t2)]


def quadratic_roots(trace: int, det: int, p: int, digits: int) -> list[int]:
    """Roots of X^2 - trace X + det mod p^digits, lifted one digit at a time
    by trying every digit (only simple roots mod p are lifted)."""
    roots = [r for r in range(p) if (r * r - trace * r + det) % p == 0]
    out = []
    for r in roots:
        if (2 * r - trace) % p == 0:
            continue
        x = r
        for e in range(1, digits):
            pe = p**e
            x = next(x + d * pe for d in range(p)
                     if ((x + d * pe) ** 2 - trace * (x + d * pe) + det) % (pe * p) == 0)
        out.append(x)
    return out


def write_level23(outdir, p: int = 13, prec: int = 5, qprec: int = 300) -> list[Path]:
    """Weight-one basis, the form g and its two p-stabilisations at level 23."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    mod = p**prec
    n = qprec
    g = weight_one_level23(n)
    chi_p = 1 if pow(-23 % p, (p - 1) // 2, p) == 1 else -1
    alpha, beta = quadratic_roots(g[p], chi_p, p, prec)
    char = "kronecker:-23"
    written = []
    h = formats.Header(p, prec, n, 23, 1, char)
    rows = (tuple(x % mod for x in theta_counts(1, 1, 6, n)),
            tuple(x % mod for x in theta_counts(2, 1, 3, n)))
    path = outdir / f"M1_23_p{p}.mfb"
    formats.write_mfb(formats.BasisRecord(h, rows, dim=2, sturm=2, source="theta-series"), path)
    written.append(path)
    path = outdir / f"g_23_p{p}.mfq"
    formats.write_mfq(formats.QRecord(h, tuple(x % mod for x in g)), path)
    written.append(path)
    for name, up, other in (("alpha", alpha, beta), ("beta", beta, alpha)):
        stab = [g[i] - (other * g[i // p] if i % p == 0 else 0) for i in range(n + 1)]
        rec = formats.EigenRecord(h, up % mod, tuple(x % mod for x in stab[1:]), prec)
        path = outdir / f"g_{name}_23_p{p}.mfe"
        formats.write_mfe(rec, path)
        written.append(path)
    return written


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description="write the fixture files")
    ap.add_argument("outdir")
    ap.add_argument("--set", choices=["level11", "level23"], default="level11")
    ap.add_argument("--prime", type=int, default=5)
    ap.add_argument("--prec", type=int, default=8)
    ap.add_argument("--qprec", type=int, default=300)
    ap.add_argument("--kmax", type=int, default=50)
    args = ap.parse_args(argv)
    if args.set == "level23":
        paths = write_level23(args.outdir)
    else:
        paths = write_level11(args.outdir, args.prime, args.prec, args.qprec,
                              range(2, args.kmax + 1, 4))
    for path in paths:
        print(path)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
