"""Dense linear algebra and polynomial helpers over Z/p^N.

Matrices are lists of row lists of ints reduced into [0, p^N).  Row-vector
conventions throughout: a matrix A acts by v -> v A.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sympy.polys.domains import ZZ
from sympy.polys.matrices import DomainMatrix

from .arith import valuation
from .errors import NotInSpan

Matrix = list[list[int]]


# --- basic matrix arithmetic -------------------------------------------------


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def zeros(r: int, c: int) -> Matrix:
    return [[0] * c for _ in range(r)]


def _as_array(A: Matrix, mod: int, inner: int) -> np.ndarray:
    if (mod - 1) ** 2 * max(inner, 1) < 2**62:
        return np.asarray(A, dtype=np.int64).reshape(len(A), -1)
    return np.asarray(A, dtype=object).reshape(len(A), -1)


def matmul(A: Matrix, B: Matrix, mod: int) -> Matrix:
    if not A or not B:
        return [[] for _ in A] if A else []
    inner = len(B)
    X = _as_array(A, mod, inner)
    Y = _as_array(B, mod, inner)
    if X.dtype != Y.dtype:
        X, Y = X.astype(object), Y.astype(object)
    return [[int(x) % mod for x in row] for row in (X @ Y)]


def vecmat(v: list[int], A: Matrix, mod: int) -> list[int]:
    return matmul([v], A, mod)[0]


def matpow(A: Matrix, e: int, mod: int) -> Matrix:
    n = len(A)
    result = identity(n)
    base = [row[:] for row in A]
    while e:
        if e & 1:
            result = matmul(result, base, mod)
        e >>= 1
        if e:
            base = matmul(base, base, mod)
    return [[x % mod for x in row] for row in result]


def matsub(A: Matrix, B: Matrix, mod: int) -> Matrix:
    return [[(a - b) % mod for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def scalar_matrix(c: int, n: int, mod: int) -> Matrix:
    return [[c % mod if i == j else 0 for j in range(n)] for i in range(n)]


def reduce_matrix(A: Matrix, mod: int) -> Matrix:
    return [[x % mod for x in row] for row in A]


# --- echelon form with valuation pivoting ------------------------------------


@dataclass(frozen=True)
class Echelon:
    """Row-echelon form over Z/p^N.

    Pivot entries are normalised to exactly p^v; entries below a pivot are 0.
    """

    p: int
    prec: int
    rows: tuple[tuple[int, ...], ...]
    pivots: tuple[tuple[int, int], ...]  # (column, valuation) per row

    @property
    def rank(self) -> int:
        return len(self.rows)

    @property
    def precision_loss(self) -> int:
        return sum(v for _, v in self.pivots)

    @property
    def unit_rank(self) -> int:
        return sum(1 for _, v in self.pivots if v == 0)

    @property
    def max_pivot_column(self) -> int:
        return max((c for c, _ in self.pivots), default=-1)


def echelon(rows, p: int, prec: int) -> Echelon:
    """Echelonise ``rows``; in each column the pivot is the entry of least
    p-adic valuation among the remaining rows (ties: lowest index)."""
    mod = p**prec
    work = [[x % mod for x in r] for r in rows]
    ncols = len(work[0]) if work else 0
    pivots = []
    r = 0
    for col in range(ncols):
        if r >= len(work):
            break
        best, best_v = -1, prec
        for i in range(r, len(work)):
            x = work[i][col]
            if x:
                v = valuation(x, p, prec)
                if v < best_v:
                    best, best_v = i, v
                    if v == 0:
                        break
        if best < 0:
            continue
        if best != r:
            work[r], work[best] = work[best], work[r]
        pv = p**best_v
        unit = work[r][col] // pv
        inv = pow(unit, -1, mod)
        piv_row = [x * inv % mod for x in work[r]]
        work[r] = piv_row
        for i in range(r + 1, len(work)):
            x = work[i][col]
            if x:
                f = x // pv
                row = work[i]
                work[i] = [(a - f * b) % mod for a, b in zip(row, piv_row)]
        pivots.append((col, best_v))
        r += 1
    return Echelon(p, prec, tuple(tuple(w) for w in work[:r]), tuple(pivots))


def solve_in_echelon(target, ech: Echelon) -> list[int]:
    """Coordinates c with target == sum c_i rows_i on the columns of ``ech``.

    Pivots p^v leave each c_i determined only mod p^(prec - v), so success
    means agreement mod p^(prec - precision_loss).  Otherwise NotInSpan
    carries the valuation of the residual.
    """
    p, prec = ech.p, ech.prec
    mod = p**prec
    eff = prec - ech.precision_loss
    ncols = len(ech.rows[0]) if ech.rows else len(target)
    res = [x % mod for x in target[:ncols]]
    coords = []
    for (col, v), row in zip(ech.pivots, ech.rows):
        c = res[col] // p**v
        coords.append(c % mod)
        if c:
            res = [(a - c * b) % mod for a, b in zip(res, row)]
    if any(res):
        fail = min(valuation(x, p, prec) for x in res if x)
        if fail < eff:
            raise NotInSpan(fail)
    return coords


def rank(A: Matrix, p: int, prec: int) -> int:
    return echelon(A, p, prec).rank


def unit_rank(A: Matrix, p: int, prec: int) -> int:
    """Rank of the free part: number of unit pivots."""
    return echelon(A, p, prec).unit_rank


def inverse(A: Matrix, p: int, prec: int) -> Matrix:
    """Inverse of a matrix invertible over Z/p^N (unit determinant)."""
    n = len(A)
    mod = p**prec
    aug = [list(A[i]) + identity(n)[i] for i in range(n)]
    for col in range(n):
        piv = next((i for i in range(col, n) if aug[i][col] % p), None)
        if piv is None:
            raise ZeroDivisionError("matrix is not invertible mod p")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = pow(aug[col][col], -1, mod)
        aug[col] = [x * inv % mod for x in aug[col]]
        for i in range(n):
            if i != col and aug[i][col]:
                f = aug[i][col]
                aug[i] = [(a - f * b) % mod for a, b in zip(aug[i], aug[col])]
    return [row[n:] for row in aug]


# --- characteristic polynomials and factor lifting ---------------------------


def charpoly(A: Matrix, mod: int) -> list[int]:
    """det(X I - A) mod ``mod`` as coefficients low -> high (monic).

    Computed over Z from the integer lifts (division-free), then reduced.
    """
    n = len(A)
    if n == 0:
        return [1]
    dm = DomainMatrix([[ZZ(int(x)) for x in row] for row in A], (n, n), ZZ)
    high_to_low = [int(c) for c in dm.charpoly()]
    return [c % mod for c in reversed(high_to_low)]


def poly_trim(f: list[int]) -> list[int]:
    f = list(f)
    while len(f) > 1 and f[-1] == 0:
        f.pop()
    return f


def poly_mul(f: list[int], g: list[int], mod: int) -> list[int]:
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] += a * b
    return poly_trim([x % mod for x in out])


def poly_sub(f: list[int], g: list[int], mod: int) -> list[int]:
    n = max(len(f), len(g))
    f = f + [0] * (n - len(f))
    g = g + [0] * (n - len(g))
    return poly_trim([(a - b) % mod for a, b in zip(f, g)])


def poly_add(f: list[int], g: list[int], mod: int) -> list[int]:
    return poly_sub(f, [(-x) % mod for x in g], mod)


def poly_divmod(f: list[int], g: list[int], mod: int) -> tuple[list[int], list[int]]:
    """Division by a polynomial whose leading coefficient is a unit."""
    f = poly_trim([x % mod for x in f])
    g = poly_trim([x % mod for x in g])
    inv = pow(g[-1], -1, mod)
    if len(f) < len(g):
        return [0], f
    q = [0] * (len(f) - len(g) + 1)
    r = f[:]
    for i in range(len(f) - len(g), -1, -1):
        c = r[i + len(g) - 1] * inv % mod
        q[i] = c
        if c:
            for j, b in enumerate(g):
                r[i + j] = (r[i + j] - c * b) % mod
    r = poly_trim(r[: len(g) - 1] or [0])
    return poly_trim(q), r


def poly_eval(f: list[int], x: int, mod: int) -> int:
    acc = 0
    for c in reversed(f):
        acc = (acc * x + c) % mod
    return acc


def poly_derivative(f: list[int], mod: int) -> list[int]:
    return poly_trim([i * c % mod for i, c in enumerate(f)][1:] or [0])


def poly_xgcd(f: list[int], g: list[int], p: int) -> tuple[list[int], list[int], list[int]]:
    """(d, s, t) with s f + t g = d = gcd(f, g) (monic) over F_p."""
    r0, r1 = poly_trim([x % p for x in f]), poly_trim([x % p for x in g])
    s0, s1 = [1], [0]
    t0, t1 = [0], [1]
    while r1 != [0]:
        q, r = poly_divmod(r0, r1, p)
        r0, r1 = r1, r
        s0, s1 = s1, poly_sub(s0, poly_mul(q, s1, p), p)
        t0, t1 = t1, poly_sub(t0, poly_mul(q, t1, p), p)
    inv = pow(r0[-1], -1, p)
    return ([x * inv % p for x in r0], [x * inv % p for x in s0], [x * inv % p for x in t0])


def hensel_lift_pair(f: list[int], g: list[int], h: list[int], p: int, prec: int):
    """Lift a coprime factorisation f = g h (mod p) of a monic f to mod p^prec.

    g and h must be monic with coprime reductions mod p.
    """
    d, s, t = poly_xgcd(g, h, p)
    if d != [1]:
        raise ValueError("factors are not coprime mod p")
    mod = p**prec
    g = [x % mod for x in g]
    h = [x % mod for x in h]
    for i in range(1, prec):
        pi = p**i
        err = poly_sub(f, poly_mul(g, h, mod), mod)
        if any(x % pi for x in err):
            raise ValueError("factorisation is not correct mod p^i")
        e = [(x // pi) % p for x in err]
        # solve g dh + h dg = e (mod p) with deg dg < deg g
        _, dg = poly_divmod(poly_mul(t, e, p), g, p)
        rest = poly_sub(e, poly_mul(h, dg, p), p)
        dh, rem = poly_divmod(rest, g, p)
        if rem != [0]:
            raise AssertionError("Hensel step failed")
        g = poly_add(g, [pi * x for x in dg], mod)
        h = poly_add(h, [pi * x for x in dh], mod)
    return g, h


def roots_mod_p(f: list[int], p: int) -> list[tuple[int, int]]:
    """Roots of f in F_p with multiplicities, by exhaustive scan."""
    f = poly_trim([x % p for x in f])
    out = []
    for r in range(p):
        m = 0
        while len(f) > 1 and poly_eval(f, r, p) == 0:
            f, _ = poly_divmod(f, [(-r) % p, 1], p)
            m += 1
        if m:
            out.append((r, m))
    return out


def coprime_factorisation(f: list[int], p: int, prec: int):
    """Split a monic f (mod p^prec) as prod_r F_r * R where F_r reduces to
    (X - r)^{m_r} for the F_p-roots r and R has no roots mod p.

    Returns a list of (label, lifted factor); label is the root r, or None
    for the rootless remainder.
    """
    mod = p**prec
    roots = roots_mod_p(f, p)
    parts = []
    for r, m in roots:
        g = [1]
        for _ in range(m):
            g = poly_mul(g, [(-r) % p, 1], p)
        parts.append((r, g))
    rest = [x % p for x in f]
    for _, g in parts:
        rest, rem = poly_divmod(rest, g, p)
        assert rem == [0]
    if len(poly_trim(rest)) > 1:
        parts.append((None, poly_trim(rest)))
    out = []
    remaining = [x % mod for x in f]
    for i, (label, g) in enumerate(parts):
        if i == len(parts) - 1:
            out.append((label, remaining))
            break
        h = [1]
        for _, g2 in parts[i + 1:]:
            h = poly_mul(h, g2, p)
        G, H = hensel_lift_pair(remaining, g, h, p, prec)
        out.append((label, G))
        remaining = H
    return out


def poly_at_matrix(f: list[int], A: Matrix, mod: int) -> Matrix:
    """f(A) by Horner's rule."""
    n = len(A)
    acc = zeros(n, n)
    for c in reversed(f):
        acc = matmul(acc, A, mod) if n else acc
        for i in range(n):
            acc[i][i] = (acc[i][i] + c) % mod
    return acc


def hensel_root(f: list[int], r: int, p: int, prec: int) -> int:
    """Newton-lift a simple root r of f mod p to Z/p^prec."""
    mod = p**prec
    df = poly_derivative(f, mod)
    if poly_eval(df, r, p) % p == 0:
        raise ValueError("root is not simple mod p")
    x = r % mod
    for _ in range(prec.bit_length() + 1):
        x = (x - poly_eval(f, x, mod) * pow(poly_eval(df, x, mod), -1, mod)) % mod
    assert poly_eval(f, x, mod) == 0
    return x
