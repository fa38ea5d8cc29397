"""Dense exact linear algebra over prime fields GF(p).

All matrices are numpy int64 arrays with entries reduced modulo p.
Everything here is exact: no floating point, no pivot tolerance.
A small pure-Python extension field GF(p^e) is provided for the
probabilistic rank checks, together with a generic Gaussian
elimination that works over it.
"""

from __future__ import annotations

import numpy as np

from .errors import InputError

DEFAULT_PRIME = 13


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def inv_mod(a: int, p: int) -> int:
    return pow(int(a) % p, p - 2, p)


def zeros(rows: int, cols: int) -> np.ndarray:
    return np.zeros((rows, cols), dtype=np.int64)


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def matmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    # Route through float64 BLAS: entries are < p, so every accumulated
    # value stays far below 2^53 and the product is exact.
    if a.shape[0] and a.shape[1] and b.shape[1]:
        prod = np.asarray(a, dtype=np.float64) @ np.asarray(b, dtype=np.float64)
        return prod.astype(np.int64) % p
    return zeros(a.shape[0], b.shape[1])


def rref(m: np.ndarray, p: int):
    """Reduced row-echelon form over GF(p).

    Returns (R, pivot_cols). rank(m) == len(pivot_cols).
    """
    a = np.array(m, dtype=np.int64) % p
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        # The pivot row is zero left of c (those columns are already
        # reduced), so elimination only needs to touch columns >= c and
        # the rows with a nonzero entry in the pivot column.
        a[r, c:] = (a[r, c:] * inv_mod(a[r, c], p)) % p
        col = a[:, c]
        hit = np.nonzero(col)[0]
        hit = hit[hit != r]
        if hit.size:
            a[hit, c:] = (a[hit, c:]
                          - np.outer(col[hit], a[r, c:])) % p
        pivots.append(c)
        r += 1
    return a, pivots


def rank(m: np.ndarray, p: int) -> int:
    if m.size == 0:
        return 0
    return len(rref(m, p)[1])


def kernel_basis(m: np.ndarray, p: int) -> np.ndarray:
    """Basis of the right null space, as columns of a (cols x nullity) matrix."""
    rows, cols = m.shape
    if cols == 0:
        return zeros(0, 0)
    if rows == 0:
        return identity(cols)
    r, pivots = rref(m, p)
    free = [c for c in range(cols) if c not in pivots]
    k = zeros(cols, len(free))
    for j, fc in enumerate(free):
        k[fc, j] = 1
        for i, pc in enumerate(pivots):
            k[pc, j] = (-r[i, fc]) % p
    return k


def solve(m: np.ndarray, b: np.ndarray, p: int):
    """Solve m x = b over GF(p); returns a solution vector or None."""
    rows, cols = m.shape
    b = np.asarray(b, dtype=np.int64) % p
    if b.shape[0] != rows:
        raise InputError(f"solve: got {b.shape[0]} entries for {rows} rows")
    aug = np.concatenate([m % p, b.reshape(rows, 1)], axis=1)
    r, pivots = rref(aug, p)
    if cols in pivots:
        return None
    x = np.zeros(cols, dtype=np.int64)
    for i, pc in enumerate(pivots):
        x[pc] = r[i, cols]
    return x


def solve_many(m: np.ndarray, b: np.ndarray, p: int):
    """Solve m X = B columnwise; returns X or None if any column is inconsistent."""
    rows, cols = m.shape
    ncols_b = b.shape[1]
    if ncols_b == 0:
        return zeros(cols, 0)
    aug = np.concatenate([m % p, b % p], axis=1)
    r, pivots = rref(aug, p)
    if any(pc >= cols for pc in pivots):
        return None
    x = zeros(cols, ncols_b)
    for i, pc in enumerate(pivots):
        x[pc] = r[i, cols:]
    return x


def column_space_projector(m: np.ndarray, p: int):
    """Row-reduce m and return (pivot column indices, rref matrix).

    The pivot columns of m form a basis of its column space.
    """
    r, pivots = rref(m, p)
    return pivots, r


def complement_basis(span: np.ndarray, dim: int, p: int):
    """Indices of standard basis vectors completing span's columns to GF(p)^dim."""
    if dim == 0:
        return []
    aug = np.concatenate([span % p, identity(dim)], axis=1) if span.size else identity(dim)
    _, pivots = rref(aug, p)
    ncols = span.shape[1] if span.size else 0
    return [pc - ncols for pc in pivots if pc >= ncols]


# ---------------------------------------------------------------------------
# Small extension fields GF(p^e) for the probabilistic rank check.
# ---------------------------------------------------------------------------

class ExtField:
    """GF(p^e) as polynomials modulo a fixed irreducible.

    Elements are tuples of e ints (coefficients of 1, t, t^2, ...).
    Only what the generic elimination needs is implemented.
    """

    def __init__(self, p: int, e: int, rng=None):
        if not is_prime(p):
            raise InputError(f"{p} is not prime")
        self.p = p
        self.e = e
        self.modulus = self._find_irreducible(rng)

    def _find_irreducible(self, rng):
        p, e = self.p, self.e
        if e == 1:
            return (0, 1)
        # Deterministic scan over monic polynomials of degree e.
        for code in range(p ** e):
            coeffs = []
            c = code
            for _ in range(e):
                coeffs.append(c % p)
                c //= p
            poly = tuple(coeffs) + (1,)
            if self._is_irreducible(poly):
                return poly
        raise InputError("no irreducible polynomial found")  # pragma: no cover

    def _is_irreducible(self, poly):
        # Brute-force root/factor test; fine for the tiny e used here.
        p, e = self.p, self.e
        if e <= 3:
            # Degree <= 3: irreducible iff no roots in GF(p).
            for a in range(p):
                if self._eval_int_poly(poly, a) % p == 0:
                    return False
            return True
        raise InputError("extension degree > 3 not supported")

    @staticmethod
    def _eval_int_poly(poly, a):
        v = 0
        for c in reversed(poly):
            v = v * a + c
        return v

    def zero(self):
        return (0,) * self.e

    def one(self):
        return (1,) + (0,) * (self.e - 1)

    def from_int(self, n: int):
        return (n % self.p,) + (0,) * (self.e - 1)

    def random(self, rng):
        return tuple(rng.randrange(self.p) for _ in range(self.e))

    def add(self, a, b):
        p = self.p
        return tuple((x + y) % p for x, y in zip(a, b))

    def neg(self, a):
        p = self.p
        return tuple((-x) % p for x in a)

    def mul(self, a, b):
        p, e = self.p, self.e
        prod = [0] * (2 * e - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] = (prod[i + j] + x * y) % p
        # Reduce modulo the monic irreducible.
        for i in range(2 * e - 2, e - 1, -1):
            c = prod[i]
            if c:
                prod[i] = 0
                for j in range(e):
                    prod[i - e + j] = (prod[i - e + j] - c * self.modulus[j]) % p
        return tuple(prod[:e])

    def inv(self, a):
        # Brute-force via Fermat in the multiplicative group.
        order = self.p ** self.e - 1
        result = self.one()
        base = a
        n = order - 1
        while n:
            if n & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            n >>= 1
        return result

    def is_zero(self, a):
        return all(x == 0 for x in a)

    def pow(self, a, n: int):
        result = self.one()
        base = a
        while n:
            if n & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            n >>= 1
        return result


def ext_rank(field: ExtField, mat) -> int:
    """Rank of a matrix with ExtField entries (list of rows of tuples)."""
    rows = [list(r) for r in mat]
    nrows = len(rows)
    ncols = len(rows[0]) if nrows else 0
    rank_ = 0
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, nrows):
            if not field.is_zero(rows[i][c]):
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = field.inv(rows[r][c])
        rows[r] = [field.mul(inv, x) for x in rows[r]]
        for i in range(nrows):
            if i != r and not field.is_zero(rows[i][c]):
                factor = field.neg(rows[i][c])
                rows[i] = [field.add(x, field.mul(factor, y))
                           for x, y in zip(rows[i], rows[r])]
        rank_ += 1
        r += 1
        if r == nrows:
            break
    return rank_
