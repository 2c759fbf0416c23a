"""Exact linear algebra over F_p, Z/p^m and the p-local integers Z_(p).

Matrices wrap numpy arrays.  Modular modes keep int64 entries reduced into
``[0, p^m)`` whenever products cannot overflow, and fall back to Python
integers (object arrays) otherwise.  p-local matrices hold Python ints or
:class:`fractions.Fraction` values whose denominators are prime to p; an
integral p-local matrix with small entries is stored as int64 for speed and
promoted to exact objects before any product that could overflow.

Nothing here uses floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

PRIME = "prime"
TRUNCATION = "truncation"
PLOCAL = "plocal"

_INT64_SAFE = 2**62
_MODES = (PRIME, TRUNCATION, PLOCAL)


class RingError(ValueError):
    """Raised on wrong or mixed ring modes."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class RingSpec:
    """Coefficient ring: F_p, Z/p^m, or Z_(p) (rationals with denominator prime to p)."""

    mode: str
    p: int
    m: int = 1

    def __post_init__(self) -> None:
        if self.mode not in _MODES:
            raise RingError(f"unknown ring mode {self.mode!r}")
        if not is_prime(self.p):
            raise RingError(f"p={self.p} is not prime")
        if self.m < 1:
            raise RingError("precision exponent m must be >= 1")
        if self.mode != TRUNCATION and self.m != 1:
            raise RingError(f"{self.mode} ring carries no precision exponent")

    @property
    def modulus(self) -> int | None:
        if self.mode == PLOCAL:
            return None
        return self.p**self.m

    @property
    def is_modular(self) -> bool:
        return self.mode != PLOCAL

    @property
    def residue_field(self) -> "RingSpec":
        return PrimeField(self.p)

    def __str__(self) -> str:
        if self.mode == PRIME:
            return f"F_{self.p}"
        if self.mode == TRUNCATION:
            return f"Z/{self.p}^{self.m}"
        return f"Z_({self.p})"

    def to_dict(self) -> dict:
        d = {"mode": self.mode, "p": self.p}
        if self.mode == TRUNCATION:
            d["m"] = self.m
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RingSpec":
        return cls(d["mode"], int(d["p"]), int(d.get("m", 1)))

    # -- scalar and array coercion ------------------------------------------

    def scalar(self, x) -> int | Fraction:
        """Coerce a Python number into this ring (validating p-locality)."""
        x = _as_rational(x)
        if self.mode == PLOCAL:
            if isinstance(x, Fraction):
                if x.denominator % self.p == 0:
                    raise RingError(f"{x} is not {self.p}-local")
                return int(x) if x.denominator == 1 else x
            return x
        q = self.modulus
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise RingError(f"{x} cannot be reduced mod {self.p}")
            return (x.numerator * pow(x.denominator, -1, q)) % q
        return x % q

    def array(self, data) -> np.ndarray:
        """Coerce nested data (or an array) into a canonical 2-d array for this ring."""
        a = np.asarray(data, dtype=object) if not isinstance(data, np.ndarray) else data
        if a.ndim == 1 and a.size == 0:
            a = a.reshape(0, 0)
        if a.ndim != 2:
            raise RingError("matrix data must be two-dimensional")
        if a.dtype != object and np.issubdtype(a.dtype, np.integer):
            if self.is_modular:
                q = self.modulus
                if q * q < _INT64_SAFE:
                    return np.mod(a.astype(np.int64), q)
                a = a.astype(object)
            else:
                return _compact(a.astype(object)) if np.abs(a).max(initial=0) >= 2**31 else a.astype(np.int64)
        out = np.empty(a.shape, dtype=object)
        for idx, x in np.ndenumerate(a):
            out[idx] = self.scalar(x)
        return self.normalize(out)

    def normalize(self, a: np.ndarray) -> np.ndarray:
        """Reduce and choose the storage dtype for an integer/object array."""
        if self.is_modular:
            q = self.modulus
            if q * q < _INT64_SAFE:
                if a.dtype == object:
                    return np.array([[int(x) % q for x in row] for row in a], dtype=np.int64).reshape(a.shape)
                return np.mod(a, q).astype(np.int64, copy=False)
            return np.mod(a.astype(object), q)
        return _compact(a)

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        inner = a.shape[-1]
        if self.is_modular:
            q = self.modulus
            if a.dtype == np.int64 and b.dtype == np.int64 and q * q * max(inner, 1) < _INT64_SAFE:
                return np.mod(a @ b, q)
            return self.normalize(np.asarray(a, dtype=object) @ np.asarray(b, dtype=object))
        if a.dtype == np.int64 and b.dtype == np.int64:
            bound = int(np.abs(a).max(initial=0)) * int(np.abs(b).max(initial=0)) * max(inner, 1)
            if bound < _INT64_SAFE:
                return a @ b
        return _compact(np.asarray(a, dtype=object) @ np.asarray(b, dtype=object))

    def zeros(self, rows: int, cols: int) -> np.ndarray:
        return np.zeros((rows, cols), dtype=np.int64)

    def eye(self, n: int) -> np.ndarray:
        return np.eye(n, dtype=np.int64)


def PrimeField(p: int) -> RingSpec:
    return RingSpec(PRIME, p)


def Truncation(p: int, m: int) -> RingSpec:
    return RingSpec(TRUNCATION, p, m)


def PLocal(p: int) -> RingSpec:
    return RingSpec(PLOCAL, p)


def _as_rational(x):
    if isinstance(x, (bool, np.bool_)):
        return int(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        raise RingError("floating point entries are not allowed")
    raise RingError(f"unsupported scalar {x!r}")


def _compact(a: np.ndarray) -> np.ndarray:
    """Store an exact p-local array as int64 when every entry is a small integer."""
    if a.dtype != object:
        return a
    ints = np.empty(a.shape, dtype=object)
    for idx, x in np.ndenumerate(a):
        if isinstance(x, Fraction):
            if x.denominator != 1:
                return a
            x = x.numerator
        x = int(x)
        if abs(x) >= 2**31:
            return a
        ints[idx] = x
    return ints.astype(np.int64) if a.size else np.zeros(a.shape, dtype=np.int64)


def plocal_scalar(x, p: int) -> Fraction:
    """Validate and return ``x`` as an element of Z_(p) (lowest terms)."""
    f = Fraction(_as_rational(x))
    if f.denominator % p == 0:
        raise RingError(f"{f} is not {p}-local")
    return f


def valuation(x, p: int) -> float | int:
    """p-adic valuation of a nonzero rational; ``math.inf`` for zero."""
    f = Fraction(_as_rational(x))
    if f == 0:
        return math.inf
    return _ival(f.numerator, p) - _ival(f.denominator, p)


def _ival(n: int, p: int) -> int:
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


# ---------------------------------------------------------------------------
# Matrix
# ---------------------------------------------------------------------------


class Matrix:
    """Immutable matrix over a :class:`RingSpec`."""

    __slots__ = ("ring", "_a")

    def __init__(self, ring: RingSpec, data, *, _trusted: bool = False):
        self.ring = ring
        a = data if _trusted else ring.array(data)
        a = a.view()
        a.flags.writeable = False
        self._a = a

    @classmethod
    def from_rows(cls, ring: RingSpec, rows: Sequence[Sequence], cols: int | None = None) -> "Matrix":
        rows = [list(r) for r in rows]
        if not rows:
            return cls.zeros(ring, 0, cols or 0)
        return cls(ring, rows)

    @classmethod
    def zeros(cls, ring: RingSpec, rows: int, cols: int) -> "Matrix":
        return cls(ring, ring.zeros(rows, cols), _trusted=True)

    @classmethod
    def identity(cls, ring: RingSpec, n: int) -> "Matrix":
        return cls(ring, ring.eye(n), _trusted=True)

    @classmethod
    def diagonal(cls, ring: RingSpec, entries: Sequence, rows: int, cols: int) -> "Matrix":
        a = np.zeros((rows, cols), dtype=object)
        for i, x in enumerate(entries):
            a[i, i] = x
        return cls(ring, a)

    @property
    def array(self) -> np.ndarray:
        return self._a

    @property
    def rows(self) -> int:
        return self._a.shape[0]

    @property
    def cols(self) -> int:
        return self._a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._a.shape

    def entries(self) -> list[list]:
        return [[x if isinstance(x, Fraction) else int(x) for x in row] for row in self._a.tolist()]

    def __getitem__(self, idx):
        x = self._a[idx]
        if isinstance(x, np.ndarray):
            return x
        return x if isinstance(x, Fraction) else int(x)

    def _check(self, other: "Matrix") -> None:
        if not isinstance(other, Matrix):
            raise TypeError("expected a Matrix")
        if other.ring != self.ring:
            raise RingError(f"ring mismatch: {self.ring} vs {other.ring}")

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        return Matrix(self.ring, self.ring.matmul(self._a, other._a), _trusted=True)

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        return Matrix(self.ring, self.ring.normalize(_exact(self._a) + _exact(other._a)), _trusted=True)

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        return Matrix(self.ring, self.ring.normalize(_exact(self._a) - _exact(other._a)), _trusted=True)

    def __neg__(self) -> "Matrix":
        return Matrix(self.ring, self.ring.normalize(-_exact(self._a)), _trusted=True)

    def scale(self, c) -> "Matrix":
        c = self.ring.scalar(c)
        return Matrix(self.ring, self.ring.normalize(_exact(self._a) * c), _trusted=True)

    @property
    def T(self) -> "Matrix":
        return Matrix(self.ring, self._a.T.copy(), _trusted=True)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.ring == other.ring and self.shape == other.shape and bool(np.all(self._a == other._a))

    def __hash__(self):
        return hash((self.ring, self.shape, tuple(map(tuple, self.entries()))))

    def is_zero(self) -> bool:
        return not np.any(self._a != 0)

    def reduce(self, ring: RingSpec) -> "Matrix":
        """Explicit change of coefficients (Z_(p) -> Z/p^m -> F_p)."""
        if ring.p != self.ring.p:
            raise RingError("cannot change the prime")
        if self.ring.mode == PLOCAL or (ring.is_modular and self.ring.modulus % ring.modulus == 0):
            return Matrix(ring, self._a)
        raise RingError(f"no reduction map {self.ring} -> {ring}")

    def hstack(self, other: "Matrix") -> "Matrix":
        self._check(other)
        return Matrix(self.ring, np.hstack([_exact(self._a), _exact(other._a)]) if self._a.dtype != other._a.dtype else np.hstack([self._a, other._a]))

    def vstack(self, other: "Matrix") -> "Matrix":
        self._check(other)
        return Matrix(self.ring, np.vstack([_exact(self._a), _exact(other._a)]) if self._a.dtype != other._a.dtype else np.vstack([self._a, other._a]))

    def __repr__(self) -> str:
        return f"Matrix({self.ring}, {self.entries()})"


def _exact(a: np.ndarray) -> np.ndarray:
    return a if a.dtype == object else a.astype(object)


# ---------------------------------------------------------------------------
# F_p
# ---------------------------------------------------------------------------


def rref_mod(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over F_p; returns (nonzero rows, pivot columns)."""
    w = np.mod(np.asarray(a, dtype=np.int64), p)
    nrows, ncols = w.shape
    r = 0
    pivots: list[int] = []
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.flatnonzero(w[r:, c])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            w[[r, i]] = w[[i, r]]
        w[r] = (w[r] * pow(int(w[r, c]), -1, p)) % p
        col = w[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            w[hit] = (w[hit] - np.outer(col[hit], w[r])) % p
        pivots.append(c)
        r += 1
    return w[:r], pivots


def rank_mod(a: np.ndarray, p: int) -> int:
    a = np.asarray(a)
    if a.size == 0:
        return 0
    # eliminate along the shorter side
    if a.shape[0] > a.shape[1]:
        a = a.T
    return len(rref_mod(a, p)[1])


def nullspace_mod(a: np.ndarray, p: int) -> np.ndarray:
    """Columns spanning {x : a x = 0} over F_p."""
    a = np.asarray(a)
    n = a.shape[1]
    if a.shape[0] == 0:
        return np.eye(n, dtype=np.int64)
    r, piv = rref_mod(a, p)
    free = [c for c in range(n) if c not in set(piv)]
    basis = np.zeros((n, len(free)), dtype=np.int64)
    for k, f in enumerate(free):
        basis[f, k] = 1
        for i, pc in enumerate(piv):
            basis[pc, k] = (-r[i, f]) % p
    return basis


def solve_mod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray | None:
    """One solution x of a x = b over F_p (b may have several columns), or None."""
    a = np.mod(np.asarray(a, dtype=np.int64), p)
    b = np.mod(np.asarray(b, dtype=np.int64), p)
    n = a.shape[1]
    aug = np.hstack([a, b])
    r, piv = rref_mod(aug, p)
    if any(c >= n for c in piv):
        return None
    x = np.zeros((n, b.shape[1]), dtype=np.int64)
    for i, pc in enumerate(piv):
        x[pc] = r[i, n:]
    return x


def inv_mod(a: np.ndarray, p: int) -> np.ndarray:
    n = a.shape[0]
    x = solve_mod(a, np.eye(n, dtype=np.int64), p)
    if x is None or rank_mod(a, p) != n:
        raise ValueError("matrix is singular mod p")
    return x


def column_basis_mod(a: np.ndarray, p: int) -> list[int]:
    """Indices of columns of ``a`` forming a basis of its column space mod p."""
    if a.shape[1] == 0:
        return []
    return rref_mod(a, p)[1]


# ---------------------------------------------------------------------------
# Z/p^m (Howell form)
# ---------------------------------------------------------------------------


def _val_mod(x: np.ndarray, p: int, m: int) -> np.ndarray:
    """Valuations of residues mod p^m (value m for zero)."""
    v = np.zeros(x.shape, dtype=np.int64)
    t = x.copy()
    alive = t != 0
    v[~alive] = m
    for _ in range(m):
        div = alive & (t % p == 0)
        if not div.any():
            break
        v[div] += 1
        t[div] //= p
    return v


def howell_array(a: np.ndarray, p: int, m: int) -> np.ndarray:
    """Howell normal form of the row span of ``a`` over Z/p^m.

    Pivots are powers of p with entries above each pivot reduced into
    ``[0, pivot)``.  For every pivot p^v with v > 0 the row multiplied by
    p^(m-v) is fed back into the elimination, which gives the Howell property:
    any span element vanishing in the first j columns is a combination of the
    rows whose pivot lies beyond column j.
    """
    q = p**m
    w = np.mod(np.asarray(a, dtype=np.int64 if q * q < _INT64_SAFE else object), q)
    if w.dtype == object:
        w = w.astype(object)
    ncols = w.shape[1]
    r = 0
    for c in range(ncols):
        if r >= w.shape[0]:
            break
        col = w[r:, c]
        nz = np.flatnonzero(col != 0)
        if nz.size == 0:
            continue
        vals = _val_mod(np.asarray(col[nz]), p, m)
        k = int(np.argmin(vals))
        i = r + int(nz[k])
        v = int(vals[k])
        if i != r:
            w[[r, i]] = w[[i, r]]
        pv = p**v
        u = int(w[r, c]) // pv
        w[r] = (w[r] * pow(u, -1, q)) % q
        below = w[r + 1 :, c]
        hit = np.flatnonzero(below != 0)
        if hit.size:
            f = below[hit] // pv
            w[r + 1 + hit] = (w[r + 1 + hit] - np.outer(f, w[r])) % q
        if r:
            f = w[:r, c] // pv
            hit = np.flatnonzero(f != 0)
            if hit.size:
                w[hit] = (w[hit] - np.outer(f[hit], w[r])) % q
        if v > 0:
            extra = (w[r] * (p ** (m - v))) % q
            if np.any(extra != 0):
                w = np.vstack([w, extra[None, :]])
        r += 1
    return w[:r]


def howell_kernel_array(a: np.ndarray, p: int, m: int) -> np.ndarray:
    """Columns generating {x : a x = 0} over Z/p^m."""
    a = np.asarray(a)
    nr, nc = a.shape
    if nc == 0:
        return np.zeros((0, 0), dtype=np.int64)
    aug = np.hstack([np.mod(a.T, p**m).astype(a.dtype if a.dtype == object else np.int64), np.eye(nc, dtype=np.int64)])
    h = howell_array(aug, p, m)
    z = np.all(h[:, :nr] == 0, axis=1) if nr else np.ones(h.shape[0], dtype=bool)
    return np.ascontiguousarray(h[z, nr:].T)


@dataclass(frozen=True)
class HowellResult:
    form: Matrix
    kernel: Matrix  # columns generate the kernel of x -> A x

    @property
    def kernel_size_log(self) -> int:
        """log_p of the number of kernel elements."""
        p = self.kernel.ring.p
        m = self.kernel.ring.m
        k = self.kernel.array
        if k.size == 0:
            return 0
        h = howell_array(k.T, p, m)
        vals = [int(_val_mod(np.array([row[np.flatnonzero(row)[0]]]), p, m)[0]) for row in h]
        return sum(m - v for v in vals)


def howell(A: Matrix) -> HowellResult:
    if A.ring.mode != TRUNCATION:
        raise RingError("howell requires Truncation mode")
    p, m = A.ring.p, A.ring.m
    form = howell_array(A.array, p, m) if A.rows else np.zeros((0, A.cols), dtype=np.int64)
    kern = howell_kernel_array(A.array, p, m)
    return HowellResult(Matrix(A.ring, form), Matrix(A.ring, kern.reshape(A.cols, -1) if A.cols else kern))


def free_basis_columns(gens: np.ndarray, p: int) -> np.ndarray:
    """Select columns of ``gens`` independent mod p (a free basis of a p^m-summand)."""
    if gens.size == 0:
        return gens.reshape(gens.shape[0], 0)
    idx = rref_mod(np.mod(gens, p) if gens.dtype != object else np.mod(gens, p).astype(np.int64), p)[1]
    return gens[:, idx]


def inv_mod_q(a: np.ndarray, p: int, m: int) -> np.ndarray:
    """Inverse over Z/p^m of a matrix that is invertible mod p."""
    q = p**m
    n = a.shape[0]
    w = np.hstack([np.mod(np.asarray(a, dtype=object), q), np.eye(n, dtype=object)]).astype(object)
    for c in range(n):
        piv = next((i for i in range(c, n) if w[i, c] % p), None)
        if piv is None:
            raise ValueError("matrix is not invertible mod p")
        if piv != c:
            w[[c, piv]] = w[[piv, c]]
        w[c] = (w[c] * pow(int(w[c, c]), -1, q)) % q
        for i in range(n):
            if i != c and w[i, c]:
                w[i] = (w[i] - w[i, c] * w[c]) % q
    out = w[:, n:]
    return out.astype(np.int64) if q * q < _INT64_SAFE else out


def solve_unit_basis(basis: np.ndarray, b: np.ndarray, p: int, m: int) -> np.ndarray:
    """Coordinates X with basis @ X = b, where basis has columns independent mod p.

    Raises ValueError when b is not in the span.
    """
    q = p**m
    rows = rref_mod(np.mod(basis, p).astype(np.int64).T, p)[1]
    sub = np.asarray(basis)[rows]
    x = (np.asarray(inv_mod_q(sub, p, m), dtype=object) @ np.asarray(b, dtype=object)[rows]) % q
    if np.any((np.asarray(basis, dtype=object) @ x - np.asarray(b, dtype=object)) % q != 0):
        raise ValueError("vector not in the span of the basis")
    return x.astype(np.int64) if q * q < _INT64_SAFE else x


# ---------------------------------------------------------------------------
# Z_(p)
# ---------------------------------------------------------------------------


def _integral_rows(A: Matrix) -> list[list[int]]:
    """Rows of a p-local matrix scaled by unit denominators to integers."""
    out = []
    for row in A.entries():
        den = 1
        for x in row:
            if isinstance(x, Fraction):
                den = den * x.denominator // math.gcd(den, x.denominator)
        out.append([int(x * den) for x in row])
    return out


def _strip(row: list[int], p: int) -> list[int]:
    g = math.gcd(*row) if row else 0
    if g <= 1:
        return row
    while g % p == 0:
        g //= p
    if g > 1:
        return [x // g for x in row]
    return row


@dataclass
class _Elimination:
    rank: int
    valuations: list[int]
    pivot_cols: list[int]
    kernel: list[list[int]] = field(default_factory=list)  # integral column vectors


def _local_eliminate(rows: list[list[int]], ncols: int, p: int, track: bool = False) -> _Elimination:
    """Diagonalise an integer matrix over Z_(p) using unit-determinant operations.

    Pivots are chosen by minimal p-valuation, ties to the lowest row then
    column index.  Row operations keep entries integral (multiplying by the
    unit part of the pivot); column operations only touch the pivot row and
    are recorded on the transform when ``track`` is set, whose unused columns
    then form a saturated basis of the kernel.
    """
    rows = [list(r) for r in rows]
    act_rows = list(range(len(rows)))
    act_cols = list(range(ncols))
    rcols: list[list[Fraction]] | None = None
    if track:
        rcols = [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    vals: list[int] = []
    pcols: list[int] = []
    while act_rows and act_cols:
        best = None
        for i in act_rows:
            row = rows[i]
            for j in act_cols:
                x = row[j]
                if x:
                    if x % p:
                        best = (0, i, j)
                        break
                    v = _ival(x, p)
                    if best is None or v < best[0]:
                        best = (v, i, j)
            if best is not None and best[0] == 0:
                break
        if best is None:
            break
        v, i, j = best
        piv_row = rows[i]
        pv = p**v
        u = piv_row[j] // pv
        act_rows.remove(i)
        act_cols.remove(j)
        for r in act_rows:
            row = rows[r]
            x = row[j]
            if x:
                b = x // pv
                rows[r] = _strip([u * s - b * t for s, t in zip(row, piv_row)], p)
        if rcols is not None:
            pivot = piv_row[j]
            cj = rcols[j]
            for c in act_cols:
                x = piv_row[c]
                if x:
                    f = Fraction(x, pivot)
                    cc = rcols[c]
                    rcols[c] = [s - f * t for s, t in zip(cc, cj)]
        vals.append(v)
        pcols.append(j)
    out = _Elimination(len(vals), vals, pcols)
    if rcols is not None:
        for c in act_cols:
            vec = rcols[c]
            den = 1
            for x in vec:
                den = den * x.denominator // math.gcd(den, x.denominator)
            out.kernel.append(_strip([int(x * den) for x in vec], p))
    return out


def _require_plocal(*mats: Matrix) -> None:
    for A in mats:
        if A.ring.mode != PLOCAL:
            raise RingError(f"operation requires PLocal mode, got {A.ring}")


def rank(A: Matrix) -> int:
    """Rank over the fraction field (PLocal) or over F_p / number of unit pivots."""
    if A.ring.mode == PLOCAL:
        return _local_eliminate(_integral_rows(A), A.cols, A.ring.p).rank
    if A.ring.mode == PRIME:
        return rank_mod(A.array, A.ring.p)
    raise RingError("rank is not defined over Z/p^m; use howell")


def elementary_valuations(A: Matrix) -> list[int]:
    """p-valuations of the nonzero elementary divisors of a p-local matrix, sorted."""
    _require_plocal(A)
    return sorted(_local_eliminate(_integral_rows(A), A.cols, A.ring.p).valuations)


def kernel_basis(A: Matrix) -> Matrix:
    """Columns forming a basis of {x : A x = 0}.

    In PLocal mode the basis is saturated: it spans the kernel over Z_(p),
    not merely over Q.  In PrimeField mode it is an F_p basis; in Truncation
    mode a Howell generating set.
    """
    if A.ring.mode == PLOCAL:
        e = _local_eliminate(_integral_rows(A), A.cols, A.ring.p, track=True)
        if not e.kernel:
            return Matrix.zeros(A.ring, A.cols, 0)
        return Matrix(A.ring, np.array(e.kernel, dtype=object).T)
    if A.ring.mode == PRIME:
        return Matrix(A.ring, nullspace_mod(A.array, A.ring.p))
    return howell(A).kernel


def lattice_invariants(A: Matrix) -> tuple[int, int]:
    """(rank, total p-valuation of elementary divisors) of the column lattice of A.

    For lattices L <= L' of Z_(p)^n these agree iff L = L'.
    """
    _require_plocal(A)
    e = _local_eliminate(_integral_rows(A), A.cols, A.ring.p)
    return e.rank, sum(e.valuations)


def in_lattice(A: Matrix, B: Matrix) -> bool:
    """True iff every column of B lies in the Z_(p)-span of the columns of A."""
    _require_plocal(A, B)
    if B.cols == 0:
        return True
    return lattice_invariants(A) == lattice_invariants(A.hstack(B))


@dataclass(frozen=True)
class SmithForm:
    U: Matrix
    valuations: tuple[int, ...]
    V: Matrix
    zeros: int  # diagonal positions holding 0 ("infinite" valuation)

    @property
    def D(self) -> Matrix:
        ring = self.U.ring
        p = ring.p
        return Matrix.diagonal(ring, [p**v for v in self.valuations], self.U.cols, self.V.rows)


def snf(A: Matrix) -> SmithForm:
    """Smith form A = U D V over Z_(p) with D = diag(p^v_i), v_i weakly increasing."""
    _require_plocal(A)
    p = A.ring.p
    n, m = A.shape
    a = [[Fraction(x) for x in row] for row in A.entries()]
    linv = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    rinv = [[Fraction(int(i == j)) for j in range(m)] for i in range(m)]
    vals: list[int] = []
    t = 0
    while t < min(n, m):
        best = None
        for i in range(t, n):
            for j in range(t, m):
                x = a[i][j]
                if x:
                    v = valuation(x, p)
                    if best is None or v < best[0]:
                        best = (v, i, j)
            if best is not None and best[0] == 0:
                break
        if best is None:
            break
        v, i, j = best
        if i != t:
            a[t], a[i] = a[i], a[t]
            for row in linv:
                row[t], row[i] = row[i], row[t]
        if j != t:
            for row in a:
                row[t], row[j] = row[j], row[t]
            rinv[t], rinv[j] = rinv[j], rinv[t]
        u = a[t][t] / Fraction(p) ** v
        a[t] = [x / u for x in a[t]]
        for row in linv:
            row[t] *= u
        piv = a[t][t]
        for r in range(t + 1, n):
            f = a[r][t] / piv
            if f:
                a[r] = [x - f * y for x, y in zip(a[r], a[t])]
                for row in linv:
                    row[t] += f * row[r]
        for c in range(t + 1, m):
            f = a[t][c] / piv
            if f:
                a[t][c] = Fraction(0)
                rinv[t] = [x + f * y for x, y in zip(rinv[t], rinv[c])]
        vals.append(v)
        t += 1
    ring = A.ring
    U = Matrix(ring, np.array(linv, dtype=object).reshape(n, n))
    V = Matrix(ring, np.array(rinv, dtype=object).reshape(m, m))
    return SmithForm(U, tuple(vals), V, min(n, m) - len(vals))


@dataclass(frozen=True)
class HomologyReport:
    free_rank: int
    torsion_valuations: tuple[int, ...]

    @property
    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion_valuations

    def to_dict(self) -> dict:
        return {"free_rank": self.free_rank, "torsion_valuations": list(self.torsion_valuations)}

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        if self.free_rank:
            parts.append(f"R^{self.free_rank}")
        parts += [f"R/p^{v}" for v in self.torsion_valuations]
        return " + ".join(parts)


class CompositionError(ValueError):
    """Raised when d_out @ d_in is not zero."""


def homology(d_in: Matrix, d_out: Matrix) -> HomologyReport:
    """ker(d_out) / im(d_in) over Z_(p) for R^a --d_in--> R^n --d_out--> R^b."""
    _require_plocal(d_in, d_out)
    if d_in.ring != d_out.ring:
        raise RingError("ring mismatch")
    if d_in.rows != d_out.cols:
        raise ValueError("maps are not composable")
    if d_out.rows and d_in.cols and not (d_out @ d_in).is_zero():
        raise CompositionError("d_out @ d_in != 0")
    n = d_in.rows
    r_out = rank(d_out) if d_out.rows else 0
    e_in = _local_eliminate(_integral_rows(d_in), d_in.cols, d_in.ring.p) if d_in.cols else _Elimination(0, [], [])
    torsion = tuple(sorted(v for v in e_in.valuations if v > 0))
    return HomologyReport(n - r_out - e_in.rank, torsion)


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.kron(a, b)


def block_diag(blocks: Iterable[np.ndarray]) -> np.ndarray:
    blocks = list(blocks)
    n = sum(b.shape[0] for b in blocks)
    m = sum(b.shape[1] for b in blocks)
    dtype = object if any(b.dtype == object for b in blocks) else np.int64
    out = np.zeros((n, m), dtype=dtype)
    i = j = 0
    for b in blocks:
        out[i : i + b.shape[0], j : j + b.shape[1]] = b
        i += b.shape[0]
        j += b.shape[1]
    return out
