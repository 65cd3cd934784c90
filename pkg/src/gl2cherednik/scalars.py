"""Exact coefficient arithmetic and generic-rank linear algebra.

Three coefficient rings are used throughout the package:

* the prime field F_p, as plain ``int`` residues (``FpElem`` is the boxed
  public form) and as ``numpy`` ``int64`` arrays for dense matrices;
* a finite extension F_{p^k}, with elements stored as length-k coefficient
  vectors; matrices over it are ``(rows, cols, k)`` arrays;
* polynomials over F_p in the class parameters c_1, ..., c_{p-1}
  (``ParamPoly``) and matrices that are polynomial in those parameters
  (``ParamMatrix``).

Generic rank means rank over the function field F_p(c_1, ..., c_{p-1}). It
is computed either exactly, by fraction-free elimination, or by evaluation
at random points of F_{p^k}.
"""

from __future__ import annotations

import dataclasses
import enum
import functools
import warnings
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "FpElem",
    "ExtField",
    "ExtFieldElem",
    "MPoly",
    "ParamPoly",
    "ParamMatrix",
    "BackendMode",
    "GenericBackend",
    "GenericityWarning",
    "KernelResult",
    "power_sum",
    "is_prime",
    "inv_mod",
    "least_irreducible",
    "is_irreducible",
    "bareiss_echelon",
    "bareiss_rref",
    "bareiss_det",
    "generic_rank",
    "generic_kernel",
    "generic_row_basis",
    "fp_rref",
    "fp_rank",
    "fp_nullspace",
]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


def _check_odd_prime(p: int) -> None:
    if not (isinstance(p, int) and p >= 3 and is_prime(p)):
        raise ValueError(f"expected an odd prime, got {p!r}")


def inv_mod(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ZeroDivisionError(f"0 has no inverse mod {p}")
    return pow(a, p - 2, p)


# ---------------------------------------------------------------------------
# Prime field


@dataclasses.dataclass(frozen=True)
class FpElem:
    """Residue class ``value mod p``."""

    value: int
    p: int

    def __post_init__(self):
        object.__setattr__(self, "value", self.value % self.p)

    def _coerce(self, other) -> int:
        if isinstance(other, FpElem):
            if other.p != self.p:
                raise ValueError(f"modulus mismatch: {self.p} vs {other.p}")
            return other.value
        if isinstance(other, int):
            return other % self.p
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FpElem(self.value + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FpElem(self.value - o, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FpElem(o - self.value, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FpElem(self.value * o, self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FpElem(self.value * inv_mod(o, self.p), self.p)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FpElem(o * inv_mod(self.value, self.p), self.p)

    def __neg__(self):
        return FpElem(-self.value, self.p)

    def __pow__(self, e: int):
        if e < 0:
            return FpElem(pow(inv_mod(self.value, self.p), -e, self.p), self.p)
        return FpElem(pow(self.value, e, self.p), self.p)

    def inverse(self) -> "FpElem":
        return FpElem(inv_mod(self.value, self.p), self.p)

    def __eq__(self, other):
        if isinstance(other, FpElem):
            return self.p == other.p and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.p
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.p))

    def __int__(self):
        return self.value

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"{self.value} (mod {self.p})"


def power_sum(p: int, N: int) -> FpElem:
    """Sum of b**N over all b in F_p, with 0**0 = 1."""
    if N < 0:
        raise ValueError("exponent must be nonnegative")
    return FpElem(sum(pow(b, N, p) for b in range(p)), p)


# ---------------------------------------------------------------------------
# Dense linear algebra over F_p (numpy int64)


def fp_rref(A: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form mod p. Returns (nonzero rows, pivot columns)."""
    M = np.array(A, dtype=np.int64) % p
    if M.ndim != 2:
        raise ValueError("expected a 2-d array")
    rows, cols = M.shape
    inv = np.array([0] + [inv_mod(a, p) for a in range(1, p)], dtype=np.int64)
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(M[r:, c])
        if nz.size == 0:
            continue
        i = r + nz[0]
        if i != r:
            M[[r, i]] = M[[i, r]]
        M[r, c:] = (M[r, c:] * inv[M[r, c]]) % p
        f = M[:, c].copy()
        f[r] = 0
        nzr = np.flatnonzero(f)
        if nzr.size:
            M[np.ix_(nzr, np.arange(c, cols))] = (
                M[np.ix_(nzr, np.arange(c, cols))] - np.outer(f[nzr], M[r, c:])
            ) % p
        pivots.append(c)
        r += 1
    return M[:r], pivots


def fp_rank(A: np.ndarray, p: int) -> int:
    if A.size == 0:
        return 0
    return len(fp_rref(A, p)[1])


def fp_nullspace(A: np.ndarray, p: int) -> np.ndarray:
    """Basis of {v : A v = 0} as rows of the returned array."""
    A = np.asarray(A, dtype=np.int64)
    rows, cols = A.shape
    if rows == 0:
        return np.eye(cols, dtype=np.int64)
    R, piv = fp_rref(A, p)
    pivset = set(piv)
    free = [c for c in range(cols) if c not in pivset]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for t, f in enumerate(free):
        basis[t, f] = 1
        for r, c in enumerate(piv):
            basis[t, c] = (-R[r, f]) % p
    return basis


# ---------------------------------------------------------------------------
# Univariate polynomials over F_p (lists, low degree first)


def _ptrim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _ptrim(out)


def _pdivmod(a: Sequence[int], b: Sequence[int], p: int) -> tuple[list[int], list[int]]:
    a = _ptrim(list(a))
    b = _ptrim(list(b))
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    inv_lead = inv_mod(b[-1], p)
    q = [0] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b) and a:
        shift = len(a) - len(b)
        coef = a[-1] * inv_lead % p
        q[shift] = coef
        for i, y in enumerate(b):
            a[i + shift] = (a[i + shift] - coef * y) % p
        _ptrim(a)
    return _ptrim(q), a


def _pgcd(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    a, b = _ptrim(list(a)), _ptrim(list(b))
    while b:
        a, b = b, _pdivmod(a, b, p)[1]
    if a:
        inv_lead = inv_mod(a[-1], p)
        a = [x * inv_lead % p for x in a]
    return a


def _pegcd_inverse(a: Sequence[int], m: Sequence[int], p: int) -> list[int]:
    """Inverse of a modulo m (m irreducible)."""
    r0, r1 = _ptrim(list(m)), _ptrim(list(a))
    s0, s1 = [], [1]
    while r1:
        q, r = _pdivmod(r0, r1, p)
        r0, r1 = r1, r
        qs = _pmul(q, s1, p)
        s_new = [((s0[i] if i < len(s0) else 0) - (qs[i] if i < len(qs) else 0)) % p
                 for i in range(max(len(s0), len(qs)))]
        s0, s1 = s1, _ptrim(s_new)
    if len(r0) != 1:
        raise ZeroDivisionError("element not invertible")
    c = inv_mod(r0[0], p)
    return [x * c % p for x in s0]


def _ppowmod(base: Sequence[int], e: int, m: Sequence[int], p: int) -> list[int]:
    result = [1]
    b = _pdivmod(base, m, p)[1]
    while e:
        if e & 1:
            result = _pdivmod(_pmul(result, b, p), m, p)[1]
        b = _pdivmod(_pmul(b, b, p), m, p)[1]
        e >>= 1
    return result


def is_irreducible(f: Sequence[int], p: int) -> bool:
    """Rabin-style test: f of degree k is irreducible iff gcd(f, x^(p^i) - x) = 1
    for 1 <= i <= k/2 (and x^(p^k) = x mod f)."""
    f = _ptrim(list(f))
    k = len(f) - 1
    if k < 1:
        return False
    if k == 1:
        return True
    xpow = [0, 1]
    for _ in range(1, k // 2 + 1):
        xpow = _ppowmod(xpow, p, f, p)
        diff = list(xpow) + [0] * max(0, 2 - len(xpow))
        diff[1] = (diff[1] - 1) % p
        if len(_pgcd(f, _ptrim(diff), p)) > 1:
            return False
    return True


@functools.lru_cache(maxsize=None)
def least_irreducible(p: int, k: int) -> tuple[int, ...]:
    """Least monic irreducible polynomial of degree k over F_p.

    Candidates x^k + a_{k-1} x^{k-1} + ... + a_0 are ordered lexicographically
    by (a_{k-1}, ..., a_0), i.e. by the integer sum a_i p^i. The result is
    returned low degree first, including the leading 1.
    """
    if k < 1:
        raise ValueError("degree must be positive")
    for code in range(p ** k):
        coeffs = []
        c = code
        for _ in range(k):
            coeffs.append(c % p)
            c //= p
        f = coeffs + [1]
        if k > 1 and f[0] == 0:
            continue
        if is_irreducible(f, p):
            return tuple(f)
    raise RuntimeError("no irreducible polynomial found")  # pragma: no cover


# ---------------------------------------------------------------------------
# Extension field F_{p^k}


class ExtField:
    """The field F_p[x]/(m) with m the least irreducible of degree k.

    Elements are length-k integer vectors (low degree first). Matrix routines
    act on arrays whose last axis has length k.
    """

    _cache: dict = {}

    def __new__(cls, p: int, k: int, modulus: Sequence[int] | None = None):
        key = (p, k, tuple(modulus) if modulus is not None else None)
        if key in cls._cache:
            return cls._cache[key]
        self = super().__new__(cls)
        cls._cache[key] = self
        self._init(p, k, modulus)
        return self

    def _init(self, p, k, modulus):
        _check_odd_prime(p)
        self.p = p
        self.k = k
        mod = tuple(modulus) if modulus is not None else least_irreducible(p, k)
        if len(mod) != k + 1 or mod[-1] != 1 or not is_irreducible(list(mod), p):
            raise ValueError(f"modulus {mod} is not monic irreducible of degree {k}")
        self.modulus = mod
        # red[e] = coefficient vector of x^e mod m, for e < 2k - 1
        red = np.zeros((2 * k - 1, k), dtype=np.int64)
        for e in range(2 * k - 1):
            if e < k:
                red[e, e] = 1
            else:
                prev = red[e - 1]
                shifted = np.zeros(k, dtype=np.int64)
                shifted[1:] = prev[:-1]
                top = prev[-1]
                shifted = (shifted - top * np.array(mod[:k], dtype=np.int64)) % p
                red[e] = shifted
        self._red = red
        T = np.zeros((k, k, k), dtype=np.int64)
        for a in range(k):
            for b in range(k):
                T[a, b] = red[a + b]
        self._T = T
        self.order = p ** k

    def __repr__(self):
        return f"ExtField(p={self.p}, k={self.k})"

    def __reduce__(self):
        return (ExtField, (self.p, self.k, self.modulus))

    # -- element helpers ------------------------------------------------
    def zero(self, shape=()) -> np.ndarray:
        return np.zeros(tuple(shape) + (self.k,), dtype=np.int64)

    def one(self) -> np.ndarray:
        e = self.zero()
        e[0] = 1
        return e

    def embed(self, a) -> np.ndarray:
        """Embed an F_p array (any shape) as constants."""
        a = np.asarray(a, dtype=np.int64) % self.p
        out = np.zeros(a.shape + (self.k,), dtype=np.int64)
        out[..., 0] = a
        return out

    def element(self, coeffs: Iterable[int]) -> "ExtFieldElem":
        return ExtFieldElem(self, tuple(int(c) for c in coeffs))

    def random(self, rng: np.random.Generator, shape=()) -> np.ndarray:
        return rng.integers(0, self.p, size=tuple(shape) + (self.k,), dtype=np.int64)

    def mul_matrix(self, a: np.ndarray) -> np.ndarray:
        """G with (v * a) == v @ G for coefficient row vectors v."""
        return np.einsum("a,abe->be", np.asarray(a, dtype=np.int64), self._T) % self.p

    def mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        return np.einsum("...a,...b,abe->...e", a, b, self._T) % self.p

    def scale(self, X: np.ndarray, a: np.ndarray) -> np.ndarray:
        """Multiply every element of X by the scalar a."""
        G = self.mul_matrix(a).astype(np.float64)
        shp = X.shape
        out = X.reshape(-1, self.k).astype(np.float64) @ G
        return (np.rint(out).astype(np.int64) % self.p).reshape(shp)

    def inv(self, a: np.ndarray) -> np.ndarray:
        coeffs = _ptrim([int(x) for x in np.asarray(a) % self.p])
        if not coeffs:
            raise ZeroDivisionError("division by zero in extension field")
        inv = _pegcd_inverse(coeffs, list(self.modulus), self.p)
        out = self.zero()
        out[: len(inv)] = inv
        return out

    def power(self, a: np.ndarray, e: int) -> np.ndarray:
        if e < 0:
            a, e = self.inv(a), -e
        result = self.one()
        base = np.asarray(a, dtype=np.int64) % self.p
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def is_zero(self, X: np.ndarray) -> np.ndarray:
        return ~np.asarray(X).any(axis=-1)

    # -- matrices -------------------------------------------------------
    def _outer(self, f: np.ndarray, r: np.ndarray) -> np.ndarray:
        """out[j, c] = f[j] * r[c] for f (m, k) and r (C, k)."""
        G = np.einsum("ja,abe->jbe", f, self._T) % self.p
        out = np.matmul(r.astype(np.float64)[None, :, :], G.astype(np.float64))
        return np.rint(out).astype(np.int64) % self.p

    def rref(self, A: np.ndarray) -> tuple[np.ndarray, list[int]]:
        """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
        p = self.p
        M = np.array(A, dtype=np.int64) % p
        rows, cols, _ = M.shape
        pivots: list[int] = []
        r = 0
        for c in range(cols):
            if r == rows:
                break
            nz = np.flatnonzero(M[r:, c, :].any(axis=1))
            if nz.size == 0:
                continue
            i = r + nz[0]
            if i != r:
                M[[r, i]] = M[[i, r]]
            M[r, c:] = self.scale(M[r, c:], self.inv(M[r, c]))
            f = M[:, c, :].copy()
            f[r] = 0
            nzr = np.flatnonzero(f.any(axis=1))
            if nzr.size:
                M[nzr, c:] = (M[nzr, c:] - self._outer(f[nzr], M[r, c:])) % p
            pivots.append(c)
            r += 1
        return M[:r], pivots

    def rank(self, A: np.ndarray) -> int:
        if A.shape[0] == 0 or A.shape[1] == 0:
            return 0
        return len(self.rref(A)[1])

    def nullspace(self, A: np.ndarray) -> np.ndarray:
        """Rows spanning {v : A v = 0}; shape (d, cols, k)."""
        rows, cols = A.shape[0], A.shape[1]
        if rows == 0:
            out = self.zero((cols, cols))
            out[np.arange(cols), np.arange(cols), 0] = 1
            return out
        R, piv = self.rref(A)
        pivset = set(piv)
        free = [c for c in range(cols) if c not in pivset]
        basis = self.zero((len(free), cols))
        for t, f in enumerate(free):
            basis[t, f, 0] = 1
            for r, c in enumerate(piv):
                basis[t, c] = (-R[r, f]) % self.p
        return basis

    def matmul(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        """Product of (R, N, k) and (N, M, k) matrices."""
        R, N, k = A.shape
        N2, M, _ = B.shape
        if N != N2:
            raise ValueError("shape mismatch")
        # B2[n, a, m, e]: coefficient e of (x^a * B[n, m])
        B2 = np.einsum("nmb,abe->name", B, self._T) % self.p
        out = A.reshape(R, N * k).astype(np.float64) @ B2.reshape(N * k, M * k).astype(np.float64)
        return (np.rint(out).astype(np.int64) % self.p).reshape(R, M, k)

    def right_mul_fp(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        """Product of an (R, N, k) matrix with an F_p matrix (N, M)."""
        R, N, k = A.shape
        At = np.transpose(A, (0, 2, 1)).reshape(R * k, N).astype(np.float64)
        out = At @ np.asarray(B, dtype=np.float64)
        out = np.rint(out).astype(np.int64) % self.p
        return np.transpose(out.reshape(R, k, -1), (0, 2, 1))

    def left_mul_fp(self, B: np.ndarray, A: np.ndarray) -> np.ndarray:
        """Product of an F_p matrix (M, R) with an (R, N, k) matrix."""
        R, N, k = A.shape
        out = np.asarray(B, dtype=np.float64) @ A.reshape(R, N * k).astype(np.float64)
        return (np.rint(out).astype(np.int64) % self.p).reshape(-1, N, k)


@dataclasses.dataclass(frozen=True)
class ExtFieldElem:
    field: ExtField
    coeffs: tuple

    def __post_init__(self):
        k = self.field.k
        c = tuple(int(x) % self.field.p for x in self.coeffs)
        if len(c) > k:
            raise ValueError("too many coefficients")
        object.__setattr__(self, "coeffs", c + (0,) * (k - len(c)))

    @property
    def array(self) -> np.ndarray:
        return np.array(self.coeffs, dtype=np.int64)

    def _other(self, other) -> np.ndarray:
        if isinstance(other, ExtFieldElem):
            if other.field is not self.field:
                raise ValueError("field mismatch")
            return other.array
        if isinstance(other, (int, FpElem)):
            if isinstance(other, FpElem) and other.p != self.field.p:
                raise ValueError("modulus mismatch")
            return self.field.embed(int(other))
        return NotImplemented

    def _wrap(self, arr) -> "ExtFieldElem":
        return ExtFieldElem(self.field, tuple(int(x) for x in arr))

    def __add__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap((self.array + o) % self.field.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap((self.array - o) % self.field.p)

    def __rsub__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap((o - self.array) % self.field.p)

    def __neg__(self):
        return self._wrap((-self.array) % self.field.p)

    def __mul__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.mul(self.array, o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return NotImplemented
        return self._wrap(self.field.mul(self.array, self.field.inv(o)))

    def __pow__(self, e: int):
        return self._wrap(self.field.power(self.array, e))

    def inverse(self) -> "ExtFieldElem":
        return self._wrap(self.field.inv(self.array))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, ExtFieldElem):
            return self.field is other.field and self.coeffs == other.coeffs
        if isinstance(other, (int, FpElem)):
            return self.coeffs == tuple(int(x) for x in self.field.embed(int(other)))
        return NotImplemented

    def __hash__(self):
        return hash((self.field.p, self.field.k, self.coeffs))

    def __repr__(self):
        terms = [f"{c}*a^{i}" if i else str(c) for i, c in enumerate(self.coeffs) if c]
        return " + ".join(terms) if terms else "0"


# ---------------------------------------------------------------------------
# Multivariate polynomials over F_p


class MPoly:
    """Sparse polynomial over F_p in ``nvars`` variables.

    ``terms`` maps exponent tuples to nonzero residues. Subclasses only change
    variable names; arithmetic returns the subclass of the left operand.
    """

    __slots__ = ("p", "nvars", "terms")
    var_names: tuple[str, ...] | None = None

    def __init__(self, p: int, nvars: int, terms: Mapping[tuple, int] | None = None):
        self.p = p
        self.nvars = nvars
        clean = {}
        if terms:
            for mono, c in terms.items():
                c %= p
                if c:
                    if len(mono) != nvars:
                        raise ValueError("exponent length mismatch")
                    clean[tuple(mono)] = c
        self.terms = clean

    def _new(self, terms) -> "MPoly":
        obj = object.__new__(type(self))
        obj.p = self.p
        obj.nvars = self.nvars
        obj.terms = terms
        return obj

    @classmethod
    def constant(cls, p: int, nvars: int, value: int):
        return cls(p, nvars, {(0,) * nvars: value})

    @classmethod
    def variable(cls, p: int, nvars: int, index: int):
        e = [0] * nvars
        e[index] = 1
        return cls(p, nvars, {tuple(e): 1})

    def _coerce(self, other):
        if isinstance(other, MPoly):
            if other.p != self.p or other.nvars != self.nvars:
                raise ValueError("ring mismatch")
            return other
        if isinstance(other, (int, np.integer)):
            return self._new({(0,) * self.nvars: int(other) % self.p} if int(other) % self.p else {})
        if isinstance(other, FpElem):
            if other.p != self.p:
                raise ValueError("modulus mismatch")
            return self._coerce(other.value)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        t = dict(self.terms)
        p = self.p
        for m, c in o.terms.items():
            v = (t.get(m, 0) + c) % p
            if v:
                t[m] = v
            else:
                t.pop(m, None)
        return self._new(t)

    __radd__ = __add__

    def __neg__(self):
        p = self.p
        return self._new({m: (-c) % p for m, c in self.terms.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        p = self.p
        if len(o.terms) == 1 and len(self.terms) > 1:
            ((m2, c2),) = o.terms.items()
            return self._new({tuple(a + b for a, b in zip(m, m2)): c * c2 % p
                              for m, c in self.terms.items()})
        t: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in o.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                t[m] = (t.get(m, 0) + c1 * c2) % p
        return self._new({m: c for m, c in t.items() if c})

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power")
        result = self._new({(0,) * self.nvars: 1})
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.terms == o.terms

    def __hash__(self):
        return hash((self.p, self.nvars, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def total_degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def is_constant(self) -> bool:
        return all(not any(m) for m in self.terms)

    def constant_value(self) -> int:
        return self.terms.get((0,) * self.nvars, 0)

    def exact_div(self, other) -> "MPoly":
        """Quotient of an exact division; raises ArithmeticError otherwise."""
        d = self._coerce(other)
        if d is NotImplemented:
            raise TypeError("cannot divide by this type")
        if d.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        p = self.p
        if len(d.terms) == 1:
            ((md, cd),) = d.terms.items()
            ci = inv_mod(cd, p)
            q = {}
            for m, c in self.terms.items():
                diff = tuple(a - b for a, b in zip(m, md))
                if min(diff, default=0) < 0:
                    raise ArithmeticError("inexact polynomial division")
                q[diff] = c * ci % p
            return self._new(q)
        lead = max(d.terms)
        ci = inv_mod(d.terms[lead], p)
        r = dict(self.terms)
        q: dict = {}
        while r:
            m = max(r)
            diff = tuple(a - b for a, b in zip(m, lead))
            if min(diff) < 0:
                raise ArithmeticError("inexact polynomial division")
            coef = r[m] * ci % p
            q[diff] = coef
            for md, cd in d.terms.items():
                mm = tuple(a + b for a, b in zip(md, diff))
                v = (r.get(mm, 0) - coef * cd) % p
                if v:
                    r[mm] = v
                else:
                    r.pop(mm, None)
        return self._new(q)

    def evaluate(self, values: Sequence, field: ExtField | None = None):
        """Evaluate at a point. With ``field`` the values are F_{p^k} arrays and
        an array is returned; otherwise values are ints and an int is returned."""
        p = self.p
        if field is None:
            total = 0
            for m, c in self.terms.items():
                term = c
                for v, e in zip(values, m):
                    if e:
                        term = term * pow(int(v), e, p) % p
                total = (total + term) % p
            return total
        total = field.zero()
        cache: dict = {}
        for m, c in self.terms.items():
            term = field.embed(c)
            for idx, e in enumerate(m):
                if e:
                    key = (idx, e)
                    if key not in cache:
                        cache[key] = field.power(values[idx], e)
                    term = field.mul(term, cache[key])
            total = (total + term) % p
        return total

    def substitute(self, index: int, value: int) -> "MPoly":
        """Replace one variable by an F_p constant (variable count unchanged)."""
        p = self.p
        t: dict = {}
        for m, c in self.terms.items():
            e = m[index]
            mm = m[:index] + (0,) + m[index + 1:]
            t[mm] = (t.get(mm, 0) + c * pow(value, e, p)) % p
        return self._new({m: c for m, c in t.items() if c})

    def names(self) -> tuple[str, ...]:
        if self.var_names and len(self.var_names) == self.nvars:
            return self.var_names
        return tuple(f"v{i}" for i in range(self.nvars))

    def __repr__(self):
        if not self.terms:
            return "0"
        names = self.names()
        parts = []
        for m in sorted(self.terms, reverse=True):
            c = self.terms[m]
            factors = []
            for n, e in zip(names, m):
                if e == 1:
                    factors.append(n)
                elif e > 1:
                    factors.append(f"{n}^{e}")
            mono = "*".join(factors)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts)


class ParamPoly(MPoly):
    """Polynomial in the class parameters; variable index l-1 stands for c_l."""

    __slots__ = ()

    def __init__(self, p: int, terms: Mapping[tuple, int] | None = None, nvars: int | None = None):
        super().__init__(p, p - 1 if nvars is None else nvars, terms)

    @classmethod
    def constant(cls, p: int, value: int, nvars: int | None = None):
        n = p - 1 if nvars is None else nvars
        return cls(p, {(0,) * n: value}, n)

    @classmethod
    def param(cls, p: int, lam: int) -> "ParamPoly":
        """The variable c_lam for lam in 1..p-1."""
        if not 1 <= lam <= p - 1:
            raise ValueError(f"class label must be in 1..{p - 1}")
        e = [0] * (p - 1)
        e[lam - 1] = 1
        return cls(p, {tuple(e): 1})

    @classmethod
    def variable(cls, p: int, nvars: int, index: int):
        e = [0] * nvars
        e[index] = 1
        return cls(p, {tuple(e): 1}, nvars)

    def names(self) -> tuple[str, ...]:
        return tuple(f"c{i + 1}" for i in range(self.nvars))


# ---------------------------------------------------------------------------
# Matrices that are polynomial in the parameters


class ParamMatrix:
    """Matrix sum over monomials m of c^m * A_m with A_m dense over F_p."""

    __slots__ = ("p", "nvars", "shape", "parts")
    __array_ufunc__ = None  # make ndarray @ ParamMatrix dispatch to __rmatmul__

    def __init__(self, p: int, nvars: int, shape: tuple[int, int],
                 parts: Mapping[tuple, np.ndarray] | None = None):
        self.p = p
        self.nvars = nvars
        self.shape = (int(shape[0]), int(shape[1]))
        clean = {}
        for m, A in (parts or {}).items():
            A = np.asarray(A, dtype=np.int64) % p
            if A.shape != self.shape:
                raise ValueError(f"part shape {A.shape} != {self.shape}")
            if A.any():
                clean[tuple(m)] = A
        self.parts = clean

    @classmethod
    def constant(cls, p: int, nvars: int, A: np.ndarray) -> "ParamMatrix":
        A = np.asarray(A)
        return cls(p, nvars, A.shape, {(0,) * nvars: A})

    @classmethod
    def zeros(cls, p: int, nvars: int, shape) -> "ParamMatrix":
        return cls(p, nvars, shape, {})

    @classmethod
    def from_entries(cls, p: int, nvars: int, rows: Sequence[Sequence]) -> "ParamMatrix":
        R = len(rows)
        C = len(rows[0]) if R else 0
        parts: dict = {}
        for i, row in enumerate(rows):
            if len(row) != C:
                raise ValueError("ragged matrix")
            for j, e in enumerate(row):
                if isinstance(e, MPoly):
                    items = e.terms.items()
                else:
                    items = [((0,) * nvars, int(e))]
                for m, c in items:
                    if m not in parts:
                        parts[m] = np.zeros((R, C), dtype=np.int64)
                    parts[m][i, j] = (parts[m][i, j] + c) % p
        return cls(p, nvars, (R, C), parts)

    def entry(self, i: int, j: int) -> ParamPoly:
        return ParamPoly(self.p, {m: int(A[i, j]) for m, A in self.parts.items()}, self.nvars)

    def to_entries(self) -> list[list[ParamPoly]]:
        R, C = self.shape
        rows = [[dict() for _ in range(C)] for _ in range(R)]
        for m, A in self.parts.items():
            for i, j in zip(*np.nonzero(A)):
                rows[i][j][m] = int(A[i, j])
        return [[ParamPoly(self.p, t, self.nvars) for t in row] for row in rows]

    def is_zero(self) -> bool:
        return not self.parts

    def degree(self) -> int:
        return max((sum(m) for m in self.parts), default=-1)

    def __add__(self, other: "ParamMatrix") -> "ParamMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        parts = dict(self.parts)
        for m, A in other.parts.items():
            parts[m] = (parts[m] + A) % self.p if m in parts else A
        return ParamMatrix(self.p, self.nvars, self.shape, parts)

    def __neg__(self) -> "ParamMatrix":
        return ParamMatrix(self.p, self.nvars, self.shape,
                           {m: (-A) % self.p for m, A in self.parts.items()})

    def __sub__(self, other: "ParamMatrix") -> "ParamMatrix":
        return self + (-other)

    def scale(self, a: int) -> "ParamMatrix":
        return ParamMatrix(self.p, self.nvars, self.shape,
                           {m: (A * a) % self.p for m, A in self.parts.items()})

    def __matmul__(self, other) -> "ParamMatrix":
        p = self.p
        if isinstance(other, ParamMatrix):
            if self.shape[1] != other.shape[0]:
                raise ValueError("shape mismatch")
            parts: dict = {}
            for m1, A in self.parts.items():
                Af = A.astype(np.float64)
                for m2, B in other.parts.items():
                    m = tuple(a + b for a, b in zip(m1, m2))
                    prod = _fp_matmul(Af, B, p)
                    parts[m] = (parts[m] + prod) % p if m in parts else prod
            return ParamMatrix(p, self.nvars, (self.shape[0], other.shape[1]), parts)
        B = np.asarray(other, dtype=np.int64)
        vec = B.ndim == 1
        B2 = B.reshape(-1, 1) if vec else B
        out_shape = (self.shape[0], B2.shape[1])
        parts = {m: _fp_matmul(A.astype(np.float64), B2, p) for m, A in self.parts.items()}
        return ParamMatrix(p, self.nvars, out_shape, parts)

    def __rmatmul__(self, other) -> "ParamMatrix":
        B = np.asarray(other, dtype=np.int64)
        return ParamMatrix(self.p, self.nvars, (B.shape[0], self.shape[1]),
                           {m: _fp_matmul(B.astype(np.float64), A, self.p)
                            for m, A in self.parts.items()})

    @staticmethod
    def vstack(mats: Sequence["ParamMatrix"]) -> "ParamMatrix":
        p, nvars = mats[0].p, mats[0].nvars
        C = mats[0].shape[1]
        R = sum(M.shape[0] for M in mats)
        keys = set().union(*(M.parts.keys() for M in mats))
        parts = {}
        for m in keys:
            blocks = [M.parts.get(m, np.zeros(M.shape, dtype=np.int64)) for M in mats]
            parts[m] = np.vstack(blocks)
        return ParamMatrix(p, nvars, (R, C), parts)

    def rows(self, idx: Sequence[int]) -> "ParamMatrix":
        idx = list(idx)
        return ParamMatrix(self.p, self.nvars, (len(idx), self.shape[1]),
                           {m: A[idx] for m, A in self.parts.items()})

    def columns(self, idx: Sequence[int]) -> "ParamMatrix":
        idx = list(idx)
        return ParamMatrix(self.p, self.nvars, (self.shape[0], len(idx)),
                           {m: A[:, idx] for m, A in self.parts.items()})

    def transpose(self) -> "ParamMatrix":
        return ParamMatrix(self.p, self.nvars, (self.shape[1], self.shape[0]),
                           {m: A.T.copy() for m, A in self.parts.items()})

    def substitute(self, index: int, value: int) -> "ParamMatrix":
        parts: dict = {}
        for m, A in self.parts.items():
            e = m[index]
            mm = m[:index] + (0,) + m[index + 1:]
            contrib = (A * pow(value, e, self.p)) % self.p
            parts[mm] = (parts[mm] + contrib) % self.p if mm in parts else contrib
        return ParamMatrix(self.p, self.nvars, self.shape, parts)

    def evaluate_fp(self, values: Sequence[int]) -> np.ndarray:
        out = np.zeros(self.shape, dtype=np.int64)
        for m, A in self.parts.items():
            coef = 1
            for v, e in zip(values, m):
                coef = coef * pow(int(v), e, self.p) % self.p
            out = (out + coef * A) % self.p
        return out

    def monomial_values(self, field: ExtField, point: np.ndarray) -> dict:
        vals = {}
        for m in self.parts:
            v = field.one()
            for idx, e in enumerate(m):
                if e:
                    v = field.mul(v, field.power(point[idx], e))
            vals[m] = v
        return vals

    def evaluate(self, field: ExtField, point: np.ndarray) -> np.ndarray:
        """Evaluate at ``point`` (shape (nvars, k)); returns an (R, C, k) array."""
        vals = self.monomial_values(field, point)
        out = field.zero(self.shape)
        for m, A in self.parts.items():
            out = (out + A[:, :, None] * vals[m][None, None, :]) % self.p
        return out

    def left_apply(self, field: ExtField, X: np.ndarray, point: np.ndarray) -> np.ndarray:
        """X @ self(point) for X an (R, N, k) array, without expanding self."""
        vals = self.monomial_values(field, point)
        out = field.zero((X.shape[0], self.shape[1]))
        for m, A in self.parts.items():
            XA = field.right_mul_fp(X, A)
            out = (out + field.scale(XA, vals[m])) % self.p
        return out

    def __repr__(self):
        return f"ParamMatrix(shape={self.shape}, degree={self.degree()}, parts={len(self.parts)})"


def _fp_matmul(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    """Exact (A @ B) mod p via float64 BLAS when safe, int64 otherwise."""
    inner = A.shape[1]
    if inner * (p - 1) ** 2 < 2 ** 52:
        out = np.asarray(A, dtype=np.float64) @ np.asarray(B, dtype=np.float64)
        return np.rint(out).astype(np.int64) % p
    return (np.asarray(A, dtype=np.int64) @ np.asarray(B, dtype=np.int64)) % p


# ---------------------------------------------------------------------------
# Fraction-free elimination over a polynomial ring


def _zero_like(x):
    return x - x


def bareiss_echelon(rows: Sequence[Sequence]) -> tuple[int, list[int], list[int], list[list]]:
    """Fraction-free row echelon form.

    Returns (rank, pivot rows as original indices, pivot columns, echelon
    matrix). Entries must support +, -, *, ``exact_div`` and ``is_zero``.
    The selected pivot rows are linearly independent and span the row space.
    """
    M = [list(r) for r in rows]
    R = len(M)
    C = len(M[0]) if R else 0
    order = list(range(R))
    prev = None
    r = 0
    piv_cols: list[int] = []
    for c in range(C):
        if r == R:
            break
        i = next((i for i in range(r, R) if not M[i][c].is_zero()), None)
        if i is None:
            continue
        if i != r:
            M[r], M[i] = M[i], M[r]
            order[r], order[i] = order[i], order[r]
        pivot = M[r][c]
        for i in range(r + 1, R):
            a = M[i][c]
            for j in range(c + 1, C):
                v = pivot * M[i][j] - a * M[r][j]
                M[i][j] = v.exact_div(prev) if prev is not None else v
            M[i][c] = _zero_like(a)
        prev = pivot
        piv_cols.append(c)
        r += 1
    return r, order[:r], piv_cols, M


def bareiss_rref(rows: Sequence[Sequence]) -> tuple[list[list], list[int]]:
    """Fraction-free Gauss-Jordan form: every pivot column becomes d * e_i with
    d the final pivot. Returns (nonzero rows, pivot columns)."""
    M = [list(r) for r in rows]
    R = len(M)
    C = len(M[0]) if R else 0
    prev = None
    r = 0
    piv_cols: list[int] = []
    for c in range(C):
        if r == R:
            break
        i = next((i for i in range(r, R) if not M[i][c].is_zero()), None)
        if i is None:
            continue
        if i != r:
            M[r], M[i] = M[i], M[r]
        pivot = M[r][c]
        for i in range(R):
            if i == r:
                continue
            a = M[i][c]
            for j in range(C):
                if j == c:
                    continue
                v = pivot * M[i][j] - a * M[r][j]
                M[i][j] = v.exact_div(prev) if prev is not None else v
            M[i][c] = _zero_like(a)
        prev = pivot
        piv_cols.append(c)
        r += 1
    return M[:r], piv_cols


def bareiss_det(rows: Sequence[Sequence]):
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("determinant of a non-square matrix")
    M = [list(r) for r in rows]
    sign = 1
    prev = None
    for c in range(n):
        i = next((i for i in range(c, n) if not M[i][c].is_zero()), None)
        if i is None:
            return _zero_like(M[0][0])
        if i != c:
            M[c], M[i] = M[i], M[c]
            sign = -sign
        for i in range(c + 1, n):
            for j in range(c + 1, n):
                v = M[c][c] * M[i][j] - M[i][c] * M[c][j]
                M[i][j] = v.exact_div(prev) if prev is not None else v
        prev = M[c][c]
    return M[n - 1][n - 1] if sign == 1 else -M[n - 1][n - 1]


# ---------------------------------------------------------------------------
# Generic rank and kernel


class GenericityWarning(UserWarning):
    """Random-evaluation samples disagreed; the lower rank points are special."""


class BackendMode(str, enum.Enum):
    EXACT = "exact"
    RANDOM = "random"


@dataclasses.dataclass(frozen=True)
class GenericBackend:
    mode: BackendMode = BackendMode.EXACT
    ext_degree: int = 16
    samples: int = 3
    seed: int = 1

    def __post_init__(self):
        object.__setattr__(self, "mode", BackendMode(self.mode))
        if self.mode is BackendMode.RANDOM:
            if self.ext_degree < 12:
                raise ValueError("random backend requires ext_degree >= 12")
            if self.samples < 3:
                raise ValueError("random backend requires samples >= 3")

    @classmethod
    def exact(cls) -> "GenericBackend":
        return cls(BackendMode.EXACT)

    @classmethod
    def random(cls, seed: int = 1, samples: int = 3, ext_degree: int = 16) -> "GenericBackend":
        return cls(BackendMode.RANDOM, ext_degree, samples, seed)

    def sample_points(self, p: int, nvars: int) -> tuple[ExtField, list[np.ndarray]]:
        """Independent uniform points of F_{p^k}^nvars, one per sample."""
        field = ExtField(p, self.ext_degree)
        children = np.random.SeedSequence(self.seed).spawn(self.samples)
        pts = [field.random(np.random.default_rng(ch), (nvars,)) for ch in children]
        return field, pts

    def record(self) -> dict:
        d = {"mode": self.mode.value}
        if self.mode is BackendMode.RANDOM:
            d.update(seed=self.seed, samples=self.samples, ext_degree=self.ext_degree)
        return d

    def error_bound(self, p: int, degree_bound: int, size: int) -> float:
        """Probability bound that the random rank undercounts for one matrix."""
        if self.mode is BackendMode.EXACT:
            return 0.0
        return min(1.0, (degree_bound * size / p ** self.ext_degree) ** self.samples)


def _as_param_matrix(M, p: int | None = None) -> ParamMatrix:
    if isinstance(M, ParamMatrix):
        return M
    rows = [list(r) for r in M]
    first = next((e for r in rows for e in r if isinstance(e, MPoly)), None)
    if first is None:
        if p is None:
            raise ValueError("cannot infer the prime from a matrix of integers")
        return ParamMatrix.from_entries(p, p - 1, rows)
    return ParamMatrix.from_entries(first.p, first.nvars, rows)


@dataclasses.dataclass
class KernelResult:
    dimension: int
    basis: object
    ring: str
    backend: dict
    point: np.ndarray | None = None
    field: ExtField | None = None
    sample_ranks: list[int] | None = None


_CERTIFICATE_SEED = 20240101


def _full_rank_at_point(PM: ParamMatrix) -> list[int] | None:
    """Rows independent at a fixed point of F_(p^16), if they reach min(R, C).

    The rank at any point is at most the generic rank, which is at most
    min(R, C); so reaching the bound there proves the generic rank exactly.
    """
    R, C = PM.shape
    field = ExtField(PM.p, 16)
    pt = field.random(np.random.default_rng(_CERTIFICATE_SEED), (PM.nvars,))
    E = PM.evaluate(field, pt)
    _, piv = field.rref(np.transpose(E, (1, 0, 2)))
    return piv if len(piv) == min(R, C) else None


def generic_row_basis(M, p: int | None = None) -> list[int]:
    """Indices of rows forming a basis of the row space over F_p(c), exactly."""
    PM = _as_param_matrix(M, p)
    R, C = PM.shape
    if R == 0 or C == 0 or PM.is_zero():
        return []
    rows = _full_rank_at_point(PM)
    if rows is None:
        rows = bareiss_echelon(PM.to_entries())[1]
    return sorted(rows)


def generic_rank(M, backend: GenericBackend = GenericBackend(), p: int | None = None) -> int:
    """Rank over F_p(c) of a matrix with polynomial entries."""
    PM = _as_param_matrix(M, p)
    R, C = PM.shape
    if R == 0 or C == 0 or PM.is_zero():
        return 0
    if backend.mode is BackendMode.EXACT:
        return len(generic_row_basis(PM))
    field, pts = backend.sample_points(PM.p, PM.nvars)
    ranks = [field.rank(PM.evaluate(field, pt)) for pt in pts]
    if len(set(ranks)) > 1:
        warnings.warn(f"random samples disagree on rank: {ranks}", GenericityWarning, stacklevel=2)
    return max(ranks)


def generic_kernel(M, backend: GenericBackend = GenericBackend(), p: int | None = None) -> KernelResult:
    """Kernel of a polynomial matrix at a generic parameter value.

    Exact mode returns polynomial vectors (lists of ParamPoly) that span the
    kernel over F_p(c); random mode returns F_{p^k} vectors at the sample
    point that achieved the largest rank.
    """
    PM = _as_param_matrix(M, p)
    R, C = PM.shape
    if backend.mode is BackendMode.EXACT:
        one = ParamPoly.constant(PM.p, 1, PM.nvars)
        zero = one - one
        if R == 0 or PM.is_zero():
            basis = [[one if i == j else zero for i in range(C)] for j in range(C)]
            return KernelResult(C, basis, "polynomial", backend.record())
        rows, piv = bareiss_rref(PM.to_entries())
        pivset = set(piv)
        basis = []
        d = rows[0][piv[0]] if rows else one
        for f in range(C):
            if f in pivset:
                continue
            vec = [zero] * C
            vec[f] = d
            for r, c in enumerate(piv):
                vec[c] = -rows[r][f]
            try:
                vec = [e.exact_div(d) for e in vec]
            except ArithmeticError:
                pass
            basis.append(vec)
        return KernelResult(len(basis), basis, "polynomial", backend.record())
    field, pts = backend.sample_points(PM.p, PM.nvars)
    best = None
    ranks = []
    for pt in pts:
        E = PM.evaluate(field, pt)
        rk = field.rank(E) if R else 0
        ranks.append(rk)
        if best is None or rk > best[0]:
            best = (rk, E, pt)
    if len(set(ranks)) > 1:
        warnings.warn(f"random samples disagree on rank: {ranks}", GenericityWarning, stacklevel=2)
    rk, E, pt = best
    basis = field.nullspace(E)
    return KernelResult(C - rk, basis, f"GF({PM.p}^{field.k})", backend.record(),
                        point=pt, field=field, sample_ranks=ranks)
