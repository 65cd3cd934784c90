"""Bivariate polynomials in x1, x2, the group action on them, divided
differences and the Dickson invariants.

Two representations coexist. ``BivariatePoly`` is a sparse polynomial used
for closed-form objects (invariants, the matrix A). Homogeneous pieces used in
linear algebra are dense coefficient vectors over the basis
x1^(n-k) x2^k, k = 0..n, indexed by the x2-exponent k.
"""

from __future__ import annotations

import functools
from typing import Sequence

import numpy as np

from .group import GroupElement, Reflection, act_on_hstar_poly_matrix
from .scalars import MPoly, _check_odd_prime, bareiss_det, inv_mod

__all__ = [
    "BivariatePoly",
    "x1",
    "x2",
    "monomial",
    "group_act",
    "divided_difference",
    "dickson_invariants",
    "q1_transposed_display",
    "q1_quotient",
    "v_components",
    "matrix_A",
    "det_matrix_A",
    "linear_substitution_matrix",
    "hstar_action_matrix",
    "divided_difference_matrix",
    "derivative_matrix",
    "multiplication_matrix",
    "divide_by_linear",
    "poly_multiplication_matrix",
]


class BivariatePoly(MPoly):
    """Polynomial over F_p in x1, x2; ``terms`` maps (a, b) to the coefficient of
    x1^a x2^b."""

    __slots__ = ()
    var_names = ("x1", "x2")

    def __init__(self, p: int, terms=None):
        super().__init__(p, 2, terms)

    @classmethod
    def constant(cls, p: int, value: int):
        return cls(p, {(0, 0): value})

    def degree_part(self, n: int) -> "BivariatePoly":
        return self._new({m: c for m, c in self.terms.items() if sum(m) == n})

    def is_homogeneous(self) -> bool:
        return len({sum(m) for m in self.terms}) <= 1

    def to_vector(self, n: int) -> np.ndarray:
        """Coefficients of the degree-n part in the basis x1^(n-k) x2^k."""
        v = np.zeros(n + 1, dtype=np.int64)
        for (a, b), c in self.terms.items():
            if a + b == n:
                v[b] = c
        return v

    @classmethod
    def from_vector(cls, p: int, v: Sequence[int]) -> "BivariatePoly":
        n = len(v) - 1
        return cls(p, {(n - k, k): int(c) for k, c in enumerate(v)})

    def frobenius_twist(self) -> "BivariatePoly":
        """f(x1^p, x2^p)."""
        p = self.p
        return self._new({(a * p, b * p): c for (a, b), c in self.terms.items()})


def x1(p: int) -> BivariatePoly:
    return BivariatePoly(p, {(1, 0): 1})


def x2(p: int) -> BivariatePoly:
    return BivariatePoly(p, {(0, 1): 1})


def monomial(p: int, a: int, b: int, coeff: int = 1) -> BivariatePoly:
    return BivariatePoly(p, {(a, b): coeff})


def _linear(p: int, coeffs) -> BivariatePoly:
    return BivariatePoly(p, {(1, 0): int(coeffs[0]), (0, 1): int(coeffs[1])})


def _substitute(f: BivariatePoly, H: np.ndarray) -> BivariatePoly:
    """Replace x_j by sum_i H[i, j] x_i."""
    p = f.p
    images = [_linear(p, H[:, 0]), _linear(p, H[:, 1])]
    pow_cache: dict = {}

    def power(j, e):
        key = (j, e)
        if key not in pow_cache:
            pow_cache[key] = images[j] ** e
        return pow_cache[key]

    out = BivariatePoly(p)
    for (a, b), c in f.terms.items():
        out = out + power(0, a) * power(1, b) * c
    return out


def group_act(g: GroupElement | Reflection, f: BivariatePoly) -> BivariatePoly:
    """g . f for g acting on h* by the transpose inverse of its matrix on h."""
    H = g.hstar_matrix() if isinstance(g, Reflection) else act_on_hstar_poly_matrix(g)
    return _substitute(f, H)


def divided_difference(s: Reflection, f: BivariatePoly) -> BivariatePoly:
    """(f - s.f) / alpha_s, by exact division by the linear form alpha_s."""
    num = f - group_act(s, f)
    if num.is_zero():
        return num
    try:
        return num.exact_div(_linear(f.p, s.alpha))
    except ArithmeticError as exc:  # pragma: no cover - would be a bug
        raise RuntimeError("divided difference left a remainder") from exc


# ---------------------------------------------------------------------------
# Invariants


def dickson_invariants(p: int) -> tuple[BivariatePoly, BivariatePoly]:
    """(Q0, Q1): Q0 = (x1^p x2 - x1 x2^p)^(p-1) of degree p^2-1 and
    Q1 = sum_i x1^((p-1)(p-i)) x2^((p-1) i) of degree p^2-p."""
    _check_odd_prime(p)
    L = BivariatePoly(p, {(p, 1): 1, (1, p): -1})
    Q0 = L ** (p - 1)
    Q1 = BivariatePoly(p, {((p - 1) * (p - i), (p - 1) * i): 1 for i in range(p + 1)})
    return Q0, Q1


def q1_transposed_display(p: int) -> BivariatePoly:
    """sum_i x1^((p-1) i) x2^((p-1)(p-i)), the second written form of Q1."""
    return BivariatePoly(p, {((p - 1) * i, (p - 1) * (p - i)): 1 for i in range(p + 1)})


def q1_quotient(p: int) -> BivariatePoly:
    """(x1^(p^2) x2 - x1 x2^(p^2)) / (x1^p x2 - x1 x2^p)."""
    num = BivariatePoly(p, {(p * p, 1): 1, (1, p * p): -1})
    den = BivariatePoly(p, {(p, 1): 1, (1, p): -1})
    return num.exact_div(den)


# ---------------------------------------------------------------------------
# The v_k vectors and the matrix A


def v_components(p: int, k: int, frobenius: bool = False) -> dict[int, BivariatePoly]:
    """Components of v_k (or v'_k) in S h* (x) S^(p-1) h.

    Returns a map from the tau-index i (basis vector y1^(p-1-i) y2^i) to the
    polynomial coefficient. With ``frobenius`` every x-exponent is scaled by p.
    """
    if not 0 <= k <= p - 1:
        raise ValueError(f"k must lie in 0..{p - 1}")
    e = p if frobenius else 1
    comps: dict[int, BivariatePoly] = {}
    for i in range(p):
        f = BivariatePoly(p)
        sign = -1 if i % 2 else 1
        if i <= k:
            f = f + monomial(p, e * (k - i), e * (p - 1 - k + i), sign)
        if i >= k:
            f = f + monomial(p, e * (p - 1 + k - i), e * (i - k), sign)
        comps[i] = f
    return comps


def matrix_A(p: int) -> list[list[BivariatePoly]]:
    """Entry (i, k) is the coefficient of v_k at y1^(p-1-i) y2^i."""
    cols = [v_components(p, k) for k in range(p)]
    return [[cols[k][i] for k in range(p)] for i in range(p)]


def det_matrix_A(p: int) -> BivariatePoly:
    return bareiss_det(matrix_A(p))


# ---------------------------------------------------------------------------
# Dense matrices on homogeneous pieces


def _poly_mul_vec(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    return np.convolve(a, b) % p


@functools.lru_cache(maxsize=512)
def _linear_substitution_cached(key: tuple, n: int, p: int) -> np.ndarray:
    H = np.array(key, dtype=np.int64).reshape(2, 2)
    L1 = H[:, 0] % p  # image of the first variable, as [coef of var1, coef of var2]
    L2 = H[:, 1] % p
    pw1 = [np.ones(1, dtype=np.int64)]
    pw2 = [np.ones(1, dtype=np.int64)]
    for _ in range(n):
        pw1.append(_poly_mul_vec(pw1[-1], L1, p))
        pw2.append(_poly_mul_vec(pw2[-1], L2, p))
    out = np.zeros((n + 1, n + 1), dtype=np.int64)
    for k in range(n + 1):
        out[:, k] = _poly_mul_vec(pw1[n - k], pw2[k], p)
    out.setflags(write=False)
    return out


def linear_substitution_matrix(H: np.ndarray, n: int, p: int) -> np.ndarray:
    """Matrix of var_j -> sum_i H[i, j] var_i on degree-n forms.

    Column k is the image of var1^(n-k) var2^k in the same basis.
    """
    key = tuple(int(v) % p for v in np.asarray(H).reshape(-1))
    return _linear_substitution_cached(key, n, p)


def hstar_action_matrix(g: GroupElement | Reflection, n: int) -> np.ndarray:
    """Matrix of g on S^n h*."""
    H = g.hstar_matrix() if isinstance(g, Reflection) else act_on_hstar_poly_matrix(g)
    return linear_substitution_matrix(H, n, g.p)


def divide_by_linear(F: np.ndarray, alpha: Sequence[int], p: int) -> np.ndarray:
    """Exact division of the columns of F (degree-n forms) by alpha1 x1 + alpha2 x2."""
    F = np.asarray(F, dtype=np.int64) % p
    n = F.shape[0] - 1
    a1, a2 = int(alpha[0]) % p, int(alpha[1]) % p
    Q = np.zeros((n,) + F.shape[1:], dtype=np.int64)
    if a1:
        inv1 = inv_mod(a1, p)
        prev = np.zeros(F.shape[1:], dtype=np.int64)
        for k in range(n):
            prev = ((F[k] - a2 * prev) * inv1) % p
            Q[k] = prev
        rem = (F[n] - a2 * (Q[n - 1] if n else 0)) % p
    else:
        if not a2:
            raise ZeroDivisionError("division by the zero form")
        inv2 = inv_mod(a2, p)
        Q = (F[1:] * inv2) % p
        rem = F[0]
    if np.any(rem):
        raise RuntimeError("division by a linear form left a remainder")
    return Q


def divided_difference_matrix(s: Reflection, n: int) -> np.ndarray:
    """Matrix of f -> (f - s.f)/alpha_s from S^n h* to S^(n-1) h*."""
    p = s.p
    if n == 0:
        return np.zeros((0, 1), dtype=np.int64)
    D = (np.eye(n + 1, dtype=np.int64) - hstar_action_matrix(s, n)) % p
    return divide_by_linear(D, s.alpha, p)


@functools.lru_cache(maxsize=None)
def derivative_matrix(index: int, n: int, p: int) -> np.ndarray:
    """Matrix of d/dx_index (index 0 or 1) from S^n h* to S^(n-1) h*."""
    out = np.zeros((n, n + 1), dtype=np.int64)
    for k in range(n + 1):
        a, b = n - k, k
        if index == 0 and a:
            out[k, k] = a % p
        elif index == 1 and b:
            out[k - 1, k] = b % p
    out.setflags(write=False)
    return out


@functools.lru_cache(maxsize=None)
def multiplication_matrix(index: int, n: int) -> np.ndarray:
    """Matrix of multiplication by x_index from S^n h* to S^(n+1) h*."""
    out = np.zeros((n + 2, n + 1), dtype=np.int64)
    for k in range(n + 1):
        out[k + index, k] = 1
    out.setflags(write=False)
    return out


def poly_multiplication_matrix(f: BivariatePoly, n: int) -> np.ndarray:
    """Matrix of multiplication by a homogeneous f from S^n h* to S^(n+d) h*."""
    if not f.is_homogeneous():
        raise ValueError("expected a homogeneous polynomial")
    d = f.total_degree()
    if d < 0:
        return np.zeros((n + 1, n + 1), dtype=np.int64)
    fv = f.to_vector(d)
    out = np.zeros((n + d + 1, n + 1), dtype=np.int64)
    for k in range(n + 1):
        out[k:k + d + 1, k] = fv
    return out
