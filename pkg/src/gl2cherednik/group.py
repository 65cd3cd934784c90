"""GL_2(F_p), its action on h and h*, and the reflection classes.

A group element is stored as its matrix on h in the basis y1, y2 (columns are
images). On h* (basis x1, x2) the same element acts by the transpose inverse.
"""

from __future__ import annotations

import dataclasses
import functools
import itertools
from typing import Iterator

import numpy as np

from .scalars import _check_odd_prime, inv_mod, is_irreducible

__all__ = [
    "GroupElement",
    "Reflection",
    "identity",
    "all_elements",
    "generators",
    "enumerate_reflections",
    "reflection_to_matrix",
    "act_on_hstar_poly_matrix",
    "brute_force_reflections",
    "p_regular_class_reps",
    "pairing",
    "primitive_root",
    "class_elements",
    "random_elements",
]


@dataclasses.dataclass(frozen=True)
class GroupElement:
    """Invertible 2x2 matrix over F_p: ``entries = ((a, b), (c, d))``."""

    entries: tuple
    p: int

    def __post_init__(self):
        (a, b), (c, d) = self.entries
        p = self.p
        ent = ((a % p, b % p), (c % p, d % p))
        object.__setattr__(self, "entries", ent)
        if (ent[0][0] * ent[1][1] - ent[0][1] * ent[1][0]) % p == 0:
            raise ValueError(f"singular matrix {ent} mod {p}")

    @classmethod
    def from_array(cls, A, p: int) -> "GroupElement":
        A = np.asarray(A, dtype=np.int64)
        return cls(((int(A[0, 0]), int(A[0, 1])), (int(A[1, 0]), int(A[1, 1]))), p)

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.entries, dtype=np.int64)

    @property
    def det(self) -> int:
        (a, b), (c, d) = self.entries
        return (a * d - b * c) % self.p

    @property
    def trace(self) -> int:
        return (self.entries[0][0] + self.entries[1][1]) % self.p

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        if other.p != self.p:
            raise ValueError("modulus mismatch")
        return GroupElement.from_array(self.matrix @ other.matrix % self.p, self.p)

    def inverse(self) -> "GroupElement":
        (a, b), (c, d) = self.entries
        di = inv_mod(self.det, self.p)
        return GroupElement(((d * di, -b * di), (-c * di, a * di)), self.p)

    def conjugate(self, s: "GroupElement") -> "GroupElement":
        """self * s * self^-1."""
        return self @ s @ self.inverse()

    def hstar_matrix(self) -> np.ndarray:
        return act_on_hstar_poly_matrix(self)

    def order(self) -> int:
        e, g, n = identity(self.p), self, 1
        while g != e:
            g, n = g @ self, n + 1
        return n

    def is_p_regular(self) -> bool:
        return self.order() % self.p != 0

    def __repr__(self):
        return f"GL2({self.entries}, p={self.p})"


def identity(p: int) -> GroupElement:
    return GroupElement(((1, 0), (0, 1)), p)


def act_on_hstar_poly_matrix(g: GroupElement) -> np.ndarray:
    """Matrix of g on h* in the basis x1, x2: the transpose inverse of g."""
    return g.inverse().matrix.T.copy()


def pairing(x, y, p: int) -> int:
    """Canonical pairing of a covector x in h* with a vector y in h."""
    return (int(x[0]) * int(y[0]) + int(x[1]) * int(y[1])) % p


@functools.lru_cache(maxsize=None)
def all_elements(p: int) -> tuple[GroupElement, ...]:
    out = []
    for a, b, c, d in itertools.product(range(p), repeat=4):
        if (a * d - b * c) % p:
            out.append(GroupElement(((a, b), (c, d)), p))
    return tuple(out)


def generators(p: int) -> tuple[GroupElement, ...]:
    """A generating set: diag(zeta, 1) with zeta primitive, a transvection, the swap."""
    zeta = primitive_root(p)
    return (
        GroupElement(((zeta, 0), (0, 1)), p),
        GroupElement(((1, 1), (0, 1)), p),
        GroupElement(((0, 1), (1, 0)), p),
    )


def primitive_root(p: int) -> int:
    return next(z for z in range(2, p)
                if all(pow(z, (p - 1) // q, p) != 1 for q in _prime_factors(p - 1)))


def _prime_factors(n: int) -> list[int]:
    out, f = [], 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


@dataclasses.dataclass(frozen=True)
class Reflection:
    """A reflection s, given by alpha in h* and alpha_vee in h.

    s acts on h* by x -> x - (alpha_vee, x) alpha, and ``lam = 1 - (alpha_vee, alpha)``
    is its nontrivial eigenvalue on h*.
    """

    alpha: tuple
    alpha_vee: tuple
    lam: int
    p: int

    def __post_init__(self):
        p = self.p
        object.__setattr__(self, "alpha", tuple(int(a) % p for a in self.alpha))
        object.__setattr__(self, "alpha_vee", tuple(int(a) % p for a in self.alpha_vee))
        lam = (1 - pairing(self.alpha, self.alpha_vee, p)) % p
        if lam == 0:
            raise ValueError("(alpha, alpha_vee) = 1 does not give a reflection")
        if not any(self.alpha) or not any(self.alpha_vee):
            raise ValueError("alpha and alpha_vee must be nonzero")
        if self.lam % p != lam:
            raise ValueError(f"class label {self.lam} does not match 1 - (alpha_vee, alpha) = {lam}")
        object.__setattr__(self, "lam", lam)

    @functools.cached_property
    def matrix(self) -> GroupElement:
        return reflection_to_matrix(self)

    def hstar_matrix(self) -> np.ndarray:
        """I - alpha alpha_vee^T, the action on x1, x2."""
        a = np.array(self.alpha, dtype=np.int64)
        av = np.array(self.alpha_vee, dtype=np.int64)
        return (np.eye(2, dtype=np.int64) - np.outer(a, av)) % self.p


def reflection_to_matrix(s: Reflection) -> GroupElement:
    """Matrix on h: y -> y + (y, alpha) / lam * alpha_vee."""
    p = s.p
    li = inv_mod(s.lam, p)
    a = np.array(s.alpha, dtype=np.int64)
    av = np.array(s.alpha_vee, dtype=np.int64)
    return GroupElement.from_array((np.eye(2, dtype=np.int64) + li * np.outer(av, a)) % p, p)


@functools.lru_cache(maxsize=None)
def enumerate_reflections(p: int) -> dict[int, tuple[Reflection, ...]]:
    """All reflections of GL_2(F_p), bucketed by class label lam in 1..p-1.

    Order: for alpha = x1 + b x2 loop over b then d; then the family alpha = x2.
    """
    _check_odd_prime(p)
    classes: dict[int, tuple[Reflection, ...]] = {}
    for lam in range(1, p):
        refl = []
        for b in range(p):
            for d in range(p):
                if lam == 1 and d == 0:
                    continue
                refl.append(Reflection((1, b), ((1 - lam - b * d), d), lam, p))
        for a in range(p):
            if lam == 1 and a == 0:
                continue
            refl.append(Reflection((0, 1), (a, 1 - lam), lam, p))
        classes[lam] = tuple(refl)
    return classes


def brute_force_reflections(p: int) -> dict[int, set[GroupElement]]:
    """Scan of all g with rank(1 - g) = 1 on h, bucketed by lam = det(g)^-1.

    A reflection has eigenvalues 1 and mu on h; its eigenvalue on h* is mu^-1.
    """
    out: dict[int, set] = {lam: set() for lam in range(1, p)}
    I2 = np.eye(2, dtype=np.int64)
    for g in all_elements(p):
        D = (I2 - g.matrix) % p
        if D.any() and (D[0, 0] * D[1, 1] - D[0, 1] * D[1, 0]) % p == 0:
            out[inv_mod(g.det, p)].add(g)
    return out


@functools.lru_cache(maxsize=None)
def p_regular_class_reps(p: int) -> tuple[GroupElement, ...]:
    """One element from each conjugacy class of order prime to p."""
    reps = [GroupElement(((a, 0), (0, a)), p) for a in range(1, p)]
    reps += [GroupElement(((a, 0), (0, b)), p) for a in range(1, p) for b in range(a + 1, p)]
    for tr in range(p):
        for nm in range(1, p):
            # x^2 - tr x + nm irreducible
            if is_irreducible([nm, -tr % p, 1], p):
                reps.append(GroupElement(((0, -nm), (1, tr)), p))
    return tuple(reps)


def class_elements(g: GroupElement) -> set[GroupElement]:
    return {h.conjugate(g) for h in all_elements(g.p)}


def random_elements(p: int, rng: np.random.Generator, n: int) -> Iterator[GroupElement]:
    elems = all_elements(p)
    for idx in rng.integers(0, len(elems), size=n):
        yield elems[int(idx)]
