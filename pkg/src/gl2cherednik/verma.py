"""Verma modules S h* (x) tau, Dunkl operators, class sums and the known
families of singular vectors.

The degree-n piece has basis x1^(n-k) x2^k (x) y1^(i-b) y2^b with coordinate
index k * (i + 1) + b. Dunkl operators are returned as ``ParamMatrix``
objects: polynomial of degree <= 1 in the class parameters c_1..c_{p-1}
(variable lam-1 is c_lam).
"""

from __future__ import annotations

import dataclasses
import enum
import functools
from typing import Sequence

import numpy as np

from .group import GroupElement, Reflection, enumerate_reflections, generators
from .k0ring import IrredLabel
from .polyring import (
    BivariatePoly,
    derivative_matrix,
    dickson_invariants,
    divided_difference_matrix,
    hstar_action_matrix,
    linear_substitution_matrix,
    monomial,
    v_components,
)
from .scalars import (
    BackendMode,
    GenericBackend,
    ParamMatrix,
    ParamPoly,
    fp_rank,
    fp_rref,
    inv_mod,
)

__all__ = [
    "TauRep",
    "ParamSet",
    "VermaPiece",
    "VermaVector",
    "SingularFamily",
    "dunkl_matrix",
    "dunkl_parts",
    "central_sum",
    "h_constant",
    "h_closed_form",
    "explicit_singular_family",
    "check_singular",
    "submodule_span",
    "piece_action",
    "families_for",
    "family_modulo",
    "family_t",
    "singular_space",
]


@dataclasses.dataclass(frozen=True)
class TauRep:
    """S^i h (x) det^j with basis y1^(i-b) y2^b."""

    label: IrredLabel

    @classmethod
    def of(cls, p: int, i: int, j: int = 0) -> "TauRep":
        return cls(IrredLabel(i, j, p))

    @property
    def p(self) -> int:
        return self.label.p

    @property
    def i(self) -> int:
        return self.label.i

    @property
    def j(self) -> int:
        return self.label.j

    @property
    def dim(self) -> int:
        return self.label.i + 1

    def act(self, g: GroupElement | Reflection) -> np.ndarray:
        if isinstance(g, Reflection):
            g = g.matrix
        M = linear_substitution_matrix(g.matrix, self.i, self.p)
        return (M * pow(g.det, self.j, self.p)) % self.p


@dataclasses.dataclass(frozen=True)
class ParamSet:
    """t in {0, 1} and either symbolic parameters (``c=None``) or F_p values
    ``c[lam - 1]`` for lam = 1..p-1."""

    p: int
    t: int
    c: tuple | None = None

    def __post_init__(self):
        if self.t not in (0, 1):
            raise ValueError("only t = 0 and t = 1 are supported")
        if self.c is not None:
            if len(self.c) != self.p - 1:
                raise ValueError(f"expected {self.p - 1} parameter values")
            object.__setattr__(self, "c", tuple(int(v) % self.p for v in self.c))

    @property
    def symbolic(self) -> bool:
        return self.c is None


@dataclasses.dataclass(frozen=True)
class VermaPiece:
    tau: TauRep
    degree: int

    @property
    def dim(self) -> int:
        return (self.degree + 1) * self.tau.dim

    def index(self, k: int, b: int) -> int:
        """Coordinate of x1^(n-k) x2^k (x) y1^(i-b) y2^b."""
        return k * self.tau.dim + b

    def basis(self) -> list[tuple[tuple[int, int], int]]:
        n = self.degree
        return [((n - k, k), b) for k in range(n + 1) for b in range(self.tau.dim)]


@dataclasses.dataclass(frozen=True)
class VermaVector:
    """Homogeneous element of M(tau) with coefficients in F_p."""

    tau: TauRep
    degree: int
    coords: tuple

    @classmethod
    def from_components(cls, tau: TauRep, comps: dict[int, BivariatePoly]) -> "VermaVector":
        degs = {f.total_degree() for f in comps.values() if not f.is_zero()}
        if len(degs) != 1:
            raise ValueError("vector must be nonzero and homogeneous")
        n = degs.pop()
        piece = VermaPiece(tau, n)
        v = np.zeros(piece.dim, dtype=np.int64)
        for b, f in comps.items():
            if not f.is_homogeneous():
                raise ValueError("vector must be homogeneous")
            for (a1, a2), c in f.terms.items():
                v[piece.index(a2, b)] = (v[piece.index(a2, b)] + c) % tau.p
        return cls(tau, n, tuple(int(x) for x in v))

    @classmethod
    def basis_vector(cls, tau: TauRep, degree: int, k: int, b: int) -> "VermaVector":
        piece = VermaPiece(tau, degree)
        v = [0] * piece.dim
        v[piece.index(k, b)] = 1
        return cls(tau, degree, tuple(v))

    @property
    def array(self) -> np.ndarray:
        return np.array(self.coords, dtype=np.int64)

    def components(self) -> dict[int, BivariatePoly]:
        p, d, n = self.tau.p, self.tau.dim, self.degree
        out = {}
        for b in range(d):
            out[b] = BivariatePoly(p, {(n - k, k): self.coords[k * d + b] for k in range(n + 1)})
        return out

    def __str__(self):
        parts = []
        for b, f in self.components().items():
            if not f.is_zero():
                parts.append(f"({f}) (x) y1^{self.tau.i - b} y2^{b}")
        return " + ".join(parts) if parts else "0"


def piece_action(tau: TauRep, g: GroupElement | Reflection, n: int) -> np.ndarray:
    """Matrix of g on S^n h* (x) tau."""
    return np.kron(hstar_action_matrix(g, n), tau.act(g)) % tau.p


# ---------------------------------------------------------------------------
# Dunkl operators


@functools.lru_cache(maxsize=16)
def dunkl_parts(p: int, i: int, j: int, n: int, y: int) -> tuple[np.ndarray, dict[int, np.ndarray]]:
    """(derivative part, {lam: D_lam}) for D_{y_(y+1)} from degree n to n-1.

    D_lam = sum over s in C_lam of (y, alpha_s) Delta_s (x) s, so the Dunkl
    operator is t * derivative - sum_lam c_lam D_lam.
    """
    tau = TauRep.of(p, i, j)
    d = tau.dim
    deriv = np.kron(derivative_matrix(y, n, p), np.eye(d, dtype=np.int64)) % p
    classes = {}
    for lam, refl in enumerate_reflections(p).items():
        weights = np.array([s.alpha[y] for s in refl], dtype=np.float64)
        keep = weights != 0
        rs = [s for s, k in zip(refl, keep) if k]
        w = weights[keep]
        Dl = np.stack([divided_difference_matrix(s, n) for s in rs]).reshape(len(rs), -1)
        Rs = np.stack([tau.act(s) for s in rs]).reshape(len(rs), -1)
        # sum_s w_s kron(Delta_s, R_s) via one matrix product over s
        prod = (Dl.astype(np.float64).T * w) @ Rs.astype(np.float64)
        prod = np.rint(prod).astype(np.int64) % p
        prod = prod.reshape(n, n + 1, d, d).transpose(0, 2, 1, 3).reshape(n * d, (n + 1) * d)
        classes[lam] = np.ascontiguousarray(prod)
    for arr in [deriv, *classes.values()]:
        arr.setflags(write=False)
    return deriv, classes


def dunkl_matrix(params: ParamSet, tau: TauRep, y, n: int) -> ParamMatrix:
    """Matrix of D_y from degree n to degree n-1.

    ``y`` is 0 or 1 for y1, y2, or a length-2 coefficient vector for a
    general element of h.
    """
    p = tau.p
    if n < 1:
        raise ValueError("the Dunkl operator is the zero map on degree 0")
    if isinstance(y, (int, np.integer)):
        yvec = [1, 0] if int(y) == 0 else [0, 1]
        if int(y) not in (0, 1):
            raise ValueError("y must be 0, 1 or a vector")
    else:
        yvec = [int(v) % p for v in y]
    nv = p - 1
    shape = (n * tau.dim, (n + 1) * tau.dim)
    parts: dict = {}
    const = np.zeros(shape, dtype=np.int64)
    for idx, coef in enumerate(yvec):
        if not coef:
            continue
        deriv, classes = dunkl_parts(p, tau.i, tau.j, n, idx)
        const = (const + coef * params.t * deriv) % p
        for lam, D in classes.items():
            if params.symbolic:
                key = tuple(1 if l == lam - 1 else 0 for l in range(nv))
                contrib = (-coef * D) % p
                parts[key] = (parts[key] + contrib) % p if key in parts else contrib
            else:
                const = (const - coef * params.c[lam - 1] * D) % p
    parts[(0,) * nv] = const
    return ParamMatrix(p, nv, shape, parts)


# ---------------------------------------------------------------------------
# Class sums and block constants


def central_sum(lam: int, tau: TauRep) -> int:
    """The scalar by which sum_{s in C_lam} s acts on tau."""
    p = tau.p
    total = np.zeros((tau.dim, tau.dim), dtype=np.int64)
    for s in enumerate_reflections(p)[lam]:
        total = (total + tau.act(s)) % p
    scalar = int(total[0, 0])
    if not (total == scalar * np.eye(tau.dim, dtype=np.int64) % p).all():
        raise RuntimeError(f"class sum for lam={lam} is not scalar on {tau.label}")
    return scalar


def h_constant(params: ParamSet, tau: TauRep):
    """h_c(tau) = -sum_lam c_lam * central_sum(lam, tau); a ParamPoly when the
    parameters are symbolic, otherwise an int mod p."""
    p = tau.p
    if params.symbolic:
        out = ParamPoly(p)
        for lam in range(1, p):
            out = out - ParamPoly.param(p, lam) * central_sum(lam, tau)
        return out
    return (-sum(params.c[lam - 1] * central_sum(lam, tau) for lam in range(1, p))) % p


def h_closed_form(tau: TauRep, exponent_sign: int = -1) -> ParamPoly:
    """c_1 for i < p-1 and -sum_{lam != 1} lam^(sign * j) c_lam for i = p-1."""
    p = tau.p
    if tau.i < p - 1:
        return ParamPoly.param(p, 1)
    out = ParamPoly(p)
    for lam in range(2, p):
        out = out - ParamPoly.param(p, lam) * pow(lam if exponent_sign > 0 else inv_mod(lam, p),
                                                  tau.j, p)
    return out


# ---------------------------------------------------------------------------
# Singular vector families


class SingularFamily(str, enum.Enum):
    DEGREE_ONE = "degree-one"
    FROBENIUS_LINEAR = "frobenius-linear"
    PAIRING = "pairing"
    QUADRATIC = "quadratic"
    CUBIC_PIECE = "cubic-piece"
    FROBENIUS_PAIRING = "frobenius-pairing"
    FROBENIUS_QUADRATIC = "frobenius-quadratic"
    FROBENIUS_CUBIC = "frobenius-cubic"
    ANTISYMMETRIC = "antisymmetric"
    V_BASIS = "v-basis"
    V_PRIME_BASIS = "v-prime-basis"
    INVARIANTS = "invariants"
    FROBENIUS_INVARIANTS = "frobenius-invariants"


# family -> (t, allowed i as a function of p, families it is singular modulo)
_FAMILY_INFO: dict[SingularFamily, tuple[int, object, tuple[SingularFamily, ...]]] = {
    SingularFamily.DEGREE_ONE: (0, lambda p, i: i <= p - 3, ()),
    SingularFamily.FROBENIUS_LINEAR: (1, lambda p, i: i <= p - 3, ()),
    SingularFamily.PAIRING: (0, lambda p, i: i == p - 2, ()),
    SingularFamily.QUADRATIC: (0, lambda p, i: i == p - 2, (SingularFamily.PAIRING,)),
    SingularFamily.CUBIC_PIECE: (0, lambda p, i: i == p - 2,
                                 (SingularFamily.PAIRING, SingularFamily.QUADRATIC)),
    SingularFamily.FROBENIUS_PAIRING: (1, lambda p, i: i == p - 2, ()),
    SingularFamily.FROBENIUS_QUADRATIC: (1, lambda p, i: i == p - 2,
                                         (SingularFamily.FROBENIUS_PAIRING,)),
    SingularFamily.FROBENIUS_CUBIC: (1, lambda p, i: i == p - 2,
                                     (SingularFamily.FROBENIUS_PAIRING,
                                      SingularFamily.FROBENIUS_QUADRATIC)),
    SingularFamily.ANTISYMMETRIC: (0, lambda p, i: i == p - 1, ()),
    SingularFamily.V_BASIS: (0, lambda p, i: i == p - 1, ()),
    SingularFamily.V_PRIME_BASIS: (1, lambda p, i: i == p - 1, ()),
    SingularFamily.INVARIANTS: (0, lambda p, i: True, ()),
    SingularFamily.FROBENIUS_INVARIANTS: (1, lambda p, i: True, ()),
}


def family_t(family: SingularFamily) -> int:
    return _FAMILY_INFO[SingularFamily(family)][0]


def family_modulo(family: SingularFamily) -> tuple[SingularFamily, ...]:
    """The families whose generated submodule the given family is singular modulo."""
    return _FAMILY_INFO[SingularFamily(family)][2]


def families_for(p: int, t: int, i: int) -> list[SingularFamily]:
    return [f for f, (ft, ok, _) in _FAMILY_INFO.items() if ft == t and ok(p, i)]


def explicit_singular_family(p: int, family: SingularFamily, tau: TauRep) -> list[VermaVector]:
    family = SingularFamily(family)
    t, ok, _ = _FAMILY_INFO[family]
    if tau.p != p or not ok(p, tau.i):
        raise ValueError(f"family {family.value} does not apply to {tau.label}")
    d = tau.dim
    F = SingularFamily
    mono = functools.partial(monomial, p)

    def vec(comps):
        return VermaVector.from_components(tau, comps)

    if family in (F.DEGREE_ONE, F.FROBENIUS_LINEAR):
        e = 1 if family is F.DEGREE_ONE else p
        return [vec({b: mono(e * (1 - k), e * k)}) for k in range(2) for b in range(d)]
    if family in (F.PAIRING, F.FROBENIUS_PAIRING):
        e = 1 if family is F.PAIRING else p
        # x1 (x) y1 f + x2 (x) y2 f with f = y1^(p-3-a) y2^a
        return [vec({a: mono(e, 0), a + 1: mono(0, e)}) for a in range(p - 2)]
    if family in (F.QUADRATIC, F.FROBENIUS_QUADRATIC):
        e = 1 if family is F.QUADRATIC else p
        return [vec({0: mono(0, 2 * e)}), vec({p - 2: mono(2 * e, 0)})]
    if family in (F.CUBIC_PIECE, F.FROBENIUS_CUBIC):
        e = 1 if family is F.CUBIC_PIECE else p
        return [vec({b: mono(e * (3 - k), e * k)}) for k in range(4) for b in range(d)]
    if family is F.ANTISYMMETRIC:
        return [vec({p - 1: mono(p - 1, 0), 0: mono(0, p - 1, -1)})]
    if family in (F.V_BASIS, F.V_PRIME_BASIS):
        frob = family is F.V_PRIME_BASIS
        return [vec(v_components(p, k, frobenius=frob)) for k in range(p)]
    if family in (F.INVARIANTS, F.FROBENIUS_INVARIANTS):
        out = []
        for Q in dickson_invariants(p):
            if family is F.FROBENIUS_INVARIANTS:
                Q = Q ** p
            out += [vec({b: Q}) for b in range(d)]
        return out
    raise AssertionError(family)  # pragma: no cover


# ---------------------------------------------------------------------------
# Submodule spans and singularity checks


def _closure_under(mats: Sequence[np.ndarray], rows: np.ndarray, p: int) -> np.ndarray:
    """Row basis (RREF) of the smallest subspace containing ``rows`` and stable
    under right multiplication by the transposes of ``mats``."""
    R, _ = fp_rref(rows, p)
    while True:
        new = np.vstack([R] + [(R @ M.T) % p for M in mats])
        R2, _ = fp_rref(new, p)
        if R2.shape[0] == R.shape[0]:
            return R2
        R = R2


def submodule_span(generators_: Sequence[VermaVector], n: int, tau: TauRep | None = None) -> np.ndarray:
    """Row basis over F_p of sum_d S^(n-d) h* . (G-span of the degree-d generators)."""
    if tau is None:
        if not generators_:
            raise ValueError("tau is required when there are no generators")
        tau = generators_[0].tau
    p = tau.p
    piece = VermaPiece(tau, n)
    rows = []
    by_degree: dict[int, list[VermaVector]] = {}
    for v in generators_:
        if v.tau != tau:
            raise ValueError("generators belong to different Verma modules")
        by_degree.setdefault(v.degree, []).append(v)
    gens = generators(p)
    I_tau = np.eye(tau.dim, dtype=np.int64)
    for d, vs in by_degree.items():
        if d > n:
            continue
        G = _closure_under([piece_action(tau, g, d) for g in gens],
                           np.array([v.array for v in vs]), p)
        m = n - d
        for k in range(m + 1):
            # multiplication by x1^(m-k) x2^k from degree d to degree n
            mult = np.zeros((n + 1, d + 1), dtype=np.int64)
            mult[np.arange(d + 1) + k, np.arange(d + 1)] = 1
            rows.append((G @ np.kron(mult, I_tau).T) % p)
    if not rows:
        return np.zeros((0, piece.dim), dtype=np.int64)
    R, _ = fp_rref(np.vstack(rows), p)
    return R


def _quotient_projection(W: np.ndarray, p: int) -> np.ndarray:
    """Matrix sending u to its reduction modulo the RREF rows W, restricted to
    the non-pivot coordinates (a coordinate map of the quotient by W)."""
    _, piv = fp_rref(W, p)
    N = W.shape[1]
    P = np.eye(N, dtype=np.int64)
    for r, c in enumerate(piv):
        P[:, c] = (P[:, c] - W[r]) % p
    pivset = set(piv)
    return P[[k for k in range(N) if k not in pivset]]


def check_singular(params: ParamSet, v: VermaVector, modulo: Sequence[VermaVector] = (),
                   backend: GenericBackend = GenericBackend()) -> bool:
    """True iff D_y1 v and D_y2 v lie in the submodule generated by ``modulo``.

    Exact mode requires every parameter-monomial component to lie in the span
    (the span is defined over F_p). Random mode evaluates the parameters at
    random points of F_{p^k}.
    """
    tau = v.tau
    p = tau.p
    n = v.degree
    if n == 0:
        return True
    W = submodule_span(list(modulo), n - 1, tau)
    base_rank = W.shape[0]
    x = v.array
    for y in (0, 1):
        D = dunkl_matrix(params, tau, y, n)
        image = D @ x
        if backend.mode is BackendMode.EXACT or not params.symbolic:
            for part in image.parts.values():
                col = part[:, 0]
                if base_rank == 0:
                    if col.any():
                        return False
                elif fp_rank(np.vstack([W, col]), p) > base_rank:
                    return False
        else:
            field, pts = backend.sample_points(p, p - 1)
            Wf = field.embed(W)
            for pt in pts:
                col = image.evaluate(field, pt)[:, 0, :]
                if base_rank == 0:
                    if col.any():
                        return False
                elif field.rank(np.concatenate([Wf, col[None]], axis=0)) > base_rank:
                    return False
    return True


def singular_space(params: ParamSet, tau: TauRep, n: int,
                   modulo: Sequence[VermaVector] = (),
                   backend: GenericBackend = GenericBackend()):
    """Vectors of degree n that are singular modulo the given submodule.

    Returns (dimension, basis rows). Exact mode gives an F_p(c) basis as
    polynomial vectors; random mode gives vectors over F_{p^k}.
    """
    from .scalars import generic_kernel

    p = tau.p
    W = submodule_span(list(modulo), n - 1, tau) if n >= 1 else None
    if n == 0:
        return tau.dim, np.eye(tau.dim, dtype=np.int64)
    P = None
    if W is not None and W.shape[0]:
        P = _quotient_projection(W, p)
    blocks = []
    for y in (0, 1):
        D = dunkl_matrix(params, tau, y, n)
        blocks.append(D if P is None else (P @ D))
    M = ParamMatrix.vstack(blocks)
    res = generic_kernel(M, backend)
    return res.dimension, res.basis
