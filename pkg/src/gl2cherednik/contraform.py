"""The contravariant form on a Verma module at generic parameters.

The radical of the form is computed as a kernel filtration: K_0 = 0 and K_n
is the set of degree-n vectors whose images under both Dunkl operators lie
in K_(n-1). Instead of K_n itself we carry a row basis R_n of its annihilator
(linear functionals on the degree-n piece vanishing on K_n); then

    R_n = row basis of [R_(n-1) D_y1 ; R_(n-1) D_y2],   rank_n = #rows(R_n),

and the quotient L_n = M_n / K_n is dual to the row space. The rows of R_n are
the functionals f -> B(f, y^m (x) w), so this is the Gram matrix of the form
written in a row-reduced way.

Two engines implement the same recursion. The exact engine keeps R_n as
polynomial rows in the parameters and selects independent rows by
fraction-free elimination. The numeric engine evaluates the parameters at
random points of F_(p^k) and reduces rows to echelon form there.
"""

from __future__ import annotations

import dataclasses
import functools
import warnings

import numpy as np

from .group import all_elements, enumerate_reflections
from .k0ring import (
    CharacterSeries,
    HilbertSeries,
    IrredLabel,
    K0Element,
    _fp_poly_of_matrix,
    baby_verma_top_degree,
    decompose_separating_counts,
    frobenius_quotient_character,
    reduce_sym,
    separating_eigen_tests,
    tensor_reduce,
)
from .polyring import (
    derivative_matrix,
    divide_by_linear,
    linear_substitution_matrix,
    multiplication_matrix,
)
from .scalars import (
    BackendMode,
    ExtField,
    GenericBackend,
    GenericityWarning,
    ParamMatrix,
    ParamPoly,
    fp_nullspace,
    generic_rank,
    generic_row_basis,
    inv_mod,
)
from .verma import ParamSet, TauRep, dunkl_parts, h_constant, piece_action

__all__ = [
    "KernelFiltration",
    "IrreducibleCharacter",
    "ReducedCharacter",
    "ReductionError",
    "BlockReport",
    "kernel_filtration",
    "irreducible_character",
    "reduced_character",
    "form_matrix_crosscheck",
    "dual_dunkl_matrix",
    "radical_matches_filtration",
    "block_consistency_check",
    "default_degree_cap",
]


class ReductionError(ArithmeticError):
    """A t = 1 character does not factor through the Frobenius quotient."""


def default_degree_cap(p: int, t: int) -> int:
    """One past the top degree of the baby Verma module, of which L is a quotient."""
    return baby_verma_top_degree(p, t) + 1


# ---------------------------------------------------------------------------
# Engines


class _NumericEngine:
    """Rows over F_(p^k) at one parameter point (or over F_p for numeric c)."""

    def __init__(self, params: ParamSet, tau: TauRep, field: ExtField, point: np.ndarray | None):
        self.params, self.tau, self.field = params, tau, field
        p = tau.p
        if params.symbolic:
            self.c = [point[l] for l in range(p - 1)]
        else:
            self.c = [field.embed(np.array(v)) for v in params.c]

    def initial(self) -> np.ndarray:
        d = self.tau.dim
        R = self.field.zero((d, d))
        R[np.arange(d), np.arange(d), 0] = 1
        return R

    def _times_dunkl(self, R: np.ndarray, y: int, n: int) -> np.ndarray:
        f = self.field
        deriv, classes = dunkl_parts(self.tau.p, self.tau.i, self.tau.j, n, y)
        if self.params.t:
            out = f.right_mul_fp(R, deriv)
        else:
            out = f.zero((R.shape[0], deriv.shape[1]))
        for lam, D in classes.items():
            term = f.right_mul_fp(R, D)
            out = (out - f.scale(term, self.c[lam - 1])) % f.p
        return out

    def step(self, R: np.ndarray, n: int) -> np.ndarray:
        S = np.concatenate([self._times_dunkl(R, 0, n), self._times_dunkl(R, 1, n)], axis=0)
        rows, _ = self.field.rref(S)
        return rows

    def rank_on(self, R: np.ndarray, B: np.ndarray) -> int:
        """rank of R restricted to the F_p subspace spanned by the rows of B."""
        if B.shape[0] == 0 or R.shape[0] == 0:
            return 0
        return self.field.rank(self.field.right_mul_fp(R, B.T))

    @staticmethod
    def count(R) -> int:
        return R.shape[0]


class _ExactEngine:
    """Polynomial rows; independent rows chosen by fraction-free elimination."""

    def __init__(self, params: ParamSet, tau: TauRep):
        self.params, self.tau = params, tau

    def initial(self) -> ParamMatrix:
        p = self.tau.p
        return ParamMatrix.constant(p, p - 1, np.eye(self.tau.dim, dtype=np.int64))

    def _times_dunkl(self, R: ParamMatrix, y: int, n: int) -> ParamMatrix:
        from .verma import dunkl_matrix

        return R @ dunkl_matrix(self.params, self.tau, y, n)

    def step(self, R: ParamMatrix, n: int) -> ParamMatrix:
        S = ParamMatrix.vstack([self._times_dunkl(R, 0, n), self._times_dunkl(R, 1, n)])
        return S.rows(generic_row_basis(S))

    def rank_on(self, R: ParamMatrix, B: np.ndarray) -> int:
        if B.shape[0] == 0 or R.shape[0] == 0:
            return 0
        return generic_rank(R @ (B.T % self.tau.p), GenericBackend.exact())

    @staticmethod
    def count(R) -> int:
        return R.shape[0]


# ---------------------------------------------------------------------------
# The filtration


@dataclasses.dataclass
class KernelFiltration:
    """Generic ranks of the form, degree by degree.

    ``rows[n]`` spans the annihilator of K_n: polynomial rows (``ParamMatrix``)
    for the exact engine, arrays of shape (rank, dim, k) over ``field`` for the
    numeric one. ``status`` is "ok" when a zero rank was reached and
    "inconclusive" when the degree cap stopped the computation first.
    """

    params: ParamSet
    tau: TauRep
    backend: GenericBackend
    ranks: list
    rows: list
    status: str
    field: ExtField | None = None
    point: np.ndarray | None = None
    sample_ranks: list | None = None

    @property
    def max_degree(self) -> int:
        return len(self.ranks) - 1

    def piece_dim(self, n: int) -> int:
        return (n + 1) * self.tau.dim

    def kernel_dim(self, n: int) -> int:
        return self.piece_dim(n) - self.ranks[n]

    def hilbert(self) -> HilbertSeries:
        return HilbertSeries.of(self.ranks)

    def _engine(self):
        if self.field is None:
            return _ExactEngine(self.params, self.tau)
        return _NumericEngine(self.params, self.tau, self.field, self.point)

    def kernel_basis(self, n: int) -> np.ndarray:
        """Basis of K_n over the working field (numeric filtrations only)."""
        if self.field is None:
            raise NotImplementedError("kernel bases are only materialized for numeric filtrations")
        R = self.rows[n]
        if R.shape[0] == 0:
            return self.field.nullspace(self.field.zero((0, self.piece_dim(n))))
        return self.field.nullspace(R)

    def quotient_class(self, n: int) -> K0Element:
        """K0 class of the degree-n piece of M / K."""
        p = self.tau.p
        if self.ranks[n] == 0:
            return K0Element.zero(p)
        eng = self._engine()
        counts = [eng.rank_on(self.rows[n], B) for B in _eigen_subspaces(self.tau, n)]
        return decompose_separating_counts(p, counts, dim=self.ranks[n])

    def kernel_class(self, n: int) -> K0Element:
        full = tensor_reduce(reduce_sym(n, -n, self.tau.p), K0Element.label(self.tau.p, self.tau.i, self.tau.j))
        return full - self.quotient_class(n)


@functools.lru_cache(maxsize=256)
def _eigen_subspaces_cached(p: int, i: int, j: int, n: int) -> tuple:
    tau = TauRep.of(p, i, j)
    out = []
    for g, phi in separating_eigen_tests(p):
        X = piece_action(tau, g, n)
        B = fp_nullspace(_fp_poly_of_matrix(phi, X, p), p)
        B.setflags(write=False)
        out.append(B)
    return tuple(out)


def _eigen_subspaces(tau: TauRep, n: int) -> tuple:
    """For each separating test (g, phi), a basis of ker phi(g) on degree n."""
    return _eigen_subspaces_cached(tau.p, tau.i, tau.j, n)


def kernel_filtration(params: ParamSet, tau: TauRep, max_degree: int | None = None,
                      backend: GenericBackend = GenericBackend()) -> KernelFiltration:
    """Ranks rank_0, rank_1, ... of the form, stopping at the first zero.

    With numeric ``params`` the computation is over F_p at those values and
    the backend is not consulted.
    """
    p = tau.p
    if params.p != p:
        raise ValueError("parameters and tau use different primes")
    cap = default_degree_cap(p, params.t)
    if max_degree is None:
        max_degree = cap
    if max_degree > cap:
        raise ValueError(f"max_degree {max_degree} exceeds the safety cap {cap}")

    if not params.symbolic:
        field = ExtField(p, 1)
        return _run_numeric(params, tau, max_degree, backend, field, [None])
    if backend.mode is BackendMode.EXACT:
        eng = _ExactEngine(params, tau)
        ranks, rows, status = _run(eng, max_degree)
        return KernelFiltration(params, tau, backend, ranks, rows, status)
    field, pts = backend.sample_points(p, p - 1)
    return _run_numeric(params, tau, max_degree, backend, field, pts)


def _run(eng, max_degree: int):
    R = eng.initial()
    ranks, rows = [eng.count(R)], [R]
    for n in range(1, max_degree + 1):
        R = eng.step(R, n)
        ranks.append(eng.count(R))
        rows.append(R)
        if ranks[-1] == 0:
            return ranks, rows, "ok"
    return ranks, rows, "inconclusive"


def _run_numeric(params, tau, max_degree, backend, field, pts) -> KernelFiltration:
    runs = [_run(_NumericEngine(params, tau, field, pt), max_degree) for pt in pts]
    all_ranks = [r[0] for r in runs]
    length = max(len(r) for r in all_ranks)
    padded = [r + [0] * (length - len(r)) for r in all_ranks]
    best = max(range(len(runs)), key=lambda s: (sum(padded[s]), -s))
    if any(r != padded[best] for r in padded):
        warnings.warn(f"random samples disagree on the rank sequence: {all_ranks}",
                      GenericityWarning, stacklevel=3)
    ranks, rows, status = runs[best]
    return KernelFiltration(params, tau, backend, ranks, rows, status, field=field,
                            point=pts[best], sample_ranks=all_ranks)


# ---------------------------------------------------------------------------
# Characters


@dataclasses.dataclass
class IrreducibleCharacter:
    character: CharacterSeries
    hilbert: HilbertSeries
    status: str
    filtration: KernelFiltration

    def __iter__(self):
        return iter((self.character, self.hilbert))


def irreducible_character(params: ParamSet, tau: TauRep, backend: GenericBackend = GenericBackend(),
                          max_degree: int | None = None) -> IrreducibleCharacter:
    """Graded character of the irreducible quotient L = M / K."""
    filt = kernel_filtration(params, tau, max_degree, backend)
    coeffs = {n: filt.quotient_class(n) for n, r in enumerate(filt.ranks) if r}
    chi = CharacterSeries(tau.p, coeffs)
    return IrreducibleCharacter(chi, filt.hilbert(), filt.status, filt)


@dataclasses.dataclass
class ReducedCharacter:
    character: CharacterSeries
    hilbert: HilbertSeries

    def __iter__(self):
        return iter((self.character, self.hilbert))


def reduced_character(chi: CharacterSeries) -> ReducedCharacter:
    """H with chi(z) = chi_{S h* / (x1^p, x2^p)}(z) * H(z^p).

    Raises ``ReductionError`` when the division is inexact, when the quotient
    has terms in degrees not divisible by p, or when h(1) is outside [1, |G|].
    """
    p = chi.p
    try:
        Q = chi.divide_exact(frobenius_quotient_character(p))
    except ArithmeticError as exc:
        raise ReductionError(f"character is not divisible by the Frobenius quotient: {exc}") from exc
    bad = [n for n in Q.coeffs if n % p]
    if bad:
        raise ReductionError(f"quotient has terms in degrees {bad}, not divisible by {p}")
    H = Q.decimate(p)
    h = H.hilbert()
    order = len(all_elements(p))
    if not 1 <= h.total() <= order:
        raise ReductionError(f"reduced Hilbert polynomial has h(1) = {h.total()}, outside [1, {order}]")
    return ReducedCharacter(H, h)


# ---------------------------------------------------------------------------
# Gram matrices from the dual recursion


def _dual_tau_action(tau: TauRep, g) -> np.ndarray:
    """Matrix of g on tau*: the transpose of the action of g^-1 on tau."""
    G = g.matrix if hasattr(g, "alpha") else g
    return tau.act(G.inverse()).T.copy()


def _h_divided_difference(s, n: int) -> np.ndarray:
    """(h - s.h) / alpha_vee_s on S^n h, basis y1^(n-k) y2^k."""
    p = s.p
    if n == 0:
        return np.zeros((0, 1), dtype=np.int64)
    S = linear_substitution_matrix(s.matrix.matrix, n, p)
    return divide_by_linear((np.eye(n + 1, dtype=np.int64) - S) % p, s.alpha_vee, p)


def dual_dunkl_matrix(params: ParamSet, tau: TauRep, x: int, n: int) -> ParamMatrix:
    """D_x on S^n h (x) tau* for x = x1 or x2, with parameters c_bar_lam = c_(1/lam).

    D_x = t d/dx - sum_s c_(1/lam_s) (x, alpha_vee_s) (1 - s)/alpha_vee_s (x) s.
    """
    p = tau.p
    d = tau.dim
    nv = p - 1
    shape = (n * d, (n + 1) * d)
    const = (params.t * np.kron(derivative_matrix(x, n, p), np.eye(d, dtype=np.int64))) % p
    parts: dict = {}
    for lam, refl in enumerate_reflections(p).items():
        bar = inv_mod(lam, p)
        acc = np.zeros(shape, dtype=np.int64)
        for s in refl:
            w = s.alpha_vee[x]
            if not w:
                continue
            acc = (acc + w * np.kron(_h_divided_difference(s, n), _dual_tau_action(tau, s))) % p
        if params.symbolic:
            key = tuple(1 if l == bar - 1 else 0 for l in range(nv))
            parts[key] = (parts.get(key, 0) - acc) % p
        else:
            const = (const - params.c[bar - 1] * acc) % p
    parts[(0,) * nv] = const
    return ParamMatrix(p, nv, shape, parts)


def form_matrix_crosscheck(params: ParamSet, tau: TauRep, n: int, m: int | None = None) -> ParamMatrix:
    """Gram matrix of the form between degree n of M(tau) and degree m of the
    dual Verma module, from B(x f, h) = B(f, D_x h) and B(1 (x) v, 1 (x) w) = <v, w>.

    Rows follow the basis of M(tau)_n, columns the basis y1^(m-k) y2^k (x) w_b
    of the dual module. Pieces of different degrees pair to zero.
    """
    m = n if m is None else m
    p, d = tau.p, tau.dim
    if n == 0 and m == 0:
        return ParamMatrix.constant(p, p - 1, np.eye(d, dtype=np.int64))
    if n == 0 or m == 0:
        return ParamMatrix.zeros(p, p - 1, ((n + 1) * d, (m + 1) * d))
    prev = form_matrix_crosscheck(params, tau, n - 1, m - 1)
    duals = [dual_dunkl_matrix(params, tau, x, m) for x in (0, 1)]
    blocks = []
    for k in range(n + 1):
        # x1^(n-k) x2^k = x1 * x1^(n-1-k) x2^k, or x2 * x2^(n-1) when k = n
        x, k_prev = (0, k) if k < n else (1, n - 1)
        rows = prev.rows([k_prev * d + b for b in range(d)])
        blocks.append(rows @ duals[x])
    return ParamMatrix.vstack(blocks)


def radical_matches_filtration(params: ParamSet, tau: TauRep, n: int,
                               filtration: KernelFiltration | None = None) -> bool:
    """Exact comparison of the left radical of the Gram matrix with K_n."""
    if not params.symbolic:
        raise ValueError("the cross-check is meant for symbolic parameters")
    exact = GenericBackend.exact()
    if filtration is None or filtration.field is not None:
        filtration = kernel_filtration(params, tau, n, exact)
    if n > filtration.max_degree:
        return form_matrix_crosscheck(params, tau, n).is_zero()
    R = filtration.rows[n]
    G = form_matrix_crosscheck(params, tau, n)
    rG = generic_rank(G, exact)
    if rG != R.shape[0]:
        return False
    if rG == 0:
        return True
    return generic_rank(ParamMatrix.vstack([R, G.transpose()]), exact) == rG


# ---------------------------------------------------------------------------
# Block consistency


@dataclasses.dataclass
class BlockReport:
    ok: bool
    generators: dict = dataclasses.field(default_factory=dict)  # degree -> K0Element
    violations: list = dataclasses.field(default_factory=list)


def _span_class(field: ExtField, W: np.ndarray, tau: TauRep, n: int) -> K0Element:
    """K0 class of a G-stable subspace with basis rows W over ``field``."""
    p = tau.p
    dimW = field.rank(W) if W.shape[0] else 0
    counts = []
    for B in _eigen_subspaces(tau, n):
        if dimW == 0 or B.shape[0] == 0:
            counts.append(0)
            continue
        Bf = field.embed(B)
        counts.append(dimW + B.shape[0] - field.rank(np.concatenate([W, Bf], axis=0)))
    return decompose_separating_counts(p, counts, dim=dimW)


def block_consistency_check(params: ParamSet, tau: TauRep, filtration: KernelFiltration,
                            seed: int = 7) -> BlockReport:
    """Type and block-constant checks on the new generators of the radical.

    In each degree the generator quotient K_n / (x1 K_(n-1) + x2 K_(n-1)) is
    decomposed in K0. Every constituent sigma must satisfy
    h_c(sigma) - h_c(tau) = t * n as polynomials in c; for tau = S^(p-1) h (x)
    det^j every constituent must be tau itself; at t = 1 generators may only
    occur in degrees divisible by p. Exact filtrations are re-run at a random
    point whose ranks must agree.
    """
    p, t = tau.p, params.t
    if filtration.field is None:
        numeric = kernel_filtration(params, tau, filtration.max_degree,
                                    GenericBackend.random(seed=seed))
        if numeric.ranks != filtration.ranks:
            return BlockReport(ok=False, violations=[(None, "random point is not generic",
                                                      numeric.ranks)])
        filtration = numeric
    field = filtration.field
    sym = ParamSet(p, t)
    h_tau = h_constant(sym, tau)
    report = BlockReport(ok=True)
    prev = None
    for n in range(filtration.max_degree + 1):
        K = filtration.kernel_basis(n) if filtration.ranks[n] else _whole_piece(field, tau, n)
        if K.shape[0] == 0:
            prev = K
            continue
        if prev is None or prev.shape[0] == 0:
            W = field.zero((0, K.shape[1]))
        else:
            I = np.eye(tau.dim, dtype=np.int64)
            W = np.concatenate([field.right_mul_fp(prev, np.kron(multiplication_matrix(x, n - 1), I).T)
                                for x in (0, 1)], axis=0)
            W, _ = field.rref(W)
        new_dim = K.shape[0] - W.shape[0]
        if new_dim:
            gen = _span_class(field, K, tau, n) - _span_class(field, W, tau, n)
            report.generators[n] = gen
            if not gen.is_nonnegative():
                report.violations.append((n, "negative generator class", gen))
            for i, j, _ in gen.terms():
                sigma = TauRep.of(p, i, j)
                diff = h_constant(sym, sigma) - h_tau - ParamPoly.constant(p, t * n, p - 1)
                if not diff.is_zero():
                    report.violations.append((n, "block constant", IrredLabel(i, j, p)))
                if tau.i == p - 1 and (i, j) != (tau.i, tau.j):
                    report.violations.append((n, "constituent type", IrredLabel(i, j, p)))
            if t == 1 and n % p:
                report.violations.append((n, "generator degree not divisible by p", gen))
        prev = K
    report.ok = not report.violations
    return report


def _whole_piece(field: ExtField, tau: TauRep, n: int) -> np.ndarray:
    N = (n + 1) * tau.dim
    E = field.zero((N, N))
    E[np.arange(N), np.arange(N), 0] = 1
    return E
