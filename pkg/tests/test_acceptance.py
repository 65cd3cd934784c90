"""End-to-end acceptance criteria 1-8.

Each test records a verdict in ``conftest.ACCEPTANCE_RESULTS``; the terminal
summary prints one PASS/FAIL line per criterion. Pinned settings: random
backend seed 1 with 3 samples over F_(p^16); the p = 5 top-row runtime bound
is 60 seconds per cell.
"""

import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_RESULTS
from gl2cherednik.cli import expected_character
from gl2cherednik.contraform import (
    block_consistency_check,
    irreducible_character,
    kernel_filtration,
    radical_matches_filtration,
    reduced_character,
)
from gl2cherednik.group import all_elements, generators
from gl2cherednik.k0ring import (
    CharacterSeries,
    IrredLabel,
    K0Element,
    baby_verma_character,
    brauer_char,
    class_of_representation,
    eigenvalues,
    frobenius_quotient_character,
    reduce_sym,
    tensor_reduce,
)
from gl2cherednik.polyring import det_matrix_A, dickson_invariants, linear_substitution_matrix
from gl2cherednik.scalars import GenericBackend, power_sum
from gl2cherednik.verma import (
    ParamSet,
    TauRep,
    central_sum,
    check_singular,
    dunkl_matrix,
    explicit_singular_family,
    families_for,
    family_modulo,
    h_closed_form,
    h_constant,
    piece_action,
)

SEED, SAMPLES, EXT_DEGREE = 1, 3, 16
RANDOM = GenericBackend.random(seed=SEED, samples=SAMPLES, ext_degree=EXT_DEGREE)
EXACT = GenericBackend.exact()
TOP_ROW_SECONDS = 60.0


def verdict(n: int, failures: list, detail: str):
    ACCEPTANCE_RESULTS[n] = ("PASS" if not failures else "FAIL",
                             detail if not failures else "; ".join(map(str, failures[:6])))
    assert not failures, failures


def test_criterion_1_small_rows():
    failures = []
    cells = [(5, i, j) for i in range(3) for j in range(4)] + [(3, 0, j) for j in range(2)]
    for p, i, j in cells:
        chi, h = irreducible_character(ParamSet(p, 0), TauRep.of(p, i, j), RANDOM)
        if h.coeffs != (i + 1,):
            failures.append(f"p={p} ({i},{j}) hilbert {h.coeffs}")
        if chi != CharacterSeries(p, {0: K0Element.label(p, i, j)}):
            failures.append(f"p={p} ({i},{j}) character {chi!r}")
    verdict(1, failures, f"{len(cells)} cells, Hilb = i+1 and character [(i,j)]")


def test_criterion_2_pairing_row():
    failures = []
    for p, backend in ((3, EXACT), (5, RANDOM)):
        want = (p - 1, p, p - 1)
        for j in range(p - 1):
            chi, h = irreducible_character(ParamSet(p, 0), TauRep.of(p, p - 2, j), backend)
            if h.coeffs != want or h.total() != 3 * p - 2:
                failures.append(f"p={p} j={j} hilbert {h.coeffs}")
            if chi != expected_character(p, p - 2, j):
                failures.append(f"p={p} j={j} character {chi!r}")
    verdict(2, failures, "2+3z+2z^2 (dim 7) and 4+5z+4z^2 (dim 13) with matching K0 terms")


def test_criterion_3_top_row():
    failures, times = [], []
    for p, backend in ((3, EXACT), (5, RANDOM)):
        closed = np.convolve(np.ones(p - 1, dtype=int), np.ones(p * p - 1, dtype=int)) * p
        for j in range(p - 1):
            start = time.perf_counter()
            chi, h = irreducible_character(ParamSet(p, 0), TauRep.of(p, p - 1, j), backend)
            elapsed = time.perf_counter() - start
            if p == 5:
                times.append(elapsed)
                if elapsed > TOP_ROW_SECONDS:
                    failures.append(f"p=5 j={j} took {elapsed:.1f}s")
            if list(h.coeffs) != list(closed) or h.total() != p * (p - 1) * (p * p - 1):
                failures.append(f"p={p} j={j} hilbert {h.coeffs}")
            if chi != expected_character(p, p - 1, j):
                failures.append(f"p={p} j={j} character differs")
    verdict(3, failures, f"totals 48 and 480; p=5 cells max {max(times, default=0):.1f}s")


def test_criterion_4_frobenius_reduction():
    p = 3
    failures = []
    for i in range(p):
        backend = RANDOM if i == p - 1 else EXACT
        for j in range(p - 1):
            tau = TauRep.of(p, i, j)
            res1 = irreducible_character(ParamSet(p, 1), tau, backend)
            chi0, _ = irreducible_character(ParamSet(p, 0), tau, backend)
            if res1.status != "ok":
                failures.append(f"({i},{j}) t=1 filtration stopped at the cap")
                continue
            red = reduced_character(res1.character)
            if red.character != chi0:
                failures.append(f"({i},{j}) reduced character differs from t=0")
            report = block_consistency_check(ParamSet(p, 1), tau, res1.filtration, seed=SEED)
            if not report.ok:
                failures.append(f"({i},{j}) block check {report.violations}")
    verdict(4, failures, "all 6 cells: reduced t=1 character equals t=0; generators in degrees divisible by 3")


def test_criterion_5_explicit_singular_vectors():
    failures, checked, bad_families = [], 0, set()
    for p, backend in ((3, EXACT), (5, RANDOM)):
        for t in (0, 1):
            for i in range(p):
                for j in range(p - 1):
                    tau = TauRep.of(p, i, j)
                    for fam in families_for(p, t, i):
                        mod = [w for m in family_modulo(fam) for w in explicit_singular_family(p, m, tau)]
                        for k, v in enumerate(explicit_singular_family(p, fam, tau)):
                            checked += 1
                            if not check_singular(ParamSet(p, t), v, mod, backend):
                                failures.append(f"p={p} {fam.value}[{k}] at ({i},{j})")
                                bad_families.add(fam.value)
    if failures:
        failures.insert(0, f"{len(failures)} of {checked} vectors not singular at generic c, "
                           f"all in {sorted(bad_families)}")
    verdict(5, failures, f"{checked} vectors singular")


def test_criterion_6_matrix_A():
    failures = []
    for p in (3, 5, 7):
        sign = -1 if (p - 1) // 2 % 2 else 1
        if det_matrix_A(p) != dickson_invariants(p)[1] * sign:
            failures.append(f"p={p}")
    verdict(6, failures, "det A = (-1)^((p-1)/2) Q1 at p = 3, 5, 7")


def _structural_failures():
    failures = []
    # Dunkl commutativity and equivariance, degrees 1..10
    for p in (3, 5):
        for t in (0, 1):
            params = ParamSet(p, t)
            for i in range(p):
                tau = TauRep.of(p, i, i % (p - 1))
                prev = None
                for n in range(1, 11):
                    D = [dunkl_matrix(params, tau, y, n) for y in (0, 1)]
                    if prev is not None and not (prev[0] @ D[1] - prev[1] @ D[0]).is_zero():
                        failures.append(f"commutator p={p} t={t} i={i} n={n}")
                    for g in generators(p):
                        for y in (0, 1):
                            gy = g.matrix[:, y] % p
                            conj = piece_action(tau, g, n - 1) @ D[y] @ piece_action(tau, g.inverse(), n)
                            if not (conj - dunkl_matrix(params, tau, gy, n)).is_zero():
                                failures.append(f"equivariance p={p} t={t} i={i} n={n}")
                    prev = D
    # class sums
    for p in (3, 5, 7):
        for i in range(p):
            for lam in range(1, p):
                want = (-1 if lam == 1 else 0) if i < p - 1 else (0 if lam == 1 else 1)
                if central_sum(lam, TauRep.of(p, i, 0)) != want % p:
                    failures.append(f"central sum p={p} i={i} lam={lam}")
            for j in range(p - 1):
                tau = TauRep.of(p, i, j)
                if h_constant(ParamSet(p, 0), tau) != h_closed_form(tau):
                    failures.append(f"h_c p={p} ({i},{j})")
    # power sums
    for p in (3, 5, 7):
        for N in range(4 * (p - 1) + 1):
            if power_sum(p, N) != (-1 if N > 0 and N % (p - 1) == 0 else 0):
                failures.append(f"power sum p={p} N={N}")
    # K0 dimension homomorphism and Brauer oracle, 50 random instances
    rng = np.random.default_rng(SEED)
    for _ in range(50):
        p = int(rng.choice([3, 5]))
        a = int(rng.integers(0, 3 * p + 1))
        j = int(rng.integers(0, p - 1))
        v = reduce_sym(a, j, p)
        u = K0Element.label(p, int(rng.integers(0, p)), int(rng.integers(0, p - 1)))
        if v.dim() != a + 1 or tensor_reduce(u, v).dim() != u.dim() * v.dim():
            failures.append(f"dimension p={p} a={a}")
        regular = [g for g in all_elements(p) if g.is_p_regular()]
        g = regular[int(rng.integers(0, len(regular)))]
        lam, mu = eigenvalues(g)
        trace = sum((lam ** k * mu ** (a - k) for k in range(a + 1)), lam.field.element([0]))
        if brauer_char(reduce_sym(a, 0, p), g) != trace:
            failures.append(f"brauer p={p} a={a} g={g}")
        direct = class_of_representation(p, lambda h: linear_substitution_matrix(h.matrix, a, p))
        if direct != reduce_sym(a, 0, p):
            failures.append(f"module class p={p} a={a}")
    # baby Verma relation, exact series identity up to the top degree
    for p in (3, 5):
        for i in range(p):
            tau = IrredLabel(i, 0, p)
            N0, N1 = baby_verma_character(tau, 0), baby_verma_character(tau, 1)
            if N1 != N0.inflate(p) * frobenius_quotient_character(p):
                failures.append(f"baby Verma relation p={p} i={i}")
    return failures


def test_criterion_7_structural_properties():
    verdict(7, _structural_failures(),
            "Dunkl commutativity/equivariance to degree 10, class sums, power sums, K0/Brauer x50, baby Verma")


def test_criterion_8_gram_radical():
    p, failures, checked = 3, [], 0
    for t in (0, 1):
        for i in range(p):
            for j in range(p - 1):
                tau = TauRep.of(p, i, j)
                filt = kernel_filtration(ParamSet(p, t), tau, 4, EXACT)
                for n in range(5):
                    checked += 1
                    if not radical_matches_filtration(ParamSet(p, t), tau, n, filt):
                        failures.append(f"t={t} ({i},{j}) n={n}")
    verdict(8, failures, f"{checked} Gram matrices, radical = K_n exactly")


@pytest.mark.slow
@pytest.mark.parametrize("t", [0, 1])
def test_p7_classification(t):
    from gl2cherednik.cli import RunConfig, verify_theorem

    report = verify_theorem(RunConfig(p=7, t=t, backend="random"), slow=True)
    assert report["ok"], [c for c in report["cells"] if c["result"] != "PASS"]


@pytest.mark.slow
def test_p5_t1_top_row():
    from gl2cherednik.cli import RunConfig, verify_cell

    cfg = RunConfig(p=5, t=1, backend="random")
    for j in range(4):
        cell = verify_cell(cfg, 4, j)
        assert cell["result"] == "PASS", cell
