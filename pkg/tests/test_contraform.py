import numpy as np
import pytest

from gl2cherednik.contraform import (
    ReductionError,
    block_consistency_check,
    default_degree_cap,
    form_matrix_crosscheck,
    irreducible_character,
    kernel_filtration,
    radical_matches_filtration,
    reduced_character,
)
from gl2cherednik.k0ring import CharacterSeries, K0Element, frobenius_quotient_character
from gl2cherednik.scalars import GenericBackend, generic_rank
from gl2cherednik.verma import ParamSet, TauRep

EXACT = GenericBackend.exact()
RANDOM = GenericBackend.random(seed=1)
L = K0Element.label


class TestFiltration:
    def test_degree_zero_is_nondegenerate(self):
        for p in (3, 5):
            for i in range(p):
                f = kernel_filtration(ParamSet(p, 0), TauRep.of(p, i), 0, RANDOM)
                assert f.ranks == [i + 1] and f.kernel_dim(0) == 0

    def test_p3_pairing_row(self):
        f = kernel_filtration(ParamSet(3, 0), TauRep.of(3, 1), backend=EXACT)
        assert f.ranks == [2, 3, 2, 0] and f.status == "ok"

    def test_p5_degree_one_kernel(self):
        f = kernel_filtration(ParamSet(5, 0), TauRep.of(5, 1), backend=RANDOM)
        assert f.ranks == [2, 0]
        assert f.kernel_dim(1) == f.piece_dim(1)

    def test_exact_and_random_agree(self):
        for i in range(3):
            tau = TauRep.of(3, i, 1)
            assert kernel_filtration(ParamSet(3, 0), tau, backend=EXACT).ranks == \
                kernel_filtration(ParamSet(3, 0), tau, backend=RANDOM).ranks

    def test_cap(self):
        with pytest.raises(ValueError):
            kernel_filtration(ParamSet(3, 0), TauRep.of(3, 0), default_degree_cap(3, 0) + 1)
        f = kernel_filtration(ParamSet(3, 0), TauRep.of(3, 2), 3, RANDOM)
        assert f.status == "inconclusive" and f.max_degree == 3

    def test_numeric_parameters(self):
        # c = 0 at t = 0 kills every Dunkl operator, so K_1 is everything
        f = kernel_filtration(ParamSet(3, 0, (0, 0)), TauRep.of(3, 1))
        assert f.ranks == [2, 0]


class TestIrreducibleCharacter:
    def test_small_row(self):
        chi, h = irreducible_character(ParamSet(5, 0), TauRep.of(5, 1), RANDOM)
        assert h.coeffs == (2,) and chi == CharacterSeries(5, {0: L(5, 1, 0)})

    def test_pairing_row_p3(self):
        res = irreducible_character(ParamSet(3, 0), TauRep.of(3, 1), EXACT)
        assert str(res.hilbert) == "2 + 3z + 2z^2"
        assert res.character == CharacterSeries(3, {0: L(3, 1, 0), 1: L(3, 2, 1), 2: L(3, 1, 1)})

    def test_top_row_p3(self):
        chi, h = irreducible_character(ParamSet(3, 0), TauRep.of(3, 2), RANDOM)
        num = np.convolve(np.ones(2, dtype=int), np.ones(8, dtype=int)) * 3
        assert list(h.coeffs) == list(num) and h.total() == 48
        assert chi.is_nonnegative()

    @pytest.mark.parametrize("i", [0, 1, 2])
    def test_det_twist(self, i):
        p = 3
        base = irreducible_character(ParamSet(p, 0), TauRep.of(p, i, 0), RANDOM)
        for j in range(1, p - 1):
            tw = irreducible_character(ParamSet(p, 0), TauRep.of(p, i, j), RANDOM)
            assert tw.hilbert == base.hilbert
            assert tw.character == base.character.twist(j)


class TestReduction:
    def test_trivial(self):
        H, h = reduced_character(frobenius_quotient_character(3))
        assert H == CharacterSeries(3, {0: L(3, 0, 0)}) and h.coeffs == (1,)

    def test_rejects_non_divisible(self):
        with pytest.raises(ReductionError):
            reduced_character(CharacterSeries(3, {0: L(3, 0, 0), 1: L(3, 0, 0)}))

    @pytest.mark.parametrize("i,expected", [(0, (1,)), (1, (2, 3, 2))])
    def test_t1_examples(self, i, expected):
        chi, _ = irreducible_character(ParamSet(3, 1), TauRep.of(3, i), EXACT)
        assert reduced_character(chi).hilbert.coeffs == expected

    def test_t1_matches_t0(self):
        p = 3
        for i in (0, 1):
            chi1, _ = irreducible_character(ParamSet(p, 1), TauRep.of(p, i, 1), EXACT)
            chi0, _ = irreducible_character(ParamSet(p, 0), TauRep.of(p, i, 1), EXACT)
            assert reduced_character(chi1).character == chi0


class TestGram:
    def test_degree_zero(self):
        G = form_matrix_crosscheck(ParamSet(3, 0), TauRep.of(3, 2), 0)
        assert np.array_equal(G.evaluate_fp([0, 0]), np.eye(3, dtype=np.int64))

    def test_degree_one_rank(self):
        G = form_matrix_crosscheck(ParamSet(3, 0), TauRep.of(3, 1), 1)
        assert generic_rank(G, EXACT) == 3

    def test_degree_mismatch(self):
        assert form_matrix_crosscheck(ParamSet(3, 1), TauRep.of(3, 1), 2, 0).is_zero()
        assert form_matrix_crosscheck(ParamSet(3, 1), TauRep.of(3, 1), 0, 3).is_zero()

    @pytest.mark.parametrize("t", [0, 1])
    def test_radical(self, t):
        for i in range(3):
            tau = TauRep.of(3, i, 0)
            f = kernel_filtration(ParamSet(3, t), tau, min(3, default_degree_cap(3, t)), EXACT)
            for n in range(f.max_degree + 1):
                assert radical_matches_filtration(ParamSet(3, t), tau, n, f)

    def test_numeric_rejected(self):
        with pytest.raises(ValueError):
            radical_matches_filtration(ParamSet(3, 0, (1, 1)), TauRep.of(3, 0), 1)


class TestBlocks:
    def test_top_row_generators(self):
        p = 3
        tau = TauRep.of(p, 2, 0)
        f = kernel_filtration(ParamSet(p, 0), tau, backend=RANDOM)
        rep = block_consistency_check(ParamSet(p, 0), tau, f)
        assert rep.ok, rep.violations
        assert 2 in rep.generators
        assert all(v.terms() == [(2, 0, v.dim() // 3)] for v in rep.generators.values())

    def test_degree_one_full_piece(self):
        p = 5
        tau = TauRep.of(p, 1)
        f = kernel_filtration(ParamSet(p, 0), tau, backend=RANDOM)
        rep = block_consistency_check(ParamSet(p, 0), tau, f)
        assert rep.ok and list(rep.generators) == [1]

    def test_t1_generator_degrees(self):
        p = 3
        tau = TauRep.of(p, 0)
        f = kernel_filtration(ParamSet(p, 1), tau, backend=EXACT)
        rep = block_consistency_check(ParamSet(p, 1), tau, f)
        assert rep.ok, rep.violations
        assert rep.generators and all(n % p == 0 for n in rep.generators)
