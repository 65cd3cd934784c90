import numpy as np
import pytest

from gl2cherednik.scalars import (
    ExtField,
    FpElem,
    GenericBackend,
    MPoly,
    ParamMatrix,
    ParamPoly,
    bareiss_det,
    fp_nullspace,
    fp_rank,
    generic_kernel,
    generic_rank,
    generic_row_basis,
    inv_mod,
    is_irreducible,
    least_irreducible,
    power_sum,
)

RANDOM = GenericBackend.random(seed=1)


def c(p, lam, nvars=None):
    return ParamPoly.param(p, lam) if nvars is None else ParamPoly.variable(p, lam - 1, nvars)


class TestPrimeField:
    def test_products_and_inverses(self):
        assert FpElem(2, 3) * FpElem(2, 3) == FpElem(1, 3)
        assert FpElem(2, 5).inverse() == 3
        assert inv_mod(2, 5) == 3
        assert FpElem(1, 5) / 2 == 3

    def test_division_by_zero(self):
        with pytest.raises(ZeroDivisionError):
            FpElem(1, 5) / 0

    def test_modulus_mismatch(self):
        with pytest.raises(ValueError):
            FpElem(1, 3) + FpElem(1, 5)

    def test_ring_axioms_on_parameters(self):
        c1, c2 = c(3, 1), c(3, 2)
        assert (c1 + c2) - c2 == c1


class TestPowerSum:
    @pytest.mark.parametrize("p", [3, 5, 7])
    def test_law_exhaustive(self, p):
        for N in range(4 * (p - 1) + 1):
            expected = -1 if N > 0 and N % (p - 1) == 0 else 0
            assert power_sum(p, N) == expected, (p, N)

    def test_examples(self):
        assert power_sum(3, 2) == 2
        assert power_sum(5, 3) == 0
        assert power_sum(7, 0) == 0


class TestExtensionField:
    def test_modulus_is_least_irreducible(self):
        assert least_irreducible(3, 2) == (1, 0, 1)  # x^2 + 1
        assert least_irreducible(5, 2) == (2, 0, 1)  # x^2 + 2
        m = least_irreducible(3, 16)
        assert is_irreducible(list(m), 3)
        # nothing smaller in the same ordering is irreducible
        code = sum(a * 3 ** i for i, a in enumerate(m[:-1]))
        assert code < 3 ** 16

    def test_rejects_reducible_modulus(self):
        with pytest.raises(ValueError):
            ExtField(3, 2, modulus=(2, 0, 1))  # x^2 - 1

    def test_field_axioms(self):
        F = ExtField(5, 4)
        rng = np.random.default_rng(0)
        for _ in range(20):
            a, b, d = (F.element(F.random(rng)) for _ in range(3))
            assert (a * b) * d == a * (b * d)
            assert a * (b + d) == a * b + a * d
            if not a.is_zero():
                assert a * a.inverse() == 1
        g = F.element(F.random(rng))
        assert g ** (5 ** 4) == g  # Frobenius fixes F_(p^k)

    def test_linear_algebra(self):
        F = ExtField(3, 12)
        rng = np.random.default_rng(1)
        A = F.random(rng, (4, 6))
        A[3] = (A[0] + A[1]) % 3
        assert F.rank(A) == 3
        N = F.nullspace(A)
        assert N.shape[0] == 3
        assert not F.matmul(A, np.transpose(N, (1, 0, 2))).any()


class TestPolynomials:
    def test_exact_division(self):
        p = 5
        x = MPoly(p, 2, {(1, 0): 1})
        y = MPoly(p, 2, {(0, 1): 1})
        f = (x + y * 2) * (x * x - y)
        assert f.exact_div(x + y * 2) == x * x - y
        with pytest.raises(ArithmeticError):
            (x * x + 1).exact_div(y)

    def test_bareiss_determinant(self):
        p = 3
        c1, c2 = c(p, 1), c(p, 2)
        assert bareiss_det([[c1, c2], [c2, c1]]) == c1 * c1 - c2 * c2


class TestGenericRank:
    @pytest.mark.parametrize("backend", [GenericBackend.exact(), RANDOM])
    def test_examples(self, backend):
        p = 3
        c1, c2 = c(p, 1), c(p, 2)
        zero = ParamPoly(p)
        one = ParamPoly.constant(p, 1)
        assert generic_rank([[zero] * 3] * 3, backend) == 0
        assert generic_rank([[one, zero], [zero, one]], backend) == 2
        assert generic_rank([[c1, c2], [c2, c1]], backend) == 2

    def test_rank_drops_only_on_special_values(self):
        p = 3
        c1, c2 = c(p, 1), c(p, 2)
        M = [[c1, c2], [c1 * c2, c2 * c2]]  # determinant 0 identically
        assert generic_rank(M, GenericBackend.exact()) == 1
        assert generic_rank(M, RANDOM) == 1

    def test_square_full_rank_iff_determinant_nonzero(self):
        p = 5
        rng = np.random.default_rng(3)
        for _ in range(10):
            entries = [[ParamPoly(p, {tuple(rng.integers(0, 2, 4)): int(rng.integers(0, p))})
                        for _ in range(3)] for _ in range(3)]
            full = generic_rank(entries, GenericBackend.exact()) == 3
            assert full == (not bareiss_det(entries).is_zero())

    def test_row_basis(self):
        p = 3
        c1, c2 = c(p, 1), c(p, 2)
        rows = [[c1, c2], [c1 * 2, c2 * 2], [c2, c1]]
        basis = generic_row_basis(rows)
        assert len(basis) == 2 and 2 in basis

    def test_random_backend_reproducible(self):
        p = 5
        M = ParamMatrix.from_entries(p, 4, [[c(p, 1), c(p, 2) + 1], [c(p, 3), c(p, 4)]])
        assert generic_rank(M, RANDOM) == generic_rank(M, GenericBackend.random(seed=1)) == 2

    def test_random_backend_parameter_checks(self):
        with pytest.raises(ValueError):
            GenericBackend.random(ext_degree=8)
        with pytest.raises(ValueError):
            GenericBackend.random(samples=2)


class TestGenericKernel:
    def test_examples(self):
        p = 3
        c1 = c(p, 1)
        one = ParamPoly.constant(p, 1)
        zero = one - one
        assert generic_kernel([[one, zero], [zero, one]]).dimension == 0
        res = generic_kernel([[c1, c1]])
        assert res.dimension == 1
        v = res.basis[0]
        assert v[0] + v[1] == zero and not v[0].is_zero()
        assert generic_kernel(np.zeros((2, 3), dtype=np.int64), p=3).dimension == 3

    def test_random_kernel_vectors_annihilate(self):
        p = 5
        c1, c2 = c(p, 1), c(p, 2)
        M = ParamMatrix.from_entries(p, 4, [[c1, c2, c1 + c2], [c2, c1, c1 + c2]])
        res = generic_kernel(M, RANDOM)
        assert res.dimension == 1
        E = M.evaluate(res.field, res.point)
        assert not res.field.matmul(E, np.transpose(res.basis, (1, 0, 2))).any()


def test_fp_helpers():
    A = np.array([[1, 2, 0], [2, 4, 0]])
    assert fp_rank(A, 5) == 1
    N = fp_nullspace(A, 5)
    assert N.shape[0] == 2 and not ((A @ N.T) % 5).any()
