import numpy as np
import pytest

from gl2cherednik.group import GroupElement, enumerate_reflections, generators, identity, random_elements
from gl2cherednik.polyring import (
    BivariatePoly,
    det_matrix_A,
    dickson_invariants,
    divided_difference,
    divided_difference_matrix,
    group_act,
    hstar_action_matrix,
    monomial,
    q1_quotient,
    q1_transposed_display,
    x1,
    x2,
)


def random_poly(p, rng, degree):
    return BivariatePoly(p, {(a, degree - a): int(rng.integers(0, p)) for a in range(degree + 1)})


def test_group_act_examples():
    p = 3
    f = x1(p) * x1(p) + x2(p)
    assert group_act(identity(p), f) == f
    assert group_act(GroupElement(((2, 0), (0, 1)), p), x1(p)) == x1(p) * 2


def test_group_act_is_automorphism_and_action():
    p = 5
    rng = np.random.default_rng(0)
    for g, h in zip(random_elements(p, rng, 8), random_elements(p, rng, 8)):
        f1, f2 = random_poly(p, rng, 2), random_poly(p, rng, 3)
        assert group_act(g, f1 * f2) == group_act(g, f1) * group_act(g, f2)
        assert group_act(g @ h, f1) == group_act(g, group_act(h, f1))


def test_divided_difference_examples():
    p = 3
    s = next(s for s in enumerate_reflections(p)[2] if s.alpha == (1, 0))
    assert group_act(s, x1(p)) == x1(p) * 2
    assert divided_difference(s, x1(p)) == BivariatePoly.constant(p, 2)
    assert divided_difference(s, BivariatePoly.constant(p, 1)).is_zero()


@pytest.mark.parametrize("p", [3, 5])
def test_divided_difference_is_exact(p):
    rng = np.random.default_rng(1)
    alpha = {}
    for refl in enumerate_reflections(p).values():
        for s in refl[::3]:
            f = random_poly(p, rng, 4)
            q = divided_difference(s, f)
            a = BivariatePoly(p, {(1, 0): s.alpha[0], (0, 1): s.alpha[1]})
            assert a * q == f - group_act(s, f)
            assert q.is_zero() or q.is_homogeneous() and max(sum(m) for m in q.terms) == 3
            M = divided_difference_matrix(s, 4)
            assert np.array_equal(M @ f.to_vector(4) % p, q.to_vector(3))
            alpha[s] = a


def test_action_matrix_agrees_with_substitution():
    p = 5
    rng = np.random.default_rng(3)
    for g in random_elements(p, rng, 5):
        f = random_poly(p, rng, 6)
        assert np.array_equal(hstar_action_matrix(g, 6) @ f.to_vector(6) % p, group_act(g, f).to_vector(6))


def test_dickson_invariants_p3():
    Q0, Q1 = dickson_invariants(3)
    assert Q0 == monomial(3, 6, 2) + monomial(3, 4, 4) + monomial(3, 2, 6)
    assert Q1 == q1_quotient(3)
    assert Q1 == q1_transposed_display(3)


@pytest.mark.parametrize("p", [3, 5, 7])
def test_dickson_invariance(p):
    Q0, Q1 = dickson_invariants(p)
    assert Q0.is_homogeneous() and Q1.is_homogeneous()
    assert Q0.degree_part(p * p - 1) == Q0 and Q1.degree_part(p * p - p) == Q1
    for g in generators(p):
        assert group_act(g, Q0) == Q0
        assert group_act(g, Q1) == Q1
    assert Q1 == q1_quotient(p)


def test_dickson_invariance_random():
    p = 5
    Q0, _ = dickson_invariants(p)
    rng = np.random.default_rng(4)
    for g in random_elements(p, rng, 20):
        assert group_act(g, Q0) == Q0


@pytest.mark.parametrize("p", [3, 5, 7])
def test_det_A(p):
    _, Q1 = dickson_invariants(p)
    sign = -1 if (p - 1) // 2 % 2 else 1
    assert det_matrix_A(p) == Q1 * sign
