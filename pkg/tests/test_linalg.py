import random

import pytest
import sympy
from hypothesis import given, settings, strategies as st
from sympy.polys.matrices import DomainMatrix

from flowforms.field import RATIONALS, CoefficientField, FieldMismatchError
from flowforms.linalg import LinearMap, bareiss_rank, intersect, nullspace, row_basis, solve


def _oracle(rows, K):
    return DomainMatrix([list(r) for r in rows], (len(rows), len(rows[0])), K.domain)


matrices = st.integers(1, 6).flatmap(
    lambda r: st.integers(1, 6).flatmap(
        lambda c: st.lists(st.lists(st.integers(-3, 3), min_size=c, max_size=c), min_size=r, max_size=r)))


@given(matrices)
@settings(max_examples=150, deadline=None)
def test_rank_and_kernel_agree_with_domainmatrix(rows):
    K = RATIONALS
    R = [[K.convert(x) for x in r] for r in rows]
    ncols = len(R[0])
    assert bareiss_rank(R, K) == _oracle(R, K).rank()
    ker = nullspace(R, ncols, K)
    assert len(ker) == ncols - _oracle(R, K).rank()
    A = LinearMap.from_rows(K, R, len(R), ncols)
    for v in ker:
        assert not any(A.apply(v))


def test_rank_over_function_field_matches_generic_rank():
    K = CoefficientField(["a", "b"])
    a, b = K.symbol("a"), K.symbol("b")
    rows = [[a, b, K.one], [a * a, a * b, a], [K.one, K.zero, b]]
    # second row is a times the first
    assert bareiss_rank(rows, K) == 2
    assert _oracle(rows, K).rank() == 2


def test_rank_of_symbolic_row_is_one():
    K = CoefficientField(["alpha1", "alpha2"])
    A = LinearMap.from_rows(K, [[K.symbol("alpha1"), K.symbol("alpha2")]], 1, 2)
    assert A.rank() == 1 and A.kernel_dim() == 1


def test_solve_returns_solution_or_none():
    K = RATIONALS
    A = [[K.convert(1), K.convert(2)], [K.convert(2), K.convert(4)]]
    x = solve(A, 2, (K.convert(3), K.convert(6)), K)
    assert x is not None
    assert A[0][0] * x[0] + A[0][1] * x[1] == 3
    assert solve(A, 2, (K.convert(1), K.convert(1)), K) is None


def test_intersection_of_planes():
    K = RATIONALS
    c = K.convert
    U = [(c(1), c(0), c(0)), (c(0), c(1), c(0))]
    V = [(c(0), c(1), c(0)), (c(0), c(0), c(1))]
    assert intersect(U, V, 3, K) == [(c(0), c(1), c(0))]


def test_row_basis_is_canonical():
    K = RATIONALS
    c = K.convert
    a = row_basis([(c(2), c(4)), (c(1), c(2))], 2, K)
    b = row_basis([(c(3), c(6))], 2, K)
    assert a == b == [(c(1), c(2))]


def test_index_and_composition():
    K = RATIONALS
    rng = random.Random(3)
    A = LinearMap.from_rows(K, [[rng.randint(-2, 2) for _ in range(4)] for _ in range(3)], 3, 4)
    B = LinearMap.from_rows(K, [[rng.randint(-2, 2) for _ in range(3)] for _ in range(2)], 2, 3)
    assert A.index() == 4 - 3
    assert (B @ A).to_sympy() == B.to_sympy() * A.to_sympy()
    assert LinearMap.zero(K, 3, 5).index() == 2
    with pytest.raises(ValueError):
        A @ A


def test_field_mismatch_is_rejected():
    K1, K2 = RATIONALS, CoefficientField(["t"])
    A = LinearMap.identity(K1, 2)
    B = LinearMap.identity(K2, 2)
    with pytest.raises(FieldMismatchError):
        A + B


def test_field_rejects_floats_and_parses_text():
    K = CoefficientField(["alpha"])
    with pytest.raises(TypeError):
        K.convert(0.5)
    assert K.to_sympy(K.parse("−1/2")) == sympy.Rational(-1, 2)
    assert K.to_sympy(K.parse("alpha/3")) == sympy.Symbol("alpha") / 3
    with pytest.raises(ValueError):
        K.parse("beta")
