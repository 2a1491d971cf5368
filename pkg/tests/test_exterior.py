import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from flowforms.exterior import (
    DegreeError,
    FormElement,
    apply_d,
    basis,
    contract,
    lie,
    operator_matrix,
    wedge,
)
from flowforms.field import RATIONALS, CoefficientField, FieldMismatchError
from flowforms.models import sl2, torus

K = RATIONALS


def gens():
    return [FormElement.generator(K, i) for i in range(3)]


def test_wedge_examples():
    w0, wp, wm = gens()
    assert not wedge(w0, w0)
    assert wedge(wp, wm).terms == {(1, 2): 1}
    assert wedge(wm, wp) == -wedge(wp, wm)


def test_repeated_index_is_zero():
    assert not FormElement.monomial(K, (1, 0, 1))
    assert FormElement.monomial(K, (2, 0)) == -FormElement.monomial(K, (0, 2))


# oracle: forms as alternating multilinear maps on R^n, wedge via the shuffle formula


def _as_tensor(form: FormElement, n: int, k: int) -> np.ndarray:
    T = np.zeros((n,) * k)
    for mono, c in form.terms.items():
        for perm in itertools.permutations(range(k)):
            sign = np.linalg.det(np.eye(k)[list(perm)])
            T[tuple(mono[p] for p in perm)] += float(K.to_sympy(c)) * sign
    return T


def _tensor_wedge(A, p, B, q, n):
    from math import factorial

    out = np.zeros((n,) * (p + q))
    for idx in itertools.product(range(n), repeat=p + q):
        s = 0.0
        for perm in itertools.permutations(range(p + q)):
            sign = np.linalg.det(np.eye(p + q)[list(perm)])
            j = [idx[x] for x in perm]
            s += sign * A[tuple(j[:p])] * B[tuple(j[p:])]
        out[idx] = s / (factorial(p) * factorial(q))
    return out


def _random_form(n, k, rng):
    return FormElement(K, {m: rng.randint(-3, 3) for m in basis(n, k)})


@pytest.mark.parametrize("p,q", [(1, 1), (1, 2), (2, 1), (2, 2), (0, 3), (1, 3)])
def test_wedge_matches_alternating_tensor_oracle(p, q):
    rng = random.Random(p * 10 + q)
    n = 4
    a, b = _random_form(n, p, rng), _random_form(n, q, rng)
    lhs = _as_tensor(wedge(a, b), n, p + q)
    rhs = _tensor_wedge(_as_tensor(a, n, p), p, _as_tensor(b, n, q), q, n)
    assert np.allclose(lhs, rhs)


def test_d_and_contract_examples():
    g = sl2("sl2-geodesic")
    w0, wp, wm = gens()
    assert apply_d(g.calc, w0) == wedge(wp, wm)
    assert not apply_d(g.calc, wedge(wp, wm))
    assert not apply_d(g.calc, FormElement.scalar(K, 5))
    assert contract(g.calc, w0) == FormElement.scalar(K, 1)
    assert contract(g.calc, wedge(wedge(w0, wp), wm)) == wedge(wp, wm)
    assert not contract(g.calc, FormElement.scalar(K, 7))


def test_lie_examples():
    g, h = sl2("sl2-geodesic"), sl2("sl2-horocycle-plus")
    w0, wp, wm = gens()
    assert lie(g.calc, wp) == wp
    assert lie(g.calc, wm) == -wm
    assert not lie(g.calc, w0)
    assert not lie(h.calc, wp)


def test_operator_matrix_examples():
    g, h = sl2("sl2-geodesic"), sl2("sl2-horocycle-plus")
    assert operator_matrix(g.calc, "d", 3).is_zero()
    L = operator_matrix(h.calc, "lie", 1)
    assert L.shape == (3, 3) and L.rank() == 2 and (L @ L @ L).is_zero()
    t = torus(2)
    C = operator_matrix(t.calc, "contract", 1)
    assert C.shape == (1, 2)
    assert [t.field.format(x) for x in C.rows[0]] == ["alpha1", "alpha2"]
    with pytest.raises(DegreeError):
        operator_matrix(g.calc, "d", 4)
    with pytest.raises(DegreeError):
        operator_matrix(g.calc, "lie", -1)


def test_matrix_composition_equals_composed_operator():
    g = sl2("sl2-geodesic")
    for k in range(3):
        comp = operator_matrix(g.calc, "contract", k + 1) @ operator_matrix(g.calc, "d", k)
        for j, mono in enumerate(basis(3, k)):
            img = contract(g.calc, apply_d(g.calc, FormElement.monomial(K, mono)))
            assert comp.column(j) == img.to_vector(3, k)


def test_field_mismatch_in_wedge():
    a = FormElement.generator(K, 0)
    b = FormElement.generator(CoefficientField(["s"]), 1)
    with pytest.raises(FieldMismatchError):
        wedge(a, b)


@st.composite
def forms(draw, n=3):
    k = draw(st.integers(0, n))
    coeffs = draw(st.lists(st.integers(-4, 4), min_size=len(basis(n, k)), max_size=len(basis(n, k))))
    return k, FormElement(K, dict(zip(basis(n, k), coeffs)))


@given(forms(), forms(), forms())
@settings(max_examples=150, deadline=None)
def test_wedge_associative_and_graded_commutative(x, y, z):
    (p, a), (q, b), (_, c) = x, y, z
    assert wedge(wedge(a, b), c) == wedge(a, wedge(b, c))
    assert wedge(a, b) == wedge(b, a).scale(-1 if p * q % 2 else 1)


@given(forms(), forms(), st.sampled_from(["sl2-geodesic", "sl2-horocycle-plus", "sl2-horocycle-minus"]))
@settings(max_examples=150, deadline=None)
def test_antiderivation_laws(x, y, kind):
    (p, a), (_, b) = x, y
    calc = sl2(kind).calc
    s = -1 if p % 2 else 1
    ab = wedge(a, b)
    assert apply_d(calc, ab) == wedge(apply_d(calc, a), b) + wedge(a, apply_d(calc, b)).scale(s)
    assert contract(calc, ab) == wedge(contract(calc, a), b) + wedge(a, contract(calc, b)).scale(s)
    assert lie(calc, ab) == wedge(lie(calc, a), b) + wedge(a, lie(calc, b))
    assert not apply_d(calc, apply_d(calc, a))
    assert not contract(calc, contract(calc, a))
