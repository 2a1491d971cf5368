from math import comb

import pytest

from flowforms.complex import (
    ModelInconsistencyError,
    SubquotientSpace,
    Subspace,
    basic_cohomology,
    cohomology_table,
    cokernel_C,
    cokernel_complex,
    contraction_homology,
    de_rham_cohomology,
    induced_map,
    invariant_cohomology,
    top_degree_check,
    relative_H_X,
    subspace_basic,
    subspace_invariant,
    subspace_lambda_X,
)
from flowforms.exterior import DegreeError
from flowforms.models import flat_symplectic_torus, sl2, torus


@pytest.fixture(scope="module")
def geo():
    return sl2("sl2-geodesic")


@pytest.fixture(scope="module")
def horo():
    return sl2("sl2-horocycle-plus")


def _span_names(m, space):
    return sorted(m.format(e) for e in space.elements())


def test_lambda_X(geo):
    assert _span_names(geo, subspace_lambda_X(geo, 1)) == ["ω₊", "ω₋"]
    assert subspace_lambda_X(geo, 0).dim == 1
    assert subspace_lambda_X(torus(2), 1).dim == 1


def test_invariant_and_basic(geo, horo):
    assert _span_names(geo, subspace_invariant(geo, 1)) == ["ω₀"]
    assert subspace_basic(geo, 1).dim == 0
    assert _span_names(horo, subspace_basic(horo, 1)) == ["ω₊"]
    for m in (geo, horo):
        for k in range(4):
            assert subspace_basic(m, k) <= subspace_invariant(m, k)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_torus_basic_dims(n):
    m = torus(n)
    assert [subspace_basic(m, k).dim for k in range(n + 1)] == [comb(n - 1, k) for k in range(n + 1)]
    assert [invariant_cohomology(m, k).dimension for k in range(n + 1)] == [comb(n, k) for k in range(n + 1)]


def test_cokernel_examples(geo):
    assert cokernel_C(geo, 2).dimension == 1
    assert cokernel_C(torus(2), 0).dimension == 1
    assert cokernel_C(geo, 3).dimension == 0


def test_relative_examples(geo):
    t = torus(2)
    assert relative_H_X(t, 1).dimension == 2
    assert relative_H_X(t, 2).dimension == 1
    assert relative_H_X(geo, 3).dimension == 1


def test_cohomology_lists(geo, horo):
    assert [basic_cohomology(geo, k).dimension for k in range(4)] == [1, 0, 1, 0]
    assert [invariant_cohomology(geo, k).dimension for k in range(4)] == [1, 0, 0, 1]
    assert [basic_cohomology(horo, k).dimension for k in range(3)] == [1, 0, 0]
    assert [de_rham_cohomology(torus(3), k).dimension for k in range(4)] == [1, 3, 3, 1]


def test_contraction_homology_vanishes_for_nonvanishing_field(geo):
    for m in (geo, torus(3)):
        assert all(contraction_homology(m, k).dimension == 0 for k in range(m.n + 1))


def test_degree_errors(geo):
    with pytest.raises(DegreeError):
        subspace_basic(geo, 4)
    with pytest.raises(DegreeError):
        relative_H_X(geo, -1)


def test_top_degree_on_all_models(geo, horo):
    for m in (geo, horo, sl2("sl2-horocycle-minus"), torus(2), torus(4), flat_symplectic_torus()):
        assert top_degree_check(m).passed


def test_cokernel_complex(geo, horo):
    cc = cokernel_complex(geo)
    assert cc.squares_vanish and cc.dims == [1, 0, 1]
    assert cc.cohomology_dims == [1, 0, 1]
    h = cokernel_complex(horo)
    assert h.dims == [1, 1, 1] and h.cohomology_dims == [0, 0, 1]


def test_subquotient_rejects_bad_denominator(geo):
    K = geo.field
    num = Subspace.span(K, 3, 1, [geo.vector(geo.generator("w0"), 1)])
    den = Subspace.span(K, 3, 1, [geo.vector(geo.generator("w+"), 1)])
    with pytest.raises(ModelInconsistencyError):
        SubquotientSpace(num, den)


def test_induced_map_detects_ill_defined_lift(geo):
    K = geo.field
    whole = Subspace.whole(K, 3, 1)
    den = Subspace.span(K, 3, 1, [geo.vector(geo.generator("w+"), 1)])
    src = SubquotientSpace(whole, den, "Λ¹/ω₊")
    tgt = SubquotientSpace(whole, Subspace.zero(K, 3, 1), "Λ¹")
    # identity does not kill ω₊, so it does not descend to the quotient
    with pytest.raises(ModelInconsistencyError):
        induced_map(src, tgt, lambda v, rng: v, "identity")
    ok = induced_map(src, src, lambda v, rng: v, "identity")
    assert ok.rank() == 2


def test_cohomology_table_keys(geo):
    t = cohomology_table(geo)
    assert t["H_X"][3] == 1 and t["C_X"][2] == 1
