import pytest
import sympy

from flowforms.exterior import DegreeError
from flowforms.linalg import LinearMap
from flowforms.models import flat_symplectic_torus, sl2, torus
from flowforms.sequences import (
    INFINITE,
    FredholmData,
    SequenceTerm,
    SymbolicMap,
    seven_term_sequence,
    cokernel_long_sequence,
    cokernel_cohomology_dims,
    surface_index_profile,
    basic_h1_comparison,
    corrupt_map,
    fredholm_data,
    solve_by_exactness,
    verify_exactness,
)


def test_torus2_seven_terms():
    r = seven_term_sequence(torus(2), 0)
    assert r.dims == [1, 1, 1, 2, 1, 1, 1]
    assert r.map_labels == ["m_*", "d_*", "i_*", "j_*", "h_*", "g_*"]
    assert r.passed and r.alternating_sum == 0
    assert r.extra["condensed_agrees"]


@pytest.mark.parametrize("kind", ["sl2-geodesic", "sl2-horocycle-plus", "sl2-horocycle-minus"])
def test_sl2_seven_term_all_k(kind):
    m = sl2(kind)
    for k in range(m.n):
        r = seven_term_sequence(m, k)
        assert r.passed, (kind, k, r.nodes)
    assert seven_term_sequence(m, m.n - 1).extra["j_is_isomorphism"]


def test_seven_term_flat_symplectic_torus():
    m = flat_symplectic_torus()
    assert all(seven_term_sequence(m, k).passed for k in range(m.n))


def test_seven_term_k_range():
    with pytest.raises(DegreeError):
        seven_term_sequence(torus(2), 2)
    with pytest.raises(DegreeError):
        seven_term_sequence(torus(2), -2)
    # k = -1 is the degenerate start of the sequence
    assert seven_term_sequence(torus(2), -1).passed


def test_corrupted_map_is_caught():
    r = seven_term_sequence(torus(2), 0)
    bad = corrupt_map(r, "j_*")
    assert not verify_exactness(bad).passed
    assert r.passed


def test_fredholm_data():
    K = torus(2).field
    z = LinearMap.zero(K, 2, 3)
    f = fredholm_data(z)
    assert (f.kernel, f.cokernel, f.index) == (3, 2, 1)
    assert fredholm_data(SymbolicMap(INFINITE, INFINITE)).unknown_infinite
    assert fredholm_data(SymbolicMap(4, 1)).index == 3
    assert FredholmData.from_dims(5, 1).index == 4


def test_solve_by_exactness_segments():
    a, b = sympy.symbols("a b")
    terms = [SequenceTerm("A", 2), SequenceTerm("B", a, "unknown"), SequenceTerm("C", 1), SequenceTerm("Z", 0),
             SequenceTerm("D", b, "unknown"), SequenceTerm("E", 3)]
    solved, constraints, ok = solve_by_exactness(terms)
    assert ok and solved == {a: 3, b: 3} and constraints == []


def test_solve_by_exactness_inconsistent():
    terms = [SequenceTerm("A", 2), SequenceTerm("B", 1)]
    assert solve_by_exactness(terms)[2] is False


def test_geodesic_cokernel_sequence():
    r = cokernel_long_sequence(sl2("sl2-geodesic"), use_betti=True)
    assert r.passed
    assert r.constraints == ["dim H^0_C - dim H^1_C = 1"]
    assert r.extra["index_identity"]["holds"]
    assert cokernel_cohomology_dims(r)[2] == 1


def test_horocycle_cokernel_sequence_solves_everything():
    r = cokernel_long_sequence(sl2("sl2-horocycle-plus", genus=2), use_betti=True)
    assert r.passed
    assert cokernel_cohomology_dims(r) == [4, 4, 1]
    assert r.extra["index_identity"]["holds"]


def test_torus_cokernel_sequence_model_internal():
    r = cokernel_long_sequence(torus(2))
    assert r.passed and not r.extra.get("model_internal")
    ext = cokernel_long_sequence(torus(2), use_betti=True)
    assert ext.passed and ext.extra["model_internal_passed"]
    ii = r.extra["index_identity"]
    assert ii["lhs"] == ii["rhs"] == 0


@pytest.mark.parametrize("g", range(1, 11))
def test_surface_index_profile(g):
    r = surface_index_profile(g)
    assert r.extra["stated_kernel"] == 2 * g - 1
    assert r.extra["stated_cokernel"] == 1
    assert r.fredholm["h_*"].index == 2 * g - 2
    assert r.extra["euler_characteristic"] == 2 - 2 * g
    assert r.extra["infinite_dimensional"] == (g >= 2)
    if g >= 2:
        assert r.term("C^0_X").dim == INFINITE


def test_surface_index_torus_case():
    r = surface_index_profile(1)
    assert r.as_dict()["constraints"] == ["dim C^0_X = dim W"]
    r = surface_index_profile(1, w_dim=1)
    assert r.term("C^0_X").dim == 1
    with pytest.raises(ValueError):
        surface_index_profile(0)


def test_basic_h1_comparison_side_by_side():
    c = basic_h1_comparison(sl2("sl2-geodesic"), genus=2)
    assert c["H1_basic_model"] == 0
    assert c["fredholm_model"].index == 0
    assert c["fredholm_with_H1_basic_1"].index == -1
    assert c["differs"]
    t = basic_h1_comparison(torus(2))
    assert t["matrix_agrees"]
