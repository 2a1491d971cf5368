import pytest

from flowforms.identities import element_identities, matrix_identities
from flowforms.models import flat_symplectic_torus, sl2, torus

MODELS = [torus(2), torus(3, ["a", "b", "c"]), sl2("sl2-geodesic"), sl2("sl2-horocycle-plus"),
          sl2("sl2-horocycle-minus"), flat_symplectic_torus()]


@pytest.mark.parametrize("m", MODELS, ids=lambda m: m.name)
def test_element_identities(m):
    rep = element_identities(m, pairs=60, seed=2)
    assert rep.passed, rep.failures
    assert sum(rep.checked.values()) == 60 * 9


@pytest.mark.parametrize("m", MODELS, ids=lambda m: m.name)
def test_matrix_identities(m):
    assert matrix_identities(m).passed


def test_broken_calculus_is_rejected():
    from flowforms.exterior import FormElement, GeneratorCalculus, ModelError

    m = sl2("sl2-geodesic")
    K = m.field
    d_values = (m.calc.d_values[0], FormElement.zero(K), m.calc.d_values[2])
    calc = GeneratorCalculus(K, d_values, m.calc.iX_values)
    with pytest.raises(ModelError, match=r"d\(d\(w0\)\)"):
        calc.validate(m.generator_names)
