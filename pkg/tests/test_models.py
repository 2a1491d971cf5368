import json

import pytest

from flowforms.exterior import ModelError, wedge
from flowforms.models import (
    ModelFileError,
    ModelSpec,
    closed_on_leaves,
    derive_operator_tables,
    dump_model_file,
    flat_symplectic_torus,
    foliation_ideal_check,
    instantiate,
    is_single_jordan_cell,
    jordan_profile,
    leaf_two_form_proportionality,
    basic_powers_check,
    load_model_file,
    same_model_data,
    sl2,
    torus,
)


def test_instantiate_examples():
    t = instantiate(ModelSpec("torus", n=3))
    assert t.n == 3 and all(not v for v in t.calc.d_values)
    assert [t.field.format(x) for x in t.calc.iX_values] == ["alpha1", "alpha2", "alpha3"]
    g = instantiate("sl2-geodesic")
    assert [g.field.format(x) for x in g.calc.iX_values] == ["1", "0", "0"]
    h = instantiate("sl2-horocycle-plus", genus=3)
    assert [h.field.format(x) for x in h.calc.iX_values] == ["0", "0", "1"]
    assert h.betti == (1, 6, 6, 1)
    with pytest.raises(ValueError):
        instantiate("torus", n=1)
    with pytest.raises(ValueError):
        instantiate("nosuch")


def test_geodesic_table_diff():
    t = derive_operator_tables(sl2("sl2-geodesic"))
    assert t.counts() == {"match": 11, "sign-flip": 1, "mismatch": 0}
    (flip,) = [d for d in t.diffs if d.status == "sign-flip"]
    assert flip.argument == ("w0", "w-") and flip.printed == "paired-pm"
    assert not t.lookup("lie", ("w+", "w-"))


def test_horocycle_table_diff():
    m = sl2("sl2-horocycle-plus")
    t = derive_operator_tables(m)
    assert t.counts()["mismatch"] == 0
    (flip,) = [d for d in t.diffs if d.status == "sign-flip"]
    assert flip.op == "lie" and flip.argument == ("w0",) and flip.derived == "-ω₊"
    assert m.format(t.lookup("lie", ("w-",))) == "ω₀"
    mod = [d for d in t.diffs if d.printed == "mod-ideal"][0]
    assert mod.status == "match" and mod.literal_status == "mismatch"


def test_basic_powers():
    m = flat_symplectic_torus()
    v = basic_powers_check(m)
    assert v.passed and len(v.rows) == 2
    assert v.rows[0]["form"] == "dc"
    neg = basic_powers_check(m, m.generator("dt"))
    assert not neg.passed


def test_foliation_ideals():
    m = sl2("sl2-geodesic")
    wp, w0, wm = m.generator("w+"), m.generator("w0"), m.generator("w-")
    assert foliation_ideal_check(m, [wp]).passed
    assert not foliation_ideal_check(m, [w0]).passed
    assert foliation_ideal_check(m, [wp, wm]).passed
    t = torus(3)
    assert foliation_ideal_check(t, [t.generator("dx1")]).passed
    # ω₋ on the leaves of (ω₊, ω₋)... the leaves of ω₊ = 0 see dω₋ = -ω₀∧ω₋ ≠ 0
    assert not closed_on_leaves(m, wm, [wp])
    assert closed_on_leaves(m, wp, [wp])


def test_leaf_two_form_proportionality():
    m = sl2("sl2-geodesic")
    wp, w0, wm = m.generator("w+"), m.generator("w0"), m.generator("w-")
    r = leaf_two_form_proportionality(m, [wp], wedge(w0, wm), wedge(wm, w0).scale(3))
    assert r.quotient_dim == 1 and r.factor == "-3"


def test_horocycle_jordan_cell():
    for kind in ("sl2-horocycle-plus", "sl2-horocycle-minus"):
        L = sl2(kind).matrix("lie", 1)
        assert jordan_profile(L) == [2, 1, 0]
        assert is_single_jordan_cell(L)
    assert not is_single_jordan_cell(sl2("sl2-geodesic").matrix("lie", 1))


def test_model_file_round_trip(tmp_path):
    m = sl2("sl2-geodesic")
    p = tmp_path / "geo.json"
    dump_model_file(m, p)
    assert same_model_data(load_model_file(p), m)


def test_model_file_accepts_zero_d(tmp_path):
    p = tmp_path / "z.json"
    p.write_text(json.dumps({"generators": ["w"], "d": {"w": [["1", ["w", "w"]]]}, "iX": {"w": "1"}}))
    m = load_model_file(p)
    assert not m.calc.d_values[0]


def test_model_file_rejects_bad_d_squared(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({
        "generators": ["a", "b", "c"],
        "d": {"a": [["1", ["b", "c"]]], "b": [["1", ["a", "b"]]]},
        "iX": {"a": "1"},
    }))
    with pytest.raises(ModelError, match="a"):
        load_model_file(p)


def test_model_file_parse_errors(tmp_path):
    p = tmp_path / "x.json"
    p.write_text("{not json")
    with pytest.raises(ModelFileError):
        load_model_file(p)
    p.write_text(json.dumps({"generators": ["a"], "iX": {"b": "1"}}))
    with pytest.raises(ModelFileError):
        load_model_file(p)
    p.write_text(json.dumps({"generators": ["a"], "iX": {"a": "gamma"}}))
    with pytest.raises(ModelFileError):
        load_model_file(p)


def test_symbolic_model_file(tmp_path):
    p = tmp_path / "t.json"
    p.write_text(json.dumps({"generators": ["dx1", "dx2"], "iX": {"dx1": "s", "dx2": "t"}, "symbols": ["s", "t"],
                             "computes_de_rham": True, "betti": [1, 2, 1]}))
    m = load_model_file(p)
    assert same_model_data(m, torus(2, ["s", "t"]))
