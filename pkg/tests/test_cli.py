import json
import re
from collections import Counter

import numpy as np
import pytest

from flowforms.cli import SCHEMA_VERSION, main
from flowforms.fourier import FourierSeries


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


def test_models_list_and_show(capsys):
    code, out = run(capsys, "models", "list")
    assert code == 0 and "sl2-geodesic" in out.out and "sl2-horocycle-plus" in out.out
    code, out = run(capsys, "models", "show", "sl2-geodesic")
    assert code == 0 and "dω₀ = ω₊∧ω₋" in out.out


def test_usage_errors(capsys):
    assert run(capsys, "models", "show", "nosuch")[0] == 2
    assert run(capsys, "report", "--model", "nosuch")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "report", "--model", "torus", "--n", "1")[0] == 2


def test_report_torus(capsys):
    code, out = run(capsys, "report", "--model", "torus", "--n", "3", "--format", "json")
    d = json.loads(out.out)
    assert code == 0 and d["passed"] and d["schema_version"] == SCHEMA_VERSION
    assert d["cohomology"]["H_basic"] == [1, 2, 1, 0]


def test_report_geodesic(capsys):
    code, out = run(capsys, "report", "--model", "sl2-geodesic", "--genus", "2", "--format", "json")
    d = json.loads(out.out)
    assert code == 0
    assert d["cokernel_sequence"]["constraints"] == ["dim H^0_C - dim H^1_C = 1"]


def test_report_horocycle(capsys):
    code, out = run(capsys, "report", "--model", "sl2-horocycle-plus", "--genus", "2", "--format", "json")
    assert code == 0 and json.loads(out.out)["cokernel_sequence"]["H_C_dims"] == [4, 4, 1]


def _numbers(text):
    return Counter(re.findall(r"-?\d+(?:\.\d+)?(?:e[-+]?\d+)?", text))


def test_text_and_json_agree(capsys):
    _, j = run(capsys, "report", "--model", "sl2-geodesic", "--format", "json")
    _, t = run(capsys, "report", "--model", "sl2-geodesic", "--format", "text")
    # the text layout adds "[j]" position markers for list entries
    body = re.sub(r"(?m)^\s*\[\d+\]$", "", t.out)
    assert _numbers(j.out) == _numbers(body)


def test_report_model_file(tmp_path, capsys):
    p = tmp_path / "m.json"
    p.write_text(json.dumps({"generators": ["a", "b"], "iX": {"a": "1"}}))
    code, out = run(capsys, "report", "--model-file", str(p), "--format", "json")
    assert code == 0 and json.loads(out.out)["passed"]


def _series(tmp_path, s):
    p = tmp_path / "g.json"
    s.dump(p)
    return str(p)


def test_solve_torus_exit_codes(tmp_path, capsys):
    g = _series(tmp_path, FourierSeries.random_real(4, np.random.default_rng(0)))
    out_path = tmp_path / "f.json"
    code, out = run(capsys, "solve-torus", "--alpha", "golden", "--coeffs", g, "--out", str(out_path),
                    "--format", "json")
    assert code == 0 and json.loads(out.out)["diagnostics"]["residual"] < 1e-12
    assert FourierSeries.load(out_path).coeffs

    c = _series(tmp_path, FourierSeries.constant(1.0))
    code, out = run(capsys, "solve-torus", "--alpha", "golden", "--coeffs", c)
    assert code == 1 and "obstruction" in out.out
    assert run(capsys, "solve-torus", "--alpha", "golden", "--coeffs", c, "--subtract-mean")[0] == 0

    r = _series(tmp_path, FourierSeries({(1, -2): 1, (-1, 2): 1}))
    assert run(capsys, "solve-torus", "--alpha", "1/2", "--coeffs", r)[0] == 3
    assert run(capsys, "solve-torus", "--alpha", "nonsense", "--coeffs", r)[0] == 2
    assert run(capsys, "solve-torus", "--alpha", "golden", "--coeffs", str(tmp_path / "missing.json"))[0] == 2


@pytest.fixture(scope="module")
def verify_runs(tmp_path_factory):
    d = tmp_path_factory.mktemp("verify")
    outs = []
    for i in range(2):
        p = d / f"run{i}.json"
        outs.append((main(["verify-all", "--seed", "1", "--format", "json", "--out", str(p)]), p.read_bytes()))
    return outs


def test_verify_all_passes_and_is_deterministic(verify_runs):
    (c1, b1), (c2, b2) = verify_runs
    assert c1 == c2 == 0 and b1 == b2
    assert json.loads(b1)["passed"]


@pytest.mark.parametrize("fault,name", [("table", "operator_table"), ("sequence", "seven_term")])
def test_fault_injection(tmp_path, fault, name):
    p = tmp_path / "r.json"
    assert main(["verify-all", "--inject-fault", fault, "--format", "json", "--out", str(p)]) == 1
    failed = json.loads(p.read_text())["failed"]
    assert any(name in f for f in failed)
