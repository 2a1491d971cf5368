"""Built-in form models and the checks tied to them.

Models
------
``torus``
    Straight-line flow on T^n; generators dx1..dxn, d = 0, contraction
    values given by the formal slope symbols alpha1..alphan.
``sl2-geodesic``, ``sl2-horocycle-plus``, ``sl2-horocycle-minus``
    Right-invariant coframe w0, w+, w- of PSL2(R) with
    dw0 = w+∧w-, dw± = ±w0∧w±, and the three flows e0, e-, e+.
``flat-symplectic-torus``
    Constant symplectic form on T^{2n} in the normal form
    Σ dx^i∧dp^i + dc∧dt and the Hamiltonian flow of the closed 1-form dc.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .complex import FormModel, Subspace
from .exterior import (
    FormElement,
    GeneratorCalculus,
    ModelError,
    apply_d,
    basis,
    contract,
    lie,
    wedge,
    wedge_all,
)
from .field import CoefficientField, RATIONALS
from .linalg import LinearMap

SL2_NAMES = ("w0", "w+", "w-")
SL2_DISPLAY = ("ω₀", "ω₊", "ω₋")
SL2_FLOWS = {
    # contraction values on (w0, w+, w-)
    "sl2-geodesic": (1, 0, 0),
    "sl2-horocycle-plus": (0, 0, 1),
    "sl2-horocycle-minus": (0, 1, 0),
}
MODEL_KINDS = ("torus", "sl2-geodesic", "sl2-horocycle-plus", "sl2-horocycle-minus",
               "flat-symplectic-torus")
DEFAULT_GENUS = 2


class ModelFileError(ValueError):
    """Model file could not be parsed."""


@dataclass(frozen=True)
class ModelSpec:
    kind: str
    n: int | None = None
    genus: int | None = None
    slope_symbols: tuple[str, ...] | None = None
    path: str | None = None


def torus(n: int, slope_symbols: Sequence[str] | None = None) -> FormModel:
    """Linear flow on T^n with a fully symbolic slope."""
    if n < 2:
        raise ValueError(f"torus model needs n >= 2, got {n}")
    syms = tuple(slope_symbols) if slope_symbols else tuple(f"alpha{i + 1}" for i in range(n))
    if len(syms) != n:
        raise ValueError(f"need {n} slope symbols, got {len(syms)}")
    K = CoefficientField(syms)
    calc = GeneratorCalculus(K, tuple(FormElement.zero(K) for _ in range(n)),
                             tuple(K.symbol(s) for s in syms))
    from math import comb

    return FormModel(
        name=f"torus-{n}",
        generator_names=tuple(f"dx{i + 1}" for i in range(n)),
        calc=calc,
        betti=tuple(comb(n, k) for k in range(n + 1)),
        computes_de_rham=True,
        genus=None,
        imported_facts=("constant forms compute H*(T^n) and the invariant/basic complexes "
                        "of an ergodic linear flow",),
        extras={"slope_symbols": syms},
    )


def sl2_structure(K: CoefficientField = RATIONALS) -> tuple:
    w0, wp, wm = (FormElement.generator(K, i) for i in range(3))
    return (wedge(wp, wm), wedge(w0, wp), -wedge(w0, wm))


def sl2(kind: str, genus: int = DEFAULT_GENUS) -> FormModel:
    if kind not in SL2_FLOWS:
        raise ValueError(f"unknown sl2 flow {kind!r}")
    if genus < 1:
        raise ValueError(f"genus must be >= 1, got {genus}")
    K = RATIONALS
    calc = GeneratorCalculus(K, sl2_structure(K), SL2_FLOWS[kind])
    facts = ["betti data (1, 2g, 2g, 1) of the unit tangent bundle is external input",
             "basic/invariant forms of the flow are right-invariant (ergodicity)"]
    if kind != "sl2-geodesic":
        facts[1] = "all X±-invariant forms are right-invariant (ergodicity + skew-symmetry)"
    return FormModel(
        name=kind,
        generator_names=SL2_NAMES,
        display_names=SL2_DISPLAY,
        calc=calc,
        betti=(1, 2 * genus, 2 * genus, 1),
        computes_de_rham=False,
        genus=genus,
        imported_facts=tuple(facts),
    )


def flat_symplectic_torus(dim: int = 4, hamiltonian: str = "dc") -> FormModel:
    """T^{dim} with Ω = Σ dx^i∧dp^i + dc∧dt and X the Hamiltonian field of ω.

    X solves i_X Ω = -ω; for ω = dc this is the coordinate field ∂_t.
    """
    if dim < 2 or dim % 2:
        raise ValueError(f"flat symplectic torus needs an even dimension >= 2, got {dim}")
    m = dim // 2 - 1
    names = tuple([f"dx{i + 1}" for i in range(m)] + [f"dp{i + 1}" for i in range(m)] + ["dc", "dt"])
    K = RATIONALS
    n = len(names)
    pairs = [(i, m + i) for i in range(m)] + [(2 * m, 2 * m + 1)]
    omega_mat = [[Fraction(0)] * n for _ in range(n)]
    for a, b in pairs:
        omega_mat[a][b], omega_mat[b][a] = Fraction(1), Fraction(-1)
    ham = _parse_linear_form(hamiltonian, names)
    X = _solve_fraction([[omega_mat[i][j] for i in range(n)] for j in range(n)], [-c for c in ham])
    calc = GeneratorCalculus(K, tuple(FormElement.zero(K) for _ in range(n)), tuple(X))
    Omega = FormElement.zero(K)
    for a, b in pairs:
        Omega = Omega + FormElement.monomial(K, (a, b))
    ham_form = FormElement(K, {(i,): c for i, c in enumerate(ham) if c})
    return FormModel(
        name=f"flat-symplectic-torus-{dim}",
        generator_names=names,
        calc=calc,
        computes_de_rham=True,
        extras={"symplectic_form": Omega, "hamiltonian_form": ham_form},
    )


def _parse_linear_form(text: str, names: Sequence[str]) -> list[Fraction]:
    import sympy

    syms = {nm: sympy.Symbol(nm) for nm in names}
    expr = sympy.sympify(text.replace("−", "-"), locals=syms)
    poly = sympy.Poly(expr, *syms.values())
    if poly.total_degree() > 1 or poly.coeff_monomial(1) != 0:
        raise ValueError(f"{text!r} is not a linear combination of {names}")
    return [Fraction(str(poly.coeff_monomial(s))) for s in syms.values()]


def _solve_fraction(A: list[list[Fraction]], b: list[Fraction]) -> list[Fraction]:
    n = len(A)
    M = [row[:] + [bb] for row, bb in zip(A, b)]
    for c in range(n):
        p = next(i for i in range(c, n) if M[i][c] != 0)
        M[c], M[p] = M[p], M[c]
        M[c] = [x / M[c][c] for x in M[c]]
        for i in range(n):
            if i != c and M[i][c] != 0:
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[c])]
    return [M[i][n] for i in range(n)]


def instantiate(spec: ModelSpec | str, **params) -> FormModel:
    """Build a model from a spec (or a kind name plus keyword parameters)."""
    if isinstance(spec, str):
        spec = ModelSpec(spec, **params)
    kind = spec.kind
    if kind == "torus":
        return torus(spec.n if spec.n is not None else 2, spec.slope_symbols)
    if kind in SL2_FLOWS:
        return sl2(kind, spec.genus if spec.genus is not None else DEFAULT_GENUS)
    if kind == "flat-symplectic-torus":
        return flat_symplectic_torus(spec.n if spec.n is not None else 4)
    if kind == "custom-from-file":
        if not spec.path:
            raise ValueError("custom-from-file needs a path")
        return load_model_file(spec.path)
    raise ValueError(f"unknown model kind {kind!r}; expected one of {MODEL_KINDS}")


# ---------------------------------------------------------------------------
# model files


def model_to_dict(m: FormModel) -> dict:
    names = m.generator_names
    d = {}
    for g, dv in zip(names, m.calc.d_values):
        d[g] = [[m.field.format(c), [names[i] for i in mono]] for mono, c in sorted(dv.terms.items())]
    out = {
        "name": m.name,
        "generators": list(names),
        "d": d,
        "iX": {g: m.field.format(x) for g, x in zip(names, m.calc.iX_values)},
        "symbols": list(m.field.symbols),
    }
    if m.betti is not None:
        out["betti"] = list(m.betti)
    if m.genus is not None:
        out["genus"] = m.genus
    if m.display_names:
        out["display_names"] = list(m.display_names)
    out["computes_de_rham"] = m.computes_de_rham
    return out


def model_from_dict(data: dict, name: str = "custom") -> FormModel:
    try:
        gens = list(data["generators"])
        d_raw = data.get("d", {})
        iX_raw = data["iX"]
    except (KeyError, TypeError) as exc:
        raise ModelFileError(f"missing field {exc}") from None
    if len(set(gens)) != len(gens):
        raise ModelFileError("duplicate generator names")
    K = CoefficientField(data.get("symbols", []))
    pos = {g: i for i, g in enumerate(gens)}
    unknown = (set(d_raw) | set(iX_raw)) - set(pos)
    if unknown:
        raise ModelFileError(f"undeclared generators {sorted(unknown)}")
    d_values = []
    for g in gens:
        terms: dict = {}
        for entry in d_raw.get(g, []):
            try:
                coeff, pair = entry
                idx = tuple(pos[p] for p in pair)
            except (ValueError, TypeError, KeyError) as exc:
                raise ModelFileError(f"bad d-term for {g}: {entry!r}") from exc
            if len(idx) != 2:
                raise ModelError(f"d({g}) term {entry!r} is not a 2-form term")
            elem = FormElement(K, {idx: _coeff(K, coeff, g)})
            for mono, c in elem.terms.items():
                terms[mono] = terms.get(mono, K.zero) + c
        d_values.append(FormElement(K, terms))
    iX = tuple(_coeff(K, iX_raw.get(g, "0"), g) for g in gens)
    betti = data.get("betti")
    return FormModel(
        name=data.get("name", name),
        generator_names=tuple(gens),
        display_names=tuple(data["display_names"]) if data.get("display_names") else None,
        calc=GeneratorCalculus(K, tuple(d_values), iX),
        betti=tuple(int(b) for b in betti) if betti is not None else None,
        computes_de_rham=bool(data.get("computes_de_rham", False)),
        genus=data.get("genus"),
    )


def _coeff(K: CoefficientField, raw, gen: str):
    try:
        return K.convert(raw if isinstance(raw, (int, str)) else str(raw))
    except (ValueError, TypeError) as exc:
        raise ModelFileError(f"bad coefficient {raw!r} for generator {gen}: {exc}") from exc


def load_model_file(path: str | Path) -> FormModel:
    """Read and validate a JSON model file (closure and d∘d = 0)."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ModelFileError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise ModelFileError(f"{path}: top level must be an object")
    return model_from_dict(data, Path(path).stem)


def dump_model_file(m: FormModel, path: str | Path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(m), indent=2, ensure_ascii=False) + "\n",
                          encoding="utf-8")


def same_model_data(a: FormModel, b: FormModel) -> bool:
    return (a.generator_names == b.generator_names and a.field == b.field
            and a.calc.d_values == b.calc.d_values and a.calc.iX_values == b.calc.iX_values
            and a.betti == b.betti)


# ---------------------------------------------------------------------------
# operator tables and the comparison with the published tables


@dataclass
class TableEntry:
    op: str
    argument: tuple[str, ...]
    value: FormElement


@dataclass
class TableDiff:
    op: str
    argument: tuple[str, ...]
    expected: str
    derived: str
    status: str  # match | sign-flip | mismatch
    printed: str  # exact | paired-pm | ambiguous-pm | from-pm | mod-ideal
    note: str = ""
    literal_status: str | None = None

    @property
    def unambiguous(self) -> bool:
        return self.printed in ("exact", "mod-ideal")


@dataclass
class OperatorTable:
    model: str
    entries: list[TableEntry]
    diffs: list[TableDiff] = dc_field(default_factory=list)

    def lookup(self, op: str, argument: Sequence[str]) -> FormElement:
        for e in self.entries:
            if e.op == op and e.argument == tuple(argument):
                return e.value
        raise KeyError((op, tuple(argument)))

    def counts(self) -> dict[str, int]:
        out = {"match": 0, "sign-flip": 0, "mismatch": 0}
        for d in self.diffs:
            out[d.status] += 1
        return out


# (op, argument, expected {monomial: coeff}, printed-as, note)
# monomials use the ascii generator names; () is the constant 1.
PUBLISHED_TABLES: dict[str, list[tuple]] = {
    "sl2-geodesic": [
        ("lie", ("w+",), {("w+",): 1}, "paired-pm", "∇X(ω±) = ±ω±"),
        ("lie", ("w-",), {("w-",): -1}, "paired-pm", "∇X(ω±) = ±ω±"),
        ("lie", ("w0",), {}, "exact", ""),
        ("lie", ("w0", "w+", "w-"), {}, "exact", ""),
        ("contract", ("w0",), {(): 1}, "exact", ""),
        ("contract", ("w+",), {}, "paired-pm", "iX(ω±) = 0"),
        ("contract", ("w-",), {}, "paired-pm", "iX(ω±) = 0"),
        ("contract", ("w0", "w+", "w-"), {("w+", "w-"): 1}, "exact", ""),
        ("contract", ("w0", "w+"), {("w+",): 1}, "paired-pm", "iX(ω0∧ω±) = ±ω±"),
        ("contract", ("w0", "w-"), {("w-",): -1}, "paired-pm", "iX(ω0∧ω±) = ±ω±"),
        ("contract", ("w+", "w-"), {}, "exact", ""),
        ("lie", ("w+", "w-"), {}, "exact", ""),
    ],
    "sl2-horocycle-plus": [
        ("contract", ("w0",), {}, "exact", ""),
        ("contract", ("w+",), {}, "exact", ""),
        ("contract", ("w-",), {(): 1}, "exact", ""),
        ("contract", ("w0", "w+"), {}, "exact", ""),
        ("contract", ("w0", "w-"), {("w0",): 1}, "ambiguous-pm", "printed as ±ω0"),
        ("contract", ("w+", "w-"), {("w+",): 1}, "ambiguous-pm", "printed as ±ω+"),
        ("lie", ("w0",), {("w+",): 1}, "from-pm",
         "printed as ω+, but deduced from the ±-printed value of i+(ω+∧ω-)"),
        ("lie", ("w-",), {("w0",): 1}, "ambiguous-pm", "printed as ±ω0"),
        ("lie", ("w+",), {}, "exact", ""),
        ("lie", ("w0", "w+"), {}, "exact", ""),
        ("lie", ("w0", "w-"), {("w0", "w+"): 1}, "mod-ideal",
         "claimed only up to forms vanishing on the leaves ω+ = 0"),
    ],
}
_IDEALS = {("sl2-horocycle-plus", "lie", ("w0", "w-")): ("w+",)}


def _names_to_form(m: FormModel, expected: dict) -> FormElement:
    pos = {g: i for i, g in enumerate(m.generator_names)}
    return FormElement(m.field, {tuple(pos[g] for g in mono): c for mono, c in expected.items()})


def derive_operator_tables(m: FormModel, published: list[tuple] | None = None) -> OperatorTable:
    """d, i_X and ∇_X on every basis monomial, plus a diff against published values.

    ``published`` defaults to the built-in transcription for the model (none
    for models without a published table).
    """
    entries = []
    for k in range(m.n + 1):
        for mono in basis(m.n, k):
            arg = tuple(m.generator_names[i] for i in mono)
            f = FormElement.monomial(m.field, mono)
            entries.append(TableEntry("d", arg, apply_d(m.calc, f)))
            entries.append(TableEntry("contract", arg, contract(m.calc, f)))
            entries.append(TableEntry("lie", arg, lie(m.calc, f)))
    table = OperatorTable(m.name, entries)
    rows = PUBLISHED_TABLES.get(m.name, []) if published is None else published
    for op, arg, expected, printed, note in rows:
        derived = table.lookup(op, arg)
        exp = _names_to_form(m, expected)
        literal = _compare(derived, exp)
        status = literal
        if printed == "ambiguous-pm" and literal == "sign-flip":
            status = "match"
            note = (note + "; " if note else "") + "sign resolved as -"
        if printed == "mod-ideal":
            ideal = _IDEALS.get((m.name, op, arg), ())
            gens = [m.generator(g) for g in ideal]
            status = _compare_mod_ideal(m, derived, exp, gens)
        table.diffs.append(TableDiff(op, arg, m.format(exp), m.format(derived), status, printed,
                                     note, literal_status=literal))
    return table


def _compare(derived: FormElement, expected: FormElement) -> str:
    if derived == expected:
        return "match"
    if derived == -expected:
        return "sign-flip"
    return "mismatch"


def _compare_mod_ideal(m: FormModel, derived: FormElement, expected: FormElement,
                       gens: Sequence[FormElement]) -> str:
    k = (derived.degree if derived else expected.degree) or 0
    if ideal_contains(m, gens, derived - expected, k):
        return "match"
    if ideal_contains(m, gens, derived + expected, k):
        return "sign-flip"
    return "mismatch"


# ---------------------------------------------------------------------------
# foliation ideals


def ideal_span(m: FormModel, gens: Sequence[FormElement], k: int) -> Subspace:
    """Degree-k part of the ideal generated by the given 1-forms."""
    vecs = []
    for g in gens:
        for mono in basis(m.n, k - 1):
            vecs.append(m.vector(wedge(g, FormElement.monomial(m.field, mono)), k))
    return Subspace.span(m.field, m.n, k, vecs)


def ideal_contains(m: FormModel, gens: Sequence[FormElement], form: FormElement, k: int) -> bool:
    if not form:
        return True
    return ideal_span(m, gens, k).contains(m.vector(form, k))


@dataclass
class IdealVerdict:
    generators: list[str]
    differentials: list[str]
    in_ideal: list[bool]

    @property
    def passed(self) -> bool:
        return all(self.in_ideal)


def foliation_ideal_check(m: FormModel, gens: Sequence[FormElement]) -> IdealVerdict:
    """Integrability: d of each generating 1-form lies in the ideal (dI ⊂ I)."""
    for g in gens:
        if g.degrees != {1}:
            raise ValueError(f"ideal generators must be 1-forms, got {m.format(g)}")
    flags, ds = [], []
    for g in gens:
        dg = apply_d(m.calc, g)
        ds.append(m.format(dg))
        flags.append(ideal_contains(m, gens, dg, 2))
    return IdealVerdict([m.format(g) for g in gens], ds, flags)


def closed_on_leaves(m: FormModel, form: FormElement, gens: Sequence[FormElement]) -> bool:
    """Whether d(form) restricts to zero on the leaves of the ideal's foliation."""
    dform = apply_d(m.calc, form)
    k = dform.degree or 0
    return ideal_contains(m, gens, dform, k)


@dataclass
class LeafFormProportionality:
    quotient_dim: int
    factor: str | None

    @property
    def passed(self) -> bool:
        return self.quotient_dim == 1 and self.factor is not None


def leaf_two_form_proportionality(m: FormModel, gens: Sequence[FormElement],
                                  first: FormElement, second: FormElement) -> LeafFormProportionality:
    """On 2D leaves, two leafwise-nonzero 2-forms agree modulo the ideal up to a factor.

    Returns the dimension of Λ²/I² (1 for two-dimensional leaves) and the
    factor c with second ≡ c·first mod I, if one exists.
    """
    I2 = ideal_span(m, gens, 2)
    qdim = m.dim(2) - I2.dim
    v1, v2 = m.vector(first, 2), m.vector(second, 2)
    if I2.contains(v1):
        return LeafFormProportionality(qdim, None)
    K = m.field
    cols = [v1] + list(I2.basis)
    A = LinearMap.from_columns(K, cols, m.dim(2))
    sol = A.solve(v2)
    factor = None if sol is None or not sol[0] else K.format(sol[0])
    return LeafFormProportionality(qdim, factor)


# ---------------------------------------------------------------------------
# Hamiltonian forms on the flat symplectic torus


@dataclass
class BasicPowersVerdict:
    rows: list[dict]

    @property
    def passed(self) -> bool:
        return all(r["contract_zero"] and r["lie_zero"] for r in self.rows)


def basic_powers_check(m: FormModel, omega: FormElement | None = None) -> BasicPowersVerdict:
    """μ_j = ω∧Ω^j must be basic: i_X μ_j = 0 and ∇_X μ_j = 0 for every j."""
    try:
        Omega = m.extras["symplectic_form"]
    except KeyError:
        raise ValueError(f"model {m.name!r} carries no symplectic form") from None
    omega = m.extras["hamiltonian_form"] if omega is None else omega
    rows = []
    j = 0
    while True:
        mu = wedge(omega, wedge_all([Omega] * j, m.field))
        if not mu:
            break
        rows.append({
            "j": j,
            "form": m.format(mu),
            "contract_zero": not contract(m.calc, mu),
            "lie_zero": not lie(m.calc, mu),
        })
        j += 1
    return BasicPowersVerdict(rows)


def jordan_profile(op: LinearMap) -> list[int]:
    """Ranks of op, op², ... until they stabilise (or reach 0)."""
    ranks = []
    p = op
    for _ in range(op.nrows):
        r = p.rank()
        ranks.append(r)
        if r == 0:
            break
        p = op @ p
    return ranks


def is_single_jordan_cell(op: LinearMap) -> bool:
    """Nilpotent with one Jordan block: ranks of powers are n-1, n-2, ..., 0."""
    n = op.nrows
    return jordan_profile(op) == list(range(n - 1, -1, -1))


def registry() -> dict[str, dict]:
    """Built-in model kinds with their default parameters."""
    return {
        "flat-symplectic-torus": {"n": 4},
        "sl2-geodesic": {"genus": DEFAULT_GENUS},
        "sl2-horocycle-minus": {"genus": DEFAULT_GENUS},
        "sl2-horocycle-plus": {"genus": DEFAULT_GENUS},
        "torus": {"n": 2},
    }

