"""Exterior algebra on finitely many degree-1 generators, with Cartan calculus.

A monomial is a strictly increasing tuple of generator indices.  A
:class:`FormElement` maps monomials to nonzero field elements.  The three
operators d, i_X and the Lie derivative are extended from their values on
generators: d and i_X as antiderivations of degree +1 and -1, the Lie
derivative by the Cartan formula ``d i_X + i_X d``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

from .field import CoefficientField, FieldMismatchError
from .linalg import LinearMap

Monomial = tuple


class DegreeError(ValueError):
    """Requested form degree is outside 0..n."""


class ModelError(ValueError):
    """Generator data fail validation (d∘d != 0, wrong degrees, ...)."""


def normalize(indices: Sequence[int]) -> tuple[int, Monomial]:
    """Sort generator indices; return (sign, monomial), sign 0 on a repeat."""
    idx = list(indices)
    if len(set(idx)) != len(idx):
        return 0, ()
    sign = 1
    # insertion sort, counting transpositions
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    return sign, tuple(idx)


def basis(n: int, k: int) -> list[Monomial]:
    """Monomials of degree k on n generators, in lexicographic order."""
    if k < 0 or k > n:
        return []
    return list(combinations(range(n), k))


class FormElement:
    """Element of the exterior algebra with exact coefficients.

    Immutable.  Zero coefficients are never stored, so equality is equality
    of the term maps.
    """

    __slots__ = ("field", "_terms")

    def __init__(self, field: CoefficientField, terms: Mapping[Monomial, object] | None = None):
        self.field = field
        clean: dict[Monomial, object] = {}
        for mono, c in (terms or {}).items():
            sign, m = normalize(mono)
            if not sign:
                continue
            c = c if field.domain.of_type(c) else field.convert(c)
            val = clean.get(m, field.zero) + (c if sign > 0 else -c)
            if val:
                clean[m] = val
            else:
                clean.pop(m, None)
        self._terms = clean

    @classmethod
    def _raw(cls, field: CoefficientField, terms: dict) -> "FormElement":
        obj = cls.__new__(cls)
        obj.field = field
        obj._terms = terms
        return obj

    @classmethod
    def zero(cls, field: CoefficientField) -> "FormElement":
        return cls._raw(field, {})

    @classmethod
    def scalar(cls, field: CoefficientField, c=1) -> "FormElement":
        return cls(field, {(): c})

    @classmethod
    def generator(cls, field: CoefficientField, i: int, c=1) -> "FormElement":
        return cls(field, {(i,): c})

    @classmethod
    def monomial(cls, field: CoefficientField, indices: Sequence[int], c=1) -> "FormElement":
        return cls(field, {tuple(indices): c})

    @classmethod
    def from_vector(cls, field: CoefficientField, n: int, k: int, vec: Sequence) -> "FormElement":
        return cls._raw(field, {m: c for m, c in zip(basis(n, k), vec) if c})

    @property
    def terms(self) -> Mapping[Monomial, object]:
        return MappingProxyType(self._terms)

    @property
    def degrees(self) -> frozenset[int]:
        return frozenset(len(m) for m in self._terms)

    @property
    def degree(self) -> int | None:
        """Homogeneous degree; None for zero or for mixed elements."""
        d = self.degrees
        return next(iter(d)) if len(d) == 1 else None

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def coefficient(self, mono: Sequence[int]):
        sign, m = normalize(mono)
        c = self._terms.get(m, self.field.zero)
        return -c if sign < 0 else (c if sign else self.field.zero)

    def homogeneous_part(self, k: int) -> "FormElement":
        return FormElement._raw(self.field, {m: c for m, c in self._terms.items() if len(m) == k})

    def to_vector(self, n: int, k: int) -> tuple:
        extra = [m for m in self._terms if len(m) != k]
        if extra:
            raise DegreeError(f"element has components outside degree {k}: {extra}")
        return tuple(self._terms.get(m, self.field.zero) for m in basis(n, k))

    def _check(self, other: "FormElement") -> None:
        if other.field != self.field:
            raise FieldMismatchError(f"field mismatch: {self.field!r} vs {other.field!r}")

    def __add__(self, other: "FormElement") -> "FormElement":
        self._check(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            v = out.get(m, self.field.zero) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return FormElement._raw(self.field, out)

    def __neg__(self) -> "FormElement":
        return FormElement._raw(self.field, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other: "FormElement") -> "FormElement":
        return self + (-other)

    def scale(self, c) -> "FormElement":
        c = c if self.field.domain.of_type(c) else self.field.convert(c)
        if not c:
            return FormElement.zero(self.field)
        return FormElement._raw(self.field, {m: c * v for m, v in self._terms.items()})

    def __mul__(self, c) -> "FormElement":
        if isinstance(c, FormElement):
            return NotImplemented
        return self.scale(c)

    __rmul__ = __mul__

    def __xor__(self, other: "FormElement") -> "FormElement":
        return wedge(self, other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FormElement):
            return NotImplemented
        return self.field == other.field and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.field, frozenset(self._terms.items())))

    def __repr__(self) -> str:
        return f"FormElement({self.format()})"

    def format(self, names: Sequence[str] | None = None, wedge_sym: str = "∧") -> str:
        if not self._terms:
            return "0"
        parts = []
        for m in sorted(self._terms, key=lambda t: (len(t), t)):
            c = self.field.to_sympy(self._terms[m])
            mono = wedge_sym.join(names[i] if names else f"e{i}" for i in m)
            if not m:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                cs = str(c)
                if c.is_Add:
                    cs = f"({cs})"
                parts.append(f"{cs}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def wedge(a: FormElement, b: FormElement) -> FormElement:
    """Exterior product; bilinear, associative, graded-commutative."""
    a._check(b)
    K = a.field
    out: dict = {}
    for ma, ca in a._terms.items():
        for mb, cb in b._terms.items():
            sign, m = normalize(ma + mb)
            if not sign:
                continue
            v = ca * cb
            v = out.get(m, K.zero) + (v if sign > 0 else -v)
            if v:
                out[m] = v
            else:
                out.pop(m, None)
    return FormElement._raw(K, out)


def wedge_all(forms: Iterable[FormElement], field: CoefficientField) -> FormElement:
    out = FormElement.scalar(field, 1)
    for f in forms:
        out = wedge(out, f)
    return out


@dataclass(frozen=True)
class GeneratorCalculus:
    """Values of d and i_X on the generators.

    ``d_values[i]`` is a degree-2 element (or zero); ``iX_values[i]`` is a
    field scalar.
    """

    field: CoefficientField
    d_values: tuple
    iX_values: tuple

    def __post_init__(self):
        if len(self.d_values) != len(self.iX_values):
            raise ModelError("d_values and iX_values must have one entry per generator")
        object.__setattr__(self, "iX_values",
                           tuple(x if self.field.domain.of_type(x) else self.field.convert(x)
                                 for x in self.iX_values))

    @property
    def n(self) -> int:
        return len(self.d_values)

    def validate(self, names: Sequence[str] | None = None) -> None:
        """Reject generator data whose d is not a degree-1 differential."""
        names = names or [f"e{i}" for i in range(self.n)]
        for i, dv in enumerate(self.d_values):
            if dv.field != self.field:
                raise FieldMismatchError(f"d({names[i]}) is over {dv.field!r}, expected {self.field!r}")
            if dv and dv.degrees != {2}:
                raise ModelError(f"d({names[i]}) must be a 2-form, got degrees {sorted(dv.degrees)}")
            for m in dv.terms:
                if max(m) >= self.n:
                    raise ModelError(f"d({names[i]}) uses an undeclared generator index {max(m)}")
        for i in range(self.n):
            dd = apply_d(self, apply_d(self, FormElement.generator(self.field, i)))
            if dd:
                raise ModelError(f"d(d({names[i]})) = {dd.format(names)} != 0")


def _d_monomial(calc: GeneratorCalculus, mono: Monomial, c, out: dict) -> None:
    K = calc.field
    for j, g in enumerate(mono):
        dg = calc.d_values[g]
        if not dg:
            continue
        sgn_j = -1 if j % 2 else 1
        head, tail = mono[:j], mono[j + 1:]
        for pair, cp in dg._terms.items():
            sign, m = normalize(head + pair + tail)
            if not sign:
                continue
            v = c * cp
            v = out.get(m, K.zero) + (v if sign * sgn_j > 0 else -v)
            if v:
                out[m] = v
            else:
                out.pop(m, None)


def apply_d(calc: GeneratorCalculus, a: FormElement) -> FormElement:
    """Exterior derivative, extended from generators by the Leibniz rule."""
    if a.field != calc.field:
        raise FieldMismatchError(f"field mismatch: {a.field!r} vs {calc.field!r}")
    out: dict = {}
    for mono, c in a._terms.items():
        _d_monomial(calc, mono, c, out)
    return FormElement._raw(calc.field, out)


def contract(calc: GeneratorCalculus, a: FormElement) -> FormElement:
    """Interior product i_X: contraction into the first slot.

    i_X(e_{i1}∧...∧e_{ik}) = Σ_j (-1)^j X(e_{ij}) e_{i1}∧..^..∧e_{ik}.
    Degree-0 input goes to zero.
    """
    if a.field != calc.field:
        raise FieldMismatchError(f"field mismatch: {a.field!r} vs {calc.field!r}")
    K = calc.field
    out: dict = {}
    for mono, c in a._terms.items():
        for j, g in enumerate(mono):
            x = calc.iX_values[g]
            if not x:
                continue
            m = mono[:j] + mono[j + 1:]
            v = c * x
            v = out.get(m, K.zero) + (-v if j % 2 else v)
            if v:
                out[m] = v
            else:
                out.pop(m, None)
    return FormElement._raw(K, out)


def lie(calc: GeneratorCalculus, a: FormElement) -> FormElement:
    """Lie derivative along X via the Cartan formula d∘i_X + i_X∘d."""
    return apply_d(calc, contract(calc, a)) + contract(calc, apply_d(calc, a))


_OPERATORS = {"d": (apply_d, 1), "contract": (contract, -1), "lie": (lie, 0)}


def operator_matrix(calc: GeneratorCalculus, kind: str, k: int) -> LinearMap:
    """Matrix of d, contract or lie on Λ^k over the monomial bases."""
    if not 0 <= k <= calc.n:
        raise DegreeError(f"degree {k} outside 0..{calc.n}")
    return _operator_matrix(calc, kind, k)


def _operator_matrix(calc: GeneratorCalculus, kind: str, k: int) -> LinearMap:
    # no range check: degrees outside 0..n give empty bases
    try:
        op, shift = _OPERATORS[kind]
    except KeyError:
        raise ValueError(f"unknown operator kind {kind!r}; expected one of {sorted(_OPERATORS)}") from None
    n = calc.n
    src, tgt = basis(n, k), basis(n, k + shift)
    pos = {m: i for i, m in enumerate(tgt)}
    K = calc.field
    rows = [[K.zero] * len(src) for _ in tgt]
    for j, m in enumerate(src):
        img = op(calc, FormElement._raw(K, {m: K.one}))
        for mm, c in img._terms.items():
            rows[pos[mm]][j] = c
    return LinearMap(K, tuple(tuple(r) for r in rows), len(tgt), len(src),
                     f"Λ^{k}", f"Λ^{k + shift}")


def dimension(n: int, k: int) -> int:
    return comb(n, k) if 0 <= k <= n else 0
