"""Exact coefficient fields: the rationals, optionally extended by formal symbols.

Elements are native sympy domain elements (``mpq`` over QQ, ``FracElement``
over ``QQ(a, b, ...)``); this module only wraps construction, parsing and
printing so the rest of the package never touches sympy's domain API directly.
"""

from __future__ import annotations

import re

from fractions import Fraction
from typing import Any, Iterable

import sympy
from sympy.parsing.sympy_parser import parse_expr
from sympy.polys.domains import QQ


class FieldMismatchError(ValueError):
    """Raised when objects over different coefficient fields are combined."""


class CoefficientField:
    """Rational functions in a fixed, ordered list of symbols over QQ.

    >>> K = CoefficientField(["a"])
    >>> x = K.symbol("a")
    >>> K.format(x / (x + 1))
    'a/(a + 1)'
    """

    __slots__ = ("symbols", "_sympy_symbols", "domain")

    def __init__(self, symbols: Iterable[str] = ()):
        self.symbols: tuple[str, ...] = tuple(symbols)
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError(f"duplicate symbol names in {self.symbols}")
        self._sympy_symbols = tuple(sympy.Symbol(s) for s in self.symbols)
        self.domain = QQ.frac_field(*self._sympy_symbols) if self.symbols else QQ

    def __eq__(self, other: object) -> bool:
        return isinstance(other, CoefficientField) and other.symbols == self.symbols

    def __hash__(self) -> int:
        return hash(("CoefficientField", self.symbols))

    def __repr__(self) -> str:
        if not self.symbols:
            return "CoefficientField(QQ)"
        return f"CoefficientField(QQ({', '.join(self.symbols)}))"

    @property
    def zero(self):
        return self.domain.zero

    @property
    def one(self):
        return self.domain.one

    def symbol(self, name: str):
        if name not in self.symbols:
            raise KeyError(f"{name!r} is not a symbol of {self!r}")
        return self.domain.from_sympy(sympy.Symbol(name))

    def convert(self, value: Any):
        """Coerce ints, Fractions, strings and sympy expressions into the field."""
        if isinstance(value, str):
            return self.parse(value)
        if isinstance(value, bool):
            raise TypeError("booleans are not field elements")
        if isinstance(value, int):
            return self.domain.convert(value)
        if isinstance(value, Fraction):
            return self.domain.convert(value.numerator) / self.domain.convert(value.denominator)
        if isinstance(value, float):
            raise TypeError("floating-point coefficients are not allowed in the exact engine")
        if isinstance(value, sympy.Basic):
            return self._from_sympy(value)
        # already a domain element (or an element of a subfield)
        try:
            return self.domain.convert(value)
        except Exception as exc:  # sympy raises CoercionFailed and friends
            raise TypeError(f"cannot convert {value!r} into {self!r}") from exc

    def parse(self, text: str):
        """Parse ``"-1/2"``, ``"alpha1"``, ``"2*a - b/3"`` and the like."""
        cleaned = text.replace("−", "-").strip()
        if not cleaned:
            raise ValueError("empty coefficient string")
        extra = sorted(set(re.findall(r"[A-Za-z_]\w*", cleaned)) - set(self.symbols))
        if extra:
            raise ValueError(f"coefficient uses undeclared symbols {extra}")
        local = dict(zip(self.symbols, self._sympy_symbols))
        try:
            expr = parse_expr(cleaned, local_dict=local, evaluate=True)
        except Exception as exc:
            raise ValueError(f"cannot parse coefficient {text!r}") from exc
        return self._from_sympy(expr)

    def _from_sympy(self, expr: sympy.Basic):
        extra = {str(s) for s in expr.free_symbols} - set(self.symbols)
        if extra:
            raise ValueError(f"coefficient uses undeclared symbols {sorted(extra)}")
        expr = sympy.nsimplify(expr, rational=True) if expr.has(sympy.Float) else expr
        return self.domain.from_sympy(sympy.together(expr))

    def to_sympy(self, element) -> sympy.Expr:
        return self.domain.to_sympy(element)

    def format(self, element) -> str:
        return str(self.to_sympy(element))

    def is_zero(self, element) -> bool:
        return not element

    def check_same(self, other: "CoefficientField") -> None:
        if other != self:
            raise FieldMismatchError(f"field mismatch: {self!r} vs {other!r}")


RATIONALS = CoefficientField()
