"""Randomized and matrix-level checks of the Cartan calculus identities."""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field as dc_field

from .complex import FormModel
from .exterior import FormElement, apply_d, basis, contract, lie, wedge


def random_element(m: FormModel, k: int, rng: random.Random, max_coeff: int = 3) -> FormElement:
    """Homogeneous degree-k element with small integer coefficients.

    Over a function field a coefficient is sometimes multiplied by a symbol
    so that the checks see genuinely non-constant scalars.
    """
    K = m.field
    terms = {}
    for mono in basis(m.n, k):
        if rng.random() < 0.3:
            continue
        c = K.convert(rng.randint(-max_coeff, max_coeff))
        if K.symbols and rng.random() < 0.3:
            c = c * K.symbol(rng.choice(K.symbols))
        terms[mono] = c
    return FormElement(K, terms)


@dataclass
class IdentityReport:
    model: str
    pairs: int
    failures: Counter = dc_field(default_factory=Counter)
    checked: Counter = dc_field(default_factory=Counter)

    @property
    def passed(self) -> bool:
        return not self.failures

    def as_dict(self) -> dict:
        return {"model": self.model, "pairs": self.pairs, "checked": dict(sorted(self.checked.items())),
                "failures": dict(sorted(self.failures.items())), "passed": self.passed}


def _sign(p: int) -> int:
    return -1 if p % 2 else 1


def element_identities(m: FormModel, pairs: int = 100, seed: int = 0) -> IdentityReport:
    """Leibniz laws, squares, commutations and graded commutativity on random pairs."""
    rng = random.Random(seed)
    calc = m.calc
    rep = IdentityReport(m.name, pairs)
    d = lambda x: apply_d(calc, x)  # noqa: E731
    i = lambda x: contract(calc, x)  # noqa: E731
    L = lambda x: lie(calc, x)  # noqa: E731

    def check(name, ok):
        rep.checked[name] += 1
        if not ok:
            rep.failures[name] += 1

    for _ in range(pairs):
        p, q = rng.randint(0, m.n), rng.randint(0, m.n)
        a, b = random_element(m, p, rng), random_element(m, q, rng)
        ab = wedge(a, b)
        check("d∘d = 0", not d(d(a)))
        check("i∘i = 0", not i(i(a)))
        check("cartan", L(a) == d(i(a)) + i(d(a)))
        check("d leibniz", d(ab) == wedge(d(a), b) + wedge(a, d(b)).scale(_sign(p)))
        check("i leibniz", i(ab) == wedge(i(a), b) + wedge(a, i(b)).scale(_sign(p)))
        check("lie derivation", L(ab) == wedge(L(a), b) + wedge(a, L(b)))
        check("lie∘d = d∘lie", L(d(a)) == d(L(a)))
        check("lie∘i = i∘lie", L(i(a)) == i(L(a)))
        check("graded commutativity", ab == wedge(b, a).scale(_sign(p * q)))
    return rep


def matrix_identities(m: FormModel) -> IdentityReport:
    """The same identities as matrix equations, degree by degree."""
    rep = IdentityReport(m.name, 0)
    n = m.n
    M = m.matrix

    def check(name, ok):
        rep.checked[name] += 1
        if not ok:
            rep.failures[name] += 1

    for k in range(n + 1):
        if k + 1 <= n:
            check("d∘d = 0", (M("d", k + 1) @ M("d", k)).is_zero())
            check("lie∘d = d∘lie", M("d", k) @ M("lie", k) == M("lie", k + 1) @ M("d", k))
        if k >= 1:
            check("i∘i = 0", (M("contract", k - 1) @ M("contract", k)).is_zero())
            check("lie∘i = i∘lie", M("contract", k) @ M("lie", k) == M("lie", k - 1) @ M("contract", k))
        cartan = None
        if 1 <= k:
            cartan = M("d", k - 1) @ M("contract", k)
        if k + 1 <= n:
            t = M("contract", k + 1) @ M("d", k)
            cartan = t if cartan is None else cartan + t
        if cartan is not None:
            check("cartan", cartan == M("lie", k))
    return rep
