"""Geodesic and horocycle flows as matrix flows on SL(2, R).

Convention: the flow of E is left multiplication, g ↦ exp(tE)·g, whose
generating vector field g ↦ E·g is right-invariant.  The frame forms are
the components of the right-invariant Maurer-Cartan form dg·g⁻¹ in the
basis (E0, E+, E-).  With this pairing the Lie derivatives and the
structure equations come out with the signs of the symbolic tables
(dω0 = ω+∧ω-, dω± = ±ω0∧ω±).

Everything is a local identity on the group; no lattice is built.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

import numpy as np
from scipy import integrate

FLOW_KINDS = ("geodesic", "horocycle-plus", "horocycle-minus")
FORM_NAMES = ("w0", "w+", "w-")


class NotHyperbolicError(ValueError):
    """|trace| <= 2: no closed geodesic."""


@dataclass(frozen=True)
class AlgebraBasis:
    E0: np.ndarray
    Ep: np.ndarray
    Em: np.ndarray

    @classmethod
    def default(cls, a: float = 1.0) -> "AlgebraBasis":
        """E+ = a·[[0,1],[0,0]], E- = b·[[0,0],[1,0]] with 2ab = 1."""
        b = 1.0 / (2.0 * a)
        return cls(np.diag([0.5, -0.5]), np.array([[0.0, a], [0.0, 0.0]]),
                   np.array([[0.0, 0.0], [b, 0.0]]))

    def as_list(self) -> list[np.ndarray]:
        return [self.E0, self.Ep, self.Em]

    def coordinates(self, A: np.ndarray) -> np.ndarray:
        """Components of a traceless matrix A in (E0, E+, E-)."""
        M = np.column_stack([E.ravel() for E in self.as_list()])
        coef, *_ = np.linalg.lstsq(M, np.asarray(A, dtype=float).ravel(), rcond=None)
        return coef

    def generator(self, kind: str) -> np.ndarray:
        """Matrix generating the flow ``kind``; horocycle-plus runs along E-."""
        return {"geodesic": self.E0, "horocycle-plus": self.Em, "horocycle-minus": self.Ep}[_kind(kind)]


DEFAULT_BASIS = AlgebraBasis.default()


def _kind(kind: str) -> str:
    k = kind.removeprefix("sl2-")
    if k not in FLOW_KINDS:
        raise ValueError(f"unknown flow {kind!r}; expected one of {FLOW_KINDS}")
    return k


def bracket(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return A @ B - B @ A


@dataclass
class BracketVerdict:
    passed: bool
    errors: dict[str, float]


def bracket_check(basis: AlgebraBasis = DEFAULT_BASIS, tol: float = 1e-14) -> BracketVerdict:
    """[E+,E-] = E0, [E0,E+] = E+, [E0,E-] = -E-, entrywise."""
    E0, Ep, Em = basis.as_list()
    errs = {
        "[E+,E-]=E0": float(np.max(np.abs(bracket(Ep, Em) - E0))),
        "[E0,E+]=E+": float(np.max(np.abs(bracket(E0, Ep) - Ep))),
        "[E0,E-]=-E-": float(np.max(np.abs(bracket(E0, Em) + Em))),
    }
    nonzero = all(np.any(E != 0) for E in basis.as_list())
    return BracketVerdict(nonzero and all(e < tol for e in errs.values()), errs)


def expm_closed(E: np.ndarray, t: float) -> np.ndarray:
    """exp(tE) for diagonal or nilpotent 2x2 E."""
    if np.count_nonzero(E - np.diag(np.diag(E))) == 0:
        return np.diag(np.exp(t * np.diag(E)))
    if np.allclose(E @ E, 0, atol=0):
        return np.eye(2) + t * E
    raise ValueError("closed-form exponential needs a diagonal or nilpotent generator")


def renormalize(g: np.ndarray) -> np.ndarray:
    """Rescale so that det g = 1."""
    d = np.linalg.det(g)
    if d <= 0:
        raise ValueError("matrix is not in the identity component of GL(2)")
    return g / np.sqrt(d)


def flow(g: np.ndarray, kind: str, t: float, basis: AlgebraBasis = DEFAULT_BASIS) -> np.ndarray:
    """exp(t·E_kind)·g."""
    if not np.isfinite(t):
        raise ValueError("flow time must be finite")
    return expm_closed(basis.generator(kind), t) @ np.asarray(g, dtype=float)


def velocity(g: np.ndarray, kind: str, basis: AlgebraBasis = DEFAULT_BASIS) -> np.ndarray:
    return basis.generator(kind) @ g


def frame_field(g: np.ndarray, index: int, basis: AlgebraBasis = DEFAULT_BASIS) -> np.ndarray:
    """Value at g of the right-invariant field e_index (0, +, - as 0, 1, 2)."""
    return basis.as_list()[index] @ g


def eval_invariant_form(which: str | int, g: np.ndarray, v: np.ndarray,
                        basis: AlgebraBasis = DEFAULT_BASIS) -> float:
    """ω_which(v) for a tangent vector v at g: a component of v·g⁻¹."""
    i = FORM_NAMES.index(which) if isinstance(which, str) else which
    return float(basis.coordinates(v @ np.linalg.inv(g))[i])


def eval_monomial(mono: tuple[int, ...], g: np.ndarray, vectors: list[np.ndarray],
                  basis: AlgebraBasis = DEFAULT_BASIS) -> float:
    """(ω_{i1}∧…∧ω_{ik})(v1, …, vk) = det[ω_{i_a}(v_b)]."""
    if not mono:
        return 1.0
    ginv = np.linalg.inv(g)
    coords = np.array([basis.coordinates(v @ ginv) for v in vectors])  # row b: ω(v_b)
    return float(np.linalg.det(coords[:, list(mono)].T))


def eval_form(form, g: np.ndarray, vectors: list[np.ndarray], basis: AlgebraBasis = DEFAULT_BASIS) -> float:
    """Evaluate a homogeneous symbolic form (generators ordered w0, w+, w-)."""
    total = 0.0
    for mono, c in form.terms.items():
        total += float(form.field.to_sympy(c)) * eval_monomial(mono, g, vectors, basis)
    return total


def random_group_point(rng: np.random.Generator, scale: float = 0.7) -> np.ndarray:
    A = rng.normal(scale=scale, size=(2, 2))
    A -= np.trace(A) / 2 * np.eye(2)
    from scipy.linalg import expm

    return renormalize(expm(A))


@dataclass
class LieCheck:
    kind: str
    degree: int
    max_deviation: float
    order_ratio: float | None  # None: the extrapolation is exact up to rounding
    order_ratios: list[float]
    samples: int

    def passed(self, tol: float = 1e-6) -> bool:
        order_ok = self.order_ratio is None or 3.5 <= self.order_ratio <= 4.5
        return self.max_deviation < tol and order_ok

    def as_dict(self) -> dict:
        return {"kind": self.kind, "degree": self.degree, "max_deviation": self.max_deviation,
                "order_ratio": self.order_ratio, "samples": self.samples}


def _pullback_value(mono, g, vectors, kind, h, basis):
    phi = expm_closed(basis.generator(kind), h)
    return eval_monomial(mono, phi @ g, [phi @ v for v in vectors], basis)


def _extrapolated(mono, g, vectors, kind, h, basis):
    """Richardson combination of forward differences at h and h/2; error O(h²)."""
    f0 = eval_monomial(mono, g, vectors, basis)
    d1 = (_pullback_value(mono, g, vectors, kind, h, basis) - f0) / h
    d2 = (_pullback_value(mono, g, vectors, kind, h / 2, basis) - f0) / (h / 2)
    return 2 * d2 - d1


def numeric_lie_check(degree: int, kind: str, samples: int = 12, seed: int = 0,
                      h: float = 2.5e-4, h_order: float = 0.1,
                      basis: AlgebraBasis = DEFAULT_BASIS) -> LieCheck:
    """Compare finite-difference Lie derivatives with the symbolic operator.

    Every basis k-form of the right-invariant span is pulled back along the
    flow and differentiated at random points on random tangent vectors.
    The convergence order is measured at the coarser step ``h_order`` where
    truncation error dominates rounding.
    """
    from .exterior import FormElement, basis as monomials, lie
    from .models import sl2

    k = _kind(kind)
    m = sl2(f"sl2-{k}")
    rng = np.random.default_rng(seed)
    worst = 0.0
    ratios = []
    for mono in monomials(3, degree):
        exact = lie(m.calc, FormElement.monomial(m.field, mono))
        for _ in range(samples):
            g = random_group_point(rng)
            vs = [rng.normal(size=(2, 2)) @ g for _ in range(degree)]
            target = eval_form(exact, g, vs, basis) if degree else 0.0
            est = _extrapolated(mono, g, vs, k, h, basis)
            worst = max(worst, abs(est - target))
            e1 = abs(_extrapolated(mono, g, vs, k, h_order, basis) - target)
            e2 = abs(_extrapolated(mono, g, vs, k, h_order / 2, basis) - target)
            if e2 > 1e-11:
                ratios.append(e1 / e2)
    ratio = float(np.median(ratios)) if ratios else None
    return LieCheck(k, degree, worst, ratio, ratios, samples)


@dataclass
class MaurerCartanCheck:
    max_deviation: float
    values: dict

    def passed(self, tol: float = 1e-8) -> bool:
        return self.max_deviation < tol


def _field_bracket(g, i, j, basis, step=1e-5):
    """Bracket of the frame fields e_i, e_j at g by central differences of their Jacobians."""
    Xi = lambda p: frame_field(p, i, basis)  # noqa: E731
    Xj = lambda p: frame_field(p, j, basis)  # noqa: E731

    def directional(F, p, v):
        return (F(p + step * v) - F(p - step * v)) / (2 * step)

    return directional(Xj, g, Xi(g)) - directional(Xi, g, Xj(g))


def maurer_cartan_check(samples: int = 10, seed: int = 0,
                        basis: AlgebraBasis = DEFAULT_BASIS) -> MaurerCartanCheck:
    """dω_k(e_i, e_j) = -ω_k([e_i, e_j]) numerically versus the symbolic d-values."""
    from .exterior import FormElement, apply_d
    from .models import sl2

    m = sl2("sl2-geodesic")
    rng = np.random.default_rng(seed)
    worst, values = 0.0, {}
    for k in range(3):
        dk = apply_d(m.calc, FormElement.generator(m.field, k))
        for i, j in permutations(range(3), 2):
            expected = eval_form(dk, np.eye(2), [basis.as_list()[i], basis.as_list()[j]], basis)
            for _ in range(samples):
                g = random_group_point(rng)
                got = -eval_invariant_form(k, g, _field_bracket(g, i, j, basis), basis)
                worst = max(worst, abs(got - expected))
            values[f"d{FORM_NAMES[k]}(e{i},e{j})"] = expected
    return MaurerCartanCheck(worst, values)


@dataclass
class PeriodResult:
    length: float
    integral: float
    deviation: float
    closing_error: float


def closed_geodesic_period(h: np.ndarray, basis: AlgebraBasis = DEFAULT_BASIS) -> PeriodResult:
    """Length of the closed geodesic of h against ∮ω0 along it.

    h = P·D·P⁻¹ with D = ±exp(L·E0).  Starting at g = P⁻¹ the orbit
    exp(tE0)·g returns to g·h (up to sign) at t = L.
    """
    h = np.asarray(h, dtype=float)
    tr = float(np.trace(h))
    if abs(tr) <= 2:
        raise NotHyperbolicError(f"|trace| = {abs(tr)} <= 2")
    length = 2 * float(np.arccosh(abs(tr) / 2))
    w, P = np.linalg.eig(h)
    order = np.argsort(-np.abs(w))
    P = np.real(P[:, order])
    if np.linalg.det(P) < 0:
        P[:, 1] *= -1
    P = renormalize(P)
    g0 = np.linalg.inv(P)

    def integrand(t):
        g = flow(g0, "geodesic", t, basis)
        return eval_invariant_form("w0", g, velocity(g, "geodesic", basis), basis)

    integral, _ = integrate.quad(integrand, 0.0, length, epsabs=1e-13, epsrel=1e-13)
    end = flow(g0, "geodesic", length, basis)
    target = g0 @ h
    closing = float(min(np.max(np.abs(end - target)), np.max(np.abs(end + target))))
    return PeriodResult(length, float(integral), abs(integral - length), closing)


def group_law_error(kind: str, g: np.ndarray, s: float, t: float,
                    basis: AlgebraBasis = DEFAULT_BASIS) -> float:
    a = flow(flow(g, kind, s, basis), kind, t, basis)
    b = flow(g, kind, s + t, basis)
    return float(np.max(np.abs(a - b)))


def duality_error(g: np.ndarray, basis: AlgebraBasis = DEFAULT_BASIS) -> float:
    worst = 0.0
    for j in range(3):
        v = frame_field(g, j, basis)
        for i in range(3):
            worst = max(worst, abs(eval_invariant_form(i, g, v, basis) - (i == j)))
    return worst
