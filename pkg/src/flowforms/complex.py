"""Distinguished subspaces and cohomology groups of a flow on a form model.

Everything is computed inside the finite model span Λ = Λ*(generators).  For
each degree k the ambient space is Λ^k with its monomial basis, subspaces are
stored as canonical (row-reduced) bases of coordinate vectors, and quotients
carry deterministic representatives.
"""

from __future__ import annotations

import random
import threading
from dataclasses import dataclass, field as dc_field
from typing import Callable, Sequence

from .exterior import (
    DegreeError,
    FormElement,
    GeneratorCalculus,
    ModelError,
    _operator_matrix,
    basis,
    dimension,
)
from .field import CoefficientField
from .linalg import LinearMap, Vector, columns_to_rows, in_span, intersect, row_basis, solve


class ModelInconsistencyError(ModelError):
    """A quotient map or containment that must hold in a valid model fails."""


@dataclass(frozen=True, eq=False)
class FormModel:
    """Finite presentation of a flow: generators plus Cartan data.

    ``betti`` is optional external topology b_0..b_n of the underlying
    manifold, used when the model span does not compute de Rham cohomology.
    ``imported_facts`` lists analytic statements the model takes on trust.
    """

    name: str
    generator_names: tuple[str, ...]
    calc: GeneratorCalculus
    betti: tuple[int, ...] | None = None
    computes_de_rham: bool = False
    genus: int | None = None
    display_names: tuple[str, ...] | None = None
    imported_facts: tuple[str, ...] = ()
    extras: dict = dc_field(default_factory=dict, repr=False)
    _cache: dict = dc_field(default_factory=dict, repr=False)
    _lock: threading.RLock = dc_field(default_factory=threading.RLock, repr=False)

    def __post_init__(self):
        if len(self.generator_names) != self.calc.n:
            raise ModelError("one name per generator required")
        if self.betti is not None and len(self.betti) != self.n + 1:
            raise ModelError(f"betti data must have length n+1 = {self.n + 1}, got {len(self.betti)}")
        self.calc.validate(self.generator_names)

    @property
    def n(self) -> int:
        return self.calc.n

    @property
    def field(self) -> CoefficientField:
        return self.calc.field

    @property
    def names(self) -> tuple[str, ...]:
        return self.display_names or self.generator_names

    def basis(self, k: int):
        return basis(self.n, k)

    def dim(self, k: int) -> int:
        return dimension(self.n, k)

    def element(self, k: int, vec: Sequence) -> FormElement:
        return FormElement.from_vector(self.field, self.n, k, vec)

    def vector(self, form: FormElement, k: int) -> Vector:
        return form.to_vector(self.n, k)

    def generator(self, name: str) -> FormElement:
        names = list(self.generator_names)
        if name not in names and self.display_names and name in self.display_names:
            return FormElement.generator(self.field, list(self.display_names).index(name))
        return FormElement.generator(self.field, names.index(name))

    def matrix(self, kind: str, k: int) -> LinearMap:
        """Cached operator matrix; degrees outside 0..n give empty matrices."""
        key = (kind, k)
        with self._lock:
            m = self._cache.get(key)
            if m is None:
                m = self._cache[key] = _operator_matrix(self.calc, kind, k)
        return m

    def cached(self, key, build: Callable):
        with self._lock:
            if key not in self._cache:
                self._cache[key] = build()
            return self._cache[key]

    def format(self, form: FormElement) -> str:
        return form.format(self.names)


def _check_degree(m: FormModel, k: int) -> None:
    if not 0 <= k <= m.n:
        raise DegreeError(f"degree {k} outside 0..{m.n} for model {m.name!r}")


@dataclass(frozen=True)
class Subspace:
    """Subspace of Λ^k given by a canonical basis of coordinate vectors."""

    field: CoefficientField
    n: int
    degree: int
    basis: tuple

    @classmethod
    def span(cls, field: CoefficientField, n: int, k: int, vectors) -> "Subspace":
        return cls(field, n, k, tuple(row_basis(list(vectors), dimension(n, k), field)))

    @classmethod
    def whole(cls, field: CoefficientField, n: int, k: int) -> "Subspace":
        d = dimension(n, k)
        return cls.span(field, n, k, [tuple(field.one if i == j else field.zero for i in range(d))
                                      for j in range(d)])

    @classmethod
    def zero(cls, field: CoefficientField, n: int, k: int) -> "Subspace":
        return cls(field, n, k, ())

    @property
    def ambient_dim(self) -> int:
        return dimension(self.n, self.degree)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, v: Sequence) -> bool:
        return in_span(self.basis, v, self.field)

    def contains_subspace(self, other: "Subspace") -> bool:
        return all(self.contains(v) for v in other.basis)

    def __le__(self, other: "Subspace") -> bool:
        return other.contains_subspace(self)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return (self.degree == other.degree and self.dim == other.dim
                and self.contains_subspace(other))

    def __hash__(self) -> int:
        return hash((self.degree, self.basis))

    def intersect(self, other: "Subspace") -> "Subspace":
        return Subspace(self.field, self.n, self.degree,
                        tuple(intersect(self.basis, other.basis, self.ambient_dim, self.field)))

    def __add__(self, other: "Subspace") -> "Subspace":
        return Subspace.span(self.field, self.n, self.degree, list(self.basis) + list(other.basis))

    def image(self, op: LinearMap, target_degree: int) -> "Subspace":
        return Subspace.span(self.field, self.n, target_degree, [op.apply(b) for b in self.basis])

    def elements(self) -> list[FormElement]:
        return [FormElement.from_vector(self.field, self.n, self.degree, b) for b in self.basis]


class SubquotientSpace:
    """numerator / denominator inside a common Λ^k.

    Representatives of a quotient basis are the numerator basis vectors that
    extend the denominator basis, chosen greedily in canonical order.
    """

    def __init__(self, numerator: Subspace, denominator: Subspace, label: str = ""):
        if numerator.degree != denominator.degree:
            raise ValueError("numerator and denominator live in different degrees")
        if not numerator.contains_subspace(denominator):
            raise ModelInconsistencyError(f"{label or 'subquotient'}: denominator not contained in numerator")
        self.numerator = numerator
        self.denominator = denominator
        self.label = label
        K = numerator.field
        chosen = list(denominator.basis)
        reps = []
        for v in numerator.basis:
            if len(reps) + denominator.dim == numerator.dim:
                break
            if not in_span(chosen, v, K):
                chosen.append(v)
                reps.append(v)
        self.representatives: tuple = tuple(reps)
        self._frame = columns_to_rows(list(denominator.basis) + reps, numerator.ambient_dim)

    @property
    def field(self) -> CoefficientField:
        return self.numerator.field

    @property
    def degree(self) -> int:
        return self.numerator.degree

    @property
    def dimension(self) -> int:
        return self.numerator.dim - self.denominator.dim

    dim = dimension

    def __repr__(self) -> str:
        return f"SubquotientSpace({self.label!r}, dim={self.dimension})"

    def coordinates(self, v: Sequence) -> Vector:
        """Quotient coordinates of a numerator vector (error if not in numerator)."""
        ncols = self.denominator.dim + len(self.representatives)
        if ncols == 0:
            if any(v):
                raise ModelInconsistencyError(f"{self.label}: vector outside the numerator")
            return ()
        x = solve(self._frame, ncols, v, self.field)
        if x is None:
            raise ModelInconsistencyError(f"{self.label}: vector outside the numerator")
        return tuple(x[self.denominator.dim:])

    def is_zero_class(self, v: Sequence) -> bool:
        return self.denominator.contains(v)

    def representative_elements(self) -> list[FormElement]:
        N = self.numerator
        return [FormElement.from_vector(N.field, N.n, N.degree, r) for r in self.representatives]


def induced_map(source: SubquotientSpace, target: SubquotientSpace,
                lift: Callable[[Vector, random.Random | None], Vector],
                label: str = "", checks: int = 2, seed: int = 0) -> LinearMap:
    """Matrix, in quotient coordinates, of the map induced by ``lift``.

    ``lift(v, rng)`` sends an ambient vector of the source numerator to an
    ambient vector of the target numerator; when ``rng`` is given it may make
    any admissible random choice (e.g. of a preimage).  Well-definedness is
    verified: denominators go to zero classes, and ``checks`` random
    alternative representatives and choices give identical coordinates.
    """
    K = source.field
    rng = random.Random(seed)
    cols = []
    for q in source.representatives:
        c = target.coordinates(lift(q, None))
        for _ in range(checks):
            alt = list(q)
            for dvec in source.denominator.basis:
                r = K.convert(rng.randint(-3, 3))
                alt = [a + r * b for a, b in zip(alt, dvec)]
            if target.coordinates(lift(tuple(alt), rng)) != c:
                raise ModelInconsistencyError(f"{label}: value depends on the representative")
        cols.append(c)
    for dvec in source.denominator.basis:
        if not target.is_zero_class(lift(dvec, None)):
            raise ModelInconsistencyError(f"{label}: denominator not sent to zero")
    return LinearMap.from_columns(K, cols, target.dimension, source.label, target.label)


# ---------------------------------------------------------------------------
# distinguished subspaces


def _kernel_space(m: FormModel, k: int, kinds: Sequence[str]) -> Subspace:
    d = m.dim(k)
    rows = [r for kind in kinds for r in m.matrix(kind, k).rows]
    if d == 0:
        return Subspace.zero(m.field, m.n, k)
    from .linalg import nullspace

    return Subspace.span(m.field, m.n, k, nullspace(rows, d, m.field))


def _lambda_X(m: FormModel, k: int) -> Subspace:
    return m.cached(("lambda_X", k), lambda: _kernel_space(m, k, ["contract"]))


def _invariant(m: FormModel, k: int) -> Subspace:
    return m.cached(("inv", k), lambda: _kernel_space(m, k, ["lie"]))


def _basic(m: FormModel, k: int) -> Subspace:
    return m.cached(("basic", k), lambda: _kernel_space(m, k, ["lie", "contract"]))


def _closed(m: FormModel, k: int) -> Subspace:
    return m.cached(("closed", k), lambda: _kernel_space(m, k, ["d"]))


def subspace_lambda_X(m: FormModel, k: int) -> Subspace:
    """Λ^k_X: forms annihilated by contraction with X."""
    _check_degree(m, k)
    return _lambda_X(m, k)


def subspace_invariant(m: FormModel, k: int) -> Subspace:
    _check_degree(m, k)
    return _invariant(m, k)


def subspace_basic(m: FormModel, k: int) -> Subspace:
    """Λ^k(M/X): invariant forms that are also annihilated by X."""
    _check_degree(m, k)
    return _basic(m, k)


def _image_of(m: FormModel, kind: str, k: int, source: Subspace) -> Subspace:
    op = m.matrix(kind, k)
    shift = {"d": 1, "contract": -1, "lie": 0}[kind]
    return Subspace.span(m.field, m.n, k + shift, [op.apply(b) for b in source.basis])


def _whole(m: FormModel, k: int) -> Subspace:
    return m.cached(("whole", k), lambda: Subspace.whole(m.field, m.n, k))


def _cokernel_C(m: FormModel, k: int) -> SubquotientSpace:
    def build():
        im_i = _image_of(m, "contract", k + 1, _whole(m, k + 1))
        numer = im_i.intersect(_lambda_X(m, k)) if im_i.dim else im_i
        denom = _image_of(m, "lie", k, _lambda_X(m, k))
        if not numer.contains_subspace(denom):
            raise ModelInconsistencyError(
                f"{m.name}: lie(Λ^{k}_X) is not contained in Im(i_X) in degree {k}")
        return SubquotientSpace(numer, denom, f"C^{k}_X")
    return m.cached(("C", k), build)


def cokernel_C(m: FormModel, k: int) -> SubquotientSpace:
    """C^k_X = Im(i_X) / lie(Λ^k_X)."""
    _check_degree(m, k)
    return _cokernel_C(m, k)


def _relative_H_X(m: FormModel, k: int) -> SubquotientSpace:
    def build():
        denom = _image_of(m, "d", k - 1, _lambda_X(m, k - 1))
        return SubquotientSpace(_closed(m, k), denom, f"H^{k}_X")
    return m.cached(("H_X", k), build)


def relative_H_X(m: FormModel, k: int) -> SubquotientSpace:
    """H^k_X = closed k-forms / d(Λ^{k-1}_X)."""
    _check_degree(m, k)
    return _relative_H_X(m, k)


def _sub_cohomology(m: FormModel, k: int, which: str) -> SubquotientSpace:
    space = {"basic": _basic, "inv": _invariant, "all": _whole}[which]
    label = {"basic": f"H^{k}(M/X)", "inv": f"H^{k}_inv", "all": f"H^{k}(M)"}[which]

    def build():
        cycles = space(m, k).intersect(_closed(m, k))
        bounds = _image_of(m, "d", k - 1, space(m, k - 1))
        if not cycles.contains_subspace(bounds):
            raise ModelInconsistencyError(f"{m.name}: subcomplex {which} is not d-closed in degree {k}")
        return SubquotientSpace(cycles, bounds, label)
    return m.cached(("H", which, k), build)


def _basic_cycles(m: FormModel, k: int) -> Subspace:
    return m.cached(("Zbasic", k), lambda: _basic(m, k).intersect(_closed(m, k)))


def basic_cohomology(m: FormModel, k: int) -> SubquotientSpace:
    _check_degree(m, k)
    return _sub_cohomology(m, k, "basic")


def invariant_cohomology(m: FormModel, k: int) -> SubquotientSpace:
    _check_degree(m, k)
    return _sub_cohomology(m, k, "inv")


def de_rham_cohomology(m: FormModel, k: int) -> SubquotientSpace:
    """Cohomology of the whole model span (model-internal)."""
    _check_degree(m, k)
    return _sub_cohomology(m, k, "all")


def contraction_homology(m: FormModel, k: int) -> SubquotientSpace:
    """Ker(i_X) / Im(i_X) in degree k."""
    _check_degree(m, k)
    return SubquotientSpace(_lambda_X(m, k), _image_of(m, "contract", k + 1, _whole(m, k + 1)),
                            f"Ker(i_X)/Im(i_X) in degree {k}")


# ---------------------------------------------------------------------------
# lifting helpers shared with the exact sequences


def contract_preimage(m: FormModel, k: int, v: Vector, rng: random.Random | None = None) -> Vector:
    """Some u in Λ^{k+1} with i_X(u) = v; ``rng`` adds a random kernel element."""
    op = m.matrix("contract", k + 1)
    u = op.solve(v)
    if u is None:
        raise ModelInconsistencyError(f"{m.name}: vector not in Im(i_X) in degree {k}")
    if rng is not None:
        K = m.field
        for z in _lambda_X(m, k + 1).basis:
            r = K.convert(rng.randint(-3, 3))
            u = tuple(a + r * b for a, b in zip(u, z))
    return u


def lie_preimage_in_lambda_X(m: FormModel, k: int, y: Vector) -> Vector:
    """Some z in Λ^k_X with lie(z) = y."""
    LX = _lambda_X(m, k)
    if not LX.basis:
        if any(y):
            raise ModelInconsistencyError(f"{m.name}: no preimage under lie on Λ^{k}_X")
        return tuple(m.field.zero for _ in range(m.dim(k)))
    restricted = m.matrix("lie", k).restrict(LX.basis)
    c = restricted.solve(y)
    if c is None:
        raise ModelInconsistencyError(f"{m.name}: no preimage under lie on Λ^{k}_X")
    out = [m.field.zero] * m.dim(k)
    for coeff, b in zip(c, LX.basis):
        out = [a + coeff * x for a, x in zip(out, b)]
    return tuple(out)


# ---------------------------------------------------------------------------
# cokernel complex


@dataclass
class CokernelComplex:
    """Spaces C^0..C^{n-1}, differentials in quotient coordinates, cohomology."""

    model: str
    spaces: list
    differentials: list
    squares_vanish: bool
    cohomology: list
    well_defined: bool = True

    @property
    def dims(self) -> list[int]:
        return [c.dimension for c in self.spaces]

    @property
    def cohomology_dims(self) -> list[int]:
        return [h.dimension for h in self.cohomology]


def d_C_map(m: FormModel, k: int) -> LinearMap:
    """d_C: C^k -> C^{k+1}, v ↦ i_X d (i_X^{-1} v)."""
    def build():
        src, tgt = _cokernel_C(m, k), _cokernel_C(m, k + 1)

        def lift(v, rng):
            u = contract_preimage(m, k, v, rng)
            return m.matrix("contract", k + 2).apply(m.matrix("d", k + 1).apply(u))
        return induced_map(src, tgt, lift, f"d_C^{k}")
    return m.cached(("d_C", k), build)


def _ambient_of(space: SubquotientSpace, coords_basis: Sequence[Vector]) -> list[Vector]:
    K = space.field
    out = []
    for c in coords_basis:
        v = [K.zero] * space.numerator.ambient_dim
        for coeff, r in zip(c, space.representatives):
            v = [a + coeff * b for a, b in zip(v, r)]
        out.append(tuple(v))
    return out


def cokernel_cohomology(m: FormModel, k: int) -> SubquotientSpace:
    """H^k_C as a subquotient of Λ^k (cocycles of C^k mod coboundaries)."""
    def build():
        space = _cokernel_C(m, k)
        if k < 0 or k > m.n - 1:
            z = Subspace.zero(m.field, m.n, k)
            return SubquotientSpace(z, z, f"H^{k}_C")
        out_map = d_C_map(m, k)
        cocycles = _ambient_of(space, out_map.kernel()) if space.dimension else []
        if k >= 1:
            in_map = d_C_map(m, k - 1)
            cobounds = _ambient_of(space, in_map.image())
        else:
            cobounds = []
        num = Subspace.span(m.field, m.n, k, cocycles + list(space.denominator.basis))
        den = Subspace.span(m.field, m.n, k, cobounds + list(space.denominator.basis))
        return SubquotientSpace(num, den, f"H^{k}_C")
    return m.cached(("H_C", k), build)


def cokernel_complex(m: FormModel) -> CokernelComplex:
    """The complex (C, d_C) with d_C = i_X d i_X^{-1}, its square, and cohomology."""
    n = m.n
    spaces = [_cokernel_C(m, k) for k in range(n)]
    diffs = [d_C_map(m, k) for k in range(n - 1)]
    squares = all((diffs[k + 1] @ diffs[k]).is_zero() for k in range(len(diffs) - 1))
    coh = [cokernel_cohomology(m, k) for k in range(n)]
    return CokernelComplex(m.name, spaces, diffs, squares, coh)


@dataclass
class TopDegreeReport:
    model: str
    top_relative_dim: int
    cokernel_dim: int

    @property
    def passed(self) -> bool:
        return self.top_relative_dim == self.cokernel_dim


def top_degree_check(m: FormModel) -> TopDegreeReport:
    """Compare dim H^n_X with dim C^{n-1}_X."""
    return TopDegreeReport(m.name, relative_H_X(m, m.n).dimension, cokernel_C(m, m.n - 1).dimension)


def cohomology_table(m: FormModel) -> dict[str, list[int]]:
    """Dimensions of all model-internal groups, degree 0..n."""
    r = range(m.n + 1)
    return {
        "lambda_X": [subspace_lambda_X(m, k).dim for k in r],
        "invariant_forms": [subspace_invariant(m, k).dim for k in r],
        "basic_forms": [subspace_basic(m, k).dim for k in r],
        "H_basic": [basic_cohomology(m, k).dimension for k in r],
        "H_inv": [invariant_cohomology(m, k).dimension for k in r],
        "H_de_rham_model": [de_rham_cohomology(m, k).dimension for k in r],
        "H_X": [relative_H_X(m, k).dimension for k in r],
        "C_X": [cokernel_C(m, k).dimension for k in r],
        "ker_i_mod_im_i": [contraction_homology(m, k).dimension for k in r],
    }
