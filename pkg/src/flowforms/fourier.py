"""Cohomological equation for a linear flow on the 2-torus.

A = ∂_x + α∂_y acts on e^{2πi(mx+ny)} with eigenvalue 2πi(m + αn), so
A f = g is solved frequency by frequency once the mean of g (the single
obstruction) is zero.  Small values of |m + αn| govern the amplification;
they are studied through the continued fraction of α.

Slopes are kept exact (rational, quadratic surd or a finite Liouville sum)
and evaluated with mpmath when double precision is not enough.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from pathlib import Path

import mpmath
import numpy as np
import sympy
from sympy.ntheory.continued_fraction import continued_fraction_periodic

TWO_PI = 2 * math.pi


class SlopeError(ValueError):
    """Slope specification could not be parsed."""


class ResonanceError(ArithmeticError):
    """m + αn vanishes exactly on a frequency of the support."""

    def __init__(self, frequency: tuple[int, int]):
        super().__init__(f"resonant frequency (m, n) = {frequency}: m + alpha*n = 0")
        self.frequency = frequency


class ObstructionError(ValueError):
    """The right-hand side has nonzero mean."""

    def __init__(self, value: complex):
        super().__init__(f"nonzero obstruction (mean of g) = {value}")
        self.value = value


_SURD = re.compile(
    r"^\(?\s*(?P<a>[+-]?\d+)?\s*(?P<sign>[+-])?\s*(?P<b>\d+)?\s*\*?\s*sqrt\(?(?P<d>\d+)\)?\s*\)?"
    r"\s*(?:/\s*(?P<c>\d+))?$")


@dataclass(frozen=True)
class SlopeSpec:
    """An exact slope.  ``expr`` is a sympy number; ``text`` the user's input."""

    text: str
    kind: str  # rational | decimal | surd | liouville
    expr: sympy.Expr
    terms: int | None = None  # Liouville truncation length
    surd: tuple[int, int, int, int] | None = None  # (p, q, d, s): (p + s*sqrt(d))/q

    @classmethod
    def parse(cls, text: str) -> "SlopeSpec":
        t = text.strip().lower()
        if t in ("golden", "phi"):
            return cls(text, "surd", (1 + sympy.sqrt(5)) / 2, surd=(1, 2, 5, 1))
        if t.startswith("liouville"):
            _, _, k = t.partition(":")
            k = int(k) if k else 4
            if k < 1:
                raise SlopeError("Liouville truncation needs at least one term")
            value = sum(sympy.Rational(1, 10 ** math.factorial(j)) for j in range(1, k + 1))
            return cls(text, "liouville", value, k)
        if re.fullmatch(r"[+-]?\d+/\d+", t) or re.fullmatch(r"[+-]?\d+", t):
            try:
                return cls(text, "rational", sympy.Rational(t))
            except (ZeroDivisionError, ValueError) as exc:
                raise SlopeError(f"bad rational slope {text!r}") from exc
        if re.fullmatch(r"[+-]?(\d+\.\d*|\.\d+)(e[+-]?\d+)?", t):
            return cls(text, "decimal", sympy.Rational(t))
        m = _SURD.match(t.replace(" ", ""))
        if m and m.group("d"):
            a = int(m.group("a") or 0)
            b = int(m.group("b") or 1) * (-1 if m.group("sign") == "-" else 1)
            c = int(m.group("c") or 1)
            if c == 0:
                raise SlopeError("zero denominator in surd")
            d = int(m.group("d"))
            r = math.isqrt(d)
            if r * r == d:
                return cls(text, "rational", sympy.Rational(a + b * r, c))
            return cls(text, "surd", (a + b * sympy.sqrt(d)) / c, surd=(a, c, b * b * d, 1 if b > 0 else -1))
        raise SlopeError(f"cannot parse slope {text!r}; use p/q, a decimal, "
                         "(a+b*sqrt(d))/c, golden or liouville:K")

    @classmethod
    def from_float(cls, x: float) -> "SlopeSpec":
        return cls(repr(x), "decimal", sympy.Rational(x))

    @property
    def is_rational(self) -> bool:
        return bool(self.expr.is_rational)

    @property
    def fraction(self) -> Fraction | None:
        if not self.is_rational:
            return None
        r = sympy.Rational(self.expr)
        return Fraction(int(r.p), int(r.q))

    @property
    def precision(self) -> int:
        """Decimal digits needed to resolve the slope's structure."""
        if self.kind == "liouville":
            return math.factorial(self.terms) + 40
        return 50

    def mp(self, dps: int | None = None):
        with mpmath.workdps(dps or self.precision):
            return mpmath.mpf(sympy.N(self.expr, dps or self.precision))

    def __float__(self) -> float:
        return float(self.expr)

    def continued_fraction(self, depth: int) -> list[int]:
        """First ``depth`` partial quotients (fewer if the expansion ends)."""
        if self.surd is not None:
            head = continued_fraction_periodic(*self.surd)
            period = head.pop() if head and isinstance(head[-1], list) else []
            out = [int(a) for a in head]
            while len(out) < depth and period:
                out += [int(a) for a in period]
            return out[:depth]
        frac = self.fraction
        out = []
        num, den = frac.numerator, frac.denominator
        while den and len(out) < depth:
            a = num // den
            out.append(a)
            num, den = den, num - a * den
        return out


def as_slope(alpha) -> SlopeSpec:
    if isinstance(alpha, SlopeSpec):
        return alpha
    if isinstance(alpha, str):
        return SlopeSpec.parse(alpha)
    if isinstance(alpha, Fraction):
        return SlopeSpec(str(alpha), "rational", sympy.Rational(alpha.numerator, alpha.denominator))
    if isinstance(alpha, int):
        return SlopeSpec(str(alpha), "rational", sympy.Integer(alpha))
    if isinstance(alpha, float):
        return SlopeSpec.from_float(alpha)
    raise TypeError(f"unsupported slope {alpha!r}")


def convergents(cf: list[int]) -> list[tuple[int, int]]:
    p0, q0, p1, q1 = 1, 0, cf[0], 1
    out = [(p1, q1)]
    for a in cf[1:]:
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        out.append((p1, q1))
    return out


@dataclass
class DiophantineProfile:
    slope: str
    rational: bool
    coefficients: list[int]
    convergents: list[tuple[int, int]]
    quality: list[float]  # q^2 |α - p/q|
    measure_estimate: float
    finite_expansion: bool

    def as_dict(self) -> dict:
        return {"slope": self.slope, "rational": self.rational, "coefficients": self.coefficients,
                "convergents": [list(c) for c in self.convergents], "quality": self.quality,
                "measure_estimate": self.measure_estimate, "finite_expansion": self.finite_expansion}


def diophantine_profile(alpha, depth: int = 20) -> DiophantineProfile:
    """Continued fraction, convergents and approximation quality of α.

    The irrationality-measure estimate is 2 + max_k log a_{k+1} / log q_k
    over the later half of the convergents (the first few are dominated by
    small q).  It stays near 2 for bounded coefficients and blows up for
    Liouville-type slopes.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    s = as_slope(alpha)
    cf = s.continued_fraction(depth + 1)
    finite = len(cf) <= depth and s.is_rational
    convs = convergents(cf[:depth])
    with mpmath.workdps(s.precision):
        a = s.mp()
        quality = [float(q * q * abs(a - mpmath.mpf(p) / q)) for p, q in convs]
    measure = 2.0
    for k in range(len(convs) // 2, len(convs)):
        q = convs[k][1]
        if q > 1 and k + 1 < len(cf):
            measure = max(measure, 2 + math.log(cf[k + 1]) / math.log(q))
    return DiophantineProfile(s.text, s.is_rational, cf[:depth], convs, quality, measure, finite)


# ---------------------------------------------------------------------------
# series


@dataclass
class FourierSeries:
    """Finite trigonometric polynomial Σ c_{m,n} e^{2πi(mx+ny)}."""

    coeffs: dict[tuple[int, int], complex] = dc_field(default_factory=dict)
    real: bool = False

    def __post_init__(self):
        self.coeffs = {(int(m), int(n)): complex(c) for (m, n), c in self.coeffs.items()}

    @classmethod
    def constant(cls, c: complex) -> "FourierSeries":
        return cls({(0, 0): c}, real=isinstance(c, (int, float)))

    @classmethod
    def random_real(cls, N: int, rng: np.random.Generator, zero_mean: bool = True,
                    density: float = 1.0) -> "FourierSeries":
        """Random real-valued series with support in [-N, N]^2."""
        coeffs = {}
        for m in range(0, N + 1):
            for n in range(-N, N + 1):
                if (m, n) <= (0, 0) and m == 0:
                    continue  # keep one of each ± pair; (0,0) handled below
                if density < 1 and rng.random() > density:
                    continue
                c = complex(rng.normal(), rng.normal())
                coeffs[(m, n)] = c
                coeffs[(-m, -n)] = c.conjugate()
        if not zero_mean:
            coeffs[(0, 0)] = complex(rng.normal())
        return cls(coeffs, real=True)

    def support(self) -> list[tuple[int, int]]:
        return sorted(self.coeffs)

    def arrays(self):
        keys = self.support()
        m = np.array([k[0] for k in keys], dtype=float)
        n = np.array([k[1] for k in keys], dtype=float)
        c = np.array([self.coeffs[k] for k in keys], dtype=complex)
        return keys, m, n, c

    def is_conjugate_symmetric(self, tol: float = 0.0) -> bool:
        for (m, n), c in self.coeffs.items():
            other = self.coeffs.get((-m, -n), 0j)
            if abs(other - c.conjugate()) > tol:
                return False
        return True

    def evaluate(self, x: float, y: float) -> complex:
        return sum(c * np.exp(2j * np.pi * (m * x + n * y)) for (m, n), c in self.coeffs.items())

    def to_records(self) -> list[dict]:
        return [{"m": m, "n": n, "re": c.real, "im": c.imag} for (m, n), c in sorted(self.coeffs.items())]

    @classmethod
    def from_records(cls, records: list[dict], real: bool | None = None) -> "FourierSeries":
        coeffs = {}
        for r in records:
            key = (int(r["m"]), int(r["n"]))
            if key in coeffs:
                raise ValueError(f"duplicate frequency {key}")
            coeffs[key] = complex(float(r.get("re", 0.0)), float(r.get("im", 0.0)))
        s = cls(coeffs)
        s.real = s.is_conjugate_symmetric(1e-15) if real is None else real
        return s

    def dump(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_records(), indent=1) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "FourierSeries":
        data = json.loads(Path(path).read_text())
        if isinstance(data, dict):
            data = data.get("terms", data.get("coeffs"))
        if not isinstance(data, list):
            raise ValueError(f"{path}: expected a list of {{m, n, re, im}} records")
        return cls.from_records(data)


def obstruction(g: FourierSeries) -> complex:
    """Mean of g, the (0,0) coefficient; A f = g is solvable iff it vanishes."""
    return g.coeffs.get((0, 0), 0j)


@dataclass
class SolveDiagnostics:
    min_denominator: float | None
    extremal_frequency: tuple[int, int] | None
    max_amplification: float
    obstruction: complex
    mean_subtracted: bool
    residual: float

    def as_dict(self) -> dict:
        return {
            "min_denominator": self.min_denominator,
            "extremal_frequency": list(self.extremal_frequency) if self.extremal_frequency else None,
            "max_amplification": self.max_amplification,
            "obstruction": [self.obstruction.real, self.obstruction.imag],
            "mean_subtracted": self.mean_subtracted,
            "residual": self.residual,
        }


def _denominators(s: SlopeSpec, keys) -> np.ndarray:
    """|m + αn| per frequency; exact zero check for rational slopes."""
    frac = s.fraction
    if frac is not None:
        for m, n in keys:
            if m + frac * n == 0:
                raise ResonanceError((m, n))
    a = float(s)
    out = np.array([m + a * n for m, n in keys], dtype=float)
    tiny = np.abs(out) < 1e-9
    if tiny.any():
        # double precision may not resolve these; recompute them carefully
        with mpmath.workdps(s.precision):
            am = s.mp()
            for i in np.flatnonzero(tiny):
                m, n = keys[i]
                out[i] = float(m + am * n)
                if out[i] == 0.0:
                    raise ResonanceError((m, n))
    return out


def solve_cohomological(alpha, g: FourierSeries,
                        subtract_mean: bool = False) -> tuple[FourierSeries, SolveDiagnostics]:
    """f with (∂_x + α∂_y) f = g - mean, f_{m,n} = g_{m,n} / (2πi(m + αn))."""
    s = as_slope(alpha)
    ob = obstruction(g)
    if ob != 0 and not subtract_mean:
        raise ObstructionError(ob)
    target = {k: c for k, c in g.coeffs.items() if k != (0, 0)}
    keys = sorted(target)
    if not keys:
        f = FourierSeries({}, real=g.real)
        return f, SolveDiagnostics(None, None, 0.0, ob, ob != 0, 0.0)
    den = _denominators(s, keys)
    c = np.array([target[k] for k in keys], dtype=complex)
    fc = c / (2j * np.pi * den)
    f = FourierSeries(dict(zip(keys, fc)), real=g.real)
    nz = np.abs(c) > 0
    if nz.any():
        absden = np.where(nz, np.abs(den), np.inf)
        i = int(np.argmin(absden))
        mind, ext = float(absden[i]), keys[i]
        amp = 1.0 / (TWO_PI * mind)
    else:
        mind, ext, amp = None, None, 0.0
    res = residual(s, f, FourierSeries(target))
    return f, SolveDiagnostics(mind, ext, amp, ob, ob != 0, res)


def residual(alpha, f: FourierSeries, g: FourierSeries) -> float:
    """max over the joint support of |2πi(m + αn) f_{m,n} - g_{m,n}|."""
    s = as_slope(alpha)
    keys = sorted(set(f.coeffs) | set(g.coeffs))
    if not keys:
        return 0.0
    a = float(s)
    worst = 0.0
    for m, n in keys:
        lhs = 2j * np.pi * (m + a * n) * f.coeffs.get((m, n), 0j)
        worst = max(worst, abs(lhs - g.coeffs.get((m, n), 0j)))
    return float(worst)


# ---------------------------------------------------------------------------
# small denominators over a box


@dataclass
class MinDenominator:
    N: int
    value: float
    frequency: tuple[int, int]

    def as_dict(self) -> dict:
        return {"N": self.N, "value": self.value, "frequency": list(self.frequency)}


def min_denominator(alpha, N: int, depth: int = 200) -> MinDenominator:
    """min |m + αn| over 0 < max(|m|, |n|) <= N.

    The minimum sits at a convergent p/q of α (best approximation), taken
    with m = -p, n = q; only convergents with q, |p| <= N qualify.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    s = as_slope(alpha)
    best_val, best = None, None
    with mpmath.workdps(s.precision):
        a = s.mp()
        # frequencies with n = 0 give |m| >= 1
        best_val, best = mpmath.mpf(1), (1, 0)
        cf = s.continued_fraction(depth)
        for p, q in convergents(cf):
            if q > N:
                break
            if abs(p) > N:
                continue
            v = abs(q * a - p)
            if v == 0:
                raise ResonanceError((-p, q))
            if v < best_val:
                best_val, best = v, (-p, q)
        return MinDenominator(N, float(best_val), best)


def min_denominator_bruteforce(alpha: float, N: int) -> MinDenominator:
    """Direct scan of the box; an oracle for small N."""
    n = np.arange(-N, N + 1)
    vals = np.abs(np.arange(-N, N + 1)[:, None] + alpha * n[None, :])
    vals[N, N] = np.inf
    i, j = np.unravel_index(np.argmin(vals), vals.shape)
    return MinDenominator(N, float(vals[i, j]), (int(i - N), int(j - N)))


@dataclass
class DenominatorLaw:
    """Fit of |m + αn| >= c / scale over the box's best approximations."""

    slope: str
    N: int
    c_by_n: float  # scale |n|
    c_by_max: float  # scale max(|m|, |n|)
    points: list[tuple[int, int, float]]

    def as_dict(self) -> dict:
        return {"slope": self.slope, "N": self.N, "c_by_n": self.c_by_n,
                "c_by_max": self.c_by_max, "points": [list(p) for p in self.points]}


def denominator_law(alpha, N: int, depth: int = 200) -> DenominatorLaw:
    """Smallest c with |m + αn| >= c/|n| (and c/max(|m|,|n|)) on the box.

    For bounded-type slopes c stays bounded away from 0 (1/√5 for the golden
    ratio); for Liouville-type slopes it collapses.
    """
    s = as_slope(alpha)
    pts = []
    with mpmath.workdps(s.precision):
        a = s.mp()
        for p, q in convergents(s.continued_fraction(depth)):
            if q > N:
                break
            if abs(p) > N or q == 0:
                continue
            v = abs(q * a - p)
            pts.append((-p, q, float(v)))
    tail = pts[len(pts) // 2:] or pts  # skip the first few, far from asymptotic
    c_n = min((abs(n) * v for m, n, v in tail), default=float("nan"))
    c_max = min((max(abs(m), abs(n)) * v for m, n, v in tail), default=float("nan"))
    return DenominatorLaw(s.text, N, c_n, c_max, pts)
