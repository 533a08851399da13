"""Points, interval domains, metrics and sequence diagnostics on the real line."""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .errors import ArgumentError, DomainError, ParseError
from .report import CheckReport, Verdict

# Open endpoints are enforced with this margin: x in (a, b] means a + EPS_DOM <= x <= b.
EPS_DOM = 1e-12
DEFAULT_WINDOW = 8
DEFAULT_TOL = 1e-9


def as_point(x) -> float:
    """Coerce to a finite float, rejecting NaN and infinities."""
    value = float(x)
    if not math.isfinite(value):
        raise DomainError(f"point must be finite, got {x!r}", point=x)
    return value


def as_rational(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"not a rational number: {value!r}") from exc
    if isinstance(value, float) and not math.isfinite(value):
        raise DomainError(f"endpoint must be finite, got {value!r}", point=value)
    return Fraction(value)


def format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self):
        object.__setattr__(self, "lo", as_rational(self.lo))
        object.__setattr__(self, "hi", as_rational(self.hi))
        if self.lo > self.hi or (self.lo == self.hi and not (self.lo_closed and self.hi_closed)):
            raise ArgumentError(f"empty or inverted interval {self}")

    _PATTERN = re.compile(r"^\s*([\(\[])\s*([^,\s]+)\s*,\s*([^\)\]\s]+)\s*([\)\]])\s*$")

    @classmethod
    def parse(cls, text: str) -> Interval:
        m = cls._PATTERN.match(text)
        if not m:
            raise ParseError(f"malformed interval {text!r}")
        left, lo, hi, right = m.groups()
        return cls(as_rational(lo), as_rational(hi), left == "[", right == "]")

    @classmethod
    def point(cls, value) -> Interval:
        return cls(value, value, True, True)

    @property
    def degenerate(self) -> bool:
        return self.lo == self.hi

    @property
    def midpoint(self) -> float:
        return float((self.lo + self.hi) / 2)

    @property
    def length(self) -> float:
        return float(self.hi - self.lo)

    def effective_bounds(self, eps: float = EPS_DOM) -> tuple[float, float]:
        """Float bounds actually admitted, with open ends pulled in by ``eps``."""
        lo = float(self.lo) if self.lo_closed else float(self.lo) + eps
        hi = float(self.hi) if self.hi_closed else float(self.hi) - eps
        return lo, hi

    def contains(self, x: float, eps: float = EPS_DOM) -> bool:
        lo, hi = self.effective_bounds(eps)
        return lo <= x <= hi

    def holds(self, x: float) -> bool:
        """Membership with no margin; a float equal to a rounded endpoint stands for that endpoint."""
        lo, hi = float(self.lo), float(self.hi)
        if lo < x < hi:
            return True
        return (x == lo and self.lo_closed) or (x == hi and self.hi_closed)

    def __contains__(self, x) -> bool:
        return self.contains(float(x))

    def intersects(self, other: Interval) -> bool:
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        if lo < hi:
            return True
        if lo > hi:
            return False
        return self.contains_exact(lo) and other.contains_exact(lo)

    def contains_exact(self, q: Fraction) -> bool:
        above = q > self.lo or (q == self.lo and self.lo_closed)
        below = q < self.hi or (q == self.hi and self.hi_closed)
        return above and below

    def sample(self, n: int, eps: float = EPS_DOM) -> list[float]:
        """``n`` evenly spaced points admitted by the interval (endpoints included where allowed)."""
        lo, hi = self.effective_bounds(eps)
        if self.degenerate or n <= 1:
            return [lo if self.degenerate else (lo + hi) / 2]
        step = (hi - lo) / (n - 1)
        pts = [lo + i * step for i in range(n - 1)]
        pts.append(hi)
        return pts

    def __str__(self) -> str:
        return (
            ("[" if self.lo_closed else "(")
            + format_rational(self.lo)
            + ","
            + format_rational(self.hi)
            + ("]" if self.hi_closed else ")")
        )


def _key(iv: Interval):
    return (iv.lo, not iv.lo_closed, iv.hi, iv.hi_closed)


def _adjacent(left: Interval, right: Interval) -> bool:
    return left.hi == right.lo and (left.hi_closed != right.lo_closed)


@dataclass(frozen=True)
class Domain:
    """Finite union of disjoint intervals, stored sorted and merged."""

    components: tuple[Interval, ...]

    def __post_init__(self):
        comps = sorted(self.components, key=_key)
        if not comps:
            raise ArgumentError("domain needs at least one interval")
        for a, b in zip(comps, comps[1:]):
            if a.intersects(b):
                raise ArgumentError(f"domain components {a} and {b} overlap")
        merged = [comps[0]]
        for iv in comps[1:]:
            last = merged[-1]
            if _adjacent(last, iv):
                merged[-1] = Interval(last.lo, iv.hi, last.lo_closed, iv.hi_closed)
            else:
                merged.append(iv)
        object.__setattr__(self, "components", tuple(merged))

    @classmethod
    def of(cls, value) -> Domain:
        if isinstance(value, Domain):
            return value
        if isinstance(value, Interval):
            return cls((value,))
        if isinstance(value, str):
            return cls.parse(value)
        return cls(tuple(Interval.parse(v) if isinstance(v, str) else v for v in value))

    @classmethod
    def parse(cls, text: str) -> Domain:
        parts = [p for p in re.split(r"\s+[uU]\s+|∪", text.strip()) if p.strip()]
        return cls(tuple(Interval.parse(p) for p in parts))

    @property
    def lo(self) -> Fraction:
        return self.components[0].lo

    @property
    def hi(self) -> Fraction:
        return self.components[-1].hi

    def contains(self, x: float, eps: float = EPS_DOM) -> bool:
        return any(iv.contains(x, eps) for iv in self.components)

    def __contains__(self, x) -> bool:
        return self.contains(float(x))

    def boundary_points(self) -> list[Fraction]:
        pts = []
        for iv in self.components:
            pts.extend([iv.lo, iv.hi])
        return sorted(set(pts))

    def grid(self, n: int, extra: Iterable = (), eps: float = EPS_DOM) -> list[float]:
        """Uniform points spread over the components plus boundary-adjacent probes.

        Probes are placed at each boundary (and each point in ``extra``) offset by
        ``±eps`` and ``±1e-3``, keeping only those inside the domain.
        """
        total = sum(iv.length for iv in self.components) or 1.0
        pts: set[float] = set()
        for iv in self.components:
            share = max(1, round(n * iv.length / total)) if not iv.degenerate else 1
            pts.update(iv.sample(share, eps))
        for b in itertools.chain(self.boundary_points(), extra):
            b = float(b)
            for off in (0.0, eps, -eps, 1e-3, -1e-3):
                cand = b + off
                if self.contains(cand, eps):
                    pts.add(cand)
        return sorted(pts)

    def __str__(self) -> str:
        return " u ".join(str(iv) for iv in self.components)


def usual_metric(x: float, y: float) -> float:
    return abs(x - y)


@dataclass(frozen=True)
class MetricSpace:
    domain: Domain
    dist: Callable[[float, float], float] = usual_metric

    def __post_init__(self):
        object.__setattr__(self, "domain", Domain.of(self.domain))

    def check_point(self, x) -> float:
        x = as_point(x)
        if not self.domain.contains(x):
            raise DomainError(f"{x!r} is outside the domain {self.domain}", point=x)
        return x

    def d(self, x, y) -> float:
        return dist(self, x, y)


def dist(space: MetricSpace, x, y) -> float:
    x, y = space.check_point(x), space.check_point(y)
    return space.dist(x, y)


def check_metric_axioms(space: MetricSpace, samples: Sequence[float], tol: float = 1e-12) -> CheckReport:
    """Identity, symmetry, non-negativity and triangle inequality on every sampled pair/triple.

    Triples are scanned as ``(x, y, z)`` testing ``d(x, z) <= d(x, y) + d(y, z)`` in index order,
    so the first reported witness is deterministic.
    """
    if not samples:
        raise ArgumentError("metric axiom check needs at least one sample")
    if tol <= 0:
        raise ArgumentError("tol must be positive")
    pts = [space.check_point(s) for s in samples]
    d = space.dist
    name = "metric_axioms"
    for x in pts:
        if abs(d(x, x)) > tol:
            return CheckReport(name, Verdict.FAIL, {"axiom": "identity", "x": x, "d": d(x, x)})
    for x, y in itertools.product(pts, repeat=2):
        dxy, dyx = d(x, y), d(y, x)
        if abs(dxy - dyx) > tol:
            return CheckReport(name, Verdict.FAIL, {"axiom": "symmetry", "x": x, "y": y, "d_xy": dxy, "d_yx": dyx})
        if dxy < -tol:
            return CheckReport(name, Verdict.FAIL, {"axiom": "nonnegativity", "x": x, "y": y, "d_xy": dxy})
        if x != y and dxy <= 0.0:
            return CheckReport(name, Verdict.FAIL, {"axiom": "separation", "x": x, "y": y, "d_xy": dxy})
    checked = 0
    for x, y, z in itertools.product(pts, repeat=3):
        checked += 1
        if d(x, z) > d(x, y) + d(y, z) + tol:
            return CheckReport(
                name,
                Verdict.FAIL,
                {"axiom": "triangle", "x": x, "y": y, "z": z, "d_xz": d(x, z), "d_xy": d(x, y), "d_yz": d(y, z)},
            )
    return CheckReport(name, Verdict.PASS, counts={"points": len(pts), "triples": checked})


@dataclass(frozen=True)
class SequenceTrace:
    terms: tuple[float, ...]
    meta: tuple[str, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(as_point(t) for t in self.terms))
        object.__setattr__(self, "meta", tuple(self.meta))
        if self.meta and len(self.meta) != len(self.terms):
            raise ArgumentError("meta must annotate every term")

    def __len__(self) -> int:
        return len(self.terms)

    def __getitem__(self, i):
        return self.terms[i]


def _as_terms(trace) -> Sequence[float]:
    return trace.terms if isinstance(trace, SequenceTrace) else tuple(trace)


def tail_diameter(trace, from_index: int = 0, dist: Callable[[float, float], float] | None = None) -> float:
    """Largest pairwise distance among terms with (0-based) index >= ``from_index``."""
    terms = _as_terms(trace)
    if not 0 <= from_index < len(terms):
        raise ArgumentError(f"from_index {from_index} out of range for {len(terms)} terms")
    tail = terms[from_index:]
    if dist is None:
        return max(tail) - min(tail)
    return max((dist(a, b) for a, b in itertools.combinations(tail, 2)), default=0.0)


def detect_limit(trace, tol: float = DEFAULT_TOL, window: int = DEFAULT_WINDOW) -> float | None:
    """Final term if the last ``window`` terms all sit within ``tol`` of it, else ``None``."""
    if tol <= 0 or window < 2:
        raise ArgumentError("need tol > 0 and window >= 2")
    terms = _as_terms(trace)
    if len(terms) < window:
        raise ArgumentError(f"trace of length {len(terms)} is shorter than window {window}")
    last = terms[-1]
    if all(abs(t - last) <= tol for t in terms[-window:]):
        return last
    return None


def richardson(values: Sequence[float]) -> list[float]:
    """First-order Richardson estimates ``2 v(2n) - v(n)`` for samples on a doubling schedule.

    Exact for sequences of the form ``a + b/n``.
    """
    return [2.0 * b - a for a, b in zip(values, values[1:])]
