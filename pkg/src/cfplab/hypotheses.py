"""Sampled and sequence-based checks of the four mapping-pair hypotheses."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .dsl import PiecewiseFn, eval_fn
from .errors import ArgumentError, DomainError, ParseError
from .metric import MetricSpace, as_rational, richardson
from .report import CheckReport, Verdict, to_jsonable

LIMIT_TOL = 1e-6
N_CAP = 2**31  # keeps 1/n well above double-precision noise for unit-scale points
MIN_DOUBLINGS = 4


@dataclass(frozen=True)
class WitnessSequence:
    """``x_n = a + b/n`` for ``n >= n0``, declared to converge to ``limit``."""

    a: Fraction
    b: Fraction
    n0: int
    limit: Fraction | None = None
    name: str = "witness"

    def __post_init__(self):
        object.__setattr__(self, "a", as_rational(self.a))
        object.__setattr__(self, "b", as_rational(self.b))
        lim = self.a if self.limit is None else as_rational(self.limit)
        object.__setattr__(self, "limit", lim)
        if self.n0 < 1:
            raise ArgumentError("n0 must be a positive integer")
        if lim != self.a:
            raise ArgumentError(f"a + b/n tends to {self.a}, not the declared limit {lim}")

    def __call__(self, n: int) -> float:
        return float(self.a) + float(self.b) / n

    def schedule(self, doublings: int) -> list[int]:
        return [self.n0 * 2**k for k in range(doublings)]

    def describe(self) -> dict:
        return to_jsonable({"name": self.name, "a": self.a, "b": self.b, "n0": self.n0, "limit": self.limit})

    def __str__(self) -> str:
        sign = "-" if self.b < 0 else "+"
        return f"{self.a} {sign} {abs(self.b)}/n (n >= {self.n0})"


_QUANTITY = re.compile(r"^\s*d\(\s*([A-Za-z]*)\s*,\s*([A-Za-z]*)\s*\)\s*$|^\s*([A-Za-z]+)\s*$")


@dataclass(frozen=True)
class Quantity:
    """``d(P x, Q x)`` for two map words, or the value ``P x`` of a single word.

    Words are read like compositions: ``"SA"`` means ``S(A(x))``; the empty word is ``x``.
    """

    left: str
    right: str | None = None

    @classmethod
    def parse(cls, text: str) -> Quantity:
        m = _QUANTITY.match(text)
        if not m:
            raise ParseError(f"malformed quantity {text!r}; expected 'd(P,Q)' or a map word")
        if m.group(3) is not None:
            return cls(m.group(3))
        return cls(m.group(1), m.group(2))

    def __str__(self) -> str:
        return self.left if self.right is None else f"d({self.left}x,{self.right}x)"


def apply_word(space: MetricSpace, maps: Mapping[str, PiecewiseFn], word: str, x: float) -> float:
    for letter in reversed(word):
        if letter not in maps:
            raise ArgumentError(f"unknown map {letter!r} in word {word!r}")
        x = eval_fn(maps[letter], x)
        if not space.domain.contains(x):
            raise DomainError(f"composition {word} leaves the domain at {x}", point=x)
    return x


def evaluate_quantity(space: MetricSpace, maps, q: Quantity, x: float) -> float:
    p = apply_word(space, maps, q.left, x)
    if q.right is None:
        return p
    return space.dist(p, apply_word(space, maps, q.right, x))


@dataclass(frozen=True)
class LimitReport:
    quantity: str
    ns: tuple[int, ...]
    sampled_values: tuple[float, ...]
    extrapolated_limit: float
    converged: bool

    def to_dict(self) -> dict:
        return to_jsonable(
            {
                "quantity": self.quantity,
                "extrapolated_limit": self.extrapolated_limit,
                "converged": self.converged,
                "samples": len(self.ns),
                "last_n": self.ns[-1],
                "last_value": self.sampled_values[-1],
            }
        )


def limit_along_witness(
    space: MetricSpace,
    maps: Mapping[str, PiecewiseFn],
    quantity: Quantity | str,
    w: WitnessSequence,
    n_samples: int = MIN_DOUBLINGS,
    tol: float = LIMIT_TOL,
) -> LimitReport:
    """Evaluate a quantity at ``n = n0, 2 n0, 4 n0, ...`` and extrapolate with ``2 v(2n) - v(n)``.

    Doubling continues past ``n_samples`` until the last two raw values sit within
    ``tol`` of the extrapolated limit and the last two extrapolations agree, or ``n``
    reaches the cap. Exact for quantities of the form ``c + e/n``.
    """
    q = Quantity.parse(quantity) if isinstance(quantity, str) else quantity
    if n_samples < 3:
        raise ArgumentError("need at least three samples to extrapolate")
    ns: list[int] = []
    values: list[float] = []
    n = w.n0
    converged = False
    while n <= N_CAP:
        x = w(n)
        if not space.domain.contains(x):
            raise DomainError(f"witness term x_{n} = {x} is outside the domain", point=x)
        try:
            values.append(evaluate_quantity(space, maps, q, x))
        except DomainError as exc:
            raise DomainError(f"{q} undefined at n={n}: {exc}", point=x) from exc
        ns.append(n)
        if len(values) >= n_samples:
            est = richardson(values)
            lim = est[-1]
            converged = abs(est[-1] - est[-2]) <= tol and all(abs(v - lim) <= tol for v in values[-2:])
            if converged:
                break
        n *= 2
    lim = richardson(values)[-1]
    if q.right is not None:
        lim = max(lim, 0.0)  # extrapolation can undershoot a vanishing distance by an ulp
    return LimitReport(str(q), tuple(ns), tuple(values), lim, converged)


def _maps(A: PiecewiseFn, S: PiecewiseFn) -> dict[str, PiecewiseFn]:
    return {"A": A, "S": S}


def _premise(space, maps, w, tol) -> tuple[bool, dict]:
    la = limit_along_witness(space, maps, "A", w, tol=tol)
    ls = limit_along_witness(space, maps, "S", w, tol=tol)
    ok = la.converged and ls.converged and abs(la.extrapolated_limit - ls.extrapolated_limit) <= tol
    return ok, {"lim_Ax": la.extrapolated_limit, "lim_Sx": ls.extrapolated_limit}


def _vacuous(name, w, premise) -> CheckReport:
    return CheckReport(
        name,
        Verdict.VACUOUS,
        details={"witness": w.describe(), **premise},
        message="witness premise fails: lim Ax_n and lim Sx_n differ or do not settle",
    )


def check_weakly_commuting(
    space: MetricSpace, A: PiecewiseFn, S: PiecewiseFn, samples: Sequence[float], tol: float = 1e-9
) -> CheckReport:
    """``d(SAx, ASx) <= d(Ax, Sx) + tol`` at every sample."""
    if not samples:
        raise ArgumentError("need at least one sample")
    maps = _maps(A, S)
    for x in sorted(space.check_point(s) for s in samples):
        sa = apply_word(space, maps, "SA", x)
        as_ = apply_word(space, maps, "AS", x)
        lhs, rhs = space.dist(sa, as_), space.dist(eval_fn(A, x), eval_fn(S, x))
        if lhs > rhs + tol:
            return CheckReport("weakly_commuting", Verdict.FAIL, {"x": x, "d(SAx,ASx)": lhs, "d(Ax,Sx)": rhs})
    return CheckReport("weakly_commuting", Verdict.PASS, counts={"samples": len(samples)})


def check_compatible(
    space: MetricSpace, A: PiecewiseFn, S: PiecewiseFn, w: WitnessSequence, tol: float = LIMIT_TOL
) -> CheckReport:
    name = "compatible"
    maps = _maps(A, S)
    ok, premise = _premise(space, maps, w, tol)
    if not ok:
        return _vacuous(name, w, premise)
    lim = limit_along_witness(space, maps, "d(SA,AS)", w, tol=tol)
    details = {"witness": w.describe(), **premise, "limits": {lim.quantity: lim.to_dict()}}
    if lim.converged and lim.extrapolated_limit <= tol:
        return CheckReport(name, Verdict.PASS, details=details)
    return CheckReport(name, Verdict.FAIL, {"quantity": lim.quantity, "limit": lim.extrapolated_limit}, details=details)


def check_compatible_type_a(
    space: MetricSpace, A: PiecewiseFn, S: PiecewiseFn, w: WitnessSequence, tol: float = LIMIT_TOL
) -> CheckReport:
    """Both ``lim d(ASx_n, SSx_n)`` and ``lim d(SAx_n, AAx_n)`` must vanish.

    ``lim d(AAx_n, SAx_n)`` is computed as well and reported alongside.
    """
    name = "compatible_type_a"
    maps = _maps(A, S)
    ok, premise = _premise(space, maps, w, tol)
    if not ok:
        return _vacuous(name, w, premise)
    checked = [limit_along_witness(space, maps, q, w, tol=tol) for q in ("d(AS,SS)", "d(SA,AA)")]
    extra = limit_along_witness(space, maps, "d(AA,SA)", w, tol=tol)
    details = {
        "witness": w.describe(),
        **premise,
        "limits": {r.quantity: r.to_dict() for r in checked + [extra]},
    }
    for r in checked:
        if not (r.converged and r.extrapolated_limit <= tol):
            return CheckReport(name, Verdict.FAIL, {"quantity": r.quantity, "limit": r.extrapolated_limit}, details=details)
    return CheckReport(name, Verdict.PASS, details=details)


def check_reciprocal_continuity(
    space: MetricSpace, A: PiecewiseFn, S: PiecewiseFn, w: WitnessSequence, t, tol: float = LIMIT_TOL
) -> CheckReport:
    """Along ``w`` with ``Ax_n, Sx_n -> t``: ``ASx_n -> At`` and ``SAx_n -> St``."""
    name = "reciprocal_continuity"
    maps = _maps(A, S)
    t = space.check_point(t)
    ok, premise = _premise(space, maps, w, tol)
    if ok and abs(premise["lim_Ax"] - t) > tol:
        ok = False
    if not ok:
        return _vacuous(name, w, {**premise, "t": t})
    details = {"witness": w.describe(), **premise, "t": t, "limits": {}}
    for word, target_map in (("AS", A), ("SA", S)):
        r = limit_along_witness(space, maps, word, w, tol=tol)
        target = eval_fn(target_map, t)
        details["limits"][word] = {**r.to_dict(), "target": target}
        if not r.converged or abs(r.extrapolated_limit - target) > tol:
            return CheckReport(
                name,
                Verdict.FAIL,
                {"quantity": f"lim {word}x_n", "limit": r.extrapolated_limit, "target": target},
                details=details,
            )
    return CheckReport(name, Verdict.PASS, details=details)


def auto_witnesses(space: MetricSpace, A: PiecewiseFn, S: PiecewiseFn, max_n0: int = 1024) -> list[WitnessSequence]:
    """``t - 1/n`` and ``t + 1/n`` around every piece boundary ``t`` of ``A`` or ``S``.

    ``n0`` is the first power of two whose terms (and their doublings) stay in the domain.
    """
    points = sorted(set(A.breakpoints) | set(S.breakpoints))
    out = []
    for t in points:
        for b in (-1, 1):
            n0 = 2
            while n0 <= max_n0:
                terms = [float(t) + b / (n0 * 2**k) for k in range(12)]
                if all(space.domain.contains(x) for x in terms):
                    out.append(WitnessSequence(t, b, n0, name=f"{t}{'-' if b < 0 else '+'}1/n"))
                    break
                n0 *= 2
    return out

