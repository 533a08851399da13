"""Control functions: membership in the comparison class and decay of their iterates."""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction

from .dsl import PiecewiseFn, affine_coefficients, canonical_format, eval_fn, parse_piecewise, to_python_source
from .errors import ArgumentError, DomainError
from .metric import SequenceTrace
from .report import CheckReport, Verdict

T_MAX = 100
GEOMETRIC_BUDGET = 200


@dataclass(frozen=True)
class PhiSpec:
    body: PiecewiseFn
    validated: bool = False
    validation_grid: tuple[float, ...] = ()

    @classmethod
    def parse(cls, text: str, grid=None, tol: float = 1e-12) -> PhiSpec:
        """Parse and validate in one step; raises ``ArgumentError`` if validation fails."""
        body = parse_piecewise(text)
        grid = tuple(grid) if grid is not None else default_grid(body)
        report = validate_phi(body, grid, tol)
        if not report.passed:
            raise ArgumentError(f"{text!r} is not an admissible control function: {report.witness}")
        return cls(body, True, grid)

    def __call__(self, t: float) -> float:
        return eval_fn(self.body, t)

    def lower(self, t: float) -> float:
        """``phi(min(t, t_max))``: exact inside the domain, a lower bound beyond it (phi is monotone)."""
        return eval_fn(self.body, min(t, self.t_max))

    @property
    def t_max(self) -> float:
        return float(self.body.domain.hi)

    @property
    def slope(self):
        """``λ`` when the function is ``λ t`` on its whole domain, else ``None``."""
        if len(self.body.pieces) != 1:
            return None
        coeffs = affine_coefficients(self.body.pieces[0].body)
        if coeffs is None or coeffs[0] != 0:
            return None
        return coeffs[1]

    def __str__(self) -> str:
        return canonical_format(self.body)


def linear_phi(lam, t_max=T_MAX) -> PhiSpec:
    lam = Fraction(lam).limit_denominator(10**12) if isinstance(lam, float) else Fraction(lam)
    return PhiSpec.parse(f"piece [0,{t_max}]: {lam.numerator}/{lam.denominator}*x")


def default_grid(body: PiecewiseFn, n: int = 400) -> tuple[float, ...]:
    """Log-spaced plus uniform positive points across the function's domain."""
    hi = float(body.domain.hi)
    lo = max(float(body.domain.lo), 0.0)
    pts = {hi * 10.0 ** (-k / 20) for k in range(0, 201)}
    pts.update(lo + (hi - lo) * (i + 1) / n for i in range(n))
    return tuple(sorted(p for p in pts if p > 0 and body.domain.contains(p)))


def validate_phi(candidate: PiecewiseFn, grid, tol: float = 1e-12) -> CheckReport:
    """Monotone non-decreasing and ``0 <= phi(t) < t`` on every grid point.

    The strict inequality uses no margin, so functions like ``t/(1+t)`` whose gap
    vanishes near zero are accepted. Continuity is only sampled and reported.
    """
    grid = [float(t) for t in grid]
    if tol <= 0:
        raise ArgumentError("tol must be positive")
    if not grid or any(t <= 0 for t in grid) or any(b <= a for a, b in zip(grid, grid[1:])):
        raise ArgumentError("grid must be non-empty, strictly increasing and positive")
    for t in grid:
        if not candidate.domain.contains(t):
            raise DomainError(f"grid point {t} is outside the candidate's domain {candidate.domain}", point=t)
    name = "phi_class"
    values = [eval_fn(candidate, t) for t in grid]
    if candidate.domain.contains(0.0):
        at_zero = eval_fn(candidate, 0.0)
        if at_zero < 0:
            return CheckReport(name, Verdict.FAIL, {"condition": "nonnegative", "t": 0.0, "phi": at_zero})
    for t, v in zip(grid, values):
        if v < 0:
            return CheckReport(name, Verdict.FAIL, {"condition": "nonnegative", "t": t, "phi": v})
        if not v < t:
            return CheckReport(name, Verdict.FAIL, {"condition": "shrink", "t": t, "phi": v})
    # suffix minima make the all-pairs monotonicity test linear
    suffix_min = [math.inf] * (len(values) + 1)
    suffix_arg = [len(values)] * (len(values) + 1)
    for i in range(len(values) - 1, -1, -1):
        if values[i] <= suffix_min[i + 1]:
            suffix_min[i], suffix_arg[i] = values[i], i
        else:
            suffix_min[i], suffix_arg[i] = suffix_min[i + 1], suffix_arg[i + 1]
    for i, v in enumerate(values[:-1]):
        if v > suffix_min[i + 1] + tol:
            j = suffix_arg[i + 1]
            return CheckReport(
                name,
                Verdict.FAIL,
                {"condition": "monotone", "t_i": grid[i], "t_j": grid[j], "phi_i": v, "phi_j": values[j]},
            )
    max_jump = max((abs(b - a) for a, b in zip(values, values[1:])), default=0.0)
    return CheckReport(name, Verdict.PASS, counts={"grid": len(grid)}, details={"max_adjacent_jump": max_jump})


def phi_iterates(phi: PhiSpec, t0: float, n: int) -> SequenceTrace:
    """``[t0, phi(t0), ..., phi^n(t0)]``."""
    if not phi.validated:
        raise ArgumentError("phi must be validated before iterating")
    if t0 <= 0:
        raise ArgumentError("t0 must be positive")
    terms = [float(t0)]
    for _ in range(n):
        terms.append(phi(terms[-1]))
    return SequenceTrace(tuple(terms), tuple(f"phi^{k}" for k in range(n + 1)))


def decay_budget(phi: PhiSpec, t0: float, tol: float) -> int:
    """Iteration budget for driving ``phi^n(t0)`` below ``tol``.

    Linear controls converge geometrically and get a fixed budget; anything else
    falls back to ``ceil(t0 / tol)``, enough for ``t/(1+t)`` from ``t0 >= 1``.
    """
    if phi.slope is not None:
        return GEOMETRIC_BUDGET
    return math.ceil(t0 / tol)


@functools.lru_cache(maxsize=32)
def _decay_kernel(source: str):
    try:
        import numba
    except ImportError:  # pragma: no cover - numba is a declared dependency
        numba = None
    namespace = {"math": math}
    exec(source, namespace)
    f = namespace["f"]
    if numba is None:
        step = f
    else:
        step = numba.njit(cache=False)(f)

    def run(t, tol, n_max):
        n = 0
        while t > tol and n < n_max:
            t = step(t)
            if t != t:  # left the domain
                return n, t
            n += 1
        return n, t

    return numba.njit(cache=False)(run) if numba is not None else run


def decay_count(phi: PhiSpec, t0: float, tol: float = 1e-9, n_max: int | None = None) -> tuple[int, float]:
    """Number of iterations until ``phi^n(t0) <= tol`` (or ``n_max``), with the final value.

    Runs a compiled loop so budgets of order ``1e9`` stay practical.
    """
    if not phi.validated:
        raise ArgumentError("phi must be validated before iterating")
    if n_max is None:
        n_max = decay_budget(phi, t0, tol)
    kernel = _decay_kernel(to_python_source(phi.body))
    n, value = kernel(float(t0), float(tol), int(n_max))
    if math.isnan(value):
        raise DomainError(f"iterate {n + 1} of phi left its domain", point=t0)
    return int(n), float(value)


def check_decay(phi: PhiSpec, t0: float, tol: float = 1e-9, n_max: int | None = None) -> CheckReport:
    budget = decay_budget(phi, t0, tol) if n_max is None else n_max
    n, value = decay_count(phi, t0, tol, budget)
    verdict = Verdict.PASS if value <= tol else Verdict.FAIL
    return CheckReport(
        "phi_decay",
        verdict,
        None if verdict is Verdict.PASS else {"t0": t0, "final": value, "iterations": n},
        details={"t0": t0, "tol": tol, "budget": budget, "iterations": n, "final": value},
    )
