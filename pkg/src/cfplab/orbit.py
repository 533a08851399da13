"""(S,T,A)-orbits: construction, iteration to a common fixed point, and checks on the result."""

from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass, field

from .contraction import MapTriple
from .dsl import TOL_PRE, eval_fn, preimage
from .errors import ArgumentError, InversionError
from .metric import DEFAULT_TOL, DEFAULT_WINDOW, tail_diameter
from .phi import PhiSpec
from .report import CheckReport, Verdict, to_jsonable

DEFAULT_MAX_N = 10_000
PERIODS = (2, 4)


class Termination(str, enum.Enum):
    CONVERGED = "converged"
    OSCILLATING = "oscillating"
    STALLED = "stalled"
    BUDGET = "budget"


@dataclass(frozen=True)
class OrbitStep:
    n: int
    x: float
    Ax: float
    applied: str


@dataclass(frozen=True)
class OrbitTrace:
    """Steps ``n = 1, 2, ...`` of an orbit; the start point is kept apart in ``x0``."""

    x0: float
    steps: tuple[OrbitStep, ...]
    termination: Termination
    policy: str
    detail: dict = field(default_factory=dict)

    @property
    def images(self) -> list[float]:
        return [s.Ax for s in self.steps]

    @property
    def reachable(self) -> list[float]:
        """Images including a final one that had no ``A``-preimage."""
        extra = [self.detail["stall_value"]] if self.termination is Termination.STALLED else []
        return self.images + extra

    @property
    def gaps(self) -> list[float]:
        a = self.images
        return [abs(q - p) for p, q in zip(a, a[1:])]

    def to_dict(self) -> dict:
        return to_jsonable(
            {
                "x0": self.x0,
                "termination": self.termination,
                "policy": self.policy,
                "detail": self.detail,
                "length": len(self.steps),
            }
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "x_n", "Ax_n", "applied_map", "gap"])
        gaps = self.gaps
        for i, s in enumerate(self.steps):
            w.writerow([s.n, repr(s.x), repr(s.Ax), s.applied, repr(gaps[i]) if i < len(gaps) else ""])
        return buf.getvalue()


def _residuals(triple: MapTriple, u: float) -> dict[str, float]:
    return {f"d({m}u,u)": abs(eval_fn(getattr(triple, m), u) - u) for m in "AST"}


def _is_common_fixed(triple: MapTriple, u: float, tol: float) -> bool:
    if not triple.space.domain.contains(u):
        return False
    return max(_residuals(triple, u).values()) <= tol


def _periodic_tail(images: list[float], tol: float) -> int | None:
    """Smallest period ``p`` whose pattern repeats over the last ``3p`` images, moving both up and down.

    Requiring both directions keeps slow monotone convergence from passing as a cycle.
    """
    for p in PERIODS:
        if len(images) < 3 * p:
            continue
        tail = images[-3 * p :]
        if not all(abs(tail[i] - tail[i + p]) <= tol for i in range(2 * p)):
            continue
        moves = [b - a for a, b in zip(tail, tail[1:])]
        if max(moves) > tol and min(moves) < -tol:
            return p
    return None


def build_orbit(
    triple: MapTriple,
    x0,
    max_n: int = DEFAULT_MAX_N,
    tol: float = DEFAULT_TOL,
    window: int = DEFAULT_WINDOW,
) -> OrbitTrace:
    """Alternate ``S`` (odd ``n``) and ``T`` (even ``n``), solving ``A x_n = image`` each step.

    Stops when the last ``window`` images fit within ``tol``, when two consecutive
    images agree at a common fixed point, when the tail repeats with period 2 or 4,
    when an image has no ``A``-preimage, or when ``max_n`` steps are used.
    """
    if max_n < 1 or window < 2 or tol <= 0:
        raise ArgumentError("need max_n >= 1, window >= 2 and tol > 0")
    x0 = triple.space.check_point(x0)
    policy = triple.preimage_policy
    steps: list[OrbitStep] = []
    images: list[float] = []
    x = x0

    def finish(termination, **detail):
        return OrbitTrace(x0, tuple(steps), termination, policy.value, detail)

    for n in range(1, max_n + 1):
        applied = "S" if n % 2 else "T"
        y = eval_fn(getattr(triple, applied), x)
        try:
            nxt = preimage(triple.A, y, policy, previous=x)
        except InversionError as exc:
            return finish(Termination.STALLED, stall_value=y, step=n, reason=str(exc))
        if nxt is None:
            return finish(Termination.STALLED, stall_value=y, step=n, reason="image outside the range of A")
        x = nxt
        steps.append(OrbitStep(n, x, y, applied))
        images.append(y)
        if len(images) >= 2 and abs(images[-1] - images[-2]) <= TOL_PRE and _is_common_fixed(triple, y, tol):
            return finish(Termination.CONVERGED, limit=y, rule="constant_pair")
        if len(images) >= window and tail_diameter(images[-window:]) <= tol:
            return finish(Termination.CONVERGED, limit=y, rule="tail_diameter")
        p = _periodic_tail(images, tol)
        if p is not None:
            cycle = sorted({round(v, 12) for v in images[-p:]})
            return finish(Termination.OSCILLATING, period_steps=p, cycle=cycle)
    return finish(Termination.BUDGET, last=images[-1], tail_diameter=tail_diameter(images[-window:]))


@dataclass(frozen=True)
class SolveReport:
    candidate: float | None
    residuals: dict[str, float]
    iterations: int
    decay_ok: bool | None
    trace: OrbitTrace
    reason: str = ""

    def to_dict(self) -> dict:
        return to_jsonable(
            {
                "candidate": self.candidate,
                "residuals": self.residuals,
                "iterations": self.iterations,
                "decay_ok": self.decay_ok,
                "reason": self.reason,
                "trace": self.trace.to_dict(),
            }
        )


def solve_common_fixed_point(
    triple: MapTriple,
    x0,
    tol_fix: float = DEFAULT_TOL,
    max_n: int = DEFAULT_MAX_N,
    window: int = DEFAULT_WINDOW,
    phi: PhiSpec | None = None,
) -> SolveReport:
    """Iterate the orbit from ``x0`` and accept its limit only if every residual is within ``tol_fix``."""
    trace = build_orbit(triple, x0, max_n, tol_fix, window)
    decay_ok = verify_decay(trace, phi).passed if phi is not None and len(trace.steps) >= 3 else None
    n = len(trace.steps)
    if trace.termination is not Termination.CONVERGED:
        return SolveReport(None, {}, n, decay_ok, trace, reason=trace.termination.value)
    u = trace.detail["limit"]
    if not triple.space.domain.contains(u):
        return SolveReport(None, {}, n, decay_ok, trace, reason="limit outside the domain")
    residuals = _residuals(triple, u)
    if max(residuals.values()) > tol_fix:
        return SolveReport(None, residuals, n, decay_ok, trace, reason="residual above tolerance")
    return SolveReport(u, residuals, n, decay_ok, trace, reason=trace.detail["rule"])


def verify_decay(trace: OrbitTrace, phi: PhiSpec, tol: float = DEFAULT_TOL) -> CheckReport:
    """Consecutive gaps shrink through ``phi`` and stay under ``phi^n`` of the first gap."""
    if len(trace.steps) < 3:
        raise ArgumentError("decay check needs at least three orbit steps")
    gaps = trace.gaps
    envelope = gaps[0]
    counts = {"step": 0, "envelope": 0}
    for n in range(1, len(gaps)):
        envelope = phi.lower(envelope)
        step_bound = phi.lower(gaps[n - 1])
        if gaps[n] > step_bound + tol:
            return CheckReport("decay", Verdict.FAIL, {"relation": "step", "n": n, "gap": gaps[n], "bound": step_bound}, counts)
        counts["step"] += 1
        if gaps[n] > envelope + tol:
            return CheckReport("decay", Verdict.FAIL, {"relation": "envelope", "n": n, "gap": gaps[n], "bound": envelope}, counts)
        counts["envelope"] += 1
    return CheckReport("decay", Verdict.PASS, counts=counts, details={"phi": str(phi), "first_gap": gaps[0]})
