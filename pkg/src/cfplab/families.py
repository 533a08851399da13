"""Sequences of selfmaps ``S_n`` with a companion ``A``: pointwise limits, per-n fixed points, and limit transfer."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .contraction import MapTriple
from .dsl import BinOp, Const, Expr, PiecewiseFn, X, check_coverage, eval_fn
from .errors import ArgumentError
from .metric import MetricSpace, as_rational, richardson
from .orbit import DEFAULT_MAX_N, SolveReport, solve_common_fixed_point
from .report import CheckReport, Verdict

Coeff = tuple[Fraction, Fraction]  # (a, b) meaning a + b/n


def _coeff(pair) -> Coeff:
    a, b = pair
    return as_rational(a), as_rational(b)


def _affine_body(const: Fraction, slope: Fraction) -> Expr:
    if slope == 0:
        return Const(const)
    term = X if slope == 1 else BinOp("*", Const(slope), X)
    return term if const == 0 else BinOp("+", Const(const), term)


@dataclass(frozen=True)
class PieceOverride:
    """Body ``(ca + cb/n) + (sa + sb/n) * x`` replacing one piece of the base function."""

    const: Coeff = (Fraction(0), Fraction(0))
    slope: Coeff = (Fraction(0), Fraction(0))

    def __post_init__(self):
        object.__setattr__(self, "const", _coeff(self.const))
        object.__setattr__(self, "slope", _coeff(self.slope))

    def body(self, n: int | None) -> Expr:
        """Body for member ``n``; ``None`` gives the pointwise limit."""
        (ca, cb), (sa, sb) = self.const, self.slope
        if n is None:
            return _affine_body(ca, sa)
        return _affine_body(ca + cb / n, sa + sb / n)


@dataclass(frozen=True)
class MapFamily:
    space: MetricSpace
    base: PiecewiseFn
    companion_A: PiecewiseFn
    overrides: Mapping[int, PieceOverride] = field(default_factory=dict)

    def __post_init__(self):
        check_coverage(self.base, self.space.domain)
        check_coverage(self.companion_A, self.space.domain)
        for i in self.overrides:
            if not 0 <= i < len(self.base.pieces):
                raise ArgumentError(f"override targets piece {i}, but the base has {len(self.base.pieces)} pieces")

    def member(self, n: int) -> PiecewiseFn:
        if n < 1:
            raise ArgumentError("family members are indexed from n = 1")
        fn = self.base
        for i, ov in sorted(self.overrides.items()):
            fn = fn.with_body(i, ov.body(n))
        return fn

    @property
    def limit_map(self) -> PiecewiseFn:
        fn = self.base
        for i, ov in sorted(self.overrides.items()):
            fn = fn.with_body(i, ov.body(None))
        return fn

    def triple(self, n: int | None) -> MapTriple:
        """``(A, S_n, S_n)``, or ``(A, S, S)`` for the limit when ``n`` is ``None``."""
        s = self.limit_map if n is None else self.member(n)
        return MapTriple(self.space, self.companion_A, s, s)


def check_pointwise_convergence(family: MapFamily, grid: Sequence[float], tol: float = 1e-3, n_max: int = 16) -> CheckReport:
    """For each grid point, the first ``n0`` after which ``|S_n(x) - S(x)| <= tol`` up to ``n_max``."""
    if tol <= 0 or n_max < 1:
        raise ArgumentError("need tol > 0 and n_max >= 1")
    pts = sorted(family.space.check_point(x) for x in grid)
    limit = family.limit_map
    members = [family.member(n) for n in range(1, n_max + 1)]
    n0_by_point = {}
    witness = None
    for x in pts:
        target = eval_fn(limit, x)
        errors = [abs(eval_fn(m, x) - target) for m in members]
        n0 = None
        for k in range(n_max, 0, -1):
            if errors[k - 1] > tol:
                break
            n0 = k
        n0_by_point[x] = n0
        if n0 is None and witness is None:
            witness = {"x": x, "error_at_n_max": errors[-1], "n_max": n_max}
    worst = max((v for v in n0_by_point.values() if v is not None), default=None)
    details = {"tol": tol, "n_max": n_max, "max_n0": worst}
    if witness is not None:
        return CheckReport("pointwise_convergence", Verdict.FAIL, witness, {"points": len(pts)}, details)
    return CheckReport("pointwise_convergence", Verdict.PASS, counts={"points": len(pts)}, details=details)


@dataclass(frozen=True)
class MemberSolve:
    n: int
    u: float | None
    report: SolveReport
    probe_u: float | None = None

    @property
    def unique_ok(self) -> bool | None:
        if self.u is None or self.probe_u is None:
            return None
        return abs(self.u - self.probe_u) <= 2 * max(self.report.residuals.values(), default=0.0) + 2e-9


def solve_family(
    family: MapFamily,
    x0,
    n_list: Sequence[int],
    tol: float = 1e-9,
    max_n: int = DEFAULT_MAX_N,
    probe_x0=None,
) -> list[MemberSolve]:
    """Solve ``(A, S_n, S_n)`` for each ``n``; an optional second start point probes uniqueness."""
    out = []
    for n in n_list:
        triple = family.triple(n)
        rep = solve_common_fixed_point(triple, x0, tol, max_n)
        probe = None
        if probe_x0 is not None:
            probe = solve_common_fixed_point(triple, probe_x0, tol, max_n).candidate
        out.append(MemberSolve(n, rep.candidate, rep, probe))
    return out


def fixed_points_of_family(family: MapFamily, x0, n_list: Sequence[int], tol: float = 1e-9, max_n: int = DEFAULT_MAX_N):
    return [(m.n, m.u) for m in solve_family(family, x0, n_list, tol, max_n)]


def _sequence_limit(ns: list[int], us: list[float], tol: float) -> tuple[float, bool]:
    doubling = len(ns) >= 3 and all(b == 2 * a for a, b in zip(ns, ns[1:]))
    if doubling:
        est = richardson(us)
        return est[-1], abs(est[-1] - est[-2]) <= tol
    if len(us) >= 2:
        return us[-1], abs(us[-1] - us[-2]) <= tol
    return us[-1], False


def _continuity_probe(fn: PiecewiseFn, space: MetricSpace, u: float) -> float:
    """Largest ``|A(u +- h) - A(u)|`` over a few shrinking offsets ``h``; sampled only."""
    base = eval_fn(fn, u)
    jumps = [
        abs(eval_fn(fn, u + s * h) - base)
        for h in (1e-3, 1e-6, 1e-9)
        for s in (-1, 1)
        if space.domain.contains(u + s * h)
    ]
    return max(jumps, default=0.0)


def check_limit_transfer(
    family: MapFamily,
    u_candidates: Sequence[tuple[int, float | None]],
    tol: float = 1e-9,
    u=None,
) -> CheckReport:
    """``u_n -> u`` exactly when ``Su = Au = u``, checked in whichever directions apply.

    Forward: if ``u_n`` settles, its limit must be fixed by ``S`` and ``A`` (and match
    ``u`` if one is declared). Backward: a declared ``u`` fixed by both must be the
    limit of ``u_n``.
    """
    pairs = sorted((n, v) for n, v in u_candidates if v is not None)
    if not pairs:
        raise ArgumentError("need at least one solved member")
    ns, us = [n for n, _ in pairs], [v for _, v in pairs]
    S, A = family.limit_map, family.companion_A
    lim, settled = _sequence_limit(ns, us, tol)
    details: dict = {"n": ns, "u_n": us, "estimated_limit": lim, "settled": settled}
    verdicts = {}
    if settled and family.space.domain.contains(lim):
        res = {"d(Su,u)": abs(eval_fn(S, lim) - lim), "d(Au,u)": abs(eval_fn(A, lim) - lim)}
        ok = max(res.values()) <= tol
        if u is not None and abs(lim - float(u)) > tol:
            ok = False
            details["forward_mismatch"] = {"declared": float(u), "estimated": lim}
        verdicts["forward"] = ok
        details["forward_residuals"] = res
        details["A_jump_near_limit"] = _continuity_probe(A, family.space, lim)
    if u is not None:
        u = family.space.check_point(u)
        fixed = abs(eval_fn(S, u) - u) <= tol and abs(eval_fn(A, u) - u) <= tol
        details["declared_u_fixed"] = fixed
        if fixed:
            verdicts["backward"] = settled and abs(lim - u) <= tol
    details["directions"] = verdicts
    if not verdicts:
        return CheckReport("limit_transfer", Verdict.INCONCLUSIVE, details=details, message="u_n does not settle and no fixed u was given")
    failed = [k for k, v in verdicts.items() if not v]
    if failed:
        return CheckReport("limit_transfer", Verdict.FAIL, {"direction": failed[0]}, details=details)
    return CheckReport("limit_transfer", Verdict.PASS, details=details)
