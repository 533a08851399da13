"""Contractive inequality forms and grid sweeps that hunt for violating pairs."""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from typing import Sequence

from .dsl import PiecewiseFn, Policy, check_coverage, eval_fn, identity
from .errors import ArgumentError, DomainError, ZeroDenominator
from .metric import MetricSpace
from .phi import PhiSpec
from .report import CheckReport, Verdict

TOL_ZERO = 1e-10


class ZeroMode(str, enum.Enum):
    STRICT = "strict"
    LENIENT = "lenient"


class PairStatus(str, enum.Enum):
    HOLDS = "holds"
    VIOLATED = "violated"
    ZERO_BRANCH_VIOLATED = "zero_branch_violated"
    NOT_APPLICABLE = "not_applicable"


@dataclass(frozen=True)
class MapTriple:
    """Selfmaps ``A, S, T`` of a common domain, plus the policy used to invert ``A``."""

    space: MetricSpace
    A: PiecewiseFn
    S: PiecewiseFn
    T: PiecewiseFn
    preimage_policy: Policy = Policy.LEFTMOST

    def __post_init__(self):
        object.__setattr__(self, "preimage_policy", Policy(self.preimage_policy))
        for name in "AST":
            check_coverage(getattr(self, name), self.space.domain)
        probe = self.space.domain.grid(64, extra=self.breakpoints())
        for name in "AST":
            fn = getattr(self, name)
            for x in probe:
                fx = eval_fn(fn, x)
                if not self.space.domain.contains(fx):
                    raise DomainError(f"{name}({x}) = {fx} leaves the domain {self.space.domain}", point=x)

    @classmethod
    def single(cls, space: MetricSpace, S: PiecewiseFn, A: PiecewiseFn | None = None, **kw) -> MapTriple:
        """Triple with ``T = S`` (and ``A`` the identity unless given)."""
        return cls(space, A if A is not None else identity(space.domain), S, S, **kw)

    def breakpoints(self) -> list:
        pts = set()
        for fn in (self.A, self.S, self.T):
            pts.update(fn.breakpoints)
        return sorted(pts)

    def grid(self, n: int = 200) -> list[float]:
        """Uniform grid plus points hugging every piece boundary of A, S and T."""
        return self.space.domain.grid(n, extra=self.breakpoints())


@dataclass(frozen=True)
class PairData:
    x: float
    y: float
    Ax: float
    Ay: float
    Sx: float
    Sy: float
    Tx: float
    Ty: float


def _values(triple: MapTriple, x: float) -> tuple[float, float, float]:
    return eval_fn(triple.A, x), eval_fn(triple.S, x), eval_fn(triple.T, x)


def pair_data(triple: MapTriple, x, y) -> PairData:
    x, y = triple.space.check_point(x), triple.space.check_point(y)
    ax, sx, tx = _values(triple, x)
    ay, sy, ty = _values(triple, y)
    return PairData(x, y, ax, ay, sx, sy, tx, ty)


# ------------------------------------------------------------------- forms


class InequalityForm:
    """Base for the inequality variants.

    Subclasses say which quantity plays ``d(Ax, Ay)`` (the denominator and the
    zero-branch trigger), what the left side is, and how the bound is built.
    """

    zero_branch = True
    rational = True
    key = ""

    def roles(self, p: PairData) -> tuple[float, float, float, float, float, float]:
        """``(Ax, Ay, Sx, Ty, Sy, Tx)`` as seen by this form."""
        return p.Ax, p.Ay, p.Sx, p.Ty, p.Sy, p.Tx

    def lhs(self, p: PairData, d) -> float:
        ax, ay, sx, ty, _, _ = self.roles(p)
        return d(sx, ty)

    def denominator(self, p: PairData, d) -> float:
        ax, ay, *_ = self.roles(p)
        return d(ax, ay)

    def bound(self, p: PairData, d) -> float:
        raise NotImplementedError

    def rational_max(self, p: PairData, d) -> float:
        ax, ay, sx, ty, _, _ = self.roles(p)
        dax = d(ax, ay)
        return max(dax, d(ax, sx) * d(ay, ty) / dax, d(ax, ty) * d(ay, sx) / dax)

    def params(self) -> dict:
        return {}

    def capped(self, p: PairData, d) -> bool:
        """True when the bound was clipped to the control function's domain."""
        return False

    def describe(self) -> dict:
        return {"form": self.key, **self.params()}


def _check_phi(phi: PhiSpec):
    if not isinstance(phi, PhiSpec) or not phi.validated:
        raise ArgumentError("form needs a validated PhiSpec")


@dataclass(frozen=True)
class PhiRational(InequalityForm):
    phi: PhiSpec
    key = "phi_rational"

    def __post_init__(self):
        _check_phi(self.phi)

    def bound(self, p, d):
        return self.phi.lower(self.rational_max(p, d))

    def capped(self, p, d):
        return self.rational_max(p, d) > self.phi.t_max

    def params(self):
        return {"phi": str(self.phi)}


@dataclass(frozen=True)
class PhiRationalTwoMap(PhiRational):
    """``T`` replaced by ``S`` throughout."""

    key = "phi_rational_two_map"

    def roles(self, p):
        return p.Ax, p.Ay, p.Sx, p.Sy, p.Sy, p.Sx


@dataclass(frozen=True)
class PhiRationalSingle(PhiRational):
    """``A`` replaced by the identity and ``T`` by ``S``."""

    key = "phi_rational_single"

    def roles(self, p):
        return p.x, p.y, p.Sx, p.Sy, p.Sy, p.Sx


@dataclass(frozen=True)
class LambdaMax(InequalityForm):
    lam: float
    key = "lambda_max"

    def __post_init__(self):
        if not 0 <= self.lam < 1:
            raise ArgumentError(f"lambda must lie in [0, 1), got {self.lam}")

    def bound(self, p, d):
        return self.lam * self.rational_max(p, d)

    def params(self):
        return {"lambda": self.lam}


@dataclass(frozen=True)
class PhaneendraLinear(InequalityForm):
    alpha: float
    beta: float
    gamma: float
    key = "phaneendra_linear"

    def __post_init__(self):
        a, b, g = self.alpha, self.beta, self.gamma
        if min(a, b, g) < 0 or a + b >= 1 or a + g >= 1:
            raise ArgumentError(f"need alpha, beta, gamma >= 0 with alpha+beta < 1 and alpha+gamma < 1, got {a, b, g}")

    @property
    def dominating_lambda(self) -> float:
        return self.alpha + max(self.beta, self.gamma)

    def bound(self, p, d):
        ax, ay, sx, ty, _, _ = self.roles(p)
        dax = d(ax, ay)
        return self.alpha * dax + self.beta * d(ax, sx) * d(ay, ty) / dax + self.gamma * d(ax, ty) * d(ay, sx) / dax

    def params(self):
        return {"alpha": self.alpha, "beta": self.beta, "gamma": self.gamma}


@dataclass(frozen=True)
class JaggiTwoMap(InequalityForm):
    """Two-map form on ``x != y`` with a single division by ``d(x, y)``; no zero branch."""

    alpha: float
    beta: float
    key = "jaggi_two_map"
    zero_branch = False

    def __post_init__(self):
        if min(self.alpha, self.beta) < 0 or self.alpha + self.beta >= 1:
            raise ArgumentError(f"need alpha, beta >= 0 with alpha+beta < 1, got {self.alpha, self.beta}")

    def roles(self, p):
        return p.x, p.y, p.Sx, p.Ty, p.Sy, p.Tx

    def bound(self, p, d):
        dxy = d(p.x, p.y)
        return self.alpha * d(p.x, p.Sx) * d(p.y, p.Ty) / dxy + self.beta * dxy

    def params(self):
        return {"alpha": self.alpha, "beta": self.beta}


@dataclass(frozen=True)
class PhiProduct(InequalityForm):
    """Denominator-free product form; evaluable at every pair."""

    phi: PhiSpec
    key = "phi_product"
    rational = False
    zero_branch = False

    def __post_init__(self):
        _check_phi(self.phi)

    def lhs(self, p, d):
        return d(p.Sx, p.Ty) * d(p.Ax, p.Ay)

    def argument(self, p, d):
        dax = d(p.Ax, p.Ay)
        return max(dax * dax, d(p.Ax, p.Sx) * d(p.Ay, p.Ty), d(p.Ax, p.Ty) * d(p.Ay, p.Sx))

    def bound(self, p, d):
        return self.phi.lower(self.argument(p, d))

    def capped(self, p, d):
        return self.argument(p, d) > self.phi.t_max

    def params(self):
        return {"phi": str(self.phi)}


FORMS = {
    cls.key: cls
    for cls in (PhiRational, PhiRationalTwoMap, PhiRationalSingle, LambdaMax, PhaneendraLinear, JaggiTwoMap, PhiProduct)
}


# -------------------------------------------------------------- evaluation


@dataclass(frozen=True)
class PairVerdict:
    status: PairStatus
    lhs: float
    rhs: float
    pair: tuple[float, float]

    @property
    def ok(self) -> bool:
        return self.status in (PairStatus.HOLDS, PairStatus.NOT_APPLICABLE)


def _rhs(form: InequalityForm, p: PairData, d, tol_zero: float) -> float:
    if form.rational and form.denominator(p, d) <= tol_zero:
        raise ZeroDenominator(f"d(Ax, Ay) vanishes at ({p.x}, {p.y})")
    return form.bound(p, d)


def rhs_value(form: InequalityForm, triple: MapTriple, x, y, tol_zero: float = TOL_ZERO) -> float:
    return _rhs(form, pair_data(triple, x, y), triple.space.dist, tol_zero)


def _judge(form, p: PairData, d, tol, zero_mode, tol_zero) -> PairVerdict:
    lhs = form.lhs(p, d)
    pair = (p.x, p.y)
    if form.rational and form.denominator(p, d) <= tol_zero:
        if not form.zero_branch or zero_mode is ZeroMode.LENIENT:
            return PairVerdict(PairStatus.NOT_APPLICABLE, lhs, math.nan, pair)
        status = PairStatus.HOLDS if lhs <= tol_zero else PairStatus.ZERO_BRANCH_VIOLATED
        return PairVerdict(status, lhs, 0.0, pair)
    rhs = form.bound(p, d)
    if lhs <= rhs + tol:
        return PairVerdict(PairStatus.HOLDS, lhs, rhs, pair)
    if form.capped(p, d):
        # the clipped bound only certifies Holds; a violation needs the true value
        raise DomainError(f"bound argument at ({p.x}, {p.y}) exceeds the control function's domain", point=p.x)
    return PairVerdict(PairStatus.VIOLATED, lhs, rhs, pair)


def check_pair(
    form: InequalityForm,
    triple: MapTriple,
    x,
    y,
    tol: float = 1e-9,
    zero_mode: ZeroMode | str = ZeroMode.STRICT,
    tol_zero: float = TOL_ZERO,
) -> PairVerdict:
    return _judge(form, pair_data(triple, x, y), triple.space.dist, tol, ZeroMode(zero_mode), tol_zero)


def sweep_grid(
    form: InequalityForm,
    triple: MapTriple,
    grid: Sequence[float],
    tol: float = 1e-9,
    zero_mode: ZeroMode | str = ZeroMode.STRICT,
    tol_zero: float = TOL_ZERO,
) -> CheckReport:
    """Check every ordered pair of grid points; the witness is the first failure in index order."""
    zero_mode = ZeroMode(zero_mode)
    pts = sorted({triple.space.check_point(g) for g in grid})
    if len(pts) < 2:
        raise ArgumentError("a sweep needs at least two distinct grid points")
    vals = [_values(triple, x) for x in pts]
    d = triple.space.dist
    counts = {s.value: 0 for s in PairStatus}
    witness = None
    worst = -math.inf
    for (x, (ax, sx, tx)), (y, (ay, sy, ty)) in itertools.product(zip(pts, vals), repeat=2):
        v = _judge(form, PairData(x, y, ax, ay, sx, sy, tx, ty), d, tol, zero_mode, tol_zero)
        counts[v.status.value] += 1
        if v.status is PairStatus.VIOLATED:
            worst = max(worst, v.lhs - v.rhs)
        if witness is None and not v.ok:
            witness = {"x": x, "y": y, "status": v.status.value, "lhs": v.lhs, "rhs": v.rhs}
    details = {**form.describe(), "zero_mode": zero_mode.value, "grid_points": len(pts), "tol": tol}
    if worst > -math.inf:
        details["max_excess"] = worst
    return CheckReport(
        f"sweep:{form.key}",
        Verdict.PASS if witness is None else Verdict.FAIL,
        witness,
        counts,
        details,
    )


def verify_uniqueness_pairwise(
    triple: MapTriple, u, v, form: InequalityForm, tol: float = 1e-9
) -> CheckReport:
    """Two distinct common fixed points must make the inequality fail at ``(u, v)``."""
    u, v = triple.space.check_point(u), triple.space.check_point(v)
    if u == v:
        raise ArgumentError("uniqueness probe needs two distinct points")
    name = "uniqueness"
    for label, p in (("u", u), ("v", v)):
        res = max(abs(eval_fn(m, p) - p) for m in (triple.A, triple.S, triple.T))
        if res > tol:
            return CheckReport(name, Verdict.NOT_FIXED, {label: p, "residual": res}, message=f"NotFixed({label})")
    verdict = check_pair(form, triple, u, v, tol, ZeroMode.STRICT)
    if verdict.ok:
        return CheckReport(
            name,
            Verdict.INCONCLUSIVE,
            {"u": u, "v": v, "lhs": verdict.lhs, "rhs": verdict.rhs},
            message="uniqueness argument inconclusive: the inequality holds at (u, v)",
        )
    return CheckReport(
        name,
        Verdict.PASS,
        details={"u": u, "v": v, "status": verdict.status.value, "lhs": verdict.lhs, "rhs": verdict.rhs},
    )
