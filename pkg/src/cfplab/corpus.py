"""Built-in catalog of worked examples with the verdicts each one is expected to reproduce."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .config import RunConfig, parse_form
from .contraction import check_pair, rhs_value, sweep_grid, verify_uniqueness_pairwise
from .dsl import eval_fn
from .errors import NotFound
from .families import check_limit_transfer, check_pointwise_convergence, solve_family
from .hypotheses import (
    check_compatible,
    check_compatible_type_a,
    check_reciprocal_continuity,
    check_weakly_commuting,
)
from .metric import Interval, as_rational
from .orbit import solve_common_fixed_point, verify_decay
from .phi import check_decay
from .report import to_jsonable

VALUE_TOL = 1e-9
LIMIT_TOL = 1e-6

_A_3_3 = "piece (0,1/3]: 1 - 2*x; piece (1/3,1]: 1/6"


@dataclass(frozen=True)
class ExampleBundle:
    name: str
    title: str
    config_text: str
    expectations: tuple[dict, ...]
    discrepancies: tuple[dict, ...] = field(default=())

    @property
    def config(self) -> RunConfig:
        return RunConfig.parse(self.config_text)

    def to_config(self) -> str:
        return self.config.to_text()


def _cfg(**sections: dict) -> str:
    lines = []
    for name, body in sections.items():
        lines.append(f"[{name.replace('__', '.')}]")
        lines.extend(f"{k} = {v}" for k, v in body.items())
        lines.append("")
    return "\n".join(lines)


_BUNDLES = [
    ExampleBundle(
        "ex_1_6",
        "Two-point space where A = S swaps the points and T is the identity",
        _cfg(
            space={"domain": "[0,0] u [1,1]"},
            maps={"A": "piece [0,0]: 1; piece [1,1]: 0", "S": "piece [0,0]: 1; piece [1,1]: 0", "T": "piece [0,0]: 0; piece [1,1]: 1"},
            inequality={"form": "phaneendra_linear", "alpha": "1/2", "beta": "1/4", "gamma": "1/4"},
            run={"x0": "0 1"},
        ),
        (
            {"id": "orbit_0", "check": "solve", "x0": "0", "expect": {"candidate": None, "termination": "oscillating", "cycle": ["0", "1"]}},
            {"id": "orbit_1", "check": "solve", "x0": "1", "expect": {"candidate": None, "termination": "oscillating", "cycle": ["0", "1"]}},
            {"id": "weak_AS", "check": "weakly_commuting", "pair": "AS", "expect": {"verdict": "pass"}},
            {"id": "weak_AT", "check": "weakly_commuting", "pair": "AT", "expect": {"verdict": "pass"}},
            {"id": "sweep_lenient", "check": "sweep", "zero_mode": "lenient", "expect": {"verdict": "pass"}},
            {
                "id": "sweep_strict",
                "check": "sweep",
                "zero_mode": "strict",
                "expect": {"verdict": "fail", "witness": {"x": "0", "y": "0", "status": "zero_branch_violated"}},
            },
            {"id": "zero_branch_00", "check": "pair", "x": "0", "y": "0", "zero_mode": "strict", "expect": {"status": "zero_branch_violated"}},
        ),
        (
            {"flag": "zero_branch_conflict", "note": "all other hypotheses hold; the strict zero branch fails at (0, 0)"},
            {"flag": "oscillation_period", "note": "the image sequence repeats every 4 steps, i.e. every 2 S-T rounds"},
        ),
    ),
    ExampleBundle(
        "remark_3_2",
        "A = identity, S = T = x/(1+x) on [0,10]: the control t/(1+t) works, no linear control does",
        _cfg(
            space={"domain": "[0,10]"},
            maps={"A": "piece [0,10]: x", "S": "piece [0,10]: x/(1 + x)", "T": "piece [0,10]: x/(1 + x)"},
            phi={"body": "piece [0,100]: x/(1 + x)"},
            inequality={"form": "phi_rational_two_map"},
            run={"x0": "1", "sweep_tol": "1e-12"},
        ),
        (
            {"id": "sweep_phi", "check": "sweep", "tol": "1e-12", "expect": {"verdict": "pass"}},
            *(
                {
                    "id": f"sweep_lambda_{lam}",
                    "check": "sweep",
                    "form": f"lambda_max:lambda={lam}",
                    "expect": {"verdict": "fail", "witness_near_zero": str(1 / as_rational(lam) - 1)},
                }
                for lam in ("1/2", "9/10", "99/100")
            ),
            {"id": "rhs_single_1_2", "check": "pair", "form": "phi_rational_single", "x": "1", "y": "2", "expect": {"status": "holds"}},
            {"id": "weak_AS", "check": "weakly_commuting", "pair": "AS", "expect": {"verdict": "pass"}},
            {"id": "solve_default", "check": "solve", "x0": "1", "expect": {"candidate": None, "termination": "budget"}},
            {
                "id": "solve_extended",
                "check": "solve",
                "x0": "1",
                "tol": "1e-4",
                "max_n": "100000",
                "expect": {"candidate": "0", "candidate_tol": "1e-2", "decay": "pass"},
            },
            {"id": "phi_decay", "check": "phi_decay", "t0": "1", "tol": "1e-6", "expect": {"verdict": "pass"}},
        ),
        (),
    ),
    ExampleBundle(
        "ex_3_3",
        "Three piecewise maps on (0,1] with common fixed point 1/3",
        _cfg(
            space={"domain": "(0,1]"},
            maps={
                "A": _A_3_3,
                "S": "piece (0,1/3]: x; piece (1/3,1): 1/3; piece [1,1]: 3/8",
                "T": "piece (0,1/3]: x; piece (1/3,1): 1/3; piece [1,1]: 5/12",
            },
            phi={"body": "piece [0,100]: x/2"},
            inequality={"form": "phi_rational"},
            witness__left={"a": "1/3", "b": "-1", "n0": "8"},
            run={"x0": "1/6 1"},
        ),
        (
            {"id": "A_at_1", "check": "value", "map": "A", "x": "1", "expect": {"value": "1/6"}},
            {"id": "S_at_1", "check": "value", "map": "S", "x": "1", "expect": {"value": "3/8"}},
            {"id": "T_at_1", "check": "value", "map": "T", "x": "1", "expect": {"value": "5/12"}},
            {"id": "rhs_01_02", "check": "rhs", "x": "1/10", "y": "1/5", "expect": {"value": "3/4"}},
            {"id": "solve_sixth", "check": "solve", "x0": "1/6", "expect": {"candidate": "1/3", "decay": "pass"}},
            {
                "id": "orbit_from_1",
                "check": "solve",
                "x0": "1",
                "expect": {"candidate": None, "termination": "stalled", "reachable": ["3/8", "5/16"]},
            },
            {"id": "sweep_lenient", "check": "sweep", "zero_mode": "lenient", "expect": {"verdict": "pass"}},
            {"id": "sweep_strict", "check": "sweep", "zero_mode": "strict", "expect": {"verdict": "fail", "witness": {"status": "zero_branch_violated"}}},
            {"id": "zero_branch_half_1", "check": "pair", "x": "1/2", "y": "1", "zero_mode": "strict", "expect": {"status": "zero_branch_violated"}},
            *(
                e
                for pair in ("AS", "AT")
                for e in (
                    {"id": f"compatible_{pair}", "check": "compatible", "pair": pair, "witness": "left", "expect": {"verdict": "pass", "limits": {"d(SAx,ASx)": "0"}}},
                    {"id": f"type_a_{pair}", "check": "type_a", "pair": pair, "witness": "left", "expect": {"verdict": "fail", "limits": {"d(AAx,SAx)": "1/6"}}},
                    {"id": f"reciprocal_{pair}", "check": "reciprocal", "pair": pair, "witness": "left", "t": "1/3", "expect": {"verdict": "pass"}},
                )
            ),
        ),
        (
            {"flag": "orbit_continuation", "note": "from x0 = 1 the image 5/16 has no A-preimage; the listed continuation to 1/3 is unreachable"},
            {"flag": "zero_branch_conflict", "note": "A is constant on (1/3,1] while S and T differ at 1, so the strict zero branch fails"},
        ),
    ),
    ExampleBundle(
        "ex_3_4",
        "Three piecewise maps on (0,2] whose orbits approach 1 geometrically",
        _cfg(
            space={"domain": "(0,2]"},
            maps={
                "A": "piece (0,1/2]: 2; piece (1/2,1]: 2*x - 1; piece (1,2]: 2",
                "S": "piece (0,1/2]: 3/2; piece (1/2,1]: x; piece (1,2]: 3/2",
                "T": "piece (0,1/2]: 5/4; piece (1/2,1]: x; piece (1,2]: 5/4",
            },
            phi={"body": "piece [0,100]: x/2"},
            inequality={"form": "phi_rational"},
            witness__right={"a": "1", "b": "-1", "n0": "16"},
            run={"x0": "3/5 3/4 9/10"},
        ),
        (
            {"id": "T_at_quarter", "check": "value", "map": "T", "x": "1/4", "expect": {"value": "5/4"}},
            *(
                {"id": f"solve_{x0}", "check": "solve", "x0": x0, "expect": {"candidate": "1", "max_iterations": 60, "decay": "pass"}}
                for x0 in ("3/5", "3/4", "9/10")
            ),
            {"id": "sweep_lenient_core", "check": "sweep", "zero_mode": "lenient", "restrict": "(1/2,1]", "expect": {"verdict": "pass"}},
            {"id": "sweep_lenient", "check": "sweep", "zero_mode": "lenient", "expect": {"verdict": "pass"}},
            {"id": "sweep_strict", "check": "sweep", "zero_mode": "strict", "expect": {"verdict": "fail", "witness": {"status": "zero_branch_violated"}}},
            *(
                e
                for pair in ("AS", "AT")
                for e in (
                    {"id": f"compatible_{pair}", "check": "compatible", "pair": pair, "witness": "right", "expect": {"verdict": "pass"}},
                    {"id": f"type_a_{pair}", "check": "type_a", "pair": pair, "witness": "right", "expect": {"verdict": "pass"}},
                    {"id": f"reciprocal_{pair}", "check": "reciprocal", "pair": pair, "witness": "right", "t": "1", "expect": {"verdict": "pass"}},
                )
            ),
            {"id": "uniqueness_probe", "check": "uniqueness", "u": "1", "v": "4/5", "expect": {"verdict": "not_fixed"}},
        ),
        (
            {"flag": "zero_branch_conflict", "note": "A is constant on (0,1/2] and (1,2] while S and T differ there, so the strict zero branch fails"},
        ),
    ),
    ExampleBundle(
        "ex_3_5",
        "A sequence S_n that differs from its limit only at x = 1, all sharing the fixed point 1/3",
        _cfg(
            space={"domain": "(0,1]"},
            maps={"A": _A_3_3},
            phi={"body": "piece [0,100]: x/2"},
            inequality={"form": "phi_rational"},
            witness__left={"a": "1/3", "b": "-1", "n0": "8"},
            family={"base": "piece (0,1/3]: x; piece (1/3,1): 1/3; piece [1,1]: 5/12", "const.2": "5/12 -1/24"},
            run={"x0": "1/6", "n_list": "1 2 4 8 16", "probe_x0": "1/2"},
        ),
        (
            {"id": "member_fixed_points", "check": "family_fixed", "expect": {"u": "1/3"}},
            {"id": "pointwise_64", "check": "pointwise", "tol": "1e-3", "n_max": 64, "points": 50, "expect": {"verdict": "pass", "max_n0": 42}},
            {"id": "pointwise_16", "check": "pointwise", "tol": "1e-3", "n_max": 16, "points": 50, "expect": {"verdict": "fail", "witness": {"x": "1"}}},
            {"id": "limit_transfer", "check": "transfer", "u": "1/3", "expect": {"verdict": "pass", "directions": ["backward", "forward"]}},
            {"id": "compatible_S1", "check": "compatible", "pair": "AS", "member": 1, "witness": "left", "expect": {"verdict": "pass"}},
            {"id": "sweep_lenient_S1", "check": "sweep", "member": 1, "zero_mode": "lenient", "expect": {"verdict": "pass"}},
            {"id": "solve_S1", "check": "solve", "member": 1, "x0": "1/6", "expect": {"candidate": "1/3", "decay": "pass"}},
        ),
        (
            {"flag": "pointwise_n0_bound", "note": "|S_n(1) - S(1)| = 1/(24n) first drops below 1e-3 at n = 42, so no n0 <= 16 exists"},
        ),
    ),
    ExampleBundle(
        "ex_3_6",
        "Compatible but not reciprocally continuous pair with no common fixed point",
        _cfg(
            space={"domain": "(0,1]"},
            maps={"A": "piece (0,1/3): 1 - 2*x; piece [1/3,1]: 1/6", "S": "piece (0,1/3]: x; piece (1/3,1]: 1/3"},
            phi={"body": "piece [0,100]: x/2"},
            inequality={"form": "phi_rational"},
            witness__left={"a": "1/3", "b": "-1", "n0": "8"},
            run={"x0": "1/6"},
        ),
        (
            {"id": "sweep_lenient", "check": "sweep", "zero_mode": "lenient", "expect": {"verdict": "pass"}},
            {"id": "sweep_strict", "check": "sweep", "zero_mode": "strict", "expect": {"verdict": "pass"}},
            {"id": "compatible_AS", "check": "compatible", "pair": "AS", "witness": "left", "expect": {"verdict": "pass"}},
            {
                "id": "reciprocal_AS",
                "check": "reciprocal",
                "pair": "AS",
                "witness": "left",
                "t": "1/3",
                "expect": {"verdict": "fail", "witness": {"limit": "1/3", "target": "1/6"}},
            },
            {"id": "solve_sixth", "check": "solve", "x0": "1/6", "expect": {"candidate": None, "termination": "stalled"}},
        ),
        (),
    ),
    ExampleBundle(
        "ex_3_7",
        "Reciprocally continuous pair that is neither compatible nor compatible of type (A)",
        _cfg(
            space={"domain": "[0,1/2]"},
            maps={"A": "piece [0,1/3]: 0; piece (1/3,1/2]: x", "S": "piece [0,1/3): 1/2; piece [1/3,1/2]: 1/2 - 1/2*x"},
            phi={"body": "piece [0,100]: x/2"},
            inequality={"form": "phi_rational"},
            witness__right={"a": "1/3", "b": "1", "n0": "8"},
            run={"x0": "0"},
        ),
        (
            {"id": "sweep_lenient", "check": "sweep", "zero_mode": "lenient", "expect": {"verdict": "pass"}},
            {"id": "sweep_strict", "check": "sweep", "zero_mode": "strict", "expect": {"verdict": "fail", "witness": {"status": "zero_branch_violated"}}},
            {"id": "compatible_AS", "check": "compatible", "pair": "AS", "witness": "right", "expect": {"verdict": "fail", "limits": {"d(SAx,ASx)": "1/3"}}},
            {"id": "type_a_AS", "check": "type_a", "pair": "AS", "witness": "right", "expect": {"verdict": "fail", "limits": {"d(ASx,SSx)": "1/2"}}},
            {"id": "reciprocal_AS", "check": "reciprocal", "pair": "AS", "witness": "right", "t": "1/3", "expect": {"verdict": "pass"}},
            {"id": "weak_AS", "check": "weakly_commuting", "pair": "AS", "samples": ["11/24"], "expect": {"verdict": "fail"}},
            {"id": "solve_zero", "check": "solve", "x0": "0", "expect": {"candidate": None, "termination": "stalled"}},
        ),
        (
            {"flag": "intermediate_expression", "note": "along x_n = 1/3 + 1/n the map S gives 1/3 - 1/(2n), not 1/3 - 1/n; the limits are unaffected"},
            {"flag": "witness_start", "note": "x_n = 1/3 + 1/n leaves [0,1/2] for n < 6, so the witness starts at n = 8"},
            {"flag": "zero_branch_conflict", "note": "A vanishes on [0,1/3] while S takes different values there"},
        ),
    ),
]

_BY_NAME = {b.name: b for b in _BUNDLES}


def list_examples() -> list[str]:
    return [b.name for b in _BUNDLES]


def load_example(name: str) -> ExampleBundle:
    try:
        return _BY_NAME[name]
    except KeyError:
        raise NotFound(f"no example named {name!r}; available: {', '.join(list_examples())}") from None


# ------------------------------------------------------------- verification


def _q(text) -> float:
    return float(as_rational(text))


def _close(observed, expected, tol) -> bool:
    if expected is None:
        return observed is None
    return observed is not None and abs(observed - _q(expected)) <= tol


class _Context:
    """Lazily built inputs for one bundle."""

    def __init__(self, bundle: ExampleBundle):
        self.cfg = bundle.config
        self.space = self.cfg.space()
        self.phi = self.cfg.phi_spec()
        self.family = self.cfg.map_family() if self.cfg.family else None
        self.witnesses = {w.name: w for w in self.cfg.witness_list()}

    def triple(self, member=None):
        if self.family is not None:
            return self.family.triple(member if member is not None else 1)
        return self.cfg.triple()

    def form(self, spec=None):
        return parse_form(spec, self.phi) if spec else self.cfg.form()

    def pair_maps(self, pair: str, member=None):
        t = self.triple(member)
        return t.A, (t.S if pair == "AS" else t.T)


def _check_value(ctx, e):
    v = eval_fn(getattr(ctx.triple(), e["map"]), _q(e["x"]))
    return {"value": v}, _close(v, e["expect"]["value"], VALUE_TOL)


def _check_rhs(ctx, e):
    v = rhs_value(ctx.form(e.get("form")), ctx.triple(), _q(e["x"]), _q(e["y"]))
    return {"value": v}, _close(v, e["expect"]["value"], VALUE_TOL)


def _check_solve(ctx, e):
    exp = e["expect"]
    cfg = ctx.cfg
    tol = float(e.get("tol", cfg.get("tol")))
    rep = solve_common_fixed_point(ctx.triple(e.get("member")), _q(e["x0"]), tol, int(e.get("max_n", cfg.get("max_n"))))
    trace = rep.trace
    obs: dict[str, Any] = {
        "candidate": rep.candidate,
        "termination": trace.termination.value,
        "iterations": rep.iterations,
        "reason": rep.reason,
    }
    ok = _close(rep.candidate, exp.get("candidate"), _q(exp.get("candidate_tol", VALUE_TOL)))
    if "termination" in exp:
        ok &= trace.termination.value == exp["termination"]
    if "cycle" in exp:
        obs["cycle"] = trace.detail.get("cycle")
        ok &= obs["cycle"] == [_q(c) for c in exp["cycle"]]
    if "reachable" in exp:
        obs["reachable"] = trace.reachable
        ok &= len(trace.reachable) == len(exp["reachable"]) and all(
            _close(a, b, VALUE_TOL) for a, b in zip(trace.reachable, exp["reachable"])
        )
    if "max_iterations" in exp:
        ok &= rep.iterations <= exp["max_iterations"]
    if "decay" in exp:
        decay = verify_decay(trace, ctx.phi)
        obs["decay"] = decay.verdict.value
        ok &= decay.verdict.value == exp["decay"]
    return obs, ok


def _grid(ctx, e, triple):
    pts = triple.grid(int(e.get("points", ctx.cfg.get("grid"))))
    if "restrict" in e:
        iv = Interval.parse(e["restrict"])
        pts = [x for x in pts if iv.contains(x)]
    return pts


def _witness_matches(witness, expected) -> bool:
    if witness is None:
        return False
    for key, val in expected.items():
        got = witness.get(key)
        if isinstance(got, str):
            if got != val:
                return False
        elif got is None or abs(got - _q(val)) > VALUE_TOL:
            return False
    return True


def _check_sweep(ctx, e):
    exp = e["expect"]
    triple = ctx.triple(e.get("member"))
    tol = float(e.get("tol", ctx.cfg.get("sweep_tol")))
    rep = sweep_grid(ctx.form(e.get("form")), triple, _grid(ctx, e, triple), tol, e.get("zero_mode", ctx.cfg.get("zero_mode")))
    obs = {"verdict": rep.verdict.value, "witness": rep.witness, "counts": rep.counts}
    ok = rep.verdict.value == exp["verdict"]
    if "witness" in exp:
        ok &= _witness_matches(rep.witness, exp["witness"])
    if "witness_near_zero" in exp:
        w = rep.witness or {}
        coords = sorted([w.get("x", 1e300), w.get("y", 1e300)])
        ok &= coords[0] == 0.0 and coords[1] <= _q(exp["witness_near_zero"])
    return obs, ok


def _check_pair(ctx, e):
    v = check_pair(ctx.form(e.get("form")), ctx.triple(), _q(e["x"]), _q(e["y"]), zero_mode=e.get("zero_mode", "strict"))
    return {"status": v.status.value, "lhs": v.lhs, "rhs": v.rhs}, v.status.value == e["expect"]["status"]


def _check_weak(ctx, e):
    A, S = ctx.pair_maps(e["pair"], e.get("member"))
    samples = [_q(s) for s in e["samples"]] if "samples" in e else ctx.triple().grid(int(ctx.cfg.get("grid")))
    rep = check_weakly_commuting(ctx.space, A, S, samples)
    return {"verdict": rep.verdict.value, "witness": rep.witness}, rep.verdict.value == e["expect"]["verdict"]


def _limit_check(fn):
    def run(ctx, e):
        A, S = ctx.pair_maps(e["pair"], e.get("member"))
        w = ctx.witnesses[e["witness"]]
        tol = float(ctx.cfg.get("limit_tol"))
        rep = fn(ctx.space, A, S, w, _q(e["t"]), tol) if "t" in e else fn(ctx.space, A, S, w, tol)
        limits = {k: v.get("extrapolated_limit") for k, v in rep.details.get("limits", {}).items()}
        obs = {"verdict": rep.verdict.value, "witness": rep.witness, "limits": limits}
        exp = e["expect"]
        ok = rep.verdict.value == exp["verdict"]
        for q, val in exp.get("limits", {}).items():
            ok &= _close(limits.get(q), val, LIMIT_TOL)
        if "witness" in exp:
            ok &= rep.witness is not None and all(_close(rep.witness.get(k), v, LIMIT_TOL) for k, v in exp["witness"].items())
        return obs, ok

    return run


def _check_uniqueness(ctx, e):
    rep = verify_uniqueness_pairwise(ctx.triple(), _q(e["u"]), _q(e["v"]), ctx.form())
    return {"verdict": rep.verdict.value, "message": rep.message}, rep.verdict.value == e["expect"]["verdict"]


def _check_phi_decay(ctx, e):
    rep = check_decay(ctx.phi, _q(e["t0"]), float(e["tol"]))
    return {"verdict": rep.verdict.value, "iterations": rep.details["iterations"]}, rep.verdict.value == e["expect"]["verdict"]


def _family_members(ctx):
    cfg = ctx.cfg
    probe = cfg.get("probe_x0")
    return solve_family(ctx.family, _q(cfg.get("x0")), cfg.ints("n_list"), float(cfg.get("tol")), int(cfg.get("max_n")),
                        _q(probe) if probe else None)


def _check_family_fixed(ctx, e):
    members = _family_members(ctx)
    obs = {"u": {str(m.n): m.u for m in members}, "probe_agrees": {str(m.n): m.unique_ok for m in members}}
    ok = all(_close(m.u, e["expect"]["u"], VALUE_TOL) and m.unique_ok is not False for m in members)
    return obs, ok


def _check_pointwise(ctx, e):
    grid = ctx.space.domain.components[0].sample(int(e["points"]))
    rep = check_pointwise_convergence(ctx.family, grid, float(e["tol"]), int(e["n_max"]))
    exp = e["expect"]
    obs = {"verdict": rep.verdict.value, "witness": rep.witness, "max_n0": rep.details["max_n0"]}
    ok = rep.verdict.value == exp["verdict"]
    if "max_n0" in exp:
        ok &= rep.details["max_n0"] == exp["max_n0"]
    if "witness" in exp:
        ok &= _witness_matches(rep.witness, exp["witness"])
    return obs, ok


def _check_transfer(ctx, e):
    members = _family_members(ctx)
    rep = check_limit_transfer(ctx.family, [(m.n, m.u) for m in members], float(ctx.cfg.get("tol")), _q(e["u"]))
    directions = sorted(rep.details.get("directions", {}))
    obs = {"verdict": rep.verdict.value, "directions": rep.details.get("directions"), "estimated_limit": rep.details["estimated_limit"]}
    ok = rep.verdict.value == e["expect"]["verdict"] and directions == e["expect"].get("directions", directions)
    return obs, ok


_CHECKS = {
    "value": _check_value,
    "rhs": _check_rhs,
    "solve": _check_solve,
    "sweep": _check_sweep,
    "pair": _check_pair,
    "weakly_commuting": _check_weak,
    "compatible": _limit_check(check_compatible),
    "type_a": _limit_check(check_compatible_type_a),
    "reciprocal": _limit_check(check_reciprocal_continuity),
    "uniqueness": _check_uniqueness,
    "phi_decay": _check_phi_decay,
    "family_fixed": _check_family_fixed,
    "pointwise": _check_pointwise,
    "transfer": _check_transfer,
}


@dataclass(frozen=True)
class BundleResult:
    name: str
    outcomes: tuple[dict, ...]
    discrepancies: tuple[dict, ...]

    @property
    def passed(self) -> bool:
        return all(o["reproduced"] for o in self.outcomes)

    def to_dict(self) -> dict:
        return to_jsonable(
            {
                "example": self.name,
                "passed": self.passed,
                "expectations": list(self.outcomes),
                "discrepancies": list(self.discrepancies),
            }
        )


def verify_bundle(bundle: ExampleBundle) -> BundleResult:
    """Run every expectation of a bundle and record whether each one was reproduced."""
    ctx = _Context(bundle)
    outcomes = []
    for e in bundle.expectations:
        observed, ok = _CHECKS[e["check"]](ctx, e)
        outcomes.append({"id": e["id"], "check": e["check"], "expected": e["expect"], "observed": observed, "reproduced": bool(ok)})
    return BundleResult(bundle.name, tuple(outcomes), bundle.discrepancies)


def verify_example(name: str) -> BundleResult:
    return verify_bundle(load_example(name))


