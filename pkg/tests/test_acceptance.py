"""End-to-end acceptance criteria, each at its stated tolerance. One PASS/FAIL line is printed per criterion."""

import random
import time
from fractions import Fraction

import pytest

from cfplab import corpus
from cfplab.cli import main
from cfplab.contraction import LambdaMax, PairStatus, PhaneendraLinear, PhiRationalTwoMap, check_pair, rhs_value, sweep_grid
from cfplab.dsl import canonical_format, eval_fn, parse_piecewise, preimage
from cfplab.errors import ZeroDenominator
from cfplab.families import check_limit_transfer, check_pointwise_convergence, solve_family
from cfplab.hypotheses import (
    WitnessSequence,
    check_compatible,
    check_compatible_type_a,
    check_reciprocal_continuity,
    check_weakly_commuting,
)
from cfplab.metric import check_metric_axioms
from cfplab.orbit import Termination, solve_common_fixed_point, verify_decay
from cfplab.phi import PhiSpec, check_decay

CFG = {name: corpus.load_example(name).config for name in corpus.list_examples()}
LEFT = WitnessSequence(Fraction(1, 3), -1, 8)
RIGHT = WitnessSequence(Fraction(1, 3), 1, 8)


@pytest.fixture
def report(capsys):
    def emit(number: int, failures: list[str]):
        line = f"criterion {number}: {'PASS' if not failures else 'FAIL'}"
        if failures:
            line += " (" + "; ".join(failures) + ")"
        with capsys.disabled():
            print("\n" + line)
        assert not failures, line

    return emit


def test_criterion_1_fixed_point_reproduction(report):
    triple = CFG["ex_3_4"].triple()
    phi = CFG["ex_3_4"].phi_spec()
    bad = []
    for x0 in (0.6, 0.75, 0.9):
        start = time.perf_counter()
        rep = solve_common_fixed_point(triple, x0, phi=phi)
        elapsed = time.perf_counter() - start
        if rep.candidate is None or abs(rep.candidate - 1) > 1e-9:
            bad.append(f"x0={x0}: candidate {rep.candidate}")
            continue
        if max(rep.residuals.values()) > 1e-9:
            bad.append(f"x0={x0}: residuals {rep.residuals}")
        if rep.iterations > 60:
            bad.append(f"x0={x0}: {rep.iterations} iterations")
        err = max(abs(s.Ax - (1 - 2.0 ** (1 - s.n) * (1 - x0))) for s in rep.trace.steps)
        if err > 1e-12:
            bad.append(f"x0={x0}: orbit error {err}")
        if elapsed >= 1.0:
            bad.append(f"x0={x0}: {elapsed:.2f}s")
    report(1, bad)


def test_criterion_2_counterexample(report):
    triple = CFG["ex_1_6"].triple()
    bad = []
    for x0 in (0.0, 1.0):
        trace = solve_common_fixed_point(triple, x0).trace
        if trace.termination is not Termination.OSCILLATING:
            bad.append(f"x0={x0}: {trace.termination.value}")
            continue
        # the images repeat after one S step and one T step taken twice: period 2 in S-T rounds
        if trace.detail["period_steps"] != 4 or trace.detail["cycle"] != [0.0, 1.0]:
            bad.append(f"x0={x0}: tail {trace.detail}")
    for B in (triple.S, triple.T):
        if not check_weakly_commuting(triple.space, triple.A, B, [0.0, 1.0]).passed:
            bad.append("weak commutativity fails")
    form = CFG["ex_1_6"].form()
    if check_pair(form, triple, 0.0, 0.0, zero_mode="strict").status is not PairStatus.ZERO_BRANCH_VIOLATED:
        bad.append("zero branch holds at (0,0)")
    report(2, bad)


def test_criterion_3_hypothesis_limits(report):
    tol = 1e-6
    bad = []

    def near(label, value, target):
        if abs(value - target) > tol:
            bad.append(f"{label}: {value} vs {target}")

    t = CFG["ex_3_3"].triple()
    comp = check_compatible(t.space, t.A, t.S, LEFT)
    near("3.3 compatibility", comp.details["limits"]["d(SAx,ASx)"]["extrapolated_limit"], 0)
    ta = check_compatible_type_a(t.space, t.A, t.S, LEFT)
    near("3.3 type (A)", ta.details["limits"]["d(AAx,SAx)"]["extrapolated_limit"], 1 / 6)

    t = CFG["ex_3_6"].triple()
    rc = check_reciprocal_continuity(t.space, t.A, t.S, LEFT, 1 / 3)
    near("3.6 lim ASx_n", rc.details["limits"]["AS"]["extrapolated_limit"], 1 / 3)
    near("3.6 A(1/3)", rc.details["limits"]["AS"]["target"], 1 / 6)

    t = CFG["ex_3_7"].triple()
    comp = check_compatible(t.space, t.A, t.S, RIGHT)
    near("3.7 compatibility", comp.details["limits"]["d(SAx,ASx)"]["extrapolated_limit"], 1 / 3)
    ta = check_compatible_type_a(t.space, t.A, t.S, RIGHT)
    near("3.7 type (A)", ta.details["limits"]["d(ASx,SSx)"]["extrapolated_limit"], 1 / 2)
    report(3, bad)


def test_criterion_4_inequality_sweeps(report):
    cfg = CFG["remark_3_2"]
    triple = cfg.triple()
    grid = triple.grid(200)
    bad = []
    if not sweep_grid(PhiRationalTwoMap(cfg.phi_spec()), triple, grid, tol=1e-12).passed:
        bad.append("phi sweep fails")
    for lam in (0.5, 0.9, 0.99):
        rep = sweep_grid(LambdaMax(lam), triple, grid)
        if rep.passed:
            bad.append(f"lambda={lam} passes")
        elif rep.witness["x"] > 1 / lam - 1:
            bad.append(f"lambda={lam}: witness {rep.witness}")
    report(4, bad)


def test_criterion_5_decay(report):
    bad = []
    runs = [
        ("ex_3_3", CFG["ex_3_3"].triple(), 1 / 6, {}),
        *(("ex_3_4", CFG["ex_3_4"].triple(), x0, {}) for x0 in (0.6, 0.75, 0.9)),
        ("ex_3_5", CFG["ex_3_5"].map_family().triple(1), 1 / 6, {}),
        ("remark_3_2", CFG["remark_3_2"].triple(), 1.0, {"tol_fix": 1e-4, "max_n": 100_000}),
    ]
    for name, triple, x0, kw in runs:
        phi = CFG[name].phi_spec()
        rep = solve_common_fixed_point(triple, x0, **kw)
        if rep.candidate is None:
            bad.append(f"{name} x0={x0}: not converged")
            continue
        dec = verify_decay(rep.trace, phi)
        if not dec.passed:
            bad.append(f"{name} x0={x0}: {dec.witness}")
    for body in ("piece [0,100]: x/2", "piece [0,100]: x/(1 + x)"):
        dec = check_decay(PhiSpec.parse(body), 1.0, 1e-9)
        if not dec.passed:
            bad.append(f"{body}: {dec.details}")
    report(5, bad)


def test_criterion_6_sequence_of_maps(report):
    cfg = CFG["ex_3_5"]
    fam = cfg.map_family()
    bad = []
    members = solve_family(fam, 1 / 6, [1, 2, 4, 8, 16])
    if any(m.u is None or abs(m.u - 1 / 3) > 1e-9 for m in members):
        bad.append(f"u_n = {[m.u for m in members]}")
    grid = fam.space.domain.components[0].sample(50)
    pw = check_pointwise_convergence(fam, grid, 1e-3, 16)
    if not pw.passed:
        bad.append(f"pointwise n0 <= 16 at tol 1e-3 fails: {pw.witness}")
    tr = check_limit_transfer(fam, [(m.n, m.u) for m in members], 1e-9, Fraction(1, 3))
    if not tr.passed or set(tr.details["directions"]) != {"forward", "backward"}:
        bad.append(f"limit transfer {tr.verdict.value} {tr.details['directions']}")
    report(6, bad)


def _random_fn(rng: random.Random):
    bodies = ["x", "2*x - 1/3", "1/2 - x", "x*x", "x/(1 + x)", "3/7", "-x*x + 1"]
    cuts = sorted({Fraction(rng.randint(1, 49), 50) for _ in range(rng.randint(0, 3))})
    edges = [Fraction(0), *cuts, Fraction(1)]
    parts = []
    for i, (lo, hi) in enumerate(zip(edges, edges[1:])):
        parts.append(f"piece {'[' if i == 0 else '('}{lo},{hi}]: {rng.choice(bodies)}")
    return parse_piecewise("; ".join(parts))


def _point(rng: random.Random, space):
    while True:
        iv = rng.choice(space.domain.components)
        x = rng.uniform(float(iv.lo), float(iv.hi))
        if space.domain.contains(x):
            return x


def test_criterion_7_property_suites(report):
    rng = random.Random(20240607)
    bad = []
    for name, cfg in CFG.items():
        space = cfg.space()
        for _ in range(1000):
            pts = [_point(rng, space) for _ in range(3)]
            if not check_metric_axioms(space, pts).passed:
                bad.append(f"metric axioms on {name} at {pts}")
                break
    for _ in range(1000):
        f = _random_fn(rng)
        y = eval_fn(f, rng.uniform(0, 1))
        root = preimage(f, y)
        if root is None or abs(eval_fn(f, root) - y) > 1e-12:
            bad.append(f"preimage of {y} under {canonical_format(f)}")
            break
    for cfg in CFG.values():
        texts = list(cfg.maps.values()) + ([cfg.phi] if cfg.phi else []) + ([cfg.family["base"]] if cfg.family else [])
        for text in texts:
            f = parse_piecewise(text)
            if canonical_format(parse_piecewise(canonical_format(f))) != canonical_format(f):
                bad.append(f"round trip of {text}")
    names = [n for n, c in CFG.items() if not c.family]
    triples = {n: CFG[n].triple() for n in names}
    violations, first = 0, None
    for _ in range(10_000):
        name = rng.choice(names)
        t = triples[name]
        alpha = rng.uniform(0, 0.99)
        beta, gamma = (rng.uniform(0, 0.999 * (1 - alpha)) for _ in range(2))
        x, y = _point(rng, t.space), _point(rng, t.space)
        try:
            lin = rhs_value(PhaneendraLinear(alpha, beta, gamma), t, x, y)
            lam = rhs_value(LambdaMax(alpha + max(beta, gamma)), t, x, y)
        except ZeroDenominator:
            continue
        if lin > lam * (1 + 1e-12) + 1e-15:
            violations += 1
            first = first or (name, x, y, alpha, beta, gamma, lin, lam)
    if violations:
        bad.append(f"linear-form dominance by alpha+max(beta,gamma) fails on {violations} pairs, first {first}")
    report(7, bad)


def test_criterion_8_determinism(report, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    codes = [main(["corpus-verify", "--out", str(d)]) for d in (a, b)]
    bad = [f"exit codes {codes}"] if codes != [0, 0] else []
    files_a = sorted(p.name for p in a.iterdir())
    files_b = sorted(p.name for p in b.iterdir())
    if files_a != files_b:
        bad.append("different report sets")
    for name in files_a:
        if (a / name).read_bytes() != (b / name).read_bytes():
            bad.append(f"{name} differs")
    report(8, bad)
