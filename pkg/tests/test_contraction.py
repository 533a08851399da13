import math

import pytest

from cfplab.contraction import (
    JaggiTwoMap,
    LambdaMax,
    MapTriple,
    PairStatus,
    PhaneendraLinear,
    PhiProduct,
    PhiRational,
    PhiRationalSingle,
    PhiRationalTwoMap,
    check_pair,
    rhs_value,
    sweep_grid,
    verify_uniqueness_pairwise,
)
from cfplab.dsl import identity, parse_piecewise
from cfplab.errors import ArgumentError, DomainError, ZeroDenominator
from cfplab.metric import MetricSpace
from cfplab.phi import PhiSpec

HALF = PhiSpec.parse("piece [0,100]: x/2")
SAT = PhiSpec.parse("piece [0,100]: x/(1 + x)")


def _remark(domain="[0,10]"):
    sp = MetricSpace(domain)
    S = parse_piecewise(f"piece {domain}: x/(1 + x)")
    return MapTriple(sp, identity(domain), S, S)


def test_rhs_example_3_3(ex33):
    assert rhs_value(PhiRational(HALF), ex33, 0.1, 0.2) == pytest.approx(0.75, abs=1e-12)


def test_rhs_zero_denominator(ex33):
    with pytest.raises(ZeroDenominator):
        rhs_value(PhiRational(HALF), ex33, 0.5, 1.0)


def test_single_form_remark_pair():
    t = _remark()
    v = check_pair(PhiRationalSingle(SAT), t, 1.0, 2.0)
    assert v.status is PairStatus.HOLDS
    assert v.rhs >= 0.5
    assert v.lhs == pytest.approx(1 / 6)


def test_identity_is_not_contractive():
    sp = MetricSpace("[0,1]")
    I = identity("[0,1]")
    t = MapTriple(sp, I, I, I)
    v = check_pair(PhiRational(HALF), t, 0.2, 0.7)
    assert v.status is PairStatus.VIOLATED
    assert v.rhs == pytest.approx(0.25)


def test_zero_branch_examples(ex33, triples):
    v = check_pair(PhiRational(HALF), ex33, 0.5, 1.0, zero_mode="strict")
    assert v.status is PairStatus.ZERO_BRANCH_VIOLATED
    assert v.lhs == pytest.approx(1 / 12)
    assert check_pair(PhiRational(HALF), ex33, 0.5, 1.0, zero_mode="lenient").status is PairStatus.NOT_APPLICABLE
    ex16 = triples["ex_1_6"]
    v = check_pair(PhaneendraLinear(0.5, 0.25, 0.25), ex16, 0.0, 0.0)
    assert v.status is PairStatus.ZERO_BRANCH_VIOLATED and v.lhs == 1.0


def test_same_point_with_equal_maps_holds():
    t = _remark()
    for x in (0.0, 0.3, 7.0):
        assert check_pair(PhiRationalTwoMap(SAT), t, x, x).status is PairStatus.HOLDS


def test_product_form_has_no_zero_branch(ex33):
    v = check_pair(PhiProduct(HALF), ex33, 0.5, 1.0)
    assert v.status is PairStatus.HOLDS
    assert v.lhs == 0.0


def test_jaggi_single_division():
    t = _remark()
    form = JaggiTwoMap(0.25, 0.5)
    x, y = 2.0, 1.0
    sx, sy = x / (1 + x), y / (1 + y)
    expected = 0.25 * (x - sx) * (y - sy) / (x - y) + 0.5 * (x - y)
    assert rhs_value(form, t, x, y) == pytest.approx(expected)


def test_form_parameter_checks():
    with pytest.raises(ArgumentError):
        LambdaMax(1.0)
    with pytest.raises(ArgumentError):
        PhaneendraLinear(0.5, 0.5, 0.1)
    with pytest.raises(ArgumentError):
        JaggiTwoMap(0.6, 0.4)
    with pytest.raises(ArgumentError):
        PhiRational(PhiSpec(parse_piecewise("piece [0,1]: x")))


def test_triple_rejects_non_selfmap():
    sp = MetricSpace("[0,1]")
    with pytest.raises(DomainError):
        MapTriple(sp, identity("[0,1]"), parse_piecewise("piece [0,1]: x + 1"), identity("[0,1]"))


def test_sweep_remark_phi_passes():
    t = _remark()
    rep = sweep_grid(PhiRationalTwoMap(SAT), t, t.grid(200), tol=1e-12)
    assert rep.passed
    assert rep.counts["violated"] == 0


@pytest.mark.parametrize("lam", [0.5, 0.9, 0.99])
def test_sweep_remark_lambda_fails_near_zero(lam):
    t = _remark()
    rep = sweep_grid(LambdaMax(lam), t, t.grid(200))
    assert not rep.passed
    assert rep.witness["x"] == 0.0
    assert rep.witness["y"] <= 1 / lam - 1
    assert rep.witness == {"x": 0.0, "y": 0.001, "status": "violated", "lhs": rep.witness["lhs"], "rhs": rep.witness["rhs"]}


def test_sweep_ex34_lenient_core(ex34):
    grid = [x for x in ex34.grid(200) if 0.5 + 1e-12 <= x <= 1]
    assert sweep_grid(PhiRational(HALF), ex34, grid, zero_mode="lenient").passed


def test_sweep_counts_cover_all_ordered_pairs(ex33):
    grid = ex33.grid(20)
    rep = sweep_grid(PhiRational(HALF), ex33, grid, zero_mode="lenient")
    assert sum(rep.counts.values()) == len(set(grid)) ** 2


def test_sweep_needs_two_points(ex33):
    with pytest.raises(ArgumentError):
        sweep_grid(PhiRational(HALF), ex33, [0.5, 0.5])


def test_linear_phi_matches_lambda_max(ex33):
    phi = PhiSpec.parse("piece [0,1000000]: 3/4*x")
    for x, y in [(0.1, 0.2), (0.2, 0.9), (0.9, 0.35), (1.0, 0.05)]:
        a = check_pair(PhiRational(phi), ex33, x, y, zero_mode="lenient")
        b = check_pair(LambdaMax(0.75), ex33, x, y, zero_mode="lenient")
        assert a.status is b.status
        assert math.isclose(a.rhs, b.rhs, rel_tol=1e-12) or (math.isnan(a.rhs) and math.isnan(b.rhs))


def test_capped_bound_violation_raises():
    sp = MetricSpace("[0,1]")
    I = identity("[0,1]")
    tiny = PhiSpec.parse("piece [0,1/100]: x/2")
    with pytest.raises(DomainError):
        check_pair(PhiRational(tiny), MapTriple(sp, I, I, I), 0.0, 1.0)


def test_uniqueness_forced_for_distinct_fixed_points():
    sp = MetricSpace("[0,1]")
    I = identity("[0,1]")
    t = MapTriple(sp, I, I, I)
    rep = verify_uniqueness_pairwise(t, 0.2, 0.8, PhiRational(HALF))
    assert rep.passed
    assert verify_uniqueness_pairwise(t, 0.2, 0.8, PhiProduct(HALF)).passed


def test_uniqueness_not_fixed_probe(ex34):
    rep = verify_uniqueness_pairwise(ex34, 1.0, 0.8, PhiRational(HALF))
    assert rep.verdict.value == "not_fixed"
    assert rep.message == "NotFixed(v)"


def test_uniqueness_inconclusive_when_inequality_holds():
    sp = MetricSpace("[0,1]")
    I = identity("[0,1]")
    t = MapTriple(sp, I, I, I)
    assert verify_uniqueness_pairwise(t, 0.2, 0.8, PhaneendraLinear(0.0, 0.0, 0.0)).verdict.value == "pass"
    weak = PhiSpec.parse("piece [0,100]: 99/100*x")
    assert verify_uniqueness_pairwise(t, 0.2, 0.8, PhiRational(weak), tol=0.01).verdict.value == "inconclusive"
