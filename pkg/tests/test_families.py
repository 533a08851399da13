import pytest

from cfplab.dsl import eval_fn, identity, parse_piecewise
from cfplab.errors import ArgumentError
from cfplab.families import MapFamily, PieceOverride, check_limit_transfer, check_pointwise_convergence, solve_family
from cfplab.metric import MetricSpace


@pytest.fixture(scope="module")
def fam35():
    from cfplab import corpus

    return corpus.load_example("ex_3_5").config.map_family()


def test_member_and_limit(fam35):
    assert eval_fn(fam35.member(1), 1.0) == pytest.approx(5 / 12 - 1 / 24)
    assert eval_fn(fam35.limit_map, 1.0) == pytest.approx(5 / 12)
    assert eval_fn(fam35.member(3), 0.5) == pytest.approx(1 / 3)
    with pytest.raises(ArgumentError):
        fam35.member(0)


def test_pointwise_needs_n0_42(fam35):
    grid = fam35.space.domain.components[0].sample(50)
    short = check_pointwise_convergence(fam35, grid, 1e-3, 16)
    assert not short.passed and short.witness["x"] == 1.0
    long = check_pointwise_convergence(fam35, grid, 1e-3, 64)
    assert long.passed and long.details["max_n0"] == 42


def test_members_share_fixed_point(fam35):
    members = solve_family(fam35, 1 / 6, [1, 2, 4, 8, 16], probe_x0=0.5)
    assert all(m.u == pytest.approx(1 / 3) for m in members)
    assert all(m.unique_ok for m in members)
    rep = check_limit_transfer(fam35, [(m.n, m.u) for m in members], 1e-9, 1 / 3)
    assert rep.passed
    assert set(rep.details["directions"]) == {"forward", "backward"}
    assert rep.details["A_jump_near_limit"] == pytest.approx(1 / 6)


def _scaled():
    sp = MetricSpace("[0,1]")
    return MapFamily(sp, parse_piecewise("piece [0,1]: x"), identity("[0,1]"), {0: PieceOverride(slope=(0, 1))})


def test_shrinking_slope_family_fails_first_nonzero_point():
    fam = _scaled()
    rep = check_pointwise_convergence(fam, [0.0, 0.5, 1.0], 1e-3, 16)
    assert not rep.passed and rep.witness["x"] == 0.5


def test_forward_mismatch():
    sp = MetricSpace("[0,1]")
    fam = MapFamily(sp, parse_piecewise("piece [0,1]: x"), identity("[0,1]"))
    pairs = [(n, 1 / 3 + 1 / n) for n in (1, 2, 4, 8, 16)]
    pairs = [(n, min(u, 1.0)) for n, u in pairs]
    rep = check_limit_transfer(fam, pairs, 1e-9, 0.5)
    assert not rep.passed


def test_inconclusive_without_settling_or_u():
    sp = MetricSpace("[0,1]")
    fam = MapFamily(sp, parse_piecewise("piece [0,1]: x"), identity("[0,1]"))
    rep = check_limit_transfer(fam, [(1, 0.1), (3, 0.9)], 1e-9)
    assert rep.verdict.value == "inconclusive"


def test_override_index_checked():
    sp = MetricSpace("[0,1]")
    with pytest.raises(ArgumentError):
        MapFamily(sp, parse_piecewise("piece [0,1]: x"), identity("[0,1]"), {3: PieceOverride()})
