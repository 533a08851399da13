import pytest

from cfplab.dsl import parse_piecewise
from cfplab.errors import ArgumentError, DomainError
from cfplab.phi import PhiSpec, check_decay, decay_budget, decay_count, linear_phi, phi_iterates, validate_phi

HALF = "piece [0,100]: x/2"
SAT = "piece [0,100]: x/(1 + x)"
GRID = [0.01 * k for k in range(1, 1001)]


def test_validate_half_and_saturating():
    assert validate_phi(parse_piecewise(HALF), GRID).passed
    assert validate_phi(parse_piecewise(SAT), GRID).passed


def test_identity_fails_shrink():
    rep = validate_phi(parse_piecewise("piece [0,100]: x"), GRID)
    assert not rep.passed
    assert rep.witness["condition"] == "shrink"
    assert rep.witness["t"] == 0.01


def test_non_monotone_fails():
    f = parse_piecewise("piece [0,1]: x/2; piece (1,100]: 1/4")
    rep = validate_phi(f, GRID)
    assert rep.witness["condition"] == "monotone"


def test_negative_fails():
    rep = validate_phi(parse_piecewise("piece [0,100]: x/2 - 1"), GRID)
    assert rep.witness["condition"] == "nonnegative"


def test_grid_outside_domain():
    with pytest.raises(DomainError):
        validate_phi(parse_piecewise("piece [0,1]: x/2"), [0.5, 2.0])


def test_bad_grid():
    with pytest.raises(ArgumentError):
        validate_phi(parse_piecewise(HALF), [0.5, 0.2])


def test_parse_rejects_non_member():
    with pytest.raises(ArgumentError):
        PhiSpec.parse("piece [0,100]: x")


def test_slope_and_linear_phi():
    assert PhiSpec.parse(HALF).slope == 0.5
    assert PhiSpec.parse(SAT).slope is None
    assert float(linear_phi(0.9).slope) == 0.9


def test_iterates():
    half = PhiSpec.parse(HALF)
    assert phi_iterates(half, 1.0, 10).terms[-1] == 2.0**-10
    assert phi_iterates(PhiSpec.parse(SAT), 1.0, 9).terms[-1] == pytest.approx(0.1, abs=1e-15)
    assert phi_iterates(half, 1.0, 40).terms[-1] <= 1e-9


def test_iterates_need_positive_start():
    with pytest.raises(ArgumentError):
        phi_iterates(PhiSpec.parse(HALF), 0.0, 3)


def test_budgets():
    assert decay_budget(PhiSpec.parse(HALF), 1.0, 1e-9) == 200
    assert decay_budget(PhiSpec.parse(SAT), 1.0, 1e-6) == 1_000_000


def test_decay_count_geometric():
    n, v = decay_count(PhiSpec.parse(HALF), 1.0, 1e-9)
    assert n == 30 and v <= 1e-9


def test_decay_saturating_short_budget_fails():
    rep = check_decay(PhiSpec.parse(SAT), 1.0, 1e-6, n_max=1000)
    assert not rep.passed
    assert rep.witness["iterations"] == 1000


def test_lower_clips_at_domain_end():
    phi = PhiSpec.parse(HALF)
    assert phi.lower(500.0) == 50.0
    assert phi.lower(3.0) == 1.5
