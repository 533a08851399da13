from fractions import Fraction

import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from cfplab import corpus
from cfplab.contraction import LambdaMax, PhaneendraLinear, rhs_value
from cfplab.dsl import Piece, PiecewiseFn, canonical_format, eval_fn, parse_expr, parse_piecewise, preimage
from cfplab.errors import ZeroDenominator
from cfplab.metric import Interval, MetricSpace, check_metric_axioms, detect_limit, tail_diameter
from cfplab.orbit import build_orbit
from cfplab.phi import PhiSpec, phi_iterates

def slow(n):
    return settings(max_examples=n, deadline=None, suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much])
CONFIGS = {name: corpus.load_example(name).config for name in corpus.list_examples()}
TRIPLES = {name: cfg.triple() for name, cfg in CONFIGS.items() if not cfg.family}


def _points(space: MetricSpace):
    def inside(iv: Interval):
        lo, hi = float(iv.lo), float(iv.hi)
        return st.floats(lo, hi, allow_nan=False).filter(space.domain.contains)

    return st.one_of([inside(iv) for iv in space.domain.components])


@pytest.mark.parametrize("name", list(CONFIGS))
def test_metric_axioms_on_corpus_spaces(name):
    space = CONFIGS[name].space()

    @slow(1000)
    @given(st.tuples(_points(space), _points(space), _points(space)))
    def check(xyz):
        assert check_metric_axioms(space, list(xyz)).passed

    check()


def _all_corpus_functions():
    out = []
    for cfg in CONFIGS.values():
        out.extend(cfg.maps.values())
        if cfg.phi:
            out.append(cfg.phi)
        if cfg.family:
            out.append(cfg.family["base"])
            fam = cfg.map_family()
            out.extend(canonical_format(fam.member(n)) for n in (1, 7))
    return out


@pytest.mark.parametrize("text", _all_corpus_functions())
def test_format_round_trip(text):
    f = parse_piecewise(text)
    g = parse_piecewise(canonical_format(f))
    assert canonical_format(g) == canonical_format(f)
    for iv in f.domain.components:
        for x in iv.sample(9):
            assert eval_fn(g, x) == eval_fn(f, x)


_BODIES = ["x", "2*x - 1/3", "1/2 - x", "x*x", "x/(1 + x)", "3/7", "-x*x + 1"]


@st.composite
def random_fn(draw):
    cuts = sorted(set(draw(st.lists(st.fractions(Fraction(1, 50), Fraction(49, 50), max_denominator=50), max_size=3))))
    edges = [Fraction(0), *cuts, Fraction(1)]
    pieces = []
    for i, (lo, hi) in enumerate(zip(edges, edges[1:])):
        iv = Interval(lo, hi, i == 0, True)
        pieces.append(Piece(iv, parse_expr(draw(st.sampled_from(_BODIES)))))
    return PiecewiseFn(tuple(pieces))


@slow(1000)
@given(random_fn(), st.floats(0, 1), st.sampled_from(["leftmost", "rightmost", "nearest"]))
def test_preimage_soundness(f, x, policy):
    y = eval_fn(f, x)
    root = preimage(f, y, policy, previous=0.5)
    assert root is not None
    assert 0 <= root <= 1
    assert abs(eval_fn(f, root) - y) <= 1e-12


def _linear_vs_lambda(name, alpha, beta, gamma, lam, data):
    triple = TRIPLES[name]
    x = data.draw(_points(triple.space))
    y = data.draw(_points(triple.space))
    try:
        lin = rhs_value(PhaneendraLinear(alpha, beta, gamma), triple, x, y)
        bound = rhs_value(LambdaMax(lam), triple, x, y)
    except ZeroDenominator:
        assume(False)
    assert lin <= bound * (1 + 1e-12) + 1e-15


DOMINANCE_EXAMPLES = st.sampled_from(["ex_3_3", "ex_3_4", "ex_3_6", "ex_3_7", "remark_3_2"])


@slow(2000)
@given(DOMINANCE_EXAMPLES, st.tuples(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1)), st.floats(0, 0.999), st.data())
def test_linear_form_below_sum_of_weights(name, raw, total, data):
    scale = total / max(sum(raw), 1e-9)
    alpha, beta, gamma = (scale * r for r in raw)
    _linear_vs_lambda(name, alpha, beta, gamma, alpha + beta + gamma, data)


@slow(2000)
@given(DOMINANCE_EXAMPLES, st.floats(0, 0.99), st.floats(0, 1), st.booleans(), st.data())
def test_linear_form_with_one_product_term_below_lambda_max(name, alpha, f, which, data):
    w = 0.999 * (1 - alpha) * f
    beta, gamma = (w, 0.0) if which else (0.0, w)
    _linear_vs_lambda(name, alpha, beta, gamma, alpha + w, data)


def test_alpha_plus_max_weight_does_not_dominate():
    # both product terms are large at (1, 2), so their weighted sum beats max{beta, gamma} * M
    triple = TRIPLES["remark_3_2"]
    lin = rhs_value(PhaneendraLinear(0.0, 0.9, 0.9), triple, 1.0, 2.0)
    lam = rhs_value(LambdaMax(0.9), triple, 1.0, 2.0)
    assert lin == pytest.approx(0.9 * (2 / 3 + 1 / 2))
    assert lam == pytest.approx(0.9)
    assert lin > lam


@given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=40))
def test_tail_diameter_shrinks_with_start(terms):
    diams = [tail_diameter(terms, k) for k in range(len(terms))]
    assert all(a >= b for a, b in zip(diams, diams[1:]))


@given(st.lists(st.floats(-10, 10), min_size=8, max_size=40), st.floats(1e-9, 1))
def test_detected_limit_window_is_tight(terms, tol):
    if detect_limit(terms, tol, 8) is not None:
        assert tail_diameter(terms[-8:]) <= 2 * tol


@given(st.sampled_from(["piece [0,100]: x/2", "piece [0,100]: x/(1 + x)"]), st.floats(1e-6, 100))
def test_phi_iterates_decrease(body, t0):
    terms = phi_iterates(PhiSpec.parse(body), t0, 30).terms
    assert all(b <= a for a, b in zip(terms, terms[1:]))
    assert all(b < a for a, b in zip(terms, terms[1:]) if a > 0)


@slow(200)
@given(st.sampled_from(["ex_3_3", "ex_3_4", "ex_3_7", "remark_3_2"]), st.data())
def test_orbit_alternation(name, data):
    triple = TRIPLES[name]
    x0 = data.draw(_points(triple.space))
    trace = build_orbit(triple, x0, max_n=50)
    prev = trace.x0
    for step in trace.steps:
        image = eval_fn(triple.S if step.n % 2 else triple.T, prev)
        assert step.applied == ("S" if step.n % 2 else "T")
        assert step.Ax == image
        assert abs(eval_fn(triple.A, step.x) - image) <= 1e-12
        prev = step.x
