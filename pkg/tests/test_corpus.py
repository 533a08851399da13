import pytest

from cfplab import corpus
from cfplab.errors import NotFound

NAMES = ["ex_1_6", "remark_3_2", "ex_3_3", "ex_3_4", "ex_3_5", "ex_3_6", "ex_3_7"]


def test_listing():
    assert corpus.list_examples() == NAMES


def test_unknown_example():
    with pytest.raises(NotFound):
        corpus.load_example("ex_9_9")


def test_bundle_contents():
    b = corpus.load_example("ex_3_4")
    assert b.config.floats("x0") == [0.6, 0.75, 0.9]
    assert "[space]" in b.to_config()
    flags = {d["flag"] for name in NAMES for d in corpus.load_example(name).discrepancies}
    assert {"zero_branch_conflict", "oscillation_period", "orbit_continuation", "pointwise_n0_bound", "intermediate_expression", "witness_start"} <= flags


@pytest.mark.parametrize("name", NAMES)
def test_bundle_reproduces(name):
    res = corpus.verify_example(name)
    failed = [o for o in res.outcomes if not o["reproduced"]]
    assert res.passed, failed
    assert res.to_dict()["example"] == name
