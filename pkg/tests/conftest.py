import pytest

from cfplab import corpus


@pytest.fixture(scope="session")
def triples():
    """Triples (or S_1 triple for the family) of every built-in example, keyed by name."""
    out = {}
    for name in corpus.list_examples():
        cfg = corpus.load_example(name).config
        out[name] = cfg.map_family().triple(1) if cfg.family else cfg.triple()
    return out


@pytest.fixture(scope="session")
def ex33(triples):
    return triples["ex_3_3"]


@pytest.fixture(scope="session")
def ex34(triples):
    return triples["ex_3_4"]
