import pytest
from hypothesis import strategies as st

from Auctioneer.modules.Distribution import DiscreteDistribution
from Auctioneer.modules.Revenue import ProductDistribution


def pytest_configure(config):
    config.addinivalue_line('markers', 'slow: statistical acceptance runs, selected with -m slow')


def pytest_collection_modifyitems(config, items):
    if config.option.markexpr:
        return

    skip = pytest.mark.skip(reason='slow; run with -m slow')
    for item in items:
        if 'slow' in item.keywords:
            item.add_marker(skip)


@st.composite
def distributions(draw, H: float = 1.0, maxSupport: int = 4, denominator: int = 16):
    """Discrete distributions on multiples of H/denominator with integer weights."""
    ticks = draw(st.lists(st.integers(0, denominator), min_size=1, max_size=maxSupport, unique=True))
    weights = draw(st.lists(st.integers(1, 5), min_size=len(ticks), max_size=len(ticks)))

    support = sorted(tick * H / denominator for tick in ticks)
    total = sum(weights)
    return DiscreteDistribution(support, [w / total for w in weights], H)


@st.composite
def products(draw, H: float = 1.0, maxBidders: int = 3, maxSupport: int = 4, denominator: int = 16):
    n = draw(st.integers(1, maxBidders))
    return ProductDistribution([draw(distributions(H, maxSupport, denominator)) for _ in range(n)])


@pytest.fixture
def uniformPair():
    """Two bidders uniform on {1, 2} with H = 2."""
    return ProductDistribution.iid(DiscreteDistribution.uniform([1.0, 2.0], 2.0), 2)


@pytest.fixture
def writeJson(tmp_path):
    """Writes a JSON document under tmp_path and returns its path as a string."""
    from Auctioneer.utils.files import JsonFile

    def write(name: str, data) -> str:
        path = tmp_path / name
        JsonFile(str(path)).writeJson(data)
        return str(path)

    return write
