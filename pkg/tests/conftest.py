import numpy as np
import pytest

from credo.text import load_stopwords

EINSTEIN_PARAGRAPH = (
    "In May 1946, Einstein made a rare public appearance outside of Princeton, "
    "New Jersey, when he traveled to the campus of Pennsylvania's Lincoln "
    "University, the United States' first degree-granting black university, to "
    "take part in a ceremony conferring upon him the honorary degree of doctor "
    "of laws."
)


@pytest.fixture(scope="session")
def stopwords():
    return load_stopwords()


@pytest.fixture()
def rng():
    return np.random.default_rng(20170902)
