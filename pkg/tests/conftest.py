import pytest

from storyevents.corpus.synth import build_reference_corpus, build_toy_corpus


@pytest.fixture(scope="session")
def toy_corpus():
    return build_toy_corpus(seed=0)


@pytest.fixture(scope="session")
def reference_corpus():
    return build_reference_corpus(seed=0)
