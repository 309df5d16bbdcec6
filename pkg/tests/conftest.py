import numpy as np
import pytest

from qdcm import figures
from qdcm.oracles import random_corpus


@pytest.fixture
def fig2():
    return figures.cm_example()


@pytest.fixture
def fig3():
    return figures.closure_interior_example()


@pytest.fixture
def fig4():
    return figures.imlc_grid()


@pytest.fixture
def fig5():
    return figures.king_grid_5x5()


@pytest.fixture
def fig7():
    return figures.copa_example()


@pytest.fixture
def fig8():
    return figures.icrl_example()


@pytest.fixture
def fig9():
    return figures.line3()


def names(model, mask):
    return set(model.names_of(mask))


def corpus(count, seed, max_points=8):
    """Figure models (where small enough) followed by seeded random ones."""
    figs = [f() for f in figures.BUNDLED.values()]
    return [m for m in figs if m.n <= max_points] + list(random_corpus(count, seed, max_points))


def random_mask(rng, n):
    return rng.random(n) < 0.5
