import itertools

import numpy as np
import pytest

from qdcm.bisim import BisimKind, compute_bisimilarity
from qdcm.errors import BudgetExceeded
from qdcm.logic import evaluate, modal_depth
from qdcm.oracles import (
    LOGIC_KIND,
    agree,
    brute_min_zones,
    brute_reach_witness,
    enumerate_formulas,
    generating_formulas,
    logic_partition,
    naive_bisim,
    naive_reach_partition,
    random_corpus,
    random_model,
)
from qdcm.space import ClosureModel

from conftest import corpus


def test_random_models_are_reproducible():
    a, b = random_model(6, 0.3, 5), random_model(6, 0.3, 5)
    assert list(a.edges()) == list(b.edges())
    assert [m.n for m in random_corpus(10, 1)] == [m.n for m in random_corpus(10, 1)]


def test_corpus_bounds():
    for m in random_corpus(100, 3, max_points=5, max_atoms=2):
        assert 1 <= m.n <= 5 and len(m.valuation) <= 2


def test_edgeless_model_is_split_by_valuation_only():
    m = ClosureModel(["a", "b", "c", "d"], [], {"p": ["a", "b"], "q": ["b"]})
    for k in BisimKind:
        assert naive_bisim(m, k).block_of.tolist() == [0, 1, 2, 2]


def test_fig2_cm_agrees(fig2):
    assert naive_bisim(fig2, "cm") == compute_bisimilarity(fig2, "cm")


def test_fig5_copa_by_colour(fig5):
    assert naive_bisim(fig5, "copa").count == 2


def test_size_limit():
    with pytest.raises(BudgetExceeded):
        naive_bisim(random_model(33, 0.1, 0), "cm")
    with pytest.raises(BudgetExceeded):
        list(enumerate_formulas(["a"], "IML", 1, model=random_model(11, 0.2, 0, atoms=("a",))))


def test_enumeration_limits():
    with pytest.raises(BudgetExceeded):
        list(enumerate_formulas(["a"], "IML", 5))
    with pytest.raises(BudgetExceeded):
        list(enumerate_formulas(["a", "b", "c"], "IML", 1))
    with pytest.raises(ValueError):
        list(enumerate_formulas(["a"], "LTL", 1))


def test_syntactic_enumeration_respects_depth():
    fs = list(enumerate_formulas(["a"], "IMLC", 2))
    assert max(modal_depth(f) for f in fs) == 2
    assert len(set(fs)) == len(fs)


def test_semantic_enumeration_is_one_per_set(fig7):
    fs = list(enumerate_formulas(fig7.valuation, "ICRL", 2, model=fig7))
    sets = {evaluate(fig7, f).tobytes() for f in fs}
    assert len(sets) == len(fs)
    # the copa classes are {x,y,u} and {z,v}: four definable sets
    assert len(fs) == 4


@pytest.mark.parametrize("model", corpus(30, seed=31, max_points=6))
def test_logic_partition_matches_bisimilarity(model):
    for logic, kind in LOGIC_KIND.items():
        assert logic_partition(model, logic, 4) == compute_bisimilarity(model, kind)


@pytest.mark.parametrize("model", corpus(60, seed=32))
def test_engine_agrees_with_naive_checker(model):
    for kind in BisimKind:
        assert agree(model, kind) is None


@pytest.mark.parametrize("model", corpus(20, seed=33, max_points=6))
def test_reach_partition_is_copa(model):
    assert naive_reach_partition(model) == compute_bisimilarity(model, "copa")


def test_brute_zones():
    eq = lambda a, b: a == b
    assert brute_min_zones([0, 0, 1], [0, 1, 1], eq) == 2
    assert brute_min_zones([0], [1], eq) is None
    assert brute_min_zones([0, 1, 0], [0, 1, 0], eq) == 3


def test_brute_reach_witness(fig8):
    path = brute_reach_witness(fig8, "x4", fig8.atom("red"), fig8.atom("blue"))
    assert [fig8.names[i] for i in path] == ["x4", "x5", "x6"]
    assert brute_reach_witness(fig8, "x3", fig8.atom("red"), fig8.atom("blue")) is None


def test_logic_partition_on_larger_figures(fig2, fig7):
    iml = logic_partition(fig2, "IML", 3)
    i = fig2.index
    assert iml.same(i("x1"), i("x2")) and iml.same(i("x1"), i("x3"))
    assert logic_partition(fig7, "ICRL", 3).named_blocks(fig7) == [["x", "y", "u"], ["z", "v"]]


def test_logic_partition_budget():
    with pytest.raises(BudgetExceeded):
        logic_partition(random_model(20, 0.2, 1, atoms=("a", "b", "c")), "ICRL", 2, budget=100)


def _boolean_closure(masks, n):
    full = (1 << n) - 1
    sets = {0, full}
    for m in masks:
        sets |= {s & m for s in sets} | {s & ~m & full for s in sets}
    # close under union of the resulting cells
    cells = {s for s in sets if s}
    out = {0}
    for c in cells:
        out |= {o | c for o in out}
    return out


@pytest.mark.parametrize("model", corpus(15, seed=34, max_points=6))
def test_generators_span_the_enumeration(model):
    bits = lambda f: sum(1 << int(i) for i in np.flatnonzero(evaluate(model, f)))
    for logic in LOGIC_KIND:
        spanned = _boolean_closure([bits(f) for f in generating_formulas(model, logic, 2)], model.n)
        listed = {bits(f) for f in enumerate_formulas(model.valuation, logic, 2, model=model)}
        assert spanned == listed
