"""Brute-force reference implementations used for differential testing.

Nothing here shares code with the numpy engine: point sets are Python int
bitmasks and every fixpoint is computed pairwise the slow, obvious way.  The
functions are only meant for models of a handful of points.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .bisim import BisimKind, Partition, compute_bisimilarity
from .errors import BudgetExceeded
from .logic import (
    FALSE,
    TRUE,
    And,
    Atom,
    NearBwd,
    NearFwd,
    Not,
    Or,
    ReachBwd,
    ReachFwd,
)
from .space import ClosureModel

__all__ = [
    "LOGIC_KIND",
    "enumerate_formulas",
    "logic_partition",
    "generating_formulas",
    "naive_bisim",
    "naive_reach_partition",
    "random_model",
    "random_corpus",
    "brute_min_zones",
    "brute_reach_witness",
    "agree",
    "Disagreement",
]

LOGIC_KIND = {"IML": BisimKind.CM, "IMLC": BisimKind.CMC, "ICRL": BisimKind.COPA}

_UNARY = {"IML": (NearFwd,), "IMLC": (NearFwd, NearBwd), "ICRL": ()}
_BINARY = {"IML": (), "IMLC": (), "ICRL": (ReachFwd, ReachBwd)}

MAX_DEPTH = 4
MAX_ATOMS = 2
MAX_POINTS = 10
MAX_PAIRWISE_POINTS = 32


def _logic(name):
    key = str(name).upper()
    if key not in LOGIC_KIND:
        raise ValueError(f"unknown logic {name!r}; use IML, IMLC or ICRL")
    return key


# -- bitmask model ------------------------------------------------------------


class _Bits:
    """Successor/predecessor bitmasks of a small model."""

    def __init__(self, model: ClosureModel, limit: int = MAX_POINTS):
        n = model.n
        if n > limit:
            raise BudgetExceeded(f"this oracle handles at most {limit} points, got {n}")
        self.n = n
        self.full = (1 << n) - 1
        self.succ = [0] * n
        self.pred = [0] * n
        for a, b in model.edges():
            i, j = model.index(a), model.index(b)
            self.succ[i] |= 1 << j
            self.pred[j] |= 1 << i
        self.atoms = {a: _to_bits(m) for a, m in model.valuation.items()}

    def near(self, mask, forward=True):
        out = mask
        step = self.succ if forward else self.pred
        for x in _members(mask):
            out |= step[x]
        return out

    def reach(self, target, via, forward=True):
        # x joins when it satisfies via and one step (forward) lands in the set
        step = self.succ if forward else self.pred
        s = target
        changed = True
        while changed:
            changed = False
            for x in _members(via & ~s & self.full):
                if step[x] & s:
                    s |= 1 << x
                    changed = True
        return s


def _to_bits(mask) -> int:
    return sum(1 << int(i) for i in np.flatnonzero(mask))


def _members(bits):
    i = 0
    while bits:
        if bits & 1:
            yield i
        bits >>= 1
        i += 1


# -- formula enumeration ------------------------------------------------------


def _syntactic_layers(atoms, logic, depth, budget):
    layer = [TRUE, FALSE]
    for a in atoms:
        layer += [Atom(a), Not(Atom(a))]
    layer += [And((f, g)) for f, g in itertools.combinations(layer[2:], 2)]
    yield from layer
    seen = set(layer)
    for _ in range(depth):
        new = []
        for f in layer:
            for op in _UNARY[logic]:
                new.append(op(f))
        for f, g in itertools.product(layer, repeat=2):
            for op in _BINARY[logic]:
                new.append(op(f, g))
        new += [Not(f) for f in new]
        new += [And((f, g)) for f, g in itertools.combinations(layer, 2)]
        fresh = []
        for f in new:
            if f not in seen:
                seen.add(f)
                fresh.append(f)
                if len(seen) > budget:
                    raise BudgetExceeded(f"formula enumeration exceeded {budget} formulas")
        yield from fresh
        layer = layer + fresh


class _Algebra:
    """Boolean algebra of point sets generated by a list of named sets."""

    def __init__(self, bits: _Bits, gens: dict):
        self.bits = bits
        self.gens = gens
        groups = {}
        masks = list(gens)
        for x in range(bits.n):
            sig = tuple((m >> x) & 1 for m in masks)
            groups.setdefault(sig, 0)
            groups[sig] |= 1 << x
        self.atoms = sorted(groups.values())
        self._sigs = {v: k for k, v in groups.items()}
        self._masks = masks

    def elements(self):
        for r in range(len(self.atoms) + 1):
            for combo in itertools.combinations(self.atoms, r):
                yield sum(combo)

    def atom_formula(self, atom):
        sig = self._sigs[atom]
        parts = [
            self.gens[m] if bit else Not(self.gens[m])
            for m, bit in zip(self._masks, sig)
        ]
        return parts[0] if len(parts) == 1 else And(tuple(parts)) if parts else TRUE

    def formula(self, element):
        parts = [self.atom_formula(a) for a in self.atoms if a & element]
        if not parts:
            return FALSE
        if element == self.bits.full:
            return TRUE
        return parts[0] if len(parts) == 1 else Or(tuple(parts))


def _semantic_layers(model, logic, depth, limit=MAX_POINTS, budget=None):
    bits = _Bits(model, limit)
    gens = {}
    for a in sorted(bits.atoms):
        gens.setdefault(bits.atoms[a], Atom(a))
    if not gens:
        gens[bits.full] = TRUE
    alg = _Algebra(bits, gens)
    yield alg
    for _ in range(depth):
        fresh = dict(gens)
        # both modal operators distribute over union in their first argument,
        # so applying them to the algebra's atoms is enough
        if _BINARY[logic] and budget is not None and len(alg.atoms) << len(alg.atoms) > budget:
            raise BudgetExceeded(f"{len(alg.atoms)} algebra atoms exceed the reachability budget")
        for a in alg.atoms:
            fa = alg.atom_formula(a)
            for op in _UNARY[logic]:
                mask = bits.near(a, op is NearFwd)
                if mask not in fresh:
                    fresh[mask] = op(fa)
            if _BINARY[logic]:
                for e in alg.elements():
                    for op in _BINARY[logic]:
                        mask = bits.reach(a, e, op is ReachFwd)
                        if mask not in fresh:
                            fresh[mask] = op(fa, alg.formula(e))
        gens = fresh
        alg = _Algebra(bits, gens)
        yield alg


def enumerate_formulas(atoms, logic, depth, model: ClosureModel | None = None, budget: int = 100_000):
    """Stream formulas of ``logic`` over ``atoms`` up to modal ``depth``.

    Without a model the stream is syntactic: literals and their pairwise
    conjunctions, then per layer one modality applied to earlier formulas,
    negations and pairwise conjunctions.  With a model, one formula per
    distinct denotation is produced, covering every set definable with
    finite Boolean combinations at that depth.
    """
    logic = _logic(logic)
    atoms = sorted(atoms)
    if depth > MAX_DEPTH:
        raise BudgetExceeded(f"depth {depth} exceeds the enumeration limit {MAX_DEPTH}")
    if len(atoms) > MAX_ATOMS:
        raise BudgetExceeded(f"{len(atoms)} atoms exceed the enumeration limit {MAX_ATOMS}")
    if model is None:
        yield from _syntactic_layers(atoms, logic, depth, budget)
        return
    *_, alg = _semantic_layers(model, logic, depth)
    for count, e in enumerate(alg.elements()):
        if count >= budget:
            raise BudgetExceeded(f"formula enumeration exceeded {budget} formulas")
        yield alg.formula(e)


def generating_formulas(model: ClosureModel, logic, depth: int, budget: int = 1 << 14) -> list:
    """Formulas whose Boolean combinations give every set of ``logic`` up to ``depth``.

    Any property that commutes with negation and conjunction, such as
    agreement between a model and its quotient, needs checking only on these.
    """
    logic = _logic(logic)
    if depth > MAX_DEPTH:
        raise BudgetExceeded(f"depth {depth} exceeds the enumeration limit {MAX_DEPTH}")
    *_, alg = _semantic_layers(model, logic, depth, MAX_PAIRWISE_POINTS, budget)
    return list(alg.gens.values())


def logic_partition(model: ClosureModel, logic, depth: int, budget: int = 1 << 20) -> Partition:
    """Points grouped by agreement on every formula of ``logic`` up to ``depth``.

    Only the distinct denotations are tracked, so any number of atoms is
    fine; the cost is bounded by the number of algebra elements fed to the
    reachability operators, which ``budget`` caps.
    """
    logic = _logic(logic)
    if depth > MAX_DEPTH:
        raise BudgetExceeded(f"depth {depth} exceeds the enumeration limit {MAX_DEPTH}")
    *_, alg = _semantic_layers(model, logic, depth, MAX_PAIRWISE_POINTS, budget)
    labels = np.zeros(model.n, dtype=np.int64)
    for b, atom in enumerate(alg.atoms):
        for x in _members(atom):
            labels[x] = b
    return Partition(labels)


# -- naive bisimilarity -------------------------------------------------------


def _closure_list(bits, x, forward):
    return [x] + list(_members((bits.succ if forward else bits.pred)[x]))


def _transfer_ok(bits, rel, kind, x1, x2):
    if kind is BisimKind.CM:
        dirs = [False]
    elif kind is BisimKind.CMC:
        dirs = [True, False]
    else:
        return _dbs_ok(bits, rel, x1, x2, True) and _dbs_ok(bits, rel, x1, x2, False)
    for forward in dirs:
        for a in _closure_list(bits, x1, forward):
            if not any((a, b) in rel for b in _closure_list(bits, x2, forward)):
                return False
    return True


def _dbs_ok(bits, rel, x1, x2, forward):
    # points y reachable from x2 while every point before the last stays
    # related to x1; the last point is any closure step from such a y
    inside = {x2}
    frontier = [x2]
    while frontier:
        y = frontier.pop()
        for z in _closure_list(bits, y, forward):
            if (x1, z) in rel and z not in inside:
                inside.add(z)
                frontier.append(z)
    ends = set()
    for y in inside:
        ends.update(_closure_list(bits, y, forward))
    return all(any((a, e) in rel for e in ends) for a in _closure_list(bits, x1, forward))


def _valuation_rel(model, bits):
    sig = [tuple((m >> x) & 1 for m in bits.atoms.values()) for x in range(bits.n)]
    return {(x, y) for x in range(bits.n) for y in range(bits.n) if sig[x] == sig[y]}


def _rel_partition(n, rel):
    return Partition([min(y for y in range(n) if (x, y) in rel) for x in range(n)])


def naive_bisim(model: ClosureModel, kind) -> Partition:
    """Greatest bisimulation by deleting failing pairs until none fail.

    CM and CMC follow the closure-based transfer conditions; COPA follows the
    stuttering-step condition, with the stuttering path found by search.
    """
    kind = BisimKind.parse(kind)
    bits = _Bits(model, MAX_PAIRWISE_POINTS)
    rel = _valuation_rel(model, bits)
    changed = True
    while changed:
        changed = False
        for x1, x2 in sorted(rel):
            if (x1, x2) in rel and not _transfer_ok(bits, rel, kind, x1, x2):
                rel.discard((x1, x2))
                rel.discard((x2, x1))
                changed = True
    return _rel_partition(bits.n, rel)


def _reach_ok(bits, rel, x1, x2, forward):
    def ends(start, guard):
        inside = {start}
        frontier = [start]
        while frontier:
            y = frontier.pop()
            for z in _closure_list(bits, y, forward):
                if guard(z) and z not in inside:
                    inside.add(z)
                    frontier.append(z)
        out = {start}
        for y in inside:
            out.update(_closure_list(bits, y, forward))
        return out

    ends1 = ends(x1, lambda z: (z, x2) in rel)
    ends2 = ends(x2, lambda z: (x1, z) in rel)
    return all(any((a, b) in rel for b in ends2) for a in ends1)


def _set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for sub in _set_partitions(rest):
        for i in range(len(sub)):
            yield sub[:i] + [[first] + sub[i]] + sub[i + 1:]
        yield [[first]] + sub


def naive_reach_partition(model: ClosureModel, budget: int = 200_000) -> Partition:
    """Coarsest partition whose relation satisfies the reachability form of
    CoPa-bisimulation, found by trying every partition finer than the
    valuation partition.

    Pairwise deletion would not do here: that condition is not monotone in the
    relation, since extra pairs add obligations as well as answers.
    """
    bits = _Bits(model)
    vrel = _valuation_rel(model, bits)
    classes = {}
    for x in range(bits.n):
        classes.setdefault(min(y for y in range(bits.n) if (x, y) in vrel), []).append(x)
    passing = []
    tried = 0
    for combo in itertools.product(*(_set_partitions(c) for c in classes.values())):
        tried += 1
        if tried > budget:
            raise BudgetExceeded(f"more than {budget} candidate partitions")
        blocks = [b for part in combo for b in part]
        rel = {(x, y) for b in blocks for x in b for y in b}
        if all(
            _reach_ok(bits, rel, x1, x2, True) and _reach_ok(bits, rel, x1, x2, False)
            for x1, x2 in rel
        ):
            passing.append(_rel_partition(bits.n, rel))
    coarsest = min(passing, key=len)
    if not all(p.refines(coarsest) for p in passing):
        raise AssertionError("passing partitions have no coarsest element")
    return coarsest


# -- paths --------------------------------------------------------------------


def brute_min_zones(seq1, seq2, rel) -> int | None:
    """Fewest zones over all pairs of monotone surjections, by enumeration."""
    l1, l2 = len(seq1) - 1, len(seq2) - 1
    for n_zones in range(1, min(l1, l2) + 2):
        for cuts1 in itertools.combinations(range(1, l1 + 1), n_zones - 1):
            zones1 = _zone_map(l1, cuts1)
            for cuts2 in itertools.combinations(range(1, l2 + 1), n_zones - 1):
                zones2 = _zone_map(l2, cuts2)
                if all(
                    rel(a, b)
                    for i, a in enumerate(seq1)
                    for j, b in enumerate(seq2)
                    if zones1[i] == zones2[j]
                ):
                    return n_zones
    return None


def _zone_map(length, cuts):
    out, zone = [], 1
    cut_set = set(cuts)
    for i in range(length + 1):
        if i in cut_set:
            zone += 1
        out.append(zone)
    return out


def brute_reach_witness(model: ClosureModel, x, target, via, forward=True):
    """A path from ``x`` ending in ``target`` with every earlier point in ``via``.

    Depth-first over simple paths of length at most the number of points.
    """
    target = model.mask(target)
    via = model.mask(via)
    start = model.index(x)
    nbr = model.successors if forward else model.predecessors

    def dfs(path):
        last = path[-1]
        if target[last]:
            return path
        if not via[last] or len(path) > model.n:
            return None
        for y in nbr(last).tolist():
            if y not in path:
                found = dfs(path + [y])
                if found:
                    return found
        return None

    return dfs([start])


# -- random models ------------------------------------------------------------


def random_model(n: int, density: float, seed: int, atoms=("a", "b")) -> ClosureModel:
    """Erdos-Renyi directed edges with probability ``density``; each atom
    holds at each point independently with probability 1/2."""
    rng = np.random.default_rng(seed)
    names = [f"s{i}" for i in range(n)]
    adj = rng.random((n, n)) < density
    np.fill_diagonal(adj, False)
    src, dst = np.nonzero(adj)
    valuation = {a: rng.random(n) < 0.5 for a in atoms}
    return ClosureModel.from_arrays(names, src, dst, valuation)


def random_corpus(count: int, seed: int, max_points: int = 8, max_atoms: int = 2):
    """Reproducible models of 1..max_points points and 0..max_atoms atoms."""
    rng = np.random.default_rng(seed)
    pool = ["a", "b", "c", "d"][:max_atoms]
    for i in range(count):
        n = int(rng.integers(1, max_points + 1))
        density = float(rng.choice([0.1, 0.2, 0.3, 0.4, 0.5]))
        k = int(rng.integers(0, max_atoms + 1))
        yield random_model(n, density, int(rng.integers(2**31)), atoms=tuple(pool[:k]))


# -- agreement ------------------------------------------------------------------


@dataclass(frozen=True)
class Disagreement:
    model: ClosureModel
    kind: BisimKind
    engine: Partition
    oracle: Partition


def agree(model: ClosureModel, kind) -> Disagreement | None:
    """Compare the engine against :func:`naive_bisim` on one model."""
    kind = BisimKind.parse(kind)
    engine = compute_bisimilarity(model, kind)
    oracle = naive_bisim(model, kind)
    return None if engine == oracle else Disagreement(model, kind, engine, oracle)
