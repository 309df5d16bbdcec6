"""Bisimilarity of closure models by partition refinement.

Three equivalences are supported:

* ``CM``: points agree on atoms and on which blocks their backward closure meets.
* ``CMC``: as CM, looking at both the forward and the backward closure.
* ``COPA``: divergence-blind stuttering equivalence in both directions, which
  coincides with path-compatibility bisimilarity on finite models.

Refinement starts from the valuation partition and splits blocks by a per-point
signature until nothing changes.  Every round is kept, so that a formula
separating two points can be read back from the round that split them.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

from .errors import BudgetExceeded, NotSymmetricError, PartitionError
from .logic import (
    TRUE,
    And,
    Atom,
    Formula,
    NearBwd,
    NearFwd,
    Not,
    ReachBwd,
    ReachFwd,
)
from .space import ClosureModel, Direction, interior

__all__ = [
    "BisimKind",
    "Partition",
    "Refinement",
    "BisimCheck",
    "refine",
    "compute_bisimilarity",
    "relation_matrix",
    "is_bisimulation",
    "is_reach_bisimulation",
    "quotient",
    "distinguishing_formula",
]


class BisimKind(enum.Enum):
    CM = "cm"
    CMC = "cmc"
    COPA = "copa"

    @classmethod
    def parse(cls, value) -> "BisimKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ValueError(f"unknown bisimulation kind {value!r}; use cm, cmc or copa") from None


class Partition:
    """An equivalence on points ``0..n-1`` with canonical block ids.

    Blocks are numbered ``0..k-1`` in order of their smallest member, so two
    partitions are equal exactly when their ``block_of`` arrays are.
    """

    __slots__ = ("block_of", "count")

    def __init__(self, labels):
        labels = np.asarray(labels)
        if labels.size == 0:
            block_of = np.zeros(0, dtype=np.int64)
        else:
            _, first, inv = np.unique(labels, return_index=True, return_inverse=True)
            rank = np.empty(first.size, dtype=np.int64)
            rank[np.argsort(first, kind="stable")] = np.arange(first.size)
            block_of = rank[inv.reshape(-1)]
        block_of.setflags(write=False)
        self.block_of = block_of
        self.count = int(block_of.max()) + 1 if block_of.size else 0

    @classmethod
    def discrete(cls, n: int) -> "Partition":
        return cls(np.arange(n))

    @classmethod
    def from_blocks(cls, n: int, blocks) -> "Partition":
        labels = np.full(n, -1, dtype=np.int64)
        for b, members in enumerate(blocks):
            for x in members:
                if labels[x] != -1:
                    raise PartitionError(f"point {x} appears in two blocks")
                labels[x] = b
        if (labels < 0).any():
            raise PartitionError(f"point {int(np.flatnonzero(labels < 0)[0])} is in no block")
        return cls(labels)

    def __len__(self):
        return self.count

    def __eq__(self, other):
        return isinstance(other, Partition) and np.array_equal(self.block_of, other.block_of)

    def __hash__(self):
        return hash(self.block_of.tobytes())

    def __repr__(self):
        return f"Partition({self.count} blocks over {self.block_of.size} points)"

    def blocks(self) -> list:
        """Member index arrays, one per block in id order."""
        order = np.argsort(self.block_of, kind="stable")
        cuts = np.searchsorted(self.block_of[order], np.arange(1, self.count))
        return np.split(order, cuts)

    def same(self, x: int, y: int) -> bool:
        return bool(self.block_of[x] == self.block_of[y])

    def refines(self, other: "Partition") -> bool:
        """Whether every block of ``self`` lies inside a block of ``other``."""
        pairs = np.unique(self.block_of * max(other.count, 1) + other.block_of)
        return pairs.size == self.count

    def named_blocks(self, model: ClosureModel) -> list:
        return [[model.names[i] for i in members] for members in self.blocks()]

    def to_text(self, model: ClosureModel) -> str:
        lines = [f"block {b}: " + " ".join(names) for b, names in enumerate(self.named_blocks(model))]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, model: ClosureModel, text: str) -> "Partition":
        """Read lines ``block <id>: <point> <point> ...``."""
        blocks = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            head, sep, body = line.partition(":")
            if not sep or not head.startswith("block"):
                raise PartitionError(f"line {lineno}: expected 'block <id>: <points>'")
            blocks.append([model.index(p) for p in body.split()])
        return cls.from_blocks(model.n, blocks)


def _valuation_partition(model: ClosureModel) -> Partition:
    return Partition(model.valuation_classes())


def _rows_to_tuples(owner, values, n, width):
    """Per owner in ``0..n-1``, the sorted tuple of distinct ``values``."""
    codes = np.unique(owner * width + values)
    own, val = codes // width, codes % width
    cuts = np.searchsorted(own, np.arange(1, n))
    return [tuple(chunk.tolist()) for chunk in np.split(val, cuts)]


def _label(keys) -> np.ndarray:
    ids = {}
    return np.fromiter((ids.setdefault(k, len(ids)) for k in keys), dtype=np.int64, count=len(keys))


def _cm_round(model, part, converse_too):
    n, k = model.n, max(part.count, 1)
    blk = part.block_of
    pts = np.arange(n)
    # blocks met by the backward closure of each point
    bwd = _rows_to_tuples(
        np.concatenate([pts, model.dst]), np.concatenate([blk, blk[model.src]]), n, k
    )
    if not converse_too:
        return _label(list(zip(blk.tolist(), bwd)))
    fwd = _rows_to_tuples(
        np.concatenate([pts, model.src]), np.concatenate([blk, blk[model.dst]]), n, k
    )
    return _label(list(zip(blk.tolist(), fwd, bwd)))


def _copa_round(model, part, symmetric):
    n, k = model.n, max(part.count, 1)
    blk = part.block_of
    src, dst = model.src, model.dst
    inert = blk[src] == blk[dst]
    g = sparse.csr_matrix(
        (np.ones(int(inert.sum()), dtype=np.int8), (src[inert], dst[inert])), shape=(n, n)
    )
    ncomp, comp = connected_components(g, directed=True, connection="strong")
    comp = comp.astype(np.int64)
    exits = ~inert
    t_f = _rows_to_tuples(comp[src[exits]], blk[dst[exits]], ncomp, k)
    t_b = _rows_to_tuples(comp[dst[exits]], blk[src[exits]], ncomp, k)
    if not symmetric:
        t_f, t_b = _propagate(ncomp, comp[src[inert]], comp[dst[inert]], t_f, t_b)
    comp_blk = np.empty(ncomp, dtype=np.int64)
    comp_blk[comp] = blk
    comp_key = _label(list(zip(comp_blk.tolist(), t_f, t_b)))
    return comp_key[comp]


def _propagate(ncomp, a, b, t_f, t_b):
    # inert steps between distinct strongly connected components form a DAG;
    # forward exits flow back from successors, backward entries from predecessors
    keep = a != b
    edges = np.unique(a[keep] * ncomp + b[keep])
    a, b = (edges // ncomp).tolist(), (edges % ncomp).tolist()
    succ = [[] for _ in range(ncomp)]
    indeg = [0] * ncomp
    for u, v in zip(a, b):
        succ[u].append(v)
        indeg[v] += 1
    order = [u for u in range(ncomp) if indeg[u] == 0]
    for u in order:
        for v in succ[u]:
            indeg[v] -= 1
            if indeg[v] == 0:
                order.append(v)
    fs = [set(t) for t in t_f]
    bs = [set(t) for t in t_b]
    for u in reversed(order):
        for v in succ[u]:
            fs[u] |= fs[v]
    for u in order:
        for v in succ[u]:
            bs[v] |= bs[u]
    return [tuple(sorted(s)) for s in fs], [tuple(sorted(s)) for s in bs]


@dataclass(frozen=True)
class Refinement:
    """Final partition plus the partition after every round (round 0 = atoms)."""

    kind: BisimKind
    partition: Partition
    history: tuple = field(repr=False)

    @property
    def rounds(self) -> int:
        return len(self.history) - 1


def refine(model: ClosureModel, kind) -> Refinement:
    kind = BisimKind.parse(kind)
    part = _valuation_partition(model)
    history = [part]
    if model.n == 0:
        return Refinement(kind, part, tuple(history))
    symmetric = kind is BisimKind.COPA and model.is_symmetric()
    while True:
        if kind is BisimKind.COPA:
            labels = _copa_round(model, part, symmetric)
        else:
            labels = _cm_round(model, part, kind is BisimKind.CMC)
        nxt = Partition(labels)
        if nxt.count == part.count:
            break
        part = nxt
        history.append(part)
    return Refinement(kind, part, tuple(history))


def compute_bisimilarity(model: ClosureModel, kind) -> Partition:
    """The coarsest ``kind``-bisimulation, as a canonical partition."""
    return refine(model, kind).partition


# -- relation checkers -------------------------------------------------------


@dataclass(frozen=True)
class BisimCheck:
    """Outcome of a relation check; falsy when a clause fails.

    ``pair`` is the least offending pair of point indices, ``clause`` the
    failing condition (1 = atoms, 2 = forward, 3 = backward) and ``witness``
    the point, atom or path that shows the failure.
    """

    ok: bool
    pair: tuple | None = None
    clause: int | None = None
    witness: object = None

    def __bool__(self):
        return self.ok

    def describe(self, model: ClosureModel) -> str:
        if self.ok:
            return "ok"
        a, b = (model.names[i] for i in self.pair)
        w = self.witness
        if isinstance(w, (int, np.integer)):
            w = model.names[w]
        elif isinstance(w, tuple):
            w = " ".join(model.names[i] for i in w)
        return f"pair ({a}, {b}) violates clause {self.clause}: {w}"


def relation_matrix(model: ClosureModel, rel) -> np.ndarray:
    """Boolean ``n x n`` matrix from pairs of points, a Partition, or a matrix."""
    n = model.n
    if isinstance(rel, Partition):
        b = rel.block_of
        return b[:, None] == b[None, :]
    if isinstance(rel, np.ndarray) and rel.dtype == bool:
        if rel.shape != (n, n):
            raise ValueError(f"relation matrix has shape {rel.shape}, expected {(n, n)}")
        return rel
    mat = np.zeros((n, n), dtype=bool)
    for a, b in rel:
        mat[model.index(a), model.index(b)] = True
    return mat


def _symmetric(mat):
    if not np.array_equal(mat, mat.T):
        i, j = map(int, np.argwhere(mat != mat.T)[0])
        raise NotSymmetricError(f"relation is not symmetric at pair ({i}, {j})")


def _atom_table(model):
    if not model.valuation:
        return np.zeros((model.n, 0), dtype=bool)
    return np.stack(list(model.valuation.values()), axis=1)


def _atom_clash(model, table, x1, x2):
    diff = np.flatnonzero(table[x1] != table[x2])
    return model.atoms[diff[0]] if diff.size else None


def _min_neighbourhood(model, x, direction):
    # least S with x in the interior of S: z belongs to it iff removing z
    # alone already takes x out of the interior
    n = model.n
    out = np.zeros(n, dtype=bool)
    for z in range(n):
        rest = np.ones(n, dtype=bool)
        rest[z] = False
        out[z] = not interior(model, rest, direction)[x]
    return out


def _closure_row(model, x, direction):
    row = np.zeros(model.n, dtype=bool)
    row[x] = True
    row[model.neighbours(x, direction)] = True
    return row


def is_bisimulation(model: ClosureModel, rel, kind, clauses: str | None = None, budget: int = 200_000) -> BisimCheck:
    """Check ``rel`` clause by clause against one definition of ``kind``.

    ``clauses`` selects the definition: ``"interior"`` (default for CM and CMC)
    or ``"closure"``; for COPA ``"paths"`` (default, compatible paths) or
    ``"dbs"`` (stuttering steps).  ``budget`` bounds the path-clause search.
    """
    kind = BisimKind.parse(kind)
    mat = relation_matrix(model, rel)
    _symmetric(mat)
    if clauses is None:
        clauses = "paths" if kind is BisimKind.COPA else "interior"
    allowed = ("paths", "dbs") if kind is BisimKind.COPA else ("interior", "closure")
    if clauses not in allowed:
        raise ValueError(f"clauses for {kind.value} must be one of {allowed}")
    table = _atom_table(model)
    if kind is BisimKind.COPA:
        checks = []
    elif clauses == "interior":
        # neighbourhoods of the forward interior, then of the backward interior
        checks = [(2, Direction.FWD), (3, Direction.BWD)]
    else:
        # CM looks at backward closures only; CMC at forward then backward
        checks = [(2, Direction.FWD), (3, Direction.BWD)]
        if kind is BisimKind.CM:
            checks = [(2, Direction.BWD)]
    if kind is BisimKind.CM:
        checks = checks[:1]
    hoods = {}

    def hood(x, d):
        if (x, d) not in hoods:
            if clauses == "interior":
                hoods[x, d] = _min_neighbourhood(model, x, d)
            else:
                hoods[x, d] = _closure_row(model, x, d)
        return hoods[x, d]

    for x1, x2 in np.argwhere(mat).tolist():
        clash = _atom_clash(model, table, x1, x2)
        if clash is not None:
            return BisimCheck(False, (x1, x2), 1, clash)
        if kind is BisimKind.COPA:
            for clause, d in ((2, Direction.FWD), (3, Direction.BWD)):
                if clauses == "paths":
                    bad = _unmatched_path(model, mat, x1, x2, d, budget)
                else:
                    bad = _dbs_failure(model, mat, x1, x2, d)
                if bad is not None:
                    return BisimCheck(False, (x1, x2), clause, bad)
            continue
        for clause, d in checks:
            n1, n2 = hood(x1, d), hood(x2, d)
            if clauses == "interior":
                # every point of x2's minimal neighbourhood needs a partner in x1's
                lacking = np.flatnonzero(n2 & ~mat[n1].any(axis=0))
            else:
                lacking = np.flatnonzero(n1 & ~mat[:, n2].any(axis=1))
            if lacking.size:
                return BisimCheck(False, (x1, x2), clause, int(lacking[0]))
    return BisimCheck(True)


def _reach_inside(model, start, allowed, direction):
    """Points reachable from ``start`` by steps that stay inside ``allowed``."""
    seen = np.zeros(model.n, dtype=bool)
    if not allowed[start]:
        return seen
    seen[start] = True
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in model.neighbours(u, direction).tolist():
            if allowed[v] and not seen[v]:
                seen[v] = True
                queue.append(v)
    return seen


def _step_closure(model, mask, direction):
    out = mask.copy()
    idx = np.flatnonzero(mask)
    for u in idx.tolist():
        out[model.neighbours(u, direction)] = True
    return out


def _dbs_failure(model, mat, x1, x2, direction):
    # answers from x2: stay related to x1, then take one step (or none)
    ends = _step_closure(model, _reach_inside(model, x2, mat[x1], direction), direction)
    ends[x2] = True
    for t in np.flatnonzero(_closure_row(model, x1, direction)).tolist():
        if not (mat[t] & ends).any():
            return t
    return None


def _unmatched_path(model, mat, x1, x2, direction, budget):
    """A path from ``x1`` with no compatible path from ``x2``, or ``None``.

    Explores every path from ``x1`` at once.  A partial match is a triple
    ``(P, W, y)``: the points still allowed in the open zone of the other
    path given the first path's zone (``P``), the points allowed to join the
    first path's open zone (``W``) and the other path's current end ``y``.
    A prefix has a compatible partner iff its set of partial matches is
    non-empty; stutter steps never shrink that set, so only proper steps
    of the first path are explored.
    """
    rows = [sum(1 << j for j in np.flatnonzero(mat[i]).tolist()) for i in range(model.n)]
    nbrs = [model.neighbours(i, direction).tolist() for i in range(model.n)]

    def saturate(states):
        # grow the other path inside its open zone
        todo = list(states)
        seen = set(states)
        while todo:
            p_ok, w_ok, y = todo.pop()
            for z in nbrs[y]:
                if p_ok >> z & 1:
                    s = (p_ok, w_ok & rows[z], z)
                    if s not in seen:
                        seen.add(s)
                        todo.append(s)
        return frozenset(seen)

    if not mat[x1, x2]:
        return (x1,)
    start = (x1, saturate({(rows[x1], rows[x2], x2)}))
    parent = {start: None}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        x, states = node
        for x_next in nbrs[x]:
            nxt = set()
            for p_ok, w_ok, y in states:
                if w_ok >> x_next & 1:
                    nxt.add((p_ok & rows[x_next], w_ok, y))
                for z in [y] + nbrs[y]:
                    if rows[x_next] >> z & 1:
                        nxt.add((rows[x_next], rows[z], z))
            child = (x_next, saturate(nxt) if nxt else frozenset())
            if child in parent:
                continue
            parent[child] = node
            if not child[1]:
                path = []
                cur = child
                while cur is not None:
                    path.append(cur[0])
                    cur = parent[cur]
                return tuple(reversed(path))
            if len(parent) > budget:
                raise BudgetExceeded(f"path search explored more than {budget} configurations")
            queue.append(child)
    return None


def is_reach_bisimulation(model: ClosureModel, rel) -> BisimCheck:
    """Check ``rel`` against the reachability form of CoPa-bisimulation.

    For each related ``(x1, x2)`` and each direction, every point reachable
    from ``x1`` through points related to ``x2`` (plus one last step) must be
    related to some point reachable likewise from ``x2`` through points
    related to ``x1``.  The relation is used as given, without adding
    identity pairs.
    """
    mat = relation_matrix(model, rel)
    _symmetric(mat)
    table = _atom_table(model)
    for x1, x2 in np.argwhere(mat).tolist():
        clash = _atom_clash(model, table, x1, x2)
        if clash is not None:
            return BisimCheck(False, (x1, x2), 1, clash)
        for clause, d in ((2, Direction.FWD), (3, Direction.BWD)):
            ends1 = _step_closure(model, _reach_inside(model, x1, mat[:, x2], d), d)
            ends1[x1] = True
            ends2 = _step_closure(model, _reach_inside(model, x2, mat[x1], d), d)
            ends2[x2] = True
            lacking = np.flatnonzero(ends1 & ~mat[:, ends2].any(axis=1))
            if lacking.size:
                return BisimCheck(False, (x1, x2), clause, int(lacking[0]))
    return BisimCheck(True)


# -- quotient ---------------------------------------------------------------


def quotient(model: ClosureModel, partition: Partition):
    """Collapse each block to one point ``B<id>``.

    Returns ``(model, members)`` where ``members`` maps each block name to its
    point names.  Edges between distinct blocks are kept when some member
    edge connects them; edges inside a block are dropped.
    """
    if partition.block_of.size != model.n:
        raise PartitionError("partition and model have different point counts")
    blk = partition.block_of
    k = partition.count
    valuation = {}
    for atom, mask in model.valuation.items():
        hits = np.bincount(blk, weights=mask, minlength=k)
        sizes = np.bincount(blk, minlength=k)
        mixed = np.flatnonzero((hits > 0) & (hits < sizes))
        if mixed.size:
            raise PartitionError(f"block {int(mixed[0])} is not uniform on atom {atom!r}")
        valuation[atom] = hits > 0
    names = [f"B{b}" for b in range(k)]
    src, dst = blk[model.src], blk[model.dst]
    keep = src != dst
    q = ClosureModel.from_arrays(names, src[keep], dst[keep], valuation)
    members = dict(zip(names, partition.named_blocks(model)))
    return q, members


# -- distinguishing formulas --------------------------------------------------


class _Explainer:
    """Builds formulas from a refinement history.

    ``block_formula(r, c)`` denotes exactly block ``c`` of round ``r``.  ``split(s, c, d)``
    holds on all of block ``c`` and on none of block ``d`` of round ``s``,
    where the two blocks were one block in round ``s - 1``.
    """

    def __init__(self, model: ClosureModel, ref: Refinement):
        self.model = model
        self.kind = ref.kind
        self.history = ref.history
        self.reps = [np.unique(p.block_of, return_index=True)[1] for p in ref.history]
        self.table = _atom_table(model)
        self._block_formulas = {}
        self._split = {}

    def block_formula(self, r, c) -> Formula:
        key = (r, c)
        if key not in self._block_formulas:
            part = self.history[r]
            parts = []
            for d in range(part.count):
                if d != c:
                    f = self.separate(r, c, d)
                    if f not in parts:
                        parts.append(f)
            self._block_formulas[key] = TRUE if not parts else parts[0] if len(parts) == 1 else And(tuple(parts))
        return self._block_formulas[key]

    def separate(self, r, c, d) -> Formula:
        x, y = int(self.reps[r][c]), int(self.reps[r][d])
        s = next(s for s in range(r + 1) if not self.history[s].same(x, y))
        b = self.history[s].block_of
        return self.split(s, int(b[x]), int(b[y]))

    def split(self, s, c, d) -> Formula:
        key = (s, c, d)
        if key in self._split:
            return self._split[key]
        x, y = int(self.reps[s][c]), int(self.reps[s][d])
        if s == 0:
            atom = _atom_clash(self.model, self.table, x, y)
            f = Atom(atom) if self.table[x, self.model.atoms.index(atom)] else Not(Atom(atom))
        else:
            sx, sy = self.signature(s - 1, x), self.signature(s - 1, y)
            extra = sorted(sx - sy)
            if extra:
                f = self.modal(s - 1, x, extra[0])
            else:
                f = Not(self.modal(s - 1, y, sorted(sy - sx)[0]))
        self._split[key] = f
        return f

    def signature(self, r, x) -> set:
        m = self.model
        b = self.history[r].block_of
        if self.kind is BisimKind.CM:
            return {("b", int(b[z])) for z in np.flatnonzero(_closure_row(m, x, Direction.BWD))}
        if self.kind is BisimKind.CMC:
            return {("f", int(b[z])) for z in np.flatnonzero(_closure_row(m, x, Direction.FWD))} | {
                ("b", int(b[z])) for z in np.flatnonzero(_closure_row(m, x, Direction.BWD))
            }
        out = set()
        own = b == b[x]
        for tag, d in (("f", Direction.FWD), ("b", Direction.BWD)):
            inside = _reach_inside(m, x, own, d)
            reached = _step_closure(m, inside, d)
            out |= {(tag, int(e)) for e in np.unique(b[reached & ~own])}
        return out

    def modal(self, r, x, item) -> Formula:
        tag, e = item
        target = self.block_formula(r, e)
        if self.kind is BisimKind.COPA:
            via = self.block_formula(r, int(self.history[r].block_of[x]))
            return ReachFwd(target, via) if tag == "f" else ReachBwd(target, via)
        # x meets block e looking backwards: x is in the forward closure of e
        return NearFwd(target) if tag == "b" else NearBwd(target)


def distinguishing_formula(model: ClosureModel, x, y, kind) -> Formula | None:
    """A formula true at ``x`` and false at ``y``, or ``None`` if they are bisimilar.

    CM answers use only ``N+``; CMC answers ``N+`` and ``N-``; COPA answers
    ``reach+`` and ``reach-``.
    """
    i, j = model.index(x), model.index(y)
    ref = refine(model, kind)
    if ref.partition.same(i, j):
        return None
    ex = _Explainer(model, ref)
    r = ref.rounds
    b = ref.partition.block_of
    return ex.separate(r, int(b[i]), int(b[j]))
