"""Quasi-discrete closure models and the closure/interior operators of a relation.

A model stores its points as dense indices ``0..n-1`` with a name table.  Point
sets are boolean numpy arrays of length ``n``; every operator here is a
vectorised bitset operation over the edge arrays.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ModelFormatError, UnknownPointError

__all__ = [
    "Direction",
    "Grid",
    "ClosureModel",
    "closure",
    "interior",
    "point_closure",
    "point_interior",
    "membership_characterization",
    "check_closure_axioms",
    "AxiomReport",
    "load_model",
    "save_model",
    "model_from_dict",
    "model_to_dict",
]


class Direction(enum.Enum):
    FWD = "fwd"
    BWD = "bwd"

    @property
    def converse(self) -> "Direction":
        return Direction.BWD if self is Direction.FWD else Direction.FWD

    @classmethod
    def parse(cls, value) -> "Direction":
        if isinstance(value, cls):
            return value
        text = str(value).strip().lower()
        if text in ("fwd", "forward", "+", "f"):
            return cls.FWD
        if text in ("bwd", "backward", "-", "b"):
            return cls.BWD
        raise ValueError(f"not a direction: {value!r}")


@dataclass(frozen=True)
class Grid:
    """Raster provenance of a model built from an image.

    Points are laid out row-major: point ``y * width + x`` is pixel ``(x, y)``.
    ``colors`` maps each atom name to the RGB triple it was read from.
    """

    width: int
    height: int
    colors: Mapping[str, tuple] = field(default_factory=dict)


def _csr(n, keys, values):
    order = np.lexsort((values, keys))
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, keys + 1, 1)
    np.cumsum(indptr, out=indptr)
    return indptr, values[order]


def _frozen(arr):
    arr.setflags(write=False)
    return arr


class ClosureModel:
    """A finite QdCM ``(X, C_R, V)``.

    ``points`` are opaque names; ``edges`` are pairs of names ``(a, b)``
    meaning ``b`` is in the forward closure of ``a``.  With ``symmetric=True``
    every edge is added in both directions.  Self-loops and duplicate edges are
    dropped since the closure is reflexive and depends only on the edge set.
    The model is immutable after construction.
    """

    def __init__(
        self,
        points: Sequence[str],
        edges: Iterable[tuple] = (),
        atoms: Mapping[str, Iterable] | None = None,
        *,
        symmetric: bool = False,
        grid: Grid | None = None,
    ):
        names = [str(p) for p in points]
        index = {}
        for i, name in enumerate(names):
            if name in index:
                raise ModelFormatError(f"duplicate point identifier {name!r}")
            index[name] = i
        pairs = []
        for edge in edges:
            try:
                a, b = edge
            except (TypeError, ValueError):
                raise ModelFormatError(f"malformed edge {edge!r}") from None
            pairs.append((self._lookup(index, a), self._lookup(index, b)))
        arr = np.array(pairs, dtype=np.int64).reshape(-1, 2)
        src, dst = arr[:, 0], arr[:, 1]
        if symmetric:
            src, dst = np.concatenate([src, dst]), np.concatenate([dst, src])
        valuation = {}
        for atom, members in (atoms or {}).items():
            mask = np.zeros(len(names), dtype=bool)
            for p in members:
                mask[self._lookup(index, p)] = True
            valuation[str(atom)] = mask
        self._build(names, index, src, dst, valuation, grid)

    @staticmethod
    def _lookup(index, p):
        if isinstance(p, (int, np.integer)) and not isinstance(p, bool):
            if 0 <= p < len(index):
                return int(p)
            raise UnknownPointError(p)
        try:
            return index[str(p)]
        except KeyError:
            raise UnknownPointError(p) from None

    @classmethod
    def from_arrays(cls, names, src, dst, valuation, grid=None) -> "ClosureModel":
        """Fast constructor from index arrays; no per-edge Python work."""
        self = cls.__new__(cls)
        names = [str(p) for p in names]
        index = {name: i for i, name in enumerate(names)}
        if len(index) != len(names):
            raise ModelFormatError("duplicate point identifiers")
        n = len(names)
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        if src.size and (src.min() < 0 or dst.min() < 0 or src.max() >= n or dst.max() >= n):
            raise ModelFormatError("edge endpoint out of range")
        val = {}
        for atom, mask in valuation.items():
            mask = np.asarray(mask, dtype=bool)
            if mask.shape != (n,):
                raise ModelFormatError(f"valuation of {atom!r} has wrong shape")
            val[str(atom)] = mask.copy()
        self._build(names, index, src, dst, val, grid)
        return self

    def _build(self, names, index, src, dst, valuation, grid):
        n = len(names)
        keep = src != dst
        src, dst = src[keep], dst[keep]
        if src.size:
            packed = np.unique(src * max(n, 1) + dst)
            src, dst = packed // max(n, 1), packed % max(n, 1)
        self.names = tuple(names)
        self._index = index
        self.n = n
        self.src = _frozen(src.astype(np.int64))
        self.dst = _frozen(dst.astype(np.int64))
        self.fwd_indptr, self.fwd_indices = map(_frozen, _csr(n, self.src, self.dst))
        self.bwd_indptr, self.bwd_indices = map(_frozen, _csr(n, self.dst, self.src))
        self.valuation = {a: _frozen(m) for a, m in sorted(valuation.items())}
        self.grid = grid

    # -- naming ----------------------------------------------------------

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"ClosureModel({self.n} points, {self.src.size} edges, atoms={list(self.valuation)})"

    @property
    def atoms(self) -> tuple:
        return tuple(self.valuation)

    @property
    def edge_count(self) -> int:
        return int(self.src.size)

    def index(self, p) -> int:
        return self._lookup(self._index, p)

    def name(self, i: int) -> str:
        return self.names[i]

    def mask(self, points) -> np.ndarray:
        """Turn a collection of point names/indices, or a mask, into a mask."""
        if isinstance(points, np.ndarray) and points.dtype == bool:
            if points.shape != (self.n,):
                raise ValueError(f"point set has shape {points.shape}, expected ({self.n},)")
            return points
        out = np.zeros(self.n, dtype=bool)
        for p in points:
            out[self.index(p)] = True
        return out

    def names_of(self, mask) -> list:
        return [self.names[i] for i in np.flatnonzero(self.mask(mask))]

    def atom(self, name: str) -> np.ndarray:
        return self.valuation[name]

    def atoms_of(self, p) -> tuple:
        i = self.index(p)
        return tuple(a for a, m in self.valuation.items() if m[i])

    def valuation_classes(self) -> np.ndarray:
        """Per-point label; two points share a label iff they satisfy the same atoms."""
        if not self.valuation:
            return np.zeros(self.n, dtype=np.int64)
        table = np.stack(list(self.valuation.values()), axis=1)
        _, inv = np.unique(table, axis=0, return_inverse=True)
        return inv.reshape(-1).astype(np.int64)

    def successors(self, i: int) -> np.ndarray:
        return self.fwd_indices[self.fwd_indptr[i]:self.fwd_indptr[i + 1]]

    def predecessors(self, i: int) -> np.ndarray:
        return self.bwd_indices[self.bwd_indptr[i]:self.bwd_indptr[i + 1]]

    def neighbours(self, i: int, direction) -> np.ndarray:
        if Direction.parse(direction) is Direction.FWD:
            return self.successors(i)
        return self.predecessors(i)

    def is_symmetric(self) -> bool:
        n = max(self.n, 1)
        fwd = np.sort(self.src * n + self.dst)
        bwd = np.sort(self.dst * n + self.src)
        return bool(np.array_equal(fwd, bwd))

    def edges(self) -> list:
        return [(self.names[a], self.names[b]) for a, b in zip(self.src.tolist(), self.dst.tolist())]


# -- operators ---------------------------------------------------------------


def closure(model: ClosureModel, A, direction=Direction.FWD) -> np.ndarray:
    """``A`` together with every point one step away from it in ``direction``."""
    A = model.mask(A)
    out = A.copy()
    if Direction.parse(direction) is Direction.FWD:
        out[model.dst[A[model.src]]] = True
    else:
        out[model.src[A[model.dst]]] = True
    return out


def interior(model: ClosureModel, A, direction=Direction.FWD) -> np.ndarray:
    A = model.mask(A)
    return ~closure(model, ~A, direction)


def point_closure(model: ClosureModel, x, direction=Direction.FWD) -> np.ndarray:
    i = model.index(x)
    out = np.zeros(model.n, dtype=bool)
    out[i] = True
    out[model.neighbours(i, direction)] = True
    return out


def point_interior(model: ClosureModel, x, direction=Direction.FWD) -> np.ndarray:
    i = model.index(x)
    return interior(model, np.eye(1, model.n, i, dtype=bool).ravel(), direction)


def membership_characterization(model: ClosureModel, x, A) -> bool:
    """Whether ``x`` lies in the forward closure of ``A``.

    Decided pointwise: ``x in C_fwd(A)`` iff ``C_bwd(x)`` meets ``A``.  Tests
    compare this against :func:`closure` as an independent route.
    """
    A = model.mask(A)
    return bool(np.any(point_closure(model, x, Direction.BWD) & A))


@dataclass
class AxiomReport:
    samples: int
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self):
        if self.ok:
            return f"closure axioms hold on {self.samples} samples"
        return f"{len(self.violations)} violation(s): " + "; ".join(self.violations[:5])


def check_closure_axioms(model: ClosureModel, samples: int = 64, seed: int = 0) -> AxiomReport:
    """Self-test of the closure operators on randomly drawn subsets.

    Checks C(empty) = empty, extensivity, additivity and the pointwise union
    law in both directions.
    """
    rng = np.random.default_rng(seed)
    report = AxiomReport(samples=samples)
    empty = np.zeros(model.n, dtype=bool)
    singles = {d: [point_closure(model, i, d) for i in range(model.n)] for d in Direction}
    for d in Direction:
        if closure(model, empty, d).any():
            report.violations.append(f"{d.value}: closure of empty set is not empty")
    for k in range(samples):
        A1 = rng.random(model.n) < 0.5
        A2 = rng.random(model.n) < 0.5
        for d in Direction:
            c1, c2 = closure(model, A1, d), closure(model, A2, d)
            if np.any(A1 & ~c1):
                report.violations.append(f"{d.value} sample {k}: A not contained in C(A)")
            if not np.array_equal(closure(model, A1 | A2, d), c1 | c2):
                report.violations.append(f"{d.value} sample {k}: C(A1 | A2) != C(A1) | C(A2)")
            pointwise = empty.copy()
            for i in np.flatnonzero(A1):
                pointwise |= singles[d][i]
            if not np.array_equal(pointwise, c1):
                report.violations.append(f"{d.value} sample {k}: C(A) != union of point closures")
    return report


# -- file format ---------------------------------------------------------------


def model_to_dict(model: ClosureModel) -> dict:
    names = model.names
    if model.is_symmetric():
        keep = model.src < model.dst
        pairs = zip(model.src[keep].tolist(), model.dst[keep].tolist())
        symmetric = True
    else:
        pairs = zip(model.src.tolist(), model.dst.tolist())
        symmetric = False
    doc = {
        "points": list(names),
        "edges": [[names[a], names[b]] for a, b in pairs],
        "symmetric": symmetric,
        "atoms": {a: model.names_of(m) for a, m in sorted(model.valuation.items())},
    }
    if model.grid is not None:
        doc["grid"] = {
            "width": model.grid.width,
            "height": model.grid.height,
            "colors": {a: "%02x%02x%02x" % tuple(c) for a, c in sorted(model.grid.colors.items())},
        }
    return doc


def model_from_dict(doc: Mapping) -> ClosureModel:
    if not isinstance(doc, Mapping) or "points" not in doc:
        raise ModelFormatError("model document needs a 'points' list")
    grid = None
    if doc.get("grid"):
        g = doc["grid"]
        colors = {a: tuple(bytes.fromhex(h)) for a, h in g.get("colors", {}).items()}
        grid = Grid(int(g["width"]), int(g["height"]), colors)
        if grid.width * grid.height != len(doc["points"]):
            raise ModelFormatError("grid size does not match point count")
    try:
        return ClosureModel(
            doc["points"],
            [tuple(e) for e in doc.get("edges", [])],
            doc.get("atoms", {}),
            symmetric=bool(doc.get("symmetric", False)),
            grid=grid,
        )
    except UnknownPointError as exc:
        raise ModelFormatError(f"unknown point name {exc.point!r}") from None


def load_model(path) -> ClosureModel:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f"{path}: {exc}") from None
    return model_from_dict(doc)


def save_model(model: ClosureModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh, indent=1)
        fh.write("\n")
