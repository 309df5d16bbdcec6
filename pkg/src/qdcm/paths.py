"""Finite forward/backward paths and path compatibility.

Two paths are compatible with respect to a relation when both can be cut into
the same positive number of consecutive non-empty zones such that every point
of a zone in one path is related to every point of the corresponding zone in
the other.  :func:`compatible` decides this by dynamic programming over zone
boundaries and returns matching functions for the fewest zones.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import InvalidPathError, PathMismatchError
from .space import ClosureModel, Direction

__all__ = [
    "Path",
    "MatchingWitness",
    "MAX_PATH_LENGTH",
    "make_path",
    "parse_path",
    "format_path",
    "concat",
    "shift",
    "prefix",
    "compatible",
    "zones",
    "stutter_reduce",
]

MAX_PATH_LENGTH = 2**31 - 2


@dataclass(frozen=True)
class Path:
    """A validated path; ``seq`` holds point indices ``x_0 .. x_l``."""

    direction: Direction
    seq: tuple

    @property
    def length(self) -> int:
        return len(self.seq) - 1

    @property
    def first(self) -> int:
        return self.seq[0]

    @property
    def last(self) -> int:
        return self.seq[-1]

    def __len__(self):
        return len(self.seq)

    def __getitem__(self, i):
        return self.seq[i]

    def names(self, model: ClosureModel) -> list:
        return [model.names[i] for i in self.seq]


@dataclass(frozen=True)
class MatchingWitness:
    """Zone numbers for every position of two compatible paths.

    ``first_zones[i]`` is the zone of position ``i`` of the first path; both
    sequences start at 1, grow by at most 1 per step and end at ``zones``.
    """

    zones: int
    first_zones: tuple
    second_zones: tuple

    def check(self, p1: Path, p2: Path, rel: Callable[[int, int], bool]) -> bool:
        """Re-verify every witness invariant against the two paths."""
        for h, p in ((self.first_zones, p1), (self.second_zones, p2)):
            if len(h) != len(p.seq) or h[0] != 1 or h[-1] != self.zones:
                return False
            if any(b - a not in (0, 1) for a, b in zip(h, h[1:])):
                return False
        return all(
            rel(a, b)
            for i, a in enumerate(p1.seq)
            for j, b in enumerate(p2.seq)
            if self.first_zones[i] == self.second_zones[j]
        )


def _step_ok(model: ClosureModel, direction: Direction, a: int, b: int) -> bool:
    if a == b:
        return True
    return bool(np.any(model.neighbours(a, direction) == b))


def make_path(model: ClosureModel, direction, seq: Sequence) -> Path:
    """Validate ``seq`` as a path: each point is in the closure of its predecessor."""
    direction = Direction.parse(direction)
    if len(seq) == 0:
        raise InvalidPathError(0, "a path needs at least one point")
    if len(seq) - 1 > MAX_PATH_LENGTH:
        raise InvalidPathError(MAX_PATH_LENGTH + 1, "path too long")
    idx = tuple(model.index(p) for p in seq)
    for j in range(1, len(idx)):
        if not _step_ok(model, direction, idx[j - 1], idx[j]):
            raise InvalidPathError(
                j, f"invalid step at index {j}: {model.names[idx[j - 1]]} -> {model.names[idx[j]]}"
            )
    return Path(direction, idx)


def parse_path(model: ClosureModel, text: str) -> Path:
    """Read ``"fwd: x1 x1 x2"`` or ``"bwd: z y x"``."""
    head, sep, body = text.partition(":")
    if not sep:
        raise ValueError(f"path text needs a 'fwd:' or 'bwd:' prefix: {text!r}")
    return make_path(model, Direction.parse(head), body.split())


def format_path(model: ClosureModel, path: Path) -> str:
    return f"{path.direction.value}: " + " ".join(path.names(model))


def concat(p1: Path, p2: Path) -> Path:
    if p1.direction is not p2.direction:
        raise PathMismatchError("cannot concatenate paths of different directions")
    if p1.last != p2.first:
        raise PathMismatchError("first path must end where the second starts")
    if p1.length + p2.length > MAX_PATH_LENGTH:
        raise InvalidPathError(MAX_PATH_LENGTH + 1, "path too long")
    return Path(p1.direction, p1.seq + p2.seq[1:])


def _check_k(p: Path, k: int):
    if not 0 <= k <= p.length:
        raise IndexError(f"k={k} outside [0, {p.length}]")


def shift(p: Path, k: int) -> Path:
    _check_k(p, k)
    return Path(p.direction, p.seq[k:])


def prefix(p: Path, k: int) -> Path:
    _check_k(p, k)
    return Path(p.direction, p.seq[: k + 1])


def compatible(p1: Path, p2: Path, rel: Callable[[int, int], bool]) -> MatchingWitness | None:
    """Matching functions with the fewest zones, or ``None`` if incompatible.

    ``rel`` is a symmetric predicate on point indices.  States ``(i, j)`` count
    how many points of each path the zones so far have consumed; a zone step
    ``(i, j) -> (i2, j2)`` is allowed when the rectangle of pairs is all related.
    Among minimal witnesses the boundary sequence is lexicographically least,
    comparing positions in ``p1`` before ``p2``.
    """
    if p1.direction is not p2.direction:
        raise PathMismatchError("paths have different directions")
    n1, n2 = len(p1.seq), len(p2.seq)
    bad = np.array([[not rel(a, b) for b in p2.seq] for a in p1.seq], dtype=np.int64)
    # 2-D prefix sums: rectangle [i, i2) x [j, j2) is all related iff its bad-count is 0
    ps = np.zeros((n1 + 1, n2 + 1), dtype=np.int64)
    ps[1:, 1:] = bad.cumsum(0).cumsum(1)

    def clean(i, j, i2, j2):
        return ps[i2, j2] - ps[i, j2] - ps[i2, j] + ps[i, j] == 0

    # distance (in zones) from each state to the goal, computed backwards
    INF = n1 + n2 + 1
    dist = np.full((n1 + 1, n2 + 1), INF, dtype=np.int64)
    dist[n1, n2] = 0
    for i in range(n1 - 1, -1, -1):
        for j in range(n2 - 1, -1, -1):
            best = INF
            for i2 in range(i + 1, n1 + 1):
                if not clean(i, j, i2, j + 1):
                    break
                for j2 in range(j + 1, n2 + 1):
                    if not clean(i, j, i2, j2):
                        break
                    d = dist[i2, j2]
                    if d + 1 < best:
                        best = d + 1
            dist[i, j] = best
    if dist[0, 0] >= INF:
        return None

    first, second = [0] * n1, [0] * n2
    i = j = 0
    zone = 0
    while (i, j) != (n1, n2):
        zone += 1
        step = None
        for i2 in range(i + 1, n1 + 1):
            if not clean(i, j, i2, j + 1):
                break
            for j2 in range(j + 1, n2 + 1):
                if not clean(i, j, i2, j2):
                    break
                if dist[i2, j2] == dist[i, j] - 1:
                    step = (i2, j2)
                    break
            if step:
                break
        i2, j2 = step
        first[i:i2] = [zone] * (i2 - i)
        second[j:j2] = [zone] * (j2 - j)
        i, j = i2, j2
    return MatchingWitness(zone, tuple(first), tuple(second))


def zones(p: Path, block_of) -> int:
    """Number of maximal runs of consecutive points lying in one block."""
    blocks = [block_of[x] for x in p.seq]
    return 1 + sum(1 for a, b in zip(blocks, blocks[1:]) if a != b)


def stutter_reduce(seq: Sequence) -> tuple:
    """Collapse consecutive repeats: ``(a, a, b, a) -> (a, b, a)``."""
    out = []
    for v in seq:
        if not out or out[-1] != v:
            out.append(v)
    return tuple(out)

