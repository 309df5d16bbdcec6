"""Small worked-example models used by the tests, demos and command line.

Each function returns a fresh :class:`~qdcm.space.ClosureModel`.  The same
models ship as JSON under ``qdcm/data`` for the command line.
"""

from __future__ import annotations

import json
from importlib import resources

from .space import ClosureModel, model_from_dict

__all__ = [
    "closure_interior_example",
    "cm_example",
    "imlc_grid",
    "king_grid_5x5",
    "copa_example",
    "icrl_example",
    "line3",
    "bundled",
    "BUNDLED",
]


def closure_interior_example() -> ClosureModel:
    """Sixteen points on a lattice with a directed relation; ``A`` is atom ``red``."""
    points = ["s15", "s14", "s24", "s22", "s36", "s35", "s34", "s33",
              "s32", "s42", "s43", "s44", "s45", "s55", "s54", "s53"]
    edges = [
        ("s24", "s15"), ("s14", "s24"), ("s24", "s34"), ("s35", "s45"),
        ("s34", "s44"), ("s34", "s35"), ("s34", "s33"), ("s34", "s33"),
        ("s33", "s22"), ("s32", "s42"), ("s32", "s33"), ("s45", "s55"),
        ("s44", "s45"), ("s44", "s54"), ("s43", "s34"), ("s43", "s42"),
        ("s53", "s43"), ("s54", "s53"),
    ]
    red = ["s24", "s35", "s34", "s33", "s43", "s44", "s45"]
    return ClosureModel(points, edges, {"red": red})


def cm_example() -> ClosureModel:
    """Two groups of small trees: ``x1, x2, x3`` are CM- but not all CMC-bisimilar."""
    points = ["x1", "y1", "x2", "y2", "z2", "x3", "y3",
              "t1", "u1", "v1", "t2", "u2", "v2", "t3", "v3"]
    edges = [
        ("x1", "y1"), ("x2", "y2"), ("x2", "z2"), ("x3", "y3"),
        ("t1", "v1"), ("u1", "v1"), ("t2", "v2"), ("u2", "v2"), ("t3", "v3"),
    ]
    atoms = {
        "red": ["x1", "x2", "x3", "v1", "v2", "v3"],
        "blue": ["y1", "y2", "z2", "t2"],
        "green": ["y3", "u1", "u2", "t1", "t3"],
    }
    return ClosureModel(points, edges, atoms)


def imlc_grid() -> ClosureModel:
    """A 4x4 grid of points ``1..16`` with a directed spiral-like relation."""
    points = [str(i) for i in range(1, 17)]
    edges = [
        (1, 2), (2, 3), (3, 4),
        (6, 5), (7, 6), (8, 7),
        (9, 10), (10, 11), (11, 12),
        (14, 13), (15, 14), (16, 15),
        (1, 5), (5, 9), (9, 13),
        (14, 10), (10, 6), (6, 2),
        (3, 7), (7, 11), (11, 15),
        (16, 12), (12, 8), (8, 4),
    ]
    atoms = {
        "red": ["1", "2", "5", "6"],
        "green": ["3", "4", "7", "8"],
        "blue": ["9", "10", "13", "14"],
        "orange": ["11", "12", "15", "16"],
    }
    return ClosureModel(points, [(str(a), str(b)) for a, b in edges], atoms)


def king_grid_5x5() -> ClosureModel:
    """Points ``1..25`` row by row, 8-adjacent, green border around a red 3x3 core."""
    points = [str(i) for i in range(1, 26)]
    edges = []
    for r in range(5):
        for c in range(5):
            for dr, dc in ((0, 1), (1, -1), (1, 0), (1, 1)):
                rr, cc = r + dr, c + dc
                if 0 <= rr < 5 and 0 <= cc < 5:
                    edges.append((str(5 * r + c + 1), str(5 * rr + cc + 1)))
    red = [str(5 * r + c + 1) for r in range(1, 4) for c in range(1, 4)]
    green = [p for p in points if p not in red]
    return ClosureModel(points, edges, {"green": green, "red": red}, symmetric=True)


def copa_example() -> ClosureModel:
    """Chain ``x -> y -> z`` beside ``u -> v``: CoPa- but not CMC-bisimilar starts."""
    return ClosureModel(
        ["x", "y", "z", "u", "v"],
        [("x", "y"), ("y", "z"), ("u", "v")],
        {"red": ["x", "y", "u"], "green": ["z", "v"]},
    )


def icrl_example() -> ClosureModel:
    """A forked chain ``x1..x9`` used to illustrate conditional reachability."""
    points = [f"x{i}" for i in range(1, 10)]
    edges = [("x1", "x2"), ("x2", "x3"), ("x3", "x4"), ("x4", "x5"), ("x5", "x6"),
             ("x2", "x7"), ("x7", "x8"), ("x8", "x9")]
    atoms = {
        "red": ["x1", "x2", "x6", "x7"],
        "green": ["x3"],
        "blue": ["x4", "x5", "x8", "x9"],
    }
    return ClosureModel(points, edges, atoms)


def line3() -> ClosureModel:
    """``x1 -> x2 -> x3`` with no atoms."""
    return ClosureModel(["x1", "x2", "x3"], [("x1", "x2"), ("x2", "x3")])


BUNDLED = {
    "fig2": cm_example,
    "fig3": closure_interior_example,
    "fig4": imlc_grid,
    "fig5": king_grid_5x5,
    "fig7": copa_example,
    "fig8": icrl_example,
    "fig9": line3,
}


def bundled(name: str) -> ClosureModel:
    """Load a bundled model file, e.g. ``bundled("fig7")``."""
    text = resources.files("qdcm").joinpath("data").joinpath(f"{name}.json").read_text("utf-8")
    return model_from_dict(json.loads(text))
