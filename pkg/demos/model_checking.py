"""
Checking spatial formulas
==========================

Formulas are parsed from a small ASCII syntax and evaluated to the set of
points satisfying them.  ``N+``/``N-`` talk about one step, ``reach+`` and
``reach-`` about paths that run through one set and end in another.
"""

from qdcm.figures import icrl_example, imlc_grid
from qdcm.logic import evaluate, parse, to_text

grid = imlc_grid()
for text in ["N+ green", "N- blue", "red & !N+ (green | blue)"]:
    f = parse(text)
    print(f"{to_text(f):28s}", grid.names_of(evaluate(grid, f)))

# reachability: start in the bracketed set, end in the target
m = icrl_example()
formulas = [
    "reach+ red [red]",
    "reach+ red [blue]",
    "reach- red [blue]",
    "reach+ (reach+ red [blue]) [!blue]",
    "surr red [blue]",
]
cache = {}
for text in formulas:
    print(f"{text:36s}", m.names_of(evaluate(m, parse(text), cache)))

# syntax errors point at the offending column
try:
    parse("reach+ red blue")
except Exception as exc:
    print("error:", exc)
