"""
Closure and interior on a directed model
=========================================

A closure model is a set of points with a binary relation.  Closing a set
adds the points one step away; the interior keeps only points whose
one-step neighbourhood stays inside the set.  Each operator comes in a
forward and a backward version.
"""

from qdcm.figures import closure_interior_example
from qdcm.space import Direction, check_closure_axioms, closure, interior, point_closure

m = closure_interior_example()
red = m.atom("red")
print("points:", m.n, "edges:", m.edge_count)
print("red:            ", m.names_of(red))

# forward closure adds successors, backward closure adds predecessors
for d in Direction:
    print(f"closure {d.value}:    ", m.names_of(closure(m, red, d)))
    print(f"interior {d.value}:   ", m.names_of(interior(m, red, d)))

# interior is the dual of closure: complement, close, complement
again = ~closure(m, ~red, Direction.FWD)
print("duality holds:", (again == interior(m, red, Direction.FWD)).all())

# a point lies in the forward closure of a set exactly when
# its own backward closure meets the set
x = "s15"
hits = point_closure(m, x, Direction.BWD) & red
print(f"{x} in forward closure of red:", m.names_of(hits) != [])

# the four closure axioms hold on any such model
print(check_closure_axioms(m))
