"""
From a maze image to its minimal model
=======================================

A seeded maze is drawn in black walls, white floor, green exits and blue
cells.  Every pixel becomes a point, neighbours are related both ways, and
``copa`` minimisation collapses the picture to a handful of classes.  Blue
cells that can walk to an exit end up apart from the one that cannot.

Run with an optional output directory: ``python maze_pipeline.py out/``.
"""

import sys
import tempfile
from pathlib import Path

from qdcm.bisim import compute_bisimilarity
from qdcm.ingest import from_image, generate_maze, mask_coloring, partition_coloring, render, write_ppm
from qdcm.logic import evaluate, parse

out = Path(sys.argv[1] if len(sys.argv) > 1 else tempfile.mkdtemp())
out.mkdir(parents=True, exist_ok=True)

img = generate_maze(16, 16, 1)
(out / "maze.ppm").write_text(write_ppm(img))
glyph = {(0, 0, 0): "#", (255, 255, 255): ".", (0, 255, 0): "G", (0, 0, 255): "B"}
for row in img:
    print("".join(glyph[tuple(int(v) for v in c)] for c in row))

m = from_image(img)
escape = evaluate(m, parse("reach+ green [white | blue]"))
blue = m.atom("blue")
print("blue cells with a way out:", m.names_of(blue & escape))
print("blue cells walled in:     ", m.names_of(blue & ~escape))
render(m, mask_coloring(escape), out / "escape.ppm")

part = compute_bisimilarity(m, "copa")
print(f"{m.n} pixels fall into {part.count} classes")
for members in part.named_blocks(m):
    if any(p in members for p in m.names_of(blue)):
        print("  class with blue:", " ".join(members[:6]) + (" ..." if len(members) > 6 else ""))
render(m, partition_coloring(part.block_of), out / "classes.ppm")
print("images written to", out)
