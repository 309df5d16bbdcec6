"""Raster images as closure models, a seeded maze generator, and rendering.

Images are ``(height, width, 3)`` uint8 arrays.  Every pixel becomes a point
``p_<x>_<y>`` labelled with the atom its colour maps to in the palette, and
neighbouring pixels are related in both directions.  The only file format is
plain-text PPM (``P3``), so golden images stay readable and dependency free.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import ModelFormatError, QdcmError
from .logic import Atom, Or, ReachFwd, evaluate
from .space import ClosureModel, Grid

__all__ = [
    "Connectivity",
    "GridSpec",
    "MAZE_PALETTE",
    "from_image",
    "grid_edges",
    "generate_maze",
    "maze_model",
    "render",
    "palette_coloring",
    "mask_coloring",
    "partition_coloring",
    "read_ppm",
    "write_ppm",
    "parse_palette",
    "format_palette",
    "Lcg",
]


class Connectivity(enum.Enum):
    ORTHOGONAL4 = "orthogonal4"
    KING8 = "king8"

    @classmethod
    def parse(cls, value) -> "Connectivity":
        if isinstance(value, cls):
            return value
        text = str(value).strip().lower()
        aliases = {"4": cls.ORTHOGONAL4, "8": cls.KING8, "orthogonal": cls.ORTHOGONAL4, "king": cls.KING8}
        if text in aliases:
            return aliases[text]
        return cls(text)


MAZE_PALETTE = {
    (0, 0, 0): "black",
    (255, 255, 255): "white",
    (0, 255, 0): "green",
    (0, 0, 255): "blue",
}


@dataclass(frozen=True)
class GridSpec:
    width: int
    height: int
    connectivity: Connectivity = Connectivity.ORTHOGONAL4
    palette: dict = field(default_factory=lambda: dict(MAZE_PALETTE))

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("grid dimensions must be positive")
        object.__setattr__(self, "connectivity", Connectivity.parse(self.connectivity))
        names = list(self.palette.values())
        if len(set(names)) != len(names):
            raise ValueError("palette atom names must be distinct")


def grid_edges(width: int, height: int, connectivity=Connectivity.ORTHOGONAL4):
    """Undirected neighbour pairs ``(a, b)`` of a row-major grid, ``a < b``."""
    connectivity = Connectivity.parse(connectivity)
    idx = np.arange(width * height).reshape(height, width)
    pairs = [
        (idx[:, :-1], idx[:, 1:]),
        (idx[:-1, :], idx[1:, :]),
    ]
    if connectivity is Connectivity.KING8:
        pairs += [(idx[:-1, :-1], idx[1:, 1:]), (idx[:-1, 1:], idx[1:, :-1])]
    src = np.concatenate([a.ravel() for a, _ in pairs])
    dst = np.concatenate([b.ravel() for _, b in pairs])
    lo, hi = np.minimum(src, dst), np.maximum(src, dst)
    return lo, hi


def from_image(pixels, spec: GridSpec | None = None) -> ClosureModel:
    """One point per pixel, symmetric neighbour edges, one atom per palette colour."""
    img = np.asarray(pixels, dtype=np.uint8)
    if img.ndim != 3 or img.shape[2] != 3:
        raise ModelFormatError(f"expected an (height, width, 3) image, got shape {img.shape}")
    h, w = img.shape[:2]
    if spec is None:
        spec = GridSpec(w, h)
    if (spec.width, spec.height) != (w, h):
        raise ModelFormatError(f"image is {w}x{h} but the grid spec says {spec.width}x{spec.height}")
    codes = (img[..., 0].astype(np.int64) << 16) | (img[..., 1].astype(np.int64) << 8) | img[..., 2]
    codes = codes.ravel()
    valuation = {}
    known = np.zeros(codes.size, dtype=bool)
    for rgb, name in spec.palette.items():
        r, g, b = rgb
        mask = codes == (r << 16 | g << 8 | b)
        valuation[name] = mask
        known |= mask
    if not known.all():
        i = int(np.flatnonzero(~known)[0])
        x, y = i % w, i // w
        raise ModelFormatError(f"pixel ({x}, {y}) has colour {tuple(img[y, x])} not in the palette")
    lo, hi = grid_edges(w, h, spec.connectivity)
    names = [f"p_{i % w}_{i // w}" for i in range(w * h)]
    grid = Grid(w, h, {name: tuple(rgb) for rgb, name in spec.palette.items()})
    return ClosureModel.from_arrays(
        names, np.concatenate([lo, hi]), np.concatenate([hi, lo]), valuation, grid=grid
    )


# -- maze generator ---------------------------------------------------------


class Lcg:
    """32-bit linear congruential generator (constants from Numerical Recipes).

    Kept local so that a maze depends on nothing but ``(width, height, seed)``.
    """

    A = 1664525
    C = 1013904223
    M = 2**32

    def __init__(self, seed: int):
        self.state = seed % self.M

    def next(self) -> int:
        self.state = (self.A * self.state + self.C) % self.M
        return self.state

    def below(self, n: int) -> int:
        """An integer in ``[0, n)`` taken from the high bits."""
        return (self.next() >> 16) % n

    def choice(self, seq):
        return seq[self.below(len(seq))]


_WHITE = (255, 255, 255)
_BLACK = (0, 0, 0)
_GREEN = (0, 255, 0)
_BLUE = (0, 0, 255)
_REACHABLE_BLUE = 3
_RETRIES = 8


def _divide(walls, rng, x0, y0, x1, y1):
    # walls go on even coordinates, gaps on odd ones, so no later wall can
    # close an earlier gap
    stack = [(x0, y0, x1, y1)]
    while stack:
        x0, y0, x1, y1 = stack.pop()
        xs = [x for x in range(x0 + 1, x1) if x % 2 == 0]
        ys = [y for y in range(y0 + 1, y1) if y % 2 == 0]
        if not xs and not ys:
            continue
        w, h = x1 - x0 + 1, y1 - y0 + 1
        if not ys or (xs and (w > h or (w == h and rng.below(2) == 0))):
            x = rng.choice(xs)
            gap = rng.choice([y for y in range(y0, y1 + 1) if y % 2 == 1])
            walls[y0:y1 + 1, x] = True
            walls[gap, x] = False
            stack.append((x0, y0, x - 1, y1))
            stack.append((x + 1, y0, x1, y1))
        else:
            y = rng.choice(ys)
            gap = rng.choice([x for x in range(x0, x1 + 1) if x % 2 == 1])
            walls[y, x0:x1 + 1] = True
            walls[y, gap] = False
            stack.append((x0, y0, x1, y - 1))
            stack.append((x0, y + 1, x1, y1))


def _exit_reach(img):
    model = from_image(img)
    sat = evaluate(model, ReachFwd(Atom("green"), Or((Atom("white"), Atom("blue")))))
    return model, sat.reshape(img.shape[:2])


def _attempt(width, height, rng):
    walls = np.zeros((height, width), dtype=bool)
    walls[0, :] = walls[-1, :] = walls[:, 0] = walls[:, -1] = True
    _divide(walls, rng, 1, 1, width - 2, height - 2)
    img = np.empty((height, width, 3), dtype=np.uint8)
    img[:] = _WHITE
    img[walls] = _BLACK
    img[0, 1] = _GREEN
    img[height - 1, width - 2] = _GREEN

    # one blue room cut off by painting its four neighbours black
    keep_open = {(1, 1), (width - 2, height - 2)}
    rooms = [
        (x, y)
        for y in range(1, height - 1, 2)
        for x in range(1, width - 1, 2)
        if (x, y) not in keep_open and not walls[y, x]
    ]
    x, y = rng.choice(rooms)
    for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        img[y + dy, x + dx] = _BLACK
    img[y, x] = _BLUE

    # reachable blue cells are drawn from floor still connected to an exit
    _, reach = _exit_reach(img)
    floor = np.argwhere(reach & (img == _WHITE).all(axis=2))
    for _ in range(min(_REACHABLE_BLUE, len(floor))):
        fy, fx = floor[rng.below(len(floor))]
        img[fy, fx] = _BLUE
    return img


def generate_maze(width: int, height: int, seed: int) -> np.ndarray:
    """A deterministic maze image on the black/white/green/blue palette.

    Walls come from recursive division driven by :class:`Lcg`.  Exits are the
    green border pixels at ``(1, 0)`` and ``(width-2, height-1)``.  At least one
    blue cell can reach an exit over white/blue floor and at least one cannot.
    """
    if width < 8 or height < 8:
        raise ValueError(f"maze must be at least 8x8, got {width}x{height}")
    rng = Lcg(seed)
    for _ in range(_RETRIES):
        img = _attempt(width, height, rng)
        _, reach = _exit_reach(img)
        blue = (img == _BLUE).all(axis=2)
        if (blue & reach).any() and (blue & ~reach).any():
            return img
    raise QdcmError(f"no maze with reachable and unreachable blue cells after {_RETRIES} tries")


def maze_model(width: int, height: int, seed: int) -> ClosureModel:
    return from_image(generate_maze(width, height, seed))


# -- rendering --------------------------------------------------------------


def render(model: ClosureModel, coloring, sink=None) -> np.ndarray:
    """Paint each point's pixel; ``coloring`` maps point names or indices to RGB.

    ``coloring`` may also be an ``(n, 3)`` array.  With ``sink`` (a path or a
    text stream) the image is also written as P3.
    """
    if model.grid is None:
        raise QdcmError("model has no grid layout to render")
    w, h = model.grid.width, model.grid.height
    if isinstance(coloring, np.ndarray):
        colors = np.asarray(coloring, dtype=np.uint8).reshape(model.n, 3)
    else:
        colors = np.zeros((model.n, 3), dtype=np.uint8)
        for p, rgb in coloring.items():
            colors[model.index(p)] = rgb
    img = colors.reshape(h, w, 3)
    if sink is not None:
        text = write_ppm(img)
        if hasattr(sink, "write"):
            sink.write(text)
        else:
            with open(sink, "w", encoding="ascii") as fh:
                fh.write(text)
    return img


def palette_coloring(model: ClosureModel) -> np.ndarray:
    """The colours the model was read from."""
    if model.grid is None:
        raise QdcmError("model has no grid layout to render")
    colors = np.zeros((model.n, 3), dtype=np.uint8)
    for atom, rgb in model.grid.colors.items():
        colors[model.valuation[atom]] = rgb
    return colors


def mask_coloring(mask, on=(255, 0, 0), off=(255, 255, 255)) -> np.ndarray:
    mask = np.asarray(mask, dtype=bool)
    colors = np.empty((mask.size, 3), dtype=np.uint8)
    colors[:] = off
    colors[mask] = on
    return colors


def partition_coloring(block_of) -> np.ndarray:
    """Distinct colours per block: block ``i`` gets ``i * 2654435761 mod 2**24``.

    The multiplier is odd, so distinct block ids below ``2**24`` never collide.
    """
    code = (np.asarray(block_of, dtype=np.uint64) * np.uint64(2654435761)) % np.uint64(1 << 24)
    return np.stack([(code >> np.uint64(s)) & np.uint64(255) for s in (16, 8, 0)], axis=1).astype(np.uint8)


# -- file formats -----------------------------------------------------------


def write_ppm(img) -> str:
    img = np.asarray(img, dtype=np.uint8)
    h, w = img.shape[:2]
    rows = [" ".join(map(str, row.ravel().tolist())) for row in img]
    return f"P3\n{w} {h}\n255\n" + "\n".join(rows) + "\n"


def read_ppm(text: str) -> np.ndarray:
    """Parse a plain-text PPM (``P3``) image."""
    tokens = []
    for line in text.splitlines():
        tokens.extend(line.split("#", 1)[0].split())
    if not tokens or tokens[0] != "P3":
        raise ModelFormatError("not a plain-text PPM (missing 'P3' header)")
    try:
        w, h, maxval = (int(t) for t in tokens[1:4])
        values = np.array([int(t) for t in tokens[4:]], dtype=np.int64)
    except ValueError as exc:
        raise ModelFormatError(f"malformed PPM: {exc}") from None
    if values.size != w * h * 3:
        raise ModelFormatError(f"PPM has {values.size} samples, expected {w * h * 3}")
    if maxval != 255:
        values = values * 255 // maxval
    return values.reshape(h, w, 3).astype(np.uint8)


def parse_palette(text: str) -> dict:
    """Read lines ``RRGGBB atom-name``; ``#`` followed by a space starts a comment."""
    palette = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line == "#" or line.startswith("# "):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ModelFormatError(f"palette line {lineno}: expected '<RRGGBB> <name>'")
        hexcode, name = parts
        hexcode = hexcode.lstrip("#")
        if len(hexcode) != 6:
            raise ModelFormatError(f"palette line {lineno}: bad colour {parts[0]!r}")
        try:
            rgb = tuple(int(hexcode[i:i + 2], 16) for i in (0, 2, 4))
        except ValueError:
            raise ModelFormatError(f"palette line {lineno}: bad colour {parts[0]!r}") from None
        if rgb in palette:
            raise ModelFormatError(f"palette line {lineno}: colour {parts[0]} listed twice")
        if name in palette.values():
            raise ModelFormatError(f"palette line {lineno}: atom {name!r} listed twice")
        palette[rgb] = name
    return palette


def format_palette(palette: dict) -> str:
    return "".join(f"{r:02X}{g:02X}{b:02X} {name}\n" for (r, g, b), name in palette.items())
