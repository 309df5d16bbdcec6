"""Spatial logic formulas: AST, text syntax and set-based model checking.

Concrete syntax (ASCII)::

    phi ::= true | false | IDENT | !phi | phi & phi | phi | phi
          | N+ phi | N- phi
          | reach+ phi [phi] | reach- phi [phi]
          | rho+ phi [phi] | rho- phi [phi]
          | surr phi [phi] | ( phi )

``!`` and the modalities bind tighter than ``&``, which binds tighter than ``|``.
Evaluation is bottom-up over boolean point masks.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass
from typing import Iterator

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import breadth_first_order

from .errors import FormulaSyntaxError
from .space import ClosureModel, Direction, closure

__all__ = [
    "Formula",
    "TrueF",
    "FalseF",
    "Atom",
    "Not",
    "And",
    "Or",
    "NearFwd",
    "NearBwd",
    "ReachFwd",
    "ReachBwd",
    "RhoFwd",
    "RhoBwd",
    "Surround",
    "TRUE",
    "FALSE",
    "conj",
    "disj",
    "neg",
    "parse",
    "to_text",
    "read_formulas",
    "evaluate",
    "satisfies",
    "logic_equivalent",
    "modal_depth",
    "atoms_in",
    "surround_expansion",
    "reach_set",
]


class Formula:
    """Base class of all formula nodes."""

    __slots__ = ()

    def __str__(self):
        return to_text(self)

    def __and__(self, other):
        return And((self, other))

    def __or__(self, other):
        return Or((self, other))

    def __invert__(self):
        return Not(self)


@dataclass(frozen=True)
class TrueF(Formula):
    pass


@dataclass(frozen=True)
class FalseF(Formula):
    pass


@dataclass(frozen=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    args: tuple

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        if not self.args:
            raise ValueError("And needs at least one argument")


@dataclass(frozen=True)
class Or(Formula):
    args: tuple

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        if not self.args:
            raise ValueError("Or needs at least one argument")


@dataclass(frozen=True)
class NearFwd(Formula):
    arg: Formula


@dataclass(frozen=True)
class NearBwd(Formula):
    arg: Formula


@dataclass(frozen=True)
class _Binary(Formula):
    target: Formula
    via: Formula


class ReachFwd(_Binary):
    """Some forward path ends in ``target`` with all earlier points in ``via``."""


class ReachBwd(_Binary):
    pass


class RhoFwd(_Binary):
    """Like :class:`ReachFwd` but the starting point need not satisfy ``via``."""


class RhoBwd(_Binary):
    pass


class Surround(_Binary):
    """``target`` holds here and every way out of ``target`` passes ``via``."""


TRUE = TrueF()
FALSE = FalseF()


def conj(*args) -> Formula:
    if not args:
        return TRUE
    return args[0] if len(args) == 1 else And(args)


def disj(*args) -> Formula:
    if not args:
        return FALSE
    return args[0] if len(args) == 1 else Or(args)


def neg(f: Formula) -> Formula:
    """Negation that cancels a double ``!``."""
    return f.arg if isinstance(f, Not) else Not(f)


# -- parser -----------------------------------------------------------------

_UNARY = {"N+": NearFwd, "N-": NearBwd}
_BINARY = {
    "reach+": ReachFwd,
    "reach-": ReachBwd,
    "rho+": RhoFwd,
    "rho-": RhoBwd,
    "surr": Surround,
}
_KEYWORDS = {"true", "false", "surr", "N", "reach", "rho"}

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<mod>(?:N|reach|rho)[+-])
  | (?P<badmod>[A-Za-z_][A-Za-z0-9_]*[+-])
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[!&|()\[\]])
    """,
    re.VERBOSE,
)


@dataclass
class _Token:
    kind: str
    text: str
    line: int
    column: int


def _tokenize(text: str, line_offset: int = 0) -> list:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise FormulaSyntaxError(
                f"unexpected character {text[pos]!r}", line + line_offset, pos - line_start + 1
            )
        kind = m.lastgroup
        if kind == "badmod":
            raise FormulaSyntaxError(
                f"unknown operator {m.group()!r}", line + line_offset, pos - line_start + 1
            )
        if kind == "ws":
            chunk = m.group()
            if "\n" in chunk:
                line += chunk.count("\n")
                line_start = pos + chunk.rindex("\n") + 1
        else:
            word = m.group()
            if kind == "ident" and word in ("surr", "true", "false"):
                kind = "kw"
            tokens.append(_Token(kind, word, line + line_offset, pos - line_start + 1))
        pos = m.end()
    tokens.append(_Token("eof", "", line + line_offset, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def take(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, tok, message):
        raise FormulaSyntaxError(message, tok.line, tok.column)

    def expect(self, text):
        tok = self.take()
        if tok.text != text:
            found = tok.text or "end of input"
            self.fail(tok, f"expected {text!r}, found {found!r}")
        return tok

    def formula(self):
        args = [self.conjunction()]
        while self.peek().text == "|":
            self.take()
            args.append(self.conjunction())
        return args[0] if len(args) == 1 else Or(tuple(args))

    def conjunction(self):
        args = [self.unary()]
        while self.peek().text == "&":
            self.take()
            args.append(self.unary())
        return args[0] if len(args) == 1 else And(tuple(args))

    def unary(self):
        tok = self.take()
        if tok.text == "!":
            return Not(self.unary())
        if tok.kind == "mod" and tok.text in _UNARY:
            return _UNARY[tok.text](self.unary())
        if tok.text in _BINARY and tok.kind in ("mod", "kw"):
            target = self.unary()
            self.expect("[")
            via = self.formula()
            self.expect("]")
            return _BINARY[tok.text](target, via)
        if tok.text == "true":
            return TRUE
        if tok.text == "false":
            return FALSE
        if tok.kind == "ident":
            if tok.text in _KEYWORDS:
                self.fail(tok, f"operator {tok.text!r} needs a '+' or '-' suffix")
            return Atom(tok.text)
        if tok.text == "(":
            inner = self.formula()
            self.expect(")")
            return inner
        if tok.kind == "eof":
            self.fail(tok, "unexpected end of input")
        self.fail(tok, f"unexpected {tok.text!r}")


def parse(text: str, *, line_offset: int = 0) -> Formula:
    """Parse one formula; errors carry line and column."""
    p = _Parser(_tokenize(text, line_offset))
    f = p.formula()
    tok = p.peek()
    if tok.kind != "eof":
        p.fail(tok, f"unexpected {tok.text!r} after formula")
    return f


# -- printer ----------------------------------------------------------------

_SYMBOL = {NearFwd: "N+", NearBwd: "N-"}
_SYMBOL.update({cls: kw for kw, cls in _BINARY.items()})


def to_text(f: Formula, level: int = 0) -> str:
    """Print ``f`` with just enough parentheses that ``parse`` rebuilds it.

    ``level`` is the binding strength of the context: 0 any, 1 inside ``|``,
    2 inside ``&``, 3 under a prefix operator.  Singleton ``And``/``Or`` nodes
    print as their only argument.
    """
    if isinstance(f, TrueF):
        return "true"
    if isinstance(f, FalseF):
        return "false"
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Not):
        return "!" + to_text(f.arg, 3)
    if isinstance(f, (NearFwd, NearBwd)):
        return f"{_SYMBOL[type(f)]} {to_text(f.arg, 3)}"
    if isinstance(f, _Binary):
        return f"{_SYMBOL[type(f)]} {to_text(f.target, 3)} [{to_text(f.via)}]"
    if isinstance(f, (And, Or)):
        if len(f.args) == 1:
            return to_text(f.args[0], level)
        mine = 2 if isinstance(f, And) else 1
        sep = " & " if mine == 2 else " | "
        # nested same-kind lists need parentheses to survive flattening
        text = sep.join(to_text(a, mine + 1 if type(a) is type(f) else mine) for a in f.args)
        return f"({text})" if level > mine else text
    raise TypeError(f"not a formula: {f!r}")


def read_formulas(text: str) -> list:
    """Parse a formula file: one formula per line, ``#`` starts a comment."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0]
        if body.strip():
            out.append(parse(body, line_offset=lineno - 1))
    return out


# -- semantics --------------------------------------------------------------


def _graph(model: ClosureModel, direction: Direction):
    # sparse adjacency oriented so that BFS from a point visits its predecessors
    # with respect to ``direction``: i.e. edge y -> x whenever x steps to y
    if direction is Direction.FWD:
        rows, cols = model.dst, model.src
    else:
        rows, cols = model.src, model.dst
    return rows, cols


def reach_set(model: ClosureModel, target, via, direction=Direction.FWD) -> np.ndarray:
    """Least set ``S`` with ``S = target | (via & {x : C(x) meets S})``.

    Computed as one breadth-first search backwards from ``target`` through
    points of ``via``, using a virtual source node at index ``n``.
    """
    direction = Direction.parse(direction)
    target = model.mask(target)
    via = model.mask(via)
    n = model.n
    rows, cols = _graph(model, direction)
    keep = via[cols]
    rows, cols = rows[keep], cols[keep]
    seeds = np.flatnonzero(target)
    rows = np.concatenate([rows, np.full(seeds.size, n)])
    cols = np.concatenate([cols, seeds])
    g = sparse.csr_matrix(
        (np.ones(rows.size, dtype=np.int8), (rows, cols)), shape=(n + 1, n + 1)
    )
    order = breadth_first_order(g, n, directed=True, return_predecessors=False)
    out = np.zeros(n + 1, dtype=bool)
    out[order] = True
    return out[:n]


def surround_expansion(target: Formula, via: Formula) -> Formula:
    """The formula a :class:`Surround` node abbreviates."""
    return And((target, Not(RhoFwd(Not(Or((target, via))), Not(via)))))


class _Evaluator:
    def __init__(self, model: ClosureModel, cache):
        self.model = model
        self.cache = {} if cache is None else cache
        self.missing = set()

    def run(self, f):
        key = id(f)
        hit = self.cache.get(key)
        if hit is not None and hit[0] is f:
            return hit[1]
        out = self.compute(f)
        out.setflags(write=False)
        self.cache[key] = (f, out)
        return out

    def compute(self, f):
        m = self.model
        if isinstance(f, TrueF):
            return np.ones(m.n, dtype=bool)
        if isinstance(f, FalseF):
            return np.zeros(m.n, dtype=bool)
        if isinstance(f, Atom):
            if f.name in m.valuation:
                return m.valuation[f.name].copy()
            self.missing.add(f.name)
            return np.zeros(m.n, dtype=bool)
        if isinstance(f, Not):
            return ~self.run(f.arg)
        if isinstance(f, And):
            out = self.run(f.args[0]).copy()
            for a in f.args[1:]:
                out &= self.run(a)
            return out
        if isinstance(f, Or):
            out = self.run(f.args[0]).copy()
            for a in f.args[1:]:
                out |= self.run(a)
            return out
        if isinstance(f, NearFwd):
            return closure(m, self.run(f.arg), Direction.FWD)
        if isinstance(f, NearBwd):
            return closure(m, self.run(f.arg), Direction.BWD)
        if isinstance(f, (ReachFwd, ReachBwd)):
            d = Direction.FWD if isinstance(f, ReachFwd) else Direction.BWD
            return reach_set(m, self.run(f.target), self.run(f.via), d)
        if isinstance(f, (RhoFwd, RhoBwd)):
            d = Direction.FWD if isinstance(f, RhoFwd) else Direction.BWD
            target = self.run(f.target)
            reached = reach_set(m, target, self.run(f.via), d)
            return target | closure(m, reached, d.converse)
        if isinstance(f, Surround):
            return self.run(surround_expansion(f.target, f.via))
        raise TypeError(f"not a formula: {f!r}")


def evaluate(model: ClosureModel, f: Formula, cache: dict | None = None) -> np.ndarray:
    """Denotation of ``f`` as a read-only boolean mask over the model's points.

    Sub-formula results are shared within the call.  Pass the same ``cache``
    dict across calls on one model to share them further.  Undeclared atoms
    denote the empty set and trigger a warning.
    """
    ev = _Evaluator(model, cache)
    out = ev.run(f)
    if ev.missing:
        warnings.warn(f"undeclared atoms evaluate to the empty set: {sorted(ev.missing)}", stacklevel=2)
    return out


def satisfies(model: ClosureModel, x, f: Formula) -> bool:
    return bool(evaluate(model, f)[model.index(x)])


_LOGIC_KIND = {"IML": "CM", "IMLC": "CMC", "ICRL": "COPA"}


def logic_equivalent(model: ClosureModel, x, y, logic: str) -> bool:
    """Whether ``x`` and ``y`` agree on every formula of ``logic``.

    Decided through the matching bisimilarity (IML/CM, IMLC/CMC, ICRL/CoPa).
    """
    from .bisim import BisimKind, compute_bisimilarity

    try:
        kind = BisimKind[_LOGIC_KIND[logic.upper()]]
    except KeyError:
        raise ValueError(f"unknown logic {logic!r}; use IML, IMLC or ICRL") from None
    i, j = model.index(x), model.index(y)
    part = compute_bisimilarity(model, kind)
    return part.block_of[i] == part.block_of[j]


def modal_depth(f: Formula) -> int:
    if isinstance(f, (TrueF, FalseF, Atom)):
        return 0
    if isinstance(f, Not):
        return modal_depth(f.arg)
    if isinstance(f, (And, Or)):
        return max(modal_depth(a) for a in f.args)
    if isinstance(f, (NearFwd, NearBwd)):
        return 1 + modal_depth(f.arg)
    return 1 + max(modal_depth(f.target), modal_depth(f.via))


def atoms_in(f: Formula) -> set:
    return set(_walk_atoms(f))


def _walk_atoms(f) -> Iterator[str]:
    if isinstance(f, Atom):
        yield f.name
    elif isinstance(f, (Not, NearFwd, NearBwd)):
        yield from _walk_atoms(f.arg)
    elif isinstance(f, (And, Or)):
        for a in f.args:
            yield from _walk_atoms(a)
    elif isinstance(f, _Binary):
        yield from _walk_atoms(f.target)
        yield from _walk_atoms(f.via)
