"""Closure models as labelled transition systems in Aldebaran (``.aut``) format.

One LTS state per point.  Each edge ``x -> y`` gives a transition labelled
``tau`` when both ends satisfy the same atoms and ``f:chg:{..}->{..}``
otherwise; the converse edge ``y -> x`` is encoded the same way with a ``b:``
prefix on change labels.  Each atom ``p`` of a point adds a self-loop ``ap:p``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ModelFormatError
from .space import ClosureModel

__all__ = ["Lts", "encode_lts", "write_aut", "atom_set_label"]


@dataclass(frozen=True)
class Lts:
    states: int
    transitions: tuple
    initial: int = 0


def atom_set_label(atoms) -> str:
    return "{" + ",".join(sorted(atoms)) + "}"


def encode_lts(model: ClosureModel) -> Lts:
    if model.n == 0:
        raise ModelFormatError("cannot encode a model without points")
    atoms = [model.atoms_of(i) for i in range(model.n)]
    out = set()
    for x, y in zip(model.src.tolist(), model.dst.tolist()):
        for prefix, a, b in (("f", x, y), ("b", y, x)):
            if atoms[a] == atoms[b]:
                label = "tau"
            else:
                label = f"{prefix}:chg:{atom_set_label(atoms[a])}->{atom_set_label(atoms[b])}"
            out.add((a, label, b))
    for x in range(model.n):
        for p in atoms[x]:
            out.add((x, f"ap:{p}", x))
    return Lts(model.n, tuple(sorted(out)))


def write_aut(lts: Lts, sink=None) -> str:
    """Aldebaran text; also written to ``sink`` (path or stream) when given."""
    lines = [f"des ({lts.initial},{len(lts.transitions)},{lts.states})"]
    lines += [f'({s},"{label}",{d})' for s, label, d in lts.transitions]
    text = "\n".join(lines) + "\n"
    if sink is not None:
        if hasattr(sink, "write"):
            sink.write(text)
        else:
            with open(sink, "w", encoding="utf-8") as fh:
                fh.write(text)
    return text
