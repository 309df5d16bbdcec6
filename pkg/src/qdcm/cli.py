"""Command-line interface: ``qdcm <command> ...``.

Exit status is 0 on success, 2 when an input cannot be parsed and 3 when it
parses but does not make sense (unknown point, non-uniform partition, ...).
``verify`` exits with 1 when the engine and the oracle disagree.
Diagnostics go to standard error only.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import figures
from .bisim import (
    BisimKind,
    Partition,
    compute_bisimilarity,
    distinguishing_formula,
    quotient,
)
from .errors import (
    FormulaSyntaxError,
    ModelFormatError,
    PartitionError,
    QdcmError,
)
from .ingest import (
    MAZE_PALETTE,
    GridSpec,
    from_image,
    generate_maze,
    mask_coloring,
    parse_palette,
    partition_coloring,
    read_ppm,
    render,
    write_ppm,
)
from .logic import evaluate, parse, read_formulas, to_text
from .lts import encode_lts, write_aut
from .oracles import agree, random_corpus
from .space import load_model, model_to_dict

PARSE_ERROR = 2
SEMANTIC_ERROR = 3


class _Fail(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _load(args):
    path = args.model
    if not os.path.exists(path) and path in figures.BUNDLED:
        return figures.bundled(path)
    if path.lower().endswith(".ppm"):
        palette = MAZE_PALETTE
        if args.palette:
            with open(args.palette, encoding="utf-8") as fh:
                palette = parse_palette(fh.read())
        with open(path, encoding="ascii") as fh:
            img = read_ppm(fh.read())
        h, w = img.shape[:2]
        return from_image(img, GridSpec(w, h, args.connectivity, palette))
    return load_model(path)


def _kind(args):
    return BisimKind.parse(args.relation)


def cmd_check(args, out):
    model = _load(args)
    if args.formula is not None:
        formulas = [parse(args.formula)]
    elif args.formula_file is not None:
        with open(args.formula_file, encoding="utf-8") as fh:
            formulas = read_formulas(fh.read())
    else:
        raise _Fail(PARSE_ERROR, "give a formula file or --formula TEXT")
    if args.render and len(formulas) != 1:
        raise _Fail(SEMANTIC_ERROR, "--render needs exactly one formula")
    cache = {}
    for f in formulas:
        sat = evaluate(model, f, cache)
        print(" ".join(model.names_of(sat)), file=out)
    if args.render:
        render(model, mask_coloring(sat), args.render)


def cmd_minimize(args, out):
    model = _load(args)
    part = compute_bisimilarity(model, _kind(args))
    print(f"{part.count} blocks", file=out)
    if args.partition:
        with open(args.partition, "w", encoding="utf-8") as fh:
            fh.write(part.to_text(model))
    if args.quotient:
        q, _ = quotient(model, part)
        with open(args.quotient, "w", encoding="utf-8") as fh:
            json.dump(model_to_dict(q), fh, indent=1)
            fh.write("\n")
    if args.render:
        render(model, partition_coloring(part.block_of), args.render)


def cmd_compare(args, out):
    model = _load(args)
    kind = _kind(args)
    f = distinguishing_formula(model, args.a, args.b, kind)
    if f is None:
        print("bisimilar", file=out)
        return
    sat = evaluate(model, f)
    if not (sat[model.index(args.a)] and not sat[model.index(args.b)]):
        raise _Fail(SEMANTIC_ERROR, f"internal error: formula does not separate the points: {to_text(f)}")
    print(f"distinguished by: {to_text(f)}", file=out)


def cmd_encode(args, out):
    model = _load(args)
    text = write_aut(encode_lts(model))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)


def cmd_verify(args, out):
    kind = _kind(args)
    if args.random is not None:
        models = list(random_corpus(args.random, args.seed))
    elif args.model:
        models = [_load(args)]
    else:
        raise _Fail(PARSE_ERROR, "give a model file or --random N")
    agreed = 0
    for m in models:
        bad = agree(m, kind)
        if bad is not None:
            print(f"disagreement under {kind.value}: engine {bad.engine.named_blocks(m)} "
                  f"vs oracle {bad.oracle.named_blocks(m)}; counterexample model follows",
                  file=sys.stderr)
            json.dump(model_to_dict(m), out, indent=1)
            out.write("\n")
            return 1
        agreed += 1
    print(f"{agreed}/{len(models)} agree", file=out)


def cmd_maze(args, out):
    text = write_ppm(generate_maze(args.width, args.height, args.seed))
    if args.out:
        with open(args.out, "w", encoding="ascii") as fh:
            fh.write(text)
    else:
        out.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qdcm", description="Check, minimise and export closure models.")
    sub = parser.add_subparsers(dest="command", required=True)

    def model_arg(p, optional=False):
        p.add_argument("model", nargs="?" if optional else None,
                       help="model JSON, PPM image, or a bundled name such as fig7")
        p.add_argument("--palette", help="palette file for PPM input (lines 'RRGGBB name')")
        p.add_argument("--connectivity", default="orthogonal4", choices=["orthogonal4", "king8"],
                       help="pixel adjacency for PPM input")

    def relation_arg(p):
        p.add_argument("--relation", required=True, choices=[k.value for k in BisimKind])

    p = sub.add_parser("check", help="print the points satisfying each formula")
    model_arg(p)
    p.add_argument("formula_file", nargs="?", help="one formula per line, '#' comments")
    p.add_argument("--formula", help="a single formula given inline")
    p.add_argument("--render", metavar="OUT.ppm", help="paint the satisfying points (grid models)")
    p.set_defaults(run=cmd_check)

    p = sub.add_parser("minimize", help="compute bisimilarity classes and the quotient model")
    model_arg(p)
    relation_arg(p)
    p.add_argument("--quotient", metavar="OUT.json")
    p.add_argument("--partition", metavar="OUT.txt")
    p.add_argument("--render", metavar="OUT.ppm")
    p.set_defaults(run=cmd_minimize)

    p = sub.add_parser("compare", help="decide bisimilarity of two points")
    model_arg(p)
    p.add_argument("a")
    p.add_argument("b")
    relation_arg(p)
    p.set_defaults(run=cmd_compare)

    p = sub.add_parser("encode", help="write the Aldebaran LTS encoding")
    model_arg(p)
    p.add_argument("--out", metavar="OUT.aut")
    p.set_defaults(run=cmd_encode)

    p = sub.add_parser("verify", help="compare the engine with the brute-force oracle")
    model_arg(p, optional=True)
    p.add_argument("--random", type=int, metavar="N", help="check N seeded random models instead")
    p.add_argument("--seed", type=int, default=0)
    relation_arg(p)
    p.set_defaults(run=cmd_verify)

    p = sub.add_parser("maze", help="generate a maze image")
    p.add_argument("width", type=int)
    p.add_argument("height", type=int)
    p.add_argument("seed", type=int)
    p.add_argument("--out", metavar="OUT.ppm")
    p.set_defaults(run=cmd_maze)
    return parser


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        code = args.run(args, out)
    except _Fail as exc:
        print(f"qdcm: {exc}", file=sys.stderr)
        return exc.code
    except (FormulaSyntaxError, ModelFormatError, PartitionError, json.JSONDecodeError) as exc:
        print(f"qdcm: {exc}", file=sys.stderr)
        return PARSE_ERROR
    except (QdcmError, ValueError, KeyError) as exc:
        print(f"qdcm: {exc}", file=sys.stderr)
        return SEMANTIC_ERROR
    except OSError as exc:
        print(f"qdcm: {exc}", file=sys.stderr)
        return PARSE_ERROR
    return code or 0


if __name__ == "__main__":
    sys.exit(main())
