"""Command-line frontend.

Subcommands: complex | subdivide | adversary | protocol-complex | sequences |
classify | solve | journey.  Outputs are byte-deterministic for identical
inputs and budgets.  Exit codes: 0 success, 2 validation or domain error,
3 resource or budget exhaustion.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import adversary as adv
from . import complexes as cx
from . import protocol as proto
from . import spectral as spec
from . import tasks
from .errors import DomainError, ResourceLimitError, SearchTimeout, ValidationError

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_RESOURCE = 3


def _write(text: str, out_path: str | None):
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_text(data) -> str:
    return json.dumps(data, indent=2) + "\n"


def _load_complex(path: str) -> cx.Complex:
    with open(path) as fh:
        return cx.complex_from_json(fh.read())


def _colorize(c: cx.Complex) -> cx.Complex:
    """Reinterpret loaded string labels "p:value" as (process, value) pairs."""
    relabel = {}
    for v in c.vertices:
        head, sep, rest = str(v.label).partition(":")
        if not sep or not head.isdigit():
            raise ValidationError(
                f'colored inputs need "process:value" labels, got {v.label!r}'
            )
        relabel[v] = (int(head), rest)
    return cx.make_complex(
        [[relabel[v] for v in f] for f in c.facets()]
    )


def _input_complex(args, colored: bool) -> cx.Complex:
    if getattr(args, "input", None):
        loaded = _load_complex(args.input)
        return _colorize(loaded) if colored else loaded
    d = args.d
    if d is None:
        raise ValidationError("give --input or --d for a standard simplex input")
    if colored:
        return proto.colored_simplex([f"v{i}" for i in range(d + 1)])
    return cx.standard_simplex(d)


def _export_complex(c: cx.Complex, fmt: str) -> str:
    if fmt == "json":
        return cx.complex_to_json(c)
    if fmt == "dot":
        return cx.complex_to_dot(c)
    counts: dict[int, int] = {}
    for s in c:
        counts[s.dim] = counts.get(s.dim, 0) + 1
    lines = [
        f"simplices: {len(c)}",
        f"facets: {len(c.facets())}",
        f"dimension: {c.dim}",
    ]
    for dim in sorted(counts):
        lines.append(f"dim {dim}: {counts[dim]}")
    return "\n".join(lines) + "\n"


# -- subcommands --------------------------------------------------------------


def _cmd_complex(args) -> int:
    if args.action == "make":
        if args.facets:
            gens = [part.split(",") for part in args.facets.split(";") if part]
            c = cx.make_complex(gens)
        elif args.input:
            c = _load_complex(args.input)
        else:
            raise ValidationError("give --facets or --input")
    else:  # simplex
        if args.d is None:
            raise ValidationError("give --d")
        c = cx.standard_simplex(args.d)
    _write(_export_complex(c, args.export), args.out)
    return EXIT_OK


def _cmd_subdivide(args) -> int:
    if args.rounds < 0:
        raise ValidationError("round count must be >= 0")
    colored = args.kind == "chromatic"
    c = _input_complex(args, colored)
    stage = proto.initial_stage(c)
    for _ in range(args.rounds):
        if colored:
            stage = proto.chromatic_stage(stage)
        else:
            stage = proto.barycentric_stage(stage)
    _write(_export_complex(stage.complex, args.export), args.out)
    return EXIT_OK


def _cmd_adversary(args) -> int:
    letters = adv.enumerate_letters(args.d, args.family)
    if args.json:
        text = _json_text(adv.adversary_to_json_dict(args.d, letters))
    else:
        lines = [f"{args.family} letters for d={args.d}: {len(letters)}"]
        for g in letters:
            lines.append(" ".join(f"{u}->{v}" for (u, v) in sorted(g.arcs)))
        text = "\n".join(lines) + "\n"
    _write(text, args.out)
    return EXIT_OK


def _cmd_protocol_complex(args) -> int:
    colored = args.mode == "colored"
    c = _input_complex(args, colored)
    adversary = adv.Adversary(args.d, args.adversary)
    stages = proto.iterate(c, adversary, args.mode, args.rounds)
    _write(_export_complex(stages[-1].complex, args.export), args.out)
    return EXIT_OK


def _cmd_sequences(args) -> int:
    c = cx.standard_simplex(args.d)
    stages = proto.barycentric_stages(c, args.rounds)
    seqs = spec.enumerate_sequences(stages, facets_only=args.facets_only)
    data = {
        "rounds": args.rounds,
        "facets_only": args.facets_only,
        "count": len(seqs),
        "sequences": [
            [[v.id for v in entry] for entry in seq.entries] for seq in seqs
        ],
    }
    _write(_json_text(data), args.out)
    return EXIT_OK


def _cmd_classify(args) -> int:
    point = spec.RationalPoint.parse(args.point)
    c = cx.standard_simplex(point.dim)
    stages = proto.barycentric_stages(c, args.rounds)
    result = spec.classify_point(point, stages, args.window)
    count = spec.downset_count(point, stages)
    data = {
        "point": [str(x) for x in point.coords],
        "rounds": args.rounds,
        "window": args.window,
        "class": result.kind.value,
        "codims": list(result.codims),
        "downset_count": count,
    }
    _write(_json_text(data), args.out)
    return EXIT_OK


def _cmd_solve(args) -> int:
    values = [v for v in args.values.split(",") if v != ""]
    if args.task == "consensus":
        task = tasks.consensus_task(values)
    elif args.task == "kset":
        if args.k is None:
            raise ValidationError("kset needs --k")
        task = tasks.k_set_agreement_task(values, args.k)
    else:  # baryagree
        task = tasks.barycentric_agreement_task(
            cx.make_complex([values]), args.subdivisions
        )
    mode = tasks.ORDER_PRESERVING if args.mode == "monotone" else tasks.SIMPLICIAL
    if args.task == "baryagree":
        protocol = tasks.ProtocolModel(kind="barycentric")
    elif args.protocol == "iis-colored":
        protocol = tasks.ProtocolModel(kind="message", family=adv.IIS, mode=proto.COLORED)
    else:
        protocol = tasks.ProtocolModel(kind="message", family=adv.IIS, mode=proto.COLORLESS)
    verdict = tasks.solve_up_to(
        task, protocol, args.rounds, mode, budget_seconds=args.budget_seconds
    )
    lines = [f"task: {args.task} on {','.join(values)}", f"verdict: {verdict.describe()}"]
    _write("\n".join(lines) + "\n", args.out)
    if verdict.solvable and args.witness_out:
        with open(args.witness_out, "w") as fh:
            fh.write(_json_text(verdict.witness.to_json_dict()))
    return EXIT_OK


def _cmd_journey(args) -> int:
    with open(args.word) as fh:
        word = adv.word_from_json_dict(json.load(fh))
    ok = adv.journey_exists(word, args.src, args.dst, args.round)
    _write(
        f"journey {args.src} -> {args.dst} from round {args.round}: {'yes' if ok else 'no'}\n",
        args.out,
    )
    return EXIT_OK


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spectra",
        description=(
            "Protocol complexes of round-based full-information models, "
            "their truncated limit spaces, and colorless task solvability."
        ),
    )
    parser.add_argument("--jobs", type=int, default=1, help="worker count (outputs are identical for any value)")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, export_default="json"):
        p.add_argument("--export", choices=["json", "dot", "text"], default=export_default)
        p.add_argument("--out", default=None, help="output path (default stdout)")

    p = sub.add_parser("complex", help="build and export a complex")
    p.add_argument("action", choices=["make", "simplex"])
    p.add_argument("--facets", default=None, help='e.g. "a,b;b,c"')
    p.add_argument("--input", default=None, help="complex JSON file")
    p.add_argument("--d", type=int, default=None)
    add_common(p)
    p.set_defaults(func=_cmd_complex)

    p = sub.add_parser("subdivide", help="iterated chain/chromatic subdivision")
    p.add_argument("--kind", choices=["barycentric", "chromatic"], required=True)
    p.add_argument("--rounds", type=int, required=True)
    p.add_argument("--input", default=None)
    p.add_argument("--d", type=int, default=None)
    add_common(p)
    p.set_defaults(func=_cmd_subdivide)

    p = sub.add_parser("adversary", help="enumerate adversary letters")
    p.add_argument("action", choices=["enumerate"])
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--family", choices=list(adv.FAMILIES), required=True)
    p.add_argument("--json", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_adversary)

    p = sub.add_parser("protocol-complex", help="iterate an adversary on an input complex")
    p.add_argument("--input", default=None)
    p.add_argument("--adversary", choices=list(adv.FAMILIES), required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--rounds", type=int, required=True)
    p.add_argument("--mode", choices=[proto.COLORED, proto.COLORLESS], required=True)
    add_common(p)
    p.set_defaults(func=_cmd_protocol_complex)

    p = sub.add_parser("sequences", help="depth-N protocol sequences of the subdivision")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--rounds", type=int, required=True)
    p.add_argument("--facets-only", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_sequences)

    p = sub.add_parser("classify", help="classify a rational point of the input simplex")
    p.add_argument("--point", required=True, help='e.g. "1/3,2/3"')
    p.add_argument("--rounds", type=int, required=True)
    p.add_argument("--window", type=int, default=3)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("solve", help="bounded-round colorless task solvability")
    p.add_argument("--task", choices=["consensus", "kset", "baryagree"], required=True)
    p.add_argument("--values", required=True, help="comma-separated input values")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--subdivisions", type=int, default=1, help="target subdivision depth for baryagree")
    p.add_argument(
        "--protocol",
        choices=["iis-colorless", "iis-colored"],
        default="iis-colorless",
        help="protocol to iterate (baryagree always runs its own subdivision protocol)",
    )
    p.add_argument("--rounds", type=int, required=True)
    p.add_argument("--mode", choices=["simplicial", "monotone"], default="monotone")
    p.add_argument("--budget-seconds", type=float, default=None)
    p.add_argument("--witness-out", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("journey", help="causal-influence query on a graph word")
    p.add_argument("--word", required=True, help="graph-word JSON file")
    p.add_argument("--from", dest="src", type=int, required=True)
    p.add_argument("--to", dest="dst", type=int, required=True)
    p.add_argument("--round", type=int, default=1)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_journey)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.jobs < 1:
        parser.error("--jobs must be >= 1")
    try:
        return args.func(args)
    except (ValidationError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ResourceLimitError, SearchTimeout) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
