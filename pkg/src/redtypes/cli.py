"""Command-line front end."""

import argparse
import json
import sys
from fractions import Fraction

from . import classify as C
from .chains import ChainError, inner_sequence, outer_sequence, shortest_one_path
from .fibre import Fibre, FibreError, total_genus, validate
from .label import (LabelSemanticError, LabelSyntaxError, canonical_label, parse_label,
                    type_label)


class UsageError(Exception):
    pass


def _read_fibre(path):
    text = sys.stdin.read() if path == "-" else open(path).read()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise UsageError(f"{path}: not JSON: {e}") from None
    return Fibre.from_json(obj)


def _emit(args, text_lines, obj):
    if args.json:
        print(json.dumps(obj))
    else:
        for ln in text_lines:
            print(ln)


def _table(rows):
    if not rows:
        return []
    w = [max(len(str(r[i])) for r in rows) for i in range(len(rows[0]))]
    return ["  ".join(str(x).rjust(w[i]) for i, x in enumerate(r)).rstrip() for r in rows]


def cmd_chain(args):
    if args.kind == "outer":
        if len(args.values) != 2:
            raise UsageError("chain outer needs M D")
        seq = outer_sequence(*args.values)
    else:
        vals = list(args.values)
        if args.depth is not None:
            vals.append(args.depth)
        if len(vals) != 5:
            raise UsageError("chain inner needs M D M2 D2 N (pass a negative N after -- or via --depth)")
        seq = inner_sequence(*vals)
    _emit(args, [" ".join(map(str, seq))], list(seq))


def _fraction(s):
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a fraction: {s}") from None


def cmd_onepath(args):
    path = shortest_one_path(_fraction(args.a), _fraction(args.b))
    strs = [str(x) for x in path]
    _emit(args, [" ".join(strs)], strs)


def cmd_cores(args):
    cores = sorted(C.enumerate_cores(args.chi), key=lambda c: (c.m, str(c)))
    _emit(args, [str(c) for c in cores], [{"m": c.m, "residues": list(c.residues), "name": str(c)}
                                          for c in cores])


def cmd_types(args):
    if args.by_shape:
        groups = C.types_by_shape(args.chi)
        lines, obj = [], {}
        for w in sorted(groups, key=lambda w: (len(w), w)):
            labs = sorted(type_label(t) for t in groups[w])
            key = f"({args.chi};{','.join(map(str, w))})"
            lines.append(f"{key} {len(labs)}: {' '.join(labs)}")
            obj[key] = labs
        _emit(args, lines, obj)
    else:
        labs = sorted(type_label(t) for t in C.enumerate_principal_types(args.chi))
        _emit(args, labs, labs)


def cmd_shapes(args):
    shapes = C.enumerate_shapes(args.genus, args.extended)
    if args.count:
        _emit(args, [str(len(shapes))], len(shapes))
        return
    _emit(args, [str(s) for s in shapes],
          [{"chi": list(s.chis), "edges": [[u, v, list(w)] for u, v, w in s.edges]} for s in shapes])


def cmd_families(args):
    if args.semistable:
        shapes = C.enumerate_shapes(args.genus, args.extended)
        fs = C.enumerate_families(args.genus, semistable=True, jobs=args.jobs, shapes=shapes)
    else:
        fs = C.enumerate_families(args.genus, jobs=args.jobs, extended=args.extended)
    if args.count:
        _emit(args, [str(len(fs))], len(fs))
        return
    _emit(args, [f.label for f in fs], [{"label": f.label, "fibre": f.fibre().to_json()} for f in fs])


def cmd_validate(args):
    errs = validate(_read_fibre(args.file))
    _emit(args, errs or ["ok"], {"valid": not errs, "violations": errs})
    return 1 if errs else 0


def cmd_genus(args):
    f = _read_fibre(args.file)
    errs = validate(f)
    if errs:
        raise FibreError("; ".join(errs))
    g = total_genus(f)
    _emit(args, [str(g)], g)


def cmd_label(args):
    lab = canonical_label(_read_fibre(args.file))
    _emit(args, [lab], lab)


def cmd_parse(args):
    f = parse_label(args.label)
    if args.json:
        print(f.dumps())
        return
    rows = [("id", "m", "g", "nodes")] + [(c.id, c.m, c.g, c.nodes) for c in f.components]
    lines = _table(rows)
    lines += ["intersections: " + " ".join(f"{i}-{j}" + (f"x{k}" if k > 1 else "")
                                           for (i, j), k in sorted(f.intersections.items()))]
    _emit(args, lines, None)


def cmd_selftest(args):
    from . import acceptance
    which = {int(x) for x in args.criteria.split(",")} if args.criteria else None
    ok = acceptance.run(which, jobs=args.jobs, extended=args.extended)
    return 0 if ok else 1


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="JSON output")
    p = argparse.ArgumentParser(prog="redtypes", description="Reduction types of curves.",
                                parents=[common])
    sub = p.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("chain", parents=[common], help="chain multiplicity sequences")
    s.add_argument("kind", choices=["outer", "inner"])
    s.add_argument("values", type=int, nargs="*")
    s.add_argument("--depth", type=int)
    s.set_defaults(fn=cmd_chain)

    s = sub.add_parser("onepath", parents=[common], help="shortest 1-path from A down to B")
    s.add_argument("a")
    s.add_argument("b")
    s.set_defaults(fn=cmd_onepath)

    s = sub.add_parser("cores", parents=[common], help="cores with given chi")
    s.add_argument("--chi", type=int, required=True)
    s.set_defaults(fn=cmd_cores)

    s = sub.add_parser("types", parents=[common], help="principal types with given chi")
    s.add_argument("--chi", type=int, required=True)
    s.add_argument("--by-shape", action="store_true")
    s.set_defaults(fn=cmd_types)

    for name, fn in (("shapes", cmd_shapes), ("families", cmd_families)):
        s = sub.add_parser(name, parents=[common], help=f"{name} of given genus")
        s.add_argument("--genus", type=int, required=True)
        s.add_argument("--count", action="store_true")
        s.add_argument("--extended", action="store_true")
        if name == "families":
            s.add_argument("--semistable", action="store_true")
            s.add_argument("--jobs", type=int)
        s.set_defaults(fn=fn)

    for name, fn in (("validate", cmd_validate), ("genus", cmd_genus), ("label", cmd_label)):
        s = sub.add_parser(name, parents=[common], help=f"{name} of a JSON fibre ('-' for stdin)")
        s.add_argument("file")
        s.set_defaults(fn=fn)

    s = sub.add_parser("parse", parents=[common], help="fibre with a given label")
    s.add_argument("label")
    s.set_defaults(fn=cmd_parse)

    s = sub.add_parser("selftest", parents=[common], help="run the acceptance checks")
    s.add_argument("--criteria", help="comma-separated criterion numbers")
    s.add_argument("--jobs", type=int)
    s.add_argument("--extended", action="store_true")
    s.set_defaults(fn=cmd_selftest)
    return p


def main(argv=None):
    p = build_parser()
    try:
        args = p.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2
    try:
        return args.fn(args) or 0
    except (UsageError, LabelSyntaxError, FileNotFoundError, IsADirectoryError) as e:
        print(f"redtypes: {e}", file=sys.stderr)
        return 2
    except (ChainError, FibreError, LabelSemanticError, ValueError) as e:
        print(f"redtypes: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
