"""``curvetop`` command-line interface.

Exit status: 0 on success, 1 when the input data is rejected or a check
fails, 2 on usage errors.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from typing import Callable, Sequence

from curvetop import graph as gc
from curvetop import lattice, meridian, mcg, pi1, resolution
from curvetop.fixtures import builtin_graph, verify_reference
from curvetop.graph import DualGraph

FORMATS = ("text", "json", "dot")


class UsageError(Exception):
    pass


def _dump(doc: object) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# input ------------------------------------------------------------------------------


def _read_input(args) -> object:
    if args.example:
        return None
    if args.input in (None, "-"):
        text = sys.stdin.read()
    else:
        with open(args.input, encoding="utf-8") as fh:
            text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise gc.GraphParseError(f"invalid JSON: {exc.msg}", line=exc.lineno,
                                 column=exc.colno) from None


def load_graph(args) -> DualGraph:
    """Graph from ``--example``, a graph document, or a branch document."""
    if args.example:
        return builtin_graph(args.example)
    doc = _read_input(args)
    if isinstance(doc, dict) and "branches" in doc:
        return resolution.resolve(resolution.parse_branches(doc))
    g = gc.from_dict(doc)
    gc.require_valid(g)
    return g


def _need(args, allowed: Sequence[str]) -> str:
    fmt = args.format or allowed[0]
    if fmt not in allowed:
        raise UsageError(f"{args.command}: --format must be one of {', '.join(allowed)}")
    return fmt


# subcommands ---------------------------------------------------------------------------


def cmd_resolve(args) -> str:
    fmt = _need(args, ("json", "dot", "text"))
    g = load_graph(args)
    if fmt == "dot":
        return gc.to_dot(g)
    if fmt == "json":
        return _dump(gc.to_dict(g))
    lines = [f"{v.id}: {v.self_intersection}" for v in g.vertices if v.exceptional]
    lines += [f"{a} - {b}" for a, b in g.edges]
    return "\n".join(lines) + "\n"


def _classification_dict(cls: gc.Classification) -> dict:
    return {
        "rupture": list(cls.rupture),
        "chains": [{"id": c.id, "ends": [c.end0, c.end1], "interior": list(c.interior),
                    "length": c.length} for c in cls.chains],
        "dead_branches": [{"id": d.id, "attach": d.attach, "components": list(d.tail)}
                          for d in cls.dead_branches],
        "strict_transforms": [{"id": s, "attach": d} for s, d in cls.strict_pairs],
        "degenerate": cls.degenerate,
        "notes": list(cls.flags),
    }


def cmd_classify(args) -> str:
    fmt = _need(args, ("text", "json"))
    cls = gc.classify(load_graph(args))
    if fmt == "json":
        return _dump(_classification_dict(cls))
    lines = [f"rupture: {' '.join(cls.rupture) or '-'}"]
    for c in cls.chains:
        lines.append(f"chain {c.id}: {' - '.join(c.members)} (length {c.length})")
    for d in cls.dead_branches:
        lines.append(f"dead branch {d.id}: {' - '.join(d.members)}")
    for s, d in cls.strict_pairs:
        lines.append(f"strict transform {s} on {d}")
    lines += [f"note: {f}" for f in cls.flags]
    return "\n".join(lines) + "\n"


def cmd_jsj(args) -> str:
    fmt = _need(args, ("text", "json", "dot"))
    j = gc.jsj_graph(load_graph(args))
    if fmt == "json":
        return _dump({"vertices": list(j.vertices),
                      "edges": [{"chain": c, "ends": [a, b]} for c, a, b in j.edges]})
    if fmt == "dot":
        lines = ["graph jsj {"] + [f'  "{v}";' for v in j.vertices]
        lines += [f'  "{a}" -- "{b}" [label="{c}"];' for c, a, b in j.edges]
        return "\n".join(lines + ["}"]) + "\n"
    lines = [f"blocks: {' '.join(j.vertices) or '-'}"]
    lines += [f"{c}: {a} -- {b}" for c, a, b in j.edges]
    return "\n".join(lines) + "\n"


def cmd_matrix(args) -> str:
    fmt = _need(args, ("text", "json"))
    im = lattice.intersection_matrix(load_graph(args))
    ee = im.ee_list()
    det = lattice.determinant(ee)
    nd = lattice.is_negative_definite(ee)
    if fmt == "json":
        return _dump({"exceptional": list(im.exceptional), "strict": list(im.strict),
                      "ee": lattice.matrix_to_json(ee),
                      "es": lattice.matrix_to_json(im.es_list()),
                      "determinant": str(det), "negative_definite": nd})
    width = max((len(str(x)) for row in ee for x in row), default=1)
    lines = [" ".join(str(x).rjust(width) for x in row) for row in ee]
    lines.append(f"determinant: {det}")
    lines.append(f"negative definite: {str(nd).lower()}")
    return "\n".join(lines) + "\n"


def cmd_mult(args) -> str:
    fmt = _need(args, ("text", "json"))
    mv = lattice.multiplicity_vector(load_graph(args))
    if fmt == "json":
        return _dump({"total": {e: n for e, n in zip(mv.exceptional, mv.total)},
                      "branches": {s: mv.branch(s) for s in mv.strict}})
    return " ".join(f"{e}:{n}" for e, n in zip(mv.exceptional, mv.total)) + "\n"


def cmd_pi1(args) -> str:
    fmt = _need(args, ("text", "json"))
    g = load_graph(args)
    pres = pi1.presentation(g)
    if fmt == "json":
        doc = pres.to_dict()
        doc["peripheral"] = [{"branch": p.branch, "meridian": p.meridian,
                              "parallel": p.parallel} for p in pi1.peripheral_subgroups(g)]
        return _dump(doc)
    text = pres.to_text()
    for p in pi1.peripheral_subgroups(g):
        text += f"peripheral {p.branch}: meridian {p.meridian}, parallel {p.parallel}\n"
    return text


def cmd_h1(args) -> str:
    fmt = _need(args, ("text", "json"))
    g = load_graph(args)
    pres = pi1.presentation(g)
    h1 = pi1.abelianization(pres, g)
    ok = pi1.check_relations_abelian(pres, h1)
    if fmt == "json":
        doc = h1.to_dict()
        doc["relators_vanish"] = ok
        return _dump(doc)
    lines = [f"rank: {h1.rank}", "torsion: none"]
    for gen, vec in h1.expressions:
        terms = " + ".join(f"{c}*{s}" for c, s in zip(vec, h1.strict) if c)
        lines.append(f"{gen} = {terms or '0'}")
    lines.append(f"relators vanish: {str(ok).lower()}")
    return "\n".join(lines) + "\n"


def cmd_meridians(args) -> str:
    fmt = _need(args, ("text", "json"))
    if args.self_intersections is not None:
        e = [int(x) for x in args.self_intersections.split(",") if x.strip()]
        members: list[str] = []
        label = "custom"
    else:
        if not args.chain:
            raise UsageError("meridians: give --chain ID or --self-intersections LIST")
        g = load_graph(args)
        cls = gc.classify(g)
        try:
            chain = cls.chain(args.chain)
            members = list(chain.members)
            label = chain.id
            e = [g.self_intersection(x) for x in chain.interior]
        except gc.GraphError:
            dead = cls.dead_branch(args.chain)
            members = list(dead.members)
            label = dead.id
            e = [g.self_intersection(x) for x in dead.tail]
    seq = meridian.chain_meridians(e, relaxed=args.relaxed)
    coeffs = meridian.chain_coefficients(e, relaxed=args.relaxed)
    if fmt == "json":
        return _dump({"chain": label, "components": members, "self_intersections": e,
                      "meridians": [list(v) for v in seq.vectors],
                      "a": coeffs.a, "b": coeffs.b, "abs_a": coeffs.abs_a,
                      "relaxed": seq.relaxed})
    kind = "dead branch" if label.startswith("M") else "chain"
    lines = [f"{kind} {label}: {' - '.join(members)}" if members else f"{kind} {label}",
             f"self-intersections: {' '.join(map(str, e)) or '-'}",
             "meridians: " + " ".join(meridian.fmt_vec(v) for v in seq.vectors),
             f"c0 = {coeffs.a}*c_l {'-' if coeffs.b < 0 else '+'} {abs(coeffs.b)}*c_(l+1); "
             f"|a| = {coeffs.abs_a}"]
    if seq.relaxed:
        lines.append("warning: non-minimal self-intersections (relaxed mode)")
    return "\n".join(lines) + "\n"


def cmd_hj(args) -> str:
    fmt = _need(args, ("text", "json"))
    a, b = meridian.parse_vec(args.from_), meridian.parse_vec(args.to)
    chain = meridian.hj_chain(a, b)
    oracle = None
    if args.check:
        try:
            oracle = meridian.brute_force_chain(a, b) == chain
        except meridian.OracleError:
            oracle = "inconclusive"
    if fmt == "json":
        doc = {"chain": [list(v) for v in chain],
               "self_intersections": [-meridian.det(chain[k - 1], chain[k + 1])
                                      for k in range(1, len(chain) - 1)]}
        if args.check:
            doc["oracle"] = oracle
        return _dump(doc)
    out = " ".join(meridian.fmt_vec(v) for v in chain) + "\n"
    if args.check:
        out += f"oracle: {oracle if isinstance(oracle, str) else ('agrees' if oracle else 'DISAGREES')}\n"
    return out


def cmd_seifert(args) -> str:
    fmt = _need(args, ("text", "json"))
    g = load_graph(args)
    ids = [args.rupture] if args.rupture else list(gc.classify(g).rupture)
    blocks = [meridian.seifert_block(g, r) for r in ids]
    if fmt == "json":
        return _dump([{"rupture": b.rupture, "boundary_count": b.boundary_count,
                       "fibers": [{"dead_branch": f.dead_branch,
                                   "meridian": list(f.meridian),
                                   "a": f.coefficients.a, "b": f.coefficients.b}
                                  for f in b.fibers]} for b in blocks])
    lines = []
    for b in blocks:
        fibers = ", ".join(f"{f.dead_branch}: a={f.coefficients.a} b={f.coefficients.b}"
                           for f in b.fibers) or "none"
        lines.append(f"{b.rupture}: boundary {b.boundary_count}; exceptional fibers: {fibers}")
    return "\n".join(lines) + "\n" if lines else "no rupture components\n"


def cmd_mcg(args) -> str:
    fmt = _need(args, ("text", "json"))
    cat = mcg.generator_catalogue(load_graph(args))
    if fmt == "json":
        return _dump(cat.to_dict())
    lines = []
    for b in cat.artin:
        triv = " (trivial modulo center)" if b.effectively_trivial else ""
        lines.append(f"Artin block at {b.rupture}: valence {b.valence}, {b.strands} strands, "
                     f"{len(b.generators)} generators {' '.join(b.generators)}{triv}")
    for t in cat.twists:
        lines.append(f"Z^2 twists on {t.chain}: cut edge {t.cut_edge[0]}-{t.cut_edge[1]}, "
                     f"basis ({t.basis[0]}, {t.basis[1]})")
    lines.append(f"generator count: {cat.generator_count}")
    return "\n".join(lines) + "\n"


def cmd_twist(args) -> str:
    fmt = _need(args, ("text", "json"))
    g = load_graph(args)
    pres = pi1.presentation(g)
    endo = mcg.dehn_twist_endo(g, pres, mcg.TwistParam(args.chain, args.p, args.q))
    verdicts = None
    if args.compare_inner:
        chain = gc.classify(g).chain(args.chain)
        inner = mcg.inner_automorphism(pres, mcg.twist_word(pres, chain.cut_edge, args.p, args.q))
        verdicts = mcg.compare_endos(endo, inner, pres)
    if fmt == "json":
        doc = {"chain": args.chain, "p": args.p, "q": args.q, "images": endo.to_dict()}
        if verdicts is not None:
            doc["verdicts"] = verdicts
        return _dump(doc)
    width = max(len(x) for x in pres.generators)
    lines = []
    for gen, img in endo.images:
        row = f"{gen.ljust(width)}  ->  {img}"
        if verdicts is not None:
            row += f"    [{verdicts[gen]}]"
        lines.append(row)
    return "\n".join(lines) + "\n"


def cmd_autos(args) -> str:
    fmt = _need(args, ("text", "json"))
    data = mcg.branch_permutation_map(load_graph(args))
    if fmt == "json":
        return _dump(data.to_dict())
    lines = [f"automorphisms: {data.group_order}",
             f"branch permutations: {data.image_order}",
             f"injective: {str(data.injective).lower()}"]
    for perm in data.permutations:
        lines.append("  " + " ".join(f"{a}->{b}" for a, b in perm))
    return "\n".join(lines) + "\n"


def cmd_verify_example(args) -> tuple[str, int]:
    fmt = _need(args, ("text", "json"))
    checks = verify_reference()
    status = 0 if all(c.ok for c in checks) else 1
    if fmt == "json":
        return _dump([{"check": c.name, "expected": c.expected, "actual": c.actual,
                       "ok": c.ok} for c in checks]), status
    w = max(len(c.name) for c in checks)
    lines = [f"{'PASS' if c.ok else 'FAIL'}  {c.name.ljust(w)}  {c.actual}"
             + ("" if c.ok else f"  (expected {c.expected})") for c in checks]
    lines.append(f"{sum(c.ok for c in checks)}/{len(checks)} checks passed")
    return "\n".join(lines) + "\n", status


def cmd_selftest(args) -> tuple[str, int]:
    """Resolve random curves and check every graph invariant on each."""
    from curvetop.random_curves import random_curve

    rng = random.Random(args.seed)
    failures = []
    for i in range(args.count):
        branches = random_curve(rng)
        try:
            g, trace = resolution.resolve_traced(branches)
            report = gc.validate(g)
            assert report.ok, report.codes()
            assert all(s.measure_after < s.measure_before for s in trace.steps)
            pres = pi1.presentation(g)
            h1 = pi1.abelianization(pres, g)
            assert h1.rank == len(branches)
            assert pi1.check_relations_abelian(pres, h1)
        except (AssertionError, ValueError) as exc:
            failures.append(f"case {i}: {exc!r}")
    lines = [f"seed {args.seed}: {args.count - len(failures)}/{args.count} curves passed"]
    lines += failures
    return "\n".join(lines) + "\n", 1 if failures else 0


COMMANDS: dict[str, tuple[Callable, str]] = {
    "resolve": (cmd_resolve, "branch JSON -> dual graph"),
    "classify": (cmd_classify, "rupture components, chains, dead branches"),
    "jsj": (cmd_jsj, "JSJ graph: rupture blocks joined by chains"),
    "matrix": (cmd_matrix, "intersection matrix, determinant, definiteness"),
    "mult": (cmd_mult, "multiplicity vector"),
    "pi1": (cmd_pi1, "fundamental group presentation"),
    "h1": (cmd_h1, "abelianization"),
    "meridians": (cmd_meridians, "meridian sequence of a chain"),
    "hj": (cmd_hj, "unimodular chain between two primitive vectors"),
    "seifert": (cmd_seifert, "Seifert block data per rupture component"),
    "mcg": (cmd_mcg, "mapping class generator catalogue"),
    "twist": (cmd_twist, "Dehn twist action on the presentation"),
    "autos": (cmd_autos, "tree automorphisms and branch permutations"),
    "verify-example": (cmd_verify_example, "regression table for the reference curve"),
    "selftest": (cmd_selftest, "invariant checks on random curves"),
}

NEEDS_INPUT = {"resolve", "classify", "jsj", "matrix", "mult", "pi1", "h1", "meridians",
               "seifert", "mcg", "twist", "autos"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curvetop",
        description="Topology of plane curve singularities from resolution graphs.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text, description=help_text)
        if name in NEEDS_INPUT:
            src = p.add_mutually_exclusive_group()
            src.add_argument("-i", "--input", help="input JSON file (default: stdin)")
            src.add_argument("--example", help="built-in curve: reference, cusp, tacnode, smooth")
        else:
            p.set_defaults(input=None, example=None)
        p.add_argument("-o", "--output", help="write the report here instead of stdout")
        p.add_argument("--format", choices=FORMATS, help="output format")
        if name == "meridians":
            p.add_argument("--chain", help="chain id (C1, E3-E5) or dead branch id (M1)")
            p.add_argument("--self-intersections", metavar="LIST",
                           help="comma-separated interior self-intersections instead of a graph")
            p.add_argument("--relaxed", action="store_true",
                           help="accept self-intersections above -2")
        elif name == "hj":
            p.add_argument("--from", dest="from_", required=True, metavar="X,Y")
            p.add_argument("--to", required=True, metavar="X,Y")
            p.add_argument("--check", action="store_true",
                           help="also run the exhaustive search and compare")
        elif name == "seifert":
            p.add_argument("--rupture", help="only this rupture component")
        elif name == "twist":
            p.add_argument("--chain", required=True)
            p.add_argument("-p", type=int, default=0)
            p.add_argument("-q", type=int, default=0)
            p.add_argument("--compare-inner", action="store_true",
                           help="compare with conjugation by the twist word")
        elif name == "selftest":
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--count", type=int, default=200)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    func = COMMANDS[args.command][0]
    try:
        result = func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"curvetop: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"curvetop {args.command}: {exc}", file=sys.stderr)
        return 1
    text, status = result if isinstance(result, tuple) else (result, 0)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
