"""Command-line front end.

Every subcommand reads schemes from JSON files and writes one JSON or CSV
payload to stdout.  Exit codes: 0 ok, 1 negative outcome (unstorable subset,
invalid scheme, bad element, broken scheme, failed audit), 2 usage or input
error, 3 internal invariant failure.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from . import analysis, plotting
from .adversary import AdversaryError, AdversaryPair, adversarial_pair, certify, two_table_contradiction
from .fixtures import FIXTURES, random_scheme
from .model import Element, SchemeFormatError, Table, load_scheme, parse_subset, validate
from .storability import can_store, can_store_bruteforce, forced_table, answer_query, verify_assignment
from .synth import SYNTH_COLUMNS, synth_min_space
from .transform import STAGE_COLUMNS, TransformError, modify
from .universe import CapError, Node, badness, enumerate_paths, i_universe, universe_via_paths

OK, NEGATIVE, USAGE, INTERNAL = 0, 1, 2, 3


@dataclass
class CommandResult:
    exit_code: int
    stdout: str = ""
    stderr: str = ""


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _int_list(text: str) -> list[int]:
    """Comma-separated integers; ``a-b`` is an inclusive range and ``x^y`` a power."""
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        try:
            if "^" in tok:
                base, exp = tok.split("^")
                out.append(int(base) ** int(exp))
            elif "-" in tok[1:]:
                lo, hi = tok.split("-", 1)
                out.extend(range(int(lo), int(hi) + 1))
            else:
                out.append(int(tok))
        except ValueError:
            raise argparse.ArgumentTypeError(f"not an integer list: {text!r}") from None
    if not out:
        raise argparse.ArgumentTypeError("empty integer list")
    return out


def _table(text: str) -> Table:
    try:
        return Table(text.upper())
    except ValueError:
        raise argparse.ArgumentTypeError(f"table must be B or C, got {text!r}") from None


def _pins(text: str) -> dict[str, Table]:
    pins = {}
    for tok in filter(None, (t.strip() for t in text.split(","))):
        blk, _, table = tok.partition("=")
        pins[blk] = _table(table)
    return pins


def _json(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _csv(columns, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows(rows)
    return buf.getvalue()


def _emit(args, payload, columns=None, rows=None) -> str:
    if args.format == "csv":
        if columns is None:
            raise UsageError(f"{args.command}: CSV output is not available, use --format json")
        return _csv(columns, rows)
    return _json(payload)


def _scheme(args):
    if args.scheme is None:
        raise UsageError(f"{args.command}: --scheme is required")
    return load_scheme(args.scheme)


def _require(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        flags = ", ".join("--" + n.replace("_", "-") for n in missing)
        raise UsageError(f"{args.command}: missing {flags}")


def _element(args) -> Element:
    return Element.parse(args.element)


# subcommands; each returns (exit code, stdout text)

def cmd_validate(args):
    scheme = _scheme(args)
    report = validate(scheme, allow_singletons=args.allow_singletons, strict_size=args.strict)
    rows = [[v.code, "error", v.message] for v in report.violations]
    rows += [[v.code, "warning", v.message] for v in report.warnings]
    out = _emit(args, report.to_dict(), ["code", "severity", "message"], rows)
    return (OK if report.ok else NEGATIVE), out


def cmd_store(args):
    _require(args, "subset")
    scheme = _scheme(args)
    subset = parse_subset(args.subset)
    pins = _pins(args.pin) if args.pin else None
    solver = can_store_bruteforce if args.brute else can_store
    res = solver(scheme, subset, pins)
    payload = res.to_dict()
    if res.storable:
        payload["mismatches"] = [str(m) for m in verify_assignment(scheme, res.assignment, subset)]
    code = OK if res.storable else NEGATIVE
    if args.block is not None:
        forced = forced_table(scheme, subset, args.block)
        payload["block"] = {"name": args.block, "forced": forced.value}
    return code, _emit(args, payload)


def cmd_query(args):
    _require(args, "subset")
    scheme = _scheme(args)
    subset = parse_subset(args.subset)
    res = can_store(scheme, subset)
    if not res.storable:
        return NEGATIVE, _emit(args, res.to_dict())
    targets = [_element(args)] if args.element else list(scheme.universe)
    for e in targets:
        if not scheme.has_element(e):
            raise ValueError(f"element {e} is not in the universe")
    rows = [[str(e), int(answer_query(scheme, res.assignment, e)), int(e in subset)] for e in targets]
    payload = {"answers": [{"element": r[0], "answer": bool(r[1]), "member": bool(r[2])} for r in rows]}
    return OK, _emit(args, payload, ["element", "answer", "member"], rows)


def cmd_paths(args):
    _require(args, "start", "length")
    scheme = _scheme(args)
    paths = enumerate_paths(scheme, Node.parse(args.start), args.length, override_cap=args.override_cap)
    if args.end:
        end = Node.parse(args.end)
        paths = [p for p in paths if p.last == end]
    rows = [
        [pid, pos, str(node.antecedent), str(node.consequent), node.table.value]
        for pid, path in enumerate(paths)
        for pos, node in enumerate(path.nodes)
    ]
    payload = {"count": len(paths), "paths": [p.to_list() for p in paths]}
    return OK, _emit(args, payload, ["path", "position", "antecedent", "consequent", "table"], rows)


def cmd_universe(args):
    _require(args, "element", "table", "i")
    scheme = _scheme(args)
    fn = universe_via_paths if args.via_paths else i_universe
    members = sorted(fn(scheme, _element(args), args.table, args.i, override_cap=args.override_cap))
    payload = {"element": args.element, "table": args.table.value, "i": args.i,
               "universe": [str(e) for e in members]}
    return OK, _emit(args, payload, ["element"], [[str(e)] for e in members])


def cmd_badness(args):
    _require(args, "element", "table", "i")
    scheme = _scheme(args)
    cert = badness(scheme, _element(args), args.table, args.i, override_cap=args.override_cap)
    payload = {"bad": cert is not None, "certificate": None if cert is None else cert.to_dict()}
    return (NEGATIVE if cert else OK), _emit(args, payload)


def cmd_adversary(args):
    scheme = _scheme(args)
    if args.certificate:
        with open(args.certificate, encoding="utf-8") as fh:
            data = json.load(fh)
        # accept either a bare certificate or a saved adversary report
        pair = AdversaryPair.from_dict(data.get("certificate", data) if isinstance(data, dict) else data)
    else:
        _require(args, "element", "table", "i")
        try:
            pair = adversarial_pair(scheme, _element(args), args.table, args.i,
                                    seed_choice=args.seed_choice, override_cap=args.override_cap)
        except AdversaryError as exc:
            return NEGATIVE, _emit(args, {"certificate": None, "reason": str(exc)})
    check = certify(scheme, pair)
    payload = {"certificate": pair.to_dict(), "check": check.to_dict()}
    return (OK if check.passed else NEGATIVE), _emit(args, payload)


def cmd_contradiction(args):
    _require(args, "i")
    scheme = _scheme(args)
    blocks = [args.block] if args.block else list(scheme.blocks)
    found = []
    for blk in blocks:
        pair = two_table_contradiction(scheme, blk, args.i)
        if pair is not None:
            found.append((pair, certify(scheme, pair)))
    rows = [[p.target_block, len(p.S), len(p.X), int(c.passed)] for p, c in found]
    payload = {"i": args.i, "contradictions": [{"certificate": p.to_dict(), "check": c.to_dict()}
                                               for p, c in found]}
    return (NEGATIVE if found else OK), _emit(args, payload, ["block", "s_size", "x_size", "certified"], rows)


def cmd_transform(args):
    _require(args, "i")
    scheme = _scheme(args)
    result, report = modify(scheme, args.i)
    if args.figure:
        plotting.transform_figure(report, args.figure)
    payload = report.to_dict()
    payload["parts"] = {"good": result.prime.to_dict(), "bad": result.double_prime.to_dict()}
    return (OK if report.goodness_ok else NEGATIVE), _emit(args, payload, STAGE_COLUMNS, report.rows())


def cmd_bounds(args):
    _require(args, "m", "n")
    try:
        rows = analysis.compare_bounds(args.m, args.n)
    except ValueError as exc:
        raise UsageError(f"bounds: {exc}") from None
    if args.figure:
        plotting.bounds_figure(rows, args.figure)
    if args.format == "csv":
        return OK, analysis.rows_to_csv(rows, analysis.BOUNDS_COLUMNS)
    return OK, _json({"rows": [vars(r) for r in rows]})


def _good_scheme(task):
    seed, s, b, t = task
    return analysis.random_good_scheme(random.Random(seed), s, b, t)


def cmd_identity(args):
    _require(args, "t", "seed")
    rng = random.Random(args.seed)
    if args.scheme is None:
        return _identity_sweep(args, rng)
    scheme = _scheme(args)
    results, ok = [], True
    for t in args.t:
        weights = {e: rng.randint(-100, 100) for e in scheme.universe}
        try:
            identity = analysis.universe_sum_identity_check(scheme, t, weights)
        except analysis.PreconditionError as exc:
            results.append({"t": t, "precondition": False, "reason": str(exc)})
            ok = False
            continue
        size = analysis.goodness_size_check(scheme, t)
        ok = ok and identity and size.holds
        results.append({"t": t, "precondition": True, "identity": identity, "size_check": size.to_dict(),
                        "ratio": analysis.universe_sum_ratio(scheme, t)})
    return (OK if ok else NEGATIVE), _emit(args, {"results": results})


def _identity_sweep(args, rng):
    # one sub-seed per scheme so the output does not depend on --jobs
    tasks = [(rng.randrange(2 ** 32), args.s, args.b, max(args.t)) for _ in range(args.count)]
    schemes = _map(_good_scheme, tasks, args.jobs)
    rows = analysis.ratio_rows(schemes, args.t)
    if args.figure:
        plotting.ratio_figure(rows, args.figure)
    if args.format == "csv":
        return OK, analysis.rows_to_csv(rows, ["scheme_id", "t", "ratio"])
    return OK, _json({"rows": rows})


def _synth_task(task):
    return synth_min_space(*task)


def _map(fn, tasks, jobs):
    if jobs and jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, tasks))
    return [fn(t) for t in tasks]


def cmd_synth(args):
    _require(args, "n", "m", "b")
    tasks = sorted((n, m, b) for n in args.n for m in args.m for b in args.b if b >= 1 and m % b == 0)
    if not tasks:
        raise UsageError("synth: no (m, b) pair with b dividing m")
    results = _map(_synth_task, tasks, args.jobs)
    if args.figure:
        plotting.synth_figure(results, args.figure)
    if args.format == "csv":
        return OK, analysis.rows_to_csv([r.row() for r in results], SYNTH_COLUMNS)
    payload = {"rows": [dict(r.row(), minimal_s=r.minimal_s,
                             witness=None if r.witness is None else r.witness.to_dict()) for r in results]}
    return OK, _json(payload)


def cmd_gen(args):
    if args.fixture:
        scheme = FIXTURES[args.fixture]()
    else:
        _require(args, "seed", "s", "b")
        rng = random.Random(args.seed)
        if args.good_t:
            scheme = analysis.random_good_scheme(rng, args.s, args.b, args.good_t)
        else:
            scheme = random_scheme(rng, args.s, args.b)
    text = scheme.to_json() + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        return OK, ""
    return OK, text


COMMANDS = {
    "validate": (cmd_validate, "check a scheme against the restrictions"),
    "store": (cmd_store, "decide whether a subset can be stored"),
    "query": (cmd_query, "answer membership queries for a stored subset"),
    "paths": (cmd_paths, "enumerate paths from a start node"),
    "universe": (cmd_universe, "compute an element's i-Universe"),
    "badness": (cmd_badness, "test whether an element is i-bad"),
    "adversary": (cmd_adversary, "build or replay an (S, X) certificate"),
    "contradiction": (cmd_contradiction, "find blocks that fit in neither table"),
    "transform": (cmd_transform, "run the split/swap/relabel pipeline"),
    "bounds": (cmd_bounds, "tabulate the space bounds"),
    "identity": (cmd_identity, "check universe-size identities, or sweep their ratio"),
    "synth": (cmd_synth, "search for the smallest scheme storing all small subsets"),
    "gen": (cmd_gen, "write a fixture or random scheme as JSON"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="twoprobe", description="Restricted two-adaptive bitprobe schemes.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("--format", choices=("json", "csv"), default="json")
        if name not in ("bounds", "synth", "gen"):
            p.add_argument("--scheme", metavar="FILE")
        if name in ("store", "query"):
            p.add_argument("--subset", metavar="ELEMS", help='e.g. "a:1,b:2"')
        if name in ("query", "universe", "badness", "adversary"):
            p.add_argument("--element", metavar="BLOCK:INDEX")
        if name in ("universe", "badness", "adversary"):
            p.add_argument("--table", type=_table)
        if name in ("universe", "badness", "adversary", "contradiction", "transform"):
            p.add_argument("--i", type=int)
        if name in ("paths", "universe", "badness", "adversary"):
            p.add_argument("--override-cap", action="store_true",
                           help="allow depths beyond floor(b/2) - 1")
        if name in ("transform", "bounds", "identity", "synth"):
            p.add_argument("--figure", metavar="PATH", help="also write a figure here")
        if name in ("identity", "synth"):
            p.add_argument("--jobs", type=int, default=1)
    p = sub.choices["validate"]
    p.add_argument("--strict", action="store_true", help="also require |B|, |C| <= s")
    p.add_argument("--allow-singletons", action="store_true")
    p = sub.choices["store"]
    p.add_argument("--pin", metavar="BLOCK=TABLE,...", help="force blocks into tables")
    p.add_argument("--block", help="also report which table this block is forced into")
    p.add_argument("--brute", action="store_true", help="use exhaustive placement search")
    p = sub.choices["paths"]
    p.add_argument("--start", metavar="NODE", help='e.g. "a:1,b:1,B"')
    p.add_argument("--length", type=int)
    p.add_argument("--end", metavar="NODE")
    sub.choices["universe"].add_argument("--via-paths", action="store_true")
    p = sub.choices["adversary"]
    p.add_argument("--seed-choice", choices=("S", "X"), default="S")
    p.add_argument("--certificate", metavar="FILE", help="replay a saved certificate instead")
    sub.choices["contradiction"].add_argument("--block")
    p = sub.choices["bounds"]
    p.add_argument("--m", type=_int_list, help='e.g. "2^20,2^40"')
    p.add_argument("--n", type=_int_list, help='e.g. "1-40"')
    p = sub.choices["identity"]
    p.add_argument("--t", type=_int_list)
    p.add_argument("--seed", type=int)
    p.add_argument("--count", type=int, default=50, help="random schemes in a sweep")
    p.add_argument("--s", type=int, default=6)
    p.add_argument("--b", type=int, default=8)
    p = sub.choices["synth"]
    p.add_argument("--n", type=_int_list)
    p.add_argument("--m", type=_int_list)
    p.add_argument("--b", type=_int_list)
    p = sub.choices["gen"]
    p.add_argument("--fixture", choices=sorted(FIXTURES))
    p.add_argument("--seed", type=int)
    p.add_argument("--s", type=int)
    p.add_argument("--b", type=int)
    p.add_argument("--good-t", type=int, help="resample until index-1 elements are t-good")
    p.add_argument("--out", metavar="FILE")
    return parser


def run(argv) -> CommandResult:
    parser = build_parser()
    help_out = io.StringIO()
    try:
        with contextlib.redirect_stdout(help_out):
            args = parser.parse_args(list(argv))
    except UsageError as exc:
        return CommandResult(USAGE, "", str(exc) + "\n")
    except SystemExit as exc:  # --help
        return CommandResult(OK if not exc.code else USAGE, help_out.getvalue())
    handler = COMMANDS[args.command][0]
    try:
        code, out = handler(args)
    except UsageError as exc:
        return CommandResult(USAGE, "", f"{parser.format_usage()}twoprobe: error: {exc}\n")
    except TransformError as exc:
        return CommandResult(INTERNAL, "", f"twoprobe: invariant failure: {exc}\n")
    except (OSError, SchemeFormatError, CapError, AdversaryError, KeyError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        return CommandResult(USAGE, "", f"twoprobe {args.command}: {msg}\n")
    return CommandResult(code, out)


def main(argv=None) -> int:
    result = run(sys.argv[1:] if argv is None else argv)
    sys.stdout.write(result.stdout)
    sys.stderr.write(result.stderr)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
