"""Command-line entry point.

Exit codes: 0 when the checked property holds (or a homomorphism exists),
1 when it does not, 2 on errors, exhausted budgets and usage mistakes.
With ``--json`` every command prints a single report object instead of
text; timings are left out unless ``--timings`` is given, so reruns are
byte-identical.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from pathlib import Path
from typing import Any, Callable, Sequence

from . import __version__
from .catalog import builtin, builtin_names
from .config import Config, ConfigError, load_config
from .constructions import (
    b_left,
    b_right,
    diameter,
    girth,
    incidence,
    n_pinch,
)
from .duality import (
    anti_identity_of_obstruction,
    colour_family_duality,
    duality_upto,
    find_critical_obstructions,
)
from .efgame import (
    board_from_structure,
    build_boards,
    build_boards_colour,
    verify_boards,
)
from .lattices import (
    TWO,
    a_n,
    check_witness,
    hasse_dot,
    p_n,
    verify_lattice_cex,
)
from .logic import check_closure
from .solver import (
    BudgetExceeded,
    EnumerationCapExceeded,
    SearchConfig,
    components,
    enumerate_homs,
    find_hom,
    find_surjective_hom,
)
from .structures import RelStructure, SizeBoundError
from .textformat import FormatError, parse_document, serialize_structure

EXIT_TRUE, EXIT_FALSE, EXIT_ERROR = 0, 1, 2


class CliError(Exception):
    pass


class Run:
    """Collects the report for one command."""

    def __init__(self, command: str, args: argparse.Namespace, config: Config):
        self.command = command
        self.args = args
        self.config = config
        self.inputs: dict[str, str] = {}
        self.counters: dict[str, Any] = {}
        self.witness: Any = None
        self.lines: list[str] = []
        self.outcome = ""
        self.started = time.perf_counter()

    def say(self, line: str = "") -> None:
        self.lines.append(line)

    def search(self) -> SearchConfig:
        threads = self.config.threads
        return SearchConfig(node_budget=self.config.node_budget, enumeration_cap=self.config.enumeration_cap,
                            parallel=threads > 1, workers=threads if threads > 1 else None)

    def load(self, spec: str) -> list[RelStructure]:
        """Structures named by ``spec``: a file in the text format or a builtin name."""
        path = Path(spec)
        if path.is_file():
            data = path.read_bytes()
            self.inputs[spec] = hashlib.sha256(data).hexdigest()
            try:
                doc = parse_document(data.decode("utf-8"), spec)
            except UnicodeDecodeError:
                raise CliError(f"{spec}: not UTF-8 text") from None
            if not doc.structures:
                raise CliError(f"{spec}: no structure block")
            return list(doc.structures.values())
        try:
            found = builtin(spec)
        except KeyError:
            raise CliError(f"{spec}: no such file, and not a builtin (known: {', '.join(builtin_names())})") from None
        self.inputs[spec] = hashlib.sha256("".join(serialize_structure(s) for s in found).encode()).hexdigest()
        return found

    def load_one(self, spec: str) -> RelStructure:
        found = self.load(spec)
        if len(found) != 1:
            raise CliError(f"{spec}: expected one structure, found {len(found)}")
        return found[0]

    def report(self, exit_code: int, timings: bool) -> dict[str, Any]:
        rep: dict[str, Any] = {
            "command": self.command,
            "arguments": _jsonable({k: v for k, v in vars(self.args).items()
                                    if k not in ("func", "json", "timings", "config")}),
            "config": self.config.as_dict(),
            "inputs": self.inputs,
            "outcome": self.outcome,
            "exit_code": exit_code,
            "counters": _jsonable(self.counters),
            "witness": _jsonable(self.witness),
            "version": __version__,
        }
        if timings:
            rep["timings"] = {"wall_seconds": round(time.perf_counter() - self.started, 6)}
        return rep


def _jsonable(x: Any) -> Any:
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (str, int, float, bool)) or x is None:
        return x
    return str(x)


def _fmt_map(m: Sequence[int]) -> str:
    return " ".join(map(str, m))


def cmd_hom(run: Run) -> int:
    a = run.args
    src, tgt = run.load_one(a.source), run.load_one(a.target)
    cfg = run.search()
    if a.all:
        homs = enumerate_homs(src, tgt, cfg)
        run.counters["count"] = len(homs)
        run.witness = [list(h.map) for h in homs]
        for h in homs:
            run.say(_fmt_map(h.map))
        run.say(f"{len(homs)} homomorphism(s)")
        run.outcome = f"COUNT {len(homs)}"
        return EXIT_TRUE if homs else EXIT_FALSE
    h = find_surjective_hom(src, tgt, cfg) if a.surjective else find_hom(src, tgt, cfg)
    if h is None:
        run.outcome = "NONE"
        run.say("no homomorphism" if not a.surjective else "no surjective homomorphism")
        return EXIT_FALSE
    run.outcome = "FOUND"
    run.witness = list(h.map)
    run.say(_fmt_map(h.map))
    return EXIT_TRUE


def cmd_pinch(run: Run) -> int:
    a = run.args
    if a.n < 1:
        raise UsageError("--n must be at least 1")
    tpl = run.load_one(a.template)
    p = n_pinch(tpl, a.n, run.config.size_bound)
    br, bl = b_right(p), b_left(p)
    outputs = {"pinch": p.underlying, "br": br.structure, "bl": bl.structure}
    run.counters = {k: s.size for k, s in outputs.items()}
    run.outcome = f"SIZE {p.size}"
    if a.out:
        base = Path(a.out)
        base.write_text(serialize_structure(p.underlying), encoding="utf-8")
        Path(f"{base}.br").write_text(serialize_structure(br.structure), encoding="utf-8")
        Path(f"{base}.bl").write_text(serialize_structure(bl.structure), encoding="utf-8")
        run.say(f"wrote {base}, {base}.br, {base}.bl")
    else:
        run.say(serialize_structure(p.underlying).rstrip())
    if a.dot:
        Path(a.dot).write_text(incidence(p.underlying).to_dot(p.underlying.name), encoding="utf-8")
    run.say(f"size {p.size} (B_R {br.structure.size}, B_L {bl.structure.size})")
    return EXIT_TRUE


def cmd_duality(run: Run) -> int:
    a = run.args
    found = run.load(a.template)
    max_n = a.max_n if a.max_n is not None else run.config.max_n
    cfg = run.search()
    if len(found) == 1:
        v = duality_upto(found[0], max_n, cfg)
        run.outcome = str(v)
        run.witness = list(v.witness.map) if v.witness else None
        run.say(str(v))
        return EXIT_TRUE if v.has_duality else EXIT_FALSE
    fv = colour_family_duality(found, max_n, cfg)
    run.counters["verdicts"] = {v.template: str(v) for v in fv.verdicts}
    for v in fv.verdicts:
        run.say(f"{v.template}: {v}")
    if fv.has_duality:
        run.outcome = f"FAMILY_DUALITY bound {fv.diameter_bound}"
        run.counters["diameter_bound"] = fv.diameter_bound
    else:
        run.outcome = f"FAILING_TEMPLATE {fv.verdicts[fv.failing].template}"
    run.say(run.outcome)
    return EXIT_TRUE if fv.has_duality else EXIT_FALSE


def cmd_efgame(run: Run) -> int:
    a = run.args
    if a.k < 0:
        raise UsageError("--k must be non-negative")
    if a.g_board or a.h_board:
        if not (a.g_board and a.h_board):
            raise UsageError("--g-board and --h-board go together")
        G = board_from_structure("G", run.load_one(a.g_board))
        H = board_from_structure("H", run.load_one(a.h_board))
    elif a.family:
        fam = [s for spec in a.family.split(",") for s in run.load(spec)]
        G, H = build_boards_colour(fam, a.j, a.k, run.config.size_bound)
    else:
        G, H = build_boards(run.load_one(a.template), a.k, run.config.size_bound)
    seed = a.seed if a.seed is not None else run.config.seed
    trials = a.trials if a.trials is not None else run.config.trials
    threads = run.config.threads
    rep = verify_boards(G, H, a.k, a.mode, seed=seed, trials=trials,
                        max_transcripts=run.config.max_transcripts, workers=threads if threads > 1 else None)
    run.counters = {"board_G": G.size, "board_H": H.size, "transcripts": rep.transcripts,
                    "rounds_checked": rep.rounds_checked, "extended_reading_divergences": rep.divergences}
    if a.mode == "random":
        run.counters["seed"] = seed
    text = [f"boards: G {G.size} elements {G.census()}, H {H.size} elements {H.census()}",
            f"transcripts: {rep.transcripts}, rounds checked: {rep.rounds_checked}",
            f"conditions (1)-(7): {'hold' if rep.counterexample is None else 'see transcript'}",
            f"extended slice reading divergences: {rep.divergences}"]
    if rep.counterexample is not None:
        text.append(rep.counterexample.dump())
        run.witness = rep.counterexample.dump().splitlines()
    if a.transcript:
        body = rep.counterexample.dump() if rep.counterexample else "no counterexample"
        if rep.divergence_example:
            body += "\n# first divergence under the extended slice reading\n" + rep.divergence_example
        Path(a.transcript).write_text(body + "\n", encoding="utf-8")
    run.outcome = f"{rep.winner} WINS" if rep.winner != "UNVERIFIED" else "STRATEGY UNVERIFIED"
    for line in text:
        run.say(line)
    run.say(run.outcome)
    return EXIT_TRUE if rep.duplicator_wins else EXIT_FALSE


def cmd_lattice(run: Run) -> int:
    a = run.args
    if a.action == "verify":
        if a.n is None or a.n < 1:
            raise UsageError("lattice verify needs --n >= 1")
        L = TWO
        if a.L:
            data = Path(a.L).read_bytes()
            run.inputs[a.L] = hashlib.sha256(data).hexdigest()
            doc = parse_document(data.decode("utf-8"), a.L)
            if len(doc.lattices) != 1:
                raise CliError(f"{a.L}: expected exactly one lattice block")
            L = next(iter(doc.lattices.values()))
        rep = verify_lattice_cex(L, a.n, run.config.subset_cap, run.config.node_budget)
        run.counters = {"k": rep.k, "A_size": rep.lattice_size, "generator_sets": rep.generator_sets,
                        "onto_two": rep.onto_two, "into_L": rep.into_L}
        run.say(f"A_{a.n} = stack of {a.n} copies of M_{rep.k}, {rep.lattice_size} elements")
        run.say(f"(1) no homomorphism A_{a.n} -> L: {'PASS' if rep.no_hom_into_L else 'FAIL'}")
        run.say(f"(2) {rep.onto_two}/{rep.generator_sets} generated sublattices map onto 2, "
                f"{rep.into_L} into L: {'PASS' if rep.first_failure is None else 'FAIL at ' + str(rep.first_failure)}")
        ok = rep.passed
        if L.size == 2 and a.n <= 2:
            w = check_witness(a.n, all_subsets=True)
            run.counters["witness_checked_subsets"] = w.smaller_sets_checked
            wok = not w.maps_onto_two and w.atoms_generate and w.smaller_generating is None
            run.say(f"(3) P_{a.n} does not map onto 2, needs all {3 * a.n} atoms: {'PASS' if wok else 'FAIL'}")
            ok = ok and wok
        run.outcome = "PASS" if ok else "FAIL"
        run.say(run.outcome)
        return EXIT_TRUE if ok else EXIT_FALSE
    n = a.n or 1
    lat = p_n(n) if a.witness else a_n(n, a.k)
    dot = hasse_dot(lat)
    if a.out:
        Path(a.out).write_text(dot, encoding="utf-8")
        run.say(f"wrote {a.out}")
    else:
        run.say(dot.rstrip())
    run.outcome = f"SIZE {lat.size}"
    run.counters["size"] = lat.size
    return EXIT_TRUE


def cmd_closure(run: Run) -> int:
    a = run.args
    data = Path(a.axioms).read_bytes()
    run.inputs[a.axioms] = hashlib.sha256(data).hexdigest()
    axioms = list(parse_document(data.decode("utf-8"), a.axioms).sentences.values())
    if not axioms:
        raise CliError(f"{a.axioms}: no sentence blocks")
    samples: list[RelStructure] = []
    for spec in a.samples.split(","):
        p = Path(spec)
        if p.is_dir():
            for f in sorted(p.iterdir()):
                if f.is_file():
                    samples.extend(run.load(str(f)))
        else:
            samples.extend(run.load(spec))
    max_n = a.max_n if a.max_n is not None else 4
    rep = check_closure(axioms, samples, max_n, run.config.eval_bound)
    run.counters = {"checks": len(rep.checks), "failures": len(rep.failures),
                    "classes": {k: v.value for k, v in rep.classes}}
    for label, cls in rep.classes:
        run.say(f"{label}: {cls.value}")
    for f in rep.failures:
        run.say(f"FAIL {f.axiom} on {f.construction}")
    if rep.empirical_only:
        run.say("closure empirical only for: " + ", ".join(rep.empirical_only))
        run.counters["empirical_only"] = list(rep.empirical_only)
    run.say(f"{len(rep.checks) - len(rep.failures)}/{len(rep.checks)} checks pass")
    run.outcome = "PASS" if rep.passed else "FAIL"
    run.say(run.outcome)
    return EXIT_TRUE if rep.passed else EXIT_FALSE


def cmd_obstructions(run: Run) -> int:
    a = run.args
    fam = [s for spec in a.templates.split(",") for s in run.load(spec)]
    max_size = a.max_size if a.max_size is not None else 3
    recs = find_critical_obstructions(fam, max_size, critical_only=not a.all, config=run.search(),
                                      bound=run.config.structure_bound)
    out = []
    for r in recs:
        s = r.structure
        tuples = " ".join(f"{rel}({','.join(map(str, t))})" for rel, t in s.all_tuples())
        info = {"size": s.size, "tuples": [[rel, list(t)] for rel, t in s.all_tuples()],
                "critical": r.critical, "diameter": r.diameter}
        line = f"size {s.size} {'critical' if r.critical else 'non-critical'} diameter {r.diameter}: {tuples or '-'}"
        if a.anti and r.critical and s.size > 0:
            sent = str(anti_identity_of_obstruction(s))
            info["anti_identity"] = sent
            line += f"\n  {sent}"
        out.append(info)
        run.say(line)
    run.witness = out
    run.counters = {"obstructions": len(recs), "critical": sum(r.critical for r in recs)}
    run.outcome = f"FOUND {len(recs)}"
    run.say(run.outcome)
    return EXIT_TRUE


def cmd_metrics(run: Run) -> int:
    a = run.args
    s = run.load_one(a.structure)
    g, d = girth(s), diameter(s)
    comps = components(s)
    run.counters = {"size": s.size, "tuples": s.tuple_count, "components": len(comps), "girth": g, "diameter": d}
    for k in ("size", "tuples", "components", "girth", "diameter"):
        run.say(f"{k}: {run.counters[k]}")
    if a.dot:
        Path(a.dot).write_text(incidence(s).to_dot(s.name or "Inc"), encoding="utf-8")
    run.outcome = f"DIAMETER {d}"
    return EXIT_TRUE


class UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print a machine-readable report")
    common.add_argument("--timings", action="store_true", help="include wall-clock timings in the report")
    common.add_argument("--config", help="JSON file overriding the default bounds")
    common.add_argument("--threads", type=int, help="worker processes for parallel searches")
    common.add_argument("--node-budget", type=int, help="solver node budget")
    common.add_argument("--size-bound", type=int, help="largest structure built")

    p = argparse.ArgumentParser(prog="pinchlab", description="pinch constructions, duality and game checks")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name: str, func: Callable[[Run], int], help: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, parents=[common], help=help)
        sp.set_defaults(func=func)
        return sp

    sp = add("hom", cmd_hom, "search for a homomorphism")
    sp.add_argument("--from", dest="source", required=True)
    sp.add_argument("--to", dest="target", required=True)
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--all", action="store_true", help="list every homomorphism")
    g.add_argument("--surjective", action="store_true")

    sp = add("pinch", cmd_pinch, "build the n-pinch and its two sides")
    sp.add_argument("--template", required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--out")
    sp.add_argument("--dot", help="write the incidence multigraph of the pinch")

    sp = add("duality", cmd_duality, "look for the least n with P_n(A) -> A")
    sp.add_argument("--template", required=True)
    sp.add_argument("--max-n", type=int)

    sp = add("efgame", cmd_efgame, "check the Duplicator strategy on the pinch boards")
    sp.add_argument("--template", default="k2")
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--mode", choices=["exhaustive", "random"], default="exhaustive")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--trials", type=int)
    sp.add_argument("--family", help="comma-separated templates; builds boards with an extra copy")
    sp.add_argument("--j", type=int, default=0, help="index of the family member to pinch")
    sp.add_argument("--g-board", help="play on this structure instead of a built board")
    sp.add_argument("--h-board")
    sp.add_argument("--transcript", help="write the transcript dump here")

    sp = add("lattice", cmd_lattice, "bounded-lattice counterexample")
    sp.add_argument("action", choices=["verify", "dot"])
    sp.add_argument("--n", type=int)
    sp.add_argument("--k", type=int, default=3)
    sp.add_argument("--L", help="lattice file for L (default: the two-element lattice)")
    sp.add_argument("--witness", action="store_true", help="dot: draw p_n instead of a_n")
    sp.add_argument("--out")

    sp = add("closure", cmd_closure, "check axioms on pinches and disjoint unions")
    sp.add_argument("--axioms", required=True)
    sp.add_argument("--samples", required=True, help="directory, file, or comma-separated builtin names")
    sp.add_argument("--max-n", type=int)

    sp = add("obstructions", cmd_obstructions, "critical obstructions up to a size")
    sp.add_argument("--templates", required=True)
    sp.add_argument("--max-size", type=int)
    sp.add_argument("--all", action="store_true", help="include non-critical obstructions")
    sp.add_argument("--anti", action="store_true", help="print the anti-identity of each")

    sp = add("metrics", cmd_metrics, "distance metrics of the incidence multigraph")
    sp.add_argument("--structure", required=True)
    sp.add_argument("--dot")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config).override(threads=args.threads, node_budget=args.node_budget,
                                                   size_bound=args.size_bound)
    except ConfigError as exc:
        print(f"pinchlab: config: {exc}", file=sys.stderr)
        return EXIT_ERROR
    run = Run(args.command, args, config)
    try:
        code = args.func(run)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"pinchlab {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (CliError, FormatError, SizeBoundError, BudgetExceeded, EnumerationCapExceeded,
            ValueError, KeyError, OSError, RuntimeError) as exc:
        run.outcome = f"ERROR {type(exc).__name__}"
        if args.json:
            rep = run.report(EXIT_ERROR, args.timings)
            rep["error"] = str(exc)
            print(json.dumps(rep, indent=2, sort_keys=True))
        print(f"pinchlab {args.command}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if args.json:
        print(json.dumps(run.report(code, args.timings), indent=2, sort_keys=True))
    else:
        for line in run.lines:
            print(line)
    return code


if __name__ == "__main__":
    sys.exit(main())
