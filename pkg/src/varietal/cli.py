"""Command line interface.

Subcommands: ``tm run``, ``algebra build``, ``bn build``, ``bn verify``,
``verify``, ``depth``, ``sd-meet``.  All structured output is JSON with
``"schema": 1``, sorted keys, two-space indent, and a trailing newline;
identical configuration (including --seed) produces byte-identical
documents.  Timing fields are zeroed unless --timings is given.

Exit codes: 0 all checks passed, 1 at least one check failed, 2 usage or
parse error, 3 all passed but some were skipped on budget.  The
environment variable VARIETAL_BUDGET_SECONDS imposes a global wall-clock
cap.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

from .algebra import Budget, BudgetExceeded
from .lattice import congruence_lattice, is_meet_semidistributive, \
    lattice_of_congruences, m3_lattice
from .machine_algebra import compile_machine
from .tm import TMError, load_tm, run_bounded
from .witness import LEMMA_ORDER, build_bn, run_lemma

SCHEMA = 1


def _parse_range(text: str) -> tuple[int, int]:
    if ".." in text:
        lo, hi = text.split("..", 1)
    else:
        lo = hi = text
    try:
        lo_i, hi_i = int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r}") from None
    if lo_i < 2 or hi_i < lo_i:
        raise argparse.ArgumentTypeError(
            f"range {text!r} must be rising and start at 2 or above")
    return lo_i, hi_i


def _budget(args) -> Budget:
    deadline = None
    env = os.environ.get("VARIETAL_BUDGET_SECONDS")
    if env:
        deadline = time.monotonic() + float(env)
    return Budget(max_elements=args.max_elements, max_pairs=args.max_pairs,
                  deadline=deadline)


def _emit(doc: dict, out: str | None):
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _exit_code(reports) -> int:
    statuses = [r.status for r in reports]
    if any(s == "FAILED" for s in statuses):
        return 1
    if any(s == "SKIPPED" for s in statuses):
        return 3
    return 0


def _add_common(p, *, n_flag=True):
    p.add_argument("--tm", required=True, help="machine description file")
    if n_flag:
        p.add_argument("--n", type=_parse_range, default=(2, 4),
                       help="width or inclusive range, e.g. 3 or 2..4")
    p.add_argument("--max-elements", type=int, default=1_000_000)
    p.add_argument("--max-pairs", type=int, default=5_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--timings", action="store_true",
                   help="emit real wall-clock seconds in stats")
    p.add_argument("--out", help="write the JSON document here")


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="varietal")
    sub = top.add_subparsers(dest="command", required=True)

    tm_p = sub.add_parser("tm", help="machine utilities")
    tm_sub = tm_p.add_subparsers(dest="tm_command", required=True)
    run_p = tm_sub.add_parser("run", help="run from the empty tape")
    run_p.add_argument("file", help="machine description file")
    run_p.add_argument("--max-steps", type=int, default=10_000)
    run_p.add_argument("--out")

    alg_p = sub.add_parser("algebra", help="algebra compilation")
    alg_sub = alg_p.add_subparsers(dest="algebra_command", required=True)
    build_p = alg_sub.add_parser("build", help="compile and summarize")
    build_p.add_argument("--tm", required=True)
    build_p.add_argument("--with-k", action="store_true")
    build_p.add_argument("--out")

    bn_p = sub.add_parser("bn", help="witness subpower commands")
    bn_sub = bn_p.add_subparsers(dest="bn_command", required=True)
    bn_build = bn_sub.add_parser("build", help="close the witness generators")
    _add_common(bn_build)
    bn_build.add_argument("--with-k", action="store_true")
    bn_verify = bn_sub.add_parser("verify", help="run one lemma verifier")
    _add_common(bn_verify)
    bn_verify.add_argument("--lemma", required=True, choices=LEMMA_ORDER)

    verify_p = sub.add_parser("verify", help="run the lemma suite")
    _add_common(verify_p)
    verify_p.add_argument("--lemma", choices=LEMMA_ORDER,
                          help="restrict to one lemma")
    verify_p.add_argument("--with-k", action="store_true",
                          help="also compile K (k-collapse does this itself)")

    depth_p = sub.add_parser("depth", help="witness pair depth per width")
    _add_common(depth_p)

    sd_p = sub.add_parser("sd-meet", help="congruence lattice SD-meet check")
    sd_p.add_argument("--tm")
    sd_p.add_argument("--n", type=_parse_range, default=(2, 2))
    sd_p.add_argument("--fixture", choices=["m3"],
                      help="check the built-in failing lattice instead")
    sd_p.add_argument("--max-elements", type=int, default=1_000_000)
    sd_p.add_argument("--max-pairs", type=int, default=5_000_000)
    sd_p.add_argument("--out")
    return top


# ---------------------------------------------------------------------------

def _cmd_tm_run(args) -> int:
    tm = load_tm(args.file)
    outcome = run_bounded(tm, args.max_steps)
    if outcome.halted:
        line = f"HALTED({outcome.steps})"
        if outcome.stalled:
            line += " stalled"
    else:
        line = "RUNNING"
    print(line)
    doc = {"schema": SCHEMA, "command": "tm run", "file": args.file,
           "max_steps": args.max_steps, "status": outcome.status,
           "steps": outcome.steps, "stalled": outcome.stalled}
    if args.out:
        _emit(doc, args.out)
    return 0


def _cmd_algebra_build(args) -> int:
    tm = load_tm(args.tm)
    ma = compile_machine(tm, with_k=args.with_k)
    doc = {"schema": SCHEMA, "command": "algebra build", "tm": args.tm,
           "with_k": args.with_k, "states": list(tm.states),
           "size": ma.size,
           "operations": [{"symbol": op.symbol, "arity": op.arity}
                          for op in ma.algebra.ops]}
    _emit(doc, args.out)
    return 0


def _cmd_bn_build(args) -> int:
    tm = load_tm(args.tm)
    ma = compile_machine(tm, with_k=args.with_k)
    budget = _budget(args)
    rows = []
    try:
        for n in range(args.n[0], args.n[1] + 1):
            ctx = build_bn(ma, n, budget) if not args.with_k else None
            if ctx is None:
                from .witness import build_kprime
                ctx = build_kprime(ma, n, budget)
            rows.append({"n": n, "universe": ctx.subpower.size,
                         "generators": 2 * n - 1,
                         "alphabet": [ma.names[v] for v in
                                      ctx.subpower.coordinate_alphabet()]})
    except BudgetExceeded as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return 3
    doc = {"schema": SCHEMA, "command": "bn build", "tm": args.tm,
           "with_k": args.with_k, "widths": rows}
    _emit(doc, args.out)
    return 0


def _run_width(ma, n: int, lemmas, budget_args, seed: int):
    """All requested lemmas at one width, sharing one context."""
    budget = _budget(budget_args)
    reports = []
    ctx = None
    for lemma in lemmas:
        if lemma == "k-collapse":
            if n < 3:
                continue
            reports.append(run_lemma(lemma, ma, n, budget=budget, seed=seed))
            continue
        if ctx is None:
            try:
                ctx = build_bn(ma, n, budget)
            except BudgetExceeded as exc:
                from .witness import _skip
                reports.extend(
                    _skip(lm, n, exc, time.monotonic())
                    for lm in lemmas if lm != "k-collapse")
                break
        reports.append(run_lemma(lemma, ma, n, budget=budget, seed=seed,
                                 ctx=ctx))
    return reports


def _cmd_verify(args) -> int:
    tm = load_tm(args.tm)
    ma = compile_machine(tm)
    lemmas = [args.lemma] if getattr(args, "lemma", None) else list(LEMMA_ORDER)
    widths = list(range(args.n[0], args.n[1] + 1))
    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            batches = list(pool.map(
                lambda n: _run_width(ma, n, lemmas, args, args.seed), widths))
    else:
        batches = [_run_width(ma, n, lemmas, args, args.seed) for n in widths]
    reports = [r for batch in batches for r in batch]
    reports.sort(key=lambda r: (r.n, LEMMA_ORDER.index(r.lemma)))
    doc = {"schema": SCHEMA, "command": "verify", "tm": args.tm,
           "n_range": [args.n[0], args.n[1]], "seed": args.seed,
           "pass": all(r.status != "FAILED" for r in reports),
           "skipped": sum(1 for r in reports if r.status == "SKIPPED"),
           "reports": [r.to_json(timings=args.timings) for r in reports]}
    _emit(doc, args.out)
    return _exit_code(reports)


def _cmd_bn_verify(args) -> int:
    args.jobs = getattr(args, "jobs", 1)
    return _cmd_verify(args)


def _cmd_depth(args) -> int:
    tm = load_tm(args.tm)
    ma = compile_machine(tm)
    budget = _budget(args)
    reports = []
    for n in range(args.n[0], args.n[1] + 1):
        try:
            ctx = build_bn(ma, n, budget)
        except BudgetExceeded as exc:
            from .witness import _skip
            reports.append(_skip("depth", n, exc, time.monotonic()))
            continue
        reports.append(run_lemma("depth", ma, n, budget=budget, ctx=ctx))
    depths = [r.witnesses[0]["depth"] if r.witnesses else None
              for r in reports]
    doc = {"schema": SCHEMA, "command": "depth", "tm": args.tm,
           "n_range": [args.n[0], args.n[1]], "depths": depths,
           "reports": [r.to_json(timings=args.timings) for r in reports]}
    _emit(doc, args.out)
    return _exit_code(reports)


def _cmd_sd_meet(args) -> int:
    if args.fixture == "m3":
        lat = m3_lattice()
        sd, witness = is_meet_semidistributive(lat)
        doc = {"schema": SCHEMA, "command": "sd-meet", "fixture": "m3",
               "lattice_size": lat.size, "sd_meet": sd,
               "witness": list(witness) if witness else None,
               "pass": (not sd) and witness is not None}
        _emit(doc, args.out)
        return 0 if doc["pass"] else 1
    if not args.tm:
        print("sd-meet needs --tm or --fixture m3", file=sys.stderr)
        return 2
    tm = load_tm(args.tm)
    ma = compile_machine(tm)
    budget = Budget(max_elements=args.max_elements, max_pairs=args.max_pairs)
    rows = []
    all_ok = True
    try:
        for n in range(args.n[0], args.n[1] + 1):
            ctx = build_bn(ma, n, budget)
            congs = congruence_lattice(ctx.subpower, system=ctx.system(),
                                       budget=budget)
            lat = lattice_of_congruences(congs)
            sd, witness = is_meet_semidistributive(lat)
            all_ok = all_ok and sd
            rows.append({"n": n, "universe": ctx.subpower.size,
                         "congruences": len(congs), "sd_meet": sd,
                         "witness": list(witness) if witness else None})
    except BudgetExceeded as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return 3
    doc = {"schema": SCHEMA, "command": "sd-meet", "tm": args.tm,
           "n_range": [args.n[0], args.n[1]], "lattices": rows,
           "pass": all_ok}
    _emit(doc, args.out)
    return 0 if all_ok else 1


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        if args.command == "tm":
            return _cmd_tm_run(args)
        if args.command == "algebra":
            return _cmd_algebra_build(args)
        if args.command == "bn":
            if args.bn_command == "build":
                return _cmd_bn_build(args)
            return _cmd_bn_verify(args)
        if args.command == "verify":
            return _cmd_verify(args)
        if args.command == "depth":
            return _cmd_depth(args)
        if args.command == "sd-meet":
            return _cmd_sd_meet(args)
    except (TMError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BudgetExceeded as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return 3
    parser.error("unknown command")
    return 2


if __name__ == "__main__":
    sys.exit(main())
