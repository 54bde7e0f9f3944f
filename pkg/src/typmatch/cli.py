"""Command-line entry point: ``typmatch {gen,match,permtyp,sweep,mi,plot}``.

Exit codes: 0 success, 2 usage error, 3 input-format or I/O error,
4 size guard exceeded.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

from . import harness
from .dist import format_distribution, load_distribution, mutual_information
from .errors import FormatError, GuardExceeded
from .graph import make_instance, read_graph, write_graph, CmperInstance
from .matcher import MatchConfig, match
from .perm import CycleType, read_labeling, standard_permutation, write_labeling
from .typicality import (ENUM_GUARD, exact_perm_typicality_prob, mc_perm_typicality_prob,
                         theorem1_bound)

EXIT_USAGE, EXIT_FORMAT, EXIT_GUARD = 2, 3, 4

PAIR_FILES = {"graph1": "graph1.txt", "graph2_anon": "graph2_anon.txt",
              "truth": "truth.txt", "dist": "dist.txt"}

MATCH_COLUMNS = ["n", "mode", "epsilon", "status", "candidate_count", "correct_fraction",
                 "mismatch_count", "max_deviation", "truth_typical", "automorphism_ties",
                 "heuristic", "seed", "chosen"]

PERMTYP_COLUMNS = ["n", "cycle_type", "epsilon", "exact", "estimate", "ci_lo", "ci_hi",
                   "bound", "bound_valid", "t", "trials"]


def _read(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from None


def _dist(path):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        dist = load_distribution(_read(path))
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    return dist


def _epsilon(text: str):
    if text == "auto":
        return "auto"
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"epsilon must be 'auto' or a number, got {text!r}")
    if value <= 0:
        raise argparse.ArgumentTypeError("epsilon must be positive")
    return value


def cmd_gen(args) -> int:
    dist = _dist(args.dist)
    inst = make_instance(dist, args.n, args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / PAIR_FILES["graph1"]).write_text(write_graph(inst.g1), encoding="utf-8")
    (out / PAIR_FILES["graph2_anon"]).write_text(write_graph(inst.g2_anon), encoding="utf-8")
    (out / PAIR_FILES["truth"]).write_text(write_labeling(inst.secret), encoding="utf-8")
    (out / PAIR_FILES["dist"]).write_text(format_distribution(dist), encoding="utf-8")
    print(f"mi_bits={mutual_information(dist, 2):.12f}")
    return 0


def load_pair(directory) -> CmperInstance:
    d = Path(directory)
    if not d.is_dir():
        raise FormatError(f"pair directory {d} does not exist")
    for name in PAIR_FILES.values():
        if not (d / name).is_file():
            raise FormatError(f"pair directory {d} is missing {name}")
    try:
        return CmperInstance(read_graph(_read(d / PAIR_FILES["graph1"])),
                             read_graph(_read(d / PAIR_FILES["graph2_anon"])),
                             read_labeling(_read(d / PAIR_FILES["truth"])),
                             _dist(d / PAIR_FILES["dist"]))
    except ValueError as exc:
        raise FormatError(f"inconsistent pair directory {d}: {exc}") from None


def cmd_match(args) -> int:
    inst = load_pair(args.pair)
    cfg = MatchConfig(epsilon=args.epsilon, mode=args.mode, seed=args.seed,
                      max_exhaustive_n=args.max_exhaustive_n, restarts=args.restarts,
                      max_passes=args.max_passes, jobs=args.jobs)
    r = match(inst, cfg)
    row = {
        "n": r.n, "mode": r.mode, "epsilon": r.epsilon, "status": r.status,
        "candidate_count": r.candidate_count, "correct_fraction": r.correct_fraction,
        "mismatch_count": r.mismatch_count, "max_deviation": r.max_deviation_at_chosen,
        "truth_typical": int(r.truth_typical), "automorphism_ties": r.automorphism_ties,
        "heuristic": int(r.heuristic), "seed": args.seed,
        "chosen": "" if r.chosen is None else " ".join(map(str, r.chosen.map)),
    }
    sys.stdout.write(harness.to_csv([row], MATCH_COLUMNS))
    return 0


def cmd_permtyp(args) -> int:
    dist = _dist(args.dist)
    ct = CycleType.parse(args.cycles, args.n)
    pi = standard_permutation(ct)
    fits = float(dist.l * dist.l) ** args.n <= ENUM_GUARD
    if args.method == "exact" and not fits:
        raise GuardExceeded(f"n={args.n} is above the enumeration guard")
    bound = theorem1_bound(dist, args.n, args.epsilon, ct, args.t,
                           allow_fixed_points=args.allow_fixed_points)
    if args.method == "exact" or (args.method == "auto" and fits):
        value = exact_perm_typicality_prob(dist, args.n, pi, args.epsilon)
        est = {"exact": 1, "estimate": value, "ci_lo": value, "ci_hi": value, "trials": 0}
    else:
        mc = mc_perm_typicality_prob(dist, args.n, pi, args.epsilon, args.trials, args.seed,
                                     jobs=args.jobs)
        est = {"exact": 0, "estimate": mc.estimate, "ci_lo": mc.ci_low, "ci_hi": mc.ci_high,
               "trials": mc.trials}
    row = {"n": args.n, "cycle_type": str(ct), "epsilon": args.epsilon, **est,
           "bound": bound.bound, "bound_valid": int(bound.valid), "t": bound.t}
    sys.stdout.write(harness.to_csv([row], PERMTYP_COLUMNS))
    if bound.note:
        print(f"note: bound {bound.note}", file=sys.stderr)
    return 0


def cmd_sweep(args) -> int:
    cfg = harness.parse_config(_read(args.config))
    rows, _ = harness.run_sweep(cfg, jobs=args.jobs)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(harness.to_csv(rows, harness.SWEEP_COLUMNS), encoding="utf-8")
    if args.figures:
        from .plotting import plot_empty_rate, plot_sweep
        plot_sweep(rows, str(out.with_suffix(".png")))
        plot_empty_rate(rows, str(out.with_name(out.stem + "_empty.png")))
    return 0


def cmd_mi(args) -> int:
    print(f"{mutual_information(_dist(args.dist), args.base):.12f}")
    return 0


def cmd_plot(args) -> int:
    from .plotting import plot_empty_rate, plot_sweep
    rows = harness.read_csv(_read(args.csv))
    if not rows or set(harness.SWEEP_COLUMNS) - rows[0].keys():
        raise FormatError(f"{args.csv} is not a sweep CSV")
    out = Path(args.out) if args.out else Path(args.csv).with_suffix(".png")
    plot_sweep(rows, str(out))
    plot_empty_rate(rows, str(out.with_name(out.stem + "_empty.png")))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="typmatch", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an anonymized correlated graph pair")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--dist", required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    m = sub.add_parser("match", help="de-anonymize a generated pair; prints one CSV row")
    m.add_argument("--pair", required=True)
    m.add_argument("--epsilon", type=_epsilon, default="auto")
    m.add_argument("--mode", choices=["exhaustive", "greedy"], default="exhaustive")
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--max-exhaustive-n", type=int, default=10)
    m.add_argument("--restarts", type=int, default=32)
    m.add_argument("--max-passes", type=int, default=50)
    m.add_argument("--jobs", type=int, default=1)
    m.set_defaults(func=cmd_match)

    t = sub.add_parser("permtyp", help="typicality probability of a permuted pair, and its bound")
    t.add_argument("--dist", required=True)
    t.add_argument("--n", type=int, required=True)
    t.add_argument("--cycles", required=True, help="cycle type, e.g. 'm=0;2,2,2,2'")
    t.add_argument("--epsilon", type=float, required=True)
    t.add_argument("--trials", type=int, default=100000)
    t.add_argument("--t", type=int, default=None)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--method", choices=["auto", "exact", "mc"], default="auto")
    t.add_argument("--allow-fixed-points", action="store_true")
    t.add_argument("--jobs", type=int, default=1)
    t.set_defaults(func=cmd_permtyp)

    s = sub.add_parser("sweep", help="matching success over an (n, rho) grid; writes CSV")
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--figures", action="store_true", help="also render PNGs next to the CSV")
    s.set_defaults(func=cmd_sweep)

    i = sub.add_parser("mi", help="mutual information of a distribution file")
    i.add_argument("--dist", required=True)
    i.add_argument("--base", choices=["2", "e"], default="2")
    i.set_defaults(func=cmd_mi)

    f = sub.add_parser("plot", help="render figures from a sweep CSV")
    f.add_argument("--csv", required=True)
    f.add_argument("--out", default=None)
    f.set_defaults(func=cmd_plot)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "base", None) == "2":
        args.base = 2
    try:
        return args.func(args)
    except GuardExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
