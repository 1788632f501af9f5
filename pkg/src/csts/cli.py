"""Command-line interface: mine / sweep / query.

The machine contract is line-delimited JSON records written to --out (or
stdout): one ``dataset`` record, one ``run`` (or per-grid-point
``sweep_point``) record, ``pattern`` records sorted canonically, and for
sweeps the ratio ``series`` records. Records never contain wall-clock
numbers — timings go to the stderr summary — so identical inputs produce
byte-identical record streams regardless of run or thread count.

Exit codes: 0 success; 2 usage or data errors; 3 oracle size guard.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .analysis import CstsSet, approximate_pi, extract_closed
from .bottomup import extract_csts, run_bottom_up
from .ingestion import (
    load_boston,
    load_generic,
    load_pittsburgh,
)
from .model import EventDataset, MiningConfig, canonical_key
from .oracle import (
    OracleSizeError,
    RandomSpec,
    generate_random,
    oracle_all_patterns,
    oracle_closed,
    oracle_csts,
)
from .topdown import mine_all

_PROG = "csts"


class _CliError(Exception):
    """Data-level failure: message to stderr, exit 2."""


# ---------------------------------------------------------------------------
# Flag surface
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=_PROG,
        description="Mine constricted spatio-temporal sequential patterns.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, multi_thresholds: bool):
        src = p.add_argument_group("input")
        src.add_argument("--input", help="CSV file to mine")
        src.add_argument(
            "--schema", default="generic",
            choices=["generic", "pittsburgh", "boston", "boston-reduced"],
            help="input layout: generic=type,x,y,time_minutes; pittsburgh="
                 "INCIDENTHIERARCHYDESC/X/Y/INCIDENTTIME (2017-2019); boston="
                 "OFFENSE_CODE_GROUP/Long/Lat/OCCURRED_ON_DATE (2014, 26-type "
                 "whitelist); boston-reduced=same with the 10-type whitelist")
        src.add_argument(
            "--synthetic", metavar="TYPES,INSTANCES[,AREA,HORIZON]",
            help="generate a uniform random dataset instead of reading a file")
        src.add_argument("--seed", type=int, default=0,
                         help="seed for --synthetic (default 0)")
        mine = p.add_argument_group("mining")
        mine.add_argument("--radius", required=True, type=float,
                          help="spatial threshold (meters in geodesic mode)")
        mine.add_argument("--window", required=True, type=float,
                          help="temporal threshold in minutes")
        nargs_help = "comma-separated list" if multi_thresholds else "single value"
        mine.add_argument("--theta", default="0",
                          help=f"participation-index threshold(s), {nargs_help}")
        mine.add_argument("--epsilon", default="0",
                          help=f"approximation margin(s), {nargs_help}")
        mine.add_argument("--metric", default="euclidean",
                          choices=["euclidean", "geodesic"])
        mine.add_argument("--theta-strictness", default="gt",
                          choices=["gt", "ge"],
                          help="keep patterns with pi > theta (gt, default) "
                               "or pi >= theta (ge)")
        mine.add_argument("--max-length", type=int, default=None)
        mine.add_argument("--threads", type=int, default=1,
                          help="within-level mining parallelism; output is "
                               "identical for every value")
        out = p.add_argument_group("output")
        out.add_argument("--out", help="record file (default: stdout)")

    p_mine = sub.add_parser("mine", help="one mining run")
    add_common(p_mine, multi_thresholds=False)
    p_mine.add_argument("--algorithm", default="csts",
                        choices=["all", "closed", "csts", "oracle"],
                        help="all=threshold-passing patterns only; closed adds "
                             "closure flags; csts adds the constricted set; "
                             "oracle=brute-force reference (small inputs only)")

    p_sweep = sub.add_parser("sweep", help="grid of runs over theta x epsilon")
    add_common(p_sweep, multi_thresholds=True)

    p_query = sub.add_parser("query",
                             help="estimate a pattern's pi from saved records")
    p_query.add_argument("--from", dest="source", required=True,
                         help="record file produced by `mine --algorithm csts`")
    p_query.add_argument("--pattern", required=True,
                         help="event-type labels joined by '->'")
    return parser


# ---------------------------------------------------------------------------
# Shared plumbing
# ---------------------------------------------------------------------------

def _parse_threshold_list(text: str, flag: str, multi: bool) -> list[str]:
    values = [v.strip() for v in text.split(",") if v.strip()]
    if not values:
        raise _CliError(f"{flag} needs at least one value")
    if not multi and len(values) > 1:
        raise _CliError(f"mine takes a single {flag} value; use sweep for lists")
    return values


def _load_dataset(args) -> tuple[EventDataset, dict]:
    """Returns (dataset, 'dataset' record)."""
    if args.synthetic and args.input:
        raise _CliError("--input and --synthetic are mutually exclusive")
    if args.synthetic:
        parts = [p.strip() for p in args.synthetic.split(",")]
        if len(parts) not in (2, 4):
            raise _CliError("--synthetic wants TYPES,INSTANCES[,AREA,HORIZON]")
        try:
            spec = RandomSpec(
                seed=args.seed,
                n_types=int(parts[0]),
                n_instances=int(parts[1]),
                area=float(parts[2]) if len(parts) == 4 else 100.0,
                horizon=int(parts[3]) if len(parts) == 4 else 300,
            )
        except ValueError as exc:
            raise _CliError(f"bad --synthetic spec: {exc}") from exc
        dataset = generate_random(spec)
        record = {
            "record": "dataset",
            "source": f"synthetic(seed={spec.seed},types={spec.n_types},"
                      f"instances={spec.n_instances},area={spec.area},"
                      f"horizon={spec.horizon})",
            "instances": len(dataset.instances),
            "types": len(dataset.types),
            "rows_read": None,
            "rejected": None,
        }
        return dataset, record
    if not args.input:
        raise _CliError("give --input FILE or --synthetic SPEC")
    loaders = {
        "generic": lambda p: load_generic(p),
        "pittsburgh": load_pittsburgh,
        "boston": lambda p: load_boston(p, reduced=False),
        "boston-reduced": lambda p: load_boston(p, reduced=True),
    }
    try:
        dataset, report = loaders[args.schema](args.input)
    except OSError as exc:
        raise _CliError(f"cannot read {args.input}: {exc}") from exc
    except ValueError as exc:
        raise _CliError(str(exc)) from exc
    record = {
        "record": "dataset",
        "source": str(args.input),
        "instances": report.instances_kept,
        "types": report.types_found,
        "rows_read": report.rows_read,
        "rejected": report.rejection_breakdown(),
    }
    return dataset, record


def _config(args, theta: str, epsilon: str) -> MiningConfig:
    try:
        return MiningConfig(
            radius=args.radius,
            window=args.window,
            theta=theta,
            epsilon=epsilon,
            metric=args.metric,
            strict_theta=(args.theta_strictness == "gt"),
            max_length=args.max_length,
        )
    except (ValueError, ZeroDivisionError) as exc:
        raise _CliError(f"bad mining parameters: {exc}") from exc


def _frac(value: Optional[Fraction]):
    return None if value is None else str(value)


def _dec(value: Optional[Fraction]):
    return None if value is None else float(value)


def _config_echo(cfg: MiningConfig) -> dict:
    # Thread count and wall-clock numbers stay out of the records on
    # purpose: the record stream must be byte-identical across runs and
    # across --threads values. Both are reported on stderr instead.
    return {
        "radius": cfg.radius,
        "window": cfg.window,
        "theta": _frac(cfg.theta),
        "theta_decimal": _dec(cfg.theta),
        "theta_strictness": "gt" if cfg.strict_theta else "ge",
        "epsilon": _frac(cfg.epsilon),
        "epsilon_decimal": _dec(cfg.epsilon),
        "metric": cfg.metric,
        "max_length": cfg.max_length,
    }


def _ratios(counts: dict) -> dict:
    def ratio(num_key, den_key):
        num, den = counts.get(num_key), counts.get(den_key)
        if num is None or den in (None, 0):
            return None, None
        value = Fraction(num, den)
        return str(value), float(value)

    csts_all, csts_all_dec = ratio("csts", "all")
    csts_closed, csts_closed_dec = ratio("csts", "closed")
    return {
        "csts_over_all": csts_all,
        "csts_over_all_decimal": csts_all_dec,
        "csts_over_closed": csts_closed,
        "csts_over_closed_decimal": csts_closed_dec,
    }


class _Emitter:
    def __init__(self, out_path: Optional[str]):
        self._path = out_path
        self._fh = None

    def __enter__(self):
        self._fh = (open(self._path, "w", encoding="utf-8", newline="\n")
                    if self._path else sys.stdout)
        return self

    def __exit__(self, *exc):
        if self._path and self._fh is not None:
            self._fh.close()
        return False

    def emit(self, record: dict) -> None:
        self._fh.write(json.dumps(record, sort_keys=True,
                                  separators=(",", ":")) + "\n")


def _say(text: str) -> None:
    print(f"[{_PROG}] {text}", file=sys.stderr)


# ---------------------------------------------------------------------------
# mine
# ---------------------------------------------------------------------------

@dataclass
class _MineResult:
    counts: dict
    listing: list[dict]
    timings: dict
    capped: bool
    depth: int


def _run_tree_algorithms(dataset, cfg, algorithm, threads) -> _MineResult:
    t0 = time.perf_counter()
    try:
        tree = mine_all(dataset, cfg, threads=threads)
    except ValueError as exc:  # e.g. unbounded theta=0 in ge mode
        raise _CliError(str(exc)) from exc
    t_top = time.perf_counter() - t0
    timings = {"topdown_s": t_top}
    counts = {"all": len(tree), "closed": None, "csts": None}

    closed_nodes = None
    if algorithm in ("closed", "csts"):
        closed_nodes = set(extract_closed(tree))
        counts["closed"] = len(closed_nodes)
    members = None
    if algorithm == "csts":
        t1 = time.perf_counter()
        run_bottom_up(tree)
        members = extract_csts(tree)
        timings["bottomup_s"] = time.perf_counter() - t1
        counts["csts"] = len(members)

    listing = []
    for node in tree:
        rec = {
            "record": "pattern",
            "pattern": "->".join(dataset.pattern_labels(node.pattern)),
            "length": node.length,
            "pi": _frac(node.pi),
            "pi_decimal": _dec(node.pi),
            "closed": None if closed_nodes is None else node in closed_nodes,
            "csts": None if members is None else node.csts_flag,
            "cmax_size": len(node.cmax) if members is not None else None,
            "rcmax_size": len(node.rcmax) if members is not None else None,
        }
        listing.append(rec)
    return _MineResult(counts, listing, timings, tree.capped, tree.depth)


def _run_oracle_algorithm(dataset, cfg) -> _MineResult:
    t0 = time.perf_counter()
    max_len = cfg.max_length if cfg.max_length is not None else 7
    universe = oracle_all_patterns(dataset, cfg, max_len=max_len)
    closed = {p for p, _ in oracle_closed(universe)}
    members, cmax_map = oracle_csts(universe, cfg.epsilon)
    member_set = {p for p, _ in members}
    rcmax_size: dict = {}
    for p, reps in cmax_map.items():
        for q in reps:
            rcmax_size[q] = rcmax_size.get(q, 0) + 1
    timings = {"oracle_s": time.perf_counter() - t0}
    listing = []
    for p, pi in universe:
        listing.append({
            "record": "pattern",
            "pattern": "->".join(dataset.pattern_labels(p)),
            "length": len(p),
            "pi": _frac(pi),
            "pi_decimal": _dec(pi),
            "closed": p in closed,
            "csts": p in member_set,
            "cmax_size": len(cmax_map[p]),
            "rcmax_size": rcmax_size.get(p, 0),
        })
    counts = {"all": len(universe), "closed": len(closed),
              "csts": len(member_set)}
    depth = max((len(p) for p, _ in universe), default=0)
    return _MineResult(counts, listing, timings, False, depth)


def cmd_mine(args) -> int:
    theta = _parse_threshold_list(args.theta, "--theta", multi=False)[0]
    epsilon = _parse_threshold_list(args.epsilon, "--epsilon", multi=False)[0]
    t_load0 = time.perf_counter()
    dataset, ds_record = _load_dataset(args)
    t_load = time.perf_counter() - t_load0
    cfg = _config(args, theta, epsilon)

    if args.algorithm == "oracle":
        result = _run_oracle_algorithm(dataset, cfg)
    else:
        result = _run_tree_algorithms(dataset, cfg, args.algorithm,
                                      args.threads)

    run_record = {
        "record": "run",
        "algorithm": args.algorithm,
        "config": _config_echo(cfg),
        "types": [t.label for t in dataset.types],
        "counts": result.counts,
        "ratios": _ratios(result.counts),
        "capped": result.capped,
        "depth": result.depth,
    }
    with _Emitter(args.out) as out:
        out.emit(ds_record)
        out.emit(run_record)
        for rec in result.listing:
            out.emit(rec)

    c = result.counts
    _say(f"input={ds_record['source']} instances={ds_record['instances']} "
         f"types={ds_record['types']}")
    _say(f"algorithm={args.algorithm} theta={theta}"
         f"({args.theta_strictness}) epsilon={epsilon} "
         f"radius={args.radius} window={args.window} metric={args.metric} "
         f"threads={args.threads}")
    _say("patterns: " + " ".join(
        f"{k}={v}" for k, v in c.items() if v is not None)
        + (f" depth={result.depth}" + (" (capped)" if result.capped else "")))
    phase_text = " ".join(f"{k.replace('_s', '')}={v:.3f}s"
                          for k, v in result.timings.items())
    _say(f"time: load={t_load:.3f}s {phase_text}")
    return 0


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

def cmd_sweep(args) -> int:
    thetas = _parse_threshold_list(args.theta, "--theta", multi=True)
    epsilons = _parse_threshold_list(args.epsilon, "--epsilon", multi=True)
    dataset, ds_record = _load_dataset(args)

    points = []
    grid_records = []
    for theta in thetas:
        cfg = _config(args, theta, epsilons[0])
        t0 = time.perf_counter()
        try:
            tree = mine_all(dataset, cfg, threads=args.threads)
        except ValueError as exc:
            raise _CliError(str(exc)) from exc
        t_top = time.perf_counter() - t0
        closed_count = len(extract_closed(tree))
        for epsilon in epsilons:
            cfg_pt = _config(args, theta, epsilon)
            t1 = time.perf_counter()
            run_bottom_up(tree, cfg_pt.epsilon)
            members = extract_csts(tree)
            t_bot = time.perf_counter() - t1
            counts = {"all": len(tree), "closed": closed_count,
                      "csts": len(members)}
            points.append({
                "theta": cfg_pt.theta, "epsilon": cfg_pt.epsilon,
                "counts": counts, "t_top": t_top, "t_bot": t_bot,
            })
            grid_records.append({
                "record": "sweep_point",
                "config": _config_echo(cfg_pt),
                "counts": counts,
                "ratios": _ratios(counts),
                "capped": tree.capped,
                "depth": tree.depth,
            })

    series_records = _ratio_series(points)
    with _Emitter(args.out) as out:
        out.emit(ds_record)
        for rec in grid_records:
            out.emit(rec)
        for rec in series_records:
            out.emit(rec)

    _say(f"input={ds_record['source']} instances={ds_record['instances']} "
         f"types={ds_record['types']}")
    _say(f"sweep: {len(thetas)} theta x {len(epsilons)} epsilon points")
    header = f"{'theta':>8} {'epsilon':>8} {'all':>7} {'closed':>7} " \
             f"{'csts':>7} {'top(s)':>8} {'bottom(s)':>9}"
    _say(header)
    for pt in points:
        c = pt["counts"]
        _say(f"{str(pt['theta']):>8} {str(pt['epsilon']):>8} {c['all']:>7} "
             f"{c['closed']:>7} {c['csts']:>7} {pt['t_top']:>8.3f} "
             f"{pt['t_bot']:>9.3f}")
    return 0


def _ratio_series(points) -> list[dict]:
    """Percent-of-patterns-kept series: csts/all and csts/closed, once per
    epsilon (varying theta) and once per theta (varying epsilon)."""
    records = []

    def pct(counts, num, den):
        if counts[den] == 0:
            return None, None
        value = Fraction(counts[num], counts[den])
        return str(value), float(100 * value)

    def series(axis, fixed_key, fixed_value, ratio_name, num, den):
        pts = [p for p in points if p[fixed_key] == fixed_value]
        pts.sort(key=lambda p: p[axis])
        out_points = []
        for p in pts:
            frac, percent = pct(p["counts"], num, den)
            out_points.append({
                axis: str(p[axis]),
                "value": frac,
                "percent": percent,
            })
        return {
            "record": "series",
            "ratio": ratio_name,
            "axis": axis,
            fixed_key: str(fixed_value),
            "points": out_points,
        }

    epsilons = sorted({p["epsilon"] for p in points})
    thetas = sorted({p["theta"] for p in points})
    for eps in epsilons:
        records.append(series("theta", "epsilon", eps,
                              "csts_over_all", "csts", "all"))
        records.append(series("theta", "epsilon", eps,
                              "csts_over_closed", "csts", "closed"))
    for theta in thetas:
        records.append(series("epsilon", "theta", theta,
                              "csts_over_all", "csts", "all"))
        records.append(series("epsilon", "theta", theta,
                              "csts_over_closed", "csts", "closed"))
    return records


# ---------------------------------------------------------------------------
# query
# ---------------------------------------------------------------------------

def _load_saved_csts(path) -> tuple[CstsSet, list[str]]:
    """Rebuild the queryable summary from a mine --algorithm csts (or
    oracle) record file."""
    run_record = None
    members: dict[tuple, Fraction] = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                if rec.get("record") == "run":
                    run_record = rec
                elif rec.get("record") == "pattern" and rec.get("csts"):
                    members[tuple(rec["pattern"].split("->"))] = \
                        Fraction(rec["pi"])
    except OSError as exc:
        raise _CliError(f"cannot read {path}: {exc}") from exc
    except (json.JSONDecodeError, KeyError, ValueError) as exc:
        raise _CliError(f"{path} is not a record file: {exc}") from exc
    if run_record is None:
        raise _CliError(f"{path} holds no run record (was it a sweep?)")
    if run_record["counts"].get("csts") is None:
        raise _CliError(
            f"{path} was mined with --algorithm {run_record['algorithm']}; "
            "query needs --algorithm csts or oracle output")
    epsilon = Fraction(run_record["config"]["epsilon"])
    return CstsSet(members, epsilon), list(run_record.get("types", []))


def cmd_query(args) -> int:
    summary, labels = _load_saved_csts(args.source)
    elements = [e.strip() for e in args.pattern.split("->")]
    if not all(elements):
        raise _CliError(f"malformed pattern {args.pattern!r}")
    known = set(labels)
    unknown = [e for e in elements if e not in known]
    if unknown:
        raise _CliError(
            f"unknown event type label(s): {', '.join(unknown)} "
            f"(dataset types: {', '.join(labels)})")
    query = tuple(elements)
    est = approximate_pi(query, summary)
    name = "->".join(query)
    if est is None:
        print(f"{name}: not PI-strong under the saved configuration "
              f"(no supersequence among {len(summary)} summary members)")
        return 0
    if est.exact:
        print(f"{name}: PI-strong, exact pi {est.lower} "
              f"({float(est.lower)}) — member of the summary")
    else:
        print(f"{name}: PI-strong, pi in [{est.lower}, {est.upper}] "
              f"([{float(est.lower)}, {float(est.upper)}]) "
              f"via witness {'->'.join(est.witness)}")
    return 0


# ---------------------------------------------------------------------------
# entry
# ---------------------------------------------------------------------------

def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse prints its own usage message
        return exc.code if isinstance(exc.code, int) else 2
    handlers = {"mine": cmd_mine, "sweep": cmd_sweep, "query": cmd_query}
    try:
        return handlers[args.command](args)
    except _CliError as exc:
        print(f"{_PROG}: error: {exc}", file=sys.stderr)
        return 2
    except OracleSizeError as exc:
        print(f"{_PROG}: oracle guard: {exc}", file=sys.stderr)
        return 3


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
