"""Command-line front end: distance computation, agreement forests,
instance generation, benchmarking, and stagewise verification.

Exit codes: 0 success, 1 usage error, 2 parse error, 3 budget exceeded,
4 internal invariant failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Optional

from .approx import approx2, approx3
from .errors import InternalInvariantError, ParseError, UsageError
from .exact import exact_distance
from .forest import Forest
from .generate import GenSpec, gen_pair
from .keys import certify
from .newick import parse_forest, parse_tree, serialize
from .pairs import DUMMY_LABEL, TFPair, induced_subpair, preprocess

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_BUDGET = 3
EXIT_INTERNAL = 4

logger = logging.getLogger(__name__)


def _load_pair(t_path: str, f_path: str, add_dummy: bool) -> tuple[TFPair, TFPair]:
    with open(t_path) as fh:
        t = parse_tree(fh.read())
    with open(f_path) as fh:
        f = parse_forest(fh.read())
    raw = TFPair(t, f)
    if t.labels() != f.labels():
        raise UsageError("the two input files carry different label sets")
    return raw, preprocess(raw, add_dummy=add_dummy)


def _edge_labels(pair: TFPair, head: int) -> list[str]:
    """Sorted original leaf labels below an F-edge head, composites
    expanded and the dummy dropped."""
    labels = pair.expand_labels(pair.F.leaf_set(head))
    out = sorted(x for x in labels if x != DUMMY_LABEL)
    if not out:
        # The dummy's own edge: equivalent to detaching everything else.
        out = sorted(x for x in pair.expand_labels(pair.labels())
                     if x != DUMMY_LABEL)
    return out


def _cut_report(pair: TFPair, cut: frozenset[int]) -> list[list[str]]:
    return sorted(_edge_labels(pair, h) for h in cut)


def _maf_newick(raw: TFPair, pre: TFPair, cut: frozenset[int]) -> str:
    """Agreement forest over the original labels: expand composite leaves
    back to their original subtree structure and drop the dummy."""
    red, _ = pre.F.ominus(cut)

    def spec_of(forest: Forest, v: int):
        if forest.is_leaf(v):
            lab = forest.label(v)
            parts = pre.expand_label(lab)
            if len(parts) == 1:
                return parts[0]
            sub = raw.F.restrict(frozenset(parts)).binarized()
            return spec_of(sub, sub.roots[0])
        c1, c2 = forest.children(v)
        return (spec_of(forest, c1), spec_of(forest, c2))

    specs = [spec_of(red, r) for r in red.roots]
    out = Forest.from_nested(*specs)
    if DUMMY_LABEL in out.labels():
        d = out.leaf_by_label(DUMMY_LABEL)
        from .pairs import _delete_leaf

        _delete_leaf(out, d)
    return serialize(out)


def _emit_json(payload: dict) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))


def cmd_dist(args: argparse.Namespace) -> int:
    raw, pre = _load_pair(args.T, args.F, not args.no_dummy)
    method = args.method
    t0 = time.perf_counter()
    budget_exceeded = False
    distance: Optional[int] = None
    if method == "exact":
        res = exact_distance(pre, budget=args.budget)
        if res is None:
            budget_exceeded = True
            cut: frozenset[int] = frozenset()
        else:
            distance, cut = res
    elif method == "approx2":
        cut = approx2(pre).cut
    else:
        cut = approx3(pre)
    elapsed = time.perf_counter() - t0
    n_leaves = len(raw.T.labels())
    payload = {
        "command": "dist",
        "method": method,
        "n_leaves": n_leaves,
        "distance": distance,
        "cut_size": None if budget_exceeded else len(cut),
        "cut": None if budget_exceeded else _cut_report(pre, cut),
        "agreement_forest": None if budget_exceeded else _maf_newick(raw, pre, cut),
        "ratio_bound": {"exact": 1, "approx2": 2, "approx3": 3}[method],
        "budget": args.budget,
        "budget_exceeded": budget_exceeded,
        "elapsed_s": round(elapsed, 6),
    }
    if args.json:
        _emit_json(payload)
    else:
        if budget_exceeded:
            print(f"budget {args.budget} exceeded: distance > {args.budget}")
        else:
            head = (f"distance: {distance}" if distance is not None
                    else f"cut size: {len(cut)} (<= {payload['ratio_bound']}x optimal)")
            print(f"{head}  [{method}]")
            for labels in payload["cut"]:
                print("  cut edge above: {" + ",".join(labels) + "}")
            print("agreement forest:", payload["agreement_forest"])
    return EXIT_BUDGET if budget_exceeded else EXIT_OK


def cmd_maf(args: argparse.Namespace) -> int:
    raw, pre = _load_pair(args.T, args.F, not args.no_dummy)
    if args.method == "exact":
        res = exact_distance(pre)
        assert res is not None
        cut = res[1]
    elif args.method == "approx2":
        cut = approx2(pre).cut
    else:
        cut = approx3(pre)
    print(_maf_newick(raw, pre, cut))
    return EXIT_OK


def cmd_gen(args: argparse.Namespace) -> int:
    spec = GenSpec(args.leaves, args.moves, args.seed, args.shape)
    pair = gen_pair(spec)
    os.makedirs(args.out, exist_ok=True)
    banner = (f"# rspr gen --leaves {spec.n_leaves} --moves {spec.n_moves}"
              f" --seed {spec.seed} --shape {spec.shape}\n")
    t_path = os.path.join(args.out, "T.nwk")
    f_path = os.path.join(args.out, "F.nwk")
    with open(t_path, "w") as fh:
        fh.write(banner + serialize(pair.T) + "\n")
    with open(f_path, "w") as fh:
        fh.write(banner + serialize(pair.F) + "\n")
    print(t_path)
    print(f_path)
    return EXIT_OK


def _bench_one(task: tuple[int, int, int, int, str, int]) -> dict:
    instance_id, n_leaves, n_moves, seed, shape, exact_cap = task
    pair = preprocess(gen_pair(GenSpec(n_leaves, n_moves, seed, shape)),
                      add_dummy=True)
    rec: dict = {
        "instance_id": instance_id,
        "n_leaves": n_leaves,
        "n_moves": n_moves,
        "seed": seed,
        "shape": shape,
    }
    t0 = time.perf_counter()
    a2 = approx2(pair)
    rec["t_approx2_s"] = round(time.perf_counter() - t0, 6)
    rec["approx2_size"] = len(a2.cut)
    rec["stage_cut_sizes"] = ";".join(
        str(len(s.lifted_cut)) for s in a2.stages
    )
    t0 = time.perf_counter()
    a3 = approx3(pair)
    rec["t_approx3_s"] = round(time.perf_counter() - t0, 6)
    rec["approx3_size"] = len(a3)
    if n_leaves <= exact_cap:
        t0 = time.perf_counter()
        d = exact_distance(pair)[0]  # type: ignore[index]
        rec["t_exact_s"] = round(time.perf_counter() - t0, 6)
        rec["exact_d"] = d
        rec["ratio2"] = round(len(a2.cut) / d, 4) if d else 1.0
        rec["ratio3"] = round(len(a3) / d, 4) if d else 1.0
        if len(a2.cut) > 2 * d or len(a3) > 3 * d:
            raise InternalInvariantError(
                f"approximation guarantee violated on instance {instance_id}"
            )
    else:
        rec["t_exact_s"] = rec["exact_d"] = rec["ratio2"] = rec["ratio3"] = ""
    return rec


BENCH_COLUMNS = [
    "instance_id", "n_leaves", "n_moves", "seed", "shape", "exact_d",
    "approx2_size", "approx3_size", "ratio2", "ratio3", "stage_cut_sizes",
    "t_exact_s", "t_approx2_s", "t_approx3_s",
]


def cmd_bench(args: argparse.Namespace) -> int:
    leaves = [int(x) for x in args.leaves.split(",") if x.strip()]
    if not leaves:
        raise UsageError("--leaves needs at least one value")
    tasks = []
    instance_id = 0
    for n in leaves:
        for _ in range(args.trials):
            tasks.append((instance_id, n, args.moves, args.seed + instance_id,
                          args.shape, args.exact_max_leaves))
            instance_id += 1
    if args.threads > 1:
        with ProcessPoolExecutor(max_workers=args.threads) as pool:
            rows = list(pool.map(_bench_one, tasks))
    else:
        rows = [_bench_one(t) for t in tasks]
    rows.sort(key=lambda r: r["instance_id"])
    out = sys.stdout if args.csv == "-" else open(args.csv, "w", newline="")
    try:
        writer = csv.DictWriter(out, fieldnames=BENCH_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    finally:
        if out is not sys.stdout:
            out.close()
    if args.csv != "-":
        print(f"wrote {len(rows)} rows to {args.csv}")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    _raw, pre = _load_pair(args.T, args.F, not args.no_dummy)
    result = approx2(pre)
    all_ok = True
    lines = []
    for idx, stage in enumerate(result.stages):
        parts = [f"stage {idx}: step {stage.result.step}"
                 f" ({stage.result.provenance}) cut {len(stage.lifted_cut)}"]
        small = len(stage.pair_before.labels()) <= args.exact_max_leaves
        if small:
            d0 = exact_distance(stage.pair_before)[0]  # type: ignore[index]
            d1 = (0 if stage.pair_after.is_bottom()
                  else exact_distance(stage.pair_after)[0])  # type: ignore[index]
            need = (len(stage.result.cut) + 1) // 2
            ok = d0 - d1 >= need
            all_ok &= ok
            parts.append(f"drop {d0}-{d1} >= {need}: {'pass' if ok else 'FAIL'}")
        else:
            parts.append("drop: skipped (instance too large)")
        certified = 0
        checked = 0
        for kpair, rk in stage.result.keys:
            if len(rk.key.X) > args.key_gate:
                continue
            checked += 1
            if certify(kpair, rk.key, rk.grade):
                certified += 1
        if checked:
            ok = certified == checked
            all_ok &= ok
            parts.append(f"keys {certified}/{checked}: {'pass' if ok else 'FAIL'}")
        lines.append("  ".join(parts))
    if args.stagewise:
        for line in lines:
            print(line)
    print(f"stages: {len(result.stages)}, cut size: {len(result.cut)}, "
          f"certificates: {'all pass' if all_ok else 'FAILURES'}")
    return EXIT_OK if all_ok else EXIT_INTERNAL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="rspr",
        description="rooted subtree-prune-and-regraft distance toolkit",
    )
    default_seed = int(os.environ.get("RSPR_SEED", "1"))
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("dist", help="distance / cut between two trees")
    p.add_argument("T")
    p.add_argument("F")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--exact", dest="method", action="store_const",
                   const="exact", default="exact")
    g.add_argument("--approx2", dest="method", action="store_const",
                   const="approx2")
    g.add_argument("--approx3", dest="method", action="store_const",
                   const="approx3")
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--json", action="store_true")
    p.add_argument("--no-dummy", action="store_true")
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("maf", help="agreement forest only")
    p.add_argument("T")
    p.add_argument("F")
    p.add_argument("--method", choices=["exact", "approx2", "approx3"],
                   required=True)
    p.add_argument("--no-dummy", action="store_true")
    p.set_defaults(func=cmd_maf)

    p = sub.add_parser("gen", help="generate a fixture pair")
    p.add_argument("--leaves", type=int, required=True)
    p.add_argument("--moves", type=int, required=True)
    p.add_argument("--seed", type=int, default=default_seed)
    p.add_argument("--shape", choices=["yule", "uniform"], default="yule")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="benchmark harness (CSV output)")
    p.add_argument("--leaves", required=True,
                   help="comma-separated leaf counts")
    p.add_argument("--moves", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, default=default_seed)
    p.add_argument("--shape", choices=["yule", "uniform"], default="yule")
    p.add_argument("--csv", required=True, help="output path or '-'")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--exact-max-leaves", type=int, default=14)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("verify", help="stagewise certificates for approx2")
    p.add_argument("T")
    p.add_argument("F")
    p.add_argument("--stagewise", action="store_true")
    p.add_argument("--no-dummy", action="store_true")
    p.add_argument("--exact-max-leaves", type=int, default=12)
    p.add_argument("--key-gate", type=int, default=8)
    p.set_defaults(func=cmd_verify)

    return ap


def main(argv: Optional[list[str]] = None) -> int:
    logging.basicConfig(level=logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s: %(message)s")
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (UsageError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InternalInvariantError as exc:
        print(f"internal invariant failure: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
