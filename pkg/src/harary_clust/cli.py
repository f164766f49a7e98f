"""Command-line front end: ``cluster``, ``metrics``, ``verify-duality``, ``bench``.

Exit codes: 0 success, 1 input/IO failure, 2 bad flags or mismatched
labels, 3 a duality property failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, replace
from pathlib import Path

import numpy as np

from . import __version__
from .clusterer import TRACE_HEADER, Config, ClusterResult, run
from .graph import FORMATS, EmptyGraphError, ParseError, load_graph
from .metrics import metrics_record

LABELS_HEADER = ("vertex", "cluster")
BENCH_HEADER = ("dataset", "param", "value", "pos_in", "neg_out", "splits", "clusters", "time_s")
SWEEPABLE = {"iterations": int, "alpha": float, "beta": float, "epsilon": float, "gamma": int, "time_limit_s": int}
DATASET_SUFFIXES = {".tsv", ".txt", ".csv", ".edges", ".el"}


class UsageError(Exception):
    """Bad flag values; maps to exit code 2."""


def _config_from_args(args) -> Config:
    try:
        return Config(
            iterations=args.iterations,
            alpha=args.alpha,
            beta=args.beta,
            epsilon=args.epsilon,
            gamma=args.gamma,
            time_limit_s=args.time_limit,
            seed=args.seed,
            tree_method=args.tree_method,
            workers=args.workers,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def summary_line(res: ClusterResult) -> str:
    m = res.metrics
    return (
        f"clusters_ge5={res.clusters_ge5} clusters_lt5={res.clusters_lt5} splits={res.split_count} "
        f"pos_in={m.pos_in:.4f} neg_out={m.neg_out:.4f} time_s={res.elapsed_s:.3f}"
    )


def write_labels(path: Path, g, labels: np.ndarray) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(LABELS_HEADER)
        for name, lab in zip(g.names, labels.tolist()):
            w.writerow((name, lab))


def write_trace(path: Path, res: ClusterResult) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_HEADER)
        for row in res.trace:
            w.writerow(
                (row.split, row.label, row.size, row.frustration, f"{row.pos_in:.6f}", f"{row.neg_out:.6f}",
                 f"{row.overall_loss:.10f}", row.clusters, f"{row.elapsed_s:.4f}")
            )


def read_labels(path: Path, g) -> np.ndarray:
    """Labels CSV -> per-vertex array; raises UsageError unless it covers exactly V(g)."""
    index = {str(name): i for i, name in enumerate(g.names)}
    labels = np.full(g.n, -1, dtype=np.int64)
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(c.strip() for c in rows[0]) != LABELS_HEADER:
        raise UsageError(f"{path}: expected header {','.join(LABELS_HEADER)}")
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 2:
            raise UsageError(f"{path}:{lineno}: expected two columns")
        v = index.get(row[0].strip())
        if v is None:
            raise UsageError(f"{path}:{lineno}: vertex {row[0]!r} not in graph")
        try:
            labels[v] = int(row[1])
        except ValueError:
            raise UsageError(f"{path}:{lineno}: cluster id must be an integer") from None
    missing = np.flatnonzero(labels < 0)
    if missing.size:
        raise UsageError(f"{path}: no label for vertex {g.names[missing[0]]!r}")
    return labels


def _cluster_args(p: argparse.ArgumentParser) -> None:
    d = Config()
    p.add_argument("--format", choices=FORMATS, default="konect")
    p.add_argument("-I", "--iterations", type=int, default=d.iterations)
    p.add_argument("--alpha", type=float, default=d.alpha)
    p.add_argument("--beta", type=float, default=d.beta)
    p.add_argument("--epsilon", type=float, default=d.epsilon)
    p.add_argument("--gamma", type=int, default=d.gamma)
    p.add_argument("--time-limit", type=int, default=d.time_limit_s, help="seconds, -1 for none")
    p.add_argument("--seed", type=int, default=d.seed)
    p.add_argument("--tree-method", choices=("random-bfs", "random-kruskal"), default=d.tree_method)
    p.add_argument("--workers", type=int, default=d.workers, help="threads per best-cut search")


def cmd_cluster(args) -> int:
    if args.replay:
        try:
            manifest = json.loads(Path(args.replay).read_text())
        except (OSError, ValueError) as exc:
            print(f"error: cannot read manifest: {exc}", file=sys.stderr)
            return 1
        try:
            cfg = Config(**manifest["config"])
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"bad manifest: {exc}") from None
        args.input = Path(manifest["input"])
        args.format = manifest["format"]
    else:
        if args.input is None:
            raise UsageError("--input is required unless --replay is given")
        cfg = _config_from_args(args)
    try:
        g = load_graph(args.input, args.format)
    except (OSError, ParseError, EmptyGraphError) as exc:
        print(f"error: {args.input}: {exc}", file=sys.stderr)
        return 1
    res = run(g, cfg)
    outputs = {}
    try:
        if args.labels:
            write_labels(args.labels, g, res.labels)
            outputs["labels"] = str(args.labels)
        if args.trace:
            write_trace(args.trace, res)
            outputs["trace"] = str(args.trace)
        if args.manifest:
            outputs["manifest"] = str(args.manifest)
            manifest = {
                "tool": f"harary-clust {__version__}",
                "input": str(Path(args.input).resolve()),
                "format": args.format,
                "config": asdict(cfg),
                "elapsed_s": res.elapsed_s,
                "summary": {
                    "clusters_ge5": res.clusters_ge5,
                    "clusters_lt5": res.clusters_lt5,
                    "splits": res.split_count,
                    "pos_in": res.metrics.pos_in,
                    "neg_out": res.metrics.neg_out,
                    "overall_loss": res.metrics.overall_loss,
                },
                "outputs": outputs,
            }
            Path(args.manifest).write_text(json.dumps(manifest, indent=2) + "\n")
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(summary_line(res))
    return 0


def cmd_metrics(args) -> int:
    try:
        g = load_graph(args.input, args.format)
    except (OSError, ParseError, EmptyGraphError) as exc:
        print(f"error: {args.input}: {exc}", file=sys.stderr)
        return 1
    try:
        labels = read_labels(args.labels, g)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    rec = metrics_record(g, labels, args.alpha, args.beta)
    for key, value in rec.as_dict().items():
        print(f"{key}={value:.6f}" if isinstance(value, float) else f"{key}={value}")
    return 0


def cmd_verify_duality(args) -> int:
    from .verify import run_suite

    report = run_suite(n_max=args.n_max, trials=args.trials, seed=args.seed, inject_unbalanced=args.inject_unbalanced)
    print(report.text)
    return 0 if report.ok else 3


def _parse_sweep(text: str) -> tuple[str, list[str]]:
    if "=" not in text:
        raise UsageError("--sweep expects param=v1,v2,...")
    name, values = text.split("=", 1)
    name = name.strip().replace("-", "_")
    if name == "time_limit":
        name = "time_limit_s"
    if name not in SWEEPABLE:
        raise UsageError(f"cannot sweep {name!r}; choose from {sorted(SWEEPABLE)}")
    vals = [v.strip() for v in values.split(",") if v.strip()]
    if not vals:
        raise UsageError("--sweep needs at least one value")
    return name, vals


def resolve_value(name: str, raw: str, n: int):
    """Sweep value, allowing ``n/<k>`` relative to the dataset's vertex count."""
    if raw.startswith("n/"):
        return SWEEPABLE[name](n // int(raw[2:]))
    return SWEEPABLE[name](float(raw)) if SWEEPABLE[name] is int else float(raw)


def _bench_one(job):
    path, fmt, cfg, name, raw = job
    try:
        g = load_graph(path, fmt)
        value = resolve_value(name, raw, g.n)
        res = run(g, replace(cfg, **{name: value}))
    except Exception as exc:  # recorded per dataset, the sweep carries on
        return None, f"{Path(path).name}: {exc}"
    row = (Path(path).name, name, raw, f"{res.metrics.pos_in:.4f}", f"{res.metrics.neg_out:.4f}",
           res.split_count, res.cluster_count, f"{res.elapsed_s:.4f}")
    return row, None


def cmd_bench(args) -> int:
    directory = Path(args.dir)
    if not directory.is_dir():
        raise UsageError(f"{directory} is not a directory")
    files = sorted(p for p in directory.iterdir() if p.is_file() and (p.suffix in DATASET_SUFFIXES or p.name.startswith("out.")))
    if not files:
        raise UsageError(f"no dataset files in {directory}")
    cfg = _config_from_args(args)
    name, raws = _parse_sweep(args.sweep) if args.sweep else ("iterations", [str(cfg.iterations)])
    for raw in raws:
        try:
            replace(cfg, **{name: resolve_value(name, raw, 1 << 20)})
        except ValueError as exc:
            raise UsageError(f"bad sweep value {raw!r}: {exc}") from None
    jobs = [(str(f), args.format, cfg, name, raw) for f in files for raw in raws]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_bench_one, jobs))
    else:
        results = [_bench_one(j) for j in jobs]
    rows = [r for r, _ in results if r is not None]
    failures = [e for _, e in results if e is not None]
    order = {raw: i for i, raw in enumerate(raws)}
    rows.sort(key=lambda r: (r[0], order[r[2]]))
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(BENCH_HEADER)
    w.writerows(rows)
    if args.out:
        Path(args.out).write_text(out.getvalue())
    else:
        sys.stdout.write(out.getvalue())
    for e in failures:
        print(f"error: {e}", file=sys.stderr)
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="harary-clust", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cluster", help="cluster a signed graph")
    _cluster_args(p)
    p.add_argument("--input", type=Path)
    p.add_argument("--labels", type=Path, help="write vertex,cluster CSV")
    p.add_argument("--trace", type=Path, help="write per-split trace CSV")
    p.add_argument("--manifest", type=Path, help="write a JSON run manifest")
    p.add_argument("--replay", type=Path, help="rerun the input and config stored in a manifest")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("metrics", help="score a labelling")
    p.add_argument("--input", required=True, type=Path)
    p.add_argument("--format", choices=FORMATS, default="konect")
    p.add_argument("--labels", required=True, type=Path)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--beta", type=float, default=1.0)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("verify-duality", help="check balance/spectrum properties on small graphs")
    p.add_argument("--n-max", type=int, default=8)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--inject-unbalanced", action="store_true", help="feed an unbalanced signing to the isospectral check")
    p.set_defaults(func=cmd_verify_duality)

    p = sub.add_parser("bench", help="parameter sweep over a directory of datasets")
    p.add_argument("--dir", required=True, type=Path)
    p.add_argument("--sweep", help="param=v1,v2,... (values may be n/<k>)")
    p.add_argument("--out", type=Path, help="CSV destination (default stdout)")
    p.add_argument("--jobs", type=int, default=1, help="datasets run in parallel processes")
    _cluster_args(p)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command in ("metrics",):
        if not 0 <= args.alpha <= 1 or not 0 <= args.beta <= 1:
            parser.error("alpha and beta must lie in [0, 1]")
    if args.command == "bench" and args.jobs < 1:
        parser.error("--jobs must be >= 1")
    if args.command == "verify-duality" and (args.n_max < 2 or args.trials < 0):
        parser.error("--n-max must be >= 2 and --trials >= 0")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
