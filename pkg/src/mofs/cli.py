"""Command-line driver: `mofs run` (full pipeline), `mofs rank` (re-rank a
report), `mofs serve` (HTTP API). Exit codes: 0 success, 1 domain error,
2 usage error."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from mofs import interpret
from mofs.data import DatasetError, load_csv, stratified_split
from mofs.nsga3 import GAConfig, run_search
from mofs.objectives import DEFAULT_VIF_CAP, DIRECTIONS, OBJECTIVE_NAMES

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2


def _json_text(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _fmt(value, digits=4):
    if isinstance(value, float):
        return f"{value:.{digits}f}"
    return str(value)


def _table(headers: list[str], rows: list[list]) -> str:
    cells = [[_fmt(c) for c in row] for row in rows]
    widths = [max(len(h), *(len(r[i]) for r in cells)) if cells else len(h) for i, h in enumerate(headers)]
    lines = [
        "  ".join(h.ljust(widths[i]) for i, h in enumerate(headers)),
        "  ".join("-" * widths[i] for i in range(len(headers))),
    ]
    for row in cells:
        lines.append("  ".join(row[i].ljust(widths[i]) for i in range(len(headers))))
    return "\n".join(lines)


def render_tables(report: dict) -> str:
    """Plain-text tables rendered from the report document and nothing else."""
    blocks = []
    primary = report["provenance"]["primary_scheme"]

    # canonical block order regardless of how the report dict was serialized
    scheme_order = [primary] + sorted(s for s in report["weights"] if s != primary)
    for scheme in scheme_order:
        wv = report["weights"][scheme]
        order = wv["objective_rank"]
        values = dict(zip(OBJECTIVE_NAMES, wv["values"]))
        rows = [[name, values[name], rank + 1] for rank, name in enumerate(order)]
        blocks.append(
            f"Objective weights and rank ({scheme})\n"
            + _table(["objective", "weight", "rank"], rows)
        )

    sols = sorted(report["solutions"], key=lambda s: s["rank"])
    rows = [
        [
            s["rank"],
            s["id"],
            s["ps"],
            s["objectives"]["subset_size"],
            s["objectives"]["balanced_accuracy"],
            s["objectives"]["f1_score"],
            s["objectives"]["vif"],
            s["objectives"]["statistical_parity"],
            s["objectives"]["equalised_odds"],
            s["cluster"],
        ]
        for s in sols[:10]
    ]
    blocks.append(
        f"Top solutions by performance score ({primary} weights)\n"
        + _table(
            ["rank", "id", "ps", "size", "bal_acc", "f1", "vif", "stat_par", "eq_odds", "cluster"],
            rows,
        )
    )

    names = report["provenance"]["feature_names"]
    freq = report["frequency"]
    order = sorted(range(len(names)), key=lambda j: (-freq[j], j))
    rows = [[names[j], freq[j]] for j in order if freq[j] > 0]
    blocks.append("Feature frequency across solutions\n" + _table(["feature", "count"], rows))

    contrib = report["contribution"]
    rows = [
        [names[j], contrib["values"][j]]
        for j in sorted(range(len(names)), key=lambda j: -contrib["values"][j])
        if contrib["values"][j] > 0
    ]
    blocks.append(
        f"Feature contribution on solution {contrib['solution_id']} "
        f"({contrib['samples']} draws)\n" + _table(["feature", "mean |shapley|"], rows)
    )

    sens = report["sensitivity"]
    depth = max(len(ids) for ids in sens["top"].values())
    rows = [
        [pos + 1] + [
            (f"soln{sens['top'][s][pos]}" if pos < len(sens["top"][s]) else "")
            for s in sens["schemes"]
        ]
        for pos in range(depth)
    ]
    blocks.append(
        "Top-5 solutions per weighting scheme\n"
        + _table(["rank"] + list(sens["schemes"]), rows)
    )

    return "\n\n".join(blocks) + "\n"


def cmd_run(args) -> int:
    ds = load_csv(
        args.data,
        target_column=args.target,
        sensitive_column=args.sensitive,
        positive_label=args.positive,
        name=args.name or Path(args.data).name,
    )
    split = stratified_split(ds, test_fraction=args.test_fraction, seed=args.seed)
    overrides = {}
    if args.population is not None:
        overrides["population_size"] = args.population
    if args.max_evals is not None:
        overrides["max_evaluations"] = args.max_evals
    if args.divisions is not None:
        overrides["reference_divisions"] = args.divisions
    cfg = GAConfig.for_features(ds.n_features, seed=args.seed, **overrides)

    def progress(done, total):
        if not args.quiet:
            print(f"\r  evaluations {done}/{total}", end="", file=sys.stderr)

    ss = run_search(ds, split, cfg, args.classifier, vif_cap=args.vif_cap, progress=progress)
    if not args.quiet:
        print(file=sys.stderr)
    report = interpret.build_report(
        ss,
        ds,
        split,
        args.classifier,
        primary_scheme=args.scheme,
        k="auto" if args.k == "auto" else int(args.k),
        vif_cap=args.vif_cap,
        contribution_samples=args.samples,
        seed=args.seed,
    )
    report_dict = report.to_dict()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    record = {
        "provenance": ss.provenance,
        "solutions": [
            {"id": i, "mask": [int(b) for b in c.mask], "objectives": c.objectives.as_dict()}
            for i, c in enumerate(ss.solutions)
        ],
        "evaluation_count": ss.evaluation_count,
    }
    (out / "record.json").write_text(_json_text(record))
    (out / "report.json").write_text(_json_text(report_dict))
    (out / "tables.txt").write_text(render_tables(report_dict))
    print(
        f"{len(ss.solutions)} non-dominated solutions after {ss.evaluation_count} evaluations; "
        f"artifacts in {out}/"
    )
    return EXIT_OK


def cmd_rank(args) -> int:
    report = json.loads(Path(args.report).read_text())
    matrix = np.array(
        [[s["objectives"][name] for name in OBJECTIVE_NAMES] for s in report["solutions"]],
        dtype=float,
    )
    ids = [s["id"] for s in report["solutions"]]
    if args.scheme == "custom":
        if args.weights is None:
            print("usage error: --weights w1..w6 required with --scheme custom", file=sys.stderr)
            return EXIT_USAGE
        weights = interpret.compute_weights(
            matrix, DIRECTIONS, "custom", custom=np.asarray(args.weights, dtype=float)
        )
    else:
        if args.weights is not None:
            print("usage error: --weights only applies to --scheme custom", file=sys.stderr)
            return EXIT_USAGE
        if len(matrix) == 1:
            weights = interpret.compute_weights(matrix, DIRECTIONS, "equal")
        else:
            weights = interpret.compute_weights(matrix, DIRECTIONS, args.scheme)
    ranking = interpret.topsis_rank(matrix, DIRECTIONS, weights)
    if args.json:
        print(
            json.dumps(
                {
                    "scheme": args.scheme,
                    "weights": [float(w) for w in weights.weights],
                    "results": [
                        {"id": int(ids[i]), "ps": float(ranking.ps[i]), "rank": int(ranking.rank[i])}
                        for i in ranking.order
                    ],
                },
                sort_keys=True,
            )
        )
        return EXIT_OK
    rows = [
        [int(ranking.rank[i]), f"soln{ids[i]}", float(ranking.ps[i]), int(matrix[i, 0])]
        for i in ranking.order
    ]
    print(_table(["rank", "solution", "ps", "size"], rows))
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from mofs.service import create_app

    app = create_app(args.data_dir, workers=args.workers, ui_dir=args.ui_dir)
    try:
        uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    except (OSError, SystemExit) as exc:
        print(f"cannot serve on {args.host}:{args.port}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_OK


def _nonneg_weight(text: str) -> float:
    value = float(text)
    if value < 0:
        raise argparse.ArgumentTypeError("weights must be non-negative")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mofs", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="search a dataset and write report artifacts")
    run.add_argument("--data", required=True, help="CSV file with a header row")
    run.add_argument("--target", required=True, help="target column name")
    run.add_argument("--sensitive", required=True, help="sensitive column name")
    run.add_argument("--positive", required=True, help="raw value of the favourable class")
    run.add_argument("--classifier", choices=("nb", "lr"), default="lr")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--test-fraction", type=float, default=0.3)
    run.add_argument("--out", default="mofs_out", help="artifact directory")
    run.add_argument("--vif-cap", type=float, default=DEFAULT_VIF_CAP)
    run.add_argument("--scheme", choices=("equal", "rstd", "entropy"), default="rstd",
                     help="primary weighting scheme for the report ranking")
    run.add_argument("--k", default="auto", help="cluster count or 'auto' (elbow)")
    run.add_argument("--samples", type=int, default=300, help="Shapley sampling draws")
    run.add_argument("--population", type=int, default=None)
    run.add_argument("--max-evals", type=int, default=None)
    run.add_argument("--divisions", type=int, default=None)
    run.add_argument("--name", default=None)
    run.add_argument("--quiet", action="store_true")
    run.set_defaults(func=cmd_run)

    rank = sub.add_parser("rank", help="re-rank a report under a weighting scheme")
    rank.add_argument("--report", required=True)
    rank.add_argument("--scheme", choices=("equal", "rstd", "entropy", "custom"), required=True)
    rank.add_argument("--weights", nargs=6, type=_nonneg_weight, default=None,
                      metavar=("w1", "w2", "w3", "w4", "w5", "w6"))
    rank.add_argument("--json", action="store_true", help="machine-readable output")
    rank.set_defaults(func=cmd_rank)

    serve = sub.add_parser("serve", help="run the HTTP API")
    serve.add_argument("--port", type=int, default=8080)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--data-dir", default="mofs_data")
    serve.add_argument("--workers", type=int, default=2)
    serve.add_argument("--ui-dir", default=None, help="serve a built UI from this directory")
    serve.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SystemExit:
        raise
    except (DatasetError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
