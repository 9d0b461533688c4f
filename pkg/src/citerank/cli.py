"""Command-line interface: corpus ingestion, the evaluation protocols, and
the HTTP service.

Option precedence: built-in defaults < config file (--config, flat
key=value) < explicit flags. The corpus directory comes from --data-dir,
the config key data_dir, or the ADVISOR_DATA_DIR environment variable, and
must contain meta.tsv and edges.tsv as written by `ingest`.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

from .config import load_config
from .errors import CiterankError, DomainError
from .evalharness import (
    FEEDBACK_MODES,
    FeedbackSimSpec,
    ScenarioSpec,
    citation_pattern_cdf,
    feedback_simulation,
    intersection_matrix,
    matrix_rows,
    parameter_sweep,
    plan_trials,
    reviewer_experiment,
    run_scenario,
    venue_experiment,
)
from .ingest import (
    build_graph,
    load_edgelist,
    parse_citeseer_jsonl,
    parse_dblp_xml,
    save_edgelist,
    synth_corpus,
)
from .rankers import ALGORITHMS, RankerParams

DEFAULTS = {
    "trials": 500,
    "seed": 0,
    "d": 0.75,
    "lambda": 0.5,
    "beta": 0.0005,
    "L": 10,
    "epsilon": 1e-8,
    "max_iters": 200,
    "min_refs": 20,
    "year_lo": 2005,
    "year_hi": 2010,
    "hide_fraction": 0.10,
    "page_size": 10,
    "target_distance": 5,
    "relevant_distance": 2,
    "time_budget": 30.0,
    "ttl": 3600.0,
    "host": "127.0.0.1",
    "port": 8330,
}


def _merged(args) -> dict:
    cfg = dict(DEFAULTS)
    if args.config:
        cfg.update(load_config(args.config))
    for key in DEFAULTS:
        attr = "lam" if key == "lambda" else key.replace("-", "_")
        flag = getattr(args, attr, None)
        if flag is not None:
            cfg[key] = flag
    return cfg


def _params(cfg) -> RankerParams:
    return RankerParams(
        d=float(cfg["d"]), lam=float(cfg["lambda"]), beta=float(cfg["beta"]),
        L=int(cfg["L"]), epsilon=float(cfg["epsilon"]), max_iters=int(cfg["max_iters"]),
    )


def _data_dir(args, cfg) -> Path:
    explicit = args.data_dir or cfg.get("data_dir") or os.environ.get("ADVISOR_DATA_DIR")
    if not explicit:
        raise DomainError("no corpus: pass --data-dir, set data_dir in the config, "
                          "or export ADVISOR_DATA_DIR")
    return Path(explicit)


def _load_graph(args, cfg):
    d = _data_dir(args, cfg)
    meta, edges = d / "meta.tsv", d / "edges.tsv"
    for p in (meta, edges):
        if not p.exists():
            raise DomainError(f"missing corpus file {p}")
    return load_edgelist(meta, edges)


def _write_csv(path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    print(f"wrote {path}")


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--data-dir", help="corpus directory (meta.tsv + edges.tsv)")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output CSV path")


def _add_params(p: argparse.ArgumentParser) -> None:
    p.add_argument("--d", type=float)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--L", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--max-iters", type=int)
    p.add_argument("--min-refs", type=int)
    p.add_argument("--year-lo", type=int)
    p.add_argument("--year-hi", type=int)
    p.add_argument("--hide-fraction", type=float)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="citerank",
                                 description="citation-graph recommendation toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="build a corpus directory")
    _add_common(p)
    p.add_argument("--meta", help="metadata TSV to import")
    p.add_argument("--edges", help="edge TSV to import")
    p.add_argument("--dblp", help="dblp.xml metadata stream")
    p.add_argument("--citeseer", help="reference JSONL (one object per line)")
    p.add_argument("--synth", type=int, help="generate a synthetic corpus of this size")
    p.add_argument("--mean-refs", type=float, default=20.0)
    p.add_argument("--pa-exponent", type=float, default=1.0)
    p.add_argument("--venues", type=int, default=0)
    p.add_argument("--community-bias", type=float, default=0.0)
    p.add_argument("--recency-window", type=int, default=0)
    p.add_argument("--synth-years", default="1970:2010", help="lo:hi year span")
    p.add_argument("--out-dir", required=True, help="corpus directory to write")

    p = sub.add_parser("scenario", help="run one hidden-reference scenario")
    _add_common(p)
    _add_params(p)
    p.add_argument("--kind", required=True,
                   choices=("hide_random", "hide_recent", "hide_earlier", "future_prediction"))
    p.add_argument("--algo", default="darwr", choices=ALGORITHMS)

    p = sub.add_parser("sweep", help="d x lambda parameter sweep")
    _add_common(p)
    _add_params(p)
    p.add_argument("--metric", required=True, choices=("mean_distance", "mean_year"))
    p.add_argument("--d-values", default="0.25,0.5,0.75,0.9")
    p.add_argument("--lambda-values", default="0.1,0.3,0.5,0.7,0.9")

    p = sub.add_parser("intersect", help="intersection matrix across algorithms")
    _add_common(p)
    _add_params(p)
    p.add_argument("--kind", required=True,
                   choices=("hide_random", "hide_recent", "hide_earlier", "future_prediction"))
    p.add_argument("--algos", default=",".join(ALGORITHMS))

    p = sub.add_parser("patterns", help="clustering/PageRank CDFs of scenario output")
    _add_common(p)
    _add_params(p)
    p.add_argument("--kind", default="hide_random",
                   choices=("hide_random", "hide_recent", "hide_earlier"))
    p.add_argument("--algos", default="darwr,paperrank,katz")

    p = sub.add_parser("feedback-sim", help="idealized relevance-feedback study")
    _add_common(p)
    _add_params(p)
    p.add_argument("--target-distance", type=int)
    p.add_argument("--relevant-distance", type=int)
    p.add_argument("--page-size", type=int)

    p = sub.add_parser("venue-exp", help="venue recommendation experiment")
    _add_common(p)
    _add_params(p)
    p.add_argument("--algos", default="darwr,paperrank,dakatz")
    p.add_argument("--k", type=int)

    p = sub.add_parser("reviewer-exp", help="reviewer recommendation experiment")
    _add_common(p)
    _add_params(p)
    p.add_argument("--algos", default="darwr,paperrank,dakatz")
    p.add_argument("--k", type=int)

    p = sub.add_parser("serve", help="start the HTTP service")
    _add_common(p)
    p.add_argument("--graph-dir", help="alias for --data-dir")
    p.add_argument("--host")
    p.add_argument("--port", type=int)
    p.add_argument("--time-budget", type=float)
    p.add_argument("--ttl", type=float)
    p.add_argument("--cors-origin", default="*")
    return ap


def _cmd_ingest(args, cfg) -> int:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report = None
    if args.synth:
        lo, _, hi = args.synth_years.partition(":")
        g = synth_corpus(
            args.synth, years=(int(lo), int(hi)), mean_refs=args.mean_refs,
            pa_exponent=args.pa_exponent, seed=int(cfg["seed"]), venues=args.venues,
            community_bias=args.community_bias, recency_window=args.recency_window,
        )
    elif args.dblp:
        if not args.citeseer:
            raise DomainError("--dblp needs --citeseer for reference data")
        meta = parse_dblp_xml(args.dblp)
        refs = parse_citeseer_jsonl(args.citeseer)
        g, report = build_graph(meta, refs)
    elif args.meta and args.edges:
        g = load_edgelist(args.meta, args.edges)
    else:
        raise DomainError("pick an input: --synth N, --dblp+--citeseer, or --meta+--edges")
    save_edgelist(g, out / "meta.tsv", out / "edges.tsv")
    summary = {
        "documents": g.n, "edges": g.n_edges,
        "venues": len(g.venue_names), "authors": len(g.author_names),
    }
    if report is not None:
        (out / "report.json").write_text(report.to_json(), encoding="utf-8")
        summary["matched_documents"] = report.matched_documents
    print(json.dumps(summary))
    return 0


def _cmd_scenario(args, cfg) -> int:
    g = _load_graph(args, cfg)
    spec = ScenarioSpec(args.kind, trials=int(cfg["trials"]), min_refs=int(cfg["min_refs"]),
                        year_window=(int(cfg["year_lo"]), int(cfg["year_hi"])),
                        hide_fraction=float(cfg["hide_fraction"]), seed=int(cfg["seed"]))
    res = run_scenario(g, spec, args.algo, _params(cfg))
    if args.out:
        _write_csv(args.out, ("trial", "source", "hidden", "hits", "accuracy"), res.rows(g))
    print(f"{args.kind} {args.algo}: mean accuracy {res.mean_accuracy:.4f} "
          f"over {len(res.records)} trials ({res.skipped} skipped)")
    return 0


def _cmd_sweep(args, cfg) -> int:
    g = _load_graph(args, cfg)
    rows = parameter_sweep(
        g, _floats(args.d_values), _floats(args.lambda_values), args.metric,
        trials=int(cfg["trials"]), min_refs=int(cfg["min_refs"]),
        year_window=(int(cfg["year_lo"]), int(cfg["year_hi"])),
        seed=int(cfg["seed"]), params=_params(cfg))
    if args.out:
        _write_csv(args.out, ("d", "lambda", "metric", "value", "trials"),
                   [(r.d, r.lam, r.metric, r.value, r.trials) for r in rows])
    for r in rows:
        print(f"d={r.d:g} lambda={r.lam:g} {r.metric}={r.value:.3f} ({r.trials} trials)")
    return 0


def _cmd_intersect(args, cfg) -> int:
    g = _load_graph(args, cfg)
    spec = ScenarioSpec(args.kind, trials=int(cfg["trials"]), min_refs=int(cfg["min_refs"]),
                        year_window=(int(cfg["year_lo"]), int(cfg["year_hi"])),
                        hide_fraction=float(cfg["hide_fraction"]), seed=int(cfg["seed"]))
    plan = plan_trials(g, spec)
    params = _params(cfg)
    algos = [a for a in args.algos.split(",") if a]
    results = {a: run_scenario(g, spec, a, params, plan=plan) for a in algos}
    names, matrix = intersection_matrix(results)
    if args.out:
        _write_csv(args.out, ("method_a", "method_b", "value"), matrix_rows(names, matrix))
    width = max(len(n) for n in names)
    print(" " * width + "  " + "  ".join(f"{n:>10}" for n in names))
    for i, a in enumerate(names):
        print(f"{a:>{width}}  " + "  ".join(f"{matrix[i, j]:10.4f}" for j in range(len(names))))
    return 0


def _cmd_patterns(args, cfg) -> int:
    g = _load_graph(args, cfg)
    spec = ScenarioSpec(args.kind, trials=int(cfg["trials"]), min_refs=int(cfg["min_refs"]),
                        year_window=(int(cfg["year_lo"]), int(cfg["year_hi"])),
                        hide_fraction=float(cfg["hide_fraction"]), seed=int(cfg["seed"]))
    plan = plan_trials(g, spec)
    params = _params(cfg)
    lists: dict[str, list[int]] = {"hidden": []}
    for rec in plan[0]:
        lists["hidden"].extend(rec.hidden)
    for algo in [a for a in args.algos.split(",") if a]:
        res = run_scenario(g, spec, algo, params, plan=plan)
        lists[algo] = [pid for rec in res.records for pid in rec.top]
    rows = citation_pattern_cdf(g, lists, d=float(cfg["d"]))
    if args.out:
        _write_csv(args.out, ("list", "metric", "value", "cdf"),
                   [(r.name, r.metric, r.value, r.cdf) for r in rows])
    for name in lists:
        n = sum(1 for r in rows if r.name == name) // 2
        print(f"{name}: {n} papers")
    return 0


def _cmd_feedback_sim(args, cfg) -> int:
    g = _load_graph(args, cfg)
    spec = FeedbackSimSpec(
        trials=int(cfg["trials"]), min_refs=int(cfg["min_refs"]),
        year_window=(int(cfg["year_lo"]), int(cfg["year_hi"])),
        target_distance=int(cfg["target_distance"]),
        relevant_distance=int(cfg["relevant_distance"]),
        page_size=int(cfg["page_size"]),
        seed=int(cfg["seed"]), params=_params(cfg))
    res = feedback_simulation(g, spec)
    if args.out:
        _write_csv(args.out, ("mode", "trials", "mean_pages", "reduction_pct"), res.rows())
    for mode in FEEDBACK_MODES:
        print(f"{mode}: mean pages {res.mean_pages(mode):.2f} "
              f"(reduction {res.reduction_pct(mode):.2f}%)")
    return 0


def _cmd_experiment(args, cfg, which) -> int:
    g = _load_graph(args, cfg)
    fn = venue_experiment if which == "venue" else reviewer_experiment
    kw = dict(algorithms=[a for a in args.algos.split(",") if a],
              params=_params(cfg), seed=int(cfg["seed"]), min_refs=int(cfg["min_refs"]))
    if args.k:
        kw["k"] = args.k
    res = fn(g, int(cfg["trials"]), **kw)
    if args.out:
        _write_csv(args.out, ("method", "metric", "value"), res.rows())
    for method, metric, value in res.rows():
        print(f"{method} {metric}: {100.0 * value:.1f}%")
    return 0


def _cmd_serve(args, cfg) -> int:
    import uvicorn

    from .service import create_app

    if args.graph_dir and not args.data_dir:
        args.data_dir = args.graph_dir
    g = _load_graph(args, cfg)
    app = create_app(
        g,
        ttl_seconds=float(cfg["ttl"]),
        time_budget=float(cfg["time_budget"]),
        cors_origins=tuple(args.cors_origin.split(",")),
        default_params=_params(cfg),
        page_size=int(cfg["page_size"]),
    )
    print(f"serving {g.n} papers / {g.n_edges} edges on "
          f"{cfg['host']}:{cfg['port']}")
    uvicorn.run(app, host=str(cfg["host"]), port=int(cfg["port"]), log_level="warning")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _merged(args)
        if args.command == "ingest":
            return _cmd_ingest(args, cfg)
        if args.command == "scenario":
            return _cmd_scenario(args, cfg)
        if args.command == "sweep":
            return _cmd_sweep(args, cfg)
        if args.command == "intersect":
            return _cmd_intersect(args, cfg)
        if args.command == "patterns":
            return _cmd_patterns(args, cfg)
        if args.command == "feedback-sim":
            return _cmd_feedback_sim(args, cfg)
        if args.command == "venue-exp":
            return _cmd_experiment(args, cfg, "venue")
        if args.command == "reviewer-exp":
            return _cmd_experiment(args, cfg, "reviewer")
        if args.command == "serve":
            return _cmd_serve(args, cfg)
        raise DomainError(f"unknown command {args.command!r}")
    except CiterankError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
