"""Command line entry point: gen, validate, train, eval, serve, simulate, aggregate."""

import argparse
import json
import math
import os
import sys
from pathlib import Path

from .canvas import GLYPH_KINDS, StampKind, to_pgm
from .sampling import POW102X, UNIFORM, CountDistribution
from . import datasets, session as eng, supply, training


def _histogram_lines(name, hist):
    items = ", ".join(f"{k}: {v}" for k, v in sorted(hist.items()))
    return f"{name} histogram: {items}"


def _stamps_for(series: str, stamp_flag: str | None):
    if series == "a1":
        return (StampKind.GLYPH_X,)
    if series == "a2":
        return GLYPH_KINDS
    default = StampKind.DOT3 if series == "m1" else StampKind.DOT1
    if stamp_flag is None:
        return (default,)
    if stamp_flag == "glyphs":
        raise ValueError("--stamp glyphs needs --series a1 or a2")
    return (StampKind(stamp_flag),)


def _spec_from_args(args) -> datasets.DatasetSpec:
    if args.preset:
        overrides = {}
        if args.train is not None:
            overrides["train_count"] = args.train
        if args.test is not None:
            overrides["test_count"] = args.test
        if args.test_pixels is not None:
            overrides["test_pixels"] = args.test_pixels
        return datasets.preset(args.preset, seed=args.seed, **overrides)
    low = 0 if args.series == "m1" else 1
    if args.dist == "pow102x":
        dist = CountDistribution(POW102X, args.m, uniform_mix=0.1, low=1)
    else:
        dist = CountDistribution(UNIFORM, args.m, uniform_mix=0.0, low=low)
    return datasets.DatasetSpec(
        series=args.series,
        variant=args.variant,
        stamps=_stamps_for(args.series, args.stamp),
        m=args.m,
        distribution=dist,
        train_count=args.train if args.train is not None else 60000,
        test_count=args.test if args.test is not None else 10000,
        test_pixels=args.test_pixels,
        seed=args.seed,
    )


def cmd_gen(args) -> int:
    spec = _spec_from_args(args)
    pair = datasets.generate_pair(spec)
    outdir = datasets.write_dataset(pair, args.out, gzip=args.gzip)
    print(f"wrote {outdir}")
    print(_histogram_lines("train", pair.train.histogram))
    print(_histogram_lines("test", pair.test.histogram))
    report = supply.verify_dataset(pair)
    print(report.table.render())
    return 0


def cmd_validate(args) -> int:
    pair = datasets.load_dataset(args.dir)
    report = supply.verify_dataset(pair)
    if args.csv:
        lines = ["label,theoretical_train,theoretical_test,observed_train,observed_test"]
        for r in report.table.rows:
            lines.append(f"{r.label},{r.theoretical_train},{r.theoretical_test},"
                         f"{r.observed_train},{r.observed_test}")
        Path(args.csv).write_text("\n".join(lines) + "\n")
    print(report.render())
    return 0 if report.ok else 1


def _train_config(args) -> training.TrainConfig:
    kw = {"seed": args.seed}
    if args.lr is not None:
        kw["learning_rate"] = args.lr
    if args.batch is not None:
        kw["batch_size"] = args.batch
    if args.hidden is not None:
        kw["hidden"] = args.hidden
    if args.steps is not None:
        kw["steps"] = args.steps
        kw["epochs"] = None
    elif args.epochs is not None:
        kw["epochs"] = args.epochs
        kw["steps"] = None
    if args.model == "mlp":
        return training.mlp_config(**kw)
    return training.softmax_config(**kw)


def cmd_train(args) -> int:
    x, y, xt, yt, shape = training.load_arrays(args.data)
    config = _train_config(args)
    params, metrics, losses = training.train((x, y), (xt, yt), config)
    print(f"model: {config.kind}  epoch losses: "
          + " ".join(f"{v:.4f}" for v in losses))
    print(f"test accuracy: {metrics.accuracy:.4f}")
    if args.out:
        training.save_model(params, args.out)
        print(f"saved {args.out}")
    if args.weights_pgm:
        outdir = Path(args.weights_pgm)
        outdir.mkdir(parents=True, exist_ok=True)
        for c, grid in enumerate(training.export_weight_images(params)):
            (outdir / f"weights-{c}.pgm").write_bytes(to_pgm(grid))
        print(f"wrote weight images to {outdir}")
    return 0


def cmd_eval(args) -> int:
    params = training.load_model(args.model)
    x, y, xt, yt, _ = training.load_arrays(args.data)
    metrics = training.evaluate(params, xt, yt)
    print(f"test accuracy: {metrics.accuracy:.4f}")
    if args.confusion:
        for row in metrics.confusion:
            print(" ".join(f"{v:6d}" for v in row))
    return 0


def cmd_serve(args) -> int:
    from . import service

    service.run(
        data_dir=args.data_dir,
        port=args.port,
        host=args.host,
        answer_window_ms=args.answer_window_ms,
        datasets_dir=args.datasets_dir,
        webui_dir=args.webui,
    )
    return 0


def cmd_simulate(args) -> int:
    capacity = math.inf if args.capacity in (None, "inf") else float(args.capacity)
    results = eng.simulate_many(
        players=args.players,
        capacity=capacity,
        reaction_ms=args.reaction_ms,
        seed=args.seed,
        max_trials=args.max_trials,
    )
    outdir = Path(args.data_dir) / "sessions"
    outdir.mkdir(parents=True, exist_ok=True)
    for i, (_, events) in enumerate(results):
        path = outdir / f"sim{args.seed:08d}{i:06d}.jsonl"
        path.write_text("".join(json.dumps(e) + "\n" for e in events))
    print(f"wrote {len(results)} session logs to {outdir}")
    rows = eng.aggregate([s.records for s, _ in results])
    _print_aggregate(rows)
    return 0


def _print_aggregate(rows):
    print(f"{'label':>6}{'measured':>12}{'theoretical':>13}{'n':>8}")
    for r in rows:
        print(f"{r.label:>6}{r.measured:>12.4f}{r.theoretical:>13.4f}{r.sessions:>8}")


def cmd_aggregate(args) -> int:
    from .service import SessionStore

    store = SessionStore(args.data_dir, eng.SessionConfig())
    rows = eng.aggregate(store.all_records())
    if args.csv:
        Path(args.csv).write_text(eng.aggregate_csv(rows))
        print(f"wrote {args.csv}")
    _print_aggregate(rows)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="smnist", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a dataset directory")
    g.add_argument("--preset", choices=datasets.PRESET_NAMES, default=None,
                   help="named catalog configuration (overrides series/variant flags)")
    g.add_argument("--series", choices=datasets.SERIES, default="m2")
    g.add_argument("--variant", choices=datasets.VARIANTS, default="disjunct")
    g.add_argument("--stamp", choices=["3x3", "1px", "glyphs"], default=None)
    g.add_argument("--m", type=int, default=9, help="maximum object count (label)")
    g.add_argument("--dist", choices=["uniform", "pow102x"], default="uniform")
    g.add_argument("--train", type=int, default=None)
    g.add_argument("--test", type=int, default=None)
    g.add_argument("--test-pixels", type=int, default=None,
                   help="hard variant: size of the test-side position set")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--gzip", action="store_true")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    v = sub.add_parser("validate", help="check a dataset directory against its rules")
    v.add_argument("dir")
    v.add_argument("--csv", default=None)
    v.set_defaults(func=cmd_validate)

    t = sub.add_parser("train", help="train a classifier on a dataset directory")
    t.add_argument("--data", required=True)
    t.add_argument("--model", choices=["softmax", "mlp"], default="softmax")
    t.add_argument("--lr", type=float, default=None)
    t.add_argument("--batch", type=int, default=None)
    t.add_argument("--steps", type=int, default=None)
    t.add_argument("--epochs", type=int, default=None)
    t.add_argument("--hidden", type=int, default=None)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--out", default=None, help="checkpoint path")
    t.add_argument("--weights-pgm", default=None,
                   help="directory for per-class weight images (softmax)")
    t.set_defaults(func=cmd_train)

    e = sub.add_parser("eval", help="evaluate a checkpoint on a dataset directory")
    e.add_argument("--model", required=True)
    e.add_argument("--data", required=True)
    e.add_argument("--confusion", action="store_true")
    e.set_defaults(func=cmd_eval)

    s = sub.add_parser("serve", help="run the HTTP service")
    s.add_argument("--port", type=int, default=int(os.environ.get("SMNIST_PORT", 8000)))
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--data-dir", default=os.environ.get("SMNIST_DATA", "data"))
    s.add_argument("--answer-window-ms", type=int,
                   default=int(os.environ.get("SMNIST_ANSWER_WINDOW_MS", 3000)))
    s.add_argument("--datasets-dir", default=None)
    s.add_argument("--webui", default=None, help="static assets directory")
    s.set_defaults(func=cmd_serve)

    m = sub.add_parser("simulate", help="run synthetic players and persist logs")
    m.add_argument("--players", type=int, required=True)
    m.add_argument("--capacity", default="inf",
                   help="largest numerosity answered reliably; 'inf' for ideal")
    m.add_argument("--reaction-ms", type=int, default=800)
    m.add_argument("--max-trials", type=int, default=500)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--data-dir", default="data")
    m.set_defaults(func=cmd_simulate)

    a = sub.add_parser("aggregate", help="aggregate persisted session logs")
    a.add_argument("--data-dir", default="data")
    a.add_argument("--csv", default=None)
    a.set_defaults(func=cmd_aggregate)

    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
