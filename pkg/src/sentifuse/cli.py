"""
Command-line entry point: `sentifuse <command> [flags]`.

Every command reads its settings as defaults < `--config` file < flags and
writes its artifacts under `--out-dir`.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Sequence

from sentifuse.config import RunConfig, load_config
from sentifuse.core.backtest import GROUPINGS, all_buzz_stats, render_report, run_backtest
from sentifuse.core.data import (
    align_frames,
    generate_psychvars,
    generate_synthetic,
    load_bars,
    load_polarity,
    load_trmi,
    prepare_samples,
    psychvars_to_trmi,
)
from sentifuse.core.data.synthetic import SIGNAL_CHANNELS
from sentifuse.core.data.trmi import polarity_frame
from sentifuse.core.experiments import experiments, get_experiment, render_experiment
from sentifuse.core.models import VARIANTS
from sentifuse.core.tables import schemas
from sentifuse.core.training import accuracy, mean_average_precision, walk_forward
from sentifuse.errors import ConfigurationError, DataError, SentifuseError
from sentifuse.export import write_backtest, write_experiment, write_metrics, write_report_text, write_training

logger = logging.getLogger(__name__)

Command = Callable[[RunConfig, argparse.Namespace], int]

# argparse destination -> config key
FLAG_KEYS = {
    "seed": "seed",
    "jobs": "jobs",
    "out_dir": "out_dir",
    "bars": "bars",
    "trmi": "trmi",
    "days": "synth.days",
    "density": "synth.sentiment_density",
    "signal_channel": "synth.signal_channel",
    "strength": "synth.signal_strength",
    "horizon": "data.horizon",
    "variant": "model.variant",
    "indicators": "model.use_indicators",
    "sentiment": "model.use_sentiment",
    "epochs": "train.epochs",
    "warm_start": "train.warm_start",
    "threshold": "backtest.threshold",
    "cost": "backtest.cost_per_side",
    "start": "backtest.start",
    "end": "backtest.end",
}


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {value}")
    return value


def _fraction(text: str) -> float:
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"must lie in [0, 1], got {value}")
    return value


def cmd_gen_data(config: RunConfig, args: argparse.Namespace) -> int:
    out = Path(config.out_dir)
    data = generate_synthetic(config.synth, seed=config.seed)
    schemas.bars.write(data.bars, out / "bars.csv")
    schemas.trmi.write(data.trmi, out / "trmi.csv")
    schemas.trmi_raw.write(data.trmi_raw, out / "trmi_raw.csv")
    print(
        f"wrote {data.bars.height} bars, {data.trmi.height} sentiment intervals and "
        f"{data.trmi_raw.height} raw sentiment records to {out} (seed {config.seed})"
    )
    if args.psychvars:
        psychvars, polarity = generate_psychvars(config.synth, seed=config.seed)
        schemas.psychvars.write(psychvars, out / "psychvars.csv")
        schemas.polarity.write(polarity_frame(polarity), out / "polarity.csv")
        print(f"wrote {psychvars.height} PsychVar rows and the polarity table to {out}")
    return 0


def cmd_preprocess(config: RunConfig, args: argparse.Namespace) -> int:
    out = Path(config.out_dir)
    bars = load_bars(config.path("bars"))
    if args.psychvars is not None:
        if args.polarity is None:
            raise DataError("--psychvars needs --polarity")
        trmi = psychvars_to_trmi(schemas.psychvars.read(args.psychvars), load_polarity(args.polarity))
        schemas.trmi.write(trmi, out / "psychvars_trmi.csv")
    else:
        trmi = load_trmi(config.path("trmi"))

    aligned = align_frames(bars, trmi, config.data.interval_seconds)
    schemas.aligned.write(aligned, out / "aligned.csv")
    schemas.buzz_stats.write(all_buzz_stats(aligned), out / "buzz_stats.csv")
    padded = aligned.height - int(aligned.get_column("mask").sum())
    print(f"wrote {aligned.height} aligned intervals ({padded} padded) to {out / 'aligned.csv'}")
    return 0


def _sentiment_input(config: RunConfig) -> Any:
    path = config.path("trmi")
    if not config.model.use_sentiment and not path.exists():
        return schemas.trmi.empty()
    return load_trmi(path)


def cmd_train(config: RunConfig, args: argparse.Namespace) -> int:
    out = Path(config.out_dir)
    bars = load_bars(config.path("bars"))
    samples = prepare_samples(bars, _sentiment_input(config), config.data, config.model.use_indicators)
    folds = walk_forward(samples, config.model, config.train_config(), jobs=config.jobs)
    if not folds:
        raise DataError("No walk-forward fold had enough samples to train")
    written = write_training(folds, out)

    predictions = schemas.predictions.read(written["predictions"])
    scores = predictions.select("score_down", "score_flat", "score_up").to_numpy()
    labels = predictions.get_column("label").to_numpy()
    print(
        f"{config.model.variant}: {len(folds)} folds, {predictions.height} test days, "
        f"MAP {mean_average_precision(scores, labels):.4f}, accuracy {accuracy(scores, labels):.4f}"
    )
    return 0


def cmd_backtest(config: RunConfig, args: argparse.Namespace) -> int:
    out = Path(config.out_dir)
    bars = load_bars(config.path("bars"))
    sources = [Path(path) for path in args.predictions] or [out / "predictions.csv"]

    reports = {}
    for source in sources:
        report = run_backtest(schemas.predictions.read(source), bars, config.backtest)
        directory = out / "backtest" / source.stem if len(sources) > 1 else out
        write_backtest(report, directory)
        reports[source.stem] = report
    write_metrics(reports, out / "metrics.csv")

    trmi_path = config.path("trmi")
    if trmi_path.exists():
        aligned = align_frames(bars, load_trmi(trmi_path), config.data.interval_seconds)
        schemas.buzz_stats.write(all_buzz_stats(aligned), out / "buzz_stats.csv")

    text = render_report(reports)
    write_report_text(text, out / "report.txt")
    print(text)
    return 0


def cmd_experiment(config: RunConfig, args: argparse.Namespace) -> int:
    result = get_experiment(args.name)(config)
    write_experiment(result, config.out_dir)
    print(render_experiment(result))
    return 0


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None, help="key=value config file")
    common.add_argument("--seed", type=int, default=None, help="seed for every random choice")
    common.add_argument("--out-dir", dest="out_dir", default=None, help="artifact directory")
    common.add_argument("--jobs", type=_positive_int, default=None, help="parallel walk-forward folds")
    common.add_argument("--verbose", "-v", action="store_true", help="log at DEBUG")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(
        prog="sentifuse",
        description="Fuse trading and sentiment streams for intraday movement prediction.",
    )
    commands = parser.add_subparsers(dest="command_name", required=True)

    gen = commands.add_parser("gen-data", parents=[common], help="generate a synthetic dataset")
    gen.add_argument("--days", type=_positive_int, default=None)
    gen.add_argument("--density", type=_fraction, default=None, help="share of intervals with sentiment")
    gen.add_argument("--signal-channel", dest="signal_channel", choices=SIGNAL_CHANNELS, default=None)
    gen.add_argument("--strength", type=_fraction, default=None, help="planted signal strength")
    gen.add_argument("--psychvars", action="store_true", help="also write PsychVars and polarity")
    gen.set_defaults(command=cmd_gen_data)

    pre = commands.add_parser("preprocess", parents=[common], help="aggregate and align the streams")
    pre.add_argument("--bars", default=None)
    pre.add_argument("--trmi", default=None, help="sentiment records at any resolution")
    pre.add_argument("--psychvars", default=None, help="compute sentiment from PsychVars instead")
    pre.add_argument("--polarity", default=None, help="polarity table for --psychvars")
    pre.set_defaults(command=cmd_preprocess)

    train = commands.add_parser("train", parents=[common], help="walk-forward training")
    train.add_argument("--bars", default=None)
    train.add_argument("--trmi", default=None)
    train.add_argument("--variant", choices=VARIANTS, default=None)
    train.add_argument("--indicators", action="store_const", const=True, default=None)
    train.add_argument("--sentiment", action="store_const", const=True, default=None)
    train.add_argument("--epochs", type=_positive_int, default=None)
    train.add_argument("--horizon", type=_positive_int, default=None)
    train.add_argument("--warm-start", dest="warm_start", action="store_const", const=True, default=None)
    train.set_defaults(command=cmd_train)

    backtest = commands.add_parser("backtest", parents=[common], help="trade predictions and report")
    backtest.add_argument("predictions", nargs="*", help="prediction CSVs (default: <out-dir>/predictions.csv)")
    backtest.add_argument("--bars", default=None)
    backtest.add_argument("--trmi", default=None, help=f"sentiment for buzz statistics by {GROUPINGS}")
    backtest.add_argument("--threshold", type=_fraction, default=None)
    backtest.add_argument("--cost", type=float, default=None, help="cost per side, as a fraction")
    backtest.add_argument("--from", dest="start", default=None, help="first day (ISO date)")
    backtest.add_argument("--to", dest="end", default=None, help="end day, exclusive (ISO date)")
    backtest.set_defaults(command=cmd_backtest)

    experiment = commands.add_parser("experiment", parents=[common], help="run a canned experiment")
    experiment.add_argument("name", help=f"one of {experiments()}")
    experiment.set_defaults(command=cmd_experiment)
    return parser


def overrides_from_args(args: argparse.Namespace) -> dict[str, Any]:
    return {
        key: getattr(args, dest)
        for dest, key in FLAG_KEYS.items()
        if getattr(args, dest, None) is not None
    }


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(message)s",
        stream=sys.stderr,
    )

    try:
        config = load_config(args.config, overrides_from_args(args))
    except ConfigurationError as e:
        parser.error(str(e))
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1

    command: Command = args.command
    try:
        return command(config, args)
    except (SentifuseError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except KeyError as e:
        print(f"error: {e.args[0]}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
