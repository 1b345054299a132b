"""Command-line entry point.

Every subcommand reads the same set of options, either as flags or from a
``key = value`` config file (``--config``); flags win over the file.  The
resolved options are written to ``run_config`` in each output directory and
that file can be fed back through ``--config`` to repeat the run.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import asdict, dataclass, fields

from . import __version__
from .chatlog import LogIntegrityError, LogParseError, load_log
from .evaluate import (ClassifierConfig, FoldPlan, ProtocolError, make_folds, read_importance_csv,
                       run_experiment, write_ablation_csv, write_importance_csv, write_metrics_csv,
                       write_pr_csv)
from .features import FeatureError, featurize_corpus, read_dataset_csv, read_targets_csv, write_dataset_csv
from .graphcore import GLOBAL_NAMES, LOCAL_NAMES, GraphError, graph_measures, read_graph_csv, write_graph_csv
from .learn import ModelMismatchError, TrainingError, ablation_run, train_dataset
from .netextract import ExtractionConfig, extract_all
from .plot import ablation_plot, threshold_plot
from .synth import SynthConfig, SynthError, generate

logger = logging.getLogger("convgraph")

COMMANDS = ("extract", "measures", "featurize", "train", "evaluate", "ablate", "synth", "pipeline")
DATA_ERRORS = (LogParseError, LogIntegrityError, FeatureError, GraphError, TrainingError,
               ModelMismatchError, ProtocolError, SynthError, KeyError, OSError)


def available_cores() -> int:
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1


@dataclass
class RunConfig:
    command: str = ""
    # paths
    log: str | None = None
    targets: str | None = None
    graph: str | None = None
    features: str | None = None
    importance: str | None = None
    out: str | None = None
    # extraction
    channel: str | None = None
    target_seq: int | None = None
    context: int = 100
    window: int = 10
    # classifier
    C: float = 1.0
    gamma: str = "auto"
    threshold: float = 0.5
    importance_repeats: int = 5
    thresholds: int = 101
    # protocol
    runs: int = 10
    train_fraction: float = 0.7
    seed: int = 0
    # synthetic corpus
    synth: bool = False
    users: int = 50
    messages: int = 20000
    channels: int = 4
    abuse_rate: float = 0.01
    pile_on: float = 3.0
    mention_rate: float = 0.1
    normal: int | None = None
    # execution
    jobs: int = 1
    svg: bool = False

    def extraction(self) -> ExtractionConfig:
        return ExtractionConfig(self.context, self.window)

    def classifier(self) -> ClassifierConfig:
        gamma = self.gamma if self.gamma == "auto" else float(self.gamma)
        return ClassifierConfig(self.C, gamma, self.threshold, self.importance_repeats, self.thresholds)

    def plan(self) -> FoldPlan:
        return FoldPlan(self.runs, self.train_fraction, self.seed)

    def synth_config(self) -> SynthConfig:
        return SynthConfig(n_users=self.users, n_messages=self.messages, n_channels=self.channels,
                           abuse_rate=self.abuse_rate, pile_on_intensity=self.pile_on,
                           mention_rate=self.mention_rate, seed=self.seed, n_normal=self.normal)

    def validate(self) -> None:
        """Check parameter values before any input is read."""
        try:
            self.extraction()
            self.classifier()
            self.plan()
            if self.synth or self.command == "synth":
                self.synth_config()
        except ValueError as exc:
            raise UsageError(f"{self.command}: {exc}") from None
        if self.jobs < 1:
            raise UsageError(f"{self.command}: jobs must be >= 1")

    def dumps(self) -> str:
        lines = []
        for key, value in asdict(self).items():
            if value is None:
                continue
            lines.append(f"{key} = {_format_value(value)}")
        return "\n".join(lines) + "\n"

    def write(self, directory: str) -> None:
        os.makedirs(directory, exist_ok=True)
        with open(os.path.join(directory, "run_config"), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.dumps())


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, float)):
        return repr(v)
    return json.dumps(str(v))


class UsageError(Exception):
    pass


def _coerce(key: str, raw):
    kind = _FIELD_TYPES[key]
    if raw is None:
        return None
    try:
        if "bool" in kind:
            if isinstance(raw, bool):
                return raw
            if raw in ("true", "false"):
                return raw == "true"
            raise ValueError(raw)
        if "int" in kind:
            return int(raw)
        if "float" in kind:
            return float(raw)
    except ValueError:
        raise UsageError(f"bad value for {key}: {raw!r}") from None
    return str(raw)


def parse_config_text(text: str, source: str = "config") -> dict:
    """Read ``key = value`` lines; ``#`` comments and ``[section]`` headers are ignored."""
    values = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#") or (line.startswith("[") and line.endswith("]")):
            continue
        if "=" not in line:
            raise UsageError(f"{source}:{line_no}: expected key = value")
        key, raw = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _FIELD_TYPES:
            raise UsageError(f"{source}:{line_no}: unknown key {key!r}")
        if raw.startswith('"'):
            try:
                raw = json.loads(raw)
            except json.JSONDecodeError:
                raise UsageError(f"{source}:{line_no}: bad string {raw}") from None
        values[key] = _coerce(key, raw)
    return values


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _add_common(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = argparse.SUPPRESS if suppress else None
    p.add_argument("--jobs", type=int, default=d, help="worker processes (default: available cores)")
    p.add_argument("--seed", type=int, default=d, help="base seed (default 0)")
    p.add_argument("--svg", action="store_const", const=True, default=d, help="also write SVG plots")
    p.add_argument("--config", default=d, help="key = value file; flags override it")
    p.add_argument("-v", "--verbose", action="store_const", const=True, default=d)


def _add_extraction(p):
    p.add_argument("--context", type=int, help="messages on each side of the target (default 100)")
    p.add_argument("--window", type=int, help="sliding window size (default 10)")


def _add_classifier(p):
    p.add_argument("--C", dest="C", type=float, help="SVM penalty (default 1.0)")
    p.add_argument("--gamma", help='RBF width or "auto" (default)')
    p.add_argument("--threshold", type=float, help="probability threshold (default 0.5)")
    p.add_argument("--runs", type=int, help="random splits (default 10)")
    p.add_argument("--train-fraction", type=float, help="training share per split (default 0.7)")
    p.add_argument("--importance-repeats", type=int, help="permutations per feature (default 5)")
    p.add_argument("--thresholds", type=int, help="points of the threshold sweep (default 101)")


def _add_synth(p):
    p.add_argument("--users", type=int)
    p.add_argument("--messages", type=int)
    p.add_argument("--channels", type=int)
    p.add_argument("--abuse-rate", type=float)
    p.add_argument("--pile-on", type=float)
    p.add_argument("--mention-rate", type=float)
    p.add_argument("--normal", type=int, help="normal targets (default: as many as abuse events)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="convgraph", description="Abuse detection from conversational graphs.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _add_common(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    p = sub.add_parser("extract", help="write the before/after/full graphs of one message")
    p.add_argument("--log")
    p.add_argument("--channel")
    p.add_argument("--target-seq", type=int)
    _add_extraction(p)
    p.add_argument("--out")

    p = sub.add_parser("measures", help="topological measures of one graph file")
    p.add_argument("--graph")
    p.add_argument("--out")

    p = sub.add_parser("featurize", help="feature rows for a target list")
    p.add_argument("--log")
    p.add_argument("--targets")
    _add_extraction(p)
    p.add_argument("--out")

    p = sub.add_parser("train", help="fit one model on a feature file")
    p.add_argument("--features")
    _add_classifier(p)
    p.add_argument("--out")

    p = sub.add_parser("evaluate", help="repeated split evaluation with importance")
    p.add_argument("--features")
    _add_classifier(p)
    p.add_argument("--out")

    p = sub.add_parser("ablate", help="feature ablation curve")
    p.add_argument("--features")
    p.add_argument("--importance", help="importance.csv from evaluate (recomputed if absent)")
    _add_classifier(p)
    p.add_argument("--out")

    p = sub.add_parser("synth", help="generate a synthetic corpus")
    _add_synth(p)
    p.add_argument("--out")

    p = sub.add_parser("pipeline", help="corpus to reports in one go")
    p.add_argument("--log")
    p.add_argument("--targets")
    p.add_argument("--synth", action="store_const", const=True, help="generate the corpus instead of --log")
    _add_extraction(p)
    _add_classifier(p)
    _add_synth(p)
    p.add_argument("--out")

    for p in sub.choices.values():
        _add_common(p, suppress=True)
    return parser


def resolve_config(ns: argparse.Namespace) -> RunConfig:
    """Defaults, then the config file, then explicit flags."""
    values = {"jobs": available_cores()}
    if getattr(ns, "config", None):
        try:
            with open(ns.config, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read config {ns.config}: {exc.strerror}") from None
        values.update(parse_config_text(text, ns.config))
    for key, value in vars(ns).items():
        if key in _FIELD_TYPES and value is not None:
            values[key] = _coerce(key, value)
    values["command"] = ns.command
    return RunConfig(**values)


def _need(cfg: RunConfig, *keys: str) -> None:
    missing = [k for k in keys if getattr(cfg, k) is None]
    if missing:
        flags = ", ".join("--" + k.replace("_", "-") for k in missing)
        raise UsageError(f"{cfg.command}: missing required option(s) {flags}")


def _out_dir(path: str) -> str:
    return os.path.dirname(os.path.abspath(path))


def _open_out(path: str):
    os.makedirs(_out_dir(path), exist_ok=True)
    return open(path, "w", encoding="utf-8", newline="")


def _load_features(path: str):
    with open(path, encoding="utf-8", newline="") as fh:
        return read_dataset_csv(fh)


def _featurize(cfg: RunConfig, log_path: str, targets_path: str):
    channels = load_log(log_path)
    with open(targets_path, encoding="utf-8", newline="") as fh:
        targets = read_targets_csv(fh)
    logger.info("featurizing %d targets", len(targets))
    return featurize_corpus(channels, targets, cfg.extraction(), jobs=cfg.jobs)


def cmd_extract(cfg: RunConfig) -> None:
    _need(cfg, "log", "channel", "target_seq", "out")
    ext = cfg.extraction()
    channels = load_log(cfg.log)
    if cfg.channel not in channels:
        raise FeatureError(f"no channel {cfg.channel!r} in {cfg.log}")
    triple = extract_all(channels[cfg.channel], cfg.target_seq, ext)
    os.makedirs(cfg.out, exist_ok=True)
    for kind, g in triple.items():
        with open(os.path.join(cfg.out, f"{kind}.csv"), "w", encoding="utf-8", newline="") as fh:
            write_graph_csv(g, fh)
    cfg.write(cfg.out)


def cmd_measures(cfg: RunConfig) -> None:
    _need(cfg, "graph", "out")
    with open(cfg.graph, encoding="utf-8", newline="") as fh:
        g = read_graph_csv(fh)
    local, glob = graph_measures(g)
    with _open_out(cfg.out) as fh:
        fh.write("measure,value\n")
        for name, v in zip(LOCAL_NAMES, local.values()):
            fh.write(f"target.{name},{v:.17g}\n")
        for name, v in zip(GLOBAL_NAMES, glob.values()):
            fh.write(f"{name},{v:.17g}\n")
    cfg.write(_out_dir(cfg.out))


def cmd_featurize(cfg: RunConfig) -> None:
    _need(cfg, "log", "targets", "out")
    ds = _featurize(cfg, cfg.log, cfg.targets)
    with _open_out(cfg.out) as fh:
        write_dataset_csv(ds, fh)
    cfg.write(_out_dir(cfg.out))


def cmd_train(cfg: RunConfig) -> None:
    _need(cfg, "features", "out")
    ds = _load_features(cfg.features)
    c = cfg.classifier()
    model = train_dataset(ds, C=c.C, gamma=c.gamma, seed=cfg.seed)
    os.makedirs(_out_dir(cfg.out), exist_ok=True)
    model.save(cfg.out)
    cfg.write(_out_dir(cfg.out))


def _evaluate(cfg: RunConfig, ds, out: str):
    report = run_experiment(ds, cfg.plan(), cfg.classifier(), with_importance=True, jobs=cfg.jobs)
    with open(os.path.join(out, "metrics.csv"), "w", encoding="utf-8", newline="") as fh:
        write_metrics_csv(report, fh)
    with open(os.path.join(out, "pr_curve.csv"), "w", encoding="utf-8", newline="") as fh:
        write_pr_csv(report, fh)
    importance = report.importance()
    with open(os.path.join(out, "importance.csv"), "w", encoding="utf-8", newline="") as fh:
        write_importance_csv(importance, fh)
    if cfg.svg:
        with open(os.path.join(out, "pr_curve.svg"), "w", encoding="utf-8") as fh:
            fh.write(threshold_plot(report.mean_pr()))
    p, r, f = report.mean
    logger.info("mean precision %.3f recall %.3f F %.3f", p, r, f)
    return report, importance


def _ablate(cfg: RunConfig, ds, importance, out: str) -> None:
    c = cfg.classifier()
    curve = ablation_run(ds, importance.removal_order(), make_folds(ds, cfg.plan()),
                         seed=cfg.seed, C=c.C, gamma=c.gamma, jobs=cfg.jobs)
    with open(os.path.join(out, "ablation.csv"), "w", encoding="utf-8", newline="") as fh:
        write_ablation_csv(curve, fh)
    if cfg.svg:
        with open(os.path.join(out, "ablation.svg"), "w", encoding="utf-8") as fh:
            fh.write(ablation_plot(curve))


def cmd_evaluate(cfg: RunConfig) -> None:
    _need(cfg, "features", "out")
    ds = _load_features(cfg.features)
    os.makedirs(cfg.out, exist_ok=True)
    _evaluate(cfg, ds, cfg.out)
    cfg.write(cfg.out)


def cmd_ablate(cfg: RunConfig) -> None:
    _need(cfg, "features", "out")
    ds = _load_features(cfg.features)
    os.makedirs(cfg.out, exist_ok=True)
    if cfg.importance:
        with open(cfg.importance, encoding="utf-8", newline="") as fh:
            importance = read_importance_csv(fh)
        if sorted(importance.feature_names) != sorted(ds.feature_names):
            raise FeatureError("importance file does not cover the dataset features")
    else:
        importance = run_experiment(ds, cfg.plan(), cfg.classifier(), jobs=cfg.jobs).importance()
    _ablate(cfg, ds, importance, cfg.out)
    cfg.write(cfg.out)


def cmd_synth(cfg: RunConfig) -> None:
    _need(cfg, "out")
    generate(cfg.synth_config()).write(cfg.out)
    cfg.write(cfg.out)


def cmd_pipeline(cfg: RunConfig) -> None:
    _need(cfg, "out")
    if cfg.synth and cfg.log:
        raise UsageError("pipeline: give either --log or --synth, not both")
    if not cfg.synth and not cfg.log:
        raise UsageError("pipeline: one of --log or --synth is required")
    os.makedirs(cfg.out, exist_ok=True)
    if cfg.synth:
        generate(cfg.synth_config()).write(cfg.out)
        log_path = os.path.join(cfg.out, "corpus.jsonl")
        targets_path = os.path.join(cfg.out, "targets.csv")
    else:
        _need(cfg, "targets")
        log_path, targets_path = cfg.log, cfg.targets
    ds = _featurize(cfg, log_path, targets_path)
    with open(os.path.join(cfg.out, "features.csv"), "w", encoding="utf-8", newline="") as fh:
        write_dataset_csv(ds, fh)
    _, importance = _evaluate(cfg, ds, cfg.out)
    _ablate(cfg, ds, importance, cfg.out)
    cfg.write(cfg.out)


HANDLERS = {name: globals()[f"cmd_{name}"] for name in COMMANDS}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        cfg = resolve_config(ns)
        cfg.validate()
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if getattr(ns, "verbose", None) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        HANDLERS[cfg.command](cfg)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except DATA_ERRORS as exc:
        detail = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"convgraph {cfg.command}: {detail}", file=sys.stderr)
        return 2
    except ValueError as exc:  # out-of-range parameter values
        print(f"convgraph {cfg.command}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
