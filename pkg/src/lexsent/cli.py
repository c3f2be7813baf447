"""Command-line surface: corpus utilities, the rule baseline, the staged
training pipeline, and the gradient-check harness.

Config precedence is defaults < --config file < explicit flags, and the
fully resolved config is echoed into the metrics log, so a run can be
reproduced from its log alone.  Metrics records carry no timestamps;
two runs with the same seed and inputs write byte-identical logs.

Exit codes: 0 success, 1 usage/validation, 2 numeric divergence,
3 internal error.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import sys
from pathlib import Path

from . import gradsuite
from .baseline import lex_rule_classify
from .checkpoint import save_checkpoint
from .corpus import LABELS, aggregate_labels, load_dataset, split_clauses
from .errors import (CheckpointError, ConfigError, DataError, DivergenceError,
                     LexsentError, NumericError)
from .lexicon import load_keyword_lexicon, load_lexicons
from .network import (TrainConfig, distill_clauses, evaluate_two_level,
                      train_level1, train_level2)
from .persist import (load_bundle, load_distilled, load_level1, save_bundle,
                      save_distilled, save_level1)

GRID_EMBEDDING = (100, 150, 200, 250, 300)
GRID_N = (1, 3, 5, 7, 9, 11, 13, 15)


class UsageError(LexsentError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- config resolution -------------------------------------------------------

_CONFIG_FLAGS = [
    ("--embedding-dim", "embedding_dim", int),
    ("--n", "n", int),
    ("--hidden1", "hidden1", int),
    ("--hidden2", "hidden2", int),
    ("--optimizer", "optimizer", str),
    ("--lr", "lr", float),
    ("--epochs", "epochs", int),
    ("--batch-size", "batch_size", int),
    ("--seed", "seed", int),
    ("--mode", "mode", str),
    ("--pooling", "pooling", str),
    ("--rho-init", "rho_init", float),
    ("--early-stop-train-acc", "early_stop_train_acc", float),
]
_CONFIG_BOOLS = [
    ("--keyword", "use_keyword"),
    ("--pos", "use_pos"),
    ("--conjunction", "use_conjunction"),
    ("--conj-in-input", "conj_in_input"),
    ("--collapse-score", "collapse_score"),
    ("--literal-cell", "literal_cell"),
    ("--tanh-candidate", "tanh_candidate"),
]


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with TrainConfig fields")
    for flag, dest, typ in _CONFIG_FLAGS:
        p.add_argument(flag, dest=dest, type=typ, default=None)
    for flag, dest in _CONFIG_BOOLS:
        p.add_argument(flag, dest=dest, default=None,
                       action=argparse.BooleanOptionalAction)


def resolve_config(args) -> TrainConfig:
    merged = TrainConfig().to_dict()
    if getattr(args, "config", None):
        path = Path(args.config)
        if not path.exists():
            raise UsageError(f"config file not found: {args.config}")
        file_values = json.loads(path.read_text(encoding="utf-8"))
        unknown = set(file_values) - set(merged)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        merged.update(file_values)
    for _, dest, _ in _CONFIG_FLAGS:
        value = getattr(args, dest, None)
        if value is not None:
            merged[dest] = value
    for _, dest in _CONFIG_BOOLS:
        value = getattr(args, dest, None)
        if value is not None:
            merged[dest] = value
    return TrainConfig.from_dict(merged)


class MetricsLog:
    """Line-delimited records under a fixed run id; append-only."""

    def __init__(self, out_dir, command: str, config: TrainConfig | None):
        self.path = Path(out_dir) / "metrics.jsonl"
        self.path.parent.mkdir(parents=True, exist_ok=True)
        payload = {"command": command,
                   "config": config.to_dict() if config else None}
        digest = hashlib.sha1(
            json.dumps(payload, sort_keys=True).encode("utf-8")).hexdigest()
        self.run_id = digest[:12]
        self.append(event="config", **payload)

    def append(self, **record) -> None:
        record["run_id"] = self.run_id
        with self.path.open("a", encoding="utf-8") as f:
            f.write(json.dumps(record, sort_keys=True, ensure_ascii=False) + "\n")

    def epochs(self, split: str, history: list[dict]) -> None:
        for h in history:
            self.append(event="epoch", split=split, epoch=h["epoch"],
                        loss=h["loss"], accuracy=h["accuracy"])


def _read_inputs(path) -> list[tuple[str, str]]:
    """(id, text) pairs from a JSONL corpus or a plain text file."""
    p = Path(path)
    if not p.exists():
        raise UsageError(f"input file not found: {path}")
    pairs = []
    for i, line in enumerate(p.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        if line.lstrip().startswith("{"):
            obj = json.loads(line)
            pairs.append((str(obj.get("id", i)), obj["text"]))
        else:
            pairs.append((str(i), line))
    if not pairs:
        raise DataError(f"no input lines in {path}")
    return pairs


def _emit(obj) -> None:
    print(json.dumps(obj, sort_keys=True, ensure_ascii=False))


# -- simple commands -----------------------------------------------------------

def _text_or_file(args) -> list[tuple[str, str]]:
    if args.text is not None:
        return [("text", args.text)]
    if not args.file:
        raise UsageError("provide --text or an input file")
    return _read_inputs(args.file)


def cmd_split(args) -> int:
    for sid, text in _text_or_file(args):
        _emit({"id": sid, "clauses": split_clauses(text)})
    return 0


def cmd_aggregate(args) -> int:
    p = Path(args.file)
    if not p.exists():
        raise UsageError(f"input file not found: {args.file}")
    for i, line in enumerate(p.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        obj = json.loads(line)
        scores = obj.get("annotator_scores")
        if scores is None:
            raise DataError(f"line {i}: record has no annotator_scores")
        label, mean = aggregate_labels(scores)
        _emit({"id": str(obj.get("id", i)), "mean": mean, "label": label})
    return 0


def cmd_stats(args) -> int:
    ds = load_dataset(args.corpus, seed=args.seed)
    counts = ds.class_counts()
    rows = [("", "raw", "clauses")]
    totals = {"raw": 0, "clauses": 0}
    for label in LABELS:
        rows.append((label, str(counts["raw"][label]), str(counts["clauses"][label])))
        totals["raw"] += counts["raw"][label]
        totals["clauses"] += counts["clauses"][label]
    rows.append(("total", str(totals["raw"]), str(totals["clauses"])))
    for name, raw, clauses in rows:
        print(f"{name:<10s} {raw:>8s} {clauses:>8s}")
    if args.dicts:
        lexicons = load_lexicons(args.dicts)
        print("key words:", json.dumps(lexicons.keywords.counts(), sort_keys=True))
        print("pos entries:", len(lexicons.pos))
        print("conjunctions:", len(lexicons.conjunctions))
    return 0


def cmd_lexrule(args) -> int:
    keywords = load_keyword_lexicon(args.dict)
    for sid, text in _read_inputs(args.file):
        r = lex_rule_classify(text, keywords, mode=args.mode)
        _emit({"id": sid, "score": r.score, "label": r.label})
    return 0


# -- pipeline commands ----------------------------------------------------------

def _require(path, hint: str) -> Path:
    p = Path(path)
    if not p.exists():
        raise UsageError(f"{hint} not found: {path}")
    return p


def cmd_train_level1(args) -> int:
    cfg = resolve_config(args)
    _require(args.corpus, "corpus")
    lexicons = load_lexicons(_require(args.dicts, "dictionary directory"))
    ds = load_dataset(args.corpus, seed=cfg.seed)
    train = ds.train(args.view)
    if not train:
        raise DataError(f"view {args.view} has no training samples")
    log = MetricsLog(args.out, "train-level1", cfg)
    if args.grid:
        return _grid_search(args, cfg, ds, lexicons, log)
    model, history = train_level1(train, cfg, lexicons)
    log.epochs("train", history)
    out = Path(args.out) / "level1.json"
    save_level1(out, model)
    log.append(event="checkpoint", path=out.name, samples=len(train))
    print(f"trained level 1 on {len(train)} samples -> {out}")
    return 0


def _grid_search(args, base_cfg, ds, lexicons, log) -> int:
    from .network import evaluate_level1
    cells_e = ([int(x) for x in args.grid_embedding.split(",")]
               if args.grid_embedding else list(GRID_EMBEDDING))
    cells_n = ([int(x) for x in args.grid_n.split(",")]
               if args.grid_n else list(GRID_N))
    train, test = ds.train(args.view), ds.test(args.view)
    if not test:
        raise DataError("grid search needs a nonempty test split")
    best = None
    for e in cells_e:
        for n in cells_n:
            cfg = dataclasses.replace(base_cfg, embedding_dim=e, n=n)
            model, history = train_level1(train, cfg, lexicons)
            acc, _ = evaluate_level1(test, model, lexicons, cfg)
            log.append(event="grid-cell", embedding_dim=e, n=n,
                       accuracy=acc, final_train_loss=history[-1]["loss"])
            print(f"grid cell embedding_dim={e} n={n}: test accuracy {acc:.4f}")
            if best is None or acc > best[0]:
                best = (acc, e, n, model)
    acc, e, n, model = best
    out = Path(args.out) / "level1.json"
    save_level1(out, model)
    log.append(event="grid-best", embedding_dim=e, n=n, accuracy=acc)
    print(f"best cell: embedding_dim={e} n={n} accuracy {acc:.4f} -> {out}")
    return 0


def cmd_distill(args) -> int:
    level1 = load_level1(_require(args.level1, "level-1 checkpoint"))
    lexicons = load_lexicons(_require(args.dicts, "dictionary directory"))
    cfg = level1.config
    ds = load_dataset(_require(args.corpus, "corpus"), seed=cfg.seed)
    samples = ds.train(args.view) if args.split == "train" else (
        ds.test(args.view) if args.split == "test" else ds.view(args.view))
    if not samples:
        raise DataError(f"no samples in view {args.view} split {args.split}")
    sentences = distill_clauses(samples, level1, lexicons, cfg)
    out = Path(args.out) / "distilled.jsonl"
    out.parent.mkdir(parents=True, exist_ok=True)
    save_distilled(out, sentences)
    log = MetricsLog(args.out, "distill", cfg)
    log.append(event="distill", sentences=len(sentences),
               clauses=sum(len(s.clauses) for s in sentences), path=out.name)
    print(f"distilled {len(sentences)} sentences -> {out}")
    return 0


def cmd_train_level2(args) -> int:
    cfg = resolve_config(args)
    distilled = load_distilled(_require(args.distilled, "distilled features"))
    lexicons = load_lexicons(_require(args.dicts, "dictionary directory"))
    level1 = load_level1(_require(args.level1, "level-1 checkpoint"))
    log = MetricsLog(args.out, "train-level2", cfg)
    model, history = train_level2(distilled, cfg, lexicons)
    log.epochs("train", history)
    out_dir = Path(args.out)
    bundle = out_dir / "bundle.json"
    save_bundle(bundle, level1, model)
    save_checkpoint(out_dir / "level2.json", model.parameters(),
                    {"level": "level2", "config": cfg.to_dict(),
                     "gamma_width": model.gamma_width})
    log.append(event="checkpoint", path=bundle.name, sentences=len(distilled))
    print(f"trained level 2 on {len(distilled)} sentences -> {bundle}")
    return 0


def cmd_predict(args) -> int:
    from .network import predict
    lexicons = load_lexicons(_require(args.dicts, "dictionary directory"))
    level1, level2, cfg = load_bundle(_require(args.checkpoint, "checkpoint"),
                                      lexicons)
    for sid, text in _text_or_file(args):
        out = predict(text, level1, level2, lexicons, cfg)
        _emit({"id": sid, **out})
    return 0


def cmd_eval(args) -> int:
    lexicons = load_lexicons(_require(args.dicts, "dictionary directory"))
    level1, level2, cfg = load_bundle(_require(args.checkpoint, "checkpoint"),
                                      lexicons)
    ds = load_dataset(_require(args.corpus, "corpus"), seed=cfg.seed)
    samples = ds.test(args.view) if args.split == "test" else (
        ds.train(args.view) if args.split == "train" else ds.view(args.view))
    if not samples:
        raise DataError(f"no samples in view {args.view} split {args.split}")
    accuracy, confusion = evaluate_two_level(samples, level1, level2, lexicons, cfg)
    log = MetricsLog(args.out, "eval", cfg)
    log.append(event="eval", split=args.split, accuracy=accuracy,
               samples=len(samples), confusion=confusion.tolist())
    print(f"accuracy {accuracy:.4f} on {len(samples)} samples")
    print(f"{'':<10s}" + "".join(f"{lab:>10s}" for lab in LABELS) + "  (predicted)")
    for i, lab in enumerate(LABELS):
        print(f"{lab:<10s}" + "".join(f"{confusion[i, j]:>10d}"
                                      for j in range(len(LABELS))))
    return 0


def cmd_gradcheck(args) -> int:
    ops = args.ops.split(",") if args.ops else None
    reports = gradsuite.run_suite(seeds=args.seeds, sizes=args.sizes,
                                  eps=args.eps, ops=ops, corrupt=args.corrupt)
    failed = [r for r in reports if not r.passed]
    for r in reports:
        status = "PASS" if r.passed else "FAIL"
        print(f"{r.name:<26s} max rel err {r.max_rel_err:.3e} "
              f"({r.cases} cases)  {status}")
    print(f"{len(reports) - len(failed)}/{len(reports)} operations passed "
          f"(tolerance {gradsuite.TOLERANCE:g})")
    return 1 if failed else 0


# -- wiring ---------------------------------------------------------------------

def build_parser() -> _Parser:
    parser = _Parser(prog="lexsent", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("split", help="split text into clauses")
    p.add_argument("file", nargs="?")
    p.add_argument("--text")
    p.set_defaults(fn=cmd_split)

    p = sub.add_parser("aggregate", help="aggregate annotator scores")
    p.add_argument("file")
    p.set_defaults(fn=cmd_aggregate)

    p = sub.add_parser("stats", help="per-class corpus and dictionary counts")
    p.add_argument("--corpus", required=True)
    p.add_argument("--dicts")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_stats)

    p = sub.add_parser("lexrule", help="rule-based baseline scores")
    p.add_argument("--dict", required=True)
    p.add_argument("--mode", default="word", choices=("word", "char"))
    p.add_argument("file")
    p.set_defaults(fn=cmd_lexrule)

    p = sub.add_parser("train-level1", help="train the clause classifier")
    p.add_argument("--corpus", required=True)
    p.add_argument("--dicts", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--view", default="C", choices=("R", "C", "R+C"))
    p.add_argument("--grid", action="store_true",
                   help="sweep embedding_dim x n and keep the best cell")
    p.add_argument("--grid-embedding", help="comma list, default 100..300")
    p.add_argument("--grid-n", help="comma list, default 1,3,..,15")
    _add_config_flags(p)
    p.set_defaults(fn=cmd_train_level1)

    p = sub.add_parser("distill", help="run level 1 over sentence clauses")
    p.add_argument("--corpus", required=True)
    p.add_argument("--level1", required=True)
    p.add_argument("--dicts", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--view", default="R", choices=("R", "C", "R+C"))
    p.add_argument("--split", default="train", choices=("train", "test", "all"))
    p.set_defaults(fn=cmd_distill)

    p = sub.add_parser("train-level2", help="train the sentence classifier")
    p.add_argument("--distilled", required=True)
    p.add_argument("--level1", required=True)
    p.add_argument("--dicts", required=True)
    p.add_argument("--out", required=True)
    _add_config_flags(p)
    p.set_defaults(fn=cmd_train_level2)

    p = sub.add_parser("predict", help="classify text with a trained bundle")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--dicts", required=True)
    p.add_argument("--text")
    p.add_argument("file", nargs="?")
    p.set_defaults(fn=cmd_predict)

    p = sub.add_parser("eval", help="accuracy and confusion on a corpus")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--dicts", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--view", default="R", choices=("R", "C", "R+C"))
    p.add_argument("--split", default="test", choices=("train", "test", "all"))
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("gradcheck", help="finite-difference gradient suite")
    p.add_argument("--seeds", type=int, default=5)
    p.add_argument("--sizes", type=int, default=3)
    p.add_argument("--eps", type=float, default=1e-5)
    p.add_argument("--ops", help="comma list of operations (default: all)")
    p.add_argument("--corrupt", help="test hook: corrupt this op's gradient")
    p.set_defaults(fn=cmd_gradcheck)

    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.fn(args)
    except (UsageError, ConfigError, DataError, CheckpointError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (DivergenceError, NumericError) as e:
        print(f"numeric divergence: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # noqa: BLE001 - anything else is an internal error
        print(f"internal error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
