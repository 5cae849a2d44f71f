"""
Command-line frontend.

    seedrel seed-extract --config run.json
    seedrel annotate     --config run.json
    seedrel train        --config run.json
    seedrel predict      --config run.json --dataset gold.jsonl
    seedrel evaluate     --config run.json --baseline spvm
    seedrel convert      --conllu in.conllu --entities in.tsv --out corpus.jsonl
    seedrel synth        --out synth/

Exit status: 0 success, 1 degenerate pipeline state, 2 usage/config/IO error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from collections import Counter
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, PipelineConfig, load_config
from .convert import convert
from .corpus import CorpusError, iter_corpus, load_corpus
from .embed import VectorError, load_vectors
from .evaluation import (cooccurrence_baseline, digest_file, evaluate, format_table,
                         spvm_baseline)
from .model import (DegenerateClassError, FeatureError, TrainingDiverged, align, decide,
                    featurize_dataset, featurize_stream, load_ensembles, n_features,
                    save_ensemble, train_ensemble)
from .pathex import harvest_seeds, load_seeds, save_seeds
from .synth import SynthConfig, generate, write_synth
from .weaklabel import NULL, export_dataset, import_dataset, iter_annotate, iter_dataset

log = logging.getLogger("seedrel")

EXIT_OK, EXIT_DEGENERATE, EXIT_USAGE = 0, 1, 2


class Degenerate(Exception):
    pass


def _ensure_dir(path: Path) -> Path:
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise OSError(f"cannot create output directory {path}: {e.strerror}") from None
    return path


def _write_lines(path: Path, records) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for rec in records:
            f.write(json.dumps(rec, sort_keys=True, separators=(",", ":")))
            f.write("\n")


def _meta(cfg: PipelineConfig, **extra) -> dict:
    meta = {"seed": cfg.seed, "config_digest": cfg.digest(), "version": __version__}
    meta.update(extra)
    return meta


# --- commands ----------------------------------------------------------------

def cmd_seed_extract(cfg: PipelineConfig, args) -> int:
    cfg.require("corpus", "vectors")
    out = _ensure_dir(cfg.output)
    space = load_vectors(cfg.vectors)
    seeds = harvest_seeds(iter_corpus(cfg.corpus), cfg.schema, cfg.mapping(), space,
                          workers=cfg.workers)
    path = Path(args.seeds) if args.seeds else out / "seeds.jsonl"
    save_seeds(seeds, path)
    print(seeds.summary(cfg.schema.relations))
    return EXIT_OK


def cmd_annotate(cfg: PipelineConfig, args) -> int:
    cfg.require("corpus")
    out = _ensure_dir(cfg.output)
    seeds_path = Path(args.seeds) if args.seeds else out / "seeds.jsonl"
    if not seeds_path.exists():
        raise ConfigError(f"seeds file not found: {seeds_path}")
    seeds = load_seeds(seeds_path)
    if len(seeds) == 0:
        if args.strict:
            raise Degenerate("no seeds found; refusing to annotate an all-Null dataset (--strict)")
        log.warning("empty seed set: every instance will be labelled Null")
    counts = Counter()

    def tally(instances):
        for inst in instances:
            counts[inst.label or NULL] += 1
            yield inst

    path = Path(args.dataset) if args.dataset else out / "dataset.jsonl"
    total = export_dataset(tally(iter_annotate(iter_corpus(cfg.corpus), seeds, cfg.schema)), path)
    relations = cfg.schema.relations
    pos = " ".join(str(counts[r]) for r in relations)
    detail = ", ".join(f"{r}: {counts[r]}" for r in relations)
    print(f"instances: {total}({pos}) [{detail}, {NULL}: {counts[NULL]}]")
    return EXIT_OK


def _count_lines(path) -> int:
    with open(path, "rb") as f:
        return sum(1 for line in f if line.strip())


def _feature_matrix(dataset_path: Path, corpus_path: Path, space, scratch: Path):
    """Featurize a dataset file into a float32 memory map; returns (X, labels).

    Instances written by ``annotate`` follow corpus order and are streamed
    against the corpus; any other order falls back to loading the corpus.
    """
    n = _count_lines(dataset_path)
    X = np.lib.format.open_memmap(scratch, mode="w+", dtype=np.float32,
                                  shape=(n, n_features(space.dim)))
    try:
        labels = featurize_stream(align(iter_dataset(dataset_path), iter_corpus(corpus_path)),
                                  space, X)
    except FeatureError:
        log.info("dataset not in corpus order; loading corpus for random access")
        corpus = load_corpus(corpus_path)
        labels = featurize_stream(((i, _sentence(corpus, i)) for i in iter_dataset(dataset_path)),
                                  space, X)
    X.flush()
    return X, labels


def _sentence(corpus, inst):
    if inst.sid not in corpus:
        raise FeatureError(f"instance {inst.iid}: sentence {inst.sid!r} not in corpus")
    return corpus[inst.sid]


def cmd_train(cfg: PipelineConfig, args) -> int:
    cfg.require("corpus", "vectors")
    out = _ensure_dir(cfg.output)
    data_path = Path(args.dataset) if args.dataset else out / "dataset.jsonl"
    if not data_path.exists():
        raise ConfigError(f"dataset file not found: {data_path}")
    space = load_vectors(cfg.vectors)
    h = cfg.hyper()
    models_dir = Path(args.models) if args.models else out / "models"
    scratch = out / ".features.npy"
    log_records = []
    try:
        X, labels = _feature_matrix(data_path, cfg.corpus, space, scratch)
        for rtype in cfg.schema.relations:
            ens = train_ensemble(labels, rtype, h, X)
            save_ensemble(ens, models_dir)
            for i, m in enumerate(ens.members):
                for entry in m.history:
                    log_records.append({"rtype": rtype, "member": i, **entry})
            log.info("trained %s: %d members", rtype, len(ens.members))
        del X
    finally:
        scratch.unlink(missing_ok=True)
    _write_lines(out / "train_log.jsonl", log_records)
    print(f"models: {len(cfg.schema.relations)} relation types x {h.bags} members -> {models_dir}")
    return EXIT_OK


def _gold_inputs(cfg: PipelineConfig, args):
    gold_path = Path(args.gold) if getattr(args, "gold", None) else cfg.gold
    if gold_path is None:
        raise ConfigError("no gold dataset given (--gold or config 'gold')")
    if not gold_path.exists():
        raise ConfigError(f"gold file not found: {gold_path}")
    corpus_path = cfg.gold_corpus or cfg.corpus
    if corpus_path is None or not Path(corpus_path).exists():
        raise ConfigError(f"gold corpus file not found: {corpus_path}")
    return gold_path, import_dataset(gold_path), load_corpus(corpus_path)


def _model_predictions(models_dir, dataset, corpus, space, relations):
    ensembles = load_ensembles(models_dir, relations)
    X = featurize_dataset(dataset.instances, corpus, space, dtype=np.float32)
    probs = {r: e.proba(X) for r, e in ensembles.items()}
    return {inst.iid: {r: float(probs[r][k]) for r in ensembles}
            for k, inst in enumerate(dataset.instances)}


def cmd_predict(cfg: PipelineConfig, args) -> int:
    cfg.require("vectors")
    out = _ensure_dir(cfg.output)
    data_path = Path(args.dataset)
    if not data_path.exists():
        raise ConfigError(f"dataset file not found: {data_path}")
    dataset = import_dataset(data_path)
    corpus_path = cfg.gold_corpus or cfg.corpus
    if corpus_path is None or not Path(corpus_path).exists():
        raise ConfigError(f"corpus file not found: {corpus_path}")
    corpus = load_corpus(corpus_path)
    space = load_vectors(cfg.vectors)
    models_dir = Path(args.models) if args.models else out / "models"
    preds = _model_predictions(models_dir, dataset, corpus, space, cfg.schema.relations)
    path = Path(args.out) if args.out else out / "predictions.jsonl"
    _write_lines(path, ({"iid": iid, "probs": p,
                         "label": decide(p, cfg.schema.relations, cfg.p_threshold)}
                        for iid, p in preds.items()))
    print(f"predictions: {len(preds)} -> {path}")
    return EXIT_OK


def read_predictions(path) -> dict:
    preds = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if line.strip():
                try:
                    rec = json.loads(line)
                    preds[rec["iid"]] = {k: float(v) for k, v in rec["probs"].items()}
                except (KeyError, TypeError, ValueError, AttributeError):
                    raise ValueError(f"{path}: line {lineno}: bad prediction record") from None
    return preds


def cmd_evaluate(cfg: PipelineConfig, args) -> int:
    out = _ensure_dir(cfg.output)
    gold_path, gold, corpus = _gold_inputs(cfg, args)
    relations = cfg.schema.relations
    if args.baseline == "cooccurrence":
        runs, method = [cooccurrence_baseline(gold, relations)], "Co-occurrences"
    elif args.baseline == "spvm":
        cfg.require("vectors")
        space = load_vectors(cfg.vectors)
        runs = [spvm_baseline(corpus, gold, cfg.schema, cfg.mapping(), space)]
        method = "SP+VM"
    elif args.models:
        cfg.require("vectors")
        space = load_vectors(cfg.vectors)
        runs = [_model_predictions(m, gold, corpus, space, relations) for m in args.models]
        method = "Ensemble"
    elif args.predictions:
        runs = [read_predictions(p) for p in args.predictions]
        method = "Imported"
    else:
        models_dir = out / "models"
        if not models_dir.exists():
            raise ConfigError("nothing to evaluate: give --baseline, --models or --predictions")
        cfg.require("vectors")
        space = load_vectors(cfg.vectors)
        runs = [_model_predictions(models_dir, gold, corpus, space, relations)]
        method = "Ensemble"
    if args.name:
        method = args.name
    report = evaluate(runs, gold, relations, cfg.p_threshold, method=method)
    report.meta.update(_meta(cfg, dataset_digest=digest_file(gold_path)))
    stem = args.report or f"report_{method.lower().replace('+', '').replace(' ', '_')}"
    (out / f"{stem}.json").write_text(report.dumps(), encoding="utf-8")
    table = format_table([report])
    (out / f"{stem}.txt").write_text(table, encoding="utf-8")
    print(table, end="")
    return EXIT_OK


def cmd_convert(cfg, args) -> int:
    for p in (args.conllu, args.entities):
        if p is not None and not Path(p).exists():
            raise ConfigError(f"input file not found: {p}")
    n = convert(args.conllu, args.entities, args.out)
    print(f"converted {n} sentences -> {args.out}")
    return EXIT_OK


def cmd_synth(cfg, args) -> int:
    scfg = SynthConfig(n_sentences=args.sentences, positive_rate=args.positive_rate,
                       seed=args.synth_seed, heldout=args.heldout, dim=args.dim)
    data = generate(scfg)
    paths = write_synth(data, _ensure_dir(Path(args.out)), scfg)
    print(f"synthetic corpus: {len(data.train)} train / {len(data.test)} held-out sentences; "
          f"config -> {paths['config']}")
    return EXIT_OK


# --- parser ------------------------------------------------------------------

def _pipeline_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("pipeline")
    g.add_argument("--config", help="JSON pipeline config")
    g.add_argument("--corpus")
    g.add_argument("--vectors")
    g.add_argument("--output")
    g.add_argument("--seed", type=int)
    g.add_argument("--threshold", type=float, help="verb-mapping similarity threshold")
    g.add_argument("--bags", type=int)
    g.add_argument("--epochs", type=int)
    g.add_argument("--batch-size", type=int)
    g.add_argument("--learning-rate", type=float)
    g.add_argument("--p-threshold", type=float)
    g.add_argument("--workers", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="seedrel", description=__doc__.split("\n\n")[0].strip())
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("seed-extract", help="harvest seed relations from path verbs")
    _pipeline_flags(p)
    p.add_argument("--seeds", help="seed file to write (default OUTPUT/seeds.jsonl)")
    p.set_defaults(func=cmd_seed_extract)

    p = sub.add_parser("annotate", help="distantly label every co-occurrence from the seeds")
    _pipeline_flags(p)
    p.add_argument("--seeds")
    p.add_argument("--dataset", help="dataset file to write (default OUTPUT/dataset.jsonl)")
    p.add_argument("--strict", action="store_true", help="exit 1 when the seed set is empty")
    p.set_defaults(func=cmd_annotate)

    p = sub.add_parser("train", help="train one balanced-bagging ensemble per relation type")
    _pipeline_flags(p)
    p.add_argument("--dataset")
    p.add_argument("--models")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="score a dataset with trained ensembles")
    _pipeline_flags(p)
    p.add_argument("--dataset", required=True)
    p.add_argument("--gold-corpus", help="corpus holding the dataset's sentences")
    p.add_argument("--models")
    p.add_argument("--out")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="precision/recall/F1 against a gold dataset")
    _pipeline_flags(p)
    p.add_argument("--gold")
    p.add_argument("--gold-corpus")
    what = p.add_mutually_exclusive_group()
    what.add_argument("--baseline", choices=("cooccurrence", "spvm"))
    what.add_argument("--models", nargs="+", help="one model directory per run")
    what.add_argument("--predictions", nargs="+", help="one predictions file per run")
    p.add_argument("--name", help="method name in the report")
    p.add_argument("--report", help="report file stem inside OUTPUT")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("convert", help="CoNLL-U + standoff entities -> corpus format")
    p.add_argument("--conllu", required=True)
    p.add_argument("--entities")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_convert, no_config=True)

    p = sub.add_parser("synth", help="generate the synthetic benchmark corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--sentences", type=int, default=5000)
    p.add_argument("--positive-rate", type=float, default=0.3)
    p.add_argument("--heldout", type=float, default=0.2)
    p.add_argument("--dim", type=int, default=32)
    p.add_argument("--synth-seed", type=int, default=0)
    p.set_defaults(func=cmd_synth, no_config=True)
    return parser


def _config_from_args(args) -> PipelineConfig:
    overrides = {k: getattr(args, k, None) for k in
                 ("corpus", "vectors", "output", "seed", "threshold", "bags", "epochs",
                  "batch_size", "learning_rate", "p_threshold", "workers", "gold_corpus")}
    return load_config(args.config, overrides)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        cfg = None if getattr(args, "no_config", False) else _config_from_args(args)
        return args.func(cfg, args)
    except Degenerate as e:
        print(f"seedrel: {e}", file=sys.stderr)
        return EXIT_DEGENERATE
    except DegenerateClassError as e:
        print(f"seedrel: {e}", file=sys.stderr)
        return EXIT_DEGENERATE
    except TrainingDiverged as e:
        print(f"seedrel: training diverged: {e}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (ConfigError, CorpusError, VectorError, OSError, KeyError, ValueError) as e:
        msg = e.args[0] if isinstance(e, KeyError) and e.args else e
        print(f"seedrel: {msg}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
