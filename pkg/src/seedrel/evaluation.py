"""Precision/recall/F1, the two unsupervised baselines and comparison reports."""
from __future__ import annotations

import hashlib
import json
import statistics
from dataclasses import asdict, dataclass, field
from typing import Mapping, Sequence

from .corpus import Corpus, RelationSchema
from .embed import MappingConfig, VectorSpace
from .pathex import extract_seed

# iid -> {relation type: probability}
Predictions = Mapping[str, Mapping[str, float]]


@dataclass(frozen=True)
class Metrics:
    precision: float
    recall: float
    f1: float
    tp: int = 0
    fp: int = 0
    fn: int = 0

    def as_percent(self) -> tuple[float, float, float]:
        return (100 * self.precision, 100 * self.recall, 100 * self.f1)


def f1_score(p: float, r: float) -> float:
    return 2 * p * r / (p + r) if p + r > 0 else 0.0


def prf1(tp: int, fp: int, fn: int) -> Metrics:
    if min(tp, fp, fn) < 0:
        raise ValueError("confusion counts must be non-negative")
    p = tp / (tp + fp) if tp + fp else 0.0
    r = tp / (tp + fn) if tp + fn else 0.0
    return Metrics(p, r, f1_score(p, r), tp, fp, fn)


def cooccurrence_baseline(gold, relations: Sequence[str]) -> dict[str, dict[str, float]]:
    """Every typed co-occurrence is predicted positive for every relation type."""
    return {inst.iid: {r: 1.0 for r in relations} for inst in gold}


def spvm_baseline(corpus: Corpus, gold, schema: RelationSchema, cfg: MappingConfig,
                  space: VectorSpace) -> dict[str, dict[str, float]]:
    """Positive for a type iff path-verb mapping yields that type for the instance."""
    missing = []
    preds = {}
    for inst in gold:
        if inst.sid not in corpus:
            missing.append(inst.iid)
            continue
        s = corpus[inst.sid]
        a = s.find_mention(inst.a_span, inst.key.atype)
        b = s.find_mention(inst.b_span, inst.key.btype)
        if a is None or b is None:
            missing.append(inst.iid)
            continue
        seed = extract_seed(s, a, b, schema, cfg, space)
        hit = seed.rtype if seed is not None else None
        preds[inst.iid] = {r: float(r == hit) for r in schema.relations}
    if missing:
        raise KeyError(f"{len(missing)} gold instances not resolvable in corpus: {missing[:20]}")
    return preds


def confusion(preds: Predictions, gold: Mapping[str, str | None], rtype: str,
              p_threshold: float = 0.5) -> tuple[int, int, int]:
    tp = fp = fn = 0
    for iid, label in gold.items():
        predicted = preds[iid].get(rtype, 0.0) >= p_threshold
        actual = label == rtype
        if predicted and actual:
            tp += 1
        elif predicted:
            fp += 1
        elif actual:
            fn += 1
    return tp, fp, fn


MICRO = "micro"


@dataclass
class Report:
    method: str
    relations: list[str]
    metrics: dict[str, Metrics]
    runs: list[dict[str, Metrics]] = field(default_factory=list)
    variance: dict[str, dict[str, float]] = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "relations": list(self.relations),
            "metrics": {k: asdict(m) for k, m in self.metrics.items()},
            "runs": [{k: asdict(m) for k, m in run.items()} for run in self.runs],
            "variance": self.variance,
            "meta": self.meta,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1) + "\n"


def _mean_metrics(runs: list[Metrics]) -> Metrics:
    if len(runs) == 1:
        return runs[0]
    mean = statistics.fmean
    return Metrics(mean(m.precision for m in runs), mean(m.recall for m in runs),
                   mean(m.f1 for m in runs), round(mean(m.tp for m in runs)),
                   round(mean(m.fp for m in runs)), round(mean(m.fn for m in runs)))


def evaluate(preds: Predictions | Sequence[Predictions], gold, relations: Sequence[str],
             p_threshold: float = 0.5, method: str = "model",
             seeds: Sequence[int] | None = None) -> Report:
    """Per-relation metrics (binary, type vs rest) plus their micro average.

    ``preds`` may be a list of runs; metrics are then averaged over runs and
    their population variance is reported alongside.
    """
    gold_labels = gold if isinstance(gold, Mapping) else {i.iid: i.label for i in gold}
    runs_in = [preds] if isinstance(preds, Mapping) else list(preds)
    if not runs_in:
        raise ValueError("no prediction runs")
    per_run = []
    for run in runs_in:
        extra = set(run) - set(gold_labels)
        absent = set(gold_labels) - set(run)
        if extra or absent:
            raise KeyError(f"prediction ids do not match gold: {len(absent)} missing, "
                           f"{len(extra)} unexpected (e.g. {sorted(absent | extra)[:5]})")
        metrics = {}
        totals = [0, 0, 0]
        for r in relations:
            counts = confusion(run, gold_labels, r, p_threshold)
            metrics[r] = prf1(*counts)
            totals = [t + c for t, c in zip(totals, counts)]
        metrics[MICRO] = prf1(*totals)
        per_run.append(metrics)
    keys = list(relations) + [MICRO]
    mean = {k: _mean_metrics([run[k] for run in per_run]) for k in keys}
    variance = {}
    if len(per_run) > 1:
        for k in keys:
            variance[k] = {name: statistics.pvariance([getattr(run[k], name) for run in per_run])
                           for name in ("precision", "recall", "f1")}
    meta = {"p_threshold": p_threshold, "n_runs": len(per_run), "n_gold": len(gold_labels)}
    if seeds is not None:
        meta["seeds"] = list(seeds)
    return Report(method, list(relations), mean, per_run if len(per_run) > 1 else [], variance, meta)


def digest_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()[:16]


def digest_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()[:16]


def format_table(reports: Sequence[Report], keys: Sequence[str] | None = None) -> str:
    """Aligned text table: Method, Relation, Precision, Recall, F1 (percent)."""
    rows = [("Method", "Relation", "Precision", "Recall", "F1")]
    for rep in reports:
        for k in keys or (list(rep.relations) + [MICRO]):
            p, r, f = rep.metrics[k].as_percent()
            rows.append((rep.method, k, f"{p:.1f}", f"{r:.1f}", f"{f:.1f}"))
    widths = [max(len(row[c]) for row in rows) for c in range(5)]
    lines = []
    for n, row in enumerate(rows):
        cells = [row[0].ljust(widths[0]), row[1].ljust(widths[1])]
        cells += [row[c].rjust(widths[c]) for c in range(2, 5)]
        lines.append("  ".join(cells).rstrip())
        if n == 0:
            lines.append("-" * len(lines[0]))
    return "\n".join(lines) + "\n"
