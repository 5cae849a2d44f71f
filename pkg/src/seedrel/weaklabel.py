"""Distant annotation of a corpus from a seed set, and the dataset file format."""
from __future__ import annotations

import hashlib
import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .corpus import (Corpus, PairKey, RelationSchema, Sentence, candidate_pairs,
                     mask_sentence, pair_key)
from .pathex import SeedSet

NULL = "Null"
SOURCES = ("seed", "distant", "negative", "gold")

__all__ = ["NULL", "Instance", "WeakDataset", "annotate", "candidate_pairs",
           "export_dataset", "import_dataset", "instance_id", "iter_annotate",
           "iter_dataset", "resolve_pair_label"]


def instance_id(sid: str, key: PairKey, a_span, b_span) -> str:
    # spans are part of the identity: one sentence may mention the same pair twice
    raw = "\t".join([sid, key.a, key.b, key.atype, key.btype,
                     f"{a_span[0]}-{a_span[1]}", f"{b_span[0]}-{b_span[1]}"])
    return hashlib.sha1(raw.encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True, slots=True)
class Instance:
    iid: str
    sid: str
    key: PairKey
    masked_text: str
    label: str | None
    source: str
    a_span: tuple[int, int]
    b_span: tuple[int, int]

    def __post_init__(self):
        if self.source not in SOURCES:
            raise ValueError(f"unknown instance source {self.source!r}")

    def to_dict(self) -> dict:
        return {
            "iid": self.iid, "sid": self.sid,
            "a": self.key.a, "b": self.key.b, "atype": self.key.atype, "btype": self.key.btype,
            "a_span": list(self.a_span), "b_span": list(self.b_span),
            "masked_text": self.masked_text, "label": self.label, "source": self.source,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Instance":
        return cls(d["iid"], d["sid"], PairKey(d["a"], d["b"], d["atype"], d["btype"]),
                   d["masked_text"], d["label"], d["source"],
                   tuple(d["a_span"]), tuple(d["b_span"]))


@dataclass
class WeakDataset:
    instances: list[Instance] = field(default_factory=list)

    def __len__(self):
        return len(self.instances)

    def __iter__(self):
        return iter(self.instances)

    @property
    def class_counts(self) -> dict[str, int]:
        return dict(Counter(NULL if i.label is None else i.label for i in self.instances))

    def labels(self) -> list[str | None]:
        return [i.label for i in self.instances]

    def by_iid(self) -> dict[str, Instance]:
        return {i.iid: i for i in self.instances}

    def summary(self, relations: Sequence[str]) -> str:
        """Counts as ``total(pos_rel1 pos_rel2 ...)``."""
        counts = self.class_counts
        return f"{len(self)}({' '.join(str(counts.get(r, 0)) for r in relations)})"


def resolve_pair_label(seeds: SeedSet, key: PairKey,
                       relations: Sequence[str] | None = None) -> str | None:
    """Majority seed type for a pair; ties by max similarity, then relation order."""
    group = seeds.for_key(key)
    if not group:
        return None
    count = Counter(sd.rtype for sd in group)
    best_sim = {}
    for sd in group:
        best_sim[sd.rtype] = max(best_sim.get(sd.rtype, -1.0), sd.similarity)
    order = list(relations) if relations else []
    rank = {r: k for k, r in enumerate(order)}

    def sort_key(r):
        return (-count[r], -best_sim[r], rank.get(r, len(order)), r)

    return min(count, key=sort_key)


def seed_labels(seeds: SeedSet, relations: Sequence[str] | None = None) -> dict[PairKey, str]:
    """Resolved label of every seeded pair; unseeded pairs are Null by definition."""
    return {key: resolve_pair_label(seeds, key, relations) for key in seeds.index}


def sentence_instances(s: Sentence, seeds: SeedSet, schema: RelationSchema,
                       labels: dict | None = None) -> list[Instance]:
    labels = seed_labels(seeds, schema.relations) if labels is None else labels
    out = []
    for a, b in candidate_pairs(s, schema):
        key = pair_key(s, a, b, schema)
        label = labels.get(key)
        if label is None:
            source = "negative"
        elif (s.sid, a.span, b.span) in seeds.sites:
            source = "seed"
        else:
            source = "distant"
        out.append(Instance(instance_id(s.sid, key, a.span, b.span), s.sid, key,
                            mask_sentence(s, (a, b)), label, source, a.span, b.span))
    return out


def iter_annotate(corpus: Corpus | Iterable[Sentence], seeds: SeedSet,
                  schema: RelationSchema) -> Iterator[Instance]:
    """Lazy form of :func:`annotate`; memory stays bounded by the seed set."""
    labels = seed_labels(seeds, schema.relations)
    for s in corpus:
        yield from sentence_instances(s, seeds, schema, labels)


def annotate(corpus: Corpus | Iterable[Sentence], seeds: SeedSet,
             schema: RelationSchema) -> WeakDataset:
    """Label every typed co-occurrence: resolved seed label if the pair was seeded, else Null.

    Instances at the very site a seed was extracted from are tagged ``seed``.
    """
    return WeakDataset(list(iter_annotate(corpus, seeds, schema)))


def gold_instances(s: Sentence, labels: dict, schema: RelationSchema) -> list[Instance]:
    """Instances for a sentence with gold labels keyed by ``(a_span, b_span)``."""
    out = []
    for a, b in candidate_pairs(s, schema):
        key = pair_key(s, a, b, schema)
        label = labels.get((a.span, b.span))
        out.append(Instance(instance_id(s.sid, key, a.span, b.span), s.sid, key,
                            mask_sentence(s, (a, b)), label, "gold", a.span, b.span))
    return out


def dumps_instance(inst: Instance) -> str:
    return json.dumps(inst.to_dict(), ensure_ascii=False, separators=(",", ":"))


def export_dataset(d: WeakDataset | Iterable[Instance], path) -> int:
    """Write one instance per line; accepts a dataset or any instance stream."""
    n = 0
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for inst in d:
            f.write(dumps_instance(inst))
            f.write("\n")
            n += 1
    return n


def iter_dataset(path) -> Iterator[Instance]:
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                yield Instance.from_dict(json.loads(line))
            except (KeyError, TypeError, ValueError) as e:
                raise ValueError(f"{path}: line {lineno}: bad instance record ({e})") from None


def import_dataset(path) -> WeakDataset:
    return WeakDataset(list(iter_dataset(path)))
