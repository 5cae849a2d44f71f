"""
Shortest dependency paths between entity heads and seed-relation harvesting.

A candidate pair is turned into a seed when the path between the two entity
heads carries at least one verb and the verb phrase maps onto a relation
type.  The same decision applied to a test instance is the SP+VM baseline.
"""
from __future__ import annotations

import json
from collections import defaultdict, deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import islice
from typing import Iterable

from .corpus import (Corpus, EntityMention, PairKey, RelationSchema, Sentence,
                     candidate_pairs, order_pair, pair_key)
from .embed import MappingConfig, VectorSpace, map_verb

VERB_TAGS = frozenset({"VERB", "AUX"})


@dataclass(frozen=True, slots=True)
class SeedRelation:
    key: PairKey
    rtype: str
    similarity: float
    verbs: tuple[str, ...]
    sid: str
    a_span: tuple[int, int] = (0, 0)
    b_span: tuple[int, int] = (0, 0)

    def to_dict(self) -> dict:
        return {
            "a": self.key.a, "b": self.key.b,
            "atype": self.key.atype, "btype": self.key.btype,
            "rtype": self.rtype, "similarity": self.similarity,
            "verbs": list(self.verbs), "sid": self.sid,
            "a_span": list(self.a_span), "b_span": list(self.b_span),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SeedRelation":
        return cls(PairKey(d["a"], d["b"], d["atype"], d["btype"]), d["rtype"],
                   float(d["similarity"]), tuple(d["verbs"]), d["sid"],
                   tuple(d.get("a_span", (0, 0))), tuple(d.get("b_span", (0, 0))))


@dataclass
class SeedSet:
    seeds: list[SeedRelation] = field(default_factory=list)
    index: dict[PairKey, list[SeedRelation]] = field(default_factory=dict, init=False)
    sites: frozenset = field(default=frozenset(), init=False, repr=False)

    def __post_init__(self):
        index = defaultdict(list)
        for sd in self.seeds:
            index[sd.key].append(sd)
        self.index = dict(index)
        self.sites = frozenset((sd.sid, sd.a_span, sd.b_span) for sd in self.seeds)

    def __len__(self):
        return len(self.seeds)

    def __iter__(self):
        return iter(self.seeds)

    def for_key(self, key: PairKey) -> list[SeedRelation]:
        return self.index.get(key, [])

    def counts(self) -> dict[str, int]:
        out = defaultdict(int)
        for sd in self.seeds:
            out[sd.rtype] += 1
        return dict(out)

    def summary(self, relations=None) -> str:
        counts = self.counts()
        order = list(relations) if relations else sorted(counts)
        parts = ", ".join(f"{r}: {counts.get(r, 0)}" for r in order)
        return f"seeds: {len(self)} ({parts})"


def save_seeds(seeds: SeedSet, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for sd in seeds:
            f.write(json.dumps(sd.to_dict(), ensure_ascii=False, separators=(",", ":")))
            f.write("\n")


def load_seeds(path) -> SeedSet:
    seeds = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                seeds.append(SeedRelation.from_dict(json.loads(line)))
            except (KeyError, TypeError, ValueError) as e:
                raise ValueError(f"{path}: line {lineno}: bad seed record ({e})") from None
    return SeedSet(seeds)


# --- paths ---------------------------------------------------------------

def entity_head(s: Sentence, m: EntityMention) -> int:
    """Span root: the leftmost span token whose head lies outside the span."""
    for i in range(m.start, m.end + 1):
        h = s.tokens[i - 1].head
        if h < m.start or h > m.end:
            return i
    return m.start


def _adjacency(s: Sentence) -> list[list[int]]:
    adj = [[] for _ in range(len(s.tokens) + 1)]
    for t in s.tokens:
        if t.head:
            adj[t.index].append(t.head)
            adj[t.head].append(t.index)
    return adj


def shortest_path(s: Sentence, i: int, j: int) -> list[int]:
    """Token indices from ``i`` to ``j`` over the undirected dependency tree."""
    n = len(s.tokens)
    if not (1 <= i <= n and 1 <= j <= n):
        raise ValueError(f"sentence {s.sid!r}: endpoint out of range ({i}, {j})")
    if i == j:
        raise ValueError(f"sentence {s.sid!r}: path endpoints are identical ({i})")
    adj = _adjacency(s)
    prev = [0] * (n + 1)
    prev[i] = i
    queue = deque([i])
    while queue:
        u = queue.popleft()
        if u == j:
            break
        for v in adj[u]:
            if not prev[v]:
                prev[v] = u
                queue.append(v)
    if not prev[j]:
        raise ValueError(f"sentence {s.sid!r}: tokens {i} and {j} are disconnected")
    path = [j]
    while path[-1] != i:
        path.append(prev[path[-1]])
    path.reverse()
    return path


def path_verbs(s: Sentence, path: list[int]) -> list[str]:
    """Lemmas of VERB/AUX tokens strictly inside the path, in sentence order."""
    inner = sorted(path[1:-1])
    return [s.tokens[k - 1].lemma for k in inner if s.tokens[k - 1].upos in VERB_TAGS]


def extract_seed(s: Sentence, a: EntityMention, b: EntityMention, schema: RelationSchema,
                 cfg: MappingConfig, space: VectorSpace) -> SeedRelation | None:
    a, b = order_pair(a, b, schema)
    ha, hb = entity_head(s, a), entity_head(s, b)
    if ha == hb:
        return None
    verbs = path_verbs(s, shortest_path(s, ha, hb))
    if not verbs:
        return None
    mapped = map_verb(verbs, cfg, space)
    if mapped is None:
        return None
    rtype, sim = mapped
    return SeedRelation(pair_key(s, a, b, schema), rtype, sim, tuple(verbs), s.sid,
                        a.span, b.span)


def sentence_seeds(s: Sentence, schema: RelationSchema, cfg: MappingConfig,
                   space: VectorSpace) -> list[SeedRelation]:
    out = []
    for a, b in candidate_pairs(s, schema):
        sd = extract_seed(s, a, b, schema, cfg, space)
        if sd is not None:
            out.append(sd)
    return out


_WORKER = {}


def _init_worker(schema, cfg, space):
    _WORKER.update(schema=schema, cfg=cfg, space=space)


def _harvest_chunk(sentences):
    w = _WORKER
    return [sd for s in sentences for sd in sentence_seeds(s, w["schema"], w["cfg"], w["space"])]


def _chunks(items, size):
    it = iter(items)
    while True:
        block = list(islice(it, size))
        if not block:
            return
        yield block


def harvest_seeds(corpus: Corpus | Iterable[Sentence], schema: RelationSchema,
                  cfg: MappingConfig, space: VectorSpace, workers: int = 1,
                  chunk: int = 2000) -> SeedSet:
    """Run seed extraction over every typed candidate pair of the corpus.

    ``corpus`` may be a stream of sentences.  Output follows corpus order
    whatever the number of workers.
    """
    cfg.check(space)
    if workers <= 1:
        return SeedSet([sd for s in corpus for sd in sentence_seeds(s, schema, cfg, space)])
    with ProcessPoolExecutor(workers, initializer=_init_worker,
                             initargs=(schema, cfg, space)) as pool:
        parts = pool.map(_harvest_chunk, _chunks(corpus, chunk))
        return SeedSet([sd for part in parts for sd in part])
