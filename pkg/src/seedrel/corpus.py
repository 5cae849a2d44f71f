"""
Sentence/entity data model and the line-delimited corpus format.

Each line of a corpus file is one JSON object:

    {"sid": "s1",
     "tokens": [{"form": "Aspirin", "lemma": "aspirin", "upos": "PROPN",
                 "head": 2, "deprel": "nsubj"}, ...],
     "entities": [{"start": 1, "end": 1, "etype": "COMPOUND", "cid": "C001"}, ...]}

Token indices are 1-based and inclusive on both ends of an entity span;
``head == 0`` marks the root.  ``cid`` is optional.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator


class CorpusError(ValueError):
    """Malformed corpus record or broken sentence invariant."""


@dataclass(frozen=True, slots=True)
class Token:
    index: int
    form: str
    lemma: str
    upos: str
    head: int
    deprel: str


@dataclass(frozen=True, slots=True)
class EntityMention:
    start: int
    end: int
    etype: str
    cid: str | None = None

    @property
    def span(self) -> tuple[int, int]:
        return (self.start, self.end)

    def __len__(self) -> int:
        return self.end - self.start + 1

    def overlaps(self, other: "EntityMention") -> bool:
        return self.start <= other.end and other.start <= self.end


@dataclass(frozen=True, slots=True)
class Sentence:
    sid: str
    tokens: tuple[Token, ...]
    entities: tuple[EntityMention, ...] = ()

    def __post_init__(self):
        check_sentence(self)

    def __len__(self) -> int:
        return len(self.tokens)

    def token(self, index: int) -> Token:
        return self.tokens[index - 1]

    def find_mention(self, span: tuple[int, int], etype: str | None = None) -> EntityMention | None:
        for m in self.entities:
            if m.span == tuple(span) and (etype is None or m.etype == etype):
                return m
        return None


@dataclass(frozen=True)
class Corpus:
    sentences: tuple[Sentence, ...] = ()
    _by_sid: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        index = {}
        for s in self.sentences:
            if s.sid in index:
                raise CorpusError(f"duplicate sentence id {s.sid!r}")
            index[s.sid] = s
        object.__setattr__(self, "_by_sid", index)

    def __len__(self) -> int:
        return len(self.sentences)

    def __iter__(self) -> Iterator[Sentence]:
        return iter(self.sentences)

    def __getitem__(self, sid: str) -> Sentence:
        return self._by_sid[sid]

    def __contains__(self, sid: str) -> bool:
        return sid in self._by_sid


@dataclass(frozen=True)
class RelationSchema:
    """Typed entity pair plus the ordered relation-type names.

    ``atype`` fills slot A (e.g. COMPOUND) and ``btype`` slot B (e.g. DISEASE).
    """
    atype: str
    btype: str
    relations: tuple[str, ...]

    def __post_init__(self):
        if not self.atype or not self.btype:
            raise ValueError("schema entity types must be non-empty")
        if self.atype == self.btype:
            raise ValueError("schema entity types must differ so placeholders are unambiguous")
        if not self.relations:
            raise ValueError("schema needs at least one relation type")
        if len(set(self.relations)) != len(self.relations):
            raise ValueError("duplicate relation type in schema")
        object.__setattr__(self, "relations", tuple(self.relations))

    def matches(self, a: EntityMention, b: EntityMention) -> bool:
        return {a.etype, b.etype} == {self.atype, self.btype}

    def to_dict(self) -> dict:
        return {"atype": self.atype, "btype": self.btype, "relations": list(self.relations)}

    @classmethod
    def from_dict(cls, d: dict) -> "RelationSchema":
        return cls(d["atype"], d["btype"], tuple(d["relations"]))


@dataclass(frozen=True, order=True, slots=True)
class PairKey:
    a: str
    b: str
    atype: str
    btype: str

    def __post_init__(self):
        if not self.a or not self.b:
            raise ValueError("pair key entities must be non-empty")


def check_sentence(s: Sentence) -> None:
    n = len(s.tokens)
    if n == 0:
        raise CorpusError(f"sentence {s.sid!r}: no tokens")
    roots = 0
    for i, t in enumerate(s.tokens, start=1):
        if t.index != i:
            raise CorpusError(f"sentence {s.sid!r}: token {i} has index {t.index}")
        if not 0 <= t.head <= n:
            raise CorpusError(f"sentence {s.sid!r}: token {i} head {t.head} out of range")
        if t.head == i:
            raise CorpusError(f"sentence {s.sid!r}: token {i} is its own head, not a tree")
        roots += t.head == 0
    if roots != 1:
        raise CorpusError(f"sentence {s.sid!r}: {roots} roots, not a tree")
    # every token must reach the root without revisiting a node
    state = [0] * (n + 1)  # 0 unseen, 1 on current walk, 2 reaches root
    for i in range(1, n + 1):
        walk = []
        j = i
        while j != 0 and state[j] == 0:
            state[j] = 1
            walk.append(j)
            j = s.tokens[j - 1].head
        if j != 0 and state[j] == 1:
            raise CorpusError(f"sentence {s.sid!r}: head cycle through token {j}, not a tree")
        for k in walk:
            state[k] = 2
    for m in s.entities:
        if not m.etype:
            raise CorpusError(f"sentence {s.sid!r}: entity with empty etype")
        if not 1 <= m.start <= m.end <= n:
            raise CorpusError(f"sentence {s.sid!r}: entity span {m.start}-{m.end} outside 1-{n}")
    ents = s.entities
    for x in range(len(ents)):
        for y in range(x + 1, len(ents)):
            if ents[x].etype == ents[y].etype and ents[x].overlaps(ents[y]):
                raise CorpusError(
                    f"sentence {s.sid!r}: overlapping {ents[x].etype} spans "
                    f"{ents[x].span} and {ents[y].span}")


# --- interchange format ---------------------------------------------------

def sentence_to_dict(s: Sentence) -> dict:
    ents = []
    for m in s.entities:
        d = {"start": m.start, "end": m.end, "etype": m.etype}
        if m.cid is not None:
            d["cid"] = m.cid
        ents.append(d)
    return {
        "sid": s.sid,
        "tokens": [{"form": t.form, "lemma": t.lemma, "upos": t.upos,
                    "head": t.head, "deprel": t.deprel} for t in s.tokens],
        "entities": ents,
    }


def _field(rec: dict, name: str, kind, lineno: int, where: str = ""):
    if name not in rec:
        raise CorpusError(f"line {lineno}: missing field {where}{name!r}")
    value = rec[name]
    if kind is int and isinstance(value, bool) or not isinstance(value, kind):
        raise CorpusError(f"line {lineno}: field {where}{name!r} has wrong type "
                          f"{type(value).__name__}")
    return value


def sentence_from_dict(rec: dict, lineno: int = 0) -> Sentence:
    if not isinstance(rec, dict):
        raise CorpusError(f"line {lineno}: record is not an object")
    sid = _field(rec, "sid", str, lineno)
    raw_tokens = _field(rec, "tokens", list, lineno)
    raw_ents = rec.get("entities", [])
    if not isinstance(raw_ents, list):
        raise CorpusError(f"line {lineno}: field 'entities' has wrong type")
    tokens = []
    for i, t in enumerate(raw_tokens, start=1):
        if not isinstance(t, dict):
            raise CorpusError(f"line {lineno}: tokens[{i - 1}] is not an object")
        where = f"tokens[{i - 1}]."
        tokens.append(Token(
            i,
            _field(t, "form", str, lineno, where),
            _field(t, "lemma", str, lineno, where),
            _field(t, "upos", str, lineno, where),
            _field(t, "head", int, lineno, where),
            _field(t, "deprel", str, lineno, where),
        ))
    ents = []
    for k, e in enumerate(raw_ents):
        if not isinstance(e, dict):
            raise CorpusError(f"line {lineno}: entities[{k}] is not an object")
        where = f"entities[{k}]."
        cid = e.get("cid")
        if cid is not None and not isinstance(cid, str):
            raise CorpusError(f"line {lineno}: field {where}'cid' has wrong type")
        ents.append(EntityMention(
            _field(e, "start", int, lineno, where),
            _field(e, "end", int, lineno, where),
            _field(e, "etype", str, lineno, where),
            cid,
        ))
    return Sentence(sid, tuple(tokens), tuple(ents))


def dumps_sentence(s: Sentence) -> str:
    return json.dumps(sentence_to_dict(s), ensure_ascii=False, separators=(",", ":"))


def iter_corpus(path) -> Iterator[Sentence]:
    """Stream sentences from a corpus file, validating each record."""
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as e:
                raise CorpusError(f"line {lineno}: invalid JSON ({e.msg})") from None
            yield sentence_from_dict(rec, lineno)


def load_corpus(path) -> Corpus:
    seen = set()
    sentences = []
    for s in iter_corpus(path):
        if s.sid in seen:
            raise CorpusError(f"duplicate sentence id {s.sid!r}")
        seen.add(s.sid)
        sentences.append(s)
    return Corpus(tuple(sentences))


def write_corpus(sentences: Iterable[Sentence], path) -> None:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for s in sentences:
            f.write(dumps_sentence(s))
            f.write("\n")


# --- operations on sentences ----------------------------------------------

def mask_sentence(s: Sentence, pair: tuple[EntityMention, EntityMention]) -> str:
    """Replace both mention spans by their entity types, e.g. ``COMPOUND treats DISEASE``."""
    a, b = pair
    if a.overlaps(b):
        raise ValueError(f"sentence {s.sid!r}: mentions {a.span} and {b.span} overlap")
    out = []
    i = 1
    n = len(s.tokens)
    while i <= n:
        if i == a.start:
            out.append(a.etype)
            i = a.end + 1
        elif i == b.start:
            out.append(b.etype)
            i = b.end + 1
        else:
            out.append(s.tokens[i - 1].form)
            i += 1
    return " ".join(out)


def entity_string(s: Sentence, m: EntityMention) -> str:
    """Canonical identity of a mention: its cid, else its case-folded lemmas."""
    if m.cid:
        return m.cid
    return " ".join(s.tokens[i - 1].lemma for i in range(m.start, m.end + 1)).casefold()


def order_pair(a: EntityMention, b: EntityMention,
               schema: RelationSchema) -> tuple[EntityMention, EntityMention]:
    if a.etype == schema.atype and b.etype == schema.btype:
        return a, b
    if b.etype == schema.atype and a.etype == schema.btype:
        return b, a
    raise ValueError(f"type pair ({a.etype}, {b.etype}) not in schema "
                     f"({schema.atype}, {schema.btype})")


def pair_key(s: Sentence, a: EntityMention, b: EntityMention,
             schema: RelationSchema) -> PairKey:
    a, b = order_pair(a, b, schema)
    return PairKey(entity_string(s, a), entity_string(s, b), a.etype, b.etype)


def candidate_pairs(s: Sentence, schema: RelationSchema) -> list[tuple[EntityMention, EntityMention]]:
    """Typed mention pairs of a sentence in schema order; self-relations skipped."""
    first = [m for m in s.entities if m.etype == schema.atype]
    second = [m for m in s.entities if m.etype == schema.btype]
    pairs = []
    for a in first:
        for b in second:
            if a.overlaps(b):
                continue
            if a.cid is not None and a.cid == b.cid:
                continue
            pairs.append((a, b))
    return pairs
