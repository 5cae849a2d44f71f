"""
CoNLL-U plus standoff entities -> corpus interchange format.

The standoff file is tab-separated, one mention per line::

    sent_id <TAB> start <TAB> end <TAB> etype [<TAB> cid]

with 1-based inclusive token indices matching the CoNLL-U ID column.
Lines starting with ``#`` are ignored.
"""
from __future__ import annotations

from collections import defaultdict
from typing import Iterator

from .corpus import CorpusError, EntityMention, Sentence, Token, write_corpus

ID, FORM, LEMMA, UPOS, XPOS, FEATS, HEAD, DEPREL, DEPS, MISC = range(10)


def read_conllu(path) -> Iterator[tuple[str, list[list[str]]]]:
    """Yield ``(sent_id, rows)``; multiword-token ranges and empty nodes are skipped."""
    rows, sid, count = [], None, 0
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\r\n")
            if not line:
                if rows:
                    count += 1
                    yield sid or f"s{count}", rows
                rows, sid = [], None
                continue
            if line.startswith("#"):
                key, _, value = line[1:].partition("=")
                if key.strip() == "sent_id":
                    sid = value.strip()
                continue
            cols = line.split("\t")
            if len(cols) != 10:
                raise CorpusError(f"{path}: line {lineno}: expected 10 columns, got {len(cols)}")
            if "-" in cols[ID] or "." in cols[ID]:
                continue
            rows.append(cols)
    if rows:
        count += 1
        yield sid or f"s{count}", rows


def read_standoff(path) -> dict[str, list[EntityMention]]:
    mentions = defaultdict(list)
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\r\n")
            if not line or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) not in (4, 5):
                raise CorpusError(f"{path}: line {lineno}: expected 4 or 5 columns")
            try:
                start, end = int(cols[1]), int(cols[2])
            except ValueError:
                raise CorpusError(f"{path}: line {lineno}: start/end must be integers") from None
            cid = cols[4] if len(cols) == 5 and cols[4] else None
            mentions[cols[0]].append(EntityMention(start, end, cols[3], cid))
    return mentions


def conllu_sentences(conllu_path, standoff_path=None) -> Iterator[Sentence]:
    mentions = read_standoff(standoff_path) if standoff_path else {}
    for sid, rows in read_conllu(conllu_path):
        tokens = []
        for i, cols in enumerate(rows, start=1):
            if int(cols[ID]) != i:
                raise CorpusError(f"sentence {sid!r}: token ids are not consecutive at {cols[ID]}")
            lemma = cols[LEMMA] if cols[LEMMA] != "_" else cols[FORM]
            tokens.append(Token(i, cols[FORM], lemma, cols[UPOS], int(cols[HEAD]), cols[DEPREL]))
        ents = sorted(mentions.get(sid, []), key=lambda m: (m.start, m.end, m.etype))
        yield Sentence(sid, tuple(tokens), tuple(ents))


def convert(conllu_path, standoff_path, out_path) -> int:
    sentences = list(conllu_sentences(conllu_path, standoff_path))
    sids = [s.sid for s in sentences]
    if len(set(sids)) != len(sids):
        raise CorpusError("duplicate sent_id in CoNLL-U input")
    write_corpus(sentences, out_path)
    return len(sentences)
