import json

import pytest

from seedrel.corpus import (Corpus, CorpusError, EntityMention, PairKey, RelationSchema,
                            candidate_pairs, dumps_sentence, entity_string, iter_corpus,
                            load_corpus, mask_sentence, order_pair, pair_key, sentence_from_dict,
                            sentence_to_dict, write_corpus)

from helpers import SCHEMA, induces, make_sentence

ONE_LINE = json.dumps({
    "sid": "s1",
    "tokens": [
        {"form": "COMPOUND", "lemma": "compound", "upos": "NOUN", "head": 2, "deprel": "nsubj"},
        {"form": "induces", "lemma": "induce", "upos": "VERB", "head": 0, "deprel": "root"},
        {"form": "DISEASE", "lemma": "disease", "upos": "NOUN", "head": 2, "deprel": "obj"},
    ],
    "entities": [{"start": 1, "end": 1, "etype": "COMPOUND"},
                 {"start": 3, "end": 3, "etype": "DISEASE"}],
})


def test_minimal_record_loads(tmp_path):
    p = tmp_path / "c.jsonl"
    p.write_text(ONE_LINE + "\n")
    corpus = load_corpus(p)
    assert len(corpus) == 1
    assert len(corpus["s1"].entities) == 2
    assert corpus["s1"].token(2).lemma == "induce"


def test_head_cycle_is_not_a_tree():
    rec = json.loads(ONE_LINE)
    for t, h in zip(rec["tokens"], [2, 1, 2]):
        t["head"] = h
    with pytest.raises(CorpusError, match="not a tree"):
        sentence_from_dict(rec, 1)


@pytest.mark.parametrize("heads", [[0, 0, 2], [2, 3, 1], [1, 0, 2], [2, 0, 7]])
def test_bad_head_structures_rejected(heads):
    rows = [("a", "a", "X", h) for h in heads]
    with pytest.raises(CorpusError, match="s9"):
        make_sentence("s9", rows)


def test_errors_name_line_and_field(tmp_path):
    rec = json.loads(ONE_LINE)
    del rec["tokens"][1]["lemma"]
    p = tmp_path / "c.jsonl"
    p.write_text(ONE_LINE + "\n" + json.dumps(rec) + "\n")
    with pytest.raises(CorpusError) as e:
        load_corpus(p)
    assert "line 2" in str(e.value) and "lemma" in str(e.value)


def test_wrong_type_and_bad_json(tmp_path):
    rec = json.loads(ONE_LINE)
    rec["tokens"][0]["head"] = "2"
    with pytest.raises(CorpusError, match="head"):
        sentence_from_dict(rec, 4)
    p = tmp_path / "bad.jsonl"
    p.write_text("{not json\n")
    with pytest.raises(CorpusError, match="line 1"):
        load_corpus(p)


def test_duplicate_sid(tmp_path):
    p = tmp_path / "c.jsonl"
    p.write_text(ONE_LINE + "\n" + ONE_LINE + "\n")
    with pytest.raises(CorpusError, match="duplicate"):
        load_corpus(p)
    with pytest.raises(CorpusError, match="duplicate"):
        Corpus((induces("x"), induces("x")))


def test_entity_invariants():
    rows = [("a", "a", "X", 0), ("b", "b", "X", 1)]
    with pytest.raises(CorpusError, match="outside"):
        make_sentence("s", rows, [(1, 3, "DISEASE")])
    with pytest.raises(CorpusError, match="overlapping"):
        make_sentence("s", rows, [(1, 2, "DISEASE"), (2, 2, "DISEASE")])
    # different types may overlap (nested mentions)
    make_sentence("s", rows, [(1, 2, "DISEASE"), (2, 2, "COMPOUND")])


def test_round_trip_is_bit_identical(tmp_path):
    from seedrel.synth import SynthConfig, generate
    data = generate(SynthConfig(n_sentences=1000, heldout=0.0))
    p = tmp_path / "a.jsonl"
    write_corpus(data.train, p)
    corpus = load_corpus(p)
    assert [s.sid for s in corpus] == [s.sid for s in data.train]
    assert len(corpus) == 1000 == len(p.read_text().splitlines())
    assert list(corpus) == data.train
    q = tmp_path / "b.jsonl"
    write_corpus(corpus, q)
    assert p.read_bytes() == q.read_bytes()


def test_unicode_and_optional_cid():
    s = make_sentence("ü", [("Ærø", "ærø", "PROPN", 0)], [(1, 1, "DISEASE")])
    d = sentence_to_dict(s)
    assert "cid" not in d["entities"][0]
    assert "Ærø" in dumps_sentence(s)
    assert sentence_from_dict(json.loads(dumps_sentence(s))) == s


def test_mask_sentence():
    s = make_sentence("s", [
        ("Aspirin", "aspirin", "PROPN", 2), ("treats", "treat", "VERB", 0),
        ("severe", "severe", "ADJ", 4), ("headache", "headache", "NOUN", 2),
    ], [(1, 1, "COMPOUND"), (3, 4, "DISEASE")])
    assert mask_sentence(s, s.entities) == "COMPOUND treats DISEASE"
    assert mask_sentence(s, s.entities[::-1]) == "COMPOUND treats DISEASE"


def test_mask_adjacent_and_overlap():
    s = make_sentence("s", [("a", "a", "X", 0), ("b", "b", "X", 1), ("c", "c", "X", 1)],
                      [(1, 1, "COMPOUND"), (2, 3, "DISEASE")])
    assert mask_sentence(s, s.entities) == "COMPOUND DISEASE"
    with pytest.raises(ValueError):
        mask_sentence(s, (EntityMention(1, 2, "COMPOUND"), EntityMention(2, 3, "DISEASE")))


def test_pair_key_cid_and_order():
    s = induces()
    a, b = s.entities
    assert pair_key(s, a, b, SCHEMA) == PairKey("C001", "D042", "COMPOUND", "DISEASE")
    assert pair_key(s, b, a, SCHEMA) == pair_key(s, a, b, SCHEMA)


def test_pair_key_lemma_fallback():
    s = make_sentence("s", [
        ("Cisplatin", "Cisplatin", "PROPN", 2), ("causes", "cause", "VERB", 0),
        ("Renal", "Renal", "ADJ", 4), ("disease", "disease", "NOUN", 2),
    ], [(1, 1, "COMPOUND"), (3, 4, "DISEASE")])
    key = pair_key(s, *s.entities, SCHEMA)
    assert key.a == "cisplatin" and key.b == "renal disease"
    assert entity_string(s, s.entities[1]) == "renal disease"


def test_order_pair_rejects_foreign_types():
    with pytest.raises(ValueError, match="not in schema"):
        order_pair(EntityMention(1, 1, "GENE"), EntityMention(2, 2, "DISEASE"), SCHEMA)


def test_candidate_pairs():
    rows = [("c", "c", "X", 0), ("d1", "d1", "X", 1), ("d2", "d2", "X", 1)]
    s = make_sentence("s", rows, [(1, 1, "COMPOUND", "C1"), (2, 2, "DISEASE", "D1"),
                                  (3, 3, "DISEASE", "D2")])
    c1, d1, d2 = s.entities
    assert candidate_pairs(s, SCHEMA) == [(c1, d1), (c1, d2)]
    only = make_sentence("s", rows, [(2, 2, "DISEASE")])
    assert candidate_pairs(only, SCHEMA) == []
    same = make_sentence("s", rows, [(1, 1, "COMPOUND", "X1"), (2, 2, "DISEASE", "X1")])
    assert candidate_pairs(same, SCHEMA) == []


def test_schema_validation():
    with pytest.raises(ValueError):
        RelationSchema("A", "A", ("r",))
    with pytest.raises(ValueError):
        RelationSchema("A", "B", ())
    with pytest.raises(ValueError):
        RelationSchema("A", "B", ("r", "r"))
    assert RelationSchema.from_dict(SCHEMA.to_dict()) == SCHEMA
    with pytest.raises(ValueError):
        PairKey("", "b", "A", "B")


def test_iter_corpus_skips_blank_lines(tmp_path):
    p = tmp_path / "c.jsonl"
    p.write_text(ONE_LINE + "\n\n")
    assert len(list(iter_corpus(p))) == 1
