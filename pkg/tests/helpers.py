"""Small constructors shared by the test modules."""
from seedrel.corpus import EntityMention, RelationSchema, Sentence, Token

SCHEMA = RelationSchema("COMPOUND", "DISEASE", ("cause", "treat"))


def make_sentence(sid, rows, entities=()):
    """rows: (form, lemma, upos, head) or with a trailing deprel."""
    tokens = []
    for i, row in enumerate(rows, start=1):
        form, lemma, upos, head = row[:4]
        deprel = row[4] if len(row) > 4 else ("root" if head == 0 else "dep")
        tokens.append(Token(i, form, lemma, upos, head, deprel))
    ents = tuple(e if isinstance(e, EntityMention) else EntityMention(*e) for e in entities)
    return Sentence(sid, tuple(tokens), ents)


def induces(sid="s1", verb=("induces", "induce"), c=("Aspirin", "C001"), d=("headache", "D042")):
    """``<compound> <verb> <disease>`` with the verb as root."""
    return make_sentence(sid, [
        (c[0], c[0].lower(), "PROPN", 2, "nsubj"),
        (verb[0], verb[1], "VERB", 0, "root"),
        (d[0], d[0].lower(), "NOUN", 2, "obj"),
    ], [(1, 1, "COMPOUND", c[1]), (3, 3, "DISEASE", d[1])])
