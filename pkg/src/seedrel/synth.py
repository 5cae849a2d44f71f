"""
Synthetic compound-disease corpus with known gold relations.

Sentences are instantiated from dependency-annotated templates.  Each template
fixes the gold label and how the path between the two entities looks:

* explicit  - a relation verb sits on the path (path-verb mapping finds it)
* implicit  - the relation is expressed without a mapping verb on the path
              (nominal patterns, or a neutral "distractor" verb on the path)
* null      - no relation; some carry relation verbs off the path
* trap      - no relation, but a relation verb on the path fools the mapper

Related entity pairs recur across several sentences, so seeds harvested from
explicit sentences label the implicit ones through distant supervision.
The vector space is built so relation verbs sit close to their relation-type
token and every other word is near-orthogonal to both.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .corpus import EntityMention, RelationSchema, Sentence, Token, write_corpus
from .embed import VectorSpace, save_vectors
from .weaklabel import WeakDataset, export_dataset, gold_instances

SCHEMA = RelationSchema("COMPOUND", "DISEASE", ("treat", "cause"))

# lemma -> (3sg, past, base)
RELATION_VERBS = {
    "treat": {
        "treat": ("treats", "treated", "treat"),
        "cure": ("cures", "cured", "cure"),
        "alleviate": ("alleviates", "alleviated", "alleviate"),
        "manage": ("manages", "managed", "manage"),
        "relieve": ("relieves", "relieved", "relieve"),
        "control": ("controls", "controlled", "control"),
    },
    "cause": {
        "cause": ("causes", "caused", "cause"),
        "induce": ("induces", "induced", "induce"),
        "trigger": ("triggers", "triggered", "trigger"),
        "provoke": ("provokes", "provoked", "provoke"),
        "produce": ("produces", "produced", "produce"),
        "exacerbate": ("exacerbates", "exacerbated", "exacerbate"),
    },
}
_INFL = {"3sg": 0, "past": 1, "base": 2}

ADJECTIVES = ("severe", "chronic", "acute", "mild", "refractory", "recurrent")

# Template elements: (form, lemma, upos, head, deprel[, flag])
#   "$C"/"$D"          entity slot (COMPOUND / DISEASE)
#   "$TV.x"/"$KV.x"    treat-like / cause-like verb in inflection x
#   "$ADJ"             optional adjective (dropped half of the time; always a leaf)
# Heads are 1-based positions within the template.
TEMPLATES = {
    "treat_explicit": [
        [("$C", "", "", 2, "nsubj"), ("$TV.3sg", "", "VERB", 0, "root"), ("$ADJ", "", "ADJ", 4, "amod"),
         ("$D", "", "", 2, "obj"), (".", ".", "PUNCT", 2, "punct")],
        [("$C", "", "", 2, "nsubj"), ("$TV.3sg", "", "VERB", 0, "root"), ("$D", "", "", 2, "obj"),
         ("in", "in", "ADP", 5, "case"), ("patients", "patient", "NOUN", 2, "obl"),
         (".", ".", "PUNCT", 2, "punct")],
        [("$D", "", "", 3, "nsubj:pass"), ("was", "be", "AUX", 3, "aux:pass"),
         ("$TV.past", "", "VERB", 0, "root"), ("with", "with", "ADP", 5, "case"),
         ("$C", "", "", 3, "obl"), (".", ".", "PUNCT", 3, "punct")],
        [("$C", "", "", 3, "nsubj"), ("effectively", "effectively", "ADV", 3, "advmod"),
         ("$TV.past", "", "VERB", 0, "root"), ("$D", "", "", 3, "obj"), ("in", "in", "ADP", 7, "case"),
         ("the", "the", "DET", 7, "det"), ("cohort", "cohort", "NOUN", 3, "obl"),
         (".", ".", "PUNCT", 3, "punct")],
        [("we", "we", "PRON", 2, "nsubj"), ("used", "use", "VERB", 0, "root"), ("$C", "", "", 2, "obj"),
         ("to", "to", "PART", 5, "mark"), ("$TV.base", "", "VERB", 2, "xcomp"),
         ("$D", "", "", 5, "obj"), (".", ".", "PUNCT", 2, "punct")],
    ],
    "cause_explicit": [
        [("$C", "", "", 2, "nsubj"), ("$KV.3sg", "", "VERB", 0, "root"), ("$ADJ", "", "ADJ", 4, "amod"),
         ("$D", "", "", 2, "obj"), (".", ".", "PUNCT", 2, "punct")],
        [("$D", "", "", 3, "nsubj:pass"), ("was", "be", "AUX", 3, "aux:pass"),
         ("$KV.past", "", "VERB", 0, "root"), ("by", "by", "ADP", 5, "case"),
         ("$C", "", "", 3, "obl"), (".", ".", "PUNCT", 3, "punct")],
        [("administration", "administration", "NOUN", 4, "nsubj"), ("of", "of", "ADP", 3, "case"),
         ("$C", "", "", 1, "nmod"), ("$KV.past", "", "VERB", 0, "root"), ("$D", "", "", 4, "obj"),
         ("in", "in", "ADP", 7, "case"), ("rats", "rat", "NOUN", 4, "obl"),
         (".", ".", "PUNCT", 4, "punct")],
        [("$C", "", "", 2, "nsubj"), ("$KV.past", "", "VERB", 0, "root"), ("$ADJ", "", "ADJ", 4, "amod"),
         ("$D", "", "", 2, "obj"), ("in", "in", "ADP", 6, "case"),
         ("patients", "patient", "NOUN", 2, "obl"), (".", ".", "PUNCT", 2, "punct")],
    ],
    "treat_implicit": [
        [("$C", "", "", 2, "compound"), ("therapy", "therapy", "NOUN", 6, "nsubj"),
         ("for", "for", "ADP", 4, "case"), ("$D", "", "", 2, "nmod"), ("was", "be", "AUX", 6, "cop"),
         ("effective", "effective", "ADJ", 0, "root"), (".", ".", "PUNCT", 6, "punct")],
        [("$D", "", "", 2, "compound"), ("patients", "patient", "NOUN", 3, "nsubj"),
         ("responded", "respond", "VERB", 0, "root"), ("well", "well", "ADV", 3, "advmod"),
         ("to", "to", "ADP", 6, "case"), ("$C", "", "", 3, "obl"), (".", ".", "PUNCT", 3, "punct")],
        [("$C", "", "", 5, "nsubj"), ("is", "be", "AUX", 5, "cop"), ("an", "a", "DET", 5, "det"),
         ("effective", "effective", "ADJ", 5, "amod"), ("treatment", "treatment", "NOUN", 0, "root"),
         ("for", "for", "ADP", 7, "case"), ("$D", "", "", 5, "nmod"), (".", ".", "PUNCT", 5, "punct")],
        [("patients", "patient", "NOUN", 4, "nsubj"), ("with", "with", "ADP", 3, "case"),
         ("$D", "", "", 1, "nmod"), ("received", "receive", "VERB", 0, "root"), ("$C", "", "", 4, "obj"),
         ("with", "with", "ADP", 8, "case"), ("good", "good", "ADJ", 8, "amod"),
         ("response", "response", "NOUN", 4, "obl"), (".", ".", "PUNCT", 4, "punct")],
        [("$C", "", "", 2, "nsubj"), ("improved", "improve", "VERB", 0, "root"),
         ("symptoms", "symptom", "NOUN", 2, "obj"), ("of", "of", "ADP", 5, "case"),
         ("$D", "", "", 3, "nmod"), (".", ".", "PUNCT", 2, "punct")],
        [("remission", "remission", "NOUN", 0, "root"), ("of", "of", "ADP", 3, "case"),
         ("$D", "", "", 1, "nmod"), ("after", "after", "ADP", 6, "case"), ("$C", "", "", 6, "compound"),
         ("therapy", "therapy", "NOUN", 1, "nmod"), (".", ".", "PUNCT", 1, "punct")],
    ],
    "cause_implicit": [
        [("$C", "", "", 2, "obl"), ("associated", "associated", "ADJ", 3, "amod"),
         ("$D", "", "", 5, "nsubj:pass"), ("was", "be", "AUX", 5, "aux:pass"),
         ("reported", "report", "VERB", 0, "root"), (".", ".", "PUNCT", 5, "punct")],
        [("$D", "", "", 6, "nsubj:pass"), ("after", "after", "ADP", 4, "case"),
         ("$C", "", "", 4, "compound"), ("exposure", "exposure", "NOUN", 1, "nmod"),
         ("was", "be", "AUX", 6, "aux:pass"), ("reported", "report", "VERB", 0, "root"),
         (".", ".", "PUNCT", 6, "punct")],
        [("$C", "", "", 2, "compound"), ("toxicity", "toxicity", "NOUN", 3, "nsubj"),
         ("manifested", "manifest", "VERB", 0, "root"), ("as", "as", "ADP", 6, "case"),
         ("$ADJ", "", "ADJ", 6, "amod"), ("$D", "", "", 3, "obl"), (".", ".", "PUNCT", 3, "punct")],
        [("cases", "case", "NOUN", 0, "root"), ("of", "of", "ADP", 3, "case"), ("$D", "", "", 1, "nmod"),
         ("during", "during", "ADP", 6, "case"), ("$C", "", "", 6, "compound"),
         ("treatment", "treatment", "NOUN", 1, "nmod"), (".", ".", "PUNCT", 1, "punct")],
        [("a", "a", "DET", 2, "det"), ("patient", "patient", "NOUN", 3, "nsubj"),
         ("developed", "develop", "VERB", 0, "root"), ("$D", "", "", 3, "obj"),
         ("while", "while", "SCONJ", 6, "mark"), ("receiving", "receive", "VERB", 3, "advcl"),
         ("$C", "", "", 6, "obj"), (".", ".", "PUNCT", 3, "punct")],
        [("$D", "", "", 2, "nsubj"), ("occurred", "occur", "VERB", 0, "root"),
         ("following", "following", "ADP", 5, "case"), ("$C", "", "", 5, "compound"),
         ("overdose", "overdose", "NOUN", 2, "obl"), (".", ".", "PUNCT", 2, "punct")],
    ],
    "null": [
        [("$C", "", "", 5, "nsubj:pass"), ("and", "and", "CCONJ", 3, "cc"), ("$D", "", "", 1, "conj"),
         ("were", "be", "AUX", 5, "aux:pass"), ("measured", "measure", "VERB", 0, "root"),
         ("in", "in", "ADP", 8, "case"), ("the", "the", "DET", 8, "det"),
         ("study", "study", "NOUN", 5, "obl"), (".", ".", "PUNCT", 5, "punct")],
        [("patients", "patient", "NOUN", 5, "nsubj:pass"), ("with", "with", "ADP", 3, "case"),
         ("$D", "", "", 1, "nmod"), ("were", "be", "AUX", 5, "aux:pass"),
         ("enrolled", "enroll", "VERB", 0, "root"), ("and", "and", "CCONJ", 10, "cc"),
         ("$C", "", "", 8, "compound"), ("levels", "level", "NOUN", 10, "nsubj:pass"),
         ("were", "be", "AUX", 10, "aux:pass"), ("monitored", "monitor", "VERB", 5, "conj"),
         (".", ".", "PUNCT", 5, "punct")],
        [("the", "the", "DET", 2, "det"), ("effect", "effect", "NOUN", 7, "nsubj"),
         ("of", "of", "ADP", 4, "case"), ("$C", "", "", 2, "nmod"), ("on", "on", "ADP", 6, "case"),
         ("$D", "", "", 2, "nmod"), ("remains", "remain", "VERB", 0, "root"),
         ("unclear", "unclear", "ADJ", 7, "xcomp"), (".", ".", "PUNCT", 7, "punct")],
        [("$C", "", "", 3, "nsubj:pass"), ("was", "be", "AUX", 3, "aux:pass"),
         ("given", "give", "VERB", 0, "root"), ("to", "to", "ADP", 5, "case"),
         ("patients", "patient", "NOUN", 3, "obl"), ("who", "who", "PRON", 7, "nsubj"),
         ("had", "have", "VERB", 5, "acl:relcl"), ("$D", "", "", 7, "obj"),
         (".", ".", "PUNCT", 3, "punct")],
        # relation verb off the path
        [("the", "the", "DET", 2, "det"), ("physician", "physician", "NOUN", 6, "nsubj"),
         ("who", "who", "PRON", 4, "nsubj"), ("$TV.past", "", "VERB", 2, "acl:relcl"),
         ("them", "they", "PRON", 4, "obj"), ("measured", "measure", "VERB", 0, "root"),
         ("$C", "", "", 6, "obj"), ("and", "and", "CCONJ", 9, "cc"), ("$D", "", "", 7, "conj"),
         (".", ".", "PUNCT", 6, "punct")],
        [("$C", "", "", 3, "nsubj:pass"), ("was", "be", "AUX", 3, "aux:pass"),
         ("compared", "compare", "VERB", 0, "root"), ("with", "with", "ADP", 5, "case"),
         ("placebo", "placebo", "NOUN", 3, "obl"), ("in", "in", "ADP", 8, "case"),
         ("$D", "", "", 8, "compound"), ("trials", "trial", "NOUN", 3, "obl"),
         (".", ".", "PUNCT", 3, "punct")],
        [("$C", "", "", 2, "nsubj"), ("binds", "bind", "VERB", 0, "root"),
         ("receptors", "receptor", "NOUN", 2, "obj"), ("unrelated", "unrelated", "ADJ", 3, "amod"),
         ("to", "to", "ADP", 6, "case"), ("$D", "", "", 4, "obl"), (".", ".", "PUNCT", 2, "punct")],
        # relation verb off the path
        [("$C", "", "", 5, "nsubj:pass"), ("and", "and", "CCONJ", 3, "cc"), ("$D", "", "", 1, "conj"),
         ("were", "be", "AUX", 5, "aux:pass"), ("studied", "study", "VERB", 0, "root"),
         ("in", "in", "ADP", 7, "case"), ("mice", "mouse", "NOUN", 5, "obl"),
         ("that", "that", "PRON", 9, "nsubj"), ("$KV.past", "", "VERB", 7, "acl:relcl"),
         ("tumors", "tumor", "NOUN", 9, "obj"), (".", ".", "PUNCT", 5, "punct")],
    ],
    "trap": [
        [("$C", "", "", 2, "nsubj"), ("$KV.past", "", "VERB", 0, "root"),
         ("bradycardia", "bradycardia", "NOUN", 2, "obj"), ("in", "in", "ADP", 6, "case"),
         ("a", "a", "DET", 6, "det"), ("patient", "patient", "NOUN", 3, "nmod"),
         ("with", "with", "ADP", 8, "case"), ("$D", "", "", 6, "nmod"), (".", ".", "PUNCT", 2, "punct")],
    ],
}


def template_vocabulary() -> list[str]:
    words = set(SCHEMA.relations) | set(ADJECTIVES)
    for verbs in RELATION_VERBS.values():
        words.update(verbs)
    for family in TEMPLATES.values():
        for tpl in family:
            for form, lemma, *_ in tpl:
                if not form.startswith("$"):
                    words.add(lemma)
    return sorted(words)


def synth_vectors(dim: int = 32, seed: int = 7) -> VectorSpace:
    """Relation verbs at cosine 0.6-0.85 to their type; other words within +-0.15 of both."""
    if dim < 4:
        raise ValueError("dim must be at least 4")
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    axes = {"treat": q[:, 0], "cause": q[:, 1]}
    rest = q[:, 2:]

    def noise_unit():
        v = rest @ rng.standard_normal(dim - 2)
        return v / np.linalg.norm(v)

    table = {}
    related = {v: r for r, verbs in RELATION_VERBS.items() for v in verbs}
    for w in template_vocabulary():
        if w in axes:
            vec = axes[w]
        elif w in related:
            c = rng.uniform(0.6, 0.85)
            vec = c * axes[related[w]] + np.sqrt(1 - c * c) * noise_unit()
        else:
            a, b = rng.uniform(-0.15, 0.15, size=2)
            vec = a * axes["treat"] + b * axes["cause"] + np.sqrt(1 - a * a - b * b) * noise_unit()
        table[w] = vec
    return VectorSpace.from_dict(table)


# --- entity names ----------------------------------------------------------

_ONSETS = ("b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "br", "cl", "tr", "x")
_VOWELS = ("a", "e", "i", "o", "u", "y")
_DRUG_SUFFIX = ("ine", "ol", "azole", "mab", "pril", "statin", "mycin", "afil", "oxacin", "pam")
_DISEASE_SUFFIX = ("itis", "osis", "emia", "opathy", "algia", "oma", "uria")
_DISEASE_MODIFIERS = ("renal", "hepatic", "cardiac", "pulmonary", "ocular", "neural")


def _names(rng, n: int, suffixes, modifiers=(), modifier_rate=0.0) -> list[tuple[str, ...]]:
    seen = set()
    out = []
    while len(out) < n:
        stem = "".join(rng.choice(_ONSETS) + rng.choice(_VOWELS) for _ in range(rng.integers(1, 3)))
        name = stem + rng.choice(suffixes)
        if modifiers and rng.random() < modifier_rate:
            parts = (str(rng.choice(modifiers)), name)
        else:
            parts = (name,)
        if parts in seen:
            continue
        seen.add(parts)
        out.append(parts)
    return out


# --- instantiation ----------------------------------------------------------

class _TokenCache(dict):
    """Shares identical Token objects across sentences (large corpora)."""

    def get_token(self, *fields) -> Token:
        tok = self.get(fields)
        if tok is None:
            tok = self[fields] = Token(*fields)
        return tok


def instantiate(template, sid: str, compound: tuple[str, ...], disease: tuple[str, ...],
                cids: tuple[str, str], rng, cache: _TokenCache | None = None) -> Sentence:
    cache = _TokenCache() if cache is None else cache
    # expand each element into concrete (form, lemma, upos, deprel) pieces
    pieces = []  # (template position, form, lemma, upos, local head or None, deprel)
    keep = []
    for pos, (form, lemma, upos, head, deprel) in enumerate(template, start=1):
        if form == "$ADJ":
            if rng.random() < 0.5:
                adj = str(rng.choice(ADJECTIVES))
                pieces.append([(pos, adj, adj, "ADJ", None, deprel)])
            else:
                pieces.append([])
        elif form in ("$C", "$D"):
            words = compound if form == "$C" else disease
            etype = "PROPN" if form == "$C" else "NOUN"
            group = [(pos, w, w.lower(), "ADJ", "last", "amod") for w in words[:-1]]
            group.append((pos, words[-1], words[-1].lower(), etype, None, deprel))
            pieces.append(group)
        elif form.startswith("$TV") or form.startswith("$KV"):
            kind = "treat" if form.startswith("$TV") else "cause"
            verbs = RELATION_VERBS[kind]
            lemma_v = str(rng.choice(sorted(verbs)))
            surface = verbs[lemma_v][_INFL[form.split(".")[1]]]
            pieces.append([(pos, surface, lemma_v, upos, None, deprel)])
        else:
            pieces.append([(pos, form, lemma, upos, None, deprel)])
        keep.append(head)
    # new index of each template position's head-bearing (last) piece
    new_index = {}
    spans = {}
    k = 0
    for pos, group in enumerate(pieces, start=1):
        if not group:
            continue
        first = k + 1
        k += len(group)
        new_index[pos] = k
        spans[pos] = (first, k)
    tokens = []
    entities = []
    for pos, group in enumerate(pieces, start=1):
        for j, (_, form, lemma, upos, local, deprel) in enumerate(group):
            idx = len(tokens) + 1
            if local == "last":
                head = new_index[pos]
            else:
                h = keep[pos - 1]
                head = 0 if h == 0 else new_index[h]
            tokens.append(cache.get_token(idx, form, lemma, upos, head, deprel))
        form = template[pos - 1][0]
        if form == "$C":
            entities.append(EntityMention(*spans[pos], "COMPOUND", cids[0]))
        elif form == "$D":
            entities.append(EntityMention(*spans[pos], "DISEASE", cids[1]))
    return Sentence(sid, tuple(tokens), tuple(entities))


@dataclass(frozen=True)
class SynthConfig:
    n_sentences: int = 5000
    positive_rate: float = 0.3
    explicit_rate: float = 0.35
    trap_rate: float = 0.01
    related_null_rate: float = 0.05
    mentions_per_pair: int = 6
    heldout: float = 0.2
    dim: int = 32
    seed: int = 0
    vector_seed: int = 7


@dataclass
class SynthData:
    train: list[Sentence]
    test: list[Sentence]
    gold_train: WeakDataset
    gold_test: WeakDataset
    space: VectorSpace
    schema: RelationSchema
    kinds: dict  # sid -> template family


def generate(cfg: SynthConfig = SynthConfig()) -> SynthData:
    rng = np.random.default_rng([cfg.seed, 101])
    n = cfg.n_sentences
    n_pos = int(round(n * cfg.positive_rate))
    n_related = max(2, int(round(n_pos / cfg.mentions_per_pair)))
    n_compounds = max(20, n_related)
    n_diseases = max(20, n_related)
    compounds = _names(rng, n_compounds, _DRUG_SUFFIX)
    diseases = _names(rng, n_diseases, _DISEASE_SUFFIX, _DISEASE_MODIFIERS, 0.3)

    # related pairs: half treat, half cause, drawn without replacement
    related = {}
    while len(related) < n_related:
        pair = (int(rng.integers(n_compounds)), int(rng.integers(n_diseases)))
        if pair not in related:
            related[pair] = "treat" if len(related) % 2 == 0 else "cause"
    by_type = {r: [p for p, t in related.items() if t == r] for r in SCHEMA.relations}
    related_list = list(related)

    # sentence plan: exactly n_pos positives, shuffled
    labels = np.array(["treat" if i % 2 == 0 else "cause" for i in range(n_pos)]
                      + ["null"] * (n - n_pos), dtype=object)
    rng.shuffle(labels)

    cache = _TokenCache()
    sentences, gold_labels, kinds = [], {}, {}
    for i, label in enumerate(labels):
        sid = f"syn{i:06d}"
        if label == "null":
            family = "trap" if rng.random() < cfg.trap_rate else "null"
            if rng.random() < cfg.related_null_rate:
                pair = related_list[int(rng.integers(len(related_list)))]
            else:
                while True:
                    pair = (int(rng.integers(n_compounds)), int(rng.integers(n_diseases)))
                    if pair not in related:
                        break
            gold = None
        else:
            pool = by_type[label]
            pair = pool[int(rng.integers(len(pool)))]
            style = "explicit" if rng.random() < cfg.explicit_rate else "implicit"
            family = f"{label}_{style}"
            gold = label
        family_templates = TEMPLATES[family]
        tpl = family_templates[int(rng.integers(len(family_templates)))]
        c, d = pair
        s = instantiate(tpl, sid, compounds[c], diseases[d], (f"C{c:05d}", f"D{d:05d}"), rng, cache)
        a = next(m for m in s.entities if m.etype == "COMPOUND")
        b = next(m for m in s.entities if m.etype == "DISEASE")
        gold_labels[sid] = {(a.span, b.span): gold}
        kinds[sid] = family
        sentences.append(s)

    is_test = np.zeros(n, dtype=bool)
    n_test = int(round(n * cfg.heldout))
    is_test[np.random.default_rng([cfg.seed, 202]).permutation(n)[:n_test]] = True
    train = [s for s, t in zip(sentences, is_test) if not t]
    test = [s for s, t in zip(sentences, is_test) if t]

    def gold_set(part):
        return WeakDataset([inst for s in part
                            for inst in gold_instances(s, gold_labels[s.sid], SCHEMA)])

    return SynthData(train, test, gold_set(train), gold_set(test),
                     synth_vectors(cfg.dim, cfg.vector_seed), SCHEMA, kinds)


def write_synth(data: SynthData, outdir, cfg: SynthConfig | None = None,
                pipeline: dict | None = None) -> dict[str, Path]:
    """Write corpora, gold datasets, vectors and a ready-to-run pipeline config."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = {
        "corpus": outdir / "corpus.jsonl",
        "heldout_corpus": outdir / "heldout.jsonl",
        "gold_train": outdir / "gold_train.jsonl",
        "gold": outdir / "gold_heldout.jsonl",
        "vectors": outdir / "vectors.txt",
        "config": outdir / "config.json",
    }
    write_corpus(data.train, paths["corpus"])
    write_corpus(data.test, paths["heldout_corpus"])
    export_dataset(data.gold_train, paths["gold_train"])
    export_dataset(data.gold_test, paths["gold"])
    save_vectors(data.space, paths["vectors"])
    config = {
        "corpus": "corpus.jsonl",
        "vectors": "vectors.txt",
        "schema": data.schema.to_dict(),
        "output": "run",
        "gold": "gold_heldout.jsonl",
        "gold_corpus": "heldout.jsonl",
    }
    config.update(SYNTH_PIPELINE)
    if pipeline:
        config.update(pipeline)
    if cfg is not None:
        config["synth"] = asdict(cfg)
    paths["config"].write_text(json.dumps(config, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    return paths


# training settings for the synthetic benchmark: its features are means of
# short vectors and a bag holds ~1k rows, so the defaults stop far short of
# convergence; these reach it in about a second per run
SYNTH_PIPELINE = {"learning_rate": 2.0, "epochs": 20}
