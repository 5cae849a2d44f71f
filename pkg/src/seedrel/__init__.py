"""Relation extraction bootstrapped from path-verb seeds and distant supervision."""

__version__ = "0.1.0"

from .corpus import Corpus, EntityMention, PairKey, RelationSchema, Sentence, Token, load_corpus
from .embed import MappingConfig, VectorSpace, cosine, load_vectors, map_verb
from .pathex import SeedSet, harvest_seeds, shortest_path
from .weaklabel import Instance, WeakDataset, annotate
from .model import Ensemble, Hyper, train_ensemble
from .evaluation import Metrics, evaluate, prf1

__all__ = [
    "Corpus", "EntityMention", "PairKey", "RelationSchema", "Sentence", "Token", "load_corpus",
    "MappingConfig", "VectorSpace", "cosine", "load_vectors", "map_verb",
    "SeedSet", "harvest_seeds", "shortest_path",
    "Instance", "WeakDataset", "annotate",
    "Ensemble", "Hyper", "train_ensemble",
    "Metrics", "evaluate", "prf1",
]
