"""Word vectors, cosine similarity and verb-phrase to relation-type mapping."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

# absorbs rounding so a similarity that equals the threshold in exact arithmetic is not
# rejected after float arithmetic (e.g. after rescaling every vector)
THRESHOLD_EPS = 1e-9


class VectorError(ValueError):
    pass


class VectorSpace:
    """Immutable token -> vector table backed by one float64 matrix."""

    def __init__(self, words: Sequence[str], matrix: np.ndarray):
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] != len(words):
            raise VectorError("matrix shape does not match vocabulary")
        if len(words) == 0:
            raise VectorError("empty vocabulary")
        self.words = tuple(words)
        self.index = {}
        for i, w in enumerate(self.words):
            self.index.setdefault(w, i)
        matrix.setflags(write=False)
        self.matrix = matrix

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def __len__(self) -> int:
        return len(self.index)

    def __contains__(self, word: str) -> bool:
        return word in self.index

    def get(self, word: str) -> np.ndarray | None:
        i = self.index.get(word)
        return None if i is None else self.matrix[i]

    def __getitem__(self, word: str) -> np.ndarray:
        return self.matrix[self.index[word]]

    @classmethod
    def from_dict(cls, table: dict) -> "VectorSpace":
        words = list(table)
        return cls(words, np.array([table[w] for w in words], dtype=np.float64))

    def scaled(self, factor: float) -> "VectorSpace":
        return VectorSpace(self.words, self.matrix * factor)


def load_vectors(path) -> VectorSpace:
    """Read the word2vec text format: header ``V D`` then ``token x1 .. xD`` rows.

    Duplicate tokens keep their first row.
    """
    with open(path, encoding="utf-8") as f:
        header = f.readline().split()
        if len(header) != 2:
            raise VectorError(f"line 1: expected header 'V D', got {len(header)} fields")
        try:
            n_words, dim = int(header[0]), int(header[1])
        except ValueError:
            raise VectorError("line 1: header fields must be integers") from None
        if n_words <= 0:
            raise VectorError("line 1: vocabulary size must be positive")
        if dim <= 0:
            raise VectorError("line 1: dimension must be positive")
        matrix = np.empty((n_words, dim), dtype=np.float64)
        words = []
        seen = set()
        row = 0
        for lineno, line in enumerate(f, start=2):
            parts = line.rstrip("\n").rstrip(" ").split(" ")
            if len(parts) == 1 and not parts[0]:
                continue
            if len(parts) != dim + 1:
                raise VectorError(f"line {lineno}: expected {dim} values, got {len(parts) - 1}")
            if row >= n_words:
                raise VectorError(f"line {lineno}: more rows than the header's {n_words}")
            word = parts[0]
            try:
                values = [float(x) for x in parts[1:]]
            except ValueError:
                raise VectorError(f"line {lineno}: non-numeric value") from None
            row += 1
            if word in seen:
                continue
            seen.add(word)
            matrix[len(words)] = values
            words.append(word)
        if row != n_words:
            raise VectorError(f"header declares {n_words} rows, found {row}")
    return VectorSpace(words, matrix[:len(words)].copy())


def save_vectors(space: VectorSpace, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(f"{len(space.words)} {space.dim}\n")
        for w, v in zip(space.words, space.matrix):
            f.write(w + " " + " ".join(repr(float(x)) for x in v) + "\n")


def cosine(u, v) -> float:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"length mismatch: {u.shape} vs {v.shape}")
    nu = math.sqrt(float(np.dot(u, u)))
    nv = math.sqrt(float(np.dot(v, v)))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    c = float(np.dot(u, v)) / (nu * nv)
    return min(1.0, max(-1.0, c))


def embed_phrase(phrase: Sequence[str], space: VectorSpace) -> np.ndarray | None:
    """Mean vector of the in-vocabulary lemmas, or None if all are unknown."""
    if not phrase:
        raise ValueError("empty phrase")
    rows = [space.index[w] for w in phrase if w in space.index]
    if not rows:
        return None
    if len(rows) == 1:
        return space.matrix[rows[0]].copy()
    return space.matrix[rows].mean(axis=0)


@dataclass(frozen=True)
class MappingConfig:
    relation_types: tuple[str, ...]
    threshold: float = 0.4

    def __post_init__(self):
        object.__setattr__(self, "relation_types", tuple(self.relation_types))
        if not self.relation_types:
            raise ValueError("at least one relation type is required")
        if any(not r for r in self.relation_types):
            raise ValueError("relation type names must be non-empty")
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold {self.threshold} outside [0, 1]")

    def check(self, space: VectorSpace) -> None:
        missing = [r for r in self.relation_types if r not in space]
        if missing:
            raise VectorError(f"relation types missing from vector vocabulary: {missing}")


def map_verb(phrase: Sequence[str], cfg: MappingConfig,
             space: VectorSpace) -> tuple[str, float] | None:
    """Closest relation type for a verb phrase, or None below the threshold.

    The threshold is inclusive; ties go to the earlier relation type in ``cfg``.
    Both comparisons allow ``THRESHOLD_EPS`` so rounding cannot flip a decision
    that is exact in real arithmetic.
    """
    cfg.check(space)
    vec = embed_phrase(phrase, space)
    if vec is None:
        return None
    best, best_sim = None, -math.inf
    for r in cfg.relation_types:
        sim = cosine(vec, space[r])
        if sim > best_sim + THRESHOLD_EPS:
            best, best_sim = r, sim
    if best_sim >= cfg.threshold - THRESHOLD_EPS:
        return best, best_sim
    return None

