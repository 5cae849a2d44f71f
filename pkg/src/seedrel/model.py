"""
Featurization and balanced-bagging logistic ensembles.

An instance is represented by the mean lemma embedding of the tokens left of,
between and right of the two masked mentions, a one-hot bucket of the token
gap between them, and a bias term.  One ensemble is trained per relation
type; every member sees all positives and an equally sized random sample of
the negatives.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .corpus import Corpus, Sentence
from .embed import VectorSpace

# token gap between the two mentions -> bucket; gaps of 0 share the first bucket
GAP_BUCKETS = ((0, 1), (2, 3), (4, 6), (7, 10), (11, math.inf))
GAP_LABELS = ("1", "2-3", "4-6", "7-10", ">10")

MODEL_FORMAT = "seedrel-linear"
MODEL_VERSION = 1

# fine-tuning settings of the transformer this linear model stands in for;
# exported so an external model can be trained on the same weak data
REFERENCE_FINE_TUNING = {"max_epochs": 5, "learning_rate": 5e-05, "batch_size": 128,
                         "ensemble_size": 10, "p_threshold": 0.5}


class FeatureError(ValueError):
    pass


class DegenerateClassError(ValueError):
    pass


class TrainingDiverged(ArithmeticError):
    pass


# --- features --------------------------------------------------------------

def gap_bucket(gap: int) -> int:
    for k, (lo, hi) in enumerate(GAP_BUCKETS):
        if lo <= gap <= hi:
            return k
    raise ValueError(f"negative gap {gap}")


def n_features(dim: int) -> int:
    return 3 * dim + len(GAP_BUCKETS) + 1


class Featurizer:
    """Segment-mean features; caches prefix sums for the current sentence."""

    def __init__(self, space: VectorSpace):
        self.space = space
        self.dim = space.dim
        self.n_features = n_features(space.dim)
        self._sid = None
        self._sums = None
        self._counts = None

    def _prefix(self, s: Sentence):
        if self._sid == s.sid and self._sums is not None:
            return self._sums, self._counts
        n = len(s.tokens)
        sums = np.zeros((n + 1, self.dim))
        counts = np.zeros(n + 1, dtype=np.int64)
        index = self.space.index
        for i, t in enumerate(s.tokens, start=1):
            row = index.get(t.lemma)
            if row is None:
                sums[i] = sums[i - 1]
                counts[i] = counts[i - 1]
            else:
                sums[i] = sums[i - 1] + self.space.matrix[row]
                counts[i] = counts[i - 1] + 1
        self._sid, self._sums, self._counts = s.sid, sums, counts
        return sums, counts

    def __call__(self, s: Sentence, a_span, b_span, out: np.ndarray | None = None) -> np.ndarray:
        n = len(s.tokens)
        (a0, a1), (b0, b1) = a_span, b_span
        if not (1 <= a0 <= a1 <= n and 1 <= b0 <= b1 <= n):
            raise FeatureError(f"sentence {s.sid!r}: placeholder span outside sentence")
        if a0 <= b1 and b0 <= a1:
            raise FeatureError(f"sentence {s.sid!r}: placeholder spans overlap")
        (f0, f1), (g0, g1) = sorted([(a0, a1), (b0, b1)])
        sums, counts = self._prefix(s)
        if out is None:
            out = np.zeros(self.n_features)
        else:
            out[:] = 0.0
        d = self.dim
        # segments in token coordinates: [1, f0), (f1, g0), (g1, n]
        for k, (lo, hi) in enumerate(((1, f0 - 1), (f1 + 1, g0 - 1), (g1 + 1, n))):
            if hi < lo:
                continue
            c = counts[hi] - counts[lo - 1]
            if c:
                out[k * d:(k + 1) * d] = (sums[hi] - sums[lo - 1]) / c
        out[3 * d + gap_bucket(g0 - f1 - 1)] = 1.0
        out[-1] = 1.0
        return out


def featurize(inst, s: Sentence, space: VectorSpace) -> np.ndarray:
    if inst.sid != s.sid:
        raise FeatureError(f"instance {inst.iid} belongs to {inst.sid!r}, not {s.sid!r}")
    return Featurizer(space)(s, inst.a_span, inst.b_span)


def featurize_dataset(instances: Sequence, corpus: Corpus | Mapping[str, Sentence],
                      space: VectorSpace, dtype=np.float64) -> np.ndarray:
    fz = Featurizer(space)
    X = np.zeros((len(instances), fz.n_features), dtype=dtype)
    buf = np.zeros(fz.n_features)
    missing = []
    for r, inst in enumerate(instances):
        try:
            s = corpus[inst.sid]
        except KeyError:
            missing.append(inst.iid)
            continue
        X[r] = fz(s, inst.a_span, inst.b_span, out=buf)
    if missing:
        raise FeatureError(f"{len(missing)} instances have no sentence in the corpus: "
                           f"{missing[:10]}")
    return X


def align(instances: Iterable, sentences: Iterable[Sentence]) -> Iterator[tuple]:
    """Pair each instance with its sentence when both streams follow corpus order.

    Raises FeatureError as soon as an instance's sentence is not ahead in the
    corpus stream, so the caller can fall back to random access.
    """
    it = iter(sentences)
    cur = None
    for inst in instances:
        while cur is None or cur.sid != inst.sid:
            cur = next(it, None)
            if cur is None:
                raise FeatureError(f"instance {inst.iid}: sentence {inst.sid!r} "
                                   f"not found in corpus order")
        yield inst, cur


def featurize_stream(pairs: Iterable[tuple], space: VectorSpace, X: np.ndarray) -> list:
    """Fill ``X`` row by row from ``(instance, sentence)`` pairs; returns the labels.

    ``X`` may be a memory-mapped array, so a dataset never has to fit in RAM.
    """
    fz = Featurizer(space)
    buf = np.zeros(fz.n_features)
    labels = []
    for r, (inst, s) in enumerate(pairs):
        if r >= X.shape[0]:
            raise FeatureError("more instances than feature rows")
        X[r] = fz(s, inst.a_span, inst.b_span, out=buf)
        labels.append(inst.label)
    if len(labels) != X.shape[0]:
        raise FeatureError(f"expected {X.shape[0]} instances, got {len(labels)}")
    return labels


# --- logistic model ----------------------------------------------------------

def sigmoid(z):
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def logistic_loss(w: np.ndarray, X: np.ndarray, y: np.ndarray) -> float:
    """Mean negative log-likelihood of binary labels ``y`` under ``sigmoid(X @ w)``."""
    z = X @ w
    return float(np.mean(np.logaddexp(0.0, z) - y * z))


def logistic_grad(w: np.ndarray, X: np.ndarray, y: np.ndarray) -> np.ndarray:
    return X.T @ (sigmoid(X @ w) - y) / X.shape[0]


@dataclass(frozen=True)
class Hyper:
    epochs: int = 5
    learning_rate: float = 0.01
    batch_size: int = 128
    bags: int = 10
    seed: int = 0
    holdout: float = 0.1

    def __post_init__(self):
        for name in ("epochs", "batch_size", "bags"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v <= 0:
                raise ValueError(f"{name} must be a positive integer, got {v!r}")
        if not self.learning_rate > 0 or not math.isfinite(self.learning_rate):
            raise ValueError(f"learning_rate must be positive, got {self.learning_rate!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or self.seed < 0:
            raise ValueError(f"seed must be a non-negative integer, got {self.seed!r}")
        if not 0.0 <= self.holdout < 1.0:
            raise ValueError(f"holdout must be in [0, 1), got {self.holdout!r}")


@dataclass
class LinearModel:
    weights: np.ndarray
    rtype: str
    best_epoch: int = 0
    history: list = field(default_factory=list)

    def proba(self, X: np.ndarray) -> np.ndarray:
        return sigmoid(np.asarray(X, dtype=np.float64) @ self.weights)


@dataclass
class Bag:
    positives: np.ndarray
    negatives: np.ndarray

    @property
    def rows(self) -> np.ndarray:
        return np.concatenate([self.positives, self.negatives])


@dataclass
class Ensemble:
    rtype: str
    members: list[LinearModel]
    hyper: Hyper
    dim: int = 0

    def __post_init__(self):
        if not self.members:
            raise ValueError("an ensemble needs at least one member")

    def proba(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        return np.mean([m.proba(X) for m in self.members], axis=0)


# named random streams: (seed, bag, stream) so bag sampling and shuffling never share draws
_BAG_STREAM, _SHUFFLE_STREAM, _HOLDOUT_STREAM = 0, 1, 2


def binary_labels(labels: Sequence, rtype: str) -> np.ndarray:
    return np.fromiter((lab == rtype for lab in labels), dtype=np.float64, count=len(labels))


def _labels_of(d) -> list:
    return d.labels() if hasattr(d, "labels") else list(d)


def make_bags(d, rtype: str, n_bags: int, seed: int, rows: np.ndarray | None = None) -> list[Bag]:
    """All positives of ``rtype`` plus ``min(n_pos, n_neg)`` sampled negatives per bag.

    ``d`` is a dataset or a plain label sequence; ``rows`` restricts sampling to a
    subset of its indices (e.g. the training part of a held-out split).
    """
    y = binary_labels(_labels_of(d), rtype)
    rows = np.arange(len(y)) if rows is None else np.asarray(rows, dtype=np.int64)
    pos = rows[y[rows] == 1.0]
    neg = rows[y[rows] == 0.0]
    if len(pos) == 0 or len(neg) == 0:
        raise DegenerateClassError(
            f"degenerate class distribution for {rtype!r}: "
            f"{len(pos)} positives, {len(neg)} negatives")
    if n_bags <= 0:
        raise ValueError("n_bags must be positive")
    k = min(len(pos), len(neg))
    bags = []
    for i in range(n_bags):
        rng = np.random.default_rng([seed, i, _BAG_STREAM])
        sample = np.sort(rng.choice(neg, size=k, replace=False))
        bags.append(Bag(pos.copy(), sample))
    return bags


# rows per block when a loss is evaluated over a bag or the held-out split
_LOSS_BLOCK = 8192


def rows_loss(w: np.ndarray, X: np.ndarray, y: np.ndarray, rows: np.ndarray) -> float:
    """:func:`logistic_loss` over ``X[rows]``, gathered block by block."""
    total = 0.0
    for k in range(0, len(rows), _LOSS_BLOCK):
        r = rows[k:k + _LOSS_BLOCK]
        z = np.asarray(X[r], dtype=np.float64) @ w
        total += float(np.sum(np.logaddexp(0.0, z) - y[r] * z))
    return total / len(rows)


def train_member(X: np.ndarray, y: np.ndarray, bag: Bag, h: Hyper, member_seed,
                 rtype: str = "", valid: np.ndarray | None = None) -> LinearModel:
    """Mini-batch SGD on the logistic loss over the rows of one bag.

    Batches are gathered from ``X`` on demand, so ``X`` can be a memory map
    and a bag is never copied whole.  With ``valid`` (row indices of a
    held-out split) the weights of the epoch with the lowest held-out loss
    are kept, otherwise the final weights.
    """
    rows = bag.rows
    if len(rows) == 0:
        raise ValueError("empty bag")
    y = np.asarray(y, dtype=np.float64)
    rng = np.random.default_rng(list(np.atleast_1d(member_seed)) + [_SHUFFLE_STREAM])
    w = np.zeros(X.shape[1])
    best_w, best_loss, best_epoch = w.copy(), math.inf, 0
    history = []
    # overflow is detected below and reported as TrainingDiverged
    with np.errstate(over="ignore", invalid="ignore"):
        for epoch in range(1, h.epochs + 1):
            perm = rows[rng.permutation(len(rows))]
            for start in range(0, len(perm), h.batch_size):
                idx = perm[start:start + h.batch_size]
                xb = np.asarray(X[idx], dtype=np.float64)
                w -= h.learning_rate * logistic_grad(w, xb, y[idx])
            loss = rows_loss(w, X, y, rows)
            if not math.isfinite(loss) or not np.all(np.isfinite(w)):
                raise TrainingDiverged(f"non-finite training loss at epoch {epoch}")
            entry = {"epoch": epoch, "train_loss": loss}
            score = loss
            if valid is not None and len(valid):
                score = rows_loss(w, X, y, valid)
                entry["valid_loss"] = score
            history.append(entry)
            if valid is None or not len(valid) or score < best_loss:
                best_w, best_loss, best_epoch = w.copy(), score, epoch
    return LinearModel(best_w, rtype, best_epoch, history)


def holdout_split(n: int, h: Hyper) -> tuple[np.ndarray, np.ndarray]:
    """Seeded train/held-out row split shared by every relation type."""
    n_valid = int(round(n * h.holdout))
    if n_valid == 0:
        return np.arange(n), np.arange(0)
    perm = np.random.default_rng([h.seed, _HOLDOUT_STREAM]).permutation(n)
    return np.sort(perm[n_valid:]), np.sort(perm[:n_valid])


def train_ensemble(d, rtype: str, h: Hyper, X: np.ndarray) -> Ensemble:
    """``h.bags`` members, member ``i`` trained on bag ``i`` with seed ``(h.seed, i)``."""
    labels = _labels_of(d)
    if len(labels) != X.shape[0]:
        raise ValueError("feature rows do not match dataset size")
    y = binary_labels(labels, rtype)
    train_rows, valid_rows = holdout_split(len(labels), h)
    bags = make_bags(labels, rtype, h.bags, h.seed, rows=train_rows)
    valid = valid_rows if len(valid_rows) else None
    members = [train_member(X, y, bag, h, (h.seed, i), rtype, valid)
               for i, bag in enumerate(bags)]
    return Ensemble(rtype, members, h, (X.shape[1] - len(GAP_BUCKETS) - 1) // 3)


# --- prediction ----------------------------------------------------------------

def predict(e: Ensemble, inst, s: Sentence, space: VectorSpace) -> float:
    return float(e.proba(featurize(inst, s, space))[0])


def decide(probs: Mapping[str, float], relations: Sequence[str],
           p_threshold: float = 0.5) -> str | None:
    """Argmax relation if its probability reaches the threshold, else None (Null)."""
    best, best_p = None, -1.0
    for r in relations:
        if r in probs and probs[r] > best_p:
            best, best_p = r, probs[r]
    if best is not None and best_p >= p_threshold:
        return best
    return None


def classify(ensembles: Mapping[str, Ensemble], inst, s: Sentence, space: VectorSpace,
             p_threshold: float = 0.5, relations: Sequence[str] | None = None) -> str | None:
    if not ensembles:
        raise ValueError("no ensembles to classify with")
    x = featurize(inst, s, space)
    probs = {r: float(e.proba(x)[0]) for r, e in ensembles.items()}
    return decide(probs, relations or list(ensembles), p_threshold)


# --- persistence -------------------------------------------------------------

def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def save_ensemble(e: Ensemble, directory) -> list[Path]:
    """Write one JSON file per member plus a manifest under ``directory/<rtype>/``."""
    out = Path(directory) / e.rtype
    out.mkdir(parents=True, exist_ok=True)
    written = []
    names = []
    for i, m in enumerate(e.members):
        name = f"member_{i:02d}.json"
        p = out / name
        p.write_text(_dump({
            "format": MODEL_FORMAT, "version": MODEL_VERSION, "rtype": e.rtype,
            "member": i, "dim": e.dim, "n_features": len(m.weights),
            "best_epoch": m.best_epoch,
            "weights": [float(x) for x in m.weights],
        }), encoding="utf-8")
        names.append(name)
        written.append(p)
    manifest = out / "ensemble.json"
    manifest.write_text(_dump({
        "format": MODEL_FORMAT, "version": MODEL_VERSION, "rtype": e.rtype,
        "dim": e.dim, "gap_buckets": list(GAP_LABELS), "hyper": asdict(e.hyper),
        "members": names, "reference_fine_tuning": REFERENCE_FINE_TUNING,
    }), encoding="utf-8")
    written.append(manifest)
    return written


def load_ensemble(directory) -> Ensemble:
    directory = Path(directory)
    meta = json.loads((directory / "ensemble.json").read_text(encoding="utf-8"))
    if meta.get("format") != MODEL_FORMAT or meta.get("version") != MODEL_VERSION:
        raise ValueError(f"{directory}: unsupported model format")
    members = []
    for name in meta["members"]:
        rec = json.loads((directory / name).read_text(encoding="utf-8"))
        if rec["rtype"] != meta["rtype"]:
            raise ValueError(f"{directory / name}: member belongs to {rec['rtype']!r}")
        members.append(LinearModel(np.array(rec["weights"], dtype=np.float64), rec["rtype"],
                                   rec.get("best_epoch", 0)))
    return Ensemble(meta["rtype"], members, Hyper(**meta["hyper"]), meta["dim"])


def load_ensembles(directory, relations: Sequence[str] | None = None) -> dict[str, Ensemble]:
    directory = Path(directory)
    if relations is None:
        relations = sorted(p.name for p in directory.iterdir() if (p / "ensemble.json").exists())
    out = {}
    for r in relations:
        if (directory / r / "ensemble.json").exists():
            out[r] = load_ensemble(directory / r)
    if not out:
        raise FileNotFoundError(f"no ensembles found under {directory}")
    return out
