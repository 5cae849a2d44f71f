"""Pipeline configuration: JSON file, environment overrides for paths, flag overrides."""
from __future__ import annotations

import hashlib
import json
import os
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from .corpus import RelationSchema
from .embed import MappingConfig
from .model import Hyper

PATH_KEYS = ("corpus", "vectors", "output", "gold", "gold_corpus")
ENV_PREFIX = "SEEDREL_"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class PipelineConfig:
    corpus: Path | None = None
    vectors: Path | None = None
    schema: RelationSchema = field(
        default_factory=lambda: RelationSchema("COMPOUND", "DISEASE", ("treat", "cause")))
    threshold: float = 0.4
    bags: int = 10
    epochs: int = 5
    batch_size: int = 128
    learning_rate: float = 0.01
    holdout: float = 0.1
    p_threshold: float = 0.5
    seed: int = 0
    output: Path = Path("out")
    gold: Path | None = None
    gold_corpus: Path | None = None
    workers: int = 1

    def __post_init__(self):
        if not 0.0 <= self.threshold <= 1.0:
            raise ConfigError(f"threshold must be in [0, 1], got {self.threshold}")
        if not 0.0 <= self.p_threshold <= 1.0:
            raise ConfigError(f"p_threshold must be in [0, 1], got {self.p_threshold}")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        try:
            self.hyper()
        except ValueError as e:
            raise ConfigError(str(e)) from None

    def hyper(self) -> Hyper:
        return Hyper(epochs=self.epochs, learning_rate=self.learning_rate,
                     batch_size=self.batch_size, bags=self.bags, seed=self.seed,
                     holdout=self.holdout)

    def mapping(self) -> MappingConfig:
        return MappingConfig(self.schema.relations, self.threshold)

    def require(self, *names: str) -> None:
        """Fail early when a needed input path is unset or missing."""
        for name in names:
            p = getattr(self, name)
            if p is None:
                raise ConfigError(f"no {name} path configured")
            if not Path(p).exists():
                raise ConfigError(f"{name} file not found: {p}")

    def settings(self) -> dict:
        """Every non-path setting; the basis of the config digest."""
        d = {f.name: getattr(self, f.name) for f in fields(self)
             if f.name not in PATH_KEYS and f.name != "workers"}
        d["schema"] = self.schema.to_dict()
        return d

    def digest(self) -> str:
        raw = json.dumps(self.settings(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(raw.encode("utf-8")).hexdigest()[:16]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["schema"] = self.schema.to_dict()
        for k in PATH_KEYS:
            d[k] = None if d[k] is None else str(d[k])
        return d


def _coerce(raw: dict, base: Path | None) -> dict:
    known = {f.name for f in fields(PipelineConfig)}
    unknown = set(raw) - known - {"synth"}
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    out = {k: v for k, v in raw.items() if k in known}
    if "schema" in out and not isinstance(out["schema"], RelationSchema):
        try:
            out["schema"] = RelationSchema.from_dict(out["schema"])
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"bad schema: {e}") from None
    for k in PATH_KEYS:
        if out.get(k) is not None:
            p = Path(out[k])
            if base is not None and not p.is_absolute():
                p = base / p
            out[k] = p
    return out


def load_config(path=None, overrides: dict | None = None, env=None) -> PipelineConfig:
    """Merge, lowest to highest priority: defaults, config file, environment, flags."""
    env = os.environ if env is None else env
    merged = {}
    if path is not None:
        path = Path(path)
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except json.JSONDecodeError as e:
            raise ConfigError(f"config file {path} is not valid JSON: {e.msg}") from None
        if not isinstance(raw, dict):
            raise ConfigError(f"config file {path} must hold a JSON object")
        merged.update(_coerce(raw, path.parent))
    for k in PATH_KEYS:
        v = env.get(ENV_PREFIX + k.upper())
        if v:
            merged[k] = Path(v)
    if overrides:
        merged.update(_coerce({k: v for k, v in overrides.items() if v is not None}, None))
    try:
        return PipelineConfig(**merged)
    except TypeError as e:
        raise ConfigError(str(e)) from None


def with_overrides(cfg: PipelineConfig, **kw) -> PipelineConfig:
    return replace(cfg, **_coerce({k: v for k, v in kw.items() if v is not None}, None))
