"""Engine/server configuration: one JSON file plus environment overrides.

Recognized keys (file) and variables (environment, which wins):

    embeddings_path       EMBEDDINGS_PATH
    abstractive_endpoint  ABSTRACTIVE_ENDPOINT
    cache_capacity        CACHE_CAPACITY
    request_timeout_s     REQUEST_TIMEOUT_S
    bind                  BIND
    cors_origins          (file only; list of origins)
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

from .docstate import DEFAULT_CACHE_CAPACITY, Engine
from .embed import load_glove
from .keywords import load_stopwords

__all__ = ["ServerConfig", "DEFAULT_BIND", "build_engine", "load_config"]

DEFAULT_BIND = "127.0.0.1:8787"


@dataclass
class ServerConfig:
    embeddings_path: str | None = None
    abstractive_endpoint: str | None = None
    cache_capacity: int = DEFAULT_CACHE_CAPACITY
    request_timeout_s: float = 5.0
    bind: str = DEFAULT_BIND
    cors_origins: list[str] = field(default_factory=lambda: ["*"])
    stopwords_path: str | None = None

    @property
    def host(self) -> str:
        return self.bind.rsplit(":", 1)[0]

    @property
    def port(self) -> int:
        return int(self.bind.rsplit(":", 1)[1])


def load_config(path: str | None = None, env: dict | None = None) -> ServerConfig:
    """Config from an optional JSON file, then environment overrides."""
    if env is None:
        env = dict(os.environ)
    config = ServerConfig()
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        known = set(ServerConfig.__dataclass_fields__)
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        for key, value in raw.items():
            setattr(config, key, value)
    if env.get("EMBEDDINGS_PATH"):
        config.embeddings_path = env["EMBEDDINGS_PATH"]
    if env.get("ABSTRACTIVE_ENDPOINT"):
        config.abstractive_endpoint = env["ABSTRACTIVE_ENDPOINT"]
    if env.get("CACHE_CAPACITY"):
        config.cache_capacity = int(env["CACHE_CAPACITY"])
    if env.get("REQUEST_TIMEOUT_S"):
        config.request_timeout_s = float(env["REQUEST_TIMEOUT_S"])
    if env.get("BIND"):
        config.bind = env["BIND"]
    return config


def build_engine(config: ServerConfig) -> Engine:
    """Engine with embeddings loaded from the configured path."""
    if not config.embeddings_path:
        raise ValueError("embeddings path not configured (EMBEDDINGS_PATH or config file)")
    store = load_glove(config.embeddings_path)
    stopwords = load_stopwords(config.stopwords_path) if config.stopwords_path else None
    return Engine(
        store,
        stopwords=stopwords,
        abstractive_endpoint=config.abstractive_endpoint,
        cache_capacity=config.cache_capacity,
        request_timeout_s=config.request_timeout_s,
    )
