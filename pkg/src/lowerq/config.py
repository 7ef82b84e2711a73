"""Run configuration: a JSON object resolved into library objects.

Keys (all optional unless noted)::

    command        modulus | jensen | dilatation | theorem2 | boundary  (required)
    metric         {"name": "euclidean", "n": 2}   catalog name + parameters
    target_metric  like ``metric``; defaults to ``metric``
    center         chart coordinates of P0 (default: origin, or the equator
                   point for round-sphere)
    eps, eps0      ring radii (default 0.5, 1.0)
    p              modulus exponent (default n)
    weight         Q or K: number, expression string in x1..xn and r, or
                   {"kind": "constant", "value": c} / {"kind": "radial", "expr": "..."}
    domain         null or {"kind": "half-space", "axis": 2, "offset": 0.0, "sign": 1}
    map            {"name": "identity" | "linear" | "radial_stretch" | "symbolic", ...}
    radial_panels, angular_nodes   grid resolution
    profiles       number of random eta profiles (jensen, default 100)
    delta, levels  boundary ladder (default 0.5, 20)
    prefix         file name prefix inside the output directory
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import manifold
from .errors import ConfigError

COMMANDS = ("modulus", "jensen", "dilatation", "theorem2", "boundary")


@dataclass
class RunConfig:
    command: str
    metric: dict
    target_metric: dict | None = None
    center: list | None = None
    eps: float = 0.5
    eps0: float = 1.0
    p: float | None = None
    weight: object = 1.0
    domain: dict | None = None
    map: dict = field(default_factory=lambda: {"name": "identity"})
    radial_panels: int | None = None
    angular_nodes: int | None = None
    profiles: int = 100
    delta: float = 0.5
    levels: int = 20
    prefix: str = ""
    seed: int = 0
    threads: int = 1

    @property
    def n(self) -> int:
        return int(self.metric.get("n", 2))

    def resolved(self) -> dict:
        """Fully resolved configuration, embedded in every summary."""
        out = {
            "command": self.command,
            "metric": self.metric,
            "target_metric": self.target_metric or self.metric,
            "center": self.center_point().tolist(),
            "eps": self.eps,
            "eps0": self.eps0,
            "p": self.exponent(),
            "weight": self.weight,
            "domain": self.domain,
            "map": self.map,
            "radial_panels": self.radial_panels,
            "angular_nodes": self.angular_nodes,
            "profiles": self.profiles,
            "delta": self.delta,
            "levels": self.levels,
            "prefix": self.prefix,
            "seed": self.seed,
            "threads": self.threads,
        }
        return out

    def exponent(self) -> float:
        return float(self.p if self.p is not None else self.n)

    def center_point(self) -> np.ndarray:
        if self.center is not None:
            return np.asarray(self.center, dtype=float)
        if self.metric.get("name") == "round-sphere":
            return np.array([np.pi / 2] * (self.n - 1) + [0.0])
        return np.zeros(self.n)

    def build_metric(self) -> manifold.MetricField:
        return manifold.from_spec(self.metric)

    def build_target(self) -> manifold.MetricField:
        return manifold.from_spec(self.target_metric or self.metric)

    def build_domain(self):
        if self.domain is None:
            return None
        kind = self.domain.get("kind")
        if kind == "half-space":
            axis = int(self.domain.get("axis", self.n))
            if not 1 <= axis <= self.n:
                raise ConfigError(f"half-space axis must be in 1..{self.n}")
            return manifold.half_space(axis - 1, float(self.domain.get("offset", 0.0)),
                                       float(self.domain.get("sign", 1.0)))
        raise ConfigError(f"unknown domain kind {kind!r}")


def from_mapping(data: dict, seed: int = 0, threads: int = 1) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a JSON object")
    data = dict(data)
    command = data.pop("command", None)
    if command not in COMMANDS:
        raise ConfigError(f"command must be one of {', '.join(COMMANDS)}")
    metric = data.pop("metric", {"name": "euclidean", "n": 2})
    if isinstance(metric, str):
        metric = {"name": metric, "n": 2}
    known = set(RunConfig.__dataclass_fields__) - {"command", "metric", "seed", "threads"}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown configuration keys: {', '.join(sorted(unknown))}")
    cfg = RunConfig(command=command, metric=metric, seed=seed, threads=threads, **data)
    validate(cfg)
    return cfg


def validate(cfg: RunConfig) -> None:
    if cfg.n not in (2, 3):
        raise ConfigError("metric dimension n must be 2 or 3")
    if cfg.command in ("modulus", "jensen", "theorem2") and not cfg.exponent() > cfg.n - 1:
        raise ConfigError(f"p must exceed n - 1 = {cfg.n - 1}")
    if cfg.command != "boundary" and not 0 < cfg.eps < cfg.eps0:
        raise ConfigError("need 0 < eps < eps0")
    if cfg.command == "boundary" and not 0 < cfg.delta:
        raise ConfigError("delta must be positive")
    if cfg.profiles < 0 or cfg.levels < 6:
        raise ConfigError("profiles must be >= 0 and levels >= 6")
    if len(cfg.center_point()) != cfg.n:
        raise ConfigError(f"center must have {cfg.n} coordinates")


def load(path: str | Path, seed: int = 0, threads: int = 1) -> RunConfig:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from None
    return from_mapping(data, seed, threads)
