"""Base community detectors wrapped by the consensus procedure."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ..partition import relabel
from .label_propagation import label_propagation
from .modularity import leiden, louvain
from .walktrap import walktrap

ALGORITHMS = ("louvain", "leiden", "label_propagation", "walktrap")
_ALIASES = {"lv": "louvain", "ld": "leiden", "lp": "label_propagation", "wt": "walktrap"}


@dataclass(frozen=True)
class DetectorConfig:
    """Which base algorithm to run and with what parameters.

    ``resolution`` applies to louvain/leiden, ``walk_length`` to walktrap and
    ``max_sweeps`` caps the sweeps of louvain local moving and label propagation.
    """

    algorithm: str = "louvain"
    resolution: float = 1.0
    walk_length: int = 4
    max_sweeps: int = 100
    seed: object = None

    def __post_init__(self):
        name = _ALIASES.get(self.algorithm.lower(), self.algorithm.lower())
        if name not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; choose from {ALGORITHMS}")
        object.__setattr__(self, "algorithm", name)
        if not self.resolution > 0:
            raise ValueError("resolution must be positive")
        if self.walk_length < 1:
            raise ValueError("walk_length must be >= 1")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be >= 1")

    def with_seed(self, seed) -> "DetectorConfig":
        return replace(self, seed=seed)


def detect(g, cfg: DetectorConfig) -> np.ndarray:
    """Run the configured detector; labels are contiguous ``1..k``."""
    if cfg.algorithm == "louvain":
        out = louvain(g, cfg.resolution, cfg.seed, max_sweeps=cfg.max_sweeps)
    elif cfg.algorithm == "leiden":
        out = leiden(g, cfg.resolution, cfg.seed, max_sweeps=cfg.max_sweeps)
    elif cfg.algorithm == "label_propagation":
        out = label_propagation(g, cfg.seed, max_sweeps=cfg.max_sweeps)
    else:
        out = walktrap(g, cfg.walk_length, cfg.seed)
    return relabel(out)


__all__ = [
    "ALGORITHMS", "DetectorConfig", "detect",
    "label_propagation", "leiden", "louvain", "walktrap",
]
