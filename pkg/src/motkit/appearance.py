"""Per-track appearance memory: coarse + confidence-binned fine EMA vectors.

Each track owns one coarse embedding updated on every match and nine
fine slots, one per detection-confidence level (0.1, 0.2], (0.2, 0.3],
..., (0.9, 1).  All stored vectors are kept at unit norm; updates are
exponential moving averages with momentum ``alpha`` followed by
renormalization.  The affinity query takes the minimum cosine distance
over the coarse vector and the fine slot matching the query confidence,
so a heavily occluded query can match occlusion-level memory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

N_BINS = 9


@dataclass
class EmbeddingCluster:
    """One coarse slot plus nine confidence-binned fine slots."""

    coarse: np.ndarray | None = None
    fine: list[np.ndarray | None] = field(default_factory=lambda: [None] * N_BINS)
    alpha: float = 0.9

    def is_empty(self) -> bool:
        return self.coarse is None and all(s is None for s in self.fine)


def _normalized(f: np.ndarray) -> np.ndarray:
    f = np.asarray(f, dtype=float).ravel()
    norm = float(np.linalg.norm(f))
    if norm < 1e-12:
        raise ValueError("degenerate embedding")
    return f / norm


def bin_index(conf: float) -> int | None:
    """Fine-slot index for a detection confidence, or None below 0.1.

    Slot i covers the half-open level (0.1 * (i + 1), 0.1 * (i + 2)].
    """
    if not 0.0 <= conf <= 1.0:
        raise ValueError("confidence out of range")
    i = math.ceil(conf * 10.0 - 1e-9) - 2
    if i < 0:
        return None
    return min(i, N_BINS - 1)


def update_coarse(cluster: EmbeddingCluster, f: np.ndarray) -> EmbeddingCluster:
    """EMA-update the coarse slot, initializing it on first use."""
    f = _normalized(f)
    if cluster.coarse is None:
        cluster.coarse = f
    else:
        cluster.coarse = _normalized(cluster.alpha * cluster.coarse + (1.0 - cluster.alpha) * f)
    return cluster


def update_fine(cluster: EmbeddingCluster, f: np.ndarray, conf: float) -> EmbeddingCluster:
    """EMA-update the fine slot selected by ``conf``; no-op below the lowest bin."""
    i = bin_index(conf)
    if i is None:
        return cluster
    f = _normalized(f)
    if cluster.fine[i] is None:
        cluster.fine[i] = f
    else:
        cluster.fine[i] = _normalized(cluster.alpha * cluster.fine[i] + (1.0 - cluster.alpha) * f)
    return cluster


def appearance_distance(cluster: EmbeddingCluster, f: np.ndarray, conf: float) -> float:
    """Cosine distance of ``f`` to the cluster: min over the consulted slots.

    Consults the coarse slot and, when present, the fine slot matching
    the query confidence.

    Raises:
        ValueError: the cluster holds no appearance state at all.
    """
    if cluster.is_empty():
        raise ValueError("no appearance state")
    f = _normalized(f)
    candidates: list[np.ndarray] = []
    if cluster.coarse is not None:
        candidates.append(cluster.coarse)
    i = bin_index(conf)
    if i is not None and cluster.fine[i] is not None:
        candidates.append(cluster.fine[i])
    if not candidates:
        # only fine slots exist and none matches the query level
        candidates = [s for s in cluster.fine if s is not None]
    return min(1.0 - float(slot @ f) for slot in candidates)
