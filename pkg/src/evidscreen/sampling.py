"""Query strategies over the unscreened prediction pool.

Three strategies are supported: uniform random, least-confidence (descending
uncertainty), and highest-priority (descending priority score). Score ties
break by ascending doc_id so a batch is reproducible regardless of pool
input order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Protocol, Sequence

import numpy as np

from .errors import ValidationError

STRATEGY_KINDS = ("random", "least_confidence", "highest_priority")

# Short config/CLI aliases.
STRATEGY_ALIASES = {
    "random": "random",
    "lc": "least_confidence",
    "least_confidence": "least_confidence",
    "hp": "highest_priority",
    "highest_priority": "highest_priority",
}


class ScoredDoc(Protocol):
    doc_id: str
    priority_score: float
    uncertainty: float


@dataclass(frozen=True)
class SamplingStrategy:
    kind: str
    batch_size: int = 1000

    def __post_init__(self):
        if self.kind not in STRATEGY_KINDS:
            raise ValidationError(f"unknown sampling strategy: {self.kind!r}")
        if self.batch_size < 1:
            raise ValidationError("batch_size must be >= 1")


def resolve_strategy(name: str, batch_size: int = 1000) -> SamplingStrategy:
    kind = STRATEGY_ALIASES.get(name.strip().lower())
    if kind is None:
        raise ValidationError(f"unknown sampling strategy: {name!r}")
    return SamplingStrategy(kind=kind, batch_size=batch_size)


@dataclass(frozen=True)
class PooledPrediction:
    """Per-field mean of several runs' predictions, used only for sampling.

    Priority score and uncertainty are averaged independently (the
    uncertainty of a mean score is not the mean uncertainty), so this
    deliberately does not promise the single-run min(PS, 1-PS) identity.
    """

    doc_id: str
    priority_score: float
    uncertainty: float


def mean_predictions(runs: Sequence[Sequence[ScoredDoc]]) -> list[PooledPrediction]:
    """Average PS and U over aligned prediction lists from several runs."""
    if not runs:
        raise ValidationError("no prediction runs to average")
    first = runs[0]
    for other in runs[1:]:
        if len(other) != len(first) or any(
            a.doc_id != b.doc_id for a, b in zip(first, other)
        ):
            raise ValidationError("prediction runs are not aligned by doc_id")
    k = float(len(runs))
    return [
        PooledPrediction(
            doc_id=first[i].doc_id,
            priority_score=sum(run[i].priority_score for run in runs) / k,
            uncertainty=sum(run[i].uncertainty for run in runs) / k,
        )
        for i in range(len(first))
    ]


def sample(
    strategy: SamplingStrategy,
    pool: Sequence[ScoredDoc],
    k: int,
    rng: np.random.Generator | None = None,
) -> list[str]:
    """Pick min(k, |pool|) doc_ids from the unscreened pool.

    random: uniform without replacement. least_confidence: descending
    uncertainty. highest_priority: descending priority score. An empty pool
    yields an empty batch rather than an error.
    """
    if k <= 0:
        raise ValidationError(f"sample size must be positive, got {k}")
    if not pool:
        return []
    k = min(k, len(pool))
    if strategy.kind == "random":
        rng = rng or np.random.default_rng()
        picks = rng.choice(len(pool), size=k, replace=False)
        return [pool[i].doc_id for i in picks]
    if strategy.kind == "least_confidence":
        ranked = sorted(pool, key=lambda p: (-p.uncertainty, p.doc_id))
    else:
        ranked = sorted(pool, key=lambda p: (-p.priority_score, p.doc_id))
    return [p.doc_id for p in ranked[:k]]
