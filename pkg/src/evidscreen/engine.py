"""Screening project engine: the screen-train-predict-sample loop.

A project moves through four phases. It starts in ``bootstrapping``, where a
uniform-random initial batch is issued for human labeling. Once those labels
arrive, ``active_learning`` cycles: train on all effective decisions, score
the unscreened pool, compare the new ranking against the previous one, and
either issue the next query batch or stop training. After stopping, in
``prioritized_screening`` humans work down the pool in descending priority
order until everything is labeled (``done``) or they decide the remaining
yield is too thin.

All label appends and phase transitions funnel through one writer lock per
project. Labels form an append-only ledger: later records supersede earlier
ones for the same document but nothing is ever removed, and replaying the
event stream from empty reconstructs the project state exactly.
"""

from __future__ import annotations

import threading
import warnings
from dataclasses import asdict, dataclass, field, replace
from datetime import datetime, timezone
from enum import Enum
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import classifier, sampling
from .classifier import (
    ClassifierModel,
    FeatureRow,
    Prediction,
    TrainConfig,
    TrainingSet,
)
from .corpus import Document, ScreeningText
from .errors import (
    PendingLabelsError,
    PhaseError,
    SingleClassError,
    UnknownDocumentError,
    ValidationError,
)

INCLUDED = "included"
EXCLUDED = "excluded"
DECISIONS = (INCLUDED, EXCLUDED)


class Phase(str, Enum):
    BOOTSTRAPPING = "bootstrapping"
    ACTIVE_LEARNING = "active_learning"
    PRIORITIZED_SCREENING = "prioritized_screening"
    DONE = "done"


_PHASE_ORDER = {
    Phase.BOOTSTRAPPING: 0,
    Phase.ACTIVE_LEARNING: 1,
    Phase.PRIORITIZED_SCREENING: 2,
    Phase.DONE: 3,
}


@dataclass(frozen=True)
class ProjectConfig:
    strategy: str = "random"
    batch_size: int = 1000
    init_size: int = 1000
    train_fraction: float = 0.85
    rho_threshold: float | None = 0.95
    patience: int = 1
    max_training_size: int | None = None
    max_iterations: int | None = None
    min_inclusion_rate: float = 0.02
    model_runs: int = 1
    seed: int = 0
    auto_retrain: bool = False
    exclusion_criteria: tuple[str, ...] = ()
    epochs: int = 5
    learning_rate: float = 0.1
    hash_bits: int = 18

    def __post_init__(self):
        sampling.resolve_strategy(self.strategy)  # validates the name
        if self.batch_size < 1:
            raise ValidationError("batch_size must be >= 1")
        if self.init_size < 1:
            raise ValidationError("init_size must be >= 1")
        if not (0.0 < self.train_fraction < 1.0):
            raise ValidationError("train_fraction must be in (0, 1)")
        if self.rho_threshold is not None and not (0.0 <= self.rho_threshold <= 1.0):
            raise ValidationError("rho_threshold must be in [0, 1] or null")
        if self.patience < 1:
            raise ValidationError("patience must be >= 1")
        if self.min_inclusion_rate < 0:
            raise ValidationError("min_inclusion_rate must be >= 0")
        if self.model_runs < 1:
            raise ValidationError("model_runs must be >= 1")
        if self.seed < 0:
            raise ValidationError("seed must be >= 0")

    def train_config(self, seed: int) -> TrainConfig:
        return TrainConfig(
            epochs=self.epochs,
            learning_rate=self.learning_rate,
            hash_bits=self.hash_bits,
            seed=seed,
        )

    def to_dict(self) -> dict:
        d = asdict(self)
        d["exclusion_criteria"] = list(self.exclusion_criteria)
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> "ProjectConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = [k for k in d if k not in known]
        if unknown:
            raise ValidationError(f"unknown config field: {unknown[0]}")
        kwargs = dict(d)
        if "exclusion_criteria" in kwargs:
            kwargs["exclusion_criteria"] = tuple(kwargs["exclusion_criteria"])
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise ValidationError(str(exc)) from exc


@dataclass
class LabelRecord:
    """One human include/exclude decision."""

    doc_id: str
    decision: str
    screener_id: str = ""
    exclusion_criterion: str | None = None
    timestamp: str = ""
    iteration: int = 0
    seq: int = 0


@dataclass
class BootstrapRecord:
    ids: tuple[str, ...]
    clamped: bool = False
    seq: int = 0


@dataclass
class IterationRecord:
    """Outcome of one screen-train-predict-sample cycle."""

    index: int
    strategy: str
    sampled_ids: tuple[str, ...]
    training_size: int
    model_version: int
    rank_similarity: float | None
    batch_included_count: int | None = None
    val_f1: float | None = None
    stopped: bool = False
    queue: tuple[str, ...] | None = None
    seq: int = 0


@dataclass
class IssuedBatch:
    index: int
    kind: str  # bootstrap | query | prioritized
    ids: tuple[str, ...]


@dataclass(frozen=True)
class ProjectState:
    project_id: str
    phase: Phase
    model_version: int
    screened: frozenset[str]
    unscreened: frozenset[str]


@dataclass(frozen=True)
class LabelAck:
    doc_id: str
    superseded: bool
    screened: int
    identified: int


def rank_similarity(prev: Sequence[str], cur: Sequence[str]) -> float:
    """Spearman rank correlation between two rankings of the same ids.

    rho = 1 - 6 * sum(d^2) / (n (n^2 - 1)) with d the per-id displacement.
    Rankings of fewer than two ids are trivially identical (rho = 1.0).
    """
    if len(set(prev)) != len(prev) or len(set(cur)) != len(cur):
        raise ValidationError("rankings must not contain duplicate ids")
    if set(prev) != set(cur):
        raise ValidationError("rankings must cover the same id set")
    n = len(cur)
    if n < 2:
        return 1.0
    pos = {doc_id: i for i, doc_id in enumerate(prev)}
    d2 = sum((pos[doc_id] - j) ** 2 for j, doc_id in enumerate(cur))
    return 1.0 - 6.0 * d2 / (n * (n * n - 1))


def should_stop_training(
    history: Sequence[IterationRecord],
    rho_threshold: float | None = 0.95,
    patience: int = 1,
    max_training_size: int | None = None,
    max_iterations: int | None = None,
) -> bool:
    """Stop when recent rankings have settled or a budget cap is hit.

    True iff the last ``patience`` rank similarities are all at or above the
    threshold, or the training-size / iteration cap is reached. A null
    threshold disables the similarity rule (caps still apply).
    """
    if not history:
        raise ValidationError("needs at least one completed iteration")
    if patience < 1:
        raise ValidationError("patience must be >= 1")
    if max_training_size is not None and history[-1].training_size >= max_training_size:
        return True
    if max_iterations is not None and len(history) >= max_iterations:
        return True
    if rho_threshold is None:
        return False
    recent = history[-patience:]
    if len(recent) < patience:
        return False
    return all(
        r.rank_similarity is not None and r.rank_similarity >= rho_threshold
        for r in recent
    )


def should_stop_screening(
    recent_batch_included: int, batch_size: int, min_rate: float
) -> bool:
    """Advise stopping when the latest batch's inclusion rate fell below
    ``min_rate``. Advisory only: the screening team makes the call."""
    if batch_size <= 0:
        raise ValidationError("batch_size must be positive")
    if recent_batch_included < 0:
        raise ValidationError("included count must be >= 0")
    return recent_batch_included / batch_size < min_rate


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _sub_seed(*parts: int) -> int:
    return int(np.random.SeedSequence(list(parts)).generate_state(1)[0])


class Project:
    """Mutable engine state for one screening project.

    All mutating entry points serialize through ``self._lock`` (single-writer
    contract). Heavy work in :meth:`run_iteration` (training, scoring)
    happens outside the lock so label submission never blocks on a training
    job; the resulting state change is applied atomically afterwards.
    """

    def __init__(self, project_id: str, config: ProjectConfig, store=None):
        self.project_id = project_id
        self.config = config
        self.store = store
        self._lock = threading.RLock()

        self.documents: dict[str, Document] = {}
        self.texts: dict[str, ScreeningText] = {}
        self.feature_rows: dict[str, FeatureRow] | None = None

        self.phase = Phase.BOOTSTRAPPING
        self.ledger: list[LabelRecord] = []
        self.effective: dict[str, LabelRecord] = {}
        self.screened: set[str] = set()
        self.unscreened: set[str] = set()
        self.bootstrap_record: BootstrapRecord | None = None
        self.pending: set[str] = set()
        self.pending_order: list[str] = []
        self.batches: list[IssuedBatch] = []
        self.open_chunk: list[str] = []
        self.iterations: list[IterationRecord] = []
        self.model_version = 0
        self.models: list[ClassifierModel] = []
        self.snapshot: dict[str, sampling.ScoredDoc] = {}
        self.prev_ranking: list[str] | None = None
        self.final_queue: list[str] | None = None
        self._seq = 0

    # -- corpus ---------------------------------------------------------

    def attach_corpus(
        self,
        documents: Sequence[Document],
        texts: Mapping[str, ScreeningText],
        feature_rows: Mapping[str, FeatureRow] | None = None,
    ) -> None:
        with self._lock:
            if self.documents:
                raise PhaseError("corpus already loaded")
            if not documents:
                raise ValidationError("corpus is empty")
            for doc in documents:
                if doc.id not in texts:
                    raise ValidationError(f"screening text missing for {doc.id!r}")
                self.documents[doc.id] = doc
            self.texts = dict(texts)
            self.feature_rows = dict(feature_rows) if feature_rows is not None else None
            self.unscreened = set(self.documents)
            if self.store is not None:
                self.store.write_corpus(documents, texts)

    def _require_corpus(self) -> None:
        if not self.documents:
            raise PhaseError("no corpus loaded yet")

    def _ordered(self, ids: set[str]) -> list[str]:
        # Corpus insertion order keeps pool-dependent randomness reproducible
        # across processes (set iteration order is not).
        return [doc_id for doc_id in self.documents if doc_id in ids]

    def _next_seq(self) -> int:
        self._seq += 1
        return self._seq

    # -- bootstrap ------------------------------------------------------

    def bootstrap(self, k: int | None = None, rng: np.random.Generator | None = None) -> list[str]:
        """Issue the uniform-random initial batch for human screening."""
        with self._lock:
            self._require_corpus()
            if self.phase is not Phase.BOOTSTRAPPING:
                raise PhaseError(f"bootstrap not allowed in phase {self.phase.value}")
            if self.bootstrap_record is not None:
                raise PhaseError("initial batch already issued")
            k = self.config.init_size if k is None else k
            if k < 1:
                raise ValidationError("bootstrap size must be >= 1")
            pool = self._ordered(self.unscreened)
            clamped = k > len(pool)
            if clamped:
                warnings.warn(
                    f"bootstrap size {k} exceeds corpus size {len(pool)}; issuing all",
                    stacklevel=2,
                )
                k = len(pool)
            rng = rng if rng is not None else np.random.default_rng([self.config.seed, 1])
            picks = rng.choice(len(pool), size=k, replace=False)
            rec = BootstrapRecord(
                ids=tuple(pool[i] for i in picks), clamped=clamped, seq=self._next_seq()
            )
            self._apply_bootstrap(rec)
            if self.store is not None:
                self.store.append_bootstrap(rec)
            return list(rec.ids)

    def _apply_bootstrap(self, rec: BootstrapRecord) -> None:
        self.bootstrap_record = rec
        self.pending = set(rec.ids)
        self.pending_order = list(rec.ids)
        self.batches.append(IssuedBatch(index=0, kind="bootstrap", ids=rec.ids))
        self._seq = max(self._seq, rec.seq)

    # -- labels ---------------------------------------------------------

    def record_label(self, rec: LabelRecord) -> LabelAck:
        """Append one decision to the ledger and update project state."""
        with self._lock:
            if rec.doc_id not in self.documents:
                raise UnknownDocumentError(f"unknown document id {rec.doc_id!r}")
            if rec.decision not in DECISIONS:
                raise ValidationError(
                    f"decision must be one of {DECISIONS}, got {rec.decision!r}"
                )
            rec.timestamp = rec.timestamp or _utc_now()
            rec.iteration = max(0, len(self.batches) - 1)
            rec.seq = self._next_seq()
            superseded = rec.doc_id in self.effective
            self.ledger.append(rec)
            if self.store is not None:
                self.store.append_label(rec)
            self._apply_label(rec)
            return LabelAck(
                doc_id=rec.doc_id,
                superseded=superseded,
                screened=len(self.screened),
                identified=self.identified_count(),
            )

    def _apply_label(self, rec: LabelRecord) -> None:
        self._seq = max(self._seq, rec.seq)
        first_decision = rec.doc_id not in self.effective
        self.effective[rec.doc_id] = rec
        if not first_decision:
            return
        self.unscreened.discard(rec.doc_id)
        self.screened.add(rec.doc_id)
        self.pending.discard(rec.doc_id)
        if self.phase is Phase.PRIORITIZED_SCREENING:
            self.open_chunk.append(rec.doc_id)
            if len(self.open_chunk) >= self.config.batch_size:
                self.batches.append(
                    IssuedBatch(
                        index=len(self.batches),
                        kind="prioritized",
                        ids=tuple(self.open_chunk),
                    )
                )
                self.open_chunk = []
        if (
            self.phase is Phase.BOOTSTRAPPING
            and self.bootstrap_record is not None
            and not self.pending
        ):
            self.phase = Phase.ACTIVE_LEARNING
        if not self.unscreened:
            self._advance_to(Phase.DONE)

    def _advance_to(self, phase: Phase) -> None:
        if _PHASE_ORDER[phase] < _PHASE_ORDER[self.phase]:
            raise PhaseError(f"cannot move back from {self.phase.value} to {phase.value}")
        self.phase = phase

    def identified_count(self) -> int:
        return sum(1 for rec in self.effective.values() if rec.decision == INCLUDED)

    def effective_labels(self) -> dict[str, int]:
        return {
            doc_id: 1 if rec.decision == INCLUDED else 0
            for doc_id, rec in self.effective.items()
        }

    # -- the loop -------------------------------------------------------

    def run_iteration(self) -> IterationRecord:
        """Train, score the pool, check the stop rule, sample or stop.

        Requires every previously issued batch id to be labeled. Training
        and pool scoring run outside the writer lock; any ids labeled in the
        meantime are reconciled when the result is applied.
        """
        with self._lock:
            self._require_corpus()
            if self.phase is not Phase.ACTIVE_LEARNING:
                raise PhaseError(
                    f"run_iteration requires active_learning phase, project is "
                    f"{self.phase.value}"
                )
            if self.pending:
                raise PendingLabelsError(
                    "issued batch has unlabeled documents",
                    details={"unlabeled": sorted(self.pending)},
                )
            labels = self.effective_labels()
            training_items = [
                (doc_id, labels[doc_id]) for doc_id in self._ordered(self.screened)
            ]
            pool_ids = self._ordered(self.unscreened)
            index = len(self.iterations)

        training_set = TrainingSet(items=training_items)
        n0, n1 = training_set.class_counts()
        if n0 == 0 or n1 == 0:
            raise SingleClassError(
                "screened labels contain a single class; screen a wider sample first"
            )

        cfg = self.config
        # The split is re-drawn each iteration with the iteration index folded
        # into the seed. A draw that strands every minority label in the
        # validation side is retried deterministically.
        train_part = val_part = None
        for attempt in range(32):
            split_rng = np.random.default_rng([cfg.seed, 11, index, attempt])
            candidate = classifier.split_train_val(
                training_set, cfg.train_fraction, split_rng
            )
            counts = candidate[0].class_counts()
            if counts[0] > 0 and counts[1] > 0:
                train_part, val_part = candidate
                break
        if train_part is None:
            raise SingleClassError(
                "could not draw a train split containing both classes"
            )
        over_rng = np.random.default_rng([cfg.seed, 12, index])
        balanced = classifier.oversample(train_part, over_rng)

        models = []
        for run in range(cfg.model_runs):
            tc = cfg.train_config(seed=_sub_seed(cfg.seed, index, run))
            models.append(
                classifier.train(balanced, self.texts, tc, self.feature_rows)
            )
        val_scores = [
            classifier.evaluate_f1(m, val_part, self.texts, 0.5, self.feature_rows)
            for m in models
        ]
        val_f1 = sum(val_scores) / len(val_scores)

        pool_texts = [self.texts[doc_id] for doc_id in pool_ids]
        run_predictions = [
            classifier.predict(m, pool_texts, self.feature_rows) for m in models
        ]
        pooled: Sequence[sampling.ScoredDoc]
        if len(run_predictions) == 1:
            pooled = run_predictions[0]
        else:
            pooled = sampling.mean_predictions(run_predictions)

        ranking = [
            p.doc_id
            for p in sorted(pooled, key=lambda p: (-p.priority_score, p.doc_id))
        ]

        with self._lock:
            rho = None
            if self.prev_ranking is not None:
                current = set(ranking)
                prev_shared = [d for d in self.prev_ranking if d in current]
                rho = rank_similarity(prev_shared, ranking)
            version = self.model_version + 1
            draft = IterationRecord(
                index=index,
                strategy=cfg.strategy,
                sampled_ids=(),
                training_size=len(training_set),
                model_version=version,
                rank_similarity=rho,
                val_f1=val_f1,
                seq=0,
            )
            stop = should_stop_training(
                list(self.iterations) + [draft],
                rho_threshold=cfg.rho_threshold,
                patience=cfg.patience,
                max_training_size=cfg.max_training_size,
                max_iterations=cfg.max_iterations,
            )
            if stop:
                rec = replace(
                    draft, stopped=True, queue=tuple(ranking), seq=self._next_seq()
                )
            else:
                strat = sampling.resolve_strategy(cfg.strategy, cfg.batch_size)
                sampled = sampling.sample(
                    strat, pooled, cfg.batch_size, np.random.default_rng([cfg.seed, 13, index])
                )
                rec = replace(draft, sampled_ids=tuple(sampled), seq=self._next_seq())
            self._apply_iteration(rec)
            self.models = models
            self.snapshot = {p.doc_id: p for p in pooled}
            self.prev_ranking = ranking
            if self.store is not None:
                self.store.append_iteration(rec)
                self.store.write_predictions(version, pooled)
            return rec

    def _apply_iteration(self, rec: IterationRecord) -> None:
        if rec.model_version != self.model_version + 1:
            raise ValidationError(
                f"model version must increment by 1, got {rec.model_version} "
                f"after {self.model_version}"
            )
        self._seq = max(self._seq, rec.seq)
        self.model_version = rec.model_version
        self.iterations.append(rec)
        if rec.stopped:
            self._advance_to(Phase.PRIORITIZED_SCREENING)
            queue = list(rec.queue or ())
            self.final_queue = queue
        else:
            # Ids labeled while training ran need no re-issue.
            fresh = [d for d in rec.sampled_ids if d in self.unscreened]
            self.pending = set(fresh)
            self.pending_order = fresh
            self.batches.append(
                IssuedBatch(index=len(self.batches), kind="query", ids=rec.sampled_ids)
            )

    # -- prioritized phase ----------------------------------------------

    def prioritized_queue(self) -> list[str]:
        """Remaining unscreened ids in descending final priority order."""
        with self._lock:
            if self.final_queue is None:
                raise PhaseError("no final model yet; finish active learning first")
            return [d for d in self.final_queue if d in self.unscreened]

    # -- views ----------------------------------------------------------

    def state(self) -> ProjectState:
        with self._lock:
            return ProjectState(
                project_id=self.project_id,
                phase=self.phase,
                model_version=self.model_version,
                screened=frozenset(self.screened),
                unscreened=frozenset(self.unscreened),
            )

    def batch_included(self, ids: Iterable[str]) -> tuple[int, int]:
        """(labeled, included-so-far) among the given batch ids."""
        labeled = included = 0
        for doc_id in ids:
            rec = self.effective.get(doc_id)
            if rec is not None:
                labeled += 1
                included += 1 if rec.decision == INCLUDED else 0
        return labeled, included

    def iteration_history(self) -> list[IterationRecord]:
        """Iteration records with batch inclusion counts filled in where the
        sampled batch has been fully labeled."""
        with self._lock:
            out = []
            for rec in self.iterations:
                count: int | None = None
                if rec.sampled_ids:
                    labeled, included = self.batch_included(rec.sampled_ids)
                    if labeled == len(rec.sampled_ids):
                        count = included
                out.append(replace(rec, batch_included_count=count))
            return out

    def batch_history(self) -> list[dict]:
        """Per-batch accounting: bootstrap, query batches, then prioritized
        chunks grouped by label arrival order."""
        with self._lock:
            rows = []
            all_batches = list(self.batches)
            if self.open_chunk:
                all_batches.append(
                    IssuedBatch(
                        index=len(self.batches),
                        kind="prioritized",
                        ids=tuple(self.open_chunk),
                    )
                )
            for batch in all_batches:
                labeled, included = self.batch_included(batch.ids)
                rows.append(
                    {
                        "index": batch.index,
                        "kind": batch.kind,
                        "size": len(batch.ids),
                        "labeled": labeled,
                        "included": included,
                        "inclusion_rate": included / labeled if labeled else None,
                    }
                )
            return rows

    def next_batch(self, limit: int | None = None) -> list[tuple[str, float | None]]:
        """Upcoming (doc_id, priority_score) pairs for human screening."""
        with self._lock:
            self._require_corpus()
            limit = self.config.batch_size if limit is None else limit
            if limit < 1:
                raise ValidationError("limit must be >= 1")
            if self.phase is Phase.DONE:
                return []
            if self.phase is Phase.BOOTSTRAPPING and self.bootstrap_record is None:
                self.bootstrap()
            if self.phase in (Phase.BOOTSTRAPPING, Phase.ACTIVE_LEARNING):
                ids = [d for d in self.pending_order if d in self.pending]
            else:
                ids = self.prioritized_queue()
            out = []
            for doc_id in ids[:limit]:
                scored = self.snapshot.get(doc_id)
                ps = scored.priority_score if scored is not None else None
                if self.phase is Phase.BOOTSTRAPPING:
                    ps = None
                out.append((doc_id, ps))
            return out

    def advice(self) -> dict:
        """Stop-training / stop-screening advice with supporting numbers.

        Advisory in live use; the simulator treats the same signals as
        binding.
        """
        with self._lock:
            cfg = self.config
            last_rho = self.iterations[-1].rank_similarity if self.iterations else None
            stop_training = bool(self.iterations) and should_stop_training(
                self.iterations,
                rho_threshold=cfg.rho_threshold,
                patience=cfg.patience,
                max_training_size=cfg.max_training_size,
                max_iterations=cfg.max_iterations,
            )
            chunks = [b for b in self.batches if b.kind == "prioritized"]
            stop_screening = False
            last_rate = None
            last_included = None
            if chunks:
                _, last_included = self.batch_included(chunks[-1].ids)
                last_rate = last_included / len(chunks[-1].ids)
                stop_screening = should_stop_screening(
                    last_included, len(chunks[-1].ids), cfg.min_inclusion_rate
                )
            return {
                "phase": self.phase.value,
                "stop_training": {
                    "advised": stop_training,
                    "rank_similarity": last_rho,
                    "threshold": cfg.rho_threshold,
                    "patience": cfg.patience,
                    "training_size": self.iterations[-1].training_size
                    if self.iterations
                    else 0,
                    "max_training_size": cfg.max_training_size,
                },
                "stop_screening": {
                    "advised": stop_screening,
                    "batch_included": last_included,
                    "batch_inclusion_rate": last_rate,
                    "min_rate": cfg.min_inclusion_rate,
                },
            }

    # -- event sourcing ---------------------------------------------------

    def events(self) -> list[tuple[int, str, object]]:
        """The project's full event stream ordered by sequence number."""
        with self._lock:
            stream: list[tuple[int, str, object]] = []
            if self.bootstrap_record is not None:
                stream.append((self.bootstrap_record.seq, "bootstrap", self.bootstrap_record))
            stream.extend((rec.seq, "label", rec) for rec in self.ledger)
            stream.extend((rec.seq, "iteration", rec) for rec in self.iterations)
            stream.sort(key=lambda item: item[0])
            return stream


def replay(
    project_id: str,
    config: ProjectConfig,
    documents: Sequence[Document],
    texts: Mapping[str, ScreeningText],
    events: Iterable[tuple[int, str, object]],
) -> Project:
    """Rebuild a project from its event stream.

    Models and prediction snapshots are not reconstructed (they are derived
    artifacts); everything in :class:`ProjectState` is.
    """
    project = Project(project_id, config, store=None)
    project.attach_corpus(documents, texts)
    for seq, kind, rec in sorted(events, key=lambda item: item[0]):
        if kind == "bootstrap":
            project._apply_bootstrap(rec)
        elif kind == "label":
            project.ledger.append(rec)
            project._apply_label(rec)
        elif kind == "iteration":
            project._apply_iteration(rec)
        else:
            raise ValidationError(f"unknown event kind {kind!r}")
    return project
