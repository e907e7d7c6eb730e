"""Replay experiments on fully labeled corpora with an oracle screener.

The simulator drives the project engine exactly as a human team would, except
that labels come instantly from the corpus ground truth. Each experiment cell
(strategy x training size x seed) runs the full loop: bootstrap, query
batches until the training-size cap stops training, then prioritized
screening of everything left. Because the oracle never mislabels, the
resulting effort/inclusion curves are exact.

Synthetic corpora make the experiments desk-scale. Documents are built from
templated sentences over a neutral vocabulary; with probability ``signal`` an
included document carries class-indicative cue tokens and an excluded one
carries distractor tokens, while the remainder stay ambiguous. Cue and
distractor tokens are drawn from skewed (Zipf-like) distributions, so rare
cues reward strategies that explore where the model is unsure.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import classifier, metrics, sampling
from .classifier import TrainingSet, hash_row
from .corpus import DEFAULT_FILTERS, Document, build_screening_texts
from .engine import EXCLUDED, INCLUDED, LabelRecord, Phase, Project, ProjectConfig
from .errors import TargetNotReachedError, ValidationError
from .metrics import HeIrCurve

# Desk-scale fixture defaults; production-scale regimes (tens of thousands of
# documents, thousand-document batches) stay config-reachable.
FIXTURE_N = 10_000
FIXTURE_PREVALENCE = 0.077
FIXTURE_SIGNAL = 0.9
FIXTURE_INIT_SIZE = 500
FIXTURE_BATCH_SIZE = 250
FIXTURE_SIZES = (500, 1000, 2000)
FIXTURE_SEEDS = (0, 1, 2, 3, 4)


@dataclass
class OracleCorpus:
    documents: list[Document]
    texts: dict
    truth: dict[str, int]
    prevalence: float
    _feature_rows: dict | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return len(self.documents)

    @property
    def n_included(self) -> int:
        return sum(self.truth.values())

    def feature_rows(self) -> dict:
        """Hashed features for every document, computed once per corpus."""
        if self._feature_rows is None:
            self._feature_rows = {
                doc_id: hash_row(st.text) for doc_id, st in self.texts.items()
            }
        return self._feature_rows


@dataclass(frozen=True)
class ExperimentConfig:
    strategies: tuple[str, ...] = ("random", "lc", "hp")
    training_sizes: tuple[int, ...] = (1000, 3000, 5000, 7000)
    seeds: tuple[int, ...] = (0, 1, 2, 3, 4)
    target_ir: float = 0.8
    batch_size: int = 1000
    init_size: int = 1000
    model_runs: int = 1

    def __post_init__(self):
        if not self.strategies or not self.training_sizes or not self.seeds:
            raise ValidationError("strategies, training_sizes and seeds must be non-empty")
        if list(self.training_sizes) != sorted(self.training_sizes):
            raise ValidationError("training_sizes must be ascending")
        if not (0.0 < self.target_ir <= 1.0):
            raise ValidationError("target_ir must be in (0, 1]")
        for name in self.strategies:
            sampling.resolve_strategy(name)


# --- synthetic corpus --------------------------------------------------------

_NEUTRAL_TOPICS = [
    "land tenure", "road access", "school enrollment", "water points",
    "savings groups", "maternal health", "market prices", "crop rotation",
    "household income", "extension services", "food security", "child growth",
    "labor supply", "energy access", "migration flows", "local governance",
]
_REGIONS = [
    "northern Ghana", "rural Kenya", "Bangladesh", "the Sahel", "Nepal",
    "eastern Uganda", "Bihar", "coastal Mozambique", "Malawi", "Honduras",
    "rural Ethiopia", "Tajikistan", "western Tanzania", "the Mekong delta",
]
_DESIGNS = [
    "a randomized controlled trial", "a difference-in-differences design",
    "propensity score matching", "a regression discontinuity design",
    "a panel survey", "an instrumental variables approach",
]
_CUE_TOKENS = [
    "agroforestry", "biofortification", "microirrigation",
    "intercropping", "vermicompost", "drip-fed", "polyculture", "silvopasture",
    "bund", "mulching", "rhizobium", "windbreak", "fallowing", "terracing",
    "greenmanure", "zaipits", "bokashi", "keyhole", "swales", "ratooning",
    "coppicing", "nitrogenfix", "vetiver", "duckweed", "azolla", "biochar",
    "pushpull", "warrantage", "zerotill", "cisterns",
]
_DISTRACTOR_TOKENS = [
    "spectroscopy", "quasar", "topology", "enzyme", "polymer", "neutrino",
    "sonnet", "jurisprudence", "cathedral", "antenna", "glacier", "synthesizer",
    "chessboard", "propulsion", "genome", "oscillator", "baroque", "tectonics",
    "cryostat", "metaphysics", "violoncello", "radar", "karst", "phoneme",
    "aerofoil", "isotope", "madrigal", "pendulum", "lithography", "catalysis",
]
_PUBLICATION_TYPES = ["journal", "report", "working paper", "conference proceeding"]
_SOURCES = ["J Dev Econ", "World Dev", "Food Policy", "Dev Policy Rev", "grey"]


def _zipf_weights(n: int) -> np.ndarray:
    w = 1.0 / np.arange(1, n + 1)
    return w / w.sum()


def generate_synthetic_corpus(
    n: int, prevalence: float, signal: float, seed: int
) -> OracleCorpus:
    """Deterministic labeled corpus with a tunable learnable signal.

    ``signal`` is the probability that a document carries class-indicative
    vocabulary (cue tokens when included, distractor tokens when excluded);
    the rest read as neutral research prose, unlearnable by construction.
    """
    if not (0.0 < prevalence < 1.0):
        raise ValidationError("prevalence must be in (0, 1)")
    if not (0.0 <= signal <= 1.0):
        raise ValidationError("signal must be in [0, 1]")
    n_included = int(round(n * prevalence))
    if n_included < 2:
        raise ValidationError("n * prevalence must be at least 2")

    rng = np.random.default_rng([seed, n])
    included_idx = set(rng.choice(n, size=n_included, replace=False).tolist())
    cue_w = _zipf_weights(len(_CUE_TOKENS))
    distractor_w = _zipf_weights(len(_DISTRACTOR_TOKENS))

    documents: list[Document] = []
    truth: dict[str, int] = {}
    for i in range(n):
        doc_id = f"d{i:05d}"
        label = 1 if i in included_idx else 0
        topic = _NEUTRAL_TOPICS[rng.integers(0, len(_NEUTRAL_TOPICS))]
        region = _REGIONS[rng.integers(0, len(_REGIONS))]
        design = _DESIGNS[rng.integers(0, len(_DESIGNS))]
        bearing = rng.random() < signal
        sentences = [
            f"This study examines {topic} in {region} using {design}.",
            f"Data cover {int(rng.integers(40, 400)) * 10} households surveyed "
            f"between {int(rng.integers(1995, 2015))} and {int(rng.integers(2015, 2023))}.",
        ]
        marker_words: list[str] = []
        if bearing:
            vocab, weights = (
                (_CUE_TOKENS, cue_w) if label else (_DISTRACTOR_TOKENS, distractor_w)
            )
            k = int(rng.integers(1, 3))
            marker_words = [vocab[j] for j in rng.choice(len(vocab), size=k, p=weights)]
            sentences.insert(
                1,
                f"The intervention centers on {' and '.join(marker_words)} "
                f"practices adopted locally.",
            )
        if rng.random() < 0.3:
            sentences.append(f"Effects on {topic} are discussed for {region}.")
        if rng.random() < 0.05:
            sentences.append(f"© {int(rng.integers(2000, 2023))} Elsevier B.V.")
        title_head = marker_words[0].capitalize() if marker_words else topic.capitalize()
        title = f"{title_head} and {topic} in {region}"
        documents.append(
            Document(
                id=doc_id,
                title=title,
                abstract=" ".join(sentences),
                keywords=tuple([topic] + marker_words),
                year=int(rng.integers(1995, 2023)),
                publication_type=_PUBLICATION_TYPES[
                    rng.integers(0, len(_PUBLICATION_TYPES))
                ],
                source=_SOURCES[rng.integers(0, len(_SOURCES))],
            )
        )
        truth[doc_id] = label

    texts = build_screening_texts(documents, DEFAULT_FILTERS)
    return OracleCorpus(
        documents=documents, texts=texts, truth=truth, prevalence=prevalence
    )


def load_labeled_corpus(path: str | Path) -> OracleCorpus:
    """Read a fully labeled JSONL corpus; each record needs a ``label`` key
    (1/0 or included/excluded) next to the usual document fields."""
    from .corpus import ingest

    corpus = ingest(path, "jsonl")
    truth: dict[str, int] = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        obj = json.loads(line)
        label = obj.get("label")
        if label in (1, "1", "included", True):
            truth[obj["id"]] = 1
        elif label in (0, "0", "excluded", False):
            truth[obj["id"]] = 0
        else:
            raise ValidationError(f"document {obj['id']!r} lacks a usable label")
    texts = build_screening_texts(corpus.documents, DEFAULT_FILTERS)
    prevalence = sum(truth.values()) / len(truth)
    return OracleCorpus(
        documents=corpus.documents, texts=texts, truth=truth, prevalence=prevalence
    )


# --- cells -------------------------------------------------------------------


@dataclass
class CellResult:
    strategy: str
    training_size: int
    seed: int
    curve: HeIrCurve
    he_at_target: float | None
    target_reached: bool
    val_f1: float | None
    pool_f1: float | None
    al_batches: list[dict]
    iterations: int
    project: Project | None = field(default=None, repr=False)


def _oracle_label(project: Project, corpus: OracleCorpus, doc_id: str, screener: str) -> None:
    decision = INCLUDED if corpus.truth[doc_id] == 1 else EXCLUDED
    project.record_label(
        LabelRecord(doc_id=doc_id, decision=decision, screener_id=screener)
    )


def run_cell(
    corpus: OracleCorpus,
    strategy: str,
    training_size: int,
    seed: int,
    config: ExperimentConfig,
    keep_project: bool = False,
) -> CellResult:
    """One full oracle-screened session for a (strategy, size, seed) cell."""
    init = min(config.init_size, training_size)
    project = Project(
        f"cell-{strategy}-{training_size}-s{seed}",
        ProjectConfig(
            strategy=strategy,
            batch_size=config.batch_size,
            init_size=init,
            rho_threshold=None,  # grid cells stop on the size cap alone
            max_training_size=training_size,
            model_runs=config.model_runs,
            seed=seed,
        ),
    )
    project.attach_corpus(corpus.documents, corpus.texts, corpus.feature_rows())

    screening_order: list[str] = []
    for doc_id in project.bootstrap():
        _oracle_label(project, corpus, doc_id, "oracle")
        screening_order.append(doc_id)

    while project.phase is Phase.ACTIVE_LEARNING:
        record = project.run_iteration()
        if record.stopped:
            break
        for doc_id in record.sampled_ids:
            _oracle_label(project, corpus, doc_id, "oracle")
            screening_order.append(doc_id)

    # Pool F1 before prioritized screening consumes the pool: the final
    # model scored exactly these unscreened documents.
    pool_scored = [
        (project.snapshot[d].priority_score, corpus.truth[d])
        for d in project.prioritized_queue()
    ]
    pool_f1 = classifier.f1_from_scores(pool_scored).f1 if pool_scored else None

    for doc_id in project.prioritized_queue():
        _oracle_label(project, corpus, doc_id, "oracle")
        screening_order.append(doc_id)

    curve = metrics.build_curve(screening_order, corpus.truth, corpus.n, corpus.n_included)
    try:
        he = metrics.he_at_target(curve, config.target_ir)
        reached = True
    except TargetNotReachedError:
        he = None
        reached = False

    history = project.iteration_history()
    al_batches = [
        {
            "index": rec.index,
            "sampled": len(rec.sampled_ids),
            "included": rec.batch_included_count,
        }
        for rec in history
        if rec.sampled_ids
    ]
    return CellResult(
        strategy=strategy,
        training_size=training_size,
        seed=seed,
        curve=curve,
        he_at_target=he,
        target_reached=reached,
        val_f1=history[-1].val_f1 if history else None,
        pool_f1=pool_f1,
        al_batches=al_batches,
        iterations=len(history),
        project=project if keep_project else None,
    )


def no_ml_curve(corpus: OracleCorpus, seed: int) -> HeIrCurve:
    """Control run: humans screen the whole corpus in random order."""
    rng = np.random.default_rng([seed, 99])
    ids = [d.id for d in corpus.documents]
    order = [ids[i] for i in rng.permutation(len(ids))]
    return metrics.build_curve(order, corpus.truth, corpus.n, corpus.n_included)


# --- experiment grid ---------------------------------------------------------


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    cells: list[CellResult]
    wall_seconds: float

    def cell(self, strategy: str, size: int, seed: int) -> CellResult:
        for c in self.cells:
            if (c.strategy, c.training_size, c.seed) == (strategy, size, seed):
                return c
        raise KeyError((strategy, size, seed))

    def group(self, strategy: str, size: int) -> list[CellResult]:
        return [
            c
            for c in self.cells
            if c.strategy == strategy and c.training_size == size
        ]


def run_experiment(
    corpus: OracleCorpus,
    config: ExperimentConfig = ExperimentConfig(),
    out_dir: str | Path | None = None,
) -> ExperimentResult:
    """Run the full strategy x size x seed grid; optionally write reports."""
    start = time.monotonic()
    cells = []
    for strategy in config.strategies:
        for size in config.training_sizes:
            for seed in config.seeds:
                cells.append(run_cell(corpus, strategy, size, seed, config))
    result = ExperimentResult(
        config=config, cells=cells, wall_seconds=time.monotonic() - start
    )
    if out_dir is not None:
        write_report(result, Path(out_dir))
    return result


def _mean_se(values: Sequence[float]) -> tuple[float | None, float | None]:
    if not values:
        return None, None
    mean = float(np.mean(values))
    if len(values) < 2:
        return mean, None
    se = float(np.std(values, ddof=1) / math.sqrt(len(values)))
    return mean, se


def compare_strategies(result: ExperimentResult) -> dict:
    """Per-strategy summary: best size, effort at target, and savings.

    Savings are computed against the no-assistance diagonal (whose effort at
    target t is t exactly, the expected value of random-order screening) and
    pairwise against the other strategies, in absolute points and relative
    terms. Strategies that never reach the target are flagged and left out
    of the savings arithmetic.
    """
    config = result.config
    target = config.target_ir
    rows: dict[str, dict] = {}
    for strategy in config.strategies:
        per_size = []
        for size in config.training_sizes:
            cells = result.group(strategy, size)
            reached = [c.he_at_target for c in cells if c.target_reached]
            mean, se = _mean_se(reached)
            per_size.append(
                {
                    "training_size": size,
                    "he_mean": mean,
                    "he_se": se,
                    "seeds_reached": len(reached),
                    "seeds": len(cells),
                    "val_f1_mean": _mean_se(
                        [c.val_f1 for c in cells if c.val_f1 is not None]
                    )[0],
                    "pool_f1_mean": _mean_se(
                        [c.pool_f1 for c in cells if c.pool_f1 is not None]
                    )[0],
                }
            )
        candidates = [row for row in per_size if row["he_mean"] is not None]
        if candidates:
            best = min(candidates, key=lambda row: row["he_mean"])
            saved_abs, saved_rel = metrics.effort_saved(target, best["he_mean"])
            rows[strategy] = {
                "unreachable": False,
                "best_training_size": best["training_size"],
                "he_at_target_mean": best["he_mean"],
                "he_at_target_se": best["he_se"],
                "per_size": per_size,
                "saved_vs_no_ml_abs": saved_abs,
                "saved_vs_no_ml_rel": saved_rel,
            }
        else:
            rows[strategy] = {"unreachable": True, "per_size": per_size}

    for strategy, row in rows.items():
        if row.get("unreachable"):
            continue
        versus = {}
        for other, other_row in rows.items():
            if other == strategy or other_row.get("unreachable"):
                continue
            absolute, relative = metrics.effort_saved(
                other_row["he_at_target_mean"], row["he_at_target_mean"]
            )
            versus[other] = {"abs": absolute, "rel": relative}
        row["saved_vs"] = versus

    return {
        "target_ir": target,
        "no_ml": {"he_at_target": target, "note": "expected value of random order"},
        "strategies": rows,
    }


# --- holdout evaluation mode -------------------------------------------------


@dataclass
class HoldoutResult:
    train_n: int
    test_n: int
    accuracy: float
    f1: float
    curve: HeIrCurve
    he_at_target: float | None


def run_holdout_eval(
    corpus: OracleCorpus,
    train_fraction: float = 0.85,
    seed: int = 0,
    target_ir: float = 0.8,
) -> HoldoutResult:
    """Train once on a labeled split and rank the held-out remainder.

    Mirrors evaluating a deployed screening model on the subset a team
    already labeled: single train/test split, accuracy and F1 on the test
    side, and the effort/inclusion curve of screening the test set in
    descending score order.
    """
    rng = np.random.default_rng([seed, 7])
    all_items = [(d.id, corpus.truth[d.id]) for d in corpus.documents]
    train_part, test_part = classifier.split_train_val(
        TrainingSet(items=all_items), train_fraction, rng
    )
    balanced = classifier.oversample(train_part, np.random.default_rng([seed, 8]))
    model = classifier.train(
        balanced,
        corpus.texts,
        classifier.TrainConfig(seed=seed),
        corpus.feature_rows(),
    )
    test_texts = [corpus.texts[doc_id] for doc_id, _ in test_part.items]
    predictions = classifier.predict(model, test_texts, corpus.feature_rows())
    labels = {doc_id: y for doc_id, y in test_part.items}
    scored = [(p.priority_score, labels[p.doc_id]) for p in predictions]
    report = classifier.f1_from_scores(scored)
    accuracy = (report.tp + report.tn) / len(scored)

    ranked = sorted(predictions, key=lambda p: (-p.priority_score, p.doc_id))
    order = [p.doc_id for p in ranked]
    n_included_test = sum(labels.values())
    curve = metrics.build_curve(order, labels, len(order), max(1, n_included_test))
    try:
        he = metrics.he_at_target(curve, target_ir)
    except TargetNotReachedError:
        he = None
    return HoldoutResult(
        train_n=len(train_part),
        test_n=len(test_part),
        accuracy=accuracy,
        f1=report.f1,
        curve=curve,
        he_at_target=he,
    )


# --- report store ------------------------------------------------------------


def write_report(result: ExperimentResult, out_dir: Path) -> None:
    """One directory per experiment: per-cell curve CSVs, a plot-ready
    long-format CSV, and a summary JSON with the comparison table."""
    out_dir = Path(out_dir)
    cells_dir = out_dir / "cells"
    cells_dir.mkdir(parents=True, exist_ok=True)

    long_path = out_dir / "curves_long.csv"
    with open(long_path, "w", encoding="utf-8") as long_fh:
        long_fh.write("strategy,size,seed,he,ir\n")
        for cell in result.cells:
            name = f"{cell.strategy}_{cell.training_size}_s{cell.seed}.csv"
            (cells_dir / name).write_text(cell.curve.to_csv(), encoding="utf-8")
            for p in cell.curve.points:
                long_fh.write(
                    f"{cell.strategy},{cell.training_size},{cell.seed},"
                    f"{p.he!r},{p.ir!r}\n"
                )

    summary = {
        "config": {
            "strategies": list(result.config.strategies),
            "training_sizes": list(result.config.training_sizes),
            "seeds": list(result.config.seeds),
            "target_ir": result.config.target_ir,
            "batch_size": result.config.batch_size,
            "init_size": result.config.init_size,
        },
        "wall_seconds": result.wall_seconds,
        "cells": [
            {
                "strategy": c.strategy,
                "training_size": c.training_size,
                "seed": c.seed,
                "he_at_target": c.he_at_target,
                "target_reached": c.target_reached,
                "val_f1": c.val_f1,
                "pool_f1": c.pool_f1,
                "iterations": c.iterations,
                "al_batches": c.al_batches,
            }
            for c in result.cells
        ],
        "comparison": compare_strategies(result),
    }
    (out_dir / "summary.json").write_text(
        json.dumps(summary, indent=2), encoding="utf-8"
    )
