"""Probabilistic binary relevance classifier.

Class 1 means "included" (relevant), class 0 "excluded". The reference model
is a hashed bag-of-words linear classifier: lowercased word 1- and 2-grams
are hashed into ``2**hash_bits`` buckets and a two-output linear layer is
trained by per-sample stochastic gradient descent on cross-entropy. It stands
in for heavier encoder models behind the same two-logit prediction contract;
an external model can be plugged in through :class:`ExternalAdapter`, which
speaks line-delimited JSON over a subprocess pipe.

The priority score of a document is the normalized-exponential probability of
class 1, and the sampling uncertainty is one minus the larger of the two
class probabilities, i.e. ``min(PS, 1 - PS)`` for the binary case.
"""

from __future__ import annotations

import hashlib
import json
import math
import re
import subprocess
import zlib
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

import numpy as np
from scipy import sparse

from .corpus import ScreeningText
from .errors import EvidscreenError, SingleClassError, ValidationError

_TOKEN = re.compile(r"[a-z0-9]+(?:['\-][a-z0-9]+)*")

INCLUDED = 1
EXCLUDED = 0


def priority_score(logits: Sequence[float]) -> float:
    """Probability of class 1 from a two-logit prediction.

    Computed as the normalized exponential of the logits with the max
    component subtracted first, so large logits cannot overflow.
    """
    l0, l1 = float(logits[0]), float(logits[1])
    if not (math.isfinite(l0) and math.isfinite(l1)):
        raise ValidationError(f"logits must be finite, got ({l0}, {l1})")
    m = l0 if l0 > l1 else l1
    e0 = math.exp(l0 - m)
    e1 = math.exp(l1 - m)
    return e1 / (e0 + e1)


def uncertainty(logits: Sequence[float]) -> float:
    """One minus the max class probability; equals ``min(PS, 1 - PS)``.

    Shares :func:`priority_score`'s evaluation path so the identity holds
    exactly in floating point, not just analytically.
    """
    ps = priority_score(logits)
    return min(ps, 1.0 - ps)


@dataclass(frozen=True)
class Prediction:
    """Per-document classifier output."""

    doc_id: str
    logits: tuple[float, float]
    priority_score: float
    uncertainty: float


@dataclass
class TrainingSet:
    """Labeled (doc_id, label) pairs; label 1 = included, 0 = excluded."""

    items: list[tuple[str, int]]

    def __post_init__(self):
        for doc_id, label in self.items:
            if label not in (0, 1):
                raise ValidationError(f"label for {doc_id!r} must be 0 or 1, got {label!r}")

    def __len__(self) -> int:
        return len(self.items)

    def class_counts(self) -> tuple[int, int]:
        n1 = sum(1 for _, y in self.items if y == INCLUDED)
        return len(self.items) - n1, n1


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 5
    learning_rate: float = 0.1
    hash_bits: int = 18
    seed: int = 0


@dataclass
class ClassifierModel:
    """Trained model handle.

    ``kind`` selects the prediction route: "reference-linear" carries the
    hashed linear layer's parameters; "external-adapter" carries the command
    line of a subprocess that answers doc_id/text requests with two logits.
    ``version`` is assigned by the project engine and strictly increases per
    retrain within a project.
    """

    kind: str
    parameters: dict
    version: int = 0
    trained_on: str = ""


def oversample(training_set: TrainingSet, rng: np.random.Generator) -> TrainingSet:
    """Random over-sampling: duplicate minority items until classes balance.

    All original items are retained in order; duplicates (drawn with
    replacement from the minority class) are appended.
    """
    n0, n1 = training_set.class_counts()
    if n0 == 0 or n1 == 0:
        raise SingleClassError("cannot balance single-class set")
    if n0 == n1:
        return TrainingSet(items=list(training_set.items))
    minority_label = INCLUDED if n1 < n0 else EXCLUDED
    minority = [item for item in training_set.items if item[1] == minority_label]
    deficit = abs(n0 - n1)
    picks = rng.integers(0, len(minority), size=deficit)
    extra = [minority[i] for i in picks]
    return TrainingSet(items=list(training_set.items) + extra)


def split_train_val(
    training_set: TrainingSet,
    fraction: float = 0.85,
    rng: np.random.Generator | None = None,
) -> tuple[TrainingSet, TrainingSet]:
    """Random train/validation partition with |train| = round(fraction * n).

    The validation side never ends up empty (and neither does the train
    side), so the degenerate 2-item set splits 1/1. Rebalancing is the
    caller's job and must happen after the split, on the train part only,
    so duplicated items cannot leak across it.
    """
    if not (0.0 < fraction < 1.0):
        raise ValidationError(f"fraction must be in (0, 1), got {fraction}")
    n = len(training_set)
    if n < 2:
        raise ValidationError("need at least 2 items to split")
    rng = rng or np.random.default_rng()
    n_train = int(round(fraction * n))
    n_train = max(1, min(n - 1, n_train))
    order = rng.permutation(n)
    train_idx = set(order[:n_train].tolist())
    train = [training_set.items[i] for i in range(n) if i in train_idx]
    val = [training_set.items[i] for i in range(n) if i not in train_idx]
    return TrainingSet(items=train), TrainingSet(items=val)


def fingerprint(training_set: TrainingSet) -> str:
    """Order-insensitive digest of the labeled pairs."""
    h = hashlib.sha256()
    for doc_id, label in sorted(training_set.items):
        h.update(f"{doc_id}\x00{label}\n".encode())
    return h.hexdigest()[:16]


# --- hashed bag-of-words features -----------------------------------------

FeatureRow = tuple[np.ndarray, np.ndarray]  # (unique bucket indices, counts)


def hash_row(text: str, hash_bits: int = 18) -> FeatureRow:
    """Hash lowercased word 1/2-grams into ``2**hash_bits`` buckets.

    Counts are aggregated per bucket so each row has unique indices; that
    keeps the SGD scatter-update exact without ``np.add.at``.
    """
    mask = (1 << hash_bits) - 1
    words = _TOKEN.findall(text.lower())
    counts: dict[int, float] = {}
    for i, w in enumerate(words):
        b = zlib.crc32(w.encode()) & mask
        counts[b] = counts.get(b, 0.0) + 1.0
        if i + 1 < len(words):
            b2 = zlib.crc32(f"{w} {words[i + 1]}".encode()) & mask
            counts[b2] = counts.get(b2, 0.0) + 1.0
    if not counts:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.float64)
    idx = np.fromiter(counts.keys(), dtype=np.int64, count=len(counts))
    val = np.fromiter(counts.values(), dtype=np.float64, count=len(counts))
    return idx, val


def build_matrix(rows: Sequence[FeatureRow], hash_bits: int) -> sparse.csr_matrix:
    indptr = np.zeros(len(rows) + 1, dtype=np.int64)
    for i, (idx, _) in enumerate(rows):
        indptr[i + 1] = indptr[i] + len(idx)
    if rows:
        indices = np.concatenate([idx for idx, _ in rows])
        data = np.concatenate([val for _, val in rows])
    else:
        indices = np.empty(0, dtype=np.int64)
        data = np.empty(0, dtype=np.float64)
    return sparse.csr_matrix(
        (data, indices, indptr), shape=(len(rows), 1 << hash_bits)
    )


def _rows_for(
    ids_and_texts: Sequence[tuple[str, str]],
    hash_bits: int,
    feature_rows: Mapping[str, FeatureRow] | None,
) -> list[FeatureRow]:
    rows = []
    for doc_id, text in ids_and_texts:
        if feature_rows is not None and doc_id in feature_rows:
            rows.append(feature_rows[doc_id])
        else:
            rows.append(hash_row(text, hash_bits))
    return rows


# --- training and prediction -----------------------------------------------


def train(
    training_set: TrainingSet,
    texts: Mapping[str, ScreeningText],
    config: TrainConfig = TrainConfig(),
    feature_rows: Mapping[str, FeatureRow] | None = None,
) -> ClassifierModel:
    """Fit the reference linear model by per-sample SGD on cross-entropy.

    Deterministic for a fixed config seed: weights start at zero and the
    only randomness is the per-epoch sample order. ``feature_rows`` lets
    callers reuse pre-hashed features across retrains.
    """
    if not training_set.items:
        raise ValidationError("training set is empty")
    n0, n1 = training_set.class_counts()
    if n0 == 0 or n1 == 0:
        raise SingleClassError("training set contains a single class")
    missing = [
        doc_id
        for doc_id, _ in training_set.items
        if doc_id not in texts and (feature_rows is None or doc_id not in feature_rows)
    ]
    if missing:
        raise ValidationError(f"screening text missing for ids: {missing[:5]}")

    pairs = []
    for doc_id, _ in training_set.items:
        text = texts[doc_id].text if doc_id in texts else ""
        pairs.append((doc_id, text))
    rows = _rows_for(pairs, config.hash_bits, feature_rows)
    y = np.array([label for _, label in training_set.items], dtype=np.int64)

    dim = 1 << config.hash_bits
    w = np.zeros((2, dim), dtype=np.float64)
    b = np.zeros(2, dtype=np.float64)
    lr = config.learning_rate
    rng = np.random.default_rng(config.seed)

    m = len(rows)
    for _ in range(config.epochs):
        for i in rng.permutation(m):
            idx, val = rows[i]
            if len(idx) == 0:
                z = b.copy()
            else:
                z = w[:, idx] @ val + b
            z -= z.max()
            e = np.exp(z)
            p = e / e.sum()
            p[y[i]] -= 1.0
            if len(idx):
                w[:, idx] -= lr * np.outer(p, val)
            b -= lr * p

    return ClassifierModel(
        kind="reference-linear",
        parameters={"w": w, "b": b, "hash_bits": config.hash_bits},
        trained_on=fingerprint(training_set),
    )


def _predict_linear(
    model: ClassifierModel,
    texts: Sequence[ScreeningText],
    feature_rows: Mapping[str, FeatureRow] | None,
) -> np.ndarray:
    hash_bits = model.parameters["hash_bits"]
    rows = _rows_for([(t.doc_id, t.text) for t in texts], hash_bits, feature_rows)
    x = build_matrix(rows, hash_bits)
    return x @ model.parameters["w"].T + model.parameters["b"]


def _predict_adapter(model: ClassifierModel, texts: Sequence[ScreeningText]) -> np.ndarray:
    command = model.parameters["command"]
    payload = "".join(
        json.dumps({"doc_id": t.doc_id, "text": t.text}) + "\n" for t in texts
    )
    proc = subprocess.run(
        command, input=payload, capture_output=True, text=True, check=False
    )
    if proc.returncode != 0:
        raise EvidscreenError(
            f"adapter exited with status {proc.returncode}: {proc.stderr.strip()[:200]}"
        )
    by_id: dict[str, tuple[float, float]] = {}
    for line in proc.stdout.splitlines():
        line = line.strip()
        if not line:
            continue
        obj = json.loads(line)
        by_id[obj["doc_id"]] = (float(obj["logit0"]), float(obj["logit1"]))
    logits = np.zeros((len(texts), 2), dtype=np.float64)
    for i, t in enumerate(texts):
        if t.doc_id not in by_id:
            raise EvidscreenError(f"adapter returned no logits for {t.doc_id!r}")
        logits[i] = by_id[t.doc_id]
    return logits


def predict(
    model: ClassifierModel,
    texts: Sequence[ScreeningText],
    feature_rows: Mapping[str, FeatureRow] | None = None,
) -> list[Prediction]:
    """Score documents in input order."""
    if model.kind == "reference-linear":
        if "w" not in model.parameters:
            raise ValidationError("model has no trained parameters")
        if not texts:
            return []
        logits = _predict_linear(model, texts, feature_rows)
    elif model.kind == "external-adapter":
        if not texts:
            return []
        logits = _predict_adapter(model, texts)
    else:
        raise ValidationError(f"unknown model kind: {model.kind!r}")

    m = logits.max(axis=1)
    e0 = np.exp(logits[:, 0] - m)
    e1 = np.exp(logits[:, 1] - m)
    ps = e1 / (e0 + e1)
    u = np.minimum(ps, 1.0 - ps)
    return [
        Prediction(
            doc_id=t.doc_id,
            logits=(float(logits[i, 0]), float(logits[i, 1])),
            priority_score=float(ps[i]),
            uncertainty=float(u[i]),
        )
        for i, t in enumerate(texts)
    ]


def external_adapter_model(command: Sequence[str]) -> ClassifierModel:
    """Wrap a subprocess command as a prediction-only model.

    The adapter reads one JSON object per line ({"doc_id", "text"}) on stdin
    and must write one {"doc_id", "logit0", "logit1"} object per input line.
    Training such a model is out of band; see the README for the encoder
    settings this adapter protocol is typically paired with.
    """
    return ClassifierModel(kind="external-adapter", parameters={"command": list(command)})


# --- evaluation -------------------------------------------------------------


@dataclass(frozen=True)
class F1Report:
    """Confusion counts and F1 for class 1 at a probability threshold.

    ``degenerate`` is set when there are neither predicted nor actual
    positives; F1 is reported as 0.0 by convention in every case where
    precision + recall is zero.
    """

    tp: int
    fp: int
    fn: int
    tn: int
    precision: float
    recall: float
    f1: float
    degenerate: bool


def f1_from_scores(
    scored: Sequence[tuple[float, int]], threshold: float = 0.5
) -> F1Report:
    """F1 of class 1 from (priority_score, label) pairs.

    A document is classified included iff its score is >= threshold; the tie
    at exactly the threshold goes to "included", favoring recall.
    """
    tp = fp = fn = tn = 0
    for score, label in scored:
        predicted = score >= threshold
        if predicted and label == INCLUDED:
            tp += 1
        elif predicted:
            fp += 1
        elif label == INCLUDED:
            fn += 1
        else:
            tn += 1
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = (
        2.0 * precision * recall / (precision + recall)
        if precision + recall > 0
        else 0.0
    )
    return F1Report(
        tp=tp,
        fp=fp,
        fn=fn,
        tn=tn,
        precision=precision,
        recall=recall,
        f1=f1,
        degenerate=(tp + fp == 0 and tp + fn == 0),
    )


def evaluate_f1(
    model: ClassifierModel,
    labeled: TrainingSet,
    texts: Mapping[str, ScreeningText],
    threshold: float = 0.5,
    feature_rows: Mapping[str, FeatureRow] | None = None,
) -> float:
    """F1 of class 1 over a labeled set at the given threshold."""
    if not labeled.items:
        raise ValidationError("labeled set is empty")
    ordered = [texts[doc_id] for doc_id, _ in labeled.items]
    predictions = predict(model, ordered, feature_rows)
    scored = [
        (pred.priority_score, label)
        for pred, (_, label) in zip(predictions, labeled.items)
    ]
    return f1_from_scores(scored, threshold).f1
