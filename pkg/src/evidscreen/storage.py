"""File-backed persistence for screening projects.

Each project owns a directory::

    config.json        project id + engine configuration
    corpus.jsonl       document snapshot with cleaned screening text
    ledger.jsonl       one label record per line, fsynced per append
    history.jsonl      bootstrap and iteration events, fsynced per append
    predictions/vN.csv per-model-version scores for the then-unscreened pool

A project is recovered by replaying ledger and history events (merged by
sequence number) over the corpus snapshot. Labels are durable before they
are acknowledged: the ledger append fsyncs before returning.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict
from pathlib import Path
from typing import Mapping, Sequence

from .corpus import Document, ScreeningText, document_to_record
from .engine import (
    BootstrapRecord,
    IterationRecord,
    LabelRecord,
    Project,
    ProjectConfig,
    replay,
)
from .errors import ValidationError

CONFIG_FILE = "config.json"
CORPUS_FILE = "corpus.jsonl"
LEDGER_FILE = "ledger.jsonl"
HISTORY_FILE = "history.jsonl"
PREDICTIONS_DIR = "predictions"


def _append_fsync(path: Path, line: str) -> None:
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(line + "\n")
        fh.flush()
        os.fsync(fh.fileno())


class ProjectStore:
    def __init__(self, root: Path):
        self.root = Path(root)

    # -- writes -----------------------------------------------------------

    def init(self, project_id: str, config: ProjectConfig) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        (self.root / PREDICTIONS_DIR).mkdir(exist_ok=True)
        payload = {"project_id": project_id, "config": config.to_dict()}
        (self.root / CONFIG_FILE).write_text(
            json.dumps(payload, indent=2), encoding="utf-8"
        )

    def write_corpus(
        self, documents: Sequence[Document], texts: Mapping[str, ScreeningText]
    ) -> None:
        with open(self.root / CORPUS_FILE, "w", encoding="utf-8") as fh:
            for doc in documents:
                record = document_to_record(doc)
                st = texts[doc.id]
                record["screening_text"] = {
                    "text": st.text,
                    "sentence_count": st.sentence_count,
                    "dropped_sentence_count": st.dropped_sentence_count,
                    "all_dropped": st.all_dropped,
                }
                fh.write(json.dumps(record) + "\n")

    def append_label(self, rec: LabelRecord) -> None:
        _append_fsync(self.root / LEDGER_FILE, json.dumps(asdict(rec)))

    def append_bootstrap(self, rec: BootstrapRecord) -> None:
        payload = {"type": "bootstrap", **asdict(rec)}
        payload["ids"] = list(rec.ids)
        _append_fsync(self.root / HISTORY_FILE, json.dumps(payload))

    def append_iteration(self, rec: IterationRecord) -> None:
        payload = {"type": "iteration", **asdict(rec)}
        payload["sampled_ids"] = list(rec.sampled_ids)
        payload["queue"] = list(rec.queue) if rec.queue is not None else None
        _append_fsync(self.root / HISTORY_FILE, json.dumps(payload))

    def write_predictions(self, version: int, predictions) -> None:
        path = self.root / PREDICTIONS_DIR / f"v{version}.csv"
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("doc_id,priority_score,uncertainty\n")
            for p in predictions:
                fh.write(f"{p.doc_id},{p.priority_score!r},{p.uncertainty!r}\n")

    # -- reads ------------------------------------------------------------

    def exists(self) -> bool:
        return (self.root / CONFIG_FILE).is_file()

    def load_config(self) -> tuple[str, ProjectConfig]:
        payload = json.loads((self.root / CONFIG_FILE).read_text(encoding="utf-8"))
        return payload["project_id"], ProjectConfig.from_dict(payload["config"])

    def load_corpus(self) -> tuple[list[Document], dict[str, ScreeningText]]:
        documents: list[Document] = []
        texts: dict[str, ScreeningText] = {}
        path = self.root / CORPUS_FILE
        if not path.is_file():
            return documents, texts
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                record = json.loads(line)
                st = record.pop("screening_text")
                documents.append(
                    Document(
                        id=record["id"],
                        title=record["title"],
                        abstract=record["abstract"],
                        keywords=tuple(record.get("keywords") or ()),
                        year=record.get("year"),
                        publication_type=record.get("publication_type"),
                        source=record.get("source"),
                    )
                )
                texts[record["id"]] = ScreeningText(
                    doc_id=record["id"],
                    text=st["text"],
                    sentence_count=st["sentence_count"],
                    dropped_sentence_count=st["dropped_sentence_count"],
                    all_dropped=st["all_dropped"],
                )
        return documents, texts

    def load_events(self) -> list[tuple[int, str, object]]:
        events: list[tuple[int, str, object]] = []
        ledger_path = self.root / LEDGER_FILE
        if ledger_path.is_file():
            with open(ledger_path, encoding="utf-8") as fh:
                for line in fh:
                    rec = LabelRecord(**json.loads(line))
                    events.append((rec.seq, "label", rec))
        history_path = self.root / HISTORY_FILE
        if history_path.is_file():
            with open(history_path, encoding="utf-8") as fh:
                for line in fh:
                    payload = json.loads(line)
                    kind = payload.pop("type")
                    if kind == "bootstrap":
                        rec = BootstrapRecord(
                            ids=tuple(payload["ids"]),
                            clamped=payload["clamped"],
                            seq=payload["seq"],
                        )
                        events.append((rec.seq, "bootstrap", rec))
                    elif kind == "iteration":
                        payload["sampled_ids"] = tuple(payload["sampled_ids"])
                        if payload.get("queue") is not None:
                            payload["queue"] = tuple(payload["queue"])
                        rec = IterationRecord(**payload)
                        events.append((rec.seq, "iteration", rec))
                    else:
                        raise ValidationError(f"unknown history event {kind!r}")
        events.sort(key=lambda item: item[0])
        return events

    def load_predictions(self, version: int) -> list | None:
        from .sampling import PooledPrediction

        path = self.root / PREDICTIONS_DIR / f"v{version}.csv"
        if not path.is_file():
            return None
        out = []
        with open(path, encoding="utf-8") as fh:
            next(fh)  # header
            for line in fh:
                doc_id, ps, u = line.rstrip("\n").split(",")
                out.append(
                    PooledPrediction(
                        doc_id=doc_id, priority_score=float(ps), uncertainty=float(u)
                    )
                )
        return out


def load_project(root: Path) -> Project:
    """Recover a project from its directory by event replay."""
    store = ProjectStore(root)
    if not store.exists():
        raise ValidationError(f"no project at {root}")
    project_id, config = store.load_config()
    documents, texts = store.load_corpus()
    events = store.load_events()
    if documents:
        project = replay(project_id, config, documents, texts, events)
    else:
        project = Project(project_id, config)
    project.store = store
    # Restore the latest scored snapshot so batch views keep their priority
    # scores across restarts; models themselves are not persisted.
    if project.model_version > 0:
        preds = store.load_predictions(project.model_version)
        if preds is not None:
            project.snapshot = {p.doc_id: p for p in preds}
            project.prev_ranking = [
                p.doc_id
                for p in sorted(preds, key=lambda p: (-p.priority_score, p.doc_id))
            ]
    return project
