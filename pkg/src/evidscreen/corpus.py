"""Bibliographic corpus ingestion and text cleaning.

A corpus is an ordered list of :class:`Document` records read from CSV or
JSONL. For screening, each document's title is merged into its abstract as a
leading sentence, the merged text is split into sentences, and configurable
sentence filters drop noise (non-English fragments, publisher boilerplate)
before the survivors are re-joined into the model input text.
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .errors import IngestError, ValidationError

REQUIRED_COLUMNS = ("id", "title", "abstract")
OPTIONAL_COLUMNS = ("keywords", "year", "publication_type", "source")

TERMINAL_PUNCTUATION = (".", "!", "?")

# Sentence boundary: terminal punctuation followed by whitespace. The
# punctuation stays attached to the sentence it ends.
_SENTENCE_SPLIT = re.compile(r"(?<=[.!?])\s+")

_BOILERPLATE = re.compile(r"copyright|all rights reserved|©", re.IGNORECASE)


@dataclass(frozen=True)
class Document:
    """One bibliographic record as ingested."""

    id: str
    title: str
    abstract: str
    keywords: tuple[str, ...] = ()
    year: int | None = None
    publication_type: str | None = None
    source: str | None = None

    def __post_init__(self):
        if not self.id:
            raise ValidationError("document id must be non-empty")
        if not self.title.strip() and not self.abstract.strip():
            raise ValidationError(
                f"document {self.id!r} has neither title nor abstract"
            )


@dataclass(frozen=True)
class ScreeningText:
    """Cleaned, merged model-input text for one document.

    ``sentence_count`` counts kept sentences, ``dropped_sentence_count`` the
    filtered ones; their sum is the number of sentences parsed from the raw
    merged text. ``all_dropped`` flags documents whose every sentence was
    filtered out: they carry no model input but remain screenable by humans.
    """

    doc_id: str
    text: str
    sentence_count: int
    dropped_sentence_count: int
    all_dropped: bool = False


@dataclass(frozen=True)
class SentenceFilter:
    """Named keep/drop verdict over single sentences.

    The verdict function must be pure and deterministic for a fixed
    configuration; filters run in list order and a sentence is dropped by the
    first filter that rejects it.
    """

    name: str
    keep: Callable[[str], bool]


def _keep_mostly_ascii(sentence: str) -> bool:
    # Heuristic language gate: drop a sentence when most of its alphabetic
    # characters are non-ASCII. Sentences without letters are kept.
    ascii_alpha = 0
    other_alpha = 0
    for ch in sentence:
        if ch.isalpha():
            if ord(ch) < 128:
                ascii_alpha += 1
            else:
                other_alpha += 1
    return other_alpha <= ascii_alpha


def _keep_non_boilerplate(sentence: str) -> bool:
    return _BOILERPLATE.search(sentence) is None


LANGUAGE_FILTER = SentenceFilter("language", _keep_mostly_ascii)
BOILERPLATE_FILTER = SentenceFilter("boilerplate", _keep_non_boilerplate)

DEFAULT_FILTERS: tuple[SentenceFilter, ...] = (LANGUAGE_FILTER, BOILERPLATE_FILTER)

FILTERS_BY_NAME = {f.name: f for f in DEFAULT_FILTERS}


@dataclass
class Corpus:
    """Ordered document list plus ingestion bookkeeping."""

    documents: list[Document]
    duplicate_count: int = 0

    def __len__(self) -> int:
        return len(self.documents)

    def ids(self) -> list[str]:
        return [d.id for d in self.documents]


def merge_title_abstract(doc: Document) -> str:
    """Merge a document's title into its abstract as the first sentence.

    The title gets a terminal period unless it already ends in sentence
    punctuation. An empty title yields the abstract unchanged; an empty
    abstract yields the punctuated title alone.
    """
    title = doc.title.strip()
    abstract = doc.abstract.strip()
    if not title and not abstract:
        raise ValidationError(f"document {doc.id!r}: title and abstract both empty")
    if not title:
        return abstract
    if not title.endswith(TERMINAL_PUNCTUATION):
        title = title + "."
    if not abstract:
        return title
    return f"{title} {abstract}"


def split_sentences(raw: str) -> list[str]:
    """Split on terminal punctuation followed by whitespace."""
    parts = _SENTENCE_SPLIT.split(raw.strip())
    return [p for p in parts if p]


def preprocess(
    raw: str,
    filters: Sequence[SentenceFilter] = DEFAULT_FILTERS,
    doc_id: str = "",
) -> ScreeningText:
    """Clean raw merged text into a :class:`ScreeningText`.

    Kept sentences are re-joined with single spaces in their original order.
    A document whose sentences are all dropped is returned with empty text
    and ``all_dropped=True`` rather than raising: it stays in the corpus for
    human screening.
    """
    if not raw or not raw.strip():
        raise ValidationError("preprocess requires non-empty raw text")
    sentences = split_sentences(raw)
    kept: list[str] = []
    dropped = 0
    for sentence in sentences:
        if all(f.keep(sentence) for f in filters):
            kept.append(sentence)
        else:
            dropped += 1
    text = " ".join(kept)
    return ScreeningText(
        doc_id=doc_id,
        text=text,
        sentence_count=len(kept),
        dropped_sentence_count=dropped,
        all_dropped=not kept,
    )


def screening_text_for(
    doc: Document, filters: Sequence[SentenceFilter] = DEFAULT_FILTERS
) -> ScreeningText:
    return preprocess(merge_title_abstract(doc), filters, doc_id=doc.id)


def build_screening_texts(
    documents: Iterable[Document], filters: Sequence[SentenceFilter] = DEFAULT_FILTERS
) -> dict[str, ScreeningText]:
    return {d.id: screening_text_for(d, filters) for d in documents}


def _parse_year(value) -> int | None:
    if value is None or value == "":
        return None
    try:
        return int(value)
    except (TypeError, ValueError):
        return None


def _document_from_record(record: dict, row_num: int, keywords_split: bool) -> Document:
    keywords = record.get("keywords") or ()
    if keywords_split:
        keywords = tuple(k.strip() for k in str(keywords).split(";") if k.strip())
    else:
        if isinstance(keywords, str):
            keywords = (keywords,) if keywords else ()
        keywords = tuple(str(k) for k in keywords)
    try:
        return Document(
            id=str(record.get("id") or "").strip(),
            title=str(record.get("title") or ""),
            abstract=str(record.get("abstract") or ""),
            keywords=keywords,
            year=_parse_year(record.get("year")),
            publication_type=record.get("publication_type") or None,
            source=record.get("source") or None,
        )
    except ValidationError as exc:
        raise IngestError(
            f"row {row_num}: {exc.message}", code="invalid_record",
            details={"row": row_num},
        ) from exc


def _read_csv_records(text: str) -> list[dict]:
    reader = csv.DictReader(io.StringIO(text))
    header = reader.fieldnames or []
    missing = [c for c in REQUIRED_COLUMNS if c not in header]
    if missing:
        raise IngestError(
            "missing column: " + ", ".join(missing),
            code="missing_column",
            details={"missing": missing},
        )
    return list(reader)


def _read_jsonl_records(text: str) -> list[dict]:
    records = []
    for i, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise IngestError(
                f"line {i}: not valid JSON", code="parse_error", details={"line": i}
            ) from exc
        if not isinstance(obj, dict):
            raise IngestError(
                f"line {i}: expected an object", code="parse_error", details={"line": i}
            )
        missing = [c for c in REQUIRED_COLUMNS if c not in obj]
        if missing:
            raise IngestError(
                "missing column: " + ", ".join(missing),
                code="missing_column",
                details={"missing": missing, "line": i},
            )
        records.append(obj)
    return records


def ingest_records(records: Sequence[dict], keywords_split: bool) -> Corpus:
    """Turn parsed records into a deduplicated, order-preserving corpus."""
    if not records:
        raise IngestError("empty corpus", code="empty_corpus")
    seen: set[str] = set()
    documents: list[Document] = []
    duplicates = 0
    for row_num, record in enumerate(records, start=1):
        doc = _document_from_record(record, row_num, keywords_split)
        if doc.id in seen:
            duplicates += 1  # keep-first: later rows with a known id are dropped
            continue
        seen.add(doc.id)
        documents.append(doc)
    return Corpus(documents=documents, duplicate_count=duplicates)


def ingest(path: str | Path, format: str) -> Corpus:
    """Read a CSV or JSONL file into a :class:`Corpus`.

    Duplicate ids collapse to the first occurrence; the number of collapsed
    rows is reported on the corpus. Distinct error codes: ``unreadable_file``,
    ``missing_column``, ``parse_error``, ``invalid_record``, ``empty_corpus``.
    """
    if format not in ("csv", "jsonl"):
        raise ValidationError(f"unknown corpus format: {format!r}")
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8-sig")
    except (OSError, UnicodeDecodeError) as exc:
        raise IngestError(
            f"cannot read {path}: {exc}", code="unreadable_file"
        ) from exc
    if format == "csv":
        records = _read_csv_records(text)
    else:
        records = _read_jsonl_records(text)
    return ingest_records(records, keywords_split=(format == "csv"))


def document_to_record(doc: Document) -> dict:
    return {
        "id": doc.id,
        "title": doc.title,
        "abstract": doc.abstract,
        "keywords": list(doc.keywords),
        "year": doc.year,
        "publication_type": doc.publication_type,
        "source": doc.source,
    }
