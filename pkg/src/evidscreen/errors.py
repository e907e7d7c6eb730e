"""Exception hierarchy shared across the package.

Every error carries a stable machine-readable ``code`` so callers (CLI exit
handling, HTTP error bodies, tests) can dispatch without parsing messages.
"""

from __future__ import annotations

from typing import Any


class EvidscreenError(Exception):
    """Base class; ``code`` is stable, ``details`` is optional context."""

    code = "error"
    http_status = 400

    def __init__(self, message: str, *, details: dict[str, Any] | None = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}


class IngestError(EvidscreenError):
    code = "ingest_error"

    def __init__(self, message: str, *, code: str, details: dict[str, Any] | None = None):
        super().__init__(message, details=details)
        self.code = code


class ValidationError(EvidscreenError):
    code = "validation_error"


class UnknownDocumentError(EvidscreenError):
    code = "unknown_doc"
    http_status = 404


class UnknownProjectError(EvidscreenError):
    code = "unknown_project"
    http_status = 404


class PhaseError(EvidscreenError):
    """Operation not allowed in the project's current phase."""

    code = "wrong_phase"
    http_status = 409


class PendingLabelsError(EvidscreenError):
    """Retraining requested while issued batch ids are still unlabeled."""

    code = "pending_labels"
    http_status = 412


class JobInFlightError(EvidscreenError):
    code = "job_in_flight"
    http_status = 409


class SingleClassError(EvidscreenError):
    """Training or rebalancing needs both classes present."""

    code = "single_class"


class TargetNotReachedError(EvidscreenError):
    """A curve never attains the requested inclusion rate."""

    code = "target_unreached"
