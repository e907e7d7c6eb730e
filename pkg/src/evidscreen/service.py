"""HTTP interface for live review sessions.

All endpoints live under /v1 and speak JSON; errors use a uniform
``{code, message, details}`` body. Projects are file-backed (one directory
per project under the service data dir) and recovered by ledger replay on
restart. Label submission and phase transitions funnel through the engine's
single writer per project; retraining runs in a background thread, at most
one per project, and read endpoints serve the last completed snapshot while
it runs.

Retraining is explicitly triggered (by the reviewer or the UI) rather than
implicit per batch, keeping model updates visible to the team; setting
``auto_retrain`` in the project config restores the implicit behavior.
"""

from __future__ import annotations

import itertools
import json
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import Depends, FastAPI, Request, Response
from fastapi.responses import JSONResponse

from . import metrics
from .corpus import DEFAULT_FILTERS, build_screening_texts, ingest_records, _read_jsonl_records
from .engine import LabelRecord, Phase, Project, ProjectConfig
from .errors import (
    EvidscreenError,
    JobInFlightError,
    PendingLabelsError,
    PhaseError,
    UnknownProjectError,
    ValidationError,
)
from .storage import ProjectStore, load_project

TOKEN_HEADER = "x-api-token"


@dataclass
class Job:
    job_id: str
    status: str = "queued"  # queued | running | done | failed
    model_version: int | None = None
    error: str | None = None
    stopped: bool | None = None


@dataclass
class ProjectRuntime:
    project: Project
    jobs: dict[str, Job] = field(default_factory=dict)
    active_job: str | None = None
    job_counter: itertools.count = field(default_factory=lambda: itertools.count(1))
    job_lock: threading.Lock = field(default_factory=threading.Lock)


class ServiceState:
    def __init__(self, data_dir: Path | None):
        self.data_dir = Path(data_dir) if data_dir is not None else None
        self.projects: dict[str, ProjectRuntime] = {}
        self.lock = threading.Lock()
        if self.data_dir is not None and self.data_dir.is_dir():
            for child in sorted(self.data_dir.iterdir()):
                if (child / "config.json").is_file():
                    project = load_project(child)
                    self.projects[project.project_id] = ProjectRuntime(project=project)

    def get(self, project_id: str) -> ProjectRuntime:
        runtime = self.projects.get(project_id)
        if runtime is None:
            raise UnknownProjectError(f"no project {project_id!r}")
        return runtime

    def create(self, config: ProjectConfig) -> Project:
        project_id = uuid.uuid4().hex[:12]
        store = None
        if self.data_dir is not None:
            store = ProjectStore(self.data_dir / project_id)
            store.init(project_id, config)
        project = Project(project_id, config, store=store)
        with self.lock:
            self.projects[project_id] = ProjectRuntime(project=project)
        return project


def _session_view(runtime: ProjectRuntime) -> dict:
    project = runtime.project
    state = project.state()
    return {
        "project_id": project.project_id,
        "phase": state.phase.value,
        "model_version": state.model_version,
        "screened": len(state.screened),
        "unscreened": len(state.unscreened),
        "identified": project.identified_count(),
        "corpus_size": len(project.documents),
        "exclusion_criteria": list(project.config.exclusion_criteria),
        "advice": project.advice() if project.documents else None,
        "job_running": runtime.active_job is not None,
    }


def create_app(
    data_dir: Path | str | None = None,
    token: str | None = None,
    frontend_dir: Path | str | None = None,
) -> FastAPI:
    app = FastAPI(title="evidscreen", version="0.1.0", docs_url="/v1/docs")
    state = ServiceState(Path(data_dir) if data_dir is not None else None)
    app.state.service = state

    class EvidscreenErrorResponse(Exception):
        def __init__(self, status: int, code: str, message: str, details=None):
            self.status = status
            self.code = code
            self.message = message
            self.details = details or {}

    async def check_token(request: Request):
        if token is not None and request.headers.get(TOKEN_HEADER) != token:
            raise EvidscreenErrorResponse(401, "unauthorized", "missing or bad token")

    async def read_json(request: Request, default=None):
        body = await request.body()
        if not body:
            if default is not None:
                return default
            raise ValidationError("request body must be JSON")
        try:
            return json.loads(body)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"request body is not valid JSON: {exc}") from exc

    @app.exception_handler(EvidscreenError)
    async def engine_error_handler(_: Request, exc: EvidscreenError):
        return JSONResponse(
            status_code=exc.http_status,
            content={"code": exc.code, "message": exc.message, "details": exc.details},
        )

    @app.exception_handler(EvidscreenErrorResponse)
    async def service_error_handler(_: Request, exc: EvidscreenErrorResponse):
        return JSONResponse(
            status_code=exc.status,
            content={"code": exc.code, "message": exc.message, "details": exc.details},
        )

    dep = [Depends(check_token)]

    @app.get("/v1/health")
    async def health():
        return {"status": "ok", "projects": len(state.projects)}

    @app.post("/v1/projects", status_code=201, dependencies=dep)
    async def create_project(request: Request):
        payload = await read_json(request, default={})
        config = ProjectConfig.from_dict(payload)
        project = state.create(config)
        return {"project_id": project.project_id, "phase": project.phase.value}

    @app.get("/v1/projects", dependencies=dep)
    async def list_projects():
        return {
            "projects": [
                _session_view(runtime) for runtime in state.projects.values()
            ]
        }

    @app.get("/v1/projects/{project_id}", dependencies=dep)
    async def project_view(project_id: str):
        return _session_view(state.get(project_id))

    @app.post("/v1/projects/{project_id}/documents", dependencies=dep)
    async def upload_documents(project_id: str, request: Request):
        runtime = state.get(project_id)
        body = (await request.body()).decode("utf-8")
        records = _read_jsonl_records(body)
        corpus = ingest_records(records, keywords_split=False)
        texts = build_screening_texts(corpus.documents, DEFAULT_FILTERS)
        runtime.project.attach_corpus(corpus.documents, texts)
        return {
            "documents": len(corpus.documents),
            "duplicates": corpus.duplicate_count,
            "dropped_sentences": sum(t.dropped_sentence_count for t in texts.values()),
            "empty_after_filtering": sum(t.all_dropped for t in texts.values()),
        }

    @app.get("/v1/projects/{project_id}/batch", dependencies=dep)
    async def next_batch(project_id: str, limit: int | None = None):
        runtime = state.get(project_id)
        project = runtime.project
        items = project.next_batch(limit)
        payload = []
        for position, (doc_id, ps) in enumerate(items, start=1):
            doc = project.documents[doc_id]
            payload.append(
                {
                    "doc_id": doc_id,
                    "title": doc.title,
                    "abstract": project.texts[doc_id].text,
                    "priority_score": ps,
                    "position": position,
                }
            )
        return {
            "phase": project.phase.value,
            "done": project.phase is Phase.DONE,
            "items": payload,
        }

    @app.post("/v1/projects/{project_id}/labels", dependencies=dep)
    async def submit_labels(project_id: str, request: Request):
        runtime = state.get(project_id)
        project = runtime.project
        payload = await read_json(request)
        records = payload if isinstance(payload, list) else payload.get("records", [])
        accepted = 0
        errors = []
        for i, record in enumerate(records):
            try:
                rec = LabelRecord(
                    doc_id=record.get("doc_id", ""),
                    decision=record.get("decision", ""),
                    screener_id=record.get("screener_id", ""),
                    exclusion_criterion=record.get("exclusion_criterion"),
                    timestamp=record.get("timestamp", ""),
                )
                project.record_label(rec)
                accepted += 1
            except EvidscreenError as exc:
                errors.append(
                    {
                        "index": i,
                        "doc_id": record.get("doc_id"),
                        "code": exc.code,
                        "message": exc.message,
                    }
                )
        response = {
            "accepted": accepted,
            "errors": errors,
            "screened": len(project.screened),
            "identified": project.identified_count(),
        }
        if (
            project.config.auto_retrain
            and project.phase is Phase.ACTIVE_LEARNING
            and not project.pending
            and runtime.active_job is None
        ):
            job = _start_job(runtime)
            response["auto_retrain_job"] = job.job_id
        return response

    def _start_job(runtime: ProjectRuntime) -> Job:
        project = runtime.project
        with runtime.job_lock:
            if runtime.active_job is not None:
                raise JobInFlightError(
                    "a training job is already running",
                    details={"job_id": runtime.active_job},
                )
            if project.pending:
                raise PendingLabelsError(
                    "issued batch has unlabeled documents",
                    details={"unlabeled": sorted(project.pending)},
                )
            if project.phase is not Phase.ACTIVE_LEARNING:
                raise PhaseError(
                    f"retrain requires active_learning phase, project is "
                    f"{project.phase.value}"
                )
            job = Job(job_id=f"j{next(runtime.job_counter)}")
            runtime.jobs[job.job_id] = job
            runtime.active_job = job.job_id

        def work():
            job.status = "running"
            try:
                record = project.run_iteration()
                job.model_version = record.model_version
                job.stopped = record.stopped
                job.status = "done"
            except Exception as exc:  # surface anything to the poller
                job.error = f"{type(exc).__name__}: {exc}"
                job.status = "failed"
            finally:
                with runtime.job_lock:
                    runtime.active_job = None

        threading.Thread(target=work, daemon=True).start()
        return job

    @app.post("/v1/projects/{project_id}/retrain", status_code=202, dependencies=dep)
    async def trigger_retrain(project_id: str):
        runtime = state.get(project_id)
        job = _start_job(runtime)
        return {"job_id": job.job_id, "status": job.status}

    @app.get("/v1/projects/{project_id}/jobs/{job_id}", dependencies=dep)
    async def job_status(project_id: str, job_id: str):
        runtime = state.get(project_id)
        job = runtime.jobs.get(job_id)
        if job is None:
            raise UnknownProjectError(f"no job {job_id!r}")
        return {
            "job_id": job.job_id,
            "status": job.status,
            "model_version": job.model_version,
            "stopped": job.stopped,
            "error": job.error,
        }

    @app.get("/v1/projects/{project_id}/metrics", dependencies=dep)
    async def project_metrics(project_id: str):
        runtime = state.get(project_id)
        project = runtime.project
        n = len(project.documents)
        screened = len(project.screened)
        history = project.iteration_history()
        return {
            "n": n,
            "screened": screened,
            "human_effort": metrics.human_effort(screened, n) if n else 0.0,
            "identified": project.identified_count(),
            "inclusion_rate": {
                "identified_so_far": project.identified_count(),
                "denominator_known": False,
                "note": "lower-bound denominator unknown: total relevant count "
                "is unobservable during live screening",
            },
            "batches": project.batch_history(),
            "rank_similarity_history": [
                {"iteration": rec.index, "rank_similarity": rec.rank_similarity}
                for rec in history
            ],
            "f1_history": [
                {"model_version": rec.model_version, "val_f1": rec.val_f1}
                for rec in history
            ],
        }

    @app.get("/v1/projects/{project_id}/advice", dependencies=dep)
    async def advice(project_id: str):
        return state.get(project_id).project.advice()

    if frontend_dir is not None and Path(frontend_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=str(frontend_dir), html=True), name="ui")

    return app
