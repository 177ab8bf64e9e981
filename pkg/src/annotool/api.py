"""HTTP service exposing the annotation workflow.

All endpoints speak JSON except the dataset download, which streams the
ZIP archive for a published release. Sessions are opaque bearer tokens
bound to an annotator id; the per-session skip list lives with the
session. Mutating endpoints validate first and change state only on
success.
"""

from __future__ import annotations

import secrets
import time
import uuid
from dataclasses import dataclass, field

from fastapi import Depends, FastAPI, Header, HTTPException, Response
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .selection import NoCandidateError
from .service import AnnotationPlatform, ValidationRejected
from .store import UnknownEntryError


@dataclass
class Session:
    token: str
    annotator_id: str
    display_name: str
    expires_at: float
    skips: set[int] = field(default_factory=set)


class SessionRequest(BaseModel):
    display_name: str | None = None
    annotator_id: str | None = None


class AnnotationRequest(BaseModel):
    entry_id: int
    text: str


class EntryRequest(BaseModel):
    entry_id: int


class ReportRequest(BaseModel):
    entry_id: int
    note: str = ""


class ReleaseRequest(BaseModel):
    release_date: str


def create_app(platform: AnnotationPlatform, *, clock=time.time) -> FastAPI:
    app = FastAPI(title="annotool", docs_url=None, redoc_url=None)
    sessions: dict[str, Session] = {}
    ttl = platform.config.session_ttl_secs

    def current_session(
        authorization: str | None = Header(default=None),
    ) -> Session:
        if not authorization or not authorization.startswith("Bearer "):
            raise HTTPException(status_code=401, detail="missing session token")
        token = authorization.removeprefix("Bearer ").strip()
        session = sessions.get(token)
        if session is None or session.expires_at <= clock():
            raise HTTPException(status_code=401, detail="invalid or expired session")
        return session

    @app.exception_handler(UnknownEntryError)
    async def _unknown_entry(_, exc: UnknownEntryError):
        return JSONResponse(status_code=404, content={"detail": str(exc.args[0])})

    @app.post("/api/sessions", status_code=201)
    def open_session(body: SessionRequest):
        annotator_id = body.annotator_id or uuid.uuid4().hex
        display_name = body.display_name or annotator_id
        token = secrets.token_hex(16)
        session = Session(
            token=token,
            annotator_id=annotator_id,
            display_name=display_name,
            expires_at=clock() + ttl,
        )
        sessions[token] = session
        platform.store.ensure_annotator(annotator_id, display_name)
        return {
            "token": token,
            "annotator_id": annotator_id,
            "expires_at": session.expires_at,
        }

    @app.get("/api/next-motion")
    def next_motion(session: Session = Depends(current_session)):
        try:
            entry_id, strategy = platform.next_motion(frozenset(session.skips))
        except NoCandidateError as exc:
            raise HTTPException(status_code=503, detail=str(exc))
        entry = platform.store.entry(entry_id)
        count, standing = platform.standing_for(session.annotator_id)
        return {
            "entry_id": entry_id,
            "strategy": strategy.value,
            "annotation_count": entry.annotation_count,
            "playback": {
                "frames_url": f"/api/motions/{entry_id}/frames",
                "default_fps": platform.config.playback_default_fps,
                "has_motion": entry.motion is not None,
                "duration_secs": entry.motion.duration if entry.motion else 0.0,
            },
            "progress": _progress_payload(session, count, standing),
        }

    @app.post("/api/annotations", status_code=201)
    def submit_annotation(
        body: AnnotationRequest, session: Session = Depends(current_session)
    ):
        try:
            receipt = platform.submit_annotation(
                session.annotator_id,
                body.entry_id,
                body.text,
                display_name=session.display_name,
            )
        except ValidationRejected as exc:
            return JSONResponse(
                status_code=422,
                content={
                    "reason": exc.result.reason,
                    "message": exc.result.message,
                },
            )
        session.skips.discard(body.entry_id)
        return {
            "annotation_id": receipt.record.annotation_id,
            "entry_id": body.entry_id,
            "entry_annotation_count": receipt.entry_annotation_count,
            "progress": _progress_payload(
                session, receipt.annotator_count, receipt.standing
            ),
        }

    @app.post("/api/skip", status_code=204)
    def skip(body: EntryRequest, session: Session = Depends(current_session)):
        platform.store.entry(body.entry_id)
        session.skips.add(body.entry_id)
        return Response(status_code=204)

    @app.post("/api/report", status_code=201)
    def report(body: ReportRequest, session: Session = Depends(current_session)):
        report = platform.report_problem(session.annotator_id, body.entry_id, body.note)
        return {"report_id": report.report_id, "entry_id": body.entry_id}

    @app.get("/api/motions/{entry_id}/frames")
    def frames(entry_id: int, fps: float = 25.0):
        from .ingest import playback_frames

        entry = platform.store.entry(entry_id)
        if entry.motion is None:
            raise HTTPException(status_code=404, detail="entry has no motion document")
        if fps <= 0:
            raise HTTPException(status_code=422, detail="fps must be positive")
        frames = playback_frames(entry.motion, fps)
        return {
            "entry_id": entry_id,
            "fps": fps,
            "dof_names": list(entry.motion.dof_names),
            "frames": [
                {
                    "t": f.timestamp,
                    "root_position": list(f.root_position),
                    "root_rotation": list(f.root_rotation),
                    "joint_values": list(f.joint_values),
                }
                for f in frames
            ],
        }

    @app.get("/api/leaderboard")
    def leaderboard():
        from .engage import level_for

        rows = []
        for rank, profile in enumerate(platform.leaderboard(), start=1):
            standing = level_for(profile.annotation_count, platform.ladder)
            rows.append(
                {
                    "rank": rank,
                    "annotator_id": profile.annotator_id,
                    "display_name": profile.display_name,
                    "annotation_count": profile.annotation_count,
                    "level_title": standing.title,
                }
            )
        return {"leaderboard": rows}

    @app.get("/api/stats")
    def stats():
        return platform.store.corpus_counts().to_dict()

    @app.post("/api/admin/recompute")
    def recompute(session: Session = Depends(current_session)):
        texts = platform.store.texts_by_motion()
        if not texts:
            raise HTTPException(status_code=409, detail="no annotations to recompute from")
        result = platform.recompute_now()
        return {
            "motions": len(result.snapshot.probabilities),
            "excluded_cleared": not result.snapshot.excluded,
            "recomputed_at": result.snapshot.created_at,
        }

    @app.post("/api/admin/releases", status_code=201)
    def publish_release(body: ReleaseRequest, session: Session = Depends(current_session)):
        try:
            data = platform.publish_release(body.release_date)
        except ValueError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        return {"release_date": body.release_date, "size_bytes": len(data)}

    @app.get("/downloads/dataset-{release_date}.zip")
    def download(release_date: str):
        data = platform.release(release_date)
        if data is None:
            raise HTTPException(status_code=404, detail=f"no release {release_date}")
        return Response(
            content=data,
            media_type="application/zip",
            headers={
                "Content-Disposition": f'attachment; filename="dataset-{release_date}.zip"'
            },
        )

    return app


def _progress_payload(session: Session, count: int, standing) -> dict:
    return {
        "annotator_id": session.annotator_id,
        "annotation_count": count,
        "level_title": standing.title,
        "level_index": standing.index,
        "progress_to_next": standing.progress,
    }
