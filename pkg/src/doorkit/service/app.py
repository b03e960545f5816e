"""HTTP service: annotation workflow plus evaluation endpoints.

The annotation routes are active when the app is created with a
session; the evaluation routes wrap the pure operations in ``ops`` and
work in any configuration.
"""

from __future__ import annotations

import mimetypes
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.responses import FileResponse
from fastapi.staticfiles import StaticFiles

from .. import schemas
from ..annotation import AnnotationSession
from ..datafile import dataset_to_payload
from ..metrics import Box, DoorStatus, GroundTruthBox
from . import ops

FRONTEND_DIST = Path(__file__).resolve().parents[4] / "frontend" / "dist"


def create_app(session: AnnotationSession | None = None,
               frontend_dir: Path | None = None) -> FastAPI:
    app = FastAPI(title="doorkit", version="0.1.0")

    def require_session() -> AnnotationSession:
        if session is None:
            raise HTTPException(status_code=503, detail="no annotation session configured")
        return session

    # -- evaluation --------------------------------------------------------

    @app.post("/api/eval", response_model=schemas.EvalResponse)
    def eval_dataset(request: schemas.EvalRequest):
        return ops.run_eval(request)

    @app.post("/api/sweep", response_model=schemas.SweepResponse)
    def sweep(request: schemas.SweepRequest):
        try:
            return ops.run_sweep(request)
        except ValueError as err:
            raise HTTPException(status_code=422, detail=str(err)) from None

    @app.post("/api/topology", response_model=schemas.TopologyResponse)
    def topology(request: schemas.TopologyRequest):
        try:
            return ops.run_topology(request)
        except ValueError as err:
            raise HTTPException(status_code=422, detail=str(err)) from None

    @app.post("/api/poses", response_model=schemas.PosesResponse)
    def poses(request: schemas.PosesRequest):
        try:
            return ops.run_poses(request)
        except ValueError as err:
            raise HTTPException(status_code=422, detail=str(err)) from None

    # -- annotation workflow -------------------------------------------------

    @app.get("/api/session", response_model=schemas.SessionResponse)
    def get_session():
        s = require_session()
        return schemas.SessionResponse(
            session_id=s.session_id,
            image_dir=str(s.image_dir),
            sample_period=s.sample_period,
            frames=[
                schemas.FrameRecord(image_id=f.image_id, file_name=f.file_name,
                                    timestamp_ms=f.timestamp_ms)
                for f in s.frames
            ],
        )

    @app.get("/api/images/{image_id}/file")
    def get_image_file(image_id: str):
        s = require_session()
        try:
            path = s.image_path(image_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown image '{image_id}'") from None
        media_type = mimetypes.guess_type(path.name)[0] or "application/octet-stream"
        return FileResponse(path, media_type=media_type)

    @app.get("/api/images/{image_id}/annotations",
             response_model=schemas.AnnotationsResponse)
    def get_annotations(image_id: str):
        s = require_session()
        try:
            boxes, provenance = s.get_annotations(image_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown image '{image_id}'") from None
        return schemas.AnnotationsResponse(
            image_id=image_id,
            boxes=[
                schemas.BoxAnnotation(box=(b.box.x, b.box.y, b.box.w, b.box.h),
                                      label=b.label.value)
                for b in boxes
            ],
            provenance=provenance,
        )

    @app.put("/api/images/{image_id}/annotations",
             response_model=schemas.PutAnnotationsResponse)
    def put_annotations(image_id: str, request: schemas.PutAnnotationsRequest):
        s = require_session()
        boxes = [
            GroundTruthBox(image_id=image_id,
                           box=Box(*entry.box),
                           label=DoorStatus(entry.label))
            for entry in request.boxes
        ]
        try:
            saved = s.put_annotations(image_id, boxes)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown image '{image_id}'") from None
        return schemas.PutAnnotationsResponse(image_id=image_id, saved=saved)

    @app.post("/api/export", response_model=schemas.DatasetFilePayload)
    def export():
        s = require_session()
        return dataset_to_payload(s.export_dataset())

    # -- optional built frontend ------------------------------------------

    dist = frontend_dir if frontend_dir is not None else FRONTEND_DIST
    if dist.is_dir():
        app.mount("/", StaticFiles(directory=dist, html=True), name="frontend")

    return app
