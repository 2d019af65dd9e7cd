"""HTTP annotation service: exposes the controller's query queue to a
human annotator and folds submitted labels back into the live AL run.

One run per process.  Labels are serialized through a lock; when a
round's quota fills, fine-tuning runs on a background thread (phase
"training") while the read endpoints stay available on cached state.
Ground-truth labels are never present in any response.

Endpoints (JSON bodies, field names as documented):
  GET  /api/status      -> round, labels_fraction, quota_remaining, K,
                           phase, last_round_metrics
  GET  /api/queue?limit -> query-ordered unlabeled queue items
  POST /api/labels      -> {accepted, quota_remaining}; 400 invalid label,
                           409 duplicate / wrong round / while training
  GET  /api/history     -> one record per completed round (CSV schema)
  GET  /api/histograms  -> uncertainty histogram pair of the last round
"""

from __future__ import annotations

import math
import threading

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse

from .active import (
    ALConfig,
    ALController,
    DuplicateLabelError,
    InvalidLabelError,
    PHASE_AWAITING,
    PHASE_FINISHED,
    StaleSampleError,
    WrongPhaseError,
)
from .datagen import PoolDataset
from .metrics import uncertainty_histograms
from .network import ModelState, predict_batch

PHASE_TRAINING_WIRE = "training"


def _no_nan(value: float) -> float | None:
    return None if isinstance(value, float) and math.isnan(value) else value


def _record_payload(record, strategy: str, seed: int) -> dict:
    return {
        "round": record.round,
        "labels_fraction": record.labels_fraction,
        "strategy": strategy,
        "seed": seed,
        "accuracy": record.accuracy,
        "weighted_f1": record.weighted_f1,
        "mean_u_correct": _no_nan(record.mean_u_correct),
        "mean_u_incorrect": _no_nan(record.mean_u_incorrect),
    }


class AnnotationServer:
    """Thread-safe bridge between HTTP handlers and one ALController."""

    def __init__(self, controller: ALController, display_pca: bool = False):
        self.controller = controller
        self._lock = threading.RLock()
        self._training = False
        self._failure: str | None = None
        self._queue: list[dict] = []
        self._histograms: dict | None = None
        self._projection = self._fit_projection() if display_pca else None
        with self._lock:
            controller.begin_next_round()
            self._rebuild_queue()

    # -- internals ---------------------------------------------------

    def _fit_projection(self) -> np.ndarray:
        x = self.controller.pool.features
        centered = x - x.mean(axis=0)
        _, _, vt = np.linalg.svd(centered, full_matrices=False)
        return vt[:2].T  # (dim, 2)

    def _display_xy(self, sample_id: int) -> list[float]:
        row = self.controller.pool.features[sample_id]
        if self._projection is None:
            return [float(row[0]), float(row[1] if row.shape[0] > 1 else 0.0)]
        return [float(v) for v in row @ self._projection]

    def _rebuild_queue(self) -> None:
        """Opinions for the pending ids under the current model, in query order."""
        c = self.controller
        ids = list(c.pending)
        preds = predict_batch(c.model, c.pool.features[ids], sample_ids=ids)
        self._queue = [
            {
                "sample_id": p.sample_id,
                "features": [float(v) for v in c.pool.features[p.sample_id]],
                "display_xy": self._display_xy(p.sample_id),
                "belief": [float(v) for v in p.opinion.belief],
                "uncertainty": float(p.opinion.uncertainty),
                "round": c.round + 1,
            }
            for p in preds
        ]

    def _train_async(self) -> None:
        c = self.controller
        with self._lock:
            round_index, queried = c.commit_pending()
        try:
            c.finetune_committed(round_index)  # slow: model owned by this thread
        except Exception as exc:  # surfaces via /api/status
            with self._lock:
                self._failure = f"{type(exc).__name__}: {exc}"
                self._training = False
            return
        with self._lock:
            record = c.record_round(round_index, queried)
            ev = c.pool.eval_ids
            preds = predict_batch(c.model, c.pool.features[ev], sample_ids=ev,
                                  true_labels=c.pool.labels[ev])
            pair = uncertainty_histograms(preds)
            self._histograms = {
                "round": record.round,
                "bin_edges": [float(v) for v in pair.bin_edges],
                "counts_correct": [int(v) for v in pair.counts_correct],
                "counts_incorrect": [int(v) for v in pair.counts_incorrect],
            }
            if not c.finished:
                c.begin_next_round()
                self._rebuild_queue()
            else:
                self._queue = []
            self._training = False

    # -- handler-facing API -------------------------------------------

    @property
    def phase(self) -> str:
        with self._lock:
            if self._failure:
                return "failed"
            if self._training:
                return PHASE_TRAINING_WIRE
            return PHASE_FINISHED if self.controller.finished else PHASE_AWAITING

    def status(self) -> dict:
        with self._lock:
            c = self.controller
            last = c.last_record
            return {
                "round": c.round,
                "labels_fraction": c.labels_fraction,
                "quota_remaining": c.quota_remaining if not self._training else 0,
                "K": c.pool.num_classes,
                "phase": self.phase,
                "failure": self._failure,
                "last_round_metrics": (
                    _record_payload(last, c.config.strategy, c.config.seed) if last else None
                ),
            }

    def queue(self, limit: int | None) -> list[dict]:
        with self._lock:
            if self._training or self.controller.phase != PHASE_AWAITING:
                raise WrongPhaseError("no round awaiting labels")
            labeled_this_round = set(self.controller._pending_labels)
            items = [q for q in self._queue if q["sample_id"] not in labeled_this_round]
            return items if limit is None else items[:limit]

    def submit(self, sample_id: int, label: int) -> dict:
        with self._lock:
            if self._training:
                raise WrongPhaseError("training in progress; labels not accepted")
            remaining = self.controller.submit_label(sample_id, label)
            if remaining == 0:
                self._training = True
                thread = threading.Thread(target=self._train_async, daemon=True)
                thread.start()
            return {"accepted": True, "quota_remaining": remaining}

    def history(self) -> list[dict]:
        with self._lock:
            c = self.controller
            return [_record_payload(r, c.config.strategy, c.config.seed) for r in c.history]

    def histograms(self) -> dict:
        with self._lock:
            if self._histograms is None:
                raise WrongPhaseError("no completed round yet")
            return dict(self._histograms)


def create_app(server: AnnotationServer | None, ui_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="evidal annotation service", docs_url=None, redoc_url=None)

    def need_server() -> AnnotationServer:
        if server is None:
            raise HTTPException(status_code=503, detail="no active-learning run attached")
        return server

    @app.get("/api/status")
    def api_status():
        return JSONResponse(need_server().status())

    @app.get("/api/queue")
    def api_queue(limit: int | None = None):
        try:
            return JSONResponse(need_server().queue(limit))
        except WrongPhaseError as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from None

    @app.post("/api/labels")
    def api_labels(body: dict):
        srv = need_server()
        if not isinstance(body, dict) or "sample_id" not in body or "label" not in body:
            raise HTTPException(status_code=400, detail="body needs sample_id and label")
        try:
            sample_id = int(body["sample_id"])
            label = int(body["label"])
        except (TypeError, ValueError):
            raise HTTPException(status_code=400, detail="sample_id and label must be integers") from None
        try:
            return JSONResponse(srv.submit(sample_id, label))
        except InvalidLabelError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        except (DuplicateLabelError, StaleSampleError, WrongPhaseError) as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from None

    @app.get("/api/history")
    def api_history():
        return JSONResponse(need_server().history())

    @app.get("/api/histograms")
    def api_histograms():
        try:
            return JSONResponse(need_server().histograms())
        except WrongPhaseError as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from None

    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")
    return app


def build_controller_app(
    pool: PoolDataset,
    model: ModelState,
    config: ALConfig,
    ui_dir: str | None = None,
    display_pca: bool = False,
) -> FastAPI:
    controller = ALController(pool, model, config)
    return create_app(AnnotationServer(controller, display_pca=display_pca), ui_dir=ui_dir)
