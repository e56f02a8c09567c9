"""The scoring service over HTTP.

Routes:
  GET  /health    -> 200 "ok"
  POST /score     -> request CSV in, response CSV out; 400 malformed,
                     503 before a model is loaded; X-Truncation-Count
                     header reports pairs cut to the sequence limit;
                     optional ?model=<id> serves a specific model.
  POST /finetune  -> training CSV plus optional epochs/learning_rate/
                     seed/batch_size query params; JSON {loss, model_id};
                     409 while another training job runs.
  POST /pbt       -> training CSV plus population/objective/seed params;
                     JSON with the winning model id and the trial log.
  GET  /models    -> JSON list of persisted model ids.

One training job runs at a time; scoring stays available against the
current immutable model.
"""

from __future__ import annotations

import logging
import threading
from pathlib import Path

from fastapi import FastAPI, Query, Request, Response
from fastapi.responses import JSONResponse, PlainTextResponse

from .batchprobe import probe_batch_size
from .model import PairClassifier
from .pbt import HyperparameterSpace, pbt_search
from .store import ModelStore
from .synthetic import PRETRAIN_SEED, pretrain_base
from .training import DEFAULTS, Objective, finetune, stratified_split
from .wire import WireFormatError, read_pairs_csv, read_training_csv, write_scores_csv

log = logging.getLogger(__name__)

VALIDATION_FRACTION = 0.2


def ensure_base(store: ModelStore) -> str:
    """Load or create the pretrained base model, recording its id."""
    marker = store.root / "base_id"
    if marker.is_file():
        base_id = marker.read_text().strip()
        if base_id in store:
            return base_id
    log.info("pretraining base model (first start with this store)")
    base_id = store.save(pretrain_base(seed=PRETRAIN_SEED))
    marker.write_text(base_id)
    return base_id


def create_app(store_dir: Path | str, model_id: str | None = None, autoload: bool = True) -> FastAPI:
    app = FastAPI(title="pair scorer")
    store = ModelStore(store_dir)
    state = app.state
    state.store = store
    state.models: dict[str, PairClassifier] = {}
    state.current_id = None
    state.base_id = None
    state.train_lock = threading.Lock()

    def model_for(wanted: str) -> PairClassifier:
        if wanted not in state.models:
            state.models[wanted] = store.load(wanted)
        return state.models[wanted]

    if autoload:
        state.base_id = ensure_base(store)
        state.current_id = model_id or state.base_id
        model_for(state.current_id)

    @app.get("/health")
    def health() -> PlainTextResponse:
        return PlainTextResponse("ok")

    @app.get("/models")
    def models() -> JSONResponse:
        return JSONResponse(store.ids())

    @app.post("/score")
    async def score(request: Request, model: str | None = Query(default=None)) -> Response:
        wanted = model or state.current_id
        if wanted is None:
            return PlainTextResponse("model not loaded", status_code=503)
        try:
            served = model_for(wanted)
        except KeyError:
            return PlainTextResponse(f"no such model: {wanted}", status_code=404)
        body = await request.body()
        try:
            rows = read_pairs_csv(body)
        except WireFormatError as exc:
            return PlainTextResponse(str(exc), status_code=400)
        scores, truncated = served.score_pairs([(left, right) for _, left, right in rows])
        payload = write_scores_csv([(pair_id, value) for (pair_id, _, _), value in zip(rows, scores)])
        return Response(
            payload,
            media_type="text/csv; charset=utf-8",
            headers={"X-Truncation-Count": str(truncated)},
        )

    @app.post("/finetune")
    async def finetune_route(
        request: Request,
        epochs: int = Query(default=DEFAULTS.epochs),
        learning_rate: float = Query(default=DEFAULTS.learning_rate),
        seed: int = Query(default=1),
        batch_size: int = Query(default=16),
    ) -> Response:
        if state.base_id is None:
            return PlainTextResponse("model not loaded", status_code=503)
        if not state.train_lock.acquire(blocking=False):
            return PlainTextResponse("a training job is already running", status_code=409)
        try:
            body = await request.body()
            try:
                examples = read_training_csv(body)
                trained, loss = finetune(
                    model_for(state.base_id),
                    examples,
                    epochs=epochs,
                    learning_rate=learning_rate,
                    batch_size=batch_size,
                    seed=seed,
                )
            except (WireFormatError, ValueError) as exc:
                return PlainTextResponse(str(exc), status_code=400)
            new_id = store.save(trained)
            state.models[new_id] = trained
            state.current_id = new_id
            return JSONResponse({"loss": loss, "model_id": new_id})
        finally:
            state.train_lock.release()

    @app.post("/pbt")
    async def pbt_route(
        request: Request,
        population: int = Query(default=12),
        objective: str = Query(default=Objective.AUC.value),
        seed: int = Query(default=0),
    ) -> Response:
        if state.base_id is None:
            return PlainTextResponse("model not loaded", status_code=503)
        if not state.train_lock.acquire(blocking=False):
            return PlainTextResponse("a training job is already running", status_code=409)
        try:
            body = await request.body()
            try:
                examples = read_training_csv(body)
                chosen_objective = Objective(objective)
                train, validation = stratified_split(examples, VALIDATION_FRACTION, seed)
                base = model_for(state.base_id)
                space = HyperparameterSpace(
                    max_batch_size=probe_batch_size(base, examples[0] if examples else ("x", "y", 0))
                )
                result = pbt_search(
                    base,
                    train,
                    validation,
                    space=space,
                    population=population,
                    objective=chosen_objective,
                    seed=seed,
                )
            except (WireFormatError, ValueError) as exc:
                return PlainTextResponse(str(exc), status_code=400)
            best_id = store.save(result.best_model)
            state.models[best_id] = result.best_model
            state.current_id = best_id
            return JSONResponse(
                {
                    "model_id": best_id,
                    "objective": chosen_objective.value,
                    "best_value": result.best_objective,
                    "best_trial": result.best_trial,
                    "trial_log": result.log,
                }
            )
        finally:
            state.train_lock.release()

    return app


def serve(store_dir: Path | str, port: int, host: str = "127.0.0.1", model_id: str | None = None):
    import uvicorn

    app = create_app(store_dir, model_id=model_id)
    uvicorn.run(app, host=host, port=port, log_level="info")
