"""HTTP API over the generation trials: list trials, fetch segment geometry
and observed images, score toggle assignments, and expose the model's own
prediction.  All scoring goes through the library's evaluate_generation —
the service holds no scoring logic of its own."""

from __future__ import annotations

import base64
import io
import secrets
import threading

import numpy as np
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from . import experiment as ex
from . import files, imageio, tasks
from .config import RunConfig


def _encode_image(image: np.ndarray) -> dict:
    buf = io.BytesIO()
    imageio.write_pbm(buf, image)
    return {"format": "P4", "base64": base64.b64encode(buf.getvalue()).decode()}


class AssignmentBody(BaseModel):
    assignment: list[bool]
    session: str | None = None


def create_app(config: RunConfig | None = None, suite=None,
               suite_path=None) -> FastAPI:
    """Build the app around one generation suite: regenerated from the
    config, passed in directly, or loaded from a suite bundle."""
    config = config or RunConfig()
    if suite is None:
        if suite_path is not None:
            suite = files.read_suite(suite_path)
        else:
            g = config.grammar()
            suite = ex.build_generation_suite(
                g, config.condition, config.suite_sizes["generation"],
                config.seed, config.ink(), config.resolution)
    suite = [t for t in suite if isinstance(t, tasks.GenerationTrial)]
    if not suite:
        raise ValueError("service needs at least one generation trial")
    grammar = config.grammar()
    ink = config.ink()

    app = FastAPI(title="growthlab", version="1")
    sessions: dict = {}
    lock = threading.Lock()
    prediction_cache: dict = {}

    def get_trial(trial_id: int) -> tasks.GenerationTrial:
        if not 0 <= trial_id < len(suite):
            raise HTTPException(status_code=404,
                                detail=f"no trial {trial_id}")
        return suite[trial_id]

    @app.get("/v1/trials")
    def list_trials():
        return {"trials": [
            {"id": i, "condition": t.condition, "n_segments": t.n_segments,
             "angle_deg": t.concept.angle_deg}
            for i, t in enumerate(suite)
        ]}

    @app.get("/v1/trials/{trial_id}")
    def trial_view(trial_id: int):
        t = get_trial(trial_id)
        return {
            "id": trial_id,
            "condition": t.condition,
            "n_segments": t.n_segments,
            "observed": [{"depth": d, "image": _encode_image(img)}
                         for d, img in t.observed],
            "segments": t.interface.segment_geometry(),
        }

    @app.post("/v1/trials/{trial_id}/response")
    def score_response(trial_id: int, body: AssignmentBody):
        t = get_trial(trial_id)
        if len(body.assignment) != t.n_segments:
            raise HTTPException(
                status_code=400,
                detail=f"assignment has {len(body.assignment)} bits "
                       f"for {t.n_segments} segments")
        result = tasks.evaluate_generation(body.assignment, t, ink)
        image = t.interface.render_next(tuple(body.assignment), ink,
                                        t.resolution)
        out = {
            "segment_accuracy": result["segment_accuracy"],
            "exact_visual_match": result["exact_visual_match"],
            "image": _encode_image(image),
        }
        if body.session is not None:
            with lock:
                if body.session not in sessions:
                    raise HTTPException(status_code=404,
                                        detail="unknown session")
                sessions[body.session].append(
                    {"trial": trial_id,
                     "assignment": list(body.assignment),
                     "segment_accuracy": result["segment_accuracy"],
                     "exact_visual_match": result["exact_visual_match"]})
        return out

    @app.get("/v1/trials/{trial_id}/prediction")
    def prediction(trial_id: int, seed: int = 0):
        t = get_trial(trial_id)
        key = (trial_id, seed)
        with lock:
            cached = prediction_cache.get(key)
        if cached is None:
            steps = config.chain_steps[t.condition]
            assignment = ex.generate_bpl(t, grammar, steps, (trial_id, seed),
                                         ink, n_chains=config.n_chains)
            result = tasks.evaluate_generation(assignment, t, ink)
            cached = {
                "assignment": [bool(b) for b in assignment],
                "segment_accuracy": result["segment_accuracy"],
                "exact_visual_match": result["exact_visual_match"],
                "image": _encode_image(t.interface.render_next(
                    assignment, ink, t.resolution)),
                "seed": seed,
                "n_steps": steps,
            }
            with lock:
                prediction_cache[key] = cached
        return cached

    @app.post("/v1/sessions")
    def open_session():
        token = secrets.token_hex(16)
        with lock:
            sessions[token] = []
        return {"token": token}

    @app.get("/v1/sessions/{token}")
    def session_log(token: str):
        with lock:
            if token not in sessions:
                raise HTTPException(status_code=404, detail="unknown session")
            return {"responses": list(sessions[token])}

    return app
