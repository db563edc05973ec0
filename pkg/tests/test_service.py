"""HTTP API over generation trials, tested in-process."""

import base64
import io

import numpy as np
import pytest
from fastapi.testclient import TestClient

from growthlab import experiment as ex
from growthlab import grammar as gr
from growthlab import imageio, render
from growthlab.config import RunConfig
from growthlab.service import create_app

RES = 48


@pytest.fixture(scope="module")
def suite():
    g = gr.default_grammar()
    return ex.build_generation_suite(g, "incremental", n_trials=3, seed=0,
                                     ink=render.InkParams(), resolution=RES)


@pytest.fixture(scope="module")
def client(suite):
    cfg = RunConfig(resolution=RES,
                    chain_steps={"incremental": 30, "block": 20})
    return TestClient(create_app(cfg, suite=suite))


def decode_image(payload) -> np.ndarray:
    assert payload["format"] == "P4"
    return imageio.read_pbm(io.BytesIO(base64.b64decode(payload["base64"])))


class TestTrials:
    def test_list(self, client, suite):
        got = client.get("/v1/trials").json()["trials"]
        assert len(got) == 3
        assert got[0]["id"] == 0
        assert got[0]["n_segments"] == suite[0].n_segments

    def test_view(self, client, suite):
        got = client.get("/v1/trials/0").json()
        assert len(got["segments"]) == suite[0].n_segments
        assert [o["depth"] for o in got["observed"]] == \
            [d for d, _ in suite[0].observed]
        img = decode_image(got["observed"][-1]["image"])
        assert np.array_equal(img, suite[0].observed[-1][1])

    def test_unknown_trial_404(self, client):
        assert client.get("/v1/trials/99").status_code == 404


class TestScoring:
    def test_truth_is_exact(self, client, suite):
        t = suite[0]
        got = client.post("/v1/trials/0/response", json={
            "assignment": list(t.truth_assignment)}).json()
        assert got["exact_visual_match"] is True
        assert got["segment_accuracy"] == 1.0
        assert np.array_equal(decode_image(got["image"]), t.truth_image)

    def test_all_off_scores_inert_fraction(self, client, suite):
        t = suite[1]
        got = client.post("/v1/trials/1/response", json={
            "assignment": [False] * t.n_segments}).json()
        want = 1.0 - float(np.mean(t.truth_assignment))
        assert got["segment_accuracy"] == pytest.approx(want)
        assert got["exact_visual_match"] is False

    def test_wrong_length_400(self, client, suite):
        r = client.post("/v1/trials/0/response", json={
            "assignment": [True] * (suite[0].n_segments + 1)})
        assert r.status_code == 400


class TestPrediction:
    def test_shape_and_determinism(self, client, suite):
        a = client.get("/v1/trials/0/prediction").json()
        b = client.get("/v1/trials/0/prediction").json()
        assert a == b
        assert len(a["assignment"]) == suite[0].n_segments
        assert a["n_steps"] == 30
        decode_image(a["image"])

    def test_seed_parameter(self, client):
        a = client.get("/v1/trials/0/prediction", params={"seed": 0}).json()
        b = client.get("/v1/trials/0/prediction", params={"seed": 1}).json()
        assert a["seed"] == 0 and b["seed"] == 1


class TestSessions:
    def test_logged_responses(self, client, suite):
        token = client.post("/v1/sessions").json()["token"]
        t = suite[0]
        client.post("/v1/trials/0/response", json={
            "assignment": list(t.truth_assignment), "session": token})
        log = client.get(f"/v1/sessions/{token}").json()["responses"]
        assert len(log) == 1
        assert log[0]["trial"] == 0
        assert log[0]["exact_visual_match"] is True

    def test_unknown_session_404(self, client, suite):
        assert client.get("/v1/sessions/deadbeef").status_code == 404
        r = client.post("/v1/trials/0/response", json={
            "assignment": [False] * suite[0].n_segments,
            "session": "deadbeef"})
        assert r.status_code == 404
