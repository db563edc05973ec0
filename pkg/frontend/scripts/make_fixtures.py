"""Regenerate the frontend test fixtures from the Python harness.

Writes one generation trial's geometry plus a set of assignments with
their harness-computed scores, so the UI tests can assert differential
consistency: the numbers the client displays are exactly the numbers the
scoring library produces for the same assignment.

Run from the repository root:  python frontend/scripts/make_fixtures.py
"""

import base64
import io
import json
from pathlib import Path

import numpy as np

from growthlab import experiment as ex
from growthlab import imageio, tasks
from growthlab.grammar import default_grammar
from growthlab.render import InkParams

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "trial.json"


def encode(image) -> dict:
    buf = io.BytesIO()
    imageio.write_pbm(buf, image)
    return {"format": "P4", "base64": base64.b64encode(buf.getvalue()).decode()}


def main() -> None:
    g = default_grammar()
    ink = InkParams()
    concepts = ex.suite_concepts(g, n=8, seed=0)
    suite = ex.build_generation_suite(g, "incremental", seed=0, ink=ink,
                                      resolution=64, concepts=concepts,
                                      n_trials=3)
    trial = suite[0]
    m = trial.n_segments
    rng = np.random.default_rng(5)
    assignments = {
        "truth": list(trial.truth_assignment),
        "all_off": [False] * m,
        "all_on": [True] * m,
        "random": [bool(b) for b in rng.integers(0, 2, size=m)],
    }
    cases = []
    for name, assignment in assignments.items():
        result = tasks.evaluate_generation(assignment, trial, ink)
        image = trial.interface.render_next(tuple(assignment), ink,
                                            trial.resolution)
        cases.append({
            "name": name,
            "assignment": [bool(b) for b in assignment],
            "segment_accuracy": result["segment_accuracy"],
            "exact_visual_match": bool(result["exact_visual_match"]),
            "image": encode(image),
        })
    fixture = {
        "trial": {
            "id": 0,
            "condition": trial.condition,
            "n_segments": m,
            "observed": [{"depth": d, "image": encode(img)}
                         for d, img in trial.observed],
            "segments": trial.interface.segment_geometry(),
        },
        "cases": cases,
    }
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(fixture, indent=1))
    print(f"wrote {OUT} ({m} segments, {len(cases)} cases)")


if __name__ == "__main__":
    main()
