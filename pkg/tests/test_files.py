"""On-disk formats round-trip exactly."""

import json

import numpy as np
import pytest

from growthlab import experiment as ex
from growthlab import files, grammar as gr, render, tasks
from growthlab.lsystem import LSystem

RES = 48


@pytest.fixture(scope="module")
def ink():
    return render.InkParams()


@pytest.fixture(scope="module")
def grammar():
    return gr.default_grammar()


@pytest.fixture(scope="module")
def concepts(grammar):
    return ex.suite_concepts(grammar, seed=1)


class TestConceptFiles:
    def test_round_trip(self, tmp_path):
        c = LSystem(axiom="F", angle_deg=45.0, f_rule="F-G+F+G-F", g_rule="G")
        files.write_concept(c, tmp_path / "c.json")
        assert files.read_concept(tmp_path / "c.json") == c

    def test_plain_json(self, tmp_path):
        c = LSystem(axiom="F", angle_deg=30.0, f_rule="-G+F+G- F", g_rule="G")
        files.write_concept(c, tmp_path / "c.json")
        doc = json.loads((tmp_path / "c.json").read_text())
        assert doc["f_rule"] == "-G+F+G- F"
        assert doc["angle_deg"] == 30.0


class TestTraceFiles:
    def test_round_trip(self, tmp_path):
        records = [(0, "F", 45.0, None, -3.5, True),
                   (10, "-G+F+G- F", 60.0, 2, -120.25, False)]
        files.write_trace(records, tmp_path / "trace.jsonl")
        got = files.read_trace(tmp_path / "trace.jsonl")
        assert got == records

    def test_line_delimited(self, tmp_path):
        records = [(i, "F", 30.0, 1, -1.0, True) for i in range(5)]
        files.write_trace(records, tmp_path / "t.jsonl")
        lines = (tmp_path / "t.jsonl").read_text().strip().split("\n")
        assert len(lines) == 5
        assert all(json.loads(line)["f_rule"] == "F" for line in lines)


class TestSuiteBundles:
    def test_classification_round_trip(self, tmp_path, grammar, concepts, ink):
        suite = ex.build_classification_suite(grammar, "block", n_trials=3,
                                              seed=1, ink=ink, resolution=RES,
                                              concepts=concepts[:3])
        files.write_suite(suite, tmp_path / "suite")
        got = files.read_suite(tmp_path / "suite")
        assert len(got) == 3
        for a, b in zip(got, suite):
            assert a.concept == b.concept
            assert a.condition == b.condition
            assert a.truth_index == b.truth_index
            assert a.distractor_systems == b.distractor_systems
            assert all(np.array_equal(x, y)
                       for x, y in zip(a.candidates, b.candidates))
            assert [(d, img.tobytes()) for d, img in a.observed] == \
                [(d, img.tobytes()) for d, img in b.observed]

    def test_generation_round_trip(self, tmp_path, grammar, concepts, ink):
        suite = ex.build_generation_suite(grammar, "incremental", n_trials=2,
                                          seed=1, ink=ink, resolution=RES,
                                          concepts=concepts)
        files.write_suite(suite, tmp_path / "suite")
        got = files.read_suite(tmp_path / "suite")
        assert len(got) == 2
        for a, b in zip(got, suite):
            assert a.concept == b.concept
            assert a.interface.base_string == b.interface.base_string
            assert a.interface.positions == b.interface.positions
            assert a.truth_assignment == b.truth_assignment
            assert np.array_equal(a.truth_image, b.truth_image)

    def test_reloaded_suite_scores_identically(self, tmp_path, grammar,
                                               concepts, ink):
        suite = ex.build_generation_suite(grammar, "incremental", n_trials=2,
                                          seed=2, ink=ink, resolution=RES,
                                          concepts=concepts)
        files.write_suite(suite, tmp_path / "suite")
        got = files.read_suite(tmp_path / "suite")
        for a, b in zip(got, suite):
            r1 = tasks.evaluate_generation(a.truth_assignment, a, ink)
            r2 = tasks.evaluate_generation(b.truth_assignment, b, ink)
            assert r1 == r2
            assert r1["exact_visual_match"]

    def test_images_are_p4_files(self, tmp_path, grammar, concepts, ink):
        suite = ex.build_generation_suite(grammar, "incremental", n_trials=1,
                                          seed=1, ink=ink, resolution=RES,
                                          concepts=concepts)
        files.write_suite(suite, tmp_path / "suite")
        pbms = list((tmp_path / "suite").glob("*.pbm"))
        assert pbms
        for p in pbms:
            assert p.read_bytes().startswith(b"P4")
