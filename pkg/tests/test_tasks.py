"""Trial-construction and metric unit tests.

Oracles:
- the modified Hausdorff distance is checked against an independent
  brute-force implementation (explicit nearest-neighbor loops) on small
  random images plus hand-computed point sets;
- Euclidean distance against hand counts;
- generation scoring against hand-built assignments.
"""

import math

import numpy as np
import pytest

from growthlab import render, tasks
from growthlab.errors import (DegenerateDistractor, DimensionMismatch,
                              EmptyImage, TooFewSegments, TooManySegments)
from growthlab.lsystem import LSystem, count_forward, expand_to_depth


def oracle_modified_hausdorff(a, b):
    """Independent reimplementation with explicit loops."""
    pa = [tuple(p) for p in np.argwhere(a)]
    pb = [tuple(p) for p in np.argwhere(b)]

    def directed(ps, qs):
        total = 0.0
        for p in ps:
            total += min(math.dist(p, q) for q in qs)
        return total / len(ps)

    return max(directed(pa, pb), directed(pb, pa))


def image_from_points(points, size=8):
    img = np.zeros((size, size), dtype=bool)
    for r, c in points:
        img[r, c] = True
    return img


class TestEuclidean:
    def test_identical_is_zero(self, rng):
        img = rng.random((16, 16)) < 0.3
        assert tasks.euclidean_distance(img, img) == 0.0

    def test_sqrt_of_disagreements(self):
        a = np.zeros((4, 4), dtype=bool)
        b = a.copy()
        b[0, 0] = b[1, 1] = b[2, 2] = b[3, 3] = True
        assert tasks.euclidean_distance(a, b) == pytest.approx(2.0)

    def test_symmetric(self, rng):
        for _ in range(20):
            a = rng.random((8, 8)) < 0.5
            b = rng.random((8, 8)) < 0.5
            assert tasks.euclidean_distance(a, b) == \
                tasks.euclidean_distance(b, a)

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatch):
            tasks.euclidean_distance(np.zeros((2, 2), dtype=bool),
                                     np.zeros((3, 3), dtype=bool))


class TestModifiedHausdorff:
    def test_identical_is_zero(self, rng):
        img = rng.random((16, 16)) < 0.3
        img[0, 0] = True
        assert tasks.modified_hausdorff(img, img) == 0.0

    def test_single_points_give_their_distance(self):
        a = image_from_points([(0, 0)])
        b = image_from_points([(3, 4)])
        assert tasks.modified_hausdorff(a, b) == pytest.approx(5.0)

    def test_asymmetric_sets_take_the_max_direction(self):
        # A = {(0,0), (0,1)}, B = {(0,0)}: d(A->B) = (0 + 1)/2, d(B->A) = 0
        a = image_from_points([(0, 0), (0, 1)])
        b = image_from_points([(0, 0)])
        assert tasks.modified_hausdorff(a, b) == pytest.approx(0.5)

    def test_matches_bruteforce_oracle_on_random_images(self, rng):
        for _ in range(50):
            a = rng.random((7, 7)) < 0.25
            b = rng.random((7, 7)) < 0.25
            if not a.any() or not b.any():
                continue
            assert tasks.modified_hausdorff(a, b) == \
                pytest.approx(oracle_modified_hausdorff(a, b))

    def test_symmetric(self, rng):
        for _ in range(20):
            a = rng.random((6, 6)) < 0.4
            b = rng.random((6, 6)) < 0.4
            if not a.any() or not b.any():
                continue
            assert tasks.modified_hausdorff(a, b) == \
                pytest.approx(tasks.modified_hausdorff(b, a))

    def test_empty_image_rejected(self):
        a = np.zeros((4, 4), dtype=bool)
        b = image_from_points([(1, 1)], size=4)
        with pytest.raises(EmptyImage):
            tasks.modified_hausdorff(a, b)

    def test_chunked_path_matches_direct(self, rng):
        # images large enough to span multiple chunks in the pairwise loop
        a = rng.random((80, 80)) < 0.5
        b = rng.random((80, 80)) < 0.5
        got = tasks.modified_hausdorff(a, b)
        pa = np.argwhere(a).astype(float)
        pb = np.argwhere(b).astype(float)
        d2 = ((pa[:, None, :] - pb[None, :, :]) ** 2).sum(axis=2)
        want = max(np.sqrt(d2.min(axis=1)).mean(), np.sqrt(d2.min(axis=0)).mean())
        assert got == pytest.approx(want)


class TestClassificationTrial:
    @pytest.fixture(scope="class")
    def trial(self, reference_concept, ink):
        sources = [
            LSystem(axiom="F", angle_deg=a, f_rule=r, g_rule="G")
            for r, a in [("GFG", 90), ("+F+", 60), ("G-F-G", 60),
                         ("-G+F+G-", 45), ("GG+F+GG", 30)]
        ]
        return tasks.build_classification_trial(
            reference_concept, sources, "incremental", seed=5, ink=ink,
            resolution=64)

    def test_six_distinct_candidates(self, trial):
        assert len(trial.candidates) == 6
        for i in range(6):
            for j in range(i + 1, 6):
                assert not np.array_equal(trial.candidates[i],
                                          trial.candidates[j])

    def test_truth_is_the_next_growth_step(self, trial, reference_concept, ink):
        want = render.render_binary(expand_to_depth(reference_concept, 3),
                                    reference_concept.angle_deg, ink, 64)
        assert np.array_equal(trial.candidates[trial.truth_index], want)

    def test_incremental_observes_depths_0_1_2(self, trial):
        assert tuple(d for d, _ in trial.observed) == (0, 1, 2)

    def test_block_observes_depths_0_and_2(self, reference_concept, ink):
        sources = list(trial_sources())
        t = tasks.build_classification_trial(reference_concept, sources,
                                             "block", seed=5, ink=ink,
                                             resolution=64)
        assert tuple(d for d, _ in t.observed) == (0, 2)

    def test_distractors_borrow_the_concept_angle(self, trial, ink):
        # each distractor is the concept's depth-2 string grown under the
        # source's rules, rendered at the concept's angle
        from growthlab.lsystem import expand_once
        s2 = expand_to_depth(trial.concept, 2)
        for source in trial.distractor_systems:
            borrowed = LSystem(axiom="F", angle_deg=trial.concept.angle_deg,
                               f_rule=source.f_rule, g_rule=source.g_rule)
            img = render.render_binary(expand_once(s2, borrowed, max_symbols=None),
                                       trial.concept.angle_deg, ink, 64)
            assert any(np.array_equal(img, c) for c in trial.candidates)

    def test_self_distractor_is_degenerate(self, reference_concept, ink):
        sources = list(trial_sources())
        sources[2] = reference_concept
        with pytest.raises(DegenerateDistractor):
            tasks.build_classification_trial(reference_concept, sources,
                                             "incremental", seed=5, ink=ink,
                                             resolution=64)

    def test_wrong_source_count_rejected(self, reference_concept):
        with pytest.raises(ValueError):
            tasks.build_classification_trial(reference_concept,
                                             list(trial_sources())[:3],
                                             "incremental", seed=0)

    def test_unknown_condition_rejected(self, reference_concept):
        with pytest.raises(ValueError):
            tasks.build_classification_trial(reference_concept,
                                             list(trial_sources()),
                                             "sideways", seed=0)


def trial_sources():
    return (
        LSystem(axiom="F", angle_deg=90, f_rule="GFG", g_rule="G"),
        LSystem(axiom="F", angle_deg=60, f_rule="+F+", g_rule="G"),
        LSystem(axiom="F", angle_deg=60, f_rule="G-F-G", g_rule="G"),
        LSystem(axiom="F", angle_deg=45, f_rule="-G+F+G-", g_rule="G"),
        LSystem(axiom="F", angle_deg=30, f_rule="GG+F+GG", g_rule="G"),
    )


class TestGenerationTrial:
    @pytest.fixture(scope="class")
    def trial(self, reference_concept, ink):
        return tasks.build_generation_trial(reference_concept, "incremental",
                                            seed=0, ink=ink, resolution=64,
                                            segment_bounds=None)

    def test_interface_covers_every_forward_symbol(self, trial,
                                                   reference_concept):
        s3 = expand_to_depth(reference_concept, 3)
        assert trial.interface.base_string == s3
        assert trial.n_segments == count_forward(s3)

    def test_truth_assignment_reproduces_the_truth_image(self, trial, ink):
        img = trial.interface.render_next(trial.truth_assignment, ink, 64)
        assert np.array_equal(img, trial.truth_image)

    def test_truth_assignment_marks_the_f_positions(self, trial):
        base = trial.interface.base_string
        want = tuple(base[i] == "F" for i in trial.interface.positions)
        assert trial.truth_assignment == want

    def test_evaluating_the_truth_is_perfect(self, trial, ink):
        out = tasks.evaluate_generation(trial.truth_assignment, trial, ink)
        assert out == {"segment_accuracy": 1.0, "exact_visual_match": True}

    def test_all_off_scores_the_inert_fraction(self, trial, ink):
        out = tasks.evaluate_generation(trial.interface.initial_assignment,
                                        trial, ink)
        inert = 1 - sum(trial.truth_assignment) / trial.n_segments
        assert out["segment_accuracy"] == pytest.approx(inert)
        assert out["exact_visual_match"] is False

    def test_wrong_length_rejected(self, trial):
        with pytest.raises(ValueError):
            tasks.evaluate_generation((True,), trial)

    def test_segment_bounds_enforced(self, reference_concept, ink):
        with pytest.raises(TooFewSegments):
            tasks.build_generation_trial(reference_concept, "incremental",
                                         seed=0, ink=ink, resolution=64,
                                         segment_bounds=(200, 300))
        with pytest.raises(TooManySegments):
            tasks.build_generation_trial(reference_concept, "incremental",
                                         seed=0, ink=ink, resolution=64,
                                         segment_bounds=(1, 10))
        t = tasks.build_generation_trial(reference_concept, "incremental",
                                         seed=0, ink=ink, resolution=64,
                                         segment_bounds=None)
        assert t.n_segments == 13  # 1 growable + 4 inert per step: 1+4*3

    def test_segment_geometry_ids_are_string_positions(self, trial):
        geo = trial.interface.segment_geometry()
        assert len(geo) == trial.n_segments
        assert [g["id"] for g in geo] == list(trial.interface.positions)
        for g in geo:
            for key in ("start", "end"):
                x, y = g[key]
                assert -0.1 <= x <= 1.1 and -0.1 <= y <= 1.1

    def test_conditions_control_observations(self, reference_concept, ink):
        inc = tasks.build_generation_trial(reference_concept, "incremental",
                                           seed=0, ink=ink, resolution=64,
                                           segment_bounds=None)
        blk = tasks.build_generation_trial(reference_concept, "block",
                                           seed=0, ink=ink, resolution=64,
                                           segment_bounds=None)
        assert tuple(d for d, _ in inc.observed) == (0, 1, 2, 3)
        assert tuple(d for d, _ in blk.observed) == (0, 3)

    def test_redundancy_respected_by_exact_match(self, ink):
        # a concept whose mature form retraces itself: toggling a segment
        # whose sprout is drawn over an existing sprout leaves the image
        # unchanged, and such variants must also count as exact
        concept = LSystem(axiom="F", angle_deg=90.0, f_rule="-G+F+G-",
                          g_rule="G")
        trial = tasks.build_generation_trial(concept, "incremental", seed=0,
                                             ink=ink, resolution=64,
                                             segment_bounds=None)
        truth = list(trial.truth_assignment)
        base_img = trial.interface.render_next(truth, ink, 64)
        variants = 0
        for i in range(trial.n_segments):
            flipped = truth.copy()
            flipped[i] = not flipped[i]
            img = trial.interface.render_next(flipped, ink, 64)
            out = tasks.evaluate_generation(flipped, trial, ink)
            assert out["exact_visual_match"] == bool(
                np.array_equal(img, base_img))
            variants += out["exact_visual_match"]
            assert out["segment_accuracy"] == pytest.approx(
                1 - 1 / trial.n_segments)


class TestProblemFromTrial:
    def test_incremental_keeps_all_depths(self, reference_concept, ink):
        trial = tasks.build_generation_trial(reference_concept, "incremental",
                                             seed=0, ink=ink, resolution=64,
                                             segment_bounds=None)
        problem = tasks.problem_from_trial(trial)
        assert problem.depths == (0, 1, 2, 3)
        assert not problem.unknown_depth

    def test_block_keeps_only_the_mature_exemplar(self, reference_concept, ink):
        trial = tasks.build_generation_trial(reference_concept, "block",
                                             seed=0, ink=ink, resolution=64,
                                             segment_bounds=None)
        problem = tasks.problem_from_trial(trial)
        assert problem.unknown_depth
        assert len(problem.images) == 1
        assert np.array_equal(problem.images[0], tasks.mature_image(trial))

    def test_mature_string_matches_deepest_observation(self, reference_concept,
                                                       ink):
        trial = tasks.build_generation_trial(reference_concept, "block",
                                             seed=0, ink=ink, resolution=64,
                                             segment_bounds=None)
        assert tasks.mature_string(trial) == expand_to_depth(
            reference_concept, 3)


class TestNonRecursiveScore:
    def test_prefers_the_unchanged_image(self, reference_concept, ink):
        # with no concept of rewriting, the mature exemplar itself beats
        # the true next step
        trial = tasks.build_generation_trial(reference_concept, "incremental",
                                             seed=0, ink=ink, resolution=64,
                                             segment_bounds=None)
        mature = tasks.mature_string(trial)
        same = tasks.nonrecursive_score(mature, 60.0,
                                        tasks.mature_image(trial), ink)
        grown = tasks.nonrecursive_score(mature, 60.0, trial.truth_image, ink)
        assert same > grown
