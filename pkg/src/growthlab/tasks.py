"""Experiment trials: classification with constructed distractors, the
segment-toggle generation interface, baseline similarity metrics, and
response scoring."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import render
from .errors import (DegenerateDistractor, DimensionMismatch, EmptyImage,
                     TooFewSegments, TooManySegments)
from .inference import InferenceProblem
from .lsystem import (LSystem, apply_assignment, count_forward, expand_once,
                      expand_to_depth, forward_positions)

#: Display bounds on toggleable segment counts in full-size suites.
SEGMENT_BOUNDS = (22, 125)

CONDITIONS = ("incremental", "block")


def _check_condition(condition: str):
    if condition not in CONDITIONS:
        raise ValueError(f"unknown condition {condition!r}")


@dataclass(frozen=True)
class ClassificationTrial:
    """Six-way forced choice: which image is the next growth step?"""

    concept: LSystem
    condition: str
    observed: tuple          # ((depth, binary image), ...)
    candidates: tuple        # six binary images
    truth_index: int
    distractor_systems: tuple = ()

    @property
    def resolution(self) -> int:
        return self.observed[0][1].shape[0]


@dataclass(frozen=True)
class ToggleInterface:
    """The 2^m response surface over the mature exemplar.

    Each forward symbol of the base string is a toggleable segment; an
    assignment marks which segments sprout (F) versus stay inert (G).  The
    next growth step of an assignment expands the toggled string under the
    concept's rules.
    """

    concept: LSystem
    base_string: str
    positions: tuple

    @property
    def initial_assignment(self) -> tuple:
        return (False,) * len(self.positions)

    def apply(self, assignment) -> str:
        return apply_assignment(self.base_string, assignment)

    def next_step_string(self, assignment) -> str:
        return expand_once(self.apply(assignment), self.concept, max_symbols=None)

    def render_next(self, assignment, ink: render.InkParams,
                    resolution: int) -> np.ndarray:
        return render.render_binary(self.next_step_string(assignment),
                                    self.concept.angle_deg, ink, resolution)

    def segment_geometry(self) -> list:
        """Per-segment ids and endpoints in normalized [0,1]^2 coordinates
        (stable ids equal symbol positions in the base string)."""
        t = render.normalize(render.trace(self.base_string, self.concept.angle_deg))
        return [
            {"id": int(src), "start": [float(seg[0, 0]), float(seg[0, 1])],
             "end": [float(seg[1, 0]), float(seg[1, 1])]}
            for seg, src in zip(t.segments, t.source_index)
        ]


@dataclass(frozen=True)
class GenerationTrial:
    """Predict one growth step past the mature exemplar by toggling its
    segments."""

    concept: LSystem
    condition: str
    observed: tuple
    interface: ToggleInterface
    truth_assignment: tuple
    truth_image: np.ndarray

    @property
    def resolution(self) -> int:
        return self.observed[0][1].shape[0]

    @property
    def n_segments(self) -> int:
        return len(self.interface.positions)


@dataclass(frozen=True)
class SimilarityMetric:
    """A pluggable distance on binary image pairs (nonnegative, zero on
    identical inputs)."""

    name: str
    distance: callable

    def __call__(self, a: np.ndarray, b: np.ndarray) -> float:
        return float(self.distance(a, b))


def euclidean_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Pixel-space Euclidean distance on 0/1 encodings: sqrt(#disagreements)."""
    a = np.asarray(a, dtype=bool)
    b = np.asarray(b, dtype=bool)
    if a.shape != b.shape:
        raise DimensionMismatch(f"{a.shape} vs {b.shape}")
    return math.sqrt(int(np.count_nonzero(a != b)))


def modified_hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    """Modified Hausdorff distance between the black-pixel point sets:
    max over directions of the mean nearest-neighbor distance."""
    a = np.asarray(a, dtype=bool)
    b = np.asarray(b, dtype=bool)
    if a.shape != b.shape:
        raise DimensionMismatch(f"{a.shape} vs {b.shape}")
    pa = np.argwhere(a).astype(float)
    pb = np.argwhere(b).astype(float)
    if len(pa) == 0 or len(pb) == 0:
        raise EmptyImage("modified Hausdorff needs at least one black pixel per image")

    def directed(p, q):
        # chunked to bound the pairwise distance matrix
        total = 0.0
        step = 4096
        for i in range(0, len(p), step):
            d2 = ((p[i:i + step, None, :] - q[None, :, :]) ** 2).sum(axis=2)
            total += np.sqrt(d2.min(axis=1)).sum()
        return total / len(p)

    return max(directed(pa, pb), directed(pb, pa))


EUCLIDEAN = SimilarityMetric("euclidean", euclidean_distance)
HAUSDORFF = SimilarityMetric("hausdorff", modified_hausdorff)


def observed_images(concept: LSystem, depths, ink: render.InkParams,
                    resolution: int) -> tuple:
    out = []
    for d in depths:
        s = expand_to_depth(concept, d)
        out.append((d, render.render_binary(s, concept.angle_deg, ink, resolution)))
    return tuple(out)


def build_classification_trial(concept: LSystem, distractor_sources, condition: str,
                               seed, ink: render.InkParams | None = None,
                               resolution: int = render.RESOLUTION) -> ClassificationTrial:
    """True candidate: the concept's own next step after depth 2.  Each
    distractor expands the concept's depth-2 string under a different
    system's rules, rendered with the concept's angle."""
    _check_condition(condition)
    ink = ink or render.InkParams()
    if len(distractor_sources) != 5:
        raise ValueError("need exactly five distractor sources")
    rng = np.random.default_rng(seed)

    s2 = expand_to_depth(concept, 2)
    truth = render.render_binary(expand_once(s2, concept), concept.angle_deg,
                                 ink, resolution)
    images = [truth]
    for source in distractor_sources:
        borrowed = LSystem(axiom=concept.axiom, angle_deg=concept.angle_deg,
                           f_rule=source.f_rule, g_rule=source.g_rule)
        img = render.render_binary(expand_once(s2, borrowed, max_symbols=None),
                                   concept.angle_deg, ink, resolution)
        for prev in images:
            if np.array_equal(img, prev):
                raise DegenerateDistractor(
                    f"distractor with rule {source.f_rule!r} duplicates a candidate")
        images.append(img)

    order = rng.permutation(6)
    candidates = tuple(images[i] for i in order)
    truth_index = int(np.flatnonzero(order == 0)[0])
    depths = (0, 1, 2) if condition == "incremental" else (0, 2)
    return ClassificationTrial(concept, condition,
                               observed_images(concept, depths, ink, resolution),
                               candidates, truth_index, tuple(distractor_sources))


def build_generation_trial(concept: LSystem, condition: str, seed,
                           ink: render.InkParams | None = None,
                           resolution: int = render.RESOLUTION,
                           segment_bounds: tuple | None = SEGMENT_BOUNDS) -> GenerationTrial:
    """Toggle interface over the concept's depth-3 string; truth is the
    visual form of depth 4."""
    _check_condition(condition)
    ink = ink or render.InkParams()
    s3 = expand_to_depth(concept, 3)
    m = count_forward(s3)
    if segment_bounds is not None:
        lo, hi = segment_bounds
        if m < lo:
            raise TooFewSegments(f"{m} segments < {lo}")
        if m > hi:
            raise TooManySegments(f"{m} segments > {hi}")
    interface = ToggleInterface(concept, s3, tuple(forward_positions(s3)))
    truth_assignment = tuple(c == "F" for i, c in enumerate(s3)
                             if i in set(interface.positions))
    truth_image = render.render_binary(expand_once(s3, concept, max_symbols=None),
                                       concept.angle_deg, ink, resolution)
    depths = (0, 1, 2, 3) if condition == "incremental" else (0, 3)
    return GenerationTrial(concept, condition,
                           observed_images(concept, depths, ink, resolution),
                           interface, truth_assignment, truth_image)


def problem_from_trial(trial) -> InferenceProblem:
    """Inference problem per condition: incremental conditions observe all
    steps at known depths; block conditions condition on the single mature
    exemplar at an unknown depth."""
    if trial.condition == "incremental":
        depths = tuple(d for d, _ in trial.observed)
        images = tuple(img for _, img in trial.observed)
        return InferenceProblem(images, depths)
    mature = max(trial.observed, key=lambda pair: pair[0])
    return InferenceProblem((mature[1],), None)


def evaluate_generation(response, trial: GenerationTrial,
                        ink: render.InkParams | None = None) -> dict:
    """Score a toggle assignment: per-segment agreement with the canonical
    truth assignment, and pixel-identity of the rendered next-step visual
    form (so redundant-segment variants of the truth count as correct)."""
    ink = ink or render.InkParams()
    response = tuple(bool(b) for b in response)
    if len(response) != trial.n_segments:
        raise ValueError(
            f"assignment has {len(response)} bits for {trial.n_segments} segments")
    agree = sum(r == t for r, t in zip(response, trial.truth_assignment))
    img = trial.interface.render_next(response, ink, trial.resolution)
    return {
        "segment_accuracy": agree / trial.n_segments,
        "exact_visual_match": bool(np.array_equal(img, trial.truth_image)),
    }


def mature_image(trial) -> np.ndarray:
    return max(trial.observed, key=lambda pair: pair[0])[1]


def mature_string(trial) -> str:
    depth = max(d for d, _ in trial.observed)
    return expand_to_depth(trial.concept, depth)


def nonrecursive_score(mature: str, angle_deg: float, candidate: np.ndarray,
                       ink: render.InkParams | None = None) -> float:
    """Likelihood of a candidate under the mature string rendered directly,
    with no recursive expansion."""
    ink = ink or render.InkParams()
    resolution = np.asarray(candidate).shape[0]
    mean = render.render_mean(mature, angle_deg, ink, resolution)
    return render.log_likelihood(candidate, mean)
