"""Suite construction and model comparison: regenerate classification and
generation suites from a meta-grammar, run the BPL learner and the baseline
models over them, and tabulate accuracies."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import grammar as gr
from . import inference, render, tasks
from .errors import CapExceeded, DegenerateDistractor, RejectionLimitExceeded
from .lsystem import LSystem, count_forward, expand_to_depth

#: Default suite sizes for the full-size experiment.
N_CLASSIFICATION_TRIALS = 24
N_GENERATION_TRIALS = 13

#: Chain lengths modeling a resource-bounded participant, per condition.
PARTICIPANT_STEPS = {"incremental": 160, "block": 80}

MODELS = ("bpl", "nonrecursive", "euclidean", "hausdorff", "random")


# ---------------------------------------------------------------------------
# suite construction


def _depth_ok(system: LSystem, depth: int) -> bool:
    try:
        expand_to_depth(system, depth)
    except CapExceeded:
        return False
    return True


def _distinct_concepts(g: gr.MetaGrammar, n: int, rng: np.random.Generator,
                       max_depth: int, predicate=None,
                       max_draws: int = 200_000) -> list:
    """Sample ``n`` stimulus-constrained concepts with distinct
    (f_rule, angle) whose expansions stay under the symbol cap through
    ``max_depth`` and satisfy ``predicate`` if given."""
    seen = set()
    out = []
    draws = 0
    while len(out) < n:
        draws += 1
        if draws > max_draws:
            raise RejectionLimitExceeded(
                f"only {len(out)}/{n} suite concepts in {max_draws} draws")
        system, _ = gr.sample_lsystem(g, rng, mode="stimulus")
        key = (system.f_rule, system.angle_deg)
        if key in seen:
            continue
        if not _depth_ok(system, max_depth):
            continue
        if predicate is not None and not predicate(system):
            continue
        seen.add(key)
        out.append(system)
    return out


def suite_concepts(g: gr.MetaGrammar, n: int = N_CLASSIFICATION_TRIALS,
                   seed=0) -> list:
    """The stimulus concepts both suites draw from: distinct
    stimulus-constrained systems whose mature exemplar stays under the
    symbol cap with a toggleable segment count in display bounds."""
    lo, hi = tasks.SEGMENT_BOUNDS
    rng = np.random.default_rng(np.random.SeedSequence(seed).spawn(1)[0])

    def in_bounds(system: LSystem) -> bool:
        return lo <= count_forward(expand_to_depth(system, 3)) <= hi

    return _distinct_concepts(g, n, rng, max_depth=3, predicate=in_bounds)


def build_classification_suite(g: gr.MetaGrammar, condition: str,
                               n_trials: int = N_CLASSIFICATION_TRIALS,
                               seed=0, ink: render.InkParams | None = None,
                               resolution: int = render.RESOLUTION,
                               max_attempts: int = 100,
                               concepts: list | None = None) -> list:
    """``n_trials`` six-way trials over distinct concepts, each with five
    prior-sampled distractor systems (resampled when a distractor's render
    duplicates another candidate)."""
    ink = ink or render.InkParams()
    ss = np.random.SeedSequence(seed)
    if concepts is None:
        concepts = suite_concepts(g, n_trials, seed)
    trials = []
    for i, concept in enumerate(concepts):
        trial_ss = np.random.SeedSequence(entropy=ss.entropy, spawn_key=(1, i))
        trial_rng = np.random.default_rng(trial_ss)
        for attempt in range(max_attempts):
            sources = []
            while len(sources) < 5:
                source, _ = gr.sample_lsystem(g, trial_rng, mode="raw")
                if source.f_rule == concept.f_rule:
                    continue
                sources.append(source)
            try:
                trials.append(tasks.build_classification_trial(
                    concept, sources, condition, trial_rng, ink, resolution))
                break
            except DegenerateDistractor:
                continue
        else:
            raise DegenerateDistractor(
                f"no non-degenerate distractor set for {concept.f_rule!r} "
                f"in {max_attempts} attempts")
    return trials


def build_generation_suite(g: gr.MetaGrammar, condition: str,
                           n_trials: int = N_GENERATION_TRIALS,
                           seed=0, ink: render.InkParams | None = None,
                           resolution: int = render.RESOLUTION,
                           concepts: list | None = None,
                           pool_size: int = N_CLASSIFICATION_TRIALS) -> list:
    """Toggle-interface trials over the ``n_trials`` concepts with the
    visually largest segments, drawn from the classification suite's
    concept pool (pass ``concepts`` to share one sampled pool between both
    suites).

    "Largest" means longest segment length after normalizing the mature
    (depth-3) trajectory to the unit frame, so selected exemplars have
    comfortably clickable segments.
    """
    ink = ink or render.InkParams()
    pool = list(concepts if concepts is not None
                else suite_concepts(g, pool_size, seed))

    def segment_length(system: LSystem) -> float:
        t = render.normalize(render.trace(expand_to_depth(system, 3),
                                          system.angle_deg))
        return float(np.linalg.norm(t.segments[0, 1] - t.segments[0, 0]))

    pool.sort(key=segment_length, reverse=True)
    trials = []
    for i, concept in enumerate(pool[:n_trials]):
        trials.append(tasks.build_generation_trial(
            concept, condition, np.random.SeedSequence((seed, i)),
            ink, resolution))
    return trials


def all_off_statistics(suite, ink: render.InkParams | None = None) -> dict:
    """Score the do-nothing response (every segment inert) on each trial."""
    rows = [tasks.evaluate_generation(t.interface.initial_assignment, t, ink)
            for t in suite]
    return {
        "segment_accuracy": float(np.mean([r["segment_accuracy"] for r in rows])),
        "exact_visual_match": float(np.mean([r["exact_visual_match"] for r in rows])),
    }


# ---------------------------------------------------------------------------
# model runners (module-level so process pools can pickle tasks)


def _metric_by_name(name: str) -> tasks.SimilarityMetric:
    if name == "euclidean":
        return tasks.EUCLIDEAN
    if name == "hausdorff":
        return tasks.HAUSDORFF
    raise ValueError(f"unknown metric {name!r}")


def classify_with_metric(trial, metric: tasks.SimilarityMetric) -> int:
    """Pick the candidate closest to the mature exemplar (ties to the
    lowest index)."""
    ref = tasks.mature_image(trial)
    dists = [metric(c, ref) for c in trial.candidates]
    return int(np.argmin(dists))


def _generation_candidates(m: int):
    """The baseline response menu: both uniform assignments plus every
    one-segment departure from each."""
    out = [(False,) * m, (True,) * m]
    for base in (False, True):
        for i in range(m):
            bits = [base] * m
            bits[i] = not base
            out.append(tuple(bits))
    return out


def generate_with_metric(trial, metric: tasks.SimilarityMetric,
                         ink: render.InkParams | None = None) -> tuple:
    """Pick, from the baseline menu, the assignment whose next step looks
    most like the mature exemplar under the metric."""
    ink = ink or render.InkParams()
    ref = tasks.mature_image(trial)
    best, best_d = None, np.inf
    for assignment in _generation_candidates(trial.n_segments):
        img = trial.interface.render_next(assignment, ink, trial.resolution)
        d = metric(img, ref)
        if d < best_d:
            best, best_d = assignment, d
    return best


def classify_nonrecursive(trial, ink: render.InkParams | None = None) -> int:
    """Score candidates by likelihood under the mature string rendered
    directly, with no rewriting."""
    ink = ink or render.InkParams()
    mean = render.render_mean(tasks.mature_string(trial),
                              trial.concept.angle_deg, ink, trial.resolution)
    scores = [render.log_likelihood(c, mean) for c in trial.candidates]
    return int(np.argmax(scores))


def generate_nonrecursive(trial, ink: render.InkParams | None = None) -> tuple:
    ink = ink or render.InkParams()
    mean = render.render_mean(tasks.mature_string(trial),
                              trial.concept.angle_deg, ink, trial.resolution)
    best, best_score = None, -np.inf
    for assignment in _generation_candidates(trial.n_segments):
        img = trial.interface.render_next(assignment, ink, trial.resolution)
        score = render.log_likelihood(img, mean)
        if score > best_score:
            best, best_score = assignment, score
    return best


def classify_bpl(trial, g: gr.MetaGrammar, n_steps: int, seed,
                 ink: render.InkParams | None = None, decision: str = "last",
                 n_chains: int = 1) -> int:
    problem = tasks.problem_from_trial(trial)
    index, _ = inference.classify(problem, trial.candidates, g, n_steps, seed,
                                  ink, decision, n_chains)
    return index


def generate_bpl(trial, g: gr.MetaGrammar, n_steps: int, seed,
                 ink: render.InkParams | None = None, decision: str = "last",
                 n_chains: int = 1) -> tuple:
    problem = tasks.problem_from_trial(trial)
    return inference.generate_via_interface(problem, trial.interface, g,
                                            n_steps, seed, ink, decision,
                                            n_chains)


def infer_trial_posterior(trial, g: gr.MetaGrammar, n_steps: int, seed,
                          ink: render.InkParams | None = None,
                          n_chains: int = 1) -> inference.ChainState:
    """Best-by-posterior state over ``n_chains`` chains on the trial's
    inference problem (used for depth-identification checks)."""
    problem = tasks.problem_from_trial(trial)
    scorer = inference.Scorer(problem, ink)
    seeds = inference._as_seedseq(seed).spawn(n_chains)
    results = [inference.run_chain(problem, g, n_steps, s, scorer=scorer)
               for s in seeds]
    return max((r.best for r in results), key=lambda s: s.log_post)


def ideal_observer_trial(trial, g: gr.MetaGrammar, n_steps: int, seed,
                         ink: render.InkParams | None = None,
                         n_chains: int = 4) -> dict:
    """Long-chain best-by-posterior run sharing one set of chains between
    the trial's decision and the posterior-mode report.

    Classification trials yield {"choice", "correct", "state"}; generation
    trials yield {"assignment", "segment_accuracy", "exact_visual_match",
    "state"}.
    """
    problem = tasks.problem_from_trial(trial)
    scorer = inference.Scorer(problem, ink)
    seeds = inference._as_seedseq(seed).spawn(n_chains + 1)
    results = [inference.run_chain(problem, g, n_steps, s, scorer=scorer)
               for s in seeds[:n_chains]]
    state = max((r.best for r in results), key=lambda s: s.log_post)
    mean = scorer.predictive_mean(state.f_rule, state.angle_deg, state.depth)
    if isinstance(trial, tasks.ClassificationTrial):
        scores = [scorer.score_candidate(c, mean) for c in trial.candidates]
        choice = int(np.argmax(scores))
        return {"choice": choice, "correct": bool(choice == trial.truth_index),
                "state": state}
    assignment = inference._greedy_toggle(state, scorer, trial.interface,
                                          mean, seeds[-1])
    out = tasks.evaluate_generation(assignment, trial, ink)
    out["assignment"] = assignment
    out["state"] = state
    return out


# ---------------------------------------------------------------------------
# experiment harness


@dataclass
class ExperimentReport:
    """Per-response rows plus aggregate accuracies for one (task, model)
    run."""

    task: str
    model: str
    rows: list = field(default_factory=list)

    def summary(self) -> dict:
        out = {"task": self.task, "model": self.model, "n": len(self.rows)}
        if self.task == "classification":
            out["accuracy"] = float(np.mean([r["correct"] for r in self.rows]))
        else:
            out["segment_accuracy"] = float(
                np.mean([r["segment_accuracy"] for r in self.rows]))
            out["exact_visual_match"] = float(
                np.mean([r["exact_visual_match"] for r in self.rows]))
        return out

    def to_tsv(self) -> str:
        if not self.rows:
            return ""
        cols = list(self.rows[0].keys())
        lines = ["\t".join(cols)]
        for row in self.rows:
            lines.append("\t".join(str(row[c]) for c in cols))
        return "\n".join(lines) + "\n"

    def format_summary(self) -> str:
        s = self.summary()
        if self.task == "classification":
            body = f"accuracy {s['accuracy'] * 100:.1f}%"
        else:
            body = (f"segment accuracy {s['segment_accuracy'] * 100:.1f}%, "
                    f"exact visual match {s['exact_visual_match'] * 100:.1f}%")
        return f"{self.task} / {self.model} (n={s['n']}): {body}"


def _run_one(args) -> dict:
    (task, model, trial_index, trial, participant, g, n_steps, decision,
     n_chains, ink, seed) = args
    row = {"trial": trial_index, "participant": participant, "model": model}
    if task == "classification":
        if model == "bpl":
            choice = classify_bpl(trial, g, n_steps, seed, ink, decision,
                                  n_chains)
        elif model == "nonrecursive":
            choice = classify_nonrecursive(trial, ink)
        elif model in ("euclidean", "hausdorff"):
            choice = classify_with_metric(trial, _metric_by_name(model))
        elif model == "random":
            choice = int(np.random.default_rng(seed).integers(6))
        else:
            raise ValueError(f"unknown model {model!r}")
        row["choice"] = choice
        row["correct"] = bool(choice == trial.truth_index)
        return row
    if task == "generation":
        if model == "bpl":
            assignment = generate_bpl(trial, g, n_steps, seed, ink, decision,
                                      n_chains)
        elif model == "nonrecursive":
            assignment = generate_nonrecursive(trial, ink)
        elif model in ("euclidean", "hausdorff"):
            assignment = generate_with_metric(trial, _metric_by_name(model), ink)
        elif model == "random":
            rng = np.random.default_rng(seed)
            assignment = tuple(bool(b) for b in
                               rng.integers(2, size=trial.n_segments))
        else:
            raise ValueError(f"unknown model {model!r}")
        scores = tasks.evaluate_generation(assignment, trial, ink)
        row["assignment"] = "".join("1" if b else "0" for b in assignment)
        row.update(scores)
        return row
    raise ValueError(f"unknown task {task!r}")


def run_experiment(suite, task: str, model: str, g: gr.MetaGrammar | None = None,
                   seed=0, n_steps: int | None = None, decision: str = "last",
                   n_chains: int = 1, n_participants: int = 1,
                   ink: render.InkParams | None = None,
                   n_jobs: int | None = None) -> ExperimentReport:
    """Run one model over a suite, ``n_participants`` independently seeded
    times per trial, optionally across worker processes."""
    if task not in ("classification", "generation"):
        raise ValueError(f"unknown task {task!r}")
    if model not in MODELS:
        raise ValueError(f"unknown model {model!r}")
    if model == "bpl":
        if g is None:
            g = gr.default_grammar()
        if n_steps is None:
            n_steps = PARTICIPANT_STEPS[suite[0].condition]
    ss = np.random.SeedSequence(seed)
    jobs = []
    for p in range(n_participants):
        for i, trial in enumerate(suite):
            job_seed = np.random.SeedSequence(entropy=ss.entropy,
                                              spawn_key=(p, i))
            jobs.append((task, model, i, trial, p, g, n_steps, decision,
                         n_chains, ink, job_seed))
    n_jobs = n_jobs or os.cpu_count() or 1
    report = ExperimentReport(task, model)
    if n_jobs <= 1 or len(jobs) <= 1:
        report.rows = [_run_one(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            report.rows = list(pool.map(_run_one, jobs, chunksize=1))
    return report


def simulate_participants(suite, task: str, g: gr.MetaGrammar,
                          n_participants: int, n_steps: int, seed=0,
                          ink: render.InkParams | None = None,
                          n_jobs: int | None = None) -> ExperimentReport:
    """Resource-bounded BPL participants: one short chain each, decision
    taken from the chain's final sample."""
    return run_experiment(suite, task, "bpl", g, seed=seed, n_steps=n_steps,
                          decision="last", n_chains=1,
                          n_participants=n_participants, ink=ink,
                          n_jobs=n_jobs)


def dose_response(suite, task: str, g: gr.MetaGrammar, step_grid,
                  n_participants: int, seed=0,
                  ink: render.InkParams | None = None,
                  n_jobs: int | None = None) -> dict:
    """Mean participant performance at each chain length in ``step_grid``."""
    out = {}
    for n_steps in step_grid:
        report = simulate_participants(suite, task, g, n_participants,
                                       n_steps, seed=(seed, n_steps), ink=ink,
                                       n_jobs=n_jobs)
        s = report.summary()
        out[int(n_steps)] = (s["accuracy"] if task == "classification"
                             else s["exact_visual_match"])
    return out
