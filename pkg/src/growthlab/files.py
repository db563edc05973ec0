"""On-disk formats: concept files, trial-suite bundles, chain traces, and
ink-parameter files.  Concepts, suites, and traces are JSON (line-delimited
for traces); images live beside the suite document as portable bitmaps."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import imageio, render, tasks
from .lsystem import LSystem, forward_positions


def concept_to_dict(system: LSystem) -> dict:
    return {"axiom": system.axiom, "angle_deg": system.angle_deg,
            "f_rule": system.f_rule, "g_rule": system.g_rule}


def concept_from_dict(d: dict) -> LSystem:
    return LSystem(axiom=d["axiom"], angle_deg=float(d["angle_deg"]),
                   f_rule=d["f_rule"], g_rule=d["g_rule"])


def write_concept(system: LSystem, path):
    Path(path).write_text(json.dumps(concept_to_dict(system), indent=2) + "\n")


def read_concept(path) -> LSystem:
    return concept_from_dict(json.loads(Path(path).read_text()))


# ---------------------------------------------------------------------------
# chain traces


def write_trace(records, path):
    """Line-delimited JSON: one record per retained step."""
    with open(path, "w") as fh:
        for step, f_rule, angle, depth, log_post, accepted in records:
            fh.write(json.dumps({
                "step": int(step), "f_rule": f_rule, "angle_deg": float(angle),
                "depth": None if depth is None else int(depth),
                "log_post": float(log_post), "accepted": bool(accepted),
            }) + "\n")


def read_trace(path) -> list:
    out = []
    with open(path) as fh:
        for line in fh:
            if line.strip():
                r = json.loads(line)
                out.append((r["step"], r["f_rule"], r["angle_deg"], r["depth"],
                            r["log_post"], r["accepted"]))
    return out


# ---------------------------------------------------------------------------
# trial suites


def _write_image(image: np.ndarray, directory: Path, name: str) -> str:
    imageio.write_pbm(directory / name, image)
    return name


def write_suite(suite, path):
    """Bundle a suite as ``<path>/suite.json`` plus P4 images beside it."""
    directory = Path(path)
    directory.mkdir(parents=True, exist_ok=True)
    trials = []
    for i, trial in enumerate(suite):
        entry = {
            "concept": concept_to_dict(trial.concept),
            "condition": trial.condition,
            "observed": [
                {"depth": int(d),
                 "image": _write_image(img, directory, f"t{i:02d}_obs{d}.pbm")}
                for d, img in trial.observed
            ],
        }
        if isinstance(trial, tasks.ClassificationTrial):
            entry["task"] = "classification"
            entry["candidates"] = [
                _write_image(c, directory, f"t{i:02d}_cand{j}.pbm")
                for j, c in enumerate(trial.candidates)
            ]
            entry["truth_index"] = trial.truth_index
            entry["distractor_systems"] = [concept_to_dict(s)
                                           for s in trial.distractor_systems]
        else:
            entry["task"] = "generation"
            entry["base_string"] = trial.interface.base_string
            entry["truth_assignment"] = [bool(b) for b in trial.truth_assignment]
            entry["truth_image"] = _write_image(trial.truth_image, directory,
                                                f"t{i:02d}_truth.pbm")
        trials.append(entry)
    doc = {"trials": trials}
    (directory / "suite.json").write_text(json.dumps(doc, indent=2) + "\n")


def read_suite(path) -> list:
    directory = Path(path)
    doc = json.loads((directory / "suite.json").read_text())
    suite = []
    for entry in doc["trials"]:
        concept = concept_from_dict(entry["concept"])
        observed = tuple(
            (o["depth"], imageio.read_pbm(directory / o["image"]))
            for o in entry["observed"]
        )
        if entry["task"] == "classification":
            suite.append(tasks.ClassificationTrial(
                concept=concept, condition=entry["condition"],
                observed=observed,
                candidates=tuple(imageio.read_pbm(directory / name)
                                 for name in entry["candidates"]),
                truth_index=int(entry["truth_index"]),
                distractor_systems=tuple(
                    concept_from_dict(d)
                    for d in entry.get("distractor_systems", ())),
            ))
        else:
            base = entry["base_string"]
            interface = tasks.ToggleInterface(concept, base,
                                              tuple(forward_positions(base)))
            suite.append(tasks.GenerationTrial(
                concept=concept, condition=entry["condition"],
                observed=observed, interface=interface,
                truth_assignment=tuple(bool(b)
                                       for b in entry["truth_assignment"]),
                truth_image=imageio.read_pbm(directory / entry["truth_image"]),
            ))
    return suite
