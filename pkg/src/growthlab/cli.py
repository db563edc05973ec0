"""Command-line entry points: sample concepts, infer programs from images,
run the experiment suites, and serve the trial API."""

from __future__ import annotations

import json
from pathlib import Path

import click
import numpy as np

from . import experiment as ex
from . import files, grammar as gr, imageio, inference, render, tasks
from .config import RunConfig, load_config
from .lsystem import expansions_up_to


def _config(path, seed) -> RunConfig:
    cfg = load_config(path) if path else RunConfig()
    if seed is not None:
        cfg.seed = seed
    return cfg


@click.group()
def main():
    """Infer, render, and experiment with recursive growth programs."""


@main.command()
@click.option("-n", "n", default=1, show_default=True, help="Concepts to sample.")
@click.option("-o", "out", type=click.Path(), required=True, help="Output directory.")
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--seed", type=int, default=None)
@click.option("--mode", type=click.Choice(["raw", "shape", "stimulus"]),
              default="stimulus", show_default=True)
def sample(n, out, config_path, seed, mode):
    """Sample constraint-passing concepts and render their growth steps."""
    cfg = _config(config_path, seed)
    g = cfg.grammar()
    ink = cfg.ink()
    rng = np.random.default_rng(cfg.seed)
    directory = Path(out)
    directory.mkdir(parents=True, exist_ok=True)
    for i in range(n):
        system, _ = gr.sample_lsystem(g, rng, mode=mode)
        files.write_concept(system, directory / f"concept{i:03d}.json")
        strings = expansions_up_to(system, 4, cfg.max_symbols)
        for d, s in enumerate(strings):
            mean = render.render_mean(s, system.angle_deg, ink, cfg.resolution)
            imageio.write_pgm(directory / f"concept{i:03d}_d{d}.pgm", mean)
        click.echo(f"concept{i:03d}: {system.f_rule!r} angle {system.angle_deg} "
                   f"({len(strings)} depths rendered)")


@main.command()
@click.argument("images", nargs=-1, type=click.Path(exists=True), required=True)
@click.option("--depths", default=None,
              help="Comma-separated depths of the images, e.g. 0,1,2.")
@click.option("--unknown-depth", is_flag=True,
              help="Single mature exemplar at an unknown depth.")
@click.option("--steps", default=2000, show_default=True)
@click.option("--chains", default=1, show_default=True)
@click.option("-o", "out", type=click.Path(), required=True)
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--seed", type=int, default=None)
def infer(images, depths, unknown_depth, steps, chains, out, config_path, seed):
    """Infer a growth program from rendered step images (P4 bitmaps)."""
    cfg = _config(config_path, seed)
    g = cfg.grammar()
    ink = cfg.ink()
    imgs = tuple(imageio.read_pbm(p) for p in images)
    if unknown_depth:
        if len(imgs) != 1:
            raise click.UsageError("--unknown-depth takes exactly one image")
        problem = inference.InferenceProblem(imgs, None)
    else:
        if depths is None:
            depth_list = tuple(range(len(imgs)))
        else:
            depth_list = tuple(int(d) for d in depths.split(","))
        problem = inference.InferenceProblem(imgs, depth_list)
    scorer = inference.Scorer(problem, ink, cfg.max_symbols)
    seeds = np.random.SeedSequence(cfg.seed).spawn(chains)
    directory = Path(out)
    directory.mkdir(parents=True, exist_ok=True)
    best = None
    for c, s in enumerate(seeds):
        result = inference.run_chain(problem, g, steps, s, scorer=scorer,
                                     record=True)
        files.write_trace(result.records, directory / f"trace{c}.jsonl")
        if best is None or result.best.log_post > best.log_post:
            best = result.best
    system = best.tree.lsystem()
    files.write_concept(system, directory / "map_concept.json")
    summary = {"f_rule": system.f_rule, "angle_deg": system.angle_deg,
               "log_post": best.log_post}
    if problem.unknown_depth:
        summary["depth"] = int(best.depth)
    (directory / "result.json").write_text(json.dumps(summary, indent=2) + "\n")
    click.echo(json.dumps(summary))


@main.command()
@click.option("--task", type=click.Choice(["classify", "generate"]), required=True)
@click.option("--model", type=click.Choice(ex.MODELS), required=True)
@click.option("--condition", type=click.Choice(["incremental", "block"]),
              default=None, help="Defaults to the config's condition.")
@click.option("--steps", type=int, default=None,
              help="Chain length for the bpl model (defaults per condition).")
@click.option("--participants", default=1, show_default=True)
@click.option("--chains", default=1, show_default=True)
@click.option("--decision", type=click.Choice(["last", "map"]), default="last",
              show_default=True)
@click.option("--suite", "suite_path", type=click.Path(exists=True),
              help="Load a previously written suite instead of regenerating.")
@click.option("-o", "out", type=click.Path(), required=True)
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--seed", type=int, default=None)
def experiment(task, model, condition, steps, participants, chains, decision,
               suite_path, out, config_path, seed):
    """Run one model over a regenerated (or loaded) trial suite."""
    cfg = _config(config_path, seed)
    g = cfg.grammar()
    ink = cfg.ink()
    condition = condition or cfg.condition
    task_name = "classification" if task == "classify" else "generation"
    if suite_path:
        suite = files.read_suite(suite_path)
    else:
        concepts = ex.suite_concepts(g, cfg.suite_sizes["classification"],
                                     cfg.seed)
        if task_name == "classification":
            suite = ex.build_classification_suite(
                g, condition, cfg.suite_sizes["classification"], cfg.seed,
                ink, cfg.resolution, concepts=concepts)
        else:
            suite = ex.build_generation_suite(
                g, condition, cfg.suite_sizes["generation"], cfg.seed,
                ink, cfg.resolution, concepts=concepts)
    if steps is None:
        steps = cfg.chain_steps[condition]
    report = ex.run_experiment(suite, task_name, model, g, seed=cfg.seed,
                               n_steps=steps, decision=decision,
                               n_chains=chains, n_participants=participants,
                               ink=ink)
    directory = Path(out)
    directory.mkdir(parents=True, exist_ok=True)
    (directory / "report.tsv").write_text(report.to_tsv())
    summary = report.format_summary()
    (directory / "summary.txt").write_text(summary + "\n")
    if not suite_path:
        files.write_suite(suite, directory / "suite")
    click.echo(summary)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--suite", "suite_path", type=click.Path(exists=True),
              help="Serve a previously written generation suite.")
@click.option("--seed", type=int, default=None)
def serve(host, port, config_path, suite_path, seed):
    """Serve trials, scoring, and model predictions over HTTP."""
    import uvicorn

    from .service import create_app

    cfg = _config(config_path, seed)
    app = create_app(cfg, suite_path=suite_path)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
