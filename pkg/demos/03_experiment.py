"""Reproduce the model comparison: recursive inference vs. baselines.

Builds a classification suite (pick the true next growth step out of six)
and a generation suite (toggle the mature figure's segments to produce the
next step), then scores resource-bounded MCMC "participants" against
similarity-metric and non-recursive baselines.  Small settings so the
whole script runs in about a minute; the full-size numbers live in the
acceptance tests.

Run:  python demos/03_experiment.py
"""

from growthlab.experiment import (all_off_statistics,
                                  build_classification_suite,
                                  build_generation_suite, run_experiment,
                                  suite_concepts)
from growthlab.grammar import default_grammar
from growthlab.render import InkParams

g = default_grammar()
ink = InkParams()
concepts = suite_concepts(g, n=8, seed=0)
cls_suite = build_classification_suite(g, "incremental", seed=0, ink=ink,
                                       concepts=concepts, resolution=100)
gen_suite = build_generation_suite(g, "incremental", seed=0, ink=ink,
                                   concepts=concepts, resolution=100,
                                   n_trials=5)
print(f"{len(cls_suite)} classification trials, "
      f"{len(gen_suite)} generation trials\n")

print("model           classification   generation exact")
for model in ("bpl", "nonrecursive", "euclidean", "hausdorff", "random"):
    cls = run_experiment(cls_suite, "classification", model, g, seed=0,
                         n_steps=300, ink=ink).summary()["accuracy"]
    gen = run_experiment(gen_suite, "generation", model, g, seed=0,
                         n_steps=300, ink=ink).summary()["exact_visual_match"]
    print(f"{model:<15} {cls:14.2f}   {gen:16.2f}")

stats = all_off_statistics(gen_suite, ink)
print(f"\nleave-everything-inert baseline: "
      f"{stats['segment_accuracy']:.2f} segment accuracy, "
      f"{stats['exact_visual_match']:.2f} exact")
